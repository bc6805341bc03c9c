//! End-to-end acceptance suite: one PASS/FAIL line per criterion.

use std::fs;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use tensor_growth::cartan::{CartanType, RootDatum, Weight};
use tensor_growth::gaussian::{approx_a_lambda, approx_b_n, fit_exponent, local_clt_weight_estimate, weight_moments};
use tensor_growth::tensor_growth::{
    extract_multiplicities, growth_series, peel_oracle, ratio_to_f64, rep_character, GrowthOptions, Mode, RepSpec,
};

type Outcome = Result<String, String>;

fn spec(group: &str, summands: &[&[i64]]) -> RepSpec {
    let rd = Arc::new(RootDatum::new(&group.parse::<CartanType>().unwrap()));
    RepSpec::new(rd, summands.iter().map(|w| (Weight(w.to_vec()), 1)).collect()).unwrap()
}

fn pool() -> Vec<RepSpec> {
    vec![
        spec("A1", &[&[1]]),
        spec("A2", &[&[1, 0]]),
        spec("B2", &[&[0, 1]]),
        spec("A1xA1", &[&[1, 0], &[0, 1]]),
        spec("A2xT1", &[&[1, 0, 1]]),
    ]
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn exact_b(spec: &RepSpec, n_max: usize) -> Result<Vec<BigInt>, String> {
    let s = growth_series(spec, n_max, &GrowthOptions::default()).map_err(|e| e.to_string())?;
    Ok(s.rows.into_iter().map(|r| r.b_exact.expect("exact mode")).collect())
}

fn sl2_closed_form() -> Outcome {
    let t = Instant::now();
    let b = exact_b(&spec("A1", &[&[1]]), 30)?;
    let elapsed = t.elapsed();
    for (i, v) in b.iter().enumerate() {
        let n = i as u64 + 1;
        if *v != binomial(n, n / 2) {
            return Err(format!("n={n}: {v} != C({n},{})", n / 2));
        }
    }
    if elapsed > Duration::from_secs(5) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("n <= 30 exact in {:.2}s", elapsed.as_secs_f64()))
}

fn torus_identity() -> Outcome {
    let b = exact_b(&spec("T1", &[&[1], &[0], &[-1]]), 12)?;
    for (i, v) in b.iter().enumerate() {
        if *v != BigInt::from(3).pow(i as u32 + 1) {
            return Err(format!("n={}: {v}", i + 1));
        }
    }
    Ok("b_n = 3^n for n <= 12".into())
}

fn exponent_fits() -> Outcome {
    let cases: [(&str, &[i64], (usize, usize), f64, f64, u64); 3] = [
        ("A1", &[1], (100, 400), -0.5, 0.05, 60),
        ("A2", &[1, 0], (40, 160), -1.5, 0.2, 600),
        ("G2", &[1, 0], (30, 100), -3.0, 0.4, 1800),
    ];
    let opts = GrowthOptions {
        mode: Mode::Normalized,
        ..Default::default()
    };
    let mut parts = Vec::new();
    for (group, hw, window, target, tol, limit) in cases {
        let t = Instant::now();
        let s = growth_series(&spec(group, &[hw]), window.1, &opts).map_err(|e| e.to_string())?;
        let fit = fit_exponent(&s, window).map_err(|e| e.to_string())?;
        let secs = t.elapsed().as_secs_f64();
        let msg = format!("{group} r_hat={:.4} ({secs:.1}s)", fit.r_hat);
        if (fit.r_hat - target).abs() >= tol || secs >= limit as f64 {
            return Err(msg);
        }
        parts.push(msg);
    }
    Ok(parts.join(", "))
}

fn oracle_equivalence() -> Outcome {
    let mut count = 0;
    for s in pool() {
        let chi = rep_character(&s).map_err(|e| e.to_string())?;
        let mut p = chi.clone();
        for n in 1..=5 {
            if n > 1 {
                p = p.mul(&chi).map_err(|e| e.to_string())?;
            }
            let a = extract_multiplicities(&p).map_err(|e| e.to_string())?;
            let b = peel_oracle(&p).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("{} n={n}", s.datum().cartan_type()));
            }
            count += 1;
        }
    }
    Ok(format!("{count} (spec, n) pairs"))
}

fn dimension_conservation() -> Outcome {
    let mut count = 0;
    for s in pool().into_iter().chain([spec("G2", &[&[1, 0]]), spec("T1", &[&[1], &[0], &[-1]])]) {
        let chi = rep_character(&s).map_err(|e| e.to_string())?;
        let mut p = chi.clone();
        let mut dim = s.dim();
        for n in 1..=5 {
            if n > 1 {
                p = p.mul(&chi).map_err(|e| e.to_string())?;
                dim *= s.dim();
            }
            let total = extract_multiplicities(&p).map_err(|e| e.to_string())?.weighted_dimension(s.datum());
            if total != dim {
                return Err(format!("{} n={n}: {total} != {dim}", s.datum().cartan_type()));
            }
            count += 1;
        }
    }
    Ok(format!("{count} (spec, n) pairs"))
}

fn local_clt() -> Outcome {
    let s = spec("A1", &[&[1]]);
    let md = weight_moments(&s).map_err(|e| e.to_string())?;
    let est = local_clt_weight_estimate(&md, 400, &Weight(vec![0])).map_err(|e| e.to_string())?;
    let exact = ratio_to_f64(&binomial(400, 200), &BigInt::from(2).pow(400));
    let rel = (est / exact - 1.0).abs();
    let msg = format!("relative error {rel:.5}");
    if rel < 0.02 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn filtered_gaussian() -> Outcome {
    let n = 400u64;
    let s = spec("A1", &[&[1]]);
    let md = weight_moments(&s).map_err(|e| e.to_string())?;
    let total = BigInt::from(2).pow(n as u32);
    let mut parts = Vec::new();
    for lam in [0i64, 20, 40] {
        let k = ((n as i64 + lam) / 2) as u64;
        let exact = ratio_to_f64(&(binomial(n, k) - binomial(n, k + 1)), &total);
        let est = approx_a_lambda(&md, s.datum(), n as usize, &Weight(vec![lam])).map_err(|e| e.to_string())?;
        let rel = (est / exact - 1.0).abs();
        parts.push(format!("lambda={lam}: {rel:.4}"));
        if rel >= 0.10 {
            return Err(parts.join(", "));
        }
    }
    let exact_b = ratio_to_f64(&binomial(n, n / 2), &total);
    let est_b = approx_b_n(&md, s.datum(), n as usize).map_err(|e| e.to_string())?.value;
    let rel = (est_b / exact_b - 1.0).abs();
    parts.push(format!("b_n: {rel:.4}"));
    if rel >= 0.10 {
        return Err(parts.join(", "));
    }
    Ok(parts.join(", "))
}

fn anti_invariance() -> Outcome {
    let mut terms = 0usize;
    for s in pool() {
        let rd = s.datum().clone();
        let chi = rep_character(&s).map_err(|e| e.to_string())?;
        let mut p = chi.clone();
        for n in 1..=5 {
            if n > 1 {
                p = p.mul(&chi).map_err(|e| e.to_string())?;
            }
            let diff = p.apply_root_difference();
            for (mu, c) in diff.iter() {
                let d = rd.dot_to_dominant(mu);
                if d.sign == 0 || diff.coefficient(&d.weight) * BigInt::from(d.sign) != *c {
                    return Err(format!("{} n={n} at {mu}", rd.cartan_type()));
                }
                terms += 1;
            }
        }
    }
    Ok(format!("{terms} support terms"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("config.json");
    fs::write(
        &cfg,
        r#"{"group": "A2", "rep": [{"highest_weight": [1, 0]}], "n_max": 12, "window": [5, 12], "mode": "normalized", "n_list": [8, 12]}"#,
    )
    .map_err(|e| e.to_string())?;
    let files = ["series.csv", "fit.json", "moments.json", "compare.csv"];
    let mut runs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("run{run}"));
        for cmd in ["growth", "fit", "gauss"] {
            let st = Command::new(env!("CARGO_BIN_EXE_tgrowth"))
                .args([cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
                .status()
                .map_err(|e| e.to_string())?;
            if !st.success() {
                return Err(format!("{cmd} exited with {st}"));
            }
        }
        let contents: Vec<Vec<u8>> = files
            .iter()
            .map(|f| fs::read(out.join(f)).map_err(|e| format!("{f}: {e}")))
            .collect::<Result<_, _>>()?;
        runs.push(contents);
    }
    for (i, f) in files.iter().enumerate() {
        if runs[0][i] != runs[1][i] {
            return Err(format!("{f} differs between runs"));
        }
    }
    Ok(format!("{} files byte-identical across runs", files.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("SL2 closed form", sl2_closed_form),
        ("torus identity", torus_identity),
        ("exponent fits", exponent_fits),
        ("extraction equals peeling", oracle_equivalence),
        ("dimension conservation", dimension_conservation),
        ("local CLT accuracy", local_clt),
        ("filtered Gaussian accuracy", filtered_gaussian),
        ("dot anti-invariance", anti_invariance),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
