//! The `growth`, `fit`, `check` and `gauss` commands.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use tensor_growth::cartan::{RootDatum, Weight};
use tensor_growth::charring::FormalCharacter;
use tensor_growth::gaussian::{compare_report, fit_power_law, weight_moments, GaussError};
use tensor_growth::tensor_growth::{
    dim_power, extract_multiplicities, growth_series, parse_series_csv, peel_oracle, rep_character, GrowthError,
    GrowthSeries,
};

use crate::config::Experiment;
use crate::CliError;

/// Largest power accepted by `check`; the peeling oracle is quadratic in the support.
pub const CHECK_MAX_N: usize = 6;

/// Rounds to 12 significant digits so JSON output is stable and readable.
fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().unwrap_or(x)
    } else {
        x
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_file(dir, name, &text)
}

fn engine_error(e: GrowthError) -> CliError {
    match e {
        GrowthError::NegativeMultiplicity { .. } | GrowthError::NotACharacter { .. } => CliError::Invariant {
            name: "extraction".into(),
            detail: e.to_string(),
        },
        other => CliError::Config(other.to_string()),
    }
}

fn gauss_error(e: GaussError) -> CliError {
    match e {
        GaussError::Degenerate { null_direction } => CliError::Degenerate { null_direction },
        GaussError::Growth(g) => engine_error(g),
        other => CliError::Config(other.to_string()),
    }
}

fn run_series(exp: &Experiment, n_max: usize) -> Result<GrowthSeries, CliError> {
    growth_series(&exp.spec, n_max, &exp.growth_options()).map_err(engine_error)
}

/// Writes series.csv; exit code 2 when the memory budget cut the run short.
pub fn cmd_growth(exp: &Experiment) -> Result<(), CliError> {
    let series = run_series(exp, exp.config.n_max)?;
    write_file(&exp.out_dir, "series.csv", &series.to_csv(exp.config.timing))?;
    if series.truncated {
        return Err(CliError::Truncated {
            last_n: series.rows.last().map(|r| r.n).unwrap_or(0),
        });
    }
    Ok(())
}

/// Fits the normalized series over the configured window and writes fit.json.
pub fn cmd_fit(exp: &Experiment) -> Result<(), CliError> {
    let window = exp
        .config
        .window
        .ok_or_else(|| CliError::Config("field `window`: required by `fit`".into()))?;
    let u = exp.spec.datum().u();
    let target = -(u as f64) / 2.0;
    let tolerance = exp.config.tolerance.unwrap_or(0.1 * (u.max(1) as f64));
    let points = match &exp.config.series_csv {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            parse_series_csv(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => {
            let series = run_series(exp, window.1)?;
            if series.truncated {
                return Err(CliError::Truncated {
                    last_n: series.rows.last().map(|r| r.n).unwrap_or(0),
                });
            }
            series.normalized_points()
        }
    };
    let report = fit_power_law(&points, window, target).map_err(|e| match e {
        GaussError::WindowTooShort { .. } | GaussError::NonPositive { .. } => CliError::Config(e.to_string()),
        other => gauss_error(other),
    })?;
    let pass = (report.r_hat - target).abs() <= tolerance;
    let value = json!({
        "r_hat": round12(report.r_hat),
        "C_hat": round12(report.c_hat),
        "residual_rms": round12(report.residual_rms),
        "target": target,
        "window": [window.0, window.1],
        "u": u,
        "tolerance": round12(tolerance),
        "pass": pass,
    });
    write_json(&exp.out_dir, "fit.json", &value)
}

#[derive(Debug, Serialize)]
struct CheckEntry {
    invariant: &'static str,
    n: Option<usize>,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    detail: String,
}

fn check_character(
    rd: &RootDatum,
    chi: &FormalCharacter,
    n: Option<usize>,
    expected_dim: &BigInt,
    out: &mut Vec<CheckEntry>,
) {
    let witness = chi.weyl_invariance_witness();
    out.push(CheckEntry {
        invariant: "weyl_invariance",
        n,
        pass: witness.is_none(),
        detail: match &witness {
            Some(w) => format!("coefficient at {w} differs from a reflected image"),
            None => format!("{} terms invariant", chi.len()),
        },
        witness: witness.map(|w| w.to_string()),
    });

    let extracted = extract_multiplicities(chi);
    let peeled = peel_oracle(chi);
    let (pass, witness, detail) = match (&extracted, &peeled) {
        (Ok(a), Ok(b)) if a == b => (true, None, format!("{} highest weights, b = {}", a.entries.len(), a.b)),
        (Ok(a), Ok(b)) => {
            let w = a
                .entries
                .iter()
                .find(|(k, v)| b.entries.get(*k) != Some(*v))
                .map(|(k, _)| k.clone())
                .or_else(|| b.entries.keys().find(|k| !a.entries.contains_key(*k)).cloned());
            (false, w.map(|w| w.to_string()), "tables differ".into())
        }
        (Err(e), _) | (_, Err(e)) => {
            let w = match e {
                GrowthError::NegativeMultiplicity { weight, .. } | GrowthError::NotACharacter { weight, .. } => {
                    Some(weight.to_string())
                }
                _ => None,
            };
            (false, w, e.to_string())
        }
    };
    out.push(CheckEntry {
        invariant: "extract_equals_peel",
        n,
        pass,
        witness,
        detail,
    });

    if let Ok(table) = &extracted {
        let total = table.weighted_dimension(rd);
        out.push(CheckEntry {
            invariant: "dimension_conservation",
            n,
            pass: &total == expected_dim,
            witness: None,
            detail: format!("sum a_lambda dim(lambda) = {total}, expected {expected_dim}"),
        });
    }

    let diff = chi.apply_root_difference();
    let mut bad: Option<Weight> = None;
    for (mu, c) in diff.sorted_terms() {
        let d = rd.dot_to_dominant(mu);
        let ok = d.sign != 0 && diff.coefficient(&d.weight) * BigInt::from(d.sign) == *c;
        if !ok {
            bad = Some(mu.clone());
            break;
        }
    }
    out.push(CheckEntry {
        invariant: "dot_anti_invariance",
        n,
        pass: bad.is_none(),
        detail: format!("{} difference terms", diff.len()),
        witness: bad.map(|w| w.to_string()),
    });
}

fn random_character(rd: &std::sync::Arc<RootDatum>, rng: &mut ChaCha8Rng) -> FormalCharacter {
    let terms: Vec<(Weight, BigInt)> = (0..rng.gen_range(1..6))
        .map(|_| {
            let w = Weight((0..rd.rank()).map(|_| rng.gen_range(-3..=3)).collect());
            (w, BigInt::from(rng.gen_range(-3i64..=3)))
        })
        .collect();
    FormalCharacter::from_terms(rd.clone(), terms).expect("weights have datum rank")
}

fn ring_checks(rd: &std::sync::Arc<RootDatum>, seed: u64, out: &mut Vec<CheckEntry>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    const TRIALS: usize = 20;
    for trial in 0..TRIALS {
        let f = random_character(rd, &mut rng);
        let g = random_character(rd, &mut rng);
        let h = random_character(rd, &mut rng);
        let fg = f.mul(&g).expect("same datum");
        let ok = fg == g.mul(&f).expect("same datum")
            && fg.mul(&h).expect("same datum") == f.mul(&g.mul(&h).expect("same datum")).expect("same datum")
            && fg.dimension() == f.dimension() * g.dimension()
            && (rd.rank() > 3 || f.mul_dense(&g).expect("rank checked") == fg);
        if !ok {
            failures.push(trial);
        }
    }
    out.push(CheckEntry {
        invariant: "ring_axioms",
        n: None,
        pass: failures.is_empty(),
        witness: failures.first().map(|t| format!("trial {t}")),
        detail: format!("{TRIALS} seeded triples (seed {seed})"),
    });
}

/// Runs the invariant suite and writes check.json; exit code 3 on any failure.
pub fn cmd_check(exp: &Experiment) -> Result<(), CliError> {
    let rd = exp.spec.datum().clone();
    let mut entries = Vec::new();
    match &exp.config.fixture {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let chi = FormalCharacter::from_text(rd.clone(), &text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            check_character(&rd, &chi, None, &chi.dimension(), &mut entries);
        }
        None => {
            if exp.config.n_max > CHECK_MAX_N {
                return Err(CliError::Config(format!(
                    "field `n_max`: check supports n_max <= {CHECK_MAX_N}, got {}",
                    exp.config.n_max
                )));
            }
            let chi_v = rep_character(&exp.spec).map_err(engine_error)?;
            let mut power = chi_v.clone();
            for n in 1..=exp.config.n_max {
                if n > 1 {
                    power = power.mul(&chi_v).expect("same datum");
                }
                check_character(&rd, &power, Some(n), &dim_power(&exp.spec, n), &mut entries);
            }
        }
    }
    ring_checks(&rd, exp.config.seed, &mut entries);

    let pass = entries.iter().all(|e| e.pass);
    let value = json!({
        "group": rd.cartan_type().to_string(),
        "n_max": exp.config.n_max,
        "pass": pass,
        "checks": entries,
    });
    write_json(&exp.out_dir, "check.json", &value)?;
    match entries.iter().find(|e| !e.pass) {
        None => Ok(()),
        Some(e) => Err(CliError::Invariant {
            name: e.invariant.to_string(),
            detail: format!(
                "{}{}",
                e.detail,
                e.witness.as_ref().map(|w| format!("; witness {w}")).unwrap_or_default()
            ),
        }),
    }
}

/// Writes moments.json and compare.csv; exit code 4 when the weights do not span.
pub fn cmd_gauss(exp: &Experiment) -> Result<(), CliError> {
    let md = weight_moments(&exp.spec).map_err(gauss_error)?;
    let rd = exp.spec.datum();
    let round_vec = |v: Vec<f64>| v.into_iter().map(round12).collect::<Vec<_>>();
    let round_mat = |m: Vec<Vec<f64>>| m.into_iter().map(round_vec).collect::<Vec<_>>();
    let moments = json!({
        "group": rd.cartan_type().to_string(),
        "r": rd.rank(),
        "u": rd.u(),
        "dim": exp.spec.dim().to_string(),
        "mean": round_vec(md.mean_f64()),
        "covariance": round_mat(md.covariance_f64()),
        "Q": md.q().map(|q| round_mat(q.to_vec())),
        "covolume": md.covolume(),
        "step_lattice": md.step_lattice().basis(),
        "spanning": md.is_spanning(),
        "null_direction": md.null_direction(),
    });
    write_json(&exp.out_dir, "moments.json", &moments)?;
    if !md.is_spanning() {
        return Err(CliError::Degenerate {
            null_direction: md.null_direction().unwrap_or_default().to_vec(),
        });
    }
    let n_list = exp.config.n_list.clone().unwrap_or_else(|| vec![exp.config.n_max]);
    let report = compare_report(&exp.spec, &n_list, exp.config.mode, exp.config.truncation).map_err(gauss_error)?;
    write_file(&exp.out_dir, "compare.csv", &report.to_csv())
}
