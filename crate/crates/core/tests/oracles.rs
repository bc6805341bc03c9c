//! Cross-checks against independent brute-force oracles.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Pow, ToPrimitive, Zero};
use tensor_growth::cartan::{CartanType, RootDatum, Weight};
use tensor_growth::charring::{irreducible_character, FormalCharacter};
use tensor_growth::gaussian::{approx_a_lambda, local_clt_weight_estimate, weight_moments};
use tensor_growth::tensor_growth::{
    extract_multiplicities, growth_series, rep_character, GrowthOptions, Mode, RepSpec,
};

fn datum(s: &str) -> Arc<RootDatum> {
    Arc::new(RootDatum::new(&s.parse::<CartanType>().unwrap()))
}

fn w(v: &[i64]) -> Weight {
    Weight(v.to_vec())
}

/// All roots reachable from the simple roots by reflections, positive or not.
fn all_roots_by_reflection(a: &[[i64; 2]; 2]) -> usize {
    let mut seen: HashSet<[i64; 2]> = HashSet::new();
    let mut stack = vec![[1, 0], [0, 1]];
    while let Some(beta) = stack.pop() {
        if !seen.insert(beta) {
            continue;
        }
        for i in 0..2 {
            // <beta, alpha_i^vee> = sum_j beta_j a[i][j]
            let pairing = beta[0] * a[i][0] + beta[1] * a[i][1];
            let mut image = beta;
            image[i] -= pairing;
            stack.push(image);
        }
    }
    seen.len()
}

#[test]
fn g2_positive_roots_match_reflection_closure() {
    let roots = all_roots_by_reflection(&[[2, -1], [-3, 2]]);
    assert_eq!(roots, 12);
    assert_eq!(datum("G2").u(), roots / 2);
}

#[test]
fn a2_and_g2_roots_are_minimal_vectors() {
    // For A2 and G2 the roots are exactly the root-lattice vectors of root length.
    for (name, gram, lengths) in [
        ("A2", [[2i64, -1], [-1, 2]], vec![2i64]),
        ("G2", [[2, -3], [-3, 6]], vec![2, 6]),
    ] {
        let mut count = 0;
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                let norm = a * a * gram[0][0] + 2 * a * b * gram[0][1] + b * b * gram[1][1];
                if lengths.contains(&norm) {
                    count += 1;
                }
            }
        }
        assert_eq!(datum(name).u() * 2, count, "{name}");
    }
}

#[test]
fn sl3_dimension_closed_form() {
    let a2 = datum("A2");
    for a in 0..6 {
        for b in 0..6 {
            let expected = (a + 1) * (b + 1) * (a + b + 2) / 2;
            assert_eq!(a2.weyl_dimension(&w(&[a, b])).unwrap(), BigInt::from(expected));
        }
    }
}

#[test]
fn adjoint_characters_are_roots_plus_cartan() {
    // Highest roots: A2 (1,1), B2 (0,2), G2 (0,1) in Bourbaki labelling.
    for (name, highest) in [("A2", vec![1, 1]), ("B2", vec![0, 2]), ("G2", vec![0, 1])] {
        let rd = datum(name);
        let mut terms: Vec<(Weight, BigInt)> = vec![(rd.zero_weight(), BigInt::from(rd.rank_ss() as i64))];
        for root in rd.positive_roots() {
            terms.push((root.weight.clone(), BigInt::one()));
            terms.push((-&root.weight, BigInt::one()));
        }
        let oracle = FormalCharacter::from_terms(rd.clone(), terms).unwrap();
        assert_eq!(irreducible_character(&rd, &Weight(highest)).unwrap(), oracle, "{name}");
    }
}

#[test]
fn a2_square_splits_into_sym_and_alt() {
    let a2 = datum("A2");
    let e = [w(&[1, 0]), w(&[-1, 1]), w(&[0, -1])];
    let mut sym = Vec::new();
    let mut alt = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            let s = &e[i] + &e[j];
            sym.push((s.clone(), BigInt::one()));
            if i < j {
                alt.push((s, BigInt::one()));
            }
        }
    }
    let sym = FormalCharacter::from_terms(a2.clone(), sym).unwrap();
    let alt = FormalCharacter::from_terms(a2.clone(), alt).unwrap();
    assert_eq!(irreducible_character(&a2, &w(&[2, 0])).unwrap(), sym);
    assert_eq!(irreducible_character(&a2, &w(&[0, 1])).unwrap(), alt);
    let std = irreducible_character(&a2, &w(&[1, 0])).unwrap();
    let table = extract_multiplicities(&std.mul(&std).unwrap()).unwrap();
    let expected: BTreeMap<Weight, BigInt> = [(w(&[2, 0]), BigInt::one()), (w(&[0, 1]), BigInt::one())].into();
    assert_eq!(table.entries, expected);
}

#[test]
fn a1_series_matches_clebsch_gordan_recursion() {
    // m_{n+1}(j) = m_n(j - 1) + m_n(j + 1) on highest weights j >= 0.
    let n_max = 30;
    let mut m: Vec<BigInt> = vec![BigInt::zero(); n_max + 2];
    m[1] = BigInt::one();
    let mut oracle = vec![BigInt::one()];
    for _ in 2..=n_max {
        let mut next = vec![BigInt::zero(); n_max + 2];
        for j in 0..=n_max {
            if m[j].is_zero() {
                continue;
            }
            next[j + 1] += &m[j];
            if j > 0 {
                next[j - 1] += &m[j];
            }
        }
        m = next;
        oracle.push(m.iter().sum());
    }
    let spec = RepSpec::new(datum("A1"), vec![(w(&[1]), 1)]).unwrap();
    let series = growth_series(&spec, n_max, &GrowthOptions::default()).unwrap();
    let got: Vec<BigInt> = series.rows.iter().map(|r| r.b_exact.clone().unwrap()).collect();
    assert_eq!(got, oracle);
}

#[test]
fn powers_have_multiplicative_dimension() {
    let pool: Vec<(&str, Vec<(Vec<i64>, u64)>)> = vec![
        ("A2", vec![(vec![1, 0], 1), (vec![0, 0], 2)]),
        ("B2", vec![(vec![0, 1], 1)]),
        ("A1xT1", vec![(vec![2, 1], 1), (vec![0, -1], 1)]),
    ];
    for (name, summands) in pool {
        let spec = RepSpec::new(datum(name), summands.into_iter().map(|(k, m)| (Weight(k), m)).collect()).unwrap();
        let chi = rep_character(&spec).unwrap();
        let d = chi.dimension();
        assert_eq!(d, spec.dim());
        let mut power = chi.clone();
        for n in 2..=4u32 {
            power = power.mul(&chi).unwrap();
            assert_eq!(power.dimension(), Pow::pow(&d, n), "{name} n={n}");
        }
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn ratio(num: &BigInt, den: &BigInt) -> f64 {
    tensor_growth::tensor_growth::ratio_to_f64(num, den)
}

#[test]
fn a1_local_clt_at_100() {
    let spec = RepSpec::new(datum("A1"), vec![(w(&[1]), 1)]).unwrap();
    let md = weight_moments(&spec).unwrap();
    let est = local_clt_weight_estimate(&md, 100, &w(&[0])).unwrap();
    let exact = ratio(&binomial(100, 50), &Pow::pow(BigInt::from(2), 100u32));
    assert!((est - 0.079788).abs() < 1e-6, "{est}");
    assert!((exact - 0.079589).abs() < 1e-6, "{exact}");
}

#[test]
fn a1_local_clt_uniform_in_bulk() {
    // sup over Q(chi)/n <= 4 of |exact / estimate - 1| at n = 400.
    let n = 400u64;
    let spec = RepSpec::new(datum("A1"), vec![(w(&[1]), 1)]).unwrap();
    let md = weight_moments(&spec).unwrap();
    let total = Pow::pow(BigInt::from(2), n as u32);
    let mut worst = 0.0f64;
    for chi in (-40i64..=40).step_by(2) {
        let exact = ratio(&binomial(n, ((n as i64 + chi) / 2) as u64), &total);
        let est = local_clt_weight_estimate(&md, n as usize, &w(&[chi])).unwrap();
        worst = worst.max((exact / est - 1.0).abs());
    }
    assert!(worst < 0.05, "{worst}");
}

#[test]
fn a1_filtered_estimate_matches_ballot_numbers() {
    let n = 400u64;
    let spec = RepSpec::new(datum("A1"), vec![(w(&[1]), 1)]).unwrap();
    let md = weight_moments(&spec).unwrap();
    let total = Pow::pow(BigInt::from(2), n as u32);
    for (lam, tol) in [(0i64, 0.05), (40, 0.10)] {
        let k = ((n as i64 + lam) / 2) as u64;
        let ballot = binomial(n, k) - binomial(n, k + 1);
        let exact = ratio(&ballot, &total);
        let est = approx_a_lambda(&md, spec.datum(), n as usize, &w(&[lam])).unwrap();
        assert!((est / exact - 1.0).abs() < tol, "lambda={lam}: {est} vs {exact}");
    }
}

#[test]
fn normalized_mode_tracks_exact_mode() {
    for (name, hw) in [("A1", vec![1]), ("A2", vec![1, 0]), ("B2", vec![1, 0])] {
        let spec = RepSpec::new(datum(name), vec![(Weight(hw), 1)]).unwrap();
        let exact = growth_series(&spec, 30, &GrowthOptions::default()).unwrap();
        let approx = growth_series(
            &spec,
            30,
            &GrowthOptions {
                mode: Mode::Normalized,
                ..Default::default()
            },
        )
        .unwrap();
        for (e, a) in exact.rows.iter().zip(&approx.rows) {
            let rel = (e.b_normalized - a.b_normalized).abs() / e.b_normalized;
            assert!(rel < 1e-10, "{name} n={}: {rel}", e.n);
        }
    }
}

#[test]
fn self_dual_growth_is_monotone_in_steps_of_two() {
    for (name, hw) in [("A1", vec![1]), ("B2", vec![1, 0]), ("G2", vec![1, 0])] {
        let spec = RepSpec::new(datum(name), vec![(Weight(hw), 1)]).unwrap();
        let s = growth_series(&spec, 10, &GrowthOptions::default()).unwrap();
        let b: Vec<BigInt> = s.rows.iter().map(|r| r.b_exact.clone().unwrap()).collect();
        for i in 0..b.len() - 2 {
            assert!(b[i + 2] >= b[i], "{name}");
        }
        for r in &s.rows {
            assert!(r.b_normalized > 0.0 && r.b_normalized <= 1.0);
        }
    }
}

#[test]
fn growth_root_rate() {
    let spec = RepSpec::new(datum("A2"), vec![(w(&[1, 0]), 1)]).unwrap();
    let s = growth_series(&spec, 24, &GrowthOptions::default()).unwrap();
    let last = s.rows.last().unwrap();
    let b = last.b_exact.as_ref().unwrap().to_f64().unwrap();
    let root = b.powf(1.0 / 24.0);
    assert!(root > 2.0 && root < 3.0, "{root}");
}
