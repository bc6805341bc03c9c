//! Decomposition of tensor powers and the growth series `b_n`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cartan::{CartanError, RootDatum, Weight};
use crate::charring::{irreducible_character, CharError, FormalCharacter};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrowthError {
    #[error("summand {index}: {source}")]
    Summand { index: usize, source: CartanError },
    #[error("summand {index}: multiplicity must be positive")]
    ZeroMultiplicity { index: usize },
    #[error("representation has no summands")]
    EmptyRep,
    #[error("negative multiplicity {value} extracted at {weight}; input is not a character")]
    NegativeMultiplicity { weight: Weight, value: BigInt },
    #[error("peeling reached {weight} with coefficient {value}; input is not a character")]
    NotACharacter { weight: Weight, value: BigInt },
    #[error("n_max must be at least 1")]
    EmptyRange,
    #[error(transparent)]
    Char(#[from] CharError),
}

/// A representation given by its irreducible summands.
#[derive(Debug, Clone)]
pub struct RepSpec {
    datum: Arc<RootDatum>,
    summands: Vec<(Weight, u64)>,
}

impl RepSpec {
    pub fn new(datum: Arc<RootDatum>, summands: Vec<(Weight, u64)>) -> Result<Self, GrowthError> {
        if summands.is_empty() {
            return Err(GrowthError::EmptyRep);
        }
        for (index, (hw, mult)) in summands.iter().enumerate() {
            datum
                .check_weight(hw)
                .map_err(|source| GrowthError::Summand { index, source })?;
            if !datum.is_dominant(hw) {
                return Err(GrowthError::Summand {
                    index,
                    source: CartanError::NotDominant(hw.clone()),
                });
            }
            if *mult == 0 {
                return Err(GrowthError::ZeroMultiplicity { index });
            }
        }
        Ok(RepSpec { datum, summands })
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn summands(&self) -> &[(Weight, u64)] {
        &self.summands
    }

    /// Number of irreducible summands counted with multiplicity.
    pub fn summand_count(&self) -> u64 {
        self.summands.iter().map(|(_, m)| m).sum()
    }

    pub fn dim(&self) -> BigInt {
        self.summands
            .iter()
            .map(|(hw, m)| self.datum.weyl_dimension(hw).expect("validated") * BigInt::from(*m))
            .sum()
    }

    /// The dual representation: highest weights `-w0(lambda)`.
    pub fn dual(&self) -> Self {
        let summands = self
            .summands
            .iter()
            .map(|(hw, m)| (self.datum.to_dominant(&-hw).weight, *m))
            .collect();
        RepSpec {
            datum: self.datum.clone(),
            summands,
        }
    }
}

/// Formal character of the representation.
pub fn rep_character(spec: &RepSpec) -> Result<FormalCharacter, GrowthError> {
    let mut chi = FormalCharacter::zero(spec.datum.clone());
    for (hw, mult) in &spec.summands {
        let irr = irreducible_character(&spec.datum, hw)?;
        chi = chi.add(&irr.scale(&BigInt::from(*mult)))?;
    }
    Ok(chi)
}

/// Highest-weight multiplicities `a_lambda` of one representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionTable {
    pub n: usize,
    pub entries: BTreeMap<Weight, BigInt>,
    pub b: BigInt,
}

impl DecompositionTable {
    fn from_entries(entries: BTreeMap<Weight, BigInt>) -> Self {
        let b = entries.values().sum();
        DecompositionTable { n: 0, entries, b }
    }

    pub fn at_power(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    /// `sum a_lambda * dim(lambda)`, which must equal the dimension of the
    /// decomposed representation.
    pub fn weighted_dimension(&self, rd: &RootDatum) -> BigInt {
        self.entries
            .iter()
            .map(|(lam, a)| a * rd.weyl_dimension(lam).expect("table keys are dominant"))
            .sum()
    }
}

/// Reads `a_lambda` off the dominant coefficients of `chi * prod (1 - [-alpha])`.
pub fn extract_multiplicities(chi: &FormalCharacter) -> Result<DecompositionTable, GrowthError> {
    let rd = chi.datum().clone();
    let diff = chi.apply_root_difference();
    let mut entries = BTreeMap::new();
    for (w, c) in diff.iter() {
        if !rd.is_dominant(w) {
            continue;
        }
        if c.is_negative() {
            let worst = diff
                .iter()
                .filter(|(w, c)| rd.is_dominant(w) && c.is_negative())
                .map(|(w, c)| (w.clone(), c.clone()))
                .min()
                .expect("at least one negative entry");
            return Err(GrowthError::NegativeMultiplicity {
                weight: worst.0,
                value: worst.1,
            });
        }
        entries.insert(w.clone(), c.clone());
    }
    Ok(DecompositionTable::from_entries(entries))
}

/// Normalized counterpart of [`extract_multiplicities`]: returns the sum of
/// the extracted dominant coefficients and the number of coefficients above
/// a relative noise floor.
pub fn extract_normalized(chi: &FormalCharacter<f64>) -> (f64, usize) {
    const NOISE_FLOOR: f64 = 1e-13;
    let rd = chi.datum().clone();
    let diff = chi.apply_root_difference();
    let mut dominant: Vec<(&Weight, f64)> = diff
        .iter()
        .filter(|(w, _)| rd.is_dominant(w))
        .map(|(w, c)| (w, *c))
        .collect();
    // Fixed summation order keeps results reproducible.
    dominant.sort_by(|a, b| a.0.cmp(b.0));
    let total: f64 = dominant.iter().map(|(_, c)| c).sum();
    let peak = dominant.iter().fold(0.0f64, |m, (_, c)| m.max(c.abs()));
    let support = dominant.iter().filter(|(_, c)| *c > NOISE_FLOOR * peak).count();
    (total, support)
}

/// Pairing with `2 rho^vee`; strictly increasing along the dominance order.
fn dominance_height(rd: &RootDatum, w: &Weight) -> i64 {
    rd.positive_roots().iter().map(|root| rd.coroot_pairing(w, root)).sum()
}

/// Independent decomposition: repeatedly subtract the irreducible character
/// of the maximal remaining weight.
///
/// Weights are ordered by their pairing with `2 rho^vee`, ties broken
/// lexicographically. The pairing refines the dominance order, so the maximal
/// weight of a genuine character is a highest weight.
pub fn peel_oracle(chi: &FormalCharacter) -> Result<DecompositionTable, GrowthError> {
    let rd = chi.datum().clone();
    let mut rest: BTreeMap<(i64, Weight), BigInt> = chi
        .iter()
        .map(|(w, c)| ((dominance_height(&rd, w), w.clone()), c.clone()))
        .collect();
    let mut entries = BTreeMap::new();
    while let Some(((_, top), m)) = rest.pop_last() {
        if !rd.is_dominant(&top) || !m.is_positive() {
            return Err(GrowthError::NotACharacter { weight: top, value: m });
        }
        let irr = irreducible_character(&rd, &top)?;
        for (w, c) in irr.iter() {
            if *w == top {
                continue;
            }
            let key = (dominance_height(&rd, w), w.clone());
            let slot = rest.entry(key.clone()).or_insert_with(BigInt::zero);
            *slot -= c * &m;
            if slot.is_zero() {
                rest.remove(&key);
            }
        }
        entries.insert(top, m);
    }
    Ok(DecompositionTable::from_entries(entries))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Normalized,
}

/// Convolution backend for the running power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Sparse,
    Dense,
    /// Dense for rank at most 3, sparse otherwise.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthOptions {
    pub mode: Mode,
    pub backend: Backend,
    pub memory_budget_bytes: u64,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            mode: Mode::Exact,
            backend: Backend::Auto,
            memory_budget_bytes: 8 << 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    /// Present in exact mode only.
    pub b_exact: Option<BigInt>,
    /// `b_n (dim V)^-n`.
    pub b_normalized: f64,
    pub support_size: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct GrowthSeries {
    pub spec: RepSpec,
    pub mode: Mode,
    pub rows: Vec<GrowthRow>,
    /// Set when the memory budget stopped the run before `n_max`.
    pub truncated: bool,
}

/// `num / den` as a float, accurate even when both overflow `f64`.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 {
        (num << shift as usize).div_floor(den)
    } else {
        num.div_floor(&(den << (-shift) as usize))
    };
    q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-shift as i32)
}

fn estimated_bytes(terms: usize, rank: usize, coeff_bytes: usize) -> u64 {
    // Key vector, coefficient, and hash-table slack.
    (terms as u64) * (24 + 8 * rank as u64 + coeff_bytes as u64 + 16)
}

fn multiply<C: crate::charring::Coeff>(
    acc: &FormalCharacter<C>,
    step: &FormalCharacter<C>,
    backend: Backend,
) -> Result<FormalCharacter<C>, CharError> {
    let dense = match backend {
        Backend::Sparse => false,
        Backend::Dense => true,
        Backend::Auto => acc.datum().rank() <= 3,
    };
    if dense {
        acc.mul_dense(step)
    } else {
        acc.mul(step)
    }
}

/// Computes `b_1..b_{n_max}` by repeated multiplication with the character of `V`.
pub fn growth_series(spec: &RepSpec, n_max: usize, opts: &GrowthOptions) -> Result<GrowthSeries, GrowthError> {
    if n_max == 0 {
        return Err(GrowthError::EmptyRange);
    }
    let chi_v = rep_character(spec)?;
    let dim = spec.dim();
    let rank = spec.datum.rank();
    let mut rows = Vec::with_capacity(n_max);
    let mut truncated = false;
    match opts.mode {
        Mode::Exact => {
            let mut power = chi_v.clone();
            let mut dim_power = dim.clone();
            for n in 1..=n_max {
                let start = Instant::now();
                if n > 1 {
                    power = multiply(&power, &chi_v, opts.backend)?;
                    dim_power *= &dim;
                }
                let table = extract_multiplicities(&power)?;
                let coeff_bytes = (dim_power.bits() as usize).div_ceil(8) + 24;
                rows.push(GrowthRow {
                    n,
                    b_normalized: ratio_to_f64(&table.b, &dim_power),
                    b_exact: Some(table.b),
                    support_size: table.entries.len(),
                    seconds: start.elapsed().as_secs_f64(),
                });
                if n < n_max && estimated_bytes(power.len(), rank, coeff_bytes) > opts.memory_budget_bytes {
                    truncated = true;
                    break;
                }
            }
        }
        Mode::Normalized => {
            let d = dim.to_f64().expect("dimension fits in f64");
            let step = chi_v.map_coeffs(|c| c.to_f64().unwrap_or(f64::NAN) / d);
            let mut power = step.clone();
            for n in 1..=n_max {
                let start = Instant::now();
                if n > 1 {
                    power = multiply(&power, &step, opts.backend)?;
                }
                let (b, support) = extract_normalized(&power);
                rows.push(GrowthRow {
                    n,
                    b_exact: None,
                    b_normalized: b,
                    support_size: support,
                    seconds: start.elapsed().as_secs_f64(),
                });
                if n < n_max && estimated_bytes(power.len(), rank, 8) > opts.memory_budget_bytes {
                    truncated = true;
                    break;
                }
            }
        }
    }
    Ok(GrowthSeries {
        spec: spec.clone(),
        mode: opts.mode,
        rows,
        truncated,
    })
}

/// Fixed-width float formatting shared by all reports.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.12e}")
}

impl GrowthSeries {
    /// CSV with header `n,b_exact,b_normalized,support_size,seconds`. The
    /// timing column is left empty unless `with_timing` is set, so repeated
    /// runs produce identical bytes.
    pub fn to_csv(&self, with_timing: bool) -> String {
        let mut out = String::from("n,b_exact,b_normalized,support_size,seconds\n");
        for row in &self.rows {
            let exact = row.b_exact.as_ref().map(|b| b.to_string()).unwrap_or_default();
            let seconds = if with_timing { format!("{:.6}", row.seconds) } else { String::new() };
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                row.n,
                exact,
                fmt_float(row.b_normalized),
                row.support_size,
                seconds
            );
        }
        out
    }

    pub fn normalized_points(&self) -> Vec<(usize, f64)> {
        self.rows.iter().map(|r| (r.n, r.b_normalized)).collect()
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("series CSV line {line}: {message}")]
pub struct SeriesCsvError {
    pub line: usize,
    pub message: String,
}

/// Reads `(n, b_normalized)` pairs back from a series CSV.
pub fn parse_series_csv(text: &str) -> Result<Vec<(usize, f64)>, SeriesCsvError> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, h)| h.trim()).unwrap_or_default();
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| {
        columns.iter().position(|c| *c == name).ok_or(SeriesCsvError {
            line: 1,
            message: format!("missing column `{name}`"),
        })
    };
    let n_col = find("n")?;
    let b_col = find("b_normalized")?;
    let mut out = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        let get = |col: usize| {
            fields.get(col).copied().ok_or(SeriesCsvError {
                line,
                message: "too few fields".into(),
            })
        };
        let n = get(n_col)?.parse().map_err(|_| SeriesCsvError {
            line,
            message: "bad n".into(),
        })?;
        let b = get(b_col)?.parse().map_err(|_| SeriesCsvError {
            line,
            message: "bad b_normalized".into(),
        })?;
        out.push((n, b));
    }
    Ok(out)
}

/// `(dim V)^n` as a big integer.
pub fn dim_power(spec: &RepSpec, n: usize) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    Pow::pow(spec.dim(), n as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanType;

    fn datum(s: &str) -> Arc<RootDatum> {
        Arc::new(RootDatum::new(&s.parse::<CartanType>().unwrap()))
    }

    fn w(v: &[i64]) -> Weight {
        Weight(v.to_vec())
    }

    fn spec(s: &str, summands: &[(&[i64], u64)]) -> RepSpec {
        RepSpec::new(datum(s), summands.iter().map(|(k, m)| (w(k), *m)).collect()).unwrap()
    }

    fn table(entries: &[(&[i64], i64)]) -> BTreeMap<Weight, BigInt> {
        entries.iter().map(|(k, a)| (w(k), BigInt::from(*a))).collect()
    }

    #[test]
    fn rep_characters() {
        let a1 = spec("A1", &[(&[1], 1)]);
        let chi = rep_character(&a1).unwrap();
        assert_eq!(chi.coefficient(&w(&[1])), BigInt::one());
        assert_eq!(chi.coefficient(&w(&[-1])), BigInt::one());
        assert_eq!(chi.len(), 2);

        let t1 = spec("T1", &[(&[1], 1), (&[0], 1), (&[-1], 1)]);
        assert_eq!(rep_character(&t1).unwrap().dimension(), BigInt::from(3));

        let a2 = spec("A2", &[(&[1, 0], 2)]);
        let chi = rep_character(&a2).unwrap();
        assert!(chi.iter().all(|(_, c)| *c == BigInt::from(2)));
        assert_eq!(chi.dimension(), BigInt::from(6));
    }

    #[test]
    fn invalid_specs() {
        let rd = datum("A2");
        let err = RepSpec::new(rd.clone(), vec![(w(&[1, 0]), 1), (w(&[1]), 1)]).unwrap_err();
        assert!(matches!(err, GrowthError::Summand { index: 1, .. }), "{err}");
        assert!(matches!(
            RepSpec::new(rd.clone(), vec![(w(&[0, -1]), 1)]),
            Err(GrowthError::Summand { index: 0, .. })
        ));
        assert!(matches!(
            RepSpec::new(rd.clone(), vec![(w(&[0, 1]), 0)]),
            Err(GrowthError::ZeroMultiplicity { index: 0 })
        ));
        assert!(matches!(RepSpec::new(rd, vec![]), Err(GrowthError::EmptyRep)));
    }

    #[test]
    fn extraction_examples() {
        let a1 = datum("A1");
        let sq = FormalCharacter::from_terms(
            a1,
            [(w(&[-2]), BigInt::one()), (w(&[0]), BigInt::from(2)), (w(&[2]), BigInt::one())],
        )
        .unwrap();
        let t = extract_multiplicities(&sq).unwrap();
        assert_eq!(t.entries, table(&[(&[0], 1), (&[2], 1)]));
        assert_eq!(t.b, BigInt::from(2));

        let a2 = datum("A2");
        let std = irreducible_character(&a2, &w(&[1, 0])).unwrap();
        let t = extract_multiplicities(&std.mul(&std).unwrap()).unwrap();
        assert_eq!(t.entries, table(&[(&[2, 0], 1), (&[0, 1], 1)]));

        let irr = irreducible_character(&a2, &w(&[3, 1])).unwrap();
        let t = extract_multiplicities(&irr).unwrap();
        assert_eq!(t.entries, table(&[(&[3, 1], 1)]));
    }

    #[test]
    fn extraction_rejects_non_characters() {
        let a1 = datum("A1");
        // [2] + [0] - ... : chi_2 - chi_0 has a negative a_0.
        let bad = irreducible_character(&a1, &w(&[2]))
            .unwrap()
            .sub(&irreducible_character(&a1, &w(&[0])).unwrap())
            .unwrap();
        assert!(matches!(
            extract_multiplicities(&bad),
            Err(GrowthError::NegativeMultiplicity { .. })
        ));
        let lone = FormalCharacter::from_terms(a1, [(w(&[-3]), BigInt::one())]).unwrap();
        assert!(matches!(peel_oracle(&lone), Err(GrowthError::NotACharacter { .. })));
    }

    #[test]
    fn peeling_examples() {
        let a1 = spec("A1", &[(&[1], 1)]);
        let chi = rep_character(&a1).unwrap();
        assert_eq!(peel_oracle(&chi).unwrap().entries, table(&[(&[1], 1)]));
        let cube = chi.mul(&chi).unwrap().mul(&chi).unwrap();
        let t = peel_oracle(&cube).unwrap();
        assert_eq!(t.entries, table(&[(&[3], 1), (&[1], 2)]));
        assert_eq!(t.b, BigInt::from(3));

        let a2t1 = spec("A2xT1", &[(&[1, 0, 1], 1)]);
        let chi = rep_character(&a2t1).unwrap();
        let mut power = chi.clone();
        for _ in 1..4 {
            power = power.mul(&chi).unwrap();
        }
        let t = peel_oracle(&power).unwrap();
        assert!(t.entries.keys().all(|k| k[2] == 4));
        assert_eq!(t, extract_multiplicities(&power).unwrap());
    }

    #[test]
    fn a1_small_series() {
        let a1 = spec("A1", &[(&[1], 1)]);
        let s = growth_series(&a1, 6, &GrowthOptions::default()).unwrap();
        let b: Vec<i64> = s.rows.iter().map(|r| r.b_exact.as_ref().unwrap().to_i64().unwrap()).collect();
        assert_eq!(b, vec![1, 2, 3, 6, 10, 20]);
        assert!(!s.truncated);
    }

    #[test]
    fn first_row_counts_summands() {
        let s = spec("A2xT1", &[(&[1, 0, 0], 2), (&[0, 0, 3], 1), (&[1, 1, -1], 1)]);
        let series = growth_series(&s, 1, &GrowthOptions::default()).unwrap();
        assert_eq!(series.rows[0].b_exact, Some(BigInt::from(4)));
    }

    #[test]
    fn memory_budget_truncates() {
        let a2 = spec("A2", &[(&[1, 0], 1)]);
        let opts = GrowthOptions {
            memory_budget_bytes: 2_000,
            ..Default::default()
        };
        let s = growth_series(&a2, 20, &opts).unwrap();
        assert!(s.truncated);
        assert!(s.rows.len() < 20 && !s.rows.is_empty());
    }

    #[test]
    fn backends_agree() {
        let g2 = spec("G2", &[(&[1, 0], 1)]);
        let chi = rep_character(&g2).unwrap();
        let mut sparse = chi.clone();
        let mut dense = chi.clone();
        for _ in 0..4 {
            sparse = multiply(&sparse, &chi, Backend::Sparse).unwrap();
            dense = multiply(&dense, &chi, Backend::Dense).unwrap();
        }
        assert_eq!(sparse, dense);
    }

    #[test]
    fn ratio_handles_huge_values() {
        let num = Pow::pow(BigInt::from(3), 500u32);
        let den = Pow::pow(BigInt::from(3), 501u32);
        assert!((ratio_to_f64(&num, &den) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(ratio_to_f64(&BigInt::zero(), &den), 0.0);
    }

    #[test]
    fn csv_roundtrip_and_timing_column() {
        let a1 = spec("A1", &[(&[1], 1)]);
        let s = growth_series(&a1, 4, &GrowthOptions::default()).unwrap();
        let csv = s.to_csv(false);
        assert!(csv.starts_with("n,b_exact,b_normalized,support_size,seconds\n"));
        assert!(csv.lines().nth(4).unwrap().starts_with("4,6,3.750000000000e-1,3,"));
        assert!(csv.lines().skip(1).all(|l| l.ends_with(',')));
        let points = parse_series_csv(&csv).unwrap();
        assert_eq!(points.len(), 4);
        assert_eq!(points[3], (4, 0.375));
        assert!(parse_series_csv("n,foo\n1,2\n").is_err());
    }

    #[test]
    fn dual_of_standard() {
        let a2 = spec("A2", &[(&[1, 0], 1), (&[2, 1], 3)]);
        let d = a2.dual();
        assert_eq!(d.summands(), &[(w(&[0, 1]), 1), (w(&[1, 2]), 3)]);
    }
}
