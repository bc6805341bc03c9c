//! Gaussian local-limit approximations to tensor power multiplicities.
//!
//! The weights of `V`, weighted by multiplicity, define a random walk on the
//! weight lattice whose `n`-step law is the normalized character of `V^n`.
//! Its local limit gives a Gaussian estimate of each weight multiplicity;
//! filtering that estimate through the positive-root difference operator
//! estimates the highest-weight multiplicities `a_lambda`, and summing over
//! dominant weights estimates `b_n (dim V)^-n`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cartan::{CartanError, RootDatum, Weight};
use crate::charring::FormalCharacter;
use crate::lattice::IntLattice;
use crate::tensor_growth::{
    dim_power, extract_multiplicities, extract_normalized, fmt_float, ratio_to_f64, rep_character, GrowthError,
    GrowthSeries, Mode, RepSpec,
};

/// Largest `u` for which the difference filter is expanded over root subsets.
pub const MAX_FILTER_ROOTS: usize = 10;

/// Default cutoff on `Q(x) / 2n` for lattice sums; `e^-40` is below every tolerance used.
pub const DEFAULT_TRUNCATION: f64 = 40.0;

/// Fits over fewer points than this are rejected.
pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussError {
    #[error("weights of V do not span the weight lattice; null direction {null_direction:?}")]
    Degenerate { null_direction: Vec<i64> },
    #[error("difference filter over {u} positive roots is unsupported (limit {max})")]
    TooManyRoots { u: usize, max: usize },
    #[error("fit window [{lo}, {hi}] holds {points} points, need at least {min}")]
    WindowTooShort { lo: usize, hi: usize, points: usize, min: usize },
    #[error("non-positive normalized value {value} at n = {n}")]
    NonPositive { n: usize, value: f64 },
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
}

/// First and second moments of the single-step weight distribution.
#[derive(Debug, Clone)]
pub struct MomentData {
    rank: usize,
    mean: Vec<BigRational>,
    covariance: Vec<Vec<BigRational>>,
    /// Inverse covariance, present when the weights span.
    q: Option<Vec<Vec<f64>>>,
    det_covariance: BigRational,
    step_lattice: IntLattice,
    base_point: Weight,
    null_direction: Option<Vec<i64>>,
}

fn rational(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn rat_to_f64(x: &BigRational) -> f64 {
    ratio_to_f64(x.numer(), x.denom())
}

/// Inverse and determinant by Gauss-Jordan; `None` if singular.
fn invert(m: &[Vec<BigRational>]) -> Option<(Vec<Vec<BigRational>>, BigRational)> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    let mut det = BigRational::one();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        for x in a[col].iter_mut() {
            *x /= &pivot;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..2 * n {
                    let v = &a[col][k] * &f;
                    a[r][k] -= v;
                }
            }
        }
    }
    Some((a.into_iter().map(|row| row[n..].to_vec()).collect(), det))
}

/// A nonzero integer vector in the kernel of a singular symmetric matrix.
fn null_vector(m: &[Vec<BigRational>]) -> Vec<i64> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(p, row);
        let pivot = a[row][col].clone();
        for x in a[row].iter_mut() {
            *x /= &pivot;
        }
        for r in 0..n {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..n {
                    let v = &a[row][k] * &f;
                    a[r][k] -= v;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let free = (0..n).find(|c| !pivot_cols.contains(c)).expect("matrix is singular");
    let mut v = vec![BigRational::zero(); n];
    v[free] = BigRational::one();
    for (r, &pc) in pivot_cols.iter().enumerate() {
        v[pc] = -a[r][free].clone();
    }
    let lcm = v.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| num_integer::gcd(acc, x.clone()));
    ints.iter().map(|x| (x / &g).to_i64().unwrap_or(i64::MAX)).collect()
}

impl MomentData {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn mean(&self) -> &[BigRational] {
        &self.mean
    }

    pub fn mean_f64(&self) -> Vec<f64> {
        self.mean.iter().map(rat_to_f64).collect()
    }

    pub fn covariance(&self) -> &[Vec<BigRational>] {
        &self.covariance
    }

    pub fn covariance_f64(&self) -> Vec<Vec<f64>> {
        self.covariance.iter().map(|r| r.iter().map(rat_to_f64).collect()).collect()
    }

    pub fn q(&self) -> Option<&[Vec<f64>]> {
        self.q.as_deref()
    }

    pub fn step_lattice(&self) -> &IntLattice {
        &self.step_lattice
    }

    pub fn covolume(&self) -> Option<i64> {
        self.step_lattice.covolume()
    }

    pub fn is_spanning(&self) -> bool {
        self.q.is_some()
    }

    pub fn null_direction(&self) -> Option<&[i64]> {
        self.null_direction.as_deref()
    }

    fn require_spanning(&self) -> Result<&[Vec<f64>], GaussError> {
        self.q.as_deref().ok_or_else(|| GaussError::Degenerate {
            null_direction: self.null_direction.clone().unwrap_or_default(),
        })
    }

    /// Quadratic form of the inverse covariance.
    pub fn quad(&self, x: &[f64]) -> Result<f64, GaussError> {
        let q = self.require_spanning()?;
        Ok(quad_form(q, x))
    }

    /// Whether `chi` lies on the coset reached by the walk after `n` steps.
    pub fn on_coset(&self, n: usize, chi: &Weight) -> bool {
        let offset: Vec<i64> = chi
            .coords()
            .iter()
            .zip(self.base_point.coords())
            .map(|(c, b)| c - n as i64 * b)
            .collect();
        self.step_lattice.contains(&offset)
    }

    /// Gaussian normalizer times the step-lattice covolume.
    fn leading_constant(&self) -> f64 {
        let covol = self.covolume().unwrap_or(0) as f64;
        covol / ((2.0 * PI).powf(self.rank as f64 / 2.0) * rat_to_f64(&self.det_covariance).sqrt())
    }

    /// Largest absolute entry of `Q * covariance - I`.
    pub fn inverse_residual(&self) -> Option<f64> {
        let q = self.q.as_ref()?;
        let cov = self.covariance_f64();
        let r = self.rank;
        let mut worst = 0.0f64;
        for i in 0..r {
            for j in 0..r {
                let v: f64 = (0..r).map(|k| q[i][k] * cov[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        Some(worst)
    }
}

fn quad_form(q: &[Vec<f64>], x: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, row) in q.iter().enumerate() {
        let mut acc = 0.0;
        for (j, qij) in row.iter().enumerate() {
            acc += qij * x[j];
        }
        total += x[i] * acc;
    }
    total
}

/// Mean, covariance, inverse form and step lattice of the weights of `V`.
pub fn weight_moments(spec: &RepSpec) -> Result<MomentData, GaussError> {
    let chi = rep_character(spec)?;
    let rank = spec.datum().rank();
    let terms: Vec<(Weight, BigInt)> = chi.sorted_terms().into_iter().map(|(w, c)| (w.clone(), c.clone())).collect();
    let dim = BigRational::from_integer(chi.dimension());

    let mut mean = vec![BigRational::zero(); rank];
    for (w, c) in &terms {
        let p = BigRational::from_integer(c.clone()) / &dim;
        for i in 0..rank {
            mean[i] += &p * rational(w[i]);
        }
    }
    let mut covariance = vec![vec![BigRational::zero(); rank]; rank];
    for (w, c) in &terms {
        let p = BigRational::from_integer(c.clone()) / &dim;
        let centered: Vec<BigRational> = (0..rank).map(|i| rational(w[i]) - &mean[i]).collect();
        for i in 0..rank {
            for j in 0..rank {
                covariance[i][j] += &p * &centered[i] * &centered[j];
            }
        }
    }

    let base_point = terms[0].0.clone();
    let diffs: Vec<Vec<i64>> = terms.iter().skip(1).map(|(w, _)| (w - &base_point).0).collect();
    let step_lattice = IntLattice::from_generators(rank, &diffs);

    let (q, det_covariance, null_direction) = match invert(&covariance) {
        Some((inv, det)) if step_lattice.is_full_rank() => {
            let q = inv.iter().map(|r| r.iter().map(rat_to_f64).collect()).collect();
            (Some(q), det, None)
        }
        _ => (None, BigRational::zero(), Some(null_vector(&covariance))),
    };

    Ok(MomentData {
        rank,
        mean,
        covariance,
        q,
        det_covariance,
        step_lattice,
        base_point,
        null_direction,
    })
}

/// Leading local-limit estimate of `Pr[X_1 + ... + X_n = chi]`.
pub fn local_clt_weight_estimate(md: &MomentData, n: usize, chi: &Weight) -> Result<f64, GaussError> {
    let q = md.require_spanning()?;
    Ok(clt_unchecked(md, q, md.leading_constant(), &md.mean_f64(), n, chi))
}

fn clt_unchecked(md: &MomentData, q: &[Vec<f64>], constant: f64, mean: &[f64], n: usize, chi: &Weight) -> f64 {
    if !md.on_coset(n, chi) {
        return 0.0;
    }
    let nf = n as f64;
    let x: Vec<f64> = chi.coords().iter().zip(mean).map(|(&c, m)| c as f64 - nf * m).collect();
    let exponent = -quad_form(q, &x) / (2.0 * nf);
    constant * nf.powf(-(md.rank as f64) / 2.0) * exponent.exp()
}

/// Estimate of `b_n (dim V)^-n` together with the lattice points summed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BnEstimate {
    pub value: f64,
    pub points: usize,
    /// No dominant coset point fell inside the truncation region.
    pub empty: bool,
}

/// The local-limit estimate filtered through the positive-root difference operator.
pub struct FilteredGaussian<'a> {
    md: &'a MomentData,
    rd: &'a RootDatum,
    q: &'a [Vec<f64>],
    constant: f64,
    mean: Vec<f64>,
    /// Expansion of `prod (1 - [-alpha])` as `(shift, coefficient)`, evaluated at `lambda + shift`.
    shifts: Vec<(Weight, f64)>,
}

impl<'a> FilteredGaussian<'a> {
    pub fn new(md: &'a MomentData, rd: &'a RootDatum) -> Result<Self, GaussError> {
        let q = md.require_spanning()?;
        if rd.u() > MAX_FILTER_ROOTS {
            return Err(GaussError::TooManyRoots {
                u: rd.u(),
                max: MAX_FILTER_ROOTS,
            });
        }
        let datum = Arc::new(rd.clone());
        let one = FormalCharacter::monomial(datum.clone(), datum.zero_weight(), BigInt::one()).expect("zero weight");
        let product = one.apply_root_difference();
        let shifts = product
            .sorted_terms()
            .into_iter()
            .map(|(s, c)| (-s, c.to_f64().expect("small coefficient")))
            .collect();
        Ok(FilteredGaussian {
            md,
            rd,
            q,
            constant: md.leading_constant(),
            mean: md.mean_f64(),
            shifts,
        })
    }

    /// Number of distinct shifts after collecting equal subset sums.
    pub fn shift_count(&self) -> usize {
        self.shifts.len()
    }

    fn a_lambda_unchecked(&self, n: usize, lam: &Weight) -> f64 {
        self.shifts
            .iter()
            .map(|(s, c)| c * clt_unchecked(self.md, self.q, self.constant, &self.mean, n, &(lam + s)))
            .sum()
    }

    pub fn a_lambda(&self, n: usize, lam: &Weight) -> Result<f64, GaussError> {
        self.rd.check_weight(lam)?;
        if !self.rd.is_dominant(lam) {
            return Err(CartanError::NotDominant(lam.clone()).into());
        }
        Ok(self.a_lambda_unchecked(n, lam))
    }

    /// Sums the filtered estimate over dominant coset points with `Q(lambda - n mean) / 2n <= truncation`.
    pub fn b_n(&self, n: usize, truncation: f64) -> BnEstimate {
        let r = self.md.rank;
        let nf = n as f64;
        let cov = self.md.covariance_f64();
        let radius_sq = 2.0 * nf * truncation;
        let mut lo = Vec::with_capacity(r);
        let mut hi = Vec::with_capacity(r);
        for i in 0..r {
            let center = nf * self.mean[i];
            let half = (radius_sq * cov[i][i]).sqrt();
            let mut l = (center - half).ceil() as i64;
            if i < self.rd.rank_ss() {
                l = l.max(0);
            }
            lo.push(l);
            hi.push((center + half).floor() as i64);
        }
        let mut value = 0.0;
        let mut points = 0;
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return BnEstimate {
                value,
                points,
                empty: true,
            };
        }
        let mut cur = lo.clone();
        loop {
            let lam = Weight(cur.clone());
            if self.md.on_coset(n, &lam) {
                let x: Vec<f64> = cur.iter().zip(&self.mean).map(|(&c, m)| c as f64 - nf * m).collect();
                if quad_form(self.q, &x) <= radius_sq {
                    value += self.a_lambda_unchecked(n, &lam);
                    points += 1;
                }
            }
            // Odometer over the box, last coordinate fastest.
            let mut i = r;
            loop {
                if i == 0 {
                    return BnEstimate {
                        value,
                        points,
                        empty: points == 0,
                    };
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = lo[i];
            }
        }
    }
}

/// Filtered Gaussian estimate of `a_lambda (dim V)^-n`.
pub fn approx_a_lambda(md: &MomentData, rd: &RootDatum, n: usize, lam: &Weight) -> Result<f64, GaussError> {
    FilteredGaussian::new(md, rd)?.a_lambda(n, lam)
}

/// Estimate of `b_n (dim V)^-n` with the default truncation.
pub fn approx_b_n(md: &MomentData, rd: &RootDatum, n: usize) -> Result<BnEstimate, GaussError> {
    Ok(FilteredGaussian::new(md, rd)?.b_n(n, DEFAULT_TRUNCATION))
}

/// Least-squares fit of `log y = log C + r log n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    pub window: (usize, usize),
    pub r_hat: f64,
    #[serde(rename = "C_hat")]
    pub c_hat: f64,
    pub residual_rms: f64,
    pub target: f64,
}

/// Fits a power law to `(n, value)` pairs with `n` in the inclusive window.
pub fn fit_power_law(points: &[(usize, f64)], window: (usize, usize), target: f64) -> Result<FitReport, GaussError> {
    let (lo, hi) = window;
    let selected: Vec<(usize, f64)> = points.iter().copied().filter(|(n, _)| (lo..=hi).contains(n)).collect();
    if selected.len() < MIN_FIT_POINTS {
        return Err(GaussError::WindowTooShort {
            lo,
            hi,
            points: selected.len(),
            min: MIN_FIT_POINTS,
        });
    }
    if let Some(&(n, value)) = selected.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(GaussError::NonPositive { n, value });
    }
    let xs: Vec<f64> = selected.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = selected.iter().map(|(_, v)| v.ln()).collect();
    let m = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / m;
    let y_mean = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let residual_rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(FitReport {
        window,
        r_hat: slope,
        c_hat: intercept.exp(),
        residual_rms,
        target,
    })
}

/// Fits the normalized growth series against the exponent `-u/2`.
pub fn fit_exponent(series: &GrowthSeries, window: (usize, usize)) -> Result<FitReport, GaussError> {
    let target = -(series.spec.datum().u() as f64) / 2.0;
    fit_power_law(&series.normalized_points(), window, target)
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompareRow {
    Growth {
        n: usize,
        exact: f64,
        approx: f64,
    },
    Multiplicity {
        n: usize,
        lambda: Weight,
        exact: f64,
        approx: f64,
    },
}

impl CompareRow {
    pub fn n(&self) -> usize {
        match self {
            CompareRow::Growth { n, .. } | CompareRow::Multiplicity { n, .. } => *n,
        }
    }

    /// `approx / exact`; NaN when the exact value is zero.
    pub fn ratio(&self) -> f64 {
        let (exact, approx) = match self {
            CompareRow::Growth { exact, approx, .. } | CompareRow::Multiplicity { exact, approx, .. } => (exact, approx),
        };
        if *exact == 0.0 {
            f64::NAN
        } else {
            approx / exact
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,n,lambda,exact,approx,ratio\n");
        for row in &self.rows {
            let (kind, lambda, exact, approx) = match row {
                CompareRow::Growth { exact, approx, .. } => ("b_n", String::new(), exact, approx),
                CompareRow::Multiplicity {
                    lambda, exact, approx, ..
                } => (
                    "a_lambda",
                    lambda.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "),
                    exact,
                    approx,
                ),
            };
            let _ = writeln!(
                out,
                "{kind},{},{lambda},{},{},{}",
                row.n(),
                fmt_float(*exact),
                fmt_float(*approx),
                fmt_float(row.ratio())
            );
        }
        out
    }

    pub fn growth_rows(&self) -> impl Iterator<Item = &CompareRow> {
        self.rows.iter().filter(|r| matches!(r, CompareRow::Growth { .. }))
    }
}

/// Dominant coset points near `0`, `k delta` and `2k delta` with `k = floor(sqrt n)`.
fn sample_weights(md: &MomentData, rd: &RootDatum, n: usize) -> Vec<Weight> {
    let r = rd.rank();
    let k = (n as f64).sqrt().floor() as i64;
    let mean = md.mean_f64();
    let torus_center: Vec<i64> = (rd.rank_ss()..r).map(|i| (n as f64 * mean[i]).round() as i64).collect();
    let reach = md.covolume().unwrap_or(1).clamp(1, 4);
    // Offsets ordered by L1 norm, then lexicographically.
    let mut offsets: Vec<Vec<i64>> = vec![vec![]];
    for i in 0..r {
        let range: Vec<i64> = if i < rd.rank_ss() { (0..=reach).collect() } else { (-reach..=reach).collect() };
        offsets = offsets
            .into_iter()
            .flat_map(|o| {
                range.iter().map(move |&x| {
                    let mut o = o.clone();
                    o.push(x);
                    o
                })
            })
            .collect();
    }
    offsets.sort_by_key(|o| (o.iter().map(|x| x.abs()).sum::<i64>(), o.clone()));
    let mut out: Vec<Weight> = Vec::new();
    for scale in [0, k, 2 * k] {
        let mut base: Vec<i64> = vec![scale; rd.rank_ss()];
        base.extend(&torus_center);
        let base = Weight(base);
        if let Some(w) = offsets
            .iter()
            .map(|o| &base + &Weight(o.clone()))
            .find(|w| rd.is_dominant(w) && md.on_coset(n, w))
        {
            if !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

/// Joins the exact and approximate pipelines at each requested `n`.
pub fn compare_report(spec: &RepSpec, n_list: &[usize], mode: Mode, truncation: f64) -> Result<CompareReport, GaussError> {
    let mut ns: Vec<usize> = n_list.iter().copied().filter(|&n| n > 0).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() {
        return Ok(CompareReport::default());
    }
    let md = weight_moments(spec)?;
    let rd = spec.datum().clone();
    let filter = FilteredGaussian::new(&md, &rd)?;
    let chi_v = rep_character(spec)?;
    let n_max = *ns.last().expect("nonempty");
    let mut rows = Vec::new();

    // Each step yields exact normalized b_n and a lookup for a_lambda.
    let mut emit = |n: usize, b_exact: f64, a_exact: &dyn Fn(&Weight) -> f64| {
        let est = filter.b_n(n, truncation);
        rows.push(CompareRow::Growth {
            n,
            exact: b_exact,
            approx: est.value,
        });
        for lam in sample_weights(&md, &rd, n) {
            rows.push(CompareRow::Multiplicity {
                n,
                exact: a_exact(&lam),
                approx: filter.a_lambda_unchecked(n, &lam),
                lambda: lam,
            });
        }
    };

    match mode {
        Mode::Exact => {
            let mut power = chi_v.clone();
            for n in 1..=n_max {
                if n > 1 {
                    power = power.mul(&chi_v).map_err(GrowthError::from)?;
                }
                if ns.binary_search(&n).is_ok() {
                    let table = extract_multiplicities(&power)?;
                    let denom = dim_power(spec, n);
                    let b = ratio_to_f64(&table.b, &denom);
                    emit(n, b, &|lam| {
                        table.entries.get(lam).map(|a| ratio_to_f64(a, &denom)).unwrap_or(0.0)
                    });
                }
            }
        }
        Mode::Normalized => {
            let d = spec.dim().to_f64().expect("dimension fits in f64");
            let step = chi_v.map_coeffs(|c| c.to_f64().unwrap_or(f64::NAN) / d);
            let mut power = step.clone();
            for n in 1..=n_max {
                if n > 1 {
                    power = power.mul(&step).map_err(GrowthError::from)?;
                }
                if ns.binary_search(&n).is_ok() {
                    let (b, _) = extract_normalized(&power);
                    let diff = power.apply_root_difference();
                    emit(n, b, &|lam| diff.coefficient(lam));
                }
            }
        }
    }
    Ok(CompareReport { rows })
}
