//! Sparse arithmetic in the character ring `Z[X]`.
//!
//! A [`FormalCharacter`] is a finite map from weights to nonzero coefficients.
//! Coefficients are exact [`BigInt`]s by default; `f64` coefficients back the
//! normalized mode used for long tensor-power runs.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::cartan::{CartanError, RootDatum, Weight};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharError {
    #[error("characters are defined over different root data")]
    DatumMismatch,
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("dense backend supports rank <= {max}, got rank {rank}")]
    DenseRank { rank: usize, max: usize },
}

/// Coefficient ring for formal characters.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn sub_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn to_f64(&self) -> f64;
    fn parse(s: &str) -> Option<Self>;
}

impl Coeff for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn parse(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn parse(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

/// An element of the group ring of the weight lattice.
#[derive(Clone)]
pub struct FormalCharacter<C: Coeff = BigInt> {
    datum: Arc<RootDatum>,
    terms: FxHashMap<Weight, C>,
}

fn same_datum(a: &Arc<RootDatum>, b: &Arc<RootDatum>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn accumulate<C: Coeff>(terms: &mut FxHashMap<Weight, C>, w: Weight, c: &C) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&w) {
        Some(slot) => {
            slot.add_assign(c);
            if slot.is_zero() {
                terms.remove(&w);
            }
        }
        None => {
            terms.insert(w, c.clone());
        }
    }
}

impl<C: Coeff> FormalCharacter<C> {
    pub fn zero(datum: Arc<RootDatum>) -> Self {
        FormalCharacter {
            datum,
            terms: FxHashMap::default(),
        }
    }

    /// The single term `c [w]`.
    pub fn monomial(datum: Arc<RootDatum>, w: Weight, c: C) -> Result<Self, CharError> {
        Self::from_terms(datum, [(w, c)])
    }

    /// Builds a character from `(weight, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(datum: Arc<RootDatum>, terms: I) -> Result<Self, CharError>
    where
        I: IntoIterator<Item = (Weight, C)>,
    {
        let mut out = Self::zero(datum);
        for (w, c) in terms {
            out.datum.check_weight(&w)?;
            accumulate(&mut out.terms, w, &c);
        }
        Ok(out)
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &Weight) -> C {
        self.terms.get(w).cloned().unwrap_or_else(C::zero)
    }

    pub fn get(&self, w: &Weight) -> Option<&C> {
        self.terms.get(w)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Weight, &C)> {
        self.terms.iter()
    }

    /// Terms in ascending lexicographic weight order.
    pub fn sorted_terms(&self) -> Vec<(&Weight, &C)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> FormalCharacter<D> {
        let mut terms = FxHashMap::default();
        for (w, c) in &self.terms {
            let d = f(c);
            if !d.is_zero() {
                terms.insert(w.clone(), d);
            }
        }
        FormalCharacter {
            datum: self.datum.clone(),
            terms,
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        self.map_coeffs(|c| c.mul(k))
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    fn check_same(&self, other: &Self) -> Result<(), CharError> {
        if same_datum(&self.datum, &other.datum) {
            Ok(())
        } else {
            Err(CharError::DatumMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, CharError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            accumulate(&mut out.terms, w.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CharError> {
        self.add(&other.neg())
    }

    /// Convolution product: the character of a tensor product.
    pub fn mul(&self, other: &Self) -> Result<Self, CharError> {
        self.check_same(other)?;
        let (big, small) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut terms: FxHashMap<Weight, C> =
            FxHashMap::with_capacity_and_hasher(big.len() + 4 * small.len(), Default::default());
        for (u, a) in &small.terms {
            for (v, b) in &big.terms {
                let w = u + v;
                let p = a.mul(b);
                match terms.get_mut(&w) {
                    Some(slot) => slot.add_assign(&p),
                    None => {
                        terms.insert(w, p);
                    }
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(FormalCharacter {
            datum: self.datum.clone(),
            terms,
        })
    }

    /// Convolution through a dense bounding-box array. Rank must be at most 3.
    pub fn mul_dense(&self, other: &Self) -> Result<Self, CharError> {
        const MAX_DENSE_RANK: usize = 3;
        self.check_same(other)?;
        let r = self.datum.rank();
        if r > MAX_DENSE_RANK {
            return Err(CharError::DenseRank {
                rank: r,
                max: MAX_DENSE_RANK,
            });
        }
        if self.is_empty() || other.is_empty() {
            return Ok(Self::zero(self.datum.clone()));
        }
        let bounds = |f: &Self| {
            let mut lo = vec![i64::MAX; r];
            let mut hi = vec![i64::MIN; r];
            for w in f.terms.keys() {
                for i in 0..r {
                    lo[i] = lo[i].min(w[i]);
                    hi[i] = hi[i].max(w[i]);
                }
            }
            (lo, hi)
        };
        let (lo_f, hi_f) = bounds(self);
        let (lo_g, hi_g) = bounds(other);
        let lo: Vec<i64> = (0..r).map(|i| lo_f[i] + lo_g[i]).collect();
        let extent: Vec<usize> = (0..r)
            .map(|i| (hi_f[i] + hi_g[i] - lo[i] + 1) as usize)
            .collect();
        let mut strides = vec![1usize; r];
        for i in (0..r.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * extent[i + 1];
        }
        let size: usize = extent.iter().product();
        // Flat offsets in the output box decompose as (u - lo_f) + (v - lo_g).
        let index = |w: &Weight, offset: &[i64]| -> usize {
            (0..r).map(|i| (w[i] - offset[i]) as usize * strides[i]).sum()
        };
        let f_terms: Vec<(usize, &C)> = self.terms.iter().map(|(w, c)| (index(w, &lo_f), c)).collect();
        let mut grid: Vec<C> = vec![C::zero(); size];
        for (v, b) in &other.terms {
            let base = index(v, &lo_g);
            for (fi, a) in &f_terms {
                grid[base + fi].add_assign(&a.mul(b));
            }
        }
        let mut terms = FxHashMap::default();
        let mut coords = vec![0i64; r];
        for (k, c) in grid.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut rem = k;
            for i in 0..r {
                coords[i] = lo[i] + (rem / strides[i]) as i64;
                rem %= strides[i];
            }
            terms.insert(Weight(coords.clone()), c);
        }
        Ok(FormalCharacter {
            datum: self.datum.clone(),
            terms,
        })
    }

    /// Multiplies by `(1 - [shift])`: coefficient `c(w)` becomes `c(w) - c(w - shift)`.
    pub fn mul_one_minus(&self, shift: &Weight) -> Self {
        let mut terms = self.terms.clone();
        for (w, c) in &self.terms {
            accumulate(&mut terms, w + shift, &c.neg());
        }
        FormalCharacter {
            datum: self.datum.clone(),
            terms,
        }
    }

    /// Multiplies by the product of `(1 - [-alpha])` over positive roots.
    ///
    /// At a dominant weight the result's coefficient is the multiplicity of
    /// the irreducible with that highest weight.
    pub fn apply_root_difference(&self) -> Self {
        let datum = self.datum.clone();
        datum
            .positive_roots()
            .iter()
            .fold(self.clone(), |acc, root| acc.mul_one_minus(&-&root.weight))
    }

    /// Sum of coefficients.
    pub fn dimension(&self) -> C {
        let mut total = C::zero();
        for c in self.terms.values() {
            total.add_assign(c);
        }
        total
    }

    /// A weight whose coefficient differs from that of a simple-reflection
    /// image, if any.
    pub fn weyl_invariance_witness(&self) -> Option<Weight> {
        let rd = &self.datum;
        let mut sorted: Vec<_> = self.terms.iter().collect();
        sorted.sort_by(|a, b| a.0.cmp(b.0));
        for (w, c) in sorted {
            for i in 0..rd.rank_ss() {
                if w[i] == 0 {
                    continue;
                }
                let image = rd.simple_reflection(i, w).expect("index in range");
                if self.terms.get(&image) != Some(c) {
                    return Some(w.clone());
                }
            }
        }
        None
    }

    pub fn is_weyl_invariant(&self) -> bool {
        self.weyl_invariance_witness().is_none()
    }

    /// One term per line, `c : k1 k2 ... kr`, in ascending weight order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (w, c) in self.sorted_terms() {
            out.push_str(&c.to_string());
            out.push_str(" :");
            for k in w.coords() {
                out.push(' ');
                out.push_str(&k.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`to_text`](Self::to_text). Blank lines
    /// and lines starting with `#` are skipped.
    pub fn from_text(datum: Arc<RootDatum>, text: &str) -> Result<Self, CharError> {
        let mut out = Self::zero(datum);
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |message: String| CharError::Parse { line, message };
            let (coef, coords) = trimmed
                .split_once(':')
                .ok_or_else(|| err("missing `:` separator".into()))?;
            let c = C::parse(coef.trim()).ok_or_else(|| err(format!("bad coefficient `{}`", coef.trim())))?;
            let w = coords
                .split_whitespace()
                .map(|k| k.parse::<i64>().map_err(|_| err(format!("bad coordinate `{k}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let w = Weight(w);
            out.datum
                .check_weight(&w)
                .map_err(|e| err(e.to_string()))?;
            accumulate(&mut out.terms, w, &c);
        }
        Ok(out)
    }
}

impl<C: Coeff> PartialEq for FormalCharacter<C> {
    fn eq(&self, other: &Self) -> bool {
        same_datum(&self.datum, &other.datum) && self.terms == other.terms
    }
}

impl<C: Coeff> fmt::Debug for FormalCharacter<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.sorted_terms()).finish()
    }
}

/// Dominant weights `mu <= lam` with the height of `lam - mu`.
fn dominant_weights_below(rd: &RootDatum, lam: &Weight) -> Vec<(Weight, i64)> {
    let mut heights: FxHashMap<Weight, i64> = FxHashMap::default();
    let mut queue = VecDeque::new();
    heights.insert(lam.clone(), 0);
    queue.push_back(lam.clone());
    while let Some(mu) = queue.pop_front() {
        let h = heights[&mu];
        for root in rd.positive_roots() {
            let nu = &mu - &root.weight;
            if rd.is_dominant(&nu) && !heights.contains_key(&nu) {
                let height: i64 = root.root_coords.iter().sum();
                heights.insert(nu.clone(), h + height);
                queue.push_back(nu);
            }
        }
    }
    let mut out: Vec<_> = heights.into_iter().collect();
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)));
    out
}

/// Dominant weight multiplicities of the irreducible with highest weight
/// `lam`, by Freudenthal's recursion.
pub fn dominant_multiplicities(rd: &RootDatum, lam: &Weight) -> Result<Vec<(Weight, i64)>, CharError> {
    rd.check_weight(lam)?;
    if !rd.is_dominant(lam) {
        return Err(CartanError::NotDominant(lam.clone()).into());
    }
    let two_delta = rd.delta().scaled(2);
    let mut mults: FxHashMap<Weight, i64> = FxHashMap::default();
    let mut out = Vec::new();
    for (mu, height) in dominant_weights_below(rd, lam) {
        if height == 0 {
            mults.insert(mu.clone(), 1);
            out.push((mu, 1));
            continue;
        }
        let mut num = 0i64;
        for root in rd.positive_roots() {
            let root_height: i64 = root.root_coords.iter().sum();
            let mut k = 1;
            let mut nu = &mu + &root.weight;
            while k * root_height <= height {
                let dom = rd.to_dominant(&nu).weight;
                if let Some(&m) = mults.get(&dom) {
                    num += m * rd.pair_with_root_coords(&nu, &root.root_coords);
                }
                nu = &nu + &root.weight;
                k += 1;
            }
        }
        num *= 2;
        let diff = rd
            .to_root_coords(&(lam - &mu))
            .expect("lam - mu lies in the root lattice");
        let sum = &(lam + &mu) + &two_delta;
        let den = rd.pair_with_root_coords(&sum, &diff);
        debug_assert!(den > 0 && num % den == 0, "Freudenthal division {num}/{den}");
        let m = num / den;
        mults.insert(mu.clone(), m);
        out.push((mu, m));
    }
    Ok(out)
}

/// Full Weyl orbit of `w` under simple reflections.
pub fn weyl_orbit(rd: &RootDatum, w: &Weight) -> Vec<Weight> {
    let mut seen: FxHashSet<Weight> = FxHashSet::default();
    let mut queue = VecDeque::new();
    seen.insert(w.clone());
    queue.push_back(w.clone());
    let mut out = Vec::new();
    while let Some(x) = queue.pop_front() {
        for i in 0..rd.rank_ss() {
            if x[i] == 0 {
                continue;
            }
            let y = rd.simple_reflection(i, &x).expect("index in range");
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
        out.push(x);
    }
    out
}

/// Character of the irreducible representation with highest weight `lam`.
pub fn irreducible_character(datum: &Arc<RootDatum>, lam: &Weight) -> Result<FormalCharacter, CharError> {
    let dominant = dominant_multiplicities(datum, lam)?;
    let mut terms = FxHashMap::default();
    for (mu, m) in dominant {
        if m == 0 {
            continue;
        }
        let m = BigInt::from(m);
        for w in weyl_orbit(datum, &mu) {
            terms.insert(w, m.clone());
        }
    }
    Ok(FormalCharacter {
        datum: datum.clone(),
        terms,
    })
}
