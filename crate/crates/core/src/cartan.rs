//! Root data of connected reductive groups.
//!
//! A [`RootDatum`] is built from a [`CartanType`] (a product of simple types
//! and torus factors). Weights live in fundamental-weight coordinates for the
//! semisimple part followed by plain character exponents for the torus part.
//!
//! Cartan matrix convention: `cartan[i][j] = <alpha_j, alpha_i^vee>`, so the
//! simple root `alpha_j` written in fundamental coordinates is column `j`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::{Add, Index, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CartanError {
    #[error("invalid Cartan factor `{factor}`: {reason}")]
    InvalidFactor { factor: String, reason: String },
    #[error("empty Cartan type")]
    Empty,
    #[error("simple reflection index {index} out of range (semisimple rank {rank})")]
    ReflectionIndex { index: usize, rank: usize },
    #[error("weight {weight} has length {got}, expected {expected}")]
    WeightLength {
        weight: Weight,
        got: usize,
        expected: usize,
    },
    #[error("weight {0} is not dominant")]
    NotDominant(Weight),
}

/// Family letter of a simple factor, or `T` for a one-dimensional torus block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    T,
}

impl Family {
    fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
            Family::T => 'T',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub family: Family,
    pub rank: usize,
}

impl Factor {
    /// Validates the family/rank pair, folding `B1` and `C1` into `A1`.
    pub fn new(family: Family, rank: usize) -> Result<Self, CartanError> {
        let bad = |reason: &str| CartanError::InvalidFactor {
            factor: format!("{}{}", family.letter(), rank),
            reason: reason.to_string(),
        };
        if rank == 0 {
            return Err(bad("rank must be positive"));
        }
        let family = match (family, rank) {
            (Family::B | Family::C, 1) => Family::A,
            (Family::D, 1) => return Err(bad("type D requires rank >= 2")),
            (Family::E, 6..=8) => Family::E,
            (Family::E, _) => return Err(bad("type E requires rank 6, 7 or 8")),
            (Family::F, 4) => Family::F,
            (Family::F, _) => return Err(bad("type F requires rank 4")),
            (Family::G, 2) => Family::G,
            (Family::G, _) => return Err(bad("type G requires rank 2")),
            (f, _) => f,
        };
        Ok(Factor { family, rank })
    }

    fn is_torus(&self) -> bool {
        self.family == Family::T
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

/// A product of simple Cartan types and torus factors, e.g. `A2xA1xT1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CartanType {
    factors: Vec<Factor>,
}

impl CartanType {
    pub fn new(factors: Vec<Factor>) -> Result<Self, CartanError> {
        if factors.is_empty() {
            return Err(CartanError::Empty);
        }
        Ok(CartanType { factors })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }
}

impl FromStr for CartanType {
    type Err = CartanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(CartanError::Empty);
        }
        let mut factors = Vec::new();
        for part in s.split(['x', 'X']) {
            let part = part.trim();
            let bad = |reason: &str| CartanError::InvalidFactor {
                factor: part.to_string(),
                reason: reason.to_string(),
            };
            let mut chars = part.chars();
            let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
                Some('A') => Family::A,
                Some('B') => Family::B,
                Some('C') => Family::C,
                Some('D') => Family::D,
                Some('E') => Family::E,
                Some('F') => Family::F,
                Some('G') => Family::G,
                Some('T') => Family::T,
                Some(_) => return Err(bad("unknown family letter")),
                None => return Err(bad("empty factor")),
            };
            let rank: usize = chars
                .as_str()
                .parse()
                .map_err(|_| bad("rank is not a positive integer"))?;
            factors.push(Factor::new(family, rank)?);
        }
        CartanType::new(factors)
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

/// An integer lattice point: semisimple fundamental coordinates, then torus exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(len: usize) -> Self {
        Weight(vec![0; len])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|c| c * k).collect())
    }
}

impl From<Vec<i64>> for Weight {
    fn from(v: Vec<i64>) -> Self {
        Weight(v)
    }
}

impl Index<usize> for Weight {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl Add<&Weight> for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        debug_assert_eq!(self.len(), rhs.len());
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Weight> for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        debug_assert_eq!(self.len(), rhs.len());
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// A positive root cached in three coordinate systems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveRoot {
    /// Fundamental-weight coordinates, padded with zero torus coordinates.
    pub weight: Weight,
    /// Coefficients in the simple roots.
    pub root_coords: Vec<i64>,
    /// Coefficients of the coroot in the simple coroots.
    pub coroot_coords: Vec<i64>,
    /// Squared length in the symmetrized form (short roots have length 2).
    pub norm: i64,
}

/// Result of moving a weight into the dominant chamber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dominant {
    pub weight: Weight,
    /// Parity of the reflection word, or 0 when the strict query hit a wall.
    pub sign: i8,
    /// Simple reflections applied to the input, in order.
    pub word: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootDatum {
    cartan_type: CartanType,
    rank_ss: usize,
    rank_torus: usize,
    cartan: Vec<Vec<i64>>,
    /// `(alpha_i, alpha_i)` for each simple root.
    simple_norms: Vec<i64>,
    simple_roots: Vec<Weight>,
    positive_roots: Vec<PositiveRoot>,
    delta: Weight,
}

/// Simple-root squared lengths and Dynkin edges of one simple factor.
fn factor_diagram(factor: &Factor) -> (Vec<i64>, Vec<(usize, usize)>) {
    let n = factor.rank;
    let chain = |len: usize| (0..len.saturating_sub(1)).map(|i| (i, i + 1)).collect::<Vec<_>>();
    match factor.family {
        Family::A => (vec![2; n], chain(n)),
        Family::B => {
            let mut norms = vec![4; n];
            norms[n - 1] = 2;
            (norms, chain(n))
        }
        Family::C => {
            let mut norms = vec![2; n];
            norms[n - 1] = 4;
            (norms, chain(n))
        }
        Family::D => {
            let mut edges = chain(n - 1);
            if n >= 3 {
                edges.push((n - 3, n - 1));
            }
            (vec![2; n], edges)
        }
        Family::E => {
            // Bourbaki labels: 1-3-4-5-...-n with 2 attached to 4.
            let mut edges = vec![(0, 2), (1, 3)];
            edges.extend((2..n - 1).map(|i| (i, i + 1)));
            (vec![2; n], edges)
        }
        Family::F => (vec![4, 4, 2, 2], chain(4)),
        Family::G => (vec![2, 6], chain(2)),
        Family::T => (Vec::new(), Vec::new()),
    }
}

impl RootDatum {
    pub fn new(ct: &CartanType) -> Self {
        let mut simple_norms = Vec::new();
        let mut edges = Vec::new();
        let mut rank_torus = 0;
        for factor in ct.factors() {
            if factor.is_torus() {
                rank_torus += factor.rank;
                continue;
            }
            let offset = simple_norms.len();
            let (norms, local) = factor_diagram(factor);
            simple_norms.extend(norms);
            edges.extend(local.into_iter().map(|(i, j)| (i + offset, j + offset)));
        }
        let rank_ss = simple_norms.len();
        let r = rank_ss + rank_torus;

        // Symmetric form on simple roots, then C[i][j] = 2 (a_j, a_i) / (a_i, a_i).
        let mut gram = vec![vec![0i64; rank_ss]; rank_ss];
        for i in 0..rank_ss {
            gram[i][i] = simple_norms[i];
        }
        for &(i, j) in &edges {
            let b = -simple_norms[i].max(simple_norms[j]) / 2;
            gram[i][j] = b;
            gram[j][i] = b;
        }
        let cartan: Vec<Vec<i64>> = (0..rank_ss)
            .map(|i| (0..rank_ss).map(|j| 2 * gram[i][j] / simple_norms[i]).collect())
            .collect();

        let simple_roots: Vec<Weight> = (0..rank_ss)
            .map(|j| {
                let mut w = vec![0; r];
                for (i, row) in cartan.iter().enumerate() {
                    w[i] = row[j];
                }
                Weight(w)
            })
            .collect();

        let mut delta = vec![0; r];
        delta[..rank_ss].fill(1);

        let mut datum = RootDatum {
            cartan_type: ct.clone(),
            rank_ss,
            rank_torus,
            cartan,
            simple_norms,
            simple_roots,
            positive_roots: Vec::new(),
            delta: Weight(delta),
        };
        datum.positive_roots = datum.enumerate_positive_roots(&gram);
        datum
    }

    /// Closure of the simple roots under simple reflections, keeping positive roots.
    fn enumerate_positive_roots(&self, gram: &[Vec<i64>]) -> Vec<PositiveRoot> {
        let n = self.rank_ss;
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
        for j in 0..n {
            let mut c = vec![0; n];
            c[j] = 1;
            seen.insert(c.clone());
            queue.push_back(c);
        }
        let mut found = Vec::new();
        while let Some(c) = queue.pop_front() {
            let weight = self.root_coords_to_weight(&c);
            for i in 0..n {
                let pairing = weight[i];
                if pairing == 0 {
                    continue;
                }
                let mut image = c.clone();
                image[i] -= pairing;
                if image.iter().all(|&x| x >= 0) && image.iter().any(|&x| x > 0) && seen.insert(image.clone()) {
                    queue.push_back(image);
                }
            }
            found.push(c);
        }
        found.sort_by(|a, b| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        found
            .into_iter()
            .map(|c| {
                let norm: i64 = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| c[i] * c[j] * gram[i][j])
                    .sum();
                let coroot_coords = c
                    .iter()
                    .zip(&self.simple_norms)
                    .map(|(&ci, &li)| ci * li / norm)
                    .collect();
                PositiveRoot {
                    weight: self.root_coords_to_weight(&c),
                    root_coords: c,
                    coroot_coords,
                    norm,
                }
            })
            .collect()
    }

    fn root_coords_to_weight(&self, c: &[i64]) -> Weight {
        let mut w = vec![0; self.rank()];
        for (i, row) in self.cartan.iter().enumerate() {
            w[i] = row.iter().zip(c).map(|(a, b)| a * b).sum();
        }
        Weight(w)
    }

    pub fn cartan_type(&self) -> &CartanType {
        &self.cartan_type
    }

    pub fn rank_ss(&self) -> usize {
        self.rank_ss
    }

    pub fn rank_torus(&self) -> usize {
        self.rank_torus
    }

    /// Total lattice rank.
    pub fn rank(&self) -> usize {
        self.rank_ss + self.rank_torus
    }

    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn simple_roots(&self) -> &[Weight] {
        &self.simple_roots
    }

    pub fn simple_norms(&self) -> &[i64] {
        &self.simple_norms
    }

    pub fn positive_roots(&self) -> &[PositiveRoot] {
        &self.positive_roots
    }

    /// Number of positive roots, i.e. the dimension of a maximal unipotent subgroup.
    pub fn u(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn delta(&self) -> &Weight {
        &self.delta
    }

    pub fn zero_weight(&self) -> Weight {
        Weight::zero(self.rank())
    }

    pub fn check_weight(&self, w: &Weight) -> Result<(), CartanError> {
        if w.len() != self.rank() {
            return Err(CartanError::WeightLength {
                weight: w.clone(),
                got: w.len(),
                expected: self.rank(),
            });
        }
        Ok(())
    }

    /// `w - w_i alpha_i`; torus coordinates are untouched.
    pub fn simple_reflection(&self, i: usize, w: &Weight) -> Result<Weight, CartanError> {
        if i >= self.rank_ss {
            return Err(CartanError::ReflectionIndex {
                index: i,
                rank: self.rank_ss,
            });
        }
        self.check_weight(w)?;
        let mut out = w.clone();
        self.reflect_in_place(i, &mut out);
        Ok(out)
    }

    fn reflect_in_place(&self, i: usize, w: &mut Weight) {
        let k = w.0[i];
        if k != 0 {
            for (j, row) in self.cartan.iter().enumerate() {
                w.0[j] -= k * row[i];
            }
        }
    }

    pub fn is_dominant(&self, w: &Weight) -> bool {
        w.0[..self.rank_ss].iter().all(|&c| c >= 0)
    }

    /// True iff every semisimple coordinate is strictly positive.
    pub fn is_strictly_dominant(&self, w: &Weight) -> bool {
        w.0[..self.rank_ss].iter().all(|&c| c > 0)
    }

    /// Reflects at negative coordinates until dominant; sign is the word parity.
    pub fn to_dominant(&self, w: &Weight) -> Dominant {
        let mut weight = w.clone();
        let mut word = Vec::new();
        while let Some(i) = weight.0[..self.rank_ss].iter().position(|&c| c < 0) {
            self.reflect_in_place(i, &mut weight);
            word.push(i);
        }
        let sign = if word.len() % 2 == 0 { 1 } else { -1 };
        Dominant { weight, sign, word }
    }

    /// Like [`to_dominant`](Self::to_dominant), but reports sign 0 when the
    /// dominant representative lies on a wall (has a nontrivial stabilizer).
    pub fn to_dominant_strict(&self, w: &Weight) -> Dominant {
        let mut d = self.to_dominant(w);
        if !self.is_strictly_dominant(&d.weight) {
            d.sign = 0;
        }
        d
    }

    /// Dot action: moves `mu` so that `mu + delta` is dominant. Sign 0 on walls.
    pub fn dot_to_dominant(&self, mu: &Weight) -> Dominant {
        let shifted = mu + &self.delta;
        let mut d = self.to_dominant_strict(&shifted);
        d.weight = &d.weight - &self.delta;
        d
    }

    /// Applies a word of simple reflections, leftmost first.
    pub fn apply_word(&self, word: &[usize], w: &Weight) -> Weight {
        let mut out = w.clone();
        for &i in word {
            self.reflect_in_place(i, &mut out);
        }
        out
    }

    /// `<w, alpha^vee>` for a positive root.
    pub fn coroot_pairing(&self, w: &Weight, root: &PositiveRoot) -> i64 {
        root.coroot_coords
            .iter()
            .zip(&w.0)
            .map(|(d, x)| d * x)
            .sum()
    }

    /// Symmetrized inner product `(w, alpha)` for a root given in simple-root
    /// coordinates. Integral because `(w, alpha_j) = w_j (alpha_j, alpha_j) / 2`.
    pub fn pair_with_root_coords(&self, w: &Weight, root_coords: &[i64]) -> i64 {
        root_coords
            .iter()
            .enumerate()
            .map(|(j, c)| c * w.0[j] * self.simple_norms[j] / 2)
            .sum()
    }

    /// Expresses the semisimple part of `w` in simple-root coordinates, if integral.
    pub fn to_root_coords(&self, w: &Weight) -> Option<Vec<i64>> {
        let n = self.rank_ss;
        // Gauss-Jordan over the rationals on [C | w].
        let mut m: Vec<Vec<Ratio<i64>>> = (0..n)
            .map(|i| {
                let mut row: Vec<Ratio<i64>> = self.cartan[i].iter().map(|&x| Ratio::from(x)).collect();
                row.push(Ratio::from(w.0[i]));
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
            m.swap(col, pivot);
            let p = m[col][col];
            for x in m[col].iter_mut() {
                *x /= p;
            }
            for r in 0..n {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col];
                    for k in 0..=n {
                        let v = m[col][k] * f;
                        m[r][k] -= v;
                    }
                }
            }
        }
        m.iter()
            .map(|row| {
                let x = row[n];
                x.is_integer().then(|| x.to_integer())
            })
            .collect()
    }

    /// Weyl dimension formula, evaluated exactly.
    pub fn weyl_dimension(&self, lam: &Weight) -> Result<BigInt, CartanError> {
        self.check_weight(lam)?;
        if !self.is_dominant(lam) {
            return Err(CartanError::NotDominant(lam.clone()));
        }
        let shifted = lam + &self.delta;
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for root in &self.positive_roots {
            num *= self.coroot_pairing(&shifted, root);
            den *= self.coroot_pairing(&self.delta, root);
        }
        let (q, rem) = num.div_rem(&den);
        debug_assert!(rem.is_zero());
        Ok(q)
    }
}
