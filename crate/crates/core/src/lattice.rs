//! Integer lattices in Hermite normal form.

use serde::Serialize;

/// A sublattice of `Z^dim` stored as the nonzero rows of its row-style Hermite
/// normal form: echelon, positive pivots, entries above each pivot reduced
/// into `[0, pivot)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntLattice {
    dim: usize,
    basis: Vec<Vec<i64>>,
    pivots: Vec<usize>,
}

impl IntLattice {
    pub fn from_generators(dim: usize, generators: &[Vec<i64>]) -> Self {
        let mut rows: Vec<Vec<i64>> = generators
            .iter()
            .filter(|g| g.iter().any(|&x| x != 0))
            .cloned()
            .collect();
        for row in &rows {
            assert_eq!(row.len(), dim, "generator length");
        }
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..dim {
            if top == rows.len() {
                break;
            }
            // Euclid on column `col` among rows[top..].
            loop {
                let pick = (top..rows.len())
                    .filter(|&i| rows[i][col] != 0)
                    .min_by_key(|&i| rows[i][col].abs());
                let Some(p) = pick else { break };
                rows.swap(top, p);
                let mut done = true;
                for i in top + 1..rows.len() {
                    if rows[i][col] != 0 {
                        let q = rows[i][col].div_euclid(rows[top][col]);
                        let pivot_row = rows[top].clone();
                        for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                            *x -= q * y;
                        }
                        if rows[i][col] != 0 {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if rows[top][col] == 0 {
                continue;
            }
            if rows[top][col] < 0 {
                for x in rows[top].iter_mut() {
                    *x = -*x;
                }
            }
            let pivot_row = rows[top].clone();
            for row in rows.iter_mut().take(top) {
                let q = row[col].div_euclid(pivot_row[col]);
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= q * y;
                }
            }
            pivots.push(col);
            rows.retain(|r| r.iter().any(|&x| x != 0));
            top += 1;
        }
        rows.truncate(top);
        IntLattice {
            dim,
            basis: rows,
            pivots,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    /// Index in `Z^dim`, defined only for full-rank lattices.
    pub fn covolume(&self) -> Option<i64> {
        self.is_full_rank()
            .then(|| self.basis.iter().zip(&self.pivots).map(|(row, &p)| row[p]).product())
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let mut rest = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if rest[..p].iter().any(|&x| x != 0) {
                return false;
            }
            if rest[p] % row[p] != 0 {
                return false;
            }
            let q = rest[p] / row[p];
            for (x, y) in rest.iter_mut().zip(row) {
                *x -= q * y;
            }
        }
        rest.iter().all(|&x| x == 0)
    }
}
