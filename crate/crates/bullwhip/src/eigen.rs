//! Dense symmetric matrices and their eigenvalues.
//!
//! The solver is a cyclic Jacobi iteration: it sweeps all off-diagonal
//! positions in row order, annihilating each with a plane rotation, until
//! the off-diagonal Frobenius norm falls below `1e-12` times the initial
//! Frobenius norm of the whole matrix. Covariance matrices in this crate
//! are tiny (one row per product), so the quadratic sweep cost is
//! irrelevant next to the guarantee that rotations preserve the spectrum
//! exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check: the largest `|a_ij - a_ji|`
/// may not exceed this times the largest absolute entry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Convergence threshold for the Jacobi iteration, relative to the initial
/// Frobenius norm.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Upper bound on Jacobi sweeps before giving up. Far beyond what any
/// matrix this crate builds can need; hitting it signals broken input.
pub const MAX_SWEEPS: usize = 100;

/// Dense square matrix in row-major order.
///
/// Invariants: at least one row, square shape, all entries finite.
/// Serialized as an array of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    /// Square matrix of zeros with `n >= 1` rows.
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument {
                reason: "matrix order must be at least 1".into(),
            });
        }
        Ok(Self {
            n,
            data: vec![0.0; n * n],
        })
    }

    /// Builds from explicit rows, validating shape and finiteness.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument {
                reason: "matrix must have at least one row".into(),
            });
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument {
                    reason: format!("row {i} has {} entries, expected {n}", row.len()),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidArgument {
                        reason: format!("non-finite entry at ({i}, {j})"),
                    });
                }
                data.push(v);
            }
        }
        Ok(Self { n, data })
    }

    /// Number of rows (and columns).
    #[must_use]
    pub fn order(&self) -> usize {
        self.n
    }

    /// Entry at `(i, j)`. Panics on out-of-range indices; this is an
    /// internal container, not a user input surface.
    #[must_use]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range");
        self.data[i * self.n + j]
    }

    /// Sets entry `(i, j)`. Same indexing contract as [`SquareMatrix::get`].
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range");
        self.data[i * self.n + j] = value;
    }

    /// Sum of diagonal entries.
    #[must_use]
    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Largest absolute entry.
    #[must_use]
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Largest absolute difference between an entry and its transpose
    /// partner. Zero for exactly symmetric matrices.
    #[must_use]
    pub fn symmetry_gap(&self) -> f64 {
        let mut gap = 0.0_f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                gap = gap.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        gap
    }

    /// Sum of all entries: the quadratic form of the all-ones vector.
    #[must_use]
    pub fn entry_sum(&self) -> f64 {
        self.data.iter().sum()
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn off_diagonal_frobenius(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    let v = self.get(i, j);
                    sum += v * v;
                }
            }
        }
        sum.sqrt()
    }
}

impl TryFrom<Vec<Vec<f64>>> for SquareMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<SquareMatrix> for Vec<Vec<f64>> {
    fn from(m: SquareMatrix) -> Self {
        (0..m.n)
            .map(|i| m.data[i * m.n..(i + 1) * m.n].to_vec())
            .collect()
    }
}

/// Eigenvalues of a symmetric matrix, ascending.
///
/// Fails with [`Error::NotSymmetric`] when the symmetry gap exceeds
/// [`SYMMETRY_TOL`] times the largest entry, and with
/// [`Error::ConvergenceFailure`] if [`MAX_SWEEPS`] sweeps do not reach the
/// off-diagonal threshold.
pub fn symmetric_eigenvalues(matrix: &SquareMatrix) -> Result<Vec<f64>> {
    let gap = matrix.symmetry_gap();
    if gap > SYMMETRY_TOL * matrix.max_abs() {
        return Err(Error::NotSymmetric { max_delta: gap });
    }

    let n = matrix.order();
    if n == 1 {
        return Ok(vec![matrix.get(0, 0)]);
    }

    let mut work = matrix.clone();
    // Symmetrize exactly so rotation updates stay self-consistent.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (work.get(i, j) + work.get(j, i));
            work.set(i, j, avg);
            work.set(j, i, avg);
        }
    }

    let target = OFF_DIAGONAL_TOL * work.frobenius();
    for _ in 0..MAX_SWEEPS {
        if work.off_diagonal_frobenius() <= target {
            return Ok(sorted_diagonal(&work));
        }
        jacobi_sweep(&mut work);
    }
    if work.off_diagonal_frobenius() <= target {
        return Ok(sorted_diagonal(&work));
    }
    Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS })
}

/// One cyclic pass of plane rotations over every off-diagonal position.
fn jacobi_sweep(m: &mut SquareMatrix) {
    let n = m.order();
    for p in 0..n - 1 {
        for q in (p + 1)..n {
            let apq = m.get(p, q);
            if apq == 0.0 {
                continue;
            }
            let app = m.get(p, p);
            let aqq = m.get(q, q);
            let theta = 0.5 * (aqq - app) / apq;
            // Smaller root of t^2 + 2t*theta - 1 = 0; the guard keeps
            // theta^2 from overflowing for extreme diagonal spreads.
            let t = if theta.abs() > 1.0e150 {
                0.5 / theta
            } else {
                theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
            };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let tau = s / (1.0 + c);
            let h = t * apq;

            m.set(p, p, app - h);
            m.set(q, q, aqq + h);
            m.set(p, q, 0.0);
            m.set(q, p, 0.0);
            for r in 0..n {
                if r == p || r == q {
                    continue;
                }
                let arp = m.get(r, p);
                let arq = m.get(r, q);
                let new_rp = arp - s * (arq + tau * arp);
                let new_rq = arq + s * (arp - tau * arq);
                m.set(r, p, new_rp);
                m.set(p, r, new_rp);
                m.set(r, q, new_rq);
                m.set(q, r, new_rq);
            }
        }
    }
}

fn sorted_diagonal(m: &SquareMatrix) -> Vec<f64> {
    let mut diag: Vec<f64> = (0..m.order()).map(|i| m.get(i, i)).collect();
    diag.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    diag
}
