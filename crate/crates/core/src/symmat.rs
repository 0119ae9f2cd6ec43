//! Dense real symmetric matrices.
//!
//! [`SymMatrix`] stores the lower triangle row by row: entry `(i, j)` with
//! `j <= i` lives at `i * (i + 1) / 2 + j`. This is also the order used by the
//! instance file format, so serialization is a straight copy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Mat};

/// Default PSD tolerance, relative to the spectral magnitude.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;
/// Default relative cut-off for counting an eigenvalue as nonzero.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSym", into = "RawSym")]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawSym {
    n: usize,
    lower: Vec<f64>,
}

impl TryFrom<RawSym> for SymMatrix {
    type Error = Error;
    fn try_from(raw: RawSym) -> Result<Self> {
        SymMatrix::from_lower(raw.n, raw.lower)
    }
}

impl From<SymMatrix> for RawSym {
    fn from(m: SymMatrix) -> Self {
        RawSym {
            n: m.n,
            lower: m.data,
        }
    }
}

#[inline]
fn idx(i: usize, j: usize) -> usize {
    let (i, j) = if j > i { (j, i) } else { (i, j) };
    i * (i + 1) / 2 + j
}

pub fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; packed_len(n)],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from a function evaluated on the lower triangle only.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(packed_len(n));
        for i in 0..n {
            for j in 0..=i {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds from full rows; the input must be exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        let m = Self::from_fn(n, |i, j| rows[i][j]);
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_lower(n: usize, lower: Vec<f64>) -> Result<Self> {
        if lower.len() != packed_len(n) {
            return Err(Error::DimensionMismatch {
                expected: packed_len(n),
                found: lower.len(),
            });
        }
        let m = Self { n, data: lower };
        m.check_finite()?;
        Ok(m)
    }

    /// Symmetric part `(A + Aᵀ)/2` of a square dense matrix.
    pub fn from_dense(a: &Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: a.cols(),
            });
        }
        let m = Self::from_fn(a.rows(), |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
        m.check_finite()?;
        Ok(m)
    }

    /// `x xᵀ`.
    pub fn outer(x: &[f64]) -> Self {
        Self::from_fn(x.len(), |i, j| x[i] * x[j])
    }

    /// `(x yᵀ + y xᵀ) / 2`.
    pub fn sym_outer(x: &[f64], y: &[f64]) -> Self {
        assert_eq!(x.len(), y.len());
        Self::from_fn(x.len(), |i, j| 0.5 * (x[i] * y[j] + y[i] * x[j]))
    }

    fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[idx(i, j)] = v;
    }

    pub fn lower(&self) -> &[f64] {
        &self.data
    }

    pub fn to_dense(&self) -> Mat {
        Mat::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.to_dense().to_rows()
    }

    pub fn check_dim(&self, other: &SymMatrix) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            })
        }
    }

    /// `A • X = Σᵢⱼ AᵢⱼXᵢⱼ`.
    pub fn inner(&self, other: &SymMatrix) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &SymMatrix) -> f64 {
        let mut diag = 0.0;
        let mut off = 0.0;
        let mut k = 0;
        for i in 0..self.n {
            for j in 0..=i {
                let p = self.data[k] * other.data[k];
                if i == j {
                    diag += p;
                } else {
                    off += p;
                }
                k += 1;
            }
        }
        diag + 2.0 * off
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.check_dim(other)?;
        Ok(self.axpy(1.0, other))
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.check_dim(other)?;
        Ok(self.axpy(-1.0, other))
    }

    /// `self + a·other`; panics on dimension mismatch.
    pub fn axpy(&self, a: f64, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n, "axpy dimension mismatch");
        SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x + a * y)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn neg(&self) -> SymMatrix {
        self.scale(-1.0)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner_unchecked(self).sqrt()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.mul_vec(y))
    }

    /// Congruence `Lᵀ A L` for a rectangular `L` with `n` rows, symmetrized.
    pub fn congruence(&self, l: &Mat) -> Result<SymMatrix> {
        if l.rows() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: l.rows(),
            });
        }
        let al = self.to_dense().matmul(l);
        SymMatrix::from_dense(&l.t_matmul(&al))
    }

    /// Block diagonal `diag(A, B)`.
    pub fn block_diag(&self, other: &SymMatrix) -> SymMatrix {
        let (p, q) = (self.n, other.n);
        SymMatrix::from_fn(p + q, |i, j| {
            if i < p && j < p {
                self.get(i, j)
            } else if i >= p && j >= p {
                other.get(i - p, j - p)
            } else {
                0.0
            }
        })
    }

    pub fn eig(&self) -> Result<EigenDecomposition> {
        jacobi_eig(self)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eig()?.values.last().unwrap_or(&0.0))
    }

    /// True iff `λ_min ≥ −tol·max(1, |λ_max|)`.
    ///
    /// Returns false if the eigensolver fails to converge.
    pub fn is_psd(&self, tol: f64) -> bool {
        match self.eig() {
            Ok(e) => psd_margin_ok(&e.values, tol),
            Err(_) => false,
        }
    }

    /// `xᵢ = √λᵢ·vᵢ` for every eigenvalue above `rank_tol·λ_max`.
    pub fn rank1_factors(&self, rank_tol: f64) -> Result<Rank1Decomposition> {
        let e = self.eig()?;
        if !psd_margin_ok(&e.values, DEFAULT_PSD_TOL) {
            return Err(Error::NotPsd {
                min_eig: *e.values.last().unwrap(),
            });
        }
        let lmax = e.values.first().copied().unwrap_or(0.0);
        if lmax <= 0.0 {
            return Ok(Rank1Decomposition::new(self.n, Vec::new()));
        }
        let factors = e
            .values
            .iter()
            .enumerate()
            .take_while(|(_, &l)| l > rank_tol * lmax)
            .map(|(k, &l)| {
                let s = l.sqrt();
                e.vector(k).into_iter().map(|v| v * s).collect()
            })
            .collect();
        Ok(Rank1Decomposition::new(self.n, factors))
    }

    /// Number of eigenvalues above `rank_tol·λ_max`.
    pub fn numerical_rank(&self, rank_tol: f64) -> Result<usize> {
        let e = self.eig()?;
        let lmax = e.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if lmax == 0.0 {
            return Ok(0);
        }
        Ok(e.values.iter().filter(|v| v.abs() > rank_tol * lmax).count())
    }
}

fn psd_margin_ok(values: &[f64], tol: f64) -> bool {
    let (Some(&lmax), Some(&lmin)) = (values.first(), values.last()) else {
        return true;
    };
    lmin >= -tol * lmax.abs().max(1.0)
}

/// `A • X`, the trace inner product on symmetric matrices.
pub fn inner(a: &SymMatrix, x: &SymMatrix) -> Result<f64> {
    a.inner(x)
}

/// Eigenvalues sorted descending with orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.col(k)
    }

    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.values.len();
        let mut out = SymMatrix::zeros(n);
        for (k, &l) in self.values.iter().enumerate() {
            out = out.axpy(l, &SymMatrix::outer(&self.vector(k)));
        }
        out
    }
}

/// Cyclic Jacobi eigensolver.
fn jacobi_eig(a: &SymMatrix) -> Result<EigenDecomposition> {
    let n = a.n();
    let mut m = a.to_dense();
    let mut v = Mat::identity(n);
    let norm = a.frobenius_norm();
    if norm == 0.0 || n <= 1 {
        return Ok(EigenDecomposition {
            values: (0..n).map(|i| m[(i, i)]).collect(),
            vectors: v,
        });
    }
    let off = |m: &Mat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..i {
                s += m[(i, j)] * m[(i, j)];
            }
        }
        (2.0 * s).sqrt()
    };
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off(&m) <= 1e-15 * norm {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off(&m) > 1e-12 * norm {
        return Err(Error::EigenNoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition { values, vectors })
}

/// A list of vectors `xᵢ` with `Σ xᵢxᵢᵀ` equal to some PSD matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Decomposition {
    n: usize,
    pub factors: Vec<Vec<f64>>,
}

impl Rank1Decomposition {
    pub fn new(n: usize, factors: Vec<Vec<f64>>) -> Self {
        debug_assert!(factors.iter().all(|f| f.len() == n));
        Self { n, factors }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.factors.len()
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.factors
            .iter()
            .fold(SymMatrix::zeros(self.n), |acc, x| {
                acc.axpy(1.0, &SymMatrix::outer(x))
            })
    }

    /// `B • xᵢxᵢᵀ` for every factor.
    pub fn values_against(&self, b: &SymMatrix) -> Vec<f64> {
        self.factors.iter().map(|x| b.quad_form(x)).collect()
    }
}
