//! Small dense linear algebra.
//!
//! Everything here targets the handful of dimensions a location-scale
//! parameter lives in (d ≤ 32). Symmetric eigenproblems use cyclic Jacobi
//! rotations; general determinants and inverses use LU with partial pivoting.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check of [`SpdMatrix`].
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Smallest admissible ratio `λ_min / λ_max` of an [`SpdMatrix`].
pub const CONDITION_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Square dense matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn scalar(v: f64) -> Self {
        Matrix { n: 1, data: vec![v] }
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::domain("matrix must have at least one row"));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::domain(format!(
                    "matrix is not square: row of length {} in a {n}-row matrix",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, v.len(), "matrix/vector dimension mismatch");
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|v| v * factor).collect() }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if (self[(i, j)] - self[(j, i)]).abs() > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetrized(&self) -> Matrix {
        let mut s = self.clone();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                s[(i, j)] = avg;
                s[(j, i)] = avg;
            }
        }
        s
    }

    /// LU factorisation with partial pivoting: `(lu, permutation sign)`,
    /// or `None` when a pivot vanishes.
    fn lu(&self) -> Option<(Matrix, Vec<usize>, f64)> {
        let n = self.n;
        let mut lu = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot == 0.0 || !pivot.is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / lu[(k, k)];
                lu[(i, k)] = factor;
                for j in (k + 1)..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] -= factor * v;
                }
            }
        }
        Some((lu, perm, sign))
    }

    pub fn det(&self) -> f64 {
        match self.lu() {
            Some((lu, _, sign)) => sign * (0..self.n).map(|i| lu[(i, i)]).product::<f64>(),
            None => 0.0,
        }
    }

    /// `log |det A|`, or `-∞` for a singular matrix.
    pub fn log_abs_det(&self) -> f64 {
        match self.lu() {
            Some((lu, _, _)) => (0..self.n).map(|i| lu[(i, i)].abs().ln()).sum(),
            None => f64::NEG_INFINITY,
        }
    }

    /// General inverse; fails on (numerically) singular input.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.n;
        let (lu, perm, _) = self
            .lu()
            .ok_or_else(|| Error::domain("matrix is singular"))?;
        let mut inv = Matrix::zeros(n);
        for col in 0..n {
            // Solve L U x = P e_col.
            let mut x: Vec<f64> = perm.iter().map(|&p| if p == col { 1.0 } else { 0.0 }).collect();
            for i in 0..n {
                for k in 0..i {
                    x[i] -= lu[(i, k)] * x[k];
                }
            }
            for i in (0..n).rev() {
                for k in (i + 1)..n {
                    x[i] -= lu[(i, k)] * x[k];
                }
                x[i] /= lu[(i, i)];
            }
            for (i, v) in x.into_iter().enumerate() {
                inv[(i, col)] = v;
            }
        }
        if !inv.is_finite() {
            return Err(Error::domain("matrix inverse is not finite"));
        }
        Ok(inv)
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        Ok(self.inverse()?.mul_vec(b))
    }
}

/// Eigendecomposition of a symmetric matrix: `A = V diag(values) Vᵀ`,
/// eigenvectors stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymmetricEigen {
    /// `V diag(h(λ)) Vᵀ`.
    pub fn map_values(&self, h: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let mapped: Vec<f64> = self.values.iter().map(|&v| h(v)).collect();
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n)
                    .map(|k| self.vectors[(i, k)] * mapped[k] * self.vectors[(j, k)])
                    .sum();
            }
        }
        out.symmetrized()
    }
}

/// Cyclic Jacobi eigenvalue algorithm for a symmetric matrix.
///
/// Only the upper triangle is trusted; the input is symmetrized first.
pub fn symmetric_eigen(a: &Matrix) -> SymmetricEigen {
    let n = a.dim();
    let mut m = a.symmetrized();
    let mut v = Matrix::identity(n);
    let total: f64 = m.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
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
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    SymmetricEigen { values: (0..n).map(|i| m[(i, i)]).collect(), vectors: v }
}

/// A symmetric positive-definite matrix.
///
/// Symmetric to `1e-12` relative and with `λ_min > 1e-12 λ_max`; the stored
/// entries are exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    inner: Matrix,
}

impl SpdMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::domain("matrix has non-finite entries"));
        }
        if !m.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::domain("matrix is not symmetric"));
        }
        let m = m.symmetrized();
        let eig = symmetric_eigen(&m);
        let max = eig.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = eig.values.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(max > 0.0) || min <= CONDITION_TOL * max {
            return Err(Error::domain(format!(
                "matrix is not positive-definite (eigenvalues in [{min:e}, {max:e}])"
            )));
        }
        Ok(SpdMatrix { inner: m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        SpdMatrix { inner: Matrix::identity(n) }
    }

    pub fn scalar(s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::domain(format!("scale must be positive and finite, got {s}")));
        }
        Ok(SpdMatrix { inner: Matrix::scalar(s) })
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diag(diag))
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }

    pub fn eigen(&self) -> SymmetricEigen {
        symmetric_eigen(&self.inner)
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }
}

/// Unique SPD square root `R` with `R·R = M`.
pub fn spd_sqrt(m: &SpdMatrix) -> Result<SpdMatrix> {
    SpdMatrix::new(m.eigen().map_values(f64::sqrt))
}

/// Determinant as the product of eigenvalues.
pub fn spd_det(m: &SpdMatrix) -> f64 {
    m.eigen().values.iter().product()
}

pub fn spd_log_det(m: &SpdMatrix) -> f64 {
    m.eigen().values.iter().map(|v| v.ln()).sum()
}

pub fn spd_inv(m: &SpdMatrix) -> Result<SpdMatrix> {
    SpdMatrix::new(m.eigen().map_values(|v| 1.0 / v))
}

pub fn trace(m: &Matrix) -> f64 {
    m.trace()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
