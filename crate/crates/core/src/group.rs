//! The location-scale group `G_d = ℝᵈ × 𝕡₊₊ᵈ`.
//!
//! An element `g_{l,P}` acts on points by `x ↦ Px + l` and composes as
//! `g_{l₂,P₂}·g_{l₁,P₁} = g_{l₂+P₂l₁, P₂P₁}`. It is represented faithfully by
//! the `(d+1)×(d+1)` block matrix `[[P, l], [0ᵀ, 1]]`.
//!
//! The product of two SPD matrices is in general not symmetric. Elements
//! therefore store a general invertible scale matrix; [`GroupElement::new`]
//! is the SPD entry point, while [`GroupElement::compose`] and
//! [`GroupElement::inverse`] may produce non-symmetric intermediates (as in
//! canonical reduction). Family constructors check SPD-ness where it matters.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SpdMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    location: Vec<f64>,
    scale: Matrix,
}

impl GroupElement {
    /// Element with SPD scale matrix.
    pub fn new(location: Vec<f64>, scale: SpdMatrix) -> Result<Self> {
        Self::from_parts(location, scale.into_matrix())
    }

    /// Univariate element `g_{l,s}`.
    pub fn univariate(l: f64, s: f64) -> Result<Self> {
        Self::new(vec![l], SpdMatrix::scalar(s)?)
    }

    pub fn identity(dim: usize) -> Self {
        GroupElement { location: vec![0.0; dim], scale: Matrix::identity(dim) }
    }

    /// Pure translation `x ↦ x + l`.
    pub fn translation(location: Vec<f64>) -> Self {
        let d = location.len();
        GroupElement { location, scale: Matrix::identity(d) }
    }

    /// Pure scaling `x ↦ Px`.
    pub fn scaling(scale: SpdMatrix) -> Self {
        let d = scale.dim();
        GroupElement { location: vec![0.0; d], scale: scale.into_matrix() }
    }

    /// General invertible scale matrix. Used internally for composed
    /// elements; not restricted to SPD.
    pub(crate) fn from_parts(location: Vec<f64>, scale: Matrix) -> Result<Self> {
        if location.len() != scale.dim() {
            return Err(Error::domain(format!(
                "location has length {} but scale is {}x{}",
                location.len(),
                scale.dim(),
                scale.dim()
            )));
        }
        if !location.iter().all(|v| v.is_finite()) || !scale.is_finite() {
            return Err(Error::domain("group element has non-finite entries"));
        }
        if scale.det() == 0.0 {
            return Err(Error::domain("scale matrix is singular"));
        }
        Ok(GroupElement { location, scale })
    }

    pub fn dim(&self) -> usize {
        self.location.len()
    }

    pub fn location(&self) -> &[f64] {
        &self.location
    }

    pub fn scale(&self) -> &Matrix {
        &self.scale
    }

    /// Scale as an SPD matrix, when it is one.
    pub fn spd_scale(&self) -> Result<SpdMatrix> {
        SpdMatrix::new(self.scale.clone())
    }

    pub fn is_spd(&self) -> bool {
        self.spd_scale().is_ok()
    }

    /// `(l, s)` of a univariate element.
    pub fn as_univariate(&self) -> Result<(f64, f64)> {
        if self.dim() != 1 {
            return Err(Error::domain(format!("expected a univariate element, got d={}", self.dim())));
        }
        Ok((self.location[0], self.scale[(0, 0)]))
    }

    pub fn log_abs_det(&self) -> f64 {
        self.scale.log_abs_det()
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.location.iter().all(|v| v.abs() <= tol)
            && self.scale.max_abs_diff(&Matrix::identity(self.dim())) <= tol
    }

    /// `self · other = g_{l_self + P_self l_other, P_self P_other}`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check_dim(other.dim())?;
        let moved = self.scale.mul_vec(&other.location);
        let location = self.location.iter().zip(moved).map(|(a, b)| a + b).collect();
        Self::from_parts(location, self.scale.mul(&other.scale))
    }

    /// `g⁻¹_{l,P} = g_{−P⁻¹l, P⁻¹}`.
    pub fn inverse(&self) -> Result<GroupElement> {
        let inv = self.scale.inverse()?;
        let location = inv.mul_vec(&self.location).into_iter().map(|v| -v).collect();
        let inv = if self.scale.is_symmetric(1e-12) { inv.symmetrized() } else { inv };
        Self::from_parts(location, inv)
    }

    /// `y = Px + l`.
    pub fn act(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        Ok(self.act_unchecked(x))
    }

    pub(crate) fn act_unchecked(&self, x: &[f64]) -> Vec<f64> {
        if self.dim() == 1 {
            return vec![self.scale[(0, 0)] * x[0] + self.location[0]];
        }
        self.scale
            .mul_vec(x)
            .into_iter()
            .zip(&self.location)
            .map(|(a, b)| a + b)
            .collect()
    }

    /// `x = P⁻¹(y − l)`.
    pub fn pull_back(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(y.len())?;
        if self.dim() == 1 {
            return Ok(vec![(y[0] - self.location[0]) / self.scale[(0, 0)]]);
        }
        let centred: Vec<f64> = y.iter().zip(&self.location).map(|(a, b)| a - b).collect();
        self.scale.solve(&centred)
    }

    pub fn as_matrix(&self) -> GroupMatrix {
        let d = self.dim();
        let mut m = Matrix::identity(d + 1);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.scale[(i, j)];
            }
            m[(i, d)] = self.location[i];
        }
        GroupMatrix(m)
    }

    pub fn from_matrix(m: &GroupMatrix) -> Result<GroupElement> {
        let full = &m.0;
        let n = full.dim();
        if n < 2 {
            return Err(Error::domain("group matrix must be at least 2x2"));
        }
        let d = n - 1;
        for j in 0..d {
            if full[(d, j)] != 0.0 {
                return Err(Error::domain("group matrix bottom row must be (0, ..., 0, 1)"));
            }
        }
        if full[(d, d)] != 1.0 {
            return Err(Error::domain("group matrix bottom-right entry must be 1"));
        }
        let mut scale = Matrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                scale[(i, j)] = full[(i, j)];
            }
        }
        let location = (0..d).map(|i| full[(i, d)]).collect();
        Self::from_parts(location, scale)
    }

    /// Largest absolute difference in location or scale entries.
    pub fn max_abs_diff(&self, other: &GroupElement) -> f64 {
        let dl = self
            .location
            .iter()
            .zip(&other.location)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        dl.max(self.scale.max_abs_diff(&other.scale))
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::domain(format!(
                "dimension mismatch: element has d={} but argument has d={d}",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Block matrix `[[P, l], [0ᵀ, 1]]` representing a group element.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMatrix(pub Matrix);

impl GroupMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}
