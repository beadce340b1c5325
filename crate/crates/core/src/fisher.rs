//! Fisher information and Fisher–Rao geometry of univariate location-scale
//! families.
//!
//! The Fisher information in `λ = (l, s)` is `(1/s²)[[a², c], [c, b²]]` with
//! constants of the standard density:
//!
//! ```text
//! a² = E[(p′/p)²],  b² = E[(1 + x p′/p)²],  c = E[(p′/p)(1 + x p′/p)]
//! ```
//!
//! For even densities `c = 0`, and in `θ = ((a/b)l, s)` the metric becomes
//! `(b²/θ₂²) I`: a hyperbolic upper half-plane of curvature `κ = −1/b²`.
//! Distances are then `b · d_U`. The Poincaré and Klein disk models are
//! reached through the Cayley map.

use num_complex::Complex64;

use crate::density::{StandardDensity, Support};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quadrature::{integrate_with, Domain, QuadratureOptions};

/// Off-diagonal constants below this are forced to zero for even densities.
pub const EVEN_C_CUTOFF: f64 = 1e-7;
const CONSTANT_TOL: f64 = 1e-11;
const DET_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherMetric {
    pub a2: f64,
    pub b2: f64,
    pub c: f64,
    /// `−1/b²`.
    pub curvature: f64,
    pub even_density: bool,
}

impl FisherMetric {
    pub fn new(a2: f64, b2: f64, c: f64, even_density: bool) -> Result<Self> {
        if !(a2 > 0.0 && a2.is_finite()) || !(b2 > 0.0 && b2.is_finite()) || !c.is_finite() {
            return Err(Error::domain(format!("invalid Fisher constants a²={a2}, b²={b2}, c={c}")));
        }
        if even_density && c != 0.0 {
            return Err(Error::domain("an even density has c = 0"));
        }
        Ok(FisherMetric { a2, b2, c, curvature: -1.0 / b2, even_density })
    }

    pub fn a(&self) -> f64 {
        self.a2.sqrt()
    }

    pub fn b(&self) -> f64 {
        self.b2.sqrt()
    }
}

/// Fisher constants of a univariate standard density, by quadrature.
pub fn fisher_constants(p: &StandardDensity) -> Result<FisherMetric> {
    p.validate()?;
    if p.dim() != 1 {
        return Err(Error::domain(format!("Fisher constants need d=1, got {p}")));
    }
    if !p.is_regular() {
        return Err(Error::domain(format!("{p} is not a regular family")));
    }
    if p.support() != Support::Full {
        return Err(Error::domain(format!("{p} is not a location-scale family on the real line")));
    }
    let score = |x: f64| -> f64 {
        match p.score(x) {
            Ok(v) => v,
            // isolated kink at the origin (Laplace)
            Err(_) if x == 0.0 => 0.0,
            Err(_) => f64::NAN,
        }
    };
    let opts = QuadratureOptions { abs_tol: CONSTANT_TOL, rel_tol: 0.0, ..QuadratureOptions::default() };
    let expect = |h: &dyn Fn(f64, f64) -> f64| -> Result<f64> {
        let r = integrate_with(
            |x| {
                let px = p.log_pdf_1d(x).exp();
                if px == 0.0 {
                    0.0
                } else {
                    px * h(x, score(x))
                }
            },
            Domain::Real,
            &opts,
        )?;
        if r.diverged {
            return Err(Error::domain(format!("Fisher information of {p} is infinite")));
        }
        Ok(r.value)
    };
    let a2 = expect(&|_, sc| sc * sc)?;
    let b2 = expect(&|x, sc| (1.0 + x * sc).powi(2))?;
    let mut c = expect(&|x, sc| sc * (1.0 + x * sc))?;
    let even = p.is_even();
    if even {
        if c.abs() >= EVEN_C_CUTOFF {
            return Err(Error::Accuracy {
                message: format!("{p} is even but the computed c = {c:e}"),
                best_estimate: c,
            });
        }
        c = 0.0;
    }
    FisherMetric::new(a2, b2, c, even)
}

/// `I(l, s) = (1/s²)[[a², c], [c, b²]]`.
pub fn fisher_matrix(metric: &FisherMetric, _l: f64, s: f64) -> Result<Matrix> {
    check_scale(s)?;
    let k = 1.0 / (s * s);
    Matrix::from_rows(&[vec![metric.a2 * k, metric.c * k], vec![metric.c * k, metric.b2 * k]])
}

/// Fisher matrix in `θ = ((a/b)l, s)`, obtained as `Jᵀ I_λ J` with
/// `J = ∂λ/∂θ = diag(b/a, 1)`. Equals `(b²/θ₂²) I` when `c = 0`.
pub fn fisher_matrix_theta(metric: &FisherMetric, theta: (f64, f64)) -> Result<Matrix> {
    check_scale(theta.1)?;
    let l = theta.0 * metric.b() / metric.a();
    let i_lambda = fisher_matrix(metric, l, theta.1)?;
    let j = Matrix::from_diag(&[metric.b() / metric.a(), 1.0]);
    Ok(j.transpose().mul(&i_lambda).mul(&j))
}

fn check_scale(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("scale must be positive and finite, got {s}")))
    }
}

/// Fisher–Rao distance `b · d_U(((a/b)l₁, s₁), ((a/b)l₂, s₂))`.
pub fn fisher_rao_distance(metric: &FisherMetric, p1: (f64, f64), p2: (f64, f64)) -> Result<f64> {
    if metric.c != 0.0 {
        return Err(Error::capability("closed-form Fisher–Rao distance needs c = 0 (even standard density)"));
    }
    check_scale(p1.1)?;
    check_scale(p2.1)?;
    let k = metric.a() / metric.b();
    let z1 = HyperbolicPoint::upper_plane(k * p1.0, p1.1)?;
    let z2 = HyperbolicPoint::upper_plane(k * p2.0, p2.1)?;
    Ok(metric.b() * z1.distance(&z2)?)
}

/// `d_U(z₁, z₂) = arccosh(1 + |z₁ − z₂|²/(2 y₁ y₂))`, evaluated as
/// `2 asinh(|z₁ − z₂| / (2√(y₁y₂)))`.
pub fn upper_plane_distance(z1: (f64, f64), z2: (f64, f64)) -> f64 {
    let d = (z1.0 - z2.0).hypot(z1.1 - z2.1);
    2.0 * (d / (2.0 * (z1.1 * z2.1).sqrt())).asinh()
}

/// `arccosh(1 + 2|w₁ − w₂|²/((1 − |w₁|²)(1 − |w₂|²)))`.
pub fn poincare_distance(w1: (f64, f64), w2: (f64, f64)) -> f64 {
    let d = (w1.0 - w2.0).hypot(w1.1 - w2.1);
    let n1 = 1.0 - (w1.0 * w1.0 + w1.1 * w1.1);
    let n2 = 1.0 - (w2.0 * w2.0 + w2.1 * w2.1);
    2.0 * (d / (n1 * n2).sqrt()).asinh()
}

/// `arccosh((1 − k₁·k₂)/√((1 − |k₁|²)(1 − |k₂|²)))`.
pub fn klein_distance(k1: (f64, f64), k2: (f64, f64)) -> f64 {
    let n1 = 1.0 - (k1.0 * k1.0 + k1.1 * k1.1);
    let n2 = 1.0 - (k2.0 * k2.0 + k2.1 * k2.1);
    let arg = (1.0 - (k1.0 * k2.0 + k1.1 * k2.1)) / (n1 * n2).sqrt();
    arg.max(1.0).acosh()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    UpperPlane,
    PoincareDisk,
    KleinDisk,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::UpperPlane => "upper_plane",
            Model::PoincareDisk => "poincare_disk",
            Model::KleinDisk => "klein_disk",
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "upper_plane" | "upper" => Ok(Model::UpperPlane),
            "poincare_disk" | "poincare" => Ok(Model::PoincareDisk),
            "klein_disk" | "klein" => Ok(Model::KleinDisk),
            other => Err(Error::parse(format!("unknown hyperbolic model '{other}'"))),
        }
    }
}

/// A point of the hyperbolic plane in one of three models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicPoint {
    model: Model,
    coords: (f64, f64),
}

impl HyperbolicPoint {
    pub fn new(model: Model, x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::domain("hyperbolic point has non-finite coordinates"));
        }
        match model {
            Model::UpperPlane if y <= 0.0 => {
                return Err(Error::domain(format!("upper-plane point needs y > 0, got {y}")))
            }
            Model::PoincareDisk | Model::KleinDisk if x * x + y * y >= 1.0 => {
                return Err(Error::domain(format!("disk point ({x}, {y}) is not inside the unit disk")))
            }
            _ => {}
        }
        Ok(HyperbolicPoint { model, coords: (x, y) })
    }

    pub fn upper_plane(x: f64, y: f64) -> Result<Self> {
        Self::new(Model::UpperPlane, x, y)
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn coords(&self) -> (f64, f64) {
        self.coords
    }

    fn complex(&self) -> Complex64 {
        Complex64::new(self.coords.0, self.coords.1)
    }

    pub fn convert(&self, target: Model) -> Result<HyperbolicPoint> {
        if self.model == target {
            return Ok(*self);
        }
        // Route through the Poincaré disk.
        let w = match self.model {
            Model::PoincareDisk => self.complex(),
            Model::UpperPlane => {
                let z = self.complex();
                (z - Complex64::i()) / (z + Complex64::i())
            }
            Model::KleinDisk => {
                let k = self.complex();
                k / (1.0 + (1.0 - k.norm_sqr()).sqrt())
            }
        };
        let out = match target {
            Model::PoincareDisk => w,
            Model::UpperPlane => {
                let denom = Complex64::new(1.0, 0.0) - w;
                if denom.norm() == 0.0 {
                    return Err(Error::domain("point maps to infinity in the upper plane"));
                }
                Complex64::i() * (w + 1.0) / denom
            }
            Model::KleinDisk => 2.0 * w / (1.0 + w.norm_sqr()),
        };
        HyperbolicPoint::new(target, out.re, out.im)
    }

    /// Model-native distance; the other point is converted first if needed.
    pub fn distance(&self, other: &HyperbolicPoint) -> Result<f64> {
        let other = other.convert(self.model)?;
        Ok(match self.model {
            Model::UpperPlane => upper_plane_distance(self.coords, other.coords),
            Model::PoincareDisk => poincare_distance(self.coords, other.coords),
            Model::KleinDisk => klein_distance(self.coords, other.coords),
        })
    }
}

pub type Mobius = [[Complex64; 2]; 2];

/// `z ↦ (az + b)/(cz + d)` for `det M = 1`.
pub fn mobius_apply(m: &Mobius, z: Complex64) -> Result<Complex64> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if (det - 1.0).norm() > DET_TOL {
        return Err(Error::domain(format!("Möbius matrix has determinant {det}, expected 1")));
    }
    let denom = m[1][0] * z + m[1][1];
    if denom.norm() == 0.0 {
        return Err(Error::domain("Möbius transformation hits its pole"));
    }
    Ok((m[0][0] * z + m[0][1]) / denom)
}

/// Real `SL(2,ℝ)` matrix as a [`Mobius`].
pub fn real_mobius(m: [[f64; 2]; 2]) -> Mobius {
    let c = |v: f64| Complex64::new(v, 0.0);
    [[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]]
}

/// `C A C⁻¹` with `C = [[1, −i], [1, i]]`: carries `SL(2,ℝ)` acting on the
/// upper plane to `SU(1,1)` acting on the disk.
pub fn sl2_to_su11(a: [[f64; 2]; 2]) -> Result<Mobius> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if (det - 1.0).abs() > DET_TOL {
        return Err(Error::domain(format!("matrix has determinant {det}, expected 1")));
    }
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let c = [[one, -i], [one, i]];
    let det_c = Complex64::new(0.0, 2.0);
    let c_inv = [[i / det_c, i / det_c], [-one / det_c, one / det_c]];
    let a = real_mobius(a);
    Ok(mat_mul(&mat_mul(&c, &a), &c_inv))
}

fn mat_mul(x: &Mobius, y: &Mobius) -> Mobius {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (col, v) in row.iter_mut().enumerate() {
            *v = x[r][0] * y[0][col] + x[r][1] * y[1][col];
        }
    }
    out
}
