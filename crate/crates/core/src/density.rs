//! Standard densities and the location-scale families they generate.
//!
//! A [`LocationScaleDensity`] pairs a [`StandardDensity`] `p` with a group
//! element `g_{l,P}` and evaluates `p_{l,P}(x) = |P|⁻¹ p(P⁻¹(x − l))`.
//! Samples are pushed through the same action: `Y = PX + l`.
//!
//! Half-line densities (half-normal, exponential, Rayleigh, Weibull) only
//! admit the scale subgroup; their location must stay at zero.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::linalg::{spd_sqrt, Matrix, SpdMatrix};
use crate::quadrature::{integrate, Domain};
use crate::rng::{seeded, SeededRng};
use crate::special::{ln_gamma, EULER_GAMMA};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Tolerance for the normalization check of a custom elliptical profile.
pub const PROFILE_NORMALIZATION_TOL: f64 = 1e-5;

/// Support of a standard density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// All of ℝᵈ.
    Full,
    /// `[0, ∞)`, univariate only.
    HalfLine,
    /// `[0, 1]`, univariate only.
    UnitInterval,
}

/// Radial profile `h` of a spherical density `p(x) = h(xᵀx)`.
#[derive(Clone)]
pub struct ProfileFunction {
    name: String,
    dim: usize,
    kind: ProfileKind,
}

#[derive(Clone)]
enum ProfileKind {
    Gaussian,
    Student { nu: f64 },
    Custom { log_h: Arc<dyn Fn(f64) -> f64 + Send + Sync>, log_scale: f64 },
}

impl fmt::Debug for ProfileFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProfileFunction({}, d={})", self.name, self.dim)
    }
}

impl PartialEq for ProfileFunction {
    fn eq(&self, other: &Self) -> bool {
        if self.name != other.name || self.dim != other.dim {
            return false;
        }
        match (&self.kind, &other.kind) {
            (ProfileKind::Gaussian, ProfileKind::Gaussian) => true,
            (ProfileKind::Student { nu: a }, ProfileKind::Student { nu: b }) => a == b,
            (
                ProfileKind::Custom { log_h: a, log_scale: sa },
                ProfileKind::Custom { log_h: b, log_scale: sb },
            ) => Arc::ptr_eq(a, b) && sa == sb,
            _ => false,
        }
    }
}

impl ProfileFunction {
    /// `h(u) = (2π)^{−d/2} e^{−u/2}`.
    pub fn gaussian(dim: usize) -> Self {
        ProfileFunction { name: "gaussian".into(), dim, kind: ProfileKind::Gaussian }
    }

    /// Multivariate Student-t profile with `nu` degrees of freedom.
    pub fn student(dim: usize, nu: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::domain(format!("student nu must be positive, got {nu}")));
        }
        Ok(ProfileFunction { name: format!("student(nu={nu})"), dim, kind: ProfileKind::Student { nu } })
    }

    /// User-supplied profile `h`, assumed normalized for dimension `dim`.
    pub fn custom(
        name: impl Into<String>,
        dim: usize,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ProfileFunction {
            name: name.into(),
            dim,
            kind: ProfileKind::Custom { log_h: Arc::new(move |u| h(u).ln()), log_scale: 0.0 },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn log_h(&self, u: f64) -> f64 {
        let d = self.dim as f64;
        match &self.kind {
            ProfileKind::Gaussian => -0.5 * u - 0.5 * d * LN_2PI,
            ProfileKind::Student { nu } => {
                ln_gamma(0.5 * (nu + d)) - ln_gamma(0.5 * nu) - 0.5 * d * (nu * PI).ln()
                    - 0.5 * (nu + d) * (u / nu).ln_1p()
            }
            ProfileKind::Custom { log_h, log_scale } => log_h(u) + log_scale,
        }
    }

    /// `∫ h(xᵀx) dx` over ℝᵈ, via the radial integral
    /// `(2π^{d/2}/Γ(d/2)) ∫₀^∞ r^{d−1} h(r²) dr`.
    pub fn total_mass(&self) -> Result<f64> {
        let d = self.dim as f64;
        let log_sphere = 2f64.ln() + 0.5 * d * PI.ln() - ln_gamma(0.5 * d);
        let radial = integrate(
            |r: f64| {
                let lh = self.log_h(r * r);
                if lh == f64::NEG_INFINITY || r == 0.0 && d > 1.0 {
                    0.0
                } else {
                    ((d - 1.0) * r.ln() + lh + log_sphere).exp()
                }
            },
            Domain::PositiveHalfLine,
            1e-10,
        )?;
        if radial.diverged {
            return Err(Error::domain(format!("profile {} is not integrable", self.name)));
        }
        Ok(radial.value)
    }

    /// Copy rescaled so that it integrates to one.
    pub fn normalized(&self) -> Result<Self> {
        let mass = self.total_mass()?;
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::domain(format!("profile {} has mass {mass}", self.name)));
        }
        let mut out = self.clone();
        if let ProfileKind::Custom { log_scale, .. } = &mut out.kind {
            *log_scale -= mass.ln();
        }
        Ok(out)
    }

    fn sample_into(&self, rng: &mut SeededRng, out: &mut [f64]) -> Result<()> {
        match &self.kind {
            ProfileKind::Gaussian => {
                out.iter_mut().for_each(|v| *v = standard_normal(rng));
                Ok(())
            }
            ProfileKind::Student { nu } => {
                let scale = (chi_square(rng, *nu) / nu).sqrt();
                out.iter_mut().for_each(|v| *v = standard_normal(rng) / scale);
                Ok(())
            }
            ProfileKind::Custom { .. } => Err(Error::capability(format!(
                "no sampler for custom elliptical profile {}",
                self.name
            ))),
        }
    }
}

/// A standard density `p = p_{0,I}`.
#[derive(Debug, Clone, PartialEq)]
pub enum StandardDensity {
    Normal,
    Cauchy,
    Laplace,
    Logistic,
    StudentT { nu: f64 },
    HalfNormal,
    Exponential,
    /// `p(x) = x e^{−x²/2}` on `[0, ∞)`.
    Rayleigh,
    /// `p(x) = k x^{k−1} e^{−x^k}` on `[0, ∞)`.
    Weibull { k: f64 },
    /// Uniform on `[0, 1]`. Not regular: its Fisher information is infinite.
    Uniform,
    /// Standard multivariate normal in `dim` dimensions.
    Mvn { dim: usize },
    /// Spherical density `h(xᵀx)`.
    Elliptical(ProfileFunction),
}

impl fmt::Display for StandardDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StandardDensity::Normal => f.write_str("normal"),
            StandardDensity::Cauchy => f.write_str("cauchy"),
            StandardDensity::Laplace => f.write_str("laplace"),
            StandardDensity::Logistic => f.write_str("logistic"),
            StandardDensity::StudentT { nu } => write!(f, "student(nu={nu})"),
            StandardDensity::HalfNormal => f.write_str("halfnormal"),
            StandardDensity::Exponential => f.write_str("exponential"),
            StandardDensity::Rayleigh => f.write_str("rayleigh"),
            StandardDensity::Weibull { k } => write!(f, "weibull(k={k})"),
            StandardDensity::Uniform => f.write_str("uniform"),
            StandardDensity::Mvn { dim } => write!(f, "mvn(d={dim})"),
            StandardDensity::Elliptical(h) => write!(f, "elliptical({}, d={})", h.name, h.dim),
        }
    }
}

impl StandardDensity {
    pub fn student(nu: f64) -> Result<Self> {
        let s = StandardDensity::StudentT { nu };
        s.validate()?;
        Ok(s)
    }

    pub fn weibull(k: f64) -> Result<Self> {
        let s = StandardDensity::Weibull { k };
        s.validate()?;
        Ok(s)
    }

    pub fn mvn(dim: usize) -> Result<Self> {
        let s = StandardDensity::Mvn { dim };
        s.validate()?;
        Ok(s)
    }

    /// Checks shape parameters.
    pub fn validate(&self) -> Result<()> {
        match self {
            StandardDensity::StudentT { nu } if !(*nu > 0.0 && nu.is_finite()) => {
                Err(Error::domain(format!("student nu must be positive, got {nu}")))
            }
            StandardDensity::Weibull { k } if !(*k > 0.0 && k.is_finite()) => {
                Err(Error::domain(format!("weibull k must be positive, got {k}")))
            }
            StandardDensity::Mvn { dim: 0 } => Err(Error::domain("mvn dimension must be positive")),
            StandardDensity::Elliptical(h) if h.dim == 0 => {
                Err(Error::domain("elliptical dimension must be positive"))
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            StandardDensity::Mvn { dim } => *dim,
            StandardDensity::Elliptical(h) => h.dim,
            _ => 1,
        }
    }

    pub fn support(&self) -> Support {
        match self {
            StandardDensity::HalfNormal
            | StandardDensity::Exponential
            | StandardDensity::Rayleigh
            | StandardDensity::Weibull { .. } => Support::HalfLine,
            StandardDensity::Uniform => Support::UnitInterval,
            _ => Support::Full,
        }
    }

    /// False for the uniform family, whose Fisher information is infinite.
    pub fn is_regular(&self) -> bool {
        !matches!(self, StandardDensity::Uniform)
    }

    /// `p(−x) = p(x)`.
    pub fn is_even(&self) -> bool {
        self.support() == Support::Full
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, StandardDensity::Normal | StandardDensity::Mvn { .. })
            || matches!(self, StandardDensity::Elliptical(h) if matches!(h.kind, ProfileKind::Gaussian))
    }

    /// `log p(x)`; `−∞` outside the support.
    pub fn log_pdf(&self, x: &[f64]) -> f64 {
        match self {
            StandardDensity::Mvn { .. } => {
                let sq: f64 = x.iter().map(|v| v * v).sum();
                -0.5 * sq - 0.5 * x.len() as f64 * LN_2PI
            }
            StandardDensity::Elliptical(h) => h.log_h(x.iter().map(|v| v * v).sum()),
            _ => self.log_pdf_1d(x[0]),
        }
    }

    pub fn pdf(&self, x: &[f64]) -> f64 {
        self.log_pdf(x).exp()
    }

    /// `log p(x)` of a univariate density.
    pub fn log_pdf_1d(&self, x: f64) -> f64 {
        match self {
            StandardDensity::Normal | StandardDensity::Mvn { .. } => -0.5 * x * x - 0.5 * LN_2PI,
            StandardDensity::Cauchy => -PI.ln() - (x * x).ln_1p(),
            StandardDensity::Laplace => -x.abs() - 2f64.ln(),
            StandardDensity::Logistic => {
                let a = x.abs();
                -a - 2.0 * (-a).exp().ln_1p()
            }
            StandardDensity::StudentT { nu } => {
                ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * PI).ln()
                    - 0.5 * (nu + 1.0) * (x * x / nu).ln_1p()
            }
            StandardDensity::HalfNormal => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    0.5 * (2.0 / PI).ln() - 0.5 * x * x
                }
            }
            StandardDensity::Exponential => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -x
                }
            }
            StandardDensity::Rayleigh => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    x.ln() - 0.5 * x * x
                }
            }
            StandardDensity::Weibull { k } => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else if x == 0.0 {
                    if *k == 1.0 {
                        0.0
                    } else if *k > 1.0 {
                        f64::NEG_INFINITY
                    } else {
                        f64::INFINITY
                    }
                } else {
                    k.ln() + (k - 1.0) * x.ln() - x.powf(*k)
                }
            }
            StandardDensity::Uniform => {
                if (0.0..=1.0).contains(&x) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            StandardDensity::Elliptical(h) => h.log_h(x * x),
        }
    }

    /// Score `p′(x)/p(x)` of a univariate density.
    ///
    /// Analytic where available; custom elliptical profiles fall back to a
    /// Richardson-extrapolated central difference of `log p`.
    pub fn score(&self, x: f64) -> Result<f64> {
        if self.dim() != 1 {
            return Err(Error::domain(format!("score is defined for d=1 only, got d={}", self.dim())));
        }
        let half_line_interior = || -> Result<()> {
            if x <= 0.0 {
                Err(Error::domain(format!("{self}: density is not differentiable at x={x}")))
            } else {
                Ok(())
            }
        };
        match self {
            StandardDensity::Normal | StandardDensity::Mvn { .. } => Ok(-x),
            StandardDensity::Cauchy => Ok(-2.0 * x / (1.0 + x * x)),
            StandardDensity::Laplace => {
                if x == 0.0 {
                    Err(Error::domain("laplace density is not differentiable at 0"))
                } else {
                    Ok(-x.signum())
                }
            }
            StandardDensity::Logistic => Ok(-(0.5 * x).tanh()),
            StandardDensity::StudentT { nu } => Ok(-(nu + 1.0) * x / (nu + x * x)),
            StandardDensity::HalfNormal => half_line_interior().map(|_| -x),
            StandardDensity::Exponential => half_line_interior().map(|_| -1.0),
            StandardDensity::Rayleigh => half_line_interior().map(|_| 1.0 / x - x),
            StandardDensity::Weibull { k } => {
                half_line_interior().map(|_| (k - 1.0) / x - k * x.powf(k - 1.0))
            }
            StandardDensity::Uniform => {
                Err(Error::domain("uniform density is not differentiable (non-regular family)"))
            }
            StandardDensity::Elliptical(_) => numeric_score(|t| self.log_pdf_1d(t), x),
        }
    }

    /// Differential entropy of the standard density, where a closed form is known.
    pub fn entropy(&self) -> Option<f64> {
        Some(match self {
            StandardDensity::Normal => 0.5 * (LN_2PI + 1.0),
            StandardDensity::Cauchy => (4.0 * PI).ln(),
            StandardDensity::Laplace => 1.0 + 2f64.ln(),
            StandardDensity::Logistic => 2.0,
            StandardDensity::HalfNormal => 0.5 * (PI * std::f64::consts::E / 2.0).ln(),
            StandardDensity::Exponential => 1.0,
            StandardDensity::Rayleigh => 1.0 + 0.5 * EULER_GAMMA - 0.5 * 2f64.ln(),
            StandardDensity::Weibull { k } => EULER_GAMMA * (1.0 - 1.0 / k) - k.ln() + 1.0,
            StandardDensity::Uniform => 0.0,
            StandardDensity::Mvn { dim } => 0.5 * *dim as f64 * (LN_2PI + 1.0),
            StandardDensity::Elliptical(h) if matches!(h.kind, ProfileKind::Gaussian) => {
                0.5 * h.dim as f64 * (LN_2PI + 1.0)
            }
            _ => return None,
        })
    }

    /// Draws one standard variate into `out` (length `dim`).
    pub fn sample_into(&self, rng: &mut SeededRng, out: &mut [f64]) -> Result<()> {
        let value = match self {
            StandardDensity::Mvn { .. } => {
                out.iter_mut().for_each(|v| *v = standard_normal(rng));
                return Ok(());
            }
            StandardDensity::Elliptical(h) => return h.sample_into(rng, out),
            StandardDensity::Normal => standard_normal(rng),
            StandardDensity::Cauchy => {
                let num = standard_normal(rng);
                let den = standard_normal(rng);
                num / den
            }
            StandardDensity::Laplace => {
                let v = open_unit(rng) - 0.5;
                -v.signum() * (1.0 - 2.0 * v.abs()).ln()
            }
            StandardDensity::Logistic => {
                let v = open_unit(rng);
                (v / (1.0 - v)).ln()
            }
            StandardDensity::StudentT { nu } => standard_normal(rng) / (chi_square(rng, *nu) / nu).sqrt(),
            StandardDensity::HalfNormal => standard_normal(rng).abs(),
            StandardDensity::Exponential => -open_unit(rng).ln(),
            StandardDensity::Rayleigh => (-2.0 * open_unit(rng).ln()).sqrt(),
            StandardDensity::Weibull { k } => (-open_unit(rng).ln()).powf(1.0 / k),
            StandardDensity::Uniform => rng.gen::<f64>(),
        };
        out[0] = value;
        Ok(())
    }
}

/// Central difference of `log p` with step `1e-6·max(1, |x|)`, refined by
/// one Richardson extrapolation against the half step.
pub fn numeric_score<F: Fn(f64) -> f64>(log_p: F, x: f64) -> Result<f64> {
    let h = 1e-6 * x.abs().max(1.0);
    let central = |step: f64| (log_p(x + step) - log_p(x - step)) / (2.0 * step);
    let coarse = central(h);
    let fine = central(0.5 * h);
    let value = (4.0 * fine - coarse) / 3.0;
    if !value.is_finite() {
        return Err(Error::domain(format!("log-density is not differentiable at x={x}")));
    }
    Ok(value)
}

fn open_unit(rng: &mut SeededRng) -> f64 {
    // (0, 1]: avoids log(0).
    1.0 - rng.gen::<f64>()
}

/// Box–Muller transform (one of the pair is used).
pub(crate) fn standard_normal(rng: &mut SeededRng) -> f64 {
    let u1 = open_unit(rng);
    let u2 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Marsaglia–Tsang gamma(shape, 1) sampler.
fn gamma_variate(rng: &mut SeededRng, shape: f64) -> f64 {
    if shape < 1.0 {
        let boost = open_unit(rng).powf(1.0 / shape);
        return gamma_variate(rng, shape + 1.0) * boost;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z = standard_normal(rng);
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = open_unit(rng);
        if u.ln() < 0.5 * z * z + d - d * v + d * v.ln() {
            return d * v;
        }
    }
}

fn chi_square(rng: &mut SeededRng, nu: f64) -> f64 {
    2.0 * gamma_variate(rng, 0.5 * nu)
}

/// A standard density transported by a group element: `p_{l,P}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationScaleDensity {
    base: StandardDensity,
    g: GroupElement,
    inv_scale: Matrix,
    log_det: f64,
}

impl LocationScaleDensity {
    /// Builds `p_{l,P}`. The scale must be SPD; half-line bases require a
    /// zero location.
    pub fn new(base: StandardDensity, g: GroupElement) -> Result<Self> {
        g.spd_scale()?;
        Self::from_general(base, g)
    }

    /// Univariate `p_{l,s}`.
    pub fn univariate(base: StandardDensity, l: f64, s: f64) -> Result<Self> {
        Self::new(base, GroupElement::univariate(l, s)?)
    }

    pub fn standard(base: StandardDensity) -> Result<Self> {
        let d = base.dim();
        Self::new(base, GroupElement::identity(d))
    }

    /// Accepts any invertible scale (composed elements). The univariate
    /// scale must still be positive.
    pub fn from_general(base: StandardDensity, g: GroupElement) -> Result<Self> {
        base.validate()?;
        if base.dim() != g.dim() {
            return Err(Error::domain(format!(
                "density {base} has d={} but group element has d={}",
                base.dim(),
                g.dim()
            )));
        }
        if g.dim() == 1 && !(g.scale()[(0, 0)] > 0.0) {
            return Err(Error::domain("univariate scale must be positive"));
        }
        if base.support() != Support::Full && g.location().iter().any(|&v| v != 0.0) {
            return Err(Error::domain(format!(
                "{base} has support {:?}; only the scale subgroup may act on it (location must be 0)",
                base.support()
            )));
        }
        let inv_scale = g.scale().inverse()?;
        let log_det = g.log_abs_det();
        Ok(LocationScaleDensity { base, g, inv_scale, log_det })
    }

    pub fn base(&self) -> &StandardDensity {
        &self.base
    }

    pub fn group_element(&self) -> &GroupElement {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn support(&self) -> Support {
        self.base.support()
    }

    /// `(l, s)` for a univariate density.
    pub fn params_1d(&self) -> Result<(f64, f64)> {
        self.g.as_univariate()
    }

    /// Same base, new group element `h·g`.
    pub fn transported(&self, h: &GroupElement) -> Result<Self> {
        Self::from_general(self.base.clone(), h.compose(&self.g)?)
    }

    /// `log p(P⁻¹(x−l)) − log|P|`.
    pub fn log_pdf(&self, x: &[f64]) -> f64 {
        if self.dim() == 1 {
            return self.log_pdf_1d(x[0]);
        }
        let centred: Vec<f64> = x.iter().zip(self.g.location()).map(|(a, b)| a - b).collect();
        let y = self.inv_scale.mul_vec(&centred);
        self.base.log_pdf(&y) - self.log_det
    }

    pub fn log_pdf_1d(&self, x: f64) -> f64 {
        let y = (x - self.g.location()[0]) * self.inv_scale[(0, 0)];
        self.base.log_pdf_1d(y) - self.log_det
    }

    pub fn pdf(&self, x: &[f64]) -> f64 {
        self.log_pdf(x).exp()
    }

    /// `n` draws `PX + l` with `X` from the standard density.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = seeded(seed);
        self.sample_with(&mut rng, n)
    }

    pub fn sample_with(&self, rng: &mut SeededRng, n: usize) -> Result<Vec<Vec<f64>>> {
        let mut buf = vec![0.0; self.dim()];
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            self.base.sample_into(rng, &mut buf)?;
            out.push(self.g.act_unchecked(&buf));
        }
        Ok(out)
    }

    /// Differential entropy `h(p) + log|P|` from the closed-form standard entropy.
    pub fn entropy(&self) -> Option<f64> {
        self.base.entropy().map(|h| h + self.log_det)
    }
}

/// Elliptical density `|V|^{−1/2} h((x−μ)ᵀV⁻¹(x−μ))` as the location-scale
/// density with base `h(xᵀx)` and element `(μ, V^{1/2})`.
pub fn elliptical(h: &ProfileFunction, mu: Vec<f64>, v: &SpdMatrix) -> Result<LocationScaleDensity> {
    if h.dim != mu.len() || h.dim != v.dim() {
        return Err(Error::domain(format!(
            "profile has d={} but mu has length {} and V is {}x{}",
            h.dim,
            mu.len(),
            v.dim(),
            v.dim()
        )));
    }
    if let ProfileKind::Custom { .. } = h.kind {
        let mass = h.total_mass()?;
        if (mass - 1.0).abs() > PROFILE_NORMALIZATION_TOL {
            return Err(Error::domain(format!(
                "profile {} integrates to {mass}, not 1",
                h.name
            )));
        }
    }
    let root = spd_sqrt(v)?;
    LocationScaleDensity::new(StandardDensity::Elliptical(h.clone()), GroupElement::new(mu, root)?)
}

/// Log-normal density: the law of `exp(X)` for `X ~ N(μ, σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormal {
    pub mu: f64,
    pub sigma: f64,
}

impl LogNormal {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !mu.is_finite() || !sigma.is_finite() {
            return Err(Error::domain(format!("invalid log-normal parameters ({mu}, {sigma})")));
        }
        Ok(LogNormal { mu, sigma })
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let z = (x.ln() - self.mu) / self.sigma;
        -x.ln() - self.sigma.ln() - 0.5 * LN_2PI - 0.5 * z * z
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = seeded(seed);
        (0..n).map(|_| (self.mu + self.sigma * standard_normal(&mut rng)).exp()).collect()
    }
}

/// Pushforward of a univariate normal by `x ↦ exp(x)`.
pub fn pushforward_exp(normal: &LocationScaleDensity) -> Result<LogNormal> {
    if normal.dim() != 1 || !normal.base().is_gaussian() {
        return Err(Error::domain(format!(
            "pushforward_exp expects a univariate normal, got {}",
            normal.base()
        )));
    }
    let (mu, sigma) = normal.params_1d()?;
    LogNormal::new(mu, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_univariate() -> Vec<StandardDensity> {
        vec![
            StandardDensity::Normal,
            StandardDensity::Cauchy,
            StandardDensity::Laplace,
            StandardDensity::Logistic,
            StandardDensity::StudentT { nu: 3.0 },
            StandardDensity::HalfNormal,
            StandardDensity::Exponential,
            StandardDensity::Rayleigh,
            StandardDensity::Weibull { k: 2.0 },
            StandardDensity::Weibull { k: 3.5 },
            StandardDensity::Uniform,
        ]
    }

    fn domain_of(p: &StandardDensity) -> Domain {
        match p.support() {
            Support::Full => Domain::Real,
            Support::HalfLine => Domain::PositiveHalfLine,
            Support::UnitInterval => Domain::Interval(0.0, 1.0),
        }
    }

    #[test]
    fn standard_values() {
        let n = StandardDensity::Normal.log_pdf_1d(0.0);
        assert!((n + 0.5 * (2.0 * PI).ln()).abs() < 1e-15);
        assert!((n + 0.9189).abs() < 1e-4);
        let c = StandardDensity::Cauchy.log_pdf_1d(1.0);
        assert!((c - (1.0 / (2.0 * PI)).ln()).abs() < 1e-15);
    }

    #[test]
    fn univariate_densities_integrate_to_one() {
        for p in all_univariate() {
            let r = integrate(|x| p.pdf(&[x]), domain_of(&p), 1e-10).unwrap();
            assert!((r.value - 1.0).abs() < 1e-6, "{p}: {}", r.value);
        }
    }

    #[test]
    fn location_scale_integrates_to_one() {
        for p in all_univariate() {
            let l = if p.support() == Support::Full { 1.3 } else { 0.0 };
            let q = LocationScaleDensity::univariate(p.clone(), l, 2.7).unwrap();
            let r = integrate(|x| q.pdf(&[x]), Domain::Real, 1e-10).unwrap();
            assert!((r.value - 1.0).abs() < 1e-6, "{p}: {}", r.value);
        }
    }

    #[test]
    fn group_action_is_definitional() {
        let g = GroupElement::univariate(0.7, 1.9).unwrap();
        let q = LocationScaleDensity::new(StandardDensity::Logistic, g).unwrap();
        for x in [-3.0, -0.1, 0.0, 2.2] {
            let expected = StandardDensity::Logistic.pdf(&[(x - 0.7) / 1.9]) / 1.9;
            assert!((q.pdf(&[x]) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn half_line_refuses_location() {
        let err = LocationScaleDensity::univariate(StandardDensity::Exponential, 1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(LocationScaleDensity::univariate(StandardDensity::Exponential, 0.0, 3.0).is_ok());
    }

    #[test]
    fn analytic_scores() {
        assert_eq!(StandardDensity::Normal.score(2.0).unwrap(), -2.0);
        assert!((StandardDensity::Cauchy.score(1.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(StandardDensity::Laplace.score(0.0).is_err());
        assert!(StandardDensity::Uniform.score(0.5).is_err());
        assert!(StandardDensity::Exponential.score(0.0).is_err());
        assert!(StandardDensity::mvn(2).unwrap().score(0.0).is_err());
    }

    #[test]
    fn finite_difference_scores_agree() {
        for p in all_univariate() {
            if p == StandardDensity::Uniform {
                continue;
            }
            for x in [-2.5, -0.7, 0.3, 1.1, 4.0] {
                if p.support() == Support::HalfLine && x <= 0.0 {
                    continue;
                }
                let analytic = p.score(x).unwrap();
                let numeric = numeric_score(|t| p.log_pdf_1d(t), x).unwrap();
                assert!((analytic - numeric).abs() < 1e-6, "{p} at {x}");
            }
        }
    }

    #[test]
    fn even_scores_have_zero_mean() {
        for p in [
            StandardDensity::Normal,
            StandardDensity::Cauchy,
            StandardDensity::Logistic,
            StandardDensity::StudentT { nu: 2.5 },
        ] {
            let r = integrate(|x| p.pdf(&[x]) * p.score(x).unwrap(), Domain::Real, 1e-12).unwrap();
            assert!(r.value.abs() < 1e-6, "{p}");
        }
    }

    #[test]
    fn sampling_basics() {
        let q = LocationScaleDensity::standard(StandardDensity::Normal).unwrap();
        assert!(q.sample(0, 1).unwrap().is_empty());
        let xs = q.sample(100_000, 7).unwrap();
        let mean = xs.iter().map(|v| v[0]).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.02);
        assert_eq!(xs, q.sample(100_000, 7).unwrap());

        let r = LocationScaleDensity::standard(StandardDensity::Rayleigh).unwrap();
        let xs = r.sample(100_000, 8).unwrap();
        let mean = xs.iter().map(|v| v[0]).sum::<f64>() / xs.len() as f64;
        assert!((mean - (PI / 2.0).sqrt()).abs() < 0.02);
    }

    #[test]
    fn custom_profile_sampling_is_a_capability_error() {
        let h = ProfileFunction::custom("exp", 2, |u: f64| (-u.sqrt()).exp()).normalized().unwrap();
        let q = elliptical(&h, vec![0.0, 0.0], &SpdMatrix::identity(2)).unwrap();
        assert!(matches!(q.sample(3, 1), Err(Error::Capability(_))));
    }

    #[test]
    fn elliptical_matches_direct_formula() {
        let h = ProfileFunction::gaussian(2);
        let v = SpdMatrix::from_rows(&[vec![2.0, 0.6], vec![0.6, 1.0]]).unwrap();
        let mu = vec![0.5, -1.0];
        let q = elliptical(&h, mu.clone(), &v).unwrap();
        let v_inv = v.matrix().inverse().unwrap();
        let log_det_v = v.matrix().det().ln();
        let mut rng = seeded(3);
        for _ in 0..100 {
            let x = [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
            let c = [x[0] - mu[0], x[1] - mu[1]];
            let m = crate::linalg::dot(&c, &v_inv.mul_vec(&c));
            let direct = -0.5 * log_det_v + h.log_h(m);
            assert!((q.log_pdf(&x) - direct).abs() < 1e-12);
        }
        let standard = elliptical(&h, vec![0.0, 0.0], &SpdMatrix::identity(2)).unwrap();
        let mvn = LocationScaleDensity::standard(StandardDensity::Mvn { dim: 2 }).unwrap();
        assert!((standard.log_pdf(&[0.3, 0.4]) - mvn.log_pdf(&[0.3, 0.4])).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_profile_rejected() {
        let h = ProfileFunction::custom("twice", 2, |u: f64| 2.0 * (-0.5 * u).exp() / (2.0 * PI));
        assert!(matches!(
            elliptical(&h, vec![0.0, 0.0], &SpdMatrix::identity(2)),
            Err(Error::Domain(_))
        ));
        let fixed = h.normalized().unwrap();
        assert!(elliptical(&fixed, vec![0.0, 0.0], &SpdMatrix::identity(2)).is_ok());
        assert!((ProfileFunction::student(3, 4.0).unwrap().total_mass().unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn lognormal_pushforward() {
        let n = LocationScaleDensity::univariate(StandardDensity::Normal, 0.0, 1.0).unwrap();
        let ln = pushforward_exp(&n).unwrap();
        assert_eq!(ln.pdf(0.0), 0.0);
        assert_eq!(ln.pdf(-1.0), 0.0);
        assert!((ln.pdf(1.0) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        let r = integrate(|x| ln.pdf(x), Domain::PositiveHalfLine, 1e-10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
        let c = LocationScaleDensity::univariate(StandardDensity::Cauchy, 0.0, 1.0).unwrap();
        assert!(pushforward_exp(&c).is_err());
    }

    #[test]
    fn closed_form_entropies_match_quadrature() {
        for p in all_univariate() {
            if let StandardDensity::StudentT { .. } = p {
                assert!(p.entropy().is_none());
                continue;
            }
            let h = p.entropy().unwrap_or_else(|| panic!("{p} entropy"));
            let r = integrate(
                |x| {
                    let lp = p.log_pdf_1d(x);
                    if lp == f64::NEG_INFINITY {
                        0.0
                    } else {
                        -lp.exp() * lp
                    }
                },
                domain_of(&p),
                1e-11,
            );
            assert!((r.unwrap().value - h).abs() < 1e-8, "{p}");
        }
    }
}
