//! f-divergences between location-scale densities.
//!
//! For a common group element `g`, `I_f(g⊙p : g⊙q) = I_f(p:q)`. Taking
//! `g = g₁⁻¹` collapses any pair onto a standard density and one transported
//! density:
//!
//! ```text
//! I_f(p_{l₁,P₁} : q_{l₂,P₂}) = I_f(p : q_{P₁⁻¹(l₂−l₁), P₁⁻¹P₂})
//! ```
//!
//! This module hosts that reduction, the closed-form KL registry (Gaussian,
//! Weibull/Rayleigh/exponential, half-normal/exponential), quadrature-backed
//! divergences for `d = 1`, entropy shifts, the Mahalanobis + Burg split of
//! the Gaussian KL, and f-mutual information of bivariate Gaussians.

use std::f64::consts::PI;
use std::fmt;

use crate::density::{LocationScaleDensity, LogNormal, StandardDensity, Support};
use crate::error::{Error, Result};
use crate::generator::FGenerator;
use crate::group::GroupElement;
use crate::linalg::{dot, spd_inv, spd_log_det, spd_sqrt, Matrix, SpdMatrix};
use crate::mc::{self, Estimate, EstimatorKind, McConfig, SampleSet};
use crate::quadrature::{integrate_with, Domain, QuadratureOptions};
use crate::special::{gamma, EULER_GAMMA};

/// Default absolute tolerance for quadrature divergences.
pub const QUADRATURE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        })
    }
}

/// A divergence value tagged with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceValue {
    /// Non-negative, or `+∞`.
    pub value: f64,
    pub method: Method,
    /// Standard error, Monte Carlo only.
    pub stderr: Option<f64>,
}

impl DivergenceValue {
    fn closed(value: f64) -> Self {
        DivergenceValue { value, method: Method::ClosedForm, stderr: None }
    }

    pub fn diverged(&self) -> bool {
        self.value == f64::INFINITY
    }
}

/// Method selection for [`divergence`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    /// Closed form if registered, else quadrature (`d = 1`), else Monte Carlo.
    #[default]
    Auto,
    Closed,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy)]
pub struct DivergenceOptions {
    pub method: MethodChoice,
    pub quadrature_tol: f64,
    pub mc: McConfig,
}

impl Default for DivergenceOptions {
    fn default() -> Self {
        DivergenceOptions { method: MethodChoice::Auto, quadrature_tol: QUADRATURE_TOL, mc: McConfig::default() }
    }
}

/// Canonical element `g₁⁻¹·g₂ = g_{P₁⁻¹(l₂−l₁), P₁⁻¹P₂}`:
/// `I_f(p_{g₁} : q_{g₂}) = I_f(p : q_{g₁⁻¹g₂})`.
pub fn canonical_reduce(g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
    g1.inverse()?.compose(g2)
}

/// Left-hand canonical element `g₂⁻¹·g₁`:
/// `I_f(p_{g₁} : q_{g₂}) = I_f(p_{g₂⁻¹g₁} : q) = I_{f*}(q : p_{g₂⁻¹g₁})`.
pub fn canonical_reduce_left(g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
    canonical_reduce(g2, g1)
}

/// `(p, q_{g₁⁻¹g₂})`: the pair rewritten with `p` standard.
pub fn reduced_pair(
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
) -> Result<(LocationScaleDensity, LocationScaleDensity)> {
    let h = canonical_reduce(p.group_element(), q.group_element())?;
    Ok((
        LocationScaleDensity::from_general(p.base().clone(), GroupElement::identity(p.dim()))?,
        LocationScaleDensity::from_general(q.base().clone(), h)?,
    ))
}

/// Itakura–Saito divergence `a/b − log(a/b) − 1` of positive scalars.
pub fn itakura_saito(a: f64, b: f64) -> f64 {
    let r = a / b;
    r - r.ln() - 1.0
}

/// `½ (μ₂−μ₁)ᵀ Q (μ₂−μ₁)`.
pub fn mahalanobis(mu1: &[f64], mu2: &[f64], q: &SpdMatrix) -> Result<f64> {
    if mu1.len() != mu2.len() || mu1.len() != q.dim() {
        return Err(Error::domain("mahalanobis: dimension mismatch"));
    }
    let delta: Vec<f64> = mu2.iter().zip(mu1).map(|(a, b)| a - b).collect();
    Ok(0.5 * dot(&delta, &q.matrix().mul_vec(&delta)))
}

/// Burg / matrix Itakura–Saito divergence
/// `½ (tr(Σ₂⁻¹Σ₁) − d − log|Σ₂⁻¹Σ₁|)`.
pub fn burg(sigma1: &SpdMatrix, sigma2: &SpdMatrix) -> Result<f64> {
    if sigma1.dim() != sigma2.dim() {
        return Err(Error::domain("burg: dimension mismatch"));
    }
    let d = sigma1.dim() as f64;
    let inv2 = spd_inv(sigma2)?;
    let tr = inv2.matrix().mul(sigma1.matrix()).trace();
    let value = 0.5 * (tr - d - (spd_log_det(sigma1) - spd_log_det(sigma2)));
    Ok(value.max(0.0))
}

/// KL between Gaussians from means and covariances: Mahalanobis term with
/// `Q = Σ₂⁻¹` plus the Burg term.
pub fn gaussian_kl(mu1: &[f64], sigma1: &SpdMatrix, mu2: &[f64], sigma2: &SpdMatrix) -> Result<f64> {
    Ok(mahalanobis(mu1, mu2, &spd_inv(sigma2)?)? + burg(sigma1, sigma2)?)
}

/// `P Pᵀ`, the covariance of `PX + l` for standard `X`.
fn covariance_of(g: &GroupElement) -> Result<SpdMatrix> {
    let p = g.scale();
    SpdMatrix::new(p.mul(&p.transpose()).symmetrized())
}

/// `D_KL(p^𝒩 : p^𝒩_{μ,σ}) = μ²/(2σ²) + ½(1/σ² − log(1/σ²) − 1)`.
pub fn normal_kl_reduced(mu: f64, sigma: f64) -> f64 {
    let inv2 = 1.0 / (sigma * sigma);
    0.5 * mu * mu * inv2 + 0.5 * (inv2 - inv2.ln() - 1.0)
}

/// KL between two univariate normals.
pub fn normal_kl(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64) -> f64 {
    normal_kl_reduced((mu2 - mu1) / sigma1, sigma2 / sigma1)
}

/// KL between two Weibull densities `p_{k₁,s₁}` and `p_{k₂,s₂}`:
///
/// `(s₁/s₂)^{k₂} Γ(k₂/k₁ + 1) − k₂ log(s₁/s₂) + log(k₁/k₂) − (1 − k₂/k₁)γ − 1`.
pub fn weibull_kl(k1: f64, s1: f64, k2: f64, s2: f64) -> f64 {
    let ratio = s1 / s2;
    ratio.powf(k2) * gamma(k2 / k1 + 1.0) - k2 * ratio.ln() + (k1 / k2).ln()
        - (1.0 - k2 / k1) * EULER_GAMMA
        - 1.0
}

/// `D_KL(p_{σ₁²} : p_{σ₂²}) = σ₁²/σ₂² − log(σ₁²/σ₂²) − 1` for Rayleigh scales.
pub fn rayleigh_kl(sigma1: f64, sigma2: f64) -> f64 {
    itakura_saito(sigma1 * sigma1, sigma2 * sigma2)
}

/// Half-normal(s₁) versus exponential(s₂):
/// `½(2 log(s₂/s₁) + log(2/π) − 1) + √(2/π) s₁/s₂`.
pub fn halfnormal_exponential_kl(s1: f64, s2: f64) -> f64 {
    0.5 * (2.0 * (s2 / s1).ln() + (2.0 / PI).ln() - 1.0) + (2.0 / PI).sqrt() * s1 / s2
}

/// Exponential(s₁) versus half-normal(s₂):
/// `s₁²/s₂² + log(s₂/s₁) − ½ log(2/π) − 1`.
pub fn exponential_halfnormal_kl(s1: f64, s2: f64) -> f64 {
    (s1 / s2).powi(2) + (s2 / s1).ln() - 0.5 * (2.0 / PI).ln() - 1.0
}

/// `(k, s)` of a Weibull-type scale density; Rayleigh(σ) is Weibull(2, √2σ).
fn as_weibull(base: &StandardDensity, s: f64) -> Option<(f64, f64)> {
    match base {
        StandardDensity::Exponential => Some((1.0, s)),
        StandardDensity::Rayleigh => Some((2.0, std::f64::consts::SQRT_2 * s)),
        StandardDensity::Weibull { k } => Some((*k, s)),
        _ => None,
    }
}

/// Closed-form Kullback–Leibler divergence `D_KL(p:q)`.
///
/// Registered pairs: Gaussian/Gaussian (any d), any two of
/// {exponential, Rayleigh, Weibull}, half-normal/half-normal,
/// half-normal/exponential and exponential/half-normal.
pub fn kl_closed(p: &LocationScaleDensity, q: &LocationScaleDensity) -> Result<DivergenceValue> {
    if p.dim() != q.dim() {
        return Err(Error::domain("kl_closed: dimension mismatch"));
    }
    let (bp, bq) = (p.base(), q.base());
    if bp.is_gaussian() && bq.is_gaussian() {
        let (gp, gq) = (p.group_element(), q.group_element());
        let value = gaussian_kl(gp.location(), &covariance_of(gp)?, gq.location(), &covariance_of(gq)?)?;
        return Ok(DivergenceValue::closed(value));
    }
    if p.dim() == 1 && bp.support() == Support::HalfLine && bq.support() == Support::HalfLine {
        let (_, s1) = p.params_1d()?;
        let (_, s2) = q.params_1d()?;
        if let (Some((k1, w1)), Some((k2, w2))) = (as_weibull(bp, s1), as_weibull(bq, s2)) {
            return Ok(DivergenceValue::closed(weibull_kl(k1, w1, k2, w2)));
        }
        let value = match (bp, bq) {
            (StandardDensity::HalfNormal, StandardDensity::HalfNormal) => {
                0.5 * itakura_saito(s1 * s1, s2 * s2)
            }
            (StandardDensity::HalfNormal, StandardDensity::Exponential) => halfnormal_exponential_kl(s1, s2),
            (StandardDensity::Exponential, StandardDensity::HalfNormal) => exponential_halfnormal_kl(s1, s2),
            _ => return Err(no_closed_form(bp, bq)),
        };
        return Ok(DivergenceValue::closed(value));
    }
    Err(no_closed_form(bp, bq))
}

fn no_closed_form(p: &StandardDensity, q: &StandardDensity) -> Error {
    Error::capability(format!(
        "no closed-form KL registered for ({p}, {q}); use quadrature (d=1) or Monte Carlo"
    ))
}

/// Closed form of `I_f(p:q)` when `f` is KL or its conjugate.
pub fn closed_form(p: &LocationScaleDensity, q: &LocationScaleDensity, f: &FGenerator) -> Result<DivergenceValue> {
    if f.is_kl() {
        kl_closed(p, q)
    } else if f.is_reverse_kl() {
        kl_closed(q, p)
    } else {
        Err(Error::capability(format!("no closed form registered for generator {}", f.name())))
    }
}

/// Integrand `p f(q/p)` from log-densities, with the boundary conventions
/// `p=0, q>0 ↦ q·lim f(u)/u` and `q=0, p>0 ↦ p·f(0)`.
pub(crate) fn divergence_term(f: &FGenerator, lp: f64, lq: f64) -> f64 {
    if lp == f64::NEG_INFINITY {
        if lq == f64::NEG_INFINITY {
            return 0.0;
        }
        return q_times_slope(f, lq.exp());
    }
    let p = lp.exp();
    if lq == f64::NEG_INFINITY {
        let f0 = f.value_at_zero();
        return if p == 0.0 { 0.0 } else { p * f0 };
    }
    if f.is_kl() {
        return p * (lp - lq);
    }
    if f.is_reverse_kl() {
        return lq.exp() * (lq - lp);
    }
    let q = lq.exp();
    if p == 0.0 && q == 0.0 {
        return 0.0;
    }
    let u = (lq - lp).exp();
    if u == f64::INFINITY {
        return q_times_slope(f, q);
    }
    if p == 0.0 {
        // p underflowed but q/p is finite: p f(u) = q f(u)/u.
        return q * (f.eval(u) / u);
    }
    p * f.eval(u)
}

fn q_times_slope(f: &FGenerator, q: f64) -> f64 {
    let slope = f.slope_at_infinity();
    if slope == 0.0 || q == 0.0 {
        0.0
    } else {
        q * slope
    }
}

fn domain_for(p: &LocationScaleDensity, q: &LocationScaleDensity) -> Domain {
    match (p.support(), q.support()) {
        (Support::HalfLine, Support::HalfLine) => Domain::PositiveHalfLine,
        _ => Domain::Real,
    }
}

/// `I_f(p:q)` by adaptive quadrature (`d = 1`). Non-integrable tails are
/// reported as `+∞`.
pub fn quadrature_divergence(
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    f: &FGenerator,
    tol: f64,
) -> Result<DivergenceValue> {
    if p.dim() != 1 || q.dim() != 1 {
        return Err(Error::capability("quadrature divergences are univariate only"));
    }
    let opts = QuadratureOptions { abs_tol: tol, rel_tol: 0.0, ..QuadratureOptions::default() };
    // Integrate in units of the pair's own length scale so that the tail
    // probe sees the same windows for every member of an orbit.
    let (lp, sp) = p.params_1d()?;
    let (lq, sq) = q.params_1d()?;
    let domain = domain_for(p, q);
    let center = if domain == Domain::Real { lp } else { 0.0 };
    let unit = sp.max(sq).max((lq - lp).abs());
    let r = integrate_with(
        |t| {
            let x = center + unit * t;
            unit * divergence_term(f, p.log_pdf_1d(x), q.log_pdf_1d(x))
        },
        domain,
        &opts,
    )?;
    let value = if r.diverged { f64::INFINITY } else { r.value };
    Ok(DivergenceValue { value, method: Method::Quadrature, stderr: None })
}

/// `I_f` between two log-normal densities, by quadrature on `(0, ∞)`.
pub fn lognormal_divergence_quadrature(p: &LogNormal, q: &LogNormal, f: &FGenerator, tol: f64) -> Result<f64> {
    let opts = QuadratureOptions { abs_tol: tol, rel_tol: 0.0, ..QuadratureOptions::default() };
    let r = integrate_with(
        |x| divergence_term(f, p.log_pdf(x), q.log_pdf(x)),
        Domain::PositiveHalfLine,
        &opts,
    )?;
    Ok(if r.diverged { f64::INFINITY } else { r.value })
}

/// KL between log-normals: identical to the KL between the underlying
/// normals, since `exp` is a diffeomorphism.
pub fn lognormal_kl(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64) -> Result<f64> {
    LogNormal::new(mu1, sigma1)?;
    LogNormal::new(mu2, sigma2)?;
    Ok(normal_kl(mu1, sigma1, mu2, sigma2))
}

/// `I_f(p:q)` with the method ladder closed form → quadrature → Monte Carlo.
pub fn divergence(
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    f: &FGenerator,
    opts: &DivergenceOptions,
) -> Result<DivergenceValue> {
    if p.dim() != q.dim() {
        return Err(Error::domain("divergence: dimension mismatch"));
    }
    if !p.base().is_regular() || !q.base().is_regular() {
        return Err(Error::domain("the uniform family is not regular"));
    }
    match opts.method {
        MethodChoice::Closed => closed_form(p, q, f),
        MethodChoice::Quadrature => quadrature_divergence(p, q, f, opts.quadrature_tol),
        MethodChoice::MonteCarlo => monte_carlo_divergence(p, q, f, &opts.mc),
        MethodChoice::Auto => match closed_form(p, q, f) {
            Ok(v) => Ok(v),
            Err(Error::Capability(_)) if p.dim() == 1 => quadrature_divergence(p, q, f, opts.quadrature_tol),
            Err(Error::Capability(_)) => monte_carlo_divergence(p, q, f, &opts.mc),
            Err(e) => Err(e),
        },
    }
}

fn monte_carlo_divergence(
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    f: &FGenerator,
    cfg: &McConfig,
) -> Result<DivergenceValue> {
    let sample = SampleSet::draw(&LocationScaleDensity::standard(p.base().clone())?, cfg.m, cfg.seed)?;
    let est: Estimate = mc::estimate_reduced(
        p.group_element(),
        q.group_element(),
        p.base(),
        q.base(),
        f,
        &sample,
        EstimatorKind::Plugin,
        cfg.partitions,
    )?;
    Ok(DivergenceValue { value: est.value, method: Method::MonteCarlo, stderr: Some(est.stderr) })
}

/// `h(g⊙p) = h(p) + log|P|`.
pub fn entropy_shift(h_standard: f64, g: &GroupElement) -> f64 {
    h_standard + g.log_abs_det()
}

/// `h×(g⊙p : g⊙q) = h×(p:q) + log|P|`.
pub fn cross_entropy_shift(cross_standard: f64, g: &GroupElement) -> f64 {
    cross_standard + g.log_abs_det()
}

/// Differential entropy, from the closed-form standard entropy when known,
/// else by quadrature (`d = 1`).
pub fn differential_entropy(q: &LocationScaleDensity) -> Result<f64> {
    if let Some(h) = q.entropy() {
        return Ok(h);
    }
    let standard = LocationScaleDensity::standard(q.base().clone())?;
    Ok(entropy_shift(cross_entropy(&standard, &standard)?, q.group_element()))
}

/// Cross-entropy `−∫ p log q` by quadrature (`d = 1`).
pub fn cross_entropy(p: &LocationScaleDensity, q: &LocationScaleDensity) -> Result<f64> {
    if p.dim() != 1 || q.dim() != 1 {
        return Err(Error::capability("cross-entropy quadrature is univariate only"));
    }
    let r = integrate_with(
        |x| {
            let lp = p.log_pdf_1d(x);
            if lp == f64::NEG_INFINITY {
                return 0.0;
            }
            let p = lp.exp();
            if p == 0.0 {
                0.0
            } else {
                -p * q.log_pdf_1d(x)
            }
        },
        domain_for(p, q),
        &QuadratureOptions::with_tol(QUADRATURE_TOL),
    )?;
    Ok(if r.diverged { f64::INFINITY } else { r.value })
}

/// KL mutual information of a bivariate normal with correlation `ρ`:
/// `−½ log(1 − ρ²)`.
pub fn mutual_information_gaussian(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(-0.5 * (1.0 - rho * rho).ln())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.abs() < 1.0) {
        return Err(Error::domain(format!("correlation must lie in (-1, 1), got {rho}")));
    }
    Ok(())
}

/// Invertible affine map `x ↦ a x + b` on ℝ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub scale: f64,
    pub shift: f64,
}

impl AffineMap {
    pub fn new(scale: f64, shift: f64) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::domain("affine map must have a finite non-zero slope"));
        }
        Ok(AffineMap { scale, shift })
    }

    pub fn identity() -> Self {
        AffineMap { scale: 1.0, shift: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiInvarianceReport {
    /// `−½ log(1−ρ²)` when the generator is KL.
    pub analytic: Option<f64>,
    pub original: Estimate,
    pub transformed: Estimate,
    /// Combined standard error `√(se₁² + se₂²)`.
    pub combined_stderr: f64,
    /// `|original − transformed| ≤ 3 · combined_stderr`.
    pub consistent: bool,
}

/// Bivariate normal `(X₁, X₂)` with unit variances and correlation `ρ`,
/// pushed through `(t₁, t₂)`: returns the joint and the two marginals.
fn transformed_gaussian_pair(
    rho: f64,
    t1: AffineMap,
    t2: AffineMap,
) -> Result<(LocationScaleDensity, LocationScaleDensity, LocationScaleDensity)> {
    let a = Matrix::from_diag(&[t1.scale, t2.scale]);
    let sigma = Matrix::from_rows(&[vec![1.0, rho], vec![rho, 1.0]])?;
    let cov = SpdMatrix::new(a.mul(&sigma).mul(&a).symmetrized())?;
    let joint = LocationScaleDensity::new(
        StandardDensity::Mvn { dim: 2 },
        GroupElement::new(vec![t1.shift, t2.shift], spd_sqrt(&cov)?)?,
    )?;
    let m1 = LocationScaleDensity::univariate(StandardDensity::Normal, t1.shift, t1.scale.abs())?;
    let m2 = LocationScaleDensity::univariate(StandardDensity::Normal, t2.shift, t2.scale.abs())?;
    Ok((joint, m1, m2))
}

/// Monte Carlo f-mutual information `I_f(p_{(X,Y)} : p_X p_Y)` of the
/// transformed bivariate normal, with samples from the joint.
pub fn mutual_information_mc(
    rho: f64,
    f: &FGenerator,
    t1: AffineMap,
    t2: AffineMap,
    n: usize,
    seed: u64,
) -> Result<Estimate> {
    check_rho(rho)?;
    let (joint, m1, m2) = transformed_gaussian_pair(rho, t1, t2)?;
    let draws = joint.sample(n, seed)?;
    let terms: Vec<f64> = draws
        .iter()
        .map(|x| {
            let lj = joint.log_pdf(x);
            let lm = m1.log_pdf_1d(x[0]) + m2.log_pdf_1d(x[1]);
            divergence_term(f, lj, lm) / lj.exp()
        })
        .collect();
    Ok(mc::summarize(&terms, EstimatorKind::Plugin, 1))
}

/// Checks `MI_f(t₁(X₁); t₂(X₂)) = MI_f(X₁; X₂)` with independent sample
/// sets (seeds `seed` and `seed + 1`).
pub fn mi_invariance_check(
    rho: f64,
    f: &FGenerator,
    t1: AffineMap,
    t2: AffineMap,
    n: usize,
    seed: u64,
) -> Result<MiInvarianceReport> {
    let original = mutual_information_mc(rho, f, AffineMap::identity(), AffineMap::identity(), n, seed)?;
    let transformed = mutual_information_mc(rho, f, t1, t2, n, seed.wrapping_add(1))?;
    let combined_stderr = original.stderr.hypot(transformed.stderr);
    let consistent = (original.value - transformed.value).abs() <= 3.0 * combined_stderr;
    let analytic = if f.is_kl() { Some(mutual_information_gaussian(rho)?) } else { None };
    Ok(MiInvarianceReport { analytic, original, transformed, combined_stderr, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(base: StandardDensity, l: f64, s: f64) -> LocationScaleDensity {
        LocationScaleDensity::univariate(base, l, s).unwrap()
    }

    #[test]
    fn identical_normals_have_zero_kl() {
        let p = uni(StandardDensity::Normal, 0.0, 1.0);
        assert_eq!(kl_closed(&p, &p).unwrap().value, 0.0);
    }

    #[test]
    fn rayleigh_example() {
        // σ₁² = 2, σ₂² = 1
        let p = uni(StandardDensity::Rayleigh, 0.0, 2f64.sqrt());
        let q = uni(StandardDensity::Rayleigh, 0.0, 1.0);
        let expected = 2.0 - 2f64.ln() - 1.0;
        assert!((kl_closed(&p, &q).unwrap().value - expected).abs() < 1e-12);
        assert!((rayleigh_kl(2f64.sqrt(), 1.0) - 0.306_852_819_440_054_7).abs() < 1e-12);
        let quad = quadrature_divergence(&p, &q, &FGenerator::kl(), 1e-12).unwrap();
        assert!((quad.value - expected).abs() < 1e-9);
    }

    #[test]
    fn halfnormal_exponential_example() {
        let p = uni(StandardDensity::HalfNormal, 0.0, 1.0);
        let q = uni(StandardDensity::Exponential, 0.0, (2.0 / PI).sqrt());
        let v = kl_closed(&p, &q).unwrap().value;
        assert!((v - (0.5 + (2.0 / PI).ln())).abs() < 1e-14);
        assert!((v - 0.048).abs() < 5e-4);
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        let pairs = [
            (uni(StandardDensity::Exponential, 0.0, 1.3), uni(StandardDensity::HalfNormal, 0.0, 0.7)),
            (uni(StandardDensity::HalfNormal, 0.0, 2.0), uni(StandardDensity::HalfNormal, 0.0, 0.9)),
            (uni(StandardDensity::Weibull { k: 3.5 }, 0.0, 1.1), uni(StandardDensity::Rayleigh, 0.0, 0.8)),
            (uni(StandardDensity::Exponential, 0.0, 0.5), uni(StandardDensity::Weibull { k: 2.0 }, 0.0, 2.0)),
            (uni(StandardDensity::Normal, 0.3, 1.7), uni(StandardDensity::Normal, -1.1, 0.6)),
        ];
        for (p, q) in pairs {
            let c = kl_closed(&p, &q).unwrap().value;
            let n = quadrature_divergence(&p, &q, &FGenerator::kl(), 1e-12).unwrap().value;
            assert!((c - n).abs() < 1e-8, "{} vs {}: {c} {n}", p.base(), q.base());
        }
    }

    #[test]
    fn unregistered_pair_is_capability_error() {
        let p = uni(StandardDensity::Normal, 0.0, 1.0);
        let q = uni(StandardDensity::Cauchy, 0.0, 1.0);
        assert!(matches!(kl_closed(&p, &q), Err(Error::Capability(_))));
        let v = divergence(&p, &q, &FGenerator::kl(), &DivergenceOptions::default()).unwrap();
        assert_eq!(v.method, Method::Quadrature);
        assert!((v.value - 0.2592).abs() < 1e-4);
        let r = divergence(&q, &p, &FGenerator::kl(), &DivergenceOptions::default()).unwrap();
        assert!(r.diverged());
    }

    #[test]
    fn conjugate_swaps_arguments() {
        let p = uni(StandardDensity::Normal, 0.0, 1.0);
        let q = uni(StandardDensity::Normal, 0.8, 1.5);
        for f in [FGenerator::kl(), FGenerator::hellinger2(), FGenerator::chi2(), FGenerator::alpha(0.3).unwrap()] {
            let a = quadrature_divergence(&p, &q, &f.conjugate(), 1e-12).unwrap().value;
            let b = quadrature_divergence(&q, &p, &f, 1e-12).unwrap().value;
            assert!((a - b).abs() < 1e-8, "{f}");
        }
    }

    #[test]
    fn canonical_reduction_of_normals() {
        let g1 = GroupElement::univariate(1.0, 2.0).unwrap();
        let g2 = GroupElement::univariate(4.0, 3.0).unwrap();
        let h = canonical_reduce(&g1, &g2).unwrap();
        let (l, s) = h.as_univariate().unwrap();
        assert!((l - 1.5).abs() < 1e-15 && (s - 1.5).abs() < 1e-15);
        assert!(canonical_reduce(&g1, &g1).unwrap().is_identity(1e-15));
        let direct = normal_kl(1.0, 2.0, 4.0, 3.0);
        assert!((normal_kl_reduced(l, s) - direct).abs() < 1e-15);
    }

    #[test]
    fn mahalanobis_burg_basics() {
        let q = SpdMatrix::from_diag(&[2.0, 3.0]).unwrap();
        assert_eq!(mahalanobis(&[1.0, 2.0], &[1.0, 2.0], &q).unwrap(), 0.0);
        let two = SpdMatrix::scalar(2.0).unwrap();
        let one = SpdMatrix::scalar(1.0).unwrap();
        assert!((burg(&two, &one).unwrap() - 0.5 * (2.0 - 1.0 - 2f64.ln())).abs() < 1e-15);
        assert!((burg(&two, &one).unwrap() - 0.1534).abs() < 1e-4);
        assert_eq!(burg(&q, &q).unwrap(), 0.0);
        assert!(burg(&q, &one).is_err());
    }

    #[test]
    fn entropy_and_cross_entropy() {
        let g = GroupElement::univariate(3.0, 2.0).unwrap();
        let h0 = StandardDensity::Normal.entropy().unwrap();
        assert_eq!(entropy_shift(h0, &GroupElement::identity(1)), h0);
        let shifted = entropy_shift(h0, &g);
        let expected = 0.5 * (2.0 * PI * std::f64::consts::E).ln() + 2f64.ln();
        assert!((shifted - expected).abs() < 1e-14);
        let q = LocationScaleDensity::new(StandardDensity::Normal, g).unwrap();
        let by_quad = cross_entropy(&q, &q).unwrap();
        assert!((by_quad - expected).abs() < 1e-9);

        let p = uni(StandardDensity::Normal, 0.5, 1.2);
        let r = uni(StandardDensity::Normal, -0.3, 0.7);
        let kl = cross_entropy(&p, &r).unwrap() - differential_entropy(&p).unwrap();
        assert!((kl - kl_closed(&p, &r).unwrap().value).abs() < 1e-10);
        let student = uni(StandardDensity::StudentT { nu: 4.0 }, 0.0, 3.0);
        let h = differential_entropy(&student).unwrap();
        let std = differential_entropy(&uni(StandardDensity::StudentT { nu: 4.0 }, 0.0, 1.0)).unwrap();
        assert!((h - std - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn gaussian_mutual_information() {
        assert_eq!(mutual_information_gaussian(0.0).unwrap(), 0.0);
        assert!((mutual_information_gaussian(0.5).unwrap() - 0.143_841_036_225_890_3).abs() < 1e-14);
        assert!(mutual_information_gaussian(1.0).is_err());
        let est = mutual_information_mc(0.5, &FGenerator::kl(), AffineMap::identity(), AffineMap::identity(), 50_000, 4)
            .unwrap();
        assert!((est.value - 0.143_841).abs() < 4.0 * est.stderr);
    }

    #[test]
    fn lognormal_matches_normal() {
        assert_eq!(lognormal_kl(0.2, 1.0, 0.2, 1.0).unwrap(), 0.0);
        assert!((lognormal_kl(0.0, 1.0, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let q = lognormal_divergence_quadrature(
            &LogNormal::new(0.0, 1.0).unwrap(),
            &LogNormal::new(1.0, 1.0).unwrap(),
            &FGenerator::kl(),
            1e-11,
        )
        .unwrap();
        assert!((q - 0.5).abs() < 1e-7);
    }
}
