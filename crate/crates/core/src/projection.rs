//! Information projections onto location-scale families.
//!
//! For a fixed density `p_g` and a family `𝓕_q = {q_h}`, the right projection
//! minimizes `I_f(p_g : q_h)` over `h`. Since `I_f(p_g : q_h) = I_f(p : q_{g⁻¹h})`,
//! the minimum does not depend on `g` and the minimizers form the orbit
//! `h*(g) = g·h*`. The left projection minimizes over the first argument and
//! is the right projection under the conjugate generator.
//!
//! Search coordinates are taken relative to `p_g` (log scale ratio, location
//! offset in units of the scale of `p_g`), so the solver starts at `r = 1`.

use rayon::prelude::*;

use crate::density::{LocationScaleDensity, StandardDensity, Support};
use crate::divergence::{closed_form, quadrature_divergence, Method};
use crate::error::{Error, Result};
use crate::generator::FGenerator;
use crate::group::GroupElement;
use crate::linalg::{Matrix, SpdMatrix};
use crate::mc::{estimate_reduced, EstimatorKind, McConfig, SampleSet};
use crate::optimize::{minimize_scalar, nelder_mead, NelderMeadOptions};

/// Quadrature tolerance for projection objectives.
pub const OBJECTIVE_QUADRATURE_TOL: f64 = 1e-9;
/// Bounds on `log s` for scale searches.
pub const LOG_SCALE_BOUND: f64 = 30.0;
const LOCATION_BOUND: f64 = 1e6;
const STATIONARITY_STEP: f64 = 1e-4;

/// Which group coordinates vary inside a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyMode {
    /// `q_{l_a, sP_a}` for `s > 0`.
    Scale,
    /// `q_{l, P_a}` for `l ∈ ℝᵈ`.
    Location,
    /// `q_{l, P}` over the whole group.
    LocationScale,
}

/// A location-scale family with a possibly restricted parameter set.
/// The anchor supplies the coordinates held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    base: StandardDensity,
    mode: FamilyMode,
    anchor: GroupElement,
}

impl Family {
    pub fn new(base: StandardDensity, mode: FamilyMode, anchor: GroupElement) -> Result<Self> {
        base.validate()?;
        if !base.is_regular() {
            return Err(Error::domain(format!("{base} is not a regular family")));
        }
        if anchor.dim() != base.dim() {
            return Err(Error::domain("family anchor dimension does not match the base density"));
        }
        anchor.spd_scale()?;
        if base.support() != Support::Full && mode != FamilyMode::Scale {
            return Err(Error::domain(format!("{base} is not full-support; only scale families are admissible")));
        }
        LocationScaleDensity::new(base.clone(), anchor.clone())?;
        Ok(Family { base, mode, anchor })
    }

    pub fn scale(base: StandardDensity) -> Result<Self> {
        let d = base.dim();
        Family::new(base, FamilyMode::Scale, GroupElement::identity(d))
    }

    /// Location subfamily with fixed scale.
    pub fn location(base: StandardDensity, scale: SpdMatrix) -> Result<Self> {
        let d = base.dim();
        Family::new(base, FamilyMode::Location, GroupElement::new(vec![0.0; d], scale)?)
    }

    pub fn location_scale(base: StandardDensity) -> Result<Self> {
        let d = base.dim();
        Family::new(base, FamilyMode::LocationScale, GroupElement::identity(d))
    }

    pub fn base(&self) -> &StandardDensity {
        &self.base
    }

    pub fn mode(&self) -> FamilyMode {
        self.mode
    }

    pub fn anchor(&self) -> &GroupElement {
        &self.anchor
    }

    pub fn member(&self, h: &GroupElement) -> Result<LocationScaleDensity> {
        LocationScaleDensity::new(self.base.clone(), h.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Minimum over the second argument.
    Right,
    /// Minimum over the first argument.
    Left,
}

impl Side {
    pub fn name(&self) -> &'static str {
        match self {
            Side::Right => "right",
            Side::Left => "left",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub solver: &'static str,
    pub iterations: usize,
    pub evaluations: usize,
    /// Final golden-section bracket width or simplex diameter.
    pub final_step: f64,
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub argmin: GroupElement,
    pub min_value: f64,
    pub side: Side,
    pub method: Method,
    /// False when the best point lies on the search-box boundary or the
    /// solver did not converge.
    pub attained: bool,
    /// False when every probe was `+∞`.
    pub feasible: bool,
    /// Largest absolute central-difference derivative of the objective at
    /// the argmin, in natural coordinates.
    pub stationarity: Option<f64>,
    pub trace: SolverTrace,
}

#[derive(Debug, Clone, Copy)]
pub struct ProjectionOptions {
    pub quadrature_tol: f64,
    /// Sample size and seed of the fixed sample set for Monte Carlo objectives.
    pub mc: McConfig,
    pub nelder_mead: NelderMeadOptions,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions {
            quadrature_tol: OBJECTIVE_QUADRATURE_TOL,
            mc: McConfig::default(),
            nelder_mead: NelderMeadOptions::default(),
        }
    }
}

enum Evaluator {
    Closed,
    Quadrature(f64),
    MonteCarlo { sample: Box<SampleSet>, partitions: usize },
}

struct Objective<'a> {
    p: &'a LocationScaleDensity,
    family: &'a Family,
    f: &'a FGenerator,
    evaluator: Evaluator,
    l_ref: Vec<f64>,
    s_ref: f64,
}

impl<'a> Objective<'a> {
    fn new(p: &'a LocationScaleDensity, family: &'a Family, f: &'a FGenerator, opts: &ProjectionOptions) -> Result<Self> {
        let anchor_member = family.member(family.anchor())?;
        let evaluator = match closed_form(p, &anchor_member, f) {
            Ok(_) => Evaluator::Closed,
            Err(Error::Capability(_)) if p.dim() == 1 => Evaluator::Quadrature(opts.quadrature_tol),
            Err(Error::Capability(_)) => {
                let std_p = LocationScaleDensity::standard(p.base().clone())?;
                let sample = SampleSet::draw(&std_p, opts.mc.m, opts.mc.seed)?;
                Evaluator::MonteCarlo { sample: Box::new(sample), partitions: opts.mc.partitions }
            }
            Err(e) => return Err(e),
        };
        let g = p.group_element();
        let s_ref = (g.log_abs_det() / g.dim() as f64).exp();
        Ok(Objective { p, family, f, evaluator, l_ref: g.location().to_vec(), s_ref })
    }

    fn method(&self) -> Method {
        match self.evaluator {
            Evaluator::Closed => Method::ClosedForm,
            Evaluator::Quadrature(_) => Method::Quadrature,
            Evaluator::MonteCarlo { .. } => Method::MonteCarlo,
        }
    }

    fn value_at(&self, h: &GroupElement) -> Result<f64> {
        let q = self.family.member(h)?;
        match &self.evaluator {
            Evaluator::Closed => Ok(closed_form(self.p, &q, self.f)?.value),
            Evaluator::Quadrature(tol) => match quadrature_divergence(self.p, &q, self.f, *tol) {
                Ok(v) => Ok(v.value),
                Err(Error::Accuracy { best_estimate, .. }) => Ok(best_estimate),
                Err(e) => Err(e),
            },
            Evaluator::MonteCarlo { sample, partitions } => Ok(estimate_reduced(
                self.p.group_element(),
                h,
                self.p.base(),
                self.family.base(),
                self.f,
                sample,
                EstimatorKind::Plugin,
                *partitions,
            )?
            .value),
        }
    }

    /// Search coordinates to group element.
    fn element(&self, theta: &[f64]) -> Result<GroupElement> {
        let d = self.family.base().dim();
        let anchor = self.family.anchor();
        let offset = |u: &[f64]| -> Vec<f64> { self.l_ref.iter().zip(u).map(|(l, v)| l + self.s_ref * v).collect() };
        match self.family.mode() {
            FamilyMode::Scale => {
                let s = (theta[0]).exp() * self.s_ref;
                GroupElement::new(anchor.location().to_vec(), SpdMatrix::new(anchor.scale().scale(s))?)
            }
            FamilyMode::Location => GroupElement::new(offset(theta), anchor.spd_scale()?),
            FamilyMode::LocationScale => {
                let location = offset(&theta[..d]);
                let mut l = Matrix::zeros(d);
                let mut k = d;
                for i in 0..d {
                    for j in 0..=i {
                        l[(i, j)] = if i == j { theta[k].exp() } else { theta[k] };
                        k += 1;
                    }
                }
                let p = l.mul(&l.transpose()).scale(self.s_ref);
                GroupElement::new(location, SpdMatrix::new(p.symmetrized())?)
            }
        }
    }

    fn eval(&self, theta: &[f64]) -> f64 {
        self.element(theta).and_then(|h| self.value_at(&h)).unwrap_or(f64::NAN)
    }

    fn n_params(&self) -> usize {
        let d = self.family.base().dim();
        match self.family.mode() {
            FamilyMode::Scale => 1,
            FamilyMode::Location => d,
            FamilyMode::LocationScale => d + d * (d + 1) / 2,
        }
    }

    /// Conversion factor from search-coordinate derivatives to natural ones
    /// (`s` for scale, `l` for location).
    fn natural_derivative(&self, theta: &[f64], i: usize) -> f64 {
        let mut up = theta.to_vec();
        let mut dn = theta.to_vec();
        up[i] += STATIONARITY_STEP;
        dn[i] -= STATIONARITY_STEP;
        let dtheta = (self.eval(&up) - self.eval(&dn)) / (2.0 * STATIONARITY_STEP);
        let d = self.family.base().dim();
        match self.family.mode() {
            FamilyMode::Scale => dtheta / (theta[0].exp() * self.s_ref),
            FamilyMode::Location => dtheta / self.s_ref,
            FamilyMode::LocationScale if i < d => dtheta / self.s_ref,
            FamilyMode::LocationScale => dtheta,
        }
    }
}

/// Minimizes `I_f(p : q_h)` over the members `q_h` of `family`.
pub fn project_right(
    p: &LocationScaleDensity,
    family: &Family,
    f: &FGenerator,
    opts: &ProjectionOptions,
) -> Result<ProjectionResult> {
    project(p, family, f, opts, Side::Right)
}

/// Minimizes `I_f(p_h : q)` over the members `p_h` of `family`, as the right
/// projection of `q` under the conjugate generator.
pub fn project_left(
    family: &Family,
    q: &LocationScaleDensity,
    f: &FGenerator,
    opts: &ProjectionOptions,
) -> Result<ProjectionResult> {
    project(q, family, &f.conjugate(), opts, Side::Left)
}

fn project(
    fixed: &LocationScaleDensity,
    family: &Family,
    f: &FGenerator,
    opts: &ProjectionOptions,
    side: Side,
) -> Result<ProjectionResult> {
    if fixed.dim() != family.base().dim() {
        return Err(Error::domain("density and family dimensions differ"));
    }
    if !fixed.base().is_regular() {
        return Err(Error::domain(format!("{} is not a regular family", fixed.base())));
    }
    let obj = Objective::new(fixed, family, f, opts)?;
    let n = obj.n_params();
    let (theta, value, attained, trace) = if n == 1 {
        let (lo, hi, step) = match family.mode() {
            FamilyMode::Scale => {
                let shift = obj.s_ref.ln();
                (-LOG_SCALE_BOUND - shift, LOG_SCALE_BOUND - shift, 1.0)
            }
            _ => (-LOCATION_BOUND, LOCATION_BOUND, 1.0),
        };
        let m = minimize_scalar(|t| obj.eval(&[t]), 0.0, step, lo, hi);
        let trace = SolverTrace {
            solver: "golden_section",
            iterations: m.iterations,
            evaluations: m.evaluations,
            final_step: m.final_width,
            restarts: 1,
        };
        (vec![m.x], m.value, !m.at_boundary && !m.infeasible, trace)
    } else {
        let m = nelder_mead(|t| obj.eval(t), &vec![0.0; n], &opts.nelder_mead);
        let trace = SolverTrace {
            solver: "nelder_mead",
            iterations: m.iterations,
            evaluations: m.evaluations,
            final_step: m.final_diameter,
            restarts: m.restarts,
        };
        (m.x, m.value, m.converged && m.value.is_finite(), trace)
    };
    let feasible = value < f64::INFINITY;
    let argmin = obj.element(&theta)?;
    let stationarity = if feasible {
        let worst = (0..n).map(|i| obj.natural_derivative(&theta, i).abs()).fold(0.0, f64::max);
        worst.is_finite().then_some(worst)
    } else {
        None
    };
    Ok(ProjectionResult {
        argmin,
        min_value: value,
        side,
        method: obj.method(),
        attained: attained && feasible,
        feasible,
        stationarity,
        trace,
    })
}

/// Distance between two group elements in density coordinates: location
/// and `PPᵀ` (the scale itself for `d = 1`).
pub fn orbit_distance(a: &GroupElement, b: &GroupElement) -> f64 {
    let loc = a.location().iter().zip(b.location()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = if a.dim() == 1 {
        (a.scale()[(0, 0)] - b.scale()[(0, 0)]).abs()
    } else {
        let pa = a.scale().mul(&a.scale().transpose());
        let pb = b.scale().mul(&b.scale().transpose());
        pa.max_abs_diff(&pb)
    };
    loc.max(scale)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GIndependenceEntry {
    pub g: GroupElement,
    pub result: ProjectionResult,
    /// `g·h*` with `h*` the argmin at the identity.
    pub predicted_argmin: GroupElement,
    pub orbit_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GIndependenceReport {
    pub reference: ProjectionResult,
    pub entries: Vec<GIndependenceEntry>,
    /// `max_g |I_f(p_g : 𝓕_q) − I_f(p : 𝓕_q)|`.
    pub max_spread: f64,
    pub max_orbit_error: f64,
    /// True when every run converged to an interior minimum.
    pub all_attained: bool,
}

/// Projects `p_g` onto `family` for every `g` in `g_list` and compares the
/// minima with the one at the identity, and each argmin with `g·h*`.
pub fn verify_g_independence(
    base_p: &StandardDensity,
    family: &Family,
    f: &FGenerator,
    g_list: &[GroupElement],
    opts: &ProjectionOptions,
) -> Result<GIndependenceReport> {
    if g_list.is_empty() {
        return Err(Error::domain("verify_g_independence needs at least one group element"));
    }
    let d = base_p.dim();
    let reference = project_right(
        &LocationScaleDensity::new(base_p.clone(), GroupElement::identity(d))?,
        family,
        f,
        opts,
    )?;
    let entries = g_list
        .par_iter()
        .map(|g| {
            let p_g = LocationScaleDensity::new(base_p.clone(), g.clone())?;
            let result = project_right(&p_g, family, f, opts)?;
            let predicted_argmin = g.compose(&reference.argmin)?;
            let orbit_error = orbit_distance(&result.argmin, &predicted_argmin);
            Ok(GIndependenceEntry { g: g.clone(), result, predicted_argmin, orbit_error })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_spread = entries
        .iter()
        .map(|e| {
            if e.result.min_value == reference.min_value {
                0.0
            } else {
                (e.result.min_value - reference.min_value).abs()
            }
        })
        .fold(0.0, f64::max);
    let max_orbit_error = entries.iter().map(|e| e.orbit_error).fold(0.0, f64::max);
    let all_attained = reference.attained && entries.iter().all(|e| e.result.attained);
    Ok(GIndependenceReport { reference, entries, max_spread, max_orbit_error, all_attained })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn uni(base: StandardDensity, l: f64, s: f64) -> LocationScaleDensity {
        LocationScaleDensity::univariate(base, l, s).unwrap()
    }

    #[test]
    fn same_family_projects_onto_itself() {
        let p = uni(StandardDensity::Normal, 1.5, 2.0);
        let fam = Family::location_scale(StandardDensity::Normal).unwrap();
        let r = project_right(&p, &fam, &FGenerator::kl(), &ProjectionOptions::default()).unwrap();
        assert!(r.min_value.abs() < 1e-12, "{r:?}");
        assert!(r.argmin.max_abs_diff(p.group_element()) < 1e-5);
        assert!(r.attained && r.feasible);
    }

    #[test]
    fn exponential_onto_rayleigh_scale_family() {
        let p = uni(StandardDensity::Exponential, 0.0, 1.0);
        // Weibull(k=2) scale s is √2 times the Rayleigh σ.
        let fam = Family::scale(StandardDensity::weibull(2.0).unwrap()).unwrap();
        let r = project_right(&p, &fam, &FGenerator::kl(), &ProjectionOptions::default()).unwrap();
        assert_eq!(r.method, Method::ClosedForm);
        assert!((r.argmin.scale()[(0, 0)] - 2f64.sqrt()).abs() < 1e-6);
        assert!(r.stationarity.unwrap() < 1e-6);
        let fam = Family::scale(StandardDensity::Rayleigh).unwrap();
        let r = project_right(&p, &fam, &FGenerator::kl(), &ProjectionOptions::default()).unwrap();
        assert!((r.argmin.scale()[(0, 0)] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn halfnormal_onto_exponential_uses_ratio() {
        let s1 = 3.0;
        let p = uni(StandardDensity::HalfNormal, 0.0, s1);
        let fam = Family::scale(StandardDensity::Exponential).unwrap();
        let r = project_right(&p, &fam, &FGenerator::kl(), &ProjectionOptions::default()).unwrap();
        let r_star = (PI / 2.0).sqrt();
        assert!((s1 / r.argmin.scale()[(0, 0)] - r_star).abs() < 1e-6, "{r:?}");
        assert!((r.min_value - (0.5 + (2.0 / PI).ln())).abs() < 1e-12);
    }

    #[test]
    fn left_equals_right_with_conjugate() {
        let q = uni(StandardDensity::weibull(2.0).unwrap(), 0.0, 1.0);
        let fam = Family::scale(StandardDensity::Exponential).unwrap();
        let opts = ProjectionOptions::default();
        let left = project_left(&fam, &q, &FGenerator::kl(), &opts).unwrap();
        let right = project_right(&q, &fam, &FGenerator::reverse_kl(), &opts).unwrap();
        assert_eq!(left.side, Side::Left);
        assert!((left.min_value - right.min_value).abs() < 1e-8);
        assert!(left.argmin.max_abs_diff(&right.argmin) < 1e-8);
        assert!((left.argmin.scale()[(0, 0)] - 0.5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn cauchy_onto_normal_family_is_infeasible() {
        let p = uni(StandardDensity::Cauchy, 0.0, 1.0);
        let fam = Family::scale(StandardDensity::Normal).unwrap();
        let r = project_right(&p, &fam, &FGenerator::kl(), &ProjectionOptions::default()).unwrap();
        assert!(!r.feasible && !r.attained);
        assert_eq!(r.min_value, f64::INFINITY);
    }

    #[test]
    fn half_line_family_must_be_scale_only() {
        assert!(matches!(
            Family::location_scale(StandardDensity::Exponential),
            Err(Error::Domain(_))
        ));
        assert!(matches!(Family::scale(StandardDensity::Uniform), Err(Error::Domain(_))));
    }

    #[test]
    fn orbit_law_for_normal_onto_cauchy() {
        let fam = Family::location_scale(StandardDensity::Cauchy).unwrap();
        let gs = vec![GroupElement::univariate(2.0, 0.5).unwrap(), GroupElement::univariate(-1.0, 3.0).unwrap()];
        let rep = verify_g_independence(
            &StandardDensity::Normal,
            &fam,
            &FGenerator::kl(),
            &gs,
            &ProjectionOptions::default(),
        )
        .unwrap();
        assert!(rep.max_spread < 1e-4, "{rep:?}");
        assert!(rep.max_orbit_error < 1e-4, "{rep:?}");
        assert!(rep.reference.min_value < 0.26);
    }

    #[test]
    fn mvn_location_scale_projection_by_closed_form() {
        let base = StandardDensity::mvn(2).unwrap();
        let sigma = SpdMatrix::from_rows(&[vec![2.0, 0.3], vec![0.3, 0.5]]).unwrap();
        let p = LocationScaleDensity::new(base.clone(), GroupElement::new(vec![1.0, -1.0], sigma).unwrap()).unwrap();
        let fam = Family::location_scale(base).unwrap();
        let r = project_right(&p, &fam, &FGenerator::kl(), &ProjectionOptions::default()).unwrap();
        assert!(r.min_value < 1e-10, "{r:?}");
        assert!(orbit_distance(&r.argmin, p.group_element()) < 1e-5);
    }
}
