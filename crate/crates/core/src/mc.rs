//! Monte Carlo estimation of f-divergences.
//!
//! Three estimators share one [`SampleSet`] type:
//!
//! - importance sampling, `(1/m) Σ (p(xᵢ)/r(xᵢ)) f(q(xᵢ)/p(xᵢ))` with `xᵢ ~ r`;
//! - the plug-in estimator, the special case `r = p`;
//! - the Bregman estimator `(1/m) Σ B_f(q(xᵢ)/p(xᵢ) : 1)` with `xᵢ ~ p`,
//!   whose terms are scalar Bregman divergences and hence never negative.
//!
//! [`estimate_reduced`] evaluates every pair `(p_{g₁}, q_{g₂})` on one fixed
//! sample set from the standard density `p`, through the canonical element
//! `g₁⁻¹g₂`. Estimates are then a deterministic function of the pair, so
//! comparisons between pairs never flip between evaluations.
//!
//! Ratios are formed in log space. Sums are pairwise within a fixed number of
//! contiguous partitions, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::density::{LocationScaleDensity, StandardDensity};
use crate::divergence::canonical_reduce;
use crate::error::{Error, Result};
use crate::generator::FGenerator;
use crate::group::GroupElement;

/// Negative Bregman terms above this are rounding and are clamped to zero.
pub const BREGMAN_ROUNDOFF: f64 = 1e-12;

const PAIRWISE_BLOCK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub m: usize,
    pub seed: u64,
    /// Number of contiguous partitions for the deterministic reduction.
    pub partitions: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { m: 200_000, seed: 0, partitions: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    Importance,
    Plugin,
    Bregman,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Importance => "importance",
            EstimatorKind::Plugin => "plugin",
            EstimatorKind::Bregman => "bregman",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Sample standard deviation of the terms over `√m`.
    pub stderr: f64,
    pub m: usize,
    pub kind: EstimatorKind,
}

/// `m` i.i.d. draws from a declared proposal density.
#[derive(Debug, Clone)]
pub struct SampleSet {
    seed: u64,
    proposal: LocationScaleDensity,
    dim: usize,
    data: Vec<f64>,
}

impl SampleSet {
    pub fn draw(proposal: &LocationScaleDensity, m: usize, seed: u64) -> Result<Self> {
        let dim = proposal.dim();
        let data = proposal.sample(m, seed)?.into_iter().flatten().collect();
        Ok(SampleSet { seed, proposal: proposal.clone(), dim, data })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn proposal(&self) -> &LocationScaleDensity {
        &self.proposal
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn chunks(&self, partitions: usize) -> Vec<(usize, &[f64])> {
        let m = self.len();
        let per = m.div_ceil(partitions.max(1)).max(1);
        self.data
            .chunks(per * self.dim)
            .enumerate()
            .map(|(i, c)| (i * per, c))
            .collect()
    }
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn partitioned_sum(xs: &[f64], partitions: usize) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let per = xs.len().div_ceil(partitions.max(1)).max(1);
    let partials: Vec<f64> = xs.chunks(per).map(pairwise_sum).collect();
    pairwise_sum(&partials)
}

/// Mean and standard error of per-sample terms.
pub fn summarize(terms: &[f64], kind: EstimatorKind, partitions: usize) -> Estimate {
    let m = terms.len();
    if m == 0 {
        return Estimate { value: 0.0, stderr: 0.0, m, kind };
    }
    let mean = partitioned_sum(terms, partitions) / m as f64;
    if !mean.is_finite() {
        return Estimate { value: mean, stderr: f64::INFINITY, m, kind };
    }
    let stderr = if m > 1 {
        let sq: Vec<f64> = terms.iter().map(|t| (t - mean).powi(2)).collect();
        (partitioned_sum(&sq, partitions) / (m - 1) as f64 / m as f64).sqrt()
    } else {
        0.0
    };
    Estimate { value: mean, stderr, m, kind }
}

/// Evaluates `term(global_index, point)` over the sample set in parallel.
fn collect_terms<F>(sample: &SampleSet, partitions: usize, term: F) -> Result<Vec<f64>>
where
    F: Fn(usize, &[f64]) -> Result<f64> + Sync,
{
    let dim = sample.dim;
    let parts: Vec<Vec<f64>> = sample
        .chunks(partitions)
        .into_par_iter()
        .map(|(start, chunk)| {
            chunk
                .chunks(dim)
                .enumerate()
                .map(|(i, x)| term(start + i, x))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Importance-weighted term `(p/r) f(q/p)` from log-densities.
fn importance_term(f: &FGenerator, lp: f64, lq: f64, lr: f64) -> f64 {
    let wq = || (lq - lr).exp();
    if lp == f64::NEG_INFINITY {
        if lq == f64::NEG_INFINITY {
            return 0.0;
        }
        return weight_times_slope(f, wq());
    }
    let w = (lp - lr).exp();
    if lq == f64::NEG_INFINITY {
        return if w == 0.0 { 0.0 } else { w * f.value_at_zero() };
    }
    if f.is_kl() {
        return w * (lp - lq);
    }
    if f.is_reverse_kl() {
        return wq() * (lq - lp);
    }
    let u = (lq - lp).exp();
    if u == f64::INFINITY {
        return weight_times_slope(f, wq());
    }
    if w == 0.0 {
        let v = wq();
        return if v == 0.0 { 0.0 } else { v * (f.eval(u) / u) };
    }
    w * f.eval(u)
}

fn weight_times_slope(f: &FGenerator, weight: f64) -> f64 {
    let slope = f.slope_at_infinity();
    if slope == 0.0 || weight == 0.0 {
        0.0
    } else {
        weight * slope
    }
}

/// Importance-sampling estimate of `I_f(p:q)` from draws of
/// `sample.proposal()`. Reported as `Plugin` when the proposal is `p`.
pub fn estimate_importance(
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    f: &FGenerator,
    sample: &SampleSet,
    partitions: usize,
) -> Result<Estimate> {
    check_dims(p, q, sample)?;
    let r = sample.proposal();
    let plugin = r == p;
    let terms = collect_terms(sample, partitions, |i, x| {
        let lr = r.log_pdf(x);
        if lr == f64::NEG_INFINITY {
            return Err(Error::Numerical { index: i, message: "proposal density is zero at a draw".into() });
        }
        let (lp, lq) = if plugin { (lr, q.log_pdf(x)) } else { (p.log_pdf(x), q.log_pdf(x)) };
        let t = importance_term(f, lp, lq, lr);
        if t.is_nan() {
            return Err(Error::Numerical { index: i, message: "term is NaN".into() });
        }
        Ok(t)
    })?;
    let kind = if plugin { EstimatorKind::Plugin } else { EstimatorKind::Importance };
    Ok(summarize(&terms, kind, partitions))
}

/// Bregman estimate `(1/m) Σ B_f(q(xᵢ)/p(xᵢ) : 1)` from draws of `p`.
/// Every term is non-negative, so the estimate is too.
pub fn estimate_bregman(
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    f: &FGenerator,
    sample: &SampleSet,
    partitions: usize,
) -> Result<Estimate> {
    check_dims(p, q, sample)?;
    if !f.differentiable_at_one() {
        return Err(Error::capability(format!(
            "the Bregman estimator needs f'(1); generator {} has none",
            f.name()
        )));
    }
    if sample.proposal() != p {
        return Err(Error::domain("the Bregman estimator needs a sample set drawn from p"));
    }
    let terms = collect_terms(sample, partitions, |i, x| {
        let lp = p.log_pdf(x);
        if lp == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let lq = q.log_pdf(x);
        let term = if f.is_kl() {
            // −log u + u − 1 with log u = lq − lp
            let d = lq - lp;
            if d == f64::NEG_INFINITY {
                f64::INFINITY
            } else {
                d.exp_m1() - d
            }
        } else {
            f.bregman_at_one((lq - lp).exp())?
        };
        if term.is_nan() {
            return Err(Error::Numerical { index: i, message: "Bregman term is NaN".into() });
        }
        if term < 0.0 {
            if term > -BREGMAN_ROUNDOFF {
                return Ok(0.0);
            }
            return Err(Error::Numerical {
                index: i,
                message: format!("Bregman term {term:e} is negative beyond rounding"),
            });
        }
        Ok(term)
    })?;
    Ok(summarize(&terms, EstimatorKind::Bregman, partitions))
}

/// Estimate of `I_f(p_{g₁} : q_{g₂})` on a fixed sample set drawn from the
/// standard density `base_p`, via `I_f(p : q_{g₁⁻¹g₂})`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_reduced(
    g1: &GroupElement,
    g2: &GroupElement,
    base_p: &StandardDensity,
    base_q: &StandardDensity,
    f: &FGenerator,
    sample: &SampleSet,
    kind: EstimatorKind,
    partitions: usize,
) -> Result<Estimate> {
    // Both original densities must exist (half-line bases: scale subgroup only).
    LocationScaleDensity::from_general(base_p.clone(), g1.clone())?;
    LocationScaleDensity::from_general(base_q.clone(), g2.clone())?;
    let h = canonical_reduce(g1, g2)?;
    let p = LocationScaleDensity::from_general(base_p.clone(), GroupElement::identity(base_p.dim()))?;
    let q = LocationScaleDensity::from_general(base_q.clone(), h)?;
    match kind {
        EstimatorKind::Bregman => estimate_bregman(&p, &q, f, sample, partitions),
        EstimatorKind::Plugin => {
            if sample.proposal() != &p {
                return Err(Error::domain("reduced plug-in estimation needs draws from the standard p"));
            }
            estimate_importance(&p, &q, f, sample, partitions)
        }
        EstimatorKind::Importance => estimate_importance(&p, &q, f, sample, partitions),
    }
}

fn check_dims(p: &LocationScaleDensity, q: &LocationScaleDensity, sample: &SampleSet) -> Result<()> {
    if p.dim() != q.dim() || p.dim() != sample.dim {
        return Err(Error::domain("dimension mismatch between densities and sample set"));
    }
    Ok(())
}
