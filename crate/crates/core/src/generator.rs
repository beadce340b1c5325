//! Convex generators of f-divergences.
//!
//! `I_f(p:q) = ∫ p(x) f(q(x)/p(x)) dx` for a convex `f` with `f(1) = 0`.
//! With this orientation the Kullback–Leibler divergence uses
//! `f(u) = −log u` and its conjugate `f*(u) = u f(1/u) = u log u` gives the
//! reverse KL.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Kl,
    ReverseKl,
    Hellinger2,
    Chi2,
    TotalVariation,
    /// `(u^α − αu − (1−α)) / (α(α−1))`
    Alpha(f64),
    Conjugate(Box<FGenerator>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FGenerator {
    kind: Kind,
}

impl fmt::Display for FGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FGenerator {
    pub fn kl() -> Self {
        FGenerator { kind: Kind::Kl }
    }

    pub fn reverse_kl() -> Self {
        FGenerator { kind: Kind::ReverseKl }
    }

    pub fn hellinger2() -> Self {
        FGenerator { kind: Kind::Hellinger2 }
    }

    pub fn chi2() -> Self {
        FGenerator { kind: Kind::Chi2 }
    }

    pub fn total_variation() -> Self {
        FGenerator { kind: Kind::TotalVariation }
    }

    /// α-divergence generator; `α ∉ {0, 1}` (those are the KL limits).
    pub fn alpha(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha == 0.0 || alpha == 1.0 {
            return Err(Error::domain(format!("alpha must be finite and not 0 or 1, got {alpha}")));
        }
        Ok(FGenerator { kind: Kind::Alpha(alpha) })
    }

    /// Looks a generator up by registry name: `kl`, `reverse_kl`,
    /// `hellinger2`, `chi2`, `tv`, `alpha(a=0.5)`.
    pub fn by_name(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "kl" => return Ok(Self::kl()),
            "reverse_kl" => return Ok(Self::reverse_kl()),
            "hellinger2" => return Ok(Self::hellinger2()),
            "chi2" => return Ok(Self::chi2()),
            "tv" => return Ok(Self::total_variation()),
            _ => {}
        }
        if let Some(args) = name.strip_prefix("alpha(").and_then(|r| r.strip_suffix(')')) {
            let value = args
                .trim()
                .strip_prefix("a=")
                .ok_or_else(|| Error::parse(format!("expected alpha(a=<value>), got {name}")))?;
            let a: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("invalid alpha value '{value}'")))?;
            return Self::alpha(a);
        }
        Err(Error::parse(format!("unknown generator '{name}'")))
    }

    pub fn name(&self) -> String {
        match &self.kind {
            Kind::Kl => "kl".into(),
            Kind::ReverseKl => "reverse_kl".into(),
            Kind::Hellinger2 => "hellinger2".into(),
            Kind::Chi2 => "chi2".into(),
            Kind::TotalVariation => "tv".into(),
            Kind::Alpha(a) => format!("alpha(a={a})"),
            Kind::Conjugate(inner) => format!("conjugate({})", inner.name()),
        }
    }

    pub fn is_kl(&self) -> bool {
        matches!(self.kind, Kind::Kl)
    }

    /// True for generators whose divergence is `KL(q:p)`.
    pub fn is_reverse_kl(&self) -> bool {
        match &self.kind {
            Kind::ReverseKl => true,
            Kind::Conjugate(inner) => inner.is_kl(),
            _ => false,
        }
    }

    /// Conjugate generator `f*(u) = u f(1/u)`; `I_{f*}(p:q) = I_f(q:p)`.
    ///
    /// Conjugating twice returns the original generator.
    pub fn conjugate(&self) -> FGenerator {
        match &self.kind {
            Kind::Conjugate(inner) => (**inner).clone(),
            _ => FGenerator { kind: Kind::Conjugate(Box::new(self.clone())) },
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match &self.kind {
            Kind::Kl => -u.ln(),
            Kind::ReverseKl => {
                if u == 0.0 {
                    0.0
                } else {
                    u * u.ln()
                }
            }
            Kind::Hellinger2 => 0.5 * (u.sqrt() - 1.0).powi(2),
            Kind::Chi2 => (u - 1.0).powi(2),
            Kind::TotalVariation => 0.5 * (u - 1.0).abs(),
            Kind::Alpha(a) => {
                if u == 0.0 {
                    return self.value_at_zero();
                }
                (u.powf(*a) - a * u - (1.0 - a)) / (a * (a - 1.0))
            }
            Kind::Conjugate(inner) => {
                if u == 0.0 {
                    inner.slope_at_infinity()
                } else if u == f64::INFINITY {
                    f64::INFINITY * inner.value_at_zero().signum()
                } else {
                    let v = 1.0 / u;
                    if v == f64::INFINITY {
                        return inner.slope_at_infinity();
                    }
                    u * inner.eval(v)
                }
            }
        }
    }

    /// `f′(u)`, or `None` where the generator has no derivative.
    pub fn derivative(&self, u: f64) -> Option<f64> {
        Some(match &self.kind {
            Kind::Kl => -1.0 / u,
            Kind::ReverseKl => u.ln() + 1.0,
            Kind::Hellinger2 => 0.5 * (1.0 - 1.0 / u.sqrt()),
            Kind::Chi2 => 2.0 * (u - 1.0),
            Kind::TotalVariation => {
                if u == 1.0 {
                    return None;
                }
                0.5 * (u - 1.0).signum()
            }
            Kind::Alpha(a) => (u.powf(a - 1.0) - 1.0) / (a - 1.0),
            // d/du [u f(1/u)] = f(1/u) − f′(1/u)/u
            Kind::Conjugate(inner) => {
                let v = 1.0 / u;
                inner.eval(v) - inner.derivative(v)? * v
            }
        })
    }

    pub fn differentiable_at_one(&self) -> bool {
        match &self.kind {
            Kind::TotalVariation => false,
            Kind::Conjugate(inner) => inner.differentiable_at_one(),
            _ => true,
        }
    }

    /// `f(0) = lim_{u→0⁺} f(u)`, weighting mass of `p` where `q` vanishes.
    pub fn value_at_zero(&self) -> f64 {
        match &self.kind {
            Kind::Kl => f64::INFINITY,
            Kind::ReverseKl => 0.0,
            Kind::Hellinger2 => 0.5,
            Kind::Chi2 => 1.0,
            Kind::TotalVariation => 0.5,
            Kind::Alpha(a) => {
                if *a > 0.0 {
                    1.0 / a
                } else {
                    f64::INFINITY
                }
            }
            Kind::Conjugate(inner) => inner.slope_at_infinity(),
        }
    }

    /// `lim_{u→∞} f(u)/u`, weighting mass of `q` where `p` vanishes.
    pub fn slope_at_infinity(&self) -> f64 {
        match &self.kind {
            Kind::Kl => 0.0,
            Kind::ReverseKl => f64::INFINITY,
            Kind::Hellinger2 => 0.5,
            Kind::Chi2 => f64::INFINITY,
            Kind::TotalVariation => 0.5,
            Kind::Alpha(a) => {
                if *a > 1.0 {
                    f64::INFINITY
                } else {
                    1.0 / (1.0 - a)
                }
            }
            Kind::Conjugate(inner) => inner.value_at_zero(),
        }
    }

    /// Scalar Bregman divergence `B_f(u:1) = f(u) − f(1) − (u−1) f′(1)`.
    pub fn bregman_at_one(&self, u: f64) -> Result<f64> {
        let slope = self.derivative_at_one()?;
        let fu = self.eval(u);
        if fu == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        if u == f64::INFINITY {
            // f grows at least linearly; the Bregman gap is infinite unless
            // the asymptotic slope equals f′(1), which no shipped generator has.
            return Ok(f64::INFINITY);
        }
        Ok(fu - self.eval(1.0) - (u - 1.0) * slope)
    }

    fn derivative_at_one(&self) -> Result<f64> {
        if !self.differentiable_at_one() {
            return Err(Error::capability(format!(
                "generator {} is not differentiable at 1",
                self.name()
            )));
        }
        self.derivative(1.0)
            .ok_or_else(|| Error::capability(format!("generator {} has no derivative", self.name())))
    }

    /// Checks `f(1) = 0` and midpoint convexity on a grid.
    pub fn validate(&self) -> Result<()> {
        let at_one = self.eval(1.0);
        if at_one.abs() > 1e-12 {
            return Err(Error::domain(format!("{}: f(1) = {at_one}, expected 0", self.name())));
        }
        let grid: Vec<f64> = (-12..=12).map(|k| (0.35 * k as f64).exp()).collect();
        for &u in &grid {
            for &v in &grid {
                let mid = self.eval(0.5 * (u + v));
                let chord = 0.5 * (self.eval(u) + self.eval(v));
                let tol = 1e-9 * (1.0 + chord.abs());
                if mid > chord + tol {
                    return Err(Error::domain(format!(
                        "{}: midpoint convexity fails at ({u}, {v})",
                        self.name()
                    )));
                }
            }
        }
        Ok(())
    }
}
