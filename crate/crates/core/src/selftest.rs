//! Reference-value table: reference values recomputed by the library.

use std::f64::consts::{PI, SQRT_2};

use crate::density::{LocationScaleDensity, LogNormal, StandardDensity};
use crate::divergence::{lognormal_divergence_quadrature, lognormal_kl, quadrature_divergence, weibull_kl};
use crate::error::Result;
use crate::fisher::{fisher_constants, fisher_rao_distance};
use crate::generator::FGenerator;
use crate::linalg::SpdMatrix;
use crate::projection::{project_left, project_right, Family, ProjectionOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestRow {
    pub name: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SelftestRow {
    fn new(name: &str, expected: f64, computed: f64, tolerance: f64) -> Self {
        let pass = if expected.is_infinite() {
            computed == expected
        } else {
            (computed - expected).abs() <= tolerance
        };
        SelftestRow { name: name.to_string(), expected, computed, tolerance, pass }
    }
}

fn uni(base: StandardDensity, l: f64, s: f64) -> Result<LocationScaleDensity> {
    LocationScaleDensity::univariate(base, l, s)
}

/// Recomputes every row. A failing row means the computed value disagrees
/// with the reference one.
pub fn run() -> Result<Vec<SelftestRow>> {
    let kl = FGenerator::kl();
    let opts = ProjectionOptions::default();
    let mut rows = Vec::new();

    let n = uni(StandardDensity::Normal, 0.0, 1.0)?;
    let c = uni(StandardDensity::Cauchy, 0.0, 1.0)?;
    rows.push(SelftestRow::new("kl(normal:cauchy)", 0.26, quadrature_divergence(&n, &c, &kl, 1e-11)?.value, 5e-3));
    rows.push(SelftestRow::new(
        "kl(cauchy:normal)",
        f64::INFINITY,
        quadrature_divergence(&c, &n, &kl, 1e-11)?.value,
        0.0,
    ));

    let hn = uni(StandardDensity::HalfNormal, 0.0, 1.0)?;
    let exp_family = Family::scale(StandardDensity::Exponential)?;
    let right = project_right(&hn, &exp_family, &kl, &opts)?;
    rows.push(SelftestRow::new("halfnormal->exponential min", 0.5 + (2.0 / PI).ln(), right.min_value, 1e-6));
    rows.push(SelftestRow::new(
        "halfnormal->exponential argmin ratio s1/s2",
        (PI / 2.0).sqrt(),
        1.0 / right.argmin.scale()[(0, 0)],
        1e-6,
    ));
    let ex = uni(StandardDensity::Exponential, 0.0, 1.0)?;
    let left = project_left(&Family::scale(StandardDensity::HalfNormal)?, &ex, &kl, &opts)?;
    rows.push(SelftestRow::new("halfnormal family->exponential min", -0.5 * (2.0 / PI).ln(), left.min_value, 1e-6));
    rows.push(SelftestRow::new("halfnormal family->exponential argmin s1", 1.0, left.argmin.scale()[(0, 0)], 1e-6));

    let weibull2 = StandardDensity::weibull(2.0)?;
    let r = project_right(&ex, &Family::scale(weibull2.clone())?, &kl, &opts)?;
    rows.push(SelftestRow::new("exponential->weibull(k=2) argmin", SQRT_2, r.argmin.scale()[(0, 0)], 1e-6));
    let l = project_left(&Family::scale(StandardDensity::Exponential)?, &uni(weibull2, 0.0, 1.0)?, &kl, &opts)?;
    rows.push(SelftestRow::new("exponential family->weibull(k=2) argmin", 1.0 / SQRT_2, l.argmin.scale()[(0, 0)], 1e-6));

    for (sigma1, sigma2) in [(1.0, 2.0), (3.0, 0.5)] {
        let p = uni(StandardDensity::Normal, 0.7, sigma1)?;
        let fam = Family::location(StandardDensity::Normal, SpdMatrix::scalar(sigma2)?)?;
        let r = project_right(&p, &fam, &kl, &opts)?;
        let ratio = (sigma1 / sigma2) * (sigma1 / sigma2);
        rows.push(SelftestRow::new(
            &format!("normal location subfamily s1={sigma1} s2={sigma2}"),
            0.5 * (ratio - ratio.ln() - 1.0),
            r.min_value,
            1e-8,
        ));
    }

    let fn_ = fisher_constants(&StandardDensity::Normal)?;
    rows.push(SelftestRow::new("fisher normal a2", 1.0, fn_.a2, 1e-7));
    rows.push(SelftestRow::new("fisher normal b2", 2.0, fn_.b2, 1e-7));
    rows.push(SelftestRow::new("fisher normal curvature", -0.5, fn_.curvature, 1e-7));
    let fc = fisher_constants(&StandardDensity::Cauchy)?;
    rows.push(SelftestRow::new("fisher cauchy a2", 0.5, fc.a2, 1e-7));
    rows.push(SelftestRow::new("fisher cauchy b2", 0.5, fc.b2, 1e-7));
    rows.push(SelftestRow::new("fisher cauchy curvature", -2.0, fc.curvature, 1e-7));
    rows.push(SelftestRow::new(
        "fisher-rao N(0,1) N(0,2)",
        SQRT_2 * 2f64.ln(),
        fisher_rao_distance(&fn_, (0.0, 1.0), (0.0, 2.0))?,
        1e-9,
    ));

    let (k1, s1, k2, s2) = (1.5, 2.0, 3.0, 1.2);
    let wq = quadrature_divergence(
        &uni(StandardDensity::weibull(k1)?, 0.0, s1)?,
        &uni(StandardDensity::weibull(k2)?, 0.0, s2)?,
        &kl,
        1e-11,
    )?;
    rows.push(SelftestRow::new("weibull kl closed form vs quadrature", weibull_kl(k1, s1, k2, s2), wq.value, 1e-7));

    let (p, q) = (LogNormal::new(0.2, 0.8)?, LogNormal::new(-0.4, 1.3)?);
    rows.push(SelftestRow::new(
        "lognormal kl via normal formula",
        lognormal_kl(0.2, 0.8, -0.4, 1.3)?,
        lognormal_divergence_quadrature(&p, &q, &kl, 1e-11)?,
        1e-7,
    ));
    Ok(rows)
}
