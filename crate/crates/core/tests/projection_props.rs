use std::f64::consts::PI;

use rand::Rng;

use lsdiv::divergence::quadrature_divergence;
use lsdiv::projection::{project_left, project_right, Family, ProjectionOptions};
use lsdiv::rng::seeded;
use lsdiv::{FGenerator, GroupElement, LocationScaleDensity, StandardDensity};

fn uni(base: StandardDensity, l: f64, s: f64) -> LocationScaleDensity {
    LocationScaleDensity::univariate(base, l, s).unwrap()
}

fn quad(p: &LocationScaleDensity, q: &LocationScaleDensity, f: &FGenerator) -> f64 {
    quadrature_divergence(p, q, f, 1e-11).unwrap().value
}

#[test]
fn kl_onto_gaussians_matches_moments() {
    // Right KL projection onto the normal family matches mean and variance.
    // Entropies: laplace 1 + ln 2, logistic 2.
    let cases = [
        (StandardDensity::Laplace, 2f64.sqrt(), 1.0 + 2f64.ln()),
        (StandardDensity::Logistic, PI / 3f64.sqrt(), 2.0),
    ];
    let opts = ProjectionOptions::default();
    for (base, sd, entropy) in cases {
        let (l, s) = (0.7, 1.8);
        let r = project_right(&uni(base.clone(), l, s), &Family::location_scale(StandardDensity::Normal).unwrap(), &FGenerator::kl(), &opts)
            .unwrap();
        let (ml, ms) = r.argmin.as_univariate().unwrap();
        assert!((ml - l).abs() < 1e-4, "{base}: location {ml}");
        assert!((ms - s * sd).abs() < 1e-4, "{base}: scale {ms} vs {}", s * sd);
        let oracle = 0.5 * (2.0 * PI * sd * sd).ln() + 0.5 - entropy;
        assert!((r.min_value - oracle).abs() < 1e-7, "{base}: min {} vs {oracle}", r.min_value);
        assert!(r.attained && r.feasible);
    }
}

#[test]
fn minimum_is_below_random_members() {
    let mut rng = seeded(17);
    let opts = ProjectionOptions::default();
    let cases = [
        (uni(StandardDensity::Cauchy, 0.3, 1.2), StandardDensity::student(3.0).unwrap(), FGenerator::hellinger2()),
        (uni(StandardDensity::Laplace, -1.0, 0.5), StandardDensity::Logistic, FGenerator::kl()),
        (uni(StandardDensity::Normal, 2.0, 3.0), StandardDensity::Cauchy, FGenerator::alpha(0.3).unwrap()),
    ];
    for (p, base, f) in cases {
        let family = Family::location_scale(base).unwrap();
        let right = project_right(&p, &family, &f, &opts).unwrap();
        let left = project_left(&family, &p, &f, &opts).unwrap();
        for _ in 0..10 {
            let h = GroupElement::univariate(rng.gen_range(-4.0..4.0), rng.gen_range(0.1..6.0)).unwrap();
            let member = family.member(&h).unwrap();
            let r = quad(&p, &member, &f);
            let l = quad(&member, &p, &f);
            assert!(right.min_value <= r + 1e-9, "right min {} above {r}", right.min_value);
            assert!(left.min_value <= l + 1e-9, "left min {} above {l}", left.min_value);
        }
    }
}

#[test]
fn reported_minimum_matches_direct_evaluation() {
    let opts = ProjectionOptions::default();
    let f = FGenerator::hellinger2();
    let family = Family::location_scale(StandardDensity::Logistic).unwrap();
    let p = uni(StandardDensity::student(2.5).unwrap(), 1.0, 0.8);
    let right = project_right(&p, &family, &f, &opts).unwrap();
    let direct = quad(&p, &family.member(&right.argmin).unwrap(), &f);
    assert!((right.min_value - direct).abs() < 1e-8, "{} vs {direct}", right.min_value);
    let left = project_left(&family, &p, &f, &opts).unwrap();
    let direct = quad(&family.member(&left.argmin).unwrap(), &p, &f);
    assert!((left.min_value - direct).abs() < 1e-8, "{} vs {direct}", left.min_value);
}

#[test]
fn left_projection_is_right_projection_of_conjugate() {
    let opts = ProjectionOptions::default();
    let family = Family::scale(StandardDensity::weibull(1.7).unwrap()).unwrap();
    let q = uni(StandardDensity::Rayleigh, 0.0, 1.3);
    for f in [FGenerator::kl(), FGenerator::hellinger2(), FGenerator::alpha(0.25).unwrap()] {
        let left = project_left(&family, &q, &f, &opts).unwrap();
        let right = project_right(&q, &family, &f.conjugate(), &opts).unwrap();
        assert!((left.min_value - right.min_value).abs() < 1e-8);
        assert!(left.argmin.max_abs_diff(&right.argmin) < 1e-8);
    }
}

#[test]
fn projecting_a_member_gives_zero() {
    let opts = ProjectionOptions::default();
    let family = Family::location_scale(StandardDensity::Cauchy).unwrap();
    let p = uni(StandardDensity::Cauchy, -2.0, 0.4);
    let r = project_right(&p, &family, &FGenerator::kl(), &opts).unwrap();
    assert!(r.min_value.abs() < 1e-9, "{}", r.min_value);
    let (l, s) = r.argmin.as_univariate().unwrap();
    assert!((l + 2.0).abs() < 1e-4 && (s - 0.4).abs() < 1e-4, "({l}, {s})");
}

#[test]
fn infeasible_projection_is_flagged() {
    // KL from a Cauchy to any normal is infinite.
    let opts = ProjectionOptions::default();
    let r = project_right(&uni(StandardDensity::Cauchy, 0.0, 1.0), &Family::scale(StandardDensity::Normal).unwrap(), &FGenerator::kl(), &opts)
        .unwrap();
    assert!(!r.feasible);
    assert_eq!(r.min_value, f64::INFINITY);
}
