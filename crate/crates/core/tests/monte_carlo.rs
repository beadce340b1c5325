use lsdiv::divergence::quadrature_divergence;
use lsdiv::mc::{estimate_bregman, estimate_importance, estimate_reduced, EstimatorKind, SampleSet};
use lsdiv::{FGenerator, GroupElement, LocationScaleDensity, StandardDensity};

fn uni(base: StandardDensity, l: f64, s: f64) -> LocationScaleDensity {
    LocationScaleDensity::univariate(base, l, s).unwrap()
}

#[test]
fn estimators_agree_with_quadrature() {
    // q has the lighter tails, so every term has finite variance.
    let p = uni(StandardDensity::student(4.0).unwrap(), 0.0, 1.0);
    let q = uni(StandardDensity::Logistic, 0.5, 1.5);
    let sample = SampleSet::draw(&p, 200_000, 5).unwrap();
    for f in [FGenerator::kl(), FGenerator::hellinger2(), FGenerator::alpha(0.3).unwrap()] {
        let exact = quadrature_divergence(&p, &q, &f, 1e-11).unwrap().value;
        for e in [
            estimate_importance(&p, &q, &f, &sample, 8).unwrap(),
            estimate_bregman(&p, &q, &f, &sample, 8).unwrap(),
        ] {
            assert!((e.value - exact).abs() <= 4.0 * e.stderr, "{f} {:?}: {} vs {exact} (stderr {})", e.kind, e.value, e.stderr);
        }
    }
}

#[test]
fn importance_with_foreign_proposal() {
    let p = uni(StandardDensity::Normal, 0.0, 1.0);
    let q = uni(StandardDensity::Normal, 1.0, 1.0);
    let r = uni(StandardDensity::Cauchy, 0.0, 1.5);
    let sample = SampleSet::draw(&r, 200_000, 9).unwrap();
    let e = estimate_importance(&p, &q, &FGenerator::kl(), &sample, 8).unwrap();
    assert_eq!(e.kind, EstimatorKind::Importance);
    assert!((e.value - 0.5).abs() <= 4.0 * e.stderr, "{} ± {}", e.value, e.stderr);
}

#[test]
fn same_seed_is_bitwise_reproducible() {
    let p = uni(StandardDensity::Laplace, 0.0, 1.0);
    let q = uni(StandardDensity::Cauchy, 1.0, 2.0);
    let a = estimate_bregman(&p, &q, &FGenerator::kl(), &SampleSet::draw(&p, 10_000, 3).unwrap(), 8).unwrap();
    let b = estimate_bregman(&p, &q, &FGenerator::kl(), &SampleSet::draw(&p, 10_000, 3).unwrap(), 8).unwrap();
    assert_eq!(a, b);
}

#[test]
fn reduced_estimate_depends_on_canonical_element_only() {
    let base_p = StandardDensity::Normal;
    let base_q = StandardDensity::Logistic;
    let sample = SampleSet::draw(&LocationScaleDensity::standard(base_p.clone()).unwrap(), 20_000, 1).unwrap();
    let (g1, g2) = (GroupElement::univariate(0.5, 2.0).unwrap(), GroupElement::univariate(-1.0, 3.0).unwrap());
    let g = GroupElement::univariate(4.0, 0.25).unwrap();
    let f = FGenerator::hellinger2();
    let a = estimate_reduced(&g1, &g2, &base_p, &base_q, &f, &sample, EstimatorKind::Bregman, 8).unwrap();
    let b = estimate_reduced(
        &g.compose(&g1).unwrap(),
        &g.compose(&g2).unwrap(),
        &base_p,
        &base_q,
        &f,
        &sample,
        EstimatorKind::Bregman,
        8,
    )
    .unwrap();
    assert!((a.value - b.value).abs() < 1e-10, "{} vs {}", a.value, b.value);
}

#[test]
fn bregman_needs_a_sample_from_p() {
    let p = uni(StandardDensity::Normal, 0.0, 1.0);
    let q = uni(StandardDensity::Normal, 1.0, 1.0);
    let sample = SampleSet::draw(&q, 100, 0).unwrap();
    assert!(estimate_bregman(&p, &q, &FGenerator::kl(), &sample, 4).is_err());
}
