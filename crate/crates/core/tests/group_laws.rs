use proptest::prelude::*;

use lsdiv::linalg::spd_sqrt;
use lsdiv::{GroupElement, GroupMatrix, Matrix, SpdMatrix};

const TOL: f64 = 1e-9;

fn spd(d: usize, entries: &[f64], shift: f64) -> SpdMatrix {
    let rows: Vec<Vec<f64>> = (0..d).map(|i| entries[i * d..(i + 1) * d].to_vec()).collect();
    let a = Matrix::from_rows(&rows).unwrap();
    let mut m = a.mul(&a.transpose()).rows();
    for (i, r) in m.iter_mut().enumerate() {
        r[i] += shift;
    }
    SpdMatrix::from_rows(&m).unwrap()
}

fn element() -> impl Strategy<Value = GroupElement> {
    (1usize..=3).prop_flat_map(|d| {
        (
            prop::collection::vec(-3.0..3.0f64, d),
            prop::collection::vec(-1.0..1.0f64, d * d),
            0.2..2.0f64,
        )
            .prop_map(move |(l, e, shift)| GroupElement::new(l, spd(d, &e, shift)).unwrap())
    })
}

fn triple() -> impl Strategy<Value = (GroupElement, GroupElement, GroupElement)> {
    (1usize..=3).prop_flat_map(|d| {
        let one = move || {
            (
                prop::collection::vec(-3.0..3.0f64, d),
                prop::collection::vec(-1.0..1.0f64, d * d),
                0.2..2.0f64,
            )
                .prop_map(move |(l, e, shift)| GroupElement::new(l, spd(d, &e, shift)).unwrap())
        };
        (one(), one(), one())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn associativity((a, b, c) in triple()) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) <= TOL * (1.0 + left.scale().max_abs()));
    }

    #[test]
    fn inverse_and_identity(g in element()) {
        let id = GroupElement::identity(g.dim());
        prop_assert!(g.compose(&g.inverse().unwrap()).unwrap().is_identity(TOL));
        prop_assert!(g.inverse().unwrap().compose(&g).unwrap().is_identity(TOL));
        prop_assert_eq!(id.compose(&g).unwrap(), g.clone());
        prop_assert_eq!(g.compose(&id).unwrap(), g);
    }

    #[test]
    fn matrix_representation_is_a_homomorphism((a, b, _c) in triple()) {
        let product = a.as_matrix().0.mul(&b.as_matrix().0);
        let composed = a.compose(&b).unwrap().as_matrix().0;
        prop_assert!(product.max_abs_diff(&composed) <= TOL * (1.0 + product.max_abs()));
        let back = GroupElement::from_matrix(&GroupMatrix(product)).unwrap();
        prop_assert!(back.max_abs_diff(&a.compose(&b).unwrap()) <= TOL * (1.0 + back.scale().max_abs()));
    }

    #[test]
    fn action_respects_composition((a, b, _c) in triple(), seed in prop::collection::vec(-5.0..5.0f64, 3)) {
        let x = &seed[..a.dim()];
        let ab = a.compose(&b).unwrap().act(x).unwrap();
        let nested = a.act(&b.act(x).unwrap()).unwrap();
        for (u, v) in ab.iter().zip(&nested) {
            prop_assert!((u - v).abs() <= TOL * (1.0 + u.abs()));
        }
        let back = a.pull_back(&a.act(x).unwrap()).unwrap();
        for (u, v) in back.iter().zip(x) {
            prop_assert!((u - v).abs() <= TOL * (1.0 + v.abs()));
        }
    }

    #[test]
    fn spd_sqrt_squares_back(d in 1usize..=4, e in prop::collection::vec(-1.0..1.0f64, 16), shift in 0.05..2.0f64) {
        let m = spd(d, &e[..d * d], shift);
        let r = spd_sqrt(&m).unwrap();
        prop_assert!(r.matrix().is_symmetric(1e-12));
        prop_assert!(r.eigen().values.iter().all(|&v| v > 0.0));
        let sq = r.matrix().mul(r.matrix());
        prop_assert!(sq.max_abs_diff(m.matrix()) <= 1e-10 * (1.0 + m.matrix().max_abs()));
    }

    #[test]
    fn log_abs_det_is_additive((a, b, _c) in triple()) {
        let lhs = a.compose(&b).unwrap().log_abs_det();
        prop_assert!((lhs - a.log_abs_det() - b.log_abs_det()).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }
}

#[test]
fn univariate_composition_rule() {
    let g = GroupElement::univariate(1.0, 2.0).unwrap();
    let h = GroupElement::univariate(3.0, 4.0).unwrap();
    assert_eq!(g.compose(&h).unwrap().as_univariate().unwrap(), (7.0, 8.0));
    assert_eq!(g.inverse().unwrap().as_univariate().unwrap(), (-0.5, 0.5));
}
