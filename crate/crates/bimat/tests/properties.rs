//! Property-based invariants of the bimatrix algebra and polynomial layer.

use bimat::bimatrix::{stack_vec, Bimatrix};
use bimat::mat::{self, CMat, CVec, RMat};
use bimat::poly::PolyCMat;
use num_complex::Complex64;
use proptest::prelude::*;

fn c64() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn cmat(rows: usize, cols: usize) -> impl Strategy<Value = CMat> {
    prop::collection::vec(c64(), rows * cols).prop_map(move |v| CMat::from_vec(rows, cols, v))
}

fn bimatrix(rows: usize, cols: usize) -> impl Strategy<Value = Bimatrix> {
    (cmat(rows, cols), cmat(rows, cols)).prop_map(|(p1, p2)| Bimatrix::new(p1, p2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn real_rep_is_multiplicative((a, b) in (bimatrix(3, 2), bimatrix(2, 4))) {
        let lhs = a.multiply(&b).unwrap().to_real().m;
        let rhs = &a.to_real().m * &b.to_real().m;
        let scale = mat::frob_r(&rhs).max(1e-12);
        prop_assert!(mat::frob_r(&(&lhs - &rhs)) / scale < 1e-12);
    }

    #[test]
    fn real_rep_is_additive((a, b) in (bimatrix(3, 3), bimatrix(3, 3))) {
        let lhs = a.add(&b).unwrap().to_real().m;
        let rhs = &a.to_real().m + &b.to_real().m;
        // addition is reassociated between the two routes, so allow rounding
        let scale = mat::frob_r(&rhs).max(1.0);
        prop_assert!(mat::frob_r(&(&lhs - &rhs)) <= 1e-15 * scale);
    }

    #[test]
    fn apply_matches_stacked_action((b, xs) in (bimatrix(3, 3), prop::collection::vec(c64(), 3))) {
        let x = CVec::from_vec(xs);
        let y = b.apply(&x).unwrap();
        let yr = &b.to_real().m * stack_vec(&x);
        prop_assert!((stack_vec(&y) - yr).norm() < 1e-12);
    }

    #[test]
    fn adjoint_transposes_real_rep(b in bimatrix(3, 2)) {
        let lhs = b.adjoint().to_real().m;
        let rhs = b.to_real().m.transpose();
        prop_assert!(mat::frob_r(&(&lhs - &rhs)) == 0.0);
    }

    #[test]
    fn real_rep_round_trips(b in bimatrix(2, 4)) {
        let back = Bimatrix::from_real(&b.to_real()).unwrap();
        prop_assert!(back.sub(&b).unwrap().norm() < 1e-14);
    }

    #[test]
    fn lifting_is_similar_to_real_rep(b in bimatrix(3, 3)) {
        let er = mat::eigenvalues_r(&b.to_real().m);
        let el = mat::eigenvalues_c_symmetric(&b.complex_lifting());
        let d = mat::multiset_distance(&er, &el).unwrap();
        prop_assert!(d < 1e-8, "distance {}", d);
    }

    #[test]
    fn spectrum_is_conjugation_closed(b in bimatrix(4, 4)) {
        prop_assert!(b.spectrum().unwrap().conjugation_defect() < 1e-9);
    }

    #[test]
    fn nonsingularity_matches_real_determinant(b in bimatrix(3, 3)) {
        let det = b.to_real().m.determinant();
        // random draws sit far from the singular set
        if det.abs() > 1e-6 {
            prop_assert!(b.is_nonsingular());
        }
    }

    #[test]
    fn horner_equals_naive_evaluation(
        (coeffs, s) in (prop::collection::vec(cmat(2, 3), 1..6), c64())
    ) {
        let p = PolyCMat::new(coeffs);
        let d = mat::frob(&(p.eval(s) - p.eval_naive(s)));
        let scale = p.coeffs.iter().map(mat::frob).sum::<f64>().max(1.0)
            * s.norm().max(1.0).powi(p.degree() as i32);
        prop_assert!(d / scale < 1e-12);
    }

    #[test]
    fn reflect_negates_odd_part((coeffs, s) in (prop::collection::vec(cmat(2, 2), 1..5), c64())) {
        let p = PolyCMat::new(coeffs);
        let lhs = p.reflect().eval(s);
        let rhs = p.eval(-s);
        prop_assert!(mat::frob(&(lhs - rhs)) < 1e-10);
    }

    #[test]
    fn inverse_residual_is_small(b in bimatrix(3, 3)) {
        if b.is_nonsingular() {
            let inv = b.inverse().unwrap();
            let prod = &b.to_real().m * &inv.to_real().m;
            let resid = mat::frob_r(&(&prod - &RMat::identity(6, 6)));
            prop_assert!(resid < 1e-9, "residual {}", resid);
        }
    }
}
