use std::sync::Arc;

use ncad_core::diffcalc::delta_sym;
use ncad_core::exactalg::scalar;
use ncad_core::integrate::{
    check_constant_difference, delta_samples, integrate_higher, integrate_order1,
    verify_antiderivative,
};
use ncad_core::testkit::Gen;
use ncad_core::{NcError, NcFn, NcOracle, PointMatrix, ScalarMatrix};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn order0_round_trip_up_to_scalar(seed in any::<u64>(), s in 1usize..3) {
        let mut g = Gen::from_seed(seed);
        let d = g.index(1, 2);
        let terms = g.index(1, 4);
        let q = g.poly(&[d], &[], 4, terms);
        let fd: NcFn = Arc::new(delta_sym(&q, 0).unwrap());
        let y = g.point(d, s, s);
        let f = integrate_order1(fd.clone(), &y, &scalar(0)).unwrap();
        let samples = delta_samples(&[d], &[], &[s], &mut g, 2);
        prop_assert!(verify_antiderivative(&f, &[fd], &samples).unwrap().passed);
        let points: Vec<_> = (1..=3)
            .map(|m| g.args(&[d], &[], &[s * m]))
            .collect();
        let diff = check_constant_difference(&f, &q, &points).unwrap();
        prop_assert!(diff.report.passed, "{:?}", diff.report);
        prop_assert_eq!(diff.constant.arity(), 0);
    }

    #[test]
    fn order1_round_trip_differs_by_block_constant(seed in any::<u64>()) {
        let mut g = Gen::from_seed(seed);
        let xdims = [g.index(1, 2), g.index(1, 2)];
        let zdims = [g.index(1, 2)];
        let terms = g.index(1, 4);
        let q = g.poly(&xdims, &zdims, 4, terms);
        let fs: Vec<NcFn> = (0..2)
            .map(|j| Arc::new(delta_sym(&q, j).unwrap()) as NcFn)
            .collect();
        let base = [g.index(1, 2), g.index(1, 2)];
        let ys: Vec<PointMatrix> = xdims.iter().zip(&base).map(|(&d, &s)| g.point(d, s, s)).collect();
        let f = integrate_higher(fs.clone(), &ys).unwrap();
        let samples = delta_samples(&xdims, &zdims, &base, &mut g, 2);
        prop_assert!(verify_antiderivative(&f, &fs, &samples).unwrap().passed);
        let points: Vec<_> = (1..=3)
            .map(|m| g.args(&xdims, &zdims, &[base[0] * m, base[1] * (4 - m).min(2)]))
            .collect();
        prop_assert!(check_constant_difference(&f, &q, &points).unwrap().report.passed);
    }
}

#[test]
fn non_inner_data_is_reported() {
    // Z + Z_12 E_11 does not respect similarities; its table at diag(1,2) is not inner.
    let broken: NcFn = Arc::new(NcOracle::new(vec![1, 1], vec![1], |_, zs| {
        let z = zs[0].component(0);
        let mut out = z.clone();
        if z.cols() > 1 {
            out.set(0, 0, z.get(0, 0) + z.get(0, 1));
        }
        Ok(out)
    }));
    let y = PointMatrix::from_matrix(ScalarMatrix::from_ints(&[[1, 0], [0, 2]]));
    let err = integrate_order1(broken, &y, &scalar(0)).unwrap_err();
    assert!(err.is_mathematical(), "{err:?}");
}

#[test]
fn wrong_base_dimension_is_rejected() {
    let q = ncad_core::NcPolynomial::order0(2, &[(1, &[1, 2])]).unwrap();
    let fd: NcFn = Arc::new(delta_sym(&q, 0).unwrap());
    let y = PointMatrix::zeros(1, 1, 1);
    assert!(matches!(
        integrate_order1(fd, &y, &scalar(0)),
        Err(NcError::DimMismatch(_))
    ));
}
