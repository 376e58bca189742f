use std::sync::Arc;

use ncad_core::derivations::{
    check_conjugation_commutes, check_leibniz, check_makingzero, derivation_table_order0,
    inner_solve,
};
use ncad_core::diffcalc::{check_delta_commutation, delta_eval, delta_sym, Delta};
use ncad_core::exactalg::scalar;
use ncad_core::integrate::{integrate_poly, verify_antiderivative, DeltaSample};
use ncad_core::json::{parse_poly, to_string, PolyJson};
use ncad_core::multilinear::ArgShape;
use ncad_core::testkit::{check_respects_structure, Gen};
use ncad_core::{MultiLinearMap, NcFn, NcPolynomial, ScalarMatrix};
use proptest::prelude::*;

fn random_poly(g: &mut Gen, k: usize, max_degree: usize) -> NcPolynomial {
    let xdims: Vec<usize> = (0..=k).map(|_| g.index(1, 2)).collect();
    let zdims: Vec<usize> = (0..k).map(|_| g.index(1, 2)).collect();
    let terms = g.index(0, 4);
    g.poly(&xdims, &zdims, max_degree, terms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eval_respects_direct_sums_and_similarity(seed in any::<u64>(), k in 0usize..3) {
        let mut g = Gen::from_seed(seed);
        let p = random_poly(&mut g, k, 4);
        let r = check_respects_structure(&p, &mut g, 1).unwrap();
        prop_assert!(r.passed, "{:?}", r);
    }

    #[test]
    fn eval_is_linear_in_each_direction(seed in any::<u64>()) {
        let mut g = Gen::from_seed(seed);
        let p = random_poly(&mut g, 1, 4);
        let sizes = g.sizes(2, 3);
        let (xs, zs) = g.args(p.xdims(), p.zdims(), &sizes);
        let (_, zs2) = g.args(p.xdims(), p.zdims(), &sizes);
        let c = g.scalar();
        let combo = vec![&zs[0] + &zs2[0].scale(&c)];
        let lhs = p.eval(&xs, &combo).unwrap();
        let rhs = &p.eval(&xs, &zs).unwrap() + &p.eval(&xs, &zs2).unwrap().scale(&c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn symbolic_and_numeric_delta_agree(seed in any::<u64>(), k in 0usize..3) {
        let mut g = Gen::from_seed(seed);
        let p = random_poly(&mut g, k, 4);
        for j in 0..=k {
            let q = delta_sym(&p, j).unwrap();
            let sizes = g.sizes(k + 2, 3);
            let (xs, zs) = g.args(q.xdims(), q.zdims(), &sizes);
            prop_assert_eq!(q.eval(&xs, &zs).unwrap(), delta_eval(&p, j, &xs, &zs).unwrap());
        }
    }

    #[test]
    fn deltas_commute(seed in any::<u64>(), k in 0usize..3) {
        let mut g = Gen::from_seed(seed);
        let p = random_poly(&mut g, k, 5);
        for j in 0..=k {
            for i in 0..=j {
                prop_assert!(check_delta_commutation(&p, i, j).unwrap().passed);
            }
        }
    }

    #[test]
    fn first_order_difference_formula(seed in any::<u64>()) {
        let mut g = Gen::from_seed(seed);
        let d = g.index(1, 2);
        let terms = g.index(1, 4);
        let f = g.poly(&[d], &[], 4, terms);
        let n = g.index(1, 3);
        let x = g.point(d, n, n);
        let y = g.point(d, n, n);
        let df = delta_sym(&f, 0).unwrap();
        let lhs = &f.eval(std::slice::from_ref(&x), &[]).unwrap() - &f.eval(std::slice::from_ref(&y), &[]).unwrap();
        let rhs = df.eval(&[x.clone(), y.clone()], &[&x - &y]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn integrate_poly_inverts_delta(seed in any::<u64>(), k in 0usize..3) {
        let mut g = Gen::from_seed(seed);
        let p = random_poly(&mut g, k, 5);
        for j in 0..=k {
            let q = integrate_poly(&delta_sym(&p, j).unwrap(), j).unwrap();
            prop_assert_eq!(q, p.without_kernel(j));
        }
    }

    #[test]
    fn delta_wrapper_is_an_antiderivative_witness(seed in any::<u64>()) {
        let mut g = Gen::from_seed(seed);
        let p = random_poly(&mut g, 1, 4);
        let fs: Vec<NcFn> = (0..2)
            .map(|j| Arc::new(Delta::new(Arc::new(p.clone()), j).unwrap()) as NcFn)
            .collect();
        let samples: Vec<DeltaSample> = (0..2)
            .map(|j| {
                let (xd, zd) = (fs[j].xdims().to_vec(), fs[j].zdims().to_vec());
                let sizes = g.sizes(3, 2);
                let (xs, zs) = g.args(&xd, &zd, &sizes);
                DeltaSample { j, xs, zs }
            })
            .collect();
        prop_assert!(verify_antiderivative(&p, &fs, &samples).unwrap().passed);
    }

    #[test]
    fn derivation_tables_obey_leibniz_and_n_is_unique_up_to_scalars(seed in any::<u64>()) {
        let mut g = Gen::from_seed(seed);
        let d = g.index(1, 2);
        let terms = g.index(1, 4);
        let q = g.poly(&[d], &[], 4, terms);
        let s = g.index(1, 3);
        let y = g.point(d, s, s);
        let table = derivation_table_order0(&delta_sym(&q, 0).unwrap(), &y).unwrap();
        prop_assert!(check_leibniz(&table).passed);
        let c = g.scalar();
        let n0 = inner_solve(&table, &scalar(0)).unwrap();
        let nc = inner_solve(&table, &c).unwrap();
        let diff = nc.sub(&n0);
        prop_assert_eq!(diff.as_matrix().unwrap(), &ScalarMatrix::scalar_identity(s, &c));
    }

    #[test]
    fn idempotent_sandwich_vanishes(seed in any::<u64>()) {
        let mut g = Gen::from_seed(seed);
        let terms = g.index(1, 4);
        let q = g.poly(&[2], &[], 4, terms);
        let n = g.index(1, 3);
        let y = g.point(2, n, n);
        let p = g.idempotent(n);
        let r = check_makingzero(&delta_sym(&q, 0).unwrap(), &y, &p, &p, &p, &scalar(1)).unwrap();
        prop_assert!(r.passed, "{:?}", r);
    }

    #[test]
    fn conjugation_sum_commutes_with_units(seed in any::<u64>(), j in 0usize..3) {
        let mut g = Gen::from_seed(seed);
        let sizes = g.sizes(3, 2);
        let args = vec![ArgShape::new(sizes[0], sizes[1], 1), ArgShape::new(sizes[1], sizes[2], 1)];
        let (a, b) = (g.matrix(sizes[0], sizes[0]), g.matrix(sizes[2], sizes[2]));
        let c = MultiLinearMap::from_fn(args, sizes[0], sizes[2], |z| {
            Ok(&(&a * z[0].component(0)) * &(z[1].component(0) * &b))
        })
        .unwrap();
        prop_assert!(check_conjugation_commutes(&c, j).unwrap().passed);
    }

    #[test]
    fn polynomial_json_round_trips(seed in any::<u64>(), k in 0usize..3) {
        let mut g = Gen::from_seed(seed);
        let p = random_poly(&mut g, k, 4);
        let text = to_string(&PolyJson::from(&p));
        prop_assert_eq!(parse_poly(&text).unwrap(), p);
    }
}

#[test]
fn random_poly_is_reproducible() {
    let render = || {
        let mut g = Gen::from_seed(42);
        to_string(&PolyJson::from(&g.poly(&[1], &[], 3, 5)))
    };
    assert_eq!(render(), render());
    let mut g = Gen::from_seed(42);
    assert!(g.poly(&[1], &[], 3, 0).is_zero());
    let constant = g.poly(&[2], &[], 0, 4);
    assert!(constant.terms().all(|(k, _)| k.degree() == 0));
}
