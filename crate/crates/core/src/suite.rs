//! Seeded property batteries shared by `ncad selftest` and the acceptance
//! target. Each battery returns one report; the first failure stops it.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::derivations::{check_makingzero, derivation_table_order0, inner_solve};
use crate::diffcalc::{check_delta_commutation, delta_num, delta_sym, NcFn, NcFunction, NcOracle};
use crate::error::Result;
use crate::exactalg::{matrix_unit, scalar, PointMatrix, Scalar, ScalarMatrix};
use crate::integrate::{
    check_constant_difference, check_integrability, delta_samples, integrability_samples,
    integrate_higher, integrate_order1, integrate_poly, verify_antiderivative, SampleConfig,
};
use crate::ncpoly::{MonomialKey, NcPolynomial};
use crate::report::CheckReport;
use crate::testkit::{check_respects_structure, entrywise_square_oracle, Gen};

fn random_dims(gen: &mut Gen, k: usize, max_dim: usize) -> (Vec<usize>, Vec<usize>) {
    let xdims = (0..=k).map(|_| gen.index(1, max_dim)).collect();
    let zdims = (0..k).map(|_| gen.index(1, max_dim)).collect();
    (xdims, zdims)
}

fn random_poly(gen: &mut Gen, k: usize, max_dim: usize, max_degree: usize) -> NcPolynomial {
    let (xdims, zdims) = random_dims(gen, k, max_dim);
    let terms = gen.index(1, 4);
    gen.poly(&xdims, &zdims, max_degree, terms)
}

fn fail_at(name: &str, cases: usize, case: usize, what: impl std::fmt::Display) -> CheckReport {
    CheckReport::fail(name, cases, format!("case {case}: {what}"))
}

/// `eval(delta_sym(p, j))` against `delta_num(p, j, ..)` at random points of
/// sizes up to 3, for every slot of `count` polynomials of order up to 2.
pub fn delta_agreement(seed: u64, count: usize) -> Result<CheckReport> {
    let name = "symbolic/numeric delta agreement";
    let mut gen = Gen::from_seed(seed);
    let mut cases = 0;
    for case in 0..count {
        let k = case % 3;
        let p = random_poly(&mut gen, k, 2, 4);
        for j in 0..=k {
            cases += 1;
            let q = delta_sym(&p, j)?;
            let sizes = gen.sizes(k + 2, 3);
            let (xs, zs) = gen.args(q.xdims(), q.zdims(), &sizes);
            let mut rest = zs.clone();
            let d = rest.remove(j);
            let sym = q.eval(&xs, &zs)?;
            let num = delta_num(&p, j, &xs, &rest, &d)?;
            if sym != num {
                return Ok(fail_at(
                    name,
                    cases,
                    case,
                    format!("slot {j} of {p}: {sym} vs {num}"),
                ));
            }
        }
    }
    Ok(CheckReport::pass(name, cases))
}

/// `(j+1)Δ iΔ g = iΔ jΔ g` symbolically for all `i <= j <= k`.
pub fn delta_commutation(seed: u64, count: usize) -> Result<CheckReport> {
    let name = "delta commutation";
    let mut gen = Gen::from_seed(seed);
    let mut cases = 0;
    for case in 0..count {
        let k = case % 3;
        let g = random_poly(&mut gen, k, 2, 5);
        for j in 0..=k {
            for i in 0..=j {
                cases += 1;
                let r = check_delta_commutation(&g, i, j)?;
                if !r.passed {
                    return Ok(fail_at(name, cases, case, r.witness.unwrap_or_default()));
                }
            }
        }
    }
    Ok(CheckReport::pass(name, cases).global())
}

/// Point tuples whose sizes are multiples of `base` with random directions.
fn multiple_points(
    gen: &mut Gen,
    xdims: &[usize],
    zdims: &[usize],
    base: &[usize],
    count: usize,
) -> Vec<(Vec<PointMatrix>, Vec<PointMatrix>)> {
    (0..count)
        .map(|_| {
            let sizes: Vec<usize> = base
                .iter()
                .map(|&s| s * gen.index(1, (4 / s).clamp(1, 3)))
                .collect();
            gen.args(xdims, zdims, &sizes)
        })
        .collect()
}

/// Order 0: `f = integrate_order1(Δq, Y, 0)` has `Δf = Δq` and `f - q = c I`
/// with one `c` for all sizes, for base points of sizes 1 and 2.
pub fn order0_round_trip(seed: u64, count: usize) -> Result<CheckReport> {
    let name = "order-0 round trip";
    let mut gen = Gen::from_seed(seed);
    let mut cases = 0;
    for case in 0..count {
        let d = gen.index(1, 3);
        let q = {
            let terms = gen.index(1, 4);
            gen.poly(&[d], &[], 4, terms)
        };
        let f_delta: NcFn = Arc::new(delta_sym(&q, 0)?);
        for s in 1..=2 {
            cases += 1;
            let y = gen.point(d, s, s);
            let f = integrate_order1(f_delta.clone(), &y, &Scalar::zero())?;
            let samples = delta_samples(&[d], &[], &[s], &mut gen, 3);
            let r = verify_antiderivative(&f, std::slice::from_ref(&f_delta), &samples)?;
            if !r.passed {
                return Ok(fail_at(name, cases, case, r.witness.unwrap_or_default()));
            }
            let points = multiple_points(&mut gen, &[d], &[], &[s], 4);
            let diff = check_constant_difference(&f, &q, &points)?;
            if !diff.report.passed {
                return Ok(fail_at(
                    name,
                    cases,
                    case,
                    diff.report.witness.unwrap_or_default(),
                ));
            }
            // inner-derivation identity T f(Y) - f(Y) T = F(Y,Y)(TY - YT)
            let fy = f.eval(std::slice::from_ref(&y), &[])?;
            for r in 1..=s {
                for c in 1..=s {
                    let t = matrix_unit(s, r, c)?;
                    let lhs = t.commutator(&fy);
                    let rhs = f_delta.eval(&[y.clone(), y.clone()], &[y.commutator_with(&t)])?;
                    if lhs != rhs {
                        return Ok(fail_at(
                            name,
                            cases,
                            case,
                            format!("inner identity at E_{r}{c}"),
                        ));
                    }
                }
            }
        }
    }
    Ok(CheckReport::pass(name, cases))
}

/// `inner_solve` reproduces `D(E_rs) = [E_rs, N]` for random `(q, Y)`, and the
/// fixture `Y = diag(1,2)`, `q = x^2` gives `N = 3 E_22`.
pub fn inner_solver(seed: u64, count: usize) -> Result<CheckReport> {
    let name = "inner-derivation solver";
    let mut gen = Gen::from_seed(seed);
    let mut cases = 0;
    for case in 0..count {
        cases += 1;
        let d = gen.index(1, 2);
        let q = {
            let terms = gen.index(1, 4);
            gen.poly(&[d], &[], 4, terms)
        };
        let s = gen.index(1, 3);
        let y = gen.point(d, s, s);
        let table = derivation_table_order0(&delta_sym(&q, 0)?, &y)?;
        let n = inner_solve(&table, &Scalar::zero())?;
        for r in 0..s {
            for c in 0..s {
                let e = matrix_unit(s, r + 1, c + 1)?;
                if table.get(r, c) != &n.bracket(0, &e)? {
                    return Ok(fail_at(
                        name,
                        cases,
                        case,
                        format!("D(E_{}{}) != [E, N]", r + 1, c + 1),
                    ));
                }
            }
        }
    }
    cases += 1;
    let q = NcPolynomial::order0(1, &[(1, &[1, 1])])?;
    let y = PointMatrix::from_matrix(ScalarMatrix::from_ints(&[[1, 0], [0, 2]]));
    let n = inner_solve(
        &derivation_table_order0(&delta_sym(&q, 0)?, &y)?,
        &Scalar::zero(),
    )?;
    let expected = ScalarMatrix::from_ints(&[[0, 0], [0, 3]]);
    if n.as_matrix() != Some(&expected) {
        return Ok(CheckReport::fail(
            name,
            cases,
            format!("fixture N = {:?}", n.as_matrix()),
        ));
    }
    Ok(CheckReport::pass(name, cases))
}

/// Order `k`: `f = integrate_higher(0Δq..kΔq)` has `jΔf = jΔq` and `f - q` is a
/// point-independent block amplification.
pub fn higher_round_trip(seed: u64, count: usize, k: usize) -> Result<CheckReport> {
    let name = format!("order-{k} round trip");
    let mut gen = Gen::from_seed(seed);
    let mut cases = 0;
    for case in 0..count {
        cases += 1;
        let q = random_poly(&mut gen, k, 2, k + 3);
        let fs: Vec<NcFn> = (0..=k)
            .map(|j| delta_sym(&q, j).map(|p| Arc::new(p) as NcFn))
            .collect::<Result<_>>()?;
        let base: Vec<usize> = (0..=k).map(|_| gen.index(1, 2)).collect();
        let ys: Vec<PointMatrix> = q
            .xdims()
            .iter()
            .zip(&base)
            .map(|(&d, &s)| gen.point(d, s, s))
            .collect();
        let f = integrate_higher(fs.clone(), &ys)?;
        let samples = delta_samples(q.xdims(), q.zdims(), &base, &mut gen, 2);
        let r = verify_antiderivative(&f, &fs, &samples)?;
        if !r.passed {
            return Ok(fail_at(&name, cases, case, r.witness.unwrap_or_default()));
        }
        let points = multiple_points(&mut gen, q.xdims(), q.zdims(), &base, 3);
        let diff = check_constant_difference(&f, &q, &points)?;
        if !diff.report.passed {
            return Ok(fail_at(
                &name,
                cases,
                case,
                diff.report.witness.unwrap_or_default(),
            ));
        }
    }
    Ok(CheckReport::pass(name, cases))
}

/// Adds a nonzero multiple of one monomial that contains an x-letter.
/// Monomials made of z-letters only are skipped: perturbing them yields the
/// image of another polynomial, which is still integrable.
fn corrupt(gen: &mut Gen, p: &NcPolynomial) -> Result<Option<NcPolynomial>> {
    let keys: Vec<MonomialKey> = p
        .terms()
        .filter(|(key, _)| key.xwords.iter().any(|w| !w.is_empty()))
        .map(|(key, _)| key.clone())
        .collect();
    if keys.is_empty() {
        return Ok(None);
    }
    let key = keys[gen.index(0, keys.len() - 1)].clone();
    let mut out = NcPolynomial::zero(p.xdims().to_vec(), p.zdims().to_vec())?;
    out.add_term(key, gen.nonzero_scalar())?;
    Ok(Some(p.add(&out)?))
}

/// `x z` is rejected numerically and symbolically; perturbed images of random
/// `q` of order 0 and 1 all fail integrability.
pub fn negatives(seed: u64, count: usize) -> Result<CheckReport> {
    let name = "negative detection";
    let xz = NcPolynomial::from_terms(
        vec![1, 1],
        vec![1],
        [crate::ncpoly::Monomial::new(
            scalar(1),
            vec![vec![1], vec![]],
            vec![1],
        )],
    )?;
    let opaque: NcFn = Arc::new(NcOracle::opaque(Arc::new(xz.clone())));
    let samples = integrability_samples(
        std::slice::from_ref(&opaque),
        None,
        &SampleConfig::default(),
    )?;
    let r = check_integrability(std::slice::from_ref(&opaque), &samples)?;
    if r.passed || r.witness.is_none() {
        return Ok(CheckReport::fail(name, 1, "x z passed the sampled check"));
    }
    match integrate_poly(&xz, 0) {
        Err(crate::NcError::NotIntegrablePoly(w)) if w.contains("merge class") => {}
        other => {
            return Ok(CheckReport::fail(
                name,
                2,
                format!("x z symbolic: {other:?}"),
            ))
        }
    }
    let mut gen = Gen::from_seed(seed);
    let mut cases = 2;
    let mut done = 0;
    while done < count {
        let k = done % 2;
        let q = random_poly(&mut gen, k, 2, k + 3);
        let mut fs: Vec<NcPolynomial> = (0..=k).map(|j| delta_sym(&q, j)).collect::<Result<_>>()?;
        let j = gen.index(0, k);
        let Some(bad) = corrupt(&mut gen, &fs[j])? else {
            continue;
        };
        fs[j] = bad;
        done += 1;
        cases += 1;
        let symbolic: Vec<NcFn> = fs.iter().map(|p| Arc::new(p.clone()) as NcFn).collect();
        let opaque: Vec<NcFn> = symbolic
            .iter()
            .map(|f| Arc::new(NcOracle::opaque(f.clone())) as NcFn)
            .collect();
        let sym = check_integrability(&symbolic, &[])?;
        let samples = integrability_samples(
            &opaque,
            None,
            &SampleConfig {
                seed: seed ^ done as u64,
                ..Default::default()
            },
        )?;
        let num = check_integrability(&opaque, &samples)?;
        if sym.passed && num.passed {
            return Ok(fail_at(
                name,
                cases,
                done,
                format!("corrupted image of {q} passed"),
            ));
        }
    }
    Ok(CheckReport::pass(name, cases))
}

/// `P F(Y,Y)(PY - YP) P = 0` for idempotents `P`, and
/// `A F(Y,Y)(BY - YB) C = 0` whenever `AB = λA` and `BC = λC`.
pub fn makingzero(seed: u64, idempotents: usize, triples: usize) -> Result<CheckReport> {
    let name = "makingzero";
    let mut gen = Gen::from_seed(seed);
    let mut cases = 0;
    for case in 0..idempotents + triples {
        cases += 1;
        let n = gen.index(1, 3);
        let d = gen.index(1, 2);
        let q = {
            let terms = gen.index(1, 4);
            gen.poly(&[d], &[], 4, terms)
        };
        let f = delta_sym(&q, 0)?;
        let y = gen.point(d, n, n);
        let (a, b, c, lambda) = if case < idempotents {
            let p = gen.idempotent(n);
            (p.clone(), p.clone(), p, Scalar::one())
        } else {
            let lambda = gen.scalar();
            let (s, s_inv) = gen.invertible(n);
            let mut e = ScalarMatrix::zeros(n, n);
            let mut j = ScalarMatrix::zeros(n, n);
            for i in 0..n {
                if gen.coin() {
                    e.set(i, i, Scalar::one());
                    j.set(i, i, lambda.clone());
                } else {
                    j.set(i, i, gen.scalar());
                }
            }
            let b = &(&s * &j) * &s_inv;
            let pi = &(&s * &e) * &s_inv;
            (&gen.matrix(n, n) * &pi, b, &pi * &gen.matrix(n, n), lambda)
        };
        let r = check_makingzero(&f, &y, &a, &b, &c, &lambda)?;
        if !r.passed {
            return Ok(fail_at(name, cases, case, r.witness.unwrap_or_default()));
        }
    }
    Ok(CheckReport::pass(name, cases))
}

/// Polynomial evaluation respects direct sums, similarities and
/// intertwinings; the entrywise square does not.
pub fn structure(seed: u64, count: usize) -> Result<CheckReport> {
    let name = "structure axioms";
    let mut gen = Gen::from_seed(seed);
    let mut cases = 0;
    for case in 0..count {
        cases += 1;
        let p = random_poly(&mut gen, case % 3, 2, 4);
        let r = check_respects_structure(&p, &mut gen, 2)?;
        if !r.passed {
            return Ok(fail_at(name, cases, case, r.witness.unwrap_or_default()));
        }
    }
    cases += 1;
    let r = check_respects_structure(&entrywise_square_oracle(), &mut gen, 4)?;
    if r.passed {
        return Ok(CheckReport::fail(name, cases, "entrywise square passed"));
    }
    Ok(CheckReport::pass(name, cases))
}

/// Reduced-size run of every battery.
pub fn selftest(seed: u64) -> Result<Vec<CheckReport>> {
    Ok(vec![
        delta_agreement(seed, 20)?,
        delta_commutation(seed, 20)?,
        order0_round_trip(seed, 5)?,
        inner_solver(seed, 5)?,
        higher_round_trip(seed, 3, 1)?,
        higher_round_trip(seed, 2, 2)?,
        negatives(seed, 4)?,
        makingzero(seed, 5, 5)?,
        structure(seed, 5)?,
    ])
}
