//! Seeded generators and structural checkers.
//!
//! Every generator draws from a ChaCha stream seeded by [`RngSpec::seed`], so
//! a seed reproduces the same matrices and polynomials on every platform.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diffcalc::NcFunction;
use crate::error::Result;
use crate::exactalg::{ratio, PointMatrix, Scalar, ScalarMatrix};
use crate::ncpoly::{MonomialKey, NcPolynomial};
use crate::report::CheckReport;

/// Seed and entry bounds: numerators in `-max_num..=max_num`, denominators in
/// `1..=max_den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngSpec {
    pub seed: u64,
    pub max_num: i64,
    pub max_den: i64,
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        RngSpec {
            seed,
            max_num: 3,
            max_den: 2,
        }
    }

    /// Integer entries only.
    pub fn integral(seed: u64) -> Self {
        RngSpec {
            seed,
            max_num: 3,
            max_den: 1,
        }
    }
}

pub struct Gen {
    rng: ChaCha8Rng,
    spec: RngSpec,
}

impl Gen {
    pub fn new(spec: RngSpec) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            spec,
        }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::new(RngSpec::new(seed))
    }

    pub fn spec(&self) -> RngSpec {
        self.spec
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn index(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random_bool(0.5)
    }

    pub fn scalar(&mut self) -> Scalar {
        let n = self.int(-self.spec.max_num, self.spec.max_num);
        let d = self.int(1, self.spec.max_den.max(1));
        ratio(n, d)
    }

    pub fn nonzero_scalar(&mut self) -> Scalar {
        loop {
            let s = self.scalar();
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> ScalarMatrix {
        let entries = (0..rows * cols).map(|_| self.scalar()).collect();
        ScalarMatrix::from_entries(rows, cols, entries).expect("entry count matches")
    }

    pub fn point(&mut self, dim: usize, rows: usize, cols: usize) -> PointMatrix {
        PointMatrix::new((0..dim).map(|_| self.matrix(rows, cols)).collect())
            .expect("dimension is positive")
    }

    /// Random `(X^0..X^k)(Z^1..Z^k)` of the given sizes.
    pub fn args(
        &mut self,
        xdims: &[usize],
        zdims: &[usize],
        sizes: &[usize],
    ) -> (Vec<PointMatrix>, Vec<PointMatrix>) {
        let xs = xdims
            .iter()
            .zip(sizes)
            .map(|(&d, &n)| self.point(d, n, n))
            .collect();
        let zs = zdims
            .iter()
            .enumerate()
            .map(|(l, &d)| self.point(d, sizes[l], sizes[l + 1]))
            .collect();
        (xs, zs)
    }

    pub fn sizes(&mut self, count: usize, max: usize) -> Vec<usize> {
        (0..count).map(|_| self.index(1, max)).collect()
    }

    /// `(S, S^{-1})` as a product of elementary operations with unit pivots.
    pub fn invertible(&mut self, n: usize) -> (ScalarMatrix, ScalarMatrix) {
        let mut s = ScalarMatrix::identity(n);
        let mut inv = ScalarMatrix::identity(n);
        if n < 2 {
            return (s, inv);
        }
        for _ in 0..3 * n {
            let p = self.index(0, n - 1);
            let mut q = self.index(0, n - 2);
            if q >= p {
                q += 1;
            }
            if self.index(0, 3) == 0 {
                let mut e = ScalarMatrix::identity(n);
                e.swap_rows(p, q);
                s = &e * &s;
                inv = &inv * &e;
            } else {
                let a = self.nonzero_scalar();
                let mut e = ScalarMatrix::identity(n);
                e.set(p, q, a.clone());
                let mut e_inv = ScalarMatrix::identity(n);
                e_inv.set(p, q, -a);
                s = &e * &s;
                inv = &inv * &e_inv;
            }
        }
        (s, inv)
    }

    /// `S E S^{-1}` with `E` diagonal of zeros and ones.
    pub fn idempotent(&mut self, n: usize) -> ScalarMatrix {
        let diag: Vec<bool> = (0..n).map(|_| self.coin()).collect();
        self.idempotent_with(&diag)
    }

    pub fn idempotent_with(&mut self, diag: &[bool]) -> ScalarMatrix {
        let n = diag.len();
        let (s, inv) = self.invertible(n);
        let mut e = ScalarMatrix::zeros(n, n);
        for (i, &on) in diag.iter().enumerate() {
            if on {
                e.set(i, i, Scalar::from_integer(1.into()));
            }
        }
        &(&s * &e) * &inv
    }

    /// Canonical polynomial with at most `terms` monomials of total degree
    /// (x-letters plus z-letters) at most `max_degree`.
    pub fn poly(
        &mut self,
        xdims: &[usize],
        zdims: &[usize],
        max_degree: usize,
        terms: usize,
    ) -> NcPolynomial {
        let k = zdims.len();
        let mut p = NcPolynomial::zero(xdims.to_vec(), zdims.to_vec()).expect("valid dimensions");
        if max_degree < k {
            return p;
        }
        for _ in 0..terms {
            let len = self.index(0, max_degree - k);
            let mut xwords = vec![Vec::new(); k + 1];
            for _ in 0..len {
                let j = self.index(0, k);
                xwords[j].push(self.index(1, xdims[j]) as u32);
            }
            let zletters = zdims.iter().map(|&d| self.index(1, d) as u32).collect();
            let c = self.nonzero_scalar();
            p.add_term(MonomialKey::new(xwords, zletters), c)
                .expect("letters drawn in range");
        }
        p
    }
}

/// Checks direct sums, similarities and intertwinings slot by slot on
/// `trials` random instances with sizes up to 2.
pub fn check_respects_structure(
    f: &dyn NcFunction,
    gen: &mut Gen,
    trials: usize,
) -> Result<CheckReport> {
    let k = f.order();
    let (xdims, zdims) = (f.xdims().to_vec(), f.zdims().to_vec());
    let name = "respects structure";
    let mut cases = 0;
    for _ in 0..trials {
        for j in 0..=k {
            // direct sum in slot j
            let sizes = gen.sizes(k + 1, 2);
            let m = gen.index(1, 2);
            let (xs, zs) = gen.args(&xdims, &zdims, &sizes);
            let x2 = gen.point(xdims[j], m, m);
            let zl = (j >= 1).then(|| gen.point(zdims[j - 1], sizes[j - 1], m));
            let zr = (j < k).then(|| gen.point(zdims[j], m, sizes[j + 1]));
            let mut big_x = xs.clone();
            big_x[j] = xs[j].direct_sum(&x2);
            let mut big_z = zs.clone();
            let mut zs2 = zs.clone();
            if let Some(zl) = &zl {
                big_z[j - 1] = zs[j - 1].hstack(zl);
                zs2[j - 1] = zl.clone();
            }
            if let Some(zr) = &zr {
                big_z[j] = zs[j].vstack(zr);
                zs2[j] = zr.clone();
            }
            let mut xs2 = xs.clone();
            xs2[j] = x2.clone();
            let whole = f.eval(&big_x, &big_z)?;
            let a = f.eval(&xs, &zs)?;
            let b = f.eval(&xs2, &zs2)?;
            let expected = if k == 0 {
                a.direct_sum(&b)
            } else if j == 0 {
                a.vstack(&b)
            } else if j == k {
                a.hstack(&b)
            } else {
                &a + &b
            };
            cases += 1;
            if whole != expected {
                return Ok(CheckReport::fail(
                    name,
                    cases,
                    format!("direct sum in slot {j} at sizes {sizes:?} and {m}"),
                ));
            }

            // similarity in slot j
            let (s, s_inv) = gen.invertible(sizes[j]);
            let mut xs_s = xs.clone();
            xs_s[j] = xs[j].left_mul(&s).right_mul(&s_inv);
            let mut zs_s = zs.clone();
            if j >= 1 {
                zs_s[j - 1] = zs[j - 1].right_mul(&s_inv);
            }
            if j < k {
                zs_s[j] = zs[j].left_mul(&s);
            }
            let lhs = f.eval(&xs_s, &zs_s)?;
            let mut rhs = a.clone();
            if j == 0 {
                rhs = &s * &rhs;
            }
            if j == k {
                rhs = &rhs * &s_inv;
            }
            cases += 1;
            if lhs != rhs {
                return Ok(CheckReport::fail(
                    name,
                    cases,
                    format!("similarity in slot {j} by S = {s}"),
                ));
            }

            // intertwining T X = Y T with Y = S [[X, A], [0, B]] S^{-1}, T = S [I; 0]
            let n = sizes[j];
            let extra = gen.index(1, 2);
            let a_blk = gen.point(xdims[j], n, extra);
            let b_blk = gen.point(xdims[j], extra, extra);
            let upper = crate::exactalg::block_upper(&xs[j], &a_blk, &b_blk)?;
            let (s, s_inv) = gen.invertible(n + extra);
            let y = upper.left_mul(&s).right_mul(&s_inv);
            let t = &s * &ScalarMatrix::identity(n).vstack(&ScalarMatrix::zeros(extra, n));
            let mut ys = xs.clone();
            ys[j] = y;
            // Z^j = W T on the X side, W on the Y side; Z^{j+1} = V and T V
            let mut zx = zs.clone();
            let mut zy = zs.clone();
            if j >= 1 {
                let w = gen.point(zdims[j - 1], sizes[j - 1], n + extra);
                zx[j - 1] = w.right_mul(&t);
                zy[j - 1] = w;
            }
            if j < k {
                zy[j] = zs[j].left_mul(&t);
            }
            let mut lhs = f.eval(&xs, &zx)?;
            let mut rhs = f.eval(&ys, &zy)?;
            if j == 0 {
                lhs = &t * &lhs;
            }
            if j == k {
                rhs = &rhs * &t;
            }
            cases += 1;
            if lhs != rhs {
                return Ok(CheckReport::fail(
                    name,
                    cases,
                    format!("intertwining in slot {j} with T = {t}"),
                ));
            }
        }
    }
    Ok(CheckReport::pass(name, cases))
}

/// `X |-> (X_ab^2)`: respects direct sums but not similarities.
pub fn entrywise_square_oracle() -> crate::diffcalc::NcOracle {
    crate::diffcalc::NcOracle::new(vec![1], vec![], |xs, _| {
        let x = xs[0].component(0);
        let mut out = x.clone();
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                out.set(i, j, x.get(i, j) * x.get(i, j));
            }
        }
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffcalc::NcOracle;

    #[test]
    fn generators_are_reproducible() {
        let a = Gen::from_seed(42).poly(&[1], &[], 3, 5);
        let b = Gen::from_seed(42).poly(&[1], &[], 3, 5);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), b.to_string());
    }

    #[test]
    fn poly_bounds() {
        let mut g = Gen::from_seed(1);
        assert!(g.poly(&[2], &[], 3, 0).is_zero());
        let c = g.poly(&[2], &[], 0, 4);
        assert!(c.terms().all(|(k, _)| k.degree() == 0));
        let p = g.poly(&[2, 1], &[2], 4, 6);
        assert!(p.degree() <= 4);
    }

    #[test]
    fn invertible_and_idempotent() {
        let mut g = Gen::from_seed(7);
        for n in 1..=3 {
            let (s, inv) = g.invertible(n);
            assert_eq!(&s * &inv, ScalarMatrix::identity(n));
            let p = g.idempotent(n);
            assert_eq!(&p * &p, p);
        }
        assert_eq!(g.idempotent_with(&[true, true]), ScalarMatrix::identity(2));
        assert!(g.idempotent_with(&[false, false, false]).is_zero());
    }

    #[test]
    fn polynomials_respect_structure() {
        let mut g = Gen::from_seed(3);
        for (xd, zd) in [
            (vec![2], vec![]),
            (vec![1, 2], vec![1]),
            (vec![1, 1, 2], vec![2, 1]),
        ] {
            let p = g.poly(&xd, &zd, 4, 4);
            assert!(
                check_respects_structure(&p, &mut g, 2).unwrap().passed,
                "{p}"
            );
        }
        let zero = NcOracle::zero(vec![1], vec![]);
        assert!(check_respects_structure(&zero, &mut g, 2).unwrap().passed);
    }

    #[test]
    fn entrywise_square_is_caught() {
        let mut g = Gen::from_seed(5);
        let report = check_respects_structure(&entrywise_square_oracle(), &mut g, 5).unwrap();
        assert!(!report.passed);
        assert!(report.witness.is_some());
    }
}
