//! The difference-differential operators `jΔ`.
//!
//! Symbolically on polynomials by splitting words, and numerically on any
//! [`NcFunction`] by evaluating at a block upper triangular point.

use std::fmt;
use std::sync::Arc;

use crate::error::{NcError, Result};
use crate::exactalg::{block_upper, PointMatrix, ScalarMatrix};
use crate::ncpoly::{check_args, MonomialKey, NcPolynomial};
use crate::report::CheckReport;

/// An order-k nc function `f(X^0..X^k)(Z^1..Z^k)`, defined on all sizes.
pub trait NcFunction: Send + Sync {
    fn xdims(&self) -> &[usize];

    fn zdims(&self) -> &[usize];

    fn order(&self) -> usize {
        self.zdims().len()
    }

    fn eval(&self, xs: &[PointMatrix], zs: &[PointMatrix]) -> Result<ScalarMatrix>;

    /// The symbolic form, when the function is a polynomial.
    fn as_polynomial(&self) -> Option<&NcPolynomial> {
        None
    }
}

pub type NcFn = Arc<dyn NcFunction>;

impl NcFunction for NcPolynomial {
    fn xdims(&self) -> &[usize] {
        NcPolynomial::xdims(self)
    }

    fn zdims(&self) -> &[usize] {
        NcPolynomial::zdims(self)
    }

    fn eval(&self, xs: &[PointMatrix], zs: &[PointMatrix]) -> Result<ScalarMatrix> {
        NcPolynomial::eval(self, xs, zs)
    }

    fn as_polynomial(&self) -> Option<&NcPolynomial> {
        Some(self)
    }
}

type Evaluator = dyn Fn(&[PointMatrix], &[PointMatrix]) -> Result<ScalarMatrix> + Send + Sync;

/// Black-box nc function given by a closure. Arguments are shape checked
/// before the closure runs.
#[derive(Clone)]
pub struct NcOracle {
    xdims: Vec<usize>,
    zdims: Vec<usize>,
    evaluator: Arc<Evaluator>,
}

impl NcOracle {
    pub fn new<F>(xdims: Vec<usize>, zdims: Vec<usize>, evaluator: F) -> Self
    where
        F: Fn(&[PointMatrix], &[PointMatrix]) -> Result<ScalarMatrix> + Send + Sync + 'static,
    {
        assert_eq!(
            xdims.len(),
            zdims.len() + 1,
            "an order-k oracle has k+1 x-slots"
        );
        NcOracle {
            xdims,
            zdims,
            evaluator: Arc::new(evaluator),
        }
    }

    pub fn zero(xdims: Vec<usize>, zdims: Vec<usize>) -> Self {
        Self::new(xdims, zdims, |xs, _| {
            Ok(ScalarMatrix::zeros(xs[0].rows(), xs[xs.len() - 1].rows()))
        })
    }

    /// Wraps any nc function, hiding its symbolic form.
    pub fn opaque(f: NcFn) -> Self {
        let (xdims, zdims) = (f.xdims().to_vec(), f.zdims().to_vec());
        Self::new(xdims, zdims, move |xs, zs| f.eval(xs, zs))
    }
}

impl fmt::Debug for NcOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NcOracle")
            .field("xdims", &self.xdims)
            .field("zdims", &self.zdims)
            .finish_non_exhaustive()
    }
}

impl NcFunction for NcOracle {
    fn xdims(&self) -> &[usize] {
        &self.xdims
    }

    fn zdims(&self) -> &[usize] {
        &self.zdims
    }

    fn eval(&self, xs: &[PointMatrix], zs: &[PointMatrix]) -> Result<ScalarMatrix> {
        let sizes = check_args(&self.xdims, &self.zdims, xs, zs)?;
        let out = (self.evaluator)(xs, zs)?;
        let k = self.zdims.len();
        if out.shape() != (sizes[0], sizes[k]) {
            return Err(NcError::ShapeMismatch(format!(
                "oracle returned {}x{}, expected {}x{}",
                out.rows(),
                out.cols(),
                sizes[0],
                sizes[k]
            )));
        }
        Ok(out)
    }
}

fn check_slot(j: usize, order: usize) -> Result<()> {
    if j > order {
        Err(NcError::SlotOutOfRange { slot: j, order })
    } else {
        Ok(())
    }
}

/// Slot dimensions of `jΔf` for `f` with the given dimensions.
pub fn delta_dims(xdims: &[usize], zdims: &[usize], j: usize) -> (Vec<usize>, Vec<usize>) {
    let mut nx = xdims.to_vec();
    nx.insert(j, xdims[j]);
    let mut nz = zdims.to_vec();
    nz.insert(j, xdims[j]);
    (nx, nz)
}

/// Symbolic `jΔq`: every occurrence of a letter in `w_j` becomes a new
/// z-letter, with the prefix staying in slot `j` and the suffix moving to `j+1`.
pub fn delta_sym(q: &NcPolynomial, j: usize) -> Result<NcPolynomial> {
    check_slot(j, q.order())?;
    let (nx, nz) = delta_dims(q.xdims(), q.zdims(), j);
    let mut out = NcPolynomial::zero(nx, nz)?;
    for (key, c) in q.terms() {
        let w = &key.xwords[j];
        for i in 0..w.len() {
            let mut xwords = Vec::with_capacity(key.xwords.len() + 1);
            xwords.extend_from_slice(&key.xwords[..j]);
            xwords.push(w[..i].to_vec());
            xwords.push(w[i + 1..].to_vec());
            xwords.extend_from_slice(&key.xwords[j + 1..]);
            let mut zletters = Vec::with_capacity(key.zletters.len() + 1);
            zletters.extend_from_slice(&key.zletters[..j]);
            zletters.push(w[i]);
            zletters.extend_from_slice(&key.zletters[j..]);
            out.add_term_unchecked(MonomialKey::new(xwords, zletters), c.clone());
        }
    }
    Ok(out)
}

/// Evaluates `jΔf(xs)(zs)` numerically. `xs` holds the `k+2` points of the
/// order-(k+1) function and `zs` its `k+1` directions; `zs[j]` is the
/// direction inserted between `xs[j]` and `xs[j+1]`.
pub fn delta_eval(
    f: &dyn NcFunction,
    j: usize,
    xs: &[PointMatrix],
    zs: &[PointMatrix],
) -> Result<ScalarMatrix> {
    let k = f.order();
    check_slot(j, k)?;
    let (nx, nz) = delta_dims(f.xdims(), f.zdims(), j);
    let sizes = check_args(&nx, &nz, xs, zs)?;
    let (n1, n2) = (sizes[j], sizes[j + 1]);

    let mut fx = Vec::with_capacity(k + 1);
    fx.extend_from_slice(&xs[..j]);
    fx.push(block_upper(&xs[j], &zs[j], &xs[j + 1])?);
    fx.extend_from_slice(&xs[j + 2..]);

    let mut fz = Vec::with_capacity(k);
    for l in 1..=k {
        let z = if l < j {
            zs[l - 1].clone()
        } else if l == j {
            let z = &zs[l - 1];
            z.hstack(&PointMatrix::zeros(z.dim(), z.rows(), n2))
        } else if l == j + 1 {
            let z = &zs[l];
            PointMatrix::zeros(z.dim(), n1, z.cols()).vstack(z)
        } else {
            zs[l].clone()
        };
        fz.push(z);
    }

    let full = f.eval(&fx, &fz)?;
    let (r0, rows) = if j == 0 { (0, n1) } else { (0, full.rows()) };
    let (c0, cols) = if j == k { (n1, n2) } else { (0, full.cols()) };
    Ok(full.block(r0, c0, rows, cols))
}

/// `jΔf(X^0..X^{j-1}, X^j_1, X^j_2, X^{j+1}..X^k)(Z^1..Z^j, D, Z^{j+1}..Z^k)`
/// where `xs` already lists both split points and `zs` holds the original `k`
/// directions.
pub fn delta_num(
    f: &dyn NcFunction,
    j: usize,
    xs: &[PointMatrix],
    zs: &[PointMatrix],
    d: &PointMatrix,
) -> Result<ScalarMatrix> {
    check_slot(j, f.order())?;
    if zs.len() != f.order() {
        return Err(NcError::ShapeMismatch(format!(
            "order {} needs {} directions, got {}",
            f.order(),
            f.order(),
            zs.len()
        )));
    }
    let mut all = zs.to_vec();
    all.insert(j, d.clone());
    delta_eval(f, j, xs, &all)
}

/// `delta_num` with the direction `A e_alpha`; `alpha` is 1-based.
pub fn delta_directional(
    f: &dyn NcFunction,
    j: usize,
    alpha: usize,
    xs: &[PointMatrix],
    zs: &[PointMatrix],
    a: &ScalarMatrix,
) -> Result<ScalarMatrix> {
    check_slot(j, f.order())?;
    let dim = f.xdims()[j];
    if alpha == 0 || alpha > dim {
        return Err(NcError::ComponentOutOfRange { alpha, dim });
    }
    delta_num(f, j, xs, zs, &PointMatrix::directional(dim, alpha - 1, a))
}

/// `jΔf` as an nc function in its own right.
#[derive(Clone)]
pub struct Delta {
    inner: NcFn,
    slot: usize,
    xdims: Vec<usize>,
    zdims: Vec<usize>,
}

impl Delta {
    pub fn new(inner: NcFn, slot: usize) -> Result<Self> {
        check_slot(slot, inner.order())?;
        let (xdims, zdims) = delta_dims(inner.xdims(), inner.zdims(), slot);
        Ok(Delta {
            inner,
            slot,
            xdims,
            zdims,
        })
    }
}

impl NcFunction for Delta {
    fn xdims(&self) -> &[usize] {
        &self.xdims
    }

    fn zdims(&self) -> &[usize] {
        &self.zdims
    }

    fn eval(&self, xs: &[PointMatrix], zs: &[PointMatrix]) -> Result<ScalarMatrix> {
        delta_eval(self.inner.as_ref(), self.slot, xs, zs)
    }
}

/// Compares `(j+1)Δ iΔ g` with `iΔ jΔ g` symbolically, for `i <= j`.
pub fn check_delta_commutation(g: &NcPolynomial, i: usize, j: usize) -> Result<CheckReport> {
    let k = g.order();
    check_slot(j, k)?;
    if i > j {
        return Err(NcError::SlotOutOfRange { slot: i, order: j });
    }
    let lhs = delta_sym(&delta_sym(g, i)?, j + 1)?;
    let rhs = delta_sym(&delta_sym(g, j)?, i)?;
    let name = format!("delta commutation ({i},{j})");
    let diff = lhs.sub(&rhs)?;
    Ok(if diff.is_zero() {
        CheckReport::pass(name, 1).global()
    } else {
        CheckReport::fail(name, 1, format!("difference {diff}")).global()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar;
    use crate::ncpoly::Monomial;

    fn pt(rows: &[&[i64]]) -> PointMatrix {
        PointMatrix::from_matrix(ScalarMatrix::from_ints(rows))
    }

    fn order1(
        terms: &[(i64, &[u32], u32, &[u32])],
        d0: usize,
        dz: usize,
        d1: usize,
    ) -> NcPolynomial {
        NcPolynomial::from_terms(
            vec![d0, d1],
            vec![dz],
            terms.iter().map(|(c, a, v, b)| {
                Monomial::new(scalar(*c), vec![a.to_vec(), b.to_vec()], vec![*v])
            }),
        )
        .unwrap()
    }

    #[test]
    fn delta_of_square() {
        let q = NcPolynomial::order0(1, &[(1, &[1, 1])]).unwrap();
        let expected = order1(&[(1, &[], 1, &[1]), (1, &[1], 1, &[])], 1, 1, 1);
        assert_eq!(delta_sym(&q, 0).unwrap(), expected);
    }

    #[test]
    fn delta_of_mixed_word() {
        let q = NcPolynomial::order0(2, &[(1, &[1, 2])]).unwrap();
        let expected = order1(&[(1, &[], 1, &[2]), (1, &[1], 2, &[])], 2, 2, 2);
        assert_eq!(delta_sym(&q, 0).unwrap(), expected);
    }

    #[test]
    fn delta_of_constant_vanishes() {
        let q = NcPolynomial::constant(vec![1], vec![], scalar(4)).unwrap();
        let d = delta_sym(&q, 0).unwrap();
        assert!(d.is_zero());
        assert_eq!(d.order(), 1);
        assert_eq!(
            delta_sym(&q, 1),
            Err(NcError::SlotOutOfRange { slot: 1, order: 0 })
        );
    }

    #[test]
    fn numeric_delta_of_square() {
        let q = NcPolynomial::order0(1, &[(1, &[1, 1])]).unwrap();
        let v = delta_num(&q, 0, &[pt(&[&[2]]), pt(&[&[3]])], &[], &pt(&[&[1]])).unwrap();
        assert_eq!(v, ScalarMatrix::from_ints(&[[5]]));
    }

    #[test]
    fn numeric_delta_of_linear_is_direction() {
        let q = NcPolynomial::order0(1, &[(1, &[1])]).unwrap();
        let d = pt(&[&[1, 2, 3], &[4, 5, 6]]);
        let xs = [
            pt(&[&[1, 1], &[0, 2]]),
            pt(&[&[3, 0, 1], &[1, 1, 1], &[0, 0, 2]]),
        ];
        assert_eq!(
            delta_num(&q, 0, &xs, &[], &d).unwrap(),
            d.component(0).clone()
        );
    }

    #[test]
    fn numeric_delta_of_constant_vanishes() {
        let c = NcOracle::new(vec![1], vec![], |xs, _| {
            Ok(ScalarMatrix::scalar_identity(xs[0].rows(), &scalar(9)))
        });
        let v = delta_num(&c, 0, &[pt(&[&[2]]), pt(&[&[7]])], &[], &pt(&[&[1]])).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn numeric_matches_symbolic_every_slot() {
        // q = x0_1 x0_2 z1 x1_1 x1_1 with 2x2 and 1x1 points
        let q = NcPolynomial::from_terms(
            vec![2, 1],
            vec![1],
            [
                Monomial::new(scalar(1), vec![vec![1, 2], vec![1, 1]], vec![1]),
                Monomial::new(scalar(-2), vec![vec![2], vec![]], vec![1]),
            ],
        )
        .unwrap();
        let a = PointMatrix::new(vec![
            ScalarMatrix::from_ints(&[[1, 2], [0, 1]]),
            ScalarMatrix::from_ints(&[[0, 1], [3, 1]]),
        ])
        .unwrap();
        let b = PointMatrix::new(vec![
            ScalarMatrix::from_ints(&[[2]]),
            ScalarMatrix::from_ints(&[[5]]),
        ])
        .unwrap();
        let y = pt(&[&[3]]);
        let w = pt(&[&[1, 1], &[2, -1]]);
        // slot 0: points (a, b, y), directions (D: 2x1 dim 2, Z: 1x1)
        let d0 = PointMatrix::new(vec![
            ScalarMatrix::from_ints(&[[1], [2]]),
            ScalarMatrix::from_ints(&[[-1], [4]]),
        ])
        .unwrap();
        let z = pt(&[&[6]]);
        let xs = [a.clone(), b.clone(), y.clone()];
        let zs = [d0.clone(), z.clone()];
        let sym = delta_sym(&q, 0).unwrap().eval(&xs, &zs).unwrap();
        assert_eq!(delta_eval(&q, 0, &xs, &zs).unwrap(), sym);
        // slot 1: points (a, y, w), directions (Z: 2x1, D: 1x2)
        let z2 = pt(&[&[1], &[-3]]);
        let d1 = pt(&[&[2, 5]]);
        let xs = [a, y, w];
        let zs = [z2, d1];
        let sym = delta_sym(&q, 1).unwrap().eval(&xs, &zs).unwrap();
        assert_eq!(delta_eval(&q, 1, &xs, &zs).unwrap(), sym);
    }

    #[test]
    fn directional_splits_direction() {
        let q = NcPolynomial::order0(2, &[(1, &[1, 2])]).unwrap();
        let xs = [
            PointMatrix::new(vec![
                ScalarMatrix::from_ints(&[[2]]),
                ScalarMatrix::from_ints(&[[3]]),
            ])
            .unwrap(),
            PointMatrix::new(vec![
                ScalarMatrix::from_ints(&[[5]]),
                ScalarMatrix::from_ints(&[[7]]),
            ])
            .unwrap(),
        ];
        let a1 = ScalarMatrix::from_ints(&[[1]]);
        let a2 = ScalarMatrix::from_ints(&[[4]]);
        // z_1 y_2 + x_1 z_2 at D = (1, 4): 1*7 + 2*4
        let d1 = delta_directional(&q, 0, 1, &xs, &[], &a1).unwrap();
        let d2 = delta_directional(&q, 0, 2, &xs, &[], &a2).unwrap();
        assert_eq!(d1, ScalarMatrix::from_ints(&[[7]]));
        assert_eq!(d2, ScalarMatrix::from_ints(&[[8]]));
        let d = PointMatrix::new(vec![a1.clone(), a2]).unwrap();
        assert_eq!(&d1 + &d2, delta_num(&q, 0, &xs, &[], &d).unwrap());
        assert_eq!(
            delta_directional(&q, 0, 3, &xs, &[], &a1),
            Err(NcError::ComponentOutOfRange { alpha: 3, dim: 2 })
        );
    }

    #[test]
    fn commutation_of_square() {
        let g = NcPolynomial::order0(1, &[(1, &[1, 1])]).unwrap();
        let twice = delta_sym(&delta_sym(&g, 0).unwrap(), 1).unwrap();
        let zz = NcPolynomial::from_terms(
            vec![1, 1, 1],
            vec![1, 1],
            [Monomial::new(
                scalar(1),
                vec![vec![], vec![], vec![]],
                vec![1, 1],
            )],
        )
        .unwrap();
        assert_eq!(twice, zz);
        assert!(check_delta_commutation(&g, 0, 0).unwrap().passed);
        let lin = NcPolynomial::order0(1, &[(3, &[1])]).unwrap();
        assert!(delta_sym(&delta_sym(&lin, 0).unwrap(), 1)
            .unwrap()
            .is_zero());
        let cube = NcPolynomial::order0(1, &[(1, &[1, 1, 1])]).unwrap();
        assert!(check_delta_commutation(&cube, 0, 0).unwrap().passed);
        assert_eq!(
            delta_sym(&delta_sym(&cube, 0).unwrap(), 1).unwrap().len(),
            3
        );
    }
}
