//! Dense k-linear maps `(R^{e_1})^{r_1 x c_1} x ... x (R^{e_k})^{r_k x c_k} -> R^{p x q}`.
//!
//! A map is stored by its values on tuples of elementary arguments
//! `E_rc (x) e_comp`, one output matrix per tuple. The bimodule actions
//! used by the higher derivation machinery live here too.

use num_traits::Zero;

use crate::error::{NcError, Result};
use crate::exactalg::{PointMatrix, ScalarMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ArgShape {
    pub rows: usize,
    pub cols: usize,
    pub dim: usize,
}

impl ArgShape {
    pub fn new(rows: usize, cols: usize, dim: usize) -> Self {
        ArgShape { rows, cols, dim }
    }

    pub fn basis_len(&self) -> usize {
        self.rows * self.cols * self.dim
    }

    /// `(component, row, col)` of a basis index.
    pub fn decode(&self, b: usize) -> (usize, usize, usize) {
        let per = self.rows * self.cols;
        (b / per, (b % per) / self.cols, b % self.cols)
    }

    pub fn encode(&self, comp: usize, r: usize, c: usize) -> usize {
        comp * self.rows * self.cols + r * self.cols + c
    }

    pub fn unit(&self, b: usize) -> PointMatrix {
        let (comp, r, c) = self.decode(b);
        PointMatrix::unit(self.dim, self.rows, self.cols, comp, r, c)
    }
}

/// `(component, row, col)` of a basis element, 0-based.
pub type BasisIndex = (usize, usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiLinearMap {
    args: Vec<ArgShape>,
    out_rows: usize,
    out_cols: usize,
    coeffs: Vec<ScalarMatrix>,
}

/// Iterates over all index tuples below `radices`, last index fastest.
fn for_each_tuple(radices: &[usize], mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if radices.contains(&0) {
        return Ok(());
    }
    let mut idx = vec![0; radices.len()];
    loop {
        f(&idx)?;
        let mut pos = radices.len();
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < radices[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }
}

impl MultiLinearMap {
    pub fn zero(args: Vec<ArgShape>, out_rows: usize, out_cols: usize) -> Self {
        let n = args.iter().map(ArgShape::basis_len).product();
        MultiLinearMap {
            args,
            out_rows,
            out_cols,
            coeffs: vec![ScalarMatrix::zeros(out_rows, out_cols); n],
        }
    }

    /// The arity-0 map with value `m`.
    pub fn constant(m: ScalarMatrix) -> Self {
        MultiLinearMap {
            args: vec![],
            out_rows: m.rows(),
            out_cols: m.cols(),
            coeffs: vec![m],
        }
    }

    /// Materializes a k-linear function by probing it on elementary tuples.
    pub fn from_fn<F>(args: Vec<ArgShape>, out_rows: usize, out_cols: usize, f: F) -> Result<Self>
    where
        F: Fn(&[PointMatrix]) -> Result<ScalarMatrix>,
    {
        let radices: Vec<usize> = args.iter().map(ArgShape::basis_len).collect();
        let mut coeffs = Vec::with_capacity(radices.iter().product());
        for_each_tuple(&radices, |idx| {
            let zs: Vec<PointMatrix> = idx.iter().zip(&args).map(|(&b, a)| a.unit(b)).collect();
            let v = f(&zs)?;
            if v.shape() != (out_rows, out_cols) {
                return Err(NcError::ShapeMismatch(format!(
                    "probe returned {}x{}, expected {out_rows}x{out_cols}",
                    v.rows(),
                    v.cols()
                )));
            }
            coeffs.push(v);
            Ok(())
        })?;
        Ok(MultiLinearMap {
            args,
            out_rows,
            out_cols,
            coeffs,
        })
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn args(&self) -> &[ArgShape] {
        &self.args
    }

    pub fn out_shape(&self) -> (usize, usize) {
        (self.out_rows, self.out_cols)
    }

    pub fn coeffs(&self) -> &[ScalarMatrix] {
        &self.coeffs
    }

    /// Value on the arity-0 map; `None` for positive arity.
    pub fn as_matrix(&self) -> Option<&ScalarMatrix> {
        if self.args.is_empty() {
            self.coeffs.first()
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(ScalarMatrix::is_zero)
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.args)
            .fold(0, |acc, (&b, a)| acc * a.basis_len() + b)
    }

    /// Nonzero coefficients keyed by `(component, row, col)` per argument.
    pub fn nonzero_entries(&self) -> Vec<(Vec<BasisIndex>, &ScalarMatrix)> {
        let radices: Vec<usize> = self.args.iter().map(ArgShape::basis_len).collect();
        let mut out = Vec::new();
        let _ = for_each_tuple(&radices, |idx| {
            let m = &self.coeffs[self.flat_index(idx)];
            if !m.is_zero() {
                let key = idx
                    .iter()
                    .zip(&self.args)
                    .map(|(&b, a)| a.decode(b))
                    .collect();
                out.push((key, m));
            }
            Ok(())
        });
        out
    }

    fn check_args(&self, zs: &[PointMatrix]) -> Result<()> {
        if zs.len() != self.args.len() {
            return Err(NcError::ShapeMismatch(format!(
                "{}-linear map applied to {} arguments",
                self.args.len(),
                zs.len()
            )));
        }
        for (l, (z, a)) in zs.iter().zip(&self.args).enumerate() {
            if z.shape() != (a.rows, a.cols) || z.dim() != a.dim {
                return Err(NcError::ShapeMismatch(format!(
                    "argument {} is {}x{} of dimension {}, expected {}x{} of dimension {}",
                    l + 1,
                    z.rows(),
                    z.cols(),
                    z.dim(),
                    a.rows,
                    a.cols,
                    a.dim
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, zs: &[PointMatrix]) -> Result<ScalarMatrix> {
        self.check_args(zs)?;
        // nonzero entries of each argument as (basis index, value)
        let supports: Vec<Vec<(usize, &crate::Scalar)>> = zs
            .iter()
            .zip(&self.args)
            .map(|(z, a)| {
                let mut s = Vec::new();
                for comp in 0..a.dim {
                    let m = z.component(comp);
                    for r in 0..a.rows {
                        for c in 0..a.cols {
                            let v = m.get(r, c);
                            if !v.is_zero() {
                                s.push((a.encode(comp, r, c), v));
                            }
                        }
                    }
                }
                s
            })
            .collect();
        let mut out = ScalarMatrix::zeros(self.out_rows, self.out_cols);
        let radices: Vec<usize> = supports.iter().map(Vec::len).collect();
        for_each_tuple(&radices, |pick| {
            let mut weight = crate::exactalg::scalar(1);
            let mut flat = 0;
            for (l, &p) in pick.iter().enumerate() {
                let (b, v) = supports[l][p];
                weight *= v;
                flat = flat * self.args[l].basis_len() + b;
            }
            out.add_assign_scaled(&self.coeffs[flat], &weight);
            Ok(())
        })?;
        Ok(out)
    }

    fn check_same_shape(&self, other: &MultiLinearMap) {
        assert!(
            self.args == other.args && self.out_shape() == other.out_shape(),
            "multilinear maps of different shapes"
        );
    }

    pub fn add(&self, other: &MultiLinearMap) -> MultiLinearMap {
        self.check_same_shape(other);
        MultiLinearMap {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &MultiLinearMap) -> MultiLinearMap {
        self.check_same_shape(other);
        MultiLinearMap {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            ..self.clone()
        }
    }

    pub fn neg(&self) -> MultiLinearMap {
        self.map_output(|m| -m)
    }

    pub fn scale(&self, c: &crate::Scalar) -> MultiLinearMap {
        self.map_output(|m| m.scale(c))
    }

    /// Applies `h` to every coefficient; `h` must be linear.
    pub fn map_output(&self, h: impl Fn(&ScalarMatrix) -> ScalarMatrix) -> MultiLinearMap {
        let coeffs: Vec<ScalarMatrix> = self.coeffs.iter().map(h).collect();
        let (out_rows, out_cols) = coeffs
            .first()
            .map_or((self.out_rows, self.out_cols), |m| m.shape());
        MultiLinearMap {
            args: self.args.clone(),
            out_rows,
            out_cols,
            coeffs,
        }
    }

    /// `Z |-> K(..., h(Z^l), ...)` for a linear `h`; `l` is 1-based.
    pub fn precompose(
        &self,
        l: usize,
        h: impl Fn(&PointMatrix) -> PointMatrix,
    ) -> Result<MultiLinearMap> {
        MultiLinearMap::from_fn(self.args.clone(), self.out_rows, self.out_cols, |zs| {
            let mut zs = zs.to_vec();
            zs[l - 1] = h(&zs[l - 1]);
            self.eval(&zs)
        })
    }

    /// Size `s_j` of slot `j` for a map in the slot bimodule.
    pub fn slot_size(&self, j: usize) -> usize {
        if j == 0 {
            self.out_rows
        } else {
            self.args[j - 1].cols
        }
    }

    fn check_slot_matrix(&self, j: usize, s: &ScalarMatrix) -> Result<()> {
        let k = self.arity();
        if j > k {
            return Err(NcError::SlotOutOfRange { slot: j, order: k });
        }
        let n = self.slot_size(j);
        if s.shape() != (n, n) {
            return Err(NcError::ShapeMismatch(format!(
                "slot {j} acts by {n}x{n} matrices, got {}x{}",
                s.rows(),
                s.cols()
            )));
        }
        Ok(())
    }

    /// Left action `S . K` in slot `j`: multiply the output on the left when
    /// `j = 0`, otherwise replace `Z^j` by `Z^j S`.
    pub fn left_action(&self, j: usize, s: &ScalarMatrix) -> Result<MultiLinearMap> {
        self.check_slot_matrix(j, s)?;
        if j == 0 {
            Ok(self.map_output(|m| s * m))
        } else {
            self.precompose(j, |z| z.right_mul(s))
        }
    }

    /// Right action `K . S` in slot `j`: multiply the output on the right when
    /// `j = k`, otherwise replace `Z^{j+1}` by `S Z^{j+1}`.
    pub fn right_action(&self, j: usize, s: &ScalarMatrix) -> Result<MultiLinearMap> {
        self.check_slot_matrix(j, s)?;
        if j == self.arity() {
            Ok(self.map_output(|m| m * s))
        } else {
            self.precompose(j + 1, |z| z.left_mul(s))
        }
    }

    /// `S . K - K . S` in slot `j`.
    pub fn bracket(&self, j: usize, s: &ScalarMatrix) -> Result<MultiLinearMap> {
        Ok(self.left_action(j, s)?.sub(&self.right_action(j, s)?))
    }

    /// Block amplification: with `Z^l` split into `s_{l-1} x s_l` blocks,
    /// output block `(i_0, i_k)` collects `K(Z^1_{i_0 i_1}, ..., Z^k_{i_{k-1} i_k})`.
    /// For arity 0 this is `I_{m_0} (x) K`.
    pub fn amplify_eval(&self, zs: &[PointMatrix], ms: &[usize]) -> Result<ScalarMatrix> {
        let k = self.arity();
        if zs.len() != k || ms.len() != k + 1 {
            return Err(NcError::ShapeMismatch(format!(
                "amplifying a {k}-linear map needs {k} arguments and {} multiplicities",
                k + 1
            )));
        }
        let (p, q) = (self.out_rows, self.out_cols);
        if k == 0 {
            return Ok(self.coeffs[0].kron_identity(ms[0]));
        }
        for (l, (z, a)) in zs.iter().zip(&self.args).enumerate() {
            if z.shape() != (a.rows * ms[l], a.cols * ms[l + 1]) || z.dim() != a.dim {
                return Err(NcError::ShapeMismatch(format!(
                    "argument {} does not tile into {}x{} blocks",
                    l + 1,
                    a.rows,
                    a.cols
                )));
            }
        }
        let mut out = ScalarMatrix::zeros(p * ms[0], q * ms[k]);
        for_each_tuple(ms, |idx| {
            let blocks: Vec<PointMatrix> = (0..k)
                .map(|l| {
                    let a = &self.args[l];
                    zs[l].block(idx[l] * a.rows, idx[l + 1] * a.cols, a.rows, a.cols)
                })
                .collect();
            if blocks.iter().any(PointMatrix::is_zero) {
                return Ok(());
            }
            let v = self.eval(&blocks)?;
            let (r0, c0) = (idx[0] * p, idx[k] * q);
            let cur = out.block(r0, c0, p, q);
            out.set_block(r0, c0, &(&cur + &v));
            Ok(())
        })?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar;

    fn pt(rows: &[&[i64]]) -> PointMatrix {
        PointMatrix::from_matrix(ScalarMatrix::from_ints(rows))
    }

    fn sandwich() -> MultiLinearMap {
        // (Z1, Z2) |-> A Z1 B Z2 with Z1: 2x1, Z2: 1x2
        let a = ScalarMatrix::from_ints(&[[1, 2], [0, 1]]);
        let b = ScalarMatrix::from_ints(&[[3]]);
        MultiLinearMap::from_fn(
            vec![ArgShape::new(2, 1, 1), ArgShape::new(1, 2, 1)],
            2,
            2,
            |zs| Ok(&(&(&a * zs[0].component(0)) * &b) * zs[1].component(0)),
        )
        .unwrap()
    }

    #[test]
    fn probe_then_eval_reproduces_function() {
        let k = sandwich();
        let z1 = pt(&[&[2], &[-1]]);
        let z2 = pt(&[&[1, 4]]);
        let a = ScalarMatrix::from_ints(&[[1, 2], [0, 1]]);
        let direct = &(&a * z1.component(0)).scale(&scalar(3)) * z2.component(0);
        assert_eq!(k.eval(&[z1, z2]).unwrap(), direct);
    }

    #[test]
    fn arity_zero_actions_are_matrix_products() {
        let m = ScalarMatrix::from_ints(&[[1, 2], [3, 4]]);
        let s = ScalarMatrix::from_ints(&[[0, 1], [0, 0]]);
        let k = MultiLinearMap::constant(m.clone());
        assert_eq!(
            k.bracket(0, &s).unwrap().as_matrix().unwrap(),
            &s.commutator(&m)
        );
    }

    #[test]
    fn middle_slot_actions_move_into_arguments() {
        let k = sandwich();
        let s = ScalarMatrix::from_ints(&[[5]]);
        let z1 = pt(&[&[1], &[1]]);
        let z2 = pt(&[&[2, 0]]);
        let left = k
            .left_action(1, &s)
            .unwrap()
            .eval(&[z1.clone(), z2.clone()])
            .unwrap();
        let right = k
            .right_action(1, &s)
            .unwrap()
            .eval(&[z1.clone(), z2.clone()])
            .unwrap();
        let plain = k.eval(&[z1, z2]).unwrap();
        assert_eq!(left, plain.scale(&scalar(5)));
        assert_eq!(right, left);
    }

    #[test]
    fn amplification_of_constant_is_kronecker() {
        let m = ScalarMatrix::from_ints(&[[1, 2], [3, 4]]);
        let k = MultiLinearMap::constant(m.clone());
        assert_eq!(k.amplify_eval(&[], &[3]).unwrap(), m.kron_identity(3));
    }

    #[test]
    fn amplification_sums_over_blocks() {
        // K(Z) = Z on 1x1 arguments: amplification is the identity on every size
        let k = MultiLinearMap::from_fn(vec![ArgShape::new(1, 1, 1)], 1, 1, |zs| {
            Ok(zs[0].component(0).clone())
        })
        .unwrap();
        let z = pt(&[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(
            k.amplify_eval(std::slice::from_ref(&z), &[2, 3]).unwrap(),
            z.component(0).clone()
        );
    }

    #[test]
    fn eval_rejects_bad_shapes() {
        let k = sandwich();
        assert!(k.eval(&[pt(&[&[1]])]).is_err());
        assert!(k.eval(&[pt(&[&[1]]), pt(&[&[1, 2]])]).is_err());
    }
}
