//! Exact rational scalars and dense matrices over `Q` and `Q^d`.
//!
//! Every construction downstream (block upper triangular evaluation, identity
//! amplification, commutators with matrix units) reduces to the handful of
//! operations here. Arithmetic never rounds.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{NcError, Result};

/// Exact rational number. `BigRational` keeps numerator and denominator
/// reduced with a positive denominator.
pub type Scalar = BigRational;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// `num / den`; panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p"`, `"p/q"` or `"-p/q"`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let text = text.trim();
    let bad = || NcError::Parse(format!("invalid rational {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(NcError::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// Canonical `"p/q"` text; integers keep an explicit `/1`.
pub fn format_scalar(x: &Scalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Dense row-major matrix of scalars.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ScalarMatrix {
            rows,
            cols,
            entries: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Scalar::one();
        }
        m
    }

    pub fn scalar_identity(n: usize, c: &Scalar) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = c.clone();
        }
        m
    }

    /// Matrix unit with zero-based indices; panics when out of range.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        assert!(i < rows && j < cols, "matrix unit index out of range");
        let mut m = Self::zeros(rows, cols);
        m.entries[i * cols + j] = Scalar::one();
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(NcError::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(ScalarMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(NcError::ShapeMismatch("ragged matrix rows".into()));
        }
        Ok(ScalarMatrix {
            rows: nrows,
            cols: ncols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer matrix literal; panics on ragged input.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| scalar(x)).collect())
                .collect(),
        )
        .expect("ragged integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        self.entries
            .chunks(self.cols.max(1))
            .map(<[_]>::to_vec)
            .take(self.rows)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        ScalarMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &ScalarMatrix, c: &Scalar) {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in accumulate");
        if c.is_zero() {
            return;
        }
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            if !b.is_zero() {
                *a += b * c;
            }
        }
    }

    pub fn try_mul(&self, other: &ScalarMatrix) -> Result<ScalarMatrix> {
        if self.cols != other.rows {
            return Err(NcError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ScalarMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self.entries[i * self.cols + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.entries[l * other.cols + j];
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &ScalarMatrix) -> ScalarMatrix {
        &(self * other) - &(other * self)
    }

    pub fn transpose(&self) -> ScalarMatrix {
        let mut out = ScalarMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    /// `I_m (x) self`: `m` copies of `self` down the block diagonal.
    pub fn kron_identity(&self, m: usize) -> ScalarMatrix {
        let mut out = ScalarMatrix::zeros(m * self.rows, m * self.cols);
        for b in 0..m {
            out.set_block(b * self.rows, b * self.cols, self);
        }
        out
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> ScalarMatrix {
        assert!(
            r0 + rows <= self.rows && c0 + cols <= self.cols,
            "block out of range"
        );
        let mut out = ScalarMatrix::zeros(rows, cols);
        for i in 0..rows {
            let src = (r0 + i) * self.cols + c0;
            out.entries[i * cols..(i + 1) * cols].clone_from_slice(&self.entries[src..src + cols]);
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &ScalarMatrix) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "block out of range"
        );
        for i in 0..block.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.entries[dst..dst + block.cols]
                .clone_from_slice(&block.entries[i * block.cols..(i + 1) * block.cols]);
        }
    }

    pub fn direct_sum(&self, other: &ScalarMatrix) -> ScalarMatrix {
        let mut out = ScalarMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    pub fn hstack(&self, other: &ScalarMatrix) -> ScalarMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut out = ScalarMatrix::zeros(self.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, other);
        out
    }

    pub fn vstack(&self, other: &ScalarMatrix) -> ScalarMatrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut out = ScalarMatrix::zeros(self.rows + other.rows, self.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, 0, other);
        out
    }

    /// Gauss-Jordan inverse; `None` when singular or not square.
    pub fn inverse(&self) -> Option<ScalarMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = ScalarMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a.get(col, col).recip();
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r != col && !a.get(r, col).is_zero() {
                    let factor = -a.get(r, col).clone();
                    a.add_row_multiple(r, col, &factor);
                    inv.add_row_multiple(r, col, &factor);
                }
            }
        }
        Some(inv)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn scale_row(&mut self, r: usize, c: &Scalar) {
        for j in 0..self.cols {
            let x = &mut self.entries[r * self.cols + j];
            *x = &*x * c;
        }
    }

    /// `row[target] += factor * row[source]`
    pub(crate) fn add_row_multiple(&mut self, target: usize, source: usize, factor: &Scalar) {
        for j in 0..self.cols {
            let add = &self.entries[source * self.cols + j] * factor;
            self.entries[target * self.cols + j] += add;
        }
    }
}

impl fmt::Display for ScalarMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Add for &ScalarMatrix {
    type Output = ScalarMatrix;

    fn add(self, rhs: &ScalarMatrix) -> ScalarMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in addition");
        ScalarMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ScalarMatrix {
    type Output = ScalarMatrix;

    fn sub(self, rhs: &ScalarMatrix) -> ScalarMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in subtraction");
        ScalarMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ScalarMatrix {
    type Output = ScalarMatrix;

    fn mul(self, rhs: &ScalarMatrix) -> ScalarMatrix {
        self.try_mul(rhs).expect("shape mismatch in product")
    }
}

impl Neg for &ScalarMatrix {
    type Output = ScalarMatrix;

    fn neg(self) -> ScalarMatrix {
        ScalarMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| -x).collect(),
        }
    }
}

/// The matrix unit `E_ij` of size `n`, with 1-based indices.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> Result<ScalarMatrix> {
    if i == 0 || j == 0 || i > n || j > n {
        return Err(NcError::IndexOutOfRange { i, j, n });
    }
    Ok(ScalarMatrix::unit(n, n, i - 1, j - 1))
}

/// A point of `(Q^d)^{rows x cols}`, stored as `d` component matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointMatrix {
    components: Vec<ScalarMatrix>,
}

impl PointMatrix {
    pub fn new(components: Vec<ScalarMatrix>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| NcError::DimMismatch("a point needs at least one component".into()))?;
        if components.iter().any(|c| c.shape() != first.shape()) {
            return Err(NcError::ShapeMismatch(
                "point components must share one shape".into(),
            ));
        }
        Ok(PointMatrix { components })
    }

    pub fn from_matrix(m: ScalarMatrix) -> Self {
        PointMatrix {
            components: vec![m],
        }
    }

    pub fn zeros(dim: usize, rows: usize, cols: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        PointMatrix {
            components: vec![ScalarMatrix::zeros(rows, cols); dim],
        }
    }

    /// The point whose `alpha`-th component (zero-based) is `m` and all others vanish.
    pub fn directional(dim: usize, alpha: usize, m: &ScalarMatrix) -> Self {
        let mut p = Self::zeros(dim, m.rows(), m.cols());
        p.components[alpha] = m.clone();
        p
    }

    /// Point with entry `(r, c)` of component `comp` equal to one (zero-based).
    pub fn unit(dim: usize, rows: usize, cols: usize, comp: usize, r: usize, c: usize) -> Self {
        let mut p = Self::zeros(dim, rows, cols);
        p.components[comp].set(r, c, Scalar::one());
        p
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn rows(&self) -> usize {
        self.components[0].rows()
    }

    pub fn cols(&self) -> usize {
        self.components[0].cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.components[0].shape()
    }

    pub fn is_square(&self) -> bool {
        self.components[0].is_square()
    }

    pub fn components(&self) -> &[ScalarMatrix] {
        &self.components
    }

    pub fn component(&self, alpha: usize) -> &ScalarMatrix {
        &self.components[alpha]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ScalarMatrix::is_zero)
    }

    pub fn map(&self, f: impl Fn(&ScalarMatrix) -> ScalarMatrix) -> PointMatrix {
        PointMatrix {
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn zip_map(
        &self,
        other: &PointMatrix,
        f: impl Fn(&ScalarMatrix, &ScalarMatrix) -> ScalarMatrix,
    ) -> PointMatrix {
        assert_eq!(self.dim(), other.dim(), "point dimension mismatch");
        PointMatrix {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> PointMatrix {
        self.map(|m| m.scale(c))
    }

    /// `S X`, componentwise.
    pub fn left_mul(&self, s: &ScalarMatrix) -> PointMatrix {
        self.map(|m| s * m)
    }

    /// `X S`, componentwise.
    pub fn right_mul(&self, s: &ScalarMatrix) -> PointMatrix {
        self.map(|m| m * s)
    }

    /// `S X - X S`, componentwise.
    pub fn commutator_with(&self, s: &ScalarMatrix) -> PointMatrix {
        self.map(|m| s.commutator(m))
    }

    pub fn kron_identity(&self, m: usize) -> PointMatrix {
        self.map(|c| c.kron_identity(m))
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> PointMatrix {
        self.map(|m| m.block(r0, c0, rows, cols))
    }

    pub fn direct_sum(&self, other: &PointMatrix) -> PointMatrix {
        self.zip_map(other, ScalarMatrix::direct_sum)
    }

    pub fn hstack(&self, other: &PointMatrix) -> PointMatrix {
        self.zip_map(other, ScalarMatrix::hstack)
    }

    pub fn vstack(&self, other: &PointMatrix) -> PointMatrix {
        self.zip_map(other, ScalarMatrix::vstack)
    }
}

impl Add for &PointMatrix {
    type Output = PointMatrix;

    fn add(self, rhs: &PointMatrix) -> PointMatrix {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &PointMatrix {
    type Output = PointMatrix;

    fn sub(self, rhs: &PointMatrix) -> PointMatrix {
        self.zip_map(rhs, |a, b| a - b)
    }
}

/// `I_m (x) Y`, componentwise.
pub fn kron_identity(m: usize, y: &PointMatrix) -> PointMatrix {
    y.kron_identity(m)
}

/// The block upper triangular point `[[X, Z], [0, W]]`.
pub fn block_upper(x: &PointMatrix, z: &PointMatrix, w: &PointMatrix) -> Result<PointMatrix> {
    if !x.is_square() || !w.is_square() {
        return Err(NcError::ShapeMismatch(
            "diagonal blocks of a block upper triangular point must be square".into(),
        ));
    }
    if z.shape() != (x.rows(), w.rows()) {
        return Err(NcError::ShapeMismatch(format!(
            "off-diagonal block is {}x{}, expected {}x{}",
            z.rows(),
            z.cols(),
            x.rows(),
            w.rows()
        )));
    }
    if x.dim() != z.dim() || x.dim() != w.dim() {
        return Err(NcError::DimMismatch(format!(
            "block dimensions {}, {}, {} differ",
            x.dim(),
            z.dim(),
            w.dim()
        )));
    }
    let (n, m) = (x.rows(), w.rows());
    let components = (0..x.dim())
        .map(|a| {
            let mut out = ScalarMatrix::zeros(n + m, n + m);
            out.set_block(0, 0, x.component(a));
            out.set_block(0, n, z.component(a));
            out.set_block(n, n, w.component(a));
            out
        })
        .collect();
    Ok(PointMatrix { components })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_unit_examples() {
        assert_eq!(
            matrix_unit(2, 1, 2).unwrap(),
            ScalarMatrix::from_ints(&[[0, 1], [0, 0]])
        );
        assert_eq!(
            matrix_unit(1, 1, 1).unwrap(),
            ScalarMatrix::from_ints(&[[1]])
        );
        let e = matrix_unit(3, 2, 2).unwrap();
        assert_eq!(
            e,
            ScalarMatrix::from_ints(&[[0, 0, 0], [0, 1, 0], [0, 0, 0]])
        );
    }

    #[test]
    fn matrix_unit_rejects_out_of_range() {
        assert_eq!(
            matrix_unit(2, 3, 1),
            Err(NcError::IndexOutOfRange { i: 3, j: 1, n: 2 })
        );
        assert!(matrix_unit(2, 0, 1).is_err());
    }

    #[test]
    fn kron_identity_examples() {
        let y = PointMatrix::from_matrix(ScalarMatrix::from_ints(&[[1, 2], [3, 4]]));
        assert_eq!(kron_identity(1, &y), y);
        let three = PointMatrix::from_matrix(ScalarMatrix::from_ints(&[[3]]));
        assert_eq!(
            kron_identity(2, &three).component(0),
            &ScalarMatrix::from_ints(&[[3, 0], [0, 3]])
        );
        let amp = kron_identity(2, &y);
        assert_eq!(
            amp.component(0),
            &ScalarMatrix::from_ints(&[[1, 2, 0, 0], [3, 4, 0, 0], [0, 0, 1, 2], [0, 0, 3, 4]])
        );
        for p in 0..2 {
            assert_eq!(amp.block(2 * p, 2 * p, 2, 2), y);
        }
    }

    #[test]
    fn block_upper_examples() {
        let p = |v: i64| PointMatrix::from_matrix(ScalarMatrix::from_ints(&[[v]]));
        let b = block_upper(&p(2), &p(1), &p(3)).unwrap();
        assert_eq!(b.component(0), &ScalarMatrix::from_ints(&[[2, 1], [0, 3]]));

        let x = PointMatrix::from_matrix(ScalarMatrix::from_ints(&[[1, 2], [3, 4]]));
        let w = p(5);
        let zero = PointMatrix::zeros(1, 2, 1);
        assert_eq!(block_upper(&x, &zero, &w).unwrap(), x.direct_sum(&w));

        let x2 = PointMatrix::new(vec![
            ScalarMatrix::from_ints(&[[1]]),
            ScalarMatrix::from_ints(&[[7]]),
        ])
        .unwrap();
        let z2 = PointMatrix::new(vec![
            ScalarMatrix::from_ints(&[[2]]),
            ScalarMatrix::from_ints(&[[8]]),
        ])
        .unwrap();
        let b2 = block_upper(&x2, &z2, &x2).unwrap();
        assert_eq!(b2.component(1), &ScalarMatrix::from_ints(&[[7, 8], [0, 7]]));
    }

    #[test]
    fn block_upper_shape_errors() {
        let a = PointMatrix::from_matrix(ScalarMatrix::from_ints(&[[1, 2]]));
        let one = PointMatrix::from_matrix(ScalarMatrix::from_ints(&[[1]]));
        assert!(matches!(
            block_upper(&a, &one, &one),
            Err(NcError::ShapeMismatch(_))
        ));
        let two_dim = PointMatrix::zeros(2, 1, 1);
        assert!(matches!(
            block_upper(&one, &two_dim, &one),
            Err(NcError::DimMismatch(_))
        ));
    }

    #[test]
    fn block_upper_products_mix_off_diagonal() {
        let m = |rows: &[[i64; 2]]| ScalarMatrix::from_ints(rows);
        let (x, z, w) = (
            m(&[[1, 2], [0, 1]]),
            m(&[[3, 0], [1, 1]]),
            m(&[[2, 1], [1, 0]]),
        );
        let (x2, z2, w2) = (
            m(&[[0, 1], [1, 1]]),
            m(&[[1, 1], [2, 0]]),
            m(&[[1, 0], [3, 1]]),
        );
        let pt = |a: &ScalarMatrix| PointMatrix::from_matrix(a.clone());
        let b1 = block_upper(&pt(&x), &pt(&z), &pt(&w)).unwrap();
        let b2 = block_upper(&pt(&x2), &pt(&z2), &pt(&w2)).unwrap();
        let prod = b1.component(0) * b2.component(0);
        let mixed = &(&x * &z2) + &(&z * &w2);
        assert_eq!(prod.block(0, 2, 2, 2), mixed);
        assert!(prod.block(2, 0, 2, 2).is_zero());
    }

    #[test]
    fn scalar_text_round_trip() {
        assert_eq!(parse_scalar("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(format_scalar(&ratio(-3, 2)), "-3/2");
        assert_eq!(format_scalar(&scalar(4)), "4/1");
        assert_eq!(parse_scalar(" 7 ").unwrap(), scalar(7));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("abc").is_err());
    }

    #[test]
    fn inverse_of_small_matrix() {
        let a = ScalarMatrix::from_ints(&[[2, 1], [1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, ScalarMatrix::identity(2));
        assert!(ScalarMatrix::from_ints(&[[1, 2], [2, 4]])
            .inverse()
            .is_none());
    }
}
