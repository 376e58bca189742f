//! Order-k nc polynomials
//! `sum p_(w,v) (x^0)^{w_0} z^1_{v_1} (x^1)^{w_1} ... z^k_{v_k} (x^k)^{w_k}`
//! with rational coefficients, stored in canonical form.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{NcError, Result};
use crate::exactalg::{PointMatrix, Scalar, ScalarMatrix};

/// Word in a free monoid; letters are 1-based generator indices.
pub type Word = Vec<u32>;

/// The exponent data of a monomial: `k + 1` x-words and `k` z-letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialKey {
    pub xwords: Vec<Word>,
    pub zletters: Vec<u32>,
}

impl MonomialKey {
    pub fn new(xwords: Vec<Word>, zletters: Vec<u32>) -> Self {
        MonomialKey { xwords, zletters }
    }

    pub fn order(&self) -> usize {
        self.zletters.len()
    }

    pub fn degree(&self) -> usize {
        self.xwords.iter().map(Vec::len).sum::<usize>() + self.zletters.len()
    }
}

impl Ord for MonomialKey {
    // total degree first, then w_0, v_1, w_1, ... lexicographically
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| {
                let slots = self.xwords.len().min(other.xwords.len());
                for j in 0..slots {
                    let c = self.xwords[j].cmp(&other.xwords[j]);
                    if c != Ordering::Equal {
                        return c;
                    }
                    if let (Some(a), Some(b)) = (self.zletters.get(j), other.zletters.get(j)) {
                        let c = a.cmp(b);
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                }
                Ordering::Equal
            })
            .then_with(|| self.xwords.cmp(&other.xwords))
            .then_with(|| self.zletters.cmp(&other.zletters))
    }
}

impl PartialOrd for MonomialKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: Scalar,
    pub key: MonomialKey,
}

impl Monomial {
    pub fn new(coeff: Scalar, xwords: Vec<Word>, zletters: Vec<u32>) -> Self {
        Monomial {
            coeff,
            key: MonomialKey::new(xwords, zletters),
        }
    }
}

/// Canonical order-k nc polynomial: distinct keys, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NcPolynomial {
    xdims: Vec<usize>,
    zdims: Vec<usize>,
    terms: BTreeMap<MonomialKey, Scalar>,
}

impl NcPolynomial {
    /// The zero polynomial of order `xdims.len() - 1`.
    pub fn zero(xdims: Vec<usize>, zdims: Vec<usize>) -> Result<Self> {
        if xdims.is_empty() {
            return Err(NcError::ShapeMismatch(
                "at least one x-slot is required".into(),
            ));
        }
        if zdims.len() + 1 != xdims.len() {
            return Err(NcError::ShapeMismatch(format!(
                "{} x-slots need {} z-slots, got {}",
                xdims.len(),
                xdims.len() - 1,
                zdims.len()
            )));
        }
        if xdims.iter().chain(&zdims).any(|&d| d == 0) {
            return Err(NcError::DimMismatch(
                "slot dimensions must be positive".into(),
            ));
        }
        Ok(NcPolynomial {
            xdims,
            zdims,
            terms: BTreeMap::new(),
        })
    }

    /// Builds the canonical polynomial from a term list: duplicate keys merge,
    /// zero coefficients drop.
    pub fn from_terms(
        xdims: Vec<usize>,
        zdims: Vec<usize>,
        terms: impl IntoIterator<Item = Monomial>,
    ) -> Result<Self> {
        let mut p = Self::zero(xdims, zdims)?;
        for m in terms {
            p.add_term(m.key, m.coeff)?;
        }
        Ok(p)
    }

    /// Order-0 polynomial in `d` variables from `(coefficient, word)` pairs.
    pub fn order0(d: usize, terms: &[(i64, &[u32])]) -> Result<Self> {
        Self::from_terms(
            vec![d],
            vec![],
            terms
                .iter()
                .map(|(c, w)| Monomial::new(crate::exactalg::scalar(*c), vec![w.to_vec()], vec![])),
        )
    }

    pub fn constant(xdims: Vec<usize>, zdims: Vec<usize>, c: Scalar) -> Result<Self> {
        let k = zdims.len();
        let mut p = Self::zero(xdims, zdims)?;
        if k == 0 {
            p.add_term(MonomialKey::new(vec![vec![]], vec![]), c)?;
        }
        Ok(p)
    }

    pub fn order(&self) -> usize {
        self.zdims.len()
    }

    pub fn xdims(&self) -> &[usize] {
        &self.xdims
    }

    pub fn zdims(&self) -> &[usize] {
        &self.zdims
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in serialization order.
    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &MonomialKey) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(MonomialKey::degree)
            .max()
            .unwrap_or(0)
    }

    fn check_key(&self, key: &MonomialKey) -> Result<()> {
        if key.xwords.len() != self.xdims.len() || key.zletters.len() != self.zdims.len() {
            return Err(NcError::ShapeMismatch(format!(
                "monomial with {} words and {} z-letters in an order-{} polynomial",
                key.xwords.len(),
                key.zletters.len(),
                self.order()
            )));
        }
        for (j, w) in key.xwords.iter().enumerate() {
            if let Some(&l) = w.iter().find(|&&l| l == 0 || l as usize > self.xdims[j]) {
                return Err(NcError::DimMismatch(format!(
                    "letter {l} outside 1..={} in x-slot {j}",
                    self.xdims[j]
                )));
            }
        }
        for (j, &l) in key.zletters.iter().enumerate() {
            if l == 0 || l as usize > self.zdims[j] {
                return Err(NcError::DimMismatch(format!(
                    "letter {l} outside 1..={} in z-slot {}",
                    self.zdims[j],
                    j + 1
                )));
            }
        }
        Ok(())
    }

    pub fn add_term(&mut self, key: MonomialKey, coeff: Scalar) -> Result<()> {
        self.check_key(&key)?;
        self.add_term_unchecked(key, coeff);
        Ok(())
    }

    pub(crate) fn add_term_unchecked(&mut self, key: MonomialKey, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_compatible(&self, other: &NcPolynomial) -> Result<()> {
        if self.order() != other.order() {
            return Err(NcError::OrderMismatch {
                expected: self.order(),
                found: other.order(),
            });
        }
        if self.xdims != other.xdims || self.zdims != other.zdims {
            return Err(NcError::DimMismatch(format!(
                "slot dimensions {:?}/{:?} vs {:?}/{:?}",
                self.xdims, self.zdims, other.xdims, other.zdims
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &NcPolynomial) -> Result<NcPolynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term_unchecked(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NcPolynomial) -> Result<NcPolynomial> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> NcPolynomial {
        let mut out = NcPolynomial {
            xdims: self.xdims.clone(),
            zdims: self.zdims.clone(),
            terms: BTreeMap::new(),
        };
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        }
        out
    }

    pub fn neg(&self) -> NcPolynomial {
        self.scale(&-Scalar::one())
    }

    /// The part of `self` annihilated by the slot-`j` difference operator:
    /// monomials whose word `w_j` is empty.
    pub fn kernel(&self, j: usize) -> NcPolynomial {
        self.filter(|k| k.xwords[j].is_empty())
    }

    pub fn without_kernel(&self, j: usize) -> NcPolynomial {
        self.filter(|k| !k.xwords[j].is_empty())
    }

    fn filter(&self, keep: impl Fn(&MonomialKey) -> bool) -> NcPolynomial {
        NcPolynomial {
            xdims: self.xdims.clone(),
            zdims: self.zdims.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Checks argument shapes and returns the sizes `n_0..n_k`.
    pub fn check_args(&self, xs: &[PointMatrix], zs: &[PointMatrix]) -> Result<Vec<usize>> {
        check_args(&self.xdims, &self.zdims, xs, zs)
    }

    pub fn eval(&self, xs: &[PointMatrix], zs: &[PointMatrix]) -> Result<ScalarMatrix> {
        let sizes = self.check_args(xs, zs)?;
        let k = self.order();
        let mut out = ScalarMatrix::zeros(sizes[0], sizes[k]);
        for (key, c) in &self.terms {
            let mut acc: Option<ScalarMatrix> = None;
            let mut push = |m: &ScalarMatrix| {
                acc = Some(match acc.take() {
                    None => m.clone(),
                    Some(a) => &a * m,
                });
            };
            for j in 0..=k {
                if j > 0 {
                    push(zs[j - 1].component(key.zletters[j - 1] as usize - 1));
                }
                for &l in &key.xwords[j] {
                    push(xs[j].component(l as usize - 1));
                }
            }
            match acc {
                Some(m) => out.add_assign_scaled(&m, c),
                None => out.add_assign_scaled(&ScalarMatrix::identity(sizes[0]), c),
            }
        }
        Ok(out)
    }
}

/// Validates `(X^0..X^k)(Z^1..Z^k)` against declared slot dimensions and
/// returns the sizes `n_0..n_k`.
pub fn check_args(
    xdims: &[usize],
    zdims: &[usize],
    xs: &[PointMatrix],
    zs: &[PointMatrix],
) -> Result<Vec<usize>> {
    let k = zdims.len();
    if xs.len() != k + 1 || zs.len() != k {
        return Err(NcError::ShapeMismatch(format!(
            "order {k} needs {} x-points and {k} z-points, got {} and {}",
            k + 1,
            xs.len(),
            zs.len()
        )));
    }
    let mut sizes = Vec::with_capacity(k + 1);
    for (j, x) in xs.iter().enumerate() {
        if !x.is_square() {
            return Err(NcError::ShapeMismatch(format!("x-point {j} is not square")));
        }
        if x.dim() != xdims[j] {
            return Err(NcError::DimMismatch(format!(
                "x-point {j} has dimension {}, expected {}",
                x.dim(),
                xdims[j]
            )));
        }
        sizes.push(x.rows());
    }
    for (j, z) in zs.iter().enumerate() {
        if z.shape() != (sizes[j], sizes[j + 1]) {
            return Err(NcError::ShapeMismatch(format!(
                "z-point {} is {}x{}, expected {}x{}",
                j + 1,
                z.rows(),
                z.cols(),
                sizes[j],
                sizes[j + 1]
            )));
        }
        if z.dim() != zdims[j] {
            return Err(NcError::DimMismatch(format!(
                "z-point {} has dimension {}, expected {}",
                j + 1,
                z.dim(),
                zdims[j]
            )));
        }
    }
    Ok(sizes)
}

/// Merges duplicate keys and drops zero terms.
pub fn canonicalize(p: &NcPolynomial) -> NcPolynomial {
    let mut out = NcPolynomial {
        xdims: p.xdims.clone(),
        zdims: p.zdims.clone(),
        terms: BTreeMap::new(),
    };
    for (k, c) in &p.terms {
        out.add_term_unchecked(k.clone(), c.clone());
    }
    out
}

impl fmt::Display for MonomialKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.order();
        let mut factors = Vec::new();
        for (j, w) in self.xwords.iter().enumerate() {
            if j > 0 {
                factors.push(format!("z{}_{}", j, self.zletters[j - 1]));
            }
            let slot = if k == 0 { String::new() } else { j.to_string() };
            factors.extend(w.iter().map(|l| format!("x{slot}_{l}")));
        }
        if factors.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", factors.join("*"))
        }
    }
}

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (key, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if key.degree() == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{key}")?;
            } else {
                write!(f, "{a}*{key}")?;
            }
        }
        Ok(())
    }
}
