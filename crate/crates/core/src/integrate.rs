//! Antiderivatives of compatible families `F_0..F_k`.
//!
//! Numeric reconstruction goes through the derivation tables at base points
//! `Y^0..Y^k`; the polynomial route fuses split words back together.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::derivations::{derivation_table_order0, g_combine, gj_assemble, inner_solve, jd_table};
use crate::diffcalc::{delta_dims, delta_eval, delta_sym, NcFn, NcFunction};
use crate::error::{NcError, Result};
use crate::exactalg::{PointMatrix, Scalar, ScalarMatrix};
use crate::multilinear::{ArgShape, MultiLinearMap};
use crate::ncpoly::{check_args, MonomialKey, NcPolynomial};
use crate::report::CheckReport;
use crate::testkit::Gen;

/// Internal sample budget used to certify integrability of black-box data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    pub seed: u64,
    /// Samples per slot pair built from amplified base points.
    pub amplified: usize,
    /// Samples per slot pair built from random points.
    pub random: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 0x0dd5_eed5,
            amplified: 2,
            random: 3,
        }
    }
}

/// Arguments of the order-(k+2) functions `iΔF_j` and `(j+1)ΔF_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegrabilitySample {
    pub i: usize,
    pub j: usize,
    pub xs: Vec<PointMatrix>,
    pub zs: Vec<PointMatrix>,
}

/// Arguments of the order-(k+1) function `jΔf`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSample {
    pub j: usize,
    pub xs: Vec<PointMatrix>,
    pub zs: Vec<PointMatrix>,
}

/// Slot dimensions of an antiderivative of `F_0..F_k`, after checking that
/// every `F_j` has the shape of a `jΔ` image.
pub fn antiderivative_dims(fs: &[NcFn]) -> Result<(Vec<usize>, Vec<usize>)> {
    let f0 = fs
        .first()
        .ok_or_else(|| NcError::ShapeMismatch("at least one F is required".into()))?;
    let k = fs.len() - 1;
    if f0.order() != k + 1 {
        return Err(NcError::OrderMismatch {
            expected: k + 1,
            found: f0.order(),
        });
    }
    let xdims = f0.xdims()[1..].to_vec();
    let zdims = f0.zdims()[1..].to_vec();
    for (j, f) in fs.iter().enumerate() {
        if f.order() != k + 1 {
            return Err(NcError::OrderMismatch {
                expected: k + 1,
                found: f.order(),
            });
        }
        let (nx, nz) = delta_dims(&xdims, &zdims, j);
        if f.xdims() != nx.as_slice() || f.zdims() != nz.as_slice() {
            return Err(NcError::DimMismatch(format!(
                "F_{j} has dimensions {:?}/{:?}, expected {nx:?}/{nz:?}",
                f.xdims(),
                f.zdims()
            )));
        }
    }
    Ok((xdims, zdims))
}

/// Origins in `0..=k` of the x-slots of `iΔ jΔ`-type functions.
fn pair_origins(k: usize, i: usize, j: usize) -> Vec<usize> {
    let mut o: Vec<usize> = (0..=k).collect();
    o.insert(j, j);
    o.insert(i, i);
    o
}

/// Random z-points chaining the given x sizes.
fn random_directions(gen: &mut Gen, zdims: &[usize], sizes: &[usize]) -> Vec<PointMatrix> {
    zdims
        .iter()
        .enumerate()
        .map(|(l, &d)| gen.point(d, sizes[l], sizes[l + 1]))
        .collect()
}

/// Samples around the base points (amplified `I_m (x) Y`) and at random points
/// of size at most 3, for every pair `i <= j`.
pub fn integrability_samples(
    fs: &[NcFn],
    base: Option<&[PointMatrix]>,
    cfg: &SampleConfig,
) -> Result<Vec<IntegrabilitySample>> {
    let (xdims, zdims) = antiderivative_dims(fs)?;
    let k = xdims.len() - 1;
    let mut gen = Gen::from_seed(cfg.seed);
    let mut out = Vec::new();
    for j in 0..=k {
        for i in 0..=j {
            let (x1, z1) = delta_dims(&xdims, &zdims, j);
            let (x2, z2) = delta_dims(&x1, &z1, i);
            let origins = pair_origins(k, i, j);
            if let Some(base) = base {
                for _ in 0..cfg.amplified {
                    let ms: Vec<usize> = origins.iter().map(|_| gen.index(1, 2)).collect();
                    let xs: Vec<PointMatrix> = origins
                        .iter()
                        .zip(&ms)
                        .map(|(&o, &m)| base[o].kron_identity(m))
                        .collect();
                    let sizes: Vec<usize> = xs.iter().map(PointMatrix::rows).collect();
                    let zs = random_directions(&mut gen, &z2, &sizes);
                    out.push(IntegrabilitySample { i, j, xs, zs });
                }
            }
            for _ in 0..cfg.random {
                let sizes: Vec<usize> = origins
                    .iter()
                    .map(|&o| {
                        let s = base.map_or(1, |b| b[o].rows());
                        gen.index(1, (3 * s).min(3))
                    })
                    .collect();
                let xs = x2
                    .iter()
                    .zip(&sizes)
                    .map(|(&d, &n)| gen.point(d, n, n))
                    .collect();
                let zs = random_directions(&mut gen, &z2, &sizes);
                out.push(IntegrabilitySample { i, j, xs, zs });
            }
        }
    }
    Ok(out)
}

/// Checks `iΔF_j = (j+1)ΔF_i` for `0 <= i <= j <= k` at every sample. When all
/// `F_j` are polynomials the identity is also checked symbolically, and a
/// passing report is then marked global.
pub fn check_integrability(fs: &[NcFn], samples: &[IntegrabilitySample]) -> Result<CheckReport> {
    let (xdims, _) = antiderivative_dims(fs)?;
    let k = xdims.len() - 1;
    let name = "integrability";
    let mut cases = 0;
    let polys: Option<Vec<&NcPolynomial>> = fs.iter().map(|f| f.as_polynomial()).collect();
    if let Some(polys) = &polys {
        for j in 0..=k {
            for i in 0..=j {
                cases += 1;
                let lhs = delta_sym(polys[j], i)?;
                let rhs = delta_sym(polys[i], j + 1)?;
                if lhs != rhs {
                    let diff = lhs.sub(&rhs)?;
                    return Ok(CheckReport::fail(
                        name,
                        cases,
                        format!("{i}Δ F_{j} - {}Δ F_{i} = {diff}", j + 1),
                    )
                    .global());
                }
            }
        }
    }
    for (n, s) in samples.iter().enumerate() {
        if s.i > s.j || s.j > k {
            return Err(NcError::SlotOutOfRange {
                slot: s.j,
                order: k,
            });
        }
        cases += 1;
        let lhs = delta_eval(fs[s.j].as_ref(), s.i, &s.xs, &s.zs)?;
        let rhs = delta_eval(fs[s.i].as_ref(), s.j + 1, &s.xs, &s.zs)?;
        if lhs != rhs {
            return Ok(CheckReport::fail(
                name,
                cases,
                format!(
                    "sample {n}: {}Δ F_{} = {lhs} but {}Δ F_{} = {rhs}",
                    s.i,
                    s.j,
                    s.j + 1,
                    s.i
                ),
            ));
        }
    }
    let report = CheckReport::pass(name, cases);
    Ok(if polys.is_some() {
        report.global()
    } else {
        report
    })
}

/// The order-1 case `0ΔF = 1ΔF`.
pub fn check_integrability_order1(
    f: &NcFn,
    samples: &[IntegrabilitySample],
) -> Result<CheckReport> {
    check_integrability(std::slice::from_ref(f), samples)
}

pub fn check_integrability_higher(
    fs: &[NcFn],
    samples: &[IntegrabilitySample],
) -> Result<CheckReport> {
    check_integrability(fs, samples)
}

/// An order-k nc function reconstructed from `F_0..F_k`, defined on sizes
/// `n_j = m_j s_j`:
///
/// `f(X)(Z) = G(Z) + sum_j F_j(I (x) Y^0, .., I (x) Y^j, X^j, .., X^k)(Z^1, .., Z^j, X^j - I (x) Y^j, Z^{j+1}, .., Z^k)`
///
/// where `G` is the block amplification of the base value.
#[derive(Clone)]
pub struct Antiderivative {
    xdims: Vec<usize>,
    zdims: Vec<usize>,
    base: Vec<PointMatrix>,
    base_value: MultiLinearMap,
    sources: Vec<NcFn>,
    integrability: CheckReport,
}

impl fmt::Debug for Antiderivative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Antiderivative")
            .field("xdims", &self.xdims)
            .field("zdims", &self.zdims)
            .field("base", &self.base)
            .field("base_value", &self.base_value)
            .finish_non_exhaustive()
    }
}

impl Antiderivative {
    pub fn base_points(&self) -> &[PointMatrix] {
        &self.base
    }

    pub fn base_sizes(&self) -> Vec<usize> {
        self.base.iter().map(PointMatrix::rows).collect()
    }

    /// `f_0 = f(Y)` for order 0, the k-linear `g = f(Y^0..Y^k)` otherwise.
    pub fn base_value(&self) -> &MultiLinearMap {
        &self.base_value
    }

    pub fn sources(&self) -> &[NcFn] {
        &self.sources
    }

    pub fn integrability(&self) -> &CheckReport {
        &self.integrability
    }

    /// Human-readable evaluation formula.
    pub fn recipe(&self) -> String {
        let k = self.zdims.len();
        if k == 0 {
            "f(X) = I_m (x) f0 + F_0(I_m (x) Y, X)(X - I_m (x) Y) for X of size m*s".into()
        } else {
            "f(X^0..X^k)(Z^1..Z^k) = G(Z^1..Z^k) + sum_j F_j(I (x) Y^0, .., I (x) Y^j, X^j, .., X^k)\
             (Z^1, .., Z^j, X^j - I (x) Y^j, Z^{j+1}, .., Z^k), where G sums g over the block \
             entries Z^1_{i0,i1}, .., Z^k_{i(k-1),ik} into output block (i0, ik)"
                .into()
        }
    }

    fn multiplicities(&self, sizes: &[usize]) -> Result<Vec<usize>> {
        sizes
            .iter()
            .zip(&self.base)
            .enumerate()
            .map(|(slot, (&n, y))| {
                let s = y.rows();
                if n % s == 0 {
                    Ok(n / s)
                } else {
                    Err(NcError::SizeNotMultiple {
                        slot,
                        size: n,
                        base: s,
                    })
                }
            })
            .collect()
    }
}

impl NcFunction for Antiderivative {
    fn xdims(&self) -> &[usize] {
        &self.xdims
    }

    fn zdims(&self) -> &[usize] {
        &self.zdims
    }

    fn eval(&self, xs: &[PointMatrix], zs: &[PointMatrix]) -> Result<ScalarMatrix> {
        let sizes = check_args(&self.xdims, &self.zdims, xs, zs)?;
        let ms = self.multiplicities(&sizes)?;
        let amp: Vec<PointMatrix> = self
            .base
            .iter()
            .zip(&ms)
            .map(|(y, &m)| y.kron_identity(m))
            .collect();
        let mut out = self.base_value.amplify_eval(zs, &ms)?;
        for (j, f) in self.sources.iter().enumerate() {
            let mut fx = Vec::with_capacity(xs.len() + 1);
            fx.extend_from_slice(&amp[..=j]);
            fx.extend_from_slice(&xs[j..]);
            let mut fz = zs.to_vec();
            fz.insert(j, &xs[j] - &amp[j]);
            out = &out + &f.eval(&fx, &fz)?;
        }
        Ok(out)
    }
}

fn check_base(xdims: &[usize], base: &[PointMatrix]) -> Result<()> {
    if base.len() != xdims.len() {
        return Err(NcError::ShapeMismatch(format!(
            "{} base points for {} slots",
            base.len(),
            xdims.len()
        )));
    }
    for (j, (y, &d)) in base.iter().zip(xdims).enumerate() {
        if !y.is_square() {
            return Err(NcError::ShapeMismatch(format!(
                "base point {j} is not square"
            )));
        }
        if y.dim() != d {
            return Err(NcError::DimMismatch(format!(
                "base point {j} has dimension {}, expected {d}",
                y.dim()
            )));
        }
    }
    Ok(())
}

fn certify(fs: &[NcFn], base: &[PointMatrix], cfg: &SampleConfig) -> Result<CheckReport> {
    let samples = integrability_samples(fs, Some(base), cfg)?;
    let report = check_integrability(fs, &samples)?;
    if !report.passed {
        return Err(NcError::NotIntegrable(
            report
                .witness
                .clone()
                .unwrap_or_else(|| "integrability check failed".into()),
        ));
    }
    Ok(report)
}

/// Order-0 antiderivative of `F` with `f(Y) = f_0`, the inner witness of the
/// derivation table at `Y` shifted by `c I`.
pub fn integrate_order1(f: NcFn, y: &PointMatrix, c: &Scalar) -> Result<Antiderivative> {
    integrate_order1_with(f, y, c, &SampleConfig::default())
}

pub fn integrate_order1_with(
    f: NcFn,
    y: &PointMatrix,
    c: &Scalar,
    cfg: &SampleConfig,
) -> Result<Antiderivative> {
    if f.order() != 1 {
        return Err(NcError::OrderMismatch {
            expected: 1,
            found: f.order(),
        });
    }
    let fs = vec![f];
    let (xdims, zdims) = antiderivative_dims(&fs)?;
    let base = vec![y.clone()];
    check_base(&xdims, &base)?;
    let integrability = certify(&fs, &base, cfg)?;
    let table = derivation_table_order0(fs[0].as_ref(), y)?;
    let base_value = inner_solve(&table, c)?;
    Ok(Antiderivative {
        xdims,
        zdims,
        base,
        base_value,
        sources: fs,
        integrability,
    })
}

/// Order-k antiderivative of `F_0..F_k` built from `g_0..g_k` at the base
/// points; its base value is the combined `g`.
pub fn integrate_higher(fs: Vec<NcFn>, ys: &[PointMatrix]) -> Result<Antiderivative> {
    integrate_higher_with(fs, ys, &SampleConfig::default())
}

pub fn integrate_higher_with(
    fs: Vec<NcFn>,
    ys: &[PointMatrix],
    cfg: &SampleConfig,
) -> Result<Antiderivative> {
    let (xdims, zdims) = antiderivative_dims(&fs)?;
    check_base(&xdims, ys)?;
    let integrability = certify(&fs, ys, cfg)?;
    let mut tables = Vec::with_capacity(fs.len());
    let mut gs = Vec::with_capacity(fs.len());
    for (j, f) in fs.iter().enumerate() {
        let t = jd_table(f.as_ref(), ys, j)?;
        gs.push(gj_assemble(&t)?);
        tables.push(t);
    }
    let base_value = g_combine(&gs, &tables)?;
    Ok(Antiderivative {
        xdims,
        zdims,
        base: ys.to_vec(),
        base_value,
        sources: fs,
        integrability,
    })
}

/// Random `jΔ` samples whose points have sizes that are multiples of
/// `base_sizes` (at most 3 times, and at most 4 overall).
pub fn delta_samples(
    xdims: &[usize],
    zdims: &[usize],
    base_sizes: &[usize],
    gen: &mut Gen,
    per_slot: usize,
) -> Vec<DeltaSample> {
    let k = xdims.len() - 1;
    let mut out = Vec::new();
    for j in 0..=k {
        let (nx, nz) = delta_dims(xdims, zdims, j);
        let mut origins: Vec<usize> = (0..=k).collect();
        origins.insert(j, j);
        for _ in 0..per_slot {
            let sizes: Vec<usize> = origins
                .iter()
                .map(|&o| {
                    let s = base_sizes[o];
                    s * gen.index(1, (4 / s).clamp(1, 3))
                })
                .collect();
            let xs = nx
                .iter()
                .zip(&sizes)
                .map(|(&d, &n)| gen.point(d, n, n))
                .collect();
            let zs = random_directions(gen, &nz, &sizes);
            out.push(DeltaSample { j, xs, zs });
        }
    }
    out
}

/// Checks `jΔf = F_j` at every sample.
pub fn verify_antiderivative(
    f: &dyn NcFunction,
    fs: &[NcFn],
    samples: &[DeltaSample],
) -> Result<CheckReport> {
    let name = "antiderivative";
    if fs.len() != f.order() + 1 {
        return Err(NcError::OrderMismatch {
            expected: f.order() + 1,
            found: fs.len(),
        });
    }
    for (n, s) in samples.iter().enumerate() {
        let lhs = delta_eval(f, s.j, &s.xs, &s.zs)?;
        let rhs = fs[s.j].eval(&s.xs, &s.zs)?;
        if lhs != rhs {
            return Ok(CheckReport::fail(
                name,
                n + 1,
                format!("sample {n}: {}Δf = {lhs} but F_{} = {rhs}", s.j, s.j),
            ));
        }
    }
    Ok(CheckReport::pass(name, samples.len()))
}

/// Result of comparing two functions that should differ by a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantDifference {
    pub report: CheckReport,
    /// The k-linear `c` on 1x1 arguments with `f - h = C`, `C` its block
    /// amplification; for order 0 a 1x1 matrix `[c]`, so `f - h = c I`.
    pub constant: MultiLinearMap,
}

/// Checks that `f - h` is the block amplification of one fixed `c` at every
/// point tuple, i.e. independent of the x-points.
pub fn check_constant_difference(
    f: &dyn NcFunction,
    h: &dyn NcFunction,
    points: &[(Vec<PointMatrix>, Vec<PointMatrix>)],
) -> Result<ConstantDifference> {
    if f.xdims() != h.xdims() || f.zdims() != h.zdims() {
        return Err(NcError::DimMismatch(
            "functions have different slot dimensions".into(),
        ));
    }
    let (x0, _) = points
        .first()
        .ok_or_else(|| NcError::ShapeMismatch("at least one point is required".into()))?;
    let sizes: Vec<usize> = x0.iter().map(PointMatrix::rows).collect();
    let args: Vec<ArgShape> = f.zdims().iter().map(|&d| ArgShape::new(1, 1, d)).collect();
    let constant = MultiLinearMap::from_fn(args, 1, 1, |units| {
        let zs: Vec<PointMatrix> = units
            .iter()
            .enumerate()
            .map(|(l, u)| {
                let mut z = PointMatrix::zeros(u.dim(), sizes[l], sizes[l + 1]);
                z = z.zip_map(u, |big, small| {
                    let mut m = big.clone();
                    m.set(0, 0, small.get(0, 0).clone());
                    m
                });
                z
            })
            .collect();
        let d = &f.eval(x0, &zs)? - &h.eval(x0, &zs)?;
        Ok(d.block(0, 0, 1, 1))
    })?;
    let name = "constant difference";
    for (n, (xs, zs)) in points.iter().enumerate() {
        let d = &f.eval(xs, zs)? - &h.eval(xs, zs)?;
        let ms: Vec<usize> = xs.iter().map(PointMatrix::rows).collect();
        let c = constant.amplify_eval(zs, &ms)?;
        if d != c {
            return Ok(ConstantDifference {
                report: CheckReport::fail(
                    name,
                    n + 1,
                    format!("point tuple {n}: difference {d} is not the amplified constant {c}"),
                ),
                constant,
            });
        }
    }
    Ok(ConstantDifference {
        report: CheckReport::pass(name, points.len()),
        constant,
    })
}

/// Symbolic inverse of `delta_sym(., j)`: fuses `w_j`, the z-letter in slot
/// `j+1` and `w_{j+1}` into one word. Every merge class must contain all split
/// positions with one common coefficient. Kernel monomials of the result are
/// zero.
pub fn integrate_poly(p: &NcPolynomial, j: usize) -> Result<NcPolynomial> {
    let order = p.order();
    if order == 0 || j >= order {
        return Err(NcError::SlotOutOfRange {
            slot: j,
            order: order.saturating_sub(1),
        });
    }
    let (xd, zd) = (p.xdims(), p.zdims());
    if xd[j] != xd[j + 1] || xd[j] != zd[j] {
        return Err(NcError::DimMismatch(format!(
            "slots {j} and {} and the z-slot between them must share one dimension, got {}, {}, {}",
            j + 1,
            xd[j],
            xd[j + 1],
            zd[j]
        )));
    }
    let mut xdims = xd.to_vec();
    xdims.remove(j + 1);
    let mut zdims = zd.to_vec();
    zdims.remove(j);
    let mut classes: BTreeMap<MonomialKey, BTreeMap<usize, Scalar>> = BTreeMap::new();
    for (key, c) in p.terms() {
        let mut fused = key.xwords[j].clone();
        fused.push(key.zletters[j]);
        fused.extend_from_slice(&key.xwords[j + 1]);
        let mut xwords = key.xwords.clone();
        xwords[j] = fused;
        xwords.remove(j + 1);
        let mut zletters = key.zletters.clone();
        zletters.remove(j);
        classes
            .entry(MonomialKey::new(xwords, zletters))
            .or_default()
            .insert(key.xwords[j].len(), c.clone());
    }
    let mut q = NcPolynomial::zero(xdims, zdims)?;
    for (key, splits) in classes {
        let len = key.xwords[j].len();
        let first = splits.values().next().cloned().unwrap_or_else(Scalar::zero);
        let complete = splits.len() == len && splits.values().all(|c| *c == first);
        if !complete {
            let found: Vec<String> = splits
                .iter()
                .map(|(pos, c)| format!("{pos}: {c}"))
                .collect();
            let missing: Vec<String> = (0..len)
                .filter(|pos| !splits.contains_key(pos))
                .map(|pos| pos.to_string())
                .collect();
            return Err(NcError::NotIntegrablePoly(format!(
                "merge class of {key}: split coefficients {{{}}}, missing positions [{}]",
                found.join(", "),
                missing.join(", ")
            )));
        }
        q.add_term(key, first)?;
    }
    Ok(q)
}
