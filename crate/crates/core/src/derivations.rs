//! Derivation tables at base points and their inner witnesses.
//!
//! For an order-(k+1) function `F_j` and base points `Y^0..Y^k`, the map
//! `jD(S) = F_j(.., Y^j, Y^j, ..)(.., S Y^j - Y^j S, ..)` takes values in the
//! space of k-linear maps, which is a bimodule over `R^{s_j x s_j}` (see
//! [`MultiLinearMap::left_action`]). Everything here is evaluated on matrix
//! units `E_il`; indices are zero-based internally and 1-based in witnesses.

use num_traits::Zero;

use crate::diffcalc::NcFunction;
use crate::error::{NcError, Result};
use crate::exactalg::{PointMatrix, Scalar, ScalarMatrix};
use crate::multilinear::{ArgShape, MultiLinearMap};
use crate::report::CheckReport;

fn unit(n: usize, i: usize, j: usize) -> ScalarMatrix {
    ScalarMatrix::unit(n, n, i, j)
}

/// Values `D^{il} = D(E_il)` of a derivation on the units of `R^{s x s}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTable {
    size: usize,
    slot: usize,
    entries: Vec<MultiLinearMap>,
}

impl DerivationTable {
    pub fn new(size: usize, slot: usize, entries: Vec<MultiLinearMap>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(NcError::ShapeMismatch(format!(
                "a table of size {size} needs {} entries, got {}",
                size * size,
                entries.len()
            )));
        }
        let first = &entries[0];
        if entries
            .iter()
            .any(|e| e.args() != first.args() || e.out_shape() != first.out_shape())
        {
            return Err(NcError::ShapeMismatch(
                "table entries differ in shape".into(),
            ));
        }
        if slot > first.arity() || first.slot_size(slot) != size {
            return Err(NcError::ShapeMismatch(format!(
                "slot {slot} of the entries does not have size {size}"
            )));
        }
        Ok(DerivationTable {
            size,
            slot,
            entries,
        })
    }

    /// Order-0 table from plain matrices, row-major.
    pub fn from_matrices(size: usize, entries: Vec<ScalarMatrix>) -> Result<Self> {
        Self::new(
            size,
            0,
            entries.into_iter().map(MultiLinearMap::constant).collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn arity(&self) -> usize {
        self.entries[0].arity()
    }

    pub fn entries(&self) -> &[MultiLinearMap] {
        &self.entries
    }

    pub fn get(&self, i: usize, l: usize) -> &MultiLinearMap {
        &self.entries[i * self.size + l]
    }

    pub fn set(&mut self, i: usize, l: usize, value: MultiLinearMap) {
        assert_eq!(value.args(), self.entries[0].args(), "entry shape changed");
        self.entries[i * self.size + l] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(MultiLinearMap::is_zero)
    }

    /// `D(S)` by linearity.
    pub fn apply(&self, s: &ScalarMatrix) -> MultiLinearMap {
        assert_eq!(s.shape(), (self.size, self.size), "argument size mismatch");
        let mut out = self.entries[0].scale(&Scalar::zero());
        for i in 0..self.size {
            for l in 0..self.size {
                let c = s.get(i, l);
                if !c.is_zero() {
                    out = out.add(&self.get(i, l).scale(c));
                }
            }
        }
        out
    }

    fn act_left(&self, s: &ScalarMatrix, m: &MultiLinearMap) -> MultiLinearMap {
        m.left_action(self.slot, s)
            .expect("table shapes checked on construction")
    }

    fn act_right(&self, m: &MultiLinearMap, s: &ScalarMatrix) -> MultiLinearMap {
        m.right_action(self.slot, s)
            .expect("table shapes checked on construction")
    }
}

/// The table of `jD` for `F_j` at base points `ys = (Y^0..Y^k)`.
pub fn jd_table(f: &dyn NcFunction, ys: &[PointMatrix], j: usize) -> Result<DerivationTable> {
    let k = ys
        .len()
        .checked_sub(1)
        .ok_or_else(|| NcError::ShapeMismatch("at least one base point is required".into()))?;
    if f.order() != k + 1 {
        return Err(NcError::OrderMismatch {
            expected: k + 1,
            found: f.order(),
        });
    }
    if j > k {
        return Err(NcError::SlotOutOfRange { slot: j, order: k });
    }
    for (l, y) in ys.iter().enumerate() {
        if !y.is_square() {
            return Err(NcError::ShapeMismatch(format!(
                "base point {l} is not square"
            )));
        }
    }
    let sizes: Vec<usize> = ys.iter().map(PointMatrix::rows).collect();
    let fz = f.zdims();
    let args: Vec<ArgShape> = (1..=k)
        .map(|l| {
            let dim = if l <= j { fz[l - 1] } else { fz[l] };
            ArgShape::new(sizes[l - 1], sizes[l], dim)
        })
        .collect();
    let mut xs = ys.to_vec();
    xs.insert(j, ys[j].clone());
    let s = sizes[j];
    let mut entries = Vec::with_capacity(s * s);
    for i in 0..s {
        for l in 0..s {
            let dir = ys[j].commutator_with(&unit(s, i, l));
            let m = MultiLinearMap::from_fn(args.clone(), sizes[0], sizes[k], |zs| {
                let mut zs = zs.to_vec();
                zs.insert(j, dir.clone());
                f.eval(&xs, &zs)
            })?;
            entries.push(m);
        }
    }
    DerivationTable::new(s, j, entries)
}

/// `D_Y(E_il) = F(Y, Y)(E_il Y - Y E_il)` for an order-1 `F`.
pub fn derivation_table_order0(f: &dyn NcFunction, y: &PointMatrix) -> Result<DerivationTable> {
    jd_table(f, std::slice::from_ref(y), 0)
}

/// Checks `[E_rs, D^{uv}] + [D^{rs}, E_uv] = D([E_rs, E_uv])` for all units.
pub fn check_leibniz(table: &DerivationTable) -> CheckReport {
    let n = table.size;
    let name = "leibniz";
    let mut left = Vec::with_capacity(n * n);
    let mut right = Vec::with_capacity(n * n);
    for r in 0..n {
        for s in 0..n {
            let e = unit(n, r, s);
            left.push(
                (0..n * n)
                    .map(|uv| table.act_left(&e, &table.entries[uv]))
                    .collect::<Vec<_>>(),
            );
            right.push(
                (0..n * n)
                    .map(|uv| table.act_right(&table.entries[uv], &e))
                    .collect::<Vec<_>>(),
            );
        }
    }
    let zero = table.entries[0].scale(&Scalar::zero());
    let mut cases = 0;
    for r in 0..n {
        for s in 0..n {
            for u in 0..n {
                for v in 0..n {
                    cases += 1;
                    let (rs, uv) = (r * n + s, u * n + v);
                    let lhs = left[rs][uv]
                        .sub(&right[rs][uv])
                        .add(&right[uv][rs])
                        .sub(&left[uv][rs]);
                    let mut rhs = zero.clone();
                    if s == u {
                        rhs = rhs.add(table.get(r, v));
                    }
                    if r == v {
                        rhs = rhs.sub(table.get(u, s));
                    }
                    if lhs != rhs {
                        return CheckReport::fail(
                            name,
                            cases,
                            format!("(r,s,u,v) = ({},{},{},{})", r + 1, s + 1, u + 1, v + 1),
                        );
                    }
                }
            }
        }
    }
    CheckReport::pass(name, cases)
}

/// Verifies `[E_rs, m] = D^{rs}` in the table's slot for every unit.
fn verify_inner(table: &DerivationTable, m: &MultiLinearMap, what: &str) -> Result<()> {
    let n = table.size;
    for r in 0..n {
        for s in 0..n {
            let b = m.bracket(table.slot, &unit(n, r, s))?;
            if &b != table.get(r, s) {
                return Err(NcError::PostconditionFailure(format!(
                    "{what}: [E_{}{}, N] differs from D(E_{}{})",
                    r + 1,
                    s + 1,
                    r + 1,
                    s + 1
                )));
            }
        }
    }
    Ok(())
}

/// Inner witness `N = sum_i (E_ii D^{ii} + E_i1 D^{1i} E_ii) + c I` with
/// `D(S) = [S, N]`. The constant `c` is only meaningful for order-0 tables;
/// a nonzero `c` on a higher table is rejected.
pub fn inner_solve(table: &DerivationTable, c: &Scalar) -> Result<MultiLinearMap> {
    let n = table.size;
    for i in 0..n {
        let d = table.get(i, i);
        for k in 0..n {
            let e = unit(n, k, k);
            if !table.act_right(&table.act_left(&e, d), &e).is_zero() {
                return Err(NcError::NotInner { i: i + 1, k: k + 1 });
            }
        }
    }
    let mut sum = table.entries[0].scale(&Scalar::zero());
    for i in 0..n {
        let eii = unit(n, i, i);
        sum = sum.add(&table.act_left(&eii, table.get(i, i)));
        let t = table.act_left(&unit(n, i, 0), table.get(0, i));
        sum = sum.add(&table.act_right(&t, &eii));
    }
    if !c.is_zero() {
        if table.arity() != 0 {
            return Err(NcError::PreconditionFailure(
                "a scalar constant applies to order-0 tables only".into(),
            ));
        }
        let (rows, _) = sum.out_shape();
        sum = sum.add(&MultiLinearMap::constant(ScalarMatrix::scalar_identity(
            rows, c,
        )));
    }
    verify_inner(table, &sum, "inner witness")?;
    Ok(sum)
}

/// `g_j = -sum_i D^{i1} . E_1i` with the right action of the table's slot.
pub fn gj_assemble(table: &DerivationTable) -> Result<MultiLinearMap> {
    let n = table.size;
    let mut g = table.entries[0].scale(&Scalar::zero());
    for i in 0..n {
        g = g.sub(&table.act_right(table.get(i, 0), &unit(n, 0, i)));
    }
    verify_inner(table, &g, &format!("g_{}", table.slot))?;
    Ok(g)
}

/// Combines `g_0..g_k` into one map `g` with `[E_rs, g]_j = jD(E_rs)` in
/// every slot simultaneously:
///
/// `g(Z) = g_0(Z) + sum_l sum_{i_0..i_{l-1}} E_{i_0 1} g_l(E_{1 i_0} Z^1 E_{i_1 1}, ..,
/// E_{1 i_{l-1}} Z^l, Z^{l+1}, ..)`.
pub fn g_combine(gs: &[MultiLinearMap], tables: &[DerivationTable]) -> Result<MultiLinearMap> {
    let k = gs
        .len()
        .checked_sub(1)
        .ok_or_else(|| NcError::ShapeMismatch("at least one map is required".into()))?;
    if tables.len() != k + 1 {
        return Err(NcError::ShapeMismatch(format!(
            "{} maps but {} tables",
            k + 1,
            tables.len()
        )));
    }
    let g0 = &gs[0];
    if gs
        .iter()
        .any(|g| g.args() != g0.args() || g.out_shape() != g0.out_shape())
        || g0.arity() != k
    {
        return Err(NcError::ShapeMismatch("maps differ in shape".into()));
    }
    let sizes: Vec<usize> = (0..=k).map(|j| g0.slot_size(j)).collect();
    let (p, q) = g0.out_shape();
    let mut g = g0.clone();
    for (l, gl) in gs.iter().enumerate().skip(1) {
        let term = MultiLinearMap::from_fn(g0.args().to_vec(), p, q, |zs| {
            let mut acc = ScalarMatrix::zeros(p, q);
            let radices = &sizes[..l];
            let mut idx = vec![0usize; l];
            loop {
                let mut args = zs.to_vec();
                for m in 1..=l {
                    let pre = unit(sizes[m - 1], 0, idx[m - 1]);
                    let mut z = args[m - 1].left_mul(&pre);
                    if m < l {
                        z = z.right_mul(&unit(sizes[m], idx[m], 0));
                    }
                    args[m - 1] = z;
                }
                if !args.iter().any(PointMatrix::is_zero) {
                    let v = gl.eval(&args)?;
                    acc = &acc + &(&unit(p, idx[0], 0) * &v);
                }
                let mut pos = l;
                loop {
                    if pos == 0 {
                        return Ok(acc);
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < radices[pos] {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        })?;
        g = g.add(&term);
    }
    for table in tables {
        verify_inner(table, &g, &format!("combined g in slot {}", table.slot))?;
    }
    Ok(g)
}

/// `sum_i E_i1 . c . E_1i` in slot `j`.
pub fn basis_conjugation_sum(c: &MultiLinearMap, j: usize) -> Result<MultiLinearMap> {
    let n = c.slot_size(j);
    let mut out = c.scale(&Scalar::zero());
    for i in 0..n {
        let t = c.left_action(j, &unit(n, i, 0))?;
        out = out.add(&t.right_action(j, &unit(n, 0, i))?);
    }
    Ok(out)
}

/// Checks that the conjugation sum of `c` commutes with every unit in slot `j`.
pub fn check_conjugation_commutes(c: &MultiLinearMap, j: usize) -> Result<CheckReport> {
    let sum = basis_conjugation_sum(c, j)?;
    let n = c.slot_size(j);
    let name = format!("conjugation sum commutes in slot {j}");
    for r in 0..n {
        for s in 0..n {
            if !sum.bracket(j, &unit(n, r, s))?.is_zero() {
                return Ok(CheckReport::fail(
                    name,
                    r * n + s + 1,
                    format!("E_{}{}", r + 1, s + 1),
                ));
            }
        }
    }
    Ok(CheckReport::pass(name, n * n))
}

/// For `A B = lambda A` and `B C = lambda C`, checks `A F(Y,Y)(BY - YB) C = 0`.
pub fn check_makingzero(
    f: &dyn NcFunction,
    y: &PointMatrix,
    a: &ScalarMatrix,
    b: &ScalarMatrix,
    c: &ScalarMatrix,
    lambda: &Scalar,
) -> Result<CheckReport> {
    if f.order() != 1 {
        return Err(NcError::OrderMismatch {
            expected: 1,
            found: f.order(),
        });
    }
    let n = y.rows();
    for (name, m) in [("A", a), ("B", b), ("C", c)] {
        if m.shape() != (n, n) {
            return Err(NcError::ShapeMismatch(format!("{name} must be {n}x{n}")));
        }
    }
    if a * b != a.scale(lambda) {
        return Err(NcError::PreconditionFailure("A B != lambda A".into()));
    }
    if b * c != c.scale(lambda) {
        return Err(NcError::PreconditionFailure("B C != lambda C".into()));
    }
    let v = f.eval(&[y.clone(), y.clone()], &[y.commutator_with(b)])?;
    let out = &(a * &v) * c;
    Ok(if out.is_zero() {
        CheckReport::pass("makingzero", 1)
    } else {
        CheckReport::fail("makingzero", 1, format!("A F(Y,Y)(BY-YB) C = {out}"))
    })
}
