//! JSON encodings of matrices, points, polynomials, multilinear maps and
//! derivation tables. Scalars are always `"p/q"` strings.

use serde::{Deserialize, Serialize};

use crate::derivations::DerivationTable;
use crate::error::{NcError, Result};
use crate::exactalg::{format_scalar, parse_scalar, PointMatrix, ScalarMatrix};
use crate::multilinear::MultiLinearMap;
use crate::ncpoly::{MonomialKey, NcPolynomial};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl From<&ScalarMatrix> for MatrixJson {
    fn from(m: &ScalarMatrix) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: m
                .row_vecs()
                .iter()
                .map(|r| r.iter().map(format_scalar).collect())
                .collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for ScalarMatrix {
    type Error = NcError;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
            return Err(NcError::Parse(format!(
                "matrix entries do not form a {}x{} array",
                j.rows, j.cols
            )));
        }
        let mut m = ScalarMatrix::zeros(j.rows, j.cols);
        for (r, row) in j.entries.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                m.set(r, c, parse_scalar(e)?);
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFields {
    pub dim: usize,
    pub components: Vec<MatrixJson>,
}

/// A point; a bare matrix is read as a dimension-1 point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointJson {
    Point(PointFields),
    Matrix(MatrixJson),
}

impl From<&PointMatrix> for PointJson {
    fn from(p: &PointMatrix) -> Self {
        PointJson::Point(PointFields {
            dim: p.dim(),
            components: p.components().iter().map(MatrixJson::from).collect(),
        })
    }
}

impl TryFrom<&PointJson> for PointMatrix {
    type Error = NcError;

    fn try_from(j: &PointJson) -> Result<Self> {
        match j {
            PointJson::Matrix(m) => Ok(PointMatrix::from_matrix(m.try_into()?)),
            PointJson::Point(p) => {
                if p.components.len() != p.dim {
                    return Err(NcError::Parse(format!(
                        "point declares dim {} but has {} components",
                        p.dim,
                        p.components.len()
                    )));
                }
                let comps = p
                    .components
                    .iter()
                    .map(ScalarMatrix::try_from)
                    .collect::<Result<Vec<_>>>()?;
                PointMatrix::new(comps)
            }
        }
    }
}

/// Argument tuple `{"x": [...], "z": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsJson {
    pub x: Vec<PointJson>,
    #[serde(default)]
    pub z: Vec<PointJson>,
}

impl PointsJson {
    pub fn decode(&self) -> Result<(Vec<PointMatrix>, Vec<PointMatrix>)> {
        let xs = self
            .x
            .iter()
            .map(PointMatrix::try_from)
            .collect::<Result<_>>()?;
        let zs = self
            .z
            .iter()
            .map(PointMatrix::try_from)
            .collect::<Result<_>>()?;
        Ok((xs, zs))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: String,
    pub w: Vec<Vec<u32>>,
    pub v: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub order: usize,
    pub xdims: Vec<usize>,
    pub zdims: Vec<usize>,
    pub terms: Vec<TermJson>,
}

impl From<&NcPolynomial> for PolyJson {
    fn from(p: &NcPolynomial) -> Self {
        PolyJson {
            order: p.order(),
            xdims: p.xdims().to_vec(),
            zdims: p.zdims().to_vec(),
            terms: p
                .terms()
                .map(|(key, c)| TermJson {
                    coeff: format_scalar(c),
                    w: key.xwords.clone(),
                    v: key.zletters.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&PolyJson> for NcPolynomial {
    type Error = NcError;

    fn try_from(j: &PolyJson) -> Result<Self> {
        if j.xdims.len() != j.order + 1 || j.zdims.len() != j.order {
            return Err(NcError::Parse(format!(
                "order {} needs {} xdims and {} zdims, got {} and {}",
                j.order,
                j.order + 1,
                j.order,
                j.xdims.len(),
                j.zdims.len()
            )));
        }
        let mut p = NcPolynomial::zero(j.xdims.clone(), j.zdims.clone())?;
        for t in &j.terms {
            p.add_term(
                MonomialKey::new(t.w.clone(), t.v.clone()),
                parse_scalar(&t.coeff)?,
            )?;
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArgShapeJson {
    pub rows: usize,
    pub cols: usize,
    pub dim: usize,
}

/// One nonzero coefficient: the image of the tensor of basis elements
/// `e_comp (x) E_{row,col}` (all 1-based), one per argument.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlmEntryJson {
    pub basis: Vec<[usize; 3]>,
    pub value: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlmJson {
    pub args: Vec<ArgShapeJson>,
    pub out_rows: usize,
    pub out_cols: usize,
    pub entries: Vec<MlmEntryJson>,
}

impl From<&MultiLinearMap> for MlmJson {
    fn from(m: &MultiLinearMap) -> Self {
        let (out_rows, out_cols) = m.out_shape();
        MlmJson {
            args: m
                .args()
                .iter()
                .map(|a| ArgShapeJson {
                    rows: a.rows,
                    cols: a.cols,
                    dim: a.dim,
                })
                .collect(),
            out_rows,
            out_cols,
            entries: m
                .nonzero_entries()
                .into_iter()
                .map(|(idx, v)| MlmEntryJson {
                    basis: idx.iter().map(|&(a, r, c)| [a + 1, r + 1, c + 1]).collect(),
                    value: v.into(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableJson {
    pub size: usize,
    pub slot: usize,
    /// `entries[i][l]` is the image of `E_{i+1,l+1}`.
    pub entries: Vec<Vec<MlmJson>>,
}

impl From<&DerivationTable> for TableJson {
    fn from(t: &DerivationTable) -> Self {
        TableJson {
            size: t.size(),
            slot: t.slot(),
            entries: (0..t.size())
                .map(|i| (0..t.size()).map(|l| t.get(i, l).into()).collect())
                .collect(),
        }
    }
}

/// Reads a value from JSON text, mapping schema errors to `NcError::Parse`.
pub fn from_str<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| NcError::Parse(e.to_string()))
}

pub fn parse_poly(text: &str) -> Result<NcPolynomial> {
    NcPolynomial::try_from(&from_str::<PolyJson>(text)?)
}

pub fn parse_point(text: &str) -> Result<PointMatrix> {
    PointMatrix::try_from(&from_str::<PointJson>(text)?)
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffcalc::delta_sym;
    use crate::exactalg::ratio;
    use crate::multilinear::ArgShape;

    #[test]
    fn matrix_round_trip() {
        let mut m = ScalarMatrix::from_ints(&[[1, 2], [0, -3]]);
        m.set(0, 0, ratio(-1, 2));
        let j = MatrixJson::from(&m);
        assert_eq!(j.entries[0], vec!["-1/2", "2/1"]);
        let text = to_string(&j);
        let back: MatrixJson = from_str(&text).unwrap();
        assert_eq!(ScalarMatrix::try_from(&back).unwrap(), m);
    }

    #[test]
    fn point_accepts_bare_matrix() {
        let p = parse_point(r#"{"rows":1,"cols":1,"entries":[["3"]]}"#).unwrap();
        assert_eq!(p.dim(), 1);
        let q = parse_point(r#"{"dim":1,"components":[{"rows":1,"cols":1,"entries":[["3/1"]]}]}"#)
            .unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn rejects_unknown_fields_and_ragged() {
        assert!(matches!(
            from_str::<MatrixJson>(r#"{"rows":1,"cols":1,"entries":[["1"]],"extra":0}"#),
            Err(NcError::Parse(_))
        ));
        assert!(matches!(
            parse_point(r#"{"rows":2,"cols":1,"entries":[["1"]]}"#),
            Err(NcError::Parse(_))
        ));
        assert!(parse_poly(r#"{"order":0,"xdims":[1],"zdims":[],"terms":[],"t":1}"#).is_err());
    }

    #[test]
    fn poly_round_trip() {
        let q = NcPolynomial::order0(2, &[(2, &[1, 2]), (-1, &[]), (1, &[2])]).unwrap();
        let p = delta_sym(&q, 0).unwrap();
        for r in [q, p] {
            let text = to_string(&PolyJson::from(&r));
            assert_eq!(parse_poly(&text).unwrap(), r);
        }
    }

    #[test]
    fn mlm_entries_are_one_based() {
        let m = MultiLinearMap::from_fn(vec![ArgShape::new(1, 2, 1)], 1, 2, |z| {
            Ok(z[0].component(0).clone())
        })
        .unwrap();
        let j = MlmJson::from(&m);
        assert_eq!(j.entries.len(), 2);
        assert_eq!(j.entries[0].basis, vec![[1, 1, 1]]);
    }
}
