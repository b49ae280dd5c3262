//! JSON documents for matrices, exponents, spaces, embedding maps, symbols and reports.
//!
//! Complex data is stored as parallel `re`/`im` arrays; `im` may be omitted on input.

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::divdiff::SymbolFunction;
use crate::embed::{
    corner_embedding, cubature_embedding_2_4_3, diag_embedding, first_row_embedding,
    s2_to_sp_embedding, sum_diff_embedding, vec_embedding, DivisionAlgebra, Element, EmbeddingMap,
    Field, SpaceKind, SpaceSpec,
};
use crate::error::Error;
use crate::matrix::ComplexMatrix;
use crate::obstruct::{D2Target, ObstructionReport, ResidualRow};
use crate::schatten::PExponent;

#[derive(Debug, thiserror::Error)]
pub enum DocError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid document: {0}")]
    Schema(String),
    #[error(transparent)]
    Library(#[from] Error),
}

fn schema(msg: impl Into<String>) -> DocError {
    DocError::Schema(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixDocument {
    /// Always writes `im`, so documents that carry it round-trip bit for bit.
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        let part = |f: fn(Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..rows)
                .map(|i| (0..cols).map(|j| f(m.get(i, j))).collect())
                .collect()
        };
        MatrixDocument {
            rows,
            cols,
            re: part(|z| z.re),
            im: Some(part(|z| z.im)),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, DocError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(schema("rows and cols must be positive"));
        }
        check_grid("re", &self.re, self.rows, self.cols)?;
        if let Some(im) = &self.im {
            check_grid("im", im, self.rows, self.cols)?;
        }
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let im = self.im.as_ref().map_or(0.0, |im| im[i][j]);
                entries.push(Complex64::new(self.re[i][j], im));
            }
        }
        Ok(ComplexMatrix::from_row_major(
            self.rows, self.cols, &entries,
        )?)
    }
}

fn check_grid(name: &str, grid: &[Vec<f64>], rows: usize, cols: usize) -> Result<(), DocError> {
    if grid.len() != rows || grid.iter().any(|r| r.len() != cols) {
        return Err(schema(format!("`{name}` must be a {rows}x{cols} array")));
    }
    Ok(())
}

/// A number `> 0` or the string `"inf"`; numeric strings are accepted on input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentToken(pub PExponent);

impl Serialize for ExponentToken {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            PExponent::Finite(p) => s.serialize_f64(p),
            PExponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExponentToken {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Number(p) => PExponent::finite(p),
            Raw::Text(s) => s.parse(),
        };
        p.map(ExponentToken).map_err(de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKindDocument {
    Vector,
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldDocument {
    R,
    C,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub kind: SpaceKindDocument,
    pub dim: usize,
    pub exponent: ExponentToken,
    #[serde(default = "complex_field")]
    pub field: FieldDocument,
}

fn complex_field() -> FieldDocument {
    FieldDocument::C
}

impl SpaceDocument {
    pub fn from_spec(s: &SpaceSpec) -> Self {
        SpaceDocument {
            kind: match s.kind {
                SpaceKind::Vector => SpaceKindDocument::Vector,
                SpaceKind::Matrix => SpaceKindDocument::Matrix,
            },
            dim: s.dim,
            exponent: ExponentToken(s.exponent),
            field: match s.field {
                Field::Real => FieldDocument::R,
                Field::Complex => FieldDocument::C,
            },
        }
    }

    pub fn to_spec(&self) -> SpaceSpec {
        let field = match self.field {
            FieldDocument::R => Field::Real,
            FieldDocument::C => Field::Complex,
        };
        match self.kind {
            SpaceKindDocument::Vector => SpaceSpec::vector(self.dim, self.exponent.0, field),
            SpaceKindDocument::Matrix => SpaceSpec {
                field,
                ..SpaceSpec::matrix(self.dim, self.exponent.0)
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorDocument {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

/// Matrix documents carry `rows`/`cols`; anything else is read as a vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementDocument {
    Matrix(MatrixDocument),
    Vector(VectorDocument),
}

impl ElementDocument {
    pub fn from_element(x: &Element) -> Self {
        match x {
            Element::Matrix(m) => ElementDocument::Matrix(MatrixDocument::from_matrix(m)),
            Element::Vector(v) => ElementDocument::Vector(VectorDocument {
                re: v.iter().map(|z| z.re).collect(),
                im: Some(v.iter().map(|z| z.im).collect()),
            }),
        }
    }

    pub fn to_element(&self) -> Result<Element, DocError> {
        match self {
            ElementDocument::Matrix(m) => Ok(Element::Matrix(m.to_matrix()?)),
            ElementDocument::Vector(v) => {
                if let Some(im) = &v.im {
                    if im.len() != v.re.len() {
                        return Err(schema("vector `im` must match `re` in length"));
                    }
                }
                Ok(Element::Vector(
                    v.re.iter()
                        .enumerate()
                        .map(|(k, &re)| Complex64::new(re, v.im.as_ref().map_or(0.0, |im| im[k])))
                        .collect(),
                ))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    pub domain: SpaceDocument,
    pub codomain: SpaceDocument,
    pub basis_images: Vec<ElementDocument>,
}

impl MapDocument {
    pub fn from_map(t: &EmbeddingMap) -> Self {
        MapDocument {
            domain: SpaceDocument::from_spec(t.domain()),
            codomain: SpaceDocument::from_spec(t.codomain()),
            basis_images: t
                .basis_images()
                .iter()
                .map(ElementDocument::from_element)
                .collect(),
        }
    }

    pub fn to_map(&self) -> Result<EmbeddingMap, DocError> {
        let images = self
            .basis_images
            .iter()
            .map(ElementDocument::to_element)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EmbeddingMap::new(
            self.domain.to_spec(),
            self.codomain.to_spec(),
            images,
        )?)
    }
}

/// Built-in constructor selected by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedMap {
    pub kind: String,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub p: Option<ExponentToken>,
}

pub const MAP_KINDS: [&str; 7] = [
    "diag",
    "corner",
    "sumdiff",
    "firstrow",
    "vec",
    "s2sp",
    "cubature243",
];

impl NamedMap {
    pub fn build(&self) -> Result<EmbeddingMap, DocError> {
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| schema(format!("map kind `{}` needs `{name}`", self.kind)))
        };
        let p = || {
            self.p
                .map(|t| t.0)
                .ok_or_else(|| schema(format!("map kind `{}` needs `p`", self.kind)))
        };
        let map = match self.kind.as_str() {
            "diag" => diag_embedding(need(self.m, "m")?, p()?)?,
            "corner" => corner_embedding(need(self.m, "m")?, need(self.n, "n")?, p()?)?,
            "sumdiff" => sum_diff_embedding(need(self.n, "n")?)?,
            "firstrow" => first_row_embedding(need(self.m, "m")?, p()?)?,
            "vec" => vec_embedding(need(self.m, "m")?)?,
            "s2sp" => s2_to_sp_embedding(need(self.m, "m")?, p()?)?,
            "cubature243" => cubature_embedding_2_4_3(),
            other => {
                return Err(schema(format!(
                    "unknown map kind `{other}`, expected one of {}",
                    MAP_KINDS.join(", ")
                )))
            }
        };
        Ok(map)
    }
}

/// Either a named constructor or an explicit map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapSource {
    Named(NamedMap),
    Explicit(MapDocument),
}

impl MapSource {
    pub fn build(&self) -> Result<EmbeddingMap, DocError> {
        match self {
            MapSource::Named(n) => n.build(),
            MapSource::Explicit(d) => d.to_map(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolDocument {
    AbsPow { p: f64 },
    Polynomial { coeffs: Vec<f64> },
}

impl SymbolDocument {
    pub fn to_symbol(&self) -> Result<SymbolFunction, DocError> {
        match self {
            SymbolDocument::AbsPow { p } => Ok(SymbolFunction::abs_pow(*p)?),
            SymbolDocument::Polynomial { coeffs } => {
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(schema("polynomial coefficients must be finite"));
                }
                Ok(SymbolFunction::polynomial(coeffs))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgebraDocument {
    R,
    C,
    H,
}

impl From<AlgebraDocument> for DivisionAlgebra {
    fn from(a: AlgebraDocument) -> Self {
        match a {
            AlgebraDocument::R => DivisionAlgebra::Real,
            AlgebraDocument::C => DivisionAlgebra::Complex,
            AlgebraDocument::H => DivisionAlgebra::Quaternion,
        }
    }
}

/// A number, or a marker string for values that do not exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReportValue {
    Number(f64),
    Diverges,
    NotApplicable,
}

impl Serialize for ReportValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ReportValue::Number(v) => s.serialize_f64(*v),
            ReportValue::Diverges => s.serialize_str("DIVERGES"),
            ReportValue::NotApplicable => s.serialize_str("NOT_APPLICABLE"),
        }
    }
}

impl<'de> Deserialize<'de> for ReportValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(ReportValue::Number(v)),
            Raw::Text(s) if s == "DIVERGES" => Ok(ReportValue::Diverges),
            Raw::Text(s) if s == "NOT_APPLICABLE" => Ok(ReportValue::NotApplicable),
            Raw::Text(s) => Err(de::Error::custom(format!("unexpected marker {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualRowDocument {
    pub t: f64,
    pub target: f64,
    pub actual: f64,
    pub residual: f64,
}

impl From<&ResidualRow> for ResidualRowDocument {
    fn from(r: &ResidualRow) -> Self {
        ResidualRowDocument {
            t: r.t,
            target: r.target,
            actual: r.actual,
            residual: r.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub q: f64,
    pub p: ExponentToken,
    pub tol: f64,
    pub residual_profile: Vec<ResidualRowDocument>,
    pub max_residual: f64,
    pub d2_actual: ReportValue,
    pub d2_target: ReportValue,
    pub verdict: String,
}

impl ReportDocument {
    pub fn from_report(r: &ObstructionReport) -> Self {
        ReportDocument {
            q: r.q,
            p: ExponentToken(r.p),
            tol: r.tol,
            residual_profile: r.residual_profile.iter().map(Into::into).collect(),
            max_residual: r.max_residual,
            d2_actual: r
                .d2_actual
                .map_or(ReportValue::NotApplicable, ReportValue::Number),
            d2_target: match r.d2_target {
                Some(D2Target::Value(v)) => ReportValue::Number(v),
                Some(D2Target::Diverges) => ReportValue::Diverges,
                None => ReportValue::NotApplicable,
            },
            verdict: r.verdict.as_str().to_string(),
        }
    }
}
