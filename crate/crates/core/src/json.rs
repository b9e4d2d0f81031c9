//! JSON wire formats.
//!
//! Every input is first decoded into a plain wire struct (so malformed input
//! is reported with the JSON path of the offending field), then validated
//! into the domain type.
//!
//! | value        | shape |
//! |--------------|-------|
//! | complex      | `{"re": f, "im": f}` |
//! | skew form    | `{"n": int, "upper": [[i, j, v], ...]}` |
//! | element      | `{"n", "fiber": {"kind": "scalar"\|"matrix", "k"}, "coeffs": [{"idx", "value"}]}` |
//! | family       | `{"grid": id, "forms": [<skew form>, ...]}` |
//! | field        | `{"grid": {"id", "points": [{"label", "coord"?}]}, "sections": [<element>, ...]}` |
//! | module       | `{"n", "m", "coeffs": [{"idx", "vec": [<complex>, ...]}]}` (`"d"` is accepted for `"m"`) |
//! | bands        | `{"flux": "p/q", "bands": [[lo, hi], ...]}` |

use std::sync::Arc;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{CMatrix, FiberKind, FiberValue, GradedElement};
use crate::cocycle::{CocycleFamily, SkewForm};
use crate::error::{Error, Result};
use crate::field::{BaseGrid, FieldElement, GridPoint};
use crate::hilbmod::ModuleElement;
use crate::index::MultiIndex;
use crate::rep::Flux;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for WireComplex {
    fn from(z: Complex64) -> Self {
        WireComplex { re: z.re, im: z.im }
    }
}

impl From<WireComplex> for Complex64 {
    fn from(w: WireComplex) -> Self {
        Complex64::new(w.re, w.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireSkewForm {
    pub n: usize,
    #[serde(default)]
    pub upper: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WireFiberKind {
    Scalar,
    Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireFiber {
    pub kind: WireFiberKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WireValue {
    Scalar(WireComplex),
    Matrix(Vec<Vec<WireComplex>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireCoeff {
    pub idx: Vec<i64>,
    pub value: WireValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireElement {
    pub n: usize,
    pub fiber: WireFiber,
    #[serde(default)]
    pub coeffs: Vec<WireCoeff>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireFamily {
    pub grid: String,
    pub forms: Vec<WireSkewForm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WirePoint {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coord: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireGrid {
    pub id: String,
    pub points: Vec<WirePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireField {
    pub grid: WireGrid,
    pub sections: Vec<WireElement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireModuleCoeff {
    pub idx: Vec<i64>,
    pub vec: Vec<WireComplex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireModule {
    pub n: usize,
    #[serde(alias = "d")]
    pub m: usize,
    #[serde(default)]
    pub coeffs: Vec<WireModuleCoeff>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireBands {
    pub flux: String,
    pub bands: Vec<[f64; 2]>,
}

/// Decodes JSON text, reporting failures with the path of the offending
/// field (`coeffs[2].value.re`).
pub fn decode<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { "<root>".to_string() } else { path };
        Error::parse(field, e.into_inner().to_string())
    })
}

fn at(field: String) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(field, other.to_string()),
    }
}

impl WireSkewForm {
    pub fn from_form(f: &SkewForm) -> Self {
        WireSkewForm {
            n: f.rank(),
            upper: f.upper_entries(),
        }
    }

    pub fn to_form(&self) -> Result<SkewForm> {
        SkewForm::from_upper(self.n, &self.upper).map_err(at("upper".into()))
    }
}

impl WireFiber {
    pub fn from_kind(kind: FiberKind) -> Self {
        match kind {
            FiberKind::Scalar => WireFiber {
                kind: WireFiberKind::Scalar,
                k: None,
            },
            FiberKind::Matrix(k) => WireFiber {
                kind: WireFiberKind::Matrix,
                k: Some(k),
            },
        }
    }

    pub fn to_kind(&self) -> Result<FiberKind> {
        match (&self.kind, self.k) {
            (WireFiberKind::Scalar, None | Some(1)) => Ok(FiberKind::Scalar),
            (WireFiberKind::Scalar, Some(k)) => Err(Error::parse("fiber.k", format!("scalar fibers have k = 1, got {k}"))),
            (WireFiberKind::Matrix, Some(k)) if k >= 1 => Ok(FiberKind::Matrix(k)),
            (WireFiberKind::Matrix, _) => Err(Error::parse("fiber.k", "matrix fibers need k >= 1")),
        }
    }
}

fn value_from_wire(v: &WireValue, kind: FiberKind, field: &str) -> Result<FiberValue> {
    match (v, kind) {
        (WireValue::Scalar(z), FiberKind::Scalar) => Ok(FiberValue::Scalar((*z).into())),
        (WireValue::Matrix(rows), FiberKind::Matrix(k)) => {
            if rows.len() != k || rows.iter().any(|r| r.len() != k) {
                return Err(Error::parse(field, format!("expected a {k}x{k} matrix")));
            }
            let data = rows.iter().flatten().map(|&z| z.into()).collect();
            Ok(FiberValue::Matrix(CMatrix::new(k, data)?))
        }
        (WireValue::Scalar(_), FiberKind::Matrix(k)) => {
            Err(Error::parse(field, format!("expected a {k}x{k} matrix, found a scalar")))
        }
        (WireValue::Matrix(_), FiberKind::Scalar) => Err(Error::parse(field, "expected a complex scalar, found a matrix")),
    }
}

fn value_to_wire(v: &FiberValue) -> WireValue {
    match v {
        FiberValue::Scalar(z) => WireValue::Scalar((*z).into()),
        FiberValue::Matrix(m) => WireValue::Matrix(
            m.data()
                .chunks(m.dim())
                .map(|row| row.iter().map(|&z| z.into()).collect())
                .collect(),
        ),
    }
}

fn index_from_wire(idx: &[i64], n: usize, field: String) -> Result<MultiIndex> {
    if idx.len() != n {
        return Err(Error::parse(field, format!("index has length {}, expected n = {n}", idx.len())));
    }
    Ok(MultiIndex::new(idx.to_vec()))
}

impl WireElement {
    pub fn from_element(a: &GradedElement) -> Self {
        WireElement {
            n: a.rank(),
            fiber: WireFiber::from_kind(a.fiber()),
            coeffs: a
                .iter()
                .map(|(p, v)| WireCoeff {
                    idx: p.entries().to_vec(),
                    value: value_to_wire(v),
                })
                .collect(),
        }
    }

    pub fn to_element(&self) -> Result<GradedElement> {
        let kind = self.fiber.to_kind()?;
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let p = index_from_wire(&c.idx, self.n, format!("coeffs[{i}].idx"))?;
                Ok((p, value_from_wire(&c.value, kind, &format!("coeffs[{i}].value"))?))
            })
            .collect::<Result<Vec<_>>>()?;
        GradedElement::from_terms(self.n, kind, terms).map_err(at("coeffs".into()))
    }
}

impl WireModule {
    pub fn from_module(m: &ModuleElement) -> Self {
        WireModule {
            n: m.rank(),
            m: m.dim(),
            coeffs: m
                .iter()
                .map(|(p, v)| WireModuleCoeff {
                    idx: p.entries().to_vec(),
                    vec: v.iter().map(|&z| z.into()).collect(),
                })
                .collect(),
        }
    }

    pub fn to_module(&self) -> Result<ModuleElement> {
        if self.m == 0 {
            return Err(Error::parse("m", "module fiber dimension must be >= 1"));
        }
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let p = index_from_wire(&c.idx, self.n, format!("coeffs[{i}].idx"))?;
                if c.vec.len() != self.m {
                    return Err(Error::parse(
                        format!("coeffs[{i}].vec"),
                        format!("vector has length {}, expected m = {}", c.vec.len(), self.m),
                    ));
                }
                Ok((p, c.vec.iter().map(|&z| z.into()).collect()))
            })
            .collect::<Result<Vec<_>>>()?;
        ModuleElement::from_terms(self.n, self.m, terms).map_err(at("coeffs".into()))
    }
}

impl WireGrid {
    pub fn from_grid(g: &BaseGrid) -> Self {
        WireGrid {
            id: g.id().to_string(),
            points: g
                .points()
                .iter()
                .map(|p| WirePoint {
                    label: p.label.clone(),
                    coord: p.coord.clone(),
                })
                .collect(),
        }
    }

    pub fn to_grid(&self) -> Result<BaseGrid> {
        let points = self
            .points
            .iter()
            .map(|p| GridPoint {
                label: p.label.clone(),
                coord: p.coord.clone(),
            })
            .collect();
        BaseGrid::new(self.id.clone(), points).map_err(at("grid.points".into()))
    }
}

impl WireField {
    pub fn from_field(f: &FieldElement) -> Self {
        WireField {
            grid: WireGrid::from_grid(f.grid()),
            sections: f.sections().iter().map(WireElement::from_element).collect(),
        }
    }

    pub fn to_field(&self) -> Result<FieldElement> {
        let grid = Arc::new(self.grid.to_grid()?);
        let sections = self
            .sections
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.to_element().map_err(|e| match e {
                    Error::Parse { field, message } => Error::parse(format!("sections[{i}].{field}"), message),
                    other => Error::parse(format!("sections[{i}]"), other.to_string()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FieldElement::new(grid, sections).map_err(at("sections".into()))
    }
}

impl WireFamily {
    pub fn from_family(f: &CocycleFamily) -> Self {
        WireFamily {
            grid: f.grid().id().to_string(),
            forms: f.forms().iter().map(WireSkewForm::from_form).collect(),
        }
    }

    /// Binds the forms to `grid`, whose id must match.
    pub fn to_family(&self, grid: Arc<BaseGrid>) -> Result<CocycleFamily> {
        if self.grid != grid.id() {
            return Err(Error::parse(
                "grid",
                format!("family is for grid `{}`, field uses `{}`", self.grid, grid.id()),
            ));
        }
        let forms = self
            .forms
            .iter()
            .enumerate()
            .map(|(i, f)| f.to_form().map_err(|e| Error::parse(format!("forms[{i}]"), e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        CocycleFamily::new(grid, forms).map_err(at("forms".into()))
    }
}

impl WireBands {
    pub fn new(flux: Flux, bands: &[(f64, f64)]) -> Self {
        WireBands {
            flux: flux.to_string(),
            bands: bands.iter().map(|&(lo, hi)| [lo, hi]).collect(),
        }
    }
}

pub fn parse_element(text: &str) -> Result<GradedElement> {
    decode::<WireElement>(text)?.to_element()
}

pub fn parse_skew_form(text: &str) -> Result<SkewForm> {
    decode::<WireSkewForm>(text)?.to_form()
}

pub fn parse_module(text: &str) -> Result<ModuleElement> {
    decode::<WireModule>(text)?.to_module()
}

pub fn parse_field(text: &str) -> Result<FieldElement> {
    decode::<WireField>(text)?.to_field()
}

/// Rounds every floating-point number in `v` to `digits` significant
/// digits. Integers are left alone.
pub fn round_numbers(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_significant(x, digits)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|x| round_numbers(x, digits)),
        Value::Object(map) => map.values_mut().for_each(|x| round_numbers(x, digits)),
        _ => {}
    }
}

/// `x` rounded to `digits` significant decimal digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}
