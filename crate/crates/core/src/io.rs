//! JSON encodings of scalars, points, forms and matrices.
//!
//! Rationals are strings `"p/q"`, complex floats are `[re, im]` pairs and
//! elements of `Q(sqrt u, sqrt w)` are four rational strings over the basis
//! `1, sqrt u, sqrt w, sqrt u sqrt w`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::field::{format_rational, parse_rational, Field};
use crate::algebra::{BinaryForm, Biquad, Matrix, Mode, ProjParam, Radicands, Rational};
use crate::error::{Error, Result};
use crate::pencil::PencilOfQuadrics;
use crate::variety::{AnyPoint, PointOnX};

/// A scalar as it may appear in input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Int(i64),
    Str(String),
    Complex([f64; 2]),
    Quad([String; 4]),
}

impl ScalarJson {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            ScalarJson::Int(n) => Ok(Rational::from_integer((*n).into())),
            ScalarJson::Str(s) => parse_rational(s),
            _ => Err(Error::Parse(format!("expected a rational, got {self:?}"))),
        }
    }

    pub fn to_complex(&self) -> Result<Complex64> {
        match self {
            ScalarJson::Complex([re, im]) => Ok(Complex64::new(*re, *im)),
            other => other.to_rational().map(|q| q.to_complex()),
        }
    }

    pub fn to_biquad(&self, ctx: Option<&Arc<Radicands>>) -> Result<Biquad> {
        match (self, ctx) {
            (ScalarJson::Quad(c), Some(ctx)) => {
                let q = [
                    parse_rational(&c[0])?,
                    parse_rational(&c[1])?,
                    parse_rational(&c[2])?,
                    parse_rational(&c[3])?,
                ];
                Ok(Biquad::new(ctx, q))
            }
            (ScalarJson::Quad(_), None) => Err(Error::Parse("coordinates need radicands".into())),
            (other, _) => other.to_rational().map(Biquad::rational),
        }
    }
}

pub fn rational_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn biquad_json(b: &Biquad) -> Value {
    Value::Array(b.coords().iter().map(rational_json).collect())
}

/// Serialization of the scalar types used in reports.
pub trait ToJson {
    fn to_json(&self) -> Value;
}

impl ToJson for Rational {
    fn to_json(&self) -> Value {
        rational_json(self)
    }
}

impl ToJson for Complex64 {
    fn to_json(&self) -> Value {
        complex_json(*self)
    }
}

impl ToJson for Biquad {
    fn to_json(&self) -> Value {
        biquad_json(self)
    }
}

pub fn vec_json<F: ToJson>(v: &[F]) -> Value {
    Value::Array(v.iter().map(ToJson::to_json).collect())
}

pub fn form_json<F: Field + ToJson>(f: &BinaryForm<F>) -> Value {
    json!({ "degree": f.degree(), "coeffs": vec_json(f.coeffs()) })
}

pub fn param_json(p: &ProjParam<Complex64>) -> Value {
    json!([complex_json(p.a), complex_json(p.b)])
}

/// `{"lambdas": [...], "coords": [...], "mode": ..., "radicands": [u, w]?}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<String>>,
    pub coords: Vec<ScalarJson>,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radicands: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covector: Option<Vec<ScalarJson>>,
}

impl PointJson {
    pub fn from_exact(x: &PointOnX<Biquad>) -> Self {
        let ctx = x.coords().iter().find_map(|c| c.context().cloned());
        PointJson {
            lambdas: Some(x.pencil().to_json().lambdas),
            coords: x
                .coords()
                .iter()
                .map(|c| ScalarJson::Quad(c.coords().clone().map(|q| format_rational(&q))))
                .collect(),
            mode: Mode::Exact,
            radicands: ctx.map(|r| [format_rational(&r.u), format_rational(&r.w)]),
            covector: None,
        }
    }

    pub fn from_float(x: &PointOnX<Complex64>) -> Self {
        PointJson {
            lambdas: Some(x.pencil().to_json().lambdas),
            coords: x
                .coords()
                .iter()
                .map(|z| ScalarJson::Complex([z.re, z.im]))
                .collect(),
            mode: Mode::Float,
            radicands: None,
            covector: None,
        }
    }

    pub fn from_any(x: &AnyPoint) -> Self {
        match x {
            AnyPoint::Exact(p) => Self::from_exact(p),
            AnyPoint::Float(p) => Self::from_float(p),
        }
    }

    /// The pencil stored in the file, or `fallback`.
    pub fn pencil(&self, fallback: Option<&Arc<PencilOfQuadrics>>) -> Result<Arc<PencilOfQuadrics>> {
        match (&self.lambdas, fallback) {
            (Some(l), _) => Ok(Arc::new(PencilOfQuadrics::parse(l)?)),
            (None, Some(p)) => Ok(p.clone()),
            (None, None) => Err(Error::Parse("point file has no lambdas".into())),
        }
    }

    pub fn context(&self) -> Result<Option<Arc<Radicands>>> {
        self.radicands
            .as_ref()
            .map(|[u, w]| Radicands::new(parse_rational(u)?, parse_rational(w)?))
            .transpose()
    }

    pub fn to_point(&self, p: &Arc<PencilOfQuadrics>) -> Result<AnyPoint> {
        match self.mode {
            Mode::Exact => {
                let ctx = self.context()?;
                let coords = self
                    .coords
                    .iter()
                    .map(|c| c.to_biquad(ctx.as_ref()))
                    .collect::<Result<_>>()?;
                Ok(AnyPoint::Exact(PointOnX::new(p.clone(), coords)?))
            }
            Mode::Float => {
                let coords = self
                    .coords
                    .iter()
                    .map(ScalarJson::to_complex)
                    .collect::<Result<_>>()?;
                Ok(AnyPoint::Float(PointOnX::new(p.clone(), coords)?))
            }
        }
    }
}

/// `{"matrix": [[...], ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub matrix: Vec<Vec<ScalarJson>>,
}

/// A parsed matrix in either mode; float when any entry is a pair.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    Exact(Matrix<Rational>),
    Float(Matrix<Complex64>),
}

impl MatrixJson {
    pub fn parse(&self) -> Result<AnyMatrix> {
        let float = self
            .matrix
            .iter()
            .flatten()
            .any(|e| matches!(e, ScalarJson::Complex(_)));
        if float {
            let rows = self
                .matrix
                .iter()
                .map(|r| r.iter().map(ScalarJson::to_complex).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyMatrix::Float(Matrix::from_rows(rows)?))
        } else {
            let rows = self
                .matrix
                .iter()
                .map(|r| r.iter().map(ScalarJson::to_rational).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyMatrix::Exact(Matrix::from_rows(rows)?))
        }
    }
}
