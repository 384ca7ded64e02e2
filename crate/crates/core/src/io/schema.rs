//! JSON problem files.
//!
//! Matrices are `{rows, cols, re, im}` with row-major arrays; `im` may be
//! omitted for real data. A tuple is a list of square matrices of one size.

use serde::{Deserialize, Serialize};

use crate::algebra::{CMat, HermitianMatrix, HermitianTuple, LinearPencil, NCPolynomial, NCWord};
use crate::error::{Error, Result};
use crate::free::Spectrahedrop;
use crate::possatz::Certificate;

pub const FORMAT_VERSION: &str = "1";

fn at(field: &str, e: Error) -> Error {
    Error::At {
        field: field.to_string(),
        source: Box::new(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<f64>,
}

impl MatrixJson {
    pub fn from_cmat(m: &CMat) -> Self {
        let (rows, cols) = m.shape();
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        if im.iter().all(|&v| v == 0.0) {
            im.clear();
        }
        MatrixJson { rows, cols, re, im }
    }

    pub fn from_hermitian(h: &HermitianMatrix) -> Self {
        Self::from_cmat(h.as_matrix())
    }

    pub fn to_cmat(&self, field: &str) -> Result<CMat> {
        let n = self.rows * self.cols;
        if self.re.len() != n {
            return Err(at(
                field,
                Error::dims(format!("{}x{} matrix with {} real entries", self.rows, self.cols, self.re.len())),
            ));
        }
        if !self.im.is_empty() && self.im.len() != n {
            return Err(at(
                field,
                Error::dims(format!("{}x{} matrix with {} imaginary entries", self.rows, self.cols, self.im.len())),
            ));
        }
        if self.re.iter().chain(&self.im).any(|v| !v.is_finite()) {
            return Err(at(field, Error::Invalid("non-finite entry".into())));
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| {
            let k = i * self.cols + j;
            num_complex::Complex64::new(self.re[k], self.im.get(k).copied().unwrap_or(0.0))
        }))
    }

    pub fn to_hermitian(&self, field: &str) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.to_cmat(field)?).map_err(|e| at(field, e))
    }
}

pub fn tuple_to_json(t: &HermitianTuple) -> Vec<MatrixJson> {
    t.mats().iter().map(MatrixJson::from_hermitian).collect()
}

pub fn tuple_from_json(ms: &[MatrixJson], field: &str) -> Result<HermitianTuple> {
    if ms.is_empty() {
        return Err(at(field, Error::Invalid("empty tuple".into())));
    }
    let mats = ms
        .iter()
        .enumerate()
        .map(|(i, m)| m.to_hermitian(&format!("{field}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    HermitianTuple::from_mats(mats).map_err(|e| at(field, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PencilJson {
    pub constant: MatrixJson,
    pub x: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub y: Vec<MatrixJson>,
}

impl PencilJson {
    pub fn from_pencil(l: &LinearPencil) -> Self {
        PencilJson {
            constant: MatrixJson::from_hermitian(l.constant()),
            x: l.x_coeffs().iter().map(MatrixJson::from_hermitian).collect(),
            y: l.y_coeffs().iter().map(MatrixJson::from_hermitian).collect(),
        }
    }

    pub fn to_pencil(&self, field: &str) -> Result<LinearPencil> {
        let constant = self.constant.to_hermitian(&format!("{field}.constant"))?;
        let part = |ms: &[MatrixJson], name: &str| {
            ms.iter()
                .enumerate()
                .map(|(i, m)| m.to_hermitian(&format!("{field}.{name}[{i}]")))
                .collect::<Result<Vec<_>>>()
        };
        LinearPencil::new(constant, part(&self.x, "x")?, part(&self.y, "y")?).map_err(|e| at(field, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DropJson {
    pub lift: PencilJson,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub equalities: Vec<PencilJson>,
}

impl DropJson {
    pub fn from_drop(k: &Spectrahedrop) -> Self {
        DropJson {
            lift: PencilJson::from_pencil(k.lift()),
            equalities: k.equalities().iter().map(PencilJson::from_pencil).collect(),
        }
    }

    pub fn to_drop(&self, field: &str) -> Result<Spectrahedrop> {
        let lift = self.lift.to_pencil(&format!("{field}.lift"))?;
        let eqs = self
            .equalities
            .iter()
            .enumerate()
            .map(|(i, p)| p.to_pencil(&format!("{field}.equalities[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        if eqs.is_empty() {
            Ok(Spectrahedrop::new(lift))
        } else {
            Spectrahedrop::with_equalities(lift, eqs).map_err(|e| at(field, e))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub word: Vec<usize>,
    pub coefficient: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialJson {
    pub nvars: usize,
    pub rows: usize,
    pub cols: usize,
    pub terms: Vec<TermJson>,
}

impl PolynomialJson {
    pub fn from_polynomial(p: &NCPolynomial) -> Self {
        let (rows, cols) = p.shape();
        PolynomialJson {
            nvars: p.nvars(),
            rows,
            cols,
            terms: p
                .terms()
                .map(|(w, b)| TermJson {
                    word: w.letters().to_vec(),
                    coefficient: MatrixJson::from_cmat(b),
                })
                .collect(),
        }
    }

    pub fn to_polynomial(&self, field: &str) -> Result<NCPolynomial> {
        let terms = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| Ok((NCWord::new(t.word.clone()), t.coefficient.to_cmat(&format!("{field}.terms[{i}]"))?)))
            .collect::<Result<Vec<_>>>()?;
        NCPolynomial::from_terms(self.nvars, self.rows, self.cols, terms).map_err(|e| at(field, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    pub mu: usize,
    pub r: usize,
    pub s: MatrixJson,
    pub gram: MatrixJson,
}

impl CertificateJson {
    pub fn from_certificate(c: &Certificate) -> Self {
        CertificateJson {
            mu: c.mu,
            r: c.r,
            s: MatrixJson::from_hermitian(&c.s),
            gram: MatrixJson::from_hermitian(&c.gram),
        }
    }

    pub fn to_certificate(&self, field: &str) -> Result<Certificate> {
        Ok(Certificate::new(
            self.mu,
            self.r,
            self.s.to_hermitian(&format!("{field}.s"))?,
            self.gram.to_hermitian(&format!("{field}.gram"))?,
        ))
    }
}

/// Kind tag and kind-specific payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Payload {
    Membership { pencil: PencilJson, point: Vec<MatrixJson> },
    Interpolate { a: Vec<MatrixJson>, b: Vec<MatrixJson> },
    Dominate { dominating: PencilJson, dominated: PencilJson },
    Polar { omega: Vec<MatrixJson>, point: Vec<MatrixJson> },
    Drop { drop: DropJson, point: Vec<MatrixJson> },
    DropPolar { drop: DropJson, point: Vec<MatrixJson> },
    Tracial { b: Vec<MatrixJson>, y: Vec<MatrixJson> },
    Thull { generators: Vec<Vec<MatrixJson>>, target: Vec<MatrixJson> },
    Cthull { generators: Vec<Vec<MatrixJson>>, target: Vec<MatrixJson> },
    Exsitu { omega: Vec<MatrixJson>, y: Vec<MatrixJson> },
    PossatzVerify { polynomial: PolynomialJson, certificate: CertificateJson, pencil: PencilJson },
    PossatzSearch { polynomial: PolynomialJson, pencil: PencilJson, r: usize },
    Bounded { pencil: PencilJson },
    Monicize { pencil: PencilJson, point: Vec<f64> },
    HullUnion { drops: Vec<DropJson>, point: Vec<MatrixJson> },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Membership { .. } => "membership",
            Payload::Interpolate { .. } => "interpolate",
            Payload::Dominate { .. } => "dominate",
            Payload::Polar { .. } => "polar",
            Payload::Drop { .. } => "drop",
            Payload::DropPolar { .. } => "drop-polar",
            Payload::Tracial { .. } => "tracial",
            Payload::Thull { .. } => "thull",
            Payload::Cthull { .. } => "cthull",
            Payload::Exsitu { .. } => "exsitu",
            Payload::PossatzVerify { .. } => "possatz-verify",
            Payload::PossatzSearch { .. } => "possatz-search",
            Payload::Bounded { .. } => "bounded",
            Payload::Monicize { .. } => "monicize",
            Payload::HullUnion { .. } => "hull-union",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    /// Interpolation mode, domination form, or polar form, by kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub version: String,
    #[serde(flatten)]
    pub payload: Payload,
    #[serde(default)]
    pub options: OptionsJson,
}

impl ProblemFile {
    pub fn new(payload: Payload) -> Self {
        ProblemFile {
            version: FORMAT_VERSION.to_string(),
            payload,
            options: OptionsJson::default(),
        }
    }

    pub fn with_mode(mut self, mode: &str) -> Self {
        self.options.mode = Some(mode.to_string());
        self
    }
}

/// Parses and validates a problem file. Syntax and schema errors carry the
/// JSON path and line/column; semantic errors carry the payload field.
pub fn parse_problem(bytes: &[u8]) -> Result<ProblemFile> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        locus: format!("byte {}", e.valid_up_to()),
        message: "input is not UTF-8".into(),
    })?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let p: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse {
            locus: format!("{path} (line {}, column {})", inner.line(), inner.column()),
            message: inner.to_string(),
        }
    })?;
    if p.version != FORMAT_VERSION {
        return Err(Error::Parse {
            locus: "version".into(),
            message: format!("unsupported format version {:?}", p.version),
        });
    }
    validate(&p.payload)?;
    Ok(p)
}

/// Builds every domain object once so that bad matrices are reported at
/// parse time.
fn validate(p: &Payload) -> Result<()> {
    match p {
        Payload::Membership { pencil, point } => {
            pencil.to_pencil("payload.pencil")?;
            tuple_from_json(point, "payload.point")?;
        }
        Payload::Interpolate { a, b } => {
            tuple_from_json(a, "payload.a")?;
            tuple_from_json(b, "payload.b")?;
        }
        Payload::Dominate { dominating, dominated } => {
            dominating.to_pencil("payload.dominating")?;
            dominated.to_pencil("payload.dominated")?;
        }
        Payload::Polar { omega, point } => {
            tuple_from_json(omega, "payload.omega")?;
            tuple_from_json(point, "payload.point")?;
        }
        Payload::Drop { drop, point } | Payload::DropPolar { drop, point } => {
            drop.to_drop("payload.drop")?;
            tuple_from_json(point, "payload.point")?;
        }
        Payload::Tracial { b, y } => {
            tuple_from_json(b, "payload.b")?;
            tuple_from_json(y, "payload.y")?;
        }
        Payload::Thull { generators, target } | Payload::Cthull { generators, target } => {
            if generators.is_empty() {
                return Err(at("payload.generators", Error::Invalid("empty generator list".into())));
            }
            for (i, g) in generators.iter().enumerate() {
                tuple_from_json(g, &format!("payload.generators[{i}]"))?;
            }
            tuple_from_json(target, "payload.target")?;
        }
        Payload::Exsitu { omega, y } => {
            tuple_from_json(omega, "payload.omega")?;
            tuple_from_json(y, "payload.y")?;
        }
        Payload::PossatzVerify {
            polynomial,
            certificate,
            pencil,
        } => {
            polynomial.to_polynomial("payload.polynomial")?;
            certificate.to_certificate("payload.certificate")?;
            pencil.to_pencil("payload.pencil")?;
        }
        Payload::PossatzSearch { polynomial, pencil, .. } => {
            polynomial.to_polynomial("payload.polynomial")?;
            pencil.to_pencil("payload.pencil")?;
        }
        Payload::Bounded { pencil } | Payload::Monicize { pencil, .. } => {
            pencil.to_pencil("payload.pencil")?;
        }
        Payload::HullUnion { drops, point } => {
            if drops.is_empty() {
                return Err(at("payload.drops", Error::Invalid("empty drop list".into())));
            }
            for (i, d) in drops.iter().enumerate() {
                d.to_drop(&format!("payload.drops[{i}]"))?;
            }
            tuple_from_json(point, "payload.point")?;
        }
    }
    Ok(())
}
