//! JSON inputs and canonical JSON/CSV outputs.
//!
//! Algebra files use 1-based indices:
//! `{"dim": 3, "brackets": [{"j": 1, "k": 2, "l": 3, "alpha": 1}]}`.
//! `alpha` and metric entries may be JSON integers or `"p/q"` strings (exact)
//! or JSON floats (inexact).

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{BracketEntry, BracketSpec, DiagonalMetric};
use crate::error::Error;
use crate::flow::{monomial_value, Trajectory};
use crate::linalg::{format_rational, parse_rational, rat_int, Rational};
use crate::projective::ProjectiveTrajectory;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON at `{field}` (line {line}, column {column}): {message}")]
    Json {
        field: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid value at `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error(transparent)]
    Invalid(#[from] Error),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn exact(&self, field: &str) -> IoResult<Option<Rational>> {
        match self {
            Number::Int(i) => Ok(Some(rat_int(*i))),
            Number::Float(_) => Ok(None),
            Number::Text(s) => parse_rational(s).map(Some).ok_or_else(|| IoError::Schema {
                field: field.into(),
                message: format!("`{s}` is not a rational of the form p or p/q"),
            }),
        }
    }

    fn float(&self) -> Option<f64> {
        match self {
            Number::Float(f) => Some(*f),
            _ => None,
        }
    }

    fn from_value(exact: Option<&Rational>, value: f64) -> Self {
        match exact {
            Some(r) if r.is_integer() => match i64::try_from(r.numer().clone()) {
                Ok(i) => Number::Int(i),
                Err(_) => Number::Text(format_rational(r)),
            },
            Some(r) => Number::Text(format_rational(r)),
            None => Number::Float(value),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BracketJson {
    j: usize,
    k: usize,
    l: usize,
    alpha: Number,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraJson {
    dim: usize,
    brackets: Vec<BracketJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricJson {
    q: Vec<Number>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GramJson {
    #[serde(rename = "U")]
    u: Vec<Vec<i64>>,
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> IoResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        IoError::Json { field, line: inner.line(), column: inner.column(), message: inner.to_string() }
    })
}

fn read(path: &Path) -> IoResult<String> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.display().to_string(), source })
}

pub fn parse_algebra(text: &str) -> IoResult<BracketSpec> {
    let doc: AlgebraJson = from_json(text)?;
    let mut entries = Vec::with_capacity(doc.brackets.len());
    for (i, b) in doc.brackets.iter().enumerate() {
        for idx in [b.j, b.k, b.l] {
            if idx == 0 {
                return Err(Error::IndexOutOfRange { index: 0, dim: doc.dim }.into());
            }
        }
        let field = format!("brackets[{i}].alpha");
        let (j, k, l) = (b.j - 1, b.k - 1, b.l - 1);
        entries.push(match b.alpha.exact(&field)? {
            Some(r) => BracketEntry::rational(j, k, l, r),
            None => {
                let v = b.alpha.float().expect("inexact alpha is a float");
                if !v.is_finite() {
                    return Err(IoError::Schema { field, message: "alpha must be finite".into() });
                }
                BracketEntry::real(j, k, l, v)
            }
        });
    }
    Ok(BracketSpec::new(doc.dim, entries)?)
}

pub fn parse_metric(text: &str) -> IoResult<DiagonalMetric> {
    let doc: MetricJson = from_json(text)?;
    let exact: Vec<Option<Rational>> = doc
        .q
        .iter()
        .enumerate()
        .map(|(i, v)| v.exact(&format!("q[{i}]")))
        .collect::<IoResult<_>>()?;
    if exact.iter().all(Option::is_some) {
        Ok(DiagonalMetric::exact(exact.into_iter().flatten().collect())?)
    } else {
        let q = doc
            .q
            .iter()
            .zip(&exact)
            .map(|(n, e)| match e {
                Some(r) => crate::linalg::rat_to_f64(r),
                None => n.float().expect("inexact entry is a float"),
            })
            .collect();
        Ok(DiagonalMetric::new(q)?)
    }
}

pub fn parse_gram(text: &str) -> IoResult<Vec<Vec<i64>>> {
    let doc: GramJson = from_json(text)?;
    let m = doc.u.len();
    if m == 0 || doc.u.iter().any(|r| r.len() != m) {
        return Err(Error::BadGram.into());
    }
    Ok(doc.u)
}

pub fn load_algebra(path: &Path) -> IoResult<BracketSpec> {
    parse_algebra(&read(path)?)
}

pub fn load_metric(path: &Path) -> IoResult<DiagonalMetric> {
    parse_metric(&read(path)?)
}

pub fn load_gram(path: &Path) -> IoResult<Vec<Vec<i64>>> {
    parse_gram(&read(path)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

/// Canonical algebra JSON; `parse_algebra` followed by this is idempotent.
pub fn export_algebra(spec: &BracketSpec) -> String {
    let doc = AlgebraJson {
        dim: spec.dim(),
        brackets: spec
            .entries()
            .iter()
            .map(|e| {
                let (j, k, l) = e.triple.one_based();
                BracketJson { j, k, l, alpha: Number::from_value(e.exact.as_ref(), e.alpha) }
            })
            .collect(),
    };
    to_json(&doc)
}

pub fn export_metric(metric: &DiagonalMetric) -> String {
    let q = match metric.exact_values() {
        Some(ex) => ex.iter().map(|r| Number::from_value(Some(r), 0.0)).collect(),
        None => metric.values().iter().map(|&v| Number::Float(v)).collect(),
    };
    to_json(&MetricJson { q })
}

pub fn export_gram(u: &[Vec<i64>]) -> String {
    to_json(&GramJson { u: u.to_vec() })
}

/// Fixed 17-significant-digit formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(out: &mut String, first: &str, groups: &[(&str, usize)]) {
    out.push_str(first);
    for (name, count) in groups {
        for i in 1..=*count {
            let _ = write!(out, ",{name}_{i}");
        }
    }
    out.push('\n');
}

fn row(out: &mut String, values: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(',');
        }
        out.push_str(&fmt_f64(v));
        first = false;
    }
    out.push('\n');
}

/// `t,q_1..q_n,a_1..a_m,inv_1..inv_k`, where `inv_i` is the value of the
/// i-th conserved monomial.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let first = traj.samples.first();
    let n = first.map_or(0, |s| s.q.len());
    let m = first.map_or(0, |s| s.a.len());
    let mut out = String::new();
    header(&mut out, "t", &[("q", n), ("a", m), ("inv", traj.invariants.len())]);
    for s in &traj.samples {
        let inv = traj.invariants.iter().map(|d| monomial_value(&s.q, d));
        row(&mut out, std::iter::once(s.t).chain(s.q.iter().copied()).chain(s.a.iter().copied()).chain(inv));
    }
    out
}

/// `tau,s_1..s_{m-1},eta_1..eta_{m-1}`.
pub fn projective_csv(traj: &ProjectiveTrajectory) -> String {
    let d = traj.states.first().map_or(0, |s| s.s.len());
    let mut out = String::new();
    header(&mut out, "tau", &[("s", d), ("eta", d)]);
    for (t, st) in traj.times.iter().zip(&traj.states) {
        row(&mut out, std::iter::once(*t).chain(st.s.iter().copied()).chain(st.eta.iter().copied()));
    }
    out
}

/// `tau,a_1..a_m` for the normalized bracket flow.
pub fn simplex_csv(samples: &[(f64, Vec<f64>)]) -> String {
    let m = samples.first().map_or(0, |s| s.1.len());
    let mut out = String::new();
    header(&mut out, "tau", &[("a", m)]);
    for (t, a) in samples {
        row(&mut out, std::iter::once(*t).chain(a.iter().copied()));
    }
    out
}
