//! Metric nilpotent Lie algebras given by structure constants over an
//! orthogonal basis, and the root/Gram data derived from them.
//!
//! Indices are 0-based in the API; files and reports use 1-based indices.

use std::fmt;

use num::{FromPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, rat_to_f64, Field, Rational};

/// An index triple `(j, k, l)` with `j < k`, meaning `[x_j, x_k]` has a
/// nonzero `x_l` component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Triple {
    pub j: usize,
    pub k: usize,
    pub l: usize,
}

impl Triple {
    pub fn new(j: usize, k: usize, l: usize) -> Self {
        Self { j, k, l }
    }

    pub fn one_based(&self) -> (usize, usize, usize) {
        (self.j + 1, self.k + 1, self.l + 1)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (j, k, l) = self.one_based();
        write!(f, "({j},{k},{l})")
    }
}

/// One nonzero structure constant. `exact` is present when the value was
/// given as a rational.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketEntry {
    pub triple: Triple,
    pub alpha: f64,
    pub exact: Option<Rational>,
}

impl BracketEntry {
    pub fn real(j: usize, k: usize, l: usize, alpha: f64) -> Self {
        Self {
            triple: Triple::new(j, k, l),
            alpha,
            exact: None,
        }
    }

    pub fn rational(j: usize, k: usize, l: usize, alpha: Rational) -> Self {
        Self {
            triple: Triple::new(j, k, l),
            alpha: rat_to_f64(&alpha),
            exact: Some(alpha),
        }
    }
}

/// Sparse structure constants `alpha_{jk}^l` over a fixed basis. Entries are
/// kept in dictionary order on `(j,k,l)`; antisymmetric completion is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketSpec {
    dim: usize,
    entries: Vec<BracketEntry>,
}

impl BracketSpec {
    pub fn new(dim: usize, mut entries: Vec<BracketEntry>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        for e in &entries {
            let Triple { j, k, l } = e.triple;
            for idx in [j, k, l] {
                if idx >= dim {
                    return Err(Error::IndexOutOfRange { index: idx + 1, dim });
                }
            }
            if j >= k {
                return Err(Error::UnorderedPair { j: j + 1, k: k + 1, l: l + 1 });
            }
            let zero = match &e.exact {
                Some(r) => r.is_zero(),
                None => e.alpha == 0.0 || !e.alpha.is_finite(),
            };
            if zero {
                return Err(Error::ZeroCoefficient { j: j + 1, k: k + 1, l: l + 1 });
            }
        }
        entries.sort_by_key(|e| e.triple);
        if let Some(w) = entries.windows(2).find(|w| w[0].triple == w[1].triple) {
            let (j, k, l) = w[0].triple.one_based();
            return Err(Error::DuplicateEntry { j, k, l });
        }
        Ok(Self { dim, entries })
    }

    /// Builds a spec from 1-based integer data, all constants exact.
    pub fn from_one_based(dim: usize, brackets: &[(usize, usize, usize, i64)]) -> Result<Self> {
        let mut entries = Vec::with_capacity(brackets.len());
        for &(j, k, l, alpha) in brackets {
            if j == 0 || k == 0 || l == 0 {
                return Err(Error::IndexOutOfRange { index: 0, dim });
            }
            entries.push(BracketEntry::rational(j - 1, k - 1, l - 1, linalg::rat_int(alpha)));
        }
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[BracketEntry] {
        &self.entries
    }

    pub fn is_abelian(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when every structure constant is rational.
    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.exact.is_some())
    }

    pub fn triples(&self) -> Vec<Triple> {
        self.entries.iter().map(|e| e.triple).collect()
    }

    fn exact_alphas(&self) -> Option<Vec<Rational>> {
        self.entries.iter().map(|e| e.exact.clone()).collect()
    }

    /// Dense table `c[j][k][l]` with antisymmetric completion.
    pub(crate) fn table<T: Field>(&self, alphas: &[T]) -> Vec<Vec<Vec<T>>> {
        let n = self.dim;
        let mut c = vec![vec![vec![T::zero(); n]; n]; n];
        for (e, a) in self.entries.iter().zip(alphas) {
            let Triple { j, k, l } = e.triple;
            c[j][k][l] = a.clone();
            c[k][j][l] = -a.clone();
        }
        c
    }

    pub(crate) fn float_table(&self) -> Vec<Vec<Vec<f64>>> {
        let alphas: Vec<f64> = self.entries.iter().map(|e| e.alpha).collect();
        self.table(&alphas)
    }
}

/// Diagonal inner product `sum q_i dx^i (x) dx^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMetric {
    q: Vec<f64>,
    exact: Option<Vec<Rational>>,
}

impl DiagonalMetric {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if let Some((i, &v)) = q.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositive { what: "metric", index: i + 1, value: v });
        }
        Ok(Self { q, exact: None })
    }

    pub fn exact(q: Vec<Rational>) -> Result<Self> {
        let floats: Vec<f64> = q.iter().map(rat_to_f64).collect();
        if let Some((i, r)) = q.iter().enumerate().find(|(_, r)| !num::Signed::is_positive(*r)) {
            return Err(Error::NonPositive { what: "metric", index: i + 1, value: rat_to_f64(r) });
        }
        Ok(Self { q: floats, exact: Some(q) })
    }

    pub fn ones(n: usize) -> Self {
        Self::exact(vec![linalg::rat_int(1); n]).expect("positive")
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }

    pub fn exact_values(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// `lambda * q`. Exactness is kept only when `lambda` is representable.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let q: Vec<f64> = self.q.iter().map(|v| v * lambda).collect();
        match (&self.exact, Rational::from_f64(lambda)) {
            (Some(ex), Some(l)) => Self::exact(ex.iter().map(|v| v * &l).collect()),
            _ => Self::new(q),
        }
    }
}

/// Root matrix `Y` and Gram matrix `U = Y Y^T`, with rows in dictionary
/// order of the index set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSystem {
    n: usize,
    triples: Vec<Triple>,
    y: Vec<Vec<i64>>,
    u: Vec<Vec<i64>>,
}

impl RootSystem {
    pub fn from_triples(n: usize, triples: Vec<Triple>) -> Self {
        let y: Vec<Vec<i64>> = triples
            .iter()
            .map(|t| {
                let mut row = vec![0i64; n];
                row[t.j] += 1;
                row[t.k] += 1;
                row[t.l] -= 1;
                row
            })
            .collect();
        let u = y
            .iter()
            .map(|a| y.iter().map(|b| a.iter().zip(b).map(|(x, z)| x * z).sum()).collect())
            .collect();
        Self { n, triples, y, u }
    }

    /// Root system with no roots; flows on it are constant.
    pub fn abelian(n: usize) -> Self {
        Self::from_triples(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.triples.len()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn root_matrix(&self) -> &[Vec<i64>] {
        &self.y
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.u
    }
}

/// Squares of the orthonormal-basis structure constants, in dictionary order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureVector(pub Vec<f64>);

impl StructureVector {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if let Some((i, &v)) = a.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::NonPositive { what: "structure vector", index: i + 1, value: v });
        }
        Ok(Self(a))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiViolation {
    /// Basis triple `a < b < c` (0-based).
    pub indices: (usize, usize, usize),
    pub residual: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiReport {
    pub exact: bool,
    pub violations: Vec<JacobiViolation>,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Residual of the Jacobi sum `[x_a,[x_b,x_c]] + [x_b,[x_c,x_a]] + [x_c,[x_a,x_b]]`.
fn jacobi_sum<T: Field>(c: &[Vec<Vec<T>>], a: usize, b: usize, d: usize) -> Vec<T> {
    let n = c.len();
    let mut out = vec![T::zero(); n];
    for (x, y, z) in [(a, b, d), (b, d, a), (d, a, b)] {
        for l in 0..n {
            let inner = &c[y][z][l];
            if inner.negligible() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(&c[x][l]) {
                *o = o.clone() + inner.clone() * v.clone();
            }
        }
    }
    out
}

fn jacobi_violations<T: Field>(
    c: &[Vec<Vec<T>>],
    to_f64: impl Fn(&T) -> f64,
    nonzero: impl Fn(&[T]) -> bool,
) -> Vec<JacobiViolation> {
    let n = c.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for d in b + 1..n {
                let r = jacobi_sum(c, a, b, d);
                if nonzero(&r) {
                    out.push(JacobiViolation {
                        indices: (a, b, d),
                        residual: r.iter().map(&to_f64).collect(),
                    });
                }
            }
        }
    }
    out
}

/// Checks the Jacobi identity on all basis triples. Exact when every constant
/// is rational, otherwise residual 2-norms below `1e-12` pass.
pub fn validate_jacobi(spec: &BracketSpec) -> JacobiReport {
    match spec.exact_alphas() {
        Some(al) => {
            let c = spec.table(&al);
            JacobiReport {
                exact: true,
                violations: jacobi_violations(&c, rat_to_f64, |r| r.iter().any(|v| !v.is_zero())),
            }
        }
        None => {
            let c = spec.float_table();
            JacobiReport {
                exact: false,
                violations: jacobi_violations(&c, |v| *v, |r| {
                    r.iter().map(|v| v * v).sum::<f64>().sqrt() >= 1e-12
                }),
            }
        }
    }
}

fn lower_central_series<T: Field>(c: &[Vec<Vec<T>>]) -> Result<usize> {
    let n = c.len();
    let mut current: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut v = vec![T::zero(); n];
            v[i] = T::one();
            v
        })
        .collect();
    let mut class = 0;
    while !current.is_empty() {
        class += 1;
        // [g, current]
        let mut gens = Vec::new();
        for i in 0..n {
            for v in &current {
                let mut w = vec![T::zero(); n];
                for (k, vk) in v.iter().enumerate() {
                    if vk.negligible() {
                        continue;
                    }
                    for (wl, cl) in w.iter_mut().zip(&c[i][k]) {
                        *wl = wl.clone() + vk.clone() * cl.clone();
                    }
                }
                gens.push(w);
            }
        }
        let (next, _) = linalg::rref(&gens, n);
        if next.len() == current.len() {
            return Err(Error::NotNilpotent { stable_dim: next.len() });
        }
        current = next;
    }
    Ok(class)
}

/// Nilpotency step: the number of nonzero terms of the lower central series
/// (1 for abelian algebras).
pub fn nilpotency_class(spec: &BracketSpec) -> Result<usize> {
    match spec.exact_alphas() {
        Some(al) => lower_central_series(&spec.table(&al)),
        None => lower_central_series(&spec.float_table()),
    }
}

pub fn root_system(spec: &BracketSpec) -> Result<RootSystem> {
    if spec.is_abelian() {
        return Err(Error::AbelianAlgebra);
    }
    Ok(RootSystem::from_triples(spec.dim(), spec.triples()))
}

fn check_dim(spec: &BracketSpec, metric: &DiagonalMetric) -> Result<()> {
    if spec.dim() != metric.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: metric.dim() });
    }
    Ok(())
}

/// `a_i = (q_l / (q_j q_k)) alpha^2` for each index triple.
pub fn structure_vector(spec: &BracketSpec, metric: &DiagonalMetric) -> Result<StructureVector> {
    check_dim(spec, metric)?;
    let q = metric.values();
    Ok(StructureVector(
        spec.entries()
            .iter()
            .map(|e| {
                let Triple { j, k, l } = e.triple;
                q[l] / (q[j] * q[k]) * e.alpha * e.alpha
            })
            .collect(),
    ))
}

/// Exact structure vector; requires rational constants and metric.
pub fn structure_vector_exact(spec: &BracketSpec, metric: &DiagonalMetric) -> Result<Vec<Rational>> {
    check_dim(spec, metric)?;
    let q = metric.exact_values().ok_or(Error::InexactInput)?;
    spec.entries()
        .iter()
        .map(|e| {
            let a = e.exact.as_ref().ok_or(Error::InexactInput)?;
            let Triple { j, k, l } = e.triple;
            Ok(&q[l] / (&q[j] * &q[k]) * a * a)
        })
        .collect()
}

/// Structure constants relative to the orthonormalized basis,
/// `sqrt(q_l / (q_j q_k)) alpha_{jk}^l`, in dictionary order.
pub fn rescaled_constants(spec: &BracketSpec, metric: &DiagonalMetric) -> Result<Vec<f64>> {
    check_dim(spec, metric)?;
    let q = metric.values();
    Ok(spec
        .entries()
        .iter()
        .map(|e| {
            let Triple { j, k, l } = e.triple;
            (q[l] / (q[j] * q[k])).sqrt() * e.alpha
        })
        .collect())
}

/// Matrix of `ad_x` for `x = sum coeffs_i x_i`; column `j` holds `[x, x_j]`.
pub fn ad_matrix(spec: &BracketSpec, coeffs: &[f64]) -> Result<Vec<Vec<f64>>> {
    if coeffs.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: coeffs.len() });
    }
    let n = spec.dim();
    let mut m = vec![vec![0.0; n]; n];
    for e in spec.entries() {
        let Triple { j, k, l } = e.triple;
        // [x_j, x_k] = alpha x_l and [x_k, x_j] = -alpha x_l
        m[l][k] += coeffs[j] * e.alpha;
        m[l][j] -= coeffs[k] * e.alpha;
    }
    Ok(m)
}
