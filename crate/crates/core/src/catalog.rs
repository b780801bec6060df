//! Worked examples with their known soliton data.

use serde::Serialize;

use crate::algebra::{root_system, BracketEntry, BracketSpec, DiagonalMetric};
use crate::error::{Error, Result};
use crate::linalg::{rat, rat_int, Rational};

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    /// Stated in a published worked example.
    WorkedExample,
    /// Computed independently (exact arithmetic by hand or by this crate).
    Computed,
    /// Holds by construction of the entry.
    ByConstruction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Known<T> {
    pub value: T,
    pub origin: Origin,
}

fn known<T>(value: T, origin: Origin) -> Known<T> {
    Known { value, origin }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub beta: Option<Known<Rational>>,
    pub ricci_vector: Option<Known<Vec<Rational>>>,
    pub gram_matrix: Known<Vec<Vec<i64>>>,
    pub derivation_diag: Option<Known<Vec<Rational>>>,
    /// Basis of `ker PU`.
    pub kernel_vectors: Known<Vec<Vec<i64>>>,
    /// Exponents `r_j / beta` of the soliton trajectory.
    pub closed_form_exponents: Option<Known<Vec<Rational>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    /// Absent for Gram-only entries.
    pub spec: Option<BracketSpec>,
    pub soliton_metric: Option<DiagonalMetric>,
    pub expected: Expected,
}

impl CatalogEntry {
    pub fn is_gram_only(&self) -> bool {
        self.spec.is_none()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.expected.gram_matrix.value
    }

    pub fn require_spec(&self) -> Result<&BracketSpec> {
        self.spec.as_ref().ok_or_else(|| Error::GramOnly(self.name.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Listing {
    pub name: &'static str,
    pub description: &'static str,
    pub gram_only: bool,
}

pub fn list() -> Vec<Listing> {
    let e = |name, description, gram_only| Listing { name, description, gram_only };
    vec![
        e("h3", "3-dim Heisenberg algebra, [x1,x2] = x3", false),
        e("l4", "4-dim filiform algebra, [x1,x2] = x3, [x1,x3] = x4", false),
        e("h5", "5-dim Heisenberg algebra, [x1,x2] = [x3,x4] = x5", false),
        e("p5", "5-dim algebra (1,3,4), (1,4,5), (2,3,5) with soliton metric (1,4,1,2,4)", false),
        e("heisenberg(r)", "(2r+1)-dim Heisenberg algebra, [x_{2i-1},x_{2i}] = x_{2r+1}", false),
        e("r6", "7-dim algebra with no soliton metric; structure constants default to 1", false),
        e("l4b_gram", "Gram matrix [[3,2,0],[2,3,2],[0,2,3]] without an algebra", true),
    ]
}

fn rv(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|&(p, q)| rat(p, q)).collect()
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat_int(x)).collect()
}

fn soliton_entry(
    name: &str,
    description: &str,
    spec: BracketSpec,
    metric: Vec<Rational>,
    beta: Rational,
    ricci: Vec<Rational>,
    gram: Vec<Vec<i64>>,
    derivation: Vec<Rational>,
    kernel: Vec<Vec<i64>>,
    exponents: Vec<Rational>,
    origins: [Origin; 6],
) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        description: description.into(),
        spec: Some(spec),
        soliton_metric: Some(DiagonalMetric::exact(metric).expect("catalog metric is positive")),
        expected: Expected {
            beta: Some(known(beta, origins[0])),
            ricci_vector: Some(known(ricci, origins[1])),
            gram_matrix: known(gram, origins[2]),
            derivation_diag: Some(known(derivation, origins[3])),
            kernel_vectors: known(kernel, origins[4]),
            closed_form_exponents: Some(known(exponents, origins[5])),
        },
    }
}

fn spec_of(dim: usize, brackets: &[(usize, usize, usize, i64)]) -> BracketSpec {
    BracketSpec::from_one_based(dim, brackets).expect("catalog brackets are valid")
}

use Origin::{ByConstruction as Built, Computed, WorkedExample as Worked};

pub fn h3() -> CatalogEntry {
    soliton_entry(
        "h3",
        list()[0].description,
        spec_of(3, &[(1, 2, 3, 1)]),
        ints(&[1, 1, 1]),
        rat(-3, 2),
        rv(&[(-1, 2), (-1, 2), (1, 2)]),
        vec![vec![3]],
        ints(&[1, 1, 2]),
        vec![vec![1]],
        rv(&[(1, 3), (1, 3), (-1, 3)]),
        [Worked, Worked, Worked, Worked, Built, Worked],
    )
}

pub fn l4() -> CatalogEntry {
    soliton_entry(
        "l4",
        list()[1].description,
        spec_of(4, &[(1, 2, 3, 1), (1, 3, 4, 1)]),
        ints(&[1, 1, 1, 1]),
        rat(-3, 2),
        rv(&[(-1, 1), (-1, 2), (0, 1), (1, 2)]),
        vec![vec![3, 0], vec![0, 3]],
        rv(&[(1, 2), (1, 1), (3, 2), (2, 1)]),
        vec![vec![1, 1]],
        rv(&[(2, 3), (1, 3), (0, 1), (-1, 3)]),
        [Worked, Worked, Worked, Worked, Computed, Computed],
    )
}

pub fn h5() -> CatalogEntry {
    soliton_entry(
        "h5",
        list()[2].description,
        spec_of(5, &[(1, 2, 5, 1), (3, 4, 5, 1)]),
        ints(&[1, 1, 1, 1, 1]),
        rat(-2, 1),
        rv(&[(-1, 2), (-1, 2), (-1, 2), (-1, 2), (1, 1)]),
        vec![vec![3, 1], vec![1, 3]],
        rv(&[(3, 2), (3, 2), (3, 2), (3, 2), (3, 1)]),
        vec![vec![1, 1]],
        rv(&[(1, 4), (1, 4), (1, 4), (1, 4), (-1, 2)]),
        [Computed, Computed, Worked, Computed, Computed, Computed],
    )
}

pub fn p5() -> CatalogEntry {
    soliton_entry(
        "p5",
        list()[3].description,
        spec_of(5, &[(1, 3, 4, 1), (1, 4, 5, 1), (2, 3, 5, 1)]),
        ints(&[1, 4, 1, 2, 4]),
        rat(-7, 2),
        rv(&[(-2, 1), (-1, 2), (-3, 2), (0, 1), (3, 2)]),
        vec![vec![3, 0, 1], vec![0, 3, 1], vec![1, 1, 3]],
        rv(&[(3, 2), (3, 1), (2, 1), (7, 2), (5, 1)]),
        vec![vec![2, 2, 1]],
        rv(&[(4, 7), (1, 7), (3, 7), (0, 1), (-3, 7)]),
        [Worked, Worked, Worked, Computed, Worked, Worked],
    )
}

/// The `(2r+1)`-dimensional Heisenberg algebra with the all-ones metric.
pub fn heisenberg(r: usize) -> Result<CatalogEntry> {
    if r == 0 {
        return Err(Error::UnknownEntry("heisenberg(0)".into()));
    }
    let n = 2 * r + 1;
    let brackets: Vec<(usize, usize, usize, i64)> =
        (1..=r).map(|i| (2 * i - 1, 2 * i, n, 1)).collect();
    let rr = r as i64;
    let mut ricci = vec![rat(-1, 2); 2 * r];
    ricci.push(rat(rr, 2));
    let mut derivation = vec![rat(rr + 1, 2); 2 * r];
    derivation.push(rat_int(rr + 1));
    let mut exponents = vec![rat(1, rr + 2); 2 * r];
    exponents.push(rat(-rr, rr + 2));
    let gram = (0..r)
        .map(|i| (0..r).map(|j| if i == j { 3 } else { 1 }).collect())
        .collect();
    Ok(soliton_entry(
        &format!("heisenberg({r})"),
        &format!("{n}-dim Heisenberg algebra"),
        spec_of(n, &brackets),
        vec![rat_int(1); n],
        rat(-(rr + 2), 2),
        ricci,
        gram,
        derivation,
        vec![vec![1; r]],
        exponents,
        [Computed, Computed, Worked, Computed, Computed, Computed],
    ))
}

/// Index triples of the 7-dim non-soliton algebra, in dictionary order.
pub const R6_TRIPLES: [(usize, usize, usize); 8] = [
    (1, 2, 3),
    (1, 3, 4),
    (1, 4, 5),
    (1, 5, 6),
    (1, 6, 7),
    (2, 3, 5),
    (2, 4, 6),
    (2, 5, 7),
];

/// The 7-dim non-soliton algebra with given structure constants, in the
/// order of [`R6_TRIPLES`].
///
/// The Jacobi identity requires `a_235 a_156 = a_134 a_246` and
/// `a_246 a_167 = a_145 a_257`; other choices build a spec that
/// `validate_jacobi` rejects.
pub fn r6_with(alphas: &[Rational]) -> Result<CatalogEntry> {
    if alphas.len() != R6_TRIPLES.len() {
        return Err(Error::DimensionMismatch { expected: R6_TRIPLES.len(), found: alphas.len() });
    }
    let entries = R6_TRIPLES
        .iter()
        .zip(alphas)
        .map(|(&(j, k, l), a)| BracketEntry::rational(j - 1, k - 1, l - 1, a.clone()))
        .collect();
    let spec = BracketSpec::new(7, entries)?;
    let roots = root_system(&spec)?;
    let gram = roots.gram().to_vec();
    let kernel = crate::curvature::gram_soliton_kernel(&gram);
    Ok(CatalogEntry {
        name: "r6".into(),
        description: list()[5].description.into(),
        spec: Some(spec),
        soliton_metric: None,
        expected: Expected {
            beta: None,
            ricci_vector: None,
            gram_matrix: known(gram, Built),
            derivation_diag: None,
            kernel_vectors: known(kernel, Computed),
            closed_form_exponents: None,
        },
    })
}

pub fn r6() -> CatalogEntry {
    r6_with(&vec![rat_int(1); 8]).expect("default constants are nonzero")
}

pub fn l4b_gram() -> CatalogEntry {
    CatalogEntry {
        name: "l4b_gram".into(),
        description: list()[6].description.into(),
        spec: None,
        soliton_metric: None,
        expected: Expected {
            beta: None,
            ricci_vector: None,
            gram_matrix: known(vec![vec![3, 2, 0], vec![2, 3, 2], vec![0, 2, 3]], Worked),
            derivation_diag: None,
            kernel_vectors: known(vec![vec![1, -1, 1]], Worked),
            closed_form_exponents: None,
        },
    }
}

fn parse_heisenberg(name: &str) -> Option<usize> {
    let inner = name
        .strip_prefix("heisenberg(")
        .and_then(|s| s.strip_suffix(')'))
        .or_else(|| name.strip_prefix("heisenberg"))?;
    inner.trim().parse().ok()
}

/// Looks up an entry by name; `heisenberg(r)` takes any `r >= 1`.
pub fn get(name: &str) -> Result<CatalogEntry> {
    match name {
        "h3" => Ok(h3()),
        "l4" => Ok(l4()),
        "h5" => Ok(h5()),
        "p5" => Ok(p5()),
        "r6" => Ok(r6()),
        "l4b_gram" => Ok(l4b_gram()),
        other => match parse_heisenberg(other) {
            Some(r) if r >= 1 => heisenberg(r),
            _ => Err(Error::UnknownEntry(other.into())),
        },
    }
}
