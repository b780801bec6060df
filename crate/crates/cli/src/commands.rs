use std::fmt;
use std::fs;
use std::path::Path;

use nilflow::algebra::{nilpotency_class, root_system, structure_vector, validate_jacobi};
use nilflow::catalog::{self, CatalogEntry};
use nilflow::curvature::{self, is_stably_ricci_diagonal, soliton_test};
use nilflow::flow::{self, FlowState, IntegratorConfig};
use nilflow::io::{self, IoError};
use nilflow::linalg::{format_rational, parse_rational};
use nilflow::projective::{self, ProjectiveSystem, Provenance};
use nilflow::{BracketSpec, DiagonalMetric, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::{CatalogOpts, Format, Opts};

pub enum CliError {
    /// Bad arguments, unreadable or malformed input.
    Usage(String),
    /// Input read fine but fails a mathematical check.
    Validation(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Validation(m) => f.write_str(m),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

enum Input {
    Algebra { name: String, spec: BracketSpec, metric: Option<DiagonalMetric> },
    Gram { name: String, u: Vec<Vec<i64>>, provenance: Provenance },
}

fn catalog_entry(name: &str, alphas: &[String]) -> Result<CatalogEntry, CliError> {
    if alphas.is_empty() {
        return Ok(catalog::get(name)?);
    }
    if name != "r6" {
        return Err(CliError::Usage("--alphas applies only to r6".into()));
    }
    let parsed = alphas
        .iter()
        .map(|s| parse_rational(s).ok_or_else(|| CliError::Usage(format!("bad rational `{s}` in --alphas"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(catalog::r6_with(&parsed)?)
}

fn load(o: &Opts) -> Result<Input, CliError> {
    if let Some(name) = &o.source.catalog {
        let entry = catalog_entry(name, &o.alphas)?;
        return Ok(match entry.spec {
            Some(spec) => {
                let metric = match &o.metric {
                    Some(p) => Some(io::load_metric(p)?),
                    None => entry.soliton_metric,
                };
                Input::Algebra { name: entry.name, spec, metric }
            }
            None => Input::Gram {
                u: entry.expected.gram_matrix.value,
                name: entry.name,
                provenance: Provenance::GramOnly,
            },
        });
    }
    if let Some(p) = &o.source.algebra {
        let spec = io::load_algebra(p)?;
        let metric = o.metric.as_deref().map(io::load_metric).transpose()?;
        return Ok(Input::Algebra { name: p.display().to_string(), spec, metric });
    }
    let p = o.source.gram.as_ref().expect("clap requires one source");
    Ok(Input::Gram { name: p.display().to_string(), u: io::load_gram(p)?, provenance: Provenance::GramOnly })
}

/// Spec that has passed Jacobi and nilpotency checks, with its metric.
fn load_valid(o: &Opts) -> Result<(String, BracketSpec, DiagonalMetric), CliError> {
    match load(o)? {
        Input::Algebra { name, spec, metric } => {
            let report = validate_jacobi(&spec);
            if !report.passed() {
                return Err(CliError::Validation(format!("{name}: Jacobi identity fails")));
            }
            nilpotency_class(&spec).map_err(|e| CliError::Validation(e.to_string()))?;
            let metric = metric.unwrap_or_else(|| DiagonalMetric::ones(spec.dim()));
            if metric.dim() != spec.dim() {
                return Err(Error::DimensionMismatch { expected: spec.dim(), found: metric.dim() }.into());
            }
            Ok((name, spec, metric))
        }
        Input::Gram { name, .. } => Err(CliError::Usage(format!(
            "{name} is a Gram matrix without an algebra; use projective or equilibria"
        ))),
    }
}

fn gram_system(o: &Opts) -> Result<(String, ProjectiveSystem), CliError> {
    match load(o)? {
        Input::Algebra { name, spec, .. } => {
            if !validate_jacobi(&spec).passed() {
                return Err(CliError::Validation(format!("{name}: Jacobi identity fails")));
            }
            let roots = root_system(&spec)?;
            Ok((name, ProjectiveSystem::from_roots(&roots)?))
        }
        Input::Gram { name, u, provenance } => Ok((name, ProjectiveSystem::new(u, provenance)?)),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_ivec(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn config(o: &Opts) -> IntegratorConfig {
    IntegratorConfig {
        rtol: o.rtol,
        atol: o.atol,
        t_end: o.t_end,
        samples: o.samples,
        ..IntegratorConfig::default()
    }
}

fn check_positive(o: &Opts) -> CliResult {
    for (name, v) in [("--t-end", o.t_end), ("--rtol", o.rtol), ("--atol", o.atol), ("--tol", o.tol)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Usage(format!("{name} must be positive")));
        }
    }
    if o.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    Ok(())
}

pub fn validate(o: &Opts) -> CliResult {
    match load(o)? {
        Input::Algebra { name, spec, .. } => {
            let report = validate_jacobi(&spec);
            let nil = nilpotency_class(&spec);
            let mode = if report.exact { "exact" } else { "floating point" };
            println!("{name}: dim {}, {} brackets", spec.dim(), spec.entries().len());
            if report.passed() {
                println!("jacobi: ok ({mode})");
            } else {
                println!("jacobi: FAILED ({mode})");
                for v in &report.violations {
                    let (i, j, k) = v.indices;
                    println!("  (x{}, x{}, x{}): residual {}", i + 1, j + 1, k + 1, fmt_vec(&v.residual));
                }
            }
            match &nil {
                Ok(step) => println!("nilpotent: step {step}"),
                Err(e) => println!("nilpotent: no ({e})"),
            }
            if report.passed() && nil.is_ok() {
                Ok(())
            } else {
                Err(CliError::Validation(format!("{name} is not a nilpotent Lie algebra")))
            }
        }
        Input::Gram { name, u, .. } => {
            let symmetric = (0..u.len()).all(|i| (0..u.len()).all(|j| u[i][j] == u[j][i]));
            println!("{name}: Gram matrix only, m = {}", u.len());
            println!("symmetric: {symmetric}");
            if symmetric {
                Ok(())
            } else {
                Err(CliError::Validation(format!("{name}: Gram matrix is not symmetric")))
            }
        }
    }
}

pub fn info(o: &Opts) -> CliResult {
    let (name, spec, metric) = load_valid(o)?;
    let roots = root_system(&spec)?;
    let a = structure_vector(&spec, &metric)?;
    let ric = curvature::ricci_vector(&roots, a.as_slice());
    let stable = is_stably_ricci_diagonal(&spec);
    let cert = soliton_test(&roots, &a, o.tol);
    let step = nilpotency_class(&spec)?;
    if o.format == Some(Format::Json) {
        let doc = json!({
            "name": name,
            "dim": spec.dim(),
            "nilpotency_step": step,
            "index_set": spec.triples().iter().map(|t| t.one_based()).collect::<Vec<_>>(),
            "Y": roots.root_matrix(),
            "U": roots.gram(),
            "q": metric.values(),
            "a": a.as_slice(),
            "ricci_vector": ric,
            "stably_ricci_diagonal": stable,
            "soliton": cert,
        });
        return emit(o.out.as_deref(), &io::to_json(&doc));
    }
    let mut s = String::new();
    s += &format!("algebra: {name} (dim {}, {} brackets, step {step})\n", spec.dim(), spec.entries().len());
    let idx: Vec<String> = spec.triples().iter().map(|t| t.to_string()).collect();
    s += &format!("index set: {}\n", idx.join(" "));
    s += "Y:\n";
    for r in roots.root_matrix() {
        s += &format!("  {}\n", fmt_ivec(r));
    }
    s += "U:\n";
    for r in roots.gram() {
        s += &format!("  {}\n", fmt_ivec(r));
    }
    s += &format!("q = {}\n", fmt_vec(metric.values()));
    s += &format!("a = {}\n", fmt_vec(a.as_slice()));
    s += &format!("ricci vector = {}\n", fmt_vec(&ric));
    s += &format!("stably ricci-diagonal: {}\n", stable.stable);
    if let Some(w) = &stable.witness {
        s += &format!(
            "  off-diagonal entry ({},{}) has monomial sqrt(q)^{} with coefficient {}\n",
            w.pair.0 + 1,
            w.pair.1 + 1,
            fmt_ivec(&w.exponents),
            w.coefficient
        );
    }
    match &cert {
        Some(c) => {
            s += "soliton: yes\n";
            s += &format!("beta = {}\n", c.beta);
            s += &format!("derivation diag = {}\n", fmt_vec(&c.derivation_diag));
        }
        None => s += "soliton: no (at this metric)\n",
    }
    emit(o.out.as_deref(), &s)
}

pub fn soliton(o: &Opts) -> CliResult {
    let (name, spec, _) = load_valid(o)?;
    match curvature::find_soliton_metric(&spec, o.tol) {
        Ok(found) => {
            let doc = json!({
                "certificate": found.certificate,
                "metric": found.metric,
                "recovery_residual": found.recovery_residual,
            });
            if o.format == Some(Format::Json) || o.out.is_some() {
                emit(o.out.as_deref(), &io::to_json(&doc))?;
            }
            if o.format != Some(Format::Json) {
                let c = &found.certificate;
                println!("{name}: soliton structure vector a* = {}", fmt_vec(&c.a_star));
                println!("beta = {}", c.beta);
                println!("derivation diag = {}", fmt_vec(&c.derivation_diag));
                match &found.metric {
                    Some(q) => println!("metric q = {}", fmt_vec(q)),
                    None => println!(
                        "no diagonal metric realizes a* with these structure constants (residual {})",
                        found.recovery_residual
                    ),
                }
            }
            Ok(())
        }
        Err(Error::NoPositiveSolution { kernel }) => {
            if o.format == Some(Format::Json) {
                emit(o.out.as_deref(), &io::to_json(&json!({ "soliton": null, "kernel": kernel })))?;
            } else {
                println!("{name}: no positive solution of U v = lambda 1");
                println!("ker PU basis:");
                for v in &kernel {
                    println!("  {}", fmt_ivec(v));
                }
            }
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn random_metrics(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..n).map(|_| rng.random_range(0.1..10.0)).collect()).collect()
}

pub fn flow(o: &Opts) -> CliResult {
    check_positive(o)?;
    if o.normalized {
        return normalized_flow(o);
    }
    let (_, spec, metric) = load_valid(o)?;
    let roots = root_system(&spec)?;
    let cfg = config(o);
    if let (Some(n), Some(seed)) = (o.sweep, o.seed) {
        let states = random_metrics(spec.dim(), n, seed)
            .into_iter()
            .map(|q| {
                let a = structure_vector(&spec, &DiagonalMetric::new(q.clone())?)?;
                FlowState::new(0.0, q, a.0)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let results = flow::integrate_batch(&roots, &states, &cfg);
        let mut text = String::from("run,t");
        for i in 1..=roots.n() {
            text += &format!(",q_{i}");
        }
        for i in 1..=roots.m() {
            text += &format!(",a_{i}");
        }
        text += ",max_drift\n";
        for (k, r) in results.into_iter().enumerate() {
            let tr = r?;
            let last = tr.last();
            let drift = tr.invariant_drift.iter().cloned().fold(0.0, f64::max);
            let vals: Vec<String> =
                std::iter::once(last.t).chain(last.q.iter().copied()).chain(last.a.iter().copied()).chain([drift]).map(io::fmt_f64).collect();
            text += &format!("{k},{}\n", vals.join(","));
        }
        return emit(o.out.as_deref(), &text);
    }
    let a = structure_vector(&spec, &metric)?;
    let state0 = FlowState::new(0.0, metric.values().to_vec(), a.0.clone())?;
    let tr = flow::integrate(&roots, &state0, &cfg)?;
    let collapse = match soliton_test(&roots, &a, o.tol) {
        Some(c) if roots.m() > 0 => json!({ "soliton": flow::collapse_analysis(&roots, &c, &c.ricci_vector())? }),
        _ => json!({ "empirical": flow::empirical_collapse(&tr) }),
    };
    let summary = json!({
        "step_stats": tr.step_stats,
        "invariants": tr.invariants,
        "invariant_drift": tr.invariant_drift,
        "collapse": collapse,
    });
    if o.format == Some(Format::Json) {
        let doc = json!({ "samples": tr.samples, "summary": summary });
        return emit(o.out.as_deref(), &io::to_json(&doc));
    }
    emit(o.out.as_deref(), &io::trajectory_csv(&tr))?;
    let report = io::to_json(&summary);
    if o.out.is_some() {
        print!("{report}");
    } else {
        eprint!("{report}");
    }
    Ok(())
}

fn normalized_flow(o: &Opts) -> CliResult {
    let (u, a0) = match load(o)? {
        Input::Algebra { .. } => {
            let (_, spec, metric) = load_valid(o)?;
            let roots = root_system(&spec)?;
            (roots.gram().to_vec(), structure_vector(&spec, &metric)?.0)
        }
        Input::Gram { u, .. } => {
            let m = u.len();
            (u, vec![1.0; m])
        }
    };
    let cfg = config(o);
    if let (Some(n), Some(seed)) = (o.sweep, o.seed) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let starts: Vec<Vec<f64>> =
            (0..n).map(|_| (0..u.len()).map(|_| rng.random_range(0.1..10.0)).collect()).collect();
        let mut text = String::from("run,tau");
        for i in 1..=u.len() {
            text += &format!(",a_{i}");
        }
        text += "\n";
        for (k, s) in starts.iter().enumerate() {
            let out = projective::simplex_bracket_flow(&u, s, &cfg)?;
            let (t, a) = out.last().expect("nonempty");
            let vals: Vec<String> = std::iter::once(*t).chain(a.iter().copied()).map(io::fmt_f64).collect();
            text += &format!("{k},{}\n", vals.join(","));
        }
        return emit(o.out.as_deref(), &text);
    }
    let out = projective::simplex_bracket_flow(&u, &a0, &cfg)?;
    emit(o.out.as_deref(), &io::simplex_csv(&out))
}

pub fn projective(o: &Opts) -> CliResult {
    check_positive(o)?;
    let (name, sys) = gram_system(o)?;
    let cfg = config(o);
    let d = sys.m() - 1;
    if let (Some(n), Some(seed)) = (o.sweep, o.seed) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let starts: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(0.0..5.0)).collect()).collect();
        use rayon::prelude::*;
        let runs: Vec<_> = starts.par_iter().map(|s| projective::integrate_projective(&sys, s, &cfg)).collect();
        let mut text = String::from("run,tau");
        for i in 1..=d {
            text += &format!(",s_{i}");
        }
        text += ",converged,nearest,distance\n";
        for (k, r) in runs.into_iter().enumerate() {
            let tr = r?;
            let vals: Vec<String> =
                std::iter::once(*tr.times.last().expect("nonempty")).chain(tr.last().s.iter().copied()).map(io::fmt_f64).collect();
            let (idx, dist) = tr.nearest.as_ref().map_or((String::new(), String::new()), |n| {
                ((n.index + 1).to_string(), io::fmt_f64(n.distance))
            });
            text += &format!("{k},{},{},{idx},{dist}\n", vals.join(","), tr.converged);
        }
        return emit(o.out.as_deref(), &text);
    }
    let s0 = if o.s0.is_empty() {
        match load(o)? {
            Input::Algebra { spec, metric, .. } => {
                let metric = metric.unwrap_or_else(|| DiagonalMetric::ones(spec.dim()));
                projective::s_from_a(structure_vector(&spec, &metric)?.as_slice())
            }
            Input::Gram { .. } => vec![1.0; d],
        }
    } else {
        o.s0.clone()
    };
    let tr = projective::integrate_projective(&sys, &s0, &cfg)?;
    if o.format == Some(Format::Json) {
        let doc = json!({ "times": tr.times, "states": tr.states, "converged": tr.converged, "nearest": tr.nearest });
        return emit(o.out.as_deref(), &io::to_json(&doc));
    }
    emit(o.out.as_deref(), &io::projective_csv(&tr))?;
    let last = tr.last();
    let mut report = format!("{name}: s({}) = {}\n", o.t_end, fmt_vec(&last.s));
    let chamber: Vec<&str> = last
        .chamber
        .iter()
        .map(|c| match c {
            projective::Sign::Negative => "-",
            projective::Sign::Zero => "0",
            projective::Sign::Positive => "+",
        })
        .collect();
    report += &format!("chamber: ({})\n", chamber.join(","));
    report += &format!("converged: {}\n", tr.converged);
    if let Some(n) = &tr.nearest {
        report += &format!("nearest equilibrium: #{} at distance {}\n", n.index + 1, n.distance);
    }
    if o.out.is_some() {
        print!("{report}");
    } else {
        eprint!("{report}");
    }
    Ok(())
}

pub fn equilibria(o: &Opts) -> CliResult {
    let (name, sys) = gram_system(o)?;
    let set = projective::equilibria(&sys, o.max_m)?;
    let seed = o.seed.unwrap_or(0);
    let certificates = set
        .points
        .iter()
        .map(|p| {
            if p.classification == projective::Classification::Repelling {
                projective::repelling_certificate(&sys, &p.s, 20, seed).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let doc = json!({
        "name": name,
        "provenance": sys.provenance(),
        "normals": sys.normals(),
        "pu_kernel": projective::pu_kernel(&sys),
        "points": set.points,
        "repelling_certificates": certificates,
    });
    emit(o.out.as_deref(), &io::to_json(&doc))
}

pub fn invariants(o: &Opts) -> CliResult {
    let (name, spec, _) = load_valid(o)?;
    let roots = root_system(&spec)?;
    let dirs = flow::conserved_monomials(&roots);
    if o.format == Some(Format::Json) {
        return emit(o.out.as_deref(), &io::to_json(&json!({ "name": name, "exponents": dirs })));
    }
    let mut s = format!("{name}: {} conserved monomials q^d\n", dirs.len());
    for d in &dirs {
        s += &format!("  d = {}\n", fmt_ivec(d));
    }
    emit(o.out.as_deref(), &s)
}

pub fn catalog(o: &CatalogOpts) -> CliResult {
    let Some(name) = &o.name else {
        let list = catalog::list();
        if o.format == Some(Format::Json) {
            return emit(None, &io::to_json(&list));
        }
        for e in list {
            let tag = if e.gram_only { " [gram-only]" } else { "" };
            println!("{:<14} {}{tag}", e.name, e.description);
        }
        return Ok(());
    };
    let entry = catalog::get(name)?;
    let Some(dir) = &o.out else {
        let text = match &entry.spec {
            Some(spec) => io::export_algebra(spec),
            None => io::export_gram(entry.gram()),
        };
        return emit(None, &text);
    };
    fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let stem = entry.name.replace(['(', ')'], "");
    if let Some(spec) = &entry.spec {
        emit(Some(&dir.join(format!("{stem}.algebra.json"))), &io::export_algebra(spec))?;
    }
    if let Some(m) = &entry.soliton_metric {
        emit(Some(&dir.join(format!("{stem}.metric.json"))), &io::export_metric(m))?;
    }
    emit(Some(&dir.join(format!("{stem}.gram.json"))), &io::export_gram(entry.gram()))?;
    if let Some(beta) = &entry.expected.beta {
        println!("{}: beta = {}", entry.name, format_rational(&beta.value));
    }
    Ok(())
}
