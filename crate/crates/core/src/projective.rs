//! The projectivized bracket flow in affine coordinates
//! `s = (a_1/a_m, ..., a_{m-1}/a_m)`, its equilibria and their stability.

use nalgebra::DMatrix;
use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::RootSystem;
use crate::curvature::gram_soliton_kernel;
use crate::error::{Error, Result};
use crate::flow::IntegratorConfig;
use crate::linalg::{self, inf_norm, mat_vec_i64, rat_int, rat_to_f64, Rational};
use crate::lp;
use crate::ode::{self, StepStats};

pub const DEFAULT_MAX_M: usize = 20;
/// Zero band for chamber signs.
pub const SIGN_TOL: f64 = 1e-12;
/// Nearest-equilibrium matching is skipped above this many coordinates.
const NEAREST_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Gram matrix computed from validated structure constants.
    Algebra,
    /// Raw Gram matrix, not necessarily from a Lie algebra.
    GramOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectiveSystem {
    u: Vec<Vec<i64>>,
    p: Vec<Vec<i64>>,
    normals: Vec<Vec<i64>>,
    provenance: Provenance,
}

impl ProjectiveSystem {
    pub fn new(u: Vec<Vec<i64>>, provenance: Provenance) -> Result<Self> {
        let m = u.len();
        if m == 0 || u.iter().any(|r| r.len() != m) {
            return Err(Error::BadGram);
        }
        if m < 2 {
            return Err(Error::ProjectiveTooSmall { m });
        }
        let p = (0..m - 1)
            .map(|i| {
                let mut row = vec![0; m];
                row[i] = 1;
                row[m - 1] = -1;
                row
            })
            .collect();
        let normals = (0..m - 1)
            .map(|i| (0..m).map(|j| u[i][j] - u[m - 1][j]).collect())
            .collect();
        Ok(Self { u, p, normals, provenance })
    }

    pub fn from_roots(roots: &RootSystem) -> Result<Self> {
        Self::new(roots.gram().to_vec(), Provenance::Algebra)
    }

    pub fn m(&self) -> usize {
        self.u.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.u
    }

    pub fn p_matrix(&self) -> &[Vec<i64>] {
        &self.p
    }

    /// Rows `n_i = e_i^T P U`.
    pub fn normals(&self) -> &[Vec<i64>] {
        &self.normals
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    fn eta_exact(&self, s: &[Rational]) -> Vec<Rational> {
        let m = self.m();
        self.normals
            .iter()
            .map(|n| {
                (0..m - 1).fold(rat_int(n[m - 1]), |acc, j| acc + rat_int(n[j]) * &s[j])
            })
            .collect()
    }

    pub fn state(&self, s: Vec<f64>) -> SimplexState {
        let eta = eta(self, &s);
        let chamber = signs(&eta, SIGN_TOL);
        SimplexState { s, eta, chamber }
    }
}

/// `eta_i(s) = n_i . (s, 1)`.
pub fn eta(sys: &ProjectiveSystem, s: &[f64]) -> Vec<f64> {
    let m = sys.m();
    sys.normals
        .iter()
        .map(|n| {
            let mut acc = n[m - 1] as f64;
            for j in 0..m - 1 {
                acc += n[j] as f64 * s[j];
            }
            acc
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Positive,
}

fn signs(v: &[f64], tol: f64) -> Vec<Sign> {
    v.iter()
        .map(|&x| {
            if x.abs() < tol {
                Sign::Zero
            } else if x < 0.0 {
                Sign::Negative
            } else {
                Sign::Positive
            }
        })
        .collect()
}

/// Sign pattern of `eta(s)`, which fixes the direction of motion of each
/// positive coordinate.
pub fn chamber_sign(sys: &ProjectiveSystem, s: &[f64], tol: f64) -> Vec<Sign> {
    signs(&eta(sys, s), tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexState {
    pub s: Vec<f64>,
    pub eta: Vec<f64>,
    pub chamber: Vec<Sign>,
}

/// `s_i = a_i / a_m`.
pub fn s_from_a(a: &[f64]) -> Vec<f64> {
    match a.split_last() {
        Some((am, rest)) => rest.iter().map(|x| x / am).collect(),
        None => vec![],
    }
}

/// True-time field `-a_m s ⊙ eta(s)` when `a_m` is given, otherwise the
/// time-changed field `-s ⊙ eta(s)`.
pub fn projective_rhs(sys: &ProjectiveSystem, s: &[f64], a_m: Option<f64>) -> Vec<f64> {
    let c = a_m.unwrap_or(1.0);
    eta(sys, s).iter().zip(s).map(|(e, si)| -c * si * e).collect()
}

/// Basis of `ker PU = {v : U v = lambda 1}`.
pub fn pu_kernel(sys: &ProjectiveSystem) -> Vec<Vec<i64>> {
    gram_soliton_kernel(&sys.u)
}

fn check_start(sys: &ProjectiveSystem, s0: &[f64]) -> Result<Vec<usize>> {
    if s0.len() != sys.m() - 1 {
        return Err(Error::DimensionMismatch { expected: sys.m() - 1, found: s0.len() });
    }
    if let Some((index, &value)) = s0.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::NonPositive { what: "projective coordinate", index: index + 1, value });
    }
    // Zero coordinates stay zero; integrate the reduced system on the rest.
    Ok((0..s0.len()).filter(|&i| s0[i] > 0.0).collect())
}

fn expand(active: &[usize], s0: &[f64], y: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; s0.len()];
    for (k, &i) in active.iter().enumerate() {
        s[i] = s0[i] * y[k].exp();
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearestEquilibrium {
    pub index: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectiveTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<SimplexState>,
    pub step_stats: StepStats,
    /// `||s(tau) - s(tau - 1)||_inf < 1e-9` at the final time.
    pub converged: bool,
    pub nearest: Option<NearestEquilibrium>,
}

impl ProjectiveTrajectory {
    pub fn last(&self) -> &SimplexState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

pub const CONVERGENCE_TOL: f64 = 1e-9;

/// Integrates `(ln s_i)' = -eta_i(s)` in time-changed time up to `cfg.t_end`.
pub fn integrate_projective(
    sys: &ProjectiveSystem,
    s0: &[f64],
    cfg: &IntegratorConfig,
) -> Result<ProjectiveTrajectory> {
    let active = check_start(sys, s0)?;
    let mut times = cfg.sample_times(0.0)?;
    let lag = cfg.t_end - 1.0;
    if lag > 0.0 && !times.contains(&lag) {
        times.push(lag);
        times.sort_by(f64::total_cmp);
    }
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let e = eta(sys, &expand(&active, s0, y));
        for (k, &i) in active.iter().enumerate() {
            dy[k] = -e[i];
        }
    };
    let mut out_t = Vec::new();
    let mut states = Vec::new();
    let y0 = vec![0.0; active.len()];
    let stats = ode::solve(rhs, 0.0, &y0, &times, &cfg.ode_options(), |t, y| {
        out_t.push(t);
        states.push(sys.state(expand(&active, s0, y)));
        true
    })?;
    let last = &states.last().expect("initial state recorded").s;
    let converged = out_t
        .iter()
        .position(|&t| t == lag)
        .map(|i| {
            let d: Vec<f64> = states[i].s.iter().zip(last).map(|(a, b)| a - b).collect();
            inf_norm(&d) < CONVERGENCE_TOL
        })
        .unwrap_or(false);
    let nearest = if sys.m() - 1 <= NEAREST_LIMIT {
        equilibria(sys, NEAREST_LIMIT)?.nearest(last)
    } else {
        None
    };
    Ok(ProjectiveTrajectory { times: out_t, states, step_stats: stats, converged, nearest })
}

/// Integrates the true-time field coupled with `(ln a_m)' = -(U a)_m`.
/// Returns `(t, s, a_m)` samples.
pub fn integrate_projective_true_time(
    sys: &ProjectiveSystem,
    s0: &[f64],
    a_m0: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<(f64, Vec<f64>, f64)>> {
    let active = check_start(sys, s0)?;
    if !(a_m0.is_finite() && a_m0 > 0.0) {
        return Err(Error::NonPositive { what: "a_m", index: 1, value: a_m0 });
    }
    let m = sys.m();
    let k = active.len();
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let s = expand(&active, s0, &y[..k]);
        let am = a_m0 * y[k].exp();
        let e = eta(sys, &s);
        for (idx, &i) in active.iter().enumerate() {
            dy[idx] = -am * e[i];
        }
        let um = &sys.u[m - 1];
        let ua: f64 = (0..m - 1).map(|j| um[j] as f64 * s[j]).sum::<f64>() + um[m - 1] as f64;
        dy[k] = -am * ua;
    };
    let times = cfg.sample_times(0.0)?;
    let mut out = Vec::new();
    ode::solve(rhs, 0.0, &vec![0.0; k + 1], &times, &cfg.ode_options(), |t, y| {
        out.push((t, expand(&active, s0, &y[..k]), a_m0 * y[k].exp()));
        true
    })?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    InteriorSoliton,
    Boundary,
    Repelling,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumPoint {
    pub s: Vec<f64>,
    /// Exact coordinates as `p` or `p/q` strings.
    pub exact: Vec<String>,
    /// 0-based coordinates that vanish.
    pub zero_set: Vec<usize>,
    /// Directions spanning an affine family through `s`; empty for an
    /// isolated point.
    pub directions: Vec<Vec<f64>>,
    pub eta: Vec<f64>,
    pub classification: Classification,
    /// Eigenvalues `(re, im)` of the linearized time-changed field at
    /// isolated points. Heuristic only.
    pub jacobian_eigenvalues: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumSet {
    pub points: Vec<EquilibriumPoint>,
}

impl EquilibriumSet {
    pub fn repelling(&self) -> impl Iterator<Item = &EquilibriumPoint> {
        self.points.iter().filter(|p| p.classification == Classification::Repelling)
    }

    /// Closest equilibrium (families measured to their affine hull).
    pub fn nearest(&self, s: &[f64]) -> Option<NearestEquilibrium> {
        self.points
            .iter()
            .enumerate()
            .map(|(index, p)| (index, distance_to(p, s)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(index, distance)| NearestEquilibrium { index, distance })
    }
}

fn distance_to(p: &EquilibriumPoint, s: &[f64]) -> f64 {
    let diff: Vec<f64> = s.iter().zip(&p.s).map(|(a, b)| a - b).collect();
    if p.directions.is_empty() {
        return inf_norm(&diff);
    }
    // Project onto the span of the directions by least squares.
    let cols: Vec<Vec<f64>> = (0..diff.len())
        .map(|i| p.directions.iter().map(|d| d[i]).collect())
        .collect();
    let (coef, _) = linalg::min_norm_lstsq(&cols, p.directions.len(), &diff);
    let r: Vec<f64> = (0..diff.len())
        .map(|i| diff[i] - p.directions.iter().zip(&coef).map(|(d, c)| d[i] * c).sum::<f64>())
        .collect();
    inf_norm(&r)
}

/// Solution of `eta_i = 0` for `i` outside `zero`, with `s_i = 0` on `zero`
/// and `s >= 0`: basepoint and family directions.
fn solve_face(sys: &ProjectiveSystem, zero_mask: u64) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let d = sys.m() - 1;
    let free: Vec<usize> = (0..d).filter(|i| zero_mask & (1 << i) == 0).collect();
    let rows: Vec<Vec<Rational>> = free
        .iter()
        .map(|&i| free.iter().map(|&j| rat_int(sys.normals[i][j])).collect())
        .collect();
    let rhs: Vec<Rational> = free.iter().map(|&i| rat_int(-sys.normals[i][d])).collect();
    let (x, dirs) = if free.is_empty() {
        (vec![], vec![])
    } else {
        linalg::solve_affine(&rows, &rhs, free.len())?
    };
    let x = if dirs.is_empty() {
        if x.iter().any(|v| v.is_negative()) {
            return None;
        }
        x
    } else {
        lp::feasible_point(&rows, &rhs, free.len())?
    };
    let embed = |v: &[Rational]| {
        let mut full = vec![Rational::zero(); d];
        for (k, &i) in free.iter().enumerate() {
            full[i] = v[k].clone();
        }
        full
    };
    Some((embed(&x), dirs.iter().map(|v| embed(v)).collect()))
}

fn jacobian_eigenvalues(sys: &ProjectiveSystem, s: &[f64], e: &[f64]) -> Vec<(f64, f64)> {
    let d = s.len();
    let j = DMatrix::from_fn(d, d, |i, k| {
        let diag = if i == k { -e[i] } else { 0.0 };
        diag - s[i] * sys.normals[i][k] as f64
    });
    let mut ev: Vec<(f64, f64)> = j.complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect();
    ev.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    ev
}

/// Enumerates the faces `{s_i = 0, i in M} ∩ {eta_i = 0, i not in M} ∩ {s >= 0}`
/// over all subsets `M`.
pub fn equilibria(sys: &ProjectiveSystem, max_m: usize) -> Result<EquilibriumSet> {
    let d = sys.m() - 1;
    if d > max_m || d >= 63 {
        return Err(Error::SubsetBudgetExceeded { free: d, max: max_m });
    }
    let faces: Vec<(Vec<Rational>, Vec<Vec<Rational>>)> = (0..1u64 << d)
        .into_par_iter()
        .filter_map(|mask| solve_face(sys, mask))
        .collect();
    let mut seen: Vec<(Vec<Rational>, Vec<Vec<Rational>>)> = Vec::new();
    let mut points = Vec::new();
    for (x, dirs) in faces {
        if seen.iter().any(|(sx, sd)| *sx == x && *sd == dirs) {
            continue;
        }
        let e = sys.eta_exact(&x);
        let zero_set: Vec<usize> = (0..d).filter(|&i| x[i].is_zero()).collect();
        let classification = if zero_set.iter().any(|&i| e[i].is_negative()) {
            Classification::Repelling
        } else if zero_set.is_empty() {
            Classification::InteriorSoliton
        } else {
            Classification::Boundary
        };
        let s: Vec<f64> = x.iter().map(rat_to_f64).collect();
        let eta_f: Vec<f64> = e.iter().map(rat_to_f64).collect();
        let jacobian_eigenvalues = dirs.is_empty().then(|| jacobian_eigenvalues(sys, &s, &eta_f));
        points.push(EquilibriumPoint {
            exact: x.iter().map(linalg::format_rational).collect(),
            s,
            zero_set,
            directions: dirs.iter().map(|v| v.iter().map(rat_to_f64).collect()).collect(),
            eta: eta_f,
            classification,
            jacobian_eigenvalues,
        });
        seen.push((x, dirs));
    }
    Ok(EquilibriumSet { points })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepellingCertificate {
    pub trials: usize,
    pub escaped: usize,
    /// Largest time-changed exit time among escaping trials.
    pub max_exit_time: f64,
}

impl RepellingCertificate {
    pub fn passed(&self) -> bool {
        self.escaped == self.trials
    }
}

pub const PERTURBATION: f64 = 1e-3;
pub const ESCAPE_RADIUS: f64 = 1e-2;
const ESCAPE_HORIZON: f64 = 200.0;

/// Starts `trials` runs at sup-distance `1e-3` from `point` inside `s > 0`
/// and counts those leaving the `1e-2` ball.
pub fn repelling_certificate(
    sys: &ProjectiveSystem,
    point: &[f64],
    trials: usize,
    seed: u64,
) -> Result<RepellingCertificate> {
    let d = sys.m() - 1;
    if point.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: point.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = IntegratorConfig::default().ode_options();
    let mut escaped = 0;
    let mut max_exit_time: f64 = 0.0;
    for _ in 0..trials {
        let mut delta: Vec<f64> = (0..d)
            .map(|i| if point[i] == 0.0 { rng.random_range(0.05..=1.0) } else { rng.random_range(-1.0..=1.0) })
            .collect();
        let k = rng.random_range(0..d);
        delta[k] = if point[k] == 0.0 || rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let s0: Vec<f64> = point
            .iter()
            .zip(&delta)
            .map(|(p, dl)| {
                let v = p + PERTURBATION * dl;
                if v > 0.0 { v } else { p / 2.0 }
            })
            .collect();
        let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
            let s: Vec<f64> = s0.iter().zip(y).map(|(a, b)| a * b.exp()).collect();
            for (out, e) in dy.iter_mut().zip(eta(sys, &s)) {
                *out = -e;
            }
        };
        let mut exit = None;
        let mut first = true;
        let times: Vec<f64> = (1..=(ESCAPE_HORIZON as usize * 20)).map(|i| i as f64 * 0.05).collect();
        let observe = |t: f64, y: &[f64]| {
            if first {
                first = false;
                return true;
            }
            let dist = s0
                .iter()
                .zip(y)
                .zip(point)
                .map(|((a, b), p)| (a * b.exp() - p).abs())
                .fold(0.0, f64::max);
            if dist > ESCAPE_RADIUS {
                exit = Some(t);
                false
            } else {
                true
            }
        };
        ode::solve(rhs, 0.0, &vec![0.0; d], &times, &opts, observe)?;
        if let Some(t) = exit {
            escaped += 1;
            max_exit_time = max_exit_time.max(t);
        }
    }
    Ok(RepellingCertificate { trials, escaped, max_exit_time })
}

/// Bracket flow on the simplex `sum a = 1`: the replicator system
/// `(ln a_i)' = a^T U a - (U a)_i`, a time change of `a' = -a ⊙ (U a)` by
/// `dtau = (sum a) dt`. Returns `(tau, a)` samples.
pub fn simplex_bracket_flow(
    u: &[Vec<i64>],
    a0: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let m = u.len();
    if m == 0 || u.iter().any(|r| r.len() != m) {
        return Err(Error::BadGram);
    }
    if a0.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: a0.len() });
    }
    if let Some((index, &value)) = a0.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::NonPositive { what: "structure vector", index: index + 1, value });
    }
    let total: f64 = a0.iter().sum();
    let start: Vec<f64> = a0.iter().map(|x| x / total).collect();
    let normalize = |y: &[f64]| -> Vec<f64> {
        let a: Vec<f64> = start.iter().zip(y).map(|(s, v)| s * v.exp()).collect();
        let t: f64 = a.iter().sum();
        a.into_iter().map(|x| x / t).collect()
    };
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let a = normalize(y);
        let ua = mat_vec_i64(u, &a);
        let mean: f64 = a.iter().zip(&ua).map(|(x, y)| x * y).sum();
        for (d, v) in dy.iter_mut().zip(&ua) {
            *d = mean - v;
        }
    };
    let times = cfg.sample_times(0.0)?;
    let mut out = Vec::new();
    ode::solve(rhs, 0.0, &vec![0.0; m], &times, &cfg.ode_options(), |t, y| {
        out.push((t, normalize(y)));
        true
    })?;
    Ok(out)
}
