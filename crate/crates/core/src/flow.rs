//! Ricci flow of diagonal metrics and the Lie bracket flow of structure
//! vectors, integrated jointly in logarithmic variables.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::RootSystem;
use crate::curvature::{SolitonCertificate, DEFAULT_SOLITON_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, inf_norm, mat_vec_i64, vec_mat_i64, Rational};
use crate::ode::{self, OdeOptions, StepStats};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowState {
    pub t: f64,
    pub q: Vec<f64>,
    pub a: Vec<f64>,
}

impl FlowState {
    pub fn new(t: f64, q: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        for (what, v) in [("metric", &q), ("structure vector", &a)] {
            if let Some((index, &value)) =
                v.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x > 0.0))
            {
                return Err(Error::NonPositive { what, index: index + 1, value });
            }
        }
        Ok(Self { t, q, a })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<FlowState>,
    pub step_stats: StepStats,
    /// Exponent vectors of the monitored conserved monomials.
    pub invariants: Vec<Vec<i64>>,
    /// Max relative drift of each monitored monomial.
    pub invariant_drift: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &FlowState {
        self.samples.last().expect("trajectory holds the initial state")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub t_end: f64,
    pub max_steps: usize,
    pub initial_step: f64,
    /// Number of evenly spaced output times after the initial one.
    pub samples: usize,
    /// Also record every accepted step.
    pub record_steps: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            t_end: 1.0,
            max_steps: 1_000_000,
            initial_step: 1e-4,
            samples: 100,
            record_steps: false,
        }
    }
}

impl IntegratorConfig {
    pub fn with_t_end(t_end: f64) -> Self {
        Self { t_end, ..Self::default() }
    }

    pub(crate) fn ode_options(&self) -> OdeOptions {
        OdeOptions {
            rtol: self.rtol,
            atol: self.atol,
            max_steps: self.max_steps,
            initial_step: self.initial_step,
            report_steps: self.record_steps,
        }
    }

    /// Output times in `(t0, t_end]`.
    pub fn sample_times(&self, t0: f64) -> Result<Vec<f64>> {
        if !(self.t_end.is_finite() && self.t_end > t0) {
            return Err(Error::InvalidConfig(format!("t_end must exceed the start time {t0}")));
        }
        let k = self.samples.max(1);
        let span = self.t_end - t0;
        Ok((1..=k)
            .map(|i| if i == k { self.t_end } else { t0 + span * i as f64 / k as f64 })
            .collect())
    }
}

/// `da/dt = -a ⊙ (U a)`.
pub fn bracket_flow_rhs(roots: &RootSystem, a: &[f64]) -> Vec<f64> {
    mat_vec_i64(roots.gram(), a)
        .iter()
        .zip(a)
        .map(|(ua, ai)| -ai * ua)
        .collect()
}

/// `d ln q/dt = a^T Y`.
pub fn ricci_flow_rhs(roots: &RootSystem, a: &[f64]) -> Vec<f64> {
    vec_mat_i64(a, roots.root_matrix(), roots.n())
}

/// Right-hand side in `y = (ln(q/q0), ln(a/a0))`; offsets keep untouched
/// coordinates bit-exact.
fn log_rhs<'r>(roots: &'r RootSystem, a0: &'r [f64]) -> impl Fn(f64, &[f64], &mut [f64]) + 'r {
    let n = roots.n();
    move |_, y, dy| {
        let a: Vec<f64> = y[n..].iter().zip(a0).map(|(v, s)| s * v.exp()).collect();
        dy[..n].copy_from_slice(&ricci_flow_rhs(roots, &a));
        for (d, ua) in dy[n..].iter_mut().zip(mat_vec_i64(roots.gram(), &a)) {
            *d = -ua;
        }
    }
}

fn to_state(t: f64, y: &[f64], s0: &FlowState) -> FlowState {
    let n = s0.q.len();
    let scale = |v: &[f64], base: &[f64]| -> Vec<f64> {
        v.iter().zip(base).map(|(x, b)| b * x.exp()).collect()
    };
    FlowState { t, q: scale(&y[..n], &s0.q), a: scale(&y[n..], &s0.a) }
}

fn check_dims(roots: &RootSystem, s: &FlowState) -> Result<()> {
    if s.q.len() != roots.n() {
        return Err(Error::DimensionMismatch { expected: roots.n(), found: s.q.len() });
    }
    if s.a.len() != roots.m() {
        return Err(Error::DimensionMismatch { expected: roots.m(), found: s.a.len() });
    }
    FlowState::new(s.t, s.q.clone(), s.a.clone()).map(|_| ())
}

/// Integrates the coupled system from `state0` to `cfg.t_end`.
pub fn integrate(roots: &RootSystem, state0: &FlowState, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let times = cfg.sample_times(state0.t)?;
    integrate_at(roots, state0, &times, cfg)
}

/// Integrates the coupled system, sampling at the given increasing times.
pub fn integrate_at(
    roots: &RootSystem,
    state0: &FlowState,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    check_dims(roots, state0)?;
    let y0 = vec![0.0; roots.n() + roots.m()];
    let rhs = log_rhs(roots, &state0.a);
    let mut samples = Vec::with_capacity(times.len() + 1);
    let stats = ode::solve(rhs, state0.t, &y0, times, &cfg.ode_options(), |t, y| {
        samples.push(to_state(t, y, state0));
        true
    })
    .map_err(|e| match e {
        Error::StepUnderflow { t, h, state } => {
            let s = to_state(t, &state, state0);
            Error::StepUnderflow { t, h, state: s.q.into_iter().chain(s.a).collect() }
        }
        e => e,
    })?;
    let invariants = conserved_monomials(roots);
    let mut traj = Trajectory { samples, step_stats: stats, invariants, invariant_drift: vec![] };
    traj.invariant_drift = monitor_invariants(&traj, &traj.invariants);
    Ok(traj)
}

/// Integrates many initial states in parallel; results keep input order.
pub fn integrate_batch(
    roots: &RootSystem,
    states: &[FlowState],
    cfg: &IntegratorConfig,
) -> Vec<Result<Trajectory>> {
    states.par_iter().map(|s| integrate(roots, s, cfg)).collect()
}

fn parallel_ratio(a0: &[f64], a_star: &[f64]) -> (f64, f64) {
    let dot: f64 = a0.iter().zip(a_star).map(|(x, y)| x * y).sum();
    let nn: f64 = a_star.iter().map(|x| x * x).sum();
    let rho = dot / nn;
    let dev: Vec<f64> = a0.iter().zip(a_star).map(|(x, y)| x - rho * y).collect();
    (rho, inf_norm(&dev) / inf_norm(a0))
}

/// Closed-form evolution of a soliton state:
/// `a(t) = a0 / (1 - 2 beta t)` and `q_j(t) = q_j(0) (1 - 2 beta t)^(r_j / beta)`.
///
/// `state0.a` may be any positive multiple of the certified vector; the
/// constants are rescaled accordingly.
pub fn soliton_trajectory(cert: &SolitonCertificate, state0: &FlowState, t: f64) -> Result<FlowState> {
    let rel = cert.relative_residual();
    if !(rel < DEFAULT_SOLITON_TOL) {
        return Err(Error::NotSoliton { residual: rel });
    }
    if state0.a.len() != cert.a_star.len() {
        return Err(Error::DimensionMismatch { expected: cert.a_star.len(), found: state0.a.len() });
    }
    if state0.q.len() != cert.derivation_diag.len() {
        return Err(Error::DimensionMismatch {
            expected: cert.derivation_diag.len(),
            found: state0.q.len(),
        });
    }
    let (rho, dev) = parallel_ratio(&state0.a, &cert.a_star);
    if !(rho > 0.0 && dev < DEFAULT_SOLITON_TOL) {
        return Err(Error::NotSoliton { residual: dev });
    }
    let dt = t - state0.t;
    if dt == 0.0 {
        return Ok(state0.clone());
    }
    let beta = rho * cert.beta;
    let base = 1.0 - 2.0 * beta * dt;
    let a = state0.a.iter().map(|v| v / base).collect();
    let q = state0
        .q
        .iter()
        .zip(cert.ricci_vector())
        .map(|(q0, r)| if r == 0.0 { *q0 } else { q0 * base.powf(r / cert.beta) })
        .collect();
    Ok(FlowState { t, q, a })
}

/// Integer basis of `{d : Y d = 0}`; each gives a conserved monomial
/// `q_1^d_1 ... q_n^d_n`.
pub fn conserved_monomials(roots: &RootSystem) -> Vec<Vec<i64>> {
    linalg::integer_nullspace(roots.root_matrix(), roots.n())
}

/// Max over samples of `|sum d_i ln q_i - initial|`, relative to
/// `max(1, |initial|)`, for each direction.
pub fn monitor_invariants(traj: &Trajectory, dirs: &[Vec<i64>]) -> Vec<f64> {
    dirs.iter()
        .map(|d| {
            let value = |s: &FlowState| -> f64 {
                d.iter().zip(&s.q).map(|(&di, qi)| di as f64 * qi.ln()).sum()
            };
            let Some(first) = traj.samples.first() else { return 0.0 };
            let v0 = value(first);
            let scale = v0.abs().max(1.0);
            traj.samples
                .iter()
                .map(|s| (value(s) - v0).abs() / scale)
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Value of the monomial `prod q_i^d_i`.
pub fn monomial_value(q: &[f64], d: &[i64]) -> f64 {
    d.iter()
        .zip(q)
        .map(|(&di, qi)| di as f64 * qi.ln())
        .sum::<f64>()
        .exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseReport {
    /// Limit of `q / max(q)` along the soliton trajectory.
    pub normalized_limit: Vec<f64>,
    /// 0-based indices where the Ricci vector is minimal.
    pub e_min_indices: Vec<usize>,
    /// Growth exponents `r_j / beta`.
    pub exponents: Vec<f64>,
}

const TIE_TOL: f64 = 1e-12;

/// Asymptotics of the soliton trajectory: `q_j(t) ~ t^(r_j/beta)`, so after
/// sup-normalization only the minimal-Ricci directions survive.
pub fn collapse_analysis(roots: &RootSystem, cert: &SolitonCertificate, ric: &[f64]) -> Result<CollapseReport> {
    if roots.m() == 0 {
        return Err(Error::AbelianAlgebra);
    }
    if ric.len() != roots.n() {
        return Err(Error::DimensionMismatch { expected: roots.n(), found: ric.len() });
    }
    let exponents = ric.iter().map(|r| r / cert.beta).collect();
    let rmin = ric.iter().cloned().fold(f64::INFINITY, f64::min);
    let e_min_indices: Vec<usize> =
        (0..ric.len()).filter(|&i| ric[i] - rmin <= TIE_TOL).collect();
    let normalized_limit = (0..ric.len())
        .map(|i| if e_min_indices.contains(&i) { 1.0 } else { 0.0 })
        .collect();
    Ok(CollapseReport { normalized_limit, e_min_indices, exponents })
}

/// Exact growth exponents `r_j / beta` and the exact minimal set.
pub fn collapse_exponents_exact(ric: &[Rational], beta: &Rational) -> (Vec<Rational>, Vec<usize>) {
    let exps = ric.iter().map(|r| r / beta).collect();
    let min = ric.iter().min().cloned();
    let idx = (0..ric.len()).filter(|&i| Some(&ric[i]) == min.as_ref()).collect();
    (exps, idx)
}

/// `q / max(q)`.
pub fn volume_normalize(q: &[f64]) -> Vec<f64> {
    let m = q.iter().cloned().fold(0.0_f64, f64::max);
    q.iter().map(|v| v / m).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalCollapse {
    pub normalized_final: Vec<f64>,
    /// Least-squares slopes of `ln q_j` against `ln t` over the last decade.
    pub fitted_exponents: Vec<f64>,
}

/// Collapse diagnostics for an arbitrary trajectory.
pub fn empirical_collapse(traj: &Trajectory) -> EmpiricalCollapse {
    let last = traj.last();
    let t_end = last.t;
    let window: Vec<&FlowState> = traj
        .samples
        .iter()
        .filter(|s| s.t > 0.0 && s.t >= t_end / 10.0)
        .collect();
    let n = last.q.len();
    let fitted_exponents = if window.len() < 2 {
        vec![f64::NAN; n]
    } else {
        let xs: Vec<f64> = window.iter().map(|s| s.t.ln()).collect();
        let xm = xs.iter().sum::<f64>() / xs.len() as f64;
        let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
        (0..n)
            .map(|j| {
                let ys: Vec<f64> = window.iter().map(|s| s.q[j].ln()).collect();
                let ym = ys.iter().sum::<f64>() / ys.len() as f64;
                xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum::<f64>() / sxx
            })
            .collect()
    };
    EmpiricalCollapse { normalized_final: volume_normalize(&last.q), fitted_exponents }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{root_system, BracketSpec, StructureVector};
    use crate::curvature::soliton_test;

    fn roots(dim: usize, b: &[(usize, usize, usize, i64)]) -> RootSystem {
        root_system(&BracketSpec::from_one_based(dim, b).unwrap()).unwrap()
    }
    fn h3() -> RootSystem {
        roots(3, &[(1, 2, 3, 1)])
    }
    fn p5() -> RootSystem {
        roots(5, &[(1, 3, 4, 1), (1, 4, 5, 1), (2, 3, 5, 1)])
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(bracket_flow_rhs(&h3(), &[1.0]), vec![-3.0]);
        let h5 = roots(5, &[(1, 2, 5, 1), (3, 4, 5, 1)]);
        assert_eq!(bracket_flow_rhs(&h5, &[1.0, 1.0]), vec![-4.0, -4.0]);
        assert_eq!(bracket_flow_rhs(&h5, &[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(ricci_flow_rhs(&p5(), &[2.0, 2.0, 1.0]), vec![4.0, 1.0, 3.0, 0.0, -3.0]);
        assert_eq!(ricci_flow_rhs(&h3(), &[1.0]), vec![1.0, 1.0, -1.0]);
    }

    #[test]
    fn h3_closed_form() {
        let s0 = FlowState::new(0.0, vec![1.0; 3], vec![1.0]).unwrap();
        let tr = integrate(&h3(), &s0, &IntegratorConfig::with_t_end(10.0)).unwrap();
        let q = &tr.last().q;
        assert!((q[0] - 31f64.powf(1.0 / 3.0)).abs() < 1e-8);
        assert!((tr.last().a[0] - 1.0 / 31.0).abs() < 1e-10);
        assert!(tr.invariant_drift.iter().all(|&d| d < 1e-10));
    }

    #[test]
    fn abelian_is_constant() {
        let r = RootSystem::abelian(3);
        let s0 = FlowState::new(0.0, vec![1.0, 2.0, 3.0], vec![]).unwrap();
        let tr = integrate(&r, &s0, &IntegratorConfig::with_t_end(5.0)).unwrap();
        assert!(tr.samples.iter().all(|s| s.q == vec![1.0, 2.0, 3.0]));
        assert_eq!(tr.invariants.len(), 3);
    }

    #[test]
    fn prototype_soliton_start() {
        let s0 = FlowState::new(0.0, vec![1.0, 4.0, 1.0, 2.0, 4.0], vec![2.0, 2.0, 1.0]).unwrap();
        let tr = integrate(&p5(), &s0, &IntegratorConfig::with_t_end(1.0)).unwrap();
        let q = &tr.last().q;
        assert!((q[4] - 4.0 * 8f64.powf(-3.0 / 7.0)).abs() < 1e-9);
        assert!(tr.samples.iter().all(|s| (s.q[3] - 2.0).abs() < 1e-12));
    }

    #[test]
    fn closed_form_matches_prototype() {
        let r = p5();
        let cert = soliton_test(&r, &StructureVector(vec![2.0, 2.0, 1.0]), 1e-12).unwrap();
        let s0 = FlowState::new(0.0, vec![1.0, 4.0, 1.0, 2.0, 4.0], vec![2.0, 2.0, 1.0]).unwrap();
        let s = soliton_trajectory(&cert, &s0, 3.0).unwrap();
        assert_eq!(s.a, vec![2.0 / 22.0, 2.0 / 22.0, 1.0 / 22.0]);
        assert_eq!(s.q[3], 2.0);
        assert!((s.q[4] - 4.0 * 22f64.powf(-3.0 / 7.0)).abs() < 1e-14);
        assert_eq!(soliton_trajectory(&cert, &s0, 0.0).unwrap(), s0);
    }

    #[test]
    fn closed_form_rescaled_ray() {
        let r = p5();
        let cert = soliton_test(&r, &StructureVector(vec![2.0, 2.0, 1.0]), 1e-12).unwrap();
        let s0 = FlowState::new(0.0, vec![1.0; 5], vec![1.0, 1.0, 0.5]).unwrap();
        let s = soliton_trajectory(&cert, &s0, 2.0).unwrap();
        // beta scales with the ray parameter 1/2.
        assert!((s.a[2] - 0.5 / 8.0).abs() < 1e-15);
        let bad = FlowState::new(0.0, vec![1.0; 5], vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(soliton_trajectory(&cert, &bad, 1.0), Err(Error::NotSoliton { .. })));
    }

    #[test]
    fn conserved_monomial_bases() {
        let h = conserved_monomials(&h3());
        assert_eq!(h.len(), 2);
        for d in &h {
            assert_eq!(d[0] + d[1] - d[2], 0);
        }
        let l4 = roots(4, &[(1, 2, 3, 1), (1, 3, 4, 1)]);
        assert_eq!(conserved_monomials(&l4).len(), 2);
        let full = RootSystem::from_triples(
            2,
            vec![crate::algebra::Triple::new(0, 1, 0), crate::algebra::Triple::new(0, 1, 1)],
        );
        assert!(conserved_monomials(&full).is_empty());
    }

    #[test]
    fn drift_of_trivial_directions() {
        let r = RootSystem::abelian(2);
        let s0 = FlowState::new(0.0, vec![1.0, 2.0], vec![]).unwrap();
        let tr = integrate(&r, &s0, &IntegratorConfig::with_t_end(1.0)).unwrap();
        assert_eq!(monitor_invariants(&tr, &[vec![0, 0], vec![1, 1]]), vec![0.0, 0.0]);
    }

    #[test]
    fn collapse_of_examples() {
        let r = p5();
        let a = StructureVector(vec![2.0, 2.0, 1.0]);
        let cert = soliton_test(&r, &a, 1e-12).unwrap();
        let rep = collapse_analysis(&r, &cert, &cert.ricci_vector()).unwrap();
        assert_eq!(rep.e_min_indices, vec![0]);
        assert_eq!(rep.normalized_limit, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let expect = [4.0 / 7.0, 1.0 / 7.0, 3.0 / 7.0, 0.0, -3.0 / 7.0];
        for (e, x) in rep.exponents.iter().zip(expect) {
            assert!((e - x).abs() < 1e-15);
        }
        let r = h3();
        let cert = soliton_test(&r, &StructureVector(vec![1.0]), 1e-12).unwrap();
        let rep = collapse_analysis(&r, &cert, &cert.ricci_vector()).unwrap();
        assert_eq!(rep.e_min_indices, vec![0, 1]);
        assert_eq!(rep.normalized_limit, vec![1.0, 1.0, 0.0]);
        assert!(collapse_analysis(&RootSystem::abelian(2), &cert, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn normalization() {
        assert_eq!(volume_normalize(&[5.0, 5.0, 5.0]), vec![1.0; 3]);
        assert_eq!(volume_normalize(&[1.0, 0.5]), vec![1.0, 0.5]);
    }

    #[test]
    fn empirical_slopes_for_h3() {
        let s0 = FlowState::new(0.0, vec![1.0; 3], vec![1.0]).unwrap();
        let cfg = IntegratorConfig { samples: 200, ..IntegratorConfig::with_t_end(1e5) };
        let tr = integrate(&h3(), &s0, &cfg).unwrap();
        let rep = empirical_collapse(&tr);
        assert!((rep.fitted_exponents[0] - 1.0 / 3.0).abs() < 1e-3);
        assert!((rep.fitted_exponents[2] + 1.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn batch_preserves_order() {
        let states: Vec<FlowState> = (1..=4)
            .map(|i| FlowState::new(0.0, vec![1.0; 3], vec![i as f64]).unwrap())
            .collect();
        let out = integrate_batch(&h3(), &states, &IntegratorConfig::with_t_end(1.0));
        for (i, tr) in out.iter().enumerate() {
            let a0 = (i + 1) as f64;
            let a = tr.as_ref().unwrap().last().a[0];
            assert!((a - a0 / (3.0 * a0 + 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn dimension_errors() {
        let s0 = FlowState { t: 0.0, q: vec![1.0; 2], a: vec![1.0] };
        assert!(matches!(
            integrate(&h3(), &s0, &IntegratorConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(FlowState::new(0.0, vec![-1.0], vec![]).is_err());
    }
}
