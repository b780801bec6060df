//! Dormand–Prince 5(4) with PI step-size control.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub initial_step: f64,
    /// Also report every accepted step, not only the requested times.
    pub report_steps: bool,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, max_steps: 1_000_000, initial_step: 1e-4, report_steps: false }
    }
}

impl OdeOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.rtol) || !ok(self.atol) {
            return Err(Error::InvalidConfig("rtol and atol must be positive".into()));
        }
        if !ok(self.initial_step) {
            return Err(Error::InvalidConfig("initial_step must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Largest scaled error norm among accepted steps (at most 1).
    pub max_error: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn combine(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    for i in 0..y.len() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// Integrates `y' = f(t, y)` from `t0` through the increasing `times`.
///
/// `observer(t, y)` is called at `t0`, at each requested time (hit exactly),
/// and at each accepted step when `report_steps` is set. Returning `false`
/// stops the integration early.
pub fn solve<F, O>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    times: &[f64],
    opts: &OdeOptions,
    mut observer: O,
) -> Result<StepStats>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]) -> bool,
{
    opts.validate()?;
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < t0) {
        return Err(Error::InvalidConfig("sample times must increase from t0".into()));
    }
    let n = y0.len();
    let mut stats = StepStats::default();
    let mut t = t0;
    let mut y = y0.to_vec();
    if !observer(t, &y) {
        return Ok(stats);
    }
    let mut targets = times.iter().copied().skip_while(|&s| s == t0).peekable();
    if targets.peek().is_none() {
        return Ok(stats);
    }

    let mut k1 = vec![0.0; n];
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    f(t, &y, &mut k1);

    let mut h = opts.initial_step;
    let mut fac_old = 1e-4_f64;
    let mut last_rejected = false;
    let expo = 0.2 - BETA * 0.75;
    let mut steps = 0usize;

    while let Some(&target) = targets.peek() {
        if steps >= opts.max_steps {
            return Err(Error::StepLimitExceeded { max_steps: opts.max_steps, t });
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h, state: y });
        }
        let hits = t + h >= target;
        let hs = if hits { target - t } else { h };

        combine(&mut ytmp, &y, hs, &[(A21, &k1)]);
        f(t + C2 * hs, &ytmp, &mut k2);
        combine(&mut ytmp, &y, hs, &[(A31, &k1), (A32, &k2)]);
        f(t + C3 * hs, &ytmp, &mut k3);
        combine(&mut ytmp, &y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        f(t + C4 * hs, &ytmp, &mut k4);
        combine(&mut ytmp, &y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        f(t + C5 * hs, &ytmp, &mut k5);
        combine(&mut ytmp, &y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        f(t + hs, &ytmp, &mut k6);
        combine(&mut ynew, &y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let tn = if hits { target } else { t + hs };
        f(tn, &ynew, &mut k7);
        steps += 1;

        let mut sum = 0.0;
        for i in 0..n {
            let e = hs
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            sum += (e / sk).powi(2);
        }
        let err = if n == 0 { 0.0 } else { (sum / n as f64).sqrt() };
        if !err.is_finite() {
            h = hs * FAC_MIN;
            stats.rejected += 1;
            last_rejected = true;
            continue;
        }

        let fac11 = err.powf(expo);
        if err <= 1.0 {
            let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut hnew = hs / fac;
            if last_rejected {
                hnew = hnew.min(hs);
            }
            fac_old = err.max(1e-4);
            stats.accepted += 1;
            stats.max_error = stats.max_error.max(err);
            t = tn;
            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(&mut k1, &mut k7);
            last_rejected = false;
            if hits {
                targets.next();
                // A clipped step says nothing about the natural step size.
                h = h.max(hnew);
                if !observer(t, &y) {
                    break;
                }
            } else {
                h = hnew;
                if opts.report_steps && !observer(t, &y) {
                    break;
                }
            }
        } else {
            h = hs / (fac11 / SAFETY).min(1.0 / FAC_MIN);
            stats.rejected += 1;
            last_rejected = true;
        }
    }
    Ok(stats)
}
