//! Convergence diagnostics for simulation traces.
//!
//! Three questions come up for every run: did the network synchronize, does
//! the error decay exponentially (log-linear fit), and does each agent
//! settle onto a constant direction (tail drift). A vanishing angular
//! velocity alone does not imply a constant limit, so the drift check is a
//! separate diagnostic from the rate fit.

use thiserror::Error;

use crate::control::NetworkState;
use crate::sim::SimulationTrace;
use crate::sphere::{geodesic_angle, UnitVector};
use crate::{real, Real};

/// Values at or below this floor are excluded from log-linear fits.
pub const FIT_FLOOR: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("window fraction must lie in (0, 1] (got {0})")]
    BadWindow(f64),
    #[error("only {usable} usable samples in the fit window; need at least {needed}")]
    TooFewSamples { usable: usize, needed: usize },
    #[error("series lengths differ: {times} times vs {values} values")]
    LengthMismatch { times: usize, values: usize },
    #[error("tail window is empty")]
    EmptyTail,
}

/// Result of a log-linear decay fit.
#[derive(Clone, Copy, Debug)]
pub struct ExpFit<S> {
    /// Decay rate λ in `series ≈ C·exp(−λ t)`.
    pub rate: S,
    pub r_squared: S,
    pub n_samples: usize,
}

/// Least-squares fit of `log(series)` against time over the trailing
/// `window` fraction of samples. Samples at or below [`FIT_FLOOR`] are
/// dropped; fewer than 10 usable samples is an error.
pub fn fit_exponential_rate<S: Real>(
    times: &[S],
    values: &[S],
    window: S,
) -> Result<ExpFit<S>, DiagnosticsError> {
    if times.len() != values.len() {
        return Err(DiagnosticsError::LengthMismatch { times: times.len(), values: values.len() });
    }
    if !(window > S::zero() && window <= S::one()) {
        return Err(DiagnosticsError::BadWindow(window.to_f64().unwrap_or(f64::NAN)));
    }
    let len = times.len();
    let take = ((real::<S>(len as f64) * window).ceil().to_usize().unwrap_or(len)).clamp(1, len);
    let start = len - take;

    let floor = real::<S>(FIT_FLOOR);
    let pts: Vec<(S, S)> = times[start..]
        .iter()
        .zip(&values[start..])
        .filter(|(_, &v)| v > floor)
        .map(|(&t, &v)| (t, v.ln()))
        .collect();
    if pts.len() < 10 {
        return Err(DiagnosticsError::TooFewSamples { usable: pts.len(), needed: 10 });
    }

    let n = real::<S>(pts.len() as f64);
    let sum_t = pts.iter().map(|p| p.0).fold(S::zero(), |a, x| a + x);
    let sum_y = pts.iter().map(|p| p.1).fold(S::zero(), |a, x| a + x);
    let mean_t = sum_t / n;
    let mean_y = sum_y / n;
    let mut stt = S::zero();
    let mut sty = S::zero();
    for &(t, y) in &pts {
        stt = stt + (t - mean_t) * (t - mean_t);
        sty = sty + (t - mean_t) * (y - mean_y);
    }
    let slope = if stt > S::zero() { sty / stt } else { S::zero() };
    let intercept = mean_y - slope * mean_t;

    let mut ss_res = S::zero();
    let mut ss_tot = S::zero();
    for &(t, y) in &pts {
        let pred = intercept + slope * t;
        ss_res = ss_res + (y - pred) * (y - pred);
        ss_tot = ss_tot + (y - mean_y) * (y - mean_y);
    }
    let r_squared = if ss_tot > S::zero() { S::one() - ss_res / ss_tot } else { S::one() };

    Ok(ExpFit { rate: -slope, r_squared, n_samples: pts.len() })
}

/// Constant-limit verdict for one agent.
#[derive(Clone, Copy, Debug)]
pub struct LimitCheck<S> {
    pub constant_limit: bool,
    /// Largest geodesic angle between a tail sample and the final sample.
    pub tail_drift: S,
}

/// Drift of a single direction series over the trailing `tail` fraction.
pub fn series_limit_check<S: Real>(
    times: &[S],
    points: &[UnitVector<S>],
    tail: S,
    tol: S,
) -> Result<LimitCheck<S>, DiagnosticsError> {
    if times.len() != points.len() {
        return Err(DiagnosticsError::LengthMismatch { times: times.len(), values: points.len() });
    }
    if !(tail > S::zero() && tail <= S::one()) {
        return Err(DiagnosticsError::BadWindow(tail.to_f64().unwrap_or(f64::NAN)));
    }
    let len = points.len();
    let take = ((real::<S>(len as f64) * tail).ceil().to_usize().unwrap_or(len)).clamp(1, len);
    let start = len - take;
    let last = points.last().ok_or(DiagnosticsError::EmptyTail)?;
    let mut drift = S::zero();
    for p in &points[start..] {
        drift = drift.max(geodesic_angle(p, last));
    }
    Ok(LimitCheck { constant_limit: drift < tol, tail_drift: drift })
}

/// Per-agent constant-limit check on a trace.
pub fn constant_limit_check<S: Real>(
    trace: &SimulationTrace<S>,
    tail: S,
    tol: S,
) -> Result<Vec<LimitCheck<S>>, DiagnosticsError> {
    if trace.n_samples() == 0 {
        return Err(DiagnosticsError::EmptyTail);
    }
    (0..trace.n_agents())
        .map(|i| {
            let series: Vec<UnitVector<S>> =
                trace.states.iter().map(|s| s.vectors[i]).collect();
            series_limit_check(&trace.times, &series, tail, tol)
        })
        .collect()
}

/// Largest pairwise geodesic angle of a network state.
pub fn final_spread<S: Real>(state: &NetworkState<S>) -> S {
    let mut spread = S::zero();
    for i in 0..state.n_agents() {
        for j in (i + 1)..state.n_agents() {
            spread = spread.max(geodesic_angle(&state.vectors[i], &state.vectors[j]));
        }
    }
    spread
}

/// Thresholds used by [`convergence_report`].
#[derive(Clone, Copy, Debug)]
pub struct ReportOptions<S> {
    /// Spread below which the network counts as synchronized.
    pub spread_tol: S,
    /// Trailing fraction of samples for the drift check.
    pub tail_fraction: S,
    /// Drift below which an agent counts as settled.
    pub drift_tol: S,
    /// Trailing fraction of the usable stacked-error series for the fit.
    pub fit_window: S,
}

impl<S: Real> Default for ReportOptions<S> {
    fn default() -> Self {
        Self {
            spread_tol: real::<S>(1e-4),
            tail_fraction: real::<S>(0.2),
            drift_tol: real::<S>(1e-4),
            fit_window: real::<S>(0.5),
        }
    }
}

/// Summary verdict for a trace.
#[derive(Clone, Debug)]
pub struct ConvergenceReport<S> {
    pub synchronized: bool,
    pub final_spread: S,
    pub exp_rate: Option<S>,
    pub exp_r_squared: Option<S>,
    pub constant_limit: bool,
    pub limit_vector: Option<UnitVector<S>>,
    pub tail_drift: S,
}

/// Builds the convergence report: spread at the end, a log-linear fit of
/// the stacked edge-error norm (truncated where it falls below 1e-12), and
/// the per-agent drift check.
pub fn convergence_report<S: Real>(
    trace: &SimulationTrace<S>,
    opts: &ReportOptions<S>,
) -> Result<ConvergenceReport<S>, DiagnosticsError> {
    let spread = final_spread(trace.final_state());
    let synchronized = spread < opts.spread_tol;

    let stack = trace.edge_error_stack();
    let cutoff = real::<S>(1e-12);
    let usable = stack.iter().take_while(|&&v| v > cutoff).count().max(1);
    let fit = fit_exponential_rate(&trace.times[..usable], &stack[..usable], opts.fit_window).ok();

    let checks = constant_limit_check(trace, opts.tail_fraction, opts.drift_tol)?;
    let constant_limit = checks.iter().all(|c| c.constant_limit);
    let tail_drift = checks.iter().map(|c| c.tail_drift).fold(S::zero(), S::max);

    let limit_vector = if synchronized && constant_limit {
        let sum = trace.final_state().vectors.iter().fold([S::zero(); 3], |acc, v| {
            crate::linalg::add(&acc, v.as_vec3())
        });
        UnitVector::from_vec3(sum).ok()
    } else {
        None
    };

    Ok(ConvergenceReport {
        synchronized,
        final_spread: spread,
        exp_rate: fit.map(|f| f.rate),
        exp_r_squared: fit.map(|f| f.r_squared),
        constant_limit,
        limit_vector,
        tail_drift,
    })
}
