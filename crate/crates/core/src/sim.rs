//! Closed-loop time marching of the synchronization network.
//!
//! Each step evaluates the control at the current state, advances all agents
//! half a step with the Rodrigues map, re-evaluates the control at the
//! half state, and takes the full step from the original state (midpoint
//! scheme, order 2, norm-preserving by construction). The Lyapunov value is
//! monitored every step: an increase beyond tolerance flags the trace
//! invalid and stops the run instead of silently continuing.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::control::{kinematic_control, lyapunov_rate, lyapunov_value, ControlError, NetworkState};
use crate::graph::NetworkGraph;
use crate::kernels::DistanceKernel;
use crate::sphere::{geodesic_angle, rotate_step, UnitVector};
use crate::{real, Real};

/// Relative tolerance for the per-step Lyapunov monotonicity check:
/// `V_next ≤ V_prev + LYAPUNOV_TOL·(1 + V(0))`.
pub const LYAPUNOV_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error("non-finite state detected at step {step} (agent {agent})")]
    NonFiniteState { step: usize, agent: usize },
    #[error("non-finite kernel derivative at theta = {theta}")]
    NonFiniteDerivative { theta: f64 },
}

/// Initial condition source.
#[derive(Clone, Debug)]
pub enum InitialState<S> {
    Explicit(Vec<UnitVector<S>>),
    Random { seed: u64 },
}

/// Full description of a closed-loop run.
#[derive(Clone, Debug)]
pub struct SimulationConfig<S> {
    pub graph: NetworkGraph,
    /// One kernel per edge, in edge order.
    pub kernels: Vec<DistanceKernel<S>>,
    pub dt: S,
    pub t_end: S,
    pub record_every: usize,
    pub initial: InitialState<S>,
}

impl<S: Real> SimulationConfig<S> {
    /// Uniform kernel on every edge, default step and horizon.
    pub fn uniform(graph: NetworkGraph, kernel: DistanceKernel<S>, initial: InitialState<S>) -> Self {
        let kernels = vec![kernel; graph.n_edges()];
        Self {
            graph,
            kernels,
            dt: real::<S>(1e-3),
            t_end: real::<S>(50.0),
            record_every: 100,
            initial,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > S::zero()) {
            return Err(SimError::InvalidConfig(format!("dt must be positive (got {})", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(SimError::InvalidConfig(format!(
                "t_end must be at least dt (got t_end = {}, dt = {})",
                self.t_end, self.dt
            )));
        }
        if self.record_every == 0 {
            return Err(SimError::InvalidConfig("record_every must be at least 1".into()));
        }
        if self.kernels.len() != self.graph.n_edges() {
            return Err(SimError::InvalidConfig(format!(
                "{} kernels for {} edges",
                self.kernels.len(),
                self.graph.n_edges()
            )));
        }
        if let InitialState::Explicit(v) = &self.initial {
            if v.len() != self.graph.n_nodes() {
                return Err(SimError::InvalidConfig(format!(
                    "{} initial vectors for {} agents",
                    v.len(),
                    self.graph.n_nodes()
                )));
            }
        }
        Ok(())
    }
}

/// Details of a Lyapunov-increase violation.
#[derive(Clone, Copy, Debug)]
pub struct TraceViolation<S> {
    pub step: usize,
    pub time: S,
    pub v_prev: S,
    pub v_next: S,
}

/// Recorded output of a run. All series have equal length; `violation` is
/// `None` for a valid trace.
#[derive(Clone, Debug)]
pub struct SimulationTrace<S> {
    pub times: Vec<S>,
    pub states: Vec<NetworkState<S>>,
    pub v: Vec<S>,
    pub vdot: Vec<S>,
    /// `omega_norms[i][m]` is ‖ω_i‖ at sample m.
    pub omega_norms: Vec<Vec<S>>,
    /// `edge_error_norms[k][m]` is ‖e_k‖ at sample m.
    pub edge_error_norms: Vec<Vec<S>>,
    pub violation: Option<TraceViolation<S>>,
}

impl<S: Real> SimulationTrace<S> {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }

    pub fn n_samples(&self) -> usize {
        self.times.len()
    }

    pub fn n_agents(&self) -> usize {
        self.omega_norms.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_error_norms.len()
    }

    pub fn final_state(&self) -> &NetworkState<S> {
        self.states.last().expect("trace has at least one sample")
    }

    /// Geodesic angle between agents `i` and `j` at every sample.
    pub fn angle_series(&self, i: usize, j: usize) -> Vec<S> {
        self.states.iter().map(|s| geodesic_angle(&s.vectors[i], &s.vectors[j])).collect()
    }

    /// Stacked edge-error norm `√(Σ_k ‖e_k‖²)` at every sample.
    pub fn edge_error_stack(&self) -> Vec<S> {
        (0..self.n_samples())
            .map(|m| {
                self.edge_error_norms
                    .iter()
                    .map(|row| row[m] * row[m])
                    .fold(S::zero(), |a, x| a + x)
                    .sqrt()
            })
            .collect()
    }

    /// Writes the trace as CSV with 17-significant-digit floats, enough for
    /// exact f64 round-trips.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.n_agents();
        let m = self.n_edges();
        write!(w, "t,V,Vdot")?;
        for i in 1..=n {
            write!(w, ",omega_norm_{i}")?;
        }
        for k in 1..=m {
            write!(w, ",edge_err_{k}")?;
        }
        for i in 1..=n {
            write!(w, ",nx_{i},ny_{i},nz_{i}")?;
        }
        writeln!(w)?;
        for s in 0..self.n_samples() {
            write!(w, "{:.16e},{:.16e},{:.16e}", self.times[s], self.v[s], self.vdot[s])?;
            for i in 0..n {
                write!(w, ",{:.16e}", self.omega_norms[i][s])?;
            }
            for k in 0..m {
                write!(w, ",{:.16e}", self.edge_error_norms[k][s])?;
            }
            for vec in &self.states[s].vectors {
                write!(w, ",{:.16e},{:.16e},{:.16e}", vec.x(), vec.y(), vec.z())?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Draws `n_agents` directions by normalizing independent 3-variate standard
/// normals from a counter-based generator; the same `(seed, n_agents)` pair
/// reproduces the state bit for bit.
pub fn random_state<S: Real>(n_agents: usize, seed: u64) -> NetworkState<S> {
    assert!(n_agents >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors = Vec::with_capacity(n_agents);
    while vectors.len() < n_agents {
        let x: f64 = StandardNormal.sample(&mut rng);
        let y: f64 = StandardNormal.sample(&mut rng);
        let z: f64 = StandardNormal.sample(&mut rng);
        if let Ok(v) = UnitVector::new(real::<S>(x), real::<S>(y), real::<S>(z)) {
            vectors.push(v);
        }
    }
    NetworkState::new(vectors, S::zero())
}

fn resolve_initial<S: Real>(config: &SimulationConfig<S>) -> Vec<UnitVector<S>> {
    match &config.initial {
        InitialState::Explicit(v) => v.clone(),
        InitialState::Random { seed } => random_state(config.graph.n_nodes(), *seed).vectors,
    }
}

/// Runs the closed loop and records every `record_every`-th step plus the
/// initial and final states.
pub fn simulate<S: Real>(config: &SimulationConfig<S>) -> Result<SimulationTrace<S>, SimError> {
    config.validate()?;
    let graph = &config.graph;
    let kernels = &config.kernels;
    let n = graph.n_nodes();
    let m = graph.n_edges();

    let mut state = NetworkState::new(resolve_initial(config), S::zero());
    let v0 = lyapunov_value(&state, graph, kernels)?;
    let v_tol = real::<S>(LYAPUNOV_TOL) * (S::one() + v0);

    // Step count with the final step clipped onto t_end.
    let steps_f = (config.t_end / config.dt).to_f64().unwrap_or(0.0);
    let n_full = steps_f.floor() as usize;
    let remainder = config.t_end - S::from_usize(n_full).unwrap() * config.dt;
    let has_tail = remainder > config.dt * real::<S>(1e-9);
    let n_steps = n_full + usize::from(has_tail);

    let mut trace = SimulationTrace {
        times: Vec::new(),
        states: Vec::new(),
        v: Vec::new(),
        vdot: Vec::new(),
        omega_norms: vec![Vec::new(); n],
        edge_error_norms: vec![Vec::new(); m],
        violation: None,
    };

    let record = |state: &NetworkState<S>, trace: &mut SimulationTrace<S>| -> Result<(), SimError> {
        let control = kinematic_control(state, graph, kernels)?;
        trace.times.push(state.time);
        trace.v.push(lyapunov_value(state, graph, kernels)?);
        trace.vdot.push(lyapunov_rate(&control));
        for (i, w) in control.omegas.iter().enumerate() {
            trace.omega_norms[i].push(w.norm());
        }
        for (k, e) in control.edge_errors.iter().enumerate() {
            trace.edge_error_norms[k].push(e.norm());
        }
        trace.states.push(state.clone());
        Ok(())
    };

    record(&state, &mut trace)?;
    let mut v_prev = v0;

    for step in 0..n_steps {
        let t = S::from_usize(step).unwrap() * config.dt;
        let t_next =
            if step + 1 == n_steps { config.t_end } else { S::from_usize(step + 1).unwrap() * config.dt };
        let dt = t_next - t;

        // Midpoint: control at the state, half-step, control at the half
        // state, full step from the original state.
        let c0 = kinematic_control(&state, graph, kernels)?;
        let half = real::<S>(0.5) * dt;
        let half_state = NetworkState::new(
            state
                .vectors
                .iter()
                .zip(&c0.omegas)
                .map(|(v, w)| rotate_step(v, w, half))
                .collect(),
            t + half,
        );
        let c_half = kinematic_control(&half_state, graph, kernels)?;
        let next_vectors: Vec<_> = state
            .vectors
            .iter()
            .zip(&c_half.omegas)
            .map(|(v, w)| rotate_step(v, w, dt))
            .collect();

        for (agent, v) in next_vectors.iter().enumerate() {
            if !crate::linalg::is_finite_vec(v.as_vec3()) {
                return Err(SimError::NonFiniteState { step, agent });
            }
        }

        let next_state = NetworkState::new(next_vectors, t_next);
        let v_next = lyapunov_value(&next_state, graph, kernels)?;
        if v_next > v_prev + v_tol {
            trace.violation = Some(TraceViolation {
                step,
                time: t_next,
                v_prev,
                v_next,
            });
            break;
        }

        state = next_state;
        v_prev = v_next;

        let last = step + 1 == n_steps;
        if (step + 1) % config.record_every == 0 || last {
            record(&state, &mut trace)?;
        }
    }

    Ok(trace)
}

/// Scalar trajectory of the two-agent reduction.
#[derive(Clone, Debug)]
pub struct ScalarTrajectory<S> {
    pub times: Vec<S>,
    pub thetas: Vec<S>,
}

/// Integrates the two-agent angle dynamics `θ̇ = −2 f′(1 − cos θ) sin θ`
/// with the classical fourth-order scheme. Serves as the reduction oracle
/// for full two-agent simulations.
pub fn two_agent_scalar<S: Real>(
    kernel: &DistanceKernel<S>,
    theta0: S,
    t_end: S,
    dt: S,
) -> Result<ScalarTrajectory<S>, SimError> {
    if !(dt > S::zero()) {
        return Err(SimError::InvalidConfig(format!("dt must be positive (got {dt})")));
    }
    if theta0 < S::zero() || theta0 > S::PI() {
        return Err(SimError::InvalidConfig(format!("theta0 must lie in [0, π] (got {theta0})")));
    }
    let rhs = |theta: S| -> Result<S, SimError> {
        let fp = kernel.f_prime_guarded(S::one() - theta.cos());
        if !fp.is_finite() {
            return Err(SimError::NonFiniteDerivative { theta: theta.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(-real::<S>(2.0) * fp * theta.sin())
    };

    let steps_f = (t_end / dt).to_f64().unwrap_or(0.0);
    let n_full = steps_f.floor() as usize;
    let remainder = t_end - S::from_usize(n_full).unwrap() * dt;
    let has_tail = remainder > dt * real::<S>(1e-9);
    let n_steps = n_full + usize::from(has_tail);

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut thetas = Vec::with_capacity(n_steps + 1);
    times.push(S::zero());
    thetas.push(theta0);
    let mut theta = theta0;
    for step in 0..n_steps {
        let t = S::from_usize(step).unwrap() * dt;
        let t_next = if step + 1 == n_steps { t_end } else { S::from_usize(step + 1).unwrap() * dt };
        let h = t_next - t;
        let two = real::<S>(2.0);
        let six = real::<S>(6.0);
        let k1 = rhs(theta)?;
        let k2 = rhs(theta + h / two * k1)?;
        let k3 = rhs(theta + h / two * k2)?;
        let k4 = rhs(theta + h * k3)?;
        theta = theta + h / six * (k1 + two * k2 + two * k3 + k4);
        times.push(t_next);
        thetas.push(theta);
    }
    Ok(ScalarTrajectory { times, thetas })
}
