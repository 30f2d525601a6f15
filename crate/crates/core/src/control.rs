//! The kinematic synchronization law.
//!
//! Each edge `k = (i, j)` (tail `n_i`, head `n_j`) contributes the error
//! `e_k = f′_k(s)·(n_i × n_j)`; agent `i` is driven by the signed sum of its
//! incident edge errors, `ω_i = Σ_k B[i,k]·e_k`. Working in the inertial
//! frame drops the body-frame rotation of the stacked error, which changes
//! no norm and no Lyapunov quantity.

use thiserror::Error;

use crate::graph::NetworkGraph;
use crate::kernels::{DistanceKernel, EdgeError};
use crate::linalg::{add, norm_sq, sub};
use crate::sphere::{AngularVelocity, UnitVector};
use crate::Real;

#[derive(Debug, Error)]
pub enum ControlError {
    #[error("state has {state} agents but the graph has {graph} nodes")]
    StateSizeMismatch { state: usize, graph: usize },
    #[error("{kernels} kernels provided for {edges} edges")]
    KernelCountMismatch { kernels: usize, edges: usize },
}

/// The stacked network state: one unit vector per agent.
#[derive(Clone, Debug)]
pub struct NetworkState<S> {
    pub vectors: Vec<UnitVector<S>>,
    pub time: S,
}

impl<S: Real> NetworkState<S> {
    pub fn new(vectors: Vec<UnitVector<S>>, time: S) -> Self {
        Self { vectors, time }
    }

    pub fn n_agents(&self) -> usize {
        self.vectors.len()
    }

    /// All agents at the same attitude.
    pub fn synchronized(n: &UnitVector<S>, n_agents: usize, time: S) -> Self {
        Self { vectors: vec![*n; n_agents], time }
    }
}

/// Output of the kinematic control law.
#[derive(Clone, Debug)]
pub struct ControlOutput<S> {
    pub omegas: Vec<AngularVelocity<S>>,
    pub edge_errors: Vec<EdgeError<S>>,
}

fn check_sizes<S: Real>(
    state: &NetworkState<S>,
    graph: &NetworkGraph,
    kernels: &[DistanceKernel<S>],
) -> Result<(), ControlError> {
    if state.n_agents() != graph.n_nodes() {
        return Err(ControlError::StateSizeMismatch {
            state: state.n_agents(),
            graph: graph.n_nodes(),
        });
    }
    if kernels.len() != graph.n_edges() {
        return Err(ControlError::KernelCountMismatch {
            kernels: kernels.len(),
            edges: graph.n_edges(),
        });
    }
    Ok(())
}

/// Edge errors for every edge of the graph, in edge order.
pub fn compute_edge_errors<S: Real>(
    state: &NetworkState<S>,
    graph: &NetworkGraph,
    kernels: &[DistanceKernel<S>],
) -> Result<Vec<EdgeError<S>>, ControlError> {
    check_sizes(state, graph, kernels)?;
    Ok(graph
        .edges()
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| EdgeError {
            edge: k,
            vector: kernels[k].edge_error(&state.vectors[i], &state.vectors[j]),
        })
        .collect())
}

/// The control law `ω_i = Σ_k B[i,k]·e_k`.
pub fn kinematic_control<S: Real>(
    state: &NetworkState<S>,
    graph: &NetworkGraph,
    kernels: &[DistanceKernel<S>],
) -> Result<ControlOutput<S>, ControlError> {
    let edge_errors = compute_edge_errors(state, graph, kernels)?;
    let mut omegas = vec![[S::zero(); 3]; state.n_agents()];
    for (e, &(i, j)) in edge_errors.iter().zip(graph.edges()) {
        omegas[i] = add(&omegas[i], &e.vector);
        omegas[j] = sub(&omegas[j], &e.vector);
    }
    Ok(ControlOutput {
        omegas: omegas.into_iter().map(AngularVelocity).collect(),
        edge_errors,
    })
}

/// The Lyapunov function `V = Σ_k d_k(n_tail, n_head)`.
pub fn lyapunov_value<S: Real>(
    state: &NetworkState<S>,
    graph: &NetworkGraph,
    kernels: &[DistanceKernel<S>],
) -> Result<S, ControlError> {
    check_sizes(state, graph, kernels)?;
    Ok(graph
        .edges()
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| kernels[k].distance(&state.vectors[i], &state.vectors[j]))
        .fold(S::zero(), |acc, d| acc + d))
}

/// `V̇ = −‖(B⊗I)e‖² = −Σ_i ‖ω_i‖²`, always nonpositive.
pub fn lyapunov_rate<S: Real>(control: &ControlOutput<S>) -> S {
    -control.omegas.iter().map(|w| norm_sq(w.as_vec3())).fold(S::zero(), |acc, x| acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn uv(x: f64, y: f64, z: f64) -> UnitVector<f64> {
        UnitVector::new(x, y, z).unwrap()
    }

    fn kernels(n: usize, a: f64) -> Vec<DistanceKernel<f64>> {
        vec![DistanceKernel::linear_cos(a).unwrap(); n]
    }

    #[test]
    fn synchronized_state_has_zero_errors_and_omegas() {
        let g = NetworkGraph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let state = NetworkState::synchronized(&uv(0.3, -0.5, 0.9), 3, 0.0);
        let out = kinematic_control(&state, &g, &kernels(3, 1.0)).unwrap();
        for e in &out.edge_errors {
            assert_eq!(e.vector, [0.0, 0.0, 0.0]);
        }
        for w in &out.omegas {
            assert_eq!(*w.as_vec3(), [0.0, 0.0, 0.0]);
        }
        assert_eq!(lyapunov_value(&state, &g, &kernels(3, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn two_agent_edge_error_and_control() {
        let g = NetworkGraph::new(2, &[(0, 1)]).unwrap();
        let state = NetworkState::new(vec![uv(1.0, 0.0, 0.0), uv(0.0, 1.0, 0.0)], 0.0);
        let out = kinematic_control(&state, &g, &kernels(1, 1.0)).unwrap();
        assert_eq!(out.edge_errors[0].vector, [0.0, 0.0, 1.0]);
        assert_eq!(*out.omegas[0].as_vec3(), [0.0, 0.0, 1.0]);
        assert_eq!(*out.omegas[1].as_vec3(), [0.0, 0.0, -1.0]);
    }

    #[test]
    fn triangle_edge_errors_by_hand() {
        // Edges (0,1), (1,2), (0,2) with agents at e₁, e₂, e₃:
        // e₁×e₂ = e₃, e₂×e₃ = e₁, e₁×e₃ = −e₂.
        let g = NetworkGraph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let state =
            NetworkState::new(vec![uv(1.0, 0.0, 0.0), uv(0.0, 1.0, 0.0), uv(0.0, 0.0, 1.0)], 0.0);
        let errs = compute_edge_errors(&state, &g, &kernels(3, 1.0)).unwrap();
        assert_eq!(errs[0].vector, [0.0, 0.0, 1.0]);
        assert_eq!(errs[1].vector, [1.0, 0.0, 0.0]);
        assert_eq!(errs[2].vector, [0.0, -1.0, 0.0]);
    }

    #[test]
    fn omegas_sum_to_zero() {
        let g = NetworkGraph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).unwrap();
        let state = NetworkState::new(
            vec![uv(0.3, 0.1, 0.9), uv(-0.5, 0.4, 0.2), uv(0.8, -0.1, 0.5), uv(0.0, 0.9, -0.3)],
            0.0,
        );
        let out = kinematic_control(&state, &g, &kernels(5, 1.3)).unwrap();
        let mut sum = [0.0; 3];
        for w in &out.omegas {
            sum = add(&sum, w.as_vec3());
        }
        assert!(crate::linalg::norm(&sum) < 1e-13);
    }

    #[test]
    fn lyapunov_values_for_two_agents() {
        let g = NetworkGraph::new(2, &[(0, 1)]).unwrap();
        let orth = NetworkState::new(vec![uv(1.0, 0.0, 0.0), uv(0.0, 1.0, 0.0)], 0.0);
        assert_relative_eq!(lyapunov_value(&orth, &g, &kernels(1, 1.0)).unwrap(), 1.0);

        let anti = NetworkState::new(vec![uv(1.0, 0.0, 0.0), uv(-1.0, 0.0, 0.0)], 0.0);
        assert_relative_eq!(lyapunov_value(&anti, &g, &kernels(1, 1.0)).unwrap(), 2.0);
    }

    #[test]
    fn lyapunov_rate_scales_with_gain_squared() {
        let g = NetworkGraph::new(2, &[(0, 1)]).unwrap();
        let state = NetworkState::new(vec![uv(1.0, 0.0, 0.0), uv(0.0, 1.0, 0.0)], 0.0);

        let out = kinematic_control(&state, &g, &kernels(1, 1.0)).unwrap();
        assert_relative_eq!(lyapunov_rate(&out), -2.0);

        let out = kinematic_control(&state, &g, &kernels(1, 2.0)).unwrap();
        assert_relative_eq!(lyapunov_rate(&out), -8.0);
    }

    #[test]
    fn size_mismatches_are_reported() {
        let g = NetworkGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let short = NetworkState::new(vec![uv(1.0, 0.0, 0.0)], 0.0);
        assert!(matches!(
            kinematic_control(&short, &g, &kernels(2, 1.0)),
            Err(ControlError::StateSizeMismatch { .. })
        ));
        let state = NetworkState::synchronized(&uv(1.0, 0.0, 0.0), 3, 0.0);
        assert!(matches!(
            kinematic_control(&state, &g, &kernels(1, 1.0)),
            Err(ControlError::KernelCountMismatch { .. })
        ));
    }

    #[test]
    fn antipodal_pair_is_stationary() {
        let g = NetworkGraph::new(2, &[(0, 1)]).unwrap();
        let n = uv(0.2, -0.4, 0.6);
        let state = NetworkState::new(vec![n, n.antipode()], 0.0);
        let out = kinematic_control(&state, &g, &kernels(1, 1.0)).unwrap();
        assert_eq!(*out.omegas[0].as_vec3(), [0.0, 0.0, 0.0]);
        assert_eq!(*out.omegas[1].as_vec3(), [0.0, 0.0, 0.0]);
    }
}
