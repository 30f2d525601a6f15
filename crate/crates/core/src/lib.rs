//! Attitude synchronization of unit-vector networks on the sphere.
//!
//! A network of agents, each carrying a reduced attitude `n ∈ S²`, is steered
//! toward a synchronized configuration by the kinematic control law
//! `ω_i = Σ_k B[i,k]·e_k`, where `B` is the oriented incidence matrix of the
//! communication graph and `e_k = f′(1 − n_tᵀn_h)·(n_t × n_h)` is the edge
//! error induced by a distance kernel `f`. The sum of edge distances
//! `V = Σ_k f(1 − n_tᵀn_h)` acts as a Lyapunov function with
//! `V̇ = −Σ_i ‖ω_i‖²`.
//!
//! ## Modules
//!
//! - [`sphere`]: unit vectors, the skew operator, and norm-preserving
//!   propagation under an angular velocity (Rodrigues exponential stepping)
//! - [`kernels`]: the distance-kernel family `d = f(1 − n₁ᵀn₂)`, edge errors,
//!   endpoint-limit and sandwich diagnostics, and saturation functions
//! - [`graph`]: undirected graphs, oriented incidence matrices, permutation
//!   equivalences, and cycle null spaces
//! - [`control`]: the kinematic consensus law and its Lyapunov quantities
//! - [`sim`]: closed-loop time marching and trace capture
//! - [`diagnostics`]: exponential-rate fitting, constant-limit detection, and
//!   convergence reports
//! - [`linalg`]: small dense matrix support (Jacobi eigensolver, one-sided
//!   Jacobi SVD) sized for desk-scale networks
//!
//! All core math is generic over the scalar type via [`Real`]; `f64` aliases
//! are exported at the crate root.

use std::fmt;

pub mod control;
pub mod diagnostics;
pub mod graph;
pub mod kernels;
pub mod linalg;
pub mod sim;
pub mod sphere;

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumAssignOps
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for pulling literal constants into the working scalar type.
pub(crate) fn real<S: Real>(x: f64) -> S {
    S::from_f64(x).expect("f64 literal must convert to the scalar type")
}

pub use control::{ControlOutput, NetworkState};
pub use diagnostics::{ConvergenceReport, ExpFit, LimitCheck, ReportOptions};
pub use graph::{CycleBasisReport, CycleClassification, IncidenceMatrix, NetworkGraph, NullSpaceBasis};
pub use kernels::{DistanceKernel, EdgeError, KernelClass, SaturationFunction};
pub use sim::{InitialState, SimulationConfig, SimulationTrace};
pub use sphere::{AngularVelocity, Trajectory, UnitVector};

/// 3-vector over the working scalar.
pub type Vec3<S> = [S; 3];
/// Row-major 3×3 matrix over the working scalar.
pub type Mat3<S> = [[S; 3]; 3];

/// Double-precision unit vector on S².
pub type UnitVector3 = UnitVector<f64>;
/// Single-precision unit vector on S².
pub type UnitVector3F = UnitVector<f32>;
/// Double-precision angular velocity.
pub type AngularVelocity3 = AngularVelocity<f64>;
/// Single-precision angular velocity.
pub type AngularVelocity3F = AngularVelocity<f32>;
