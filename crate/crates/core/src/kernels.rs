//! Distance kernels on the sphere and their induced edge errors.
//!
//! Any C¹ distance function on S² × S² that is invariant under the attitude
//! kinematics must be of the form `d(n₁, n₂) = f(1 − n₁ᵀn₂)` for a scalar
//! kernel `f` on `(0, 2)`. This module carries the kernel family, the edge
//! error `e = f′(s)·(n_t × n_h)` it induces, and the numerical diagnostics
//! that separate well-behaved kernels from degenerate ones:
//!
//! - endpoint limits of `f′(s)√s` and `f′(s)√(2−s)`,
//! - the sandwich constants bounding `d / ‖e‖²` on an angle interval,
//! - a residual check of the defining PDE `S(n₁)∂η/∂n₁ + S(n₂)∂η/∂n₂ = 0`.
//!
//! Saturation functions `σ(x) = σ(‖x‖)·x` live here as well.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{add, cross, norm, scale};
use crate::sphere::{chordal_param, UnitVector};
use crate::{real, Real, Vec3};

/// Guard band on `s` when evaluating `f′` in control paths; kernels with a
/// pole at an endpoint stay finite and the vanishing cross product still
/// forces the edge error to zero there.
pub const KERNEL_EVAL_GUARD: f64 = 1e-6;

/// Absolute-value threshold above which an endpoint sample ladder is
/// declared divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("unknown kernel name `{0}`")]
    UnknownKernel(String),
    #[error("kernel parameter {name} must be positive (got {value})")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("kernel `{name}` evaluated to a non-finite value at s = {s}")]
    NonFiniteEval { name: String, s: f64 },
    #[error("edge error vanishes at interior angle {theta}; kernel degenerate on the interval")]
    DegenerateEdgeError { theta: f64 },
    #[error("kernel `{name}` fails {check}: {detail}")]
    ValidationFailed { name: String, check: &'static str, detail: String },
}

/// Declared membership in the kernel taxonomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelClass {
    P,
    PZero,
    PInfinity,
    PBarZero,
    Custom,
}

impl fmt::Display for KernelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            KernelClass::P => "P",
            KernelClass::PZero => "P0",
            KernelClass::PInfinity => "Pinf",
            KernelClass::PBarZero => "Pbar0",
            KernelClass::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// The edge error `e_k = f′(s)·(n_t × n_h)` attached to graph edge `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeError<S> {
    pub edge: usize,
    pub vector: Vec3<S>,
}

impl<S: Real> EdgeError<S> {
    pub fn norm(&self) -> S {
        norm(&self.vector)
    }
}

/// A distance kernel: the pair `(f, f′)` on `(0, 2)` with a declared class.
///
/// Kernels are immutable after construction and cheap to clone (the function
/// objects are shared).
#[derive(Clone)]
pub struct DistanceKernel<S> {
    name: String,
    class: KernelClass,
    f: Arc<dyn Fn(S) -> S + Send + Sync>,
    f_prime: Arc<dyn Fn(S) -> S + Send + Sync>,
}

impl<S> fmt::Debug for DistanceKernel<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistanceKernel")
            .field("name", &self.name)
            .field("class", &self.class)
            .finish()
    }
}

impl<S: Real> DistanceKernel<S> {
    pub fn new<F, G>(name: impl Into<String>, class: KernelClass, f: F, f_prime: G) -> Self
    where
        F: Fn(S) -> S + Send + Sync + 'static,
        G: Fn(S) -> S + Send + Sync + 'static,
    {
        Self { name: name.into(), class, f: Arc::new(f), f_prime: Arc::new(f_prime) }
    }

    /// `f(s) = a·s`, i.e. `d = a(1 − n₁ᵀn₂)`, with constant derivative `a`.
    pub fn linear_cos(a: S) -> Result<Self, KernelError> {
        if !(a > S::zero()) {
            return Err(KernelError::NonPositiveParameter {
                name: "a",
                value: a.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self::new(
            format!("linear_cos(a={a})"),
            KernelClass::PBarZero,
            move |s| a * s,
            move |_| a,
        ))
    }

    /// `f(s) = ⅛(√(s(2−s))·(s−1) + arccos(1−s))`, with
    /// `f′(s) = ¼√(s(2−s))`. Its two-agent reduction decays algebraically,
    /// not exponentially.
    pub fn arccos_sqrt() -> Self {
        let eighth = real::<S>(0.125);
        let quarter = real::<S>(0.25);
        let two = real::<S>(2.0);
        Self::new(
            "arccos_sqrt",
            KernelClass::PZero,
            move |s| {
                let root = (s * (two - s)).max(S::zero()).sqrt();
                let clamped = (S::one() - s).max(-S::one()).min(S::one());
                eighth * (root * (s - S::one()) + clamped.acos())
            },
            move |s| quarter * (s * (two - s)).max(S::zero()).sqrt(),
        )
    }

    /// `f(s) = s²/2`: a smooth test kernel with `f′(s) = s`.
    pub fn quadratic() -> Self {
        let half = real::<S>(0.5);
        Self::new("quadratic", KernelClass::Custom, move |s| half * s * s, |s| s)
    }

    /// Looks up a built-in kernel by name. `a` applies to `linear_cos`
    /// (defaults to 1).
    pub fn by_name(name: &str, a: Option<S>) -> Result<Self, KernelError> {
        match name {
            "linear_cos" => Self::linear_cos(a.unwrap_or_else(S::one)),
            "arccos_sqrt" => Ok(Self::arccos_sqrt()),
            "quadratic" => Ok(Self::quadratic()),
            other => Err(KernelError::UnknownKernel(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn class(&self) -> KernelClass {
        self.class
    }

    /// Raw kernel evaluation.
    pub fn f(&self, s: S) -> S {
        (self.f)(s)
    }

    /// Raw derivative evaluation.
    pub fn f_prime(&self, s: S) -> S {
        (self.f_prime)(s)
    }

    /// Derivative evaluation with `s` clamped into
    /// `[KERNEL_EVAL_GUARD, 2 − KERNEL_EVAL_GUARD]`.
    pub fn f_prime_guarded(&self, s: S) -> S {
        let guard = real::<S>(KERNEL_EVAL_GUARD);
        (self.f_prime)(s.max(guard).min(real::<S>(2.0) - guard))
    }

    /// The distance `d = f(1 − n₁ᵀn₂)`. Symmetric in its arguments.
    pub fn distance(&self, n1: &UnitVector<S>, n2: &UnitVector<S>) -> S {
        self.f(chordal_param(n1, n2))
    }

    /// The edge-error vector `f′(s)·(n_t × n_h)`, tangent to the sphere at
    /// the tail. Vanishes for aligned or antipodal pairs.
    pub fn edge_error(&self, tail: &UnitVector<S>, head: &UnitVector<S>) -> Vec3<S> {
        let g = self.f_prime_guarded(chordal_param(tail, head));
        scale(&tail.cross(head), g)
    }

    /// Residual of `S(n₁)∂η/∂n₁ + S(n₂)∂η/∂n₂` for the composed form
    /// `η = f(1 − n₁ᵀn₂)`; analytically zero for every kernel.
    pub fn pde_residual(&self, n1: &UnitVector<S>, n2: &UnitVector<S>) -> Vec3<S> {
        let g = self.f_prime_guarded(chordal_param(n1, n2));
        pde_residual_general(n1, n2, |_, b| scale(b.as_vec3(), -g), |a, _| scale(a.as_vec3(), -g))
    }

    /// Estimates the endpoint limits of `f′(s)√s` (as `s → 0⁺`) and
    /// `f′(s)√(2−s)` (as `s → 2⁻`) on the ladder `10⁻³ … 10⁻⁸`.
    pub fn class_limits(&self) -> Result<ClassLimits<S>, KernelError> {
        let two = real::<S>(2.0);
        let ladder: Vec<S> = (3..=8).map(|j| real::<S>(10f64.powi(-j))).collect();

        let mut near0 = Vec::with_capacity(ladder.len());
        let mut near2 = Vec::with_capacity(ladder.len());
        for &d in &ladder {
            let v0 = self.f_prime(d) * d.sqrt();
            let v2 = self.f_prime(two - d) * d.sqrt();
            for (v, s) in [(v0, d), (v2, two - d)] {
                if !v.is_finite() {
                    return Err(KernelError::NonFiniteEval {
                        name: self.name.clone(),
                        s: s.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
            near0.push(v0);
            near2.push(v2);
        }
        Ok(ClassLimits { lim0: estimate_limit(&near0), lim2: estimate_limit(&near2) })
    }

    /// Empirical sandwich constants: the extremes of `d / ‖e‖²` over
    /// geodesic angles uniformly sampled in `(0, theta_max]`.
    pub fn verify_sandwich(&self, theta_max: S, samples: usize) -> Result<SandwichReport<S>, KernelError> {
        assert!(theta_max > S::zero() && theta_max < S::PI(), "theta_max must lie in (0, π)");
        assert!(samples >= 1, "need at least one sample");
        let mut lo = S::infinity();
        let mut hi = S::zero();
        for i in 1..=samples {
            let theta = theta_max * S::from_usize(i).unwrap() / S::from_usize(samples).unwrap();
            let s = S::one() - theta.cos();
            let d = self.f(s);
            let e = self.f_prime_guarded(s) * theta.sin();
            if e == S::zero() {
                return Err(KernelError::DegenerateEdgeError {
                    theta: theta.to_f64().unwrap_or(f64::NAN),
                });
            }
            let ratio = d / (e * e);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        let holds = lo.is_finite() && hi.is_finite() && lo > S::zero();
        Ok(SandwichReport { alpha_lower: lo, alpha_upper: hi, holds })
    }

    /// Largest relative mismatch between `f′` and a central difference of
    /// `f` over an interior grid.
    pub fn derivative_consistency_max_rel_err(&self, n_grid: usize) -> S {
        let lo = real::<S>(0.01);
        let hi = real::<S>(1.99);
        let h = real::<S>(1e-5);
        let mut worst = S::zero();
        for i in 0..n_grid {
            let s = lo + (hi - lo) * S::from_usize(i).unwrap() / S::from_usize(n_grid - 1).unwrap();
            let fd = (self.f(s + h) - self.f(s - h)) / (real::<S>(2.0) * h);
            let fp = self.f_prime(s);
            let denom = fp.abs().max(real::<S>(1e-12));
            worst = worst.max((fd - fp).abs() / denom);
        }
        worst
    }

    /// Checks the kernel invariants: nonnegative and nondecreasing `f`,
    /// nonnegative `f′`, and `f′` consistent with central differences of
    /// `f` (relative error below 1e-6 on a 1000-point interior grid).
    pub fn validate(&self) -> Result<(), KernelError> {
        let eps = real::<S>(1e-6);
        let n = 1000;
        let lo = eps;
        let hi = real::<S>(2.0) - eps;
        for i in 0..n {
            let s = lo + (hi - lo) * S::from_usize(i).unwrap() / S::from_usize(n - 1).unwrap();
            let fv = self.f(s);
            let fpv = self.f_prime(s);
            if !fv.is_finite() || !fpv.is_finite() {
                return Err(KernelError::NonFiniteEval {
                    name: self.name.clone(),
                    s: s.to_f64().unwrap_or(f64::NAN),
                });
            }
            if fv < S::zero() || fpv < -real::<S>(1e-12) {
                return Err(KernelError::ValidationFailed {
                    name: self.name.clone(),
                    check: "monotonicity",
                    detail: format!("f(s) = {fv}, f'(s) = {fpv} at s = {s}"),
                });
            }
        }
        let worst = self.derivative_consistency_max_rel_err(1000);
        if worst > eps {
            return Err(KernelError::ValidationFailed {
                name: self.name.clone(),
                check: "derivative consistency",
                detail: format!("max relative error {worst:e}"),
            });
        }
        Ok(())
    }
}

/// Evaluates `S(n₁)·grad₁ + S(n₂)·grad₂` for arbitrary gradient fields; the
/// composed kernels cancel this identically, a non-composed η does not.
pub fn pde_residual_general<S, F, G>(
    n1: &UnitVector<S>,
    n2: &UnitVector<S>,
    grad_n1: F,
    grad_n2: G,
) -> Vec3<S>
where
    S: Real,
    F: Fn(&UnitVector<S>, &UnitVector<S>) -> Vec3<S>,
    G: Fn(&UnitVector<S>, &UnitVector<S>) -> Vec3<S>,
{
    let g1 = grad_n1(n1, n2);
    let g2 = grad_n2(n1, n2);
    add(&cross(n1.as_vec3(), &g1), &cross(n2.as_vec3(), &g2))
}

/// One-sided limit estimate from a geometric sample ladder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LimitEstimate<S> {
    Finite(S),
    Divergent,
}

impl<S: Real> LimitEstimate<S> {
    pub fn is_divergent(&self) -> bool {
        matches!(self, LimitEstimate::Divergent)
    }

    pub fn value(&self) -> Option<S> {
        match self {
            LimitEstimate::Finite(v) => Some(*v),
            LimitEstimate::Divergent => None,
        }
    }
}

impl<S: Real> fmt::Display for LimitEstimate<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitEstimate::Finite(v) => write!(f, "{v:.3e}"),
            LimitEstimate::Divergent => f.write_str("divergent"),
        }
    }
}

/// Endpoint-limit report for a kernel.
#[derive(Clone, Copy, Debug)]
pub struct ClassLimits<S> {
    pub lim0: LimitEstimate<S>,
    pub lim2: LimitEstimate<S>,
}

/// Empirical sandwich constants `α̲ ≤ d/‖e‖² ≤ ᾱ`.
#[derive(Clone, Copy, Debug)]
pub struct SandwichReport<S> {
    pub alpha_lower: S,
    pub alpha_upper: S,
    pub holds: bool,
}

fn estimate_limit<S: Real>(samples: &[S]) -> LimitEstimate<S> {
    let last = *samples.last().expect("ladder is non-empty");
    if last.abs() > real::<S>(DIVERGENCE_THRESHOLD) {
        return LimitEstimate::Divergent;
    }
    let increasing = samples.windows(2).all(|w| w[1] > w[0]);
    if increasing {
        let first = samples[0].abs().max(S::min_positive_value());
        if last.abs() > real::<S>(10.0) * first {
            return LimitEstimate::Divergent;
        }
    }
    // Aitken Δ² on the last three samples collapses geometric tails onto
    // their limit; fall back to the last sample when the denominator is
    // too small to trust.
    if samples.len() >= 3 {
        let v0 = samples[samples.len() - 3];
        let v1 = samples[samples.len() - 2];
        let v2 = samples[samples.len() - 1];
        let denom = v0 + v2 - real::<S>(2.0) * v1;
        if denom.abs() > real::<S>(1e-14) * (v0.abs() + v2.abs()).max(S::epsilon()) {
            let accel = (v0 * v2 - v1 * v1) / denom;
            if accel.is_finite() {
                return LimitEstimate::Finite(accel);
            }
        }
    }
    LimitEstimate::Finite(last)
}

// ---------------------------------------------------------------------------
// Saturation functions
// ---------------------------------------------------------------------------

/// A saturation map `σ(x) = σ(‖x‖)·x` with declared bounds on its value and
/// Jacobian norms.
#[derive(Clone)]
pub struct SaturationFunction<S> {
    name: String,
    sigma: Arc<dyn Fn(S) -> S + Send + Sync>,
    pub sigma_max: S,
    pub sigma_prime_max: S,
}

impl<S: Real> SaturationFunction<S> {
    pub fn new<F>(name: impl Into<String>, sigma: F, sigma_max: S, sigma_prime_max: S) -> Self
    where
        F: Fn(S) -> S + Send + Sync + 'static,
    {
        Self { name: name.into(), sigma: Arc::new(sigma), sigma_max, sigma_prime_max }
    }

    /// `σ(r) = 1/√(1+r²)`: the map `x ↦ x/√(1+‖x‖²)`, bounded by 1 with
    /// Jacobian norm at most 1.
    pub fn inverse_sqrt() -> Self {
        Self::new(
            "inverse_sqrt",
            |r: S| S::one() / (S::one() + r * r).sqrt(),
            S::one(),
            S::one(),
        )
    }

    /// `σ(r) = 1`: the identity map (unbounded value, Jacobian norm 1).
    pub fn identity() -> Self {
        Self::new("identity", |_| S::one(), S::infinity(), S::one())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn scalar(&self, r: S) -> S {
        (self.sigma)(r)
    }

    /// Applies the vector map `σ(‖x‖)·x`; the zero vector maps to itself.
    pub fn apply(&self, x: &Vec3<S>) -> Vec3<S> {
        let r = norm(x);
        if r == S::zero() {
            return [S::zero(); 3];
        }
        scale(x, (self.sigma)(r))
    }
}

impl<S> fmt::Debug for SaturationFunction<S>
where
    S: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SaturationFunction")
            .field("name", &self.name)
            .field("sigma_max", &self.sigma_max)
            .field("sigma_prime_max", &self.sigma_prime_max)
            .finish()
    }
}
