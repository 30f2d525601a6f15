//! Unit vectors on S² and their kinematics.
//!
//! The reduced attitude of an agent is a unit vector `n` driven by
//! `ṅ = S(ω)n`, where `S(·)` is the skew (cross-product) operator. Time
//! marching uses the Rodrigues closed form of `exp(S(ωh))`, so every step
//! lands back on the sphere up to rounding; states are renormalized after
//! each step regardless.

use thiserror::Error;

use crate::linalg::{add, cross, dot, is_finite_vec, norm, scale};
use crate::{real, Mat3, Real, Vec3};

/// Unit-norm tolerance maintained by construction and propagation.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Threshold on `‖ω‖·h` below which the Taylor form of Rodrigues is used.
const SMALL_ANGLE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SphereError {
    #[error("cannot normalize a vector with norm {norm:e}")]
    DegenerateNorm { norm: f64 },
    #[error("non-finite vector component")]
    NonFinite,
    #[error("non-finite angular velocity sample at t = {t}")]
    NonFiniteOmega { t: f64 },
    #[error("time span must satisfy t1 > t0 (got t0 = {t0}, t1 = {t1})")]
    InvalidTimeSpan { t0: f64, t1: f64 },
    #[error("step size must be positive (got {h})")]
    InvalidStep { h: f64 },
}

/// A point on the unit sphere S².
///
/// Construction normalizes, so the invariant `|‖n‖ − 1| < 1e-12` holds for
/// every value of this type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVector<S>(Vec3<S>);

impl<S: Real> UnitVector<S> {
    pub fn new(x: S, y: S, z: S) -> Result<Self, SphereError> {
        Self::from_vec3([x, y, z])
    }

    pub fn from_vec3(v: Vec3<S>) -> Result<Self, SphereError> {
        if !is_finite_vec(&v) {
            return Err(SphereError::NonFinite);
        }
        let n = norm(&v);
        if n < real::<S>(1e-9) {
            return Err(SphereError::DegenerateNorm { norm: n.to_f64().unwrap_or(0.0) });
        }
        Ok(Self(scale(&v, S::one() / n)))
    }

    /// Standard basis vector e₁ = [1,0,0].
    pub fn e1() -> Self {
        Self([S::one(), S::zero(), S::zero()])
    }

    /// Standard basis vector e₂ = [0,1,0].
    pub fn e2() -> Self {
        Self([S::zero(), S::one(), S::zero()])
    }

    /// Standard basis vector e₃ = [0,0,1].
    pub fn e3() -> Self {
        Self([S::zero(), S::zero(), S::one()])
    }

    pub fn x(&self) -> S {
        self.0[0]
    }

    pub fn y(&self) -> S {
        self.0[1]
    }

    pub fn z(&self) -> S {
        self.0[2]
    }

    pub fn as_vec3(&self) -> &Vec3<S> {
        &self.0
    }

    pub fn into_vec3(self) -> Vec3<S> {
        self.0
    }

    pub fn dot(&self, other: &Self) -> S {
        dot(&self.0, &other.0)
    }

    pub fn cross(&self, other: &Self) -> Vec3<S> {
        cross(&self.0, &other.0)
    }

    /// The antipode −n.
    pub fn antipode(&self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }
}

/// Angular velocity ω, radians per unit time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularVelocity<S>(pub Vec3<S>);

impl<S: Real> AngularVelocity<S> {
    pub fn new(wx: S, wy: S, wz: S) -> Self {
        Self([wx, wy, wz])
    }

    pub fn zero() -> Self {
        Self([S::zero(), S::zero(), S::zero()])
    }

    pub fn as_vec3(&self) -> &Vec3<S> {
        &self.0
    }

    pub fn norm(&self) -> S {
        norm(&self.0)
    }

    pub fn is_finite(&self) -> bool {
        is_finite_vec(&self.0)
    }
}

/// The skew-symmetric matrix `S(v)` with `S(v)·u = v × u`.
pub fn skew<S: Real>(v: &Vec3<S>) -> Mat3<S> {
    let z = S::zero();
    [[z, -v[2], v[1]], [v[2], z, -v[0]], [-v[1], v[0], z]]
}

/// The chordal parameter `s = 1 − n₁ᵀn₂ ∈ [0, 2]`.
pub fn chordal_param<S: Real>(n1: &UnitVector<S>, n2: &UnitVector<S>) -> S {
    (S::one() - n1.dot(n2)).max(S::zero()).min(real::<S>(2.0))
}

/// The geodesic angle `arccos(n₁ᵀn₂) ∈ [0, π]`, evaluated as
/// `atan2(‖n₁ × n₂‖, n₁ᵀn₂)`, which keeps full precision near 0 and π where
/// `acos` loses half the significant digits.
pub fn geodesic_angle<S: Real>(n1: &UnitVector<S>, n2: &UnitVector<S>) -> S {
    norm(&n1.cross(n2)).atan2(n1.dot(n2))
}

/// Propagates `ṅ = S(ω)n` over one step of length `h` with constant `ω`,
/// i.e. returns `exp(S(ωh))·n`, renormalized.
pub fn rotate_step<S: Real>(n: &UnitVector<S>, w: &AngularVelocity<S>, h: S) -> UnitVector<S> {
    let a = scale(w.as_vec3(), h);
    let angle = norm(&a);
    let rotated = if angle < real::<S>(SMALL_ANGLE) {
        // Taylor form of Rodrigues to second order: n + a×n + a×(a×n)/2.
        let axn = cross(&a, n.as_vec3());
        let axaxn = cross(&a, &axn);
        add(&add(n.as_vec3(), &axn), &scale(&axaxn, real::<S>(0.5)))
    } else {
        let axis = scale(&a, S::one() / angle);
        let kxn = cross(&axis, n.as_vec3());
        let kdotn = dot(&axis, n.as_vec3());
        let (sin_a, cos_a) = (angle.sin(), angle.cos());
        // n cosφ + (k×n) sinφ + k (k·n)(1 − cosφ)
        add(
            &add(&scale(n.as_vec3(), cos_a), &scale(&kxn, sin_a)),
            &scale(&axis, kdotn * (S::one() - cos_a)),
        )
    };
    let nrm = norm(&rotated);
    UnitVector(scale(&rotated, S::one() / nrm))
}

/// A time-indexed sequence of unit vectors.
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub times: Vec<S>,
    pub points: Vec<UnitVector<S>>,
}

impl<S: Real> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> (S, UnitVector<S>) {
        (*self.times.last().expect("trajectory is non-empty"), *self.points.last().expect("trajectory is non-empty"))
    }

    /// Index of the sample closest in time to `t`.
    pub fn nearest_index(&self, t: S) -> usize {
        let mut best = 0;
        let mut best_d = S::infinity();
        for (i, &ti) in self.times.iter().enumerate() {
            let d = (ti - t).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }
}

/// Time-marches `ṅ = S(ω(t))n` from `t0` to `t1` with step `h`, sampling the
/// angular velocity at substep midpoints (order-2 commutator-free scheme).
/// The final step is clipped so the trajectory ends exactly at `t1`.
pub fn drive_with_omega<S, F>(
    n0: &UnitVector<S>,
    omega_fn: F,
    t0: S,
    t1: S,
    h: S,
) -> Result<Trajectory<S>, SphereError>
where
    S: Real,
    F: Fn(S) -> AngularVelocity<S>,
{
    if !(t1 > t0) {
        return Err(SphereError::InvalidTimeSpan {
            t0: t0.to_f64().unwrap_or(f64::NAN),
            t1: t1.to_f64().unwrap_or(f64::NAN),
        });
    }
    if !(h > S::zero()) {
        return Err(SphereError::InvalidStep { h: h.to_f64().unwrap_or(f64::NAN) });
    }

    let span = t1 - t0;
    let n_steps = (span / h).ceil().to_usize().unwrap_or(0).max(1);
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut points = Vec::with_capacity(n_steps + 1);
    times.push(t0);
    points.push(*n0);

    let mut n = *n0;
    for m in 0..n_steps {
        let t = t0 + S::from_usize(m).unwrap() * h;
        let t_next = if m + 1 == n_steps { t1 } else { t0 + S::from_usize(m + 1).unwrap() * h };
        let dt = t_next - t;
        if dt <= S::zero() {
            break;
        }
        let w = omega_fn(t + dt / real::<S>(2.0));
        if !w.is_finite() {
            return Err(SphereError::NonFiniteOmega {
                t: (t + dt / real::<S>(2.0)).to_f64().unwrap_or(f64::NAN),
            });
        }
        n = rotate_step(&n, &w, dt);
        times.push(t_next);
        points.push(n);
    }
    Ok(Trajectory { times, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    fn uv(x: f64, y: f64, z: f64) -> UnitVector<f64> {
        UnitVector::new(x, y, z).unwrap()
    }

    #[test]
    fn skew_acts_as_cross_product() {
        let ez = [0.0, 0.0, 1.0];
        let m = skew(&ez);
        let r = crate::linalg::mat_vec(&m, &[1.0, 0.0, 0.0]);
        assert_eq!(r, [0.0, 1.0, 0.0]);

        let ex = [1.0, 0.0, 0.0];
        let r = crate::linalg::mat_vec(&skew(&ex), &[0.0, 1.0, 0.0]);
        assert_eq!(r, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn skew_annihilates_its_own_vector() {
        let v = [0.3, -0.7, 1.1];
        let r = crate::linalg::mat_vec(&skew(&v), &v);
        assert_eq!(r, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn skew_is_antisymmetric_exactly() {
        let v = [0.25, -3.0, 0.5];
        let m = skew(&v);
        let mt = crate::linalg::mat_transpose(&m);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[i][j] + mt[i][j], 0.0);
            }
        }
    }

    #[test]
    fn chordal_param_endpoints() {
        let n = uv(0.3, 0.5, -0.2);
        assert!(chordal_param(&n, &n) < 1e-15);
        assert_relative_eq!(chordal_param(&n, &n.antipode()), 2.0, max_relative = 1e-15);
        assert_relative_eq!(chordal_param(&uv(1.0, 0.0, 0.0), &uv(0.0, 1.0, 0.0)), 1.0);
    }

    #[test]
    fn geodesic_angle_endpoints() {
        let n = uv(0.1, -0.9, 0.4);
        // acos(n·n) of a renormalized vector resolves to ~√(2ε), not 0.
        assert!(geodesic_angle(&n, &n) < 1e-7);
        // acos resolves antipodal pairs only to ~√ε.
        assert!((geodesic_angle(&n, &n.antipode()) - PI).abs() < 1e-7);
        assert_relative_eq!(geodesic_angle(&uv(1.0, 0.0, 0.0), &uv(0.0, 1.0, 0.0)), PI / 2.0);
    }

    #[test]
    fn quarter_turn_about_z() {
        let n = rotate_step(&uv(1.0, 0.0, 0.0), &AngularVelocity::new(0.0, 0.0, PI / 2.0), 1.0);
        assert!((n.x() - 0.0).abs() < 1e-12);
        assert!((n.y() - 1.0).abs() < 1e-12);
        assert!((n.z() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn zero_omega_is_identity() {
        let n = uv(0.6, -0.3, 0.9);
        let r = rotate_step(&n, &AngularVelocity::zero(), 1.0);
        assert_eq!(r, n);
    }

    #[test]
    fn small_planar_rotation_matches_closed_form() {
        let n = rotate_step(&uv(1.0, 0.0, 0.0), &AngularVelocity::new(0.0, 0.0, 1.0), 0.1);
        assert_relative_eq!(n.x(), 0.1f64.cos(), max_relative = 1e-14);
        assert_relative_eq!(n.y(), 0.1f64.sin(), max_relative = 1e-14);
        assert_eq!(n.z(), 0.0);
    }

    #[test]
    fn norm_preserved_along_long_trajectory() {
        let traj = drive_with_omega(
            &uv(1.0, 0.0, 0.0),
            |t: f64| AngularVelocity::new(t.sin(), 0.4, t.cos()),
            0.0,
            20.0,
            1e-2,
        )
        .unwrap();
        for p in &traj.points {
            let n = crate::linalg::norm(p.as_vec3());
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn log_time_spiral_reaches_closed_form() {
        // ω(t) = (1/t)e₃ from n(1) = e₁ gives n(t) = [cos ln t, sin ln t, 0].
        let traj = drive_with_omega(
            &uv(1.0, 0.0, 0.0),
            |t: f64| AngularVelocity::new(0.0, 0.0, 1.0 / t),
            1.0,
            E,
            1e-4,
        )
        .unwrap();
        let (tf, nf) = traj.last();
        assert_relative_eq!(tf, E);
        assert!((nf.x() - 1.0f64.cos()).abs() < 1e-8);
        assert!((nf.y() - 1.0f64.sin()).abs() < 1e-8);
        assert!(nf.z().abs() < 1e-12);
    }

    #[test]
    fn constant_omega_full_revolution_returns_home() {
        let traj = drive_with_omega(
            &uv(1.0, 0.0, 0.0),
            |_| AngularVelocity::new(0.0, 0.0, 1.0),
            0.0,
            2.0 * PI,
            1e-3,
        )
        .unwrap();
        let (_, nf) = traj.last();
        assert!((nf.x() - 1.0).abs() < 1e-8);
        assert!(nf.y().abs() < 1e-8);
    }

    #[test]
    fn halving_step_improves_endpoint_by_order_two() {
        let run = |h: f64| {
            let traj = drive_with_omega(
                &uv(1.0, 0.0, 0.0),
                |t: f64| AngularVelocity::new(0.0, 0.0, 1.0 / t),
                1.0,
                E,
                h,
            )
            .unwrap();
            let (_, nf) = traj.last();
            let exact = uv(1.0f64.cos(), 1.0f64.sin(), 0.0);
            geodesic_angle(&nf, &exact)
        };
        let e1 = run(1e-2);
        let e2 = run(5e-3);
        assert!(e1 / e2 >= 3.5, "error ratio {} below order-2 expectation", e1 / e2);
    }

    #[test]
    fn rejects_nonfinite_omega() {
        let r = drive_with_omega(
            &uv(1.0, 0.0, 0.0),
            |_| AngularVelocity::new(f64::NAN, 0.0, 0.0),
            0.0,
            1.0,
            0.1,
        );
        assert!(matches!(r, Err(SphereError::NonFiniteOmega { .. })));
    }

    #[test]
    fn rejects_bad_time_span_and_step() {
        let n = uv(1.0, 0.0, 0.0);
        assert!(matches!(
            drive_with_omega(&n, |_| AngularVelocity::zero(), 1.0, 1.0, 0.1),
            Err(SphereError::InvalidTimeSpan { .. })
        ));
        assert!(matches!(
            drive_with_omega(&n, |_| AngularVelocity::zero(), 0.0, 1.0, 0.0),
            Err(SphereError::InvalidStep { .. })
        ));
    }
}
