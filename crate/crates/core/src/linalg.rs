//! Small dense linear algebra sized for desk-scale networks.
//!
//! Incidence matrices here are at most a few dozen rows/columns, so the
//! eigen- and singular-value machinery is a plain cyclic Jacobi iteration:
//! simple, allocation-light, and accurate to a few ulps for symmetric
//! matrices of this size.

use crate::{real, Mat3, Real, Vec3};

// ---------------------------------------------------------------------------
// 3-vector / 3-matrix primitives
// ---------------------------------------------------------------------------

pub fn dot<S: Real>(a: &Vec3<S>, b: &Vec3<S>) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross<S: Real>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn add<S: Real>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub<S: Real>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale<S: Real>(a: &Vec3<S>, c: S) -> Vec3<S> {
    [a[0] * c, a[1] * c, a[2] * c]
}

pub fn neg<S: Real>(a: &Vec3<S>) -> Vec3<S> {
    [-a[0], -a[1], -a[2]]
}

pub fn norm_sq<S: Real>(a: &Vec3<S>) -> S {
    dot(a, a)
}

pub fn norm<S: Real>(a: &Vec3<S>) -> S {
    norm_sq(a).sqrt()
}

pub fn is_finite_vec<S: Real>(a: &Vec3<S>) -> bool {
    a.iter().all(|c| c.is_finite())
}

pub fn mat_vec<S: Real>(m: &Mat3<S>, v: &Vec3<S>) -> Vec3<S> {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

pub fn mat_transpose<S: Real>(m: &Mat3<S>) -> Mat3<S> {
    [
        [m[0][0], m[1][0], m[2][0]],
        [m[0][1], m[1][1], m[2][1]],
        [m[0][2], m[1][2], m[2][2]],
    ]
}

// ---------------------------------------------------------------------------
// Dense matrices
// ---------------------------------------------------------------------------

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Real> DenseMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<S>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (k, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for i in 0..rows {
                m.set(i, k, col[i]);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == S::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.set(i, j, out.get(i, j) + aik * other.get(k, j));
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Symmetric eigenvalues (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Eigenvalues of a symmetric matrix, sorted ascending.
pub fn symmetric_eigenvalues<S: Real>(a: &DenseMatrix<S>) -> Vec<S> {
    assert_eq!(a.rows(), a.cols(), "matrix must be square");
    let n = a.rows();
    if n == 0 {
        return Vec::new();
    }
    let mut m = a.clone();
    let tol = S::epsilon() * real::<S>(n as f64);
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i, j).abs())
        .fold(S::zero(), S::max)
        .max(S::one());

    for _sweep in 0..50 {
        let mut off = S::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + m.get(p, q).abs();
            }
        }
        if off <= tol * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= tol * scale * S::epsilon() {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (real::<S>(2.0) * apq);
                let t = {
                    let sign = if theta >= S::zero() { S::one() } else { -S::one() };
                    sign / (theta.abs() + (S::one() + theta * theta).sqrt())
                };
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = c * t;
                // Rotate rows/columns p and q.
                for i in 0..n {
                    let aip = m.get(i, p);
                    let aiq = m.get(i, q);
                    m.set(i, p, c * aip - s * aiq);
                    m.set(i, q, s * aip + c * aiq);
                }
                for j in 0..n {
                    let apj = m.get(p, j);
                    let aqj = m.get(q, j);
                    m.set(p, j, c * apj - s * aqj);
                    m.set(q, j, s * apj + c * aqj);
                }
            }
        }
    }
    let mut eigs: Vec<S> = (0..n).map(|i| m.get(i, i)).collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues must be ordered"));
    eigs
}

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD
// ---------------------------------------------------------------------------

/// Singular values (descending) and right singular vectors of a matrix.
pub struct Svd<S> {
    pub singular_values: Vec<S>,
    /// Columns are right singular vectors, in the same order.
    pub v: DenseMatrix<S>,
}

/// One-sided Jacobi SVD: orthogonalizes the columns of `a` by right
/// rotations, which is accurate for small singular values (no squaring of
/// the condition number as in an eigendecomposition of `AᵀA`).
pub fn svd<S: Real>(a: &DenseMatrix<S>) -> Svd<S> {
    let m = a.rows();
    let n = a.cols();
    let mut w = a.clone();
    let mut v = DenseMatrix::identity(n);
    let eps = S::epsilon();

    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = S::zero();
                let mut beta = S::zero();
                let mut gamma = S::zero();
                for i in 0..m {
                    let wp = w.get(i, p);
                    let wq = w.get(i, q);
                    alpha = alpha + wp * wp;
                    beta = beta + wq * wq;
                    gamma = gamma + wp * wq;
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == S::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (real::<S>(2.0) * gamma);
                let t = {
                    let sign = if zeta >= S::zero() { S::one() } else { -S::one() };
                    sign / (zeta.abs() + (S::one() + zeta * zeta).sqrt())
                };
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let wp = w.get(i, p);
                    let wq = w.get(i, q);
                    w.set(i, p, c * wp - s * wq);
                    w.set(i, q, s * wp + c * wq);
                }
                for i in 0..n {
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, c * vp - s * vq);
                    v.set(i, q, s * vp + c * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let sigma: Vec<S> = (0..n)
        .map(|j| (0..m).map(|i| w.get(i, j) * w.get(i, j)).fold(S::zero(), |a, b| a + b).sqrt())
        .collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).expect("singular values must be ordered"));

    let mut v_sorted = DenseMatrix::zeros(n, n);
    let mut s_sorted = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        s_sorted.push(sigma[src]);
        for i in 0..n {
            v_sorted.set(i, dst, v.get(i, src));
        }
    }
    Svd { singular_values: s_sorted, v: v_sorted }
}

/// Orthonormal basis of the null space of `a`, with singular values below
/// `rel_tol · σ_max` treated as zero.
pub fn null_space_basis<S: Real>(a: &DenseMatrix<S>, rel_tol: S) -> Vec<Vec<S>> {
    let decomp = svd(a);
    let sigma_max = decomp.singular_values.first().copied().unwrap_or(S::zero());
    let thresh = rel_tol * sigma_max.max(S::one() * S::epsilon());
    let mut basis = Vec::new();
    for (j, &s) in decomp.singular_values.iter().enumerate() {
        if s <= thresh {
            basis.push(decomp.v.column(j));
        }
    }
    basis
}

// ---------------------------------------------------------------------------
// Subspace comparison
// ---------------------------------------------------------------------------

/// Modified Gram-Schmidt with one re-orthogonalization pass.
pub fn orthonormalize<S: Real>(columns: &[Vec<S>]) -> Vec<Vec<S>> {
    let mut basis: Vec<Vec<S>> = Vec::new();
    for col in columns {
        let mut v = col.clone();
        for _ in 0..2 {
            for b in &basis {
                let proj = v.iter().zip(b.iter()).map(|(&x, &y)| x * y).fold(S::zero(), |a, c| a + c);
                for (x, &y) in v.iter_mut().zip(b.iter()) {
                    *x = *x - proj * y;
                }
            }
        }
        let n = v.iter().map(|&x| x * x).fold(S::zero(), |a, c| a + c).sqrt();
        if n > real::<S>(1e-12) {
            for x in v.iter_mut() {
                *x = *x / n;
            }
            basis.push(v);
        }
    }
    basis
}

/// Sine of the largest principal angle between two subspaces given by
/// spanning (not necessarily orthonormal) column sets.
///
/// Uses the projection defect `‖(I − P_U)V‖₂`, which resolves angles far
/// below the `arccos` noise floor. Returns 1 when the spans have different
/// dimensions.
pub fn max_principal_angle_sin<S: Real>(span_a: &[Vec<S>], span_b: &[Vec<S>]) -> S {
    let ua = orthonormalize(span_a);
    let ub = orthonormalize(span_b);
    if ua.len() != ub.len() {
        return S::one();
    }
    if ua.is_empty() {
        return S::zero();
    }
    let m = ua[0].len();
    let d = ua.len();
    // R = V - U (Uᵀ V), column by column.
    let mut residual = DenseMatrix::zeros(m, d);
    for (j, vcol) in ub.iter().enumerate() {
        let mut r = vcol.clone();
        for ucol in &ua {
            let proj = ucol.iter().zip(vcol.iter()).map(|(&x, &y)| x * y).fold(S::zero(), |a, c| a + c);
            for (ri, &ui) in r.iter_mut().zip(ucol.iter()) {
                *ri = *ri - proj * ui;
            }
        }
        for i in 0..m {
            residual.set(i, j, r[i]);
        }
    }
    let sv = svd(&residual);
    sv.singular_values.first().copied().unwrap_or(S::zero()).min(S::one())
}
