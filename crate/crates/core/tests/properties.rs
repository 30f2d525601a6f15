//! Property suites for the geometric and control invariants.

mod common;

use common::{unit_vector, vec3};
use proptest::prelude::*;

use spheresync::control::{kinematic_control, NetworkState};
use spheresync::kernels::{DistanceKernel, SaturationFunction};
use spheresync::linalg::{self, symmetric_eigenvalues, DenseMatrix};
use spheresync::sphere::{chordal_param, geodesic_angle, rotate_step, skew, AngularVelocity};
use spheresync::NetworkGraph;

proptest! {
    #[test]
    fn skew_matvec_is_cross_product(a in vec3(), b in vec3()) {
        let lhs = linalg::mat_vec(&skew(&a), &b);
        let rhs = linalg::cross(&a, &b);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn skew_is_exactly_antisymmetric(a in vec3()) {
        let m = skew(&a);
        let mt = linalg::mat_transpose(&m);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(m[i][j] + mt[i][j], 0.0);
            }
        }
    }

    #[test]
    fn skew_swap_flips_sign(a in vec3(), b in vec3()) {
        let lhs = linalg::mat_vec(&skew(&a), &b);
        let rhs = linalg::mat_vec(&skew(&b), &a);
        for c in 0..3 {
            prop_assert!((lhs[c] + rhs[c]).abs() < 1e-14);
        }
    }

    #[test]
    fn rotate_step_preserves_norm(n in unit_vector(), w in vec3(), h in 1e-6..0.5f64) {
        let out = rotate_step(&n, &AngularVelocity::new(w[0], w[1], w[2]), h);
        prop_assert!((linalg::norm(out.as_vec3()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_steps_compose(n in unit_vector(), w in vec3(), h in 1e-4..0.2f64) {
        let w = AngularVelocity::new(w[0], w[1], w[2]);
        let two_steps = rotate_step(&rotate_step(&n, &w, h), &w, h);
        let one_step = rotate_step(&n, &w, 2.0 * h);
        // sin of the separation angle; acos cannot resolve this regime.
        prop_assert!(linalg::norm(&two_steps.cross(&one_step)) < 1e-12);
    }

    #[test]
    fn chordal_param_matches_angle(n1 in unit_vector(), n2 in unit_vector()) {
        let s = chordal_param(&n1, &n2);
        let theta = geodesic_angle(&n1, &n2);
        prop_assert!((s - (1.0 - theta.cos())).abs() < 1e-12);
        prop_assert!((0.0..=2.0).contains(&s));
    }

    #[test]
    fn edge_error_is_tangent(t in unit_vector(), h in unit_vector()) {
        for kernel in [
            DistanceKernel::linear_cos(1.0).unwrap(),
            DistanceKernel::arccos_sqrt(),
            DistanceKernel::quadratic(),
        ] {
            let e = kernel.edge_error(&t, &h);
            let dp: f64 = e.iter().zip(t.as_vec3()).map(|(a, b)| a * b).sum();
            prop_assert!(dp.abs() < 1e-13);
        }
    }

    #[test]
    fn edge_error_swap_is_negation(t in unit_vector(), h in unit_vector()) {
        let kernel = DistanceKernel::arccos_sqrt();
        let forward = kernel.edge_error(&t, &h);
        let backward = kernel.edge_error(&h, &t);
        for c in 0..3 {
            prop_assert!((forward[c] + backward[c]).abs() < 1e-13);
        }
    }

    #[test]
    fn pde_residual_vanishes(n1 in unit_vector(), n2 in unit_vector()) {
        for kernel in [
            DistanceKernel::linear_cos(2.0).unwrap(),
            DistanceKernel::arccos_sqrt(),
            DistanceKernel::quadratic(),
        ] {
            let r = kernel.pde_residual(&n1, &n2);
            prop_assert!(linalg::norm(&r) < 1e-10);
        }
    }

    #[test]
    fn control_momentum_is_conserved(
        seed in 0u64..1000,
        topology in 0usize..3,
        n in 4usize..8,
    ) {
        let graph = match topology {
            0 => NetworkGraph::random_tree(n, seed),
            1 => NetworkGraph::ring(n),
            _ => NetworkGraph::star(n),
        };
        let state = spheresync::sim::random_state::<f64>(graph.n_nodes(), seed);
        let kernels = vec![DistanceKernel::linear_cos(1.0).unwrap(); graph.n_edges()];
        let out = kinematic_control(&state, &graph, &kernels).unwrap();
        let mut sum = [0.0f64; 3];
        for w in &out.omegas {
            sum = linalg::add(&sum, w.as_vec3());
        }
        prop_assert!(linalg::norm(&sum) < 1e-13);
    }

    #[test]
    fn tree_error_bound_by_lambda_min(seed in 0u64..500, n in 2usize..7) {
        // On trees λ_min(BᵀB) > 0 bounds ‖e‖² by ‖(B⊗I)e‖² = Σ‖ω‖².
        let graph = NetworkGraph::random_tree(n, seed);
        let lambda = graph.incidence().lambda_min_btb::<f64>();
        let state = spheresync::sim::random_state::<f64>(n, seed ^ 0xabcd);
        let kernels = vec![DistanceKernel::linear_cos(1.0).unwrap(); graph.n_edges()];
        let out = kinematic_control(&state, &graph, &kernels).unwrap();
        let e_sq: f64 = out.edge_errors.iter().map(|e| e.norm().powi(2)).sum();
        let w_sq: f64 = out.omegas.iter().map(|w| w.norm().powi(2)).sum();
        prop_assert!(lambda * e_sq <= w_sq * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn saturation_value_and_jacobian_bounds(x in vec3(), scale in 0.001..1000.0f64) {
        let s = SaturationFunction::<f64>::inverse_sqrt();
        let xs = [x[0] * scale, x[1] * scale, x[2] * scale];
        prop_assert!(linalg::norm(&s.apply(&xs)) <= s.sigma_max * (1.0 + 1e-12));

        // Numerical Jacobian, spectral norm via eigenvalues of JᵀJ.
        let h = 1e-6 * (1.0 + linalg::norm(&xs));
        let mut jt_j = DenseMatrix::<f64>::zeros(3, 3);
        let mut j = [[0.0f64; 3]; 3];
        for col in 0..3 {
            let mut xp = xs;
            let mut xm = xs;
            xp[col] += h;
            xm[col] -= h;
            let fp = s.apply(&xp);
            let fm = s.apply(&xm);
            for row in 0..3 {
                j[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                let mut acc = 0.0;
                for r in 0..3 {
                    acc += j[r][a] * j[r][b];
                }
                jt_j.set(a, b, acc);
            }
        }
        let eigs = symmetric_eigenvalues(&jt_j);
        let spectral = eigs.last().unwrap().max(0.0).sqrt();
        prop_assert!(spectral <= s.sigma_prime_max * (1.0 + 1e-6),
            "spectral norm {spectral}");
    }
}

#[test]
fn pde_residual_bulk_sample() {
    // 10 000 seeded random pairs per kernel.
    let states = spheresync::sim::random_state::<f64>(20_000, 2024);
    for kernel in [
        DistanceKernel::linear_cos(1.0).unwrap(),
        DistanceKernel::arccos_sqrt(),
        DistanceKernel::quadratic(),
    ] {
        let mut worst = 0.0f64;
        for pair in states.vectors.chunks_exact(2) {
            let r = kernel.pde_residual(&pair[0], &pair[1]);
            worst = worst.max(linalg::norm(&r));
        }
        assert!(worst < 1e-10, "kernel {} worst residual {worst}", kernel.name());
    }
}
