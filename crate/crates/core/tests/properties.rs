//! Property tests: structural invariants that must hold on randomly drawn
//! inputs, not just on curated examples.

use proptest::prelude::*;
use std::f64::consts::PI;
use warpiso_core::isolab::{jensen_gap, verify_weighted_iso};
use warpiso_core::quad::FiberGrid;
use warpiso_core::shape_field::CurvatureField;
use warpiso_core::{
    models, shapes, FiberSpec, RadialWeight, Resolution, StarGraph, WarpProfile, WeightPair,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Volume inversion is a two-sided inverse of the volume profile.
    #[test]
    fn volume_inversion_round_trips(model in 0usize..3, frac in 0.02f64..0.98) {
        let (space, v_hi) = match model {
            0 => (models::euclidean(3).unwrap(), 8.0),
            1 => (models::hyperbolic(3).unwrap(), 8.0),
            // Hemisphere per-fiber volume tops out at π/4.
            _ => (models::hemisphere(3).unwrap(), 0.75 * PI / 4.0),
        };
        let v = frac * v_hi;
        let r = space.invert_volume(v, None).unwrap();
        let back = space.volume_profile(r, None).unwrap();
        prop_assert!((back - v).abs() <= 1e-10 * (1.0 + v));
    }

    // The sign of s s″ − s′² decides which side of its secant the log of
    // the profile sits on.
    #[test]
    fn log_profile_secants_follow_the_margin_sign(
        which in 0usize..3,
        t1 in 0.05f64..0.95,
        t2 in 0.05f64..0.95,
    ) {
        prop_assume!((t1 - t2).abs() > 0.05);
        let (profile, lo, hi) = match which {
            0 => (WarpProfile::exponential(), 0.0, 3.0),
            1 => (WarpProfile::sine(), 0.1, PI - 0.1),
            _ => (WarpProfile::power(-1.0).unwrap(), 1.0, 20.0),
        };
        let (a, b) = (lo + t1 * (hi - lo), lo + t2 * (hi - lo));
        let (a, b) = (a.min(b), a.max(b));
        let mid = 0.5 * (a + b);
        let log_s = |r: f64| profile.eval(r).unwrap().0.ln();
        let secant = 0.5 * (log_s(a) + log_s(b));
        let gap = log_s(mid) - secant; // > 0 ⟺ log s concave on [a,b]
        let margin = {
            let (s, s1, s2) = profile.eval(mid).unwrap();
            s * s2 - s1 * s1
        };
        match which {
            0 => prop_assert!(gap.abs() <= 1e-12 * (1.0 + secant.abs()), "exp: gap {gap}"),
            1 => {
                prop_assert!(margin < 0.0);
                prop_assert!(gap >= -1e-12, "sine: log s concave but gap {gap}");
            }
            _ => {
                prop_assert!(margin > 0.0);
                prop_assert!(gap <= 1e-12, "power(−1): log s convex but gap {gap}");
            }
        }
    }

    // ⟨X,ν⟩² + |X^T|² = s(ψ)² at every node of every star graph.
    #[test]
    fn position_splits_into_normal_and_tangent_parts(seed in 0u64..10_000, model in 0usize..2) {
        let space = if model == 0 {
            models::euclidean(2).unwrap()
        } else {
            models::hyperbolic(2).unwrap()
        };
        let g = shapes::random_circle_graph(&space, Resolution::Circle(128), seed, 5, 0.6, 1.5)
            .unwrap();
        let frames = g.frames().unwrap();
        for i in 0..g.len() {
            let lhs = frames.support[i] * frames.support[i] + frames.xt_norm2[i];
            let rhs = frames.s[i] * frames.s[i];
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }

    // Newton tensor traces: tr T_k = (m−k)σ_k and Σ_a T_k[a]κ_a = (k+1)σ_{k+1}.
    #[test]
    fn newton_tensor_traces(seed in 0u64..10_000) {
        let space = models::euclidean(3).unwrap();
        let g = shapes::random_revolution_graph(&space, Resolution::Sphere(16, 8), seed, 3, 0.8, 1.6)
            .unwrap();
        let field = CurvatureField::compute(&g).unwrap();
        let m = field.fiber_dim();
        let mut diag = vec![0.0; m];
        for i in 0..g.len() {
            for k in 0..m {
                field.newton_diag_into(i, k, &mut diag);
                let trace: f64 = diag.iter().sum();
                let expect = (m - k) as f64 * field.sigma(i, k);
                prop_assert!((trace - expect).abs() <= 1e-10 * (1.0 + expect.abs()));
                let paired: f64 = diag
                    .iter()
                    .zip(field.kappas(i))
                    .map(|(t, k)| t * k)
                    .sum();
                let expect_next = if k + 1 <= m {
                    (k + 1) as f64 * field.sigma(i, k + 1)
                } else {
                    0.0
                };
                prop_assert!((paired - expect_next).abs() <= 1e-10 * (1.0 + expect_next.abs()));
            }
        }
    }

    // Scaling covariance in the plane: dilating a polar graph by t scales
    // ∫ r^k dS by t^{n−1+k} = t^{1+k}.
    #[test]
    fn plane_boundary_integrals_scale_covariantly(
        seed in 0u64..10_000,
        t in 0.5f64..2.0,
        k in 1u32..=3,
    ) {
        let space = models::euclidean(2).unwrap();
        let g = shapes::random_circle_graph(&space, Resolution::Circle(128), seed, 4, 0.7, 1.4)
            .unwrap();
        let scaled: Vec<f64> = g.psi().iter().map(|&r| t * r).collect();
        let gs = StarGraph::from_values(&space, Resolution::Circle(128), "scaled", &scaled)
            .unwrap();
        let pair = WeightPair::plain(RadialWeight::power(k as f64), 0.0).unwrap();
        let lhs = verify_weighted_iso(&g, &pair).unwrap().lhs;
        let lhs_scaled = verify_weighted_iso(&gs, &pair).unwrap().lhs;
        let expect = t.powi(1 + k as i32) * lhs;
        prop_assert!((lhs_scaled - expect).abs() <= 1e-9 * (1.0 + expect.abs()));
    }

    // The Jensen gap of the affine case b = r in ℝ³ never goes measurably
    // negative.
    #[test]
    fn jensen_gap_is_nonnegative_in_the_affine_case(seed in 0u64..10_000) {
        let space = models::euclidean(3).unwrap();
        let g = shapes::random_sphere_graph(&space, Resolution::Sphere(12, 24), seed, 0.8, 1.6)
            .unwrap();
        let pair = WeightPair::plain(RadialWeight::power(1.0), 0.0).unwrap();
        prop_assert!(jensen_gap(&g, &pair).unwrap() >= -1e-10);
    }

    // Fiber quadrature weights sum to the fiber volume.
    #[test]
    fn grid_weights_sum_to_fiber_volume(
        radius in 0.5f64..3.0,
        nc in 4usize..24,
        na in 4usize..48,
    ) {
        // Circle grids need an even node count.
        let circle =
            FiberGrid::new(&FiberSpec::circle(radius), Resolution::Circle(2 * (nc + na))).unwrap();
        let total: f64 = (0..circle.len()).map(|i| circle.weight(i)).sum();
        prop_assert!((total - 2.0 * PI * radius).abs() <= 1e-12 * radius);

        // Sphere grids need an even azimuth count.
        let sphere =
            FiberGrid::new(&FiberSpec::sphere(radius), Resolution::Sphere(nc, 2 * na)).unwrap();
        let total: f64 = (0..sphere.len()).map(|i| sphere.weight(i)).sum();
        let expect = 4.0 * PI * radius * radius;
        prop_assert!((total - expect).abs() <= 1e-12 * expect);
    }
}
