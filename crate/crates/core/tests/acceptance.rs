//! Acceptance gate for the numerical laboratory.
//!
//! Each numbered criterion exercises one pillar of the library end to end
//! and prints a single PASS/FAIL line; the test fails if any criterion
//! does.  (An eleventh criterion — byte-reproducible command-line reports —
//! lives with the command-line crate.)

use std::f64::consts::PI;
use warpiso_core::chain::{chain_margins, corollary_run, hm_residual};
use warpiso_core::isolab::{
    catalog_weights, jensen_gap, verify_weighted_iso, verify_weighted_iso_parametric,
};
use warpiso_core::quad::integrate_radial;
use warpiso_core::shape_field::CurvatureField;
use warpiso_core::spectral::{
    bisect_sign_change, first_harmonic, lambda1_bound_check, power_counterexample,
    second_variation_probe, slice_stability, small_ball_threshold, steklov_annulus, steklov_ball,
};
use warpiso_core::special::binomial;
use warpiso_core::{models, shapes, RadialWeight, Resolution, StarGraph, WeightPair};

type Check = Result<String, String>;

fn lab<T>(r: warpiso_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// Criterion 1: slices of r, sinh r, sin r, e^r have every principal
// curvature equal to s′/s, and the Jacobi potential |B|² + Ric(ν,ν)
// matches m(s′² − s s″)/s², at r₀ ∈ {0.5, 1.0, 1.5}.
fn slice_geometry() -> Check {
    let spaces = [
        lab(models::euclidean(3))?,
        lab(models::hyperbolic(3))?,
        lab(models::sine_circle(1.0))?,
        models::exponential_horn(),
    ];
    let mut worst_kappa: f64 = 0.0;
    let mut worst_jacobi: f64 = 0.0;
    for space in &spaces {
        let res = if space.fiber_dimension() == 1 {
            Resolution::Circle(64)
        } else {
            Resolution::Sphere(12, 24)
        };
        let (profile, _) = lab(space.single_factor())?;
        for r0 in [0.5, 1.0, 1.5] {
            let g = lab(StarGraph::slice(space, res, r0))?;
            let field = lab(CurvatureField::compute(&g))?;
            let (s, s1, s2) = lab(profile.eval(r0))?;
            let expect = s1 / s;
            let m = space.fiber_dimension() as f64;
            let potential_expect = m * (s1 * s1 - s * s2) / (s * s);
            let ric = lab(space.ricci_radial(r0))?;
            for i in 0..g.len() {
                for &kappa in field.kappas(i) {
                    let dev = (kappa - expect).abs() / (1.0 + expect.abs());
                    worst_kappa = worst_kappa.max(dev);
                }
                let potential = field.b_norm2(i) + ric;
                let dev =
                    (potential - potential_expect).abs() / (1.0 + potential_expect.abs());
                worst_jacobi = worst_jacobi.max(dev);
            }
        }
    }
    if worst_kappa > 1e-8 {
        return Err(format!("principal curvature deviation {worst_kappa:.3e} > 1e-8"));
    }
    if worst_jacobi > 1e-8 {
        return Err(format!("Jacobi potential deviation {worst_jacobi:.3e} > 1e-8"));
    }
    Ok(format!(
        "4 profiles × 3 radii; worst κ dev {worst_kappa:.1e}, worst potential dev {worst_jacobi:.1e}"
    ))
}

// Criterion 2: closed-form geometry — unit sphere area and volume, and an
// ellipse perimeter against an adaptive arc-length oracle.
fn closed_form_geometry() -> Check {
    let r3 = lab(models::euclidean(3))?;
    let sphere = lab(StarGraph::slice(&r3, Resolution::Sphere(32, 64), 1.0))?;
    let area = lab(sphere.area())?;
    let volume = lab(sphere.enclosed_volume(None))?;
    let da = (area - 4.0 * PI).abs() / (4.0 * PI);
    let dv = (volume - 4.0 * PI / 3.0).abs() / (4.0 * PI / 3.0);
    if da > 1e-8 || dv > 1e-8 {
        return Err(format!("sphere area dev {da:.3e}, volume dev {dv:.3e} > 1e-8"));
    }

    let r2 = lab(models::euclidean(2))?;
    let (a, b) = (2.0, 1.0);
    let ellipse = lab(shapes::ellipse(&r2, Resolution::Default, a, b))?;
    let perimeter = lab(ellipse.area())?;
    let oracle = lab(integrate_radial(
        &|t: f64| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt(),
        0.0,
        2.0 * PI,
        1e-12,
    ))?;
    let dp = (perimeter - oracle).abs() / oracle;
    if dp > 1e-6 {
        return Err(format!("ellipse perimeter dev {dp:.3e} > 1e-6"));
    }
    Ok(format!(
        "sphere devs ({da:.1e}, {dv:.1e}); perimeter {perimeter:.10} vs oracle dev {dp:.1e}"
    ))
}

// Criterion 3: the weighted isoperimetric bound holds with margin
// ≥ −1e-9(1+|rhs|) for 50 random star graphs in each of four models under
// every catalog weight; slices attain equality; and the tangent offset
// circle (not star-shaped) clears the bound by exactly 2π via the
// parametric path.
fn weighted_isoperimetry() -> Check {
    struct ModelCase {
        space: warpiso_core::WarpedSpace,
        band: (f64, f64),
        slice_at: f64,
        circle_fiber: bool,
    }
    let cases = [
        ModelCase {
            space: lab(models::euclidean(2))?,
            band: (0.7, 1.8),
            slice_at: 1.0,
            circle_fiber: true,
        },
        ModelCase {
            space: lab(models::euclidean(3))?,
            band: (0.8, 1.6),
            slice_at: 1.0,
            circle_fiber: false,
        },
        ModelCase {
            space: lab(models::hyperbolic(2))?,
            band: (0.5, 1.5),
            slice_at: 1.0,
            circle_fiber: true,
        },
        ModelCase {
            space: lab(models::hemisphere(2))?,
            band: (0.3, 1.0),
            slice_at: 0.8,
            circle_fiber: true,
        },
    ];
    let mut checks = 0usize;
    let mut min_rel = f64::INFINITY;
    for case in &cases {
        let pairs = lab(catalog_weights(&case.space, &[1, 2]))?;
        for seed in 1..=50u64 {
            let g = if case.circle_fiber {
                lab(shapes::random_circle_graph(
                    &case.space,
                    Resolution::Circle(256),
                    seed,
                    6,
                    case.band.0,
                    case.band.1,
                ))?
            } else {
                lab(shapes::random_sphere_graph(
                    &case.space,
                    Resolution::Sphere(16, 32),
                    seed,
                    case.band.0,
                    case.band.1,
                ))?
            };
            for pair in &pairs {
                let rec = lab(verify_weighted_iso(&g, pair))?;
                if !rec.hypotheses_hold {
                    return Err(format!(
                        "{} / {} / seed {seed}: hypotheses unexpectedly fail",
                        rec.model, rec.weight
                    ));
                }
                if rec.relative_margin < -1e-9 {
                    return Err(format!(
                        "{} / {} / {}: margin {:.3e} below −1e-9·(1+|rhs|)",
                        rec.model, rec.shape, rec.weight, rec.margin
                    ));
                }
                min_rel = min_rel.min(rec.relative_margin);
                checks += 1;
            }
        }
        // Slices attain equality for every catalog weight.
        let res = if case.circle_fiber {
            Resolution::Circle(256)
        } else {
            Resolution::Sphere(16, 32)
        };
        let slice = lab(StarGraph::slice(&case.space, res, case.slice_at))?;
        for pair in &pairs {
            let rec = lab(verify_weighted_iso(&slice, pair))?;
            if !(rec.equality_expected && rec.equality_observed) {
                return Err(format!(
                    "{} / slice / {}: expected equality, margin {:.3e}",
                    rec.model, rec.weight, rec.margin
                ));
            }
            checks += 1;
        }
    }

    // The circle through the origin, weight r²: margin exactly 2π.
    let plane = lab(models::euclidean(2))?;
    let quad = lab(WeightPair::plain(RadialWeight::power(2.0), 0.0))?;
    let rec = lab(verify_weighted_iso_parametric(
        &plane,
        &quad,
        "tangent-circle",
        |t| ((1.0 + t.cos(), t.sin()), (-t.sin(), t.cos())),
    ))?;
    if (rec.margin - 2.0 * PI).abs() > 1e-8 * 2.0 * PI {
        return Err(format!(
            "tangent circle margin {:.12} should be 2π",
            rec.margin
        ));
    }
    checks += 1;
    Ok(format!(
        "{checks} verifications; min relative margin {min_rel:.2e}; tangent-circle margin 2π"
    ))
}

// Criterion 4: the Jensen gap of the verification functional is ≥ −1e-10
// for 100 random graphs in ℝ³ with b = r (the affine case), and strictly
// positive in ℝ² with b = r² (the strictly convex case).
fn jensen_gaps() -> Check {
    let r3 = lab(models::euclidean(3))?;
    let linear = lab(WeightPair::plain(RadialWeight::power(1.0), 0.0))?;
    let mut min_gap3 = f64::INFINITY;
    for seed in 1..=100u64 {
        let g = lab(shapes::random_sphere_graph(
            &r3,
            Resolution::Sphere(16, 32),
            seed,
            0.8,
            1.7,
        ))?;
        let gap = lab(jensen_gap(&g, &linear))?;
        if gap < -1e-10 {
            return Err(format!("ℝ³ seed {seed}: Jensen gap {gap:.3e} < −1e-10"));
        }
        min_gap3 = min_gap3.min(gap);
    }
    let r2 = lab(models::euclidean(2))?;
    let quad = lab(WeightPair::plain(RadialWeight::power(2.0), 0.0))?;
    let mut min_gap2 = f64::INFINITY;
    for seed in 1..=100u64 {
        let g = lab(shapes::random_circle_graph(
            &r2,
            Resolution::Circle(256),
            seed,
            5,
            0.8,
            1.7,
        ))?;
        let gap = lab(jensen_gap(&g, &quad))?;
        if gap <= 0.0 {
            return Err(format!("ℝ² seed {seed}: Jensen gap {gap:.3e} not strictly positive"));
        }
        min_gap2 = min_gap2.min(gap);
    }
    Ok(format!(
        "min gap ℝ³/b=r: {min_gap3:.1e} (≥ −1e-10); min gap ℝ²/b=r²: {min_gap2:.1e} (> 0)"
    ))
}

// Criterion 5: the generalized Minkowski identity closes to 1e-6 at k = 1
// on random graphs of every kind, and to 1e-5 at k = 2 on 20 random
// revolution surfaces, with test weights η ∈ {1, r²}.
fn minkowski_identities() -> Check {
    let etas = [RadialWeight::one(), RadialWeight::power(2.0)];
    let r2 = lab(models::euclidean(2))?;
    let h2 = lab(models::hyperbolic(2))?;
    let r3 = lab(models::euclidean(3))?;
    let h3 = lab(models::hyperbolic(3))?;

    let mut graphs_k1 = Vec::new();
    for seed in 1..=10u64 {
        graphs_k1.push(lab(shapes::random_circle_graph(
            &r2,
            Resolution::Circle(256),
            seed,
            6,
            0.7,
            1.7,
        ))?);
    }
    for seed in 1..=5u64 {
        graphs_k1.push(lab(shapes::random_circle_graph(
            &h2,
            Resolution::Circle(256),
            seed,
            5,
            0.4,
            1.3,
        ))?);
        graphs_k1.push(lab(shapes::random_sphere_graph(
            &r3,
            Resolution::Sphere(16, 32),
            seed,
            0.8,
            1.6,
        ))?);
        graphs_k1.push(lab(shapes::random_revolution_graph(
            &r3,
            Resolution::Sphere(32, 8),
            seed,
            4,
            0.8,
            1.6,
        ))?);
    }
    let mut worst_k1: f64 = 0.0;
    for g in &graphs_k1 {
        for eta in &etas {
            let check = lab(hm_residual(g, 1, eta))?;
            worst_k1 = worst_k1.max(check.residual.abs());
            if check.residual.abs() > 1e-6 {
                return Err(format!(
                    "k=1 on {} ({}): residual {:.3e} > 1e-6",
                    check.shape, check.eta, check.residual
                ));
            }
        }
    }

    let mut worst_k2: f64 = 0.0;
    for (space, seeds) in [(&r3, 1..=10u64), (&h3, 1..=10u64)] {
        for seed in seeds {
            let g = lab(shapes::random_revolution_graph(
                space,
                Resolution::Sphere(48, 8),
                seed,
                4,
                0.8,
                1.6,
            ))?;
            for eta in &etas {
                let check = lab(hm_residual(&g, 2, eta))?;
                worst_k2 = worst_k2.max(check.residual.abs());
                if check.residual.abs() > 1e-5 {
                    return Err(format!(
                        "k=2 on {} ({}): residual {:.3e} > 1e-5",
                        check.shape, check.eta, check.residual
                    ));
                }
            }
        }
    }
    Ok(format!(
        "25 graphs at k=1 (worst {worst_k1:.1e} ≤ 1e-6); 20 revolutions at k=2 (worst {worst_k2:.1e} ≤ 1e-5)"
    ))
}

// Criterion 6: the comparison chain on an ellipsoid has all margins
// nonnegative with the first strict; the unit sphere collapses every
// margin to ≤ 1e-9; and the zeroth corollary is the classical
// isoperimetric inequality on 50 random plane curves.
fn comparison_chain() -> Check {
    let r3 = lab(models::euclidean(3))?;
    let egg = lab(shapes::ellipsoid(&r3, Resolution::Sphere(48, 96), 2.0, 1.5, 1.0))?;
    let rep = lab(chain_margins(&egg, 1, 2))?;
    if !rep.hypotheses_hold {
        return Err("ellipsoid unexpectedly outside the positive cone".into());
    }
    let tol = 1e-9 * (1.0 + rep.base.abs());
    if rep.margins.iter().any(|&d| d < -tol) {
        return Err(format!("ellipsoid margins {:?} have a negative entry", rep.margins));
    }
    if rep.margins[0] <= 1e-3 {
        return Err(format!(
            "ellipsoid first margin {:.3e} should be strictly positive",
            rep.margins[0]
        ));
    }

    let ball = lab(StarGraph::slice(&r3, Resolution::Sphere(24, 48), 1.0))?;
    let rep_ball = lab(chain_margins(&ball, 1, 2))?;
    let tol_ball = 1e-9 * (1.0 + rep_ball.base.abs());
    if rep_ball.margins.iter().any(|&d| d.abs() > tol_ball) {
        return Err(format!(
            "unit sphere margins {:?} should vanish to 1e-9",
            rep_ball.margins
        ));
    }

    let r2 = lab(models::euclidean(2))?;
    let mut min_rel = f64::INFINITY;
    for seed in 1..=50u64 {
        let g = lab(shapes::random_circle_graph(
            &r2,
            Resolution::Circle(256),
            seed,
            6,
            0.7,
            1.7,
        ))?;
        let rec = lab(corollary_run(&g, 0, 0))?;
        if !rec.hypotheses_hold {
            return Err(format!("seed {seed}: corollary hypotheses fail"));
        }
        if rec.relative_margin < -1e-9 {
            return Err(format!(
                "seed {seed}: classical isoperimetric margin {:.3e} negative",
                rec.margin
            ));
        }
        min_rel = min_rel.min(rec.relative_margin);
    }
    Ok(format!(
        "ellipsoid margins {:?}; ball margins ≤ 1e-9; 50 classical-iso corollaries, min rel margin {min_rel:.2e}",
        rep.margins.iter().map(|d| format!("{d:.3}")).collect::<Vec<_>>()
    ))
}

// Criterion 7: the finite-difference second variation of the equator in
// [0,π] × S¹(R) matches π(1/R − R) to 5%, its sign matches the eigenvalue
// criterion, and the destabilizing radius is R = 1 to 1e-6.
fn stability_probe() -> Check {
    let mut details = Vec::new();
    for r_fiber in [0.5, 2.0] {
        let space = lab(models::sine_circle(r_fiber))?;
        let probe = lab(second_variation_probe(
            &space,
            Resolution::Default,
            PI / 2.0,
            "first-harmonic",
            first_harmonic,
            None,
        ))?;
        let exact = PI * (1.0 / r_fiber - r_fiber);
        if (probe.d2 - exact).abs() > 0.05 * exact.abs() {
            return Err(format!(
                "R={r_fiber}: probe {:.6} vs exact {exact:.6} beyond 5%",
                probe.d2
            ));
        }
        let verdict = lab(slice_stability(&space, PI / 2.0))?;
        if verdict.stable != probe.stable_sign {
            return Err(format!(
                "R={r_fiber}: probe sign and eigenvalue criterion disagree"
            ));
        }
        details.push(format!("R={r_fiber}: d²={:.4} (exact {exact:.4})", probe.d2));
    }
    let flip = lab(bisect_sign_change(
        |r_fiber: f64| {
            let space = models::sine_circle(r_fiber)?;
            Ok(second_variation_probe(
                &space,
                Resolution::Circle(128),
                PI / 2.0,
                "first-harmonic",
                first_harmonic,
                None,
            )?
            .d2)
        },
        0.8,
        1.25,
        1e-7,
    ))?;
    if (flip - 1.0).abs() > 1e-6 {
        return Err(format!("sign flip at R={flip}, should be 1 ± 1e-6"));
    }
    details.push(format!("flip at R={flip:.8}"));
    Ok(details.join("; "))
}

// Criterion 8: the cusp s = r^{−1/2} on [1,∞) (fiber dimension 2) carries
// unit-volume annuli whose boundary area matches (1 + e⁻¹)/r₁ and decays
// to zero: no isoperimetric region exists at that volume.
fn cusp_counterexample() -> Check {
    let mut last = f64::INFINITY;
    let mut ratios = Vec::new();
    for r1 in [1.0, 10.0, 100.0] {
        let rep = lab(power_counterexample(2, r1))?;
        let expect = (1.0 + (-1.0f64).exp()) / r1;
        if (rep.volume - 1.0).abs() > 1e-12 {
            return Err(format!("r1={r1}: annulus volume {:.3e} ≠ 1", rep.volume));
        }
        if (rep.area_to_volume_ratio - expect).abs() > 1e-9 * expect {
            return Err(format!(
                "r1={r1}: ratio {:.12} vs closed form {expect:.12}",
                rep.area_to_volume_ratio
            ));
        }
        if rep.quadrature_residual.abs() > 1e-9 {
            return Err(format!(
                "r1={r1}: quadrature cross-check residual {:.3e}",
                rep.quadrature_residual
            ));
        }
        if rep.area_to_volume_ratio >= last {
            return Err("boundary/volume ratio fails to decrease".into());
        }
        last = rep.area_to_volume_ratio;
        ratios.push(format!("{:.6}", rep.area_to_volume_ratio));
    }
    Ok(format!("unit-volume annuli with boundary ratios {}", ratios.join(" → ")))
}

// Criterion 9: the slices-vs-small-balls threshold (nβₙ/|N|)^{1/(n−1)}
// equals 1 exactly for the unit round fibers in dimensions 2, 3, 4, and
// moves as the fiber volume does.
fn small_ball_marginality() -> Check {
    for (name, n) in [("euclidean2", 2usize), ("euclidean3", 3), ("euclidean4", 4)] {
        let space = lab(models::model_by_name(name))?;
        let rep = lab(small_ball_threshold(&space))?;
        if (rep.threshold - 1.0).abs() > 1e-12 || !rep.marginal {
            return Err(format!(
                "{name} (n={n}): threshold {:.15} should be exactly 1 and marginal",
                rep.threshold
            ));
        }
    }
    let long = lab(small_ball_threshold(&lab(models::sine_circle(2.0))?))?;
    if (long.threshold - 0.5).abs() > 1e-12 || long.slices_beat_small_balls {
        return Err(format!(
            "sine-circle(2): threshold {:.15} should be 1/2 with slices losing",
            long.threshold
        ));
    }
    let short = lab(small_ball_threshold(&lab(models::sine_circle(0.25))?))?;
    if !short.slices_beat_small_balls {
        return Err("sine-circle(1/4): slices should beat small balls".into());
    }
    Ok("thresholds: 1, 1, 1 (marginal); sine-circle(2) → 1/2 (balls win)".into())
}

// Criterion 10: first-eigenvalue consequences — equality for round slices
// under the Newton-operator bound, a strict gap for the ellipse, Rayleigh
// certification for off-center revolution surfaces, and the Steklov pair
// (ball equality, annulus strict with p₁ = (5−√17)/2).
fn eigenvalue_bounds() -> Check {
    let r2 = lab(models::euclidean(2))?;
    let circle = lab(StarGraph::slice(&r2, Resolution::Circle(256), 1.3))?;
    let rep = lab(lambda1_bound_check(&circle, 0))?;
    let exact = rep.lambda1_exact.ok_or("circle slice: no exact eigenvalue")?;
    if ((exact - rep.bound) / rep.bound).abs() > 1e-9 {
        return Err(format!(
            "circle slice: λ₁ {exact:.12} vs bound {:.12} not equal",
            rep.bound
        ));
    }

    let ellipse = lab(shapes::ellipse(&r2, Resolution::Default, 2.0, 1.0))?;
    let rep_e = lab(lambda1_bound_check(&ellipse, 0))?;
    if !rep_e.certified || rep_e.lambda1_exact.unwrap() >= rep_e.bound {
        return Err("ellipse: expected a certified strict gap".into());
    }

    let r3 = lab(models::euclidean(3))?;
    let ball = lab(StarGraph::slice(&r3, Resolution::Sphere(24, 48), 1.5))?;
    for k in [0usize, 1] {
        let rep = lab(lambda1_bound_check(&ball, k))?;
        let exact = rep.lambda1_exact.ok_or("sphere slice: no exact eigenvalue")?;
        let closed = binomial(1, k) * 2.0 / 1.5f64.powi(k as i32 + 2);
        if ((exact - rep.bound) / rep.bound).abs() > 1e-9
            || ((exact - closed) / closed).abs() > 1e-12
        {
            return Err(format!("sphere slice k={k}: equality fails"));
        }
    }
    let egg = lab(shapes::offset_sphere(&r3, Resolution::Sphere(32, 8), 0.3, 1.0))?;
    for k in [0usize, 1] {
        let rep = lab(lambda1_bound_check(&egg, k))?;
        if !rep.certified {
            return Err(format!(
                "offset sphere k={k}: Rayleigh {:?} fails to certify bound {:.6}",
                rep.rayleigh_upper, rep.bound
            ));
        }
    }

    let ball_report = lab(steklov_ball(3, 2.0))?;
    if ((ball_report.p1 - ball_report.bound) / ball_report.bound).abs() > 1e-12 {
        return Err("Steklov ball should attain the bound".into());
    }
    let ann = lab(steklov_annulus(0.5, 1.0, 8))?;
    let expect = (5.0 - 17.0f64.sqrt()) / 2.0;
    if ((ann.p1 - expect) / expect).abs() > 1e-12 || ann.p1 >= ann.bound {
        return Err(format!(
            "annulus: p₁ {:.12} should be (5−√17)/2 {expect:.12} < bound {:.6}",
            ann.p1, ann.bound
        ));
    }
    Ok(format!(
        "slice equalities to 1e-9; ellipse gap {:.4} < {:.4}; annulus p₁ {:.6} < {:.6}",
        rep_e.lambda1_exact.unwrap(),
        rep_e.bound,
        ann.p1,
        ann.bound
    ))
}

#[test]
fn acceptance() {
    let checks: Vec<(&str, fn() -> Check)> = vec![
        ("slice curvature and Jacobi potential", slice_geometry),
        ("closed-form areas, volumes, perimeters", closed_form_geometry),
        ("weighted isoperimetric comparisons", weighted_isoperimetry),
        ("Jensen gap of the verification functional", jensen_gaps),
        ("generalized Minkowski identities", minkowski_identities),
        ("curvature-integral comparison chain", comparison_chain),
        ("second-variation probe and critical radius", stability_probe),
        ("cusp annuli with vanishing boundary", cusp_counterexample),
        ("small-ball threshold marginality", small_ball_marginality),
        ("eigenvalue bounds and Steklov spectrum", eigenvalue_bounds),
    ];
    let mut failures = 0usize;
    for (number, (name, run)) in checks.iter().enumerate() {
        match run() {
            Ok(detail) => println!("ACCEPTANCE {:2} {name}: PASS — {detail}", number + 1),
            Err(what) => {
                failures += 1;
                println!("ACCEPTANCE {:2} {name}: FAIL — {what}", number + 1);
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
