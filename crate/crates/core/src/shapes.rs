//! Shape catalog: deterministic test surfaces and seeded random graphs.
//!
//! Deterministic shapes carry closed-form derivative tables (verified at
//! build time against spectral differentiation); random generators draw
//! band-limited perturbations of a slice, rescale them into a caller-chosen
//! radial band, and let the spectral machinery differentiate the values.

use crate::error::{Error, Result};
use crate::graph::StarGraph;
use crate::quad::{FiberGrid, NodeCoord, Resolution};
use crate::space::WarpedSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Ellipse with semi-axes (a, b) as a polar graph: ρ = ab/√(b²cos² + a²sin²).
pub fn ellipse(space: &WarpedSpace, resolution: Resolution, a: f64, b: f64) -> Result<StarGraph> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::range("ellipse: semi-axes must be positive"));
    }
    StarGraph::from_circle_fn(space, resolution, format!("ellipse({a},{b})"), move |phi| {
        let (c, s) = (phi.cos(), phi.sin());
        let d = b * b * c * c + a * a * s * s;
        let dd = 2.0 * (a * a - b * b) * s * c;
        let ddd = 2.0 * (a * a - b * b) * (c * c - s * s);
        let rho = a * b / d.sqrt();
        let d1 = -0.5 * a * b * dd / d.powf(1.5);
        let d2 = a * b * (0.75 * dd * dd / d.powf(2.5) - 0.5 * ddd / d.powf(1.5));
        (rho, d1, d2)
    })
}

/// Circle of radius ρ centered at distance d from the origin (d < ρ, so the
/// curve stays a star graph): ψ = d cos φ + √(ρ² − d² sin² φ).
pub fn offset_circle(
    space: &WarpedSpace,
    resolution: Resolution,
    d: f64,
    rho: f64,
) -> Result<StarGraph> {
    if !(rho > 0.0) || d < 0.0 || d >= rho {
        return Err(Error::range(
            "offset_circle: need 0 ≤ d < ρ for a star-shaped polar graph",
        ));
    }
    StarGraph::from_circle_fn(
        space,
        resolution,
        format!("offset-circle(d={d},rho={rho})"),
        move |phi| offset_profile(rho, d, phi),
    )
}

/// ψ = d cos t + f, f = √(ρ² − d² sin² t), with first and second t-derivatives.
pub(crate) fn offset_profile(rho: f64, d: f64, t: f64) -> (f64, f64, f64) {
    let (st, ct) = (t.sin(), t.cos());
    let f = (rho * rho - d * d * st * st).sqrt();
    let f1 = -d * d * st * ct / f;
    // From f·f′ = −d² sin t cos t: f″ = (−d²(cos² − sin²) − f′²)/f.
    let f2 = (-d * d * (ct * ct - st * st) - f1 * f1) / f;
    (d * ct + f, -d * st + f1, -d * ct + f2)
}

/// Sphere of radius ρ centered at axial distance d (d < ρ) as a revolution
/// graph over the round fiber.
pub fn offset_sphere(
    space: &WarpedSpace,
    resolution: Resolution,
    d: f64,
    rho: f64,
) -> Result<StarGraph> {
    if !(rho > 0.0) || d < 0.0 || d >= rho {
        return Err(Error::range(
            "offset_sphere: need 0 ≤ d < ρ for a star-shaped graph",
        ));
    }
    StarGraph::from_revolution_fn(
        space,
        resolution,
        format!("offset-sphere(d={d},rho={rho})"),
        move |colat| offset_profile(rho, d, colat),
    )
}

/// Triaxial ellipsoid with semi-axes (a, b, c) as a graph over the round
/// 2-sphere: ψ = Q^{-1/2} with Q = sin²ϑ(cos²φ/a² + sin²φ/b²) + cos²ϑ/c².
pub fn ellipsoid(
    space: &WarpedSpace,
    resolution: Resolution,
    a: f64,
    b: f64,
    c: f64,
) -> Result<StarGraph> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(Error::range("ellipsoid: semi-axes must be positive"));
    }
    let (ia, ib, ic) = (a.powi(-2), b.powi(-2), c.powi(-2));
    StarGraph::from_sphere_fn(
        space,
        resolution,
        format!("ellipsoid({a},{b},{c})"),
        move |colat, azim| {
            let (st, ct) = (colat.sin(), colat.cos());
            let (s2t, c2t) = ((2.0 * colat).sin(), (2.0 * colat).cos());
            let (s2p, c2p) = ((2.0 * azim).sin(), (2.0 * azim).cos());
            let e = azim.cos().powi(2) * ia + azim.sin().powi(2) * ib;
            let e1 = s2p * (ib - ia);
            let e2 = 2.0 * c2p * (ib - ia);
            let q = st * st * e + ct * ct * ic;
            let qt = s2t * (e - ic);
            let qtt = 2.0 * c2t * (e - ic);
            let qp = st * st * e1;
            let qpp = st * st * e2;
            let qtp = s2t * e1;
            let qm32 = q.powf(-1.5);
            let qm52 = q.powf(-2.5);
            (
                1.0 / q.sqrt(),
                -0.5 * qm32 * qt,
                -0.5 * qm32 * qp,
                0.75 * qm52 * qt * qt - 0.5 * qm32 * qtt,
                0.75 * qm52 * qt * qp - 0.5 * qm32 * qtp,
                0.75 * qm52 * qp * qp - 0.5 * qm32 * qpp,
            )
        },
    )
}

/// Revolution graph ψ(ϑ) = r0·(1 + Σ_j coeffs[j−1]·cos(jϑ)).  cos(jϑ) is a
/// polynomial in cos ϑ, hence smooth on the sphere.
pub fn revolution_cosine(
    space: &WarpedSpace,
    resolution: Resolution,
    r0: f64,
    coeffs: &[f64],
) -> Result<StarGraph> {
    let coeffs = coeffs.to_vec();
    StarGraph::from_revolution_fn(
        space,
        resolution,
        format!("revolution-cosine(r0={r0},{} modes)", coeffs.len()),
        move |colat| {
            let (mut v, mut d1, mut d2) = (1.0, 0.0, 0.0);
            for (idx, &cj) in coeffs.iter().enumerate() {
                let j = (idx + 1) as f64;
                v += cj * (j * colat).cos();
                d1 -= cj * j * (j * colat).sin();
                d2 -= cj * j * j * (j * colat).cos();
            }
            (r0 * v, r0 * d1, r0 * d2)
        },
    )
}

fn check_band(space: &WarpedSpace, lo: f64, hi: f64) -> Result<()> {
    if !(space.r_min() < lo && lo < hi && hi < space.r_max()) {
        return Err(Error::range(format!(
            "radial band [{lo}, {hi}] must sit strictly inside ({}, {})",
            space.r_min(),
            space.r_max()
        )));
    }
    Ok(())
}

/// Rescale a zero-mean-ish perturbation into the band [lo, hi]: the result
/// is mid + t·pert with t chosen so the image spans 90% of the half-width.
fn fit_into_band(pert: &mut [f64], lo: f64, hi: f64) {
    let mid = 0.5 * (lo + hi);
    let halfw = 0.5 * (hi - lo);
    let maxabs = pert.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let scale = if maxabs > 0.0 { 0.9 * halfw / maxabs } else { 0.0 };
    for v in pert.iter_mut() {
        *v = mid + scale * *v;
    }
}

/// Seeded random circle graph: trigonometric polynomial up to the given
/// harmonic, rescaled into (lo, hi).
pub fn random_circle_graph(
    space: &WarpedSpace,
    resolution: Resolution,
    seed: u64,
    harmonics: usize,
    lo: f64,
    hi: f64,
) -> Result<StarGraph> {
    check_band(space, lo, hi)?;
    let (_, fiber) = space.single_factor()?;
    let grid = FiberGrid::new(fiber, resolution)?;
    if !grid.is_circle() {
        return Err(Error::construction("random_circle_graph needs a circle fiber"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = harmonics.max(1);
    let coeffs: Vec<(f64, f64)> = (1..=h)
        .map(|j| {
            let damp = 1.0 / (j * j) as f64;
            (
                damp * (rng.gen::<f64>() * 2.0 - 1.0),
                damp * (rng.gen::<f64>() * 2.0 - 1.0),
            )
        })
        .collect();
    let mut vals = vec![0.0; grid.len()];
    for (i, v) in vals.iter_mut().enumerate() {
        let NodeCoord::Circle { phi } = grid.node(i) else { unreachable!() };
        *v = coeffs
            .iter()
            .enumerate()
            .map(|(idx, (a, b))| {
                let j = (idx + 1) as f64;
                a * (j * phi).cos() + b * (j * phi).sin()
            })
            .sum();
    }
    fit_into_band(&mut vals, lo, hi);
    StarGraph::from_values(
        space,
        resolution,
        format!("random-circle(seed={seed})"),
        &vals,
    )
}

/// Seeded random revolution graph over the round 2-sphere: cosine series in
/// the colatitude up to the given mode, rescaled into (lo, hi).
pub fn random_revolution_graph(
    space: &WarpedSpace,
    resolution: Resolution,
    seed: u64,
    harmonics: usize,
    lo: f64,
    hi: f64,
) -> Result<StarGraph> {
    check_band(space, lo, hi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = harmonics.max(1);
    let coeffs: Vec<f64> = (1..=h)
        .map(|j| (rng.gen::<f64>() * 2.0 - 1.0) / (j * j) as f64)
        .collect();
    let mid = 0.5 * (lo + hi);
    // Span of the raw series on a dense probe, for the rescaling.
    let mut maxabs = 0.0f64;
    for i in 0..=512 {
        let colat = std::f64::consts::PI * i as f64 / 512.0;
        let v: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| c * (((idx + 1) as f64) * colat).cos())
            .sum();
        maxabs = maxabs.max(v.abs());
    }
    let scale = if maxabs > 0.0 { 0.9 * 0.5 * (hi - lo) / maxabs } else { 0.0 };
    let scaled: Vec<f64> = coeffs.iter().map(|c| c * scale).collect();
    StarGraph::from_revolution_fn(
        space,
        resolution,
        format!("random-revolution(seed={seed})"),
        move |colat| {
            let (mut v, mut d1, mut d2) = (mid, 0.0, 0.0);
            for (idx, &cj) in scaled.iter().enumerate() {
                let j = (idx + 1) as f64;
                v += cj * (j * colat).cos();
                d1 -= cj * j * (j * colat).sin();
                d2 -= cj * j * j * (j * colat).cos();
            }
            (v, d1, d2)
        },
    )
}

/// Seeded random sphere graph: band-limited (degree ≤ 2) harmonic
/// perturbation of a slice, rescaled into (lo, hi).
pub fn random_sphere_graph(
    space: &WarpedSpace,
    resolution: Resolution,
    seed: u64,
    lo: f64,
    hi: f64,
) -> Result<StarGraph> {
    check_band(space, lo, hi)?;
    let (_, fiber) = space.single_factor()?;
    let grid = FiberGrid::new(fiber, resolution)?;
    if grid.is_circle() {
        return Err(Error::construction("random_sphere_graph needs a sphere fiber"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (0..8).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
    let mut vals = vec![0.0; grid.len()];
    for (i, v) in vals.iter_mut().enumerate() {
        let NodeCoord::Sphere { colat, azim } = grid.node(i) else { unreachable!() };
        let (st, ct) = (colat.sin(), colat.cos());
        let basis = [
            ct,
            st * azim.cos(),
            st * azim.sin(),
            0.5 * (3.0 * ct * ct - 1.0),
            st * ct * azim.cos(),
            st * ct * azim.sin(),
            st * st * (2.0 * azim).cos(),
            st * st * (2.0 * azim).sin(),
        ];
        *v = coeffs.iter().zip(basis.iter()).map(|(c, b)| c * b).sum();
    }
    fit_into_band(&mut vals, lo, hi);
    StarGraph::from_values(
        space,
        resolution,
        format!("random-sphere(seed={seed})"),
        &vals,
    )
}
