//! Stability of slices and spectral consequences of the comparison theory.
//!
//! A slice {r₀} × N is a constant-curvature hypersurface; its second
//! variation of area under volume-preserving deformations is governed by the
//! Jacobi operator −Δ_Σ − (|B|² + Ric(ν,ν)), whose potential collapses to
//! m(s′² − s s″)/s² in a warped product.  The slice is stable exactly when
//! the first nonzero fiber eigenvalue clears the potential:
//! λ₁(g_N) ≥ m(s′² − s s″)|_{r₀}.
//!
//! The module instruments that criterion four ways: directly
//! ([`slice_stability`]), by finite-difference probing of a genuine
//! volume-preserving family ([`second_variation_probe`]), through the
//! small-volume comparison of slices against metric balls
//! ([`small_ball_threshold`]), and with an explicit warped product whose
//! fixed-volume annuli have arbitrarily small boundary area
//! ([`power_counterexample`]).  Two further instruments bound first nonzero
//! eigenvalues by curvature integrals: [`lambda1_bound_check`] for the
//! Newton-tensor operators L_k u = −div(T_k ∇u) on hypersurfaces of
//! euclidean space, and [`steklov_ball`] / [`steklov_annulus`] for the
//! Steklov spectrum of planar domains.

use crate::error::{Error, Result};
use crate::graph::StarGraph;
use crate::models;
use crate::quad::{stable_sum, FiberGrid, NodeCoord, Resolution};
use crate::shape_field::CurvatureField;
use crate::space::WarpedSpace;
use crate::special::{binomial, unit_ball_volume};
use serde::Serialize;

// ---------------------------------------------------------------------------
// Slice stability
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct StabilityVerdict {
    pub model: String,
    pub r0: f64,
    /// First nonzero eigenvalue of the fiber (N, g_N).
    pub fiber_lambda1: f64,
    /// Stability threshold m(s′² − s s″) at r₀.
    pub threshold: f64,
    /// fiber_lambda1 − threshold; stable when ≥ 0.
    pub margin: f64,
    pub stable: bool,
    /// |margin| within 1e−10 of zero: the borderline case.
    pub marginal: bool,
    /// |B|² + Ric(ν,ν) evaluated from the slice geometry…
    pub jacobi_potential: f64,
    /// …versus the closed form m(s′² − s s″)/s²; the relative residual.
    pub jacobi_residual: f64,
}

/// Decide stability of the slice {r₀} × N from the eigenvalue criterion,
/// and cross-check the Jacobi potential identity
/// |B|² + Ric(ν,ν) = m(s′² − s s″)/s² at r₀.
pub fn slice_stability(space: &WarpedSpace, r0: f64) -> Result<StabilityVerdict> {
    let (profile, fiber) = space.single_factor()?;
    let lambda1 = fiber.lambda1().ok_or_else(|| {
        Error::unsupported(format!(
            "slice stability needs the fiber's first eigenvalue; \
             none is recorded for {}",
            fiber.label()
        ))
    })?;
    let (s, s1, s2) = profile.eval(r0)?;
    let m = space.fiber_dimension() as f64;
    let threshold = m * (s1 * s1 - s * s2);
    let margin = lambda1 - threshold;
    let marginal = margin.abs() <= 1e-10 * (1.0 + threshold.abs());

    // |B|² = m(s′/s)² on the slice, Ric(ν,ν) = −m s″/s radially.
    let b_norm2 = m * (s1 / s) * (s1 / s);
    let ric_normal = -m * s2 / s;
    let jacobi_potential = b_norm2 + ric_normal;
    let closed_form = threshold / (s * s);
    let jacobi_residual = (jacobi_potential - closed_form) / (1.0 + closed_form.abs());

    Ok(StabilityVerdict {
        model: space.label().to_string(),
        r0,
        fiber_lambda1: lambda1,
        threshold,
        margin,
        stable: margin >= -1e-10 * (1.0 + threshold.abs()),
        marginal,
        jacobi_potential,
        jacobi_residual,
    })
}

// ---------------------------------------------------------------------------
// Second-variation probe
// ---------------------------------------------------------------------------

/// The lowest nonconstant fiber harmonic, the canonical destabilizing
/// direction: cos φ on circles, cos ϑ on spheres.
pub fn first_harmonic(coord: &NodeCoord) -> f64 {
    match coord {
        NodeCoord::Circle { phi } => phi.cos(),
        NodeCoord::Sphere { colat, .. } => colat.cos(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub model: String,
    pub r0: f64,
    pub direction: String,
    /// Base finite-difference step.
    pub h: f64,
    /// Area of the volume-corrected graphs at t ∈ {−h, 0, +h}.
    pub area_minus: f64,
    pub area_zero: f64,
    pub area_plus: f64,
    /// Central second difference at step h and h/2.
    pub d2_coarse: f64,
    pub d2_fine: f64,
    /// Richardson extrapolation of the two; the probe's answer.
    pub d2: f64,
    /// Worst |V(ψ_t) − V(slice)| left after the volume correction.
    pub volume_drift: f64,
    pub stable_sign: bool,
}

/// Probe d²/dt²|₀ of area along the volume-preserving radial family
/// ψ_t = r₀ + t·u + q(t), where q(t) restores the enclosed volume by a
/// Newton solve.  With u a first fiber harmonic this measures the sign the
/// eigenvalue criterion predicts.
pub fn second_variation_probe(
    space: &WarpedSpace,
    resolution: Resolution,
    r0: f64,
    direction: &str,
    u: impl Fn(&NodeCoord) -> f64,
    step: Option<f64>,
) -> Result<ProbeReport> {
    let (_, fiber) = space.single_factor()?;
    let grid = FiberGrid::new(fiber, resolution)?;
    let n = grid.len();
    let u_vals: Vec<f64> = (0..n).map(|i| u(&grid.node(i))).collect();
    let h = step.unwrap_or(0.01 * r0);
    if !(h > 0.0) {
        return Err(Error::range(format!("probe step must be positive, got {h}")));
    }

    let volume_of = |psi: &[f64]| -> Result<f64> {
        let v = space.volume_values(psi, None)?;
        Ok(stable_sum((0..n).map(|i| v[i] * grid.weight(i))))
    };
    let target = volume_of(&vec![r0; n])?;
    let vol_tol = 1e-12 * (1.0 + target.abs());

    let mut drift: f64 = 0.0;
    let mut area_at = |t: f64| -> Result<f64> {
        let mut q = 0.0;
        let mut psi = vec![0.0; n];
        let mut residual = f64::INFINITY;
        for _ in 0..60 {
            for i in 0..n {
                psi[i] = r0 + t * u_vals[i] + q;
            }
            residual = volume_of(&psi)? - target;
            if residual.abs() <= vol_tol {
                break;
            }
            let dv = stable_sum(
                (0..n).map(|i| {
                    space
                        .area_coefficient(psi[i])
                        .map(|a| a * grid.weight(i))
                        .unwrap_or(f64::NAN)
                }),
            );
            if !dv.is_finite() || dv <= 0.0 {
                return Err(Error::Numeric {
                    what: "volume correction".into(),
                    achieved: residual.abs(),
                    requested: vol_tol,
                });
            }
            q -= residual / dv;
        }
        if residual.abs() > vol_tol {
            return Err(Error::Numeric {
                what: "volume correction".into(),
                achieved: residual.abs(),
                requested: vol_tol,
            });
        }
        drift = drift.max(residual.abs());
        let g = StarGraph::from_values(space, resolution, format!("probe(t={t})"), &psi)?;
        g.area()
    };

    let a0 = area_at(0.0)?;
    let (am, ap) = (area_at(-h)?, area_at(h)?);
    let (am2, ap2) = (area_at(-0.5 * h)?, area_at(0.5 * h)?);
    let d2_coarse = (ap - 2.0 * a0 + am) / (h * h);
    let d2_fine = (ap2 - 2.0 * a0 + am2) / (0.25 * h * h);
    let d2 = (4.0 * d2_fine - d2_coarse) / 3.0;
    Ok(ProbeReport {
        model: space.label().to_string(),
        r0,
        direction: direction.to_string(),
        h,
        area_minus: am,
        area_zero: a0,
        area_plus: ap,
        d2_coarse,
        d2_fine,
        d2,
        volume_drift: drift,
        stable_sign: d2 >= 0.0,
    })
}

/// Bisect a sign change of f on [lo, hi] down to width `xtol`.
/// Returns the midpoint of the final bracket.
pub fn bisect_sign_change(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
) -> Result<f64> {
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::range(format!(
            "no sign change on [{lo}, {hi}]: f = {flo:.3e} and {fhi:.3e}"
        )));
    }
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// Small-volume comparison: slices against metric balls
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SmallBallReport {
    pub model: String,
    pub dimension: usize,
    pub fiber_volume: f64,
    /// Slices beat small interior balls iff s′(0) is below this:
    /// (n β_n / |N|)^{1/(n−1)}.
    pub threshold: f64,
    pub slope_at_origin: f64,
    /// Leading small-volume area coefficients: area ≈ coeff · (n v)^{(n−1)/n}.
    pub slice_coefficient: f64,
    pub ball_coefficient: f64,
    pub slices_beat_small_balls: bool,
    pub marginal: bool,
}

/// Compare slices near the vertex against small metric balls in the smooth
/// interior at the same (small) volume.  Both families have area
/// ~ coeff · (n v)^{(n−1)/n}; slices lose — and can't be isoperimetric —
/// once s′(0) exceeds (n β_n / |N|)^{1/(n−1)}.
pub fn small_ball_threshold(space: &WarpedSpace) -> Result<SmallBallReport> {
    let (profile, _) = space.single_factor()?;
    if !profile.vanishing_at_zero() {
        return Err(Error::unsupported(
            "the small-volume comparison expands around a cone vertex, \
             which needs s(r_min) = 0",
        ));
    }
    let n = space.dimension();
    let nf = n as f64;
    let fiber_volume = space.fiber_volume();
    let beta = unit_ball_volume(n)?;
    let threshold = (nf * beta / fiber_volume).powf(1.0 / (nf - 1.0));
    let (_, slope, _) = profile.eval(space.r_min())?;
    let slice_coefficient = (fiber_volume * slope.powf(nf - 1.0)).powf(1.0 / nf);
    let ball_coefficient = (nf * beta).powf(1.0 / nf);
    let marginal = (slope - threshold).abs() <= 1e-12 * (1.0 + threshold);
    Ok(SmallBallReport {
        model: space.label().to_string(),
        dimension: n,
        fiber_volume,
        threshold,
        slope_at_origin: slope,
        slice_coefficient,
        ball_coefficient,
        slices_beat_small_balls: slope < threshold,
        marginal,
    })
}

// ---------------------------------------------------------------------------
// A warped product with no isoperimetric regions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct PowerReport {
    pub model: String,
    pub fiber_dimension: usize,
    pub r1: f64,
    pub r2: f64,
    /// Volume of the annulus [r1, r2]: |N| log(r2/r1) in closed form…
    pub volume: f64,
    /// …and by quadrature of the area coefficient.
    pub volume_quadrature: f64,
    pub quadrature_residual: f64,
    /// Total boundary area |N|(1/r1 + 1/r2).
    pub boundary_area: f64,
    pub area_to_volume_ratio: f64,
}

/// The cusp s(r) = r^{−1/m} on [1, ∞) has area coefficient A = 1/r, so the
/// annuli [r1, e·r1] all enclose volume |N| while their boundary area
/// |N|(1/r1 + 1/(e r1)) → 0.  No isoperimetric region exists at that
/// volume, and slices certainly aren't one.
pub fn power_counterexample(m: usize, r1: f64) -> Result<PowerReport> {
    if r1 < 1.0 {
        return Err(Error::range(format!(
            "the cusp lives on [1, ∞); inner radius {r1} < 1"
        )));
    }
    let space = models::power_cusp(-1.0 / m as f64, m)?;
    let fiber_volume = space.fiber_volume();
    let r2 = std::f64::consts::E * r1;
    let volume = fiber_volume * (r2 / r1).ln();
    let volume_quadrature =
        space.volume_profile(r2, None)? - space.volume_profile(r1, None)?;
    let quadrature_residual = (volume_quadrature - volume) / (1.0 + volume.abs());
    let boundary_area =
        fiber_volume * (space.area_coefficient(r1)? + space.area_coefficient(r2)?);
    Ok(PowerReport {
        model: space.label().to_string(),
        fiber_dimension: m,
        r1,
        r2,
        volume,
        volume_quadrature,
        quadrature_residual,
        boundary_area,
        area_to_volume_ratio: boundary_area / volume,
    })
}

// ---------------------------------------------------------------------------
// First-eigenvalue bound for Newton-tensor operators
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct EigenReport {
    pub experiment: String,
    pub model: String,
    pub shape: String,
    pub k: usize,
    /// λ₁ when a closed form applies (closed curves, round slices).
    pub lambda1_exact: Option<f64>,
    /// Best Rayleigh quotient over the trial span: an upper bound for λ₁.
    pub rayleigh_upper: Option<f64>,
    /// The curvature-integral bound
    /// (m−k) C(m,k) β_n^{1/n} ∫H_k dS / (n Vol^{(n+1)/n}).
    pub bound: f64,
    /// λ₁ ≤ bound is established (via the exact value or the Rayleigh
    /// quotient).
    pub certified: bool,
    pub equality_expected: bool,
    pub detail: String,
}

/// Check λ₁(L_k) ≤ (m−k) C(m,k) β_n^{1/n} ∫H_k dS / (n Vol^{(n+1)/n}) for
/// the operator L_k u = −div(T_k ∇u) on a closed hypersurface of euclidean
/// space.  Closed curves and round slices use exact eigenvalues; other
/// surfaces of revolution get a certified Rayleigh upper bound from an
/// 8-trial harmonic span with recentering.
pub fn lambda1_bound_check(graph: &StarGraph, k: usize) -> Result<EigenReport> {
    let space = graph.space();
    let (profile, _) = space.single_factor()?;
    if profile.label() != "euclidean" {
        return Err(Error::unsupported(
            "the Newton-operator eigenvalue bound is stated for \
             hypersurfaces of euclidean space",
        ));
    }
    let m = space.fiber_dimension();
    if k + 1 > m {
        return Err(Error::range(format!(
            "the bound needs k ≤ m−1 = {}, got k = {k}",
            m - 1
        )));
    }
    let nf = m as f64 + 1.0;
    let field = CurvatureField::compute(graph)?;
    let frames = graph.frames()?;
    let volume = graph.enclosed_volume(None)?;
    let int_hk = graph.boundary_integral(&frames, |i| field.mean_h(i, k));
    let beta = unit_ball_volume(space.dimension())?;
    let bound = (m - k) as f64 * binomial(m, k) * beta.powf(1.0 / nf) * int_hk
        / (nf * volume.powf((nf + 1.0) / nf));

    let psi = graph.psi();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in psi {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let is_slice = hi - lo <= 1e-12 * (1.0 + hi.abs());

    if m == 1 {
        // Closed curve: the induced metric is an interval of length L with
        // ends identified, so λ₁ = (2π/L)² exactly (and T₀ = Id).
        let length = graph.area()?;
        let exact = (2.0 * std::f64::consts::PI / length).powi(2);
        let certified = exact <= bound * (1.0 + 1e-9);
        return Ok(EigenReport {
            experiment: "newton-operator-eigenvalue".into(),
            model: space.label().to_string(),
            shape: graph.label().to_string(),
            k,
            lambda1_exact: Some(exact),
            rayleigh_upper: None,
            bound,
            certified,
            equality_expected: is_slice,
            detail: format!("closed curve of length {length:.12}"),
        });
    }

    if is_slice {
        let rho = frames.s[0] * graph.grid().radius();
        let exact = binomial(m - 1, k) * m as f64 / rho.powi(k as i32 + 2);
        let certified = exact <= bound * (1.0 + 1e-9);
        return Ok(EigenReport {
            experiment: "newton-operator-eigenvalue".into(),
            model: space.label().to_string(),
            shape: graph.label().to_string(),
            k,
            lambda1_exact: Some(exact),
            rayleigh_upper: None,
            bound,
            certified,
            equality_expected: true,
            detail: format!("round sphere of radius {rho:.12}"),
        });
    }

    if m != 2 || !graph.is_revolution() || (graph.grid().radius() - 1.0).abs() > 1e-12 {
        return Err(Error::unsupported(
            "Rayleigh certification is implemented for surfaces of \
             revolution over the unit sphere fiber",
        ));
    }
    let rayleigh = revolution_rayleigh_minimum(graph, &field, &frames, k)?;
    let certified = rayleigh <= bound * (1.0 + 1e-9);
    Ok(EigenReport {
        experiment: "newton-operator-eigenvalue".into(),
        model: space.label().to_string(),
        shape: graph.label().to_string(),
        k,
        lambda1_exact: None,
        rayleigh_upper: Some(rayleigh),
        bound,
        certified,
        equality_expected: false,
        detail: "8-trial harmonic span, recentered".into(),
    })
}

/// Best (smallest) Rayleigh quotient R[u] = ∫⟨T_k ∇u,∇u⟩dS / ∫u²dS over a
/// span of 8 mean-free trials built from recentered ambient coordinates:
/// the coordinates themselves and five quadratic harmonics.  The center is
/// improved by compass search; every evaluation is a valid upper bound for
/// λ₁(L_k), so the minimum over centers is too.
fn revolution_rayleigh_minimum(
    graph: &StarGraph,
    field: &CurvatureField,
    frames: &crate::graph::SurfaceFrames,
    k: usize,
) -> Result<f64> {
    let grid = graph.grid();
    let n = graph.len();
    let psi = graph.psi();
    let psi_t = graph.psi_t();

    // Ambient coordinates and their chart partials on the revolution
    // surface (ψ_φ = 0): the chart is orthogonal with h_ϑϑ = ψ_ϑ² + ψ²,
    // h_φφ = ψ² sin²ϑ.
    let mut c = vec![[0.0; 3]; n];
    let mut c_t = vec![[0.0; 3]; n];
    let mut c_p = vec![[0.0; 3]; n];
    let mut h_tt = vec![0.0; n];
    let mut h_pp = vec![0.0; n];
    let mut tau = vec![[0.0; 2]; n];
    let mut diag = vec![0.0; 2];
    for i in 0..n {
        let (theta, phi) = match grid.node(i) {
            NodeCoord::Sphere { colat, azim } => (colat, azim),
            NodeCoord::Circle { .. } => unreachable!("revolution graphs live on sphere grids"),
        };
        let (st, ct) = (theta.sin(), theta.cos());
        let (sp, cp) = (phi.sin(), phi.cos());
        let (r, rt) = (psi[i], psi_t[i]);
        c[i] = [r * st * cp, r * st * sp, r * ct];
        c_t[i] = [
            (rt * st + r * ct) * cp,
            (rt * st + r * ct) * sp,
            rt * ct - r * st,
        ];
        c_p[i] = [-r * st * sp, r * st * cp, 0.0];
        h_tt[i] = rt * rt + r * r;
        h_pp[i] = r * r * st * st;
        field.newton_diag_into(i, k, &mut diag);
        tau[i] = [diag[0], diag[1]];
    }
    let area = graph.boundary_integral(frames, |_| 1.0);

    // dS-barycenter: the natural starting center (x̄ = ȳ = 0 on a
    // revolution surface).
    let mut center = [0.0; 3];
    for a in 0..3 {
        center[a] = graph.boundary_integral(frames, |i| c[i][a]) / area;
    }

    let objective = |center: &[f64; 3]| -> Result<f64> {
        // Trial values and chart partials at this center.
        let mut vals = vec![[0.0; 8]; n];
        let mut d_t = vec![[0.0; 8]; n];
        let mut d_p = vec![[0.0; 8]; n];
        for i in 0..n {
            let v = [
                c[i][0] - center[0],
                c[i][1] - center[1],
                c[i][2] - center[2],
            ];
            let (vt, vp) = (c_t[i], c_p[i]);
            vals[i] = [
                v[0],
                v[1],
                v[2],
                v[0] * v[1],
                v[0] * v[2],
                v[1] * v[2],
                v[0] * v[0] - v[1] * v[1],
                v[0] * v[0] + v[1] * v[1] - 2.0 * v[2] * v[2],
            ];
            d_t[i] = [
                vt[0],
                vt[1],
                vt[2],
                v[0] * vt[1] + v[1] * vt[0],
                v[0] * vt[2] + v[2] * vt[0],
                v[1] * vt[2] + v[2] * vt[1],
                2.0 * (v[0] * vt[0] - v[1] * vt[1]),
                2.0 * (v[0] * vt[0] + v[1] * vt[1] - 2.0 * v[2] * vt[2]),
            ];
            d_p[i] = [
                vp[0],
                vp[1],
                vp[2],
                v[0] * vp[1] + v[1] * vp[0],
                v[0] * vp[2] + v[2] * vp[0],
                v[1] * vp[2] + v[2] * vp[1],
                2.0 * (v[0] * vp[0] - v[1] * vp[1]),
                2.0 * (v[0] * vp[0] + v[1] * vp[1] - 2.0 * v[2] * vp[2]),
            ];
        }
        // Enforce ⊥ 1 exactly: subtract the dS-mean of every trial.
        let mut means = [0.0; 8];
        for (j, mean) in means.iter_mut().enumerate() {
            *mean = graph.boundary_integral(frames, |i| vals[i][j]) / area;
        }
        let mut a_mat = [[0.0; 8]; 8];
        let mut m_mat = [[0.0; 8]; 8];
        for j in 0..8 {
            for l in j..8 {
                let a_jl = graph.boundary_integral(frames, |i| {
                    tau[i][0] * d_t[i][j] * d_t[i][l] / h_tt[i]
                        + tau[i][1] * d_p[i][j] * d_p[i][l] / h_pp[i]
                });
                let m_jl = graph.boundary_integral(frames, |i| {
                    (vals[i][j] - means[j]) * (vals[i][l] - means[l])
                });
                a_mat[j][l] = a_jl;
                a_mat[l][j] = a_jl;
                m_mat[j][l] = m_jl;
                m_mat[l][j] = m_jl;
            }
        }
        smallest_generalized_eigenvalue(&a_mat, &m_mat)
    };

    let mut best = objective(&center)?;
    let scale = psi.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let mut step = 0.1 * scale;
    for _ in 0..40 {
        let mut improved = false;
        for axis in 0..3 {
            for dir in [-1.0, 1.0] {
                let mut cand = center;
                cand[axis] += dir * step;
                if let Ok(v) = objective(&cand) {
                    if v < best - 1e-14 * (1.0 + best.abs()) {
                        best = v;
                        center = cand;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-9 * scale {
                break;
            }
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Steklov spectrum of balls and annuli
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SteklovReport {
    pub experiment: String,
    pub model: String,
    pub shape: String,
    /// First nonzero Steklov eigenvalue.
    pub p1: f64,
    /// Which branch attains it.
    pub branch: String,
    /// Volume-form bound (β_n / Vol)^{1/n}.
    pub bound: f64,
    pub certified: bool,
    pub equality_expected: bool,
}

/// Steklov spectrum of the round ball: p₁ = 1/ρ, which meets the bound
/// (β_n / Vol)^{1/n} with equality.
pub fn steklov_ball(n: usize, rho: f64) -> Result<SteklovReport> {
    if n < 2 {
        return Err(Error::range(format!("dimension must be ≥ 2, got {n}")));
    }
    if !(rho > 0.0) {
        return Err(Error::range(format!("radius must be positive, got {rho}")));
    }
    let beta = unit_ball_volume(n)?;
    let volume = beta * rho.powi(n as i32);
    let bound = (beta / volume).powf(1.0 / n as f64);
    let p1 = 1.0 / rho;
    Ok(SteklovReport {
        experiment: "steklov-eigenvalue".into(),
        model: format!("euclidean{n}"),
        shape: format!("ball(ρ={rho})"),
        p1,
        branch: "linear coordinates".into(),
        bound,
        certified: p1 <= bound * (1.0 + 1e-9),
        equality_expected: true,
    })
}

/// First nonzero Steklov eigenvalue of the planar annulus a < |x| < b by
/// separation of variables: the log branch (1/a + 1/b)/log(b/a) plus, per
/// angular mode k ≥ 1, the two roots of det(M − pD) = 0 with
/// M = [[k b^{k−1}, −k b^{−k−1}], [−k a^{k−1}, k a^{−k−1}]] and
/// D = [[b^k, b^{−k}], [a^k, a^{−k}]] (outer/inner Robin rows).
pub fn steklov_annulus(a: f64, b: f64, modes: usize) -> Result<SteklovReport> {
    if !(0.0 < a && a < b) {
        return Err(Error::range(format!(
            "annulus radii must satisfy 0 < a < b, got ({a}, {b})"
        )));
    }
    let mut p1 = (1.0 / a + 1.0 / b) / (b / a).ln();
    let mut branch = "radial log mode".to_string();
    for k in 1..=modes.max(1) {
        let kf = k as f64;
        let m11 = kf * b.powf(kf - 1.0);
        let m12 = -kf * b.powf(-kf - 1.0);
        let m21 = -kf * a.powf(kf - 1.0);
        let m22 = kf * a.powf(-kf - 1.0);
        let d11 = b.powf(kf);
        let d12 = b.powf(-kf);
        let d21 = a.powf(kf);
        let d22 = a.powf(-kf);
        // det(M − pD) = αp² + βp + γ.
        let alpha = d11 * d22 - d12 * d21;
        let beta = -(m11 * d22 + m22 * d11 - m12 * d21 - m21 * d12);
        let gamma = m11 * m22 - m12 * m21;
        let disc = beta * beta - 4.0 * alpha * gamma;
        if disc < 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        for root in [(-beta - sq) / (2.0 * alpha), (-beta + sq) / (2.0 * alpha)] {
            if root > 1e-14 && root < p1 {
                p1 = root;
                branch = format!("angular mode {k}");
            }
        }
    }
    let volume = std::f64::consts::PI * (b * b - a * a);
    let bound = (std::f64::consts::PI / volume).sqrt();
    Ok(SteklovReport {
        experiment: "steklov-eigenvalue".into(),
        model: "euclidean2".into(),
        shape: format!("annulus({a}, {b})"),
        p1,
        branch,
        bound,
        certified: p1 <= bound * (1.0 + 1e-9),
        equality_expected: false,
    })
}

// ---------------------------------------------------------------------------
// Small dense symmetric linear algebra (8×8 pencils)
// ---------------------------------------------------------------------------

/// Smallest eigenvalue of A x = λ M x for symmetric A and positive-definite
/// M, by Cholesky reduction and cyclic Jacobi iteration.
fn smallest_generalized_eigenvalue(a: &[[f64; 8]; 8], m: &[[f64; 8]; 8]) -> Result<f64> {
    let trace: f64 = (0..8).map(|i| m[i][i]).sum();
    let mut ridge = 0.0;
    let l = loop {
        match cholesky(m, ridge) {
            Some(l) => break l,
            None => {
                ridge = if ridge == 0.0 { 1e-14 * trace / 8.0 } else { ridge * 100.0 };
                if ridge > 1e-6 * trace {
                    return Err(Error::construction(
                        "trial Gram matrix is numerically singular",
                    ));
                }
            }
        }
    };
    // B = L⁻¹ A L⁻ᵀ: forward-solve twice.
    let mut y = *a;
    for col in 0..8 {
        for row in 0..8 {
            let mut v = y[row][col];
            for j in 0..row {
                v -= l[row][j] * y[j][col];
            }
            y[row][col] = v / l[row][row];
        }
    }
    let mut b = [[0.0; 8]; 8];
    for row in 0..8 {
        for col in 0..8 {
            let mut v = y[row][col];
            for j in 0..col {
                v -= l[col][j] * b[row][j];
            }
            b[row][col] = v / l[col][col];
        }
    }
    for i in 0..8 {
        for j in (i + 1)..8 {
            let s = 0.5 * (b[i][j] + b[j][i]);
            b[i][j] = s;
            b[j][i] = s;
        }
    }
    Ok(jacobi_eigen_min(&mut b))
}

fn cholesky(m: &[[f64; 8]; 8], ridge: f64) -> Option<[[f64; 8]; 8]> {
    let mut l = [[0.0; 8]; 8];
    for i in 0..8 {
        for j in 0..=i {
            let mut sum = m[i][j] + if i == j { ridge } else { 0.0 };
            for p in 0..j {
                sum -= l[i][p] * l[j][p];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(l)
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigen_min(b: &mut [[f64; 8]; 8]) -> f64 {
    let fro: f64 = b.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..8 {
            for j in (i + 1)..8 {
                off += b[i][j] * b[i][j];
            }
        }
        if off.sqrt() <= 1e-14 * (1.0 + fro) {
            break;
        }
        for p in 0..8 {
            for q in (p + 1)..8 {
                if b[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = 0.5 * (b[q][q] - b[p][p]) / b[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cos = 1.0 / (t * t + 1.0).sqrt();
                let sin = t * cos;
                for i in 0..8 {
                    let (bip, biq) = (b[i][p], b[i][q]);
                    b[i][p] = cos * bip - sin * biq;
                    b[i][q] = sin * bip + cos * biq;
                }
                for i in 0..8 {
                    let (bpi, bqi) = (b[p][i], b[q][i]);
                    b[p][i] = cos * bpi - sin * bqi;
                    b[q][i] = sin * bpi + cos * bqi;
                }
            }
        }
    }
    (0..8).map(|i| b[i][i]).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn slice_stability_matches_the_eigenvalue_criterion() {
        // Unit round fibers sit exactly on the borderline in the space
        // forms: λ₁ = m = m(s′² − s s″).
        for name in ["euclidean3", "hyperbolic3", "hemisphere3"] {
            let space = models::model_by_name(name).unwrap();
            let v = slice_stability(&space, 0.7).unwrap();
            assert!(v.marginal, "{name}: margin {}", v.margin);
            assert!(v.stable);
            assert!(v.jacobi_residual.abs() < 1e-12);
        }
        // Spheres over a large circle destabilize, over a small one don't.
        let big = models::sine_circle(2.0).unwrap();
        assert!(!slice_stability(&big, 1.0).unwrap().stable);
        let small = models::sine_circle(0.5).unwrap();
        let v = slice_stability(&small, 1.0).unwrap();
        assert!(v.stable && !v.marginal);
    }

    #[test]
    fn probe_matches_the_exact_second_variation() {
        // On [0,π] × S¹(R) with s = sin, the equator family along cos φ has
        // d²A/dt² = π(1/R − R) after the volume correction.
        for r_fiber in [0.5, 2.0] {
            let space = models::sine_circle(r_fiber).unwrap();
            let p = second_variation_probe(
                &space,
                Resolution::Default,
                PI / 2.0,
                "first-harmonic",
                first_harmonic,
                None,
            )
            .unwrap();
            let exact = PI * (1.0 / r_fiber - r_fiber);
            assert_relative_eq!(p.d2, exact, max_relative = 5e-3);
            assert_eq!(p.stable_sign, exact >= 0.0);
            assert!(p.volume_drift <= 1e-10);
        }
    }

    #[test]
    fn probe_sign_flips_at_the_critical_fiber_radius() {
        let d2_at = |r_fiber: f64| -> Result<f64> {
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
        };
        let flip = bisect_sign_change(d2_at, 0.8, 1.25, 1e-7).unwrap();
        assert!(
            (flip - 1.0).abs() <= 1e-6,
            "critical radius {flip} should be 1"
        );
    }

    #[test]
    fn unit_space_forms_sit_at_the_small_ball_threshold() {
        for name in ["euclidean2", "euclidean3", "euclidean4"] {
            let space = models::model_by_name(name).unwrap();
            let rep = small_ball_threshold(&space).unwrap();
            assert_relative_eq!(rep.threshold, 1.0, max_relative = 1e-12);
            assert!(rep.marginal, "{name} is the borderline case");
        }
        // A long circle fiber lowers the threshold below s′(0) = 1.
        let rep = small_ball_threshold(&models::sine_circle(2.0).unwrap()).unwrap();
        assert_relative_eq!(rep.threshold, 0.5, max_relative = 1e-12);
        assert!(!rep.slices_beat_small_balls);
        let rep = small_ball_threshold(&models::sine_circle(0.25).unwrap()).unwrap();
        assert!(rep.slices_beat_small_balls);
    }

    #[test]
    fn cusp_annuli_shrink_boundary_at_fixed_volume() {
        for (r1, expect) in [(1.0, 1.0 + (-1.0_f64).exp()), (10.0, 0.1367879441171442), (100.0, 0.01367879441171442)] {
            let rep = power_counterexample(2, r1).unwrap();
            assert_relative_eq!(rep.volume, 1.0, max_relative = 1e-12);
            assert_relative_eq!(rep.area_to_volume_ratio, expect, max_relative = 1e-10);
            assert!(rep.quadrature_residual.abs() < 1e-10);
        }
    }

    #[test]
    fn curve_eigenvalue_sits_below_the_length_bound() {
        let space = models::euclidean(2).unwrap();
        let g = shapes::ellipse(&space, Resolution::Default, 2.0, 1.0).unwrap();
        let rep = lambda1_bound_check(&g, 0).unwrap();
        let exact = rep.lambda1_exact.unwrap();
        assert!(rep.certified);
        assert!(exact < rep.bound);
        assert_relative_eq!(exact, 0.42056, max_relative = 1e-4);
        assert_relative_eq!(rep.bound, 0.54518, max_relative = 1e-4);

        // A round circle attains equality.
        let c = StarGraph::slice(&space, Resolution::Default, 1.3).unwrap();
        let rep = lambda1_bound_check(&c, 0).unwrap();
        assert_relative_eq!(rep.lambda1_exact.unwrap(), rep.bound, max_relative = 1e-10);
    }

    #[test]
    fn sphere_slices_attain_the_newton_operator_bound() {
        let space = models::euclidean(3).unwrap();
        let g = StarGraph::slice(&space, Resolution::Sphere(24, 48), 1.5).unwrap();
        for k in [0usize, 1] {
            let rep = lambda1_bound_check(&g, k).unwrap();
            let exact = rep.lambda1_exact.unwrap();
            assert_relative_eq!(exact, rep.bound, max_relative = 1e-10);
            assert_relative_eq!(
                exact,
                binomial(1, k) * 2.0 / 1.5_f64.powi(k as i32 + 2),
                max_relative = 1e-12
            );
            assert!(rep.certified && rep.equality_expected);
        }
    }

    #[test]
    fn rayleigh_certifies_revolution_surfaces() {
        let space = models::euclidean(3).unwrap();
        let g = shapes::offset_sphere(&space, Resolution::Sphere(32, 8), 0.3, 1.0).unwrap();
        for k in [0usize, 1] {
            let rep = lambda1_bound_check(&g, k).unwrap();
            let ray = rep.rayleigh_upper.unwrap();
            assert!(
                rep.certified,
                "k = {k}: rayleigh {ray} vs bound {}",
                rep.bound
            );
        }
    }

    #[test]
    fn steklov_ball_is_sharp_and_annulus_is_strict() {
        let ball = steklov_ball(3, 2.0).unwrap();
        assert_relative_eq!(ball.p1, ball.bound, max_relative = 1e-12);
        assert!(ball.certified && ball.equality_expected);

        let ann = steklov_annulus(0.5, 1.0, 8).unwrap();
        let expect = (5.0 - 17.0_f64.sqrt()) / 2.0;
        assert_relative_eq!(ann.p1, expect, max_relative = 1e-12);
        assert!(ann.p1 < ann.bound);
        assert!(ann.certified);
        assert_eq!(ann.branch, "angular mode 1");
    }
}
