//! Deterministic quadrature: Gauss–Legendre rules, an adaptive radial
//! integrator, and product grids on the realized fibers (circles and round
//! 2-spheres).  Everything here is closed-form or iteration-to-tolerance; no
//! stochastic rule is ever used, so repeated runs reproduce bit-identical
//! sums.
//!
//! Grid conventions
//! - circle of radius R: n uniform nodes φ_j = 2πj/n with weight 2πR/n
//!   (arc-length measure, total 2πR);
//! - sphere of radius R: Gauss–Legendre in x = cos(colatitude) times a
//!   uniform azimuth, node weight R²·w_GL·(2π/n_azim), total 4πR².
//!
//! The module also owns the spectral differentiation matrices used by
//! value-only graphs: the closed-form periodic first/second derivative
//! matrices on the uniform circle grid and barycentric polynomial
//! differentiation on the Gauss–Legendre colatitude nodes.

use crate::error::{Error, Result};
use crate::fiber::{FiberRealization, FiberSpec};

/// Default circle resolution (nodes).
pub const DEFAULT_CIRCLE_RES: usize = 512;
/// Default sphere resolution (colatitude × azimuth nodes).
pub const DEFAULT_SPHERE_RES: (usize, usize) = (64, 128);
/// Default adaptive radial tolerance.
pub const DEFAULT_RADIAL_TOL: f64 = 1e-10;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1],
/// nodes ascending.  Exact for polynomials of degree ≤ 2n − 1.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::range("gauss_legendre: need at least one node"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi-style initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                let (p2, d2) = legendre_pair(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // The guess sweeps from the largest root downward.
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        // The middle root of an odd rule is exactly zero.
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Compensated (Neumaier) summation; keeps grid reductions at ~1 ulp even
/// for the 8192-node sphere grids.
pub fn stable_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

// ---------------------------------------------------------------------------
// Adaptive radial integration
// ---------------------------------------------------------------------------

const PANEL_ORDER: usize = 15;

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    use std::sync::OnceLock;
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER).expect("fixed 15-point rule"))
}

fn panel_integral(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = panel_rule();
    let mid = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + hw * x);
    }
    acc * hw
}

/// ∫_a^b f dr by adaptive composite 15-point Gauss–Legendre with interval
/// bisection.  The estimated error is kept at or below tol·(1 + |result|);
/// failure to converge within the depth budget is an error, not a silent
/// best-effort value.
pub fn integrate_radial(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::range("integrate_radial: endpoints must be finite"));
    }
    if !(tol > 0.0) {
        return Err(Error::range("integrate_radial: tolerance must be positive"));
    }
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    // Seed the adaptive pass with a uniform composite: a single top-level
    // panel can miss a narrow interior feature entirely and accept a wrong
    // answer, while sixteen seed panels guarantee interior sampling before
    // any accept/reject decision.
    const SEED_PANELS: usize = 16;
    let width = (hi - lo) / SEED_PANELS as f64;
    let mut seeds = [(0.0, 0.0, 0.0); SEED_PANELS];
    let mut rough = 0.0;
    for (i, seed) in seeds.iter_mut().enumerate() {
        let a_i = lo + width * i as f64;
        let b_i = if i + 1 == SEED_PANELS { hi } else { lo + width * (i + 1) as f64 };
        let whole = panel_integral(&mut f, a_i, b_i);
        rough += whole;
        *seed = (a_i, b_i, whole);
    }
    let panel_tol = tol * (1.0 + rough.abs()) / SEED_PANELS as f64;
    let mut err_acc = 0.0;
    let mut value = 0.0;
    for (a_i, b_i, whole) in seeds {
        value += adapt(&mut f, a_i, b_i, whole, panel_tol, 0, &mut err_acc)?;
    }
    Ok(sign * value)
}

fn adapt(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    err_acc: &mut f64,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = panel_integral(f, a, mid);
    let right = panel_integral(f, mid, b);
    let refined = left + right;
    let err = (refined - whole).abs();
    if err <= tol || b - a <= 1e-14 * (1.0 + mid.abs()) {
        *err_acc += err;
        return Ok(refined);
    }
    if depth >= 48 {
        return Err(Error::Numeric {
            what: "integrate_radial bisection depth exhausted".into(),
            achieved: err,
            requested: tol,
        });
    }
    let l = adapt(f, a, mid, left, 0.5 * tol, depth + 1, err_acc)?;
    let r = adapt(f, mid, b, right, 0.5 * tol, depth + 1, err_acc)?;
    Ok(l + r)
}

// ---------------------------------------------------------------------------
// Fiber grids
// ---------------------------------------------------------------------------

/// Resolution request for a fiber grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// Use the library defaults (512 on circles, 64 × 128 on spheres).
    Default,
    /// Circle node count.
    Circle(usize),
    /// Sphere (colatitude, azimuth) node counts.
    Sphere(usize, usize),
}

/// Position of a grid node on the fiber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeCoord {
    /// Azimuthal angle φ ∈ [0, 2π) on a circle fiber.
    Circle { phi: f64 },
    /// Colatitude ϑ ∈ (0, π) and azimuth φ ∈ [0, 2π) on a sphere fiber.
    Sphere { colat: f64, azim: f64 },
}

#[derive(Debug, Clone)]
enum GridKind {
    Circle {
        radius: f64,
        n: usize,
    },
    Sphere {
        radius: f64,
        n_colat: usize,
        n_azim: usize,
        /// Colatitudes ascending in (0, π) (Gauss–Legendre in cos ϑ).
        colat: Vec<f64>,
        /// Matching Gauss–Legendre weights (in the x = cos ϑ variable).
        colat_w: Vec<f64>,
    },
}

/// Quadrature grid over a realized fiber.  Node order is fixed: circles run
/// φ ascending; spheres run colatitude-major, azimuth-minor.
#[derive(Debug, Clone)]
pub struct FiberGrid {
    fiber: FiberSpec,
    kind: GridKind,
}

impl FiberGrid {
    /// Build a grid for the realized fiber.  Abstract fibers cannot be
    /// discretized and are rejected.
    pub fn new(fiber: &FiberSpec, resolution: Resolution) -> Result<FiberGrid> {
        match fiber.realization() {
            FiberRealization::CircleOfRadius(radius) => {
                let n = match resolution {
                    Resolution::Default => DEFAULT_CIRCLE_RES,
                    Resolution::Circle(n) => n,
                    Resolution::Sphere(..) => {
                        return Err(Error::range(
                            "fiber grid: sphere resolution requested on a circle fiber",
                        ))
                    }
                };
                if n < 4 || n % 2 != 0 {
                    return Err(Error::range(
                        "fiber grid: circle resolution must be an even count ≥ 4",
                    ));
                }
                Ok(FiberGrid { fiber: fiber.clone(), kind: GridKind::Circle { radius, n } })
            }
            FiberRealization::RoundSphereOfRadius(radius) => {
                let (nc, na) = match resolution {
                    Resolution::Default => DEFAULT_SPHERE_RES,
                    Resolution::Sphere(nc, na) => (nc, na),
                    Resolution::Circle(_) => {
                        return Err(Error::range(
                            "fiber grid: circle resolution requested on a sphere fiber",
                        ))
                    }
                };
                if nc < 4 || na < 4 || na % 2 != 0 {
                    return Err(Error::range(
                        "fiber grid: sphere resolution needs n_colat ≥ 4 and even n_azim ≥ 4",
                    ));
                }
                let (x, w) = gauss_legendre(nc)?;
                // x ascending ⇒ ϑ = acos x descending; store ϑ ascending.
                let colat: Vec<f64> = x.iter().rev().map(|xi| xi.acos()).collect();
                let colat_w: Vec<f64> = w.iter().rev().copied().collect();
                Ok(FiberGrid {
                    fiber: fiber.clone(),
                    kind: GridKind::Sphere { radius, n_colat: nc, n_azim: na, colat, colat_w },
                })
            }
            FiberRealization::Abstract => Err(Error::UnsupportedFiber(
                "abstract fibers carry no discretization".into(),
            )),
        }
    }

    pub fn fiber(&self) -> &FiberSpec {
        &self.fiber
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        match &self.kind {
            GridKind::Circle { n, .. } => *n,
            GridKind::Sphere { n_colat, n_azim, .. } => n_colat * n_azim,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True when the grid lives on a circle fiber.
    pub fn is_circle(&self) -> bool {
        matches!(self.kind, GridKind::Circle { .. })
    }

    /// Fiber radius of the realization.
    pub fn radius(&self) -> f64 {
        match &self.kind {
            GridKind::Circle { radius, .. } => *radius,
            GridKind::Sphere { radius, .. } => *radius,
        }
    }

    /// (n_colat, n_azim) on spheres, (n, 1) on circles.
    pub fn shape(&self) -> (usize, usize) {
        match &self.kind {
            GridKind::Circle { n, .. } => (*n, 1),
            GridKind::Sphere { n_colat, n_azim, .. } => (*n_colat, *n_azim),
        }
    }

    /// Coordinates of node i (circle: φ ascending; sphere: colatitude-major).
    pub fn node(&self, i: usize) -> NodeCoord {
        match &self.kind {
            GridKind::Circle { n, .. } => NodeCoord::Circle {
                phi: 2.0 * std::f64::consts::PI * i as f64 / *n as f64,
            },
            GridKind::Sphere { n_azim, colat, .. } => {
                let jc = i / n_azim;
                let ja = i % n_azim;
                NodeCoord::Sphere {
                    colat: colat[jc],
                    azim: 2.0 * std::f64::consts::PI * ja as f64 / *n_azim as f64,
                }
            }
        }
    }

    /// Fiber-measure weight of node i; the weights sum to the fiber volume.
    pub fn weight(&self, i: usize) -> f64 {
        match &self.kind {
            GridKind::Circle { radius, n } => {
                let _ = i;
                2.0 * std::f64::consts::PI * radius / *n as f64
            }
            GridKind::Sphere { radius, n_azim, colat_w, .. } => {
                let jc = i / n_azim;
                radius * radius * colat_w[jc] * 2.0 * std::f64::consts::PI / *n_azim as f64
            }
        }
    }

    /// Colatitude nodes and Gauss–Legendre weights (sphere grids only).
    pub fn colatitudes(&self) -> Option<(&[f64], &[f64])> {
        match &self.kind {
            GridKind::Circle { .. } => None,
            GridKind::Sphere { colat, colat_w, .. } => Some((colat, colat_w)),
        }
    }

    /// ∫_N f dvol_N with f given per node, summed in fixed node order.
    pub fn integrate(&self, mut f: impl FnMut(usize, NodeCoord) -> f64) -> f64 {
        stable_sum((0..self.len()).map(|i| self.weight(i) * f(i, self.node(i))))
    }
}

// ---------------------------------------------------------------------------
// Differentiation matrices
// ---------------------------------------------------------------------------

/// Dense row-major n×n matrix application.
pub fn apply_matrix(mat: &[f64], n: usize, src: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let row = &mat[i * n..(i + 1) * n];
        *o = stable_sum(row.iter().zip(src).map(|(m, s)| m * s));
    }
    out
}

/// First-derivative matrix on the uniform periodic grid φ_j = 2πj/n
/// (n even): D_jk = ½(−1)^{j−k} cot((j−k)π/n), zero diagonal.  Exact for
/// trigonometric polynomials below the Nyquist mode.
pub fn periodic_diff1(n: usize) -> Result<Vec<f64>> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::range("periodic_diff1: need an even grid of ≥ 4 nodes"));
    }
    let mut d = vec![0.0; n * n];
    let h = std::f64::consts::PI / n as f64;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let diff = j as isize - k as isize;
                let sign = if diff % 2 == 0 { 1.0 } else { -1.0 };
                d[j * n + k] = 0.5 * sign / (h * diff as f64).tan();
            }
        }
    }
    Ok(d)
}

/// Second-derivative matrix on the same grid:
/// diagonal −π²/(3h²) − 1/6, off-diagonal −(−1)^{j−k} / (2 sin²((j−k)h/2))
/// with h = 2π/n.
pub fn periodic_diff2(n: usize) -> Result<Vec<f64>> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::range("periodic_diff2: need an even grid of ≥ 4 nodes"));
    }
    let mut d = vec![0.0; n * n];
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let diag = -std::f64::consts::PI * std::f64::consts::PI / (3.0 * h * h) - 1.0 / 6.0;
    for j in 0..n {
        for k in 0..n {
            d[j * n + k] = if j == k {
                diag
            } else {
                let diff = j as isize - k as isize;
                let sign = if diff % 2 == 0 { 1.0 } else { -1.0 };
                let s = (0.5 * h * diff as f64).sin();
                -sign / (2.0 * s * s)
            };
        }
    }
    Ok(d)
}

/// Barycentric interpolation weights for distinct nodes, computed in
/// log-space to avoid under/overflow, normalized to max |w| = 1.
pub fn barycentric_weights(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 2 {
        return Err(Error::range("barycentric_weights: need at least two nodes"));
    }
    let mut logw = vec![0.0; n];
    let mut sign = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let d = x[j] - x[k];
                if d == 0.0 {
                    return Err(Error::construction("barycentric_weights: repeated node"));
                }
                logw[j] -= d.abs().ln();
                if d < 0.0 {
                    sign[j] = -sign[j];
                }
            }
        }
    }
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((0..n).map(|j| sign[j] * (logw[j] - max).exp()).collect())
}

/// Polynomial differentiation matrix on arbitrary distinct nodes from their
/// barycentric weights: D_jk = (w_k/w_j)/(x_j−x_k) for j≠k, rows summing to
/// zero.  Exact for polynomials of degree < n.
pub fn barycentric_diff(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    let w = barycentric_weights(x)?;
    let mut d = vec![0.0; n * n];
    for j in 0..n {
        let mut diag = 0.0;
        for k in 0..n {
            if j != k {
                let entry = (w[k] / w[j]) / (x[j] - x[k]);
                d[j * n + k] = entry;
                diag -= entry;
            }
        }
        d[j * n + j] = diag;
    }
    Ok(d)
}
