//! Star-shaped hypersurfaces as radial graphs over the fiber.
//!
//! A hypersurface Σ ⊂ [r_min, r_max) × N is stored as r = ψ(y) together with
//! the first and second fiber derivatives of ψ at the quadrature nodes.  The
//! induced geometry follows from the graph formulas: with W² = 1 + s⁻²|∇ψ|²
//! (all fiber quantities in g_N, s evaluated at ψ),
//!
//!   ν  = (1/W)(∂r − s⁻² ∇ψ)          outward unit normal,
//!   dS = W s^m dvol_N                 area element,
//!   ⟨X, ν⟩ = s/W                      support function, X = s ∂r,
//!   |X^T|² = s² (1 − 1/W²)            tangential part of X.
//!
//! Derivatives come either from closed forms supplied by the shape
//! constructor (and are then cross-checked against spectral differentiation
//! of the node values, so a wrong analytic table fails loudly) or from
//! spectral differentiation alone when only values are known.

use crate::error::{Error, Result};
use crate::quad::{
    apply_matrix, barycentric_diff, periodic_diff1, periodic_diff2, stable_sum, FiberGrid,
    NodeCoord, Resolution,
};
use crate::space::WarpedSpace;
use crate::weights::RadialWeight;
use std::io::{BufRead, Write as IoWrite};
use std::path::Path;

/// Closed hypersurface given as a radial graph over the fiber.
#[derive(Debug, Clone)]
pub struct StarGraph {
    space: WarpedSpace,
    grid: FiberGrid,
    label: String,
    psi: Vec<f64>,
    // Circle grids use only the azimuthal slots (`*_p`); sphere grids use
    // all six fields.  Unused slots stay empty.
    psi_t: Vec<f64>,
    psi_p: Vec<f64>,
    psi_tt: Vec<f64>,
    psi_tp: Vec<f64>,
    psi_pp: Vec<f64>,
    revolution: bool,
}

/// Pointwise surface data shared by every experiment: area element, tilt,
/// support function, tangential radial part, and the warp values at ψ.
#[derive(Debug, Clone)]
pub struct SurfaceFrames {
    /// Area-element weights: ∫_Σ f dS = Σ_i f_i · ds[i].
    pub ds: Vec<f64>,
    /// Tilt factor W ≥ 1 (W = 1 exactly on slices).
    pub w: Vec<f64>,
    /// Support function ⟨X, ν⟩ = s/W.
    pub support: Vec<f64>,
    /// |X^T|² = s²(1 − 1/W²).
    pub xt_norm2: Vec<f64>,
    /// Warp factor and derivatives at ψ: s, s′, s″.
    pub s: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
}

impl StarGraph {
    // -- constructors -------------------------------------------------------

    /// The centered slice {r = r0}.
    pub fn slice(space: &WarpedSpace, resolution: Resolution, r0: f64) -> Result<StarGraph> {
        let grid = grid_for(space, resolution)?;
        let n = grid.len();
        let g = StarGraph {
            space: space.clone(),
            grid,
            label: format!("slice(r={r0})"),
            psi: vec![r0; n],
            psi_t: vec![0.0; n],
            psi_p: vec![0.0; n],
            psi_tt: vec![0.0; n],
            psi_tp: vec![0.0; n],
            psi_pp: vec![0.0; n],
            revolution: true,
        };
        g.validate_radii()?;
        Ok(g)
    }

    /// Graph over a circle fiber from a closed-form profile
    /// φ ↦ (ψ, ψ_φ, ψ_φφ).
    pub fn from_circle_fn(
        space: &WarpedSpace,
        resolution: Resolution,
        label: impl Into<String>,
        f: impl Fn(f64) -> (f64, f64, f64),
    ) -> Result<StarGraph> {
        let grid = grid_for(space, resolution)?;
        if !grid.is_circle() {
            return Err(Error::construction(
                "from_circle_fn requires a circle fiber",
            ));
        }
        let n = grid.len();
        let mut psi = vec![0.0; n];
        let mut psi_p = vec![0.0; n];
        let mut psi_pp = vec![0.0; n];
        for i in 0..n {
            let NodeCoord::Circle { phi } = grid.node(i) else { unreachable!() };
            let (v, d1, d2) = f(phi);
            psi[i] = v;
            psi_p[i] = d1;
            psi_pp[i] = d2;
        }
        let g = StarGraph {
            space: space.clone(),
            grid,
            label: label.into(),
            psi,
            psi_t: Vec::new(),
            psi_p,
            psi_tt: Vec::new(),
            psi_tp: Vec::new(),
            psi_pp,
            revolution: false,
        };
        g.validate_radii()?;
        g.cross_check_circle_derivatives()?;
        Ok(g)
    }

    /// Graph over a sphere fiber from a closed-form profile
    /// (ϑ, φ) ↦ (ψ, ψ_ϑ, ψ_φ, ψ_ϑϑ, ψ_ϑφ, ψ_φφ).
    pub fn from_sphere_fn(
        space: &WarpedSpace,
        resolution: Resolution,
        label: impl Into<String>,
        f: impl Fn(f64, f64) -> (f64, f64, f64, f64, f64, f64),
    ) -> Result<StarGraph> {
        let grid = grid_for(space, resolution)?;
        if grid.is_circle() {
            return Err(Error::construction(
                "from_sphere_fn requires a sphere fiber",
            ));
        }
        let n = grid.len();
        let mut g = StarGraph {
            space: space.clone(),
            grid,
            label: label.into(),
            psi: vec![0.0; n],
            psi_t: vec![0.0; n],
            psi_p: vec![0.0; n],
            psi_tt: vec![0.0; n],
            psi_tp: vec![0.0; n],
            psi_pp: vec![0.0; n],
            revolution: false,
        };
        for i in 0..n {
            let NodeCoord::Sphere { colat, azim } = g.grid.node(i) else { unreachable!() };
            let (v, dt, dp, dtt, dtp, dpp) = f(colat, azim);
            g.psi[i] = v;
            g.psi_t[i] = dt;
            g.psi_p[i] = dp;
            g.psi_tt[i] = dtt;
            g.psi_tp[i] = dtp;
            g.psi_pp[i] = dpp;
        }
        g.revolution = g.detect_revolution();
        g.validate_radii()?;
        g.cross_check_sphere_derivatives()?;
        Ok(g)
    }

    /// Surface of revolution over a sphere fiber: ψ depends on the
    /// colatitude only, supplied as ϑ ↦ (ψ, ψ_ϑ, ψ_ϑϑ).
    pub fn from_revolution_fn(
        space: &WarpedSpace,
        resolution: Resolution,
        label: impl Into<String>,
        f: impl Fn(f64) -> (f64, f64, f64),
    ) -> Result<StarGraph> {
        Self::from_sphere_fn(space, resolution, label, |colat, _azim| {
            let (v, dt, dtt) = f(colat);
            (v, dt, 0.0, dtt, 0.0, 0.0)
        })
    }

    /// Build from node values alone; derivatives come from spectral
    /// differentiation (trigonometric in the periodic directions,
    /// barycentric-polynomial across the Gauss–Legendre colatitudes).
    pub fn from_values(
        space: &WarpedSpace,
        resolution: Resolution,
        label: impl Into<String>,
        values: &[f64],
    ) -> Result<StarGraph> {
        let grid = grid_for(space, resolution)?;
        if values.len() != grid.len() {
            return Err(Error::construction(format!(
                "value count {} does not match the grid size {}",
                values.len(),
                grid.len()
            )));
        }
        let mut g = StarGraph {
            space: space.clone(),
            grid,
            label: label.into(),
            psi: values.to_vec(),
            psi_t: Vec::new(),
            psi_p: Vec::new(),
            psi_tt: Vec::new(),
            psi_tp: Vec::new(),
            psi_pp: Vec::new(),
            revolution: false,
        };
        g.differentiate_values()?;
        g.revolution = if g.grid.is_circle() { false } else { g.detect_revolution() };
        g.validate_radii()?;
        Ok(g)
    }

    // -- derivative machinery ----------------------------------------------

    fn differentiate_values(&mut self) -> Result<()> {
        if self.grid.is_circle() {
            let n = self.grid.len();
            let d1 = periodic_diff1(n)?;
            let d2 = periodic_diff2(n)?;
            self.psi_p = apply_matrix(&d1, n, &self.psi);
            self.psi_pp = apply_matrix(&d2, n, &self.psi);
            self.psi_t = Vec::new();
            self.psi_tt = Vec::new();
            self.psi_tp = Vec::new();
        } else {
            // Smooth functions on the sphere need the azimuthal-wavenumber
            // split: the colatitude profile of wavenumber q has the form
            // sin^{q mod 2}ϑ · (smooth in x = cos ϑ), and only the smooth
            // part may be differentiated by polynomial interpolation at the
            // Gauss–Legendre x-nodes.  Differentiating raw profiles in ϑ
            // instead is a Runge-type trap: the nodes are near-uniform in ϑ,
            // and boundary errors reach order one.
            let (nc, na) = self.grid.shape();
            let (colat, _) = self.grid.colatitudes().expect("sphere grid");
            let xs: Vec<f64> = colat.iter().map(|t| t.cos()).collect();
            let us: Vec<f64> = colat.iter().map(|t| t.sin()).collect();
            let dx = barycentric_diff(&xs)?;
            let half = na / 2;
            let n = self.psi.len();
            // Fourier analysis per ring: cos- and sin-coefficients for each
            // wavenumber q = 0..=na/2, as colatitude profiles.
            let mut coef_a = vec![0.0; (half + 1) * nc];
            let mut coef_b = vec![0.0; (half + 1) * nc];
            for jc in 0..nc {
                let ring = &self.psi[jc * na..(jc + 1) * na];
                for q in 0..=half {
                    let (mut ca, mut cb) = (0.0, 0.0);
                    for (j, &v) in ring.iter().enumerate() {
                        let ang = q as f64 * 2.0 * std::f64::consts::PI * j as f64 / na as f64;
                        ca += v * ang.cos();
                        cb += v * ang.sin();
                    }
                    let norm = if q == 0 || q == half { 1.0 } else { 2.0 };
                    coef_a[q * nc + jc] = norm * ca / na as f64;
                    coef_b[q * nc + jc] = norm * cb / na as f64;
                }
            }
            // Differentiate each coefficient profile in ϑ through the
            // parity-split representation A(ϑ) = p(x)·u^par, u = sin ϑ:
            //   par 0:  A′ = −p′u,        A″ = p″u² − p′x,
            //   par 1:  A′ = −p′u² + p x, A″ = p″u³ − 3xp′u − pu.
            let diff_profile = |coef: &[f64], par: usize| -> (Vec<f64>, Vec<f64>) {
                let p: Vec<f64> = (0..nc)
                    .map(|jc| if par == 0 { coef[jc] } else { coef[jc] / us[jc] })
                    .collect();
                let px = apply_matrix(&dx, nc, &p);
                let pxx = apply_matrix(&dx, nc, &px);
                let mut d1 = vec![0.0; nc];
                let mut d2 = vec![0.0; nc];
                for jc in 0..nc {
                    let (x, u) = (xs[jc], us[jc]);
                    if par == 0 {
                        d1[jc] = -px[jc] * u;
                        d2[jc] = pxx[jc] * u * u - px[jc] * x;
                    } else {
                        d1[jc] = -px[jc] * u * u + p[jc] * x;
                        d2[jc] = pxx[jc] * u * u * u - 3.0 * x * px[jc] * u - p[jc] * u;
                    }
                }
                (d1, d2)
            };
            let mut psi_t = vec![0.0; n];
            let mut psi_p = vec![0.0; n];
            let mut psi_tt = vec![0.0; n];
            let mut psi_tp = vec![0.0; n];
            let mut psi_pp = vec![0.0; n];
            for q in 0..=half {
                let par = q % 2;
                let a_prof = &coef_a[q * nc..(q + 1) * nc];
                let b_prof = &coef_b[q * nc..(q + 1) * nc];
                let (a1, a2) = diff_profile(a_prof, par);
                let (b1, b2) = diff_profile(b_prof, par);
                let qq = q as f64;
                for jc in 0..nc {
                    for ja in 0..na {
                        let ang =
                            qq * 2.0 * std::f64::consts::PI * ja as f64 / na as f64;
                        let (cq, sq) = (ang.cos(), ang.sin());
                        let i = jc * na + ja;
                        psi_t[i] += a1[jc] * cq + b1[jc] * sq;
                        psi_tt[i] += a2[jc] * cq + b2[jc] * sq;
                        psi_p[i] += qq * (-a_prof[jc] * sq + b_prof[jc] * cq);
                        psi_tp[i] += qq * (-a1[jc] * sq + b1[jc] * cq);
                        psi_pp[i] -= qq * qq * (a_prof[jc] * cq + b_prof[jc] * sq);
                    }
                }
            }
            self.psi_t = psi_t;
            self.psi_p = psi_p;
            self.psi_tt = psi_tt;
            self.psi_tp = psi_tp;
            self.psi_pp = psi_pp;
        }
        Ok(())
    }

    fn detect_revolution(&self) -> bool {
        let (nc, na) = self.grid.shape();
        for jc in 0..nc {
            let base = self.psi[jc * na];
            for ja in 1..na {
                if (self.psi[jc * na + ja] - base).abs() > 1e-13 * (1.0 + base.abs()) {
                    return false;
                }
            }
        }
        true
    }

    fn validate_radii(&self) -> Result<()> {
        let (lo, hi) = (self.space.r_min(), self.space.r_max());
        for (i, &v) in self.psi.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { node: i, context: "graph radius".into() });
            }
            if v <= lo || v >= hi {
                return Err(Error::construction(format!(
                    "graph radius {v} at node {i} leaves the open domain ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }

    fn cross_check_circle_derivatives(&self) -> Result<()> {
        let n = self.grid.len();
        let d1 = periodic_diff1(n)?;
        let d2 = periodic_diff2(n)?;
        let num1 = apply_matrix(&d1, n, &self.psi);
        let num2 = apply_matrix(&d2, n, &self.psi);
        check_close("ψ_φ", &self.psi_p, &num1, 1e-5)?;
        check_close("ψ_φφ", &self.psi_pp, &num2, 1e-4)?;
        Ok(())
    }

    fn cross_check_sphere_derivatives(&self) -> Result<()> {
        let mut numeric = self.clone();
        numeric.differentiate_values()?;
        check_close("ψ_ϑ", &self.psi_t, &numeric.psi_t, 1e-5)?;
        check_close("ψ_φ", &self.psi_p, &numeric.psi_p, 1e-5)?;
        check_close("ψ_ϑϑ", &self.psi_tt, &numeric.psi_tt, 1e-4)?;
        check_close("ψ_ϑφ", &self.psi_tp, &numeric.psi_tp, 1e-4)?;
        check_close("ψ_φφ", &self.psi_pp, &numeric.psi_pp, 1e-4)?;
        Ok(())
    }

    // -- accessors ----------------------------------------------------------

    pub fn space(&self) -> &WarpedSpace {
        &self.space
    }

    pub fn grid(&self) -> &FiberGrid {
        &self.grid
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// True when ψ is azimuth-independent over a sphere fiber (or the graph
    /// is a slice), which unlocks the surface-of-revolution fast paths.
    pub fn is_revolution(&self) -> bool {
        self.revolution
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub(crate) fn psi_t(&self) -> &[f64] {
        &self.psi_t
    }

    pub(crate) fn psi_p(&self) -> &[f64] {
        &self.psi_p
    }

    pub(crate) fn psi_tt(&self) -> &[f64] {
        &self.psi_tt
    }

    pub(crate) fn psi_tp(&self) -> &[f64] {
        &self.psi_tp
    }

    pub(crate) fn psi_pp(&self) -> &[f64] {
        &self.psi_pp
    }

    /// Squared fiber gradient |∇_N ψ|²_{g_N} at node i.
    pub(crate) fn grad_norm2(&self, i: usize) -> f64 {
        let radius = self.grid.radius();
        if self.grid.is_circle() {
            let dp = self.psi_p[i];
            dp * dp / (radius * radius)
        } else {
            let NodeCoord::Sphere { colat, .. } = self.grid.node(i) else { unreachable!() };
            let dt = self.psi_t[i];
            let dp = self.psi_p[i];
            (dt * dt + dp * dp / (colat.sin().powi(2))) / (radius * radius)
        }
    }

    // -- geometry -----------------------------------------------------------

    /// Per-node frames: area element, tilt, support, |X^T|², warp values.
    pub fn frames(&self) -> Result<SurfaceFrames> {
        let (profile, fiber) = self.space.single_factor()?;
        let m = fiber.dimension() as f64;
        let n = self.len();
        let mut fr = SurfaceFrames {
            ds: vec![0.0; n],
            w: vec![0.0; n],
            support: vec![0.0; n],
            xt_norm2: vec![0.0; n],
            s: vec![0.0; n],
            s1: vec![0.0; n],
            s2: vec![0.0; n],
        };
        for i in 0..n {
            let (s, s1, s2) = profile.raw(self.psi[i]);
            let w = (1.0 + self.grad_norm2(i) / (s * s)).sqrt();
            fr.s[i] = s;
            fr.s1[i] = s1;
            fr.s2[i] = s2;
            fr.w[i] = w;
            fr.ds[i] = w * s.powf(m) * self.grid.weight(i);
            fr.support[i] = s / w;
            fr.xt_norm2[i] = s * s * (1.0 - 1.0 / (w * w));
            if !fr.ds[i].is_finite() {
                return Err(Error::NonFinite { node: i, context: "area element".into() });
            }
        }
        Ok(fr)
    }

    /// ∫_Σ f dS with f given per node.
    pub fn boundary_integral(&self, frames: &SurfaceFrames, f: impl Fn(usize) -> f64) -> f64 {
        stable_sum((0..self.len()).map(|i| f(i) * frames.ds[i]))
    }

    /// Boundary area |Σ|.
    pub fn area(&self) -> Result<f64> {
        let fr = self.frames()?;
        Ok(self.boundary_integral(&fr, |_| 1.0))
    }

    /// Enclosed (weighted) volume of Ω = {r < ψ}: Σ_i v(ψ_i)·w_i with
    /// v the (weighted) volume profile.
    pub fn enclosed_volume(&self, weight: Option<&RadialWeight>) -> Result<f64> {
        let v = self.space.volume_values(&self.psi, weight)?;
        Ok(stable_sum(
            (0..self.len()).map(|i| v[i] * self.grid.weight(i)),
        ))
    }

    // -- persistence ---------------------------------------------------------

    /// Plain-text export: header lines (`profile`, `fiber`, `resolution`,
    /// `label`) followed by one `index coords ψ` line per node.
    pub fn export(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let (profile, fiber) = self.space.single_factor()?;
        writeln!(out, "# star graph: radial graph over a warped product fiber")?;
        writeln!(out, "profile {}", profile.label())?;
        match fiber.realization() {
            crate::fiber::FiberRealization::CircleOfRadius(r) => {
                writeln!(out, "fiber circle {r:.17e}")?
            }
            crate::fiber::FiberRealization::RoundSphereOfRadius(r) => {
                writeln!(out, "fiber sphere {r:.17e}")?
            }
            crate::fiber::FiberRealization::Abstract => {
                return Err(Error::unsupported(
                    "cannot export a graph over an abstract fiber",
                ))
            }
        }
        let (nc, na) = self.grid.shape();
        if self.grid.is_circle() {
            writeln!(out, "resolution {nc}")?;
        } else {
            writeln!(out, "resolution {nc} {na}")?;
        }
        writeln!(out, "label {}", self.label)?;
        writeln!(out, "nodes {}", self.len())?;
        for i in 0..self.len() {
            match self.grid.node(i) {
                NodeCoord::Circle { phi } => {
                    writeln!(out, "{i} {phi:.17e} {:.17e}", self.psi[i])?
                }
                NodeCoord::Sphere { colat, azim } => {
                    writeln!(out, "{i} {colat:.17e} {azim:.17e} {:.17e}", self.psi[i])?
                }
            }
        }
        Ok(())
    }

    /// Import a graph exported by [`StarGraph::export`].  The profile is
    /// reconstructed by name, the fiber and grid from the header, and the
    /// derivatives by spectral differentiation of the node values.
    pub fn import(path: &Path) -> Result<StarGraph> {
        let file = std::fs::File::open(path)?;
        let mut profile_name = None;
        let mut fiber = None;
        let mut resolution = None;
        let mut label = String::from("imported");
        let mut values: Vec<(usize, f64)> = Vec::new();
        let mut nodes = None;
        for line in std::io::BufReader::new(file).lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap();
            match head {
                "profile" => {
                    profile_name = Some(parts.collect::<Vec<_>>().join(" "));
                }
                "fiber" => {
                    let kind = parts.next().ok_or_else(|| Error::Parse("fiber kind missing".into()))?;
                    let radius: f64 = parts
                        .next()
                        .ok_or_else(|| Error::Parse("fiber radius missing".into()))?
                        .parse()
                        .map_err(|_| Error::Parse("bad fiber radius".into()))?;
                    fiber = Some(match kind {
                        "circle" => crate::fiber::FiberSpec::circle(radius),
                        "sphere" => crate::fiber::FiberSpec::sphere(radius),
                        other => {
                            return Err(Error::Parse(format!("unknown fiber kind `{other}`")))
                        }
                    });
                }
                "resolution" => {
                    let a: usize = parts
                        .next()
                        .ok_or_else(|| Error::Parse("resolution missing".into()))?
                        .parse()
                        .map_err(|_| Error::Parse("bad resolution".into()))?;
                    resolution = Some(match parts.next() {
                        Some(b) => Resolution::Sphere(
                            a,
                            b.parse().map_err(|_| Error::Parse("bad resolution".into()))?,
                        ),
                        None => Resolution::Circle(a),
                    });
                }
                "label" => {
                    label = parts.collect::<Vec<_>>().join(" ");
                }
                "nodes" => {
                    nodes = Some(
                        parts
                            .next()
                            .ok_or_else(|| Error::Parse("node count missing".into()))?
                            .parse::<usize>()
                            .map_err(|_| Error::Parse("bad node count".into()))?,
                    );
                }
                _ => {
                    // Node line: index, 1-2 coordinates, ψ; ψ is last.
                    let idx: usize = head
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad node line `{line}`")))?;
                    let rest: Vec<f64> = parts
                        .map(|p| p.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::Parse(format!("bad node line `{line}`")))?;
                    let psi = *rest
                        .last()
                        .ok_or_else(|| Error::Parse(format!("bad node line `{line}`")))?;
                    values.push((idx, psi));
                }
            }
        }
        let profile_name =
            profile_name.ok_or_else(|| Error::Parse("missing `profile` header".into()))?;
        let fiber = fiber.ok_or_else(|| Error::Parse("missing `fiber` header".into()))?;
        let resolution =
            resolution.ok_or_else(|| Error::Parse("missing `resolution` header".into()))?;
        let profile = crate::profile::WarpProfile::by_name(&profile_name)?;
        let space = WarpedSpace::single(profile, fiber);
        let expect = nodes.unwrap_or(values.len());
        if values.len() != expect {
            return Err(Error::Parse(format!(
                "expected {expect} node lines, found {}",
                values.len()
            )));
        }
        let mut psi = vec![f64::NAN; values.len()];
        for (idx, v) in values {
            if idx >= psi.len() {
                return Err(Error::Parse(format!("node index {idx} out of range")));
            }
            psi[idx] = v;
        }
        StarGraph::from_values(&space, resolution, label, &psi)
    }
}

fn grid_for(space: &WarpedSpace, resolution: Resolution) -> Result<FiberGrid> {
    let (_, fiber) = space.single_factor()?;
    FiberGrid::new(fiber, resolution)
}

fn check_close(what: &str, analytic: &[f64], numeric: &[f64], rel: f64) -> Result<()> {
    let scale = analytic
        .iter()
        .chain(numeric.iter())
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    let tol = rel * (1.0 + scale);
    for (i, (a, b)) in analytic.iter().zip(numeric.iter()).enumerate() {
        let diff = (a - b).abs();
        if !diff.is_finite() || diff > tol {
            return Err(Error::construction(format!(
                "supplied {what} disagrees with spectral differentiation at node {i}: \
                 {a} vs {b} (tol {tol:.3e}); the closed-form derivative table is wrong"
            )));
        }
    }
    Ok(())
}
