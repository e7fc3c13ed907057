//! Warping profiles s(r).
//!
//! A profile is a C² function s on a radial domain [r_min, r_max) — r_max may
//! be +∞ — with s > 0 on the open interior.  Every evaluation returns the
//! triple (s, s′, s″); all geometric quantities downstream (area coefficient,
//! curvature of slices, convexity margins) are built from these triples.
//!
//! The named catalog:
//!
//!   name          s(r)        domain          notes
//!   -----------   ---------   -------------   --------------------------
//!   euclidean     r           [0, ∞)          flat space in polar form
//!   hyperbolic    sinh r      [0, ∞)          constant curvature −1
//!   hemisphere    sin r       [0, π/2)        open upper hemisphere
//!   sine          sin r       [0, π)          full spherical profile
//!   exponential   eʳ          [0, ∞)          s never vanishes
//!   power(α)      r^α         [1, ∞)          cusp/horn-type ends
//!
//! Sampled profiles come from two-column (r, s) files and evaluate through a
//! not-a-knot cubic spline; their derivatives are the spline's own.
//! Constructors cross-check the reported s′ and s″ against centered finite
//! differences of s at interior sample points and refuse profiles that
//! disagree beyond 10⁻⁶ relative.

use crate::error::{Error, Result};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

/// Signature of a raw C² evaluator: r ↦ (s, s′, s″).
pub type ProfileFn = Arc<dyn Fn(f64) -> (f64, f64, f64) + Send + Sync>;

#[derive(Clone)]
enum ProfileKind {
    Euclidean,
    Hyperbolic,
    /// sin r truncated at the stored r_max (π/2 for hemisphere, π for sine).
    Sine,
    Exponential,
    Power(f64),
    Spline(CubicSpline),
    Custom(ProfileFn),
}

impl fmt::Debug for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileKind::Euclidean => write!(f, "Euclidean"),
            ProfileKind::Hyperbolic => write!(f, "Hyperbolic"),
            ProfileKind::Sine => write!(f, "Sine"),
            ProfileKind::Exponential => write!(f, "Exponential"),
            ProfileKind::Power(a) => write!(f, "Power({a})"),
            ProfileKind::Spline(s) => write!(f, "Spline({} knots)", s.x.len()),
            ProfileKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A warping profile with its domain and the s(r_min) = 0 flag.
#[derive(Debug, Clone)]
pub struct WarpProfile {
    label: String,
    kind: ProfileKind,
    r_min: f64,
    r_max: f64,
    vanishing_at_zero: bool,
}

impl WarpProfile {
    /// s = r on [0, ∞).
    pub fn euclidean() -> WarpProfile {
        WarpProfile {
            label: "euclidean".into(),
            kind: ProfileKind::Euclidean,
            r_min: 0.0,
            r_max: f64::INFINITY,
            vanishing_at_zero: true,
        }
    }

    /// s = sinh r on [0, ∞).
    pub fn hyperbolic() -> WarpProfile {
        WarpProfile {
            label: "hyperbolic".into(),
            kind: ProfileKind::Hyperbolic,
            r_min: 0.0,
            r_max: f64::INFINITY,
            vanishing_at_zero: true,
        }
    }

    /// s = sin r on [0, π/2): the open hemisphere.
    pub fn hemisphere() -> WarpProfile {
        WarpProfile {
            label: "hemisphere".into(),
            kind: ProfileKind::Sine,
            r_min: 0.0,
            r_max: std::f64::consts::FRAC_PI_2,
            vanishing_at_zero: true,
        }
    }

    /// s = sin r on [0, π): the full spherical profile, needed by slice
    /// stability studies that probe past the equator.
    pub fn sine() -> WarpProfile {
        WarpProfile {
            label: "sine".into(),
            kind: ProfileKind::Sine,
            r_min: 0.0,
            r_max: std::f64::consts::PI,
            vanishing_at_zero: true,
        }
    }

    /// s = eʳ on [0, ∞); the borderline log-convex profile.
    pub fn exponential() -> WarpProfile {
        WarpProfile {
            label: "exponential".into(),
            kind: ProfileKind::Exponential,
            r_min: 0.0,
            r_max: f64::INFINITY,
            vanishing_at_zero: false,
        }
    }

    /// s = r^α on [1, ∞).  Negative α gives the cusp ends used by the area
    /// counterexamples.
    pub fn power(alpha: f64) -> Result<WarpProfile> {
        if !alpha.is_finite() || alpha == 0.0 {
            return Err(Error::range("power profile: exponent must be finite and nonzero"));
        }
        Ok(WarpProfile {
            label: format!("power({alpha})"),
            kind: ProfileKind::Power(alpha),
            r_min: 1.0,
            r_max: f64::INFINITY,
            vanishing_at_zero: false,
        })
    }

    /// User-supplied C² evaluator.  The triple is validated against finite
    /// differences on interior samples (a finite probe window is required
    /// when r_max = ∞, so validation probes [r_min, r_min + 4] in that case).
    pub fn custom(
        label: impl Into<String>,
        f: ProfileFn,
        r_min: f64,
        r_max: f64,
        vanishing_at_zero: bool,
    ) -> Result<WarpProfile> {
        if !(r_min.is_finite() && r_min >= 0.0 && r_max > r_min) {
            return Err(Error::construction("custom profile: bad domain"));
        }
        let p = WarpProfile {
            label: label.into(),
            kind: ProfileKind::Custom(f),
            r_min,
            r_max,
            vanishing_at_zero,
        };
        p.validate_derivatives()?;
        Ok(p)
    }

    /// Not-a-knot cubic spline through two-column samples (r ascending).
    pub fn from_samples(label: impl Into<String>, r: &[f64], s: &[f64]) -> Result<WarpProfile> {
        let spline = CubicSpline::new(r, s)?;
        let r_min = r[0];
        let r_max = *r.last().unwrap();
        let vanishing = r_min.abs() <= 1e-12 && s[0].abs() <= 1e-9 * (1.0 + s_scale(s));
        for (i, v) in s.iter().enumerate() {
            if i > 0 && *v <= 0.0 {
                return Err(Error::construction(format!(
                    "sampled profile: s must be positive away from r = 0 (sample {i})"
                )));
            }
        }
        let p = WarpProfile {
            label: label.into(),
            kind: ProfileKind::Spline(spline),
            r_min,
            r_max,
            vanishing_at_zero: vanishing,
        };
        p.validate_derivatives()?;
        Ok(p)
    }

    /// Load a sampled profile from a whitespace-separated two-column file;
    /// `#` starts a comment.
    pub fn from_spline_file(path: &Path) -> Result<WarpProfile> {
        let text = std::fs::read_to_string(path)?;
        let mut rs = Vec::new();
        let mut ss = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (r, s) = match (it.next(), it.next()) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Parse(format!(
                        "profile file line {}: need two columns",
                        lineno + 1
                    )))
                }
            };
            let r: f64 = r
                .parse()
                .map_err(|_| Error::Parse(format!("profile file line {}: bad r", lineno + 1)))?;
            let s: f64 = s
                .parse()
                .map_err(|_| Error::Parse(format!("profile file line {}: bad s", lineno + 1)))?;
            rs.push(r);
            ss.push(s);
        }
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "spline".into());
        WarpProfile::from_samples(format!("custom-spline({name})"), &rs, &ss)
    }

    /// Catalog lookup: `euclidean`, `hyperbolic`, `hemisphere`, `sine`,
    /// `exponential`, `power(α)`, `custom-spline(path)`.
    pub fn by_name(name: &str) -> Result<WarpProfile> {
        let name = name.trim();
        match name {
            "euclidean" => return Ok(WarpProfile::euclidean()),
            "hyperbolic" => return Ok(WarpProfile::hyperbolic()),
            "hemisphere" => return Ok(WarpProfile::hemisphere()),
            "sine" => return Ok(WarpProfile::sine()),
            "exponential" => return Ok(WarpProfile::exponential()),
            _ => {}
        }
        if let Some(arg) = name.strip_prefix("power(").and_then(|s| s.strip_suffix(")")) {
            let alpha: f64 = arg
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("power profile: bad exponent {arg:?}")))?;
            return WarpProfile::power(alpha);
        }
        if let Some(arg) = name.strip_prefix("custom-spline(").and_then(|s| s.strip_suffix(")")) {
            return WarpProfile::from_spline_file(Path::new(arg.trim()));
        }
        Err(Error::Parse(format!("unknown profile {name:?}")))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn vanishing_at_zero(&self) -> bool {
        self.vanishing_at_zero
    }

    /// (s, s′, s″) at r, rejecting r outside [r_min, r_max).
    pub fn eval(&self, r: f64) -> Result<(f64, f64, f64)> {
        if !r.is_finite() || r < self.r_min || r >= self.r_max {
            return Err(Error::Domain {
                what: "profile evaluation",
                r,
                lo: self.r_min,
                hi: self.r_max,
            });
        }
        Ok(self.raw(r))
    }

    /// Evaluation without the domain check; callers must have validated the
    /// range (the integrators do exactly this once per interval).
    pub(crate) fn raw(&self, r: f64) -> (f64, f64, f64) {
        match &self.kind {
            ProfileKind::Euclidean => (r, 1.0, 0.0),
            ProfileKind::Hyperbolic => (r.sinh(), r.cosh(), r.sinh()),
            ProfileKind::Sine => (r.sin(), r.cos(), -r.sin()),
            ProfileKind::Exponential => {
                let e = r.exp();
                (e, e, e)
            }
            ProfileKind::Power(a) => {
                let s = r.powf(*a);
                (s, a * s / r, a * (a - 1.0) * s / (r * r))
            }
            ProfileKind::Spline(sp) => sp.eval(r),
            ProfileKind::Custom(f) => f(r),
        }
    }

    /// Cross-check the reported derivatives against centered differences of
    /// s on interior probe points; 10⁻⁶ relative agreement is required.
    fn validate_derivatives(&self) -> Result<()> {
        let lo = self.r_min;
        let hi = if self.r_max.is_finite() { self.r_max } else { self.r_min + 4.0 };
        let span = hi - lo;
        let samples = 17;
        for i in 1..samples {
            let r = lo + span * i as f64 / samples as f64;
            let scale = 1.0_f64.max(r.abs());
            let h1 = 1e-5 * scale;
            let h2 = 1e-4 * scale;
            if r - h2 <= lo || r + h2 >= hi {
                continue;
            }
            let (s0, d1, d2) = self.raw(r);
            if !(s0.is_finite() && d1.is_finite() && d2.is_finite()) {
                return Err(Error::construction(format!(
                    "profile {}: non-finite value at r = {r}",
                    self.label
                )));
            }
            let fd1 = (self.raw(r + h1).0 - self.raw(r - h1).0) / (2.0 * h1);
            let fd2 = (self.raw(r + h2).0 - 2.0 * s0 + self.raw(r - h2).0) / (h2 * h2);
            let tol1 = 1e-6 * (1.0 + d1.abs().max(s0.abs()));
            // The second difference carries ~h² truncation plus roundoff
            // amplified by h⁻²; 5·10⁻⁵ relative headroom keeps the check
            // meaningful without flagging honest C² data.
            let tol2 = 5e-5 * (1.0 + d2.abs().max(s0.abs()));
            if (fd1 - d1).abs() > tol1 {
                return Err(Error::construction(format!(
                    "profile {}: s′ disagrees with finite differences at r = {r} \
                     (reported {d1}, measured {fd1})",
                    self.label
                )));
            }
            if (fd2 - d2).abs() > tol2 {
                return Err(Error::construction(format!(
                    "profile {}: s″ disagrees with finite differences at r = {r} \
                     (reported {d2}, measured {fd2})",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

fn s_scale(s: &[f64]) -> f64 {
    s.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

// ---------------------------------------------------------------------------
// Not-a-knot cubic spline
// ---------------------------------------------------------------------------

/// Cubic spline through (x_i, y_i) with not-a-knot end conditions, stored by
/// its knot second derivatives M_i.
#[derive(Debug, Clone)]
struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    fn new(x: &[f64], y: &[f64]) -> Result<CubicSpline> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::construction("spline: column lengths differ"));
        }
        if n < 4 {
            return Err(Error::construction("spline: need at least 4 samples"));
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::construction("spline: abscissae must strictly increase"));
            }
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();

        // Interior continuity rows for M_1 .. M_{n-2}:
        //   (h_{i-1}/6) M_{i-1} + ((h_{i-1}+h_i)/3) M_i + (h_i/6) M_{i+1}
        //     = (y_{i+1}-y_i)/h_i - (y_i-y_{i-1})/h_{i-1}.
        // Not-a-knot ties M_0 to (M_1, M_2) and M_{n-1} to (M_{n-2}, M_{n-3}):
        //   M_0 = M_1 + (h_0/h_1)(M_1 - M_2),
        //   M_{n-1} = M_{n-2} + (h_{n-2}/h_{n-3})(M_{n-2} - M_{n-3}).
        let k = n - 2; // unknowns M_1..M_{n-2}
        let mut sub = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut sup = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for i in 1..=n - 2 {
            let j = i - 1;
            let hl = h[i - 1];
            let hr = h[i];
            sub[j] = hl / 6.0;
            diag[j] = (hl + hr) / 3.0;
            sup[j] = hr / 6.0;
            rhs[j] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
        }
        // Fold the end conditions into the first and last rows.
        {
            // Row for i = 1 references M_0 = (1 + h0/h1) M_1 − (h0/h1) M_2.
            let c = h[0] / h[1];
            diag[0] += sub[0] * (1.0 + c);
            sup[0] += sub[0] * (-c);
            sub[0] = 0.0;
        }
        {
            // Row for i = n-2 references M_{n-1}.
            let c = h[n - 2] / h[n - 3];
            let j = k - 1;
            diag[j] += sup[j] * (1.0 + c);
            sub[j] += sup[j] * (-c);
            sup[j] = 0.0;
        }
        let inner = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
        let mut m = vec![0.0; n];
        m[1..=(n - 2)].copy_from_slice(&inner);
        let c0 = h[0] / h[1];
        m[0] = m[1] + c0 * (m[1] - m[2]);
        let cn = h[n - 2] / h[n - 3];
        m[n - 1] = m[n - 2] + cn * (m[n - 2] - m[n - 3]);
        Ok(CubicSpline { x: x.to_vec(), y: y.to_vec(), m })
    }

    fn eval(&self, r: f64) -> (f64, f64, f64) {
        let n = self.x.len();
        // Binary search for the panel containing r.
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.x[mid] <= r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.x[hi] - self.x[lo];
        let a = (self.x[hi] - r) / h;
        let b = (r - self.x[lo]) / h;
        let (ml, mr) = (self.m[lo], self.m[hi]);
        let (yl, yr) = (self.y[lo], self.y[hi]);
        let s = a * yl
            + b * yr
            + ((a * a * a - a) * ml + (b * b * b - b) * mr) * h * h / 6.0;
        let d1 = (yr - yl) / h + ((3.0 * b * b - 1.0) * mr - (3.0 * a * a - 1.0) * ml) * h / 6.0;
        let d2 = a * ml + b * mr;
        (s, d1, d2)
    }
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return Err(Error::construction("tridiagonal solve: zero pivot"));
    }
    c[0] = sup[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - sub[i] * c[i - 1];
        if denom == 0.0 {
            return Err(Error::construction("tridiagonal solve: zero pivot"));
        }
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn catalog_triples_match_closed_forms() {
        let cases: Vec<(WarpProfile, f64, (f64, f64, f64))> = vec![
            (WarpProfile::euclidean(), 1.0, (1.0, 1.0, 0.0)),
            (WarpProfile::hyperbolic(), 0.5, (0.5_f64.sinh(), 0.5_f64.cosh(), 0.5_f64.sinh())),
            (WarpProfile::sine(), 1.5, (1.5_f64.sin(), 1.5_f64.cos(), -(1.5_f64.sin()))),
            (WarpProfile::exponential(), 0.3, (0.3_f64.exp(), 0.3_f64.exp(), 0.3_f64.exp())),
        ];
        for (p, r, want) in cases {
            let got = p.eval(r).unwrap();
            assert_relative_eq!(got.0, want.0, max_relative = 1e-14);
            assert_relative_eq!(got.1, want.1, max_relative = 1e-14);
            assert_relative_eq!(got.2, want.2, max_relative = 1e-14);
        }
        let p = WarpProfile::power(-1.0).unwrap();
        let got = p.eval(2.0).unwrap();
        assert_relative_eq!(got.0, 0.5, max_relative = 1e-14);
        assert_relative_eq!(got.1, -0.25, max_relative = 1e-14);
        assert_relative_eq!(got.2, 0.25, max_relative = 1e-14);
    }

    #[test]
    fn domain_bounds_are_enforced() {
        assert!(WarpProfile::euclidean().eval(-0.1).is_err());
        assert!(WarpProfile::hemisphere().eval(1.6).is_err());
        assert!(WarpProfile::sine().eval(1.6).is_ok());
        assert!(WarpProfile::power(-1.0).unwrap().eval(0.5).is_err());
    }

    #[test]
    fn catalog_lookup_parses_parameterized_names() {
        assert_eq!(WarpProfile::by_name("hyperbolic").unwrap().label(), "hyperbolic");
        let p = WarpProfile::by_name("power(-0.5)").unwrap();
        assert_eq!(p.label(), "power(-0.5)");
        assert!(WarpProfile::by_name("lemniscate").is_err());
    }

    #[test]
    fn spline_profiles_track_smooth_data() {
        let r: Vec<f64> = (0..=80).map(|i| i as f64 * 0.025).collect();
        let s: Vec<f64> = r.iter().map(|x| x.sinh()).collect();
        let p = WarpProfile::from_samples("sampled-sinh", &r, &s).unwrap();
        assert!(p.vanishing_at_zero());
        for &x in &[0.31, 0.77, 1.05, 1.63] {
            let (v, d1, d2) = p.eval(x).unwrap();
            assert_relative_eq!(v, x.sinh(), max_relative = 1e-6);
            assert_relative_eq!(d1, x.cosh(), max_relative = 1e-4);
            assert_relative_eq!(d2, x.sinh(), max_relative = 5e-3);
        }
    }

    #[test]
    fn inconsistent_custom_derivatives_are_rejected() {
        // Claims s′ = 1 while s = r²: must fail the finite-difference check.
        let f: ProfileFn = Arc::new(|r| (r * r, 1.0, 2.0));
        let err = WarpProfile::custom("broken", f, 0.0, 4.0, true);
        assert!(err.is_err());
    }
}
