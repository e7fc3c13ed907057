//! Named model spaces.
//!
//! These are the ambient spaces the experiments cycle through: space forms
//! written as warped products over round fibers, the exponential horn where
//! slices are optimal but not rigid, the sine product over a long circle
//! where slices fail, and the inward-cusp power profile used by the
//! large-annulus counterexample.

use crate::error::{Error, Result};
use crate::fiber::FiberSpec;
use crate::profile::WarpProfile;
use crate::space::WarpedSpace;

/// ℝⁿ as (0,∞) × S^{n−1}(1) with s(r) = r.  Supports n ∈ {2, 3, 4}.
pub fn euclidean(n: usize) -> Result<WarpedSpace> {
    let fiber = round_unit_fiber(n)?;
    Ok(WarpedSpace::single(WarpProfile::euclidean(), fiber).with_label(format!("euclidean{n}")))
}

/// ℍⁿ as (0,∞) × S^{n−1}(1) with s(r) = sinh r.
pub fn hyperbolic(n: usize) -> Result<WarpedSpace> {
    let fiber = round_unit_fiber(n)?;
    Ok(WarpedSpace::single(WarpProfile::hyperbolic(), fiber).with_label(format!("hyperbolic{n}")))
}

/// The open upper hemisphere of Sⁿ as [0, π/2) × S^{n−1}(1), s(r) = sin r.
pub fn hemisphere(n: usize) -> Result<WarpedSpace> {
    let fiber = round_unit_fiber(n)?;
    Ok(WarpedSpace::single(WarpProfile::hemisphere(), fiber).with_label(format!("hemisphere{n}")))
}

/// Full sine product [0, π) × S¹(radius): the sphere metric only when the
/// circle is unit; for radius > 1 slices lose optimality.
pub fn sine_circle(radius: f64) -> Result<WarpedSpace> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::range("sine_circle: radius must be positive and finite"));
    }
    Ok(
        WarpedSpace::single(WarpProfile::sine(), FiberSpec::circle(radius))
            .with_label(format!("sine-circle({radius})")),
    )
}

/// Exponential horn [0,∞) × S¹(1) with s(r) = eʳ: log-convexity margin ≡ 0.
pub fn exponential_horn() -> WarpedSpace {
    WarpedSpace::single(WarpProfile::exponential(), FiberSpec::circle(1.0))
        .with_label("exp-horn".to_string())
}

/// Power cusp [1,∞) × N with s(r) = r^alpha over an abstract fiber of
/// dimension m and unit volume.  alpha = −1/m makes the area coefficient
/// r⁻¹, the regime of the large-annulus counterexample.
pub fn power_cusp(alpha: f64, m: usize) -> Result<WarpedSpace> {
    if m == 0 {
        return Err(Error::range("power_cusp: fiber dimension must be ≥ 1"));
    }
    let fiber = FiberSpec::abstract_fiber(m, 1.0, None, None)?;
    Ok(WarpedSpace::single(WarpProfile::power(alpha)?, fiber)
        .with_label(format!("power({alpha},m={m})")))
}

fn round_unit_fiber(n: usize) -> Result<FiberSpec> {
    match n {
        2 => Ok(FiberSpec::circle(1.0)),
        3 => Ok(FiberSpec::sphere(1.0)),
        // S³(1): |S³| = 2π², λ₁ = 3, Ric = 2.
        4 => FiberSpec::abstract_fiber(3, 2.0 * std::f64::consts::PI.powi(2), Some(3.0), Some(2.0)),
        _ => Err(Error::unsupported(format!(
            "round unit fiber only provided for ambient dimension 2..=4, got {n}"
        ))),
    }
}

/// Parse a model name as used by the command line:
/// `euclidean2`, `euclidean3`, `euclidean4`, `hyperbolic2`, `hyperbolic3`,
/// `hemisphere2`, `hemisphere3`, `sine-circle(R)`, `exp-horn`,
/// `power(alpha,m)`.
pub fn model_by_name(name: &str) -> Result<WarpedSpace> {
    let name = name.trim();
    match name {
        "euclidean2" => return euclidean(2),
        "euclidean3" => return euclidean(3),
        "euclidean4" => return euclidean(4),
        "hyperbolic2" => return hyperbolic(2),
        "hyperbolic3" => return hyperbolic(3),
        "hemisphere2" => return hemisphere(2),
        "hemisphere3" => return hemisphere(3),
        "exp-horn" => return Ok(exponential_horn()),
        _ => {}
    }
    if let Some(args) = name.strip_prefix("sine-circle(").and_then(|s| s.strip_suffix(')')) {
        let radius: f64 = args
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad radius in `{name}`")))?;
        return sine_circle(radius);
    }
    if let Some(args) = name.strip_prefix("power(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!(
                "`{name}`: expected power(alpha,m) with two arguments"
            )));
        }
        let alpha: f64 = parts[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad alpha in `{name}`")))?;
        let m: usize = parts[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad fiber dimension in `{name}`")))?;
        return power_cusp(alpha, m);
    }
    Err(Error::Parse(format!("unknown model `{name}`")))
}
