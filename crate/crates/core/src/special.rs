//! Small special-function kit: Γ via a Lanczos approximation, the unit-ball
//! volume βₙ = π^{n/2} / Γ(n/2 + 1), and exact binomial coefficients.

use crate::error::{Error, Result};

/// Lanczos coefficients for g = 7, 9 terms (double-precision classic set).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for x > 0, accurate to about 13 significant digits.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate half-plane.
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEF[0];
        for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// Volume of the unit ball in ℝⁿ: βₙ = π^{n/2} / Γ(n/2 + 1).
pub fn unit_ball_volume(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::range("unit_ball_volume: dimension must be positive"));
    }
    let nf = n as f64;
    Ok(std::f64::consts::PI.powf(nf / 2.0) / gamma(nf / 2.0 + 1.0))
}

/// Binomial coefficient C(n, k) as an exact double (n small throughout).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}
