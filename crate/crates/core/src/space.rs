//! The ambient warped product space.
//!
//! A space is a base interval [r_min, r_max) carrying one or more warped
//! factors (s_q, N_q); the metric is dr² + Σ_q s_q(r)² g_{N_q}.  With
//! m = Σ dim N_q and n = m + 1 the radial functions of interest are
//!
//!   A(r) = ∏ s_q(r)^{m_q}          area coefficient,
//!   v(r) = ∫_{r_min}^r A(t) dt      volume profile per unit fiber volume,
//!   ṽ(r) = ∫_{r_min}^r c(t) A(t) dt weighted volume profile,
//!
//! together with their inverses and the two convexity margins that decide
//! whether centered slices solve the (weighted) isoperimetric problem:
//!
//!   log-convexity margin   s s″ − s′²   (slices optimal when ≥ 0),
//!   weighted margin        s² b″ + m s s′ b′ − m b (s′² − s s″)
//!                          (certifies convexity of b(V⁻¹)·A(V⁻¹)).
//!
//! Multi-factor spaces expose only the radial quantities; classification and
//! the margin functions require a single factor.

use crate::error::{Error, Result};
use crate::fiber::FiberSpec;
use crate::profile::WarpProfile;
use crate::quad::integrate_radial;
use crate::weights::{RadialWeight, WeightPair};
use serde::Serialize;

/// Quadrature tolerance used for the internal volume integrals; tighter than
/// the public guarantees so inversion round-trips stay at 1e-10 or better.
const VOLUME_TOL: f64 = 1e-13;

/// Absolute tolerance scale for volume inversion: |v(r) − u| ≤ 1e-12·(1+|u|).
const INVERT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct WarpedSpace {
    label: String,
    factors: Vec<(WarpProfile, FiberSpec)>,
    r_min: f64,
    r_max: f64,
}

impl WarpedSpace {
    /// Single-factor space.
    pub fn single(profile: WarpProfile, fiber: FiberSpec) -> WarpedSpace {
        let label = format!("{}x{}", profile.label(), fiber.label());
        let (r_min, r_max) = (profile.r_min(), profile.r_max());
        WarpedSpace { label, factors: vec![(profile, fiber)], r_min, r_max }
    }

    /// Multiply warped space.  All profiles must share the same r_min; the
    /// working domain ends at the smallest r_max.
    pub fn multi(factors: Vec<(WarpProfile, FiberSpec)>) -> Result<WarpedSpace> {
        if factors.is_empty() {
            return Err(Error::construction("warped space needs at least one factor"));
        }
        let r_min = factors[0].0.r_min();
        for (p, _) in &factors {
            if (p.r_min() - r_min).abs() > 0.0 {
                return Err(Error::construction(
                    "all factor profiles must share the same domain start",
                ));
            }
        }
        let r_max = factors.iter().map(|(p, _)| p.r_max()).fold(f64::INFINITY, f64::min);
        let label = factors
            .iter()
            .map(|(p, f)| format!("{}x{}", p.label(), f.label()))
            .collect::<Vec<_>>()
            .join(" * ");
        Ok(WarpedSpace { label, factors, r_min, r_max })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> WarpedSpace {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn factors(&self) -> &[(WarpProfile, FiberSpec)] {
        &self.factors
    }

    /// The unique factor, or an error for multiply warped spaces.
    pub fn single_factor(&self) -> Result<(&WarpProfile, &FiberSpec)> {
        if self.factors.len() == 1 {
            Ok((&self.factors[0].0, &self.factors[0].1))
        } else {
            Err(Error::unsupported(
                "this operation requires a single warped factor",
            ))
        }
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Total fiber dimension m.
    pub fn fiber_dimension(&self) -> usize {
        self.factors.iter().map(|(_, f)| f.dimension()).sum()
    }

    /// Ambient dimension n = m + 1.
    pub fn dimension(&self) -> usize {
        self.fiber_dimension() + 1
    }

    /// |N| = ∏ |N_q|.
    pub fn fiber_volume(&self) -> f64 {
        self.factors.iter().map(|(_, f)| f.total_volume()).product()
    }

    fn check_radius(&self, what: &'static str, r: f64) -> Result<()> {
        if !r.is_finite() || r < self.r_min || r >= self.r_max {
            return Err(Error::Domain { what, r, lo: self.r_min, hi: self.r_max });
        }
        Ok(())
    }

    /// A(r) = ∏ s_q(r)^{m_q}.
    pub fn area_coefficient(&self, r: f64) -> Result<f64> {
        self.check_radius("area coefficient", r)?;
        Ok(self.area_raw(r))
    }

    pub(crate) fn area_raw(&self, r: f64) -> f64 {
        self.factors
            .iter()
            .map(|(p, f)| p.raw(r).0.powi(f.dimension() as i32))
            .product()
    }

    /// (A, A′, A″) for a single-factor space.
    pub(crate) fn area_triple(&self, r: f64) -> Result<(f64, f64, f64)> {
        let (p, f) = self.single_factor()?;
        let m = f.dimension() as f64;
        let (s, d1, d2) = p.raw(r);
        let a = s.powf(m);
        let a1 = m * s.powf(m - 1.0) * d1;
        let a2 = m * (m - 1.0) * s.powf(m - 2.0) * d1 * d1 + m * s.powf(m - 1.0) * d2;
        Ok((a, a1, a2))
    }

    /// v(r) = ∫_{r_min}^r A dt, or ṽ with the weight c.
    pub fn volume_profile(&self, r: f64, weight: Option<&RadialWeight>) -> Result<f64> {
        self.check_radius("volume profile", r)?;
        let f = |t: f64| {
            let a = self.area_raw(t);
            match weight {
                Some(c) => c.value(t) * a,
                None => a,
            }
        };
        integrate_radial(f, self.r_min, r, VOLUME_TOL)
    }

    /// V(r) = |N| · v(r) (or the weighted version).
    pub fn total_volume(&self, r: f64, weight: Option<&RadialWeight>) -> Result<f64> {
        Ok(self.fiber_volume() * self.volume_profile(r, weight)?)
    }

    /// v at many radii, evaluated cumulatively over the sorted values so a
    /// whole grid costs one sweep instead of one integral per node.
    pub fn volume_values(&self, radii: &[f64], weight: Option<&RadialWeight>) -> Result<Vec<f64>> {
        let mut order: Vec<usize> = (0..radii.len()).collect();
        order.sort_by(|&i, &j| radii[i].total_cmp(&radii[j]));
        let mut out = vec![0.0; radii.len()];
        let mut prev_r = self.r_min;
        let mut acc = 0.0;
        let f = |t: f64| {
            let a = self.area_raw(t);
            match weight {
                Some(c) => c.value(t) * a,
                None => a,
            }
        };
        for &idx in &order {
            let r = radii[idx];
            self.check_radius("volume profile", r)?;
            if r > prev_r {
                acc += integrate_radial(f, prev_r, r, VOLUME_TOL)?;
                prev_r = r;
            }
            out[idx] = acc;
        }
        Ok(out)
    }

    /// Solve v(r) = u (weighted when c is given) for r.  The residual in
    /// volume terms is brought below 1e-12·(1 + |u|).
    pub fn invert_volume(&self, u: f64, weight: Option<&RadialWeight>) -> Result<f64> {
        if !u.is_finite() || u < 0.0 {
            return Err(Error::range("invert_volume: target must be finite and ≥ 0"));
        }
        if u == 0.0 {
            return Ok(self.r_min);
        }
        // Bracket the root.
        let mut hi = if self.r_max.is_finite() {
            // Stay strictly inside the open end.
            self.r_max - 1e-12 * (1.0 + self.r_max.abs())
        } else {
            let mut guess = self.r_min + 1.0;
            let mut grow = 0;
            while self.volume_profile(guess, weight)? < u {
                guess = self.r_min + (guess - self.r_min) * 2.0;
                grow += 1;
                if grow > 60 {
                    return Err(Error::range(
                        "invert_volume: target exceeds any reachable volume",
                    ));
                }
            }
            guess
        };
        let mut lo = self.r_min;
        let v_hi = self.volume_profile(hi, weight)?;
        if v_hi < u {
            return Err(Error::range(format!(
                "invert_volume: target {u} exceeds the volume {v_hi} at the domain end"
            )));
        }
        // Safeguarded Newton: v′ = c·A > 0 in the interior.
        let tol = INVERT_TOL * (1.0 + u.abs());
        let mut r = 0.5 * (lo + hi);
        for _ in 0..200 {
            let v = self.volume_profile(r, weight)?;
            let resid = v - u;
            if resid.abs() <= tol {
                return Ok(r);
            }
            if resid > 0.0 {
                hi = r;
            } else {
                lo = r;
            }
            let slope = {
                let a = self.area_raw(r);
                match weight {
                    Some(c) => c.value(r) * a,
                    None => a,
                }
            };
            let step = if slope > 0.0 { r - resid / slope } else { f64::NAN };
            r = if step.is_finite() && step > lo && step < hi {
                step
            } else {
                0.5 * (lo + hi)
            };
        }
        Err(Error::Numeric {
            what: "invert_volume".into(),
            achieved: (self.volume_profile(r, weight)? - u).abs(),
            requested: tol,
        })
    }

    /// A(v⁻¹(u)): the boundary area of the centered ball enclosing volume
    /// u·|N|, expressed in the volume gauge.  Its convexity in u is exactly
    /// the log-convexity condition on s.
    pub fn area_of_volume(&self, u: f64) -> Result<f64> {
        let r = self.invert_volume(u, None)?;
        self.area_coefficient(r)
    }

    /// s s″ − s′² at r; slices are isoperimetric-optimal where this is ≥ 0.
    pub fn log_convexity_margin(&self, r: f64) -> Result<f64> {
        let (p, _) = self.single_factor()?;
        self.check_radius("log-convexity margin", r)?;
        let (s, d1, d2) = p.raw(r);
        Ok(s * d2 - d1 * d1)
    }

    /// s² b″ + m s s′ b′ − m b (s′² − s s″) with b = a − a(0): the second
    /// derivative (up to the positive factor s^{2m−2}/(A′)²-type terms) of
    /// b(V⁻¹)·A(V⁻¹), so nonnegativity certifies its convexity.
    pub fn weighted_convexity_margin(&self, weights: &WeightPair, r: f64) -> Result<f64> {
        let (p, f) = self.single_factor()?;
        self.check_radius("weighted convexity margin", r)?;
        let m = f.dimension() as f64;
        let (s, d1, d2) = p.raw(r);
        let (b, b1, b2) = weights.b_eval(r);
        Ok(s * s * b2 + m * s * d1 * b1 - m * b * (d1 * d1 - s * d2))
    }

    /// Convexity margin for ψ(V⁻¹) with ψ = a·A under the weighted volume
    /// gauge ṽ′ = c·A: the numerator of d/dr [ψ′/(cA)], which has the sign
    /// of d²ψ(ṽ⁻¹)/du².  Reduces to s^{2m−2}·weighted_convexity_margin when
    /// c ≡ 1 and a(0) = 0.
    pub fn weighted_volume_convexity_margin(
        &self,
        weights: &WeightPair,
        r: f64,
    ) -> Result<f64> {
        self.check_radius("weighted-volume convexity margin", r)?;
        let (a, a1, a2) = {
            let (w, d1, d2) = weights.a().eval(r);
            (w - weights.a_at_origin(), d1, d2)
        };
        let (big_a, big_a1, big_a2) = self.area_triple(r)?;
        let (c, c1, _) = weights.c().eval(r);
        let psi1 = a1 * big_a + a * big_a1;
        let psi2 = a2 * big_a + 2.0 * a1 * big_a1 + a * big_a2;
        let ca = c * big_a;
        let ca1 = c1 * big_a + c * big_a1;
        Ok(psi2 * ca - psi1 * ca1)
    }

    /// Ric(∂r, ∂r) = −Σ m_q s_q″ / s_q.
    pub fn ricci_radial(&self, r: f64) -> Result<f64> {
        self.check_radius("radial Ricci", r)?;
        let mut acc = 0.0;
        for (p, f) in &self.factors {
            let (s, _, d2) = p.raw(r);
            acc -= f.dimension() as f64 * d2 / s;
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// Regime classification
// ---------------------------------------------------------------------------

/// Where the space sits in the slice-optimality trichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// s′² − s s″ ≤ 0 everywhere: centered slices minimize boundary area.
    SlicesIsoperimetric,
    /// 0 ≤ s′² − s s″ ≤ K with Ric_N ≥ (m−1)K: slices remain isoperimetric.
    GlwRegime,
    /// s′² − s s″ > K with λ₁(g_N) ≤ mK: slices are unstable, hence not
    /// isoperimetric.
    SlicesNotIsoperimetric,
    /// None of the three certificates applies on the sampled window.
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    /// min and max of s′² − s s″ over the sampled window.
    pub margin_min: f64,
    pub margin_max: f64,
    pub samples: usize,
    pub window: (f64, f64),
    pub monotone_nondecreasing: bool,
    pub vanishing_at_zero: bool,
    pub k_used: Option<f64>,
    pub fiber_lambda1: Option<f64>,
    pub explanation: String,
}

impl WarpedSpace {
    /// Classify the trichotomy over [r_min, r_hi] by dense sampling of
    /// s′² − s s″ (4096 interior points).  K is the comparison curvature; it
    /// is required for the two curvature-gated regimes.
    pub fn classify_regime(&self, r_hi: f64, k: Option<f64>) -> Result<RegimeReport> {
        let (p, fiber) = self.single_factor()?;
        if !(r_hi > self.r_min) || r_hi >= self.r_max {
            return Err(Error::range(
                "classify_regime: working radius must lie inside the domain",
            ));
        }
        let samples = 4096usize;
        let mut margin_min = f64::INFINITY;
        let mut margin_max = f64::NEG_INFINITY;
        let mut monotone = true;
        for i in 1..=samples {
            let r = self.r_min + (r_hi - self.r_min) * i as f64 / (samples as f64 + 1.0);
            let (s, d1, d2) = p.raw(r);
            let m = d1 * d1 - s * d2;
            margin_min = margin_min.min(m);
            margin_max = margin_max.max(m);
            if d1 < -1e-12 * (1.0 + d1.abs()) {
                monotone = false;
            }
        }
        let tol = 1e-9 * (1.0 + margin_max.abs().max(margin_min.abs()));
        let m = fiber.dimension() as f64;
        let lambda1 = fiber.lambda1();

        let (regime, explanation) = if margin_max <= tol {
            (
                Regime::SlicesIsoperimetric,
                format!(
                    "s'^2 - s s'' <= 0 on the window (max {margin_max:.3e}); \
                     the area profile is convex in the volume gauge"
                ),
            )
        } else if let Some(k) = k {
            // The bounded-margin regime needs Ric_N ≥ (m−1)K on the fiber.
            let ricci_ok = fiber.ricci_at_least((m - 1.0) * k);
            if margin_min >= -tol && margin_max <= k + tol && ricci_ok == Some(true) {
                (
                    Regime::GlwRegime,
                    format!(
                        "0 <= s'^2 - s s'' <= K = {k} with Ric_N >= (m-1)K; \
                         slices stay isoperimetric"
                    ),
                )
            } else if margin_min > k + tol {
                match lambda1 {
                    Some(l1) if l1 <= m * k + tol => (
                        Regime::SlicesNotIsoperimetric,
                        format!(
                            "s'^2 - s s'' > K = {k} everywhere and lambda_1 = {l1} <= mK = {}; \
                             slices are unstable",
                            m * k
                        ),
                    ),
                    Some(l1) => (
                        Regime::Indeterminate,
                        format!(
                            "margin exceeds K = {k} but lambda_1 = {l1} > mK = {}; \
                             no certificate applies",
                            m * k
                        ),
                    ),
                    None => (
                        Regime::Indeterminate,
                        "margin exceeds K but the fiber's lambda_1 is unknown".into(),
                    ),
                }
            } else {
                (
                    Regime::Indeterminate,
                    format!(
                        "margin range [{margin_min:.3e}, {margin_max:.3e}] straddles \
                         the K = {k} gate or the Ricci bound fails"
                    ),
                )
            }
        } else {
            (
                Regime::Indeterminate,
                "positive margin present and no comparison curvature K supplied".into(),
            )
        };

        Ok(RegimeReport {
            regime,
            margin_min,
            margin_max,
            samples,
            window: (self.r_min, r_hi),
            monotone_nondecreasing: monotone,
            vanishing_at_zero: p.vanishing_at_zero(),
            k_used: k,
            fiber_lambda1: lambda1,
            explanation,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn r3() -> WarpedSpace {
        WarpedSpace::single(WarpProfile::euclidean(), FiberSpec::sphere(1.0))
    }

    fn h2() -> WarpedSpace {
        WarpedSpace::single(WarpProfile::hyperbolic(), FiberSpec::circle(1.0))
    }

    #[test]
    fn area_coefficient_closed_forms() {
        let s = WarpedSpace::single(WarpProfile::hyperbolic(), FiberSpec::sphere(1.0));
        assert_relative_eq!(
            s.area_coefficient(1.0).unwrap(),
            1.0_f64.sinh().powi(2),
            max_relative = 1e-13
        );
        let multi = WarpedSpace::multi(vec![
            (WarpProfile::euclidean(), FiberSpec::circle(1.0)),
            (
                WarpProfile::exponential(),
                FiberSpec::abstract_fiber(2, 1.0, None, None).unwrap(),
            ),
        ])
        .unwrap();
        assert_relative_eq!(
            multi.area_coefficient(1.0).unwrap(),
            1.0 * 2.0_f64.exp(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn volume_profiles_match_antiderivatives() {
        assert_relative_eq!(r3().volume_profile(3.0, None).unwrap(), 9.0, max_relative = 1e-11);
        assert_relative_eq!(
            h2().volume_profile(1.0, None).unwrap(),
            1.0_f64.cosh() - 1.0,
            max_relative = 1e-11
        );
        // Weighted: ∫ cosh·sinh = sinh²/2.
        let c = RadialWeight::cosh();
        assert_relative_eq!(
            h2().volume_profile(1.0, Some(&c)).unwrap(),
            1.0_f64.sinh().powi(2) / 2.0,
            max_relative = 1e-11
        );
    }

    #[test]
    fn volume_inversion_round_trips() {
        let s = r3();
        for r in [0.3, 1.0, 2.4] {
            let v = s.volume_profile(r, None).unwrap();
            let back = s.invert_volume(v, None).unwrap();
            assert_relative_eq!(back, r, epsilon = 1e-10);
        }
        // Batch evaluation agrees with the scalar path.
        let radii = [1.3, 0.2, 2.0, 1.3];
        let batch = s.volume_values(&radii, None).unwrap();
        for (r, v) in radii.iter().zip(&batch) {
            assert_relative_eq!(*v, s.volume_profile(*r, None).unwrap(), epsilon = 1e-10);
        }
    }

    #[test]
    fn log_convexity_margins_by_profile() {
        let exp = WarpedSpace::single(WarpProfile::exponential(), FiberSpec::circle(1.0));
        assert_relative_eq!(exp.log_convexity_margin(1.0).unwrap(), 0.0, epsilon = 1e-12);
        let sin = WarpedSpace::single(WarpProfile::sine(), FiberSpec::circle(1.0));
        assert_relative_eq!(sin.log_convexity_margin(0.7).unwrap(), -1.0, epsilon = 1e-12);
        // Cusp profile r^{-1}: margin +r⁻⁴ > 0 (genuinely log-convex).
        let cusp = WarpedSpace::single(WarpProfile::power(-1.0).unwrap(), FiberSpec::circle(1.0));
        assert_relative_eq!(cusp.log_convexity_margin(2.0).unwrap(), 2.0_f64.powi(-4), epsilon = 1e-12);
    }

    #[test]
    fn weighted_margin_has_the_euclidean_closed_form() {
        // b = r^k in flat space: margin = (k−1)(k+m) r^k.
        let s = r3();
        for (k, r) in [(2.0, 1.0), (2.0, 1.7), (1.0, 0.9), (0.5, 1.0)] {
            let pair = WeightPair::plain(RadialWeight::power(k), 0.0).unwrap();
            let got = s.weighted_convexity_margin(&pair, r).unwrap();
            let want = (k - 1.0) * (k + 2.0) * r.powf(k);
            assert_relative_eq!(got, want, epsilon = 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn general_margin_reduces_to_the_plain_one() {
        // With c ≡ 1 and a(0) = 0 the general margin is s^{2m−2} times the
        // plain margin.
        let s = r3();
        let pair = WeightPair::plain(RadialWeight::power(2.0), 0.0).unwrap();
        for r in [0.5, 1.0, 1.9] {
            let plain = s.weighted_convexity_margin(&pair, r).unwrap();
            let general = s.weighted_volume_convexity_margin(&pair, r).unwrap();
            let scale = r.powi(2); // s^{2m−2} = r² for m = 2
            assert_relative_eq!(general, scale * plain, epsilon = 1e-10 * (1.0 + plain.abs()));
        }
    }

    #[test]
    fn secant_probe_agrees_with_margin_sign() {
        // Exponential profile: A(v⁻¹) is affine, margin 0; cusp: convex.
        let exp = WarpedSpace::single(WarpProfile::exponential(), FiberSpec::circle(1.0));
        let u0 = exp.volume_profile(0.5, None).unwrap();
        let u2 = exp.volume_profile(1.5, None).unwrap();
        let mid = exp.area_of_volume(0.5 * (u0 + u2)).unwrap();
        let chord =
            0.5 * (exp.area_of_volume(u0).unwrap() + exp.area_of_volume(u2).unwrap());
        assert_relative_eq!(mid, chord, epsilon = 1e-8 * (1.0 + chord));
    }

    #[test]
    fn radial_ricci_matches_warped_closed_form() {
        // sinh profile over S²: Ric(∂r,∂r) = −2·sinh″/sinh = −2.
        let s = WarpedSpace::single(WarpProfile::hyperbolic(), FiberSpec::sphere(1.0));
        assert_relative_eq!(s.ricci_radial(0.9).unwrap(), -2.0, epsilon = 1e-12);
    }

    #[test]
    fn regime_trichotomy_on_the_reference_trio() {
        // sin over S¹(1) with K = 1: the bounded-margin regime.
        let a = WarpedSpace::single(WarpProfile::sine(), FiberSpec::circle(1.0));
        let rep = a.classify_regime(3.0, Some(1.0)).unwrap();
        assert_eq!(rep.regime, Regime::GlwRegime);

        // sin over S¹(2) with K = 1/4: margin 1 > K, λ₁ = 1/4 = mK.
        let b = WarpedSpace::single(WarpProfile::sine(), FiberSpec::circle(2.0));
        let rep = b.classify_regime(3.0, Some(0.25)).unwrap();
        assert_eq!(rep.regime, Regime::SlicesNotIsoperimetric);

        // eʳ over S¹(1): margin ≡ 0, slices isoperimetric.
        let c = WarpedSpace::single(WarpProfile::exponential(), FiberSpec::circle(1.0));
        let rep = c.classify_regime(3.0, None).unwrap();
        assert_eq!(rep.regime, Regime::SlicesIsoperimetric);

        // Flat plane without a supplied K: no certificate.
        let d = WarpedSpace::single(WarpProfile::euclidean(), FiberSpec::circle(1.0));
        let rep = d.classify_regime(3.0, None).unwrap();
        assert_eq!(rep.regime, Regime::Indeterminate);
    }
}
