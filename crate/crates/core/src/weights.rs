//! Radial weights.  A boundary-integrand weight a(r) and a volume weight
//! c(r) form a pair; the shifted weight b = a − a(0) is what the convexity
//! machinery actually differentiates.  Weights evaluate as C² triples
//! (w, w′, w″), matching the profile convention, because the second
//! derivative enters the convexity margin directly.

use crate::error::{Error, Result};
use crate::profile::WarpProfile;
use std::fmt;
use std::sync::Arc;

type WeightFn = Arc<dyn Fn(f64) -> (f64, f64, f64) + Send + Sync>;

/// A labeled C² radial function.
#[derive(Clone)]
pub struct RadialWeight {
    label: String,
    f: WeightFn,
}

impl fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialWeight({})", self.label)
    }
}

impl RadialWeight {
    pub fn new(label: impl Into<String>, f: WeightFn) -> RadialWeight {
        RadialWeight { label: label.into(), f }
    }

    /// Constant weight.
    pub fn constant(v: f64) -> RadialWeight {
        RadialWeight::new(format!("{v}"), Arc::new(move |_| (v, 0.0, 0.0)))
    }

    /// The constant weight 1 (the default volume weight).
    pub fn one() -> RadialWeight {
        RadialWeight::new("1", Arc::new(|_| (1.0, 0.0, 0.0)))
    }

    /// r^k, k ≥ 0 real.
    pub fn power(k: f64) -> RadialWeight {
        RadialWeight::new(
            format!("r^{k}"),
            Arc::new(move |r: f64| {
                let w = r.powf(k);
                // Limits at r → 0 need no special casing: powf handles
                // r = 0 (0^k = 0 for k > 0), while the derivative terms carry
                // the usual k r^{k-1} and k(k-1) r^{k-2} forms.
                let d1 = if k == 0.0 { 0.0 } else { k * r.powf(k - 1.0) };
                let d2 = if k == 0.0 || k == 1.0 { 0.0 } else { k * (k - 1.0) * r.powf(k - 2.0) };
                (w, d1, d2)
            }),
        )
    }

    /// sinh^k r.
    pub fn sinh_pow(k: f64) -> RadialWeight {
        RadialWeight::new(
            format!("sinh^{k}(r)"),
            Arc::new(move |r: f64| pow_chain(r.sinh(), r.cosh(), r.sinh(), k)),
        )
    }

    /// cosh r.
    pub fn cosh() -> RadialWeight {
        RadialWeight::new("cosh(r)", Arc::new(|r: f64| (r.cosh(), r.sinh(), r.cosh())))
    }

    /// (cosh r − 1)^k.
    pub fn cosh_minus_one_pow(k: f64) -> RadialWeight {
        RadialWeight::new(
            format!("(cosh(r)-1)^{k}"),
            Arc::new(move |r: f64| pow_chain(r.cosh() - 1.0, r.sinh(), r.cosh(), k)),
        )
    }

    /// tan^k r (hemisphere weights; diverges at r = π/2).
    pub fn tan_pow(k: f64) -> RadialWeight {
        RadialWeight::new(
            format!("tan^{k}(r)"),
            Arc::new(move |r: f64| {
                let t = r.tan();
                let sec2 = 1.0 + t * t;
                pow_chain(t, sec2, 2.0 * t * sec2, k)
            }),
        )
    }

    /// 1 − cos r.
    pub fn one_minus_cos() -> RadialWeight {
        RadialWeight::new("1-cos(r)", Arc::new(|r: f64| (1.0 - r.cos(), r.sin(), r.cos())))
    }

    /// cos r (the hemisphere volume weight).
    pub fn cos() -> RadialWeight {
        RadialWeight::new("cos(r)", Arc::new(|r: f64| (r.cos(), -r.sin(), -r.cos())))
    }

    /// s(r)^l built from a profile (exact chain rule through (s, s′, s″)).
    pub fn profile_pow(profile: &WarpProfile, l: f64) -> RadialWeight {
        let p = profile.clone();
        RadialWeight::new(
            format!("{}^{l}", p.label()),
            Arc::new(move |r: f64| {
                let (s, d1, d2) = p.eval(r).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
                pow_chain(s, d1, d2, l)
            }),
        )
    }

    /// s′(r) built from a profile: the conformal factor, the canonical
    /// volume weight of the curvature-integral chain.
    pub fn profile_slope(profile: &WarpProfile) -> RadialWeight {
        let p = profile.clone();
        RadialWeight::new(
            format!("{}'", p.label()),
            Arc::new(move |r: f64| {
                let (_, d1, d2) = p.eval(r).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
                // s‴ is unavailable in general; the slope weight is only
                // ever integrated or evaluated, never differentiated twice,
                // so the second slot is NaN to fail loudly if misused.
                (d1, d2, f64::NAN)
            }),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// (w, w′, w″) at r.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        (self.f)(r)
    }

    /// Value only.
    pub fn value(&self, r: f64) -> f64 {
        (self.f)(r).0
    }
}

/// g = f^k from (f, f′, f″) by the chain rule.
fn pow_chain(f: f64, d1: f64, d2: f64, k: f64) -> (f64, f64, f64) {
    if k == 1.0 {
        return (f, d1, d2);
    }
    let w = f.powf(k);
    let g1 = k * f.powf(k - 1.0) * d1;
    let g2 = k * (k - 1.0) * f.powf(k - 2.0) * d1 * d1 + k * f.powf(k - 1.0) * d2;
    (w, g1, g2)
}

/// Boundary weight a with its induced b = a − a(0), plus the volume weight c.
#[derive(Debug, Clone)]
pub struct WeightPair {
    a: RadialWeight,
    c: RadialWeight,
    a_at_origin: f64,
    origin: f64,
}

impl WeightPair {
    /// Pair with the trivial volume weight c ≡ 1.  `origin` is the domain
    /// start of the ambient profile (0 for all catalog models).
    pub fn plain(a: RadialWeight, origin: f64) -> Result<WeightPair> {
        WeightPair::with_volume_weight(a, RadialWeight::one(), origin)
    }

    /// Pair with an explicit volume weight c > 0.
    pub fn with_volume_weight(
        a: RadialWeight,
        c: RadialWeight,
        origin: f64,
    ) -> Result<WeightPair> {
        let (a0, _, _) = a.eval(origin);
        if !a0.is_finite() {
            return Err(Error::range(format!(
                "weight {}: value at the origin must be finite",
                a.label()
            )));
        }
        Ok(WeightPair { a, c, a_at_origin: a0, origin })
    }

    pub fn a(&self) -> &RadialWeight {
        &self.a
    }

    pub fn c(&self) -> &RadialWeight {
        &self.c
    }

    /// True when c ≡ 1 (the pair was built by `plain` or with the unit
    /// weight).
    pub fn has_trivial_volume_weight(&self) -> bool {
        self.c.label() == "1"
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn a_at_origin(&self) -> f64 {
        self.a_at_origin
    }

    /// (b, b′, b″) with b = a − a(origin).
    pub fn b_eval(&self, r: f64) -> (f64, f64, f64) {
        let (w, d1, d2) = self.a.eval(r);
        (w - self.a_at_origin, d1, d2)
    }

    /// Label in reports: `a` alone when c ≡ 1, otherwise `a | c`.
    pub fn label(&self) -> String {
        if self.has_trivial_volume_weight() {
            self.a.label().to_string()
        } else {
            format!("{} | vol {}", self.a.label(), self.c.label())
        }
    }
}
