//! Flat tabular summaries of experiment records.
//!
//! Every experiment record in the crate knows how to project itself onto a
//! fixed 8-column row — experiment, model, shape, weight, lhs, rhs, margin,
//! verdict — so heterogeneous runs can land in one CSV.  Numbers are
//! rendered with Rust's shortest round-trip float formatting, which keeps
//! re-runs byte-identical.

use crate::chain::{ChainReport, HmCheck};
use crate::isolab::VerificationRecord;
use crate::spectral::{
    EigenReport, PowerReport, ProbeReport, SmallBallReport, StabilityVerdict, SteklovReport,
};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CsvRecord {
    pub experiment: String,
    pub model: String,
    pub shape: String,
    pub weight: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: bool,
}

pub trait ToCsvRecord {
    fn csv_record(&self) -> CsvRecord;
}

impl ToCsvRecord for CsvRecord {
    fn csv_record(&self) -> CsvRecord {
        self.clone()
    }
}

impl ToCsvRecord for VerificationRecord {
    fn csv_record(&self) -> CsvRecord {
        CsvRecord {
            experiment: self.experiment.clone(),
            model: self.model.clone(),
            shape: self.shape.clone(),
            weight: self.weight.clone(),
            lhs: self.lhs,
            rhs: self.rhs,
            margin: self.margin,
            verdict: self.verdict,
        }
    }
}

impl ToCsvRecord for HmCheck {
    fn csv_record(&self) -> CsvRecord {
        // The identity has no inequality to win; the row's verdict is the
        // residual clearing the order-appropriate tolerance.
        let tol = if self.k <= 1 { 1e-6 } else { 1e-5 };
        CsvRecord {
            experiment: self.experiment.clone(),
            model: self.model.clone(),
            shape: self.shape.clone(),
            weight: format!("η={}, k={}", self.eta, self.k),
            lhs: self.term_weighted_area,
            rhs: self.term_support - self.term_divergence - self.term_gradient,
            margin: self.residual,
            verdict: self.residual.abs() <= tol,
        }
    }
}

impl ToCsvRecord for ChainReport {
    fn csv_record(&self) -> CsvRecord {
        let worst = self.margins.iter().cloned().fold(f64::INFINITY, f64::min);
        CsvRecord {
            experiment: self.experiment.clone(),
            model: self.model.clone(),
            shape: self.shape.clone(),
            weight: format!("l={}, k={}", self.l, self.k),
            lhs: *self.entries.last().expect("nonempty chain"),
            rhs: self.base,
            margin: worst,
            verdict: self.verdict,
        }
    }
}

impl ToCsvRecord for EigenReport {
    fn csv_record(&self) -> CsvRecord {
        let lhs = self
            .lambda1_exact
            .or(self.rayleigh_upper)
            .unwrap_or(f64::NAN);
        CsvRecord {
            experiment: self.experiment.clone(),
            model: self.model.clone(),
            shape: self.shape.clone(),
            weight: format!("k={}", self.k),
            lhs,
            rhs: self.bound,
            margin: self.bound - lhs,
            verdict: self.certified,
        }
    }
}

impl ToCsvRecord for SteklovReport {
    fn csv_record(&self) -> CsvRecord {
        CsvRecord {
            experiment: self.experiment.clone(),
            model: self.model.clone(),
            shape: self.shape.clone(),
            weight: self.branch.clone(),
            lhs: self.p1,
            rhs: self.bound,
            margin: self.bound - self.p1,
            verdict: self.certified,
        }
    }
}

impl ToCsvRecord for StabilityVerdict {
    fn csv_record(&self) -> CsvRecord {
        CsvRecord {
            experiment: "slice-stability".into(),
            model: self.model.clone(),
            shape: format!("slice(r={})", self.r0),
            weight: if self.stable { "stable" } else { "unstable" }.into(),
            lhs: self.fiber_lambda1,
            rhs: self.threshold,
            margin: self.margin,
            verdict: self.jacobi_residual.abs() <= 1e-10,
        }
    }
}

impl ToCsvRecord for ProbeReport {
    fn csv_record(&self) -> CsvRecord {
        CsvRecord {
            experiment: "second-variation-probe".into(),
            model: self.model.clone(),
            shape: format!("slice(r={})", self.r0),
            weight: self.direction.clone(),
            lhs: self.d2,
            rhs: 0.0,
            margin: self.d2,
            verdict: self.volume_drift <= 1e-10,
        }
    }
}

impl ToCsvRecord for SmallBallReport {
    fn csv_record(&self) -> CsvRecord {
        CsvRecord {
            experiment: "small-ball-comparison".into(),
            model: self.model.clone(),
            shape: "vertex cone".into(),
            weight: if self.marginal {
                "marginal"
            } else if self.slices_beat_small_balls {
                "slices win"
            } else {
                "balls win"
            }
            .into(),
            lhs: self.slope_at_origin,
            rhs: self.threshold,
            margin: self.threshold - self.slope_at_origin,
            verdict: true,
        }
    }
}

impl ToCsvRecord for PowerReport {
    fn csv_record(&self) -> CsvRecord {
        CsvRecord {
            experiment: "cusp-annulus".into(),
            model: self.model.clone(),
            shape: format!("annulus({}, {})", self.r1, self.r2),
            weight: "fixed volume".into(),
            lhs: self.boundary_area,
            rhs: self.volume,
            margin: self.area_to_volume_ratio,
            verdict: self.quadrature_residual.abs() <= 1e-9,
        }
    }
}

pub const CSV_HEADER: &str = "experiment,model,shape,weight,lhs,rhs,margin,verdict";

/// Render rows under the fixed header.  Text fields are quoted when they
/// contain commas or quotes; floats use shortest round-trip formatting.
pub fn render_csv<'a>(rows: impl IntoIterator<Item = &'a CsvRecord>) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let fields = [
            escape(&row.experiment),
            escape(&row.model),
            escape(&row.shape),
            escape(&row.weight),
            format!("{}", row.lhs),
            format!("{}", row.rhs),
            format!("{}", row.margin),
            format!("{}", row.verdict),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rendering_escapes_and_round_trips() {
        let rec = CsvRecord {
            experiment: "weighted-iso".into(),
            model: "euclidean2".into(),
            shape: "ellipse(2, 1)".into(),
            weight: "r^2".into(),
            lhs: 1.0 / 3.0,
            rhs: 0.25,
            margin: 1.0 / 3.0 - 0.25,
            verdict: true,
        };
        let text = render_csv([&rec.csv_record()]);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let row = lines.next().unwrap();
        assert!(row.starts_with("weighted-iso,euclidean2,\"ellipse(2, 1)\",r^2,"));
        // The quoted shape field holds one comma, shifting the naive split.
        let lhs_text = row.split(',').nth(5).unwrap();
        assert_eq!(lhs_text.parse::<f64>().unwrap(), 1.0 / 3.0);
        // Identical input renders identical bytes.
        assert_eq!(text, render_csv([&rec.csv_record()]));
    }
}
