//! Numerical laboratory for weighted isoperimetric and curvature-integral
//! inequalities on warped product spaces.
//!
//! The crate models spaces of the form [r_min, r_max) × N with metric
//! dr² + s(r)² g_N, builds star-shaped hypersurfaces over the fiber as
//! graphs r = ψ, and measures the sharp inequalities those spaces support:
//! weighted boundary-area lower bounds, chains of curvature-integral
//! comparisons, slice stability, and spectral consequences for the first
//! nonzero eigenvalues of Newton-tensor operators and the Steklov problem.

pub mod chain;
pub mod error;
pub mod fiber;
pub mod isolab;
pub mod models;
pub mod profile;
pub mod graph;
pub mod quad;
pub mod report;
pub mod shape_field;
pub mod shapes;
pub mod space;
pub mod special;
pub mod spectral;
pub mod weights;

pub use chain::{ChainReport, HmCheck, PositivityReport};
pub use error::{Error, Result};
pub use fiber::{FiberRealization, FiberSpec};
pub use profile::WarpProfile;
pub use graph::{StarGraph, SurfaceFrames};
pub use shape_field::CurvatureField;
pub use isolab::{Hypothesis, VerificationRecord};
pub use quad::{FiberGrid, NodeCoord, Resolution};
pub use report::{CsvRecord, ToCsvRecord};
pub use space::{Regime, RegimeReport, WarpedSpace};
pub use spectral::{
    EigenReport, PowerReport, ProbeReport, SmallBallReport, StabilityVerdict, SteklovReport,
};
pub use weights::{RadialWeight, WeightPair};
