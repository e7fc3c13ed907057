//! Error type shared by every module of the engine.
//!
//! The numerical routines are strict about their domains: evaluating a warp
//! profile outside `[r_min, r_max)`, requesting curvature on a grid that
//! cannot supply derivatives, or failing to reach a requested quadrature
//! tolerance all surface as typed errors instead of silent NaNs.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A radial coordinate fell outside the profile's domain.
    #[error("{what}: r = {r} outside the domain [{lo}, {hi})")]
    Domain { what: &'static str, r: f64, lo: f64, hi: f64 },

    /// An argument violated a documented precondition.
    #[error("range error: {0}")]
    Range(String),

    /// A tolerance could not be met or an iteration failed to converge.
    #[error("numeric failure in {what}: achieved {achieved:e}, requested {requested:e}")]
    Numeric { what: String, achieved: f64, requested: f64 },

    /// The operation needs a realized fiber (circle or round sphere) but the
    /// space carries an abstract one, several fibers, or the wrong dimension.
    #[error("unsupported fiber: {0}")]
    UnsupportedFiber(String),

    /// The operation is outside the supported contract (e.g. curvature on a
    /// value-only grid without a differentiation path).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Invalid data while constructing a profile, grid, or graph.
    #[error("construction error: {0}")]
    Construction(String),

    /// A field produced a non-finite value at a grid node.
    #[error("non-finite value at node {node}: {context}")]
    NonFinite { node: usize, context: String },

    /// Malformed graph or profile file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand used by constructors validating scalar arguments.
    pub fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub fn construction(msg: impl Into<String>) -> Self {
        Error::Construction(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
