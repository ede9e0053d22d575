use thiserror::Error;

use crate::geometry::CellShape;

/// Errors produced by the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{op} is not defined for cell shape {shape}")]
    UnsupportedShape { op: &'static str, shape: CellShape },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("graph has {nodes} nodes, the exact connectivity oracle is limited to {limit}")]
    Scale { nodes: usize, limit: usize },

    #[error(
        "quadrature did not converge on [{lo}, {hi}]: estimate {estimate}, error {error_estimate} after depth {depth}"
    )]
    Quadrature {
        lo: f64,
        hi: f64,
        estimate: f64,
        error_estimate: f64,
        depth: u32,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
