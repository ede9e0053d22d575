//! Planning and analysis toolkit for three-dimensional underwater sensor
//! networks.
//!
//! Hierarchical networks place backbone nodes on a space-filling lattice
//! ([`placement`]) chosen from the backbone/sensor range ratio, checked by
//! brute force in [`verify`]. Flat networks partition space into virtual
//! cells with one active node each ([`partition`]), addressed by [`CellId`]
//! and routed greedily ([`routing`]). [`acoustic`], [`energy`] and
//! [`kcoverage`] cover frequency reuse, energy ratios and k-coverage.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acoustic;
pub mod energy;
pub mod error;
pub mod format;
pub mod geometry;
pub mod kcoverage;
pub mod partition;
pub mod placement;
pub mod point;
pub mod quadrature;
pub mod routing;
pub mod verify;

pub use acoustic::{
    Absorption, AcousticParams, ClusterIndex, ClusterSize, RadiusChoice, UserConstraints,
};
pub use error::{Error, Result};
pub use geometry::CellShape;
pub use kcoverage::{Dimension, MonteCarloConfig};
pub use partition::{CellId, PartitionFrame};
pub use placement::{BackboneParams, LatticeCell, Placement, PlacementModel};
pub use point::{Point3, Region};
pub use routing::{Field, NodeState, RoutePolicy, RouteResult};
pub use verify::{BackboneGraph, CoverageReport};
