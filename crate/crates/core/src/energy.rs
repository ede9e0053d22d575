//! Backbone energy per packet and for the whole network, relative to TO.
//!
//! A backbone transmits at its neighbor spacing `r`. Per-hop power scales as
//! `r^p` and a path of length `D` takes `D/r` hops, so per-packet energy
//! scales as `r^(p-1)`. With one aggregated packet per cell, network energy
//! additionally scales with the cell count.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::geometry::{self, CellShape};

pub const DEFAULT_POWER_EXPONENT: f64 = 2.0;

/// Transmissions for a packet generated `distance` away from the sink.
pub fn hop_count(distance: f64, r_bb: f64) -> Result<u64> {
    if !(r_bb > 0.0) || distance < 0.0 || distance.is_nan() {
        return Err(domain(format!(
            "need distance >= 0 and r_bb > 0, got distance={distance}, r_bb={r_bb}"
        )));
    }
    Ok((distance / r_bb).ceil() as u64)
}

/// Continuous hop estimate `D / r_bb`.
pub fn hop_estimate(distance: f64, r_bb: f64) -> f64 {
    distance / r_bb
}

/// Neighbor spacing of `model` at unit circumradius.
fn spacing(model: CellShape) -> Result<f64> {
    geometry::connectivity_threshold(model)
}

pub fn per_packet_ratio_with(model: CellShape, power_exponent: f64) -> Result<f64> {
    Ok((spacing(model)? / spacing(CellShape::TO)?).powf(power_exponent - 1.0))
}

/// Per-packet energy of `model` relative to TO at equal cell radius.
pub fn per_packet_ratio(model: CellShape) -> Result<f64> {
    per_packet_ratio_with(model, DEFAULT_POWER_EXPONENT)
}

/// Backbone nodes needed by `model` relative to TO.
pub fn node_count_ratio(model: CellShape) -> Result<f64> {
    Ok(geometry::volumetric_quotient(CellShape::TO)? / geometry::volumetric_quotient(model)?)
}

pub fn network_ratio_with(model: CellShape, power_exponent: f64) -> Result<f64> {
    Ok(per_packet_ratio_with(model, power_exponent)? * node_count_ratio(model)?)
}

/// Whole-network energy of `model` relative to TO.
pub fn network_ratio(model: CellShape) -> Result<f64> {
    network_ratio_with(model, DEFAULT_POWER_EXPONENT)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub model: CellShape,
    pub per_packet_ratio: f64,
    pub network_ratio: f64,
}

pub fn energy_report(model: CellShape, power_exponent: f64) -> Result<EnergyReport> {
    Ok(EnergyReport {
        model,
        per_packet_ratio: per_packet_ratio_with(model, power_exponent)?,
        network_ratio: network_ratio_with(model, power_exponent)?,
    })
}

/// Reports for the four base models.
pub fn energy_table(power_exponent: f64) -> Result<Vec<EnergyReport>> {
    CellShape::BASE
        .iter()
        .map(|&m| energy_report(m, power_exponent))
        .collect()
}
