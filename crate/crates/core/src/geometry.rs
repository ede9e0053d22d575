//! Closed-form constants for the four space-filling cells and the two
//! alternate arrangements used by nonhierarchical partitioning.
//!
//! Every cell is parameterized by its circumradius `R`. The volumetric
//! quotient is the cell volume divided by the circumsphere volume.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CellShape {
    /// Cube.
    CB,
    /// Hexagonal prism with the volume-maximizing height `h = a√2`.
    HP,
    /// Rhombic dodecahedron.
    RD,
    /// Truncated octahedron.
    TO,
    /// Cubes with alternate layers shifted by half a side.
    AltCB,
    /// Hexagonal prisms with alternate layers shifted into the prism gaps.
    AltHP,
}

impl CellShape {
    /// Shapes with a regular tessellation, usable by the hierarchical models.
    pub const BASE: [CellShape; 4] = [CellShape::CB, CellShape::HP, CellShape::RD, CellShape::TO];

    /// All six partitioning arrangements, in reporting order.
    pub const ALL: [CellShape; 6] = [
        CellShape::CB,
        CellShape::AltCB,
        CellShape::HP,
        CellShape::AltHP,
        CellShape::RD,
        CellShape::TO,
    ];

    pub fn is_base(self) -> bool {
        !matches!(self, CellShape::AltCB | CellShape::AltHP)
    }

    pub(crate) fn require_base(self, op: &'static str) -> Result<()> {
        if self.is_base() {
            Ok(())
        } else {
            Err(Error::UnsupportedShape { op, shape: self })
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CellShape::CB => "CB",
            CellShape::HP => "HP",
            CellShape::RD => "RD",
            CellShape::TO => "TO",
            CellShape::AltCB => "Alt-CB",
            CellShape::AltHP => "Alt-HP",
        }
    }
}

impl fmt::Display for CellShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CellShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "cb" | "cube" => Ok(CellShape::CB),
            "hp" | "hexprism" => Ok(CellShape::HP),
            "rd" | "rhombicdodecahedron" => Ok(CellShape::RD),
            "to" | "truncatedoctahedron" => Ok(CellShape::TO),
            "altcb" => Ok(CellShape::AltCB),
            "althp" => Ok(CellShape::AltHP),
            _ => Err(domain(format!("unknown cell shape '{s}'"))),
        }
    }
}

/// Per-shape constants for a base shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeConstants {
    pub volumetric_quotient: f64,
    /// `volume = volume_coeff · R³`.
    pub volume_coeff: f64,
    /// Minimum `r_bb / r_bs` that keeps every face neighbor in range.
    pub connectivity_threshold: f64,
}

impl ShapeConstants {
    pub fn of(shape: CellShape) -> Result<Self> {
        Ok(Self {
            volumetric_quotient: volumetric_quotient(shape)?,
            volume_coeff: volume_coeff(shape)?,
            connectivity_threshold: connectivity_threshold(shape)?,
        })
    }
}

/// Cell volume over circumradius cubed.
pub fn volume_coeff(shape: CellShape) -> Result<f64> {
    shape.require_base("cell volume")?;
    Ok(match shape {
        CellShape::CB => 8.0 / (3.0 * 3f64.sqrt()),
        CellShape::HP | CellShape::RD => 2.0,
        CellShape::TO => 32.0 / (5.0 * 5f64.sqrt()),
        CellShape::AltCB | CellShape::AltHP => unreachable!(),
    })
}

pub fn volumetric_quotient(shape: CellShape) -> Result<f64> {
    shape.require_base("volumetric quotient")?;
    Ok(match shape {
        CellShape::CB => 2.0 / (3f64.sqrt() * PI),
        CellShape::HP | CellShape::RD => 3.0 / (2.0 * PI),
        CellShape::TO => 24.0 / (5.0 * 5f64.sqrt() * PI),
        CellShape::AltCB | CellShape::AltHP => unreachable!(),
    })
}

pub fn cell_volume(shape: CellShape, radius: f64) -> Result<f64> {
    if radius < 0.0 || radius.is_nan() {
        return Err(domain(format!(
            "cell radius must be nonnegative, got {radius}"
        )));
    }
    Ok(volume_coeff(shape)? * radius.powi(3))
}

/// Distance to the farthest face-sharing neighbor in units of `R`.
pub fn connectivity_threshold(shape: CellShape) -> Result<f64> {
    shape.require_base("connectivity threshold")?;
    Ok(match shape {
        CellShape::CB => 2.0 / 3f64.sqrt(),
        CellShape::HP | CellShape::RD => 2f64.sqrt(),
        CellShape::TO => 4.0 / 5f64.sqrt(),
        CellShape::AltCB | CellShape::AltHP => unreachable!(),
    })
}

/// Number of face-sharing neighbors in the regular tessellation.
pub fn face_neighbor_count(shape: CellShape) -> Result<usize> {
    shape.require_base("face neighbor count")?;
    Ok(match shape {
        CellShape::CB => 6,
        CellShape::HP => 8,
        CellShape::RD => 12,
        CellShape::TO => 14,
        CellShape::AltCB | CellShape::AltHP => unreachable!(),
    })
}
