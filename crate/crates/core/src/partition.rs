//! Nonhierarchical partitioning: space is cut into identical virtual cells
//! and one node per cell stays awake.
//!
//! The cell must be small enough that any point of a cell can reach any
//! point of every first-tier neighbor within the transmission radius `r_t`.
//! All radii here are fractions of `r_t`.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{self, CellShape};
use crate::point::Point3;

/// Address of a truncated-octahedron virtual cell relative to the sink's cell.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub struct CellId {
    pub u: i64,
    pub v: i64,
    pub w: i64,
}

impl CellId {
    pub const ORIGIN: CellId = CellId { u: 0, v: 0, w: 0 };

    pub const fn new(u: i64, v: i64, w: i64) -> Self {
        Self { u, v, w }
    }
}

impl Add for CellId {
    type Output = CellId;
    fn add(self, o: CellId) -> CellId {
        CellId::new(self.u + o.u, self.v + o.v, self.w + o.w)
    }
}

impl Sub for CellId {
    type Output = CellId;
    fn sub(self, o: CellId) -> CellId {
        CellId::new(self.u - o.u, self.v - o.v, self.w - o.w)
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.u, self.v, self.w)
    }
}

/// Sink position and transmission radius that anchor the cell ids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionFrame {
    pub sink: Point3,
    pub r_t: f64,
}

impl PartitionFrame {
    pub fn new(sink: Point3, r_t: f64) -> Result<Self> {
        if !(r_t > 0.0) || !r_t.is_finite() {
            return Err(domain(format!(
                "transmission radius must be positive, got {r_t}"
            )));
        }
        Ok(Self { sink, r_t })
    }

    /// Lattice step `r_t/√17` of the center formula.
    pub fn step(&self) -> f64 {
        self.r_t / 17f64.sqrt()
    }
}

/// First-tier neighbor classes of one arrangement: how many neighbors of
/// each class, and the largest point-to-point distance to that class in
/// units of the cell radius.
pub fn neighbor_reach(shape: CellShape) -> &'static [(usize, f64)] {
    // Multiples are squared to keep the table in closed form.
    const CB: [(usize, f64); 3] = [(6, 8.0), (12, 12.0), (8, 16.0)];
    const ALT_CB: [(usize, f64); 3] = [(4, 8.0), (4, 12.0), (8, 34.0 / 3.0)];
    const HP: [(usize, f64); 3] = [(6, 10.0), (2, 8.0), (12, 14.0)];
    const ALT_HP: [(usize, f64); 2] = [(6, 10.0), (6, 34.0 / 3.0)];
    const RD: [(usize, f64); 2] = [(6, 16.0), (12, 10.0)];
    const TO: [(usize, f64); 2] = [(6, 4.0 * 17.0 / 5.0), (8, 4.0 * 14.0 / 5.0)];
    match shape {
        CellShape::CB => &CB,
        CellShape::AltCB => &ALT_CB,
        CellShape::HP => &HP,
        CellShape::AltHP => &ALT_HP,
        CellShape::RD => &RD,
        CellShape::TO => &TO,
    }
}

fn reach_multiple(shape: CellShape) -> f64 {
    neighbor_reach(shape)
        .iter()
        .map(|&(_, sq)| sq)
        .fold(0.0, f64::max)
        .sqrt()
}

pub fn first_tier_neighbors(shape: CellShape) -> usize {
    neighbor_reach(shape).iter().map(|&(n, _)| n).sum()
}

/// Largest cell radius, as a fraction of `r_t`, that keeps every first-tier
/// neighbor reachable from anywhere in the cell.
pub fn max_cell_radius(shape: CellShape) -> f64 {
    1.0 / reach_multiple(shape)
}

/// Sensing range, as a fraction of `r_t`, needed for one node to sense its
/// whole cell: the cell diameter.
pub fn min_sensing_range(shape: CellShape) -> f64 {
    2.0 * max_cell_radius(shape)
}

/// Cell volume at the maximum radius, for `r_t = 1`.
pub fn partition_cell_volume(shape: CellShape) -> f64 {
    let base = match shape {
        CellShape::AltCB => CellShape::CB,
        CellShape::AltHP => CellShape::HP,
        s => s,
    };
    geometry::cell_volume(base, max_cell_radius(shape)).expect("base shape, positive radius")
}

/// Active nodes needed by `shape` relative to the TO partition.
pub fn active_node_ratio(shape: CellShape) -> f64 {
    partition_cell_volume(CellShape::TO) / partition_cell_volume(shape)
}

/// Network lifetime relative to the TO partition, as a fraction (1 = 100%).
pub fn lifetime_ratio(shape: CellShape) -> f64 {
    1.0 / active_node_ratio(shape)
}

/// Center of virtual cell `id`.
pub fn cell_center(id: CellId, frame: &PartitionFrame) -> Point3 {
    let s = frame.step();
    frame.sink
        + Point3::new(
            (2 * id.u + id.w) as f64 * s,
            (2 * id.v + id.w) as f64 * s,
            id.w as f64 * s,
        )
}

/// Continuous solution of `p = center(u, v, w)`.
fn continuous_id(p: &Point3, frame: &PartitionFrame) -> [f64; 3] {
    let d = *p - frame.sink;
    let k = 17f64.sqrt() / frame.r_t;
    [(d.x - d.z) * k / 2.0, (d.y - d.z) * k / 2.0, d.z * k]
}

/// Unscaled squared distance from `p` to the center of `id`, in steps².
fn offset_sq(c: &[f64; 3], id: CellId) -> f64 {
    // With d = s·(a, b, c) and u* = (a - c)/2: a = 2u* + c, b = 2v* + c.
    let w = id.w as f64;
    let dx = 2.0 * (c[0] - id.u as f64) + (c[2] - w);
    let dy = 2.0 * (c[1] - id.v as f64) + (c[2] - w);
    let dz = c[2] - w;
    dx * dx + dy * dy + dz * dz
}

/// Cell containing `p`: solve the center equation for real `(u, v, w)`, take
/// the two integers bracketing each component, and keep the nearest of the
/// eight candidate centers. Ties go to the smallest id.
pub fn locate_cell(p: &Point3, frame: &PartitionFrame) -> CellId {
    let c = continuous_id(p, frame);
    let lo = c.map(f64::floor);
    let mut best = CellId::ORIGIN;
    let mut best_d = f64::INFINITY;
    for du in 0..2 {
        for dv in 0..2 {
            for dw in 0..2 {
                let id = CellId::new(lo[0] as i64 + du, lo[1] as i64 + dv, lo[2] as i64 + dw);
                let d = offset_sq(&c, id);
                if d < best_d || (d == best_d && id < best) {
                    best = id;
                    best_d = d;
                }
            }
        }
    }
    best
}

/// Rounds each continuous id component independently. Kept as a baseline to
/// show how often the shortcut picks the wrong cell.
pub fn locate_cell_nearest_integer(p: &Point3, frame: &PartitionFrame) -> CellId {
    let c = continuous_id(p, frame);
    CellId::new(
        c[0].round() as i64,
        c[1].round() as i64,
        c[2].round() as i64,
    )
}

/// One row of the partition comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionRow {
    pub shape: CellShape,
    pub max_cell_radius: f64,
    pub min_sensing_range: f64,
    pub active_node_ratio: f64,
    pub lifetime_ratio: f64,
}

pub fn partition_table() -> Vec<PartitionRow> {
    CellShape::ALL
        .iter()
        .map(|&shape| PartitionRow {
            shape,
            max_cell_radius: max_cell_radius(shape),
            min_sensing_range: min_sensing_range(shape),
            active_node_ratio: active_node_ratio(shape),
            lifetime_ratio: lifetime_ratio(shape),
        })
        .collect()
}
