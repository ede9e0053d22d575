//! Backbone-node placement for the hierarchical architecture.
//!
//! Each base model places one node at every point of a lattice whose
//! Voronoi cell is the model's polyhedron:
//!
//! * CB: simple cubic, spacing `2R/√3`.
//! * HP: triangular layers with center spacing `a√3`, stacked every `h`.
//! * RD: face-centered cubic, nearest-neighbor distance `√2·R`.
//! * TO: body-centered cubic, point `((2u+w)t, (2v+w)t, w·t)` with `t = 2R/√5`.
//!
//! The "adjusted" models shrink the cell until every face neighbor sits
//! within `r_bb`, and the strip model trades full connectivity for density
//! when `r_bb/r_bs` is small.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::format;
use crate::geometry::{self, CellShape};
use crate::point::{Point3, Region};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Communication thresholds of a hierarchical deployment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackboneParams {
    /// Backbone to backbone range.
    pub r_bb: f64,
    /// Backbone to sensor range.
    pub r_bs: f64,
}

impl BackboneParams {
    pub fn new(r_bb: f64, r_bs: f64) -> Result<Self> {
        if !(r_bb > 0.0 && r_bs > 0.0) || !r_bb.is_finite() || !r_bs.is_finite() {
            return Err(domain(format!(
                "ranges must be positive and finite, got r_bb={r_bb}, r_bs={r_bs}"
            )));
        }
        Ok(Self { r_bb, r_bs })
    }

    pub fn ratio(&self) -> f64 {
        self.r_bb / self.r_bs
    }
}

/// Hexagonal prism given by its hexagon side and its height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HexPrism {
    pub side: f64,
    pub height: f64,
}

impl HexPrism {
    /// Prism of circumradius `radius` with the volume-maximizing height `a√2`.
    pub fn optimal(radius: f64) -> Self {
        let side = radius * (2.0f64 / 3.0).sqrt();
        Self {
            side,
            height: side * SQRT2,
        }
    }

    pub fn circumradius(&self) -> f64 {
        (self.side * self.side + self.height * self.height / 4.0).sqrt()
    }

    pub fn volume(&self) -> f64 {
        1.5 * 3f64.sqrt() * self.side * self.side * self.height
    }
}

/// A concrete lattice cell: shape plus the dimensions that generate it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeCell {
    pub shape: CellShape,
    /// Circumradius.
    pub radius: f64,
    /// Side and height, for hexagonal prisms only.
    pub prism: Option<HexPrism>,
}

impl LatticeCell {
    /// Regular cell of circumradius `radius`. Hexagonal prisms get the
    /// optimal height.
    pub fn regular(shape: CellShape, radius: f64) -> Result<Self> {
        shape.require_base("lattice generation")?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(domain(format!(
                "cell radius must be positive, got {radius}"
            )));
        }
        let prism = (shape == CellShape::HP).then(|| HexPrism::optimal(radius));
        Ok(Self {
            shape,
            radius,
            prism,
        })
    }

    pub fn hex_prism(prism: HexPrism) -> Result<Self> {
        if !(prism.side > 0.0 && prism.height > 0.0) {
            return Err(domain(format!("degenerate hexagonal prism {prism:?}")));
        }
        Ok(Self {
            shape: CellShape::HP,
            radius: prism.circumradius(),
            prism: Some(prism),
        })
    }

    pub fn volume(&self) -> f64 {
        match self.prism {
            Some(p) => p.volume(),
            None => geometry::cell_volume(self.shape, self.radius).expect("base shape"),
        }
    }

    /// Lattice basis vectors for the `u`, `v` and `w` indices.
    pub fn basis(&self) -> [Point3; 3] {
        let r = self.radius;
        match self.shape {
            CellShape::CB => {
                let s = 2.0 * r / 3f64.sqrt();
                [
                    Point3::new(s, 0.0, 0.0),
                    Point3::new(0.0, s, 0.0),
                    Point3::new(0.0, 0.0, s),
                ]
            }
            CellShape::HP => {
                let p = self.prism.expect("hexagonal prism dimensions");
                let spacing = p.side * 3f64.sqrt();
                let (sin60, cos60) = (3f64.sqrt() / 2.0, 0.5);
                [
                    Point3::new(spacing * sin60, spacing * cos60, 0.0),
                    Point3::new(0.0, spacing, 0.0),
                    Point3::new(0.0, 0.0, p.height),
                ]
            }
            CellShape::RD => {
                let s = r / SQRT2;
                [
                    Point3::new(2.0 * s, 0.0, 0.0),
                    Point3::new(0.0, 2.0 * s, 0.0),
                    Point3::new(s, s, r),
                ]
            }
            CellShape::TO => {
                let t = 2.0 * r / 5f64.sqrt();
                [
                    Point3::new(2.0 * t, 0.0, 0.0),
                    Point3::new(0.0, 2.0 * t, 0.0),
                    Point3::new(t, t, t),
                ]
            }
            CellShape::AltCB | CellShape::AltHP => unreachable!("rejected at construction"),
        }
    }

    /// Position of lattice index `(u, v, w)` relative to `reference`.
    pub fn point(&self, reference: Point3, index: [i64; 3]) -> Point3 {
        let [bu, bv, bw] = self.basis();
        reference + bu * index[0] as f64 + bv * index[1] as f64 + bw * index[2] as f64
    }
}

/// Shrinks a base cell so that it stays within `r_bs` for coverage and its
/// face neighbors within `r_bb` for connectivity.
pub fn adjusted_radius(shape: CellShape, params: BackboneParams) -> Result<LatticeCell> {
    shape.require_base("adjusted radius")?;
    let BackboneParams { r_bb, r_bs } = params;
    let radius = match shape {
        CellShape::CB => (3f64.sqrt() * r_bb / 2.0).min(r_bs),
        CellShape::RD => (r_bb / SQRT2).min(r_bs),
        CellShape::TO => (r_bb * 5f64.sqrt() / 4.0).min(r_bs),
        CellShape::HP => {
            let side = (r_bb / 3f64.sqrt()).min(r_bs * SQRT2 / 3f64.sqrt());
            // Clamp rounding at the a = r_bs·√(2/3) corner.
            let height = (2.0 * (r_bs * r_bs - side * side).max(0.0).sqrt()).min(r_bb);
            return LatticeCell::hex_prism(HexPrism { side, height });
        }
        CellShape::AltCB | CellShape::AltHP => unreachable!(),
    };
    LatticeCell::regular(shape, radius)
}

/// Ratio above which the adjusted TO model wins: `4^(1/3)`.
pub fn to_hp_crossover() -> f64 {
    4f64.cbrt()
}

/// Ratio above which the adjusted HP model beats adjusted CB: `(16/9)^(1/3)`.
pub fn hp_cb_crossover() -> f64 {
    (16.0f64 / 9.0).cbrt()
}

/// Best hierarchical model for `r_bb / r_bs`, with its adjusted cell for
/// `r_bs = 1`.
pub fn select_best_model(ratio: f64) -> Result<LatticeCell> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(domain(format!("range ratio must be positive, got {ratio}")));
    }
    let shape = if ratio >= 1.587401 {
        CellShape::TO
    } else if ratio >= 1.211414 {
        CellShape::HP
    } else {
        CellShape::CB
    };
    adjusted_radius(shape, BackboneParams::new(ratio, 1.0)?)
}

/// Best model for concrete ranges.
pub fn select_best_cell(params: BackboneParams) -> Result<LatticeCell> {
    let shape = select_best_model(params.ratio())?.shape;
    adjusted_radius(shape, params)
}

/// How a placement was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PlacementModel {
    Lattice(CellShape),
    Strip,
}

/// In-strip spacing, in-plane strip separation and inter-plane neighbor
/// distance of a strip deployment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripGeometry {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl StripGeometry {
    pub fn new(params: BackboneParams) -> Self {
        let BackboneParams { r_bb, r_bs } = params;
        let alpha = r_bb.min(4.0 * r_bs / 5f64.sqrt());
        let beta = 2.0 * (r_bs * r_bs - (alpha / 4.0).powi(2)).sqrt();
        let gamma = (beta * beta / 2.0 + alpha * alpha / 4.0).sqrt();
        Self { alpha, beta, gamma }
    }

    pub fn plane_separation(&self) -> f64 {
        self.beta / 2.0
    }

    /// Position of strip node `(u, v, w)`: `u` along the strip, `v` the strip
    /// within its plane, `w` the plane. Odd planes are shifted by
    /// `(α/2, β/2)` so their strips sit between the neighboring plane's.
    pub fn point(&self, reference: Point3, index: [i64; 3]) -> Point3 {
        let [u, v, w] = index;
        let shift = w.rem_euclid(2) as f64 * 0.5;
        reference
            + Point3::new(
                (u as f64 + shift) * self.alpha,
                (v as f64 + shift) * self.beta,
                w as f64 * self.plane_separation(),
            )
    }

    /// Backbone nodes per unit volume.
    pub fn density(&self) -> f64 {
        1.0 / (self.alpha * self.beta * self.plane_separation())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementNode {
    pub index: [i64; 3],
    pub position: Point3,
}

/// A generated set of backbone-node positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub model: PlacementModel,
    /// Circumradius of the cell (lattice models) or `r_bs` (strips).
    pub cell_radius: f64,
    pub region: Region,
    pub reference: Point3,
    /// Nodes in lexicographic `(w, v, u)` order.
    pub nodes: Vec<PlacementNode>,
    /// Lattice cell, for lattice models.
    pub cell: Option<LatticeCell>,
    /// Strip spacings, for strip placements.
    pub strip: Option<StripGeometry>,
    /// Extra connector nodes, which carry no lattice index.
    pub auxiliary: Vec<Point3>,
}

impl Placement {
    pub fn len(&self) -> usize {
        self.nodes.len() + self.auxiliary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lattice nodes followed by auxiliary nodes.
    pub fn positions(&self) -> Vec<Point3> {
        self.nodes
            .iter()
            .map(|n| n.position)
            .chain(self.auxiliary.iter().copied())
            .collect()
    }

    pub fn with_auxiliary(mut self, extra: Vec<Point3>) -> Self {
        self.auxiliary.extend(extra);
        self
    }

    /// Writes `u,v,w,x,y,z` rows at nine significant digits. Auxiliary
    /// nodes come last with empty index columns.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "u,v,w,x,y,z")?;
        for n in &self.nodes {
            let [u, v, w] = n.index;
            let p = n.position;
            writeln!(
                out,
                "{u},{v},{w},{},{},{}",
                format::length(p.x),
                format::length(p.y),
                format::length(p.z)
            )?;
        }
        for p in &self.auxiliary {
            writeln!(
                out,
                ",,,{},{},{}",
                format::length(p.x),
                format::length(p.y),
                format::length(p.z)
            )?;
        }
        Ok(())
    }
}

/// Integer index bounds of a linear map's preimage of `region`.
fn index_bounds(basis: &[Point3; 3], reference: Point3, region: &Region) -> [(i64, i64); 3] {
    let inv = invert(basis);
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for corner in 0..8 {
        let c = Point3::new(
            if corner & 1 == 0 {
                region.min.x
            } else {
                region.max.x
            },
            if corner & 2 == 0 {
                region.min.y
            } else {
                region.max.y
            },
            if corner & 4 == 0 {
                region.min.z
            } else {
                region.max.z
            },
        ) - reference;
        for i in 0..3 {
            let t = inv[i][0] * c.x + inv[i][1] * c.y + inv[i][2] * c.z;
            lo[i] = lo[i].min(t);
            hi[i] = hi[i].max(t);
        }
    }
    std::array::from_fn(|i| (lo[i].floor() as i64 - 1, hi[i].ceil() as i64 + 1))
}

/// Inverse of the matrix whose columns are the basis vectors.
fn invert(basis: &[Point3; 3]) -> [[f64; 3]; 3] {
    let m = [
        [basis[0].x, basis[1].x, basis[2].x],
        [basis[0].y, basis[1].y, basis[2].y],
        [basis[0].z, basis[1].z, basis[2].z],
    ];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, d) = ((i + 1) % 3, (i + 2) % 3);
            *cell = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) / det;
        }
    }
    inv
}

/// Every lattice point of `cell` anchored at `reference` that lies inside
/// `region`. Callers that need the region's boundary covered pass a region
/// inflated by one cell radius.
pub fn generate_cell_lattice(cell: LatticeCell, region: &Region, reference: Point3) -> Placement {
    let basis = cell.basis();
    let [(u0, u1), (v0, v1), (w0, w1)] = index_bounds(&basis, reference, region);
    let mut nodes = Vec::new();
    for w in w0..=w1 {
        for v in v0..=v1 {
            for u in u0..=u1 {
                let p = cell.point(reference, [u, v, w]);
                if region.contains(&p) {
                    nodes.push(PlacementNode {
                        index: [u, v, w],
                        position: p,
                    });
                }
            }
        }
    }
    Placement {
        model: PlacementModel::Lattice(cell.shape),
        cell_radius: cell.radius,
        region: *region,
        reference,
        nodes,
        cell: Some(cell),
        strip: None,
        auxiliary: Vec::new(),
    }
}

/// Lattice of the regular `shape` cell with circumradius `radius`.
pub fn generate_lattice(
    shape: CellShape,
    radius: f64,
    region: &Region,
    reference: Point3,
) -> Result<Placement> {
    let cell = LatticeCell::regular(shape, radius)?;
    Ok(generate_cell_lattice(cell, region, reference))
}

pub fn generate_strip_placement(
    params: BackboneParams,
    region: &Region,
    reference: Point3,
) -> Placement {
    let geom = StripGeometry::new(params);
    let basis = [
        Point3::new(geom.alpha, 0.0, 0.0),
        Point3::new(0.0, geom.beta, 0.0),
        Point3::new(0.0, 0.0, geom.plane_separation()),
    ];
    let [(u0, u1), (v0, v1), (w0, w1)] = index_bounds(&basis, reference, region);
    let mut nodes = Vec::new();
    for w in w0..=w1 {
        for v in v0..=v1 {
            for u in u0..=u1 {
                let p = geom.point(reference, [u, v, w]);
                if region.contains(&p) {
                    nodes.push(PlacementNode {
                        index: [u, v, w],
                        position: p,
                    });
                }
            }
        }
    }
    Placement {
        model: PlacementModel::Strip,
        cell_radius: params.r_bs,
        region: *region,
        reference,
        nodes,
        cell: None,
        strip: Some(geom),
        auxiliary: Vec::new(),
    }
}

/// Evenly spaced interior points of the segment `a..b`, no gap above `step`.
fn chain_between(a: Point3, b: Point3, step: f64) -> Vec<Point3> {
    let d = a.distance(&b);
    let mut segments = (d / step).ceil().max(1.0) as usize;
    // keep a relative margin so rounding in lerp cannot push a gap past step
    while d / segments as f64 > step * (1.0 - 1e-9) {
        segments += 1;
    }
    (1..segments)
        .map(|i| a.lerp(&b, i as f64 / segments as f64))
        .collect()
}

/// Connector nodes that join every strip into one connected backbone.
///
/// Adjacent strips of a plane are bridged once, at the node nearest the
/// region center, and each pair of consecutive planes is bridged once. The
/// strips then form a spanning tree, which gives 1-connectivity. When `β`
/// or `γ` is already within `r_bb` the strips connect on their own and
/// nothing is added.
pub fn strip_auxiliary_nodes(placement: &Placement, r_bb: f64) -> Result<Vec<Point3>> {
    let geom = placement
        .strip
        .ok_or_else(|| domain("auxiliary nodes apply to strip placements only"))?;
    if !(r_bb > 0.0) {
        return Err(domain(format!("r_bb must be positive, got {r_bb}")));
    }
    if geom.beta <= r_bb || geom.gamma <= r_bb {
        return Ok(Vec::new());
    }
    let center = placement.region.center();

    // (w, v) -> nodes of that strip, ordered along the strip.
    let mut strips: BTreeMap<(i64, i64), Vec<Point3>> = BTreeMap::new();
    for n in &placement.nodes {
        strips
            .entry((n.index[2], n.index[1]))
            .or_default()
            .push(n.position);
    }
    let nearest_to = |pts: &[Point3], target: Point3| -> Point3 {
        *pts.iter()
            .min_by(|a, b| {
                a.distance_squared(&target)
                    .total_cmp(&b.distance_squared(&target))
            })
            .expect("strips are nonempty")
    };

    let mut planes: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for &(w, v) in strips.keys() {
        planes.entry(w).or_default().push(v);
    }

    let mut aux = Vec::new();
    for (&w, vs) in &planes {
        for pair in vs.windows(2) {
            let a_pts = &strips[&(w, pair[0])];
            let b_pts = &strips[&(w, pair[1])];
            let a = nearest_to(a_pts, center);
            let b = nearest_to(b_pts, a);
            aux.extend(chain_between(a, b, r_bb));
        }
    }

    let plane_ids: Vec<i64> = planes.keys().copied().collect();
    for pair in plane_ids.windows(2) {
        let lower: Vec<Point3> = planes[&pair[0]]
            .iter()
            .flat_map(|v| strips[&(pair[0], *v)].iter().copied())
            .collect();
        let upper: Vec<Point3> = planes[&pair[1]]
            .iter()
            .flat_map(|v| strips[&(pair[1], *v)].iter().copied())
            .collect();
        let a = nearest_to(&lower, center);
        let b = nearest_to(&upper, a);
        aux.extend(chain_between(a, b, r_bb));
    }
    Ok(aux)
}
