//! Brute-force checks of coverage and connectivity for a placement.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::placement::Placement;
use crate::point::{Point3, Region};

/// Graphs above this size are rejected by [`k_connectivity`].
pub const MAX_ORACLE_NODES: usize = 500;

/// Relative slack on range comparisons. Placements put neighbors at exactly
/// `r_bb` (and cell vertices at exactly `r_bs`), which rounding would
/// otherwise split either way.
pub const RANGE_RTOL: f64 = 1e-9;

/// Uniform bucket grid over a bounding box, for nearest-point queries.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    origin: Point3,
    cell: f64,
    dims: [usize; 3],
    buckets: Vec<Vec<u32>>,
    points: Vec<Point3>,
}

impl SpatialGrid {
    /// Buckets of side `cell` covering `points` and `bounds`.
    pub fn new(points: &[Point3], bounds: &Region, cell: f64) -> Self {
        let mut lo = bounds.min;
        let mut hi = bounds.max;
        for p in points {
            lo = Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        let ext = hi - lo;
        let dim = |e: f64| ((e / cell).floor() as usize + 1).max(1);
        let dims = [dim(ext.x), dim(ext.y), dim(ext.z)];
        let mut grid = Self {
            origin: lo,
            cell,
            dims,
            buckets: vec![Vec::new(); dims[0] * dims[1] * dims[2]],
            points: points.to_vec(),
        };
        for (i, p) in points.iter().enumerate() {
            let b = grid.bucket_of(p);
            let idx = grid.flat(b);
            grid.buckets[idx].push(i as u32);
        }
        grid
    }

    fn bucket_of(&self, p: &Point3) -> [usize; 3] {
        let q = *p - self.origin;
        let f = |c: f64, n: usize| ((c / self.cell).floor().max(0.0) as usize).min(n - 1);
        [
            f(q.x, self.dims[0]),
            f(q.y, self.dims[1]),
            f(q.z, self.dims[2]),
        ]
    }

    fn flat(&self, b: [usize; 3]) -> usize {
        (b[2] * self.dims[1] + b[1]) * self.dims[0] + b[0]
    }

    /// Index and distance of the point nearest to `p`, which must lie
    /// inside the grid bounds.
    pub fn nearest(&self, p: &Point3) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let b = self.bucket_of(p);
        let max_ring = *self.dims.iter().max().unwrap();
        let mut best: Option<(usize, f64)> = None;
        for ring in 0..=max_ring {
            if let Some((_, d)) = best {
                // Everything in this ring is at least (ring - 1) buckets away.
                if (ring as f64 - 1.0) * self.cell > d {
                    break;
                }
            }
            self.visit_ring(b, ring, |i| {
                let d = self.points[i].distance(p);
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((i, d));
                }
            });
        }
        best
    }

    /// Indices of all points within `radius` of `p` (inclusive).
    pub fn within(&self, p: &Point3, radius: f64) -> Vec<usize> {
        let reach = (radius / self.cell).ceil() as usize + 1;
        let b = self.bucket_of(p);
        let mut out = Vec::new();
        for ring in 0..=reach {
            self.visit_ring(b, ring, |i| {
                if self.points[i].distance(p) <= radius {
                    out.push(i);
                }
            });
        }
        out
    }

    fn visit_ring(&self, b: [usize; 3], ring: usize, mut f: impl FnMut(usize)) {
        let r = ring as i64;
        let range = |c: usize, n: usize| {
            let lo = (c as i64 - r).max(0);
            let hi = (c as i64 + r).min(n as i64 - 1);
            lo..=hi
        };
        for z in range(b[2], self.dims[2]) {
            for y in range(b[1], self.dims[1]) {
                for x in range(b[0], self.dims[0]) {
                    let cheb = (x - b[0] as i64)
                        .abs()
                        .max((y - b[1] as i64).abs())
                        .max((z - b[2] as i64).abs());
                    if cheb != r {
                        continue;
                    }
                    let idx = self.flat([x as usize, y as usize, z as usize]);
                    for &i in &self.buckets[idx] {
                        f(i as usize);
                    }
                }
            }
        }
    }
}

/// Result of sampling a region for sensor-to-backbone coverage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub samples_total: u64,
    pub samples_covered: u64,
    /// Largest distance from a sample to its nearest node. Infinite (null
    /// in JSON) when there are no nodes.
    pub worst_gap: f64,
    pub coverage_fraction: f64,
}

impl CoverageReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct serializes")
    }
}

fn axis_samples(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// Samples `region` on a regular grid of pitch `grid_step`. A sample is
/// covered when some node lies within `r_bs`.
pub fn verify_coverage(
    placement: &Placement,
    r_bs: f64,
    region: &Region,
    grid_step: f64,
) -> Result<CoverageReport> {
    if !(grid_step > 0.0) {
        return Err(domain(format!(
            "grid step must be positive, got {grid_step}"
        )));
    }
    let xs = axis_samples(region.min.x, region.max.x, grid_step);
    let ys = axis_samples(region.min.y, region.max.y, grid_step);
    let zs = axis_samples(region.min.z, region.max.z, grid_step);
    let total = (xs.len() * ys.len() * zs.len()) as u64;

    let positions = placement.positions();
    if positions.is_empty() {
        return Ok(CoverageReport {
            samples_total: total,
            samples_covered: 0,
            worst_gap: f64::INFINITY,
            coverage_fraction: 0.0,
        });
    }
    let grid = SpatialGrid::new(&positions, region, r_bs.max(grid_step));

    let (covered, worst) = zs
        .par_iter()
        .map(|&z| {
            let mut covered = 0u64;
            let mut worst = 0.0f64;
            for &y in &ys {
                for &x in &xs {
                    let (_, d) = grid.nearest(&Point3::new(x, y, z)).expect("nonempty");
                    if d <= r_bs * (1.0 + RANGE_RTOL) {
                        covered += 1;
                    }
                    worst = worst.max(d);
                }
            }
            (covered, worst)
        })
        .reduce(|| (0, 0.0), |a, b| (a.0 + b.0, a.1.max(b.1)));

    Ok(CoverageReport {
        samples_total: total,
        samples_covered: covered,
        worst_gap: worst,
        coverage_fraction: covered as f64 / total as f64,
    })
}

/// Nodes joined when within `r_bb` of each other.
#[derive(Debug, Clone, PartialEq)]
pub struct BackboneGraph {
    pub nodes: Vec<Point3>,
    /// Sorted neighbor lists.
    pub adjacency: Vec<Vec<usize>>,
    /// Nodes at least two cell diameters from the region boundary.
    pub interior: Vec<bool>,
    /// Degree -> node count, over all nodes.
    pub degree_histogram: BTreeMap<usize, usize>,
}

impl BackboneGraph {
    /// Builds a graph from explicit nodes and edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a != b && !adjacency[a].contains(&b) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let degree_histogram = histogram(&adjacency);
        Self {
            nodes: vec![Point3::ORIGIN; n],
            adjacency,
            interior: vec![true; n],
            degree_histogram,
        }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Most common degree among interior nodes; the smaller degree wins ties.
    pub fn interior_degree_mode(&self) -> Option<usize> {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, list) in self.adjacency.iter().enumerate() {
            if self.interior[i] {
                *counts.entry(list.len()).or_default() += 1;
            }
        }
        counts
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(deg, _)| deg)
    }

    pub fn interior_degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency
            .iter()
            .zip(&self.interior)
            .filter(|(_, &inside)| inside)
            .map(|(l, _)| l.len())
    }

    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(a) = queue.pop_front() {
            for &b in &self.adjacency[a] {
                if !seen[b] {
                    seen[b] = true;
                    count += 1;
                    queue.push_back(b);
                }
            }
        }
        count == self.len()
    }
}

fn histogram(adjacency: &[Vec<usize>]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for list in adjacency {
        *h.entry(list.len()).or_default() += 1;
    }
    h
}

/// Joins nodes within `r_bb` of each other, up to [`RANGE_RTOL`].
pub fn build_backbone_graph(placement: &Placement, r_bb: f64) -> Result<BackboneGraph> {
    if !(r_bb > 0.0) {
        return Err(domain(format!("r_bb must be positive, got {r_bb}")));
    }
    let nodes = placement.positions();
    let grid = SpatialGrid::new(&nodes, &placement.region, r_bb);
    let adjacency: Vec<Vec<usize>> = nodes
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut list: Vec<usize> = grid
                .within(p, r_bb * (1.0 + RANGE_RTOL))
                .into_iter()
                .filter(|&j| j != i)
                .collect();
            list.sort_unstable();
            list
        })
        .collect();
    let margin = 4.0 * placement.cell_radius;
    let interior = nodes
        .iter()
        .map(|p| placement.region.contains(p) && placement.region.depth_of(p) >= margin)
        .collect();
    let degree_histogram = histogram(&adjacency);
    Ok(BackboneGraph {
        nodes,
        adjacency,
        interior,
        degree_histogram,
    })
}

/// Residual network for unit vertex-capacity max-flow.
struct FlowNet {
    head: Vec<usize>,
    cap: Vec<i32>,
    next: Vec<usize>,
    first: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl FlowNet {
    fn new(n: usize) -> Self {
        Self {
            head: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
            first: vec![NIL; n],
        }
    }

    fn add_edge(&mut self, a: usize, b: usize, c: i32) {
        for (from, to, cap) in [(a, b, c), (b, a, 0)] {
            self.head.push(to);
            self.cap.push(cap);
            self.next.push(self.first[from]);
            self.first[from] = self.head.len() - 1;
        }
    }

    /// Augments along shortest paths until `limit` units flow or none remain.
    fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let n = self.first.len();
        let mut flow = 0;
        while flow < limit {
            let mut via = vec![NIL; n];
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(a) = queue.pop_front() {
                if a == t {
                    break;
                }
                let mut e = self.first[a];
                while e != NIL {
                    let b = self.head[e];
                    if self.cap[e] > 0 && !seen[b] {
                        seen[b] = true;
                        via[b] = e;
                        queue.push_back(b);
                    }
                    e = self.next[e];
                }
            }
            if !seen[t] {
                break;
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                v = self.head[e ^ 1];
            }
            flow += 1;
        }
        flow
    }
}

/// Number of internally vertex-disjoint paths between two non-adjacent
/// nodes, capped at `limit`.
fn local_connectivity(g: &BackboneGraph, s: usize, t: usize, limit: usize) -> usize {
    let n = g.len();
    let big = n as i32 + 1;
    let mut net = FlowNet::new(2 * n);
    for v in 0..n {
        let c = if v == s || v == t { big } else { 1 };
        net.add_edge(2 * v, 2 * v + 1, c);
        for &w in &g.adjacency[v] {
            net.add_edge(2 * v + 1, 2 * w, big);
        }
    }
    net.max_flow(2 * s + 1, 2 * t, limit)
}

/// Whether `graph` is `k`-vertex-connected: more than `k` nodes, and no set
/// of fewer than `k` nodes disconnects it.
///
/// Uses the Esfahanian–Hakimi reduction: with `v` of minimum degree, only
/// pairs `(v, w)` for non-neighbors `w` and non-adjacent pairs inside
/// `N(v)` need a max-flow.
pub fn k_connectivity(graph: &BackboneGraph, k: usize) -> Result<bool> {
    let n = graph.len();
    if n > MAX_ORACLE_NODES {
        return Err(Error::Scale {
            nodes: n,
            limit: MAX_ORACLE_NODES,
        });
    }
    if k == 0 {
        return Ok(true);
    }
    if n <= k {
        return Ok(false);
    }
    let v = (0..n).min_by_key(|&i| graph.degree(i)).expect("nonempty");
    if graph.degree(v) < k {
        return Ok(false);
    }
    for w in 0..n {
        if w != v && !graph.has_edge(v, w) && local_connectivity(graph, v, w, k) < k {
            return Ok(false);
        }
    }
    let nbrs = &graph.adjacency[v];
    for (i, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[i + 1..] {
            if !graph.has_edge(x, y) && local_connectivity(graph, x, y, k) < k {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CellShape;
    use crate::placement::{generate_lattice, PlacementModel};

    fn single_node(at: Point3, region: Region) -> Placement {
        Placement {
            model: PlacementModel::Lattice(CellShape::CB),
            cell_radius: 1.0,
            region,
            reference: at,
            nodes: vec![crate::placement::PlacementNode {
                index: [0, 0, 0],
                position: at,
            }],
            cell: None,
            strip: None,
            auxiliary: vec![],
        }
    }

    #[test]
    fn empty_placement_has_zero_coverage() {
        let region = Region::cube(Point3::ORIGIN, 1.0).unwrap();
        let mut pl = single_node(Point3::ORIGIN, region);
        pl.nodes.clear();
        let rep = verify_coverage(&pl, 1.0, &region, 0.25).unwrap();
        assert_eq!(rep.coverage_fraction, 0.0);
        assert!(rep.worst_gap.is_infinite());
        assert_eq!(rep.samples_total, 125);
        assert!(rep.to_json().contains("\"worst_gap\":null"));
    }

    #[test]
    fn single_node_covers_small_box() {
        let region = Region::cube(Point3::ORIGIN, 2.0).unwrap();
        let pl = single_node(Point3::ORIGIN, region);
        let rep = verify_coverage(&pl, region.half_diagonal() + 1e-12, &region, 0.1).unwrap();
        assert_eq!(rep.coverage_fraction, 1.0);
        assert!((rep.worst_gap - 3f64.sqrt()).abs() < 1e-9);
        assert!(verify_coverage(&pl, 1.0, &region, 0.0).is_err());
    }

    #[test]
    fn nearest_matches_linear_scan() {
        let region = Region::cube(Point3::ORIGIN, 10.0).unwrap();
        let pl = generate_lattice(CellShape::TO, 1.0, &region, Point3::new(0.3, 0.1, 0.2)).unwrap();
        let pts = pl.positions();
        let grid = SpatialGrid::new(&pts, &region, 0.7);
        for i in 0..200 {
            let t = i as f64 * 0.37;
            let q = Point3::new(
                (t.sin()) * 4.9,
                (t * 1.3).cos() * 4.9,
                ((t * 0.7).sin()) * 4.9,
            );
            let (_, d) = grid.nearest(&q).unwrap();
            let brute = pts
                .iter()
                .map(|p| p.distance(&q))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(d, brute);
        }
    }

    #[test]
    fn inclusive_edge_threshold() {
        let g = BackboneGraph::from_edges(2, &[]);
        assert_eq!(g.edge_count(), 0);
        let region = Region::cube(Point3::ORIGIN, 4.0).unwrap();
        let mut pl = single_node(Point3::ORIGIN, region);
        pl.auxiliary.push(Point3::new(1.25, 0.0, 0.0));
        let g = build_backbone_graph(&pl, 1.25).unwrap();
        assert_eq!(g.edge_count(), 1);
        let g = build_backbone_graph(&pl, 1.2499999).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    fn complete(n: usize) -> BackboneGraph {
        let mut e = vec![];
        for a in 0..n {
            for b in a + 1..n {
                e.push((a, b));
            }
        }
        BackboneGraph::from_edges(n, &e)
    }

    #[test]
    fn small_graph_connectivity() {
        assert!(k_connectivity(&complete(3), 2).unwrap());
        assert!(!k_connectivity(&complete(3), 3).unwrap());
        let path = BackboneGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert!(k_connectivity(&path, 1).unwrap());
        assert!(!k_connectivity(&path, 2).unwrap());
        let cycle = BackboneGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert!(k_connectivity(&cycle, 2).unwrap());
        assert!(!k_connectivity(&cycle, 3).unwrap());
        let split = BackboneGraph::from_edges(4, &[(0, 1), (2, 3)]);
        assert!(!k_connectivity(&split, 1).unwrap());
    }

    #[test]
    fn oversized_graph_is_rejected() {
        let g = BackboneGraph::from_edges(MAX_ORACLE_NODES + 1, &[]);
        assert!(matches!(k_connectivity(&g, 1), Err(Error::Scale { .. })));
    }
}
