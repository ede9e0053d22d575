use proptest::prelude::*;

use tessnet_core::geometry::{self, CellShape};
use tessnet_core::placement::{self, BackboneParams, LatticeCell, StripGeometry};
use tessnet_core::verify::{self, BackboneGraph};
use tessnet_core::{Point3, Region};

fn sorted_distances_from_center(shape: CellShape, radius: f64) -> Vec<f64> {
    let region = Region::cube(Point3::ORIGIN, 12.0 * radius).unwrap();
    let pl = placement::generate_lattice(shape, radius, &region, Point3::ORIGIN).unwrap();
    let mut d: Vec<f64> = pl
        .positions()
        .iter()
        .map(|p| p.norm())
        .filter(|&d| d > 1e-12)
        .collect();
    d.sort_by(f64::total_cmp);
    d
}

#[test]
fn face_neighbors_sit_at_the_connectivity_threshold() {
    for shape in CellShape::BASE {
        for radius in [0.7, 1.0, 2.3] {
            let f = geometry::face_neighbor_count(shape).unwrap();
            let t = geometry::connectivity_threshold(shape).unwrap() * radius;
            let d = sorted_distances_from_center(shape, radius);
            assert!(
                (d[f - 1] - t).abs() < 1e-9 * radius,
                "{shape} R={radius}: {} vs {t}",
                d[f - 1]
            );
            assert!(
                d[f] > t * (1.0 + 1e-6),
                "{shape} R={radius}: next shell {} not beyond {t}",
                d[f]
            );
        }
    }
}

#[test]
fn every_point_of_a_lattice_cell_is_within_its_circumradius() {
    // Nearest-node distance over a fine grid never exceeds R.
    for shape in CellShape::BASE {
        let cell = LatticeCell::regular(shape, 1.0).unwrap();
        let interior = Region::cube(Point3::ORIGIN, 3.0).unwrap();
        let pl = placement::generate_cell_lattice(
            cell,
            &interior.inflate(2.0),
            Point3::new(0.011, 0.023, 0.037),
        );
        let rep = verify::verify_coverage(&pl, 1.0, &interior, 0.05).unwrap();
        assert!(rep.worst_gap <= 1.0 + 1e-9, "{shape}: {}", rep.worst_gap);
        assert!(
            rep.worst_gap > 0.9,
            "{shape}: gap {} suspiciously small",
            rep.worst_gap
        );
    }
}

fn argmax_shapes(ratio: f64) -> Vec<CellShape> {
    let params = BackboneParams::new(ratio, 1.0).unwrap();
    let vols: Vec<(CellShape, f64)> = CellShape::BASE
        .iter()
        .map(|&s| (s, placement::adjusted_radius(s, params).unwrap().volume()))
        .collect();
    let best = vols.iter().map(|v| v.1).fold(f64::MIN, f64::max);
    vols.into_iter()
        .filter(|v| v.1 >= best * (1.0 - 1e-12))
        .map(|v| v.0)
        .collect()
}

#[test]
fn model_selection_matches_brute_force_argmax() {
    let cross = [placement::hp_cb_crossover(), placement::to_hp_crossover()];
    for i in 0..200 {
        let ratio = 0.8 + 1.7 * i as f64 / 199.0;
        if cross.iter().any(|c| (ratio - c).abs() < 1e-5) {
            continue;
        }
        let chosen = placement::select_best_model(ratio).unwrap().shape;
        let best = argmax_shapes(ratio);
        assert!(
            best.contains(&chosen),
            "ratio {ratio}: chose {chosen}, argmax {best:?}"
        );
    }
}

#[test]
fn hp_and_rd_tie_between_root_two_and_the_to_crossover() {
    for i in 0..20 {
        let ratio =
            2f64.sqrt() + (placement::to_hp_crossover() - 2f64.sqrt()) * (i as f64 + 0.5) / 20.0;
        let best = argmax_shapes(ratio);
        assert_eq!(best, vec![CellShape::HP, CellShape::RD], "ratio {ratio}");
    }
}

#[test]
fn adjusted_cells_keep_face_neighbors_connected() {
    for i in 0..25 {
        let ratio = 0.8 + 1.7 * i as f64 / 24.0;
        let params = BackboneParams::new(ratio, 1.0).unwrap();
        let cell = placement::select_best_cell(params).unwrap();
        let region = Region::cube(Point3::ORIGIN, 8.0 * cell.radius).unwrap();
        let pl = placement::generate_cell_lattice(cell, &region, Point3::ORIGIN);
        let g = verify::build_backbone_graph(&pl, ratio * (1.0 + 1e-9)).unwrap();
        let f = geometry::face_neighbor_count(cell.shape).unwrap();
        assert!(
            g.interior_degrees().all(|d| d >= f),
            "ratio {ratio} ({})",
            cell.shape
        );
        assert!(g.is_connected());
    }
}

#[test]
fn strip_density_matches_to_when_unconstrained() {
    let to_density = 1.0 / geometry::cell_volume(CellShape::TO, 1.0).unwrap();
    let region = Region::cube(Point3::ORIGIN, 30.0).unwrap();
    for r_bb in [4.0 / 5f64.sqrt(), 2.0, 3.5] {
        let params = BackboneParams::new(r_bb, 1.0).unwrap();
        let g = StripGeometry::new(params);
        assert!(
            (g.density() - to_density).abs() <= 0.02 * to_density,
            "r_bb {r_bb}"
        );
        let pl = placement::generate_strip_placement(params, &region, Point3::ORIGIN);
        let counted = pl.len() as f64 / region.volume();
        assert!(
            (counted - to_density).abs() <= 0.05 * to_density,
            "r_bb {r_bb}: counted {counted}"
        );
    }
}

#[test]
fn strip_placements_cover_and_connect() {
    let interior = Region::cube(Point3::ORIGIN, 3.0).unwrap();
    for r_bb in [0.45, 0.8, 1.2, 1.6, 2.0] {
        let params = BackboneParams::new(r_bb, 1.0).unwrap();
        let placement = placement::generate_strip_placement(
            params,
            &interior.inflate(1.0),
            Point3::new(0.013, 0.029, 0.041),
        );
        let aux = placement::strip_auxiliary_nodes(&placement, r_bb).unwrap();
        let full = placement.with_auxiliary(aux);
        let rep = verify::verify_coverage(&full, 1.0, &interior, 0.05).unwrap();
        assert_eq!(
            rep.coverage_fraction, 1.0,
            "r_bb {r_bb}: gap {}",
            rep.worst_gap
        );
        let g = verify::build_backbone_graph(&full, r_bb).unwrap();
        assert!(g.len() <= verify::MAX_ORACLE_NODES, "{} nodes", g.len());
        assert!(
            verify::k_connectivity(&g, 1).unwrap(),
            "r_bb {r_bb}: {} nodes disconnected",
            g.len()
        );
    }
}

#[test]
fn spatial_grid_within_matches_linear_scan() {
    let region = Region::cube(Point3::ORIGIN, 6.0).unwrap();
    let pl = placement::generate_lattice(CellShape::RD, 0.6, &region, Point3::new(0.1, 0.2, 0.3))
        .unwrap();
    let pts = pl.positions();
    let grid = verify::SpatialGrid::new(&pts, &region, 0.9);
    for q in [
        Point3::ORIGIN,
        Point3::new(2.9, -2.9, 1.0),
        Point3::new(-1.3, 0.4, 2.2),
    ] {
        let mut got = grid.within(&q, 1.3);
        got.sort_unstable();
        let want: Vec<usize> = (0..pts.len())
            .filter(|&i| pts[i].distance(&q) <= 1.3)
            .collect();
        assert_eq!(got, want);
    }
}

fn graph_from_mask(n: usize, mask: u64) -> BackboneGraph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for a in 0..n {
        for b in a + 1..n {
            if mask >> bit & 1 == 1 {
                edges.push((a, b));
            }
            bit += 1;
        }
    }
    BackboneGraph::from_edges(n, &edges)
}

fn connected_without(g: &BackboneGraph, removed: u32) -> bool {
    let n = g.len();
    let Some(start) = (0..n).find(|&i| removed >> i & 1 == 0) else {
        return true;
    };
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(x) = stack.pop() {
        for &y in &g.adjacency[x] {
            if removed >> y & 1 == 0 && !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    (0..n).all(|i| removed >> i & 1 == 1 || seen[i])
}

/// k-connected iff more than k nodes and no removal of fewer than k nodes
/// disconnects the rest.
fn brute_k_connected(g: &BackboneGraph, k: usize) -> bool {
    let n = g.len();
    if n <= k {
        return false;
    }
    (0u32..1 << n)
        .filter(|m| (m.count_ones() as usize) < k)
        .all(|m| connected_without(g, m))
}

proptest! {
    #[test]
    fn k_connectivity_matches_vertex_removal(n in 2usize..9, mask in any::<u64>(), k in 1usize..4) {
        let g = graph_from_mask(n, mask);
        prop_assert_eq!(verify::k_connectivity(&g, k).unwrap(), brute_k_connected(&g, k));
    }

    #[test]
    fn lattice_points_stay_in_region(shape_ix in 0usize..4, radius in 0.3f64..2.0, ox in -1.0f64..1.0, oy in -1.0f64..1.0) {
        let shape = CellShape::BASE[shape_ix];
        let region = Region::new(Point3::new(-3.0, -2.0, -1.5), Point3::new(2.5, 3.0, 1.0)).unwrap();
        let pl = placement::generate_lattice(shape, radius, &region, Point3::new(ox, oy, 0.0)).unwrap();
        prop_assert!(pl.positions().iter().all(|p| region.contains(p)));
        let mut idx: Vec<[i64; 3]> = pl.nodes.iter().map(|n| n.index).collect();
        let before = idx.len();
        idx.sort();
        idx.dedup();
        prop_assert_eq!(idx.len(), before);
    }

    #[test]
    fn strip_geometry_identities(r_bb in 0.1f64..4.0, r_bs in 0.5f64..2.0) {
        let g = StripGeometry::new(BackboneParams::new(r_bb, r_bs).unwrap());
        prop_assert!(g.alpha <= r_bb + 1e-12);
        prop_assert!((g.alpha - r_bb.min(4.0 * r_bs / 5f64.sqrt())).abs() < 1e-12);
        prop_assert!((g.beta * g.beta / 4.0 + g.alpha * g.alpha / 16.0 - r_bs * r_bs).abs() < 1e-9);
        prop_assert!((g.gamma * g.gamma - g.beta * g.beta / 2.0 - g.alpha * g.alpha / 4.0).abs() < 1e-9);
    }
}
