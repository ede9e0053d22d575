//! Greedy geographic routing over truncated-octahedron cell ids.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::partition::CellId;

/// Id offsets of the 14 face-sharing neighbors, in `±` pairs.
pub const NEIGHBOR_OFFSETS: [CellId; 14] = [
    CellId::new(1, 0, 0),
    CellId::new(-1, 0, 0),
    CellId::new(0, 1, 0),
    CellId::new(0, -1, 0),
    CellId::new(-1, -1, 2),
    CellId::new(1, 1, -2),
    CellId::new(0, 0, 1),
    CellId::new(0, 0, -1),
    CellId::new(-1, 0, 1),
    CellId::new(1, 0, -1),
    CellId::new(0, -1, 1),
    CellId::new(0, 1, -1),
    CellId::new(-1, -1, 1),
    CellId::new(1, 1, -1),
];

pub fn neighbors_of(id: CellId) -> [CellId; 14] {
    NEIGHBOR_OFFSETS.map(|o| id + o)
}

/// Squared Euclidean distance in id space.
pub fn id_metric(a: CellId, b: CellId) -> u64 {
    let d = a - b;
    (d.u * d.u + d.v * d.v + d.w * d.w) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeState {
    pub id: CellId,
    pub alive: bool,
    /// Packets forwarded.
    pub load: u64,
    pub energy: f64,
}

impl NodeState {
    pub fn new(id: CellId, alive: bool, energy: f64) -> Self {
        Self {
            id,
            alive,
            load: 0,
            energy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoutePolicy {
    LeastLoaded,
    HighestEnergy,
    UniformRandom(u64),
}

impl FromStr for RoutePolicy {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "least_loaded" => Ok(RoutePolicy::LeastLoaded),
            "highest_energy" => Ok(RoutePolicy::HighestEnergy),
            "uniform_random" | "random" => Ok(RoutePolicy::UniformRandom(0)),
            _ => Err(domain(format!("unknown route policy {s:?}"))),
        }
    }
}

/// Active nodes keyed by cell id. Ids outside the map behave as dead.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Field {
    nodes: HashMap<CellId, NodeState>,
}

impl Field {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every id in `[lo, hi]` componentwise, alive with the given energy.
    pub fn full_box(lo: CellId, hi: CellId, energy: f64) -> Self {
        let mut field = Self::new();
        for u in lo.u..=hi.u {
            for v in lo.v..=hi.v {
                for w in lo.w..=hi.w {
                    field.insert(NodeState::new(CellId::new(u, v, w), true, energy));
                }
            }
        }
        field
    }

    pub fn insert(&mut self, node: NodeState) {
        self.nodes.insert(node.id, node);
    }

    pub fn get(&self, id: CellId) -> Option<&NodeState> {
        self.nodes.get(&id)
    }

    pub fn is_alive(&self, id: CellId) -> bool {
        self.nodes.get(&id).is_some_and(|n| n.alive)
    }

    pub fn kill(&mut self, id: CellId) {
        if let Some(n) = self.nodes.get_mut(&id) {
            n.alive = false;
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = CellId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn reset_loads(&mut self) {
        for n in self.nodes.values_mut() {
            n.load = 0;
        }
    }

    /// Parses `u,v,w,alive,energy` rows. A header line and `#` comments are
    /// skipped; `alive` accepts `1/0` or `true/false`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut field = Self::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if lineno == 0 && cols.first().is_some_and(|c| c.eq_ignore_ascii_case("u")) {
                continue;
            }
            let bad = |what: &str| domain(format!("field line {}: {what}: {line:?}", lineno + 1));
            if cols.len() != 5 {
                return Err(bad("expected 5 columns u,v,w,alive,energy"));
            }
            let coord = |s: &str| s.parse::<i64>().map_err(|_| bad("bad cell id"));
            let id = CellId::new(coord(cols[0])?, coord(cols[1])?, coord(cols[2])?);
            let alive = match cols[3].to_ascii_lowercase().as_str() {
                "1" | "true" => true,
                "0" | "false" => false,
                _ => return Err(bad("bad alive flag")),
            };
            let energy: f64 = cols[4].parse().map_err(|_| bad("bad energy"))?;
            if !(energy >= 0.0 && energy.is_finite()) {
                return Err(bad("energy must be finite and nonnegative"));
            }
            field.insert(NodeState::new(id, alive, energy));
        }
        Ok(field)
    }
}

fn uniform_pick(seed: u64, current: CellId, dest: CellId, load: u64, n: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = [
        current.u,
        current.v,
        current.w,
        dest.u,
        dest.v,
        dest.w,
        load as i64,
    ];
    let mut stream = 0xcbf2_9ce4_8422_2325u64;
    for w in words {
        stream = (stream ^ w as u64).wrapping_mul(0x1000_0000_01b3);
    }
    rng.set_stream(stream);
    rng.random_range(0..n)
}

/// Chooses an alive neighbor strictly closer to `dest` in id metric, or
/// `None` at a dead end. Among candidates the policy criterion decides
/// first, then the smaller metric, then the smaller id. The chosen relay's
/// load is incremented unless it is the destination.
pub fn greedy_next_hop(
    current: CellId,
    dest: CellId,
    field: &mut Field,
    policy: RoutePolicy,
) -> Option<CellId> {
    let here = id_metric(current, dest);
    let mut candidates: Vec<&NodeState> = neighbors_of(current)
        .iter()
        .filter(|&&n| id_metric(n, dest) < here)
        .filter_map(|&n| field.get(n).filter(|s| s.alive))
        .collect();
    if candidates.is_empty() {
        return None;
    }
    candidates.sort_by_key(|s| (id_metric(s.id, dest), s.id));
    let chosen = match policy {
        RoutePolicy::LeastLoaded => candidates.iter().min_by_key(|s| s.load).map(|s| s.id),
        RoutePolicy::HighestEnergy => candidates
            .iter()
            .copied()
            .reduce(|best, s| if s.energy > best.energy { s } else { best })
            .map(|s| s.id),
        RoutePolicy::UniformRandom(seed) => {
            let load = candidates.iter().map(|s| s.load).sum();
            Some(candidates[uniform_pick(seed, current, dest, load, candidates.len())].id)
        }
    }?;
    if chosen != dest {
        if let Some(n) = field.nodes.get_mut(&chosen) {
            n.load += 1;
        }
    }
    Some(chosen)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DeadEndReason {
    NoImprovingNeighbor,
    HopLimit,
}

impl fmt::Display for DeadEndReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeadEndReason::NoImprovingNeighbor => "no alive neighbor closer to the destination",
            DeadEndReason::HopLimit => "hop limit reached",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RouteOutcome {
    Delivered,
    DeadEnd { at: CellId, reason: DeadEndReason },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RouteResult {
    pub outcome: RouteOutcome,
    /// Ids visited, starting at the source.
    pub path: Vec<CellId>,
    pub hops: u64,
}

impl RouteResult {
    pub fn delivered(&self) -> bool {
        self.outcome == RouteOutcome::Delivered
    }
}

pub fn default_max_hops(src: CellId, dest: CellId) -> u64 {
    4 * id_metric(src, dest)
}

pub fn route(
    src: CellId,
    dest: CellId,
    field: &mut Field,
    policy: RoutePolicy,
    max_hops: u64,
) -> Result<RouteResult> {
    for (role, id) in [("source", src), ("destination", dest)] {
        if !field.is_alive(id) {
            return Err(domain(format!("{role} {id} is not an alive node")));
        }
    }
    let mut path = vec![src];
    let mut current = src;
    while current != dest {
        if path.len() as u64 > max_hops {
            return Ok(dead_end(path, DeadEndReason::HopLimit));
        }
        match greedy_next_hop(current, dest, field, policy) {
            Some(next) => {
                path.push(next);
                current = next;
            }
            None => return Ok(dead_end(path, DeadEndReason::NoImprovingNeighbor)),
        }
    }
    let hops = path.len() as u64 - 1;
    Ok(RouteResult {
        outcome: RouteOutcome::Delivered,
        path,
        hops,
    })
}

fn dead_end(path: Vec<CellId>, reason: DeadEndReason) -> RouteResult {
    let at = *path.last().expect("path holds the source");
    RouteResult {
        outcome: RouteOutcome::DeadEnd { at, reason },
        hops: path.len() as u64 - 1,
        path,
    }
}

/// Shortest hop count over alive nodes, or `None` if unreachable.
pub fn bfs_oracle(src: CellId, dest: CellId, field: &Field) -> Option<u64> {
    if !field.is_alive(src) || !field.is_alive(dest) {
        return None;
    }
    let mut dist = HashMap::from([(src, 0u64)]);
    let mut queue = VecDeque::from([src]);
    while let Some(id) = queue.pop_front() {
        let d = dist[&id];
        if id == dest {
            return Some(d);
        }
        for n in neighbors_of(id) {
            if field.is_alive(n) && !dist.contains_key(&n) {
                dist.insert(n, d + 1);
                queue.push_back(n);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    const O: CellId = CellId::ORIGIN;

    fn cube(n: i64) -> Field {
        Field::full_box(CellId::new(-n, -n, -n), CellId::new(n, n, n), 1.0)
    }

    #[test]
    fn neighbor_list() {
        let ns = neighbors_of(O);
        assert_eq!(ns.len(), 14);
        assert!(ns.contains(&CellId::new(-1, -1, 2)));
        let a = CellId::new(3, -2, 5);
        for b in neighbors_of(a) {
            assert!(neighbors_of(b).contains(&a));
        }
        let mut sorted = ns.to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 14);
    }

    #[test]
    fn metric() {
        assert_eq!(id_metric(O, O), 0);
        assert_eq!(id_metric(O, CellId::new(3, 0, 0)), 9);
        let a = CellId::new(1, -2, 4);
        let b = CellId::new(-3, 0, 1);
        assert_eq!(id_metric(a, b), id_metric(b, a));
    }

    #[test]
    fn next_hop_choices() {
        let mut field = cube(5);
        let dest = CellId::new(3, 0, 0);
        // improving offsets o satisfy 2 d·o > |o|²
        let improving: Vec<CellId> = neighbors_of(O)
            .into_iter()
            .filter(|&n| id_metric(n, dest) < 9)
            .collect();
        assert_eq!(
            improving,
            vec![
                CellId::new(1, 0, 0),
                CellId::new(1, 0, -1),
                CellId::new(1, 1, -1)
            ]
        );
        assert_eq!(
            greedy_next_hop(O, dest, &mut field, RoutePolicy::LeastLoaded),
            Some(CellId::new(1, 0, 0))
        );
        assert_eq!(field.get(CellId::new(1, 0, 0)).unwrap().load, 1);

        let adj = CellId::new(0, 0, 1);
        assert_eq!(
            greedy_next_hop(O, adj, &mut field, RoutePolicy::HighestEnergy),
            Some(adj)
        );
        assert_eq!(field.get(adj).unwrap().load, 0);

        for id in improving {
            field.kill(id);
        }
        assert_eq!(
            greedy_next_hop(O, dest, &mut field, RoutePolicy::LeastLoaded),
            None
        );
    }

    #[test]
    fn policies_prefer_their_criterion() {
        let dest = CellId::new(3, 0, 0);
        let mut field = cube(4);
        field.nodes.get_mut(&CellId::new(1, 0, 0)).unwrap().load = 3;
        assert_eq!(
            greedy_next_hop(O, dest, &mut field, RoutePolicy::LeastLoaded),
            Some(CellId::new(1, 0, -1))
        );
        field.nodes.get_mut(&CellId::new(1, 1, -1)).unwrap().energy = 9.0;
        assert_eq!(
            greedy_next_hop(O, dest, &mut field, RoutePolicy::HighestEnergy),
            Some(CellId::new(1, 1, -1))
        );
    }

    #[test]
    fn uniform_random_is_seeded() {
        let dest = CellId::new(3, 0, 0);
        let picks = |seed| {
            let mut field = cube(4);
            (0..20)
                .map(|_| {
                    greedy_next_hop(O, dest, &mut field, RoutePolicy::UniformRandom(seed)).unwrap()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(picks(11), picks(11));
        let all = picks(11);
        assert!(all.iter().any(|&p| p != all[0]));
    }

    #[test]
    fn routes() {
        let mut field = cube(5);
        let r = route(O, O, &mut field, RoutePolicy::LeastLoaded, 0).unwrap();
        assert!(r.delivered());
        assert_eq!((r.hops, r.path.clone()), (0, vec![O]));

        let dest = CellId::new(3, 0, 0);
        let r = route(
            O,
            dest,
            &mut field,
            RoutePolicy::LeastLoaded,
            default_max_hops(O, dest),
        )
        .unwrap();
        assert!(r.delivered());
        assert_eq!(r.hops, 3);
        assert_eq!(bfs_oracle(O, dest, &field), Some(3));

        field.kill(dest);
        assert!(route(O, dest, &mut field, RoutePolicy::LeastLoaded, 10).is_err());
    }

    #[test]
    fn hop_limit_reports_dead_end() {
        let mut field = cube(5);
        let dest = CellId::new(4, 0, 0);
        let r = route(O, dest, &mut field, RoutePolicy::LeastLoaded, 2).unwrap();
        assert_eq!(
            r.outcome,
            RouteOutcome::DeadEnd {
                at: CellId::new(2, 0, 0),
                reason: DeadEndReason::HopLimit
            }
        );
    }

    #[test]
    fn bfs_basics() {
        let field = cube(2);
        assert_eq!(bfs_oracle(O, O, &field), Some(0));
        assert_eq!(bfs_oracle(O, CellId::new(1, 0, 0), &field), Some(1));
        assert_eq!(bfs_oracle(O, CellId::new(9, 0, 0), &field), None);
    }

    #[test]
    fn csv_field() {
        let f =
            Field::from_csv("u,v,w,alive,energy\n0,0,0,1,2.5\n1,0,0,false,0\n# note\n").unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.is_alive(O));
        assert!(!f.is_alive(CellId::new(1, 0, 0)));
        assert!(Field::from_csv("0,0,0,1").is_err());
        assert!(Field::from_csv("0,0,x,1,1").is_err());
        assert!(Field::from_csv("0,0,0,1,-1").is_err());
    }
}
