//! Reachable sets, reachability graphs and longest capture paths for `v >= 1`.
//!
//! With intercept motion the vehicle never leaves the deadline, and every
//! capture happens at the instant `t_arr + L/v` the demand would otherwise
//! escape. Capturing `j` after `i` is then possible iff the vehicle can cover
//! `|x_i - x_j|` in `t_j - t_i`; the `v` terms cancel. The resulting relation
//! is a partial order on `(t, x)`, so the graph is acyclic and its longest
//! path is computed by dynamic programming over arrival order.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::environment::{Demand, EnvParams, Point, VehicleState};
use crate::error::{Error, Result};

/// `v |X - x| <= Y - y`: the vehicle at `vehicle` can still intercept a demand
/// currently at `demand` before it reaches the vehicle's height.
pub fn is_reachable(vehicle: Point, demand: Point, v: f64) -> bool {
    v * (vehicle.x - demand.x).abs() <= vehicle.y - demand.y
}

/// Edge `i -> j` of the reachability graph: after capturing `i` on the
/// deadline the vehicle can still capture `j`, i.e. `|x_i - x_j| <= t_j - t_i`.
/// Coincident `(t, x)` pairs are ordered by id so the relation stays acyclic.
pub fn deadline_edge(i: &Demand, j: &Demand) -> bool {
    if i.id == j.id {
        return false;
    }
    let gap = j.t_arr - i.t_arr;
    if gap == 0.0 && i.x == j.x {
        return i.id < j.id;
    }
    (i.x - j.x).abs() <= gap
}

/// The vehicle as a graph source: parked on the deadline at abscissa `x`.
///
/// `ref_time` is the arrival time of a virtual demand that would be on the
/// deadline under the vehicle right now (`t - L/v`), so reaching demand `i`
/// needs `|x - x_i| <= t_i - ref_time`, the same form as [`deadline_edge`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeadlineSource {
    pub x: f64,
    pub ref_time: f64,
}

impl DeadlineSource {
    pub fn from_vehicle(vehicle: &VehicleState, env: &EnvParams) -> Self {
        Self {
            x: vehicle.x,
            ref_time: vehicle.t - env.transit_time(),
        }
    }

    /// Source right after capturing `d` on the deadline.
    pub fn after_capture(d: &Demand) -> Self {
        Self {
            x: d.x,
            ref_time: d.t_arr,
        }
    }

    pub fn reaches(&self, d: &Demand) -> bool {
        (self.x - d.x).abs() <= d.t_arr - self.ref_time
    }
}

/// Directed acyclic capture-precedence graph rooted at the vehicle.
///
/// Vertices are indexed `0..n` in the order they were supplied; `ids` maps
/// them back to demand ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachGraph {
    ids: Vec<usize>,
    capture_times: Vec<f64>,
    source_edges: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
    topo_order: Vec<usize>,
}

impl ReachGraph {
    /// Assembles a graph from explicit parts. `capture_times[k]` is the
    /// scheduled capture instant of vertex `k`; `edges` use vertex indices.
    pub fn from_parts(
        ids: Vec<usize>,
        capture_times: Vec<f64>,
        source_edges: Vec<usize>,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let n = ids.len();
        if capture_times.len() != n {
            return Err(Error::Contract(format!(
                "{n} vertices but {} capture times",
                capture_times.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Contract(format!("edge ({a}, {b}) out of range")));
            }
            adjacency[a].push(b);
        }
        if let Some(&k) = source_edges.iter().find(|&&k| k >= n) {
            return Err(Error::Contract(format!("source edge to {k} out of range")));
        }
        let topo_order = (0..n).collect();
        Ok(Self {
            ids,
            capture_times,
            source_edges,
            adjacency,
            topo_order,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn source_edges(&self) -> &[usize] {
        &self.source_edges
    }

    pub fn successors(&self, k: usize) -> &[usize] {
        &self.adjacency[k]
    }

    /// Vertex order used for the dynamic program (arrival order when built
    /// from demands).
    pub fn topo_order(&self) -> &[usize] {
        &self.topo_order
    }

    /// Demand-to-demand edges as `(from_id, to_id)` pairs.
    pub fn edge_ids(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, succ)| succ.iter().map(move |&b| (self.ids[a], self.ids[b])))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.source_edges.len() + self.adjacency.iter().map(Vec::len).sum::<usize>()
    }

    /// Kahn's algorithm; `None` if the graph has a cycle.
    fn kahn_order(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        let mut indegree = vec![0usize; n];
        for succ in &self.adjacency {
            for &b in succ {
                indegree[b] += 1;
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&k| indegree[k] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(a) = queue.pop_front() {
            order.push(a);
            for &b in &self.adjacency[a] {
                indegree[b] -= 1;
                if indegree[b] == 0 {
                    queue.push_back(b);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

/// Ordered capture plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathPlan {
    /// Demand ids in capture order.
    pub order: Vec<usize>,
    /// Scheduled capture instant of each entry of `order`.
    pub capture_times: Vec<f64>,
    pub length: usize,
}

impl PathPlan {
    pub fn empty() -> Self {
        Self {
            order: Vec::new(),
            capture_times: Vec::new(),
            length: 0,
        }
    }
}

fn check_preconditions(vehicle: &VehicleState, demands: &[Demand], env: &EnvParams) -> Result<()> {
    if env.speed() < 1.0 {
        return Err(Error::Regime {
            policy: "reachability graph",
            required: "v >= 1",
            v: env.speed(),
        });
    }
    if vehicle.y != env.length() {
        return Err(Error::Contract(format!(
            "vehicle must be on the deadline (y = {}), got y = {}",
            env.length(),
            vehicle.y
        )));
    }
    if let Some(d) = demands.iter().find(|d| d.escape_time(env) <= vehicle.t) {
        return Err(Error::Contract(format!(
            "demand {} escaped at {} before t = {}",
            d.id,
            d.escape_time(env),
            vehicle.t
        )));
    }
    if demands
        .windows(2)
        .any(|w| (w[0].t_arr, w[0].id) > (w[1].t_arr, w[1].id))
    {
        return Err(Error::Contract(
            "demands must be sorted by arrival time".into(),
        ));
    }
    Ok(())
}

/// Builds the reachability graph of a vehicle parked on the deadline and a set
/// of not-yet-escaped demands sorted by arrival time. `O(n^2)`.
pub fn build_reach_graph(
    vehicle: &VehicleState,
    demands: &[Demand],
    env: &EnvParams,
) -> Result<ReachGraph> {
    check_preconditions(vehicle, demands, env)?;
    let source = DeadlineSource::from_vehicle(vehicle, env);
    let n = demands.len();
    let source_edges = (0..n).filter(|&k| source.reaches(&demands[k])).collect();
    let adjacency = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| deadline_edge(&demands[a], &demands[b]))
                .collect()
        })
        .collect();
    Ok(ReachGraph {
        ids: demands.iter().map(|d| d.id).collect(),
        capture_times: demands.iter().map(|d| d.escape_time(env)).collect(),
        source_edges,
        adjacency,
        topo_order: (0..n).collect(),
    })
}

const UNREACHED: usize = 0;
const NO_PRED: usize = usize::MAX;

/// Picks the path end (largest count, smallest id on ties) and walks the
/// predecessor links back to the source.
fn reconstruct(best: &[usize], pred: &[usize], ids: &[usize]) -> Vec<usize> {
    let mut end = None;
    for k in 0..best.len() {
        if best[k] == UNREACHED {
            continue;
        }
        match end {
            None => end = Some(k),
            Some(e) if best[k] > best[e] || (best[k] == best[e] && ids[k] < ids[e]) => {
                end = Some(k)
            }
            _ => {}
        }
    }
    let mut path = Vec::new();
    let mut cur = end;
    while let Some(k) = cur {
        path.push(k);
        cur = (pred[k] != NO_PRED).then_some(pred[k]);
    }
    path.reverse();
    path
}

/// Longest path from the source, counted in demands. Runs the dynamic program
/// over a topological order in `O(V + E)`; among equally good predecessors the
/// one with the smallest demand id wins, as does the path end.
pub fn longest_path(graph: &ReachGraph) -> Result<PathPlan> {
    let order = graph.kahn_order().ok_or(Error::Cycle)?;
    let n = graph.vertex_count();
    let mut best = vec![UNREACHED; n];
    let mut pred = vec![NO_PRED; n];
    for &k in &graph.source_edges {
        best[k] = 1;
    }
    for &a in &order {
        if best[a] == UNREACHED {
            continue;
        }
        for &b in &graph.adjacency[a] {
            let cand = best[a] + 1;
            let better = cand > best[b]
                || (cand == best[b] && pred[b] != NO_PRED && graph.ids[a] < graph.ids[pred[b]]);
            if better {
                best[b] = cand;
                pred[b] = a;
            }
        }
    }
    let path = reconstruct(&best, &pred, &graph.ids);
    Ok(PathPlan {
        order: path.iter().map(|&k| graph.ids[k]).collect(),
        capture_times: path.iter().map(|&k| graph.capture_times[k]).collect(),
        length: path.len(),
    })
}

/// Same dynamic program as [`longest_path`] over [`build_reach_graph`], with
/// edges evaluated on the fly instead of stored. `O(n^2)` time, `O(n)` memory.
/// `demands` must be sorted by arrival time.
pub(crate) fn longest_path_implicit(
    source: &DeadlineSource,
    demands: &[Demand],
    env: &EnvParams,
) -> PathPlan {
    let n = demands.len();
    let mut best = vec![UNREACHED; n];
    let mut pred = vec![NO_PRED; n];
    for b in 0..n {
        let db = &demands[b];
        if source.reaches(db) {
            best[b] = 1;
        }
        // predecessors scanned in id order, so strict `>` keeps the smallest id
        for a in 0..b {
            if best[a] != UNREACHED && best[a] + 1 > best[b] && deadline_edge(&demands[a], db) {
                best[b] = best[a] + 1;
                pred[b] = a;
            }
        }
    }
    let ids: Vec<usize> = demands.iter().map(|d| d.id).collect();
    let path = reconstruct(&best, &pred, &ids);
    PathPlan {
        order: path.iter().map(|&k| demands[k].id).collect(),
        capture_times: path.iter().map(|&k| demands[k].escape_time(env)).collect(),
        length: path.len(),
    }
}

/// Longest capture chain in `O(n log n)`.
///
/// `deadline_edge(i, j)` is equivalent to `u_i <= u_j && w_i <= w_j` with
/// `u = t - x` and `w = t + x`, and reachability from the source is
/// transitive along edges, so the answer is the longest chain under
/// coordinate-wise `<=` among source-reachable demands: sort by `(u, w)` and
/// take a longest non-decreasing subsequence of `w` (patience sorting).
/// The length always matches [`longest_path`]; the path may differ on ties.
pub fn longest_chain_fast(
    vehicle: &VehicleState,
    demands: &[Demand],
    env: &EnvParams,
) -> Result<PathPlan> {
    check_preconditions(vehicle, demands, env)?;
    let source = DeadlineSource::from_vehicle(vehicle, env);
    let mut keyed: Vec<(f64, f64, &Demand)> = demands
        .iter()
        .filter(|d| source.reaches(d))
        .map(|d| (d.t_arr - d.x, d.t_arr + d.x, d))
        .collect();
    keyed.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.id.cmp(&b.2.id))
    });

    // tails[len - 1] = index into `keyed` of the chain of that length with the
    // smallest final w
    let mut tails: Vec<usize> = Vec::new();
    let mut pred = vec![NO_PRED; keyed.len()];
    for k in 0..keyed.len() {
        let w = keyed[k].1;
        let pos = tails.partition_point(|&e| keyed[e].1 <= w);
        if pos > 0 {
            pred[k] = tails[pos - 1];
        }
        if pos == tails.len() {
            tails.push(k);
        } else {
            tails[pos] = k;
        }
    }
    let mut path = Vec::with_capacity(tails.len());
    let mut cur = tails.last().copied();
    while let Some(k) = cur {
        path.push(keyed[k].2);
        cur = (pred[k] != NO_PRED).then_some(pred[k]);
    }
    path.reverse();
    Ok(PathPlan {
        order: path.iter().map(|d| d.id).collect(),
        capture_times: path.iter().map(|d| d.escape_time(env)).collect(),
        length: path.len(),
    })
}
