//! Passenger routing, exact travel-time evaluation on the roll-out, and the
//! alternating timetabling and routing heuristic.
//!
//! Passengers travel over drive, dwell and transfer activities only. Among
//! shortest paths the one with fewest arcs wins, then the lexicographically
//! smallest sequence of arc ids.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::exec::{self, Execution};
use crate::formulation::expand::{ExpansionError, DEFAULT_EXPANSION_CAP};
use crate::formulation::simplex::{solve_mip, MipStatus};
use crate::formulation::{build_arc_mpesp, VarKind};
use crate::network::{
    ActivityId, ActivityKind, EventActivityNetwork, EventId, NetworkError, Tension, Timetable,
    UnionFind,
};
use crate::num::{rat, representative_from, zero, Rational};
use crate::quotient::root_instance;
use crate::solver::{branch_and_bound, SolveConfig, SolveStatus, SolverError};
use crate::tree::{fundamental_basis, sharp_tree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RoutingError {
    #[error("unknown station `{0}`")]
    UnknownStation(String),
    #[error("station `{station}` refers to unknown event {event}")]
    UnknownEvent { station: String, event: EventId },
    #[error("negative demand {demand} from `{origin}` to `{destination}`")]
    NegativeDemand { origin: String, destination: String, demand: Rational },
    #[error("negative or missing length on activity {0}")]
    BadLength(ActivityId),
    #[error("trim fraction must lie in (0, 1], got {0}")]
    InvalidFraction(Rational),
    #[error("roll-out needs {size} copy pairs (cap {cap})")]
    TooLarge { size: u128, cap: u128 },
    #[error("timetabling step {k} found no feasible timetable")]
    NoTimetable { k: u32 },
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("arc formulation solve failed: {0}")]
    Mip(String),
}

/// Events where passengers of a station board and alight.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StationEvents {
    pub boarding: Vec<EventId>,
    pub alighting: Vec<EventId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ODMatrix {
    pub entries: BTreeMap<(String, String), Rational>,
    pub stations: BTreeMap<String, StationEvents>,
}

impl ODMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn attach(&mut self, station: impl Into<String>, boarding: Vec<EventId>, alighting: Vec<EventId>) {
        self.stations.insert(station.into(), StationEvents { boarding, alighting });
    }

    /// Adds `count` passengers, accumulating repeated pairs.
    pub fn add_demand(
        &mut self,
        origin: impl Into<String>,
        destination: impl Into<String>,
        count: Rational,
    ) -> Result<(), RoutingError> {
        let (origin, destination) = (origin.into(), destination.into());
        if count < zero() {
            return Err(RoutingError::NegativeDemand { origin, destination, demand: count });
        }
        *self.entries.entry((origin, destination)).or_insert_with(zero) += count;
        Ok(())
    }

    pub fn total_demand(&self) -> Rational {
        self.entries.values().sum()
    }

    pub fn validate(&self, net: &EventActivityNetwork) -> Result<(), RoutingError> {
        for (origin, destination) in self.entries.keys() {
            for s in [origin, destination] {
                if !self.stations.contains_key(s) {
                    return Err(RoutingError::UnknownStation(s.clone()));
                }
            }
        }
        for (station, ev) in &self.stations {
            for e in ev.boarding.iter().chain(&ev.alighting) {
                if net.event_index(*e).is_none() {
                    return Err(RoutingError::UnknownEvent { station: station.clone(), event: *e });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutedPath {
    pub origin: String,
    pub destination: String,
    #[serde(with = "crate::num::serde_exact")]
    pub demand: Rational,
    pub arcs: Vec<ActivityId>,
    #[serde(with = "crate::num::serde_exact")]
    pub length: Rational,
    pub transfers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RoutingState {
    /// Passenger load per activity; zero on activities nobody uses.
    #[serde(with = "crate::num::serde_exact_map")]
    pub weights: BTreeMap<ActivityId, Rational>,
    #[serde(with = "crate::num::serde_exact")]
    pub travel_time_total: Rational,
    pub paths: Vec<RoutedPath>,
    pub unreachable: Vec<(String, String)>,
}

impl RoutingState {
    /// Average over routed passengers, `None` when nobody was routed.
    pub fn average_travel_time(&self) -> Option<Rational> {
        let demand: Rational = self.paths.iter().map(|p| p.demand).sum();
        (demand > zero()).then(|| self.travel_time_total / demand)
    }
}

#[derive(Debug, Clone)]
struct GraphArc {
    tail: usize,
    head: usize,
    len: Rational,
    key: (u32, u32),
    activity: usize,
    transfer: bool,
}

/// Plain routing graph: the network itself or its passenger roll-out.
struct Graph {
    n: usize,
    arcs: Vec<GraphArc>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl Graph {
    fn new(n: usize, mut arcs: Vec<GraphArc>) -> Self {
        arcs.sort_by_key(|a| a.key);
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (k, a) in arcs.iter().enumerate() {
            out[a.tail].push(k);
            inc[a.head].push(k);
        }
        Self { n, arcs, out, inc }
    }

    /// Distance and arc count to the nearest target, by reverse Dijkstra.
    fn distances_to(&self, targets: &[usize]) -> Vec<Option<(Rational, usize)>> {
        let mut label: Vec<Option<(Rational, usize)>> = vec![None; self.n];
        let mut heap = BinaryHeap::new();
        for &t in targets {
            label[t] = Some((zero(), 0));
            heap.push(Reverse((zero(), 0usize, t)));
        }
        let mut done = vec![false; self.n];
        while let Some(Reverse((d, h, v))) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            for &k in &self.inc[v] {
                let a = &self.arcs[k];
                let cand = (d + a.len, h + 1);
                if label[a.tail].as_ref().is_none_or(|cur| cand < *cur) {
                    label[a.tail] = Some(cand);
                    heap.push(Reverse((cand.0, cand.1, a.tail)));
                }
            }
        }
        label
    }

    /// Shortest path from any of `sources` to the targets behind `label`.
    fn path(&self, label: &[Option<(Rational, usize)>], sources: &[usize]) -> Option<(Rational, Vec<usize>)> {
        let start = sources
            .iter()
            .copied()
            .filter_map(|s| label[s].map(|l| (l, s)))
            .min()?;
        let (length, mut hops) = start.0;
        let mut v = start.1;
        let mut arcs = Vec::with_capacity(hops);
        while hops > 0 {
            let (dv, _) = label[v].expect("on a shortest path");
            // out-lists are sorted by key, so the first tight arc is the smallest id
            let k = *self.out[v]
                .iter()
                .find(|&&k| {
                    let a = &self.arcs[k];
                    label[a.head].is_some_and(|(dh, hh)| hh + 1 == hops && dh + a.len == dv)
                })
                .expect("tight arc exists");
            arcs.push(k);
            v = self.arcs[k].head;
            hops -= 1;
        }
        Some((length, arcs))
    }
}

struct Demand<'a> {
    origin: &'a str,
    destination: &'a str,
    count: Rational,
    sources: Vec<usize>,
}

/// A routed demand with its length and node path, or the unreachable pair.
type Routed<'a> = Result<(Demand<'a>, Rational, Vec<usize>), (String, String)>;

/// Routes every OD pair; groups share one reverse search per destination.
fn route_on<'a>(
    graph: &Graph,
    od: &'a ODMatrix,
    nodes_of: impl Fn(EventId) -> Vec<usize>,
    exec: Execution,
) -> Vec<Routed<'a>> {
    let mut groups: BTreeMap<&str, Vec<Demand>> = BTreeMap::new();
    for ((o, d), count) in &od.entries {
        let sources = od.stations[o].boarding.iter().flat_map(|e| nodes_of(*e)).collect();
        groups.entry(d.as_str()).or_default().push(Demand {
            origin: o,
            destination: d,
            count: *count,
            sources,
        });
    }
    let work: Vec<(Vec<usize>, Vec<Demand>)> = groups
        .into_iter()
        .map(|(d, demands)| (od.stations[d].alighting.iter().flat_map(|e| nodes_of(*e)).collect(), demands))
        .collect();
    exec::map(exec, work, |(targets, demands)| {
        let label = graph.distances_to(&targets);
        demands
            .into_iter()
            .map(|dm| match graph.path(&label, &dm.sources) {
                Some((len, arcs)) => Ok((dm, len, arcs)),
                None => Err((dm.origin.to_string(), dm.destination.to_string())),
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

fn network_graph(net: &EventActivityNetwork, lengths: &Tension) -> Result<Graph, RoutingError> {
    let mut arcs = Vec::new();
    for (k, a) in net.activities().iter().enumerate() {
        if !a.kind.is_routable() {
            continue;
        }
        let len = *lengths.get(a.id).ok_or(RoutingError::BadLength(a.id))?;
        if len < zero() {
            return Err(RoutingError::BadLength(a.id));
        }
        arcs.push(GraphArc {
            tail: net.tail(k),
            head: net.head(k),
            len,
            key: (a.id.0, 0),
            activity: k,
            transfer: a.kind == ActivityKind::Transfer,
        });
    }
    Ok(Graph::new(net.num_events(), arcs))
}

/// Lower bounds as a length vector.
pub fn lower_bound_lengths(net: &EventActivityNetwork) -> Tension {
    let values: Vec<Rational> = net.activities().iter().map(|a| rat(a.lower)).collect();
    net.tension_from_dense(&values)
}

/// Shortest-path routing of all OD pairs with the given arc lengths.
pub fn route_passengers(
    net: &EventActivityNetwork,
    od: &ODMatrix,
    lengths: &Tension,
    exec: Execution,
) -> Result<RoutingState, RoutingError> {
    od.validate(net)?;
    let graph = network_graph(net, lengths)?;
    let mut state = RoutingState {
        weights: net.activities().iter().map(|a| (a.id, zero())).collect(),
        ..Default::default()
    };
    let routed = route_on(&graph, od, |e| vec![net.event_index(e).expect("validated")], exec);
    for r in routed {
        match r {
            Ok((dm, length, arcs)) => {
                let ids: Vec<ActivityId> = arcs.iter().map(|&k| net.activities()[graph.arcs[k].activity].id).collect();
                for id in &ids {
                    *state.weights.get_mut(id).expect("activity") += dm.count;
                }
                state.travel_time_total += dm.count * length;
                state.paths.push(RoutedPath {
                    origin: dm.origin.to_string(),
                    destination: dm.destination.to_string(),
                    demand: dm.count,
                    transfers: arcs.iter().filter(|&&k| graph.arcs[k].transfer).count(),
                    arcs: ids,
                    length,
                });
            }
            Err(pair) => {
                log::warn!("no route from `{}` to `{}`", pair.0, pair.1);
                state.unreachable.push(pair);
            }
        }
    }
    Ok(state)
}

/// Largest number of copy pairs [`evaluate_exact`] will generate.
pub const EVALUATION_PAIR_CAP: u128 = 10_000_000;

/// Passenger-minutes when every event is rolled out over the hyperperiod.
///
/// Copy `m` of event `i` departs at `π_i + m·T_i`. A transfer may connect any
/// pair of copies, waiting the canonical time in `[l, l + L)`; other activities
/// only join copies of the same trip, whose time difference lies in `[l, u]`.
/// Passengers start from the best copy of a boarding event. The result is never
/// below the routing value on the network itself.
pub fn evaluate_exact(
    net: &EventActivityNetwork,
    tt: &Timetable,
    od: &ODMatrix,
    exec: Execution,
) -> Result<Rational, RoutingError> {
    od.validate(net)?;
    let l = net.lcm_period();
    let copies: Vec<usize> = (0..net.num_events()).map(|v| (l / net.period(v)) as usize).collect();
    let total: usize = copies.iter().sum();
    if total > DEFAULT_EXPANSION_CAP {
        return Err(ExpansionError::TooLarge { events: total, cap: DEFAULT_EXPANSION_CAP }.into());
    }
    let pairs: u128 = net
        .activities()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.kind.is_routable())
        .map(|(k, _)| copies[net.tail(k)] as u128 * copies[net.head(k)] as u128)
        .sum();
    if pairs > EVALUATION_PAIR_CAP {
        return Err(RoutingError::TooLarge { size: pairs, cap: EVALUATION_PAIR_CAP });
    }
    let times = net.dense_times(tt)?;
    let mut first = vec![0usize; net.num_events()];
    for v in 1..net.num_events() {
        first[v] = first[v - 1] + copies[v - 1];
    }
    let mut arcs = Vec::new();
    for (k, a) in net.activities().iter().enumerate() {
        if !a.kind.is_routable() {
            continue;
        }
        let (i, j) = (net.tail(k), net.head(k));
        let transfer = a.kind == ActivityKind::Transfer;
        let mut pair = 0u32;
        for m in 0..copies[i] {
            for n in 0..copies[j] {
                let diff = times[j] + rat(n as i64 * net.period(j)) - times[i] - rat(m as i64 * net.period(i));
                let len = representative_from(&diff, l, a.lower);
                if transfer || len <= rat(a.upper) {
                    arcs.push(GraphArc {
                        tail: first[i] + m,
                        head: first[j] + n,
                        len,
                        key: (a.id.0, pair),
                        activity: k,
                        transfer,
                    });
                }
                pair += 1;
            }
        }
    }
    let graph = Graph::new(total, arcs);
    let nodes_of = |e: EventId| {
        let v = net.event_index(e).expect("validated");
        (first[v]..first[v] + copies[v]).collect()
    };
    let mut sum = zero();
    for r in route_on(&graph, od, nodes_of, exec) {
        match r {
            Ok((dm, length, _)) => sum += dm.count * length,
            Err(pair) => log::warn!("no route from `{}` to `{}` in the roll-out", pair.0, pair.1),
        }
    }
    Ok(sum)
}

/// Keeps the `⌈fraction · |transfers|⌉` heaviest transfer activities (ties by lower id).
///
/// When the removal would disconnect the network, the heaviest dropped transfers
/// that reconnect it are put back with weight zero.
pub fn trim_transfer_arcs(
    net: &EventActivityNetwork,
    weights: &BTreeMap<ActivityId, Rational>,
    fraction: Rational,
) -> Result<EventActivityNetwork, RoutingError> {
    if fraction <= zero() || fraction > rat(1) {
        return Err(RoutingError::InvalidFraction(fraction));
    }
    let weight = |id: ActivityId| weights.get(&id).copied().unwrap_or_else(zero);
    let mut transfers: Vec<usize> = (0..net.num_activities())
        .filter(|&k| net.activities()[k].kind == ActivityKind::Transfer)
        .collect();
    transfers.sort_by_key(|&k| {
        let a = &net.activities()[k];
        (Reverse(weight(a.id)), a.id)
    });
    let keep = (fraction * Rational::from_integer(transfers.len() as i128)).ceil().to_integer() as usize;
    let dropped: Vec<usize> = transfers[keep..].to_vec();
    let mut removed = vec![false; net.num_activities()];
    for &k in &dropped {
        removed[k] = true;
    }
    let mut uf = UnionFind::new(net.num_events());
    for k in (0..net.num_activities()).filter(|&k| !removed[k]) {
        uf.union(net.tail(k), net.head(k));
    }
    let mut restored = Vec::new();
    for &k in &dropped {
        if uf.union(net.tail(k), net.head(k)) {
            removed[k] = false;
            restored.push(k);
        }
    }
    let mut b = net.to_builder();
    let ids: Vec<ActivityId> = net.activities().iter().map(|a| a.id).collect();
    b.activities_mut().retain(|a| {
        let k = ids.binary_search(&a.id).expect("activity");
        !removed[k]
    });
    for a in b.activities_mut().iter_mut() {
        if restored.iter().any(|&k| ids[k] == a.id) {
            a.weight = zero();
        }
    }
    Ok(b.build()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Arc,
    #[default]
    Cycle,
}

#[derive(Debug, Clone)]
pub struct IterateConfig {
    pub formulation: Formulation,
    pub solve: SolveConfig,
    /// Largest `k`; step `k` keeps `k / max_k` of the transfers.
    pub max_k: u32,
    /// Node limit for the arc formulation's internal MIP solve.
    pub mip_node_limit: u64,
}

impl Default for IterateConfig {
    fn default() -> Self {
        Self { formulation: Formulation::Cycle, solve: SolveConfig::default(), max_k: 10, mip_node_limit: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: u32,
    pub kept_transfers: usize,
    pub status: SolveStatus,
    #[serde(with = "crate::num::serde_exact")]
    pub objective: Rational,
    #[serde(with = "crate::num::serde_exact")]
    pub travel_time: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateResult {
    pub timetable: Timetable,
    pub routing: RoutingState,
    pub history: Vec<IterationRecord>,
    pub converged: bool,
    /// Some timetabling step stopped at a limit; its incumbent was used.
    pub limit_reached: bool,
}

fn solve_cycle(net: &EventActivityNetwork, config: &SolveConfig) -> Result<Option<(SolveStatus, Rational, Timetable)>, RoutingError> {
    let (rooted, report) = root_instance(net)?;
    let tree = sharp_tree(&rooted)?;
    let basis = fundamental_basis(&rooted, &tree)?;
    let r = branch_and_bound(&rooted, &basis, config)?;
    let (Some(obj), Some(tt)) = (r.objective, r.timetable) else { return Ok(None) };
    let mut times = tt.times;
    for e in &report.added_events {
        times.remove(e);
    }
    Ok(Some((r.status, obj, Timetable { times }.normalized(net))))
}

fn solve_arc(net: &EventActivityNetwork, node_limit: u64) -> Result<Option<(SolveStatus, Rational, Timetable)>, RoutingError> {
    let model = build_arc_mpesp(net);
    let sol = solve_mip(&model, node_limit).map_err(|e| RoutingError::Mip(e.to_string()))?;
    let status = match sol.status {
        MipStatus::Optimal => SolveStatus::Optimal,
        MipStatus::NodeLimit => SolveStatus::LimitReached,
        MipStatus::Infeasible => return Ok(None),
        MipStatus::Unbounded => return Err(RoutingError::Mip("unbounded".into())),
    };
    let Some(values) = sol.values else { return Ok(None) };
    let mut times = BTreeMap::new();
    for (v, value) in model.variables.iter().zip(values) {
        if v.kind == VarKind::Time {
            times.insert(EventId(v.source), value);
        }
    }
    let objective = sol.objective.unwrap_or_else(zero);
    Ok(Some((status, objective, Timetable { times }.normalized(net))))
}

/// Alternates routing and timetabling while admitting more transfer activities.
///
/// Step `k` routes on the current lengths, reweights the activities by their
/// loads, keeps the heaviest `k / max_k` of the transfers and solves the trimmed
/// instance. It stops after `max_k` steps or when two consecutive routings load
/// the activities identically. The best iterate by routed travel time is returned.
pub fn iterate_timetable_routing(
    net: &EventActivityNetwork,
    od: &ODMatrix,
    config: &IterateConfig,
) -> Result<IterateResult, RoutingError> {
    let exec = config.solve.execution;
    let mut routing = route_passengers(net, od, &lower_bound_lengths(net), exec)?;
    let mut history = Vec::new();
    let mut best: Option<(Timetable, RoutingState)> = None;
    let mut converged = false;
    let mut limit_reached = false;
    for k in 1..=config.max_k {
        let weights: Vec<Rational> = net.activities().iter().map(|a| routing.weights[&a.id]).collect();
        let weighted = net.with_weights(&weights);
        let fraction = Rational::new(k as i128, config.max_k as i128);
        let trimmed = trim_transfer_arcs(&weighted, &routing.weights, fraction)?;
        let kept = trimmed.activities().iter().filter(|a| a.kind == ActivityKind::Transfer).count();
        let solved = match config.formulation {
            Formulation::Cycle => solve_cycle(&trimmed, &config.solve)?,
            Formulation::Arc => solve_arc(&trimmed, config.mip_node_limit)?,
        };
        let Some((status, objective, tt)) = solved else {
            return Err(RoutingError::NoTimetable { k });
        };
        limit_reached |= status == SolveStatus::LimitReached;
        let (tension, _) = net.tension_from_timetable(&tt)?;
        let next = route_passengers(net, od, &tension, exec)?;
        history.push(IterationRecord {
            k,
            kept_transfers: kept,
            status,
            objective,
            travel_time: next.travel_time_total,
        });
        if best.as_ref().is_none_or(|(_, b)| next.travel_time_total < b.travel_time_total) {
            best = Some((tt, next.clone()));
        }
        let same = next.weights == routing.weights;
        routing = next;
        if same {
            converged = true;
            break;
        }
    }
    let (timetable, routing) = best.expect("at least one iteration");
    Ok(IterateResult { timetable, routing, history, converged, limit_reached })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn figure_ten_underestimates() {
        let (net, od, tt) = fixtures::figure10();
        assert!(net.check_timetable(&tt).unwrap().is_feasible());
        let (x, _) = net.tension_from_timetable(&tt).unwrap();
        let routed = route_passengers(&net, &od, &x, Execution::Sequential).unwrap();
        assert_eq!(routed.travel_time_total, rat(25));
        assert_eq!(routed.paths[0].transfers, 2);
        assert_eq!(evaluate_exact(&net, &tt, &od, Execution::Sequential).unwrap(), rat(55));
        assert_eq!(evaluate_exact(&net, &tt, &od, Execution::Parallel).unwrap(), rat(55));
    }

    #[test]
    fn trimming_keeps_heaviest() {
        let (net, _, _) = fixtures::figure10();
        let transfers: Vec<ActivityId> = net
            .activities()
            .iter()
            .filter(|a| a.kind == ActivityKind::Transfer)
            .map(|a| a.id)
            .collect();
        let mut w: BTreeMap<ActivityId, Rational> = BTreeMap::new();
        w.insert(transfers[1], rat(3));
        let full = trim_transfer_arcs(&net, &w, rat(1)).unwrap();
        assert_eq!(full, net);
        let half = trim_transfer_arcs(&net, &w, Rational::new(1, 2)).unwrap();
        assert!(half.activity(transfers[1]).is_some());
        assert!(half.activity(transfers[0]).is_none());
        // equal weights: the lower id survives
        let tie = trim_transfer_arcs(&net, &BTreeMap::new(), Rational::new(1, 2)).unwrap();
        assert!(tie.activity(transfers[0]).is_some());
        assert!(trim_transfer_arcs(&net, &w, zero()).is_err());
    }

    #[test]
    fn unknown_station_is_rejected() {
        let (net, mut od, _) = fixtures::figure10();
        od.add_demand("A", "Z", rat(1)).unwrap();
        assert_eq!(
            route_passengers(&net, &od, &lower_bound_lengths(&net), Execution::Sequential),
            Err(RoutingError::UnknownStation("Z".into()))
        );
        assert!(od.add_demand("A", "D", rat(-1)).is_err());
    }

    #[test]
    fn iterate_on_figure_ten() {
        let (net, od, _) = fixtures::figure10();
        for formulation in [Formulation::Cycle, Formulation::Arc] {
            let config = IterateConfig { formulation, ..Default::default() };
            let r = iterate_timetable_routing(&net, &od, &config).unwrap();
            assert!(!r.history.is_empty());
            assert!(net.check_timetable(&r.timetable).unwrap().is_feasible());
            // two 5-minute transfers are achievable in the network view
            assert_eq!(r.routing.travel_time_total, rat(25));
        }
    }
}
