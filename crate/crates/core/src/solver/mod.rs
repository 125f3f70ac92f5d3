//! Exact branch and bound over the integer cycle offsets of a sharp basis.
//!
//! Fixing some offsets `z_C` turns the cycle formulation into a minimum-cost
//! tension problem on the tree arcs plus the fixed co-tree arcs; unfixed co-tree
//! arcs decouple and sit at their lower bound. That relaxation is solved exactly
//! through its flow dual, so bounds and incumbents are exact rationals.

mod oracle;
mod tension_lp;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_traits::Signed;
use serde::{Deserialize, Serialize};

pub use oracle::{arc_enumeration_optimum, brute_force_optimum, BRUTE_FORCE_CAP};

use crate::exec::Execution;
use crate::network::{ActivityId, EventActivityNetwork, NetworkError, Tension, Timetable};
use crate::num::{common_denominator, rat, Rational};
use crate::tree::{is_sharp, traverse, CycleBasis, SharpnessWitness, TreeError, TreeIndex};
use tension_lp::{min_cost_tension, DiffArc};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("basis tree is not sharp at activity {}", .0.activity)]
    NonSharpBasis(SharpnessWitness),
    #[error("expected {expected} cycle offsets, got {found}")]
    OffsetCount { expected: usize, found: usize },
    #[error("offset {value} of cycle {cycle} is outside [{lower}, {upper}]")]
    OffsetOutOfRange { cycle: ActivityId, value: i64, lower: i64, upper: i64 },
    #[error("search space of {size} timetables exceeds the cap {cap}")]
    CapExceeded { size: u128, cap: u64 },
    #[error("objective does not fit in 64-bit integers after scaling")]
    Overflow,
    #[error("solver produced an infeasible timetable: {0}")]
    Internal(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Default)]
pub struct SolveConfig {
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    pub warm_start: Option<Timetable>,
    pub execution: Execution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    /// A node or time limit stopped the search; the incumbent, if any, is feasible.
    LimitReached,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::LimitReached => "limit_reached",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: Option<Rational>,
    pub timetable: Option<Timetable>,
    pub tension: Option<Tension>,
    /// Cycle offsets keyed by co-tree arc.
    pub offsets: BTreeMap<ActivityId, i64>,
    pub node_count: u64,
    pub elapsed: Duration,
}

struct PreparedCycle {
    cotree: usize,
    period: i64,
    lower: i64,
    upper: i64,
    walk: Vec<(usize, i64)>,
}

/// Dense data shared by every node of the search.
struct Prepared<'a> {
    net: &'a EventActivityNetwork,
    index: TreeIndex,
    tree_arcs: Vec<usize>,
    cycles: Vec<PreparedCycle>,
    weights: Vec<i128>,
    scale: i128,
}

impl<'a> Prepared<'a> {
    fn new(net: &'a EventActivityNetwork, basis: &CycleBasis) -> Result<Self, SolverError> {
        basis.validate_for(net)?;
        if let Some(w) = is_sharp(net, &basis.tree)? {
            return Err(SolverError::NonSharpBasis(w));
        }
        let index = TreeIndex::new(net, &basis.tree)?;
        let tree_arcs = (0..net.num_activities()).filter(|&k| index.in_tree[k]).collect();
        let mut cycles = Vec::with_capacity(basis.cycles.len());
        for c in &basis.cycles {
            let cotree = net
                .activity_index(c.co_tree_arc)
                .ok_or_else(|| TreeError::BasisMismatch(format!("unknown activity {}", c.co_tree_arc)))?;
            cycles.push(PreparedCycle {
                cotree,
                period: c.period,
                lower: c.odijk_lower,
                upper: c.odijk_upper,
                walk: net.dense_walk(&c.oriented_arcs)?,
            });
        }
        let scale = common_denominator(net.activities().iter().map(|a| &a.weight));
        let weights = net
            .activities()
            .iter()
            .map(|a| (a.weight * Rational::from_integer(scale)).to_integer())
            .collect();
        Ok(Self { net, index, tree_arcs, cycles, weights, scale })
    }

    /// Optimal tension with the given offsets fixed, and its scaled objective.
    fn relax(&self, z: &[Option<i64>]) -> Option<(i128, Vec<i128>)> {
        let net = self.net;
        let mut arcs = Vec::with_capacity(self.tree_arcs.len() + self.cycles.len());
        let mut shifts = Vec::with_capacity(arcs.capacity());
        let diff = |k: usize, d: i128| DiffArc {
            tail: net.tail(k),
            head: net.head(k),
            lower: net.activities()[k].lower as i128 - d,
            upper: net.activities()[k].upper as i128 - d,
            weight: self.weights[k],
        };
        for &k in &self.tree_arcs {
            arcs.push(diff(k, 0));
            shifts.push((k, 0));
        }
        let mut x = vec![0i128; net.num_activities()];
        for (c, zc) in self.cycles.iter().zip(z) {
            match zc {
                Some(v) => {
                    let d = c.period as i128 * *v as i128;
                    arcs.push(diff(c.cotree, d));
                    shifts.push((c.cotree, d));
                }
                None => x[c.cotree] = net.activities()[c.cotree].lower as i128,
            }
        }
        let pi = min_cost_tension(net.num_events(), &arcs)?;
        for (a, (k, d)) in arcs.iter().zip(shifts) {
            x[k] = pi[a.head] - pi[a.tail] + d;
        }
        let objective = x.iter().zip(&self.weights).map(|(x, w)| x * w).sum();
        Some((objective, x))
    }

    fn cycle_sum(&self, c: &PreparedCycle, x: &[Rational]) -> Rational {
        c.walk.iter().fold(Rational::from_integer(0), |acc, &(k, s)| acc + x[k] * rat(s))
    }

    fn check_offsets(&self, z: &[Option<i64>]) -> Result<(), SolverError> {
        if z.len() != self.cycles.len() {
            return Err(SolverError::OffsetCount { expected: self.cycles.len(), found: z.len() });
        }
        for (c, zc) in self.cycles.iter().zip(z) {
            if let Some(v) = *zc {
                if v < c.lower || v > c.upper {
                    return Err(SolverError::OffsetOutOfRange {
                        cycle: self.net.activities()[c.cotree].id,
                        value: v,
                        lower: c.lower,
                        upper: c.upper,
                    });
                }
            }
        }
        Ok(())
    }

    fn unscale(&self, v: i128) -> Rational {
        Rational::new(v, self.scale)
    }
}

/// Minimum objective with the offsets in `z` fixed (`None` leaves a cycle free).
///
/// Returns `None` when the fixed offsets admit no tension within bounds. The
/// value is a lower bound for every completion of `z` and grows as more offsets
/// are fixed.
pub fn solve_fixed_tension(
    net: &EventActivityNetwork,
    basis: &CycleBasis,
    z: &[Option<i64>],
) -> Result<Option<(Rational, Tension)>, SolverError> {
    let p = Prepared::new(net, basis)?;
    p.check_offsets(z)?;
    Ok(p.relax(z).map(|(obj, x)| {
        let x: Vec<Rational> = x.into_iter().map(Rational::from_integer).collect();
        (p.unscale(obj), net.tension_from_dense(&x))
    }))
}

struct Incumbent {
    objective: Rational,
    x: Vec<Rational>,
}

struct Search<'p, 'a> {
    p: &'p Prepared<'a>,
    order: Vec<usize>,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    nodes: AtomicU64,
    stopped: AtomicBool,
    best: Mutex<Option<Incumbent>>,
}

impl Search<'_, '_> {
    fn bound_is_dominated(&self, scaled: i128) -> bool {
        let best = self.best.lock().expect("incumbent lock");
        best.as_ref().is_some_and(|b| self.p.unscale(scaled) >= b.objective)
    }

    fn offer(&self, scaled: i128, x: Vec<i128>) {
        let objective = self.p.unscale(scaled);
        let mut best = self.best.lock().expect("incumbent lock");
        if best.as_ref().is_none_or(|b| objective < b.objective) {
            *best = Some(Incumbent { objective, x: x.into_iter().map(Rational::from_integer).collect() });
        }
    }

    fn out_of_budget(&self) -> bool {
        if self.stopped.load(Ordering::Relaxed) {
            return true;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let over = self.node_limit.is_some_and(|l| n > l)
            || self.deadline.is_some_and(|d| Instant::now() >= d);
        if over {
            self.stopped.store(true, Ordering::Relaxed);
        }
        over
    }

    /// Solves the node, then returns the branching cycle and its candidate values.
    fn expand(&self, z: &[Option<i64>]) -> Option<(usize, Vec<i64>)> {
        if self.out_of_budget() {
            return None;
        }
        let (obj, x) = self.p.relax(z)?;
        if self.bound_is_dominated(obj) {
            return None;
        }
        let xr: Vec<Rational> = x.iter().map(|&v| Rational::from_integer(v)).collect();
        // first free cycle (in branching order) whose relaxed sum is not a multiple of T_C
        let pick = self.order.iter().copied().find_map(|c| {
            if z[c].is_some() {
                return None;
            }
            let cyc = &self.p.cycles[c];
            let ratio = self.p.cycle_sum(cyc, &xr) / rat(cyc.period);
            (!ratio.is_integer()).then_some((c, ratio))
        });
        let Some((c, ratio)) = pick else {
            // the relaxation optimum is feasible, so it is optimal for this subtree
            self.offer(obj, x);
            return None;
        };
        let cyc = &self.p.cycles[c];
        let mut values: Vec<i64> = (cyc.lower..=cyc.upper).collect();
        values.sort_by_key(|&v| ((rat(v) - ratio).abs(), v));
        Some((c, values))
    }

    fn visit(&self, z: &mut Vec<Option<i64>>) {
        let Some((c, values)) = self.expand(z) else { return };
        for v in values {
            z[c] = Some(v);
            self.visit(z);
            z[c] = None;
            if self.stopped.load(Ordering::Relaxed) {
                return;
            }
        }
    }

    fn run(&self, z: Vec<Option<i64>>, exec: Execution) {
        let mut z = z;
        if !exec.is_parallel() {
            self.visit(&mut z);
            return;
        }
        let Some((c, values)) = self.expand(&z) else { return };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            values.into_par_iter().for_each(|v| {
                let mut z = z.clone();
                z[c] = Some(v);
                self.visit(&mut z);
            });
        }
        #[cfg(not(feature = "parallel"))]
        for v in values {
            z[c] = Some(v);
            self.visit(&mut z);
            z[c] = None;
        }
    }
}

/// Exact branch and bound on the cycle formulation of a sharp basis.
pub fn branch_and_bound(
    net: &EventActivityNetwork,
    basis: &CycleBasis,
    config: &SolveConfig,
) -> Result<SolveResult, SolverError> {
    let start = Instant::now();
    let p = Prepared::new(net, basis)?;
    let mut order: Vec<usize> = (0..p.cycles.len()).collect();
    order.sort_by_key(|&c| {
        let cyc = &p.cycles[c];
        (cyc.upper - cyc.lower, net.activities()[cyc.cotree].id)
    });
    let search = Search {
        p: &p,
        order,
        node_limit: config.node_limit,
        deadline: config.time_limit.map(|t| start + t),
        nodes: AtomicU64::new(0),
        stopped: AtomicBool::new(false),
        best: Mutex::new(None),
    };
    if let Some(tt) = &config.warm_start {
        let (x, report) = net.tension_from_timetable(tt)?;
        if report.is_feasible() {
            let values = net.dense_tension(&x)?;
            let objective = net.objective_dense(&values);
            *search.best.lock().expect("incumbent lock") = Some(Incumbent { objective, x: values });
        } else {
            log::warn!("warm start timetable is infeasible, ignoring it");
        }
    }
    if !basis.has_empty_range() {
        search.run(vec![None; p.cycles.len()], config.execution);
    }
    let node_count = search.nodes.load(Ordering::Relaxed);
    let stopped = search.stopped.load(Ordering::Relaxed);
    let best = search.best.into_inner().expect("incumbent lock");
    let mut result = SolveResult {
        status: if stopped { SolveStatus::LimitReached } else { SolveStatus::Infeasible },
        objective: None,
        timetable: None,
        tension: None,
        offsets: BTreeMap::new(),
        node_count,
        elapsed: Duration::ZERO,
    };
    if let Some(best) = best {
        let times = traverse(net, &p.index, &best.x);
        let timetable = net.timetable_from_dense(&times);
        let (canonical, report) = net.tension_from_timetable(&timetable)?;
        if !report.is_feasible() {
            return Err(SolverError::Internal(format!("{:?}", report.violations)));
        }
        let tension = net.tension_from_dense(&best.x);
        if canonical != tension {
            return Err(SolverError::Internal("tension is not canonical".into()));
        }
        for c in &p.cycles {
            let sum = p.cycle_sum(c, &best.x);
            result
                .offsets
                .insert(net.activities()[c.cotree].id, (sum / rat(c.period)).to_integer() as i64);
        }
        if !stopped {
            result.status = SolveStatus::Optimal;
        }
        result.objective = Some(best.objective);
        result.timetable = Some(timetable);
        result.tension = Some(tension);
    }
    result.elapsed = start.elapsed();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::tree::{fundamental_basis, sharp_tree};

    fn basis(net: &EventActivityNetwork) -> CycleBasis {
        fundamental_basis(net, &sharp_tree(net).unwrap()).unwrap()
    }

    #[test]
    fn figure_three_optimum() {
        let net = fixtures::figure3();
        let b = basis(&net);
        for execution in [Execution::Sequential, Execution::Parallel] {
            let r = branch_and_bound(&net, &b, &SolveConfig { execution, ..Default::default() }).unwrap();
            assert_eq!(r.status, SolveStatus::Optimal);
            assert_eq!(r.objective, Some(rat(32)));
            assert!(net.check_timetable(r.timetable.as_ref().unwrap()).unwrap().is_feasible());
        }
    }

    #[test]
    fn fixed_offsets_bound_monotonically() {
        let net = fixtures::figure3();
        let b = basis(&net);
        let free = solve_fixed_tension(&net, &b, &vec![None; b.cycles.len()]).unwrap().unwrap().0;
        for c in 0..b.cycles.len() {
            for v in b.cycles[c].odijk_lower..=b.cycles[c].odijk_upper {
                let mut z = vec![None; b.cycles.len()];
                z[c] = Some(v);
                if let Some((obj, x)) = solve_fixed_tension(&net, &b, &z).unwrap() {
                    assert!(obj >= free);
                    assert_eq!(net.objective(&x).unwrap(), obj);
                }
            }
        }
    }

    #[test]
    fn offsets_are_validated() {
        let net = fixtures::figure3();
        let b = basis(&net);
        let mut z = vec![None; b.cycles.len()];
        z[0] = Some(b.cycles[0].odijk_upper + 1);
        assert!(matches!(
            solve_fixed_tension(&net, &b, &z),
            Err(SolverError::OffsetOutOfRange { .. })
        ));
        assert!(matches!(solve_fixed_tension(&net, &b, &[]), Err(SolverError::OffsetCount { .. })));
    }

    #[test]
    fn non_sharp_basis_is_rejected() {
        let net = fixtures::figure3();
        let b = fundamental_basis(&net, &fixtures::figure3_tree_b(&net)).unwrap();
        assert!(matches!(
            branch_and_bound(&net, &b, &SolveConfig::default()),
            Err(SolverError::NonSharpBasis(_))
        ));
    }

    #[test]
    fn node_limit_stops_the_search() {
        let net = fixtures::figure3();
        let b = basis(&net);
        let config = SolveConfig { node_limit: Some(0), ..Default::default() };
        let r = branch_and_bound(&net, &b, &config).unwrap();
        assert_eq!(r.status, SolveStatus::LimitReached);
        assert_eq!(r.objective, None);
    }

    #[test]
    fn warm_start_is_kept_when_optimal() {
        let net = fixtures::figure3();
        let b = basis(&net);
        let r = branch_and_bound(&net, &b, &SolveConfig::default()).unwrap();
        let config = SolveConfig {
            warm_start: r.timetable.clone(),
            execution: Execution::Sequential,
            ..Default::default()
        };
        let again = branch_and_bound(&net, &b, &config).unwrap();
        assert_eq!(again.objective, r.objective);
        assert_eq!(again.status, SolveStatus::Optimal);
    }
}
