//! Period components, the quotient graph and the rooting transformation.
//!
//! For a period `T`, `G^T` is the subgraph of events with period `T` and the
//! activities between them. Each connected component of some `G^T` becomes one
//! node of the quotient graph; two nodes are adjacent when an activity crosses
//! them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::network::{
    ActivityId, ActivityKind, EventActivityNetwork, EventId, NetworkBuilder, NetworkError,
    UnionFind,
};
use crate::num::{gcd, zero};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientNode {
    pub period: i64,
    /// Member events in ascending id order.
    pub members: Vec<EventId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGraph {
    /// Components ordered by their smallest member id.
    pub nodes: Vec<QuotientNode>,
    /// Unordered adjacent pairs `(a, b)` with `a < b`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Component of every event, by dense event index.
    pub component_of: Vec<usize>,
    /// Least common multiple `L` of all periods.
    pub lcm: i64,
}

impl QuotientGraph {
    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == node {
                    Some(b)
                } else if b == node {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Components whose period equals `L`.
    pub fn lcm_components(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&k| self.nodes[k].period == self.lcm).collect()
    }

    /// Neighbours with period `qT`, `q >= 2`, ordered by `(q, id)`.
    fn admissible_leaders(&self, node: usize) -> Vec<usize> {
        let t = self.nodes[node].period;
        let mut out: Vec<usize> = self
            .neighbors(node)
            .into_iter()
            .filter(|&m| {
                let p = self.nodes[m].period;
                p > t && p % t == 0
            })
            .collect();
        out.sort_by_key(|&m| (self.nodes[m].period / t, m));
        out
    }
}

pub fn build_quotient(net: &EventActivityNetwork) -> QuotientGraph {
    let n = net.num_events();
    let mut uf = UnionFind::new(n);
    for k in 0..net.num_activities() {
        let (t, h) = (net.tail(k), net.head(k));
        if net.period(t) == net.period(h) {
            uf.union(t, h);
        }
    }
    // events are sorted by id, so the first member seen fixes the component order
    let mut index_of_root = BTreeMap::new();
    let mut nodes: Vec<QuotientNode> = Vec::new();
    let mut component_of = vec![0; n];
    for (v, slot) in component_of.iter_mut().enumerate() {
        let root = uf.find(v);
        let k = *index_of_root.entry(root).or_insert_with(|| {
            nodes.push(QuotientNode { period: net.period(v), members: Vec::new() });
            nodes.len() - 1
        });
        nodes[k].members.push(net.events()[v].id);
        *slot = k;
    }
    let mut edges = BTreeSet::new();
    for k in 0..net.num_activities() {
        let (a, b) = (component_of[net.tail(k)], component_of[net.head(k)]);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    QuotientGraph { nodes, edges: edges.into_iter().collect(), component_of, lcm: net.lcm_period() }
}

/// Which rootedness condition fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum RootingFailure {
    /// (i) no event has period `L`.
    LcmMissing { lcm: i64 },
    /// (ii) the events with period `L` form several components.
    LcmDisconnected { components: Vec<usize> },
    /// (iii) a component has no neighbour whose period is a proper multiple of its own.
    NoMultipleNeighbor { component: usize, period: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Classification {
    Harmonic,
    Rooted,
    Neither { failures: Vec<RootingFailure> },
}

/// True when the periods form a chain under divisibility.
pub fn is_harmonic(net: &EventActivityNetwork) -> bool {
    net.periods().windows(2).all(|w| w[1] % w[0] == 0)
}

/// Failed rootedness conditions; empty iff the instance is rooted.
pub fn rooting_failures(q: &QuotientGraph) -> Vec<RootingFailure> {
    let mut failures = Vec::new();
    let lcm_components = q.lcm_components();
    if lcm_components.is_empty() {
        failures.push(RootingFailure::LcmMissing { lcm: q.lcm });
    } else if lcm_components.len() > 1 {
        failures.push(RootingFailure::LcmDisconnected { components: lcm_components });
    }
    for (k, node) in q.nodes.iter().enumerate() {
        if node.period != q.lcm && q.admissible_leaders(k).is_empty() {
            failures.push(RootingFailure::NoMultipleNeighbor { component: k, period: node.period });
        }
    }
    failures
}

/// Harmonic takes precedence; otherwise rooted, otherwise the failing conditions.
pub fn classify(net: &EventActivityNetwork) -> Classification {
    if is_harmonic(net) {
        return Classification::Harmonic;
    }
    let failures = rooting_failures(&build_quotient(net));
    if failures.is_empty() {
        Classification::Rooted
    } else {
        Classification::Neither { failures }
    }
}

pub fn is_rooted(net: &EventActivityNetwork) -> bool {
    rooting_failures(&build_quotient(net)).is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootingError {
    #[error("instance is not rooted: {0:?}")]
    NotRooted(Vec<RootingFailure>),
}

/// Leader of every component except the one with period `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeaderMap {
    pub leaders: BTreeMap<usize, usize>,
    pub root: usize,
}

/// Each component is led by the neighbour with period `qT` minimising `q`;
/// ties go to the smallest component id.
pub fn assign_leaders(q: &QuotientGraph) -> Result<LeaderMap, RootingError> {
    let failures = rooting_failures(q);
    if !failures.is_empty() {
        return Err(RootingError::NotRooted(failures));
    }
    let root = q.lcm_components()[0];
    let leaders = (0..q.nodes.len())
        .filter(|&k| k != root)
        .map(|k| (k, q.admissible_leaders(k)[0]))
        .collect();
    Ok(LeaderMap { leaders, root })
}

/// Modifications made by [`root_instance`].
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RootingReport {
    pub added_events: Vec<EventId>,
    pub added_activities: Vec<ActivityId>,
}

impl RootingReport {
    pub fn is_empty(&self) -> bool {
        self.added_events.is_empty() && self.added_activities.is_empty()
    }
}

/// Turns any instance into a rooted one with the same optimal value.
///
/// Adds an event with period `L` when none exists, joins extra `L`-components,
/// and links every component lacking a proper-multiple neighbour to the
/// `L`-event. Added activities are virtual, weightless and span `[0, T_a - 1]`.
pub fn root_instance(
    net: &EventActivityNetwork,
) -> Result<(EventActivityNetwork, RootingReport), NetworkError> {
    let q = build_quotient(net);
    let failures = rooting_failures(&q);
    if failures.is_empty() {
        return Ok((net.clone(), RootingReport::default()));
    }
    let mut b: NetworkBuilder = net.to_builder();
    let mut report = RootingReport::default();
    let first_event = |k: usize| q.nodes[k].members[0];
    let lcm_components = q.lcm_components();
    let hub = match lcm_components.first() {
        Some(&k) => first_event(k),
        None => {
            let id = b.add_event(b.next_event_id(), q.lcm, "lcm");
            report.added_events.push(id);
            id
        }
    };
    let mut link = |b: &mut NetworkBuilder, from: EventId, period: i64| {
        let arc_period = gcd(period, q.lcm);
        let id = b.next_activity_id();
        let id = b.add_activity(id, from, hub, 0, arc_period - 1, zero(), ActivityKind::Virtual);
        report.added_activities.push(id);
    };
    for &k in lcm_components.iter().skip(1) {
        link(&mut b, first_event(k), q.lcm);
    }
    for failure in &failures {
        if let RootingFailure::NoMultipleNeighbor { component, period } = *failure {
            link(&mut b, first_event(component), period);
        }
    }
    Ok((b.build()?, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::num::rat;

    fn chain(periods: &[i64]) -> EventActivityNetwork {
        let mut b = NetworkBuilder::new();
        let e: Vec<_> = periods.iter().enumerate().map(|(k, &p)| b.add_event(k as u32, p, "")).collect();
        for k in 1..e.len() {
            b.add_activity(k as u32, e[k - 1], e[k], 0, 0, rat(1), ActivityKind::Drive);
        }
        b.build().unwrap()
    }

    #[test]
    fn quotient_shapes() {
        let q = build_quotient(&chain(&[10, 10, 10]));
        assert_eq!(q.nodes.len(), 1);
        assert!(q.edges.is_empty());
        let q = build_quotient(&chain(&[10, 20, 10]));
        assert_eq!(q.nodes.len(), 3);
        assert_eq!(q.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(q.component_of, vec![0, 1, 2]);
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&chain(&[30, 60, 30])), Classification::Harmonic);
        assert_eq!(classify(&chain(&[60])), Classification::Harmonic);
        match classify(&chain(&[60, 75, 100])) {
            Classification::Neither { failures } => {
                assert_eq!(failures[0], RootingFailure::LcmMissing { lcm: 300 })
            }
            other => panic!("unexpected {other:?}"),
        }
        // 6 and 4 both divide the 12 between them
        assert_eq!(classify(&chain(&[6, 12, 4])), Classification::Rooted);
        match classify(&chain(&[12, 6, 12, 4])) {
            Classification::Neither { failures } => assert_eq!(
                failures,
                vec![RootingFailure::LcmDisconnected { components: vec![0, 2] }]
            ),
            other => panic!("unexpected {other:?}"),
        }
        match classify(&chain(&[12, 4, 6])) {
            Classification::Neither { failures } => assert_eq!(
                failures,
                vec![RootingFailure::NoMultipleNeighbor { component: 2, period: 6 }]
            ),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn leaders_minimise_the_multiple() {
        let q = build_quotient(&chain(&[10, 20]));
        let leaders = assign_leaders(&q).unwrap();
        assert_eq!(leaders.leaders[&0], 1);
        // a period-5 event between a 10 and a 15 event, all under a 30
        let mut b = NetworkBuilder::new();
        let e: Vec<_> = [5, 15, 10, 30].iter().enumerate().map(|(k, &p)| b.add_event(k as u32, p, "")).collect();
        for (k, (t, h)) in [(0, 1), (0, 2), (1, 3), (2, 3)].into_iter().enumerate() {
            b.add_activity(k as u32, e[t], e[h], 0, 0, rat(1), ActivityKind::Drive);
        }
        let q = build_quotient(&b.build().unwrap());
        let leaders = assign_leaders(&q).unwrap();
        assert_eq!(leaders.leaders[&0], 2);
        assert_eq!(leaders.root, 3);
        assert!(assign_leaders(&build_quotient(&chain(&[6, 10]))).is_err());
    }

    #[test]
    fn rooting_the_coprime_triangle() {
        let net = fixtures::triangle(6, 10, 15);
        let (rooted, report) = root_instance(&net).unwrap();
        assert_eq!(report.added_events, vec![EventId(3)]);
        assert_eq!(report.added_activities.len(), 3);
        assert!(is_rooted(&rooted));
        assert_eq!(rooted.event(EventId(3)).unwrap().period, 30);
        for id in &report.added_activities {
            let a = rooted.activity(*id).unwrap();
            assert_eq!(a.kind, ActivityKind::Virtual);
            assert_eq!((a.lower, a.upper), (0, rooted.arc_period(*id).unwrap() - 1));
        }
        let (again, report) = root_instance(&rooted).unwrap();
        assert!(report.is_empty());
        assert_eq!(again, rooted);
    }

    #[test]
    fn rooting_joins_lcm_components() {
        let net = chain(&[12, 6, 12, 4]);
        let (rooted, report) = root_instance(&net).unwrap();
        assert!(report.added_events.is_empty());
        assert_eq!(report.added_activities.len(), 1);
        assert!(is_rooted(&rooted));
    }
}
