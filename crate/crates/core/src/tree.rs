//! Spanning trees, sharpness and fundamental cycle bases.
//!
//! A spanning tree is sharp when every co-tree arc `a` has `T_C = T_a` on its
//! fundamental cycle `C`. Then periodicity of the basis cycles is enough for a
//! traversal of the tree to produce a feasible timetable.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::network::{
    ActivityId, EventActivityNetwork, EventId, NetworkError, OrientedArc, Tension, Timetable,
    UnionFind,
};
use crate::num::{gcd, mod_floor, rat, zero, Rational};
use crate::quotient::{
    assign_leaders, build_quotient, is_harmonic, rooting_failures, RootingFailure,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanningTree {
    pub arcs: BTreeSet<ActivityId>,
    pub root: EventId,
}

impl SpanningTree {
    pub fn new(arcs: impl IntoIterator<Item = ActivityId>, root: EventId) -> Self {
        Self { arcs: arcs.into_iter().collect(), root }
    }
}

/// A co-tree arc whose fundamental cycle has a smaller period than the arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharpnessWitness {
    pub activity: ActivityId,
    pub arc_period: i64,
    pub cycle_period: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("tree is not spanning: {0}")]
    NotSpanning(String),
    #[error("instance is not harmonic")]
    NotHarmonic,
    #[error("instance is neither harmonic nor rooted: {0:?}")]
    NotRooted(Vec<RootingFailure>),
    #[error("constructed tree is not sharp at activity {}: T_a = {}, T_C = {}", .0.activity, .0.arc_period, .0.cycle_period)]
    NotSharp(SharpnessWitness),
    #[error("cycle basis does not belong to this network: {0}")]
    BasisMismatch(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Rooted view of a spanning tree over dense indices.
#[derive(Debug, Clone)]
pub struct TreeIndex {
    pub root: usize,
    /// Dense arc to the parent, `None` for the root.
    pub parent_arc: Vec<Option<usize>>,
    pub parent: Vec<usize>,
    pub depth: Vec<usize>,
    /// Breadth-first order starting at the root.
    pub order: Vec<usize>,
    pub in_tree: Vec<bool>,
}

impl TreeIndex {
    pub fn new(net: &EventActivityNetwork, tree: &SpanningTree) -> Result<Self, TreeError> {
        let n = net.num_events();
        let root = net
            .event_index(tree.root)
            .ok_or_else(|| TreeError::NotSpanning(format!("root {} is not an event", tree.root)))?;
        if tree.arcs.len() + 1 != n {
            return Err(TreeError::NotSpanning(format!(
                "{} arcs for {} events",
                tree.arcs.len(),
                n
            )));
        }
        let mut in_tree = vec![false; net.num_activities()];
        for id in &tree.arcs {
            let k = net
                .activity_index(*id)
                .ok_or_else(|| TreeError::NotSpanning(format!("unknown activity {id}")))?;
            in_tree[k] = true;
        }
        let mut parent_arc = vec![None; n];
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        parent[root] = root;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for inc in net.incidence(v) {
                if in_tree[inc.arc] && !seen[inc.other] {
                    seen[inc.other] = true;
                    parent[inc.other] = v;
                    parent_arc[inc.other] = Some(inc.arc);
                    depth[inc.other] = depth[v] + 1;
                    queue.push_back(inc.other);
                }
            }
        }
        if order.len() != n {
            return Err(TreeError::NotSpanning("tree arcs do not connect all events".into()));
        }
        Ok(Self { root, parent_arc, parent, depth, order, in_tree })
    }

    /// Tree path from `from` to `to` as dense `(arc, forward)` steps.
    pub fn path(&self, net: &EventActivityNetwork, from: usize, to: usize) -> Vec<(usize, bool)> {
        let (mut u, mut v) = (from, to);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while u != v {
            if self.depth[u] >= self.depth[v] {
                let k = self.parent_arc[u].expect("non-root has a parent arc");
                // moving u -> parent(u): forward iff the arc leaves u
                up.push((k, net.tail(k) == u));
                u = self.parent[u];
            } else {
                let k = self.parent_arc[v].expect("non-root has a parent arc");
                // moving parent(v) -> v: forward iff the arc enters v
                down.push((k, net.head(k) == v));
                v = self.parent[v];
            }
        }
        up.extend(down.into_iter().rev());
        up
    }

    /// Dense fundamental cycle of co-tree arc `k`: the arc forward, then the tree path back.
    pub fn fundamental_cycle(&self, net: &EventActivityNetwork, k: usize) -> Vec<(usize, bool)> {
        let mut cycle = vec![(k, true)];
        cycle.extend(self.path(net, net.head(k), net.tail(k)));
        cycle
    }
}

/// Returns the first co-tree arc (by id) with `T_C != T_a`, or `None` if the tree is sharp.
pub fn is_sharp(
    net: &EventActivityNetwork,
    tree: &SpanningTree,
) -> Result<Option<SharpnessWitness>, TreeError> {
    let index = TreeIndex::new(net, tree)?;
    for k in 0..net.num_activities() {
        if index.in_tree[k] {
            continue;
        }
        let cycle_period = index
            .fundamental_cycle(net, k)
            .iter()
            .fold(0, |g, &(arc, _)| gcd(g, net.arc_period_at(arc)));
        let arc_period = net.arc_period_at(k);
        if cycle_period != arc_period {
            return Ok(Some(SharpnessWitness {
                activity: net.activities()[k].id,
                arc_period,
                cycle_period,
            }));
        }
    }
    Ok(None)
}

fn kruskal(
    net: &EventActivityNetwork,
    uf: &mut UnionFind,
    arcs: impl IntoIterator<Item = usize>,
    chosen: &mut Vec<ActivityId>,
) {
    for k in arcs {
        if uf.union(net.tail(k), net.head(k)) {
            chosen.push(net.activities()[k].id);
        }
    }
}

/// Maximum-period spanning tree; ties by span, then by activity id.
pub fn sharp_tree_harmonic(net: &EventActivityNetwork) -> Result<SpanningTree, TreeError> {
    if !is_harmonic(net) {
        return Err(TreeError::NotHarmonic);
    }
    let mut order: Vec<usize> = (0..net.num_activities()).collect();
    order.sort_by_key(|&k| {
        let a = &net.activities()[k];
        (std::cmp::Reverse(net.arc_period_at(k)), a.span(), a.id)
    });
    let mut uf = UnionFind::new(net.num_events());
    let mut chosen = Vec::new();
    kruskal(net, &mut uf, order, &mut chosen);
    Ok(SpanningTree::new(chosen, net.events()[0].id))
}

/// Sharp tree from the leader structure of a rooted instance.
///
/// Each period component gets a minimum-span spanning tree, and each component
/// other than the `L`-component is attached to its leader by the minimum-span
/// arc between the two. Harmonic instances that are not rooted fall back to
/// [`sharp_tree_harmonic`].
pub fn sharp_tree_rooted(net: &EventActivityNetwork) -> Result<SpanningTree, TreeError> {
    let q = build_quotient(net);
    let failures = rooting_failures(&q);
    if !failures.is_empty() {
        return if is_harmonic(net) {
            sharp_tree_harmonic(net)
        } else {
            Err(TreeError::NotRooted(failures))
        };
    }
    let leaders = assign_leaders(&q).map_err(|_| TreeError::NotRooted(failures.clone()))?;
    let by_span = |k: &usize| {
        let a = &net.activities()[*k];
        (a.span(), a.id)
    };
    let comp = |v: usize| q.component_of[v];

    let mut inner: Vec<usize> = (0..net.num_activities())
        .filter(|&k| comp(net.tail(k)) == comp(net.head(k)))
        .collect();
    inner.sort_by_key(by_span);
    let mut uf = UnionFind::new(net.num_events());
    let mut chosen = Vec::new();
    kruskal(net, &mut uf, inner, &mut chosen);

    for (&k, &leader) in &leaders.leaders {
        let best = (0..net.num_activities())
            .filter(|&a| {
                let (ct, ch) = (comp(net.tail(a)), comp(net.head(a)));
                (ct == k && ch == leader) || (ct == leader && ch == k)
            })
            .min_by_key(by_span)
            .expect("a leader is adjacent in the quotient graph");
        kruskal(net, &mut uf, [best], &mut chosen);
    }

    if chosen.len() + 1 != net.num_events() {
        return Err(TreeError::NotSpanning("leader arcs do not connect all components".into()));
    }
    let root = q.nodes[leaders.root].members[0];
    let tree = SpanningTree::new(chosen, root);
    if let Some(witness) = is_sharp(net, &tree)? {
        return Err(TreeError::NotSharp(witness));
    }
    Ok(tree)
}

/// Harmonic construction when it applies, otherwise the leader construction.
pub fn sharp_tree(net: &EventActivityNetwork) -> Result<SpanningTree, TreeError> {
    if is_harmonic(net) {
        sharp_tree_harmonic(net)
    } else {
        sharp_tree_rooted(net)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalCycle {
    pub co_tree_arc: ActivityId,
    /// Starts with the co-tree arc traversed forward.
    pub oriented_arcs: Vec<OrientedArc>,
    pub period: i64,
    pub odijk_lower: i64,
    pub odijk_upper: i64,
}

impl FundamentalCycle {
    /// Number of admissible `z` values; zero when the bounds cross.
    pub fn range(&self) -> i64 {
        (self.odijk_upper - self.odijk_lower).max(-1) + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleBasis {
    pub tree: SpanningTree,
    pub cycles: Vec<FundamentalCycle>,
    /// `Π (b_C - a_C)`, saturating at `i64::MAX`; negative factors count as zero.
    pub width: i64,
    pub width_saturated: bool,
}

impl CycleBasis {
    /// True when some cycle has `a_C > b_C`, which rules out any feasible tension.
    pub fn has_empty_range(&self) -> bool {
        self.cycles.iter().any(|c| c.odijk_lower > c.odijk_upper)
    }

    /// Checks that all referenced activities and events exist in `net`.
    pub fn validate_for(&self, net: &EventActivityNetwork) -> Result<(), TreeError> {
        if net.event_index(self.tree.root).is_none() {
            return Err(TreeError::BasisMismatch(format!("unknown root {}", self.tree.root)));
        }
        for id in self
            .tree
            .arcs
            .iter()
            .chain(self.cycles.iter().flat_map(|c| c.oriented_arcs.iter().map(|s| &s.activity)))
        {
            if net.activity_index(*id).is_none() {
                return Err(TreeError::BasisMismatch(format!("unknown activity {id}")));
            }
        }
        Ok(())
    }
}

/// Odijk bounds `a_C = ⌈(Σ⁺l − Σ⁻u)/T_C⌉`, `b_C = ⌊(Σ⁺u − Σ⁻l)/T_C⌋`.
pub fn odijk_bounds(net: &EventActivityNetwork, cycle: &[(usize, bool)], period: i64) -> (i64, i64) {
    let (mut lo, mut hi) = (0i128, 0i128);
    for &(k, forward) in cycle {
        let a = &net.activities()[k];
        if forward {
            lo += a.lower as i128;
            hi += a.upper as i128;
        } else {
            lo -= a.upper as i128;
            hi -= a.lower as i128;
        }
    }
    let p = period as i128;
    (num_integer::Integer::div_ceil(&lo, &p) as i64, num_integer::Integer::div_floor(&hi, &p) as i64)
}

pub fn fundamental_basis(
    net: &EventActivityNetwork,
    tree: &SpanningTree,
) -> Result<CycleBasis, TreeError> {
    let index = TreeIndex::new(net, tree)?;
    let mut cycles = Vec::new();
    let mut width = 1i64;
    let mut width_saturated = false;
    for k in 0..net.num_activities() {
        if index.in_tree[k] {
            continue;
        }
        let dense = index.fundamental_cycle(net, k);
        let period = dense.iter().fold(0, |g, &(arc, _)| gcd(g, net.arc_period_at(arc)));
        let (odijk_lower, odijk_upper) = odijk_bounds(net, &dense, period);
        let factor = (odijk_upper - odijk_lower).max(0);
        match width.checked_mul(factor) {
            Some(w) => width = w,
            None => {
                width = i64::MAX;
                width_saturated = true;
            }
        }
        cycles.push(FundamentalCycle {
            co_tree_arc: net.activities()[k].id,
            oriented_arcs: dense
                .iter()
                .map(|&(arc, forward)| OrientedArc { activity: net.activities()[arc].id, forward })
                .collect(),
            period,
            odijk_lower,
            odijk_upper,
        });
    }
    Ok(CycleBasis { tree: tree.clone(), cycles, width, width_saturated })
}

/// Signed sums of `x` along the tree from the root, each reduced modulo its event's period.
pub fn timetable_from_tension_tree(
    net: &EventActivityNetwork,
    x: &Tension,
    tree: &SpanningTree,
) -> Result<Timetable, TreeError> {
    let values = net.dense_tension(x)?;
    let index = TreeIndex::new(net, tree)?;
    Ok(net.timetable_from_dense(&traverse(net, &index, &values)))
}

/// Dense traversal used by the solver.
pub(crate) fn traverse(net: &EventActivityNetwork, index: &TreeIndex, values: &[Rational]) -> Vec<Rational> {
    let mut raw = vec![zero(); net.num_events()];
    for &v in &index.order[1..] {
        let k = index.parent_arc[v].expect("non-root has a parent arc");
        let p = index.parent[v];
        raw[v] = if net.head(k) == v { raw[p] + values[k] } else { raw[p] - values[k] };
    }
    raw.iter().enumerate().map(|(v, t)| mod_floor(t, net.period(v))).collect()
}

/// Integer cycle offsets `z_C = γ_Cᵀx / T_C`; `None` if some cycle sum is not a multiple.
pub fn cycle_offsets(
    net: &EventActivityNetwork,
    basis: &CycleBasis,
    x: &Tension,
) -> Result<Option<Vec<i64>>, TreeError> {
    let values = net.dense_tension(x)?;
    let mut out = Vec::with_capacity(basis.cycles.len());
    for c in &basis.cycles {
        let dense = net.dense_walk(&c.oriented_arcs)?;
        let sum = dense
            .iter()
            .fold(zero(), |acc, &(k, s)| acc + values[k] * rat(s));
        let z = sum / rat(c.period);
        if !z.is_integer() {
            return Ok(None);
        }
        out.push(z.to_integer() as i64);
    }
    Ok(Some(out))
}
