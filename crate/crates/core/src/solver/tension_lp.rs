//! Minimum-cost tension problems solved through their min-cost flow dual.
//!
//! Given difference constraints `lower ≤ π_head − π_tail ≤ upper` and
//! nonnegative weights, find `π` minimising `Σ w (π_head − π_tail)`. The dual is
//! an uncapacitated transshipment problem; successive shortest paths with
//! Bellman-Ford start potentials solve it exactly over the integers, and the
//! final node potentials give `π`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct DiffArc {
    pub tail: usize,
    pub head: usize,
    pub lower: i128,
    pub upper: i128,
    pub weight: i128,
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    from: usize,
    to: usize,
    cost: i128,
    flow: i128,
}

/// Returns optimal potentials, or `None` when the constraints are contradictory.
pub(crate) fn min_cost_tension(n: usize, arcs: &[DiffArc]) -> Option<Vec<i128>> {
    let mut edges = Vec::with_capacity(2 * arcs.len());
    let mut supply = vec![0i128; n];
    for a in arcs {
        // π_h − π_t ≥ lower  ->  edge t→h with cost −lower
        edges.push(Edge { from: a.tail, to: a.head, cost: -a.lower, flow: 0 });
        // π_t − π_h ≥ −upper ->  edge h→t with cost upper
        edges.push(Edge { from: a.head, to: a.tail, cost: a.upper, flow: 0 });
        supply[a.tail] += a.weight;
        supply[a.head] -= a.weight;
    }
    let mut out_edges = vec![Vec::new(); n];
    let mut in_edges = vec![Vec::new(); n];
    for (k, e) in edges.iter().enumerate() {
        out_edges[e.from].push(k);
        in_edges[e.to].push(k);
    }

    // Bellman-Ford from a virtual source attached to every node
    let mut phi = vec![0i128; n];
    let mut changed = true;
    let mut rounds = 0;
    while changed {
        changed = false;
        rounds += 1;
        if rounds > n + 1 {
            return None;
        }
        for e in &edges {
            if phi[e.from] + e.cost < phi[e.to] {
                phi[e.to] = phi[e.from] + e.cost;
                changed = true;
            }
        }
    }

    const INF: i128 = i128::MAX / 4;
    loop {
        if supply.iter().all(|&s| s <= 0) {
            break;
        }
        let mut dist = vec![INF; n];
        // parent: (edge index, traversed forward)
        let mut parent: Vec<Option<(usize, bool)>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        for v in 0..n {
            if supply[v] > 0 {
                dist[v] = 0;
                heap.push(Reverse((0i128, v)));
            }
        }
        let mut done = vec![false; n];
        while let Some(Reverse((d, v))) = heap.pop() {
            if done[v] || d > dist[v] {
                continue;
            }
            done[v] = true;
            for &k in &out_edges[v] {
                let e = edges[k];
                let nd = d + e.cost + phi[v] - phi[e.to];
                if nd < dist[e.to] {
                    dist[e.to] = nd;
                    parent[e.to] = Some((k, true));
                    heap.push(Reverse((nd, e.to)));
                }
            }
            for &k in &in_edges[v] {
                let e = edges[k];
                if e.flow > 0 {
                    let nd = d - e.cost + phi[v] - phi[e.from];
                    if nd < dist[e.from] {
                        dist[e.from] = nd;
                        parent[e.from] = Some((k, false));
                        heap.push(Reverse((nd, e.from)));
                    }
                }
            }
        }
        let target = (0..n)
            .filter(|&v| supply[v] < 0 && dist[v] < INF)
            .min_by_key(|&v| (dist[v], v))?;
        let dt = dist[target];
        for v in 0..n {
            phi[v] += dist[v].min(dt);
        }
        let mut amount = -supply[target];
        let mut v = target;
        while let Some((k, forward)) = parent[v] {
            let e = edges[k];
            if forward {
                v = e.from;
            } else {
                amount = amount.min(e.flow);
                v = e.to;
            }
        }
        amount = amount.min(supply[v]);
        let source = v;
        let mut v = target;
        while let Some((k, forward)) = parent[v] {
            if forward {
                edges[k].flow += amount;
                v = edges[k].from;
            } else {
                edges[k].flow -= amount;
                v = edges[k].to;
            }
        }
        supply[source] -= amount;
        supply[target] += amount;
    }
    let pi: Vec<i128> = phi.iter().map(|p| -p).collect();
    debug_assert!(arcs.iter().all(|a| {
        let d = pi[a.head] - pi[a.tail];
        a.lower <= d && d <= a.upper
    }));
    Some(pi)
}
