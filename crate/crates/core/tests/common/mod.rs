//! Oracles written independently of the library's algorithms.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use mpesp::network::EventActivityNetwork;
use mpesp::num::{gcd, rat, Rational};
use mpesp::tree::SpanningTree;

/// Every simple cycle of the underlying undirected multigraph, as
/// `(dense arc, forward)` sequences. Loops count as cycles of length one.
pub fn simple_cycles(net: &EventActivityNetwork) -> Vec<Vec<(usize, bool)>> {
    let n = net.num_events();
    let mut out = Vec::new();
    for k in 0..net.num_activities() {
        if net.tail(k) == net.head(k) {
            out.push(vec![(k, true)]);
        }
    }
    // Cycles whose smallest vertex is `start`, walked from `start`.
    for start in 0..n {
        let mut stack = vec![(start, Vec::<(usize, bool)>::new(), vec![start])];
        while let Some((v, path, visited)) = stack.pop() {
            for inc in net.incidence(v) {
                let k = inc.arc;
                if net.tail(k) == net.head(k) || path.last().is_some_and(|&(last, _)| last == k) {
                    continue;
                }
                let w = inc.other;
                let step = (k, inc.forward);
                if w == start && !path.is_empty() {
                    let mut cycle = path.clone();
                    cycle.push(step);
                    out.push(cycle);
                } else if w > start && !visited.contains(&w) {
                    let mut p = path.clone();
                    p.push(step);
                    let mut vis = visited.clone();
                    vis.push(w);
                    stack.push((w, p, vis));
                }
            }
        }
    }
    out
}

pub fn cycle_period(net: &EventActivityNetwork, cycle: &[(usize, bool)]) -> i64 {
    cycle.iter().fold(0, |g, &(k, _)| gcd(g, net.arc_period_at(k)))
}

pub fn cycle_sum(cycle: &[(usize, bool)], x: &[Rational]) -> Rational {
    cycle.iter().fold(rat(0), |acc, &(k, f)| if f { acc + x[k] } else { acc - x[k] })
}

/// `γ_Cᵀx ≡ 0 (mod T_C)` on every simple cycle.
pub fn all_cycles_periodic(net: &EventActivityNetwork, x: &[Rational]) -> bool {
    simple_cycles(net).iter().all(|c| {
        let s = cycle_sum(c, x) / rat(cycle_period(net, c));
        s.is_integer()
    })
}

/// Whether some integer `π` has `π_j − π_i ≡ x_a (mod T_a)` on every arc.
/// `x` must be integral.
pub fn brute_force_periodic(net: &EventActivityNetwork, x: &[i64]) -> bool {
    let n = net.num_events();
    let mut pi = vec![0i64; n];
    fn go(net: &EventActivityNetwork, x: &[i64], pi: &mut Vec<i64>, v: usize) -> bool {
        let n = net.num_events();
        // arcs whose later endpoint is v-1 are checked once v-1 is set
        if v > 0 {
            let u = v - 1;
            for k in 0..net.num_activities() {
                let (i, j) = (net.tail(k), net.head(k));
                if i.max(j) == u && (pi[j] - pi[i] - x[k]).rem_euclid(net.arc_period_at(k)) != 0 {
                    return false;
                }
            }
        }
        if v == n {
            return true;
        }
        let top = if v == 0 { 1 } else { net.period(v) };
        for t in 0..top {
            pi[v] = t;
            if go(net, x, pi, v + 1) {
                return true;
            }
        }
        false
    }
    go(net, x, &mut pi, 0)
}

/// `T_C` of the fundamental cycle of co-tree arc `k`, from a fresh tree path search.
pub fn fundamental_cycle(net: &EventActivityNetwork, tree: &SpanningTree, k: usize) -> Vec<(usize, bool)> {
    let in_tree: BTreeSet<usize> =
        tree.arcs.iter().map(|id| net.activity_index(*id).expect("tree arc")).collect();
    let (from, to) = (net.head(k), net.tail(k));
    // BFS over tree arcs from head to tail
    let n = net.num_events();
    let mut prev: Vec<Option<(usize, usize, bool)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for inc in net.incidence(v) {
            if in_tree.contains(&inc.arc) && !seen[inc.other] {
                seen[inc.other] = true;
                prev[inc.other] = Some((v, inc.arc, inc.forward));
                queue.push_back(inc.other);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = to;
    while v != from {
        let (p, arc, fwd) = prev[v].expect("tree spans");
        path.push((arc, fwd));
        v = p;
    }
    path.reverse();
    let mut cycle = vec![(k, true)];
    cycle.extend(path);
    cycle
}

pub fn independently_sharp(net: &EventActivityNetwork, tree: &SpanningTree) -> bool {
    (0..net.num_activities())
        .filter(|k| !tree.arcs.contains(&net.activities()[*k].id))
        .all(|k| cycle_period(net, &fundamental_cycle(net, tree, k)) == net.arc_period_at(k))
}

/// All feasible integer timetables with `π_0 = 0`, at most `limit` of them.
pub fn feasible_timetables(net: &EventActivityNetwork, limit: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut pi = vec![0i64; net.num_events()];
    fn ok(net: &EventActivityNetwork, pi: &[i64], u: usize) -> bool {
        (0..net.num_activities()).all(|k| {
            let (i, j) = (net.tail(k), net.head(k));
            if i.max(j) != u {
                return true;
            }
            let a = &net.activities()[k];
            let t = net.arc_period_at(k);
            let x = a.lower + (pi[j] - pi[i] - a.lower).rem_euclid(t);
            x <= a.upper
        })
    }
    fn go(net: &EventActivityNetwork, pi: &mut Vec<i64>, v: usize, out: &mut Vec<Vec<i64>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if v == net.num_events() {
            out.push(pi.clone());
            return;
        }
        let top = if v == 0 { 1 } else { net.period(v) };
        for t in 0..top {
            pi[v] = t;
            if ok(net, pi, v) {
                go(net, pi, v + 1, out, limit);
            }
        }
    }
    go(net, &mut pi, 0, &mut out, limit);
    out
}

/// Dense canonical tension of an integer timetable.
pub fn canonical(net: &EventActivityNetwork, pi: &[i64]) -> Vec<i64> {
    (0..net.num_activities())
        .map(|k| {
            let a = &net.activities()[k];
            a.lower + (pi[net.head(k)] - pi[net.tail(k)] - a.lower).rem_euclid(net.arc_period_at(k))
        })
        .collect()
}

/// Objective of the best feasible integer timetable by plain enumeration.
pub fn enumerate_optimum(net: &EventActivityNetwork) -> Option<Rational> {
    feasible_timetables(net, usize::MAX)
        .iter()
        .map(|pi| {
            canonical(net, pi)
                .iter()
                .zip(net.activities())
                .fold(rat(0), |acc, (&x, a)| acc + a.weight * rat(x))
        })
        .min()
}

/// Two lines over four stations with transfers wherever they meet, plus a
/// random demand between station pairs. Line periods are drawn from `{10, 15, 20, 30}`.
pub fn two_lines<R: rand::Rng>(rng: &mut R) -> (EventActivityNetwork, mpesp::routing::ODMatrix) {
    use mpesp::network::{ActivityKind, EventId, NetworkBuilder};
    use rand::seq::SliceRandom;
    let periods = [10, 15, 20, 30];
    let p = [*periods.choose(rng).unwrap(), *periods.choose(rng).unwrap()];
    let mut stations = [0usize, 1, 2, 3];
    let routes = [
        {
            stations.shuffle(rng);
            stations[..3].to_vec()
        },
        {
            stations.shuffle(rng);
            stations[..3].to_vec()
        },
    ];
    let mut b = NetworkBuilder::new();
    let mut at: Vec<Vec<(usize, EventId)>> = vec![Vec::new(); 4];
    let mut next = 0u32;
    for (line, route) in routes.iter().enumerate() {
        let mut prev = None;
        for &s in route {
            let e = b.add_event(next, p[line], format!("line{line} s{s}"));
            next += 1;
            if let Some(pe) = prev {
                let l = rng.gen_range(1..=8);
                let span = rng.gen_range(0..=2);
                let id = b.next_activity_id();
                b.add_activity(id, pe, e, l, l + span, rat(0), ActivityKind::Drive);
            }
            at[s].push((line, e));
            prev = Some(e);
        }
    }
    for list in &at {
        for &(l1, e1) in list {
            for &(l2, e2) in list {
                if l1 != l2 {
                    let t = gcd(p[l1], p[l2]);
                    let low = rng.gen_range(1..=3);
                    let id = b.next_activity_id();
                    b.add_activity(id, e1, e2, low, low + t - 1, rat(0), ActivityKind::Transfer);
                }
            }
        }
    }
    let net = match b.build() {
        Ok(net) => net,
        // the two routes share no station: link them by a sync so the network is connected
        Err(_) => {
            let t = gcd(p[0], p[1]);
            let id = b.next_activity_id();
            b.add_activity(id, EventId(0), EventId(3), 0, t - 1, rat(0), ActivityKind::Sync);
            b.build().expect("connected after linking")
        }
    };
    let mut od = mpesp::routing::ODMatrix::new();
    for (s, list) in at.iter().enumerate() {
        let ids: Vec<EventId> = list.iter().map(|x| x.1).collect();
        od.attach(format!("S{s}"), ids.clone(), ids);
    }
    for _ in 0..3 {
        let (o, d) = (rng.gen_range(0..4), rng.gen_range(0..4));
        if o != d && !at[o].is_empty() && !at[d].is_empty() {
            od.add_demand(format!("S{o}"), format!("S{d}"), rat(rng.gen_range(1..=4))).unwrap();
        }
    }
    (net, od)
}
