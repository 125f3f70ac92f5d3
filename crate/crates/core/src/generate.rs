//! Seeded random instances for tests and benchmarks.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::network::{ActivityId, ActivityKind, EventActivityNetwork, EventId, NetworkBuilder, Timetable, UnionFind};
use crate::num::{gcd, lcm, rat, Rational};
use crate::routing::ODMatrix;
use crate::tree::SpanningTree;

#[derive(Debug, Clone)]
pub struct InstanceParams {
    pub events: RangeInclusive<usize>,
    pub periods: Vec<i64>,
    /// Arcs added on top of a random spanning tree.
    pub extra_arcs: RangeInclusive<usize>,
    /// Periods that would push the lcm above this are not drawn.
    pub max_lcm: i64,
    /// Probability that an arc's bounds are drawn around a hidden timetable,
    /// which makes most instances feasible.
    pub anchored: f64,
    /// Weights are `k / d` with `k ≤ max_weight` and `d` drawn from `denominators`.
    pub max_weight: i64,
    pub denominators: Vec<i64>,
}

impl Default for InstanceParams {
    fn default() -> Self {
        Self {
            events: 2..=6,
            periods: vec![2, 3, 4, 6, 8, 12],
            extra_arcs: 0..=4,
            max_lcm: 24,
            anchored: 0.85,
            max_weight: 9,
            denominators: vec![1, 1, 1, 2, 3],
        }
    }
}

fn draw_periods<R: Rng>(rng: &mut R, n: usize, choices: &[i64], max_lcm: i64) -> Vec<i64> {
    let mut out = Vec::with_capacity(n);
    let mut l = 1;
    for _ in 0..n {
        let ok: Vec<i64> = choices.iter().copied().filter(|&p| lcm(l, p) <= max_lcm).collect();
        let p = *ok.choose(rng).expect("some period keeps the lcm bounded");
        l = lcm(l, p);
        out.push(p);
    }
    out
}

fn random_weight<R: Rng>(rng: &mut R, params: &InstanceParams) -> Rational {
    let d = *params.denominators.choose(rng).unwrap_or(&1);
    Rational::new(rng.gen_range(0..=params.max_weight) as i128, d as i128)
}

/// Adds an arc whose bounds either contain the hidden tension or are random.
fn add_arc<R: Rng>(
    rng: &mut R,
    b: &mut NetworkBuilder,
    params: &InstanceParams,
    hidden: &[i64],
    periods: &[i64],
    (i, j): (usize, usize),
) {
    let t = gcd(periods[i], periods[j]);
    let span = rng.gen_range(0..t);
    let lower = if rng.gen_bool(params.anchored) {
        let x = (hidden[j] - hidden[i]).rem_euclid(t) + t * rng.gen_range(0..=1);
        let l = x - rng.gen_range(0..=span);
        if l < 0 { l + t } else { l }
    } else {
        rng.gen_range(0..2 * t)
    };
    let id = b.next_activity_id();
    let w = random_weight(rng, params);
    b.add_activity(id, EventId(i as u32), EventId(j as u32), lower, lower + span, w, ActivityKind::Drive);
}

fn build_with_periods<R: Rng>(rng: &mut R, params: &InstanceParams, periods: &[i64], parents: &[usize]) -> EventActivityNetwork {
    let n = periods.len();
    let mut b = NetworkBuilder::new();
    for (v, &p) in periods.iter().enumerate() {
        b.add_event(v as u32, p, format!("e{v}"));
    }
    let hidden: Vec<i64> = periods.iter().map(|&p| rng.gen_range(0..p)).collect();
    for (v, &parent) in parents.iter().enumerate().skip(1) {
        let pair = if rng.gen_bool(0.5) { (parent, v) } else { (v, parent) };
        add_arc(rng, &mut b, params, &hidden, periods, pair);
    }
    if n >= 2 {
        for _ in 0..rng.gen_range(params.extra_arcs.clone()) {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            add_arc(rng, &mut b, params, &hidden, periods, (i, j));
        }
    }
    b.build().expect("generated networks are connected and within spans")
}

/// A connected random network with event ids `0..n`.
pub fn random_network<R: Rng>(rng: &mut R, params: &InstanceParams) -> EventActivityNetwork {
    let n = rng.gen_range(params.events.clone());
    let periods = draw_periods(rng, n, &params.periods, params.max_lcm);
    let parents: Vec<usize> = (0..n).map(|v| if v == 0 { 0 } else { rng.gen_range(0..v) }).collect();
    build_with_periods(rng, params, &periods, &parents)
}

/// Periods drawn from a random divisibility chain, so the instance is harmonic.
pub fn random_harmonic<R: Rng>(rng: &mut R, events: RangeInclusive<usize>) -> EventActivityNetwork {
    let mut chain = vec![rng.gen_range(1..=3)];
    for _ in 0..rng.gen_range(1..=3) {
        let f = *[2, 3, 5].choose(rng).expect("factor");
        chain.push(chain.last().expect("chain") * f);
    }
    let params = InstanceParams { events, periods: chain, max_lcm: i64::MAX, ..Default::default() };
    random_network(rng, &params)
}

/// A rooted instance: every event hangs below a neighbour whose period it divides,
/// under a single event of period `L`.
pub fn random_rooted<R: Rng>(rng: &mut R, events: RangeInclusive<usize>) -> EventActivityNetwork {
    let top = *[12, 24, 30, 36, 60].choose(rng).expect("period");
    let divisors: Vec<i64> = (1..=top).filter(|d| top % d == 0).collect();
    let n = rng.gen_range(events);
    let mut periods = vec![top];
    let mut parents = vec![0];
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        let choices: Vec<i64> = divisors.iter().copied().filter(|d| periods[parent] % d == 0).collect();
        periods.push(*choices.choose(rng).expect("divisor"));
        parents.push(parent);
    }
    let params = InstanceParams { extra_arcs: 0..=n.min(6), ..Default::default() };
    build_with_periods(rng, &params, &periods, &parents)
}

/// Integer timetable with `π_i ∈ [0, T_i)`.
pub fn random_timetable<R: Rng>(rng: &mut R, net: &EventActivityNetwork) -> Timetable {
    let times: Vec<Rational> = (0..net.num_events()).map(|v| rat(rng.gen_range(0..net.period(v)))).collect();
    net.timetable_from_dense(&times)
}

/// Uniformly shuffled Kruskal: a random spanning tree rooted at the first event.
pub fn random_spanning_tree<R: Rng>(rng: &mut R, net: &EventActivityNetwork) -> SpanningTree {
    let mut order: Vec<usize> = (0..net.num_activities()).collect();
    order.shuffle(rng);
    let mut uf = UnionFind::new(net.num_events());
    let arcs: Vec<ActivityId> = order
        .into_iter()
        .filter(|&k| uf.union(net.tail(k), net.head(k)))
        .map(|k| net.activities()[k].id)
        .collect();
    SpanningTree::new(arcs, net.events()[0].id)
}

/// One station per event (named by the event id) and `pairs` random OD entries
/// with demand in `1..=5`.
pub fn random_demand<R: Rng>(rng: &mut R, net: &EventActivityNetwork, pairs: usize) -> ODMatrix {
    let mut od = ODMatrix::new();
    for e in net.events() {
        od.attach(e.id.to_string(), vec![e.id], vec![e.id]);
    }
    let n = net.num_events();
    if n < 2 {
        return od;
    }
    for _ in 0..pairs {
        let o = rng.gen_range(0..n);
        let mut d = rng.gen_range(0..n - 1);
        if d >= o {
            d += 1;
        }
        let (o, d) = (net.events()[o].id.to_string(), net.events()[d].id.to_string());
        od.add_demand(o, d, rat(rng.gen_range(1..=5))).expect("positive demand");
    }
    od
}
