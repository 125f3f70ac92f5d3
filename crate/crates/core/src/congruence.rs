//! Simultaneous congruences and the reconstruction of timetables from tensions.

use std::collections::BTreeSet;

use num_integer::Integer;

use crate::network::{EventActivityNetwork, NetworkError, OrientedArc, Tension, Timetable};
use crate::num::{common_denominator, gcd, mod_floor, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CongruenceError {
    #[error("gcd of (0, 0) is undefined")]
    BothZero,
    #[error("empty congruence system")]
    EmptySystem,
    #[error("modulus {0} is not positive")]
    InvalidModulus(i64),
    #[error("integer overflow while combining congruences")]
    Overflow,
    #[error(
        "more than {cap} simple paths between events {from} and {to}; \
         check periodicity against a sharp-tree cycle basis instead"
    )]
    PathCapExceeded { from: crate::network::EventId, to: crate::network::EventId, cap: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Basis(#[from] crate::tree::TreeError),
}

/// `value ≡ residue (mod modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Congruence {
    pub residue: Rational,
    pub modulus: i64,
}

impl Congruence {
    pub fn new(residue: Rational, modulus: i64) -> Self {
        Self { residue, modulus }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrtOutcome {
    /// Smallest nonnegative solution, unique modulo `modulus` (the lcm of all moduli).
    Solution { value: Rational, modulus: i128 },
    /// Items `first < second` (0-based) cannot hold simultaneously.
    Incompatible { first: usize, second: usize },
}

impl CrtOutcome {
    pub fn value(&self) -> Option<Rational> {
        match self {
            CrtOutcome::Solution { value, .. } => Some(*value),
            CrtOutcome::Incompatible { .. } => None,
        }
    }
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Returns `(g, s, t)` with `g = gcd(a, b) = s·a + t·b`.
pub fn extended_gcd(a: i64, b: i64) -> Result<(i64, i64, i64), CongruenceError> {
    if a == 0 && b == 0 {
        return Err(CongruenceError::BothZero);
    }
    let (g, s, t) = egcd(a as i128, b as i128);
    Ok((g as i64, s as i64, t as i64))
}

/// Merges `y ≡ r1 (mod m1)` with `y ≡ r2 (mod m2)` over the integers.
fn merge(r1: i128, m1: i128, r2: i128, m2: i128) -> Result<Option<(i128, i128)>, CongruenceError> {
    let (g, s, _) = egcd(m1, m2);
    let diff = r2 - r1;
    if diff % g != 0 {
        return Ok(None);
    }
    let m2g = m2 / g;
    let lcm = m1.checked_mul(m2g).ok_or(CongruenceError::Overflow)?;
    // y = r1 + m1·k with m1·k ≡ diff (mod m2), i.e. k ≡ (diff/g)·s (mod m2/g)
    let k = ((diff / g) % m2g)
        .checked_mul(s % m2g)
        .ok_or(CongruenceError::Overflow)?
        .mod_floor(&m2g);
    let y = r1
        .checked_add(m1.checked_mul(k).ok_or(CongruenceError::Overflow)?)
        .ok_or(CongruenceError::Overflow)?;
    Ok(Some((y.mod_floor(&lcm), lcm)))
}

/// Solves a system of congruences with rational residues (Ore's criterion).
pub fn solve_simultaneous(items: &[Congruence]) -> Result<CrtOutcome, CongruenceError> {
    if items.is_empty() {
        return Err(CongruenceError::EmptySystem);
    }
    if let Some(bad) = items.iter().find(|c| c.modulus < 1) {
        return Err(CongruenceError::InvalidModulus(bad.modulus));
    }
    let d = common_denominator(items.iter().map(|c| &c.residue));
    let scaled: Vec<(i128, i128)> = items
        .iter()
        .map(|c| {
            let r = (c.residue * Rational::from_integer(d)).to_integer();
            let m = (c.modulus as i128).checked_mul(d).ok_or(CongruenceError::Overflow)?;
            Ok((r.mod_floor(&m), m))
        })
        .collect::<Result<_, CongruenceError>>()?;

    let (mut y, mut m) = scaled[0];
    for (k, &(rk, mk)) in scaled.iter().enumerate().skip(1) {
        match merge(y, m, rk, mk)? {
            Some((ny, nm)) => (y, m) = (ny, nm),
            None => {
                let first = (0..k)
                    .find(|&j| {
                        let (rj, mj) = scaled[j];
                        (rk - rj) % mj.gcd(&mk) != 0
                    })
                    .expect("a system of pairwise compatible congruences is solvable");
                return Ok(CrtOutcome::Incompatible { first, second: k });
            }
        }
    }
    Ok(CrtOutcome::Solution { value: Rational::new(y, d), modulus: m / d })
}

/// Limits for [`timetable_from_tension_general`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReconstructionConfig {
    /// Maximum number of simple paths enumerated for one fill arc.
    pub path_cap: usize,
    /// Maximum number of simple cycles inspected when locating a certificate.
    pub cycle_cap: usize,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self { path_cap: 10_000, cycle_cap: 200_000 }
    }
}

/// A closed walk with `γᵀx ≢ 0 (mod T_C)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCertificate {
    pub cycle: Vec<OrientedArc>,
    pub residue: Rational,
    pub modulus: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reconstruction {
    Periodic(Timetable),
    /// Not periodic; the certificate is absent only if no violated simple
    /// cycle was found within the enumeration cap.
    NotPeriodic(Option<CycleCertificate>),
}

/// An arc of the working graph: original activities plus fill arcs.
#[derive(Debug, Clone, Copy)]
struct WorkArc {
    tail: usize,
    head: usize,
    value: Rational,
}

/// Maximum-cardinality search: starts at the lowest id, ties broken by lowest id.
fn mcs_order(n: usize, adj: &[BTreeSet<usize>]) -> Vec<usize> {
    let mut weight = vec![0usize; n];
    let mut numbered = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !numbered[v])
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .expect("unnumbered vertex remains");
        numbered[v] = true;
        order.push(v);
        for &w in &adj[v] {
            if !numbered[w] {
                weight[w] += 1;
            }
        }
    }
    order
}

/// Reconstructs `π` from `x` or decides that `x` is not periodic.
///
/// Events are inserted in maximum-cardinality-search order. If that order is
/// not a perfect elimination ordering the graph is first completed to a chordal
/// one; each fill arc gets a tension solving the congruences of all simple paths
/// between its endpoints. Every inserted event then solves one simultaneous
/// system over its already placed neighbours.
pub fn timetable_from_tension_general(
    net: &EventActivityNetwork,
    x: &Tension,
    config: &ReconstructionConfig,
) -> Result<Reconstruction, CongruenceError> {
    let values = net.dense_tension(x)?;
    let n = net.num_events();
    let not_periodic = || {
        Ok(Reconstruction::NotPeriodic(find_violated_cycle(net, &values, config.cycle_cap)))
    };

    for (k, a) in net.activities().iter().enumerate() {
        if a.is_loop() && mod_floor(&values[k], net.arc_period_at(k)) != crate::num::zero() {
            return not_periodic();
        }
    }

    let mut arcs: Vec<WorkArc> = (0..net.num_activities())
        .filter(|&k| net.tail(k) != net.head(k))
        .map(|k| WorkArc { tail: net.tail(k), head: net.head(k), value: values[k] })
        .collect();
    let mut adj = vec![BTreeSet::new(); n];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, a) in arcs.iter().enumerate() {
        adj[a.tail].insert(a.head);
        adj[a.head].insert(a.tail);
        incident[a.tail].push(k);
        incident[a.head].push(k);
    }

    let order = mcs_order(n, &adj);
    let mut pos = vec![0usize; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }

    for &v in order.iter().rev() {
        let earlier: Vec<usize> = adj[v].iter().copied().filter(|&u| pos[u] < pos[v]).collect();
        for (i, &p) in earlier.iter().enumerate() {
            for &q in &earlier[i + 1..] {
                if adj[p].contains(&q) {
                    continue;
                }
                let (p, q) = if pos[p] < pos[q] { (p, q) } else { (q, p) };
                let system = path_congruences(net, &arcs, &incident, p, q, config.path_cap)?;
                let value = match solve_simultaneous(&system)? {
                    CrtOutcome::Solution { value, .. } => value,
                    CrtOutcome::Incompatible { .. } => return not_periodic(),
                };
                let k = arcs.len();
                arcs.push(WorkArc { tail: p, head: q, value });
                adj[p].insert(q);
                adj[q].insert(p);
                incident[p].push(k);
                incident[q].push(k);
            }
        }
    }

    let mut times: Vec<Option<Rational>> = vec![None; n];
    times[order[0]] = Some(crate::num::zero());
    for &v in &order[1..] {
        let mut system = Vec::new();
        for &k in &incident[v] {
            let a = arcs[k];
            let modulus = gcd(net.period(a.tail), net.period(a.head));
            if a.head == v {
                if let Some(t) = times[a.tail] {
                    system.push(Congruence::new(t + a.value, modulus));
                }
            } else if let Some(t) = times[a.head] {
                system.push(Congruence::new(t - a.value, modulus));
            }
        }
        match solve_simultaneous(&system)? {
            CrtOutcome::Solution { value, .. } => times[v] = Some(mod_floor(&value, net.period(v))),
            CrtOutcome::Incompatible { .. } => return not_periodic(),
        }
    }
    let times: Vec<Rational> = times.into_iter().map(|t| t.expect("connected network")).collect();
    Ok(Reconstruction::Periodic(net.timetable_from_dense(&times).normalized(net)))
}

/// `y ≡ γ_Pᵀx (mod gcd of periods on P)` for every simple path `P` from `from` to `to`.
fn path_congruences(
    net: &EventActivityNetwork,
    arcs: &[WorkArc],
    incident: &[Vec<usize>],
    from: usize,
    to: usize,
    cap: usize,
) -> Result<Vec<Congruence>, CongruenceError> {
    let mut out = Vec::new();
    let mut visited = vec![false; net.num_events()];
    visited[from] = true;
    let mut stack: Vec<(usize, usize, Rational, i64)> = Vec::new();
    // iterative DFS: (vertex, next incident slot, signed sum, gcd)
    stack.push((from, 0, crate::num::zero(), net.period(from)));
    while let Some(&mut (v, ref mut slot, sum, g)) = stack.last_mut() {
        if *slot >= incident[v].len() {
            visited[v] = false;
            stack.pop();
            continue;
        }
        let k = incident[v][*slot];
        *slot += 1;
        let a = arcs[k];
        let (w, signed) = if a.tail == v { (a.head, a.value) } else { (a.tail, -a.value) };
        if visited[w] {
            continue;
        }
        let g2 = gcd(g, net.period(w));
        if w == to {
            out.push(Congruence::new(sum + signed, g2));
            if out.len() > cap {
                return Err(CongruenceError::PathCapExceeded {
                    from: net.events()[from].id,
                    to: net.events()[to].id,
                    cap,
                });
            }
            continue;
        }
        visited[w] = true;
        stack.push((w, 0, sum + signed, g2));
    }
    Ok(out)
}

/// Searches simple cycles (loops and parallel pairs included) for one whose
/// signed tension sum is not a multiple of its period.
pub fn find_violated_cycle(
    net: &EventActivityNetwork,
    values: &[Rational],
    cap: usize,
) -> Option<CycleCertificate> {
    let mut seen = 0usize;
    for_each_simple_cycle(net, |cycle| {
        seen += 1;
        let modulus = cycle.iter().fold(0, |g, &(k, _)| gcd(g, net.arc_period_at(k)));
        let sum = cycle
            .iter()
            .fold(crate::num::zero(), |acc, &(k, fwd)| if fwd { acc + values[k] } else { acc - values[k] });
        let residue = mod_floor(&sum, modulus);
        if residue != crate::num::zero() {
            return Some(Some(CycleCertificate {
                cycle: cycle
                    .iter()
                    .map(|&(k, forward)| OrientedArc { activity: net.activities()[k].id, forward })
                    .collect(),
                residue,
                modulus,
            }));
        }
        if seen >= cap {
            return Some(None);
        }
        None
    })
    .flatten()
}

/// Calls `visit` with every simple cycle as `(dense arc, forward)` steps until it returns `Some`.
///
/// Each cycle is reported once per direction; the starting vertex is the
/// smallest on the cycle.
pub(crate) fn for_each_simple_cycle<R>(
    net: &EventActivityNetwork,
    mut visit: impl FnMut(&[(usize, bool)]) -> Option<R>,
) -> Option<R> {
    let n = net.num_events();
    for k in 0..net.num_activities() {
        if net.tail(k) == net.head(k) {
            if let Some(r) = visit(&[(k, true)]) {
                return Some(r);
            }
        }
    }
    let mut on_path = vec![false; n];
    let mut path: Vec<(usize, bool)> = Vec::new();
    for s in 0..n {
        on_path[s] = true;
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        while let Some(&mut (v, ref mut slot)) = stack.last_mut() {
            let inc = net.incidence(v);
            if *slot >= inc.len() {
                stack.pop();
                if v != s {
                    on_path[v] = false;
                }
                path.pop();
                continue;
            }
            let step = inc[*slot];
            *slot += 1;
            if net.tail(step.arc) == net.head(step.arc) {
                continue;
            }
            if path.last().is_some_and(|&(k, _)| k == step.arc) {
                continue;
            }
            let w = step.other;
            if w == s {
                path.push((step.arc, step.forward));
                let r = visit(&path);
                path.pop();
                if r.is_some() {
                    return r;
                }
                continue;
            }
            if w < s || on_path[w] {
                continue;
            }
            on_path[w] = true;
            path.push((step.arc, step.forward));
            stack.push((w, 0));
        }
        on_path[s] = false;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::num::rat;

    fn c(r: i64, m: i64) -> Congruence {
        Congruence::new(rat(r), m)
    }

    #[test]
    fn bezout() {
        assert_eq!(extended_gcd(10, 20).unwrap(), (10, 1, 0));
        let (g, s, t) = extended_gcd(6, 35).unwrap();
        assert_eq!((g, 6 * s + 35 * t), (1, 1));
        assert_eq!(extended_gcd(0, 7).unwrap().0, 7);
        assert_eq!(extended_gcd(0, 0), Err(CongruenceError::BothZero));
    }

    #[test]
    fn simultaneous_examples() {
        let out = solve_simultaneous(&[c(24, 10), c(-6, 20)]).unwrap();
        assert_eq!(out, CrtOutcome::Solution { value: rat(14), modulus: 20 });
        assert_eq!(solve_simultaneous(&[c(3, 7)]).unwrap().value(), Some(rat(3)));
        assert_eq!(
            solve_simultaneous(&[c(1, 4), c(2, 6)]).unwrap(),
            CrtOutcome::Incompatible { first: 0, second: 1 }
        );
        assert_eq!(solve_simultaneous(&[]), Err(CongruenceError::EmptySystem));
        let half = Congruence::new(Rational::new(1, 2), 3);
        let out = solve_simultaneous(&[half, Congruence::new(Rational::new(5, 2), 4)]).unwrap();
        assert_eq!(out.value(), Some(Rational::new(13, 2)));
    }

    #[test]
    fn witness_names_the_clashing_pair() {
        let out = solve_simultaneous(&[c(1, 3), c(0, 5), c(2, 4), c(1, 6)]).unwrap();
        // 1 mod 3 and 1 mod 6 agree, 2 mod 4 and 1 mod 6 disagree mod 2
        assert_eq!(out, CrtOutcome::Incompatible { first: 2, second: 3 });
    }

    #[test]
    fn figure_nine_reconstruction() {
        let net = fixtures::figure3();
        let x = fixtures::figure3_tension(&net);
        let out = timetable_from_tension_general(&net, &x, &Default::default()).unwrap();
        let expected = net.timetable_from_dense(&[rat(0), rat(1), rat(8), rat(14)]);
        assert_eq!(out, Reconstruction::Periodic(expected));
    }

    #[test]
    fn coprime_triangle_is_periodic() {
        let mut b = fixtures::triangle(6, 10, 15).to_builder();
        for (a, v) in b.activities_mut().iter_mut().zip([3, 5, 7]) {
            a.lower = v;
            a.upper = v;
        }
        let net = b.build().unwrap();
        let x = net.tension_from_dense(&[rat(3), rat(5), rat(7)]);
        let Reconstruction::Periodic(tt) =
            timetable_from_tension_general(&net, &x, &Default::default()).unwrap()
        else {
            panic!("triangle with T_C = 1 must be periodic");
        };
        assert!(net.check_timetable(&tt).unwrap().is_feasible());
    }

    #[test]
    fn four_cycle_needs_fill() {
        // square 0-1-2-3-0, all periods 10, sum 10 ≡ 0 is periodic, sum 11 is not
        let mut b = crate::network::NetworkBuilder::new();
        let e: Vec<_> = (0..4).map(|k| b.add_event(k, 10, "")).collect();
        for k in 0..4 {
            b.add_activity(k, e[k as usize], e[(k as usize + 1) % 4], 0, 9, rat(1), crate::network::ActivityKind::Drive);
        }
        let net = b.build().unwrap();
        let good = net.tension_from_dense(&[rat(1), rat(2), rat(3), rat(4)]);
        assert!(matches!(
            timetable_from_tension_general(&net, &good, &Default::default()).unwrap(),
            Reconstruction::Periodic(_)
        ));
        let bad = net.tension_from_dense(&[rat(1), rat(2), rat(3), rat(5)]);
        match timetable_from_tension_general(&net, &bad, &Default::default()).unwrap() {
            Reconstruction::NotPeriodic(Some(cert)) => {
                assert_eq!(cert.modulus, 10);
                assert_eq!(cert.cycle.len(), 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn path_cap_is_enforced() {
        let net = fixtures::figure3();
        let x = fixtures::figure3_tension(&net);
        let arcs: Vec<WorkArc> = (0..net.num_activities())
            .map(|k| WorkArc { tail: net.tail(k), head: net.head(k), value: rat(0) })
            .collect();
        let mut incident = vec![Vec::new(); 4];
        for (k, a) in arcs.iter().enumerate() {
            incident[a.tail].push(k);
            incident[a.head].push(k);
        }
        let _ = x;
        assert_eq!(path_congruences(&net, &arcs, &incident, 0, 2, 10).unwrap().len(), 3);
        assert!(matches!(
            path_congruences(&net, &arcs, &incident, 0, 2, 2),
            Err(CongruenceError::PathCapExceeded { cap: 2, .. })
        ));
    }
}
