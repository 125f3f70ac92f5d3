//! Roll-out of a multi-period instance into a single-period one with period `L`.
//!
//! Event `i` becomes `L / T_i` copies `i_0, i_1, ...` chained by sync arcs of
//! fixed length `T_i`, so copy `i_m` sits at `π_i + m·T_i`. An activity
//! `(i, j)` yields one arc per class of copy pairs `(i_m, j_n)` whose offset
//! `n·T_j − m·T_i` agrees modulo `L`; there are `L / T_a` classes. Each class
//! arc gets bounds `[l_a, u_a + L − T_a]`: together they hold exactly when
//! `x_a` fits its original bounds modulo `T_a`.
//!
//! Weights are split evenly across class arcs, which raises every feasible
//! objective by the constant `Σ w_a (L − T_a) / 2` reported in the map.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::network::{
    ActivityId, ActivityKind, EventActivityNetwork, EventId, NetworkBuilder, NetworkError,
    Timetable,
};
use crate::num::{mod_floor, rat, zero, Rational};

/// One class arc of an original activity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcCopy {
    pub activity: ActivityId,
    /// Copy indices of the tail and head events.
    pub tail_copy: usize,
    pub head_copy: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionMap {
    pub period: i64,
    pub event_copies: BTreeMap<EventId, Vec<EventId>>,
    pub arc_copies: BTreeMap<ActivityId, Vec<ArcCopy>>,
    pub sync_arcs: Vec<ActivityId>,
    /// Expanded optimum = original optimum + this offset.
    #[serde(with = "crate::num::serde_exact")]
    pub objective_offset: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpansionError {
    #[error("expansion would create {events} events (cap {cap})")]
    TooLarge { events: usize, cap: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Default limit on the number of copies created by an expansion.
pub const DEFAULT_EXPANSION_CAP: usize = 200_000;

pub fn expand_to_pesp(
    net: &EventActivityNetwork,
) -> Result<(EventActivityNetwork, ExpansionMap), ExpansionError> {
    expand_with_cap(net, DEFAULT_EXPANSION_CAP)
}

pub fn expand_with_cap(
    net: &EventActivityNetwork,
    cap: usize,
) -> Result<(EventActivityNetwork, ExpansionMap), ExpansionError> {
    let l = net.lcm_period();
    let total: usize = net.events().iter().map(|e| (l / e.period) as usize).sum();
    if total > cap {
        return Err(ExpansionError::TooLarge { events: total, cap });
    }
    let mut b = NetworkBuilder::new();
    let mut next_event = 0u32;
    let mut copies: Vec<Vec<EventId>> = Vec::with_capacity(net.num_events());
    let mut event_copies = BTreeMap::new();
    for e in net.events() {
        let ids: Vec<EventId> = (0..l / e.period)
            .map(|m| {
                let id = b.add_event(next_event, l, format!("{}#{m}", e.label));
                next_event += 1;
                id
            })
            .collect();
        event_copies.insert(e.id, ids.clone());
        copies.push(ids);
    }

    let mut next_arc = 0u32;
    let mut arc_copies = BTreeMap::new();
    let mut offset = zero();
    for (k, a) in net.activities().iter().enumerate() {
        let (i, j) = (net.tail(k), net.head(k));
        let (ti, tj, ta) = (net.period(i), net.period(j), net.arc_period_at(k));
        let classes = (l / ta) as usize;
        let weight = a.weight / rat(classes as i64);
        offset += a.weight * rat(l - ta) / rat(2);
        let mut seen = vec![false; classes];
        let mut list = Vec::with_capacity(classes);
        'pairs: for m in 0..copies[i].len() {
            for n in 0..copies[j].len() {
                let class = ((n as i64 * tj - m as i64 * ti).rem_euclid(l) / ta) as usize;
                if seen[class] {
                    continue;
                }
                seen[class] = true;
                let id = b.add_activity(
                    next_arc,
                    copies[i][m],
                    copies[j][n],
                    a.lower,
                    a.upper + l - ta,
                    weight,
                    a.kind,
                );
                next_arc += 1;
                list.push(ArcCopy { activity: id, tail_copy: m, head_copy: n });
                if list.len() == classes {
                    break 'pairs;
                }
            }
        }
        arc_copies.insert(a.id, list);
    }

    let mut sync_arcs = Vec::new();
    for (v, ids) in copies.iter().enumerate() {
        let t = net.period(v);
        for w in ids.windows(2) {
            sync_arcs.push(b.add_activity(next_arc, w[0], w[1], t, t, zero(), ActivityKind::Sync));
            next_arc += 1;
        }
    }

    let expanded = b.build()?;
    Ok((
        expanded,
        ExpansionMap { period: l, event_copies, arc_copies, sync_arcs, objective_offset: offset },
    ))
}

/// Event and activity counts of an instance in three representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSizes {
    /// After [`expand_to_pesp`], computed without building the expansion.
    pub pesp: (u128, u128),
    pub mpesp: (usize, usize),
    /// After rooting.
    pub rooted: (usize, usize),
}

pub fn instance_sizes(net: &EventActivityNetwork) -> Result<InstanceSizes, NetworkError> {
    let l = net.lcm_period() as u128;
    let copies: u128 = net.events().iter().map(|e| l / e.period as u128).sum();
    let classes: u128 = (0..net.num_activities()).map(|k| l / net.arc_period_at(k) as u128).sum();
    let syncs = copies - net.num_events() as u128;
    let (rooted, _) = crate::quotient::root_instance(net)?;
    Ok(InstanceSizes {
        pesp: (copies, classes + syncs),
        mpesp: (net.num_events(), net.num_activities()),
        rooted: (rooted.num_events(), rooted.num_activities()),
    })
}

/// `π_{i_m} = π_i + m·T_i (mod L)`.
pub fn roll_out_timetable(
    net: &EventActivityNetwork,
    map: &ExpansionMap,
    tt: &Timetable,
) -> Result<Timetable, NetworkError> {
    let times = net.dense_times(tt)?;
    let mut out = BTreeMap::new();
    for (v, e) in net.events().iter().enumerate() {
        for (m, id) in map.event_copies[&e.id].iter().enumerate() {
            out.insert(*id, mod_floor(&(times[v] + rat(m as i64 * e.period)), map.period));
        }
    }
    Ok(Timetable { times: out })
}

/// `π_i = π_{i_0} (mod T_i)`.
pub fn restrict_timetable(
    net: &EventActivityNetwork,
    map: &ExpansionMap,
    expanded: &Timetable,
) -> Result<Timetable, NetworkError> {
    let mut out = BTreeMap::new();
    for e in net.events() {
        let first = map.event_copies[&e.id][0];
        let t = expanded.times.get(&first).ok_or(NetworkError::MissingTime(first))?;
        out.insert(e.id, mod_floor(t, e.period));
    }
    Ok(Timetable { times: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn one_arc(ti: i64, tj: i64) -> EventActivityNetwork {
        let mut b = NetworkBuilder::new();
        let i = b.add_event(0, ti, "i");
        let j = b.add_event(1, tj, "j");
        b.add_activity(0, i, j, 3, 7, rat(6), ActivityKind::Transfer);
        b.build().unwrap()
    }

    #[test]
    fn uniform_period_is_identity() {
        let net = fixtures::triangle(10, 10, 10);
        let (pesp, map) = expand_to_pesp(&net).unwrap();
        assert_eq!(pesp.num_events(), 3);
        assert_eq!(pesp.num_activities(), 3);
        assert!(map.sync_arcs.is_empty());
        assert_eq!(map.objective_offset, zero());
        for (a, b) in net.activities().iter().zip(pesp.activities()) {
            assert_eq!((a.lower, a.upper, a.weight), (b.lower, b.upper, b.weight));
        }
    }

    #[test]
    fn thirty_and_twenty() {
        let net = one_arc(30, 20);
        let (pesp, map) = expand_to_pesp(&net).unwrap();
        assert_eq!(map.period, 60);
        assert_eq!(map.event_copies[&EventId(0)].len(), 2);
        assert_eq!(map.event_copies[&EventId(1)].len(), 3);
        // six copy pairs fall into 60 / gcd(30, 20) = 6 classes
        assert_eq!(map.arc_copies[&ActivityId(0)].len(), 6);
        assert_eq!(map.sync_arcs.len(), 1 + 2);
        assert_eq!(pesp.num_activities(), 6 + 3);
        let copy = pesp.activity(map.arc_copies[&ActivityId(0)][0].activity).unwrap();
        assert_eq!((copy.lower, copy.upper), (3, 7 + 50));
        assert_eq!(copy.weight, rat(1));
        assert_eq!(map.objective_offset, rat(6 * 50) / rat(2));
    }

    #[test]
    fn rolled_timetables_are_feasible() {
        let net = fixtures::figure3();
        let (pesp, map) = expand_to_pesp(&net).unwrap();
        let good = net.timetable_from_dense(&[rat(0), rat(1), rat(8), rat(14)]);
        let rolled = roll_out_timetable(&net, &map, &good).unwrap();
        assert!(pesp.check_timetable(&rolled).unwrap().is_feasible());
        assert_eq!(restrict_timetable(&net, &map, &rolled).unwrap(), good);
        let bad = net.timetable_from_dense(&[rat(0), rat(1), rat(8), rat(4)]);
        let rolled = roll_out_timetable(&net, &map, &bad).unwrap();
        assert!(!pesp.check_timetable(&rolled).unwrap().is_feasible());
    }

    #[test]
    fn sizes_match_the_built_expansion() {
        for net in [fixtures::figure3(), fixtures::figure10().0, one_arc(30, 20)] {
            let sizes = instance_sizes(&net).unwrap();
            let (pesp, _) = expand_to_pesp(&net).unwrap();
            assert_eq!(sizes.pesp, (pesp.num_events() as u128, pesp.num_activities() as u128));
            assert_eq!(sizes.mpesp, (net.num_events(), net.num_activities()));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let net = one_arc(49, 77);
        assert!(matches!(expand_with_cap(&net, 10), Err(ExpansionError::TooLarge { events: 18, .. })));
    }
}
