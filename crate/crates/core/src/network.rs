//! Event-activity networks with per-event periods.
//!
//! An [`EventActivityNetwork`] is an immutable, validated multigraph: every
//! event carries its own period `T_i`, every activity `a = (i, j)` carries
//! integer bounds `[l_a, u_a]`, a nonnegative weight and a kind. The periodic
//! constraint on `a` is taken modulo `T_a = gcd(T_i, T_j)`.
//!
//! Networks are built through [`NetworkBuilder`], which rejects disconnected
//! input and arcs whose span exceeds `T_a - 1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::num::{gcd, lcm, rat, representative_from, Rational};
use crate::tree::CycleBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActivityId(pub u32);

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ActivityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub id: EventId,
    pub period: i64,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivityKind {
    Drive,
    Dwell,
    Transfer,
    Headway,
    Sync,
    Virtual,
}

impl ActivityKind {
    pub const ALL: [ActivityKind; 6] = [
        ActivityKind::Drive,
        ActivityKind::Dwell,
        ActivityKind::Transfer,
        ActivityKind::Headway,
        ActivityKind::Sync,
        ActivityKind::Virtual,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActivityKind::Drive => "drive",
            ActivityKind::Dwell => "dwell",
            ActivityKind::Transfer => "transfer",
            ActivityKind::Headway => "headway",
            ActivityKind::Sync => "sync",
            ActivityKind::Virtual => "virtual",
        }
    }

    /// Whether passengers may travel along activities of this kind.
    pub fn is_routable(self) -> bool {
        matches!(
            self,
            ActivityKind::Drive | ActivityKind::Dwell | ActivityKind::Transfer
        )
    }
}

impl std::str::FromStr for ActivityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActivityKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim())
            .ok_or_else(|| format!("unknown activity kind `{s}`"))
    }
}

impl fmt::Display for ActivityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Activity {
    pub id: ActivityId,
    pub tail: EventId,
    pub head: EventId,
    pub lower: i64,
    pub upper: i64,
    #[serde(with = "crate::num::serde_exact")]
    pub weight: Rational,
    pub kind: ActivityKind,
}

impl Activity {
    pub fn span(&self) -> i64 {
        self.upper - self.lower
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// One step of a closed walk: the activity and whether it is traversed tail to head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrientedArc {
    pub activity: ActivityId,
    pub forward: bool,
}

impl OrientedArc {
    pub fn forward(activity: ActivityId) -> Self {
        Self { activity, forward: true }
    }

    pub fn backward(activity: ActivityId) -> Self {
        Self { activity, forward: false }
    }

    pub fn sign(&self) -> i64 {
        if self.forward {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetworkError {
    #[error("network has no events")]
    Empty,
    #[error("duplicate event id {0}")]
    DuplicateEvent(EventId),
    #[error("duplicate activity id {0}")]
    DuplicateActivity(ActivityId),
    #[error("event {event} has invalid period {period} (must be >= 1)")]
    InvalidPeriod { event: EventId, period: i64 },
    #[error("activity {activity} references unknown event {event}")]
    UnknownEvent { activity: ActivityId, event: EventId },
    #[error("activity {activity} has upper bound {upper} below lower bound {lower}")]
    NegativeSpan { activity: ActivityId, lower: i64, upper: i64 },
    #[error("activity {activity} has span {span} exceeding T_a - 1 = {}", arc_period - 1)]
    SpanTooWide { activity: ActivityId, span: i64, arc_period: i64 },
    #[error("activity {activity} has negative weight")]
    NegativeWeight { activity: ActivityId },
    #[error("network is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("unknown event {0}")]
    NoSuchEvent(EventId),
    #[error("unknown activity {0}")]
    NoSuchActivity(ActivityId),
    #[error("oriented arc sequence is not a closed walk")]
    NotClosed,
    #[error("timetable has no time for event {0}")]
    MissingTime(EventId),
    #[error("tension has no value for activity {0}")]
    MissingTension(ActivityId),
}

/// Mutable staging area for networks. Validation happens in [`NetworkBuilder::build`].
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    events: Vec<Event>,
    activities: Vec<Activity>,
    clamp_spans: bool,
    clamped: Vec<ActivityId>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Clamp activities with `u - l > T_a - 1` to `u = l + T_a - 1` instead of rejecting them.
    pub fn clamp_spans(mut self, on: bool) -> Self {
        self.clamp_spans = on;
        self
    }

    pub fn add_event(&mut self, id: u32, period: i64, label: impl Into<String>) -> EventId {
        let id = EventId(id);
        self.events.push(Event { id, period, label: label.into() });
        id
    }

    pub fn push_event(&mut self, event: Event) {
        self.events.push(event);
    }

    #[allow(clippy::too_many_arguments)]
    pub fn add_activity(
        &mut self,
        id: u32,
        tail: EventId,
        head: EventId,
        lower: i64,
        upper: i64,
        weight: Rational,
        kind: ActivityKind,
    ) -> ActivityId {
        let id = ActivityId(id);
        self.activities.push(Activity { id, tail, head, lower, upper, weight, kind });
        id
    }

    pub fn push_activity(&mut self, activity: Activity) {
        self.activities.push(activity);
    }

    pub fn next_event_id(&self) -> u32 {
        self.events.iter().map(|e| e.id.0 + 1).max().unwrap_or(0)
    }

    pub fn next_activity_id(&self) -> u32 {
        self.activities.iter().map(|a| a.id.0 + 1).max().unwrap_or(0)
    }

    pub fn period_of(&self, event: EventId) -> Option<i64> {
        self.events.iter().find(|e| e.id == event).map(|e| e.period)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn activities(&self) -> &[Activity] {
        &self.activities
    }

    pub fn activities_mut(&mut self) -> &mut Vec<Activity> {
        &mut self.activities
    }

    /// Activities whose span was clamped during the last `build`.
    pub fn clamped(&self) -> &[ActivityId] {
        &self.clamped
    }

    pub fn build(&mut self) -> Result<EventActivityNetwork, NetworkError> {
        self.clamped.clear();
        let mut events = self.events.clone();
        events.sort_by_key(|e| e.id);
        let mut activities = self.activities.clone();
        activities.sort_by_key(|a| a.id);
        if events.is_empty() {
            return Err(NetworkError::Empty);
        }
        let mut event_index = HashMap::with_capacity(events.len());
        for (k, e) in events.iter().enumerate() {
            if e.period < 1 {
                return Err(NetworkError::InvalidPeriod { event: e.id, period: e.period });
            }
            if event_index.insert(e.id, k).is_some() {
                return Err(NetworkError::DuplicateEvent(e.id));
            }
        }
        let mut activity_index = HashMap::with_capacity(activities.len());
        let mut tails = Vec::with_capacity(activities.len());
        let mut heads = Vec::with_capacity(activities.len());
        let mut arc_periods = Vec::with_capacity(activities.len());
        for (k, a) in activities.iter_mut().enumerate() {
            if activity_index.insert(a.id, k).is_some() {
                return Err(NetworkError::DuplicateActivity(a.id));
            }
            let t = *event_index
                .get(&a.tail)
                .ok_or(NetworkError::UnknownEvent { activity: a.id, event: a.tail })?;
            let h = *event_index
                .get(&a.head)
                .ok_or(NetworkError::UnknownEvent { activity: a.id, event: a.head })?;
            let period = gcd(events[t].period, events[h].period);
            if a.upper < a.lower {
                return Err(NetworkError::NegativeSpan {
                    activity: a.id,
                    lower: a.lower,
                    upper: a.upper,
                });
            }
            if a.span() > period - 1 {
                if self.clamp_spans {
                    a.upper = a.lower + period - 1;
                    self.clamped.push(a.id);
                } else {
                    return Err(NetworkError::SpanTooWide {
                        activity: a.id,
                        span: a.span(),
                        arc_period: period,
                    });
                }
            }
            if !crate::num::is_nonnegative(&a.weight) {
                return Err(NetworkError::NegativeWeight { activity: a.id });
            }
            tails.push(t);
            heads.push(h);
            arc_periods.push(period);
        }

        let mut incidence = vec![Vec::new(); events.len()];
        for (k, (&t, &h)) in tails.iter().zip(&heads).enumerate() {
            incidence[t].push(Incidence { arc: k, other: h, forward: true });
            if t != h {
                incidence[h].push(Incidence { arc: k, other: t, forward: false });
            }
        }

        let components = count_components(events.len(), &tails, &heads);
        if components > 1 {
            return Err(NetworkError::Disconnected { components });
        }

        Ok(EventActivityNetwork {
            events,
            activities,
            event_index,
            activity_index,
            tails,
            heads,
            arc_periods,
            incidence,
        })
    }
}

/// An arc seen from one of its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    /// Dense activity index.
    pub arc: usize,
    /// Dense index of the opposite endpoint.
    pub other: usize,
    /// True when the arc leaves the endpoint (the endpoint is the tail).
    pub forward: bool,
}

fn count_components(n: usize, tails: &[usize], heads: &[usize]) -> usize {
    let mut uf = UnionFind::new(n);
    for (&t, &h) in tails.iter().zip(heads) {
        uf.union(t, h);
    }
    (0..n).filter(|&v| uf.find(v) == v).count()
}

/// Plain union-find with path halving.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns false when both were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
        true
    }
}

/// Validated multiperiodic event-activity network.
#[derive(Debug, Clone)]
pub struct EventActivityNetwork {
    events: Vec<Event>,
    activities: Vec<Activity>,
    event_index: HashMap<EventId, usize>,
    activity_index: HashMap<ActivityId, usize>,
    tails: Vec<usize>,
    heads: Vec<usize>,
    arc_periods: Vec<i64>,
    incidence: Vec<Vec<Incidence>>,
}

impl PartialEq for EventActivityNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.events == other.events && self.activities == other.activities
    }
}

impl EventActivityNetwork {
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn activities(&self) -> &[Activity] {
        &self.activities
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn num_activities(&self) -> usize {
        self.activities.len()
    }

    pub fn event_index(&self, id: EventId) -> Option<usize> {
        self.event_index.get(&id).copied()
    }

    pub fn activity_index(&self, id: ActivityId) -> Option<usize> {
        self.activity_index.get(&id).copied()
    }

    pub fn event(&self, id: EventId) -> Option<&Event> {
        self.event_index(id).map(|k| &self.events[k])
    }

    pub fn activity(&self, id: ActivityId) -> Option<&Activity> {
        self.activity_index(id).map(|k| &self.activities[k])
    }

    /// Dense tail index of activity `k`.
    pub fn tail(&self, k: usize) -> usize {
        self.tails[k]
    }

    pub fn head(&self, k: usize) -> usize {
        self.heads[k]
    }

    pub fn period(&self, event: usize) -> i64 {
        self.events[event].period
    }

    /// `T_a` for the activity at dense index `k`.
    pub fn arc_period_at(&self, k: usize) -> i64 {
        self.arc_periods[k]
    }

    pub fn incidence(&self, event: usize) -> &[Incidence] {
        &self.incidence[event]
    }

    /// `T_a = gcd(T_tail, T_head)`.
    pub fn arc_period(&self, activity: ActivityId) -> Result<i64, NetworkError> {
        self.activity_index(activity)
            .map(|k| self.arc_periods[k])
            .ok_or(NetworkError::NoSuchActivity(activity))
    }

    /// `T_C`, the gcd of the arc periods along a closed walk.
    pub fn cycle_period(&self, cycle: &[OrientedArc]) -> Result<i64, NetworkError> {
        let dense = self.dense_walk(cycle)?;
        Ok(dense.iter().fold(0, |g, &(k, _)| gcd(g, self.arc_periods[k])))
    }

    /// Resolves a walk to dense `(index, sign)` pairs and checks that it closes.
    pub fn dense_walk(&self, cycle: &[OrientedArc]) -> Result<Vec<(usize, i64)>, NetworkError> {
        if cycle.is_empty() {
            return Err(NetworkError::NotClosed);
        }
        let mut dense = Vec::with_capacity(cycle.len());
        for step in cycle {
            let k = self
                .activity_index(step.activity)
                .ok_or(NetworkError::NoSuchActivity(step.activity))?;
            dense.push((k, step.sign()));
        }
        let ends = |&(k, s): &(usize, i64)| {
            if s > 0 {
                (self.tails[k], self.heads[k])
            } else {
                (self.heads[k], self.tails[k])
            }
        };
        let start = ends(&dense[0]).0;
        let mut at = start;
        for step in &dense {
            let (from, to) = ends(step);
            if from != at {
                return Err(NetworkError::NotClosed);
            }
            at = to;
        }
        if at != start {
            return Err(NetworkError::NotClosed);
        }
        Ok(dense)
    }

    /// Least common multiple of all event periods.
    pub fn lcm_period(&self) -> i64 {
        self.events.iter().fold(1, |l, e| lcm(l, e.period))
    }

    /// Distinct periods in ascending order.
    pub fn periods(&self) -> Vec<i64> {
        let mut ps: Vec<i64> = self.events.iter().map(|e| e.period).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    pub fn to_builder(&self) -> NetworkBuilder {
        NetworkBuilder {
            events: self.events.clone(),
            activities: self.activities.clone(),
            clamp_spans: false,
            clamped: Vec::new(),
        }
    }

    /// Copy of the network with new weights (dense, by activity index).
    pub fn with_weights(&self, weights: &[Rational]) -> EventActivityNetwork {
        let mut net = self.clone();
        for (a, w) in net.activities.iter_mut().zip(weights) {
            a.weight = *w;
        }
        net
    }

    pub fn dense_times(&self, tt: &Timetable) -> Result<Vec<Rational>, NetworkError> {
        self.events
            .iter()
            .map(|e| tt.times.get(&e.id).copied().ok_or(NetworkError::MissingTime(e.id)))
            .collect()
    }

    pub fn dense_tension(&self, x: &Tension) -> Result<Vec<Rational>, NetworkError> {
        self.activities
            .iter()
            .map(|a| x.values.get(&a.id).copied().ok_or(NetworkError::MissingTension(a.id)))
            .collect()
    }

    pub fn timetable_from_dense(&self, times: &[Rational]) -> Timetable {
        Timetable {
            times: self.events.iter().map(|e| e.id).zip(times.iter().copied()).collect(),
        }
    }

    pub fn tension_from_dense(&self, values: &[Rational]) -> Tension {
        Tension {
            values: self.activities.iter().map(|a| a.id).zip(values.iter().copied()).collect(),
        }
    }

    /// Canonical tension of activity `k` under dense times: the value in `[l_a, l_a + T_a)`.
    pub fn canonical_tension_at(&self, k: usize, times: &[Rational]) -> Rational {
        let diff = times[self.heads[k]] - times[self.tails[k]];
        representative_from(&diff, self.arc_periods[k], self.activities[k].lower)
    }

    /// Per-arc canonical tension `x_a ∈ [l_a, l_a + T_a)` with `x_a ≡ π_j − π_i (mod T_a)`,
    /// together with the arcs where `x_a > u_a`.
    pub fn tension_from_timetable(
        &self,
        tt: &Timetable,
    ) -> Result<(Tension, FeasibilityReport), NetworkError> {
        let times = self.dense_times(tt)?;
        let mut values = Vec::with_capacity(self.activities.len());
        let mut report = FeasibilityReport::default();
        for (k, a) in self.activities.iter().enumerate() {
            let x = self.canonical_tension_at(k, &times);
            if x > rat(a.upper) {
                report.violations.push(Violation::Bound {
                    activity: a.id,
                    value: x,
                    lower: a.lower,
                    upper: a.upper,
                });
            }
            values.push(x);
        }
        Ok((self.tension_from_dense(&values), report))
    }

    /// Checks (MP1) together with the bounds for every activity.
    pub fn check_timetable(&self, tt: &Timetable) -> Result<FeasibilityReport, NetworkError> {
        self.tension_from_timetable(tt).map(|(_, report)| report)
    }

    /// Checks bounds and T-cycle periodicity of `x`.
    ///
    /// With a basis only the basis cycles are checked, which characterises
    /// periodic tensions when the basis comes from a sharp tree. Without one
    /// every cycle is covered through the congruence reconstruction.
    pub fn check_tension(
        &self,
        x: &Tension,
        basis: Option<&CycleBasis>,
    ) -> Result<FeasibilityReport, crate::congruence::CongruenceError> {
        let values = self.dense_tension(x)?;
        let mut report = FeasibilityReport::default();
        for (k, a) in self.activities.iter().enumerate() {
            if values[k] < rat(a.lower) || values[k] > rat(a.upper) {
                report.violations.push(Violation::Bound {
                    activity: a.id,
                    value: values[k],
                    lower: a.lower,
                    upper: a.upper,
                });
            }
        }
        match basis {
            Some(basis) => {
                basis.validate_for(self).map_err(crate::congruence::CongruenceError::Basis)?;
                for cycle in &basis.cycles {
                    let dense = self.dense_walk(&cycle.oriented_arcs)?;
                    let sum: Rational = dense
                        .iter()
                        .map(|&(k, s)| values[k] * rat(s))
                        .fold(crate::num::zero(), |acc, v| acc + v);
                    let residue = crate::num::mod_floor(&sum, cycle.period);
                    if residue != crate::num::zero() {
                        report.violations.push(Violation::Periodicity {
                            cycle: cycle.oriented_arcs.clone(),
                            residue,
                            modulus: cycle.period,
                        });
                    }
                }
            }
            None => {
                use crate::congruence::{timetable_from_tension_general, Reconstruction};
                match timetable_from_tension_general(self, x, &Default::default())? {
                    Reconstruction::Periodic(_) => {}
                    Reconstruction::NotPeriodic(certificate) => {
                        report.violations.push(match certificate {
                            Some(c) => Violation::Periodicity {
                                cycle: c.cycle,
                                residue: c.residue,
                                modulus: c.modulus,
                            },
                            None => Violation::PeriodicityUnlocated,
                        })
                    }
                }
            }
        }
        Ok(report)
    }

    /// Objective `Σ w_a x_a` for dense tension values.
    pub fn objective_dense(&self, values: &[Rational]) -> Rational {
        self.activities
            .iter()
            .zip(values)
            .map(|(a, x)| a.weight * x)
            .fold(crate::num::zero(), |acc, v| acc + v)
    }

    pub fn objective(&self, x: &Tension) -> Result<Rational, NetworkError> {
        Ok(self.objective_dense(&self.dense_tension(x)?))
    }
}

/// Per-event times `π`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Timetable {
    #[serde(with = "crate::num::serde_exact_map")]
    pub times: BTreeMap<EventId, Rational>,
}

impl Timetable {
    pub fn get(&self, event: EventId) -> Option<&Rational> {
        self.times.get(&event)
    }

    /// Shifts so that the lowest event id sits at 0 and reduces each time into `[0, T_i)`.
    pub fn normalized(&self, net: &EventActivityNetwork) -> Timetable {
        let shift = net
            .events()
            .first()
            .and_then(|e| self.times.get(&e.id))
            .copied()
            .unwrap_or_default();
        let times = net
            .events()
            .iter()
            .filter_map(|e| {
                self.times
                    .get(&e.id)
                    .map(|t| (e.id, crate::num::mod_floor(&(t - shift), e.period)))
            })
            .collect();
        Timetable { times }
    }
}

/// Per-activity durations `x`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tension {
    #[serde(with = "crate::num::serde_exact_map")]
    pub values: BTreeMap<ActivityId, Rational>,
}

impl Tension {
    pub fn get(&self, activity: ActivityId) -> Option<&Rational> {
        self.values.get(&activity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `x_a` outside `[l_a, u_a]` (for timetables: the canonical representative exceeds `u_a`).
    Bound {
        activity: ActivityId,
        value: Rational,
        lower: i64,
        upper: i64,
    },
    /// `γ_Cᵀx ≢ 0 (mod T_C)`; `residue` is the remainder in `[0, T_C)`.
    Periodicity {
        cycle: Vec<OrientedArc>,
        residue: Rational,
        modulus: i64,
    },
    /// Periodicity fails but no violated simple cycle was found within the enumeration cap.
    PeriodicityUnlocated,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Bound { activity, value, lower, upper } => write!(
                f,
                "activity {activity}: value {} outside [{lower}, {upper}]",
                crate::num::exact(value)
            ),
            Violation::Periodicity { cycle, residue, modulus } => {
                let arcs: Vec<String> = cycle
                    .iter()
                    .map(|s| format!("{}{}", if s.forward { "+" } else { "-" }, s.activity))
                    .collect();
                write!(
                    f,
                    "cycle [{}]: sum ≡ {} mod {modulus}",
                    arcs.join(" "),
                    crate::num::exact(residue)
                )
            }
            Violation::PeriodicityUnlocated => write!(f, "periodicity violated (cycle not located)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    /// Activities named in bound violations.
    pub fn violated_activities(&self) -> Vec<ActivityId> {
        self.violations
            .iter()
            .filter_map(|v| match v {
                Violation::Bound { activity, .. } => Some(*activity),
                _ => None,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn two_events(p: i64, q: i64, lower: i64, upper: i64) -> EventActivityNetwork {
        let mut b = NetworkBuilder::new();
        let i = b.add_event(0, p, "i");
        let j = b.add_event(1, q, "j");
        b.add_activity(0, i, j, lower, upper, rat(1), ActivityKind::Drive);
        b.build().unwrap()
    }

    #[test]
    fn arc_periods_from_gcd() {
        assert_eq!(two_events(20, 10, 0, 0).arc_period(ActivityId(0)).unwrap(), 10);
        assert_eq!(two_events(60, 60, 0, 0).arc_period(ActivityId(0)).unwrap(), 60);
        assert_eq!(two_events(75, 100, 0, 0).arc_period(ActivityId(0)).unwrap(), 25);
        assert_eq!(
            two_events(75, 100, 0, 0).arc_period(ActivityId(9)),
            Err(NetworkError::NoSuchActivity(ActivityId(9)))
        );
    }

    #[test]
    fn cycle_periods() {
        let tri = fixtures::triangle(20, 10, 10);
        let walk = [
            OrientedArc::forward(ActivityId(0)),
            OrientedArc::forward(ActivityId(1)),
            OrientedArc::forward(ActivityId(2)),
        ];
        assert_eq!(tri.cycle_period(&walk).unwrap(), 10);
        let tri = fixtures::triangle(6, 10, 15);
        assert_eq!(tri.cycle_period(&walk).unwrap(), 1);
        assert_eq!(
            tri.cycle_period(&[OrientedArc::forward(ActivityId(0))]),
            Err(NetworkError::NotClosed)
        );
        // reversed orientation of one step breaks closure
        let broken = [
            OrientedArc::forward(ActivityId(0)),
            OrientedArc::backward(ActivityId(1)),
            OrientedArc::forward(ActivityId(2)),
        ];
        assert_eq!(tri.cycle_period(&broken), Err(NetworkError::NotClosed));
    }

    #[test]
    fn canonical_representatives() {
        let net = two_events(10, 10, 1, 5);
        let tt = net.timetable_from_dense(&[rat(0), rat(1)]);
        let (x, report) = net.tension_from_timetable(&tt).unwrap();
        assert_eq!(x.values[&ActivityId(0)], rat(1));
        assert!(report.is_feasible());

        let net = two_events(20, 20, 6, 6);
        let tt = net.timetable_from_dense(&[rat(0), rat(24)]);
        let (x, report) = net.tension_from_timetable(&tt).unwrap();
        assert_eq!(x.values[&ActivityId(0)], rat(24));
        assert_eq!(report.violated_activities(), vec![ActivityId(0)]);
    }

    #[test]
    fn figure_three_arc_three_four() {
        let net = fixtures::figure3();
        let tt = net.timetable_from_dense(&[rat(0), rat(1), rat(8), rat(14)]);
        let (x, report) = net.tension_from_timetable(&tt).unwrap();
        assert_eq!(x.values[&fixtures::ARC_3_4], rat(16));
        assert!(report.is_feasible());
    }

    #[test]
    fn full_span_arcs_never_violate() {
        let mut b = NetworkBuilder::new();
        let e: Vec<_> = [12, 8, 6].iter().enumerate().map(|(k, &p)| b.add_event(k as u32, p, "")).collect();
        b.add_activity(0, e[0], e[1], 0, 3, rat(1), ActivityKind::Transfer);
        b.add_activity(1, e[1], e[2], 0, 1, rat(1), ActivityKind::Transfer);
        b.add_activity(2, e[2], e[0], 0, 5, rat(1), ActivityKind::Transfer);
        let net = b.build().unwrap();
        for t in 0..48 {
            let tt = net.timetable_from_dense(&[rat(0), rat(t % 8), rat((5 * t) % 6)]);
            assert!(net.check_timetable(&tt).unwrap().is_feasible());
        }
    }

    #[test]
    fn construction_rejects_bad_input() {
        let mut b = NetworkBuilder::new();
        b.add_event(0, 0, "");
        assert!(matches!(b.build(), Err(NetworkError::InvalidPeriod { .. })));

        let mut b = NetworkBuilder::new();
        let i = b.add_event(0, 10, "");
        let j = b.add_event(1, 10, "");
        b.add_event(2, 10, "");
        b.add_activity(0, i, j, 0, 0, rat(0), ActivityKind::Drive);
        assert_eq!(b.build(), Err(NetworkError::Disconnected { components: 2 }));

        let mut b = NetworkBuilder::new();
        let i = b.add_event(0, 20, "");
        let j = b.add_event(1, 10, "");
        b.add_activity(0, i, j, 0, 10, rat(0), ActivityKind::Drive);
        assert!(matches!(b.build(), Err(NetworkError::SpanTooWide { span: 10, arc_period: 10, .. })));
        let mut b = b.clamp_spans(true);
        let net = b.build().unwrap();
        assert_eq!(net.activities()[0].upper, 9);
        assert_eq!(b.clamped(), &[ActivityId(0)]);

        let mut b = NetworkBuilder::new();
        let i = b.add_event(0, 20, "");
        b.add_activity(0, i, EventId(7), 0, 1, rat(0), ActivityKind::Drive);
        assert!(matches!(b.build(), Err(NetworkError::UnknownEvent { .. })));
    }

    #[test]
    fn tension_checks_with_and_without_basis() {
        let net = fixtures::figure3();
        let x = fixtures::figure3_tension(&net);
        assert!(net.check_tension(&x, None).unwrap().is_feasible());
        let tree = fixtures::figure3_tree_c(&net);
        let basis = crate::tree::fundamental_basis(&net, &tree).unwrap();
        assert!(net.check_tension(&x, Some(&basis)).unwrap().is_feasible());

        let mut bumped = x.clone();
        *bumped.values.get_mut(&ActivityId(1)).unwrap() += rat(1);
        // stays within bounds of arc (2,3) so only periodicity can fail
        let report = net.check_tension(&bumped, None).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Periodicity { .. })));
        let report = net.check_tension(&bumped, Some(&basis)).unwrap();
        assert!(!report.is_feasible());

        let zero = net.tension_from_dense(&vec![rat(0); net.num_activities()]);
        let mut b = net.to_builder();
        for a in b.activities_mut() {
            a.lower = 0;
            a.upper = 0;
        }
        let flat = b.build().unwrap();
        assert!(flat.check_tension(&zero, None).unwrap().is_feasible());
    }
}
