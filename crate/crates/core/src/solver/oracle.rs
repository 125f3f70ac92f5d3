//! Exhaustive reference solvers for small instances.

use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::Mutex;

use super::tension_lp::{min_cost_tension, DiffArc};
use super::SolverError;
use crate::exec::Execution;
use crate::formulation::modulo_window;
use crate::network::{EventActivityNetwork, Timetable};
use crate::num::{common_denominator, Rational};

/// Default limit on the number of timetables [`brute_force_optimum`] may enumerate.
pub const BRUTE_FORCE_CAP: u64 = 10_000_000;

struct Arc {
    tail: usize,
    head: usize,
    lower: i64,
    upper: i64,
    period: i64,
    weight: i64,
}

struct Enumeration {
    /// arcs whose later endpoint is event `v`, grouped by `v`
    by_event: Vec<Vec<Arc>>,
    /// `Σ w·l` over arcs completed after event `v`
    rest: Vec<i64>,
    periods: Vec<i64>,
    best: AtomicI64,
    incumbent: Mutex<Option<(i64, Vec<i64>)>>,
}

impl Enumeration {
    fn dfs(&self, v: usize, times: &mut Vec<i64>, acc: i64) {
        if v == times.len() {
            let mut inc = self.incumbent.lock().expect("incumbent lock");
            let better = match &*inc {
                None => true,
                Some((obj, t)) => acc < *obj || (acc == *obj && times.as_slice() < t.as_slice()),
            };
            if better {
                *inc = Some((acc, times.clone()));
                self.best.fetch_min(acc, Ordering::Relaxed);
            }
            return;
        }
        for t in 0..self.periods[v] {
            times[v] = t;
            if let Some(acc) = self.step(v, times, acc) {
                // ties are explored so the lexicographically smallest optimum wins
                if acc + self.rest[v] <= self.best.load(Ordering::Relaxed) {
                    self.dfs(v + 1, times, acc);
                }
            }
        }
    }

    fn step(&self, v: usize, times: &[i64], mut acc: i64) -> Option<i64> {
        for a in &self.by_event[v] {
            let x = a.lower + (times[a.head] - times[a.tail] - a.lower).rem_euclid(a.period);
            if x > a.upper {
                return None;
            }
            acc += a.weight * x;
        }
        Some(acc)
    }
}

/// Optimum over all integer timetables with the lowest event at time 0.
///
/// The result is the lexicographically smallest optimal timetable (by event
/// index), in both execution modes. Errors when `Π T_i` over the free events
/// exceeds `cap`.
pub fn brute_force_optimum(
    net: &EventActivityNetwork,
    cap: u64,
    exec: Execution,
) -> Result<Option<(Rational, Timetable)>, SolverError> {
    let n = net.num_events();
    let size = (1..n).try_fold(1u128, |acc, v| acc.checked_mul(net.period(v) as u128));
    match size {
        Some(s) if s <= cap as u128 => {}
        Some(s) => return Err(SolverError::CapExceeded { size: s, cap }),
        None => return Err(SolverError::CapExceeded { size: u128::MAX, cap }),
    }
    let scale = common_denominator(net.activities().iter().map(|a| &a.weight));
    let mut by_event: Vec<Vec<Arc>> = (0..n).map(|_| Vec::new()).collect();
    let mut total: i128 = 0;
    for (k, a) in net.activities().iter().enumerate() {
        let w = (a.weight * Rational::from_integer(scale)).to_integer();
        total += w * (a.upper.abs() as i128 + net.arc_period_at(k) as i128);
        let arc = Arc {
            tail: net.tail(k),
            head: net.head(k),
            lower: a.lower,
            upper: a.upper,
            period: net.arc_period_at(k),
            weight: i64::try_from(w).map_err(|_| SolverError::Overflow)?,
        };
        by_event[arc.tail.max(arc.head)].push(arc);
    }
    if total > i64::MAX as i128 / 2 {
        return Err(SolverError::Overflow);
    }
    let mut rest = vec![0i64; n];
    for v in (0..n.saturating_sub(1)).rev() {
        rest[v] = rest[v + 1] + by_event[v + 1].iter().map(|a| a.weight * a.lower).sum::<i64>();
    }
    let search = Enumeration {
        by_event,
        rest,
        periods: (0..n).map(|v| net.period(v)).collect(),
        best: AtomicI64::new(i64::MAX),
        incumbent: Mutex::new(None),
    };
    let mut times = vec![0i64; n];
    if let Some(acc) = search.step(0, &times, 0) {
        if n == 1 || !exec.is_parallel() {
            search.dfs(1, &mut times, acc);
        } else {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..search.periods[1]).into_par_iter().for_each(|t| {
                    let mut times = vec![0i64; n];
                    times[1] = t;
                    if let Some(acc) = search.step(1, &times, acc) {
                        search.dfs(2, &mut times, acc);
                    }
                });
            }
            #[cfg(not(feature = "parallel"))]
            search.dfs(1, &mut times, acc);
        }
    }
    let best = search.incumbent.into_inner().expect("incumbent lock");
    Ok(best.map(|(obj, times)| {
        let times: Vec<Rational> = times.into_iter().map(|t| Rational::from_integer(t as i128)).collect();
        (Rational::new(obj as i128, scale), net.timetable_from_dense(&times))
    }))
}

/// Optimum of the arc formulation by enumerating every modulo parameter `p_a`.
///
/// Each partial assignment is bounded by the tension problem over the arcs
/// assigned so far plus the event boxes `π_i ∈ [0, T_i − 1]`; leaves are
/// solved exactly. Independent of cycle bases and trees.
pub fn arc_enumeration_optimum(net: &EventActivityNetwork) -> Result<Option<Rational>, SolverError> {
    let n = net.num_events();
    let m = net.num_activities();
    let scale = common_denominator(net.activities().iter().map(|a| &a.weight));
    let weights: Vec<i128> = net
        .activities()
        .iter()
        .map(|a| (a.weight * Rational::from_integer(scale)).to_integer())
        .collect();
    let ranges: Vec<(i64, i64)> =
        (0..n).map(|v| if v == 0 { (0, 0) } else { (0, net.period(v) - 1) }).collect();
    let windows: Vec<(i64, i64)> = net
        .activities()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            modulo_window(a.lower, a.upper, ranges[net.tail(k)], ranges[net.head(k)], net.arc_period_at(k))
        })
        .collect();
    let mut lower_rest = vec![0i128; m + 1];
    for k in (0..m).rev() {
        lower_rest[k] = lower_rest[k + 1] + weights[k] * net.activities()[k].lower as i128;
    }

    struct Search<'a> {
        net: &'a EventActivityNetwork,
        weights: &'a [i128],
        windows: &'a [(i64, i64)],
        lower_rest: &'a [i128],
        best: Option<i128>,
    }

    impl Search<'_> {
        /// `arcs[i]` carries shift `shifts[i]`; the zero-weight boxes add nothing to the sum.
        fn go(&mut self, arcs: &mut Vec<DiffArc>, shifts: &mut Vec<i128>, depth: usize) {
            let Some(pi) = min_cost_tension(self.net.num_events(), arcs) else { return };
            let assigned: i128 = arcs
                .iter()
                .zip(shifts.iter())
                .map(|(a, d)| a.weight * (pi[a.head] - pi[a.tail] + d))
                .sum();
            let bound = assigned + self.lower_rest[depth];
            if self.best.is_some_and(|best| bound >= best) {
                return;
            }
            if depth == self.net.num_activities() {
                self.best = Some(bound);
                return;
            }
            let a = &self.net.activities()[depth];
            let period = self.net.arc_period_at(depth) as i128;
            let (lo, hi) = self.windows[depth];
            for p in lo..=hi {
                let d = period * p as i128;
                arcs.push(DiffArc {
                    tail: self.net.tail(depth),
                    head: self.net.head(depth),
                    lower: a.lower as i128 - d,
                    upper: a.upper as i128 - d,
                    weight: self.weights[depth],
                });
                shifts.push(d);
                self.go(arcs, shifts, depth + 1);
                arcs.pop();
                shifts.pop();
            }
        }
    }

    let mut arcs: Vec<DiffArc> = (1..n)
        .map(|v| DiffArc { tail: 0, head: v, lower: 0, upper: net.period(v) as i128 - 1, weight: 0 })
        .collect();
    let mut shifts = vec![0i128; arcs.len()];
    let mut search = Search { net, weights: &weights, windows: &windows, lower_rest: &lower_rest, best: None };
    search.go(&mut arcs, &mut shifts, 0);
    Ok(search.best.map(|b| Rational::new(b, scale)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::num::rat;

    #[test]
    fn figure_three() {
        let net = fixtures::figure3();
        let (obj, tt) = brute_force_optimum(&net, BRUTE_FORCE_CAP, Execution::Sequential).unwrap().unwrap();
        assert_eq!(obj, rat(32));
        assert!(net.check_timetable(&tt).unwrap().is_feasible());
        assert_eq!(
            brute_force_optimum(&net, BRUTE_FORCE_CAP, Execution::Parallel).unwrap().unwrap(),
            (obj, tt)
        );
        assert_eq!(arc_enumeration_optimum(&net).unwrap(), Some(rat(32)));
    }

    #[test]
    fn cap_is_enforced() {
        let net = fixtures::figure3();
        assert_eq!(
            brute_force_optimum(&net, 100, Execution::Sequential),
            Err(SolverError::CapExceeded { size: 2000, cap: 100 })
        );
    }

    #[test]
    fn infeasible_triangle() {
        // three zero-length arcs around a cycle of period 5 need 0 ≡ 0, but a fourth forces 1
        let mut b = crate::network::NetworkBuilder::new();
        for v in 0..3 {
            b.add_event(v, 5, "");
        }
        let k = crate::network::ActivityKind::Drive;
        b.add_activity(0, crate::network::EventId(0), crate::network::EventId(1), 1, 1, rat(1), k);
        b.add_activity(1, crate::network::EventId(1), crate::network::EventId(2), 1, 1, rat(1), k);
        b.add_activity(2, crate::network::EventId(2), crate::network::EventId(0), 1, 1, rat(1), k);
        let net = b.build().unwrap();
        assert_eq!(brute_force_optimum(&net, BRUTE_FORCE_CAP, Execution::Sequential).unwrap(), None);
        assert_eq!(arc_enumeration_optimum(&net).unwrap(), None);
    }
}
