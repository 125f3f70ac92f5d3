//! Small reference instances used by tests, benchmarks and the command line.

use crate::network::{
    ActivityId, ActivityKind, EventActivityNetwork, EventId, NetworkBuilder, Tension, Timetable,
};
use crate::num::rat;
use crate::routing::ODMatrix;
use crate::tree::SpanningTree;

/// Activity `(3, 4)` of [`figure3`].
pub const ARC_3_4: ActivityId = ActivityId(4);

/// Four events with periods 20, 10, 10, 20 (ids 1..=4) and five activities (ids 1..=5):
/// `(1,2) [1,5]`, `(2,3) [7,12]`, `(3,1) [2,8]`, `(3,4) [16,16]`, `(4,1) [6,6]`.
pub fn figure3() -> EventActivityNetwork {
    let mut b = NetworkBuilder::new();
    let e: Vec<EventId> = [20, 10, 10, 20]
        .iter()
        .enumerate()
        .map(|(k, &p)| b.add_event(k as u32 + 1, p, format!("v{}", k + 1)))
        .collect();
    let arcs = [(0, 1, 1, 5), (1, 2, 7, 12), (2, 0, 2, 8), (2, 3, 16, 16), (3, 0, 6, 6)];
    for (k, &(t, h, l, u)) in arcs.iter().enumerate() {
        b.add_activity(k as u32 + 1, e[t], e[h], l, u, rat(1), ActivityKind::Drive);
    }
    b.build().expect("figure 3 instance is valid")
}

/// The tension `(1, 7, 2, 16, 6)` on [`figure3`].
pub fn figure3_tension(net: &EventActivityNetwork) -> Tension {
    net.tension_from_dense(&[rat(1), rat(7), rat(2), rat(16), rat(6)])
}

/// Non-sharp tree `{(1,2), (2,3), (3,4)}` rooted at event 1.
pub fn figure3_tree_b(_net: &EventActivityNetwork) -> SpanningTree {
    SpanningTree::new([ActivityId(1), ActivityId(2), ActivityId(4)], EventId(1))
}

/// Sharp tree `{(1,2), (2,3), (4,1)}` rooted at event 1.
pub fn figure3_tree_c(_net: &EventActivityNetwork) -> SpanningTree {
    SpanningTree::new([ActivityId(1), ActivityId(2), ActivityId(5)], EventId(1))
}

/// Directed triangle `0 -> 1 -> 2 -> 0` with the given periods and zero-width bounds.
pub fn triangle(p0: i64, p1: i64, p2: i64) -> EventActivityNetwork {
    let mut b = NetworkBuilder::new();
    let e: Vec<EventId> = [p0, p1, p2]
        .iter()
        .enumerate()
        .map(|(k, &p)| b.add_event(k as u32, p, ""))
        .collect();
    for k in 0..3 {
        b.add_activity(k as u32, e[k], e[(k + 1) % 3], 0, 0, rat(1), ActivityKind::Drive);
    }
    b.build().expect("triangle is valid")
}

/// Two lines through stations A, B, C, D with one passenger from A to D.
///
/// The orange line (period 60, events 1..=4 at A, B, C, D) runs A→B 5, B→C 45,
/// C→D 5. The blue line (period 30, events 5 and 6) runs B→C in 5. Transfers
/// orange→blue at B (activity 5) and blue→orange at C (activity 6) take
/// `[5, 34]`. In the returned timetable both transfers are 5 minutes on the
/// network, but no single trip chain realises both.
pub fn figure10() -> (EventActivityNetwork, ODMatrix, Timetable) {
    let mut b = NetworkBuilder::new();
    let stations = ["A", "B", "C", "D"];
    let orange: Vec<EventId> =
        stations.iter().enumerate().map(|(k, s)| b.add_event(k as u32 + 1, 60, format!("orange {s}"))).collect();
    let blue_b = b.add_event(5, 30, "blue B");
    let blue_c = b.add_event(6, 30, "blue C");
    b.add_activity(1, orange[0], orange[1], 5, 5, rat(1), ActivityKind::Drive);
    b.add_activity(2, orange[1], orange[2], 45, 45, rat(1), ActivityKind::Drive);
    b.add_activity(3, orange[2], orange[3], 5, 5, rat(1), ActivityKind::Drive);
    b.add_activity(4, blue_b, blue_c, 5, 5, rat(1), ActivityKind::Drive);
    b.add_activity(5, orange[1], blue_b, 5, 34, rat(1), ActivityKind::Transfer);
    b.add_activity(6, blue_c, orange[2], 5, 34, rat(1), ActivityKind::Transfer);
    let net = b.build().expect("figure 10 instance is valid");

    let mut od = ODMatrix::new();
    od.attach("A", vec![orange[0]], vec![]);
    od.attach("B", vec![orange[1], blue_b], vec![orange[1]]);
    od.attach("C", vec![orange[2]], vec![orange[2], blue_c]);
    od.attach("D", vec![], vec![orange[3]]);
    od.add_demand("A", "D", rat(1)).expect("nonnegative demand");

    let tt = net.timetable_from_dense(&[0, 5, 50, 55, 10, 15].map(rat));
    (net, od, tt)
}
