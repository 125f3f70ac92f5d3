//! Reader for TimPassLib directories.
//!
//! A directory holds `Events-periodic.giv`, `Activities-periodic.giv`,
//! `Config.cnf` and optionally `OD.giv`. TimPassLib models a line with
//! frequency `f` by `f` copies of its events in a common period `P`. Here the
//! copies collapse onto the first repetition, which gets period `P / f`.
//! Activities are mapped onto the collapsed events, duplicates are merged
//! (summing passenger weights), and activities that become loops are dropped
//! since the shorter period already enforces them.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use super::{data_lines, read_file, Instance, IoError, Row};
use crate::network::{ActivityKind, EventId, NetworkBuilder};
use crate::num::{parse_int, parse_rational, Rational};
use crate::routing::ODMatrix;

#[derive(Debug, Clone)]
pub struct TimPassLibInstance {
    pub instance: Instance,
    /// For every TimPassLib event, the collapsed event it maps to.
    pub event_map: BTreeMap<u32, EventId>,
    pub warnings: Vec<String>,
}

struct RawEvent {
    id: u32,
    arrival: bool,
    stop: String,
    line: String,
    direction: String,
    repetition: i64,
}

fn unquote(s: &str) -> &str {
    s.trim().trim_matches('"').trim()
}

fn table(dir: &Path, name: &str) -> Result<Option<String>, IoError> {
    let path = dir.join(name);
    if path.exists() {
        read_file(&path).map(Some)
    } else {
        Ok(None)
    }
}

fn required(dir: &Path, name: &str) -> Result<String, IoError> {
    read_file(&dir.join(name))
}

fn period_length(config: &str) -> Result<i64, IoError> {
    for (line, raw) in data_lines(config) {
        let row = Row::split(line, raw);
        if unquote(row.str(0)) == "period_length" {
            return row.num(1, |s| parse_int(unquote(s)));
        }
    }
    Err(IoError::parse(1, 1, "Config.cnf has no period_length"))
}

fn kind(row: &Row, k: usize) -> Result<ActivityKind, IoError> {
    Ok(match unquote(row.str(k)).to_ascii_lowercase().as_str() {
        "drive" => ActivityKind::Drive,
        "wait" => ActivityKind::Dwell,
        "change" => ActivityKind::Transfer,
        "headway" => ActivityKind::Headway,
        "sync" | "turnaround" => ActivityKind::Sync,
        other => return Err(IoError::parse(row.line, row.column(k), format!("unknown activity type `{other}`"))),
    })
}

fn id(row: &Row, k: usize) -> Result<u32, IoError> {
    let v = row.num(k, parse_int)?;
    u32::try_from(v).map_err(|_| IoError::parse(row.line, row.column(k), format!("invalid id {v}")))
}

pub fn read_timpasslib(dir: &Path) -> Result<TimPassLibInstance, IoError> {
    let period = period_length(&required(dir, "Config.cnf")?)?;
    let mut warnings = Vec::new();

    let mut raw_events = Vec::new();
    for (line, raw) in data_lines(&required(dir, "Events-periodic.giv")?) {
        let row = Row::split(line, raw);
        row.expect_len(6..=7, "an event")?;
        let arrival = match unquote(row.str(1)).to_ascii_lowercase().as_str() {
            "arrival" => true,
            "departure" => false,
            other => return Err(IoError::parse(line, row.column(1), format!("unknown event type `{other}`"))),
        };
        raw_events.push(RawEvent {
            id: id(&row, 0)?,
            arrival,
            stop: unquote(row.str(2)).to_string(),
            line: unquote(row.str(3)).to_string(),
            direction: unquote(row.str(4)).to_string(),
            repetition: row.num(5, parse_int)?,
        });
    }

    let mut frequency: HashMap<(&str, &str), i64> = HashMap::new();
    for e in &raw_events {
        let f = frequency.entry((&e.line, &e.direction)).or_insert(1);
        *f = (*f).max(e.repetition);
    }
    // An event is identified by (stop, line, direction, arrival, position within the line).
    // Repetition r of a line visits the same positions in the same order as repetition 1.
    let mut firsts: HashMap<(&str, &str), Vec<&RawEvent>> = HashMap::new();
    let mut others: HashMap<(&str, &str, i64), Vec<&RawEvent>> = HashMap::new();
    for e in &raw_events {
        if e.repetition == 1 {
            firsts.entry((&e.line, &e.direction)).or_default().push(e);
        } else {
            others.entry((&e.line, &e.direction, e.repetition)).or_default().push(e);
        }
    }
    let mut b = NetworkBuilder::new().clamp_spans(true);
    let mut event_map = BTreeMap::new();
    let mut stations: BTreeMap<String, (Vec<EventId>, Vec<EventId>)> = BTreeMap::new();
    let mut keys: Vec<_> = firsts.keys().copied().collect();
    keys.sort();
    for key in keys {
        let f = frequency[&key];
        if period % f != 0 {
            return Err(IoError::parse(
                1,
                1,
                format!("line {} has frequency {f}, which does not divide the period {period}", key.0),
            ));
        }
        let base = &firsts[&key];
        for e in base {
            b.add_event(e.id, period / f, format!("{} {} {}{}", e.stop, e.line, e.direction, if e.arrival { " arr" } else { " dep" }));
            event_map.insert(e.id, EventId(e.id));
            let s = stations.entry(e.stop.clone()).or_default();
            if e.arrival { &mut s.1 } else { &mut s.0 }.push(EventId(e.id));
        }
        for r in 2..=f {
            let copies = others.get(&(key.0, key.1, r)).map(Vec::as_slice).unwrap_or(&[]);
            if copies.len() != base.len() {
                return Err(IoError::parse(
                    1,
                    1,
                    format!("line {} repetition {r} has {} events, repetition 1 has {}", key.0, copies.len(), base.len()),
                ));
            }
            for (c, e) in copies.iter().zip(base.iter()) {
                if c.stop != e.stop || c.arrival != e.arrival {
                    return Err(IoError::parse(1, 1, format!("event {} does not repeat event {}", c.id, e.id)));
                }
                event_map.insert(c.id, EventId(e.id));
            }
        }
    }
    for e in &raw_events {
        if !event_map.contains_key(&e.id) {
            return Err(IoError::parse(1, 1, format!("event {} belongs to a line without repetition 1", e.id)));
        }
    }

    // (tail, head, kind, lower, upper) -> (first id, summed weight)
    type Key = (EventId, EventId, ActivityKind, i64, i64);
    let mut merged: BTreeMap<Key, (u32, Rational)> = BTreeMap::new();
    for (line, raw) in data_lines(&required(dir, "Activities-periodic.giv")?) {
        let row = Row::split(line, raw);
        row.expect_len(6..=7, "an activity")?;
        let aid = id(&row, 0)?;
        let kind = kind(&row, 1)?;
        let map = |k: usize| -> Result<EventId, IoError> {
            let e = id(&row, k)?;
            event_map
                .get(&e)
                .copied()
                .ok_or_else(|| IoError::parse(line, row.column(k), format!("unknown event {e}")))
        };
        let (tail, head) = (map(2)?, map(3)?);
        let (lower, upper) = (row.num(4, parse_int)?, row.num(5, parse_int)?);
        let weight = if row.fields.len() > 6 { row.num(6, parse_rational)? } else { Rational::default() };
        if tail == head {
            warnings.push(format!("activity {aid} becomes a loop after collapsing repetitions and is dropped"));
            continue;
        }
        let entry = merged.entry((tail, head, kind, lower, upper)).or_insert((aid, Rational::default()));
        entry.0 = entry.0.min(aid);
        entry.1 += weight;
    }
    for ((tail, head, kind, lower, upper), (aid, weight)) in merged {
        b.add_activity(aid, tail, head, lower, upper, weight, kind);
    }
    let network = b.build()?;
    warnings.extend(
        b.clamped().iter().map(|a| format!("activity {a} spans a whole collapsed period and was clamped")),
    );

    let od = match table(dir, "OD.giv")? {
        None => None,
        Some(text) => {
            let mut od = ODMatrix::new();
            for (name, (boarding, alighting)) in stations {
                od.attach(name, boarding, alighting);
            }
            for (line, raw) in data_lines(&text) {
                let row = Row::split(line, raw);
                row.expect_len(3..=3, "an OD entry")?;
                let demand = row.num(2, parse_rational)?;
                if demand > Rational::default() {
                    od.add_demand(unquote(row.str(0)), unquote(row.str(1)), demand)
                        .map_err(|e| IoError::parse(line, row.column(2), e.to_string()))?;
                }
            }
            od.validate(&network)?;
            Some(od)
        }
    };
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(TimPassLibInstance { instance: Instance { network, od }, event_map, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    // One line of frequency 2 (stops 1 -> 2) and one of frequency 1 (stops 2 -> 3)
    // in a period of 20, with a transfer at stop 2.
    const EVENTS: &str = "\
# event-id; type; stop-id; line-id; line-direction; line-freq-repetition; passengers
1; \"departure\"; 1; 1; >; 1; 0
2; \"arrival\"; 2; 1; >; 1; 0
3; \"departure\"; 1; 1; >; 2; 0
4; \"arrival\"; 2; 1; >; 2; 0
5; \"departure\"; 2; 2; >; 1; 0
6; \"arrival\"; 3; 2; >; 1; 0
";
    const ACTIVITIES: &str = "\
# activity-index; type; from-event; to-event; lower-bound; upper-bound; passengers
1; \"drive\"; 1; 2; 3; 5; 4
2; \"drive\"; 3; 4; 3; 5; 6
3; \"headway\"; 1; 3; 2; 18; 0
4; \"change\"; 2; 5; 2; 30; 10
5; \"change\"; 4; 5; 2; 30; 0
6; \"drive\"; 5; 6; 4; 4; 10
";

    fn write_dir(od: Option<&str>) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("Events-periodic.giv"), EVENTS).unwrap();
        std::fs::write(dir.path().join("Activities-periodic.giv"), ACTIVITIES).unwrap();
        std::fs::write(dir.path().join("Config.cnf"), "# config\nperiod_length; 20\n").unwrap();
        if let Some(od) = od {
            std::fs::write(dir.path().join("OD.giv"), od).unwrap();
        }
        dir
    }

    #[test]
    fn repetitions_collapse() {
        let dir = write_dir(Some("# origin; destination; customers\n1; 3; 10\n1; 2; 0\n"));
        let t = read_timpasslib(dir.path()).unwrap();
        let net = &t.instance.network;
        assert_eq!(net.num_events(), 4);
        assert_eq!(net.period(net.event_index(EventId(1)).unwrap()), 10);
        assert_eq!(net.period(net.event_index(EventId(5)).unwrap()), 20);
        assert_eq!(t.event_map[&4], EventId(2));
        // the two drives merge, the headway becomes a loop, the two changes merge
        assert_eq!(net.num_activities(), 3);
        let drive = net.activity(crate::network::ActivityId(1)).unwrap();
        assert_eq!(drive.weight, rat(10));
        let change = net.activity(crate::network::ActivityId(4)).unwrap();
        assert_eq!((change.kind, change.lower, change.upper), (ActivityKind::Transfer, 2, 11));
        assert_eq!(t.warnings.len(), 2);
        let od = t.instance.od.unwrap();
        assert_eq!(od.total_demand(), rat(10));
        assert_eq!(od.stations["2"].boarding, vec![EventId(5)]);
    }

    #[test]
    fn missing_files_are_reported() {
        let dir = write_dir(None);
        assert!(read_timpasslib(dir.path()).unwrap().instance.od.is_none());
        std::fs::remove_file(dir.path().join("Config.cnf")).unwrap();
        assert!(matches!(read_timpasslib(dir.path()), Err(IoError::File { .. })));
    }
}
