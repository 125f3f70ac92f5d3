//! The native instance format.
//!
//! ```text
//! # mpesp-instance v1
//! [events]
//! # id; period; label
//! 1; 60; orange A
//! [activities]
//! # id; tail; head; lower; upper; weight; kind
//! 1; 1; 2; 5; 5; 1; drive
//! [stations]
//! # station; boarding events; alighting events
//! A; 1;
//! [od]
//! # origin; destination; demand
//! A; D; 1
//! ```
//!
//! Event lists in `[stations]` are separated by spaces. The `[stations]` and
//! `[od]` sections are optional.

use std::fmt::Write as _;

use super::{data_lines, Instance, IoError, Row};
use crate::network::{ActivityKind, EventActivityNetwork, EventId, NetworkBuilder};
use crate::num::{exact, parse_int, parse_rational};
use crate::routing::ODMatrix;

pub const INSTANCE_HEADER: &str = "# mpesp-instance v1";

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Events,
    Activities,
    Stations,
    Od,
}

/// Station names open their line, so they may not look like a comment either.
fn check_label(label: &str, opens_line: bool) -> Result<(), IoError> {
    if label.contains([';', '\n', '\r']) || label.trim() != label || (opens_line && label.starts_with('#')) {
        return Err(IoError::InvalidLabel(label.to_string()));
    }
    Ok(())
}

fn line(out: &mut String, args: std::fmt::Arguments) {
    let start = out.len();
    let _ = out.write_fmt(args);
    out.truncate(start + out[start..].trim_end().len());
    out.push('\n');
}

pub fn write_instance(net: &EventActivityNetwork, od: Option<&ODMatrix>) -> Result<String, IoError> {
    let mut out = String::new();
    out.push_str(INSTANCE_HEADER);
    out.push_str("\n[events]\n# id; period; label\n");
    for e in net.events() {
        check_label(&e.label, false)?;
        line(&mut out, format_args!("{}; {}; {}", e.id, e.period, e.label));
    }
    out.push_str("[activities]\n# id; tail; head; lower; upper; weight; kind\n");
    for a in net.activities() {
        let _ = writeln!(
            out,
            "{}; {}; {}; {}; {}; {}; {}",
            a.id,
            a.tail,
            a.head,
            a.lower,
            a.upper,
            exact(&a.weight),
            a.kind
        );
    }
    if let Some(od) = od {
        let list = |ids: &[EventId]| ids.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ");
        out.push_str("[stations]\n# station; boarding events; alighting events\n");
        for (name, s) in &od.stations {
            check_label(name, true)?;
            line(&mut out, format_args!("{name}; {}; {}", list(&s.boarding), list(&s.alighting)));
        }
        out.push_str("[od]\n# origin; destination; demand\n");
        for ((o, d), n) in &od.entries {
            let _ = writeln!(out, "{o}; {d}; {}", exact(n));
        }
    }
    Ok(out)
}

fn event_list(row: &Row, k: usize) -> Result<Vec<EventId>, IoError> {
    row.str(k)
        .split_whitespace()
        .map(|t| {
            parse_int(t)
                .ok()
                .and_then(|v| u32::try_from(v).ok())
                .map(EventId)
                .ok_or_else(|| IoError::parse(row.line, row.column(k), format!("invalid event id `{t}`")))
        })
        .collect()
}

fn id(row: &Row, k: usize) -> Result<u32, IoError> {
    let v = row.num(k, parse_int)?;
    u32::try_from(v).map_err(|_| IoError::parse(row.line, row.column(k), format!("invalid id {v}")))
}

pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    let mut lines = text.lines();
    if lines.next().map(str::trim_end) != Some(INSTANCE_HEADER) {
        return Err(IoError::parse(1, 1, format!("expected header `{INSTANCE_HEADER}`")));
    }
    let mut b = NetworkBuilder::new();
    let mut od = ODMatrix::new();
    let mut has_od = false;
    let mut section = None;
    for (line, raw) in data_lines(text).skip_while(|(l, _)| *l == 1) {
        let trimmed = raw.trim();
        if trimmed.starts_with('[') {
            section = Some(match trimmed {
                "[events]" => Section::Events,
                "[activities]" => Section::Activities,
                "[stations]" => Section::Stations,
                "[od]" => Section::Od,
                other => return Err(IoError::parse(line, 1, format!("unknown section {other}"))),
            });
            if matches!(section, Some(Section::Stations | Section::Od)) {
                has_od = true;
            }
            continue;
        }
        let row = Row::split(line, raw);
        match section {
            None => return Err(IoError::parse(line, 1, "data before the first section")),
            Some(Section::Events) => {
                row.expect_len(2..=3, "an event")?;
                b.add_event(id(&row, 0)?, row.num(1, parse_int)?, row.str(2));
            }
            Some(Section::Activities) => {
                row.expect_len(7..=7, "an activity")?;
                let kind: ActivityKind = row
                    .str(6)
                    .parse()
                    .map_err(|e: String| IoError::parse(line, row.column(6), e))?;
                b.add_activity(
                    id(&row, 0)?,
                    EventId(id(&row, 1)?),
                    EventId(id(&row, 2)?),
                    row.num(3, parse_int)?,
                    row.num(4, parse_int)?,
                    row.num(5, parse_rational)?,
                    kind,
                );
            }
            Some(Section::Stations) => {
                row.expect_len(3..=3, "a station")?;
                od.attach(row.str(0), event_list(&row, 1)?, event_list(&row, 2)?);
            }
            Some(Section::Od) => {
                row.expect_len(3..=3, "an OD entry")?;
                od.add_demand(row.str(0), row.str(1), row.num(2, parse_rational)?)
                    .map_err(|e| IoError::parse(line, row.column(2), e.to_string()))?;
            }
        }
    }
    let network = b.build()?;
    let od = if has_od {
        od.validate(&network)?;
        Some(od)
    } else {
        None
    };
    Ok(Instance { network, od })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn round_trip() {
        let (net, od, _) = fixtures::figure10();
        let text = write_instance(&net, Some(&od)).unwrap();
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.network, net);
        assert_eq!(back.od.as_ref(), Some(&od));
        assert_eq!(write_instance(&back.network, back.od.as_ref()).unwrap(), text);

        let net = fixtures::figure3().with_weights(&[1, 2, 3, 4, 5].map(|d| crate::num::Rational::new(1, d)));
        let text = write_instance(&net, None).unwrap();
        assert!(text.contains("1/3"));
        assert_eq!(parse_instance(&text).unwrap().network, net);
    }

    #[test]
    fn two_events() {
        let text = "# mpesp-instance v1\n[events]\n0; 10; a\n1; 20; b\n[activities]\n7; 0; 1; 2; 5; 3/2; transfer\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.network.num_activities(), 1);
        assert_eq!(inst.od, None);
    }

    #[test]
    fn errors_carry_positions() {
        let text = "# mpesp-instance v1\n[events]\n0; 0; a\n";
        assert!(matches!(
            parse_instance(text),
            Err(IoError::Network(crate::network::NetworkError::InvalidPeriod { .. }))
        ));
        let text = "# mpesp-instance v1\n[events]\n0; ten; a\n";
        match parse_instance(text) {
            Err(IoError::Parse { line, column, .. }) => assert_eq!((line, column), (3, 4)),
            other => panic!("{other:?}"),
        }
        assert!(parse_instance("[events]\n").is_err());
    }
}
