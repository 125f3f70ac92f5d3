//! Solution files.
//!
//! ```text
//! # mpesp-solution v1
//! status; optimal
//! objective; 32
//! [times]
//! 1; 0
//! [tensions]
//! 1; 5
//! [offsets]
//! 3; 1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{data_lines, IoError, Row};
use crate::network::{ActivityId, EventActivityNetwork, EventId, Tension, Timetable};
use crate::num::{exact, parse_int, parse_rational, Rational};
use crate::solver::SolveResult;

pub const SOLUTION_HEADER: &str = "# mpesp-solution v1";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionFile {
    pub status: String,
    pub objective: Option<Rational>,
    pub timetable: Option<Timetable>,
    pub tension: Option<Tension>,
    /// Cycle offsets keyed by co-tree arc.
    pub offsets: BTreeMap<ActivityId, i64>,
}

impl From<&SolveResult> for SolutionFile {
    fn from(r: &SolveResult) -> Self {
        SolutionFile {
            status: r.status.as_str().to_string(),
            objective: r.objective,
            timetable: r.timetable.clone(),
            tension: r.tension.clone(),
            offsets: r.offsets.clone(),
        }
    }
}

pub fn write_solution(sol: &SolutionFile) -> String {
    let mut out = format!("{SOLUTION_HEADER}\nstatus; {}\n", sol.status);
    if let Some(obj) = &sol.objective {
        let _ = writeln!(out, "objective; {}", exact(obj));
    }
    if let Some(tt) = &sol.timetable {
        out.push_str("[times]\n# event; time\n");
        for (e, t) in &tt.times {
            let _ = writeln!(out, "{e}; {}", exact(t));
        }
    }
    if let Some(x) = &sol.tension {
        out.push_str("[tensions]\n# activity; tension\n");
        for (a, v) in &x.values {
            let _ = writeln!(out, "{a}; {}", exact(v));
        }
    }
    if !sol.offsets.is_empty() {
        out.push_str("[offsets]\n# co-tree activity; offset\n");
        for (a, z) in &sol.offsets {
            let _ = writeln!(out, "{a}; {z}");
        }
    }
    out
}

fn key(row: &Row) -> Result<u32, IoError> {
    let v = row.num(0, parse_int)?;
    u32::try_from(v).map_err(|_| IoError::parse(row.line, row.column(0), format!("invalid id {v}")))
}

pub fn parse_solution(text: &str) -> Result<SolutionFile, IoError> {
    if text.lines().next().map(str::trim_end) != Some(SOLUTION_HEADER) {
        return Err(IoError::parse(1, 1, format!("expected header `{SOLUTION_HEADER}`")));
    }
    let mut sol = SolutionFile::default();
    let mut section = "";
    for (line, raw) in data_lines(text) {
        let trimmed = raw.trim();
        if trimmed.starts_with('[') {
            section = match trimmed {
                "[times]" => {
                    sol.timetable.get_or_insert_with(Timetable::default);
                    "times"
                }
                "[tensions]" => {
                    sol.tension.get_or_insert_with(Tension::default);
                    "tensions"
                }
                "[offsets]" => "offsets",
                other => return Err(IoError::parse(line, 1, format!("unknown section {other}"))),
            };
            continue;
        }
        let row = Row::split(line, raw);
        row.expect_len(2..=2, "a solution line")?;
        match section {
            "" => match row.str(0) {
                "status" => sol.status = row.str(1).to_string(),
                "objective" => sol.objective = Some(row.num(1, parse_rational)?),
                other => return Err(IoError::parse(line, 1, format!("unknown field `{other}`"))),
            },
            "times" => {
                let t = row.num(1, parse_rational)?;
                sol.timetable.as_mut().expect("section opened").times.insert(EventId(key(&row)?), t);
            }
            "tensions" => {
                let x = row.num(1, parse_rational)?;
                sol.tension.as_mut().expect("section opened").values.insert(ActivityId(key(&row)?), x);
            }
            _ => {
                let z = row.num(1, parse_int)?;
                sol.offsets.insert(ActivityId(key(&row)?), z);
            }
        }
    }
    if sol.status.is_empty() {
        return Err(IoError::parse(1, 1, "missing status line"));
    }
    Ok(sol)
}

/// Lists every way the solution disagrees with the network: bound or
/// periodicity violations, a tension that does not match the timetable, and
/// an objective that does not match the tension.
pub fn verify_solution(net: &EventActivityNetwork, sol: &SolutionFile) -> Vec<String> {
    let mut problems = Vec::new();
    let from_times = sol.timetable.as_ref().map(|tt| net.tension_from_timetable(tt));
    match &from_times {
        Some(Err(e)) => problems.push(format!("timetable: {e}")),
        Some(Ok((_, report))) => {
            problems.extend(report.violations.iter().map(|v| format!("timetable: {v}")));
        }
        None => {}
    }
    let tension = match (&sol.tension, &from_times) {
        (Some(x), Some(Ok((canonical, _)))) => {
            for a in net.activities() {
                if x.get(a.id) != canonical.get(a.id) {
                    problems.push(format!(
                        "activity {}: tension {} differs from the timetable's {}",
                        a.id,
                        x.get(a.id).map(exact).unwrap_or_else(|| "missing".into()),
                        canonical.get(a.id).map(exact).unwrap_or_default()
                    ));
                }
            }
            Some(x.clone())
        }
        (Some(x), _) => {
            match net.check_tension(x, None) {
                Ok(report) => problems.extend(report.violations.iter().map(|v| format!("tension: {v}"))),
                Err(e) => problems.push(format!("tension: {e}")),
            }
            Some(x.clone())
        }
        (None, Some(Ok((canonical, _)))) => Some(canonical.clone()),
        (None, _) => None,
    };
    if let (Some(obj), Some(x)) = (&sol.objective, &tension) {
        match net.objective(x) {
            Ok(v) if v == *obj => {}
            Ok(v) => problems.push(format!("objective {} differs from the recomputed {}", exact(obj), exact(&v))),
            Err(e) => problems.push(format!("objective: {e}")),
        }
    }
    problems
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::num::rat;
    use crate::solver::{branch_and_bound, SolveConfig};
    use crate::tree::{fundamental_basis, SpanningTree};

    fn figure3_solution() -> (EventActivityNetwork, SolutionFile) {
        let net = fixtures::figure3();
        let tree: SpanningTree = fixtures::figure3_tree_c(&net);
        let basis = fundamental_basis(&net, &tree).unwrap();
        let r = branch_and_bound(&net, &basis, &SolveConfig::default()).unwrap();
        (net, SolutionFile::from(&r))
    }

    #[test]
    fn round_trip_and_verify() {
        let (net, sol) = figure3_solution();
        assert_eq!(sol.objective, Some(rat(32)));
        let text = write_solution(&sol);
        let back = parse_solution(&text).unwrap();
        assert_eq!(back, sol);
        assert_eq!(write_solution(&back), text);
        assert!(verify_solution(&net, &back).is_empty());
    }

    #[test]
    fn tampering_is_reported() {
        let (net, mut sol) = figure3_solution();
        sol.objective = Some(rat(31));
        assert_eq!(verify_solution(&net, &sol).len(), 1);
        let tt = sol.timetable.as_mut().unwrap();
        *tt.times.get_mut(&EventId(2)).unwrap() += rat(1);
        assert!(verify_solution(&net, &sol).len() >= 2);
    }

    #[test]
    fn fractional_values() {
        let text = "# mpesp-solution v1\nstatus; optimal\nobjective; 7/2\n[times]\n1; 1/3\n";
        let sol = parse_solution(text).unwrap();
        assert_eq!(sol.objective, Some(Rational::new(7, 2)));
        assert_eq!(sol.timetable.unwrap().times[&EventId(1)], Rational::new(1, 3));
        assert!(matches!(parse_solution("# mpesp-solution v1\n[times]\n1; x\n"), Err(IoError::Parse { line: 3, .. })));
    }
}
