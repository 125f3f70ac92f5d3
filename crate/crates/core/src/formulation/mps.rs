//! The column-oriented MPS format.
//!
//! The writer aligns fields to the classic fixed columns. Names longer than
//! eight characters push the following fields to the right, so the reader
//! splits on whitespace (free MPS), which accepts both layouts.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{decimal, decimal_form, Constraint, MipModel, ModelIoError, Relation, VarKind, Variable};
use crate::num::{parse_rational, rat, zero, Rational};

const OBJ: &str = "obj";
const SCALE_TAG: &str = "objective_scale";

fn field_line(out: &mut String, f1: &str, f2: &str, f3: &str, f4: &str) {
    // fields start at columns 2, 5, 15 and 25
    let _ = writeln!(out, " {f1:<2} {f2:<8}  {f3:<8}  {f4}");
}

pub fn write_mps(model: &MipModel) -> Result<String, ModelIoError> {
    let (m, scale) = decimal_form(model)?;
    let mut out = String::new();
    if let Some(s) = scale {
        let _ = writeln!(out, "* {SCALE_TAG} {s}");
    }
    let _ = writeln!(out, "NAME          {}", if m.name.is_empty() { "model" } else { &m.name });
    out.push_str("ROWS\n");
    field_line(&mut out, "N", OBJ, "", "");
    for c in &m.constraints {
        let kind = match c.relation {
            Relation::Eq => "E",
            Relation::Le => "L",
            Relation::Ge => "G",
        };
        field_line(&mut out, kind, &c.name, "", "");
    }

    let mut entries: Vec<Vec<(&str, Rational)>> = vec![Vec::new(); m.variables.len()];
    for (j, a) in &m.objective {
        entries[*j].push((OBJ, *a));
    }
    for c in &m.constraints {
        for (j, a) in &c.terms {
            entries[*j].push((&c.name, *a));
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (j, v) in m.variables.iter().enumerate() {
        if v.integer != in_int {
            let kind = if v.integer { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, "    M{marker:<7}  'MARKER'                 {kind}");
            marker += 1;
            in_int = v.integer;
        }
        if entries[j].is_empty() {
            field_line(&mut out, "", &v.name, OBJ, "0");
        }
        for (row, a) in &entries[j] {
            field_line(&mut out, "", &v.name, row, &decimal(a));
        }
    }
    if in_int {
        let _ = writeln!(out, "    M{marker:<7}  'MARKER'                 'INTEND'");
    }
    out.push_str("RHS\n");
    for c in &m.constraints {
        if c.rhs != zero() {
            field_line(&mut out, "", "RHS", &c.name, &decimal(&c.rhs));
        }
    }
    out.push_str("BOUNDS\n");
    for v in &m.variables {
        match (&v.lower, &v.upper) {
            (Some(l), Some(u)) if l == u => field_line(&mut out, "FX", "BND", &v.name, &decimal(l)),
            (None, None) => field_line(&mut out, "FR", "BND", &v.name, ""),
            (lower, upper) => {
                match lower {
                    Some(l) => field_line(&mut out, "LO", "BND", &v.name, &decimal(l)),
                    None => field_line(&mut out, "MI", "BND", &v.name, ""),
                }
                match upper {
                    Some(u) => field_line(&mut out, "UP", "BND", &v.name, &decimal(u)),
                    None => field_line(&mut out, "PL", "BND", &v.name, ""),
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    Ok(out)
}

#[derive(PartialEq, Clone, Copy)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Bounds,
    Ranges,
}

pub fn read_mps(text: &str) -> Result<MipModel, ModelIoError> {
    let mut model = MipModel::default();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut rows: HashMap<String, Option<usize>> = HashMap::new();
    let mut objective_row: Option<String> = None;
    let mut section = Section::None;
    let mut integer = false;
    let mut scale: Option<Rational> = None;
    let mut objective: Vec<(usize, Rational)> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if let Some(comment) = line.strip_prefix('*') {
            let mut words = comment.split_whitespace();
            if let (Some(SCALE_TAG), Some(v)) = (words.next(), words.next()) {
                scale = Some(parse_rational(v).map_err(|e| ModelIoError::parse(lineno, e.to_string()))?);
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !line.starts_with(' ') && !line.starts_with('\t') {
            section = match fields[0] {
                "NAME" => {
                    model.name = fields.get(1).unwrap_or(&"").to_string();
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "RANGES" => Section::Ranges,
                "ENDATA" => break,
                other => return Err(ModelIoError::parse(lineno, format!("unknown section {other}"))),
            };
            continue;
        }
        let num = |s: &str| parse_rational(s).map_err(|e| ModelIoError::parse(lineno, e.to_string()));
        match section {
            Section::Rows => {
                let [kind, name] = fields[..] else {
                    return Err(ModelIoError::parse(lineno, "expected row type and name"));
                };
                let relation = match kind {
                    "N" => {
                        if objective_row.is_none() {
                            objective_row = Some(name.to_string());
                        }
                        rows.insert(name.to_string(), None);
                        continue;
                    }
                    "E" => Relation::Eq,
                    "L" => Relation::Le,
                    "G" => Relation::Ge,
                    _ => return Err(ModelIoError::parse(lineno, format!("bad row type {kind}"))),
                };
                rows.insert(name.to_string(), Some(model.constraints.len()));
                model.constraints.push(Constraint {
                    name: name.to_string(),
                    terms: Vec::new(),
                    relation,
                    rhs: zero(),
                });
            }
            Section::Columns => {
                if fields.get(1) == Some(&"'MARKER'") {
                    integer = fields.get(2) == Some(&"'INTORG'");
                    continue;
                }
                if fields.len() < 3 || fields.len().is_multiple_of(2) {
                    return Err(ModelIoError::parse(lineno, "expected column, row, value pairs"));
                }
                let name = fields[0];
                let j = *index.entry(name.to_string()).or_insert_with(|| {
                    let (kind, source) = VarKind::parse_name(name);
                    model.variables.push(Variable {
                        name: name.to_string(),
                        lower: Some(zero()),
                        upper: None,
                        integer,
                        kind,
                        source: source.unwrap_or(0),
                    });
                    model.variables.len() - 1
                });
                for pair in fields[1..].chunks(2) {
                    let value = num(pair[1])?;
                    match rows.get(pair[0]) {
                        Some(Some(r)) => model.constraints[*r].terms.push((j, value)),
                        Some(None) => {
                            if Some(pair[0]) == objective_row.as_deref() && value != zero() {
                                objective.push((j, value));
                            }
                        }
                        None => return Err(ModelIoError::parse(lineno, format!("unknown row {}", pair[0]))),
                    }
                }
            }
            Section::Rhs => {
                let pairs = if fields.len() % 2 == 1 { &fields[1..] } else { &fields[..] };
                for pair in pairs.chunks(2) {
                    let value = num(pair.get(1).ok_or_else(|| ModelIoError::parse(lineno, "missing value"))?)?;
                    match rows.get(pair[0]) {
                        Some(Some(r)) => model.constraints[*r].rhs = value,
                        Some(None) => {}
                        None => return Err(ModelIoError::parse(lineno, format!("unknown row {}", pair[0]))),
                    }
                }
            }
            Section::Bounds => {
                let kind = fields[0];
                let (name, value) = match (fields.len(), kind) {
                    (3, "FR" | "MI" | "PL" | "BV") => (fields[2], None),
                    (2, "FR" | "MI" | "PL" | "BV") => (fields[1], None),
                    (4, _) => (fields[2], Some(num(fields[3])?)),
                    (3, _) => (fields[1], Some(num(fields[2])?)),
                    _ => return Err(ModelIoError::parse(lineno, "malformed bound")),
                };
                let j = *index
                    .get(name)
                    .ok_or_else(|| ModelIoError::parse(lineno, format!("unknown column {name}")))?;
                let v = &mut model.variables[j];
                match kind {
                    "UP" => v.upper = value,
                    "LO" => v.lower = value,
                    "FX" => {
                        v.lower = value;
                        v.upper = value;
                    }
                    "FR" => {
                        v.lower = None;
                        v.upper = None;
                    }
                    "MI" => v.lower = None,
                    "PL" => v.upper = None,
                    "BV" => {
                        v.integer = true;
                        v.lower = Some(zero());
                        v.upper = Some(rat(1));
                    }
                    "LI" => {
                        v.integer = true;
                        v.lower = value;
                    }
                    "UI" => {
                        v.integer = true;
                        v.upper = value;
                    }
                    _ => return Err(ModelIoError::parse(lineno, format!("bad bound type {kind}"))),
                }
            }
            Section::Ranges => return Err(ModelIoError::parse(lineno, "RANGES are not supported")),
            Section::None => return Err(ModelIoError::parse(lineno, "data outside a section")),
        }
    }
    if let Some(s) = scale {
        for (_, c) in &mut objective {
            *c /= s;
        }
    }
    model.objective = objective;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formulation::{build_arc_mpesp, build_cycle_mpesp};
    use crate::tree::{fundamental_basis, sharp_tree};

    #[test]
    fn round_trips() {
        let net = fixtures::figure3();
        let arc = build_arc_mpesp(&net);
        let text = write_mps(&arc).unwrap();
        assert!(text.contains("'INTORG'"));
        assert!(read_mps(&text).unwrap().equivalent_to(&arc));

        let net = net.with_weights(&[1, 2, 3, 6, 7].map(|d| Rational::new(1, d)));
        let basis = fundamental_basis(&net, &sharp_tree(&net).unwrap()).unwrap();
        let cyc = build_cycle_mpesp(&net, &basis).unwrap();
        let text = write_mps(&cyc).unwrap();
        assert!(text.starts_with("* objective_scale 42"));
        assert!(read_mps(&text).unwrap().equivalent_to(&cyc));
    }

    #[test]
    fn fixed_columns_for_short_names() {
        let net = fixtures::figure3();
        let text = write_mps(&build_arc_mpesp(&net)).unwrap();
        let line = text.lines().find(|l| l.contains("x_1") && l.contains("link_1")).unwrap();
        assert_eq!(&line[4..7], "x_1");
        assert_eq!(&line[14..20], "link_1");
        assert_eq!(&line[24..25], "1");
    }
}
