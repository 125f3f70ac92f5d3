//! The human-readable LP text format (`Minimize` / `Subject To` / `Bounds` / `General`).

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{decimal, decimal_form, Constraint, MipModel, ModelIoError, Relation, VarKind, Variable};
use num_traits::Signed;

use crate::num::{parse_rational, rat, zero, Rational};

const SCALE_TAG: &str = "objective_scale";

fn write_terms(out: &mut String, model: &MipModel, terms: &[(usize, Rational)]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, (j, a)) in terms.iter().enumerate() {
        let sign = if *a < zero() { "-" } else if k == 0 { "" } else { "+" };
        let mag = decimal(&a.abs());
        if sign.is_empty() {
            let _ = write!(out, " {mag} {}", model.variables[*j].name);
        } else {
            let _ = write!(out, " {sign} {mag} {}", model.variables[*j].name);
        }
    }
}

pub fn write_lp(model: &MipModel) -> Result<String, ModelIoError> {
    let (m, scale) = decimal_form(model)?;
    let mut out = String::new();
    let _ = writeln!(out, "\\ {}", m.name);
    if let Some(s) = scale {
        let _ = writeln!(out, "\\ {SCALE_TAG} {s}");
    }
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, &m, &m.objective);
    out.push_str("\nSubject To\n");
    for c in &m.constraints {
        let _ = write!(out, " {}:", c.name);
        write_terms(&mut out, &m, &c.terms);
        let rel = match c.relation {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, " {rel} {}", decimal(&c.rhs));
    }
    out.push_str("Bounds\n");
    for v in &m.variables {
        match (&v.lower, &v.upper) {
            (Some(l), Some(u)) if l == u => {
                let _ = writeln!(out, " {} = {}", v.name, decimal(l));
            }
            (Some(l), Some(u)) => {
                let _ = writeln!(out, " {} <= {} <= {}", decimal(l), v.name, decimal(u));
            }
            (Some(l), None) => {
                let _ = writeln!(out, " {} >= {}", v.name, decimal(l));
            }
            (None, Some(u)) => {
                let _ = writeln!(out, " -inf <= {} <= {}", v.name, decimal(u));
            }
            (None, None) => {
                let _ = writeln!(out, " {} free", v.name);
            }
        }
    }
    let ints: Vec<&str> = m.variables.iter().filter(|v| v.integer).map(|v| v.name.as_str()).collect();
    if !ints.is_empty() {
        out.push_str("General\n");
        for chunk in ints.chunks(8) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(Rational),
    Ident(String),
    Op(String),
    Colon,
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token>, ModelIoError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == ':' {
            out.push(Token::Colon);
            i += 1;
        } else if "<>=".contains(c) {
            let mut op = c.to_string();
            if i + 1 < chars.len() && "<>=".contains(chars[i + 1]) {
                op.push(chars[i + 1]);
                i += 1;
            }
            i += 1;
            let op = match op.as_str() {
                "<" | "<=" | "=<" => "<=",
                ">" | ">=" | "=>" => ">=",
                "=" | "==" => "=",
                _ => return Err(ModelIoError::parse(lineno, format!("bad operator {op}"))),
            };
            out.push(Token::Op(op.into()));
        } else if c == '+' || c == '-' {
            out.push(Token::Op(c.to_string()));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let value = parse_rational(&text).map_err(|e| ModelIoError::parse(lineno, e.to_string()))?;
            out.push(Token::Num(value));
        } else {
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() && !"<>=:+-".contains(chars[i]) {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        }
    }
    Ok(out)
}

#[derive(Default)]
struct Reader {
    model: MipModel,
    index: HashMap<String, usize>,
}

impl Reader {
    fn var(&mut self, name: &str) -> usize {
        if let Some(&k) = self.index.get(name) {
            return k;
        }
        let (kind, source) = VarKind::parse_name(name);
        let k = self.model.add_variable(Variable {
            name: name.to_string(),
            lower: Some(zero()),
            upper: None,
            integer: false,
            kind,
            source: source.unwrap_or(0),
        });
        self.index.insert(name.to_string(), k);
        k
    }

    /// Parses `[name:] terms` and returns the terms plus the remaining tokens.
    fn terms(&mut self, tokens: &[(Token, usize)]) -> Result<(Vec<(usize, Rational)>, usize), ModelIoError> {
        let mut terms: Vec<(usize, Rational)> = Vec::new();
        let mut sign = rat(1);
        let mut coef: Option<Rational> = None;
        let mut i = 0;
        while i < tokens.len() {
            match &tokens[i].0 {
                Token::Op(op) if op == "+" => sign = rat(1),
                Token::Op(op) if op == "-" => sign = -sign,
                Token::Op(_) => break,
                Token::Num(v) => coef = Some(coef.unwrap_or(rat(1)) * v),
                Token::Ident(name) => {
                    let k = self.var(name);
                    let c = sign * coef.take().unwrap_or(rat(1));
                    match terms.iter_mut().find(|(j, _)| *j == k) {
                        Some(t) => t.1 += c,
                        None => terms.push((k, c)),
                    }
                    sign = rat(1);
                }
                Token::Colon => return Err(ModelIoError::parse(tokens[i].1, "unexpected ':'")),
            }
            i += 1;
        }
        if coef.is_some_and(|c| c != zero()) {
            return Err(ModelIoError::parse(tokens.last().map_or(0, |t| t.1), "constant term in expression"));
        }
        Ok((terms, i))
    }
}

fn strip_label(tokens: &[(Token, usize)]) -> (Option<String>, &[(Token, usize)]) {
    match tokens {
        [(Token::Ident(name), _), (Token::Colon, _), rest @ ..] => (Some(name.clone()), rest),
        _ => (None, tokens),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    General,
    Binary,
    End,
}

fn section_of(line: &str) -> Option<Section> {
    match line.trim().to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "minimum" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." | "st." => Some(Section::Constraints),
        "bounds" | "bound" => Some(Section::Bounds),
        "general" | "generals" | "gen" | "integer" | "integers" => Some(Section::General),
        "binary" | "binaries" | "bin" => Some(Section::Binary),
        "end" => Some(Section::End),
        _ => None,
    }
}

pub fn read_lp(text: &str) -> Result<MipModel, ModelIoError> {
    let mut r = Reader::default();
    let mut section = Section::Preamble;
    let mut scale: Option<Rational> = None;
    let mut objective_tokens: Vec<(Token, usize)> = Vec::new();
    let mut pending: Vec<(Token, usize)> = Vec::new();
    let mut constraint_count = 0;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if let Some(comment) = raw.trim().strip_prefix('\\') {
            let mut words = comment.split_whitespace();
            match (words.next(), words.next()) {
                (Some(SCALE_TAG), Some(v)) => {
                    scale = Some(parse_rational(v).map_err(|e| ModelIoError::parse(lineno, e.to_string()))?)
                }
                (Some(name), None) if section == Section::Preamble && r.model.name.is_empty() => {
                    r.model.name = name.to_string()
                }
                _ => {}
            }
            continue;
        }
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if line.trim().eq_ignore_ascii_case("maximize") || line.trim().eq_ignore_ascii_case("max") {
            return Err(ModelIoError::parse(lineno, "only minimisation is supported"));
        }
        if let Some(s) = section_of(line) {
            section = s;
            continue;
        }
        let tokens: Vec<(Token, usize)> = tokenize(line, lineno)?.into_iter().map(|t| (t, lineno)).collect();
        match section {
            Section::Preamble | Section::End => {
                return Err(ModelIoError::parse(lineno, "content outside a section"))
            }
            Section::Objective => objective_tokens.extend(tokens),
            Section::Constraints => {
                pending.extend(tokens);
                // a constraint is complete once a relation and its right-hand side are present
                let rel = pending.iter().position(|(t, _)| matches!(t, Token::Op(o) if o != "+" && o != "-"));
                if let Some(p) = rel {
                    if pending.len() > p + 1 {
                        let (label, body) = strip_label(&pending);
                        let (terms, used) = r.terms(body)?;
                        let rest = &body[used..];
                        let relation = match &rest[0].0 {
                            Token::Op(o) if o == "<=" => Relation::Le,
                            Token::Op(o) if o == ">=" => Relation::Ge,
                            _ => Relation::Eq,
                        };
                        let rhs = parse_signed(&rest[1..], lineno)?;
                        constraint_count += 1;
                        r.model.constraints.push(Constraint {
                            name: label.unwrap_or_else(|| format!("c{constraint_count}")),
                            terms,
                            relation,
                            rhs,
                        });
                        pending.clear();
                    }
                }
            }
            Section::Bounds => read_bound(&mut r, &tokens, lineno)?,
            Section::General | Section::Binary => {
                for (t, _) in &tokens {
                    let Token::Ident(name) = t else {
                        return Err(ModelIoError::parse(lineno, "expected variable names"));
                    };
                    let k = r.var(name);
                    r.model.variables[k].integer = true;
                    if section == Section::Binary {
                        r.model.variables[k].lower = Some(zero());
                        r.model.variables[k].upper = Some(rat(1));
                    }
                }
            }
        }
    }
    if !pending.is_empty() {
        return Err(ModelIoError::parse(pending[0].1, "unterminated constraint"));
    }
    let (_, body) = strip_label(&objective_tokens);
    let (mut objective, used) = r.terms(body)?;
    if used != body.len() {
        return Err(ModelIoError::parse(body[used].1, "unexpected token in objective"));
    }
    if let Some(s) = scale {
        for (_, c) in &mut objective {
            *c /= s;
        }
    }
    objective.retain(|(_, c)| *c != zero());
    r.model.objective = objective;
    Ok(r.model)
}

fn parse_signed(tokens: &[(Token, usize)], lineno: usize) -> Result<Rational, ModelIoError> {
    match tokens {
        [(Token::Num(v), _)] => Ok(*v),
        [(Token::Op(o), _), (Token::Num(v), _)] if o == "-" => Ok(-v),
        [(Token::Op(o), _), (Token::Num(v), _)] if o == "+" => Ok(*v),
        _ => Err(ModelIoError::parse(lineno, "expected a number")),
    }
}

/// `Some(None)` for an infinite value, `Some(Some(v))` for a number.
fn bound_value(tokens: &[(Token, usize)]) -> Option<Option<Rational>> {
    let infinite = |s: &str| matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity");
    match tokens {
        [(Token::Num(v), _)] => Some(Some(*v)),
        [(Token::Op(o), _), (Token::Num(v), _)] => Some(Some(if o == "-" { -v } else { *v })),
        [(Token::Op(_), _), (Token::Ident(s), _)] | [(Token::Ident(s), _)] if infinite(s) => Some(None),
        _ => None,
    }
}

fn read_bound(r: &mut Reader, tokens: &[(Token, usize)], lineno: usize) -> Result<(), ModelIoError> {
    let bad = || ModelIoError::parse(lineno, "unrecognised bound");
    if let [(Token::Ident(name), _), (Token::Ident(word), _)] = tokens {
        if word.eq_ignore_ascii_case("free") {
            let k = r.var(name);
            r.model.variables[k].lower = None;
            r.model.variables[k].upper = None;
            return Ok(());
        }
    }
    let ops: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, (t, _))| matches!(t, Token::Op(o) if o != "+" && o != "-"))
        .map(|(i, _)| i)
        .collect();
    let op = |i: usize| match &tokens[i].0 {
        Token::Op(o) => o.clone(),
        _ => unreachable!(),
    };
    match ops.as_slice() {
        [p] => {
            let (lhs, rhs) = (&tokens[..*p], &tokens[p + 1..]);
            let (name, value, flipped) = match (lhs, rhs) {
                ([(Token::Ident(n), _)], v) => (n.clone(), bound_value(v).ok_or_else(bad)?, false),
                (v, [(Token::Ident(n), _)]) => (n.clone(), bound_value(v).ok_or_else(bad)?, true),
                _ => return Err(bad()),
            };
            let k = r.var(&name);
            let var = &mut r.model.variables[k];
            match (op(*p).as_str(), flipped) {
                ("=", _) => {
                    var.lower = value;
                    var.upper = value;
                }
                ("<=", false) | (">=", true) => var.upper = value,
                _ => var.lower = value,
            }
        }
        [p, q] => {
            let name = match &tokens[p + 1..*q] {
                [(Token::Ident(n), _)] => n.clone(),
                _ => return Err(bad()),
            };
            let first = bound_value(&tokens[..*p]).ok_or_else(bad)?;
            let second = bound_value(&tokens[q + 1..]).ok_or_else(bad)?;
            let k = r.var(&name);
            let var = &mut r.model.variables[k];
            if op(*p) == "<=" {
                var.lower = first;
                var.upper = second;
            } else {
                var.upper = first;
                var.lower = second;
            }
        }
        _ => return Err(bad()),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formulation::{build_arc_mpesp, build_cycle_mpesp};
    use crate::tree::{fundamental_basis, sharp_tree};

    #[test]
    fn round_trip_arc_model() {
        let net = fixtures::figure3();
        let model = build_arc_mpesp(&net);
        let text = write_lp(&model).unwrap();
        assert!(text.contains("Subject To"));
        assert!(text.contains(" link_1: 1 x_1 - 1 pi_2 + 1 pi_1 - 10 p_1 = 0"));
        let back = read_lp(&text).unwrap();
        assert!(back.equivalent_to(&model));
    }

    #[test]
    fn fractional_objective_is_scaled() {
        let net = fixtures::figure3();
        let weights: Vec<Rational> = (1..=5).map(|k| Rational::new(1, k)).collect();
        let net = net.with_weights(&weights);
        let basis = fundamental_basis(&net, &sharp_tree(&net).unwrap()).unwrap();
        let model = build_cycle_mpesp(&net, &basis).unwrap();
        let text = write_lp(&model).unwrap();
        assert!(text.contains("\\ objective_scale 60"));
        assert!(read_lp(&text).unwrap().equivalent_to(&model));
    }

    #[test]
    fn reads_foreign_syntax() {
        let text = "Minimize\n 3 a + 2 b\n - c\nSubject To\n r1: a + b\n >= 2\n -a + c <= -1\nBounds\n a <= 4\n -inf <= c <= 10\n b free\nGenerals\n a\nEnd\n";
        let m = read_lp(text).unwrap();
        assert_eq!(m.variables.len(), 3);
        assert_eq!(m.constraints.len(), 2);
        assert_eq!(m.constraints[1].rhs, rat(-1));
        assert_eq!(m.constraints[1].name, "c2");
        assert_eq!(m.variables[0].upper, Some(rat(4)));
        assert_eq!(m.variables[0].lower, Some(zero()));
        assert!(m.variables[0].integer);
        assert_eq!(m.variables[1].lower, None);
        assert_eq!(m.variables[2].lower, None);
        assert_eq!(m.objective, vec![(0, rat(3)), (1, rat(2)), (2, rat(-1))]);
    }
}
