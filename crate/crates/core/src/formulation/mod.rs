//! Mixed-integer programs for the multi-period scheduling problem.
//!
//! Two formulations are provided: the arc formulation with times `π`, tensions
//! `x` and integer offsets `p`, and the cycle formulation over a sharp tree's
//! fundamental basis with one integer `z_C` per cycle. The uniform-period case of
//! either is the classic periodic scheduling formulation.

pub mod expand;
pub mod lp;
pub mod modeling;
pub mod mps;
pub mod simplex;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::network::EventActivityNetwork;
use crate::num::{ceil_int, floor_int, rat, zero, Rational};
use crate::tree::{is_sharp, CycleBasis, SharpnessWitness, TreeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    /// `x_a`
    Tension,
    /// `p_a`
    Modulo,
    /// `π_i`
    Time,
    /// `z_C`, keyed by the co-tree arc
    Cycle,
    /// Anything read from a file with an unrecognised name.
    Other,
}

impl VarKind {
    pub fn prefix(self) -> &'static str {
        match self {
            VarKind::Tension => "x",
            VarKind::Modulo => "p",
            VarKind::Time => "pi",
            VarKind::Cycle => "z",
            VarKind::Other => "",
        }
    }

    /// Splits `x_12` into `(Tension, 12)`.
    pub fn parse_name(name: &str) -> (VarKind, Option<u32>) {
        let Some((prefix, id)) = name.split_once('_') else {
            return (VarKind::Other, None);
        };
        let kind = match prefix {
            "x" => VarKind::Tension,
            "p" => VarKind::Modulo,
            "pi" => VarKind::Time,
            "z" => VarKind::Cycle,
            _ => return (VarKind::Other, None),
        };
        match id.parse() {
            Ok(id) => (kind, Some(id)),
            Err(_) => (VarKind::Other, None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    /// `None` means unbounded.
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
    pub integer: bool,
    pub kind: VarKind,
    /// Activity or event id the variable belongs to.
    pub source: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    /// `(variable index, coefficient)`, each variable at most once.
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MipModel {
    pub name: String,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Minimised.
    pub objective: Vec<(usize, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulationError {
    #[error("cycle basis comes from a non-sharp tree (activity {}: T_a = {}, T_C = {})", .0.activity, .0.arc_period, .0.cycle_period)]
    NonSharpBasis(SharpnessWitness),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Network(#[from] crate::network::NetworkError),
}

impl MipModel {
    pub fn add_variable(&mut self, var: Variable) -> usize {
        self.variables.push(var);
        self.variables.len() - 1
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn name_index(&self) -> HashMap<&str, usize> {
        self.variables.iter().enumerate().map(|(k, v)| (v.name.as_str(), k)).collect()
    }

    pub fn num_integer(&self) -> usize {
        self.variables.iter().filter(|v| v.integer).count()
    }

    pub fn num_continuous(&self) -> usize {
        self.variables.len() - self.num_integer()
    }

    pub fn objective_value(&self, values: &[Rational]) -> Rational {
        self.objective.iter().fold(zero(), |acc, (k, c)| acc + c * values[*k])
    }

    /// Equality up to the order of variables and of terms.
    pub fn equivalent_to(&self, other: &MipModel) -> bool {
        use std::collections::BTreeMap;
        if self.variables.len() != other.variables.len()
            || self.constraints.len() != other.constraints.len()
        {
            return false;
        }
        let index = other.name_index();
        let same_vars = self.variables.iter().all(|v| {
            index.get(v.name.as_str()).is_some_and(|&k| other.variables[k] == *v)
        });
        let keyed = |m: &MipModel, terms: &[(usize, Rational)]| -> BTreeMap<String, Rational> {
            terms.iter().map(|(k, a)| (m.variables[*k].name.clone(), *a)).collect()
        };
        same_vars
            && keyed(self, &self.objective) == keyed(other, &other.objective)
            && self.constraints.iter().zip(&other.constraints).all(|(a, b)| {
                a.name == b.name
                    && a.relation == b.relation
                    && a.rhs == b.rhs
                    && keyed(self, &a.terms) == keyed(other, &b.terms)
            })
    }

    /// Whether `values` satisfies bounds, integrality and every constraint exactly.
    pub fn is_feasible(&self, values: &[Rational]) -> bool {
        if values.len() != self.variables.len() {
            return false;
        }
        let bounds_ok = self.variables.iter().zip(values).all(|(v, x)| {
            v.lower.is_none_or(|l| *x >= l)
                && v.upper.is_none_or(|u| *x <= u)
                && (!v.integer || x.is_integer())
        });
        bounds_ok
            && self.constraints.iter().all(|c| {
                let lhs = c.terms.iter().fold(zero(), |acc, (k, a)| acc + a * values[*k]);
                match c.relation {
                    Relation::Eq => lhs == c.rhs,
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }
}

/// Errors from writing or reading model files.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelIoError {
    #[error("bound of variable {0} is not a terminating decimal")]
    NonDecimalBound(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl ModelIoError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        ModelIoError::Parse { line, message: message.into() }
    }
}

/// Copy of `model` whose coefficients are all terminating decimals.
///
/// Constraint rows are multiplied by the common denominator of their
/// coefficients and right-hand side when needed. The objective is scaled the
/// same way and the factor is returned so readers can undo it.
pub(crate) fn decimal_form(model: &MipModel) -> Result<(MipModel, Option<i128>), ModelIoError> {
    use crate::num::{common_denominator, terminating_decimal};
    let decimal = |q: &Rational| terminating_decimal(q).is_some();
    for v in &model.variables {
        if v.lower.iter().chain(v.upper.iter()).any(|b| !decimal(b)) {
            return Err(ModelIoError::NonDecimalBound(v.name.clone()));
        }
    }
    let mut out = model.clone();
    for c in &mut out.constraints {
        if c.terms.iter().all(|(_, a)| decimal(a)) && decimal(&c.rhs) {
            continue;
        }
        let d = Rational::from_integer(common_denominator(
            c.terms.iter().map(|(_, a)| a).chain(std::iter::once(&c.rhs)),
        ));
        for (_, a) in &mut c.terms {
            *a *= d;
        }
        c.rhs *= d;
    }
    let mut scale = None;
    if !out.objective.iter().all(|(_, a)| decimal(a)) {
        let d = common_denominator(out.objective.iter().map(|(_, a)| a));
        for (_, a) in &mut out.objective {
            *a *= Rational::from_integer(d);
        }
        scale = Some(d);
    }
    Ok((out, scale))
}

/// Decimal rendering of a value known to terminate.
pub(crate) fn decimal(q: &Rational) -> String {
    crate::num::terminating_decimal(q).expect("value was checked to terminate")
}

fn tension_variables(model: &mut MipModel, net: &EventActivityNetwork) -> Vec<usize> {
    let mut x = Vec::with_capacity(net.num_activities());
    for a in net.activities() {
        x.push(model.add_variable(Variable {
            name: format!("x_{}", a.id),
            lower: Some(rat(a.lower)),
            upper: Some(rat(a.upper)),
            integer: false,
            kind: VarKind::Tension,
            source: a.id.0,
        }));
        if a.weight != zero() {
            model.objective.push((x[x.len() - 1], a.weight));
        }
    }
    x
}

/// Window for `p_a` implied by `x_a ∈ [l, u]`, `π_i ∈ [0, T_i − 1]`, `π_j ∈ [0, T_j − 1]`.
pub fn modulo_window(
    lower: i64,
    upper: i64,
    tail_range: (i64, i64),
    head_range: (i64, i64),
    arc_period: i64,
) -> (i64, i64) {
    // T_a p = x − π_j + π_i
    let lo = rat(lower - head_range.1 + tail_range.0) / rat(arc_period);
    let hi = rat(upper - head_range.0 + tail_range.1) / rat(arc_period);
    (ceil_int(&lo) as i64, floor_int(&hi) as i64)
}

/// Arc formulation: `x_a = π_j − π_i + T_a p_a`, `π_root = 0` for the lowest event id.
pub fn build_arc_mpesp(net: &EventActivityNetwork) -> MipModel {
    let mut model = MipModel { name: "mpesp_arc".into(), ..Default::default() };
    let x = tension_variables(&mut model, net);
    let root = 0;
    let ranges: Vec<(i64, i64)> = (0..net.num_events())
        .map(|v| if v == root { (0, 0) } else { (0, net.period(v) - 1) })
        .collect();
    let pi: Vec<usize> = net
        .events()
        .iter()
        .enumerate()
        .map(|(v, e)| {
            model.add_variable(Variable {
                name: format!("pi_{}", e.id),
                lower: Some(rat(ranges[v].0)),
                upper: Some(rat(ranges[v].1)),
                integer: false,
                kind: VarKind::Time,
                source: e.id.0,
            })
        })
        .collect();
    for (k, a) in net.activities().iter().enumerate() {
        let (i, j) = (net.tail(k), net.head(k));
        let period = net.arc_period_at(k);
        let (plo, phi) = if i == j {
            (ceil_int(&(rat(a.lower) / rat(period))) as i64, floor_int(&(rat(a.upper) / rat(period))) as i64)
        } else {
            modulo_window(a.lower, a.upper, ranges[i], ranges[j], period)
        };
        let p = model.add_variable(Variable {
            name: format!("p_{}", a.id),
            lower: Some(rat(plo)),
            upper: Some(rat(phi)),
            integer: true,
            kind: VarKind::Modulo,
            source: a.id.0,
        });
        let mut terms = vec![(x[k], rat(1))];
        if i != j {
            terms.push((pi[j], rat(-1)));
            terms.push((pi[i], rat(1)));
        }
        terms.push((p, rat(-period)));
        model.constraints.push(Constraint {
            name: format!("link_{}", a.id),
            terms,
            relation: Relation::Eq,
            rhs: zero(),
        });
    }
    model
}

/// Cycle formulation `γ_Cᵀx = T_C z_C` with `z_C ∈ [a_C, b_C]`; the basis tree must be sharp.
pub fn build_cycle_mpesp(
    net: &EventActivityNetwork,
    basis: &CycleBasis,
) -> Result<MipModel, FormulationError> {
    if let Some(witness) = is_sharp(net, &basis.tree)? {
        return Err(FormulationError::NonSharpBasis(witness));
    }
    let mut model = MipModel { name: "mpesp_cycle".into(), ..Default::default() };
    let x = tension_variables(&mut model, net);
    for cycle in &basis.cycles {
        let z = model.add_variable(Variable {
            name: format!("z_{}", cycle.co_tree_arc),
            lower: Some(rat(cycle.odijk_lower)),
            upper: Some(rat(cycle.odijk_upper)),
            integer: true,
            kind: VarKind::Cycle,
            source: cycle.co_tree_arc.0,
        });
        let mut coeffs: Vec<(usize, Rational)> = Vec::new();
        for (k, s) in net.dense_walk(&cycle.oriented_arcs)? {
            match coeffs.iter_mut().find(|(v, _)| *v == x[k]) {
                Some(entry) => entry.1 += rat(s),
                None => coeffs.push((x[k], rat(s))),
            }
        }
        coeffs.retain(|(_, c)| *c != zero());
        coeffs.push((z, rat(-cycle.period)));
        model.constraints.push(Constraint {
            name: format!("cycle_{}", cycle.co_tree_arc),
            terms: coeffs,
            relation: Relation::Eq,
            rhs: zero(),
        });
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::tree::{fundamental_basis, sharp_tree};

    #[test]
    fn arc_model_shape() {
        let net = fixtures::figure3();
        let m = build_arc_mpesp(&net);
        assert_eq!(m.constraints.len(), 5);
        assert_eq!(m.num_integer(), 5);
        assert_eq!(m.num_continuous(), 5 + 4);
        assert_eq!(m.variables[m.variable_index("pi_1").unwrap()].upper, Some(rat(0)));
    }

    #[test]
    fn modulo_window_by_hand() {
        // x in [16,16], π_i in [0,9], π_j in [0,19], T_a = 10: T_a p in [16-19, 16+9]
        assert_eq!(modulo_window(16, 16, (0, 9), (0, 19), 10), (0, 2));
        assert_eq!(modulo_window(3, 3, (0, 0), (0, 9), 10), (0, 0));
    }

    #[test]
    fn cycle_model_shape_and_guard() {
        let net = fixtures::figure3();
        let basis = fundamental_basis(&net, &fixtures::figure3_tree_c(&net)).unwrap();
        let m = build_cycle_mpesp(&net, &basis).unwrap();
        assert_eq!(m.constraints.len(), 2);
        assert_eq!(m.num_integer(), 2);
        assert_eq!(m.num_continuous(), 5);
        let bad = fundamental_basis(&net, &fixtures::figure3_tree_b(&net)).unwrap();
        assert!(matches!(build_cycle_mpesp(&net, &bad), Err(FormulationError::NonSharpBasis(_))));
    }

    #[test]
    fn known_solution_satisfies_both_models() {
        let net = fixtures::figure3();
        let x = [1, 7, 2, 16, 6].map(rat);
        let pi = [0, 1, 8, 14].map(rat);

        let arc = build_arc_mpesp(&net);
        let mut values = vec![zero(); arc.variables.len()];
        for (k, v) in arc.variables.iter().enumerate() {
            let idx = |id: u32| (id - 1) as usize;
            values[k] = match v.kind {
                VarKind::Tension => x[idx(v.source)],
                VarKind::Time => pi[idx(v.source)],
                VarKind::Modulo => {
                    let a = idx(v.source);
                    let period = net.arc_period_at(a);
                    (x[a] - pi[net.head(a)] + pi[net.tail(a)]) / rat(period)
                }
                _ => unreachable!(),
            };
        }
        assert!(arc.is_feasible(&values));
        assert_eq!(arc.objective_value(&values), rat(32));

        let basis = fundamental_basis(&net, &sharp_tree(&net).unwrap()).unwrap();
        let cyc = build_cycle_mpesp(&net, &basis).unwrap();
        let xt = net.tension_from_dense(&x);
        let z = crate::tree::cycle_offsets(&net, &basis, &xt).unwrap().unwrap();
        let mut values: Vec<Rational> = x.to_vec();
        values.extend(z.iter().map(|&z| rat(z)));
        assert!(cyc.is_feasible(&values));
    }

    #[test]
    fn names_round_trip() {
        assert_eq!(VarKind::parse_name("pi_12"), (VarKind::Time, Some(12)));
        assert_eq!(VarKind::parse_name("z_3"), (VarKind::Cycle, Some(3)));
        assert_eq!(VarKind::parse_name("slack"), (VarKind::Other, None));
    }
}
