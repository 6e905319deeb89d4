//! PRB-ATL formulas: syntax tree, concrete syntax and the subformula table.

mod ast;
mod parse;

use std::collections::HashMap;

use thiserror::Error;

use crate::model::Amount;

pub use ast::{Formula, Relation, Signature, TeamOp};
pub use parse::{parse_formula, parse_with_warnings};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown agent '{name}' at {pos}")]
    UnknownAgent { pos: usize, name: String },
    #[error("{what} vector at {pos} has {found} entries, expected {expected}")]
    Arity { pos: usize, what: &'static str, expected: usize, found: usize },
}

impl FormulaError {
    pub fn position(&self) -> usize {
        match self {
            FormulaError::Syntax { pos, .. } | FormulaError::UnknownAgent { pos, .. } | FormulaError::Arity { pos, .. } => {
                *pos
            }
        }
    }
}

/// How a vector comparison `m ~ m'` is read. Only [`VectorReading::Every`]
/// is used by the checker; the others are kept for experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VectorReading {
    /// The relation holds in every coordinate.
    #[default]
    Every,
    /// The relation holds in at least one coordinate.
    Some,
    /// Product order: `<` means `<=` everywhere and different somewhere.
    Product,
}

fn cmp_scalar(rel: Relation, a: Amount, b: Amount) -> bool {
    match rel {
        Relation::Lt => a < b,
        Relation::Le => a <= b,
        Relation::Eq => a == b,
        Relation::Ge => a >= b,
        Relation::Gt => a > b,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot compare vectors of length {0} and {1}")]
pub struct ArityMismatch(pub usize, pub usize);

pub fn eval_market_with(reading: VectorReading, m: &[Amount], rel: Relation, bound: &[Amount]) -> Result<bool, ArityMismatch> {
    if m.len() != bound.len() {
        return Err(ArityMismatch(m.len(), bound.len()));
    }
    let pairs = m.iter().zip(bound);
    Ok(match reading {
        VectorReading::Every => pairs.into_iter().all(|(&a, &b)| cmp_scalar(rel, a, b)),
        VectorReading::Some => pairs.into_iter().any(|(&a, &b)| cmp_scalar(rel, a, b)),
        VectorReading::Product => {
            let le = m.iter().zip(bound).all(|(a, b)| a <= b);
            let ge = m.iter().zip(bound).all(|(a, b)| a >= b);
            match rel {
                Relation::Lt => le && m != bound,
                Relation::Le => le,
                Relation::Eq => m == bound,
                Relation::Ge => ge,
                Relation::Gt => ge && m != bound,
            }
        }
    })
}

/// `m ~ bound`, read coordinatewise in every coordinate.
pub fn eval_market(m: &[Amount], rel: Relation, bound: &[Amount]) -> Result<bool, ArityMismatch> {
    eval_market_with(VectorReading::Every, m, rel, bound)
}

#[derive(Clone, Debug)]
pub struct TableNode {
    pub formula: Formula,
    pub children: Vec<usize>,
    pub parents: Vec<usize>,
    /// 0 for leaves, otherwise one more than the highest child.
    pub height: usize,
}

/// Distinct subformulas, children before parents.
#[derive(Clone, Debug)]
pub struct FormulaTable {
    nodes: Vec<TableNode>,
}

impl FormulaTable {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[TableNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TableNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.nodes.iter().map(|n| &n.formula)
    }

    pub fn position(&self, f: &Formula) -> Option<usize> {
        self.nodes.iter().position(|n| n.formula == *f)
    }

    /// Node ids grouped by height, lowest first.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let top = self.nodes.iter().map(|n| n.height).max().unwrap_or(0);
        let mut out = vec![Vec::new(); top + 1];
        for (i, n) in self.nodes.iter().enumerate() {
            out[n.height].push(i);
        }
        out
    }
}

pub fn subformulas(phi: &Formula) -> FormulaTable {
    fn visit(f: &Formula, nodes: &mut Vec<TableNode>, seen: &mut HashMap<Formula, usize>) -> usize {
        if let Some(&id) = seen.get(f) {
            return id;
        }
        let children: Vec<usize> = f.children().into_iter().map(|c| visit(c, nodes, seen)).collect();
        let height = children.iter().map(|&c| nodes[c].height + 1).max().unwrap_or(0);
        let id = nodes.len();
        for &c in &children {
            if !nodes[c].parents.contains(&id) {
                nodes[c].parents.push(id);
            }
        }
        nodes.push(TableNode { formula: f.clone(), children, parents: Vec::new(), height });
        seen.insert(f.clone(), id);
        id
    }
    let mut nodes = Vec::new();
    visit(phi, &mut nodes, &mut HashMap::new());
    FormulaTable { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgentId, Availability, MoneyVector};

    fn sig() -> Signature {
        Signature::new(["a1", "a2"], 1)
    }

    fn inf2() -> MoneyVector {
        MoneyVector(vec![Amount::INF, Amount::INF])
    }

    #[test]
    fn parses_nested_team_operators() {
        let sig = Signature::new(["a1", "a2"], 2);
        let f = parse_formula("<<a1,a2:[5,5]>> X <<a1:[3,0]>> G p", &sig).unwrap();
        let inner = Formula::globally(TeamOp::new([AgentId(0)], MoneyVector::finite(&[3, 0])), Formula::atom("p"));
        let expect = Formula::next(TeamOp::new([AgentId(0), AgentId(1)], MoneyVector::finite(&[5, 5])), inner);
        assert_eq!(f, expect);
    }

    #[test]
    fn parses_atoms_and_market() {
        assert_eq!(parse_formula("p", &sig()).unwrap(), Formula::atom("p"));
        assert_eq!(
            parse_formula("avail >= [2]", &sig()).unwrap(),
            Formula::Market(Relation::Ge, Availability::finite(&[2]))
        );
        assert_eq!(
            parse_formula("avail<[inf]", &sig()).unwrap(),
            Formula::Market(Relation::Lt, Availability(vec![Amount::INF]))
        );
    }

    #[test]
    fn eventually_expands_to_until() {
        let f = parse_formula("<<a1:[inf,inf]>> F p", &sig()).unwrap();
        let op = TeamOp::new([AgentId(0)], inf2());
        assert_eq!(f, Formula::until(op, Formula::True, Formula::atom("p")));
    }

    #[test]
    fn precedence() {
        let f = parse_formula("!p & q & r", &sig()).unwrap();
        let expect = Formula::and(Formula::and(Formula::not(Formula::atom("p")), Formula::atom("q")), Formula::atom("r"));
        assert_eq!(f, expect);
        let g = parse_formula("<<a1:[1,1]>> X p & q", &sig()).unwrap();
        assert!(matches!(g, Formula::And(..)));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_formula("p & & q", &sig()).unwrap_err();
        assert_eq!(e.position(), 4);
        let e = parse_formula("<<a3:[1,1]>> X p", &sig()).unwrap_err();
        assert!(matches!(e, FormulaError::UnknownAgent { pos: 2, .. }));
        let e = parse_formula("<<a1:[1]>> X p", &sig()).unwrap_err();
        assert!(matches!(e, FormulaError::Arity { what: "money", .. }));
        let e = parse_formula("avail = [1,2]", &sig()).unwrap_err();
        assert!(matches!(e, FormulaError::Arity { what: "availability", .. }));
        assert!(parse_formula("(p", &sig()).is_err());
        assert!(parse_formula("p q", &sig()).is_err());
        assert!(parse_formula("X", &sig()).is_err());
    }

    #[test]
    fn warns_about_money_outside_team() {
        let (_, w) = parse_with_warnings("<<a1:[1,4]>> G p", &sig()).unwrap();
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("a2"));
        let (_, w) = parse_with_warnings("<<a1:[1,0]>> G p", &sig()).unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn render_round_trips() {
        let sig = Signature::new(["a1", "a2"], 2);
        for text in [
            "<<a1,a2:[5,5]>> X <<a1:[3,0]>> G p",
            "!(p & q) & <<:[0,inf]>> [p U avail > [1,inf]]",
            "<<a2:[0,2]>> G !<<a1:[1,1]>> X (p & true)",
        ] {
            let f = parse_formula(text, &sig).unwrap();
            assert_eq!(parse_formula(&f.render(&sig), &sig).unwrap(), f, "{text}");
        }
    }

    #[test]
    fn market_examples() {
        let v = |xs: &[u64]| Availability::finite(xs);
        assert!(eval_market(v(&[1]).entries(), Relation::Ge, v(&[1]).entries()).unwrap());
        assert!(!eval_market(v(&[1, 2]).entries(), Relation::Lt, v(&[2, 2]).entries()).unwrap());
        assert!(!eval_market(v(&[0]).entries(), Relation::Eq, v(&[1]).entries()).unwrap());
        assert!(eval_market(v(&[0]).entries(), Relation::Eq, v(&[0, 1]).entries()).is_err());
    }

    #[test]
    fn market_readings_differ_where_expected() {
        let m = Availability::finite(&[1, 2]);
        let b = Availability::finite(&[2, 2]);
        let lt = |r| eval_market_with(r, m.entries(), Relation::Lt, b.entries()).unwrap();
        assert!(!lt(VectorReading::Every));
        assert!(lt(VectorReading::Some));
        assert!(lt(VectorReading::Product));
    }

    #[test]
    fn subformula_tables() {
        let t = subformulas(&Formula::atom("p"));
        assert_eq!(t.len(), 1);

        let f = parse_formula("!p & p", &sig()).unwrap();
        let t = subformulas(&f);
        let got: Vec<String> = t.formulas().map(|f| f.render(&sig())).collect();
        assert_eq!(got, ["p", "!p", "!p & p"]);

        let psi = parse_formula("<<a1,a2:[5,5]>> X <<a1:[3,0]>> G p", &sig()).unwrap();
        let t = subformulas(&psi);
        assert_eq!(t.len(), 3);
        assert!(matches!(t.node(0).formula, Formula::Atom(_)));
        assert!(matches!(t.node(1).formula, Formula::Globally(..)));
        assert!(matches!(t.node(2).formula, Formula::Next(..)));
        for (i, n) in t.nodes().iter().enumerate() {
            assert!(n.children.iter().all(|&c| c < i));
        }
    }
}
