use std::fmt::{self, Write as _};

use crate::model::{AgentId, Availability, MoneyVector, PricedGameStructure};

/// Names the formula language resolves against: agents and the resource count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub agents: Vec<String>,
    pub resources: usize,
}

impl Signature {
    pub fn new<S: Into<String>>(agents: impl IntoIterator<Item = S>, resources: usize) -> Self {
        Signature { agents: agents.into_iter().map(Into::into).collect(), resources }
    }

    pub fn of(game: &PricedGameStructure) -> Self {
        Signature { agents: game.agents().to_vec(), resources: game.resource_count() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub const ALL: [Relation; 5] = [Relation::Lt, Relation::Le, Relation::Eq, Relation::Ge, Relation::Gt];

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }
}

/// Coalition and money endowment of a team operator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TeamOp {
    /// Sorted, without duplicates.
    pub team: Vec<AgentId>,
    /// One entry per agent of the signature; entries outside `team` are ignored.
    pub money: MoneyVector,
}

impl TeamOp {
    pub fn new(team: impl IntoIterator<Item = AgentId>, money: MoneyVector) -> Self {
        let mut team: Vec<AgentId> = team.into_iter().collect();
        team.sort();
        team.dedup();
        TeamOp { team, money }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Next(TeamOp, Box<Formula>),
    Until(TeamOp, Box<Formula>, Box<Formula>),
    Globally(TeamOp, Box<Formula>),
    Market(Relation, Availability),
}

impl Formula {
    pub fn atom(p: impl Into<String>) -> Formula {
        Formula::Atom(p.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn next(op: TeamOp, f: Formula) -> Formula {
        Formula::Next(op, Box::new(f))
    }

    pub fn until(op: TeamOp, a: Formula, b: Formula) -> Formula {
        Formula::Until(op, Box::new(a), Box::new(b))
    }

    /// `<<A:$>> F f`, expanded to `<<A:$>> [true U f]`.
    pub fn eventually(op: TeamOp, f: Formula) -> Formula {
        Formula::until(op, Formula::True, f)
    }

    pub fn globally(op: TeamOp, f: Formula) -> Formula {
        Formula::Globally(op, Box::new(f))
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::Atom(_) | Formula::Market(..) => vec![],
            Formula::Not(f) | Formula::Next(_, f) | Formula::Globally(_, f) => vec![f],
            Formula::And(a, b) | Formula::Until(_, a, b) => vec![a, b],
        }
    }

    pub fn team_op(&self) -> Option<&TeamOp> {
        match self {
            Formula::Next(op, _) | Formula::Until(op, _, _) | Formula::Globally(op, _) => Some(op),
            _ => None,
        }
    }

    /// Nesting depth of team operators.
    pub fn temporal_depth(&self) -> usize {
        let inner = self.children().into_iter().map(Formula::temporal_depth).max().unwrap_or(0);
        inner + usize::from(self.team_op().is_some())
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().into_iter().map(Formula::node_count).sum::<usize>()
    }

    /// Concrete syntax accepted by [`crate::formula::parse_formula`].
    pub fn render(&self, sig: &Signature) -> String {
        let mut out = String::new();
        self.write_to(&mut out, sig);
        out
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Formula, &'a Signature);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.render(self.1))
            }
        }
        D(self, sig)
    }

    fn write_operand(&self, out: &mut String, sig: &Signature) {
        if matches!(self, Formula::And(..)) {
            out.push('(');
            self.write_to(out, sig);
            out.push(')');
        } else {
            self.write_to(out, sig);
        }
    }

    fn write_to(&self, out: &mut String, sig: &Signature) {
        match self {
            Formula::True => out.push_str("true"),
            Formula::Atom(p) => out.push_str(p),
            Formula::Not(f) => {
                out.push('!');
                f.write_operand(out, sig);
            }
            Formula::And(a, b) => {
                a.write_to(out, sig);
                out.push_str(" & ");
                b.write_operand(out, sig);
            }
            Formula::Next(op, f) => {
                write_team(out, op, sig);
                out.push_str(" X ");
                f.write_operand(out, sig);
            }
            Formula::Globally(op, f) => {
                write_team(out, op, sig);
                out.push_str(" G ");
                f.write_operand(out, sig);
            }
            Formula::Until(op, a, b) => {
                write_team(out, op, sig);
                out.push_str(" [");
                a.write_to(out, sig);
                out.push_str(" U ");
                b.write_to(out, sig);
                out.push(']');
            }
            Formula::Market(rel, bound) => {
                let _ = write!(out, "avail {} ", rel.symbol());
                write_vector(out, bound.entries());
            }
        }
    }
}

fn write_team(out: &mut String, op: &TeamOp, sig: &Signature) {
    out.push_str("<<");
    for (i, a) in op.team.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        match sig.agents.get(a.0) {
            Some(name) => out.push_str(name),
            None => {
                let _ = write!(out, "#{}", a.0);
            }
        }
    }
    out.push(':');
    write_vector(out, op.money.entries());
    out.push_str(">>");
}

fn write_vector(out: &mut String, v: &[crate::model::Amount]) {
    out.push('[');
    for (i, a) in v.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{a}");
    }
    out.push(']');
}
