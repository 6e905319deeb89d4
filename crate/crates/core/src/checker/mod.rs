//! Bottom-up labelling of reachable configurations with PRB-ATL subformulas.
//!
//! Team operators are solved on an arena whose states pair a configuration
//! with the money each budget-limited team member has spent so far:
//! `X` is a one-step check, `U` an attractor and `G` a safety fixpoint.

mod intern;
mod moves;
pub mod oracle;
pub mod outcome;
mod solve;
mod space;
mod witness;

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::ExecPolicy;
use crate::formula::{eval_market, subformulas, Formula, FormulaTable, TeamOp};
use crate::model::{Configuration, ModelError, PricedGameStructure, TeamChoice};

pub use space::StateSpace;
pub(crate) use space::UNDEFINED;
pub use witness::{validate_witness, witness, ArenaState, Witness};

use moves::MoveContext;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("formula mentions agent #{index} but the structure has {count} agents")]
    UnknownAgent { index: usize, count: usize },
    #[error("money vector has {found} entries, the structure has {expected} agents")]
    MoneyArity { expected: usize, found: usize },
    #[error("availability vector has {found} entries, the structure has {expected} resources")]
    MarketArity { expected: usize, found: usize },
    #[error("oracle arena would have {size} states, above the limit of {limit} (set PRBATL_ORACLE_LIMIT to raise it)")]
    OracleLimit { size: usize, limit: usize },
}

/// Checks that `phi` only mentions agents and vectors that fit `game`.
pub fn check_arity(game: &PricedGameStructure, phi: &Formula) -> Result<(), CheckError> {
    let (n, r) = (game.agent_count(), game.resource_count());
    if let Some(op) = phi.team_op() {
        if let Some(a) = op.team.iter().find(|a| a.0 >= n) {
            return Err(CheckError::UnknownAgent { index: a.0, count: n });
        }
        if op.money.len() != n {
            return Err(CheckError::MoneyArity { expected: n, found: op.money.len() });
        }
    }
    if let Formula::Market(_, v) = phi {
        if v.len() != r {
            return Err(CheckError::MarketArity { expected: r, found: v.len() });
        }
    }
    phi.children().into_iter().try_for_each(|c| check_arity(game, c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Next,
    Until,
    Globally,
}

/// Size of the arena explored for one team operator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorStats {
    pub node: usize,
    pub kind: OperatorKind,
    pub arena_states: usize,
    pub arena_moves: usize,
    pub micros: u64,
}

/// Truth value of every subformula at every reachable configuration.
#[derive(Clone, Debug)]
pub struct Labeling {
    space: Arc<StateSpace>,
    table: FormulaTable,
    sets: Vec<Vec<bool>>,
    stats: Vec<OperatorStats>,
}

impl Labeling {
    pub fn table(&self) -> &FormulaTable {
        &self.table
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// Membership vector of a subformula, indexed by configuration id.
    pub fn set(&self, node: usize) -> &[bool] {
        &self.sets[node]
    }

    pub fn holds(&self, node: usize, c: &Configuration) -> Option<bool> {
        self.space.id_of(c).map(|id| self.sets[node][id as usize])
    }

    pub fn holds_formula(&self, f: &Formula, c: &Configuration) -> Option<bool> {
        self.holds(self.table.position(f)?, c)
    }

    /// The verdict: the root formula at the initial configuration.
    pub fn verdict(&self) -> bool {
        self.sets[self.table.root()][0]
    }

    pub fn satisfying(&self, node: usize) -> Vec<Configuration> {
        (0..self.space.len() as u32).filter(|&id| self.sets[node][id as usize]).map(|id| self.space.configuration(id)).collect()
    }

    pub fn operator_stats(&self) -> &[OperatorStats] {
        &self.stats
    }
}

/// A model checker bound to one structure; the reachable configurations
/// are computed once and shared by every query.
#[derive(Clone, Debug)]
pub struct Checker<'g> {
    game: &'g PricedGameStructure,
    space: Arc<StateSpace>,
    policy: ExecPolicy,
}

impl<'g> Checker<'g> {
    pub fn new(game: &'g PricedGameStructure) -> Self {
        Checker::with_policy(game, ExecPolicy::default())
    }

    pub fn with_policy(game: &'g PricedGameStructure, policy: ExecPolicy) -> Self {
        let space = Arc::new(StateSpace::build(game, policy));
        Checker { game, space, policy }
    }

    pub fn game(&self) -> &PricedGameStructure {
        self.game
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn policy(&self) -> ExecPolicy {
        self.policy
    }

    fn set_of(&self, configs: &[Configuration]) -> Vec<bool> {
        let mut v = vec![false; self.space.len()];
        for c in configs {
            if let Some(id) = self.space.id_of(c) {
                v[id as usize] = true;
            }
        }
        v
    }

    fn to_configs(&self, set: &[bool]) -> Vec<Configuration> {
        (0..self.space.len() as u32).filter(|&i| set[i as usize]).map(|i| self.space.configuration(i)).collect()
    }

    fn check_op(&self, op: &TeamOp) -> Result<(), CheckError> {
        check_arity(self.game, &Formula::next(op.clone(), Formula::True))
    }

    /// Safe moves of team `op.team` at `c` after spending `spent` (one entry
    /// per team member with a finite budget, in team order).
    pub fn safe_moves(&self, c: &Configuration, op: &TeamOp, spent: &[u64]) -> Result<Vec<TeamChoice>, CheckError> {
        self.check_op(op)?;
        let Some(id) = self.space.id_of(c) else { return Ok(Vec::new()) };
        let ctx = MoveContext::new(self.game, &self.space, op);
        let mut wanted = vec![false; self.space.len()];
        wanted[id as usize] = true;
        let table = ctx.table(&wanted, ExecPolicy::Sequential);
        let budget = ctx.budget();
        Ok(table
            .moves(id)
            .filter(|m| m.cost.iter().zip(spent).zip(budget).all(|((&c, &s), &b)| s.saturating_add(c) <= b))
            .map(|m| ctx.choice(id, m.sigma))
            .collect())
    }

    pub fn solve_next(&self, op: &TeamOp, targets: &[Configuration]) -> Result<Vec<Configuration>, CheckError> {
        self.check_op(op)?;
        let ctx = MoveContext::new(self.game, &self.space, op);
        let (sol, _) = solve::solve_next(&ctx, self.space.len(), &self.set_of(targets), self.policy, false);
        Ok(self.to_configs(&sol.configs))
    }

    pub fn solve_until(&self, op: &TeamOp, set1: &[Configuration], set2: &[Configuration]) -> Result<Vec<Configuration>, CheckError> {
        self.check_op(op)?;
        let ctx = MoveContext::new(self.game, &self.space, op);
        let sol = solve::solve_until(&ctx, self.space.len(), &self.set_of(set1), &self.set_of(set2), self.policy, false);
        Ok(self.to_configs(&sol.configs))
    }

    pub fn solve_globally(&self, op: &TeamOp, set1: &[Configuration]) -> Result<Vec<Configuration>, CheckError> {
        self.check_op(op)?;
        let ctx = MoveContext::new(self.game, &self.space, op);
        let sol = solve::solve_globally(&ctx, self.space.len(), &self.set_of(set1), self.policy, false);
        Ok(self.to_configs(&sol.configs))
    }

    pub fn label(&self, phi: &Formula) -> Result<Labeling, CheckError> {
        check_arity(self.game, phi)?;
        let table = subformulas(phi);
        let n = self.space.len();
        let mut sets: Vec<Vec<bool>> = vec![Vec::new(); table.len()];
        let mut stats = Vec::new();
        for layer in table.layers() {
            let done = &sets;
            let results = self.policy.map_min(&layer, 2, |&node| self.label_node(&table, node, done, n));
            for (&node, (set, st)) in layer.iter().zip(results) {
                sets[node] = set;
                stats.extend(st);
            }
        }
        stats.sort_by_key(|s| s.node);
        Ok(Labeling { space: Arc::clone(&self.space), table, sets, stats })
    }

    fn label_node(&self, table: &FormulaTable, node: usize, sets: &[Vec<bool>], n: usize) -> (Vec<bool>, Option<OperatorStats>) {
        let f = &table.node(node).formula;
        let ch = &table.node(node).children;
        let started = Instant::now();
        let stats = |kind, sol: &solve::Solution| OperatorStats {
            node,
            kind,
            arena_states: sol.arena_states,
            arena_moves: sol.arena_moves,
            micros: started.elapsed().as_micros() as u64,
        };
        match f {
            Formula::True => (vec![true; n], None),
            Formula::Atom(p) => {
                let by_loc: Vec<bool> = self.game.locations().iter().map(|l| l.props.contains(p)).collect();
                ((0..n as u32).map(|i| by_loc[self.space.location(i).0]).collect(), None)
            }
            Formula::Not(_) => (sets[ch[0]].iter().map(|&b| !b).collect(), None),
            Formula::And(..) => (sets[ch[0]].iter().zip(&sets[ch[1]]).map(|(&a, &b)| a && b).collect(), None),
            Formula::Market(rel, bound) => {
                let b = bound.entries();
                let set = (0..n as u32)
                    .map(|i| {
                        let m = self.space.avail(i);
                        eval_market(m.entries(), *rel, b).unwrap_or(false)
                    })
                    .collect();
                (set, None)
            }
            Formula::Next(op, _) => {
                let ctx = MoveContext::new(self.game, &self.space, op);
                let (sol, _) = solve::solve_next(&ctx, n, &sets[ch[0]], self.policy, false);
                let st = stats(OperatorKind::Next, &sol);
                (sol.configs, Some(st))
            }
            Formula::Until(op, _, _) => {
                let ctx = MoveContext::new(self.game, &self.space, op);
                let sol = solve::solve_until(&ctx, n, &sets[ch[0]], &sets[ch[1]], self.policy, false);
                let st = stats(OperatorKind::Until, &sol);
                (sol.configs, Some(st))
            }
            Formula::Globally(op, _) => {
                let ctx = MoveContext::new(self.game, &self.space, op);
                let sol = solve::solve_globally(&ctx, n, &sets[ch[0]], self.policy, false);
                let st = stats(OperatorKind::Globally, &sol);
                (sol.configs, Some(st))
            }
        }
    }

    pub fn check(&self, phi: &Formula) -> Result<bool, CheckError> {
        Ok(self.label(phi)?.verdict())
    }
}

/// `G ⊨ φ`: the formula at `⟨q0, m0⟩`.
pub fn check(game: &PricedGameStructure, phi: &Formula) -> Result<bool, CheckError> {
    Checker::new(game).check(phi)
}

pub fn label(game: &PricedGameStructure, phi: &Formula) -> Result<Labeling, CheckError> {
    Checker::new(game).label(phi)
}

pub use oracle::oracle_check;

#[cfg(test)]
mod tests;
