//! Brute-force reference semantics for differential testing.
//!
//! Shares nothing with the main checker beyond the model API: it builds the
//! full product of reachable configurations and every spent vector up to the
//! budgets, and iterates the fixpoint equations naively until they settle.

use std::collections::HashMap;

use crate::formula::{Formula, Relation, TeamOp};
use crate::model::{AgentId, Configuration, PricedGameStructure, TeamChoice};

use super::{check_arity, CheckError};

pub const DEFAULT_ORACLE_LIMIT: usize = 200_000;

/// Arena size cap, from `PRBATL_ORACLE_LIMIT` when set.
pub fn oracle_limit() -> usize {
    std::env::var("PRBATL_ORACLE_LIMIT").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ORACLE_LIMIT)
}

struct Move {
    cost: Vec<u64>,
    succ: Vec<usize>,
}

struct Game<'a> {
    g: &'a PricedGameStructure,
    configs: Vec<Configuration>,
    index: HashMap<Configuration, usize>,
    limit: usize,
}

fn product(ranges: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &d in ranges {
        out = out
            .into_iter()
            .flat_map(|p| {
                (1..=d).map(move |k| {
                    let mut p = p.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    out
}

impl<'a> Game<'a> {
    fn new(g: &'a PricedGameStructure, limit: usize) -> Result<Self, CheckError> {
        let configs = g.reachable();
        if configs.len() > limit {
            return Err(CheckError::OracleLimit { size: configs.len(), limit });
        }
        let index = configs.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        Ok(Game { g, configs, index, limit })
    }

    /// Safe moves at configuration `i` with their cost per tracked agent.
    fn moves(&self, i: usize, team: &[AgentId], tracked: &[AgentId]) -> Result<Vec<Move>, CheckError> {
        let g = self.g;
        let c = &self.configs[i];
        let q = c.location;
        let opp: Vec<AgentId> = g.all_agents().into_iter().filter(|a| !team.contains(a)).collect();
        let sigmas = product(&team.iter().map(|&a| g.action_count(q, a)).collect::<Vec<_>>());
        let taus = product(&opp.iter().map(|&a| g.action_count(q, a)).collect::<Vec<_>>());
        let mut feasible_taus = Vec::new();
        for t in &taus {
            let tc = TeamChoice::new(opp.iter().copied().zip(t.iter().copied()));
            if g.team_feasible(c, &tc)? {
                feasible_taus.push(t);
            }
        }
        let mut out = Vec::new();
        'sigma: for s in &sigmas {
            let sc = TeamChoice::new(team.iter().copied().zip(s.iter().copied()));
            if !g.team_feasible(c, &sc)? {
                continue;
            }
            let mut succ = Vec::new();
            for t in &feasible_taus {
                let mut profile = vec![0u32; g.agent_count()];
                for (k, &a) in team.iter().enumerate() {
                    profile[a.0] = s[k];
                }
                for (k, &a) in opp.iter().enumerate() {
                    profile[a.0] = t[k];
                }
                match g.step(c, &profile)? {
                    Some(next) => succ.push(self.index[&next]),
                    None => continue 'sigma,
                }
            }
            let cost = tracked
                .iter()
                .map(|&a| {
                    let act = s[team.iter().position(|&b| b == a).expect("tracked member")];
                    let consd = g.consd(q, a, act).expect("in range");
                    g.price(&c.avail, q, a).iter().zip(consd).map(|(&p, x)| p as u64 * x).sum()
                })
                .collect();
            out.push(Move { cost, succ });
        }
        Ok(out)
    }

    fn arena(&self, op: &TeamOp) -> Result<Arena, CheckError> {
        let tracked: Vec<AgentId> = op.team.iter().copied().filter(|a| op.money[a.0].is_finite()).collect();
        let budget: Vec<u64> = tracked.iter().map(|a| op.money[a.0].raw()).collect();
        let mut spents: Vec<Vec<u64>> = vec![Vec::new()];
        for &b in &budget {
            let cap = (self.limit / self.configs.len().max(1)) as u64;
            if b >= cap {
                return Err(CheckError::OracleLimit { size: usize::MAX, limit: self.limit });
            }
            spents = spents.into_iter().flat_map(|s| (0..=b).map(move |x| [s.clone(), vec![x]].concat())).collect();
        }
        let size = self.configs.len().saturating_mul(spents.len());
        if size > self.limit {
            return Err(CheckError::OracleLimit { size, limit: self.limit });
        }
        let spent_index: HashMap<Vec<u64>, usize> = spents.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let moves = (0..self.configs.len()).map(|i| self.moves(i, &op.team, &tracked)).collect::<Result<Vec<_>, _>>()?;
        Ok(Arena { moves, spents, spent_index, budget })
    }

    fn eval(&self, f: &Formula) -> Result<Vec<bool>, CheckError> {
        let n = self.configs.len();
        Ok(match f {
            Formula::True => vec![true; n],
            Formula::Atom(p) => self.configs.iter().map(|c| self.g.location(c.location).props.contains(p)).collect(),
            Formula::Not(a) => self.eval(a)?.into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                x.into_iter().zip(y).map(|(a, b)| a && b).collect()
            }
            Formula::Market(rel, bound) => self
                .configs
                .iter()
                .map(|c| {
                    c.avail.entries().iter().zip(bound.entries()).all(|(a, b)| match rel {
                        Relation::Lt => a < b,
                        Relation::Le => a <= b,
                        Relation::Eq => a == b,
                        Relation::Ge => a >= b,
                        Relation::Gt => a > b,
                    })
                })
                .collect(),
            Formula::Next(op, a) => {
                let target = self.eval(a)?;
                let arena = self.arena(op)?;
                (0..n)
                    .map(|i| {
                        arena.moves[i]
                            .iter()
                            .any(|m| arena.affordable(&vec![0; arena.budget.len()], &m.cost).is_some() && m.succ.iter().all(|&j| target[j]))
                    })
                    .collect()
            }
            Formula::Until(op, a, b) => {
                let (s1, s2) = (self.eval(a)?, self.eval(b)?);
                let arena = self.arena(op)?;
                let win = arena.least(|i| s2[i], |i| s1[i]);
                arena.at_zero(&win, n)
            }
            Formula::Globally(op, a) => {
                let s1 = self.eval(a)?;
                let arena = self.arena(op)?;
                let keep = arena.greatest(|i| s1[i]);
                arena.at_zero(&keep, n)
            }
        })
    }
}

struct Arena {
    moves: Vec<Vec<Move>>,
    spents: Vec<Vec<u64>>,
    spent_index: HashMap<Vec<u64>, usize>,
    budget: Vec<u64>,
}

impl Arena {
    fn width(&self) -> usize {
        self.spents.len()
    }

    fn affordable(&self, spent: &[u64], cost: &[u64]) -> Option<usize> {
        let next: Vec<u64> = spent.iter().zip(cost).map(|(s, c)| s + c).collect();
        if next.iter().zip(&self.budget).any(|(s, b)| s > b) {
            return None;
        }
        Some(self.spent_index[&next])
    }

    fn at_zero(&self, states: &[bool], n: usize) -> Vec<bool> {
        let z = self.spent_index[&vec![0; self.budget.len()]];
        (0..n).map(|i| states[i * self.width() + z]).collect()
    }

    /// States winning the reachability game towards `goal` through `stay`.
    fn least(&self, goal: impl Fn(usize) -> bool, stay: impl Fn(usize) -> bool) -> Vec<bool> {
        let w = self.width();
        let n = self.moves.len();
        let mut win: Vec<bool> = (0..n * w).map(|s| goal(s / w)).collect();
        loop {
            let mut changed = false;
            for s in 0..n * w {
                let (i, k) = (s / w, s % w);
                if win[s] || !stay(i) {
                    continue;
                }
                let ok = self.moves[i].iter().any(|m| match self.affordable(&self.spents[k], &m.cost) {
                    Some(k2) => m.succ.iter().all(|&j| win[j * w + k2]),
                    None => false,
                });
                if ok {
                    win[s] = true;
                    changed = true;
                }
            }
            if !changed {
                return win;
            }
        }
    }

    /// States from which the team can stay in `stay` forever.
    fn greatest(&self, stay: impl Fn(usize) -> bool) -> Vec<bool> {
        let w = self.width();
        let n = self.moves.len();
        let mut keep: Vec<bool> = (0..n * w).map(|s| stay(s / w)).collect();
        loop {
            let mut changed = false;
            for s in 0..n * w {
                if !keep[s] {
                    continue;
                }
                let (i, k) = (s / w, s % w);
                let ok = self.moves[i].iter().any(|m| match self.affordable(&self.spents[k], &m.cost) {
                    Some(k2) => m.succ.iter().all(|&j| keep[j * w + k2]),
                    None => false,
                });
                if !ok {
                    keep[s] = false;
                    changed = true;
                }
            }
            if !changed {
                return keep;
            }
        }
    }

    /// States from which the opponents can force a visit outside `stay`.
    fn opponent_attractor(&self, stay: impl Fn(usize) -> bool) -> Vec<bool> {
        let w = self.width();
        let n = self.moves.len();
        let mut att: Vec<bool> = (0..n * w).map(|s| !stay(s / w)).collect();
        loop {
            let mut changed = false;
            for s in 0..n * w {
                if att[s] {
                    continue;
                }
                let (i, k) = (s / w, s % w);
                let forced = self.moves[i].iter().all(|m| match self.affordable(&self.spents[k], &m.cost) {
                    Some(k2) => m.succ.iter().any(|&j| att[j * w + k2]),
                    None => true,
                });
                if forced {
                    att[s] = true;
                    changed = true;
                }
            }
            if !changed {
                return att;
            }
        }
    }
}

/// Reference verdict for `phi` at the initial configuration.
pub fn oracle_check(game: &PricedGameStructure, phi: &Formula) -> Result<bool, CheckError> {
    let sets = oracle_label(game, phi)?;
    Ok(sets[&game.initial_configuration()])
}

/// Reference truth value of `phi` at every reachable configuration.
pub fn oracle_label(game: &PricedGameStructure, phi: &Formula) -> Result<HashMap<Configuration, bool>, CheckError> {
    oracle_label_with_limit(game, phi, oracle_limit())
}

/// [`oracle_label`] with an explicit arena size cap.
pub fn oracle_label_with_limit(
    game: &PricedGameStructure,
    phi: &Formula,
    limit: usize,
) -> Result<HashMap<Configuration, bool>, CheckError> {
    check_arity(game, phi)?;
    let g = Game::new(game, limit)?;
    let set = g.eval(phi)?;
    Ok(g.configs.into_iter().zip(set).collect())
}

/// Configurations (at zero spending) from which the opponents of `op.team`
/// can force the play out of `stay` whatever the team does.
pub fn opponent_attractor(
    game: &PricedGameStructure,
    op: &TeamOp,
    stay: &dyn Fn(&Configuration) -> bool,
) -> Result<HashMap<Configuration, bool>, CheckError> {
    check_arity(game, &Formula::globally(op.clone(), Formula::True))?;
    let g = Game::new(game, oracle_limit())?;
    let arena = g.arena(op)?;
    let inside: Vec<bool> = g.configs.iter().map(stay).collect();
    let att = arena.opponent_attractor(|i| inside[i]);
    let at0 = arena.at_zero(&att, g.configs.len());
    Ok(g.configs.into_iter().zip(at0).collect())
}
