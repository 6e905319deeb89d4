//! Enumeration of the plays compatible with a fixed team strategy.

use thiserror::Error;

use crate::model::{AgentId, Configuration, ModelError, PricedGameStructure, TeamChoice};

/// An ultimately periodic play: `configs[loop_start..]` repeats forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Play {
    pub configs: Vec<Configuration>,
    pub loop_start: usize,
}

impl Play {
    pub fn cycle(&self) -> &[Configuration] {
        &self.configs[self.loop_start..]
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OutcomeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("strategy leaves the outcome undefined at {location} for profile {profile:?}")]
    Undefined { location: crate::model::LocationId, profile: Vec<u32> },
    #[error("more than {0} plays")]
    TooMany(usize),
}

/// Every play from `start` in which `team` follows `strategy` and the
/// other agents choose any feasible actions. A play ends at the first
/// repeated configuration. `strategy` must choose for exactly the team.
pub fn outcomes(
    game: &PricedGameStructure,
    start: &Configuration,
    team: &[AgentId],
    strategy: &dyn Fn(&Configuration) -> TeamChoice,
    limit: usize,
) -> Result<Vec<Play>, OutcomeError> {
    let opp: Vec<AgentId> = game.all_agents().into_iter().filter(|a| !team.contains(a)).collect();
    let mut plays = Vec::new();
    let mut path = vec![start.clone()];
    // Per depth: remaining successors to explore.
    let mut pending: Vec<Vec<Configuration>> = vec![successors(game, start, &opp, strategy)?];
    while let Some(top) = pending.last_mut() {
        let Some(next) = top.pop() else {
            pending.pop();
            path.pop();
            continue;
        };
        if let Some(i) = path.iter().position(|c| *c == next) {
            let mut configs = path.clone();
            configs.push(next);
            plays.push(Play { configs, loop_start: i });
            if plays.len() > limit {
                return Err(OutcomeError::TooMany(limit));
            }
            continue;
        }
        let succ = successors(game, &next, &opp, strategy)?;
        path.push(next);
        pending.push(succ);
    }
    plays.reverse();
    Ok(plays)
}

fn successors(
    game: &PricedGameStructure,
    c: &Configuration,
    opp: &[AgentId],
    strategy: &dyn Fn(&Configuration) -> TeamChoice,
) -> Result<Vec<Configuration>, OutcomeError> {
    let own = strategy(c);
    let mut profile = vec![1u32; game.agent_count()];
    for (&a, &k) in own.team.iter().zip(&own.choice) {
        profile[a.0] = k;
    }
    let mut out: Vec<Configuration> = Vec::new();
    let radix: Vec<u32> = opp.iter().map(|&a| game.action_count(c.location, a)).collect();
    let total: usize = radix.iter().map(|&d| d as usize).product();
    for mut code in 0..total {
        let mut choice = Vec::with_capacity(opp.len());
        for &d in radix.iter().rev() {
            choice.push(code as u32 % d + 1);
            code /= d as usize;
        }
        choice.reverse();
        let tc = TeamChoice::new(opp.iter().copied().zip(choice.iter().copied()));
        if !game.team_feasible(c, &tc)? {
            continue;
        }
        for (&a, &k) in opp.iter().zip(&choice) {
            profile[a.0] = k;
        }
        match game.step(c, &profile)? {
            Some(next) => {
                if !out.contains(&next) {
                    out.push(next);
                }
            }
            None => return Err(OutcomeError::Undefined { location: c.location, profile: profile.clone() }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::escape_game;
    use crate::model::{Availability, LocationId};

    #[test]
    fn single_outcome_from_q0() {
        let g = escape_game(1);
        let a1 = AgentId(0);
        let strategy = |c: &Configuration| {
            let act = if c.location == LocationId(0) { 2 } else { 1 };
            TeamChoice::new([(a1, act)])
        };
        let plays = outcomes(&g, &g.initial_configuration(), &[a1], &strategy, 100).unwrap();
        assert_eq!(plays.len(), 1);
        let p = &plays[0];
        let q2 = Configuration::new(LocationId(2), Availability::finite(&[0]));
        assert_eq!(p.cycle(), &[q2.clone(), q2]);
        assert_eq!(p.configs[1].location, LocationId(1));
    }

    #[test]
    fn do_nothing_branches_on_opponent() {
        let g = escape_game(1);
        let a1 = AgentId(0);
        let start = Configuration::new(LocationId(1), Availability::finite(&[1]));
        let plays = outcomes(&g, &start, &[a1], &|_| TeamChoice::new([(a1, 1)]), 100).unwrap();
        assert_eq!(plays.len(), 2);
    }
}
