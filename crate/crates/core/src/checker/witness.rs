use std::collections::{HashMap, HashSet};

use crate::formula::Formula;
use crate::model::{AgentId, Configuration, PricedGameStructure, TeamChoice};

use super::moves::{tracked_agents, MoveContext};
use super::solve::{self, Kind, NO_MOVE};
use super::{CheckError, Checker, OperatorKind};

/// A configuration together with the money spent by each budget-limited
/// team member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArenaState {
    pub config: Configuration,
    pub spent: Vec<(AgentId, u64)>,
}

/// Memoryless strategy for the outermost team operator, restricted to the
/// arena states reachable from the initial one.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Witness {
    pub kind: Option<OperatorKind>,
    pub team: Vec<AgentId>,
    pub entries: Vec<(ArenaState, TeamChoice)>,
}

impl Witness {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn choice_at(&self, s: &ArenaState) -> Option<&TeamChoice> {
        self.entries.iter().find(|(k, _)| k == s).map(|(_, c)| c)
    }
}

/// A strategy certifying `phi` at the initial configuration, `None` when
/// `phi` does not hold there. Formulas whose root is not a team operator
/// get an empty table.
pub fn witness(game: &PricedGameStructure, phi: &Formula) -> Result<Option<Witness>, CheckError> {
    let checker = Checker::new(game);
    let lab = checker.label(phi)?;
    if !lab.verdict() {
        return Ok(None);
    }
    let Some(op) = phi.team_op() else { return Ok(Some(Witness::default())) };
    let table = lab.table();
    let children = &table.node(table.root()).children;
    let space = checker.space();
    let n = space.len();
    let ctx = MoveContext::new(game, space, op);
    let tracked = ctx.tracked().to_vec();
    let mut w = Witness { kind: None, team: op.team.clone(), entries: Vec::new() };
    let zero: Vec<(AgentId, u64)> = tracked.iter().map(|&a| (a, 0)).collect();
    let policy = checker.policy();
    let sol = match phi {
        Formula::Next(..) => {
            let (sol, moves) = solve::solve_next(&ctx, n, lab.set(children[0]), policy, true);
            let sigma = sol.chosen[0];
            debug_assert!(moves.moves(0).any(|m| m.sigma == sigma));
            w.kind = Some(OperatorKind::Next);
            let state = ArenaState { config: space.configuration(0), spent: zero };
            w.entries.push((state, ctx.choice(0, sigma)));
            return Ok(Some(w));
        }
        Formula::Until(..) => {
            w.kind = Some(OperatorKind::Until);
            solve::solve_until(&ctx, n, lab.set(children[0]), lab.set(children[1]), policy, true)
        }
        Formula::Globally(..) => {
            w.kind = Some(OperatorKind::Globally);
            solve::solve_globally(&ctx, n, lab.set(children[0]), policy, true)
        }
        _ => unreachable!("team_op returned Some"),
    };
    let arena = sol.arena.as_ref().expect("arena kept");
    let mut seen = HashSet::new();
    let mut stack = vec![0u32];
    seen.insert(0u32);
    while let Some(s) = stack.pop() {
        if arena.kind[s as usize] == Kind::Goal {
            continue;
        }
        let m = sol.chosen[s as usize];
        assert_ne!(m, NO_MOVE, "reachable state outside the winning region");
        let row = arena.states.row(s);
        let state = ArenaState {
            config: space.configuration(row[0] as u32),
            spent: tracked.iter().copied().zip(row[1..].iter().copied()).collect(),
        };
        w.entries.push((state, ctx.choice(row[0] as u32, arena.move_sigma[m as usize])));
        for &t in arena.succ_of(m as usize) {
            if seen.insert(t) {
                stack.push(t);
            }
        }
    }
    w.entries.sort();
    Ok(Some(w))
}

fn opponent_choices(game: &PricedGameStructure, c: &Configuration, team: &[AgentId]) -> Vec<TeamChoice> {
    let opp: Vec<AgentId> = game.all_agents().into_iter().filter(|a| !team.contains(a)).collect();
    let mut out = vec![TeamChoice::new(std::iter::empty())];
    for &a in &opp {
        let d = game.action_count(c.location, a);
        out = out
            .into_iter()
            .flat_map(|tc| {
                (1..=d).map(move |k| {
                    let mut pairs: Vec<(AgentId, u32)> = tc.team.iter().copied().zip(tc.choice.iter().copied()).collect();
                    pairs.push((a, k));
                    TeamChoice::new(pairs)
                })
            })
            .collect();
    }
    out.retain(|tc| game.team_feasible(c, tc).unwrap_or(false));
    out
}

/// Replays `w` against every opponent behaviour and checks that it
/// certifies `phi` at the initial configuration.
pub fn validate_witness(game: &PricedGameStructure, phi: &Formula, w: &Witness) -> Result<(), String> {
    let lab = Checker::new(game).label(phi).map_err(|e| e.to_string())?;
    let Some(op) = phi.team_op() else {
        return if w.entries.is_empty() { Ok(()) } else { Err("table for a formula without team operator".into()) };
    };
    let table = lab.table();
    let ch = &table.node(table.root()).children;
    let in_set = |node: usize, c: &Configuration| lab.holds(node, c).unwrap_or(false);
    let tracked = tracked_agents(op);
    let map: HashMap<&ArenaState, &TeamChoice> = w.entries.iter().map(|(s, c)| (s, c)).collect();
    let start = ArenaState { config: game.initial_configuration(), spent: tracked.iter().map(|&a| (a, 0)).collect() };
    let (goal, stay) = match phi {
        Formula::Next(..) => (Some(ch[0]), None),
        Formula::Until(..) => (Some(ch[1]), Some(ch[0])),
        _ => (None, Some(ch[0])),
    };
    if matches!(phi, Formula::Until(..)) && in_set(ch[1], &start.config) {
        return Ok(());
    }
    if !map.contains_key(&start) {
        return Err("no choice at the initial state".into());
    }
    let mut edges: HashMap<&ArenaState, Vec<ArenaState>> = HashMap::new();
    for (state, choice) in &w.entries {
        let c = &state.config;
        if let Some(s) = stay {
            if !in_set(s, c) {
                return Err(format!("state at {} leaves the invariant", c.location));
            }
        }
        if choice.team != op.team {
            return Err("choice for the wrong team".into());
        }
        if !game.team_feasible(c, choice).map_err(|e| e.to_string())? {
            return Err(format!("infeasible choice at {}", c.location));
        }
        let mut spent = state.spent.clone();
        for (a, s) in spent.iter_mut() {
            let act = choice.action_of(*a).ok_or("tracked agent without action")?;
            let price = game.price(&c.avail, c.location, *a);
            let consd = game.consd(c.location, *a, act).map_err(|e| e.to_string())?;
            let cost: u64 = consd.iter().zip(price).map(|(&x, &p)| x * p.max(0) as u64).sum();
            *s += cost;
            if *s > op.money[a.0].raw() {
                return Err(format!("agent #{} exceeds its budget", a.0));
            }
        }
        for opp in opponent_choices(game, c, &op.team) {
            let mut profile = vec![1u32; game.agent_count()];
            for (&a, &k) in choice.team.iter().zip(&choice.choice).chain(opp.team.iter().zip(&opp.choice)) {
                profile[a.0] = k;
            }
            let next = game
                .step(c, &profile)
                .map_err(|e| e.to_string())?
                .ok_or_else(|| format!("undefined step from {} under {:?}", c.location, profile))?;
            if let Some(g) = goal {
                if in_set(g, &next) {
                    continue;
                }
                if stay.is_none() {
                    return Err(format!("successor {} misses the target", next.location));
                }
            }
            let ns = ArenaState { config: next, spent: spent.clone() };
            if !map.contains_key(&ns) {
                return Err(format!("no choice at successor {}", ns.config.location));
            }
            edges.entry(state).or_default().push(ns);
        }
    }
    if matches!(phi, Formula::Until(..)) {
        // The strategy must reach the goal: no cycle among non-goal states.
        let mut colour: HashMap<&ArenaState, u8> = HashMap::new();
        for root in map.keys() {
            if colour.contains_key(root) {
                continue;
            }
            let mut stack = vec![(*root, 0usize)];
            colour.insert(root, 1);
            while let Some((s, i)) = stack.pop() {
                let succ = edges.get(s).map(Vec::as_slice).unwrap_or(&[]);
                if i < succ.len() {
                    stack.push((s, i + 1));
                    let (t, _) = map.get_key_value(&succ[i]).expect("checked above");
                    match colour.get(t) {
                        Some(1) => return Err("strategy can loop before reaching the target".into()),
                        Some(_) => {}
                        None => {
                            colour.insert(t, 1);
                            stack.push((t, 0));
                        }
                    }
                } else {
                    colour.insert(s, 2);
                }
            }
        }
    }
    Ok(())
}
