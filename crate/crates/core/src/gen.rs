//! Random small structures and formulas for differential testing.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, Relation, TeamOp};
use crate::model::{AgentId, Amount, Availability, GameBuilder, LocationId, MoneyVector, PriceFunction, PricedGameStructure};

#[derive(Clone, Debug)]
pub struct GenParams {
    pub max_locations: usize,
    pub agents: usize,
    pub max_resources: usize,
    pub max_m0: u64,
    pub max_qty: i64,
    pub max_actions: u32,
    pub max_budget: u64,
    /// Probability that a budget entry is unbounded.
    pub inf_budget: f64,
    pub max_depth: usize,
    pub props: Vec<String>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_locations: 5,
            agents: 2,
            max_resources: 2,
            max_m0: 3,
            max_qty: 2,
            max_actions: 3,
            max_budget: 5,
            inf_budget: 0.15,
            max_depth: 2,
            props: vec!["p".into(), "q".into()],
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random well-formed structure with a table-driven price function whose
/// default entries are all nonzero.
pub fn random_game(rng: &mut impl Rng, p: &GenParams) -> PricedGameStructure {
    let n = rng.random_range(1..=p.max_locations);
    let r = rng.random_range(1..=p.max_resources);
    let agents: Vec<String> = (1..=p.agents).map(|k| format!("a{k}")).collect();
    let resources: Vec<String> = (1..=r).map(|k| format!("R{k}")).collect();
    let mut b = GameBuilder::new(agents, resources);
    let locs: Vec<LocationId> = (0..n)
        .map(|i| {
            let props: Vec<String> = p.props.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
            b.location(format!("q{i}"), props)
        })
        .collect();
    let mut counts = vec![vec![1u32; p.agents]; n];
    for (qi, &q) in locs.iter().enumerate() {
        for (a, count) in counts[qi].iter_mut().enumerate() {
            let d = rng.random_range(1..=p.max_actions);
            *count = d;
            let mut deltas = vec![vec![0i64; r]];
            for _ in 1..d {
                // Skewed towards consumption so that budgets matter.
                deltas.push((0..r).map(|_| rng.random_range(-p.max_qty..=p.max_qty).min(rng.random_range(-p.max_qty..=1))).collect());
            }
            b.actions(q, AgentId(a), deltas);
        }
    }
    for (qi, &q) in locs.iter().enumerate() {
        let total: usize = counts[qi].iter().map(|&d| d as usize).product();
        for mut code in 0..total {
            let mut profile = vec![0u32; p.agents];
            for a in (0..p.agents).rev() {
                let d = counts[qi][a] as usize;
                profile[a] = (code % d) as u32 + 1;
                code /= d;
            }
            let target = locs[rng.random_range(0..n)];
            b.transition(q, &profile, target);
        }
    }
    let m0: Vec<u64> = (0..r).map(|_| rng.random_range(p.max_m0.min(1)..=p.max_m0)).collect();
    let default: Vec<i64> = (0..r).map(|_| rng.random_range(1..=2)).collect();
    let mut entries: HashMap<(LocationId, AgentId), HashMap<Vec<Amount>, Vec<i64>>> = HashMap::new();
    for _ in 0..rng.random_range(0..=4) {
        let q = locs[rng.random_range(0..n)];
        let a = AgentId(rng.random_range(0..p.agents));
        let m: Vec<Amount> = m0.iter().map(|&x| Amount::finite(rng.random_range(0..=x))).collect();
        let price: Vec<i64> = (0..r).map(|_| rng.random_range(0..=3)).collect();
        entries.entry((q, a)).or_default().insert(m, price);
    }
    b.initial(locs[0]).m0(Availability::finite(&m0)).price(PriceFunction::Table { entries, default });
    b.build().expect("generated structure is well-formed")
}

fn random_money(rng: &mut impl Rng, p: &GenParams) -> MoneyVector {
    MoneyVector(
        (0..p.agents)
            .map(|_| {
                if rng.random_bool(p.inf_budget) {
                    Amount::INF
                } else {
                    Amount::finite(rng.random_range(0..=p.max_budget))
                }
            })
            .collect(),
    )
}

fn random_team(rng: &mut impl Rng, p: &GenParams) -> Vec<AgentId> {
    (0..p.agents).filter(|_| rng.random_bool(0.7)).map(AgentId).collect()
}

/// A random formula with at most `depth` nested team operators.
pub fn random_formula(rng: &mut impl Rng, game: &PricedGameStructure, p: &GenParams, depth: usize) -> Formula {
    let r = game.resource_count();
    let leaf = |rng: &mut dyn rand::RngCore| -> Formula {
        match rng.random_range(0..6) {
            0 => Formula::True,
            1 => {
                let rel = Relation::ALL[rng.random_range(0..5)];
                let v: Vec<u64> = (0..r).map(|_| rng.random_range(0..=p.max_m0)).collect();
                Formula::Market(rel, Availability::finite(&v))
            }
            _ => Formula::atom(p.props[rng.random_range(0..p.props.len())].clone()),
        }
    };
    let choice = if depth == 0 { rng.random_range(0..3) } else { rng.random_range(0..9) };
    match choice {
        0 | 1 => leaf(rng),
        2 => Formula::not(random_formula(rng, game, p, 0)),
        3 => Formula::and(random_formula(rng, game, p, depth.min(1)), random_formula(rng, game, p, depth.saturating_sub(1))),
        4 => Formula::not(random_formula(rng, game, p, depth)),
        5 | 6 => {
            let op = TeamOp::new(random_team(rng, p), random_money(rng, p));
            let a = random_formula(rng, game, p, depth - 1);
            let b = random_formula(rng, game, p, depth - 1);
            Formula::until(op, a, b)
        }
        7 => {
            let op = TeamOp::new(random_team(rng, p), random_money(rng, p));
            Formula::next(op, random_formula(rng, game, p, depth - 1))
        }
        _ => {
            let op = TeamOp::new(random_team(rng, p), random_money(rng, p));
            Formula::globally(op, random_formula(rng, game, p, depth - 1))
        }
    }
}

/// `f` with every money entry replaced by an unbounded one.
pub fn unbounded_money(f: &Formula) -> Formula {
    let lift = |op: &TeamOp| TeamOp::new(op.team.clone(), MoneyVector(vec![Amount::INF; op.money.len()]));
    match f {
        Formula::True | Formula::Atom(_) | Formula::Market(..) => f.clone(),
        Formula::Not(a) => Formula::not(unbounded_money(a)),
        Formula::And(a, b) => Formula::and(unbounded_money(a), unbounded_money(b)),
        Formula::Next(op, a) => Formula::next(lift(op), unbounded_money(a)),
        Formula::Until(op, a, b) => Formula::until(lift(op), unbounded_money(a), unbounded_money(b)),
        Formula::Globally(op, a) => Formula::globally(lift(op), unbounded_money(a)),
    }
}

/// The `seed`-th instance of the differential suite.
pub fn random_instance(seed: u64, p: &GenParams) -> (PricedGameStructure, Formula) {
    let mut rng = rng(seed);
    let g = random_game(&mut rng, p);
    let depth = rng.random_range(1..=p.max_depth);
    let f = random_formula(&mut rng, &g, p, depth);
    (g, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_valid_and_deterministic() {
        let p = GenParams::default();
        for seed in 0..50 {
            let (g, f) = random_instance(seed, &p);
            assert!(g.validate().is_ok(), "{}", g.validate());
            assert!(g.locations().len() <= 5);
            assert!(f.temporal_depth() <= 2);
            let (g2, f2) = random_instance(seed, &p);
            assert_eq!(g.to_json(), g2.to_json());
            assert_eq!(f, f2);
        }
    }
}
