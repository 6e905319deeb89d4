use prbatl::checker::oracle::{opponent_attractor, oracle_label, oracle_label_with_limit};
use prbatl::checker::Checker;
use prbatl::formula::{Formula, TeamOp};
use prbatl::gen::{random_game, random_instance, rng, unbounded_money, GenParams};
use prbatl::model::{AgentId, Amount, MoneyVector, PriceFunction};
use prbatl::{check, ExecPolicy};
use rand::Rng;

#[test]
fn checker_matches_oracle_on_random_instances() {
    let p = GenParams::default();
    let mut temporal = 0;
    for seed in 0..600 {
        let (g, f) = random_instance(seed, &p);
        let lab = Checker::new(&g).label(&f).unwrap();
        let oracle = oracle_label(&g, &f).unwrap();
        for (c, &v) in &oracle {
            assert_eq!(lab.holds_formula(&f, c), Some(v), "seed {seed} at {c:?}");
        }
        temporal += usize::from(f.temporal_depth() > 0);
    }
    assert!(temporal > 300);
}

/// Random instances rarely depend on money, so this batch keeps only those
/// whose labelling changes when budgets are lifted.
#[test]
fn checker_matches_oracle_where_budgets_bind() {
    let p = GenParams::default();
    let mut found = 0;
    let mut seed = 100_000;
    while found < 150 && seed < 140_000 {
        let (g, f) = random_instance(seed, &p);
        seed += 1;
        let ch = Checker::new(&g);
        let lab = ch.label(&f).unwrap();
        let free = ch.label(&unbounded_money(&f)).unwrap();
        if lab.set(lab.table().root()) == free.set(free.table().root()) {
            continue;
        }
        found += 1;
        for (c, v) in oracle_label(&g, &f).unwrap() {
            assert_eq!(lab.holds_formula(&f, &c), Some(v), "seed {} at {c:?}", seed - 1);
        }
    }
    assert_eq!(found, 150);
}

#[test]
fn sequential_and_parallel_agree() {
    let p = GenParams::default();
    for seed in 1000..1100 {
        let (g, f) = random_instance(seed, &p);
        let a = Checker::with_policy(&g, ExecPolicy::Sequential).check(&f).unwrap();
        let b = Checker::with_policy(&g, ExecPolicy::Parallel).check(&f).unwrap();
        assert_eq!(a, b, "seed {seed}");
    }
}

fn random_op(r: &mut impl Rng, agents: usize) -> TeamOp {
    let team: Vec<AgentId> = (0..agents).filter(|_| r.random_bool(0.5)).map(AgentId).collect();
    let money = (0..agents).map(|_| Amount::finite(r.random_range(0..=4))).collect();
    TeamOp::new(team, MoneyVector(money))
}

#[test]
fn globally_is_dual_to_opponent_attractor() {
    let p = GenParams::default();
    let mut r = rng(7);
    for _ in 0..150 {
        let g = random_game(&mut r, &p);
        let op = random_op(&mut r, p.agents);
        let ch = Checker::new(&g);
        let set1: Vec<_> = g.reachable().into_iter().filter(|c| g.location(c.location).props.contains("p")).collect();
        let kept = ch.solve_globally(&op, &set1).unwrap();
        let att = opponent_attractor(&g, &op, &|c| set1.contains(c)).unwrap();
        for (c, forced_out) in att {
            assert_eq!(kept.contains(&c), !forced_out, "{c:?}");
        }
    }
}

#[test]
fn more_money_never_hurts() {
    let p = GenParams::default();
    let mut r = rng(11);
    for _ in 0..100 {
        let g = random_game(&mut r, &p);
        let op = random_op(&mut r, p.agents);
        let richer = TeamOp::new(
            op.team.clone(),
            MoneyVector(op.money.entries().iter().map(|m| Amount::finite(m.raw() + r.random_range(0..=3))).collect()),
        );
        let mut body = |op: TeamOp| match r.random_range(0..3) {
            0 => Formula::next(op, Formula::atom("p")),
            1 => Formula::until(op, Formula::atom("q"), Formula::atom("p")),
            _ => Formula::globally(op, Formula::atom("p")),
        };
        let poor_f = body(op);
        let rich_f = match &poor_f {
            Formula::Next(_, a) => Formula::Next(richer, a.clone()),
            Formula::Until(_, a, b) => Formula::Until(richer, a.clone(), b.clone()),
            Formula::Globally(_, a) => Formula::Globally(richer, a.clone()),
            _ => unreachable!(),
        };
        let ch = Checker::new(&g);
        let poor = ch.label(&poor_f).unwrap();
        let rich = ch.label(&rich_f).unwrap();
        let (pi, ri) = (poor.table().root(), rich.table().root());
        for (a, b) in poor.set(pi).iter().zip(rich.set(ri)) {
            assert!(!a || *b);
        }
    }
}

#[test]
fn prices_are_irrelevant_with_unbounded_budgets() {
    let p = GenParams { inf_budget: 1.0, ..GenParams::default() };
    for seed in 0..100 {
        let (g, f) = random_instance(seed, &p);
        let free = g.clone().with_price(PriceFunction::zero(g.resource_count()));
        assert_eq!(check(&g, &f).unwrap(), check(&free, &f).unwrap(), "seed {seed}");
    }
}

#[test]
fn oracle_limit_is_reported() {
    let p = GenParams::default();
    let (g, f) = random_instance(3, &p);
    let r = oracle_label_with_limit(&g, &f, 1);
    assert!(matches!(r, Err(prbatl::CheckError::OracleLimit { .. })));
}
