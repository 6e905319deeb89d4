use super::*;
use crate::formula::{parse_formula, Signature};
use crate::model::fixtures::escape_game;
use crate::model::{AgentId, Amount, Availability, GameBuilder, LocationId, MoneyVector, PriceFunction};

fn cfg(q: usize, m: u64) -> Configuration {
    Configuration::new(LocationId(q), Availability::finite(&[m]))
}

fn psi(g: &PricedGameStructure) -> Formula {
    parse_formula("<<a1,a2:[5,5]>> X <<a1:[3,0]>> G p", &Signature::of(g)).unwrap()
}

fn op(team: &[usize], money: &[u64]) -> TeamOp {
    TeamOp::new(team.iter().map(|&a| AgentId(a)), MoneyVector::finite(money))
}

fn p_configs(g: &PricedGameStructure) -> Vec<Configuration> {
    g.reachable().into_iter().filter(|c| g.location(c.location).props.contains("p")).collect()
}

#[test]
fn golden_verdicts() {
    assert!(check(&escape_game(1), &psi(&escape_game(1))).unwrap());
    assert!(!check(&escape_game(2), &psi(&escape_game(2))).unwrap());
    assert!(!check(&escape_game(0), &psi(&escape_game(0))).unwrap());
}

#[test]
fn golden_labels() {
    let g = escape_game(1);
    let lab = label(&g, &psi(&g)).unwrap();
    let root = lab.table().root();
    assert_eq!(lab.holds(root, &cfg(0, 1)), Some(true));
    let not_p = parse_formula("!p", &Signature::of(&g)).unwrap();
    let lab = label(&g, &not_p).unwrap();
    assert_eq!(lab.holds_formula(&not_p, &cfg(3, 1)), Some(true));
    assert_eq!(lab.holds_formula(&not_p, &cfg(4, 1)), Some(true));
    assert_eq!(lab.holds_formula(&not_p, &cfg(0, 1)), Some(false));
}

#[test]
fn safe_moves_examples() {
    let g = escape_game(1);
    let ch = Checker::new(&g);
    let a1 = op(&[0], &[5, 5]);
    let mv = ch.safe_moves(&cfg(0, 1), &a1, &[0]).unwrap();
    assert_eq!(mv.len(), 2);

    // ⟨q0, 0⟩ is reachable only when m0 = 0.
    let g0 = escape_game(0);
    let mv = Checker::new(&g0).safe_moves(&cfg(0, 0), &a1, &[0]).unwrap();
    assert_eq!(mv, vec![TeamChoice::new([(AgentId(0), 1)])]);

    let gu = escape_game(1).with_price(PriceFunction::unit(1));
    let zero_budget = op(&[0], &[0, 0]);
    let mv = Checker::new(&gu).safe_moves(&cfg(0, 1), &zero_budget, &[0]).unwrap();
    assert_eq!(mv, vec![TeamChoice::new([(AgentId(0), 1)])]);
}

#[test]
fn solve_next_examples() {
    let g = escape_game(1);
    let ch = Checker::new(&g);
    let all = g.reachable();
    let r = ch.solve_next(&op(&[0, 1], &[1, 1]), &[cfg(1, 0)]).unwrap();
    assert!(r.contains(&cfg(0, 1)));
    let r = ch.solve_next(&op(&[0, 1], &[1, 1]), &all).unwrap();
    assert_eq!(r.len(), all.len());
    let r = ch.solve_next(&op(&[0], &[1, 1]), &[cfg(4, 1)]).unwrap();
    assert!(r.contains(&cfg(0, 1)));
}

#[test]
fn solve_until_examples() {
    let g = escape_game(1);
    let ch = Checker::new(&g);
    let all = g.reachable();
    let a1 = op(&[0], &[1, 1]);
    for c in &all {
        assert!(ch.solve_until(&a1, &[], std::slice::from_ref(c)).unwrap().contains(c));
    }
    let q2: Vec<Configuration> = all.iter().filter(|c| c.location == LocationId(2)).cloned().collect();
    let r = ch.solve_until(&a1, &p_configs(&g), &q2).unwrap();
    assert!(r.contains(&cfg(0, 1)));
    assert!(ch.solve_until(&a1, &all, &[]).unwrap().is_empty());
}

#[test]
fn solve_globally_examples() {
    let g = escape_game(1);
    let ch = Checker::new(&g);
    let a1 = op(&[0], &[1, 1]);
    let r = ch.solve_globally(&a1, &p_configs(&g)).unwrap();
    assert!(r.contains(&cfg(1, 0)));
    let g2 = escape_game(2);
    let r = Checker::new(&g2).solve_globally(&a1, &p_configs(&g2)).unwrap();
    assert!(!r.contains(&cfg(1, 1)));
    let all = g.reachable();
    assert_eq!(ch.solve_globally(&a1, &all).unwrap().len(), all.len());
}

#[test]
fn trivial_formulas() {
    let g = escape_game(1);
    assert!(check(&g, &Formula::True).unwrap());
    let mut b = GameBuilder::new(["a"], ["r"]);
    let q = b.location("q", ["p"]);
    b.transition(q, &[1], q);
    let single = b.build().unwrap();
    let empty_team = TeamOp::new([], MoneyVector::finite(&[0]));
    assert!(check(&single, &Formula::globally(empty_team.clone(), Formula::atom("p"))).unwrap());
    assert!(oracle_check(&single, &Formula::globally(empty_team, Formula::atom("p"))).unwrap());
    let all = TeamOp::new([AgentId(0)], MoneyVector(vec![Amount::INF]));
    let ev = Formula::eventually(all, Formula::atom("z"));
    assert!(!check(&single, &ev).unwrap());
    assert!(!oracle_check(&single, &ev).unwrap());
}

#[test]
fn oracle_agrees_on_examples() {
    for m0 in 0..3 {
        let g = escape_game(m0);
        let f = psi(&g);
        assert_eq!(check(&g, &f).unwrap(), oracle_check(&g, &f).unwrap());
    }
}

#[test]
fn witnesses() {
    let g = escape_game(1);
    let f = psi(&g);
    let w = witness(&g, &f).unwrap().unwrap();
    assert_eq!(w.entries.len(), 1);
    assert_eq!(w.entries[0].1, TeamChoice::new([(AgentId(0), 2), (AgentId(1), 1)]));
    validate_witness(&g, &f, &w).unwrap();

    assert!(witness(&escape_game(2), &f).unwrap().is_none());
    assert!(witness(&g, &Formula::atom("p")).unwrap().unwrap().is_empty());

    let sig = Signature::of(&g);
    let f = parse_formula("<<a1,a2:[inf,inf]>> F !p", &sig).unwrap();
    let w = witness(&g, &f).unwrap().unwrap();
    validate_witness(&g, &f, &w).unwrap();
    assert!(!w.entries.is_empty());

    let f = parse_formula("<<a1:[inf,inf]>> G p", &sig).unwrap();
    let w = witness(&g, &f).unwrap().unwrap();
    validate_witness(&g, &f, &w).unwrap();
    assert!(w.entries.len() >= 3);
    let f = parse_formula("<<a1:[inf,inf]>> [p U !p]", &sig).unwrap();
    if let Some(w) = witness(&g, &f).unwrap() {
        validate_witness(&g, &f, &w).unwrap();
    }
}

#[test]
fn tampered_witness_is_rejected() {
    let g = escape_game(1);
    let f = psi(&g);
    let mut w = witness(&g, &f).unwrap().unwrap();
    w.entries[0].1 = TeamChoice::new([(AgentId(0), 1), (AgentId(1), 1)]);
    assert!(validate_witness(&g, &f, &w).is_err());
}

#[test]
fn arity_errors() {
    let g = escape_game(1);
    let f = Formula::Market(crate::formula::Relation::Eq, Availability::finite(&[1, 1]));
    assert!(matches!(check(&g, &f), Err(CheckError::MarketArity { .. })));
    let f = Formula::next(op(&[3], &[1, 1, 1, 1]), Formula::True);
    assert!(matches!(check(&g, &f), Err(CheckError::UnknownAgent { .. })));
}

#[test]
fn policies_agree_on_escape_game() {
    let g = escape_game(2);
    let f = psi(&g);
    let a = Checker::with_policy(&g, ExecPolicy::Sequential).label(&f).unwrap();
    let b = Checker::with_policy(&g, ExecPolicy::Parallel).label(&f).unwrap();
    for n in 0..a.table().len() {
        assert_eq!(a.set(n), b.set(n));
    }
}
