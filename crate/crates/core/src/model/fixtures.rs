//! Small hand-written structures shared by tests, benches and the CLI samples.

use super::{AgentId, Availability, GameBuilder, PriceFunction, PricedGameStructure};

/// The two-agent, one-resource structure with locations `q0..q4` where `p`
/// holds at `q0`, `q1`, `q2`. Agent `a1` may consume one unit at `q0` to move
/// to `q1`; agent `a2` may consume one unit at `q1` to escape to `q3`.
pub fn escape_game(m0: u64) -> PricedGameStructure {
    escape_with_props(m0, &[])
}

/// [`escape_game`] with extra propositions attached to `q3`.
pub fn escape_with_props(m0: u64, q3_props: &[&str]) -> PricedGameStructure {
    let (a1, a2) = (AgentId(0), AgentId(1));
    let mut b = GameBuilder::new(["a1", "a2"], ["R1"]);
    let q0 = b.location("q0", ["p"]);
    let q1 = b.location("q1", ["p"]);
    let q2 = b.location("q2", ["p"]);
    let q3 = b.location("q3", q3_props.iter().copied());
    let q4 = b.location("q4", Vec::<String>::new());
    b.actions(q0, a1, vec![vec![0], vec![-1]]);
    b.actions(q1, a2, vec![vec![0], vec![-1]]);
    b.transition(q0, &[1, 1], q4).transition(q0, &[2, 1], q1);
    b.transition(q1, &[1, 1], q2).transition(q1, &[1, 2], q3);
    b.transition(q2, &[1, 1], q2);
    b.transition(q3, &[1, 1], q3);
    b.transition(q4, &[1, 1], q3);
    b.initial(q0).m0(Availability::finite(&[m0])).price(PriceFunction::zero(1));
    b.build().expect("fixture is well-formed")
}
