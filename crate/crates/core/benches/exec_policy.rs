//! Sequential against data-parallel labelling on a wide and a deep workload.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use prbatl::formula::{parse_formula, Signature};
use prbatl::lbatm::{parse_machine, Tape};
use prbatl::model::{AgentId, Availability, GameBuilder, PriceFunction, PricedGameStructure};
use prbatl::reduction::{compile, CompileOptions, Labelling, Mode};
use prbatl::{Checker, ExecPolicy, Formula};

/// Two agents draining three resources; every point of the cube is
/// reachable, so BFS levels are wide.
fn grid(m0: u64) -> PricedGameStructure {
    let (a1, a2) = (AgentId(0), AgentId(1));
    let mut b = GameBuilder::new(["a1", "a2"], ["x", "y", "z"]);
    let q0 = b.location("q0", ["p"]);
    let q1 = b.location("q1", Vec::<String>::new());
    for q in [q0, q1] {
        b.actions(q, a1, vec![vec![0, 0, 0], vec![-1, 0, 0], vec![0, -1, 0], vec![1, 1, -1]]);
        b.actions(q, a2, vec![vec![0, 0, 0], vec![0, 0, -1], vec![-1, 1, 0]]);
        for i in 1..=4 {
            for j in 1..=3 {
                let to = if (i + j) % 2 == 0 { q0 } else { q1 };
                b.transition(q, &[i, j], to);
            }
        }
    }
    b.initial(q0).m0(Availability::finite(&[m0, m0, m0])).price(PriceFunction::unit(3));
    b.build().expect("well-formed")
}

fn workloads() -> Vec<(&'static str, PricedGameStructure, Formula)> {
    let g = grid(20);
    let f = parse_formula("<<a1:[40,40]>> [p U avail <= [5,5,5]] & <<a2:[inf,inf]>> G !(avail = [0,0,0])", &Signature::of(&g))
        .expect("formula parses");
    let m = parse_machine(include_str!("../tests/data/machines/fork_checks.atm")).expect("machine parses");
    let (tape, _) = Tape::parse("[1B1]").expect("tape parses");
    let c = compile(&m, &tape, Mode::Digit, CompileOptions { labelling: Labelling::Universal }).expect("compiles");
    vec![("grid", g, f), ("compiled_digit", c.game().clone(), c.formula.clone())]
}

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("label");
    group.sample_size(10);
    for (name, g, f) in workloads() {
        for (policy, tag) in [(ExecPolicy::Sequential, "sequential"), (ExecPolicy::Parallel, "parallel")] {
            group.bench_with_input(BenchmarkId::new(name, tag), &(g.clone(), f.clone()), |b, (g, f)| {
                b.iter(|| Checker::with_policy(g, policy).check(f).expect("checks"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
