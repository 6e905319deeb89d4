mod common;

use prbatl::lbatm::{accepts_tape, parse_machine, LbatmError, Symbol, Tape};
use prbatl::reduction::gadgets::{self, digit_workbench, Gadget};
use prbatl::reduction::hier::{Endpoint, Module};
use prbatl::reduction::simulate::{availability, port_of, valuation};
use prbatl::reduction::*;
use prbatl::{Checker, Configuration};

fn tape(s: &str) -> (Tape, usize) {
    let (t, h) = Tape::parse(s).unwrap();
    (t, h.unwrap_or(1))
}

/// Nodes of a module with every instance expanded, counted off the
/// description rather than the flattener.
fn expanded_size(h: &HierarchicalGame, module: &str) -> usize {
    let m = h.module(module).unwrap();
    m.nodes.len() + m.uses.iter().map(|u| expanded_size(h, &u.module)).sum::<usize>()
}

fn run(h: &HierarchicalGame, g: &Gadget, args: &[&str], values: &[(&str, u64)]) -> SimOutcome {
    let before = balanced(h, values);
    let out = simulate_module(h, &g.module.name, args, &before).unwrap_or_else(|e| panic!("{}{args:?} {values:?}: {e}", g.module.name));
    let owned: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    g.contract.verify(h, &owned, &before, &out).unwrap_or_else(|e| panic!("{values:?}: {e}"));
    out
}

#[test]
fn single_node_module_flattens_to_one_location() {
    let h = parse_hierarchical("max 1\nmain m\nmodule m() {\n nodes a\n entry a\n exit a\n}\n").unwrap();
    let f = flatten(&h).unwrap();
    assert_eq!(f.game.locations().len(), 1);
    let q = f.game.initial();
    assert_eq!(f.game.profile_count(q), 1);
    assert_eq!(f.game.transition(q, &[1, 1]).unwrap(), Some(q));
}

#[test]
fn times_10_flattens_to_its_expanded_size() {
    let h = digit_workbench(324);
    let top = instance(&h, "times_10", &["muL"]).unwrap();
    let f = flatten(&top).unwrap();
    assert_eq!(f.game.locations().len(), expanded_size(&h, "times_10"));
    assert_eq!(f.game.locations().len(), 17);
    assert_eq!(f.game.agent_count(), 2);
}

#[test]
fn times_10_of_5() {
    let h = digit_workbench(324);
    let out = run(&h, &gadgets::times_10(), &["muL"], &[("muL", 5)]);
    assert_eq!(out.valuation["muL"], 50);
    assert_eq!(out.valuation["i"], 0);
    for x in gadgets::DIGIT_PAIRS {
        assert_eq!(out.valuation[x] + out.valuation[&format!("~{x}")], 324);
    }
}

#[test]
fn to_zero_on_zero_does_not_loop() {
    let h = digit_workbench(324);
    let out = run(&h, &gadgets::to_zero(), &["muL"], &[("muL", 0)]);
    assert_eq!(out.valuation["muL"], 0);
    assert_eq!(out.valuation["~muL"], 324);
    assert_eq!(out.steps, 2);
}

#[test]
fn add_on_the_worked_example() {
    let h = digit_workbench(max_value(12).unwrap());
    let out = run(&h, &gadgets::add(), &["muL", "mu"], &[("muL", 30112), ("mu", 1)]);
    assert_eq!((out.valuation["muL"], out.valuation["mu"]), (30113, 1));
}

#[test]
fn arithmetic_contracts_on_a_grid() {
    let h = digit_workbench(3224);
    for v in 0..=60 {
        for junk in [0, 7] {
            let base = [("muL", v), ("i", junk), ("r", junk), ("t", junk)];
            run(&h, &gadgets::to_zero(), &["muL"], &base);
            run(&h, &gadgets::times_10(), &["muL"], &base);
            run(&h, &gadgets::div_10(), &["muR"], &[("muR", v), ("i", junk), ("r", junk), ("t", junk)]);
            for w in [0, 1, 13, 60] {
                run(&h, &gadgets::add(), &["muL", "mu"], &[("muL", v), ("mu", w), ("i", junk), ("t", junk)]);
                run(&h, &gadgets::assign(), &["muL", "muR", "t"], &[("muL", w), ("muR", v), ("t", junk)]);
            }
        }
    }
}

#[test]
fn div_10_keeps_the_remainder() {
    let h = digit_workbench(3224);
    for v in [9, 10, 19, 99, 100, 3224] {
        let out = run(&h, &gadgets::div_10(), &["muR"], &[("muR", v)]);
        assert_eq!((out.valuation["muR"], out.valuation["r"]), (v / 10, v % 10));
    }
}

#[test]
fn contracts_on_the_worked_triple() {
    let h = digit_workbench(max_value(12).unwrap());
    let (l, c, r) = (30112, 1, 400201);
    for x in [l, c, r] {
        run(&h, &gadgets::to_zero(), &["muL"], &[("muL", x)]);
        run(&h, &gadgets::times_10(), &["muL"], &[("muL", x)]);
        run(&h, &gadgets::div_10(), &["muR"], &[("muR", x)]);
        run(&h, &gadgets::assign(), &["mu", "muR", "t"], &[("muR", x)]);
    }
    run(&h, &gadgets::add(), &["muL", "mu"], &[("muL", l), ("mu", c)]);
    let out = run(&h, &gadgets::shift_right(), &[], &[("muL", l), ("mu", c), ("muR", r)]);
    assert_eq!((out.valuation["muL"], out.valuation["mu"], out.valuation["muR"]), (301121, 1, 40020));
}

#[test]
fn choose_next_state_leaves_by_the_value() {
    let h = digit_workbench(34);
    for x in 0..=4 {
        let out = run(&h, &gadgets::choose_next_state(), &["mu"], &[("mu", x)]);
        assert_eq!(out.port, x as usize);
    }
}

#[test]
fn write_gadgets_move_between_digits() {
    let h = digit_workbench(34);
    for diff in -2i64..=2 {
        for from in Symbol::INNER {
            let to = from.digit() as i64 + diff;
            if (0..=2).contains(&to) {
                let out = run(&h, &gadgets::write(diff), &["mu"], &[("mu", from.digit())]);
                assert_eq!(out.valuation["mu"], to as u64);
            }
        }
    }
}

/// Head moves checked against re-encoding the tape with the head moved.
#[test]
fn digit_shifts_match_the_encoding() {
    for len in 2..=5 {
        let h = digit_workbench(max_value(len).unwrap());
        for t in Tape::all_of_length(len) {
            for head in 0..len {
                let (l, c, r) = encode_tape(&t, head).unwrap();
                let vals = [("muL", l), ("mu", c), ("muR", r)];
                let moves = [(gadgets::shift_right(), head + 1 < len, head + 1), (gadgets::shift_left(), head > 0, head.wrapping_sub(1))];
                for (g, ok, next) in moves {
                    if !ok {
                        continue;
                    }
                    let out = run(&h, &g, &[], &vals);
                    let want = encode_tape(&t, next).unwrap();
                    assert_eq!((out.valuation["muL"], out.valuation["mu"], out.valuation["muR"]), want);
                    assert_eq!(out.port as u64, want.1);
                }
            }
        }
    }
}

#[test]
fn unary_shifts_move_every_cell() {
    let len = 4;
    let mut h = HierarchicalGame::new(compile::UNARY_MAX, "shift_right");
    let vars = gadgets::cell_vars(len);
    let mut pairs: Vec<&str> = vars.iter().map(String::as_str).collect();
    pairs.push("t");
    h.pair(&pairs);
    for g in gadgets::common_library() {
        h.add(g.module);
    }
    let right = gadgets::unary_shift(true, len);
    let left = gadgets::unary_shift(false, len);
    h.add(right.module.clone()).add(left.module.clone());
    let values: Vec<(&str, u64)> = vars.iter().enumerate().map(|(k, v)| (v.as_str(), (k as u64 * 3) % 5)).collect();
    let out = run(&h, &right, &[], &values);
    assert_eq!(out.valuation["mu"], out.port as u64);
    let out = run(&h, &left, &[], &values);
    assert_eq!(out.valuation["mu"], out.port as u64);
}

#[test]
fn flat_simulation_matches_the_hierarchy() {
    let h = digit_workbench(324);
    let cases: Vec<(Gadget, Vec<&str>)> = vec![
        (gadgets::to_zero(), vec!["muL"]),
        (gadgets::assign(), vec!["muL", "muR", "t"]),
        (gadgets::times_10(), vec!["muL"]),
        (gadgets::add(), vec!["muL", "mu"]),
        (gadgets::div_10(), vec!["muR"]),
        (gadgets::choose_next_state(), vec!["mu"]),
        (gadgets::shift_right(), vec![]),
        (gadgets::shift_left(), vec![]),
    ];
    for (g, args) in cases {
        let top = instance(&h, &g.module.name, &args).unwrap();
        let f = flatten(&top).unwrap();
        for (a, b, c) in [(0, 0, 0), (3, 1, 4), (12, 2, 31), (30, 4, 24)] {
            let before = balanced(&h, &[("muL", a), ("mu", b), ("muR", c), ("i", 5)]);
            let hier = simulate_module(&h, &g.module.name, &args, &before).unwrap();
            let start = Configuration::new(f.game.initial(), availability(&f, &before).unwrap());
            let (end, _) = simulate_flat(&f, &start).unwrap();
            assert_eq!(valuation(&f, &end.avail), hier.valuation, "{}", g.module.name);
            assert_eq!(port_of(&f, end.location), Some(hier.port), "{}", g.module.name);
        }
    }
}

#[test]
fn ambiguous_and_stuck_modules_are_reported() {
    let h = parse_hierarchical(
        "max 4\npair x\nmain m\nmodule m() {\n nodes a b c\n entry a\n exit c\n a -> b : -1 x, +1 ~x\n a -> c : -1 x, +1 ~x\n}\n",
    )
    .unwrap();
    let e = simulate_module(&h, "m", &[], &balanced(&h, &[("x", 2)])).unwrap_err();
    assert!(matches!(e, ReductionError::Nondeterministic { count: 2, .. }));
    let e = simulate_module(&h, "m", &[], &balanced(&h, &[("x", 0)])).unwrap_err();
    assert!(matches!(e, ReductionError::Stuck(_)));
}

#[test]
fn malformed_hierarchies_are_rejected() {
    let cyclic = "max 1\nmain a\nmodule a() {\n use k = b()\n entry k\n exit k.0\n}\nmodule b() {\n use k = a()\n entry k\n exit k.0\n}\n";
    assert!(matches!(flatten(&parse_hierarchical(cyclic).unwrap()), Err(ReductionError::Cycle(_))));
    let unbound = "max 1\nmain a\nmodule a() {\n nodes n\n entry n\n exit n\n n -> n : +1 y\n}\n";
    assert!(matches!(flatten(&parse_hierarchical(unbound).unwrap()), Err(ReductionError::Unbound { .. })));
    let mut h = digit_workbench(34);
    let mut m = Module::new("bad", &[]);
    m.using("z", "to_zero", &[]).entry(Endpoint::child("z")).exit(Endpoint::port("z", 0));
    h.add(m);
    h.main = "bad".into();
    assert!(matches!(flatten(&h), Err(ReductionError::Arity { expected: 1, found: 0, .. })));
}

#[test]
fn digit_compilation_shape() {
    let m = parse_machine("states: q*!\n").unwrap();
    let (t, _) = tape("[1]");
    let c = compile_digit(&m, &t, CompileOptions::default()).unwrap();
    let g = c.game();
    assert_eq!(c.max, 324);
    assert_eq!(g.agent_count(), 2);
    assert_eq!(g.resource_count(), 15);
    let m0 = g.m0().entries();
    for (k, name) in g.resources().iter().enumerate() {
        let want = match name.as_str() {
            "lv" => 3,
            "hv" => 1,
            "rv" => 4,
            _ => 324,
        };
        assert_eq!(m0[k].raw(), want, "{name}");
    }
    assert_eq!(*g.price_function(), prbatl::model::PriceFunction::zero(15));
}

#[test]
fn unary_compilation_shape() {
    let m = parse_machine("states: q*!\n").unwrap();
    for len in 2..=6 {
        let t = Tape::all_of_length(len).pop().unwrap();
        let c = compile_unary(&m, &t, CompileOptions::default()).unwrap();
        assert_eq!(c.tape_vars.len(), 2 * len + 1);
        assert_eq!(c.game().resource_count(), 2 * (2 * len + 2));
        assert!(c.game().m0().entries().iter().all(|a| a.raw() == compile::UNARY_MAX));
    }
}

#[test]
fn universal_dead_end_start_is_labelled() {
    let m = parse_machine("states: q*!\n").unwrap();
    let (t, _) = tape("[1]");
    for mode in [Mode::Digit, Mode::Unary] {
        let c = compile(&m, &t, mode, CompileOptions::default()).unwrap();
        let q = c.flat.location("q_1").unwrap();
        assert!(c.game().location(q).props.contains("p"));
        assert!(Checker::new(c.game()).check(&c.formula).unwrap());
    }
}

#[test]
fn literal_labelling_needs_normal_form() {
    let m = parse_machine("states: q*\n").unwrap();
    let (t, _) = tape("[1]");
    let e = compile_digit(&m, &t, CompileOptions::default()).unwrap_err();
    assert!(matches!(e, ReductionError::Machine(LbatmError::NormalForm { .. })));
    let c = compile_digit(&m, &t, CompileOptions { labelling: Labelling::Universal }).unwrap();
    assert!(!Checker::new(c.game()).check(&c.formula).unwrap());
}

#[test]
fn non_halting_machines_are_rejected() {
    let m = parse_machine("states: q*\nq , 1 -> q , 1 , R\nq , ] -> q , ] , L\n").unwrap();
    let (t, _) = tape("[1]");
    let e = compile_unary(&m, &t, CompileOptions { labelling: Labelling::Universal }).unwrap_err();
    assert!(matches!(e, ReductionError::Machine(LbatmError::Cycle(_))));
}

/// Machines in normal form under the literal labelling, on 5-cell tapes
/// as well.
#[test]
fn literal_labelling_on_normal_form_machines() {
    for (name, m) in common::corpus() {
        for t in (2..=5).flat_map(Tape::all_of_length) {
            let Ok(c) = compile_unary(&m, &t, CompileOptions::default()) else { continue };
            let ch = Checker::new(c.game());
            assert_eq!(ch.check(&c.formula).unwrap(), accepts_tape(&m, &t).unwrap(), "{name} {t}");
            check_invariants(&c, ch.space()).unwrap();
        }
    }
}

#[test]
fn hierarchy_text_round_trips() {
    let m = parse_machine("states: a* b!\na , 1 -> b , 2 , R\n").unwrap();
    let (t, _) = tape("[1B]");
    let c = compile_digit(&m, &t, CompileOptions::default()).unwrap();
    let text = c.hierarchy.render();
    let back = parse_hierarchical(&text).unwrap();
    assert_eq!(back.render(), text);
    assert_eq!(flatten(&back).unwrap().game.to_json(), c.flat.game.to_json());
}
