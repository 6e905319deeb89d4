//! The gadget library. Each gadget is a module plus the arithmetic contract
//! its forced run must satisfy.
//!
//! Digit gadgets use the global scratch resources `i`, `r` and `t`.

use std::fmt;
use std::sync::Arc;

use super::hier::{Coef, Endpoint, HierarchicalGame, Module, ResourceKind, Term};
use super::simulate::{SimOutcome, Valuation};

/// `+k x, -k ~x`.
pub fn bump(x: &str, k: i64) -> Vec<Term> {
    vec![Term::new(k, x), Term::bar(-k, x)]
}

fn n(s: &str) -> Endpoint {
    Endpoint::node(s)
}

fn c(s: &str) -> Endpoint {
    Endpoint::child(s)
}

/// Values the contract pins down after the run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expectation {
    pub set: Vec<(String, u64)>,
    pub port: Option<usize>,
}

type Effect = dyn Fn(&[String], &Valuation) -> Expectation + Send + Sync;

#[derive(Clone)]
pub struct GadgetContract {
    pub gadget: String,
    pub statement: String,
    /// Resources whose final value is unconstrained.
    pub scratch: Vec<String>,
    effect: Arc<Effect>,
}

impl fmt::Debug for GadgetContract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.gadget, self.statement)
    }
}

impl GadgetContract {
    fn new(
        gadget: &str,
        statement: &str,
        scratch: &[&str],
        effect: impl Fn(&[String], &Valuation) -> Expectation + Send + Sync + 'static,
    ) -> GadgetContract {
        GadgetContract {
            gadget: gadget.into(),
            statement: statement.into(),
            scratch: scratch.iter().map(|s| s.to_string()).collect(),
            effect: Arc::new(effect),
        }
    }

    pub fn expect(&self, args: &[String], before: &Valuation) -> Expectation {
        (self.effect)(args, before)
    }

    /// Checks a finished run: pinned values, untouched frame, the exit
    /// port, and `x + ~x = Max` for every pair.
    pub fn verify(&self, h: &HierarchicalGame, args: &[String], before: &Valuation, out: &SimOutcome) -> Result<(), String> {
        let exp = self.expect(args, before);
        if let Some(p) = exp.port {
            if p != out.port {
                return Err(format!("{}: left through port {} instead of {p}", self.gadget, out.port));
            }
        }
        let after = &out.valuation;
        for r in &h.resources {
            let x = &r.name;
            let got = after[x];
            if let Some((_, want)) = exp.set.iter().find(|(n, _)| n == x) {
                if got != *want {
                    return Err(format!("{}: {x} = {got}, expected {want}", self.gadget));
                }
            } else if !self.scratch.contains(x) && got != before[x] {
                return Err(format!("{}: {x} changed from {} to {got}", self.gadget, before[x]));
            }
            if r.kind == ResourceKind::Paired {
                let bar = after[&format!("~{x}")];
                if got + bar != h.max {
                    return Err(format!("{}: {x} + ~{x} = {} at exit", self.gadget, got + bar));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Gadget {
    pub module: Module,
    pub contract: GadgetContract,
}

fn get(v: &Valuation, x: &str) -> u64 {
    v.get(x).copied().unwrap_or(0)
}

fn set(pairs: &[(&str, u64)]) -> Vec<(String, u64)> {
    pairs.iter().map(|(n, v)| (n.to_string(), *v)).collect()
}

/// Drains `x`; the `-Max ~x` edge is enabled exactly when `x` is 0.
pub fn to_zero() -> Gadget {
    let mut m = Module::new("to_zero", &["x"]);
    m.nodes(&["loop", "out", "end"]).entry(n("loop")).exit(n("end"));
    m.edge(n("loop"), n("loop"), bump("x", -1))
        .edge(n("loop"), n("out"), vec![Term::max_bar(-1, "x")])
        .edge(n("out"), n("end"), vec![Term::max_bar(1, "x")]);
    let contract = GadgetContract::new("to_zero", "x := 0", &[], |a, _| Expectation { set: vec![(a[0].clone(), 0)], port: None });
    Gadget { module: m, contract }
}

/// `x1 := x2` through the temporary `tmp`, which ends at 0.
pub fn assign() -> Gadget {
    let mut m = Module::new("assign", &["x1", "x2", "tmp"]);
    m.using("z1", "to_zero", &["x1"]).using("z2", "to_zero", &["tmp"]);
    m.nodes(&["loop", "a", "b", "c", "d"]).entry(c("z1")).exit(n("d"));
    m.chain(&[c("z1"), c("z2"), n("loop")]);
    let mut fill = bump("x2", -1);
    fill.extend(bump("x1", 1));
    fill.extend(bump("tmp", 1));
    let mut back = bump("x2", 1);
    back.extend(bump("tmp", -1));
    m.edge(n("loop"), n("loop"), fill)
        .edge(n("loop"), n("a"), vec![Term::max_bar(-1, "x2")])
        .edge(n("a"), n("b"), vec![Term::max_bar(1, "x2")])
        .edge(n("b"), n("b"), back)
        .edge(n("b"), n("c"), vec![Term::max_bar(-1, "tmp")])
        .edge(n("c"), n("d"), vec![Term::max_bar(1, "tmp")]);
    let contract = GadgetContract::new("assign", "x1 := x2, x2 kept, tmp := 0", &[], |a, v| Expectation {
        set: vec![(a[0].clone(), get(v, &a[1])), (a[1].clone(), get(v, &a[1])), (a[2].clone(), 0)],
        port: None,
    });
    Gadget { module: m, contract }
}

pub fn times_10() -> Gadget {
    let mut m = Module::new("times_10", &["x"]);
    m.using("a", "assign", &["i", "x", "t"]).using("z", "to_zero", &["x"]);
    m.nodes(&["loop", "n1", "n2"]).entry(c("a")).exit(n("n2"));
    m.chain(&[c("a"), c("z"), n("loop")]);
    let mut body = bump("i", -1);
    body.extend(bump("x", 10));
    m.edge(n("loop"), n("loop"), body)
        .edge(n("loop"), n("n1"), vec![Term::max_bar(-1, "i")])
        .edge(n("n1"), n("n2"), vec![Term::max_bar(1, "i")]);
    let contract = GadgetContract::new("times_10", "x := 10 x", &["i", "t"], |a, v| Expectation {
        set: vec![(a[0].clone(), 10 * get(v, &a[0]))],
        port: None,
    });
    Gadget { module: m, contract }
}

pub fn add() -> Gadget {
    let mut m = Module::new("add", &["x", "y"]);
    m.using("a", "assign", &["t", "y", "i"]);
    m.nodes(&["loop", "n1", "n2"]).entry(c("a")).exit(n("n2"));
    m.chain(&[c("a"), n("loop")]);
    let mut body = bump("t", -1);
    body.extend(bump("x", 1));
    m.edge(n("loop"), n("loop"), body)
        .edge(n("loop"), n("n1"), vec![Term::max_bar(-1, "t")])
        .edge(n("n1"), n("n2"), vec![Term::max_bar(1, "t")]);
    let contract = GadgetContract::new("add", "x := x + y, y kept", &["i", "t"], |a, v| Expectation {
        set: vec![(a[0].clone(), get(v, &a[0]) + get(v, &a[1])), (a[1].clone(), get(v, &a[1]))],
        port: None,
    });
    Gadget { module: m, contract }
}

/// Quotient back into `x`, remainder into `r`. The `Max-9` guard fires
/// exactly when fewer than 10 units of `i` are left.
pub fn div_10() -> Gadget {
    let mut m = Module::new("div_10", &["x"]);
    m.using("zr", "to_zero", &["r"]).using("a", "assign", &["i", "x", "t"]).using("zx", "to_zero", &["x"]);
    m.nodes(&["loop", "n1", "n2", "n3", "n4"]).entry(c("zr")).exit(n("n4"));
    m.chain(&[c("zr"), c("a"), c("zx"), n("loop")]);
    let mut body = bump("i", -10);
    body.extend(bump("x", 1));
    let mut rem = bump("r", 1);
    rem.extend(bump("i", -1));
    let max_minus_9 = |sign: i64| Term { coef: Coef { max: sign, constant: -9 * sign }, var: "i".into(), partner: true };
    m.edge(n("loop"), n("loop"), body)
        .edge(n("loop"), n("n1"), vec![max_minus_9(-1)])
        .edge(n("n1"), n("n2"), vec![max_minus_9(1)])
        .edge(n("n2"), n("n2"), rem)
        .edge(n("n2"), n("n3"), vec![Term::max_bar(-1, "i")])
        .edge(n("n3"), n("n4"), vec![Term::max_bar(1, "i")]);
    let contract = GadgetContract::new("div_10", "x := x / 10, r := x mod 10", &["i", "t"], |a, v| {
        let x = get(v, &a[0]);
        Expectation { set: vec![(a[0].clone(), x / 10), ("r".into(), x % 10)], port: None }
    });
    Gadget { module: m, contract }
}

/// Leaves through port `x` (for `x <= 4`) with `x` restored.
pub fn choose_next_state() -> Gadget {
    let mut m = Module::new("choose_next_state", &["x"]);
    m.nodes(&["a", "b", "e", "c", "d", "f", "g", "g1", "g2", "h", "h1", "h2", "k", "f2", "g3", "h3", "k2"]);
    m.entry(n("a"));
    let lo = || vec![Term::max_bar(-1, "x")];
    let hi = || vec![Term::max_bar(1, "x")];
    m.edge(n("a"), n("b"), lo())
        .edge(n("b"), n("e"), hi())
        .edge(n("a"), n("c"), bump("x", -1))
        .edge(n("c"), n("d"), lo())
        .edge(n("d"), n("f"), hi())
        .edge(n("c"), n("g"), bump("x", -1))
        .edge(n("g"), n("g1"), lo())
        .edge(n("g1"), n("g2"), hi())
        .edge(n("g"), n("h"), bump("x", -1))
        .edge(n("h"), n("h1"), lo())
        .edge(n("h1"), n("h2"), hi())
        .edge(n("h"), n("k"), bump("x", -1))
        // Put back what the tests consumed.
        .edge(n("f"), n("f2"), bump("x", 1))
        .edge(n("g2"), n("g3"), bump("x", 2))
        .edge(n("h2"), n("h3"), bump("x", 3))
        .edge(n("k"), n("k2"), bump("x", 4));
    for e in ["e", "f2", "g3", "h3", "k2"] {
        m.exit(n(e));
    }
    let contract = GadgetContract::new("choose_next_state", "exit port x, x kept", &[], |a, v| Expectation {
        set: vec![(a[0].clone(), get(v, &a[0]))],
        port: Some(get(v, &a[0]) as usize),
    });
    Gadget { module: m, contract }
}

/// `x := x + diff` for `diff` in `-2..=2`.
pub fn write(diff: i64) -> Gadget {
    let (name, statement) = match diff {
        0 => ("nop", "nothing"),
        1 => ("inc", "x := x + 1"),
        2 => ("double_inc", "x := x + 2"),
        -1 => ("dec", "x := x - 1"),
        -2 => ("double_dec", "x := x - 2"),
        _ => panic!("write gadget for {diff}"),
    };
    let mut m = Module::new(name, &["x"]);
    match diff {
        0 => {
            m.nodes(&["n1"]).entry(n("n1")).exit(n("n1"));
        }
        1 | -1 => {
            m.nodes(&["n1", "n2"]).entry(n("n1")).exit(n("n2"));
            m.edge(n("n1"), n("n2"), bump("x", diff));
        }
        _ => {
            let one = if diff > 0 { "inc" } else { "dec" };
            m.using("w1", one, &["x"]).using("w2", one, &["x"]).entry(c("w1")).exit(c("w2"));
            m.chain(&[c("w1"), c("w2")]);
        }
    }
    let contract = GadgetContract::new(name, statement, &[], move |a, v| Expectation {
        set: vec![(a[0].clone(), (get(v, &a[0]) as i64 + diff) as u64)],
        port: None,
    });
    Gadget { module: m, contract }
}

/// Head moves right on the digit encoding.
pub fn shift_right() -> Gadget {
    let mut m = Module::new("shift_right", &[]);
    m.using("m10", "times_10", &["muL"])
        .using("ad", "add", &["muL", "mu"])
        .using("d10", "div_10", &["muR"])
        .using("as", "assign", &["mu", "r", "t"])
        .using("ch", "choose_next_state", &["mu"]);
    m.entry(c("m10")).chain(&[c("m10"), c("ad"), c("d10"), c("as"), c("ch")]);
    for k in 0..5 {
        m.exit(Endpoint::port("ch", k));
    }
    let contract = GadgetContract::new(
        "shift_right",
        "muL := 10 muL + mu, mu := muR mod 10, muR := muR / 10, exit port mu",
        &["i", "r", "t"],
        |_, v| {
            let (l, h, r) = (get(v, "muL"), get(v, "mu"), get(v, "muR"));
            Expectation { set: set(&[("muL", 10 * l + h), ("mu", r % 10), ("muR", r / 10)]), port: Some((r % 10) as usize) }
        },
    );
    Gadget { module: m, contract }
}

/// Head moves left on the digit encoding.
pub fn shift_left() -> Gadget {
    let mut m = Module::new("shift_left", &[]);
    m.using("m10", "times_10", &["muR"])
        .using("ad", "add", &["muR", "mu"])
        .using("d10", "div_10", &["muL"])
        .using("as", "assign", &["mu", "r", "t"])
        .using("ch", "choose_next_state", &["mu"]);
    m.entry(c("m10")).chain(&[c("m10"), c("ad"), c("d10"), c("as"), c("ch")]);
    for k in 0..5 {
        m.exit(Endpoint::port("ch", k));
    }
    let contract = GadgetContract::new(
        "shift_left",
        "muR := 10 muR + mu, mu := muL mod 10, muL := muL / 10, exit port mu",
        &["i", "r", "t"],
        |_, v| {
            let (l, h, r) = (get(v, "muL"), get(v, "mu"), get(v, "muR"));
            Expectation { set: set(&[("muR", 10 * r + h), ("mu", l % 10), ("muL", l / 10)]), port: Some((l % 10) as usize) }
        },
    );
    Gadget { module: m, contract }
}

/// Per-cell variable names for a tape of `len` cells: `muL1..`, `mu`, `muR1..`.
pub fn cell_vars(len: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..=len).map(|k| format!("muL{k}")).collect();
    v.push("mu".into());
    v.extend((1..=len).map(|k| format!("muR{k}")));
    v
}

/// Head moves on the per-cell encoding: a cascade of copies towards the
/// side the head leaves, then a copy from the side it enters.
pub fn unary_shift(right: bool, len: usize) -> Gadget {
    let (from, to) = if right { ("muR", "muL") } else { ("muL", "muR") };
    let name = if right { "shift_right" } else { "shift_left" };
    let mut m = Module::new(name, &[]);
    let mut stops = Vec::new();
    let mut copies: Vec<(String, String)> = Vec::new();
    for k in (2..=len).rev() {
        copies.push((format!("{to}{k}"), format!("{to}{}", k - 1)));
    }
    copies.push((format!("{to}1"), "mu".into()));
    copies.push(("mu".into(), format!("{from}1")));
    for k in 1..len {
        copies.push((format!("{from}{k}"), format!("{from}{}", k + 1)));
    }
    for (j, (dst, src)) in copies.iter().enumerate() {
        let u = format!("a{j}");
        m.using(&u, "assign", &[dst, src, "t"]);
        stops.push(c(&u));
    }
    m.using("ch", "choose_next_state", &["mu"]);
    stops.push(c("ch"));
    m.entry(stops[0].clone()).chain(&stops);
    for k in 0..5 {
        m.exit(Endpoint::port("ch", k));
    }
    let statement = format!("cells move one place towards {to}, exit port mu");
    let contract = GadgetContract::new(name, &statement, &["t"], move |_, v| {
        let mut out = Vec::new();
        for k in 2..=len {
            out.push((format!("{to}{k}"), get(v, &format!("{to}{}", k - 1))));
        }
        out.push((format!("{to}1"), get(v, "mu")));
        let head = get(v, &format!("{from}1"));
        out.push(("mu".into(), head));
        for k in 1..len {
            out.push((format!("{from}{k}"), get(v, &format!("{from}{}", k + 1))));
        }
        Expectation { set: out, port: Some(head as usize) }
    });
    Gadget { module: m, contract }
}

/// `x := src` for a lone resource `src` whose bound is `v`: the exit edge
/// `+v src` only fits when `src` is empty.
pub fn load(src: &str, v: u64) -> Gadget {
    let name = format!("load_{src}");
    let mut m = Module::new(&name, &["x"]);
    m.using("z", "to_zero", &["x"]);
    m.nodes(&["loop", "n1", "n2"]).entry(c("z")).exit(n("n2"));
    m.chain(&[c("z"), n("loop")]);
    let mut body = vec![Term::new(-1, src)];
    body.extend(bump("x", 1));
    m.edge(n("loop"), n("loop"), body)
        .edge(n("loop"), n("n1"), vec![Term::new(v as i64, src)])
        .edge(n("n1"), n("n2"), vec![Term::new(-(v as i64), src)]);
    let src_name = src.to_string();
    let contract = GadgetContract::new(&name, &format!("x := {src}, {src} := 0"), &[], move |a, val| Expectation {
        set: vec![(a[0].clone(), get(val, &src_name)), (src_name.clone(), 0)],
        port: None,
    });
    Gadget { module: m, contract }
}

/// `x := v` for a compile-time constant.
pub fn constant(v: u64) -> Gadget {
    let name = format!("const_{v}");
    let mut m = Module::new(&name, &["x"]);
    m.using("z", "to_zero", &["x"]);
    m.nodes(&["set"]).entry(c("z")).exit(n("set"));
    m.edge(c("z"), n("set"), bump("x", v as i64));
    let contract =
        GadgetContract::new(&name, &format!("x := {v}"), &[], move |a, _| Expectation { set: vec![(a[0].clone(), v)], port: None });
    Gadget { module: m, contract }
}

/// Gadgets shared by both reductions.
pub fn common_library() -> Vec<Gadget> {
    let mut v = vec![to_zero(), assign(), choose_next_state()];
    v.extend([0, 1, 2, -1, -2].into_iter().map(write));
    v
}

/// Everything the digit reduction instantiates except the tape loaders.
pub fn digit_library() -> Vec<Gadget> {
    let mut v = common_library();
    v.extend([times_10(), add(), div_10(), shift_right(), shift_left()]);
    v
}

/// Digit resources without the loaders' sources.
pub const DIGIT_PAIRS: [&str; 6] = ["muL", "mu", "muR", "i", "r", "t"];

/// A hierarchical game holding the digit gadgets, for contract checks.
pub fn digit_workbench(max: u64) -> HierarchicalGame {
    let mut h = HierarchicalGame::new(max, "shift_right");
    h.pair(&DIGIT_PAIRS);
    for g in digit_library() {
        h.add(g.module);
    }
    h
}
