//! Compilers from LB-ATM acceptance to `<<ag1>> F p` model checking.

use std::fmt;

use crate::checker::StateSpace;
use crate::formula::{Formula, TeamOp};
use crate::lbatm::{evaluate, validate_for_reduction, Direction, Machine, MachineConfig, Symbol, Tape};
use crate::model::{AgentId, Amount, MoneyVector, PricedGameStructure};

use super::encoding::{encode_tape, max_value};
use super::flatten::{flatten, Flattened};
use super::gadgets::{self, cell_vars, DIGIT_PAIRS};
use super::hier::{Endpoint, HierarchicalGame, Module, Term};
use super::ReductionError;

/// Per-cell resources hold one digit each, so this bound does not depend
/// on the tape.
pub const UNARY_MAX: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// The whole tape in three numbers.
    Digit,
    /// One resource per cell on each side of the head.
    Unary,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Digit => "digit",
            Mode::Unary => "unary",
        }
    }
}

/// Which halting full states carry `p`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Labelling {
    /// Every full state without instructions. Sound only for machines in
    /// normal form, which compilation then enforces.
    #[default]
    Literal,
    /// Only universal ones; existential dead ends are left unlabelled and
    /// reject on their own, so no normal form is needed.
    Universal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CompileOptions {
    pub labelling: Labelling,
}

#[derive(Clone, Debug)]
pub struct Compiled {
    pub mode: Mode,
    pub hierarchy: HierarchicalGame,
    pub flat: Flattened,
    pub formula: Formula,
    pub max: u64,
    /// Resources that hold tape contents.
    pub tape_vars: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompileStats {
    pub mode: Mode,
    pub agents: usize,
    pub resources: usize,
    pub locations: usize,
    pub modules: usize,
    pub max: u64,
    pub tape_vars: Vec<String>,
}

impl fmt::Display for CompileStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode       {}", self.mode.name())?;
        writeln!(f, "agents     {}", self.agents)?;
        writeln!(f, "resources  {}", self.resources)?;
        writeln!(f, "locations  {}", self.locations)?;
        writeln!(f, "modules    {}", self.modules)?;
        writeln!(f, "Max        {}", self.max)?;
        write!(f, "tape vars  {} ({})", self.tape_vars.len(), self.tape_vars.join(" "))
    }
}

impl Compiled {
    pub fn game(&self) -> &PricedGameStructure {
        &self.flat.game
    }

    pub fn stats(&self) -> CompileStats {
        CompileStats {
            mode: self.mode,
            agents: self.game().agent_count(),
            resources: self.game().resource_count(),
            locations: self.game().locations().len(),
            modules: self.hierarchy.modules.len(),
            max: self.max,
            tape_vars: self.tape_vars.clone(),
        }
    }
}

/// `<<ag1>> F p` with unbounded money.
pub fn reach_p() -> Formula {
    Formula::eventually(TeamOp::new([AgentId(0)], MoneyVector(vec![Amount::INF; 2])), Formula::atom("p"))
}

fn tag(s: Symbol) -> &'static str {
    match s {
        Symbol::Blank => "B",
        Symbol::One => "1",
        Symbol::Two => "2",
        Symbol::Start => "L",
        Symbol::End => "R",
    }
}

/// Location name of full state `(q, s)`.
pub fn full_state(m: &Machine, q: usize, s: Symbol) -> String {
    format!("{}_{}", m.state_name(q), tag(s))
}

fn check_machine(m: &Machine, tape: &Tape, opts: CompileOptions) -> Result<(), ReductionError> {
    match opts.labelling {
        Labelling::Literal => validate_for_reduction(m, tape)?,
        Labelling::Universal => {
            evaluate(m, &MachineConfig::initial(m, tape))?;
        }
    }
    Ok(())
}

/// Full-state nodes, the per-instruction write and shift instances, and
/// the labels. Returns the node the preliminary step must lead to.
fn skeleton(main: &mut Module, m: &Machine, tape: &Tape, opts: CompileOptions) -> String {
    for q in 0..m.state_count() {
        for s in Symbol::ALL {
            let node = full_state(m, q, s);
            main.nodes.push(node.clone());
            let universal = m.is_universal(q);
            if universal {
                main.universal.push(node.clone());
            } else {
                main.branch.push(node.clone());
            }
            let halts = m.matching(q, s).next().is_none();
            if halts && (universal || opts.labelling == Labelling::Literal) {
                main.labels.push((node, "p".into()));
            }
        }
    }
    for (k, ins) in m.instructions().iter().enumerate() {
        let diff = ins.write.digit() as i64 - ins.read.digit() as i64;
        let writer = gadgets::write(diff).module.name;
        let shift = match ins.dir {
            Direction::Right => "shift_right",
            Direction::Left => "shift_left",
        };
        let (w, s) = (format!("w{k}"), format!("m{k}"));
        main.using(&w, &writer, &["mu"]).using(&s, shift, &[]);
        main.edge(Endpoint::node(&full_state(m, ins.from, ins.read)), Endpoint::child(&w), Vec::new());
        main.edge(Endpoint::child(&w), Endpoint::child(&s), Vec::new());
        for sym in Symbol::ALL {
            main.edge(Endpoint::port(&s, sym.digit() as usize), Endpoint::node(&full_state(m, ins.to, sym)), Vec::new());
        }
    }
    full_state(m, m.initial(), tape.cells()[1])
}

/// `-Max ~x` for every pair, taking the doubled initial stock down to
/// `x + ~x = Max`.
fn consume_partners(pairs: &[String]) -> Vec<Term> {
    pairs.iter().map(|x| Term::max_bar(-1, x)).collect()
}

pub fn compile(m: &Machine, tape: &Tape, mode: Mode, opts: CompileOptions) -> Result<Compiled, ReductionError> {
    match mode {
        Mode::Digit => compile_digit(m, tape, opts),
        Mode::Unary => compile_unary(m, tape, opts),
    }
}

/// The tape as `muL`, `mu`, `muR`; Max is the largest encoding.
pub fn compile_digit(m: &Machine, tape: &Tape, opts: CompileOptions) -> Result<Compiled, ReductionError> {
    check_machine(m, tape, opts)?;
    let max = max_value(tape.len())?;
    let (lv, hv, rv) = encode_tape(tape, 1)?;
    let mut h = HierarchicalGame::new(max, "main");
    h.pair(&DIGIT_PAIRS).plain("lv", lv).plain("hv", hv).plain("rv", rv);
    for g in gadgets::digit_library() {
        h.add(g.module);
    }
    let loaders = [("lv", lv, "muL"), ("hv", hv, "mu"), ("rv", rv, "muR")];
    for (src, v, _) in loaders {
        h.add(gadgets::load(src, v).module);
    }

    let mut main = Module::new("main", &[]);
    let start = skeleton(&mut main, m, tape, opts);
    main.nodes(&["init"]).entry(Endpoint::node("init"));
    let pairs: Vec<String> = DIGIT_PAIRS.iter().map(|s| s.to_string()).collect();
    let mut stops = Vec::new();
    for (src, _, dst) in loaders {
        let u = format!("load{src}");
        main.using(&u, &format!("load_{src}"), &[dst]);
        stops.push(Endpoint::child(&u));
    }
    main.edge(Endpoint::node("init"), stops[0].clone(), consume_partners(&pairs));
    stops.push(Endpoint::node(&start));
    main.chain(&stops);
    h.add(main);

    let flat = flatten(&h)?;
    Ok(Compiled { mode: Mode::Digit, hierarchy: h, flat, formula: reach_p(), max, tape_vars: vec!["muL".into(), "mu".into(), "muR".into()] })
}

/// Initial per-cell values with the head on cell 1.
pub fn unary_initial(tape: &Tape) -> Vec<(String, u64)> {
    let cells = tape.cells();
    let n = cells.len();
    let mut out = Vec::new();
    for k in 1..=n {
        out.push((format!("muL{k}"), if k == 1 { cells[0].digit() } else { 0 }));
    }
    out.push(("mu".into(), cells[1].digit()));
    for k in 1..=n {
        out.push((format!("muR{k}"), cells.get(1 + k).map_or(0, |s| s.digit())));
    }
    out
}

/// One resource per cell position relative to the head; Max is 4.
pub fn compile_unary(m: &Machine, tape: &Tape, opts: CompileOptions) -> Result<Compiled, ReductionError> {
    check_machine(m, tape, opts)?;
    let n = tape.len();
    let vars = cell_vars(n);
    let mut h = HierarchicalGame::new(UNARY_MAX, "main");
    let mut pairs: Vec<String> = vars.clone();
    pairs.push("t".into());
    h.pair(&pairs.iter().map(String::as_str).collect::<Vec<_>>());
    for g in gadgets::common_library() {
        h.add(g.module);
    }
    h.add(gadgets::unary_shift(true, n).module).add(gadgets::unary_shift(false, n).module);

    let mut main = Module::new("main", &[]);
    let start = skeleton(&mut main, m, tape, opts);
    main.nodes(&["init"]).entry(Endpoint::node("init"));
    let mut stops = Vec::new();
    for (j, (x, v)) in unary_initial(tape).into_iter().enumerate() {
        let g = gadgets::constant(v).module;
        let u = format!("c{j}");
        main.using(&u, &g.name, &[&x]);
        h.add(g);
        stops.push(Endpoint::child(&u));
    }
    main.edge(Endpoint::node("init"), stops[0].clone(), consume_partners(&pairs));
    stops.push(Endpoint::node(&start));
    main.chain(&stops);
    h.add(main);

    let flat = flatten(&h)?;
    Ok(Compiled { mode: Mode::Unary, hierarchy: h, flat, formula: reach_p(), max: UNARY_MAX, tape_vars: vars })
}

/// What [`check_invariants`] looked at.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InvariantReport {
    pub configurations: usize,
    pub boundary_checks: usize,
    pub forced_checks: usize,
}

/// Over every reachable configuration: availability within `m0`, pairs
/// summing to Max at gadget boundaries, and exactly one defined move other
/// than ag1 idling at every node that is not a choice point.
pub fn check_invariants(c: &Compiled, space: &StateSpace) -> Result<InvariantReport, ReductionError> {
    let g = c.game();
    let f = &c.flat;
    let m0: Vec<u64> = g.m0().entries().iter().map(|a| a.raw()).collect();
    // Profiles in which ag1 plays the idle action, per location.
    let idle: Vec<Vec<bool>> = (0..g.locations().len())
        .map(|q| {
            let q = crate::model::LocationId(q);
            (0..g.profile_count(q)).map(|i| g.profile_at(q, i)[0] == 1).collect()
        })
        .collect();
    let mut report = InvariantReport { configurations: space.len(), ..InvariantReport::default() };
    let name = |id: u32| g.location(space.location(id)).name.clone();
    for id in 0..space.len() as u32 {
        let q = space.location(id).0;
        let avail = space.avail_raw(id);
        if let Some(k) = (0..avail.len()).find(|&k| avail[k] > m0[k]) {
            return Err(ReductionError::Invariant(format!("{} exceeds m0 at {}", g.resources()[k], name(id))));
        }
        let meta = &f.meta[q];
        if meta.boundary {
            report.boundary_checks += 1;
            for &(x, bar) in &f.pairs {
                if avail[x] + avail[bar] != f.max {
                    return Err(ReductionError::Invariant(format!(
                        "{} + {} = {} at {}",
                        g.resources()[x],
                        g.resources()[bar],
                        avail[x] + avail[bar],
                        name(id)
                    )));
                }
            }
        }
        if !meta.branch && meta.edges > 0 {
            report.forced_checks += 1;
            let defined = space
                .successors(id)
                .iter()
                .zip(&idle[q])
                .filter(|&(&s, &idles)| !idles && s != crate::checker::UNDEFINED)
                .count();
            if defined != 1 {
                return Err(ReductionError::Invariant(format!("{defined} moves defined at {}", name(id))));
            }
        }
    }
    Ok(report)
}
