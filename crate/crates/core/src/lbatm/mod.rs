//! Linearly bounded alternating Turing machines over `{B, 1, 2}` with
//! end-of-tape delimiters, and an exact acceptance decider.

mod machine;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use machine::{parse_machine, Direction, Instruction, Machine, Symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LbatmError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("delimiter rule violated by {0}")]
    Delimiter(String),
    #[error("invalid machine: {0}")]
    Invalid(String),
    #[error("invalid tape: {0}")]
    Tape(String),
    #[error("computation revisits configuration {0}; the machine must halt on every path")]
    Cycle(String),
    #[error("existential state {state} has no instruction for symbol {symbol}; the normal form forbids reachable existential dead ends")]
    NormalForm { state: String, symbol: Symbol },
}

/// A tape including both delimiters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tape(Vec<Symbol>);

impl Tape {
    pub fn new(cells: Vec<Symbol>) -> Result<Tape, LbatmError> {
        let n = cells.len();
        if n < 2 {
            return Err(LbatmError::Tape("a tape needs both delimiters".into()));
        }
        if cells[0] != Symbol::Start || cells[n - 1] != Symbol::End {
            return Err(LbatmError::Tape("tape must start with '[' and end with ']'".into()));
        }
        if cells[1..n - 1].iter().any(|s| s.is_delimiter()) {
            return Err(LbatmError::Tape("delimiter inside the tape".into()));
        }
        Ok(Tape(cells))
    }

    /// Tape with the given inner symbols.
    pub fn from_inner(inner: &[Symbol]) -> Result<Tape, LbatmError> {
        let mut cells = vec![Symbol::Start];
        cells.extend_from_slice(inner);
        cells.push(Symbol::End);
        Tape::new(cells)
    }

    /// Parses `[B11(2)]`-style text. Delimiters may be omitted; a cell in
    /// parentheses marks the head, which is returned when present.
    pub fn parse(text: &str) -> Result<(Tape, Option<usize>), LbatmError> {
        let mut cells = Vec::new();
        let mut head = None;
        let mut chars = text.trim().chars().peekable();
        while let Some(c) = chars.next() {
            if c.is_whitespace() {
                continue;
            }
            if c == '(' {
                let inner = chars.next().and_then(Symbol::from_char);
                if inner.is_none() || chars.next() != Some(')') || head.is_some() {
                    return Err(LbatmError::Tape(format!("bad head marker in '{text}'")));
                }
                head = Some(cells.len());
                cells.push(inner.unwrap_or(Symbol::Blank));
                continue;
            }
            cells.push(Symbol::from_char(c).ok_or_else(|| LbatmError::Tape(format!("unknown symbol '{c}'")))?);
        }
        if cells.first() != Some(&Symbol::Start) {
            cells.insert(0, Symbol::Start);
            head = head.map(|h| h + 1);
        }
        if cells.last() != Some(&Symbol::End) || cells.len() == 1 {
            cells.push(Symbol::End);
        }
        Ok((Tape::new(cells)?, head))
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every tape of total length `len` (delimiters included).
    pub fn all_of_length(len: usize) -> Vec<Tape> {
        let inner = len.saturating_sub(2);
        let mut out = Vec::new();
        let total = 3usize.pow(inner as u32);
        for mut code in 0..total {
            let mut v = Vec::with_capacity(inner);
            for _ in 0..inner {
                v.push(Symbol::INNER[code % 3]);
                code /= 3;
            }
            v.reverse();
            out.push(Tape::from_inner(&v).expect("inner symbols only"));
        }
        out
    }

    pub fn render_with_head(&self, head: usize) -> String {
        self.0
            .iter()
            .enumerate()
            .map(|(i, s)| if i == head { format!("({s})") } else { s.to_string() })
            .collect()
    }
}

impl fmt::Display for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MachineConfig {
    pub state: usize,
    pub tape: Vec<Symbol>,
    pub head: usize,
}

impl MachineConfig {
    /// Head on the first inner cell (the right delimiter for an empty tape).
    pub fn initial(m: &Machine, tape: &Tape) -> MachineConfig {
        MachineConfig { state: m.initial(), tape: tape.cells().to_vec(), head: 1 }
    }

    pub fn with_head(m: &Machine, tape: &Tape, head: usize) -> MachineConfig {
        MachineConfig { state: m.initial(), tape: tape.cells().to_vec(), head }
    }

    pub fn symbol(&self) -> Symbol {
        self.tape[self.head]
    }

    pub fn render(&self, m: &Machine) -> String {
        let tape: String = self
            .tape
            .iter()
            .enumerate()
            .map(|(i, s)| if i == self.head { format!("({s})") } else { s.to_string() })
            .collect();
        format!("{} {}", m.state_name(self.state), tape)
    }

    fn check(&self, m: &Machine) -> Result<(), LbatmError> {
        if self.state >= m.state_count() || self.head >= self.tape.len() {
            return Err(LbatmError::Tape("configuration out of range".into()));
        }
        Tape::new(self.tape.clone()).map(|_| ())
    }
}

/// Configurations reachable by one instruction, in instruction order.
pub fn next_configs(m: &Machine, c: &MachineConfig) -> Result<Vec<MachineConfig>, LbatmError> {
    c.check(m)?;
    Ok(step_unchecked(m, c))
}

fn step_unchecked(m: &Machine, c: &MachineConfig) -> Vec<MachineConfig> {
    let mut out: Vec<MachineConfig> = Vec::new();
    for ins in m.matching(c.state, c.symbol()) {
        let mut tape = c.tape.clone();
        tape[c.head] = ins.write;
        let head = match ins.dir {
            Direction::Left => c.head.checked_sub(1),
            Direction::Right => Some(c.head + 1).filter(|&h| h < tape.len()),
        };
        // Unreachable for machines obeying the delimiter rule.
        let Some(head) = head else { continue };
        let next = MachineConfig { state: ins.to, tape, head };
        if !out.contains(&next) {
            out.push(next);
        }
    }
    out
}

/// Acceptance of every configuration reachable from a start configuration.
#[derive(Clone, Debug)]
pub struct Evaluation {
    verdicts: HashMap<MachineConfig, bool>,
}

impl Evaluation {
    pub fn verdict(&self, c: &MachineConfig) -> Option<bool> {
        self.verdicts.get(c).copied()
    }

    pub fn len(&self) -> usize {
        self.verdicts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verdicts.is_empty()
    }

    pub fn configs(&self) -> impl Iterator<Item = (&MachineConfig, bool)> {
        self.verdicts.iter().map(|(c, &v)| (c, v))
    }
}

/// Evaluates every configuration reachable from `c`. All branches are
/// explored so that cycle detection does not depend on evaluation order.
pub fn evaluate(m: &Machine, c: &MachineConfig) -> Result<Evaluation, LbatmError> {
    c.check(m)?;
    let mut verdicts: HashMap<MachineConfig, bool> = HashMap::new();
    let mut on_path: HashMap<MachineConfig, ()> = HashMap::new();
    // (config, successors, next successor to visit)
    let mut stack: Vec<(MachineConfig, Vec<MachineConfig>, usize)> = Vec::new();
    let succ = step_unchecked(m, c);
    on_path.insert(c.clone(), ());
    stack.push((c.clone(), succ, 0));
    while let Some((_, succ, idx)) = stack.last_mut() {
        if *idx < succ.len() {
            let child = succ[*idx].clone();
            *idx += 1;
            if verdicts.contains_key(&child) {
                continue;
            }
            if on_path.contains_key(&child) {
                return Err(LbatmError::Cycle(child.render(m)));
            }
            let s = step_unchecked(m, &child);
            on_path.insert(child.clone(), ());
            stack.push((child, s, 0));
            continue;
        }
        let (cfg, succ, _) = stack.pop().expect("non-empty");
        let universal = m.is_universal(cfg.state);
        let v = if universal {
            succ.iter().all(|s| verdicts[s])
        } else {
            succ.iter().any(|s| verdicts[s])
        };
        on_path.remove(&cfg);
        verdicts.insert(cfg, v);
    }
    Ok(Evaluation { verdicts })
}

pub fn accepts(m: &Machine, c: &MachineConfig) -> Result<bool, LbatmError> {
    Ok(evaluate(m, c)?.verdicts[c])
}

/// Convenience: acceptance of `tape` from the initial configuration.
pub fn accepts_tape(m: &Machine, tape: &Tape) -> Result<bool, LbatmError> {
    accepts(m, &MachineConfig::initial(m, tape))
}

/// An indented proof tree for the verdict at `c`: for an accepted
/// configuration one accepting child of each existential node and all
/// children of each universal node, dually for a rejected one.
pub fn trace(m: &Machine, c: &MachineConfig) -> Result<Vec<String>, LbatmError> {
    let ev = evaluate(m, c)?;
    let mut lines = Vec::new();
    let mut printed: HashMap<MachineConfig, ()> = HashMap::new();
    let mut stack = vec![(c.clone(), 0usize)];
    while let Some((cfg, depth)) = stack.pop() {
        let v = ev.verdicts[&cfg];
        let kind = if m.is_universal(cfg.state) { "A" } else { "E" };
        let tag = if v { "accept" } else { "reject" };
        let mut line = format!("{}{} [{kind}] {tag}", "  ".repeat(depth), cfg.render(m));
        if printed.insert(cfg.clone(), ()).is_some() {
            line.push_str(" (see above)");
            lines.push(line);
            continue;
        }
        let succ = step_unchecked(m, &cfg);
        if succ.is_empty() {
            line.push_str(" (halt)");
        }
        lines.push(line);
        // An existential accept or a universal reject needs one witness child.
        let one = m.is_universal(cfg.state) != v;
        let chosen: Vec<MachineConfig> = if one {
            succ.into_iter().filter(|s| ev.verdicts[s] == v).take(1).collect()
        } else {
            succ
        };
        for s in chosen.into_iter().rev() {
            stack.push((s, depth + 1));
        }
    }
    Ok(lines)
}

/// Rejects machines that could reach an existential configuration without
/// applicable instructions, or that do not halt from the given start.
pub fn validate_for_reduction(m: &Machine, tape: &Tape) -> Result<(), LbatmError> {
    let c = MachineConfig::initial(m, tape);
    let ev = evaluate(m, &c)?;
    let mut bad: Vec<(usize, Symbol)> = ev
        .configs()
        .map(|(c, _)| c)
        .filter(|c| !m.is_universal(c.state) && m.matching(c.state, c.symbol()).next().is_none())
        .map(|c| (c.state, c.symbol()))
        .collect();
    bad.sort();
    match bad.first() {
        Some(&(s, sym)) => Err(LbatmError::NormalForm { state: m.state_name(s).to_string(), symbol: sym }),
        None => Ok(()),
    }
}

/// Full states `(state, symbol)` reachable from the start configuration.
pub fn reachable_full_states(m: &Machine, tape: &Tape) -> Result<Vec<(usize, Symbol)>, LbatmError> {
    let ev = evaluate(m, &MachineConfig::initial(m, tape))?;
    let mut v: Vec<(usize, Symbol)> = ev.configs().map(|(c, _)| (c.state, c.symbol())).collect();
    v.sort();
    v.dedup();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Existential scan right; accept on 2, stuck (existential dead end) at
    /// the right delimiter.
    const HAS_TWO: &str = "\
states: s* acc! rej
s , 1 -> s , 1 , R
s , B -> s , B , R
s , 2 -> acc , 2 , R
";

    fn tape(s: &str) -> Tape {
        Tape::parse(s).unwrap().0
    }

    #[test]
    fn symbol_digits_round_trip() {
        for s in Symbol::ALL {
            assert_eq!(Symbol::from_digit(s.digit()), Some(s));
            assert_eq!(Symbol::from_char(s.as_char()), Some(s));
        }
    }

    #[test]
    fn parse_minimal_and_render_round_trip() {
        let m = parse_machine("states: q*\n").unwrap();
        assert_eq!(m.state_count(), 1);
        let m = parse_machine(HAS_TWO).unwrap();
        assert_eq!(parse_machine(&m.render()).unwrap(), m);
    }

    #[test]
    fn delimiter_rules_enforced() {
        let e = parse_machine("states: q*\nq , 1 -> q , [ , R\n").unwrap_err();
        assert!(matches!(e, LbatmError::Delimiter(_)));
        let e = parse_machine("states: q*\nq , [ -> q , [ , L\n").unwrap_err();
        assert!(matches!(e, LbatmError::Delimiter(_)));
        let e = parse_machine("states: q*\nq , ] -> q , 1 , L\n").unwrap_err();
        assert!(matches!(e, LbatmError::Delimiter(_)));
        assert!(parse_machine("states: q*\nq , 1 -> r , 1 , L\n").is_err());
    }

    #[test]
    fn dead_ends() {
        let u = parse_machine("states: q*!\n").unwrap();
        let e = parse_machine("states: q*\n").unwrap();
        let t = tape("[1]");
        assert!(accepts_tape(&u, &t).unwrap());
        assert!(!accepts_tape(&e, &t).unwrap());
        assert!(next_configs(&u, &MachineConfig::initial(&u, &t)).unwrap().is_empty());
    }

    #[test]
    fn delimiter_move() {
        let m = parse_machine("states: q*!\nq , [ -> q , [ , R\n").unwrap();
        let c = MachineConfig::with_head(&m, &tape("[12]"), 0);
        let n = next_configs(&m, &c).unwrap();
        assert_eq!(n.len(), 1);
        assert_eq!(n[0].head, 1);
    }

    #[test]
    fn existential_branching() {
        let m = parse_machine("states: q* a! b!\nq , 1 -> a , 1 , R\nq , 1 -> b , 2 , L\n").unwrap();
        let c = MachineConfig::initial(&m, &tape("[1]"));
        assert_eq!(next_configs(&m, &c).unwrap().len(), 2);
    }

    #[test]
    fn has_two_machine() {
        let m = parse_machine(HAS_TWO).unwrap();
        assert!(accepts_tape(&m, &tape("[12]")).unwrap());
        assert!(!accepts_tape(&m, &tape("[11]")).unwrap());
        let ev = evaluate(&m, &MachineConfig::initial(&m, &tape("[12]"))).unwrap();
        assert!(ev.len() <= 40);
    }

    #[test]
    fn cycles_are_errors() {
        let m = parse_machine("states: q*\nq , 1 -> q , 1 , R\nq , ] -> q , ] , L\n").unwrap();
        let e = accepts_tape(&m, &tape("[1]")).unwrap_err();
        assert!(matches!(e, LbatmError::Cycle(_)));
    }

    #[test]
    fn normal_form_check() {
        let m = parse_machine(HAS_TWO).unwrap();
        let e = validate_for_reduction(&m, &tape("[11]")).unwrap_err();
        assert!(matches!(e, LbatmError::NormalForm { .. }));
        validate_for_reduction(&m, &tape("[12]")).unwrap();
    }

    #[test]
    fn tape_parsing() {
        let (t, h) = Tape::parse("[B112(1)1B2BB]").unwrap();
        assert_eq!(t.len(), 12);
        assert_eq!(h, Some(5));
        let (t, h) = Tape::parse("12").unwrap();
        assert_eq!(t.to_string(), "[12]");
        assert_eq!(h, None);
        assert_eq!(Tape::parse("").unwrap().0.to_string(), "[]");
        assert_eq!(Tape::parse("⌞1⌟").unwrap().0.to_string(), "[1]");
        assert!(Tape::parse("[1[2]").is_err());
        assert_eq!(Tape::all_of_length(4).len(), 9);
    }

    #[test]
    fn trace_shows_witness() {
        let m = parse_machine(HAS_TWO).unwrap();
        let c = MachineConfig::initial(&m, &tape("[12]"));
        let lines = trace(&m, &c).unwrap();
        assert!(lines[0].contains("accept"));
        assert!(lines.iter().any(|l| l.contains("acc ") && l.contains("(halt)")));
    }
}
