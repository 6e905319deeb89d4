use std::fmt;

use super::LbatmError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Blank,
    One,
    Two,
    /// Left delimiter.
    Start,
    /// Right delimiter.
    End,
}

impl Symbol {
    pub const ALL: [Symbol; 5] = [Symbol::Blank, Symbol::One, Symbol::Two, Symbol::Start, Symbol::End];
    /// Symbols that may appear strictly inside a tape.
    pub const INNER: [Symbol; 3] = [Symbol::Blank, Symbol::One, Symbol::Two];

    /// Digit used by the tape encoding.
    pub fn digit(self) -> u64 {
        match self {
            Symbol::Blank => 0,
            Symbol::One => 1,
            Symbol::Two => 2,
            Symbol::Start => 3,
            Symbol::End => 4,
        }
    }

    pub fn from_digit(d: u64) -> Option<Symbol> {
        Symbol::ALL.get(usize::try_from(d).ok()?).copied()
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::Blank => 'B',
            Symbol::One => '1',
            Symbol::Two => '2',
            Symbol::Start => '[',
            Symbol::End => ']',
        }
    }

    pub fn from_char(c: char) -> Option<Symbol> {
        Some(match c {
            'B' => Symbol::Blank,
            '1' => Symbol::One,
            '2' => Symbol::Two,
            '[' | '⌞' => Symbol::Start,
            ']' | '⌟' => Symbol::End,
            _ => return None,
        })
    }

    pub fn is_delimiter(self) -> bool {
        matches!(self, Symbol::Start | Symbol::End)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn as_char(self) -> char {
        match self {
            Direction::Left => 'L',
            Direction::Right => 'R',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub from: usize,
    pub read: Symbol,
    pub to: usize,
    pub write: Symbol,
    pub dir: Direction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Machine {
    states: Vec<String>,
    universal: Vec<bool>,
    initial: usize,
    instructions: Vec<Instruction>,
}

impl Machine {
    pub fn new(
        states: Vec<(String, bool)>,
        initial: usize,
        instructions: Vec<Instruction>,
    ) -> Result<Machine, LbatmError> {
        if states.is_empty() {
            return Err(LbatmError::Invalid("machine has no states".into()));
        }
        if initial >= states.len() {
            return Err(LbatmError::Invalid(format!("initial state #{initial} does not exist")));
        }
        let (names, universal): (Vec<String>, Vec<bool>) = states.into_iter().unzip();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(LbatmError::Invalid(format!("state {n} declared twice")));
            }
        }
        let m = Machine { states: names, universal, initial, instructions };
        for ins in &m.instructions {
            m.check_instruction(ins)?;
        }
        Ok(m)
    }

    fn check_instruction(&self, ins: &Instruction) -> Result<(), LbatmError> {
        if ins.from >= self.states.len() || ins.to >= self.states.len() {
            return Err(LbatmError::Invalid("instruction refers to an unknown state".into()));
        }
        let bad = |why: &str| {
            Err(LbatmError::Delimiter(format!(
                "{}: {why}",
                render_instruction(self, ins)
            )))
        };
        match ins.read {
            Symbol::Start if ins.write != Symbol::Start || ins.dir != Direction::Right => {
                bad("reading the left delimiter must write it back and move right")
            }
            Symbol::End if ins.write != Symbol::End || ins.dir != Direction::Left => {
                bad("reading the right delimiter must write it back and move left")
            }
            r if !r.is_delimiter() && ins.write.is_delimiter() => bad("only a delimiter cell may hold a delimiter"),
            _ => Ok(()),
        }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|n| n == name)
    }

    pub fn is_universal(&self, s: usize) -> bool {
        self.universal[s]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    /// Instructions applicable at full state `(s, sym)`, in declaration order.
    pub fn matching(&self, s: usize, sym: Symbol) -> impl Iterator<Item = &Instruction> {
        self.instructions.iter().filter(move |i| i.from == s && i.read == sym)
    }

    pub fn render(&self) -> String {
        let mut out = String::from("states:");
        for (i, n) in self.states.iter().enumerate() {
            out.push(' ');
            out.push_str(n);
            if i == self.initial {
                out.push('*');
            }
            if self.universal[i] {
                out.push('!');
            }
        }
        out.push('\n');
        for ins in &self.instructions {
            out.push_str(&render_instruction(self, ins));
            out.push('\n');
        }
        out
    }
}

fn render_instruction(m: &Machine, ins: &Instruction) -> String {
    format!(
        "{} , {} -> {} , {} , {}",
        m.states[ins.from],
        ins.read,
        m.states[ins.to],
        ins.write,
        ins.dir.as_char()
    )
}

fn valid_state_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_')
}

/// Parses the line-oriented machine format.
pub fn parse_machine(text: &str) -> Result<Machine, LbatmError> {
    let mut header: Option<(Vec<(String, bool)>, usize)> = None;
    let mut raw = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| LbatmError::Syntax { line: line_no, msg };
        if let Some(rest) = line.strip_prefix("states:") {
            if header.is_some() {
                return Err(err("duplicate states header".into()));
            }
            let mut states = Vec::new();
            let mut initial = None;
            for word in rest.split_whitespace() {
                let mut name = word;
                let (mut init, mut univ) = (false, false);
                loop {
                    if let Some(n) = name.strip_suffix('*') {
                        init = true;
                        name = n;
                    } else if let Some(n) = name.strip_suffix('!') {
                        univ = true;
                        name = n;
                    } else {
                        break;
                    }
                }
                if !valid_state_name(name) {
                    return Err(err(format!("bad state name '{word}'")));
                }
                if init {
                    if initial.is_some() {
                        return Err(err("more than one initial state".into()));
                    }
                    initial = Some(states.len());
                }
                states.push((name.to_string(), univ));
            }
            let initial = initial.ok_or_else(|| err("no initial state marked with '*'".into()))?;
            header = Some((states, initial));
            continue;
        }
        let Some((states, _)) = &header else {
            return Err(err("instruction before the states header".into()));
        };
        let (lhs, rhs) = line.split_once("->").ok_or_else(|| err("expected '->'".into()))?;
        let l: Vec<&str> = lhs.split(',').map(str::trim).collect();
        let r: Vec<&str> = rhs.split(',').map(str::trim).collect();
        if l.len() != 2 || r.len() != 3 {
            return Err(err("expected 'state , symbol -> state , symbol , L|R'".into()));
        }
        let state = |name: &str| {
            states
                .iter()
                .position(|(n, _)| n == name)
                .ok_or_else(|| err(format!("unknown state '{name}'")))
        };
        let symbol = |s: &str| {
            let mut cs = s.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => Symbol::from_char(c).ok_or_else(|| err(format!("unknown symbol '{s}'"))),
                _ => Err(err(format!("unknown symbol '{s}'"))),
            }
        };
        let dir = match r[2] {
            "L" => Direction::Left,
            "R" => Direction::Right,
            d => return Err(err(format!("direction must be L or R, found '{d}'"))),
        };
        raw.push(Instruction { from: state(l[0])?, read: symbol(l[1])?, to: state(r[0])?, write: symbol(r[1])?, dir });
    }
    let (states, initial) = header.ok_or(LbatmError::Syntax { line: 0, msg: "missing states header".into() })?;
    Machine::new(states, initial, raw)
}
