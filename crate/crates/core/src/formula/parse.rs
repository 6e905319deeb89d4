use crate::model::{AgentId, Amount, Availability, MoneyVector};

use super::ast::{Formula, Relation, Signature, TeamOp};
use super::FormulaError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    LTeam,
    RTeam,
    Colon,
    Comma,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Bang,
    Amp,
    Rel(Relation),
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Num(n) => format!("'{n}'"),
        Tok::LTeam => "'<<'".into(),
        Tok::RTeam => "'>>'".into(),
        Tok::Colon => "':'".into(),
        Tok::Comma => "','".into(),
        Tok::LBrack => "'['".into(),
        Tok::RBrack => "']'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Bang => "'!'".into(),
        Tok::Amp => "'&'".into(),
        Tok::Rel(r) => format!("'{}'", r.symbol()),
        Tok::Eof => "end of input".into(),
    }
}

const RESERVED: [&str; 7] = ["X", "G", "F", "U", "avail", "true", "inf"];

pub(crate) fn is_reserved(s: &str) -> bool {
    RESERVED.contains(&s)
}

/// Positions are character offsets into the input.
fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let next = chars.get(i + 1).copied();
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '<' if next == Some('<') => {
                i += 2;
                Tok::LTeam
            }
            '>' if next == Some('>') => {
                i += 2;
                Tok::RTeam
            }
            '⟨' if next == Some('⟨') => {
                i += 2;
                Tok::LTeam
            }
            '⟩' if next == Some('⟩') => {
                i += 2;
                Tok::RTeam
            }
            '<' | '>' | '≤' | '≥' | '=' => {
                i += 1;
                let eq = next == Some('=');
                match c {
                    '<' if eq => {
                        i += 1;
                        Tok::Rel(Relation::Le)
                    }
                    '>' if eq => {
                        i += 1;
                        Tok::Rel(Relation::Ge)
                    }
                    '<' => Tok::Rel(Relation::Lt),
                    '>' => Tok::Rel(Relation::Gt),
                    '≤' => Tok::Rel(Relation::Le),
                    '≥' => Tok::Rel(Relation::Ge),
                    _ => Tok::Rel(Relation::Eq),
                }
            }
            ':' => {
                i += 1;
                Tok::Colon
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            '[' => {
                i += 1;
                Tok::LBrack
            }
            ']' => {
                i += 1;
                Tok::RBrack
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '!' | '¬' => {
                i += 1;
                Tok::Bang
            }
            '&' | '∧' => {
                i += 1;
                Tok::Amp
            }
            '⊤' => {
                i += 1;
                Tok::Ident("true".into())
            }
            '∞' => {
                i += 1;
                Tok::Ident("inf".into())
            }
            c if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse::<u64>().ok().filter(|&n| n < u64::MAX).ok_or_else(|| FormulaError::Syntax {
                    pos: start,
                    msg: format!("number {s} out of range"),
                })?;
                Tok::Num(n)
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            }
            other => {
                return Err(FormulaError::Syntax { pos: start, msg: format!("unexpected character '{other}'") });
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::Eof, chars.len()));
    Ok(out)
}

struct Parser<'s> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    sig: &'s Signature,
    warnings: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok) -> Result<(), FormulaError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected {}, found {}", describe(&t), describe(self.peek())))
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LTeam => self.team(),
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(s) if s == "avail" => {
                self.bump();
                let rel = match self.bump() {
                    Tok::Rel(r) => r,
                    other => {
                        self.at -= 1;
                        return self.fail(format!("expected comparison after 'avail', found {}", describe(&other)));
                    }
                };
                let pos = self.pos();
                let v = self.vector()?;
                if v.len() != self.sig.resources {
                    return Err(FormulaError::Arity { pos, what: "availability", expected: self.sig.resources, found: v.len() });
                }
                Ok(Formula::Market(rel, Availability(v)))
            }
            Tok::Ident(s) if is_reserved(&s) => self.fail(format!("unexpected keyword '{s}'")),
            Tok::Ident(s) => {
                self.bump();
                Ok(Formula::Atom(s))
            }
            other => self.fail(format!("expected a formula, found {}", describe(&other))),
        }
    }

    fn team(&mut self) -> Result<Formula, FormulaError> {
        self.expect(Tok::LTeam)?;
        let mut team = Vec::new();
        if *self.peek() != Tok::Colon {
            loop {
                let pos = self.pos();
                match self.bump() {
                    Tok::Ident(name) => match self.sig.agents.iter().position(|a| *a == name) {
                        Some(k) => team.push(AgentId(k)),
                        None => return Err(FormulaError::UnknownAgent { pos, name }),
                    },
                    other => {
                        self.at -= 1;
                        return self.fail(format!("expected agent name, found {}", describe(&other)));
                    }
                }
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::Colon)?;
        let pos = self.pos();
        let money = self.vector()?;
        let n = self.sig.agents.len();
        if money.len() != n {
            return Err(FormulaError::Arity { pos, what: "money", expected: n, found: money.len() });
        }
        self.expect(Tok::RTeam)?;
        let op = TeamOp::new(team, MoneyVector(money));
        for (k, m) in op.money.entries().iter().enumerate() {
            if *m != Amount::ZERO && !op.team.contains(&AgentId(k)) {
                self.warnings.push(format!(
                    "money {m} for agent {} outside the team is ignored",
                    self.sig.agents[k]
                ));
            }
        }
        match self.peek().clone() {
            Tok::Ident(s) if s == "X" => {
                self.bump();
                Ok(Formula::next(op, self.unary()?))
            }
            Tok::Ident(s) if s == "G" => {
                self.bump();
                Ok(Formula::globally(op, self.unary()?))
            }
            Tok::Ident(s) if s == "F" => {
                self.bump();
                Ok(Formula::eventually(op, self.unary()?))
            }
            Tok::LBrack => {
                self.bump();
                let a = self.formula()?;
                if !self.keyword("U") {
                    return self.fail(format!("expected 'U', found {}", describe(self.peek())));
                }
                self.bump();
                let b = self.formula()?;
                self.expect(Tok::RBrack)?;
                Ok(Formula::until(op, a, b))
            }
            other => self.fail(format!("expected 'X', 'G', 'F' or '[', found {}", describe(&other))),
        }
    }

    fn vector(&mut self) -> Result<Vec<Amount>, FormulaError> {
        self.expect(Tok::LBrack)?;
        let mut v = Vec::new();
        if *self.peek() == Tok::RBrack {
            self.bump();
            return Ok(v);
        }
        loop {
            match self.bump() {
                Tok::Num(n) => v.push(Amount::finite(n)),
                Tok::Ident(s) if s == "inf" => v.push(Amount::INF),
                other => {
                    self.at -= 1;
                    return self.fail(format!("expected a number or 'inf', found {}", describe(&other)));
                }
            }
            match self.bump() {
                Tok::Comma => continue,
                Tok::RBrack => return Ok(v),
                other => {
                    self.at -= 1;
                    return self.fail(format!("expected ',' or ']', found {}", describe(&other)));
                }
            }
        }
    }
}

/// Parses a formula, returning it together with any warnings.
pub fn parse_with_warnings(text: &str, sig: &Signature) -> Result<(Formula, Vec<String>), FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, sig, warnings: Vec::new() };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.fail(format!("unexpected {} after formula", describe(p.peek())));
    }
    Ok((f, p.warnings))
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, FormulaError> {
    parse_with_warnings(text, sig).map(|(f, _)| f)
}
