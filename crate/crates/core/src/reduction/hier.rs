//! Hierarchical game descriptions: modules of nodes and resource-labelled
//! edges that instantiate other modules, plus a line-oriented text format.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use super::ReductionError;

/// `max * Max + constant`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Coef {
    pub max: i64,
    pub constant: i64,
}

impl Coef {
    pub fn int(c: i64) -> Coef {
        Coef { max: 0, constant: c }
    }

    pub fn of_max(sign: i64) -> Coef {
        Coef { max: sign, constant: 0 }
    }

    pub fn value(self, max: u64) -> i64 {
        self.max * max as i64 + self.constant
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.max, self.constant) {
            (0, c) => write!(f, "{c:+}"),
            (1, 0) => f.write_str("+Max"),
            (-1, 0) => f.write_str("-Max"),
            (1, c) => write!(f, "+(Max{c:+})"),
            (-1, c) => write!(f, "-(Max{:+})", -c),
            (m, c) => write!(f, "{:+}*Max{c:+}", m),
        }
    }
}

/// One summand of an edge label, e.g. `-1 ~x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coef: Coef,
    pub var: String,
    pub partner: bool,
}

impl Term {
    pub fn new(coef: i64, var: &str) -> Term {
        Term { coef: Coef::int(coef), var: var.to_string(), partner: false }
    }

    pub fn bar(coef: i64, var: &str) -> Term {
        Term { coef: Coef::int(coef), var: var.to_string(), partner: true }
    }

    pub fn max_bar(sign: i64, var: &str) -> Term {
        Term { coef: Coef::of_max(sign), var: var.to_string(), partner: true }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}{}", self.coef, if self.partner { "~" } else { "" }, self.var)
    }
}

/// A node of the current module or a port of an instantiated child. As an
/// edge target a child always means its entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Node(String),
    Port(String, usize),
}

impl Endpoint {
    pub fn node(n: &str) -> Endpoint {
        Endpoint::Node(n.to_string())
    }

    pub fn child(n: &str) -> Endpoint {
        Endpoint::Port(n.to_string(), 0)
    }

    pub fn port(n: &str, k: usize) -> Endpoint {
        Endpoint::Port(n.to_string(), k)
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Node(n) => f.write_str(n),
            Endpoint::Port(n, 0) => f.write_str(n),
            Endpoint::Port(n, k) => write!(f, "{n}.{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: Endpoint,
    pub to: Endpoint,
    pub delta: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Use {
    pub name: String,
    pub module: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Module {
    pub name: String,
    pub params: Vec<String>,
    pub nodes: Vec<String>,
    pub uses: Vec<Use>,
    pub entry: Option<Endpoint>,
    pub exits: Vec<Endpoint>,
    pub edges: Vec<Edge>,
    /// Nodes where the second agent picks the edge.
    pub universal: Vec<String>,
    /// Nodes where several edges may be enabled at once by design.
    pub branch: Vec<String>,
    pub labels: Vec<(String, String)>,
}

impl Module {
    pub fn new(name: &str, params: &[&str]) -> Module {
        Module { name: name.into(), params: params.iter().map(|s| s.to_string()).collect(), ..Module::default() }
    }

    pub fn nodes(&mut self, names: &[&str]) -> &mut Self {
        self.nodes.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn using(&mut self, name: &str, module: &str, args: &[&str]) -> &mut Self {
        self.uses.push(Use { name: name.into(), module: module.into(), args: args.iter().map(|s| s.to_string()).collect() });
        self
    }

    pub fn entry(&mut self, e: Endpoint) -> &mut Self {
        self.entry = Some(e);
        self
    }

    pub fn exit(&mut self, e: Endpoint) -> &mut Self {
        self.exits.push(e);
        self
    }

    pub fn edge(&mut self, from: Endpoint, to: Endpoint, delta: Vec<Term>) -> &mut Self {
        self.edges.push(Edge { from, to, delta });
        self
    }

    /// Straight chain `a -> b -> c ...` of unlabelled edges.
    pub fn chain(&mut self, stops: &[Endpoint]) -> &mut Self {
        for w in stops.windows(2) {
            self.edge(w[0].clone(), w[1].clone(), Vec::new());
        }
        self
    }

    pub fn use_of(&self, name: &str) -> Option<&Use> {
        self.uses.iter().find(|u| u.name == name)
    }

    /// A bare name that refers to a child means its port 0.
    pub fn canonical(&self, e: &Endpoint) -> Endpoint {
        match e {
            Endpoint::Node(n) if self.use_of(n).is_some() => Endpoint::Port(n.clone(), 0),
            e => e.clone(),
        }
    }

    fn canonicalize(&mut self) {
        let fix = |m: &Module, e: &mut Endpoint| *e = m.canonical(e);
        let snapshot = self.clone();
        if let Some(e) = self.entry.as_mut() {
            fix(&snapshot, e);
        }
        for e in &mut self.exits {
            fix(&snapshot, e);
        }
        for e in &mut self.edges {
            fix(&snapshot, &mut e.from);
            fix(&snapshot, &mut e.to);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResourceKind {
    /// `x` and its partner `~x`, both starting at `Max`.
    Paired,
    /// A lone resource with its own initial availability.
    Plain(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResourceDecl {
    pub name: String,
    pub kind: ResourceKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchicalGame {
    pub max: u64,
    pub resources: Vec<ResourceDecl>,
    pub modules: Vec<Module>,
    pub main: String,
}

impl HierarchicalGame {
    pub fn new(max: u64, main: &str) -> HierarchicalGame {
        HierarchicalGame { max, resources: Vec::new(), modules: Vec::new(), main: main.into() }
    }

    pub fn pair(&mut self, names: &[&str]) -> &mut Self {
        for n in names {
            self.resources.push(ResourceDecl { name: n.to_string(), kind: ResourceKind::Paired });
        }
        self
    }

    pub fn plain(&mut self, name: &str, initial: u64) -> &mut Self {
        self.resources.push(ResourceDecl { name: name.into(), kind: ResourceKind::Plain(initial) });
        self
    }

    /// Adds or replaces a module.
    pub fn add(&mut self, m: Module) -> &mut Self {
        match self.modules.iter_mut().find(|x| x.name == m.name) {
            Some(slot) => *slot = m,
            None => self.modules.push(m),
        }
        self
    }

    pub fn module(&self, name: &str) -> Option<&Module> {
        self.modules.iter().find(|m| m.name == name)
    }

    pub fn resource(&self, name: &str) -> Option<&ResourceDecl> {
        self.resources.iter().find(|r| r.name == name)
    }

    /// Flat resource names: primaries of pairs, their partners, then the
    /// plain resources, each group in declaration order.
    pub fn flat_resources(&self) -> Vec<String> {
        let paired = self.resources.iter().filter(|r| r.kind == ResourceKind::Paired);
        let mut out: Vec<String> = paired.clone().map(|r| r.name.clone()).collect();
        out.extend(paired.map(|r| format!("~{}", r.name)));
        out.extend(self.resources.iter().filter(|r| r.kind != ResourceKind::Paired).map(|r| r.name.clone()));
        out
    }

    /// Upper bound of a flat resource.
    pub fn bound(&self, flat_name: &str) -> Option<u64> {
        let base = flat_name.strip_prefix('~').unwrap_or(flat_name);
        match &self.resource(base)?.kind {
            ResourceKind::Paired => Some(self.max),
            ResourceKind::Plain(v) if base == flat_name => Some(*v),
            ResourceKind::Plain(_) => None,
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "max {}", self.max).unwrap();
        let pairs: Vec<&str> =
            self.resources.iter().filter(|r| r.kind == ResourceKind::Paired).map(|r| r.name.as_str()).collect();
        if !pairs.is_empty() {
            writeln!(s, "pair {}", pairs.join(" ")).unwrap();
        }
        for r in &self.resources {
            if let ResourceKind::Plain(v) = r.kind {
                writeln!(s, "resource {} {v}", r.name).unwrap();
            }
        }
        writeln!(s, "main {}", self.main).unwrap();
        for m in &self.modules {
            writeln!(s, "\nmodule {}({}) {{", m.name, m.params.join(", ")).unwrap();
            if !m.nodes.is_empty() {
                writeln!(s, "  nodes {}", m.nodes.join(" ")).unwrap();
            }
            for u in &m.uses {
                writeln!(s, "  use {} = {}({})", u.name, u.module, u.args.join(", ")).unwrap();
            }
            if let Some(e) = &m.entry {
                writeln!(s, "  entry {e}").unwrap();
            }
            if !m.exits.is_empty() {
                let ex: Vec<String> = m.exits.iter().map(|e| e.to_string()).collect();
                writeln!(s, "  exit {}", ex.join(" ")).unwrap();
            }
            if !m.universal.is_empty() {
                writeln!(s, "  universal {}", m.universal.join(" ")).unwrap();
            }
            if !m.branch.is_empty() {
                writeln!(s, "  branch {}", m.branch.join(" ")).unwrap();
            }
            for (n, p) in &m.labels {
                writeln!(s, "  label {n} {p}").unwrap();
            }
            for e in &m.edges {
                if e.delta.is_empty() {
                    writeln!(s, "  {} -> {}", e.from, e.to).unwrap();
                } else {
                    let d: Vec<String> = e.delta.iter().map(|t| t.to_string()).collect();
                    writeln!(s, "  {} -> {} : {}", e.from, e.to, d.join(", ")).unwrap();
                }
            }
            s.push_str("}\n");
        }
        s
    }
}

impl fmt::Display for HierarchicalGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_')
}

fn syntax(line: usize, msg: impl Into<String>) -> ReductionError {
    ReductionError::Syntax { line, msg: msg.into() }
}

fn ident(line: usize, s: &str) -> Result<String, ReductionError> {
    if is_ident(s) {
        Ok(s.to_string())
    } else {
        Err(syntax(line, format!("expected a name, found '{s}'")))
    }
}

fn endpoint(line: usize, s: &str) -> Result<Endpoint, ReductionError> {
    match s.split_once('.') {
        Some((n, k)) => {
            let k = k.parse().map_err(|_| syntax(line, format!("bad port in '{s}'")))?;
            Ok(Endpoint::Port(ident(line, n)?, k))
        }
        None => Ok(Endpoint::Node(ident(line, s)?)),
    }
}

fn coef(line: usize, s: &str) -> Result<Coef, ReductionError> {
    let bad = || syntax(line, format!("bad coefficient '{s}'"));
    let (sign, rest) = match s.as_bytes().first() {
        Some(b'+') => (1, &s[1..]),
        Some(b'-') => (-1, &s[1..]),
        _ => (1, s),
    };
    let rest = rest.trim();
    if rest == "Max" {
        return Ok(Coef::of_max(sign));
    }
    if let Some(inner) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let inner = inner.replace(' ', "");
        let body = inner.strip_prefix("Max").ok_or_else(bad)?;
        let c: i64 = if body.is_empty() { 0 } else { body.parse().map_err(|_| bad())? };
        return Ok(Coef { max: sign, constant: sign * c });
    }
    let v: i64 = rest.parse().map_err(|_| bad())?;
    Ok(Coef::int(sign * v))
}

fn term(line: usize, s: &str) -> Result<Term, ReductionError> {
    let s = s.trim();
    let split = s.rfind(char::is_whitespace).ok_or_else(|| syntax(line, format!("bad term '{s}'")))?;
    let (c, v) = (s[..split].trim(), s[split..].trim());
    let (partner, v) = match v.strip_prefix('~') {
        Some(v) => (true, v),
        None => (false, v),
    };
    Ok(Term { coef: coef(line, c)?, var: ident(line, v)?, partner })
}

/// Parses the text format produced by [`HierarchicalGame::render`].
pub fn parse_hierarchical(text: &str) -> Result<HierarchicalGame, ReductionError> {
    let mut h = HierarchicalGame::new(0, "");
    let mut max = None;
    let mut current: Option<Module> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        if let Some(m) = current.as_mut() {
            if l == "}" {
                let mut m = current.take().expect("open module");
                m.canonicalize();
                if h.module(&m.name).is_some() {
                    return Err(syntax(line, format!("module {} defined twice", m.name)));
                }
                h.modules.push(m);
                continue;
            }
            let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
            let words = || rest.split_whitespace();
            match kw {
                "nodes" => {
                    for w in words() {
                        m.nodes.push(ident(line, w)?);
                    }
                }
                "use" => {
                    let (name, call) = rest.split_once('=').ok_or_else(|| syntax(line, "expected 'use name = module(args)'"))?;
                    let call = call.trim();
                    let (module, args) = call.split_once('(').ok_or_else(|| syntax(line, "expected '('"))?;
                    let args = args.strip_suffix(')').ok_or_else(|| syntax(line, "expected ')'"))?;
                    let args = args
                        .split(',')
                        .map(str::trim)
                        .filter(|a| !a.is_empty())
                        .map(|a| ident(line, a))
                        .collect::<Result<_, _>>()?;
                    m.uses.push(Use { name: ident(line, name.trim())?, module: ident(line, module.trim())?, args });
                }
                "entry" => m.entry = Some(endpoint(line, rest.trim())?),
                "exit" => {
                    for w in words() {
                        m.exits.push(endpoint(line, w)?);
                    }
                }
                "universal" => {
                    for w in words() {
                        m.universal.push(ident(line, w)?);
                    }
                }
                "branch" => {
                    for w in words() {
                        m.branch.push(ident(line, w)?);
                    }
                }
                "label" => {
                    let w: Vec<&str> = words().collect();
                    if w.len() != 2 {
                        return Err(syntax(line, "expected 'label node prop'"));
                    }
                    m.labels.push((ident(line, w[0])?, ident(line, w[1])?));
                }
                _ => {
                    let (arrow, label) = match l.split_once(':') {
                        Some((a, b)) => (a, Some(b)),
                        None => (l, None),
                    };
                    let (from, to) = arrow.split_once("->").ok_or_else(|| syntax(line, format!("unknown statement '{l}'")))?;
                    let delta = match label {
                        Some(lbl) => lbl.split(',').map(|t| term(line, t)).collect::<Result<_, _>>()?,
                        None => Vec::new(),
                    };
                    m.edges.push(Edge { from: endpoint(line, from.trim())?, to: endpoint(line, to.trim())?, delta });
                }
            }
            continue;
        }
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match kw {
            "max" => max = Some(rest.trim().parse().map_err(|_| syntax(line, "bad Max"))?),
            "pair" => {
                for w in rest.split_whitespace() {
                    h.pair(&[&ident(line, w)?]);
                }
            }
            "resource" => {
                let w: Vec<&str> = rest.split_whitespace().collect();
                if w.len() != 2 {
                    return Err(syntax(line, "expected 'resource name initial'"));
                }
                let v = w[1].parse().map_err(|_| syntax(line, "bad initial availability"))?;
                h.plain(&ident(line, w[0])?, v);
            }
            "main" => h.main = ident(line, rest.trim())?,
            "module" => {
                let head = rest.trim().strip_suffix('{').ok_or_else(|| syntax(line, "expected '{'"))?.trim();
                let (name, params) = head.split_once('(').ok_or_else(|| syntax(line, "expected '('"))?;
                let params = params.trim().strip_suffix(')').ok_or_else(|| syntax(line, "expected ')'"))?;
                let params =
                    params.split(',').map(str::trim).filter(|p| !p.is_empty()).map(|p| ident(line, p)).collect::<Result<_, _>>()?;
                current = Some(Module { name: ident(line, name.trim())?, params, ..Module::default() });
            }
            _ => return Err(syntax(line, format!("unknown statement '{l}'"))),
        }
    }
    if current.is_some() {
        return Err(syntax(text.lines().count(), "unterminated module"));
    }
    h.max = max.ok_or_else(|| syntax(1, "missing 'max'"))?;
    if h.main.is_empty() {
        return Err(syntax(1, "missing 'main'"));
    }
    let mut seen = HashSet::new();
    for r in &h.resources {
        if !seen.insert(r.name.clone()) {
            return Err(ReductionError::Invalid(format!("resource {} declared twice", r.name)));
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_round_trip() {
        for s in ["+1", "-10", "+Max", "-Max", "-(Max-9)", "+(Max-9)", "+(Max+2)"] {
            assert_eq!(coef(1, s).unwrap().to_string(), s);
        }
        assert_eq!(coef(1, "-(Max-9)").unwrap().value(100), -91);
        assert_eq!(coef(1, "+(Max-9)").unwrap().value(100), 91);
    }

    #[test]
    fn parse_render_round_trip() {
        let text = "\
max 324
pair i muL
resource lv 7
main top

module to_zero(x) {
  nodes loop out end
  entry loop
  exit end
  loop -> loop : -1 x, +1 ~x
  loop -> out : -Max ~x
  out -> end : +Max ~x
}

module top() {
  nodes a b
  use z = to_zero(i)
  entry a
  label b p
  a -> z
  z -> b : -(Max-9) ~i
}
";
        let h = parse_hierarchical(text).unwrap();
        assert_eq!(h.modules.len(), 2);
        assert_eq!(h.flat_resources(), ["i", "muL", "~i", "~muL", "lv"]);
        let again = parse_hierarchical(&h.render()).unwrap();
        assert_eq!(h, again);
        assert_eq!(h.render(), again.render());
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let e = parse_hierarchical("max 4\nmain m\nmodule m() {\n  a => b\n}\n").unwrap_err();
        assert_eq!(e, ReductionError::Syntax { line: 4, msg: "unknown statement 'a => b'".into() });
        assert!(parse_hierarchical("main m\n").is_err());
    }
}
