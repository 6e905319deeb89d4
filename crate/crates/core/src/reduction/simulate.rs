//! Deterministic execution of gadgets, both on the hierarchical description
//! and on its flattening.

use std::collections::{BTreeMap, HashMap};

use crate::model::{Amount, Availability, Configuration, LocationId};

use super::flatten::Flattened;
use super::hier::{Endpoint, HierarchicalGame, Module, ResourceKind};
use super::ReductionError;

/// Availability per flat resource name (partners as `~x`).
pub type Valuation = BTreeMap<String, u64>;

/// Steps after which a simulation is abandoned.
pub const STEP_LIMIT: u64 = 200_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimOutcome {
    pub valuation: Valuation,
    pub port: usize,
    pub steps: u64,
}

/// A valuation with `x + ~x = Max` for every pair: listed primaries get the
/// given value, the others 0; plain resources get the given value or 0.
pub fn balanced(h: &HierarchicalGame, values: &[(&str, u64)]) -> Valuation {
    let given: HashMap<&str, u64> = values.iter().copied().collect();
    let mut v = Valuation::new();
    for r in &h.resources {
        let x = given.get(r.name.as_str()).copied().unwrap_or(0);
        v.insert(r.name.clone(), x);
        if r.kind == ResourceKind::Paired {
            v.insert(format!("~{}", r.name), h.max.saturating_sub(x));
        }
    }
    v
}

struct Machine<'h> {
    h: &'h HierarchicalGame,
    names: Vec<String>,
    index: HashMap<String, usize>,
    bound: Vec<u64>,
    val: Vec<u64>,
    steps: u64,
}

impl<'h> Machine<'h> {
    fn resolve(&self, m: &Module, env: &HashMap<String, String>, var: &str) -> Result<String, ReductionError> {
        match env.get(var) {
            Some(v) => Ok(v.clone()),
            None if !m.params.iter().any(|p| p == var) && self.h.resource(var).is_some() => Ok(var.to_string()),
            None => Err(ReductionError::Unbound { module: m.name.clone(), name: var.to_string() }),
        }
    }

    fn run(&mut self, m: &Module, env: &HashMap<String, String>, path: &str, depth: usize) -> Result<usize, ReductionError> {
        if depth > 64 {
            return Err(ReductionError::Cycle(path.to_string()));
        }
        let mut deltas: Vec<Vec<(usize, i64)>> = Vec::with_capacity(m.edges.len());
        for e in &m.edges {
            let mut d = Vec::new();
            for t in &e.delta {
                let base = self.resolve(m, env, &t.var)?;
                let name = if t.partner { format!("~{base}") } else { base };
                let idx = *self.index.get(&name).ok_or_else(|| ReductionError::Invalid(format!("{name} has no partner")))?;
                d.push((idx, t.coef.value(self.h.max)));
            }
            deltas.push(d);
        }
        let froms: Vec<Endpoint> = m.edges.iter().map(|e| m.canonical(&e.from)).collect();
        let exits: Vec<Endpoint> = m.exits.iter().map(|e| m.canonical(e)).collect();
        let mut at = m.canonical(m.entry.as_ref().ok_or_else(|| ReductionError::Invalid(format!("module {} has no entry", m.name)))?);
        loop {
            let src = match at {
                Endpoint::Node(ref n) => {
                    if let Some(k) = exits.iter().position(|e| *e == at) {
                        return Ok(k);
                    }
                    if !m.nodes.contains(n) {
                        return Err(ReductionError::Invalid(format!("unknown node {n} in module {}", m.name)));
                    }
                    at.clone()
                }
                Endpoint::Port(ref c, _) => {
                    let u = m.use_of(c).ok_or_else(|| ReductionError::Invalid(format!("unknown instance {c}")))?;
                    let child = self.h.module(&u.module).ok_or_else(|| ReductionError::UnknownModule(u.module.clone()))?;
                    if child.params.len() != u.args.len() {
                        return Err(ReductionError::Arity {
                            module: u.module.clone(),
                            expected: child.params.len(),
                            found: u.args.len(),
                        });
                    }
                    let mut cenv = HashMap::new();
                    for (p, a) in child.params.iter().zip(&u.args) {
                        cenv.insert(p.clone(), self.resolve(m, env, a)?);
                    }
                    let k = self.run(child, &cenv, &format!("{path}{c}/"), depth + 1)?;
                    let src = Endpoint::Port(c.clone(), k);
                    if let Some(x) = exits.iter().position(|e| *e == src) {
                        return Ok(x);
                    }
                    src
                }
            };
            let mut chosen = None;
            let mut count = 0;
            for (i, f) in froms.iter().enumerate() {
                if *f == src && self.enabled(&deltas[i]) {
                    count += 1;
                    chosen = Some(i);
                }
            }
            let here = format!("{path}{src}");
            match (count, chosen) {
                (1, Some(i)) => {
                    for &(x, d) in &deltas[i] {
                        self.val[x] = (self.val[x] as i64 + d) as u64;
                    }
                    at = m.canonical(&m.edges[i].to);
                }
                (0, _) => return Err(ReductionError::Stuck(here)),
                _ => return Err(ReductionError::Nondeterministic { node: here, count }),
            }
            self.steps += 1;
            if self.steps > STEP_LIMIT {
                return Err(ReductionError::StepLimit);
            }
        }
    }

    fn enabled(&self, d: &[(usize, i64)]) -> bool {
        // Terms on the same resource are applied together.
        let mut next: Vec<(usize, i64)> = Vec::with_capacity(d.len());
        for &(x, v) in d {
            match next.iter_mut().find(|(y, _)| *y == x) {
                Some(slot) => slot.1 += v,
                None => next.push((x, v)),
            }
        }
        next.iter().all(|&(x, v)| {
            let n = self.val[x] as i64 + v;
            n >= 0 && n as u64 <= self.bound[x]
        })
    }
}

/// Runs `module(args)` from `entry` on the hierarchical description. At
/// every node exactly one edge must be enabled by the availability bounds.
pub fn simulate_module(
    h: &HierarchicalGame,
    module: &str,
    args: &[&str],
    entry: &Valuation,
) -> Result<SimOutcome, ReductionError> {
    let names = h.flat_resources();
    let bound: Vec<u64> = names.iter().map(|n| h.bound(n).expect("declared")).collect();
    let mut val = Vec::with_capacity(names.len());
    for (n, &b) in names.iter().zip(&bound) {
        let v = *entry.get(n).ok_or_else(|| ReductionError::Invalid(format!("entry valuation misses {n}")))?;
        if v > b {
            return Err(ReductionError::Invalid(format!("{n} = {v} exceeds its bound {b}")));
        }
        val.push(v);
    }
    for r in h.resources.iter().filter(|r| r.kind == ResourceKind::Paired) {
        if entry[&r.name] + entry[&format!("~{}", r.name)] != h.max {
            return Err(ReductionError::Invalid(format!("{} and ~{} do not sum to Max", r.name, r.name)));
        }
    }
    let index = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
    let mut sim = Machine { h, names, index, bound, val, steps: 0 };
    let m = h.module(module).ok_or_else(|| ReductionError::UnknownModule(module.to_string()))?;
    if m.params.len() != args.len() {
        return Err(ReductionError::Arity { module: module.to_string(), expected: m.params.len(), found: args.len() });
    }
    let env: HashMap<String, String> = m.params.iter().cloned().zip(args.iter().map(|a| a.to_string())).collect();
    for a in env.values() {
        if h.resource(a).is_none() {
            return Err(ReductionError::Unbound { module: module.to_string(), name: a.clone() });
        }
    }
    let port = sim.run(m, &env, "", 0)?;
    let valuation = sim.names.iter().cloned().zip(sim.val.iter().copied()).collect();
    Ok(SimOutcome { valuation, port, steps: sim.steps })
}

/// Follows the unique enabled non-idle profile of a flattened structure
/// from `start` until a location without outgoing edges.
pub fn simulate_flat(f: &Flattened, start: &Configuration) -> Result<(Configuration, u64), ReductionError> {
    let g = &f.game;
    let mut c = start.clone();
    let mut steps = 0u64;
    loop {
        let q = c.location;
        let mut next = None;
        let mut count = 0;
        for idx in 0..g.profile_count(q) {
            let profile = g.profile_at(q, idx);
            // ag1 idling always loops in place.
            if profile[0] == 1 {
                continue;
            }
            if let Some(s) = g.step(&c, &profile)? {
                count += 1;
                next = Some(s);
            }
        }
        match (count, next) {
            (0, _) if f.meta[q.0].edges == 0 => return Ok((c, steps)),
            (0, _) => return Err(ReductionError::Stuck(g.location(q).name.clone())),
            (1, Some(s)) => c = s,
            _ => return Err(ReductionError::Nondeterministic { node: g.location(q).name.clone(), count }),
        }
        steps += 1;
        if steps > STEP_LIMIT {
            return Err(ReductionError::StepLimit);
        }
    }
}

/// `v` as an availability vector of `f`.
pub fn availability(f: &Flattened, v: &Valuation) -> Result<Availability, ReductionError> {
    let entries = f
        .game
        .resources()
        .iter()
        .map(|n| v.get(n).map(|&x| Amount::finite(x)).ok_or_else(|| ReductionError::Invalid(format!("valuation misses {n}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Availability(entries))
}

/// Inverse of [`availability`].
pub fn valuation(f: &Flattened, a: &Availability) -> Valuation {
    f.game.resources().iter().cloned().zip(a.entries().iter().map(|x| x.raw())).collect()
}

/// Port index of `q` among the top module's exits.
pub fn port_of(f: &Flattened, q: LocationId) -> Option<usize> {
    f.exits.iter().position(|&x| x == q)
}
