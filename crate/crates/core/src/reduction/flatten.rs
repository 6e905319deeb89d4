//! Expansion of a hierarchical game into a two-agent priced game structure.

use std::collections::HashMap;

use crate::model::{AgentId, Availability, GameBuilder, LocationId, PriceFunction, PricedGameStructure};

use super::hier::{Endpoint, HierarchicalGame, Module, ResourceKind, Term};
use super::ReductionError;

/// What the flattener knows about one location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocationMeta {
    /// Module that declares the node.
    pub module: String,
    /// Entry or exit of a module instance other than the top one.
    pub boundary: bool,
    /// Declared as a choice point (universal nodes always are).
    pub branch: bool,
    pub universal: bool,
    /// Outgoing edges, not counting the do-nothing loop.
    pub edges: usize,
}

#[derive(Clone, Debug)]
pub struct Flattened {
    pub game: PricedGameStructure,
    pub meta: Vec<LocationMeta>,
    /// `(x, ~x)` resource indices.
    pub pairs: Vec<(usize, usize)>,
    pub max: u64,
    /// Flat locations of the top module's exits.
    pub exits: Vec<LocationId>,
}

impl Flattened {
    pub fn location(&self, name: &str) -> Option<LocationId> {
        self.game.location_id(name)
    }

    pub fn resource(&self, name: &str) -> Option<usize> {
        self.game.resources().iter().position(|r| r == name)
    }
}

struct FlatNode {
    name: String,
    meta: LocationMeta,
    props: Vec<String>,
    out: Vec<(usize, Vec<i64>)>,
}

struct Expander<'h> {
    h: &'h HierarchicalGame,
    index: HashMap<String, usize>,
    nodes: Vec<FlatNode>,
}

/// Entry and exits of one expanded instance.
struct Instance {
    entry: usize,
    exits: Vec<usize>,
}

impl<'h> Expander<'h> {
    fn resolve_var(&self, m: &Module, env: &HashMap<String, String>, var: &str) -> Result<String, ReductionError> {
        if let Some(v) = env.get(var) {
            return Ok(v.clone());
        }
        if m.params.iter().any(|p| p == var) || self.h.resource(var).is_none() {
            return Err(ReductionError::Unbound { module: m.name.clone(), name: var.to_string() });
        }
        Ok(var.to_string())
    }

    fn delta(&self, m: &Module, env: &HashMap<String, String>, terms: &[Term]) -> Result<Vec<i64>, ReductionError> {
        let mut d = vec![0i64; self.index.len()];
        for t in terms {
            let base = self.resolve_var(m, env, &t.var)?;
            let name = if t.partner {
                if self.h.resource(&base).map(|r| &r.kind) != Some(&ResourceKind::Paired) {
                    return Err(ReductionError::Invalid(format!("{} in module {} has no partner", base, m.name)));
                }
                format!("~{base}")
            } else {
                base
            };
            d[self.index[&name]] += t.coef.value(self.h.max);
        }
        Ok(d)
    }

    fn expand(
        &mut self,
        m: &Module,
        env: &HashMap<String, String>,
        prefix: &str,
        stack: &mut Vec<String>,
    ) -> Result<Instance, ReductionError> {
        if stack.contains(&m.name) {
            return Err(ReductionError::Cycle(format!("{} -> {}", stack.join(" -> "), m.name)));
        }
        stack.push(m.name.clone());
        let top = stack.len() == 1;
        let mut local: HashMap<&str, usize> = HashMap::new();
        for n in &m.nodes {
            if local.contains_key(n.as_str()) || m.use_of(n).is_some() {
                return Err(ReductionError::Invalid(format!("name {n} used twice in module {}", m.name)));
            }
            local.insert(n, self.nodes.len());
            self.nodes.push(FlatNode {
                name: format!("{prefix}{n}"),
                meta: LocationMeta {
                    module: m.name.clone(),
                    boundary: false,
                    branch: m.branch.contains(n) || m.universal.contains(n),
                    universal: m.universal.contains(n),
                    edges: 0,
                },
                props: m.labels.iter().filter(|(x, _)| x == n).map(|(_, p)| p.clone()).collect(),
                out: Vec::new(),
            });
        }
        for (x, _) in &m.labels {
            if !local.contains_key(x.as_str()) {
                return Err(ReductionError::Invalid(format!("label on unknown node {x} in module {}", m.name)));
            }
        }
        for x in m.universal.iter().chain(&m.branch) {
            if !local.contains_key(x.as_str()) {
                return Err(ReductionError::Invalid(format!("unknown node {x} in module {}", m.name)));
            }
        }
        let mut kids: HashMap<&str, Instance> = HashMap::new();
        for u in &m.uses {
            if kids.contains_key(u.name.as_str()) {
                return Err(ReductionError::Invalid(format!("instance {} declared twice in module {}", u.name, m.name)));
            }
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
                let actual = self.resolve_var(m, env, a)?;
                if self.h.resource(&actual).is_none() {
                    return Err(ReductionError::Unbound { module: m.name.clone(), name: a.clone() });
                }
                cenv.insert(p.clone(), actual);
            }
            let inst = self.expand(child, &cenv, &format!("{prefix}{}/", u.name), stack)?;
            kids.insert(&u.name, inst);
        }
        let source = |e: &Endpoint| -> Result<usize, ReductionError> {
            match m.canonical(e) {
                Endpoint::Node(n) => local.get(n.as_str()).copied(),
                Endpoint::Port(c, k) => kids.get(c.as_str()).and_then(|i| i.exits.get(k).copied()),
            }
            .ok_or_else(|| ReductionError::Invalid(format!("unknown endpoint {e} in module {}", m.name)))
        };
        let target = |e: &Endpoint| -> Result<usize, ReductionError> {
            match m.canonical(e) {
                Endpoint::Node(n) => local.get(n.as_str()).copied(),
                Endpoint::Port(c, _) => kids.get(c.as_str()).map(|i| i.entry),
            }
            .ok_or_else(|| ReductionError::Invalid(format!("unknown endpoint {e} in module {}", m.name)))
        };
        for e in &m.edges {
            let (from, to) = (source(&e.from)?, target(&e.to)?);
            let d = self.delta(m, env, &e.delta)?;
            if self.nodes[from].meta.universal && d.iter().any(|&x| x != 0) {
                return Err(ReductionError::Invalid(format!("edge out of universal node {} changes resources", e.from)));
            }
            self.nodes[from].out.push((to, d));
        }
        let entry = target(m.entry.as_ref().ok_or_else(|| ReductionError::Invalid(format!("module {} has no entry", m.name)))?)?;
        let exits = m.exits.iter().map(&source).collect::<Result<Vec<_>, _>>()?;
        if !top {
            self.nodes[entry].meta.boundary = true;
            for &x in &exits {
                self.nodes[x].meta.boundary = true;
            }
        }
        stack.pop();
        Ok(Instance { entry, exits })
    }
}

/// Expands `h.main` into a structure with agents `ag1` and `ag2`.
///
/// At an ordinary node `ag1` picks an edge (action `k + 1` is edge `k`);
/// at a universal node `ag2` does and `ag1` only chooses whether to move.
/// Action 1 is the do-nothing loop for both agents everywhere. Prices are
/// zero.
pub fn flatten(h: &HierarchicalGame) -> Result<Flattened, ReductionError> {
    let names = h.flat_resources();
    let index: HashMap<String, usize> = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
    let main = h.module(&h.main).ok_or_else(|| ReductionError::UnknownModule(h.main.clone()))?;
    if !main.params.is_empty() {
        return Err(ReductionError::Arity { module: main.name.clone(), expected: 0, found: main.params.len() });
    }
    let mut ex = Expander { h, index, nodes: Vec::new() };
    let inst = ex.expand(main, &HashMap::new(), "", &mut Vec::new())?;

    let r = names.len();
    let mut b = GameBuilder::new(["ag1", "ag2"], names.iter().map(String::as_str));
    let ids: Vec<LocationId> = ex.nodes.iter().map(|n| b.location(n.name.clone(), n.props.iter().map(String::as_str))).collect();
    let (ag1, ag2) = (AgentId(0), AgentId(1));
    for (i, n) in ex.nodes.iter_mut().enumerate() {
        let q = ids[i];
        let k = n.out.len();
        n.meta.edges = k;
        let zero = vec![0i64; r];
        if n.meta.universal && k > 0 {
            b.actions(q, ag1, vec![zero.clone(), zero.clone()]);
            b.actions(q, ag2, vec![zero; k]);
            for (j, (t, _)) in n.out.iter().enumerate() {
                b.transition(q, &[1, j as u32 + 1], q);
                b.transition(q, &[2, j as u32 + 1], ids[*t]);
            }
        } else {
            let mut acts = vec![zero.clone()];
            acts.extend(n.out.iter().map(|(_, d)| d.clone()));
            b.actions(q, ag1, acts);
            b.actions(q, ag2, vec![zero]);
            b.transition(q, &[1, 1], q);
            for (j, (t, _)) in n.out.iter().enumerate() {
                b.transition(q, &[j as u32 + 2, 1], ids[*t]);
            }
        }
    }
    let m0: Vec<u64> = names.iter().map(|n| h.bound(n).expect("declared")).collect();
    b.initial(ids[inst.entry]).m0(Availability::finite(&m0)).price(PriceFunction::zero(r));
    let game = b.build()?;
    let pairs = names
        .iter()
        .enumerate()
        .filter(|(_, n)| h.resource(n).map(|d| &d.kind) == Some(&ResourceKind::Paired))
        .map(|(i, n)| (i, names.iter().position(|x| *x == format!("~{n}")).expect("partner")))
        .collect();
    Ok(Flattened {
        game,
        meta: ex.nodes.into_iter().map(|n| n.meta).collect(),
        pairs,
        max: h.max,
        exits: inst.exits.iter().map(|&x| ids[x]).collect(),
    })
}

/// A copy of `h` whose top module is a single instance of `module(args)`
/// with the same exits.
pub fn instance(h: &HierarchicalGame, module: &str, args: &[&str]) -> Result<HierarchicalGame, ReductionError> {
    let m = h.module(module).ok_or_else(|| ReductionError::UnknownModule(module.to_string()))?;
    let mut top = Module::new("instance_top", &[]);
    top.using("g", module, args).entry(Endpoint::child("g"));
    for k in 0..m.exits.len() {
        top.exit(Endpoint::port("g", k));
    }
    let mut out = h.clone();
    out.add(top);
    out.main = "instance_top".into();
    Ok(out)
}
