use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::amount::{offset_availability, Amount, Availability, ResourceDelta};
use super::ModelError;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocationId(pub usize);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub usize);

impl fmt::Display for LocationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub name: String,
    pub props: BTreeSet<String>,
}

/// Price function ρ, restricted to serializable forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PriceFunction {
    Constant(Vec<i64>),
    /// Lookup keyed by (location, agent, availability), falling back to `default`.
    Table {
        entries: HashMap<(LocationId, AgentId), HashMap<Vec<Amount>, Vec<i64>>>,
        default: Vec<i64>,
    },
}

impl PriceFunction {
    pub fn zero(r: usize) -> Self {
        PriceFunction::Constant(vec![0; r])
    }

    pub fn unit(r: usize) -> Self {
        PriceFunction::Constant(vec![1; r])
    }

    pub fn lookup(&self, m: &[Amount], q: LocationId, a: AgentId) -> &[i64] {
        match self {
            PriceFunction::Constant(v) => v,
            PriceFunction::Table { entries, default } => entries
                .get(&(q, a))
                .and_then(|by_avail| by_avail.get(m))
                .unwrap_or(default),
        }
    }

    /// Every price vector the function can return.
    pub(crate) fn all_vectors(&self) -> Vec<&Vec<i64>> {
        match self {
            PriceFunction::Constant(v) => vec![v],
            PriceFunction::Table { entries, default } => std::iter::once(default)
                .chain(entries.values().flat_map(|m| m.values()))
                .collect(),
        }
    }
}

/// A pair (location, current global availability).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Configuration {
    pub location: LocationId,
    pub avail: Availability,
}

impl Configuration {
    pub fn new(location: LocationId, avail: Availability) -> Self {
        Configuration { location, avail }
    }
}

/// Action selection for the members of a team, aligned with `team`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct TeamChoice {
    pub team: Vec<AgentId>,
    pub choice: Vec<u32>,
}

impl TeamChoice {
    pub fn new(pairs: impl IntoIterator<Item = (AgentId, u32)>) -> Self {
        let sorted: BTreeMap<AgentId, u32> = pairs.into_iter().collect();
        TeamChoice {
            team: sorted.keys().copied().collect(),
            choice: sorted.values().copied().collect(),
        }
    }

    pub fn do_nothing(team: &[AgentId]) -> Self {
        TeamChoice::new(team.iter().map(|&a| (a, 1)))
    }

    pub fn action_of(&self, a: AgentId) -> Option<u32> {
        self.team.iter().position(|&x| x == a).map(|i| self.choice[i])
    }
}

/// A priced game structure: locations, per-agent actions with resource
/// deltas, a total transition table, a price function and the initial
/// availability `m0`.
///
/// Actions are 1-based; action 1 of every agent is the do-nothing action.
#[derive(Clone, Debug)]
pub struct PricedGameStructure {
    pub(crate) agents: Vec<String>,
    pub(crate) resources: Vec<String>,
    pub(crate) locations: Vec<Location>,
    pub(crate) initial: LocationId,
    pub(crate) m0: Availability,
    /// `actions[q][a][k]` is the delta of action `k + 1`.
    pub(crate) actions: Vec<Vec<Vec<ResourceDelta>>>,
    /// Dense table indexed by [`PricedGameStructure::profile_index`].
    pub(crate) transitions: Vec<Vec<Option<LocationId>>>,
    pub(crate) price: PriceFunction,
}

impl PricedGameStructure {
    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn resource_count(&self) -> usize {
        self.resources.len()
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn resources(&self) -> &[String] {
        &self.resources
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn location(&self, q: LocationId) -> &Location {
        &self.locations[q.0]
    }

    pub fn location_id(&self, name: &str) -> Option<LocationId> {
        self.locations.iter().position(|l| l.name == name).map(LocationId)
    }

    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|a| a == name).map(AgentId)
    }

    pub fn initial(&self) -> LocationId {
        self.initial
    }

    pub fn m0(&self) -> &Availability {
        &self.m0
    }

    pub fn price_function(&self) -> &PriceFunction {
        &self.price
    }

    pub fn initial_configuration(&self) -> Configuration {
        Configuration::new(self.initial, self.m0.clone())
    }

    pub fn all_agents(&self) -> Vec<AgentId> {
        (0..self.agents.len()).map(AgentId).collect()
    }

    /// Replaces `m0`; used to derive variants of a structure.
    pub fn with_m0(mut self, m0: Availability) -> Self {
        self.m0 = m0;
        self
    }

    pub fn with_price(mut self, price: PriceFunction) -> Self {
        self.price = price;
        self
    }

    /// Number of actions `d(q, a)`.
    pub fn action_count(&self, q: LocationId, a: AgentId) -> u32 {
        self.actions[q.0][a.0].len() as u32
    }

    pub fn profile_count(&self, q: LocationId) -> usize {
        self.actions[q.0].iter().map(|acts| acts.len()).product()
    }

    /// Mixed-radix index of a profile; agent 0 is the most significant digit.
    pub fn profile_index(&self, q: LocationId, profile: &[u32]) -> Result<usize, ModelError> {
        self.check_location(q)?;
        if profile.len() != self.agents.len() {
            return Err(ModelError::ProfileArity { expected: self.agents.len(), found: profile.len() });
        }
        let mut idx = 0usize;
        for (a, &act) in profile.iter().enumerate() {
            let d = self.actions[q.0][a].len();
            if act == 0 || act as usize > d {
                return Err(ModelError::ActionOutOfRange { location: q, agent: AgentId(a), action: act });
            }
            idx = idx * d + (act as usize - 1);
        }
        Ok(idx)
    }

    pub fn profile_at(&self, q: LocationId, mut idx: usize) -> Vec<u32> {
        let mut profile = vec![0; self.agents.len()];
        for a in (0..self.agents.len()).rev() {
            let d = self.actions[q.0][a].len().max(1);
            profile[a] = (idx % d) as u32 + 1;
            idx /= d;
        }
        profile
    }

    /// `δ(q, α)`; `None` when the table has no entry.
    pub fn transition(&self, q: LocationId, profile: &[u32]) -> Result<Option<LocationId>, ModelError> {
        let idx = self.profile_index(q, profile)?;
        Ok(self.transitions[q.0][idx])
    }

    pub(crate) fn transition_at(&self, q: LocationId, idx: usize) -> Option<LocationId> {
        self.transitions[q.0][idx]
    }

    pub fn qty(&self, q: LocationId, a: AgentId, action: u32) -> Result<&ResourceDelta, ModelError> {
        self.check_location(q)?;
        self.check_agent(a)?;
        let acts = &self.actions[q.0][a.0];
        if action == 0 || action as usize > acts.len() {
            return Err(ModelError::ActionOutOfRange { location: q, agent: a, action });
        }
        Ok(&acts[action as usize - 1])
    }

    /// Sum of `qty` over the members of `team` under `profile`.
    pub fn qty_team(&self, q: LocationId, team: &[AgentId], profile: &[u32]) -> Result<ResourceDelta, ModelError> {
        self.profile_index(q, profile)?;
        let mut sum = ResourceDelta::zero(self.resource_count());
        for &a in team {
            self.check_agent(a)?;
            sum.add_assign(self.qty(q, a, profile[a.0])?);
        }
        Ok(sum)
    }

    pub fn consd(&self, q: LocationId, a: AgentId, action: u32) -> Result<Vec<u64>, ModelError> {
        Ok(self.qty(q, a, action)?.consumption())
    }

    pub fn price(&self, m: &Availability, q: LocationId, a: AgentId) -> &[i64] {
        self.price.lookup(m.entries(), q, a)
    }

    /// One joint step; `Ok(None)` when the resulting availability leaves `[0, m0]`.
    pub fn step(&self, c: &Configuration, profile: &[u32]) -> Result<Option<Configuration>, ModelError> {
        let idx = self.profile_index(c.location, profile)?;
        let delta = self.qty_team(c.location, &self.all_agents(), profile)?;
        let Some(avail) = offset_availability(c.avail.entries(), delta.entries(), self.m0.entries()) else {
            return Ok(None);
        };
        let target = self.transitions[c.location.0][idx]
            .ok_or(ModelError::MissingTransition { location: c.location, profile: profile.to_vec() })?;
        Ok(Some(Configuration::new(target, Availability(avail))))
    }

    /// A team choice is feasible when the team's own delta keeps the
    /// availability within `[0, m0]`; opponents' actions are not counted.
    pub fn team_feasible(&self, c: &Configuration, tc: &TeamChoice) -> Result<bool, ModelError> {
        let q = c.location;
        let mut delta = ResourceDelta::zero(self.resource_count());
        for (&a, &act) in tc.team.iter().zip(&tc.choice) {
            delta.add_assign(self.qty(q, a, act)?);
        }
        Ok(offset_availability(c.avail.entries(), delta.entries(), self.m0.entries()).is_some())
    }

    /// Configurations reachable from `⟨q0, m0⟩` through defined steps, in BFS order.
    pub fn reachable(&self) -> Vec<Configuration> {
        let start = self.initial_configuration();
        let mut seen: HashMap<Configuration, ()> = HashMap::new();
        let mut order = vec![start.clone()];
        seen.insert(start.clone(), ());
        let mut queue = VecDeque::from([start]);
        let all = self.all_agents();
        while let Some(c) = queue.pop_front() {
            for idx in 0..self.profile_count(c.location) {
                let profile = self.profile_at(c.location, idx);
                let Ok(delta) = self.qty_team(c.location, &all, &profile) else { continue };
                let Some(avail) = offset_availability(c.avail.entries(), delta.entries(), self.m0.entries()) else {
                    continue;
                };
                let Some(target) = self.transitions[c.location.0][idx] else { continue };
                let next = Configuration::new(target, Availability(avail));
                if seen.insert(next.clone(), ()).is_none() {
                    order.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        order
    }

    pub(crate) fn check_location(&self, q: LocationId) -> Result<(), ModelError> {
        if q.0 < self.locations.len() {
            Ok(())
        } else {
            Err(ModelError::UnknownLocation(q))
        }
    }

    pub(crate) fn check_agent(&self, a: AgentId) -> Result<(), ModelError> {
        if a.0 < self.agents.len() {
            Ok(())
        } else {
            Err(ModelError::UnknownAgent(a))
        }
    }
}

/// Incremental construction of a [`PricedGameStructure`].
///
/// Structural mistakes (unknown ids, malformed profiles) are reported by
/// [`GameBuilder::build`]; semantic ones are left for
/// [`PricedGameStructure::validate`].
#[derive(Clone, Debug)]
pub struct GameBuilder {
    agents: Vec<String>,
    resources: Vec<String>,
    locations: Vec<Location>,
    initial: Option<LocationId>,
    m0: Option<Availability>,
    actions: Vec<Vec<Vec<ResourceDelta>>>,
    transitions: Vec<BTreeMap<Vec<u32>, LocationId>>,
    price: Option<PriceFunction>,
}

impl GameBuilder {
    pub fn new<S: Into<String>>(agents: impl IntoIterator<Item = S>, resources: impl IntoIterator<Item = S>) -> Self {
        GameBuilder {
            agents: agents.into_iter().map(Into::into).collect(),
            resources: resources.into_iter().map(Into::into).collect(),
            locations: Vec::new(),
            initial: None,
            m0: None,
            actions: Vec::new(),
            transitions: Vec::new(),
            price: None,
        }
    }

    pub fn resource_count(&self) -> usize {
        self.resources.len()
    }

    /// Adds a location whose agents each have only the do-nothing action.
    pub fn location<S: Into<String>>(&mut self, name: impl Into<String>, props: impl IntoIterator<Item = S>) -> LocationId {
        let id = LocationId(self.locations.len());
        self.locations.push(Location { name: name.into(), props: props.into_iter().map(Into::into).collect() });
        let r = self.resources.len();
        self.actions.push(vec![vec![ResourceDelta::zero(r)]; self.agents.len()]);
        self.transitions.push(BTreeMap::new());
        id
    }

    /// Sets the deltas of all actions of `agent` at `q`; entry 0 is action 1.
    pub fn actions(&mut self, q: LocationId, agent: AgentId, deltas: Vec<Vec<i64>>) -> &mut Self {
        self.actions[q.0][agent.0] = deltas.into_iter().map(ResourceDelta).collect();
        self
    }

    pub fn transition(&mut self, q: LocationId, profile: &[u32], target: LocationId) -> &mut Self {
        self.transitions[q.0].insert(profile.to_vec(), target);
        self
    }

    pub fn initial(&mut self, q: LocationId) -> &mut Self {
        self.initial = Some(q);
        self
    }

    pub fn m0(&mut self, m0: Availability) -> &mut Self {
        self.m0 = Some(m0);
        self
    }

    pub fn price(&mut self, price: PriceFunction) -> &mut Self {
        self.price = Some(price);
        self
    }

    pub fn build(self) -> Result<PricedGameStructure, ModelError> {
        let r = self.resources.len();
        let n = self.agents.len();
        if self.locations.is_empty() {
            return Err(ModelError::NoLocations);
        }
        let initial = self.initial.unwrap_or(LocationId(0));
        if initial.0 >= self.locations.len() {
            return Err(ModelError::UnknownLocation(initial));
        }
        let mut game = PricedGameStructure {
            agents: self.agents,
            resources: self.resources,
            locations: self.locations,
            initial,
            m0: self.m0.unwrap_or_else(|| Availability(vec![Amount::ZERO; r])),
            actions: self.actions,
            transitions: Vec::new(),
            price: self.price.unwrap_or_else(|| PriceFunction::zero(r)),
        };
        let mut dense = Vec::with_capacity(game.locations.len());
        for (qi, table) in self.transitions.iter().enumerate() {
            let q = LocationId(qi);
            let mut row = vec![None; game.profile_count(q)];
            for (profile, &target) in table {
                if profile.len() != n {
                    return Err(ModelError::ProfileArity { expected: n, found: profile.len() });
                }
                let idx = game.profile_index(q, profile)?;
                game.check_location(target)?;
                row[idx] = Some(target);
            }
            dense.push(row);
        }
        game.transitions = dense;
        Ok(game)
    }
}
