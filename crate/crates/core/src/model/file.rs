//! JSON document format for priced game structures.
//!
//! ```json
//! {
//!   "agents": ["a1", "a2"],
//!   "resources": ["R1"],
//!   "locations": [{"name": "q0", "props": ["p"]}, {"name": "q1"}],
//!   "initial": "q0",
//!   "m0": [1],
//!   "actions": {"q0": {"a1": [[0], [-1]]}},
//!   "transitions": {"q0": {"1,1": "q0", "2,1": "q1"}, "q1": {"1,1": "q1"}},
//!   "prices": {"constant": [0]}
//! }
//! ```
//!
//! Omitted action lists default to the single do-nothing action. Unbounded
//! amounts are written as the string `"inf"`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::amount::{Amount, Availability};
use super::game::{AgentId, GameBuilder, LocationId, PriceFunction, PricedGameStructure};
use super::ModelError;

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct GameFile {
    agents: Vec<String>,
    resources: Vec<String>,
    locations: Vec<LocationEntry>,
    initial: String,
    m0: Availability,
    #[serde(default)]
    actions: BTreeMap<String, BTreeMap<String, Vec<Vec<i64>>>>,
    transitions: BTreeMap<String, BTreeMap<String, String>>,
    prices: PricesEntry,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct LocationEntry {
    name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    props: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(untagged)]
enum PricesEntry {
    Constant { constant: Vec<i64> },
    Table { table: Vec<PriceRow>, default: Vec<i64> },
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct PriceRow {
    location: String,
    agent: String,
    avail: Vec<Amount>,
    price: Vec<i64>,
}

fn format_err(msg: impl Into<String>) -> ModelError {
    ModelError::Format(msg.into())
}

pub fn parse_profile(key: &str) -> Result<Vec<u32>, ModelError> {
    key.split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| format_err(format!("bad action profile {key:?}"))))
        .collect()
}

pub fn render_profile(profile: &[u32]) -> String {
    profile.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
}

impl PricedGameStructure {
    pub fn from_json(text: &str) -> Result<PricedGameStructure, ModelError> {
        let file: GameFile = serde_json::from_str(text).map_err(|e| format_err(e.to_string()))?;
        let mut b = GameBuilder::new(file.agents.clone(), file.resources.clone());
        let mut loc_ids = HashMap::new();
        for entry in &file.locations {
            if loc_ids.contains_key(&entry.name) {
                return Err(format_err(format!("duplicate location {:?}", entry.name)));
            }
            let id = b.location(entry.name.clone(), entry.props.iter().cloned());
            loc_ids.insert(entry.name.clone(), id);
        }
        let loc = |name: &str| -> Result<LocationId, ModelError> {
            loc_ids.get(name).copied().ok_or_else(|| format_err(format!("unknown location {name:?}")))
        };
        let agent = |name: &str| -> Result<AgentId, ModelError> {
            file.agents
                .iter()
                .position(|a| a == name)
                .map(AgentId)
                .ok_or_else(|| format_err(format!("unknown agent {name:?}")))
        };
        for (lname, per_agent) in &file.actions {
            let q = loc(lname)?;
            for (aname, deltas) in per_agent {
                b.actions(q, agent(aname)?, deltas.clone());
            }
        }
        for (lname, table) in &file.transitions {
            let q = loc(lname)?;
            for (key, target) in table {
                b.transition(q, &parse_profile(key)?, loc(target)?);
            }
        }
        b.initial(loc(&file.initial)?);
        b.m0(file.m0.clone());
        let price = match &file.prices {
            PricesEntry::Constant { constant } => PriceFunction::Constant(constant.clone()),
            PricesEntry::Table { table, default } => {
                let mut entries: HashMap<_, HashMap<_, _>> = HashMap::new();
                for row in table {
                    entries
                        .entry((loc(&row.location)?, agent(&row.agent)?))
                        .or_default()
                        .insert(row.avail.clone(), row.price.clone());
                }
                PriceFunction::Table { entries, default: default.clone() }
            }
        };
        b.price(price);
        b.build()
    }

    pub fn to_json(&self) -> String {
        let name = |q: LocationId| self.locations[q.0].name.clone();
        let mut actions = BTreeMap::new();
        for (qi, per_agent) in self.actions.iter().enumerate() {
            let mut entry = BTreeMap::new();
            for (ai, deltas) in per_agent.iter().enumerate() {
                if deltas.len() == 1 && deltas[0].is_zero() {
                    continue;
                }
                entry.insert(self.agents[ai].clone(), deltas.iter().map(|d| d.0.clone()).collect());
            }
            if !entry.is_empty() {
                actions.insert(name(LocationId(qi)), entry);
            }
        }
        let mut transitions = BTreeMap::new();
        for (qi, row) in self.transitions.iter().enumerate() {
            let q = LocationId(qi);
            let table: BTreeMap<String, String> = row
                .iter()
                .enumerate()
                .filter_map(|(idx, t)| t.map(|t| (render_profile(&self.profile_at(q, idx)), name(t))))
                .collect();
            transitions.insert(name(q), table);
        }
        let prices = match &self.price {
            PriceFunction::Constant(v) => PricesEntry::Constant { constant: v.clone() },
            PriceFunction::Table { entries, default } => {
                let mut table: Vec<PriceRow> = entries
                    .iter()
                    .flat_map(|(&(q, a), by_avail)| {
                        by_avail.iter().map(move |(avail, price)| PriceRow {
                            location: name(q),
                            agent: self.agents[a.0].clone(),
                            avail: avail.clone(),
                            price: price.clone(),
                        })
                    })
                    .collect();
                table.sort_by(|x, y| (&x.location, &x.agent, &x.avail).cmp(&(&y.location, &y.agent, &y.avail)));
                PricesEntry::Table { table, default: default.clone() }
            }
        };
        let file = GameFile {
            agents: self.agents.clone(),
            resources: self.resources.clone(),
            locations: self
                .locations
                .iter()
                .map(|l| LocationEntry { name: l.name.clone(), props: l.props.iter().cloned().collect() })
                .collect(),
            initial: name(self.initial),
            m0: self.m0.clone(),
            actions,
            transitions,
            prices,
        };
        serde_json::to_string_pretty(&file).expect("game structures always serialize")
    }
}
