use std::collections::BTreeMap;
use std::fmt::Write;

use prbatl::checker::{OperatorStats, Witness};
use prbatl::model::Amount;
use prbatl::{Formula, Labeling, PricedGameStructure, Signature};
use serde::{Deserialize, Serialize};

/// One row of a memoryless strategy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub location: String,
    /// Availability per resource; unbounded entries as "inf".
    pub avail: Vec<String>,
    /// Money spent so far by each budget-limited team member.
    pub spent: BTreeMap<String, u64>,
    /// Action index per team member.
    pub choice: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub formula: String,
    pub verdict: bool,
    /// Reachable configurations.
    pub states: usize,
    /// Arena explored by each team operator.
    pub operators: Vec<OperatorStats>,
    /// Wall time of labelling.
    pub micros: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<WitnessRow>>,
}

fn amount(a: Amount) -> String {
    match a.get() {
        Some(v) => v.to_string(),
        None => "inf".into(),
    }
}

impl RunReport {
    pub fn new(game: &PricedGameStructure, phi: &Formula, lab: &Labeling, micros: u64, w: Option<&Witness>) -> RunReport {
        let agent = |a: prbatl::model::AgentId| game.agents()[a.0].clone();
        let witness = w.map(|w| {
            w.entries
                .iter()
                .map(|(s, choice)| WitnessRow {
                    location: game.location(s.config.location).name.clone(),
                    avail: s.config.avail.entries().iter().map(|&a| amount(a)).collect(),
                    spent: s.spent.iter().map(|&(a, v)| (agent(a), v)).collect(),
                    choice: choice.team.iter().zip(&choice.choice).map(|(&a, &c)| (agent(a), c)).collect(),
                })
                .collect()
        });
        RunReport {
            formula: phi.render(&Signature::of(game)),
            verdict: lab.verdict(),
            states: lab.space().len(),
            operators: lab.operator_stats().to_vec(),
            micros,
            witness,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<RunReport, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        writeln!(s, "formula  {}", self.formula).unwrap();
        writeln!(s, "verdict  {}", self.verdict).unwrap();
        writeln!(s, "states   {}", self.states).unwrap();
        writeln!(s, "time     {} us", self.micros).unwrap();
        if !self.operators.is_empty() {
            writeln!(s, "operators").unwrap();
            writeln!(s, "  {:>4}  {:<8} {:>10} {:>10} {:>10}", "node", "kind", "states", "moves", "us").unwrap();
            for op in &self.operators {
                let kind = format!("{:?}", op.kind).to_lowercase();
                writeln!(s, "  {:>4}  {:<8} {:>10} {:>10} {:>10}", op.node, kind, op.arena_states, op.arena_moves, op.micros).unwrap();
            }
        }
        if let Some(rows) = &self.witness {
            writeln!(s, "witness").unwrap();
            for r in rows {
                let spent: Vec<String> = r.spent.iter().map(|(a, v)| format!("{a}={v}")).collect();
                let choice: Vec<String> = r.choice.iter().map(|(a, c)| format!("{a}={c}")).collect();
                writeln!(s, "  {} [{}] spent {{{}}} -> {}", r.location, r.avail.join(","), spent.join(","), choice.join(",")).unwrap();
            }
        }
        s
    }
}
