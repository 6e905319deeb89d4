use std::fmt;

use super::game::{LocationId, PricedGameStructure};

/// One violated structural invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoActions { location: String, agent: String },
    DoNothingNotZero { location: String, agent: String },
    DeltaArity { location: String, agent: String, action: u32, found: usize },
    TransitionNotTotal { location: String, profile: Vec<u32> },
    DeltaOverflow { location: String },
    M0Arity { found: usize },
    PriceArity { found: usize },
    NegativePrice,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoActions { location, agent } => {
                write!(f, "{location}/{agent}: at least one action is required")
            }
            Violation::DoNothingNotZero { location, agent } => {
                write!(f, "{location}/{agent}: do-nothing must be zero")
            }
            Violation::DeltaArity { location, agent, action, found } => {
                write!(f, "{location}/{agent}: action {action} has {found} resource entries")
            }
            Violation::TransitionNotTotal { location, profile } => {
                write!(f, "{location}: transition not total, profile {profile:?} has no target")
            }
            Violation::DeltaOverflow { location } => {
                write!(f, "{location}: joint resource delta overflows")
            }
            Violation::M0Arity { found } => write!(f, "m0 has {found} entries"),
            Violation::PriceArity { found } => write!(f, "price vector has {found} entries"),
            Violation::NegativePrice => f.write_str("prices must be nonnegative"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl PricedGameStructure {
    pub fn validate(&self) -> ValidationReport {
        let r = self.resource_count();
        let mut out = Vec::new();
        if self.m0.len() != r {
            out.push(Violation::M0Arity { found: self.m0.len() });
        }
        for v in self.price.all_vectors() {
            if v.len() != r {
                out.push(Violation::PriceArity { found: v.len() });
                break;
            }
        }
        if self.price.all_vectors().iter().any(|v| v.iter().any(|&p| p < 0)) {
            out.push(Violation::NegativePrice);
        }
        for (qi, loc) in self.locations.iter().enumerate() {
            let q = LocationId(qi);
            let mut arity_ok = true;
            let mut widest = vec![0i128; r];
            for (ai, acts) in self.actions[qi].iter().enumerate() {
                let agent = self.agents[ai].clone();
                if acts.is_empty() {
                    out.push(Violation::NoActions { location: loc.name.clone(), agent });
                    continue;
                }
                if !acts[0].is_zero() {
                    out.push(Violation::DoNothingNotZero { location: loc.name.clone(), agent: agent.clone() });
                }
                for (k, d) in acts.iter().enumerate() {
                    if d.len() != r {
                        arity_ok = false;
                        out.push(Violation::DeltaArity {
                            location: loc.name.clone(),
                            agent: agent.clone(),
                            action: k as u32 + 1,
                            found: d.len(),
                        });
                    }
                }
                if arity_ok {
                    for (i, w) in widest.iter_mut().enumerate() {
                        *w += acts.iter().map(|d| d.0[i].unsigned_abs() as i128).max().unwrap_or(0);
                    }
                }
            }
            if arity_ok && widest.iter().any(|&w| w > i64::MAX as i128) {
                out.push(Violation::DeltaOverflow { location: loc.name.clone() });
            }
            if self.actions[qi].iter().any(|a| a.is_empty()) {
                continue;
            }
            for idx in 0..self.profile_count(q) {
                if self.transitions[qi][idx].is_none() {
                    out.push(Violation::TransitionNotTotal {
                        location: loc.name.clone(),
                        profile: self.profile_at(q, idx),
                    });
                }
            }
        }
        ValidationReport { violations: out }
    }
}
