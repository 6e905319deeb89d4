use crate::exec::{ExecPolicy, PAR_THRESHOLD};
use crate::model::{Amount, Availability, Configuration, LocationId, PricedGameStructure};

use super::intern::Interner;

pub(crate) const UNDEFINED: u32 = u32::MAX;

/// Total delta and target of every profile at one location.
#[derive(Clone, Debug)]
struct ProfileTable {
    /// `profiles * r` entries.
    delta: Vec<i64>,
    target: Vec<Option<LocationId>>,
}

/// The configurations reachable from `⟨q0, m0⟩`, numbered in BFS order,
/// with the successor of every (configuration, profile) pair.
#[derive(Clone, Debug)]
pub struct StateSpace {
    r: usize,
    store: Interner,
    succ_start: Vec<usize>,
    succ: Vec<u32>,
}

impl StateSpace {
    pub fn build(game: &PricedGameStructure, policy: ExecPolicy) -> StateSpace {
        let r = game.resource_count();
        let all = game.all_agents();
        let tables: Vec<ProfileTable> = (0..game.locations().len())
            .map(|q| {
                let q = LocationId(q);
                let n = game.profile_count(q);
                let mut delta = Vec::with_capacity(n * r);
                let mut target = Vec::with_capacity(n);
                for idx in 0..n {
                    let profile = game.profile_at(q, idx);
                    let d = game.qty_team(q, &all, &profile).expect("profile in range");
                    delta.extend_from_slice(d.entries());
                    target.push(game.transition_at(q, idx));
                }
                ProfileTable { delta, target }
            })
            .collect();
        let m0 = game.m0().entries().to_vec();

        let mut store = Interner::new(1 + r);
        let init = game.initial_configuration();
        store.intern(&key_of(&init));
        let mut succ_start = vec![0];
        let mut succ = Vec::new();
        let mut frontier: Vec<u32> = vec![0];
        let mut scratch = Vec::with_capacity(1 + r);
        while !frontier.is_empty() {
            let expand = |&id: &u32| -> Vec<Option<Vec<u64>>> {
                let row = store.row(id);
                let q = row[0] as usize;
                let avail = &row[1..];
                let table = &tables[q];
                table
                    .target
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        let t = (*t)?;
                        let d = &table.delta[i * r..(i + 1) * r];
                        let mut out = Vec::with_capacity(1 + r);
                        out.push(t.0 as u64);
                        for k in 0..r {
                            out.push(Amount::from_raw(avail[k]).offset_within(d[k], m0[k])?.raw());
                        }
                        Some(out)
                    })
                    .collect()
            };
            let results = policy.map_min(&frontier, PAR_THRESHOLD, expand);
            let mut next = Vec::new();
            for row in results {
                for s in row {
                    match s {
                        None => succ.push(UNDEFINED),
                        Some(key) => {
                            scratch.clear();
                            scratch.extend_from_slice(&key);
                            let (id, fresh) = store.intern(&scratch);
                            if fresh {
                                next.push(id);
                            }
                            succ.push(id);
                        }
                    }
                }
                succ_start.push(succ.len());
            }
            frontier = next;
        }
        StateSpace { r, store, succ_start, succ }
    }

    pub fn len(&self) -> usize {
        self.succ_start.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn location(&self, id: u32) -> LocationId {
        LocationId(self.store.row(id)[0] as usize)
    }

    pub fn avail_raw(&self, id: u32) -> &[u64] {
        &self.store.row(id)[1..]
    }

    pub fn avail(&self, id: u32) -> Availability {
        Availability(self.avail_raw(id).iter().map(|&x| Amount::from_raw(x)).collect())
    }

    pub fn configuration(&self, id: u32) -> Configuration {
        Configuration::new(self.location(id), self.avail(id))
    }

    pub fn id_of(&self, c: &Configuration) -> Option<u32> {
        if c.avail.len() != self.r {
            return None;
        }
        self.store.get(&key_of(c))
    }

    /// Successor per profile index; [`UNDEFINED`] where the step is undefined.
    pub fn successors(&self, id: u32) -> &[u32] {
        &self.succ[self.succ_start[id as usize]..self.succ_start[id as usize + 1]]
    }

    pub fn configurations(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.len() as u32).map(|id| self.configuration(id))
    }

    pub fn memory_bytes(&self) -> usize {
        self.store.memory_bytes() + self.succ.capacity() * 4 + self.succ_start.capacity() * 8
    }
}

fn key_of(c: &Configuration) -> Vec<u64> {
    let mut k = Vec::with_capacity(1 + c.avail.len());
    k.push(c.location.0 as u64);
    k.extend(c.avail.entries().iter().map(|a| a.raw()));
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::escape_game;
    use std::collections::HashSet;

    #[test]
    fn matches_model_reachability() {
        for m0 in 0..4 {
            let g = escape_game(m0);
            let s = StateSpace::build(&g, ExecPolicy::Sequential);
            let a: HashSet<Configuration> = s.configurations().collect();
            let b: HashSet<Configuration> = g.reachable().into_iter().collect();
            assert_eq!(a, b);
            assert_eq!(s.id_of(&g.initial_configuration()), Some(0));
        }
    }
}
