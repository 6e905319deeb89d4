//! One-step safe moves of a team, independent of the money already spent.

use crate::exec::ExecPolicy;
use crate::formula::TeamOp;
use crate::model::{AgentId, Amount, LocationId, PricedGameStructure, TeamChoice};

use super::space::{StateSpace, UNDEFINED};

/// Team/opponent split of the profiles at one location.
#[derive(Clone, Debug)]
struct Layout {
    team_radix: Vec<u32>,
    sigmas: usize,
    taus: usize,
    /// `sigmas * taus` profile indices.
    profile: Vec<u32>,
    /// `sigmas * r`
    qty_team: Vec<i64>,
    /// `taus * r`
    qty_opp: Vec<i64>,
    /// `sigmas * tracked * r`
    consd: Vec<u64>,
}

/// Agents whose spending is bounded by the operator's money vector.
pub(crate) fn tracked_agents(op: &TeamOp) -> Vec<AgentId> {
    op.team.iter().copied().filter(|a| op.money[a.0].is_finite()).collect()
}

fn digits(mut idx: usize, radix: &[u32]) -> Vec<u32> {
    let mut out = vec![0; radix.len()];
    for k in (0..radix.len()).rev() {
        out[k] = (idx % radix[k] as usize) as u32 + 1;
        idx /= radix[k] as usize;
    }
    out
}

impl Layout {
    fn new(game: &PricedGameStructure, q: LocationId, team: &[AgentId], tracked: &[AgentId]) -> Layout {
        let r = game.resource_count();
        let opp: Vec<AgentId> = game.all_agents().into_iter().filter(|a| !team.contains(a)).collect();
        let team_radix: Vec<u32> = team.iter().map(|&a| game.action_count(q, a)).collect();
        let opp_radix: Vec<u32> = opp.iter().map(|&a| game.action_count(q, a)).collect();
        let sigmas: usize = team_radix.iter().map(|&d| d as usize).product();
        let taus: usize = opp_radix.iter().map(|&d| d as usize).product();
        let mut profile = Vec::with_capacity(sigmas * taus);
        let mut qty_team = vec![0i64; sigmas * r];
        let mut qty_opp = vec![0i64; taus * r];
        let mut consd = vec![0u64; sigmas * tracked.len() * r];
        let mut full = vec![1u32; game.agent_count()];
        for s in 0..sigmas {
            let sd = digits(s, &team_radix);
            for (k, &a) in team.iter().enumerate() {
                full[a.0] = sd[k];
                let d = game.qty(q, a, sd[k]).expect("action in range");
                for (x, v) in d.entries().iter().enumerate() {
                    qty_team[s * r + x] = qty_team[s * r + x].saturating_add(*v);
                }
            }
            for (t_i, &a) in tracked.iter().enumerate() {
                let c = game.consd(q, a, sd[team.iter().position(|&b| b == a).expect("tracked in team")]).expect("in range");
                let base = (s * tracked.len() + t_i) * r;
                consd[base..base + r].copy_from_slice(&c);
            }
            for t in 0..taus {
                let td = digits(t, &opp_radix);
                for (k, &a) in opp.iter().enumerate() {
                    full[a.0] = td[k];
                }
                profile.push(game.profile_index(q, &full).expect("profile in range") as u32);
            }
        }
        for t in 0..taus {
            let td = digits(t, &opp_radix);
            for (k, &a) in opp.iter().enumerate() {
                let d = game.qty(q, a, td[k]).expect("action in range");
                for (x, v) in d.entries().iter().enumerate() {
                    qty_opp[t * r + x] = qty_opp[t * r + x].saturating_add(*v);
                }
            }
        }
        Layout { team_radix, sigmas, taus, profile, qty_team, qty_opp, consd }
    }
}

/// Safe moves of every configuration (or of a selected subset) for one
/// team operator, stored contiguously.
#[derive(Clone, Debug, Default)]
pub(crate) struct MoveTable {
    /// Per configuration, range into `sigma`.
    start: Vec<u32>,
    sigma: Vec<u32>,
    /// `tracked` entries per move.
    cost: Vec<u64>,
    /// Per move, range into `succ`.
    succ_start: Vec<u32>,
    succ: Vec<u32>,
    tracked: usize,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct MoveRef<'a> {
    pub sigma: u32,
    pub cost: &'a [u64],
    pub succ: &'a [u32],
}

struct LocalMoves {
    sigma: Vec<u32>,
    cost: Vec<u64>,
    succ_len: Vec<u32>,
    succ: Vec<u32>,
}

fn in_bounds(avail: &[u64], delta: &[i64], m0: &[Amount]) -> bool {
    avail
        .iter()
        .zip(delta)
        .zip(m0)
        .all(|((&a, &d), &b)| Amount::from_raw(a).offset_within(d, b).is_some())
}

pub(crate) struct MoveContext<'a> {
    game: &'a PricedGameStructure,
    space: &'a StateSpace,
    team: Vec<AgentId>,
    tracked: Vec<AgentId>,
    budget: Vec<u64>,
    layouts: Vec<Layout>,
}

impl<'a> MoveContext<'a> {
    pub fn new(game: &'a PricedGameStructure, space: &'a StateSpace, op: &TeamOp) -> Self {
        let tracked = tracked_agents(op);
        let budget = tracked.iter().map(|a| op.money[a.0].raw()).collect();
        let layouts = (0..game.locations().len())
            .map(|q| Layout::new(game, LocationId(q), &op.team, &tracked))
            .collect();
        MoveContext { game, space, team: op.team.clone(), tracked, budget, layouts }
    }

    pub fn tracked(&self) -> &[AgentId] {
        &self.tracked
    }

    pub fn budget(&self) -> &[u64] {
        &self.budget
    }

    pub fn choice(&self, config: u32, sigma: u32) -> TeamChoice {
        let layout = &self.layouts[self.space.location(config).0];
        let d = digits(sigma as usize, &layout.team_radix);
        TeamChoice { team: self.team.clone(), choice: d }
    }

    fn local(&self, id: u32) -> LocalMoves {
        let game = self.game;
        let r = game.resource_count();
        let q = self.space.location(id);
        let layout = &self.layouts[q.0];
        let avail = self.space.avail_raw(id);
        let m0 = game.m0().entries();
        let succ_row = self.space.successors(id);
        let taus: Vec<usize> = (0..layout.taus)
            .filter(|&t| in_bounds(avail, &layout.qty_opp[t * r..(t + 1) * r], m0))
            .collect();
        let prices: Vec<&[i64]> = if self.tracked.is_empty() {
            Vec::new()
        } else {
            let m = self.space.avail(id);
            self.tracked.iter().map(|&a| game.price(&m, q, a)).collect()
        };
        let t = self.tracked.len();
        let mut out = LocalMoves { sigma: Vec::new(), cost: Vec::new(), succ_len: Vec::new(), succ: Vec::new() };
        let mut buf = Vec::new();
        'sigma: for s in 0..layout.sigmas {
            if !in_bounds(avail, &layout.qty_team[s * r..(s + 1) * r], m0) {
                continue;
            }
            let mut cost = Vec::with_capacity(t);
            for (k, price) in prices.iter().enumerate() {
                let base = (s * t + k) * r;
                let c = layout.consd[base..base + r]
                    .iter()
                    .zip(price.iter())
                    .fold(0u64, |acc, (&x, &p)| acc.saturating_add(x.saturating_mul(p.max(0) as u64)));
                if c > self.budget[k] {
                    continue 'sigma;
                }
                cost.push(c);
            }
            buf.clear();
            for &tau in &taus {
                let next = succ_row[layout.profile[s * layout.taus + tau] as usize];
                if next == UNDEFINED {
                    continue 'sigma;
                }
                buf.push(next);
            }
            buf.sort_unstable();
            buf.dedup();
            out.sigma.push(s as u32);
            out.cost.extend_from_slice(&cost);
            out.succ_len.push(buf.len() as u32);
            out.succ.extend_from_slice(&buf);
        }
        out
    }

    /// Moves of the configurations selected by `wanted`; others get none.
    pub fn table(&self, wanted: &[bool], policy: ExecPolicy) -> MoveTable {
        let ids: Vec<u32> = (0..self.space.len() as u32).collect();
        let chunks: Vec<&[u32]> = ids.chunks(1024).collect();
        let parts = policy.map_min(&chunks, 2, |chunk| {
            chunk
                .iter()
                .map(|&id| if wanted[id as usize] { Some(self.local(id)) } else { None })
                .collect::<Vec<_>>()
        });
        let mut table = MoveTable { start: vec![0], succ_start: vec![0], tracked: self.tracked.len(), ..Default::default() };
        for part in parts {
            for lm in part {
                if let Some(lm) = lm {
                    let mut off = 0usize;
                    for (i, &s) in lm.sigma.iter().enumerate() {
                        table.sigma.push(s);
                        let len = lm.succ_len[i] as usize;
                        table.succ.extend_from_slice(&lm.succ[off..off + len]);
                        off += len;
                        table.succ_start.push(table.succ.len() as u32);
                    }
                    table.cost.extend_from_slice(&lm.cost);
                }
                table.start.push(table.sigma.len() as u32);
            }
        }
        table
    }
}

impl MoveTable {
    pub fn moves(&self, config: u32) -> impl Iterator<Item = MoveRef<'_>> + '_ {
        let (a, b) = (self.start[config as usize] as usize, self.start[config as usize + 1] as usize);
        (a..b).map(move |m| MoveRef {
            sigma: self.sigma[m],
            cost: &self.cost[m * self.tracked..(m + 1) * self.tracked],
            succ: &self.succ[self.succ_start[m] as usize..self.succ_start[m + 1] as usize],
        })
    }

    pub fn total_moves(&self) -> usize {
        self.sigma.len()
    }
}
