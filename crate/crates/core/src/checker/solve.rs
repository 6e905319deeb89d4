//! Fixpoints of team operators on the arena of (configuration, money spent).

use crate::exec::ExecPolicy;

use super::intern::Interner;
use super::moves::{MoveContext, MoveTable};

pub(crate) const NO_MOVE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Goal,
    Fail,
    Inner,
}

/// Arena states are `(config, spent...)`; state `c` is `(c, 0...)` for
/// every configuration `c`.
#[derive(Clone, Debug)]
pub(crate) struct Arena {
    pub states: Interner,
    pub kind: Vec<Kind>,
    pub move_start: Vec<u32>,
    pub move_sigma: Vec<u32>,
    pub succ_start: Vec<u32>,
    pub succ: Vec<u32>,
}

impl Arena {
    fn build(ctx: &MoveContext<'_>, table: &MoveTable, configs: usize, classify: impl Fn(u32) -> Kind) -> Arena {
        let t = ctx.tracked().len();
        let budget = ctx.budget();
        let mut states = Interner::new(1 + t);
        let mut key = vec![0u64; 1 + t];
        for c in 0..configs as u64 {
            key[0] = c;
            states.intern(&key);
        }
        let mut arena = Arena {
            states,
            kind: Vec::new(),
            move_start: vec![0],
            move_sigma: Vec::new(),
            succ_start: vec![0],
            succ: Vec::new(),
        };
        let mut row = vec![0u64; 1 + t];
        let mut next_spent = vec![0u64; t];
        let mut k = 0u32;
        while (k as usize) < arena.states.len() {
            row.copy_from_slice(arena.states.row(k));
            let c = row[0] as u32;
            let kind = classify(c);
            arena.kind.push(kind);
            if kind == Kind::Inner {
                'moves: for mv in table.moves(c) {
                    for i in 0..t {
                        let s = row[1 + i].saturating_add(mv.cost[i]);
                        if s > budget[i] {
                            continue 'moves;
                        }
                        next_spent[i] = s;
                    }
                    arena.move_sigma.push(mv.sigma);
                    for &s in mv.succ {
                        key[0] = s as u64;
                        key[1..].copy_from_slice(&next_spent);
                        let (id, _) = arena.states.intern(&key);
                        arena.succ.push(id);
                    }
                    arena.succ_start.push(arena.succ.len() as u32);
                }
            }
            arena.move_start.push(arena.move_sigma.len() as u32);
            k += 1;
        }
        arena
    }

    pub fn len(&self) -> usize {
        self.kind.len()
    }

    pub fn move_count(&self) -> usize {
        self.move_sigma.len()
    }

    pub fn moves_of(&self, s: u32) -> std::ops::Range<usize> {
        self.move_start[s as usize] as usize..self.move_start[s as usize + 1] as usize
    }

    pub fn succ_of(&self, m: usize) -> &[u32] {
        &self.succ[self.succ_start[m] as usize..self.succ_start[m + 1] as usize]
    }

    /// For every state, the moves having it as a successor.
    fn predecessors(&self) -> (Vec<u32>, Vec<u32>) {
        let n = self.len();
        let mut count = vec![0u32; n + 1];
        for &s in &self.succ {
            count[s as usize + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let start = count.clone();
        let mut fill = count;
        let mut preds = vec![0u32; self.succ.len()];
        for m in 0..self.move_count() {
            for &s in self.succ_of(m) {
                preds[fill[s as usize] as usize] = m as u32;
                fill[s as usize] += 1;
            }
        }
        (start, preds)
    }

    fn owners(&self) -> Vec<u32> {
        let mut owner = vec![0u32; self.move_count()];
        for s in 0..self.len() {
            for m in self.moves_of(s as u32) {
                owner[m] = s as u32;
            }
        }
        owner
    }
}

/// Result of one team-operator fixpoint.
#[derive(Clone, Debug)]
pub(crate) struct Solution {
    /// Membership per configuration (at spent 0).
    pub configs: Vec<bool>,
    pub arena_states: usize,
    pub arena_moves: usize,
    /// Present when a witness was requested.
    pub arena: Option<Arena>,
    /// Chosen arena move per state, [`NO_MOVE`] outside the winning region.
    pub chosen: Vec<u32>,
}

pub(crate) fn solve_next(
    ctx: &MoveContext<'_>,
    configs: usize,
    targets: &[bool],
    policy: ExecPolicy,
    keep: bool,
) -> (Solution, MoveTable) {
    let table = ctx.table(&vec![true; configs], policy);
    let ids: Vec<u32> = (0..configs as u32).collect();
    let chosen: Vec<u32> = policy.map(&ids, |&c| {
        table
            .moves(c)
            .find(|m| m.succ.iter().all(|&s| targets[s as usize]))
            .map_or(NO_MOVE, |m| m.sigma)
    });
    let sol = Solution {
        configs: chosen.iter().map(|&m| m != NO_MOVE).collect(),
        arena_states: configs,
        arena_moves: table.total_moves(),
        arena: None,
        chosen: if keep { chosen } else { Vec::new() },
    };
    (sol, table)
}

pub(crate) fn solve_until(
    ctx: &MoveContext<'_>,
    configs: usize,
    set1: &[bool],
    set2: &[bool],
    policy: ExecPolicy,
    keep: bool,
) -> Solution {
    let wanted: Vec<bool> = set1.iter().zip(set2).map(|(&a, &b)| a && !b).collect();
    let table = ctx.table(&wanted, policy);
    let arena = Arena::build(ctx, &table, configs, |c| {
        if set2[c as usize] {
            Kind::Goal
        } else if set1[c as usize] {
            Kind::Inner
        } else {
            Kind::Fail
        }
    });
    drop(table);
    let n = arena.len();
    let (pstart, preds) = arena.predecessors();
    let owner = arena.owners();
    let mut remaining: Vec<u32> = (0..arena.move_count()).map(|m| arena.succ_of(m).len() as u32).collect();
    let mut win = vec![false; n];
    let mut chosen = vec![NO_MOVE; n];
    let mut queue: std::collections::VecDeque<u32> = std::collections::VecDeque::new();
    for (s, kind) in arena.kind.iter().enumerate().take(n) {
        if *kind == Kind::Goal {
            win[s] = true;
            queue.push_back(s as u32);
        }
    }
    while let Some(w) = queue.pop_front() {
        for &m in &preds[pstart[w as usize] as usize..pstart[w as usize + 1] as usize] {
            let m = m as usize;
            remaining[m] -= 1;
            let o = owner[m] as usize;
            if remaining[m] == 0 && !win[o] {
                win[o] = true;
                chosen[o] = m as u32;
                queue.push_back(o as u32);
            }
        }
    }
    Solution {
        configs: win[..configs].to_vec(),
        arena_states: n,
        arena_moves: arena.move_count(),
        chosen: if keep { chosen } else { Vec::new() },
        arena: keep.then_some(arena),
    }
}

pub(crate) fn solve_globally(
    ctx: &MoveContext<'_>,
    configs: usize,
    set1: &[bool],
    policy: ExecPolicy,
    keep: bool,
) -> Solution {
    let table = ctx.table(set1, policy);
    let arena = Arena::build(ctx, &table, configs, |c| if set1[c as usize] { Kind::Inner } else { Kind::Fail });
    drop(table);
    let n = arena.len();
    let (pstart, preds) = arena.predecessors();
    let owner = arena.owners();
    let mut alive: Vec<u32> = (0..n).map(|s| arena.moves_of(s as u32).len() as u32).collect();
    let mut move_dead = vec![false; arena.move_count()];
    let mut dead = vec![false; n];
    let mut stack = Vec::new();
    for s in 0..n {
        if arena.kind[s] == Kind::Fail || alive[s] == 0 {
            dead[s] = true;
            stack.push(s as u32);
        }
    }
    while let Some(d) = stack.pop() {
        for &m in &preds[pstart[d as usize] as usize..pstart[d as usize + 1] as usize] {
            let m = m as usize;
            if move_dead[m] {
                continue;
            }
            move_dead[m] = true;
            let o = owner[m] as usize;
            alive[o] -= 1;
            if alive[o] == 0 && !dead[o] {
                dead[o] = true;
                stack.push(o as u32);
            }
        }
    }
    let chosen = if keep {
        (0..n)
            .map(|s| {
                if dead[s] {
                    NO_MOVE
                } else {
                    arena.moves_of(s as u32).find(|&m| !move_dead[m]).map_or(NO_MOVE, |m| m as u32)
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    Solution {
        configs: dead[..configs].iter().map(|&d| !d).collect(),
        arena_states: n,
        arena_moves: arena.move_count(),
        chosen,
        arena: keep.then_some(arena),
    }
}
