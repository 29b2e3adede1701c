//! Depth-first branch-and-bound over route construction.
//!
//! A search node is a set of closed routes, at most one open route and the
//! residual demand. An open route branches on its next stop together with
//! the kg of every modality picked up there, or closes back to the depot.
//! Container configurations are the least block allocation that holds each
//! route's loads, so every feasible configuration is covered implicitly.
//!
//! Symmetry between routes is removed by requiring each new route to serve
//! the first `(node, modality)` cell with residual demand. Residual states
//! reached again at a route boundary with no smaller cost are dropped.
//! Children are explored in a fixed order and a subtree is pruned only when
//! its bound cannot beat (or, against a searched solution, tie) the
//! incumbent, so the reported optimum is the first optimal solution in that
//! order whatever warm start was supplied.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::network::NodeId;
use crate::objective::Lambda;

const SEEN_LIMIT: usize = 1 << 20;

/// Compact view of an instance over depot + demand nodes.
pub(crate) struct Problem {
    pub ids: Vec<NodeId>,
    pub modalities: usize,
    pub block_capacity: u32,
    pub block_count: u32,
    pub demand: Vec<u32>,
    /// `from_depot[j]`, `to_depot[j]`, `between[a * m + b]`.
    pub from_depot: Vec<u64>,
    pub to_depot: Vec<u64>,
    pub between: Vec<u64>,
    pub lambda: Lambda,
    pub max_routes: usize,
    pub max_stops: usize,
}

impl Problem {
    fn m(&self) -> usize {
        self.ids.len()
    }

    fn d(&self, from: Option<usize>, to: Option<usize>) -> u64 {
        match (from, to) {
            (None, None) => 0,
            (None, Some(b)) => self.from_depot[b],
            (Some(a), None) => self.to_depot[a],
            (Some(a), Some(b)) => self.between[a * self.m() + b],
        }
    }

    fn blocks(&self, kg: u32) -> u32 {
        kg.div_ceil(self.block_capacity)
    }
}

/// A finished route in local indices: stops and `(node, modality, kg)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Draft {
    pub anchor: (usize, usize),
    pub stops: Vec<usize>,
    pub picks: Vec<(usize, usize, u32)>,
    pub load: Vec<u32>,
    pub distance: u64,
}

struct Open {
    anchor: (usize, usize),
    stops: Vec<usize>,
    picks: Vec<(usize, usize, u32)>,
    load: Vec<u32>,
    legs: u64,
}

impl Open {
    fn anchor_served(&self) -> bool {
        self.picks.iter().any(|&(j, k, _)| (j, k) == self.anchor)
    }
}

enum Move {
    Extend { node: usize, amounts: Vec<u32> },
    Close,
}

pub(crate) struct Best {
    pub value: u128,
    /// `None` for the warm-start value supplied by the caller.
    pub routes: Option<Vec<Draft>>,
}

impl Best {
    fn searched(&self) -> bool {
        self.routes.is_some()
    }
}

pub(crate) struct Outcome {
    pub best: Option<Best>,
    pub exhausted: bool,
    /// Least bound over subtrees left unexplored when a budget ran out.
    pub open_bound: Option<u128>,
    pub nodes: u64,
}

pub(crate) struct Budget {
    pub time: Duration,
    pub nodes: Option<u64>,
}

pub(crate) struct Search<'a> {
    p: &'a Problem,
    residual: Vec<u32>,
    per_modality: Vec<u64>,
    remaining: u64,
    closed: Vec<Draft>,
    closed_z1: u64,
    closed_z2: u64,
    open: Option<Open>,
    best: Option<Best>,
    seen: HashMap<(Vec<u32>, usize), u128>,
    nodes: u64,
    budget: Budget,
    started: Instant,
    aborted: bool,
    open_bound: Option<u128>,
    // Demand nodes by increasing round-trip length, for the radial bound.
    by_round_trip: Vec<usize>,
}

impl<'a> Search<'a> {
    pub fn new(p: &'a Problem, budget: Budget, warm: Option<u128>) -> Self {
        let k = p.modalities;
        let per_modality = (0..k)
            .map(|kk| (0..p.m()).map(|j| u64::from(p.demand[j * k + kk])).sum())
            .collect();
        let mut by_round_trip: Vec<usize> = (0..p.m()).collect();
        by_round_trip.sort_by_key(|&j| (p.from_depot[j] + p.to_depot[j], j));
        Search {
            p,
            residual: p.demand.clone(),
            per_modality,
            remaining: p.demand.iter().map(|&w| u64::from(w)).sum(),
            closed: Vec::new(),
            closed_z1: 0,
            closed_z2: 0,
            open: None,
            best: warm.map(|value| Best { value, routes: None }),
            seen: HashMap::new(),
            nodes: 0,
            budget,
            started: Instant::now(),
            aborted: false,
            open_bound: None,
            by_round_trip,
        }
    }

    pub fn run(mut self) -> Outcome {
        self.dfs();
        Outcome { best: self.best, exhausted: !self.aborted, open_bound: self.open_bound, nodes: self.nodes }
    }

    fn res(&self, j: usize, k: usize) -> u32 {
        self.residual[j * self.p.modalities + k]
    }

    fn over_budget(&self) -> bool {
        if self.budget.nodes.is_some_and(|limit| self.nodes > limit) {
            return true;
        }
        self.nodes.is_multiple_of(256) && self.started.elapsed() > self.budget.time
    }

    fn note_unexplored(&mut self, bound: u128) {
        self.open_bound = Some(self.open_bound.map_or(bound, |b| b.min(bound)));
    }

    fn prunable(&self, bound: u128) -> bool {
        match &self.best {
            None => false,
            Some(best) => bound > best.value || (bound == best.value && best.searched()),
        }
    }

    fn dfs(&mut self) {
        self.nodes += 1;
        let bound = self.lower_bound();
        if self.over_budget() {
            self.aborted = true;
            if bound != u128::MAX {
                self.note_unexplored(bound);
            }
            return;
        }
        if self.prunable(bound) || bound == u128::MAX {
            return;
        }
        if self.open.is_none() {
            if self.remaining == 0 {
                self.record();
                return;
            }
            let cost = self.p.lambda.scaled(self.closed_z1, self.closed_z2);
            let key = (self.residual.clone(), self.closed.len());
            match self.seen.get(&key) {
                Some(&earlier) if earlier <= cost => return,
                _ if self.seen.len() < SEEN_LIMIT => {
                    self.seen.insert(key, cost);
                }
                _ => {}
            }
            let anchor = self.first_residual_cell();
            self.open = Some(Open {
                anchor,
                stops: Vec::new(),
                picks: Vec::new(),
                load: vec![0; self.p.modalities],
                legs: 0,
            });
            self.branch();
            self.open = None;
        } else {
            self.branch();
        }
    }

    fn branch(&mut self) {
        let moves = self.moves();
        let mut iter = moves.into_iter();
        for mv in iter.by_ref() {
            self.apply(&mv);
            self.dfs();
            self.undo(&mv);
            if self.aborted {
                break;
            }
        }
        if self.aborted {
            for mv in iter {
                self.apply(&mv);
                let bound = self.lower_bound();
                self.undo(&mv);
                if bound != u128::MAX {
                    self.note_unexplored(bound);
                }
            }
        }
    }

    fn first_residual_cell(&self) -> (usize, usize) {
        let pos = self.residual.iter().position(|&r| r > 0).expect("residual demand remains");
        (pos / self.p.modalities, pos % self.p.modalities)
    }

    fn record(&mut self) {
        let value = self.p.lambda.scaled(self.closed_z1, self.closed_z2);
        let better = match &self.best {
            None => true,
            Some(best) => value < best.value || (value == best.value && !best.searched()),
        };
        if better {
            self.best = Some(Best { value, routes: Some(self.closed.clone()) });
        }
    }

    fn moves(&self) -> Vec<Move> {
        let p = self.p;
        let open = self.open.as_ref().expect("branching needs an open route");
        let pos = open.stops.last().copied();
        let used: u32 = open.load.iter().map(|&l| p.blocks(l)).sum();
        let free = p.block_count - used;
        let mut moves = Vec::new();

        if open.stops.len() < p.max_stops {
            let mut targets: Vec<usize> = (0..p.m())
                .filter(|j| !open.stops.contains(j))
                .filter(|&j| (0..p.modalities).any(|k| self.res(j, k) > 0))
                .collect();
            targets.sort_by_key(|&j| (p.d(pos, Some(j)), p.ids[j]));
            for j in targets {
                let caps: Vec<u32> = (0..p.modalities)
                    .map(|k| {
                        let slack = p.blocks(open.load[k]) * p.block_capacity - open.load[k];
                        self.res(j, k).min(slack + free * p.block_capacity)
                    })
                    .collect();
                let mut options = Vec::new();
                let mut amounts = vec![0u32; p.modalities];
                enumerate_amounts(&caps, 0, &mut amounts, &mut |a| {
                    if a.iter().all(|&x| x == 0) {
                        return;
                    }
                    let blocks: u32 = a.iter().zip(&open.load).map(|(&x, &l)| p.blocks(l + x)).sum();
                    if blocks <= p.block_count {
                        options.push(a.to_vec());
                    }
                });
                options.sort_by(|a, b| {
                    let (ta, tb): (u32, u32) = (a.iter().sum(), b.iter().sum());
                    tb.cmp(&ta).then_with(|| b.cmp(a))
                });
                moves.extend(options.into_iter().map(|amounts| Move::Extend { node: j, amounts }));
            }
        }
        if !open.stops.is_empty() && open.anchor_served() {
            moves.push(Move::Close);
        }
        moves
    }

    fn apply(&mut self, mv: &Move) {
        let k_count = self.p.modalities;
        match mv {
            Move::Extend { node, amounts } => {
                let open = self.open.as_mut().expect("open route");
                let pos = open.stops.last().copied();
                open.legs += self.p.d(pos, Some(*node));
                open.stops.push(*node);
                for (k, &a) in amounts.iter().enumerate() {
                    if a > 0 {
                        self.residual[node * k_count + k] -= a;
                        self.per_modality[k] -= u64::from(a);
                        self.remaining -= u64::from(a);
                        open.load[k] += a;
                        open.picks.push((*node, k, a));
                    }
                }
            }
            Move::Close => {
                let open = self.open.take().expect("open route");
                let last = open.stops.last().copied();
                let distance = open.legs + self.p.d(last, None);
                self.closed_z1 += open.load.iter().filter(|&&l| l > 0).count() as u64;
                self.closed_z2 += distance;
                self.closed.push(Draft {
                    anchor: open.anchor,
                    stops: open.stops,
                    picks: open.picks,
                    load: open.load,
                    distance,
                });
            }
        }
    }

    fn undo(&mut self, mv: &Move) {
        let k_count = self.p.modalities;
        match mv {
            Move::Extend { node, amounts } => {
                let open = self.open.as_mut().expect("open route");
                open.stops.pop();
                let pos = open.stops.last().copied();
                open.legs -= self.p.d(pos, Some(*node));
                for (k, &a) in amounts.iter().enumerate() {
                    if a > 0 {
                        self.residual[node * k_count + k] += a;
                        self.per_modality[k] += u64::from(a);
                        self.remaining += u64::from(a);
                        open.load[k] -= a;
                        open.picks.pop();
                    }
                }
            }
            Move::Close => {
                let draft = self.closed.pop().expect("closed route");
                self.closed_z1 -= draft.load.iter().filter(|&&l| l > 0).count() as u64;
                self.closed_z2 -= draft.distance;
                let last = draft.stops.last().copied();
                self.open = Some(Open {
                    anchor: draft.anchor,
                    legs: draft.distance - self.p.d(last, None),
                    stops: draft.stops,
                    picks: draft.picks,
                    load: draft.load,
                });
            }
        }
    }

    /// Scaled lower bound on `Z3` of any completion; `u128::MAX` if none exists.
    fn lower_bound(&self) -> u128 {
        let p = self.p;
        let c = u64::from(p.block_capacity);
        let l = u64::from(p.block_count);
        let mut z1 = self.closed_z1;
        let mut z2 = self.closed_z2;
        let mut slack = vec![0u64; p.modalities];
        let mut free = 0u64;
        let mut routes_in_use = self.closed.len();

        if let Some(open) = &self.open {
            routes_in_use += 1;
            z1 += open.load.iter().filter(|&&x| x > 0).count() as u64;
            z2 += open.legs;
            let used: u64 = open.load.iter().map(|&x| u64::from(p.blocks(x))).sum();
            free = l - used;
            for (k, &x) in open.load.iter().enumerate() {
                slack[k] = u64::from(p.blocks(x)) * c - u64::from(x);
            }
            let pos = open.stops.last().copied();
            z2 += if open.anchor_served() {
                p.d(pos, None)
            } else {
                let a = Some(open.anchor.0);
                p.d(pos, a) + p.d(a, None)
            };
        }
        if self.remaining == 0 {
            return p.lambda.scaled(z1, z2);
        }

        let open = self.open.as_ref();
        let mut z1_modal = 0u64;
        let mut blocks_new = 0u64;
        let mut absorbable = 0u64;
        for (k, &rk) in self.per_modality.iter().enumerate().take(p.modalities) {
            if rk == 0 {
                continue;
            }
            let room = if open.is_some() { slack[k] + free * c } else { 0 };
            absorbable += rk.min(room);
            let extra = rk.saturating_sub(room).div_ceil(c * l);
            let in_use = open.is_some_and(|o| o.load[k] > 0);
            z1_modal += if in_use { extra } else { extra.max(1) };
            blocks_new += rk.saturating_sub(slack[k]).div_ceil(c);
        }
        let blocks_new = blocks_new.saturating_sub(free);
        let absorbable = absorbable.min(slack.iter().sum::<u64>() + free * c);
        let carried_new = self.remaining.saturating_sub(absorbable);
        let mut routes_new = blocks_new.div_ceil(l);
        if carried_new > 0 {
            routes_new = routes_new.max(1);
        }
        if routes_in_use + routes_new as usize > p.max_routes {
            return u128::MAX;
        }

        let mut z2_new = 0u64;
        if carried_new > 0 {
            let mut left = carried_new;
            let mut weighted = 0u128;
            let mut cheapest = None;
            for &j in &self.by_round_trip {
                let held: u64 = (0..p.modalities).map(|k| u64::from(self.res(j, k))).sum();
                if held == 0 {
                    continue;
                }
                let trip = p.from_depot[j] + p.to_depot[j];
                cheapest.get_or_insert(trip);
                let take = held.min(left);
                weighted += u128::from(trip) * u128::from(take);
                left -= take;
                if left == 0 {
                    break;
                }
            }
            let radial = weighted.div_ceil(u128::from(c * l)) as u64;
            z2_new = radial.max(routes_new * cheapest.unwrap_or(0));
        }
        p.lambda.scaled(z1 + z1_modal.max(routes_new), z2 + z2_new)
    }
}

fn enumerate_amounts(caps: &[u32], k: usize, current: &mut Vec<u32>, visit: &mut impl FnMut(&[u32])) {
    if k == caps.len() {
        visit(current);
        return;
    }
    for a in 0..=caps[k] {
        current[k] = a;
        enumerate_amounts(caps, k + 1, current, visit);
    }
    current[k] = 0;
}
