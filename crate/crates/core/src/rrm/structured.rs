//! Exact search specialised to snapshot programs.
//!
//! A snapshot program only ever admits three encodings per pair, `(y, x, w)`
//! in `{000, 100, 111}`, so the search branches on entities instead of
//! variables: each CUE is off or on, each pair is idle, cellular or direct.
//! Taking the choices in that order at increasing entity index visits
//! assignments in the same lexicographic order as the variable vector, so the
//! tie-break matches [`solve_exact`](super::solve_exact).
//!
//! Within a transmitter cell the uplink rows of every scheme reduce to two
//! unit slots (`A`, `B`) with each option occupying one of them, which is
//! solved exactly from the two best candidates per slot. Only the downlink
//! rows couple cells; they are priced with multipliers tuned by projected
//! subgradient steps, which gives the node bound.
//!
//! The objective of every leaf is accumulated in variable order, exactly as
//! [`BinaryProgram::objective_value`] sums it.

use super::bnb::SolveStats;
use super::program::{build_program, BinaryProgram};
use super::{Decision, SharingScheme, SnapshotProblem};

const ROOT_ITERATIONS: usize = 40;
const NODE_ITERATIONS: usize = 4;
const BOUND_SLACK: f64 = 1e-12;

const IDLE: u8 = 0;
const FIRST: u8 = 1;
const DIRECT: u8 = 2;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    A,
    B,
}

#[derive(Clone, Copy)]
struct Choice {
    slot: Slot,
    /// Downlink cell claimed (cellular-mode pairs).
    dl: Option<usize>,
    /// Objective coefficients of the variables set to 1, in variable order.
    coefs: [f64; 3],
    len: usize,
    value: f64,
}

impl Choice {
    fn new(slot: Slot, dl: Option<usize>, coefs: &[f64]) -> Self {
        let mut c = [0.0; 3];
        c[..coefs.len()].copy_from_slice(coefs);
        Self {
            slot,
            dl,
            coefs: c,
            len: coefs.len(),
            value: coefs.iter().sum(),
        }
    }

    fn add_to(&self, acc: f64) -> f64 {
        self.coefs[..self.len].iter().fold(acc, |a, c| a + c)
    }
}

struct Entity {
    cell: usize,
    /// CUE transmitting, or pair in cellular mode.
    first: Choice,
    direct: Option<Choice>,
}

impl Entity {
    fn choice(&self, code: u8) -> Option<&Choice> {
        match code {
            FIRST => Some(&self.first),
            DIRECT => self.direct.as_ref(),
            _ => None,
        }
    }
}

/// Best and runner-up candidate of one slot in one cell.
#[derive(Clone, Copy)]
struct Top {
    first: Candidate,
    second: Candidate,
}

/// Reduced value of one option; `entity == usize::MAX` marks an empty entry.
#[derive(Clone, Copy)]
struct Candidate {
    value: f64,
    entity: usize,
    code: u8,
    dl: Option<usize>,
}

const NO_CANDIDATE: Candidate = Candidate {
    value: f64::NEG_INFINITY,
    entity: usize::MAX,
    code: IDLE,
    dl: None,
};

const EMPTY_TOP: Top = Top {
    first: NO_CANDIDATE,
    second: NO_CANDIDATE,
};

impl Top {
    fn offer(&mut self, c: Candidate) {
        if c.value > self.first.value {
            self.second = self.first;
            self.first = c;
        } else if c.value > self.second.value {
            self.second = c;
        }
    }
}

struct Search {
    entities: Vec<Entity>,
    num_cells: usize,
    used_a: Vec<bool>,
    used_b: Vec<bool>,
    used_dl: Vec<bool>,
    choices: Vec<u8>,
    best: Option<(f64, Vec<u8>)>,
    slack: f64,
    top_a: Vec<Top>,
    top_b: Vec<Top>,
    dl_count: Vec<u32>,
    /// Per-cell picks of the last relaxed solution.
    relaxed: Vec<[Candidate; 2]>,
    stats: SolveStats,
}

/// Optimal decision of a snapshot problem, identical to solving its program
/// with [`solve_exact`](super::solve_exact).
pub fn solve_snapshot(problem: &SnapshotProblem) -> Decision {
    solve_snapshot_with_stats(problem).0
}

pub fn solve_snapshot_with_stats(problem: &SnapshotProblem) -> (Decision, SolveStats) {
    let program = build_program(problem);
    let mut search = Search::new(problem, &program);
    search.greedy_incumbent();
    let mut lambda = vec![0.0; problem.num_cells];
    search.dfs(0, 0.0, &mut lambda, ROOT_ITERATIONS);
    let choices = search
        .best
        .take()
        .map(|(_, c)| c)
        .unwrap_or_else(|| vec![IDLE; search.entities.len()]);
    let values = encode_choices(&program, problem.num_cues(), &choices);
    (program.decode(&values), search.stats)
}

fn encode_choices(program: &BinaryProgram, num_cues: usize, choices: &[u8]) -> Vec<bool> {
    let ix = &program.index;
    let mut values = vec![false; program.num_vars()];
    for (i, &v) in ix.cue_y.iter().enumerate() {
        values[v] = choices[i] == FIRST;
    }
    for j in 0..ix.pair_y.len() {
        let c = choices[num_cues + j];
        values[ix.pair_y[j]] = c != IDLE;
        values[ix.pair_x[j]] = c == DIRECT;
        values[ix.pair_w[j]] = c == DIRECT;
    }
    values
}

impl Search {
    fn new(problem: &SnapshotProblem, program: &BinaryProgram) -> Self {
        let ix = &program.index;
        let c = &program.objective;
        let (cm_slot, dm_slot) = match problem.scheme {
            SharingScheme::Overlay => (Slot::A, Slot::A),
            SharingScheme::Underlay1 => (Slot::A, Slot::B),
            SharingScheme::Underlay2 => (Slot::B, Slot::B),
        };
        let mut entities = Vec::with_capacity(problem.num_entities());
        for (i, &cell) in problem.cue_cell.iter().enumerate() {
            entities.push(Entity {
                cell,
                first: Choice::new(Slot::A, None, &[c[ix.cue_y[i]]]),
                direct: None,
            });
        }
        for j in 0..problem.num_pairs() {
            let (y, x, w) = (c[ix.pair_y[j]], c[ix.pair_x[j]], c[ix.pair_w[j]]);
            entities.push(Entity {
                cell: problem.pair_tx_cell[j],
                first: Choice::new(cm_slot, Some(problem.pair_rx_cell[j]), &[y]),
                direct: problem
                    .direct_mode_possible(j)
                    .then(|| Choice::new(dm_slot, None, &[y, x, w])),
            });
        }
        let scale: f64 = c.iter().map(|v| v.abs()).sum();
        let n = problem.num_cells;
        Self {
            choices: vec![IDLE; entities.len()],
            entities,
            num_cells: n,
            used_a: vec![false; n],
            used_b: vec![false; n],
            used_dl: vec![false; n],
            best: None,
            slack: BOUND_SLACK * (1.0 + scale),
            top_a: vec![EMPTY_TOP; n],
            top_b: vec![EMPTY_TOP; n],
            dl_count: vec![0; n],
            relaxed: vec![[NO_CANDIDATE; 2]; n],
            stats: SolveStats::default(),
        }
    }

    fn available(&self, ch: &Choice, cell: usize) -> bool {
        let slot_free = match ch.slot {
            Slot::A => !self.used_a[cell],
            Slot::B => !self.used_b[cell],
        };
        slot_free && ch.dl.is_none_or(|m| !self.used_dl[m])
    }

    fn occupy(&mut self, ch: &Choice, cell: usize, on: bool) {
        match ch.slot {
            Slot::A => self.used_a[cell] = on,
            Slot::B => self.used_b[cell] = on,
        }
        if let Some(m) = ch.dl {
            self.used_dl[m] = on;
        }
    }

    /// Exact objective of a full choice vector.
    fn value_of(&self, choices: &[u8]) -> f64 {
        let mut acc = 0.0;
        for (e, &code) in self.entities.iter().zip(choices) {
            if let Some(ch) = e.choice(code) {
                acc = ch.add_to(acc);
            }
        }
        acc
    }

    fn offer(&mut self, choices: Vec<u8>) {
        let value = self.value_of(&choices);
        let better = match &self.best {
            None => true,
            Some((b, inc)) => value > *b || (value == *b && choices < *inc),
        };
        if better {
            self.best = Some((value, choices));
        }
    }

    /// Takes entities by decreasing value while their resources are free.
    fn greedy_incumbent(&mut self) {
        let mut order: Vec<(f64, usize, u8)> = Vec::new();
        for (k, e) in self.entities.iter().enumerate() {
            order.push((e.first.value, k, FIRST));
            if let Some(d) = &e.direct {
                order.push((d.value, k, DIRECT));
            }
        }
        order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut choices = vec![IDLE; self.entities.len()];
        for &(v, k, code) in &order {
            if v <= 0.0 || choices[k] != IDLE {
                continue;
            }
            let cell = self.entities[k].cell;
            let ch = *self.entities[k].choice(code).unwrap();
            if self.available(&ch, cell) {
                self.occupy(&ch, cell, true);
                choices[k] = code;
            }
        }
        for (k, &code) in choices.iter().enumerate() {
            if let Some(ch) = self.entities[k].choice(code).copied() {
                self.occupy(&ch, self.entities[k].cell, false);
            }
        }
        self.offer(choices);
    }

    /// Lagrangian value of the subtree whose free entities start at `from`.
    /// Fills `dl_count` and `relaxed` with the relaxed solution.
    fn relaxed_bound(&mut self, from: usize, acc: f64, lambda: &[f64]) -> f64 {
        self.top_a.fill(EMPTY_TOP);
        self.top_b.fill(EMPTY_TOP);
        for k in from..self.entities.len() {
            let e = &self.entities[k];
            let cell = e.cell;
            for (code, ch) in [(FIRST, Some(&e.first)), (DIRECT, e.direct.as_ref())] {
                let Some(ch) = ch else { continue };
                if !self.available(ch, cell) {
                    continue;
                }
                let c = Candidate {
                    value: ch.value - ch.dl.map_or(0.0, |m| lambda[m]),
                    entity: k,
                    code,
                    dl: ch.dl,
                };
                match ch.slot {
                    Slot::A => self.top_a[cell].offer(c),
                    Slot::B => self.top_b[cell].offer(c),
                }
            }
        }
        self.dl_count.fill(0);
        let mut total = acc;
        for m in 0..self.num_cells {
            if !self.used_dl[m] {
                total += lambda[m];
            }
        }
        for cell in 0..self.num_cells {
            let Top { first: a1, second: a2 } = self.top_a[cell];
            let Top { first: b1, second: b2 } = self.top_b[cell];
            // Nothing, A alone, B alone, or A and B held by different
            // entities (an entity holds at most one of them).
            let mut best = 0.0;
            let mut pick = [NO_CANDIDATE; 2];
            let mut consider = |v: f64, p: [Candidate; 2]| {
                if v > best {
                    best = v;
                    pick = p;
                }
            };
            consider(a1.value, [a1, NO_CANDIDATE]);
            consider(b1.value, [NO_CANDIDATE, b1]);
            if a1.entity != usize::MAX && b1.entity != usize::MAX {
                if a1.entity != b1.entity {
                    consider(a1.value + b1.value, [a1, b1]);
                } else {
                    consider(a1.value + b2.value, [a1, b2]);
                    consider(a2.value + b1.value, [a2, b1]);
                }
            }
            total += best;
            for c in &pick {
                if let Some(m) = c.dl {
                    self.dl_count[m] += 1;
                }
            }
            self.relaxed[cell] = pick;
        }
        total
    }

    /// Tightens `lambda` in place and returns the smallest bound seen. When a
    /// relaxed solution respects every downlink row it is offered as an
    /// incumbent.
    fn bound(&mut self, from: usize, acc: f64, lambda: &mut [f64], iterations: usize) -> f64 {
        self.stats.bound_evaluations += 1;
        let mut best_bound = f64::INFINITY;
        let mut best_lambda = lambda.to_vec();
        let mut theta = 1.0;
        for it in 0..=iterations {
            let z = self.relaxed_bound(from, acc, lambda);
            if z < best_bound {
                best_bound = z;
                best_lambda.copy_from_slice(lambda);
            }
            let feasible = self.dl_count.iter().all(|&c| c <= 1);
            if feasible {
                self.offer_relaxed(from);
                let tight = (0..self.num_cells).all(|m| self.used_dl[m] || lambda[m] == 0.0 || self.dl_count[m] == 1);
                if tight {
                    break;
                }
            }
            let incumbent = self.best.as_ref().map_or(0.0, |(v, _)| *v);
            if it == iterations || best_bound + self.slack < incumbent {
                break;
            }
            let mut norm = 0.0;
            for m in 0..self.num_cells {
                if !self.used_dl[m] {
                    let g = 1.0 - self.dl_count[m] as f64;
                    if !(lambda[m] == 0.0 && g > 0.0) {
                        norm += g * g;
                    }
                }
            }
            if norm == 0.0 {
                break;
            }
            let gap = (z - incumbent).max(self.slack);
            let step = theta * gap / norm;
            for m in 0..self.num_cells {
                if !self.used_dl[m] {
                    let g = 1.0 - self.dl_count[m] as f64;
                    lambda[m] = (lambda[m] - step * g).max(0.0);
                }
            }
            theta *= 0.8;
        }
        lambda.copy_from_slice(&best_lambda);
        best_bound
    }

    /// Current prefix completed by the relaxed solution.
    fn offer_relaxed(&mut self, from: usize) {
        let mut choices = self.choices.clone();
        for c in &mut choices[from..] {
            *c = IDLE;
        }
        for pick in &self.relaxed {
            for c in pick.iter().filter(|c| c.entity != usize::MAX) {
                choices[c.entity] = c.code;
            }
        }
        self.offer(choices);
    }

    fn prunable(&self, depth: usize, bound: f64) -> bool {
        let Some((best, inc)) = &self.best else { return false };
        if bound + self.slack < *best {
            return true;
        }
        // Ties: every completion here is at least the all-idle completion in
        // lexicographic order, so a no-better subtree can go once that
        // completion does not precede the incumbent.
        if bound <= *best + self.slack {
            let prefix = &self.choices[..depth];
            return match prefix.cmp(&inc[..depth]) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => inc[depth..].iter().all(|&c| c == IDLE),
            };
        }
        false
    }

    fn dfs(&mut self, depth: usize, acc: f64, lambda: &mut [f64], iterations: usize) {
        self.stats.nodes += 1;
        if depth == self.entities.len() {
            let choices = self.choices.clone();
            self.offer(choices);
            return;
        }
        let bound = self.bound(depth, acc, lambda, iterations);
        if self.prunable(depth, bound) {
            return;
        }
        let cell = self.entities[depth].cell;
        for code in [IDLE, FIRST, DIRECT] {
            let next = if code == IDLE {
                acc
            } else {
                let Some(ch) = self.entities[depth].choice(code).copied() else {
                    continue;
                };
                if !self.available(&ch, cell) {
                    continue;
                }
                self.occupy(&ch, cell, true);
                ch.add_to(acc)
            };
            self.choices[depth] = code;
            let mut child = lambda.to_vec();
            self.dfs(depth + 1, next, &mut child, NODE_ITERATIONS);
            if let Some(ch) = self.entities[depth].choice(code).copied() {
                self.occupy(&ch, cell, false);
            }
            self.choices[depth] = IDLE;
        }
    }
}
