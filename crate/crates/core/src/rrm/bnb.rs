//! Exact depth-first branch and bound for [`BinaryProgram`]s.
//!
//! No LP is solved. Each node is bounded by a Lagrangian relaxation of all
//! rows: for multipliers `l >= 0` the value
//! `l.b + sum_v max(0, c_v - (l A)_v)` over the free variables (fixed ones
//! contribute their reduced cost times their value) is an upper bound on every
//! completion. With `l = 0` this is the plain sum of positive objective
//! coefficients of the free variables; a few projected subgradient steps per
//! node, warm-started from the parent, tighten it. Rows are propagated on
//! integer activity bounds after every fixing, which resolves the per-cell
//! uplink rows and the product linearisation as soon as one of their
//! variables is decided.
//!
//! Branching is on the lowest-index free variable, 0 before 1, so leaves are
//! reached in lexicographic order. Among optimal assignments the
//! lexicographically smallest one is returned.

use super::program::{BinaryProgram, Sense};
use super::{Decision, SolveError};

const ROOT_ITERATIONS: usize = 60;
const NODE_ITERATIONS: usize = 8;

/// Relative slack on bound comparisons, covering rounding in the bound sum.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub bound_evaluations: u64,
}

/// Solves a snapshot program and decodes it into scheduling and mode flags.
pub fn solve_exact(program: &BinaryProgram) -> Result<Decision, SolveError> {
    let values = solve_binary(program)?;
    Ok(program.decode(&values))
}

/// Globally optimal assignment of a maximisation program.
pub fn solve_binary(program: &BinaryProgram) -> Result<Vec<bool>, SolveError> {
    solve_binary_with_stats(program).map(|(v, _)| v)
}

pub fn solve_binary_with_stats(program: &BinaryProgram) -> Result<(Vec<bool>, SolveStats), SolveError> {
    let mut search = Search::new(program);
    if !search.propagate() {
        return Err(SolveError::Infeasible);
    }
    search.greedy_incumbent();
    let mut lambda = vec![0.0; search.rows.len()];
    search.dfs(&mut lambda, ROOT_ITERATIONS);
    let stats = search.stats;
    search.best.map(|(_, v)| (v, stats)).ok_or(SolveError::Infeasible)
}

/// Row in `sum a x <= rhs` form.
struct LeRow {
    terms: Vec<(usize, i64)>,
    rhs: i64,
}

const FREE: i8 = -1;

struct Search<'p> {
    program: &'p BinaryProgram,
    rows: Vec<LeRow>,
    var_rows: Vec<Vec<(usize, i64)>>,
    assign: Vec<i8>,
    /// Smallest achievable activity of each row given the fixings.
    min_act: Vec<i64>,
    trail: Vec<usize>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    best: Option<(f64, Vec<bool>)>,
    slack: f64,
    reduced: Vec<f64>,
    xstar: Vec<bool>,
    grad: Vec<f64>,
    stats: SolveStats,
}

impl<'p> Search<'p> {
    fn new(program: &'p BinaryProgram) -> Self {
        let n = program.num_vars();
        let mut rows = Vec::new();
        for r in &program.rows {
            let terms: Vec<(usize, i64)> = r.terms.iter().map(|&(v, a)| (v, a as i64)).collect();
            let neg = || LeRow {
                terms: terms.iter().map(|&(v, a)| (v, -a)).collect(),
                rhs: -(r.rhs as i64),
            };
            match r.sense {
                Sense::Le => rows.push(LeRow {
                    terms: terms.clone(),
                    rhs: r.rhs as i64,
                }),
                Sense::Ge => rows.push(neg()),
                Sense::Eq => {
                    rows.push(neg());
                    rows.push(LeRow {
                        terms: terms.clone(),
                        rhs: r.rhs as i64,
                    });
                }
            }
        }
        let mut var_rows = vec![Vec::new(); n];
        let mut min_act = vec![0; rows.len()];
        for (ri, row) in rows.iter().enumerate() {
            for &(v, a) in &row.terms {
                var_rows[v].push((ri, a));
                if a < 0 {
                    min_act[ri] += a;
                }
            }
        }
        let m = rows.len();
        let slack = BOUND_SLACK * (1.0 + program.objective.iter().map(|c| c.abs()).sum::<f64>());
        Self {
            program,
            rows,
            var_rows,
            assign: vec![FREE; n],
            min_act,
            trail: Vec::with_capacity(n),
            queue: (0..m).collect(),
            queued: vec![true; m],
            best: None,
            slack,
            reduced: vec![0.0; n],
            xstar: vec![false; n],
            grad: vec![0.0; m],
            stats: SolveStats::default(),
        }
    }

    fn fix(&mut self, v: usize, val: bool) {
        debug_assert_eq!(self.assign[v], FREE);
        self.assign[v] = val as i8;
        self.trail.push(v);
        for &(r, a) in &self.var_rows[v] {
            let delta = match (a > 0, val) {
                (true, true) => a,
                (false, false) => -a,
                _ => 0,
            };
            self.min_act[r] += delta;
            if !self.queued[r] {
                self.queued[r] = true;
                self.queue.push(r);
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            let val = self.assign[v] == 1;
            for &(r, a) in &self.var_rows[v] {
                let delta = match (a > 0, val) {
                    (true, true) => a,
                    (false, false) => -a,
                    _ => 0,
                };
                self.min_act[r] -= delta;
            }
            self.assign[v] = FREE;
        }
    }

    fn clear_queue(&mut self) {
        for r in self.queue.drain(..) {
            self.queued[r] = false;
        }
    }

    /// Activity-bound propagation to a fixpoint. False on conflict.
    fn propagate(&mut self) -> bool {
        while let Some(r) = self.queue.pop() {
            self.queued[r] = false;
            let room = self.rows[r].rhs - self.min_act[r];
            if room < 0 {
                self.clear_queue();
                return false;
            }
            for t in 0..self.rows[r].terms.len() {
                let (u, a) = self.rows[r].terms[t];
                if self.assign[u] != FREE || a.abs() <= room {
                    continue;
                }
                // A free variable whose unfavourable value would exceed the room.
                self.fix(u, a < 0);
            }
        }
        true
    }

    fn completion(&self) -> Vec<bool> {
        self.assign.iter().map(|&a| a == 1).collect()
    }

    fn offer(&mut self, values: Vec<bool>) {
        debug_assert!(self.program.is_feasible(&values));
        let obj = self.program.objective_value(&values);
        let better = match &self.best {
            None => true,
            Some((b, bv)) => obj > *b || (obj == *b && values < *bv),
        };
        if better {
            self.best = Some((obj, values));
        }
    }

    /// Fixes variables greedily by objective coefficient to seed the incumbent.
    fn greedy_incumbent(&mut self) {
        let mark = self.trail.len();
        let mut order: Vec<usize> = (0..self.assign.len()).collect();
        order.sort_by(|&a, &b| self.program.objective[b].total_cmp(&self.program.objective[a]));
        let mut ok = true;
        for v in order {
            if self.assign[v] != FREE {
                continue;
            }
            let want = self.program.objective[v] > 0.0;
            let m = self.trail.len();
            self.fix(v, want);
            if self.propagate() {
                continue;
            }
            self.undo_to(m);
            self.fix(v, !want);
            if !self.propagate() {
                ok = false;
                break;
            }
        }
        if ok {
            let values = self.completion();
            self.offer(values);
        }
        self.undo_to(mark);
    }

    /// True when the subtree under the current fixings cannot improve on the
    /// incumbent, counting lexicographic tie-breaking.
    fn prunable(&self, bound: f64) -> bool {
        let Some((best, best_vals)) = &self.best else {
            return false;
        };
        if bound + self.slack < *best {
            return true;
        }
        if bound > *best + self.slack {
            return false;
        }
        // Every completion here is at least the all-free-zero completion in
        // lexicographic order; prune ties when that is not below the incumbent.
        for (a, b) in self.assign.iter().zip(best_vals) {
            let a = *a == 1;
            if a != *b {
                return a;
            }
        }
        true
    }

    /// Best Lagrangian bound over a few subgradient steps from `lambda`.
    fn bound(&mut self, lambda: &mut [f64], iterations: usize) -> f64 {
        let c = &self.program.objective;
        let mut best_bound = f64::INFINITY;
        let mut theta = 1.0;
        let mut stall = 0;
        for it in 0..=iterations {
            self.stats.bound_evaluations += 1;
            self.reduced.copy_from_slice(c);
            let mut value = 0.0;
            for (row, &l) in self.rows.iter().zip(lambda.iter()) {
                if l > 0.0 {
                    value += l * row.rhs as f64;
                    for &(v, a) in &row.terms {
                        self.reduced[v] -= l * a as f64;
                    }
                }
            }
            for v in 0..self.reduced.len() {
                let rc = self.reduced[v];
                let on = match self.assign[v] {
                    FREE => rc > 0.0,
                    a => a == 1,
                };
                self.xstar[v] = on;
                if on {
                    value += rc;
                }
            }
            if value < best_bound {
                best_bound = value;
                stall = 0;
            } else {
                stall += 1;
                if stall >= 2 {
                    theta *= 0.5;
                    stall = 0;
                }
            }
            if self.prunable(best_bound) || it == iterations {
                break;
            }

            let mut norm = 0.0;
            let mut feasible = true;
            for (r, row) in self.rows.iter().enumerate() {
                let act: i64 = row.terms.iter().filter(|(v, _)| self.xstar[*v]).map(|(_, a)| a).sum();
                let g = (row.rhs - act) as f64;
                if g < 0.0 {
                    feasible = false;
                }
                self.grad[r] = if lambda[r] == 0.0 && g > 0.0 { 0.0 } else { g };
                norm += self.grad[r] * self.grad[r];
            }
            if feasible {
                let x = self.xstar.clone();
                self.offer(x);
                if self.prunable(best_bound) {
                    break;
                }
            }
            if norm == 0.0 {
                break;
            }
            let target = self.best.as_ref().map_or(0.9 * value, |(b, _)| *b);
            let gap = (value - target).max(self.slack);
            let step = theta * gap / norm;
            for (l, g) in lambda.iter_mut().zip(&self.grad) {
                *l = (*l - step * g).max(0.0);
            }
        }
        best_bound
    }

    fn dfs(&mut self, lambda: &mut [f64], iterations: usize) {
        self.stats.nodes += 1;
        let Some(v) = self.assign.iter().position(|&a| a == FREE) else {
            let values = self.completion();
            self.offer(values);
            return;
        };
        let bound = self.bound(lambda, iterations);
        if self.prunable(bound) {
            return;
        }
        for val in [false, true] {
            let mark = self.trail.len();
            self.fix(v, val);
            if self.propagate() {
                let mut child = lambda.to_vec();
                self.dfs(&mut child, NODE_ITERATIONS);
            }
            self.undo_to(mark);
        }
    }
}
