//! Exhaustive enumeration, used as the reference for [`solve_exact`](super::solve_exact).
//!
//! Assignments are walked in lexicographic order (variable 0 first, 0 before
//! 1). A branch is abandoned only once a row whose variables are all assigned
//! is violated, so every feasible assignment is visited and no objective
//! information is used to skip any of them.

use super::program::BinaryProgram;
use super::{Decision, SolveError};

pub const BRUTE_FORCE_CAP: usize = 24;

pub fn solve_bruteforce(program: &BinaryProgram) -> Result<Decision, SolveError> {
    let values = solve_bruteforce_binary(program)?;
    Ok(program.decode(&values))
}

pub fn solve_bruteforce_binary(program: &BinaryProgram) -> Result<Vec<bool>, SolveError> {
    let n = program.num_vars();
    if n > BRUTE_FORCE_CAP {
        return Err(SolveError::TooManyVariables {
            count: n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    // Rows grouped by the last variable they mention; empty rows are checked up front.
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n];
    let empty_ok = vec![false; n];
    for (r, row) in program.rows.iter().enumerate() {
        match row.terms.iter().map(|(v, _)| *v).max() {
            Some(last) => closing[last].push(r),
            None => {
                if !row.is_satisfied(&empty_ok) {
                    return Err(SolveError::Infeasible);
                }
            }
        }
    }
    let mut values = vec![false; n];
    let mut best: Option<(f64, Vec<bool>)> = None;
    enumerate(program, &closing, 0, &mut values, &mut best);
    best.map(|(_, v)| v).ok_or(SolveError::Infeasible)
}

fn enumerate(
    program: &BinaryProgram,
    closing: &[Vec<usize>],
    depth: usize,
    values: &mut Vec<bool>,
    best: &mut Option<(f64, Vec<bool>)>,
) {
    if depth == values.len() {
        let obj = program.objective_value(values);
        if best.as_ref().is_none_or(|(b, _)| obj > *b) {
            *best = Some((obj, values.clone()));
        }
        return;
    }
    for val in [false, true] {
        values[depth] = val;
        if closing[depth].iter().all(|&r| program.rows[r].is_satisfied(values)) {
            enumerate(program, closing, depth + 1, values, best);
        }
    }
    values[depth] = false;
}
