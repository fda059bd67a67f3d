use std::fmt::{self, Write as _};

use super::{Decision, SharingScheme, SnapshotProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarLabel {
    CueScheduled(usize),
    PairScheduled(usize),
    PairDirect(usize),
    /// Linearised product of `PairDirect` and `PairScheduled`.
    PairProduct(usize),
    Generic(usize),
}

impl fmt::Display for VarLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarLabel::CueScheduled(i) => write!(f, "y_c{i}"),
            VarLabel::PairScheduled(j) => write!(f, "y_p{j}"),
            VarLabel::PairDirect(j) => write!(f, "x_p{j}"),
            VarLabel::PairProduct(j) => write!(f, "w_p{j}"),
            VarLabel::Generic(k) => write!(f, "v{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowLabel {
    /// Overlay: at most one uplink transmitter per cell.
    Uplink {
        cell: usize,
    },
    /// Underlay 1: at most one CUE or cellular-mode pair.
    UplinkCellular {
        cell: usize,
    },
    /// Underlay 1: at most one direct-mode pair.
    UplinkDirect {
        cell: usize,
    },
    /// Underlay 2: at most one CUE.
    UplinkCue {
        cell: usize,
    },
    /// Underlay 2: at most one pair in either mode.
    UplinkPair {
        cell: usize,
    },
    /// At most one cellular-mode pair receives on the cell's downlink.
    Downlink {
        cell: usize,
    },
    /// Direct mode only for scheduled pairs.
    ModeLink {
        pair: usize,
    },
    ProductUpperDirect {
        pair: usize,
    },
    ProductUpperScheduled {
        pair: usize,
    },
    ProductLower {
        pair: usize,
    },
    /// Pair too far apart for a direct link.
    DistanceLimit {
        pair: usize,
    },
    /// D2D disabled for the run.
    DirectDisabled {
        pair: usize,
    },
    Generic(usize),
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::Uplink { cell } => write!(f, "ul_cell{cell}"),
            RowLabel::UplinkCellular { cell } => write!(f, "ul_cm_cell{cell}"),
            RowLabel::UplinkDirect { cell } => write!(f, "ul_dm_cell{cell}"),
            RowLabel::UplinkCue { cell } => write!(f, "ul_cue_cell{cell}"),
            RowLabel::UplinkPair { cell } => write!(f, "ul_pair_cell{cell}"),
            RowLabel::Downlink { cell } => write!(f, "dl_cell{cell}"),
            RowLabel::ModeLink { pair } => write!(f, "mode_p{pair}"),
            RowLabel::ProductUpperDirect { pair } => write!(f, "lin_x_p{pair}"),
            RowLabel::ProductUpperScheduled { pair } => write!(f, "lin_y_p{pair}"),
            RowLabel::ProductLower { pair } => write!(f, "lin_lo_p{pair}"),
            RowLabel::DistanceLimit { pair } => write!(f, "dist_p{pair}"),
            RowLabel::DirectDisabled { pair } => write!(f, "cm_only_p{pair}"),
            RowLabel::Generic(k) => write!(f, "r{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub label: RowLabel,
    pub terms: Vec<(usize, i32)>,
    pub sense: Sense,
    pub rhs: i32,
}

impl Row {
    pub fn activity(&self, values: &[bool]) -> i64 {
        self.terms
            .iter()
            .filter(|(v, _)| values[*v])
            .map(|(_, a)| *a as i64)
            .sum()
    }

    pub fn is_satisfied(&self, values: &[bool]) -> bool {
        self.sense.holds(self.activity(values), self.rhs as i64)
    }
}

/// Where each snapshot decision lives in the variable vector.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProgramIndex {
    pub cue_y: Vec<usize>,
    pub pair_y: Vec<usize>,
    pub pair_x: Vec<usize>,
    pub pair_w: Vec<usize>,
}

/// Maximisation program over binary variables with integer-coefficient rows.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BinaryProgram {
    pub vars: Vec<VarLabel>,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub index: ProgramIndex,
}

impl BinaryProgram {
    /// Program with `objective.len()` generic variables and no rows.
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            vars: (0..objective.len()).map(VarLabel::Generic).collect(),
            objective,
            rows: Vec::new(),
            index: ProgramIndex::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn add_var(&mut self, label: VarLabel, coefficient: f64) -> usize {
        self.vars.push(label);
        self.objective.push(coefficient);
        self.vars.len() - 1
    }

    pub fn add_row(&mut self, label: RowLabel, terms: Vec<(usize, i32)>, sense: Sense, rhs: i32) {
        self.rows.push(Row {
            label,
            terms,
            sense,
            rhs,
        });
    }

    pub fn is_feasible(&self, values: &[bool]) -> bool {
        values.len() == self.num_vars() && self.rows.iter().all(|r| r.is_satisfied(values))
    }

    /// Objective of an assignment, summed in variable order. Both solvers
    /// report this value so their objectives compare bit-exactly.
    pub fn objective_value(&self, values: &[bool]) -> f64 {
        self.objective
            .iter()
            .zip(values)
            .filter(|(_, v)| **v)
            .fold(0.0, |acc, (c, _)| acc + c)
    }

    /// Maps a variable assignment back to scheduling and mode flags.
    pub fn decode(&self, values: &[bool]) -> Decision {
        let ix = &self.index;
        let mut y: Vec<bool> = ix.cue_y.iter().map(|&v| values[v]).collect();
        y.extend(ix.pair_y.iter().map(|&v| values[v]));
        Decision {
            y,
            x: ix.pair_x.iter().map(|&v| values[v]).collect(),
            objective_value: self.objective_value(values),
        }
    }

    /// Inverse of [`decode`](Self::decode); the product variable is set to
    /// `x AND y`.
    pub fn encode(&self, decision: &Decision) -> Vec<bool> {
        let ix = &self.index;
        let nc = ix.cue_y.len();
        let mut values = vec![false; self.num_vars()];
        for (i, &v) in ix.cue_y.iter().enumerate() {
            values[v] = decision.y[i];
        }
        for j in 0..ix.pair_y.len() {
            let y = decision.y[nc + j];
            let x = decision.x[j];
            values[ix.pair_y[j]] = y;
            values[ix.pair_x[j]] = x;
            values[ix.pair_w[j]] = x && y;
        }
        values
    }

    /// CPLEX-style LP listing.
    pub fn to_lp_text(&self) -> String {
        let mut out = String::new();
        out.push_str("Maximize\n obj:");
        for (v, c) in self.objective.iter().enumerate() {
            let _ = write!(
                out,
                " {} {:?} {}",
                if *c < 0.0 { '-' } else { '+' },
                c.abs(),
                self.vars[v]
            );
        }
        out.push_str("\nSubject To\n");
        for row in &self.rows {
            let _ = write!(out, " {}:", row.label);
            if row.terms.is_empty() {
                out.push_str(" 0");
            }
            for &(v, a) in &row.terms {
                let _ = write!(out, " {} {} {}", if a < 0 { '-' } else { '+' }, a.abs(), self.vars[v]);
            }
            let _ = writeln!(out, " {} {}", row.sense.symbol(), row.rhs);
        }
        out.push_str("Binary\n");
        for v in &self.vars {
            let _ = writeln!(out, " {v}");
        }
        out.push_str("End\n");
        out
    }
}

/// Builds the linearised 0-1 program of one snapshot.
///
/// Variables are laid out as all CUE flags first, then `(y, x, w)` per pair.
/// The objective is
/// `sum_i b_i U_leg_i y_i + sum_j b_j [U_cm_j y_j + (U_dm_j - U_cm_j) w_j]`,
/// i.e. a scheduled pair earns its direct rate when `w = 1` and its cellular
/// rate otherwise.
pub fn build_program(problem: &SnapshotProblem) -> BinaryProgram {
    let u = &problem.utilities;
    let nc = problem.num_cues();
    let np = problem.num_pairs();
    let mut prog = BinaryProgram::default();

    for i in 0..nc {
        let v = prog.add_var(VarLabel::CueScheduled(i), u.weights[i] * u.u_leg[i]);
        prog.index.cue_y.push(v);
    }
    for j in 0..np {
        let b = u.weights[nc + j];
        let y = prog.add_var(VarLabel::PairScheduled(j), b * u.u_cm[j]);
        let x = prog.add_var(VarLabel::PairDirect(j), 0.0);
        let w = prog.add_var(VarLabel::PairProduct(j), b * (u.u_dm[j] - u.u_cm[j]));
        prog.index.pair_y.push(y);
        prog.index.pair_x.push(x);
        prog.index.pair_w.push(w);
    }
    let ix = prog.index.clone();

    let mut cues_in = vec![Vec::new(); problem.num_cells];
    for (i, &c) in problem.cue_cell.iter().enumerate() {
        cues_in[c].push(i);
    }
    let mut tx_in = vec![Vec::new(); problem.num_cells];
    let mut rx_in = vec![Vec::new(); problem.num_cells];
    for j in 0..np {
        tx_in[problem.pair_tx_cell[j]].push(j);
        rx_in[problem.pair_rx_cell[j]].push(j);
    }

    for cell in 0..problem.num_cells {
        let cue_terms = || cues_in[cell].iter().map(|&i| (ix.cue_y[i], 1)).collect::<Vec<_>>();
        let pairs = &tx_in[cell];
        match problem.scheme {
            SharingScheme::Overlay => {
                let mut t = cue_terms();
                t.extend(pairs.iter().map(|&j| (ix.pair_y[j], 1)));
                if !t.is_empty() {
                    prog.add_row(RowLabel::Uplink { cell }, t, Sense::Le, 1);
                }
            }
            SharingScheme::Underlay1 => {
                let mut t = cue_terms();
                for &j in pairs {
                    t.push((ix.pair_y[j], 1));
                    t.push((ix.pair_w[j], -1));
                }
                if !t.is_empty() {
                    prog.add_row(RowLabel::UplinkCellular { cell }, t, Sense::Le, 1);
                }
                if !pairs.is_empty() {
                    let t = pairs.iter().map(|&j| (ix.pair_w[j], 1)).collect();
                    prog.add_row(RowLabel::UplinkDirect { cell }, t, Sense::Le, 1);
                }
            }
            SharingScheme::Underlay2 => {
                if !cues_in[cell].is_empty() {
                    prog.add_row(RowLabel::UplinkCue { cell }, cue_terms(), Sense::Le, 1);
                }
                if !pairs.is_empty() {
                    let t = pairs.iter().map(|&j| (ix.pair_y[j], 1)).collect();
                    prog.add_row(RowLabel::UplinkPair { cell }, t, Sense::Le, 1);
                }
            }
        }
    }

    for (cell, pairs) in rx_in.iter().enumerate() {
        if pairs.is_empty() {
            continue;
        }
        let mut t = Vec::with_capacity(2 * pairs.len());
        for &j in pairs {
            t.push((ix.pair_y[j], 1));
            t.push((ix.pair_w[j], -1));
        }
        prog.add_row(RowLabel::Downlink { cell }, t, Sense::Le, 1);
    }

    for j in 0..np {
        let (y, x, w) = (ix.pair_y[j], ix.pair_x[j], ix.pair_w[j]);
        prog.add_row(RowLabel::ModeLink { pair: j }, vec![(x, 1), (y, -1)], Sense::Le, 0);
        prog.add_row(
            RowLabel::ProductUpperDirect { pair: j },
            vec![(w, 1), (x, -1)],
            Sense::Le,
            0,
        );
        prog.add_row(
            RowLabel::ProductUpperScheduled { pair: j },
            vec![(w, 1), (y, -1)],
            Sense::Le,
            0,
        );
        prog.add_row(
            RowLabel::ProductLower { pair: j },
            vec![(w, 1), (x, -1), (y, -1)],
            Sense::Ge,
            -1,
        );
        if problem.pair_distance[j] > problem.d_max {
            prog.add_row(RowLabel::DistanceLimit { pair: j }, vec![(x, 1)], Sense::Eq, 0);
        }
        if !problem.direct_mode_allowed {
            prog.add_row(RowLabel::DirectDisabled { pair: j }, vec![(x, 1)], Sense::Eq, 0);
        }
    }
    prog
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rrm::EntityUtilities;

    fn problem(
        scheme: SharingScheme,
        cue_cells: &[usize],
        pairs: &[(usize, usize, f64)],
        cells: usize,
    ) -> SnapshotProblem {
        let nc = cue_cells.len();
        let np = pairs.len();
        SnapshotProblem {
            scheme,
            utilities: EntityUtilities {
                u_leg: vec![1.0; nc],
                u_dm: vec![3.0; np],
                u_cm: vec![2.0; np],
                weights: vec![1.0; nc + np],
            },
            cue_cell: cue_cells.to_vec(),
            pair_tx_cell: pairs.iter().map(|p| p.0).collect(),
            pair_rx_cell: pairs.iter().map(|p| p.1).collect(),
            pair_distance: pairs.iter().map(|p| p.2).collect(),
            d_max: 100.0,
            num_cells: cells,
            direct_mode_allowed: true,
        }
    }

    fn rows_with(prog: &BinaryProgram, pred: impl Fn(&RowLabel) -> bool) -> Vec<&Row> {
        prog.rows.iter().filter(|r| pred(&r.label)).collect()
    }

    #[test]
    fn one_cue_one_pair_overlay_structure() {
        let prog = build_program(&problem(SharingScheme::Overlay, &[0], &[(0, 0, 10.0)], 1));
        assert_eq!(prog.num_vars(), 4);
        let ul = rows_with(&prog, |l| matches!(l, RowLabel::Uplink { .. }));
        assert_eq!(ul.len(), 1);
        assert_eq!(ul[0].terms.len(), 2);
        assert_eq!(rows_with(&prog, |l| matches!(l, RowLabel::Downlink { .. })).len(), 1);
        assert_eq!(
            rows_with(&prog, |l| matches!(
                l,
                RowLabel::ProductLower { .. }
                    | RowLabel::ProductUpperDirect { .. }
                    | RowLabel::ProductUpperScheduled { .. }
            ))
            .len(),
            3
        );
        assert!(rows_with(&prog, |l| matches!(l, RowLabel::DistanceLimit { .. })).is_empty());
    }

    #[test]
    fn distant_pair_gets_fixing_row() {
        let prog = build_program(&problem(SharingScheme::Overlay, &[], &[(0, 0, 150.0)], 1));
        let fix = rows_with(&prog, |l| matches!(l, RowLabel::DistanceLimit { pair: 0 }));
        assert_eq!(fix.len(), 1);
        assert_eq!(fix[0].terms, vec![(prog.index.pair_x[0], 1)]);
        assert_eq!((fix[0].sense, fix[0].rhs), (Sense::Eq, 0));
    }

    #[test]
    fn cross_cell_pair_indexing() {
        let prog = build_program(&problem(SharingScheme::Overlay, &[], &[(1, 2, 10.0)], 3));
        let (y, w) = (prog.index.pair_y[0], prog.index.pair_w[0]);
        let ul = rows_with(&prog, |l| matches!(l, RowLabel::Uplink { cell: 1 }));
        assert_eq!(ul[0].terms, vec![(y, 1)]);
        let dl = rows_with(&prog, |l| matches!(l, RowLabel::Downlink { cell: 2 }));
        assert_eq!(dl[0].terms, vec![(y, 1), (w, -1)]);
        assert!(rows_with(&prog, |l| matches!(
            l,
            RowLabel::Uplink { cell: 2 } | RowLabel::Downlink { cell: 1 }
        ))
        .is_empty());
    }

    #[test]
    fn underlay_rows() {
        let u1 = build_program(&problem(SharingScheme::Underlay1, &[0, 0], &[(0, 0, 1.0)], 1));
        assert_eq!(
            rows_with(&u1, |l| matches!(l, RowLabel::UplinkCellular { .. }))[0]
                .terms
                .len(),
            4
        );
        assert_eq!(
            rows_with(&u1, |l| matches!(l, RowLabel::UplinkDirect { .. }))[0]
                .terms
                .len(),
            1
        );
        let u2 = build_program(&problem(SharingScheme::Underlay2, &[0, 0], &[(0, 0, 1.0)], 1));
        assert_eq!(
            rows_with(&u2, |l| matches!(l, RowLabel::UplinkCue { .. }))[0]
                .terms
                .len(),
            2
        );
        assert_eq!(
            rows_with(&u2, |l| matches!(l, RowLabel::UplinkPair { .. }))[0]
                .terms
                .len(),
            1
        );
    }

    #[test]
    fn linearisation_admits_only_the_product() {
        let prog = build_program(&problem(SharingScheme::Overlay, &[], &[(0, 0, 1.0)], 1));
        let pair_rows: Vec<&Row> = rows_with(&prog, |l| {
            matches!(
                l,
                RowLabel::ProductLower { .. }
                    | RowLabel::ProductUpperDirect { .. }
                    | RowLabel::ProductUpperScheduled { .. }
            )
        });
        for x in [false, true] {
            for y in [false, true] {
                let feasible_w: Vec<bool> = [false, true]
                    .into_iter()
                    .filter(|&w| {
                        let v = [y, x, w];
                        pair_rows.iter().all(|r| r.is_satisfied(&v))
                    })
                    .collect();
                assert_eq!(feasible_w, vec![x && y]);
            }
        }
    }

    #[test]
    fn encode_decode_round_trip() {
        let prog = build_program(&problem(
            SharingScheme::Underlay2,
            &[0, 1],
            &[(0, 1, 5.0), (1, 1, 5.0)],
            2,
        ));
        let d = Decision {
            y: vec![true, false, true, true],
            x: vec![true, false],
            objective_value: 0.0,
        };
        let values = prog.encode(&d);
        let back = prog.decode(&values);
        assert_eq!((back.y, back.x), (d.y, d.x));
    }

    #[test]
    fn lp_listing_mentions_everything() {
        let prog = build_program(&problem(SharingScheme::Underlay1, &[0], &[(0, 0, 500.0)], 1));
        let text = prog.to_lp_text();
        assert!(text.starts_with("Maximize\n obj: + 1.0 y_c0 + 2.0 y_p0 + 0.0 x_p0 + 1.0 w_p0\n"));
        assert!(text.contains(" ul_cm_cell0: + 1 y_c0 + 1 y_p0 - 1 w_p0 <= 1\n"));
        assert!(text.contains(" lin_lo_p0: + 1 w_p0 - 1 x_p0 - 1 y_p0 >= -1\n"));
        assert!(text.contains(" dist_p0: + 1 x_p0 = 0\n"));
        assert!(text.ends_with("Binary\n y_c0\n y_p0\n x_p0\n w_p0\nEnd\n"));
    }
}
