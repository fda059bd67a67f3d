//! Joint mode selection and scheduling for one snapshot.
//!
//! Every snapshot becomes a 0-1 linear program over three decisions per
//! potential pair (scheduled `y`, direct mode `x`, and the product `w = x*y`)
//! plus one scheduling decision per legacy user. The constraint family that
//! limits simultaneous uplink transmitters per cell depends on the
//! [`SharingScheme`]; the downlink, mode/scheduling coupling and distance rows
//! are common to all schemes.
//!
//! Schedulable entities are indexed with the legacy users first
//! (`0..num_cues`) followed by the pairs.

mod bnb;
mod brute;
mod program;
mod structured;
mod utility;
mod weights;

pub use bnb::{solve_binary, solve_binary_with_stats, solve_exact, SolveStats};
pub use brute::{solve_bruteforce, solve_bruteforce_binary, BRUTE_FORCE_CAP};
pub use program::{build_program, BinaryProgram, ProgramIndex, Row, RowLabel, Sense, VarLabel};
pub use structured::{solve_snapshot, solve_snapshot_with_stats};
pub use utility::{compute_utilities, EntityUtilities, InterferenceEstimate, LinkTable};
pub use weights::{update_weights, SchedulerPolicy, ServiceHistory, PF_FLOOR_BPS};

use thiserror::Error;

use crate::topology::{CellLayout, UePopulation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SharingScheme {
    /// CM and DM both on dedicated resources.
    Overlay,
    /// CM on dedicated resources, DM shares with the cellular user.
    Underlay1,
    /// CM and DM both share with the cellular user.
    Underlay2,
}

impl SharingScheme {
    pub const ALL: [SharingScheme; 3] = [Self::Overlay, Self::Underlay1, Self::Underlay2];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Overlay => "overlay",
            Self::Underlay1 => "underlay1",
            Self::Underlay2 => "underlay2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "overlay" => Some(Self::Overlay),
            "underlay1" | "underlay-1" | "underlay_1" => Some(Self::Underlay1),
            "underlay2" | "underlay-2" | "underlay_2" => Some(Self::Underlay2),
            _ => None,
        }
    }

    /// Whether two uplink transmitters of the same cell occupy the same
    /// resource (and therefore interfere with each other).
    pub fn shares_uplink(self, a: UplinkClass, b: UplinkClass) -> bool {
        use UplinkClass::*;
        match self {
            Self::Overlay => false,
            Self::Underlay1 => matches!((a, b), (Direct, Cue | Cellular) | (Cue | Cellular, Direct)),
            Self::Underlay2 => matches!((a, b), (Cue, Cellular | Direct) | (Cellular | Direct, Cue)),
        }
    }
}

/// Role of an uplink transmission.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UplinkClass {
    Cue,
    /// Pair transmitter sending to its eNB.
    Cellular,
    /// Pair transmitter sending straight to its partner.
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairMode {
    Cellular,
    Direct,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotProblem {
    pub scheme: SharingScheme,
    pub utilities: EntityUtilities,
    pub cue_cell: Vec<usize>,
    pub pair_tx_cell: Vec<usize>,
    pub pair_rx_cell: Vec<usize>,
    pub pair_distance: Vec<f64>,
    pub d_max: f64,
    pub num_cells: usize,
    /// When false every pair is forced into cellular mode.
    pub direct_mode_allowed: bool,
}

impl SnapshotProblem {
    pub fn new(scheme: SharingScheme, utilities: EntityUtilities, layout: &CellLayout, pop: &UePopulation) -> Self {
        Self {
            scheme,
            utilities,
            cue_cell: pop.cues().iter().map(|u| u.serving_cell).collect(),
            pair_tx_cell: pop.pairs.iter().map(|p| p.tx_cell).collect(),
            pair_rx_cell: pop.pairs.iter().map(|p| p.rx_cell).collect(),
            pair_distance: pop.pairs.iter().map(|p| p.distance_m).collect(),
            d_max: layout.d2d_range_m(),
            num_cells: layout.num_cells(),
            direct_mode_allowed: true,
        }
    }

    pub fn num_cues(&self) -> usize {
        self.cue_cell.len()
    }

    pub fn num_pairs(&self) -> usize {
        self.pair_tx_cell.len()
    }

    pub fn num_entities(&self) -> usize {
        self.num_cues() + self.num_pairs()
    }

    /// Pairs that may use direct mode at all.
    pub fn direct_mode_possible(&self, pair: usize) -> bool {
        self.direct_mode_allowed && self.pair_distance[pair] <= self.d_max
    }
}

/// Optimal scheduling and mode vectors of one snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct Decision {
    /// Scheduled flag per entity (CUEs first, then pairs).
    pub y: Vec<bool>,
    /// Direct-mode flag per pair.
    pub x: Vec<bool>,
    pub objective_value: f64,
}

impl Decision {
    pub fn num_cues(&self) -> usize {
        self.y.len() - self.x.len()
    }

    pub fn cue_scheduled(&self, cue: usize) -> bool {
        self.y[cue]
    }

    pub fn pair_scheduled(&self, pair: usize) -> bool {
        self.y[self.num_cues() + pair]
    }

    /// Mode of a scheduled pair, `None` when it is idle.
    pub fn pair_mode(&self, pair: usize) -> Option<PairMode> {
        match (self.pair_scheduled(pair), self.x[pair]) {
            (false, _) => None,
            (true, true) => Some(PairMode::Direct),
            (true, false) => Some(PairMode::Cellular),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DecisionViolation {
    #[error("decision has {got} scheduling flags, expected {expected}")]
    Shape { got: usize, expected: usize },
    #[error("pair {0} is in direct mode but not scheduled")]
    ModeWithoutSchedule(usize),
    #[error("pair {0} is in direct mode but direct mode is not allowed for it")]
    DirectNotAllowed(usize),
    #[error("cell {cell}: uplink limit of the {scheme:?} scheme exceeded")]
    Uplink { cell: usize, scheme: SharingScheme },
    #[error("cell {0}: more than one cellular-mode pair receives on the downlink")]
    Downlink(usize),
}

/// Checks a decision against the scheme rules directly, without going through
/// the program rows.
pub fn check_decision(problem: &SnapshotProblem, decision: &Decision) -> Result<(), DecisionViolation> {
    let nc = problem.num_cues();
    let np = problem.num_pairs();
    if decision.y.len() != nc + np || decision.x.len() != np {
        return Err(DecisionViolation::Shape {
            got: decision.y.len(),
            expected: nc + np,
        });
    }
    let mut cues = vec![0usize; problem.num_cells];
    let mut cellular = vec![0usize; problem.num_cells];
    let mut direct = vec![0usize; problem.num_cells];
    let mut dl = vec![0usize; problem.num_cells];
    for (i, &cell) in problem.cue_cell.iter().enumerate() {
        if decision.y[i] {
            cues[cell] += 1;
        }
    }
    for j in 0..np {
        let scheduled = decision.y[nc + j];
        if decision.x[j] && !scheduled {
            return Err(DecisionViolation::ModeWithoutSchedule(j));
        }
        if decision.x[j] && !problem.direct_mode_possible(j) {
            return Err(DecisionViolation::DirectNotAllowed(j));
        }
        if !scheduled {
            continue;
        }
        if decision.x[j] {
            direct[problem.pair_tx_cell[j]] += 1;
        } else {
            cellular[problem.pair_tx_cell[j]] += 1;
            dl[problem.pair_rx_cell[j]] += 1;
        }
    }
    for cell in 0..problem.num_cells {
        let ok = match problem.scheme {
            SharingScheme::Overlay => cues[cell] + cellular[cell] + direct[cell] <= 1,
            SharingScheme::Underlay1 => cues[cell] + cellular[cell] <= 1 && direct[cell] <= 1,
            SharingScheme::Underlay2 => cues[cell] <= 1 && cellular[cell] + direct[cell] <= 1,
        };
        if !ok {
            return Err(DecisionViolation::Uplink {
                cell,
                scheme: problem.scheme,
            });
        }
        if dl[cell] > 1 {
            return Err(DecisionViolation::Downlink(cell));
        }
    }
    Ok(())
}

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("program is infeasible")]
    Infeasible,
    #[error("{count} variables exceed the enumeration cap of {cap}")]
    TooManyVariables { count: usize, cap: usize },
}
