//! Snapshot loop, throughput accounting and gain metrics.
//!
//! A run drops one population and then repeats, for every snapshot: derive
//! rates from the previous snapshot's interference, weight them by the
//! scheduler policy, solve the selection program, credit uplink and downlink
//! service, and measure the interference the chosen transmitters create.
//!
//! Random streams are split by purpose so that a D2D-disabled run consumes
//! exactly the same draws as its enabled counterpart: stream 0 drops users,
//! stream 1 calibrates the boundary interference, stream 2 draws it per
//! snapshot.

mod gains;
mod ledger;

pub use gains::{direct_gain, evm_to_snr_db, offload_gain, total_gain, GainError, GainReport, DEFAULT_GAIN_WEIGHT};
pub use ledger::ThroughputLedger;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::channel::{
    calibrate_edge_cdf, sample_boundary_interference, ChannelError, EmpiricalCdf, LinkDirection, RadioParams,
};
use crate::rrm::{
    check_decision, solve_snapshot, update_weights, Decision, DecisionViolation, InterferenceEstimate, LinkTable,
    PairMode, SchedulerPolicy, SharingScheme, SnapshotProblem, SolveError, UplinkClass,
};
use crate::topology::{build_layout, densification_ratio, drop_ues, CellLayout, CellType, TopologyError, UePopulation};

const POPULATION_STREAM: u64 = 0;
const CALIBRATION_STREAM: u64 = 1;
const BOUNDARY_STREAM: u64 = 2;

pub const DEFAULT_CALIBRATION_SAMPLES: usize = 2000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("snapshot {snapshot}: {source}")]
    Solve { snapshot: u64, source: SolveError },
    #[error("snapshot {snapshot}: solver returned an inadmissible decision: {source}")]
    Violation { snapshot: u64, source: DecisionViolation },
    #[error("population does not match the layout: {0}")]
    Population(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub scheme: SharingScheme,
    pub cell_type: CellType,
    pub n_cues: usize,
    pub n_pairs: usize,
    pub snapshots: u64,
    pub seed: u64,
    pub policy: SchedulerPolicy,
    /// False forces every pair into cellular mode.
    pub direct_mode: bool,
    /// Add calibrated interference from the neighbours a border cell lacks.
    pub boundary_interference: bool,
    pub calibration_samples: usize,
    pub radio: RadioParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            scheme: SharingScheme::Overlay,
            cell_type: CellType::ALL[0],
            n_cues: 36,
            n_pairs: 36,
            snapshots: 200,
            seed: 1,
            policy: SchedulerPolicy::RoundRobin,
            direct_mode: true,
            boundary_interference: true,
            calibration_samples: DEFAULT_CALIBRATION_SAMPLES,
            radio: RadioParams::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.snapshots == 0 {
            return Err(SimError::Config("snapshots must be at least 1".into()));
        }
        if self.n_cues + self.n_pairs == 0 {
            return Err(SimError::Config("at least one CUE or pair is required".into()));
        }
        if self.boundary_interference && self.calibration_samples < 100 {
            return Err(SimError::Config(format!(
                "calibration_samples must be at least 100, got {}",
                self.calibration_samples
            )));
        }
        let r = &self.radio;
        if !(r.bandwidth_hz > 0.0 && r.bandwidth_hz.is_finite()) {
            return Err(SimError::Config(format!(
                "bandwidth must be positive, got {}",
                r.bandwidth_hz
            )));
        }
        if !(r.pathloss_exponent > 0.0 && r.pathloss_exponent.is_finite()) {
            return Err(SimError::Config(format!(
                "path-loss exponent must be positive, got {}",
                r.pathloss_exponent
            )));
        }
        Ok(())
    }

    /// Same configuration with direct mode switched off.
    pub fn disabled(&self) -> Self {
        Self {
            direct_mode: false,
            ..self.clone()
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Who received a cell's downlink slot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DownlinkGrant {
    /// Second hop of a cellular-mode pair.
    Pair(usize),
    /// Offloaded slot given to a CUE, with the credited rate.
    Cue { cue: usize, rate_bps: f64 },
}

/// Per-snapshot record returned by [`Simulator::run_snapshot`].
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotOutcome {
    pub decision: Decision,
    /// `(entity, rate)` for every uplink credit.
    pub ul_credits: Vec<(usize, f64)>,
    /// Downlink slot of each cell.
    pub dl_grants: Vec<Option<DownlinkGrant>>,
}

struct Transmitter {
    ue: usize,
    cell: usize,
    class: UplinkClass,
}

pub struct Simulator {
    config: SimConfig,
    layout: CellLayout,
    population: UePopulation,
    links: LinkTable,
    ul_cdf: Option<EmpiricalCdf>,
    dl_cdf: Option<EmpiricalCdf>,
    boundary_rng: ChaCha8Rng,
    estimate: InterferenceEstimate,
    ledger: ThroughputLedger,
    cell_cues: Vec<Vec<usize>>,
    dl_cursor: Vec<usize>,
    snapshot: u64,
}

impl Simulator {
    /// Builds the layout and drops the population from the configured seed.
    pub fn new(config: SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let layout = build_layout(config.cell_type);
        let mut rng = stream(config.seed, POPULATION_STREAM);
        let population = drop_ues(&layout, config.n_cues, config.n_pairs, &mut rng)?;
        Self::with_population(config, layout, population)
    }

    /// Runs over a fixed, caller-supplied scenario. The counts in `config`
    /// are ignored in favour of the population's.
    pub fn with_population(config: SimConfig, layout: CellLayout, population: UePopulation) -> Result<Self, SimError> {
        let config = SimConfig {
            n_cues: population.num_cues,
            n_pairs: population.num_pairs(),
            ..config
        };
        config.validate()?;
        if layout.cell_type != config.cell_type {
            return Err(SimError::Population(format!(
                "layout is cell type {}, configuration asks for {}",
                layout.cell_type.id, config.cell_type.id
            )));
        }
        if let Some(ue) = population.ues.iter().find(|u| u.serving_cell >= layout.num_cells()) {
            return Err(SimError::Population(format!(
                "UE {} is served by cell {} of {}",
                ue.ue_id,
                ue.serving_cell,
                layout.num_cells()
            )));
        }
        let (ul_cdf, dl_cdf) = if config.boundary_interference {
            let mut rng = stream(config.seed, CALIBRATION_STREAM);
            let n = config.calibration_samples;
            let ul = calibrate_edge_cdf(&layout, &config.radio, LinkDirection::Uplink, &mut rng, n)?;
            let dl = calibrate_edge_cdf(&layout, &config.radio, LinkDirection::Downlink, &mut rng, n)?;
            (Some(ul), Some(dl))
        } else {
            (None, None)
        };
        let links = LinkTable::new(&layout, &population, &config.radio);
        let mut cell_cues = vec![Vec::new(); layout.num_cells()];
        for ue in population.cues() {
            cell_cues[ue.serving_cell].push(ue.ue_id);
        }
        Ok(Self {
            estimate: InterferenceEstimate::zero(population.num_cues, population.num_pairs()),
            ledger: ThroughputLedger::new(population.num_cues, population.num_pairs()),
            dl_cursor: vec![0; layout.num_cells()],
            boundary_rng: stream(config.seed, BOUNDARY_STREAM),
            cell_cues,
            links,
            ul_cdf,
            dl_cdf,
            layout,
            population,
            config,
            snapshot: 0,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn layout(&self) -> &CellLayout {
        &self.layout
    }

    pub fn population(&self) -> &UePopulation {
        &self.population
    }

    pub fn ledger(&self) -> &ThroughputLedger {
        &self.ledger
    }

    /// Interference estimate the next snapshot will use.
    pub fn estimate(&self) -> &InterferenceEstimate {
        &self.estimate
    }

    /// Selection problem the next snapshot will solve.
    pub fn current_problem(&self) -> SnapshotProblem {
        let mut utilities = self.links.utilities(&self.estimate);
        utilities.weights = update_weights(&self.ledger, self.config.policy);
        let mut problem = SnapshotProblem::new(self.config.scheme, utilities, &self.layout, &self.population);
        problem.direct_mode_allowed = self.config.direct_mode;
        problem
    }

    pub fn run_snapshot(&mut self) -> Result<SnapshotOutcome, SimError> {
        let snapshot = self.snapshot;
        let problem = self.current_problem();
        let decision = solve_snapshot(&problem);
        check_decision(&problem, &decision).map_err(|source| SimError::Violation { snapshot, source })?;

        let nc = self.population.num_cues;
        let np = self.population.num_pairs();
        let u = &problem.utilities;
        let mut ul_credits = Vec::new();
        let mut transmitters = Vec::new();
        for i in 0..nc {
            if decision.cue_scheduled(i) {
                ul_credits.push((i, u.u_leg[i]));
                transmitters.push(Transmitter {
                    ue: i,
                    cell: self.links.serving_cell(i),
                    class: UplinkClass::Cue,
                });
            }
        }
        let mut dl_grants: Vec<Option<DownlinkGrant>> = vec![None; self.layout.num_cells()];
        for j in 0..np {
            let (rate, class) = match decision.pair_mode(j) {
                None => continue,
                Some(PairMode::Direct) => (u.u_dm[j], UplinkClass::Direct),
                Some(PairMode::Cellular) => {
                    dl_grants[self.links.pair_rx_cell(j)] = Some(DownlinkGrant::Pair(j));
                    (u.u_cm[j], UplinkClass::Cellular)
                }
            };
            ul_credits.push((nc + j, rate));
            transmitters.push(Transmitter {
                ue: self.links.pair_tx(j),
                cell: self.links.pair_tx_cell(j),
                class,
            });
        }
        for (cell, grant) in dl_grants.iter_mut().enumerate() {
            let cues = &self.cell_cues[cell];
            if grant.is_some() || cues.is_empty() {
                continue;
            }
            let cue = cues[self.dl_cursor[cell] % cues.len()];
            self.dl_cursor[cell] += 1;
            let rate_bps = self.links.cue_dl_capacity(cue, self.estimate.cue_dl[cue]);
            *grant = Some(DownlinkGrant::Cue { cue, rate_bps });
        }

        for &(e, rate) in &ul_credits {
            self.ledger.ul_bits[e] += rate;
            self.ledger.scheduled[e] += 1;
        }
        for j in 0..np {
            if decision.pair_mode(j) == Some(PairMode::Direct) {
                self.ledger.direct[j] += 1;
            }
        }
        for grant in dl_grants.iter().flatten() {
            if let DownlinkGrant::Cue { cue, rate_bps } = *grant {
                self.ledger.dl_bits[cue] += rate_bps;
            }
        }
        self.ledger.snapshots += 1;

        self.estimate = self.measure_interference(&transmitters, &dl_grants)?;
        self.snapshot += 1;
        Ok(SnapshotOutcome {
            decision,
            ul_credits,
            dl_grants,
        })
    }

    /// Interference every candidate receiver would have seen from this
    /// snapshot's transmitters, plus fresh boundary draws. Draws are taken in
    /// a fixed order that does not depend on the decision.
    fn measure_interference(
        &mut self,
        transmitters: &[Transmitter],
        dl_grants: &[Option<DownlinkGrant>],
    ) -> Result<InterferenceEstimate, SimError> {
        let links = &self.links;
        let scheme = self.config.scheme;
        let nc = self.population.num_cues;
        let np = self.population.num_pairs();
        let num_cells = self.layout.num_cells();

        let (enb_extra, rx_ul_extra, cue_dl_extra, rx_dl_extra) = match (&self.ul_cdf, &self.dl_cdf) {
            (Some(ul), Some(dl)) => {
                let rng = &mut self.boundary_rng;
                let layout = &self.layout;
                let mut draw = |cdf: &EmpiricalCdf, cell: usize| {
                    sample_boundary_interference(cdf, layout.missing_neighbors(cell), rng)
                };
                let enb = (0..num_cells).map(|c| draw(ul, c)).collect::<Result<Vec<_>, _>>()?;
                let rx_ul = (0..np)
                    .map(|j| draw(ul, links.pair_rx_cell(j)))
                    .collect::<Result<Vec<_>, _>>()?;
                let cue_dl = (0..nc)
                    .map(|i| draw(dl, links.serving_cell(i)))
                    .collect::<Result<Vec<_>, _>>()?;
                let rx_dl = (0..np)
                    .map(|j| draw(dl, links.pair_rx_cell(j)))
                    .collect::<Result<Vec<_>, _>>()?;
                (enb, rx_ul, cue_dl, rx_dl)
            }
            _ => (vec![0.0; num_cells], vec![0.0; np], vec![0.0; nc], vec![0.0; np]),
        };

        // Uplink interference from everyone but the link's own transmitter:
        // all transmitters of other cells, plus same-cell ones on a shared resource.
        let ul = |own_ue: usize, own_cell: usize, own_class: UplinkClass, gain: &dyn Fn(usize) -> f64| -> f64 {
            transmitters
                .iter()
                .filter(|t| t.ue != own_ue && (t.cell != own_cell || scheme.shares_uplink(t.class, own_class)))
                .map(|t| gain(t.ue))
                .sum()
        };
        let active_dl: Vec<usize> = (0..num_cells).filter(|&c| dl_grants[c].is_some()).collect();
        let dl = |ue: usize, own_cell: usize| -> f64 {
            active_dl
                .iter()
                .filter(|&&c| c != own_cell)
                .map(|&c| links.dl_at_ue(c, ue))
                .sum()
        };

        let cue_ul = (0..nc)
            .map(|i| {
                let cell = links.serving_cell(i);
                ul(i, cell, UplinkClass::Cue, &|ue| links.ul_at_enb(ue, cell)) + enb_extra[cell]
            })
            .collect();
        let pair_dm = (0..np)
            .map(|j| {
                let cell = links.pair_tx_cell(j);
                ul(links.pair_tx(j), cell, UplinkClass::Direct, &|ue| {
                    links.ul_at_pair_rx(ue, j)
                }) + rx_ul_extra[j]
            })
            .collect();
        let pair_cm_ul = (0..np)
            .map(|j| {
                let cell = links.pair_tx_cell(j);
                ul(links.pair_tx(j), cell, UplinkClass::Cellular, &|ue| {
                    links.ul_at_enb(ue, cell)
                }) + enb_extra[cell]
            })
            .collect();
        let cue_dl = (0..nc)
            .map(|i| dl(i, links.serving_cell(i)) + cue_dl_extra[i])
            .collect();
        let pair_cm_dl = (0..np)
            .map(|j| dl(links.pair_rx(j), links.pair_rx_cell(j)) + rx_dl_extra[j])
            .collect();
        Ok(InterferenceEstimate {
            cue_ul,
            cue_dl,
            pair_dm,
            pair_cm_ul,
            pair_cm_dl,
        })
    }

    /// Runs the remaining snapshots and summarises.
    pub fn run(mut self) -> Result<RunResult, SimError> {
        while self.snapshot < self.config.snapshots {
            self.run_snapshot()?;
        }
        Ok(self.finish())
    }

    pub fn finish(self) -> RunResult {
        let n = self.ledger.snapshots.max(1) as f64;
        RunResult {
            avg_total_ul_bps: self.ledger.total_ul_bits() / n,
            avg_pair_bps: self.ledger.pair_ul_bits() / n,
            avg_cue_ul_bps: self.ledger.cue_ul_bits() / n,
            avg_cue_dl_bps: self.ledger.cue_dl_bits() / n,
            densification_ratio: densification_ratio(&self.layout, &self.population),
            ledger: self.ledger,
            config: self.config,
        }
    }
}

/// Averages of one run. Throughputs are network sums per snapshot, averaged
/// over snapshots.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub config: SimConfig,
    pub avg_total_ul_bps: f64,
    pub avg_pair_bps: f64,
    pub avg_cue_ul_bps: f64,
    pub avg_cue_dl_bps: f64,
    pub densification_ratio: f64,
    pub ledger: ThroughputLedger,
}

impl RunResult {
    /// Equality of everything measured, ignoring the configuration echo.
    pub fn same_outcome(&self, other: &RunResult) -> bool {
        self.avg_total_ul_bps == other.avg_total_ul_bps
            && self.avg_pair_bps == other.avg_pair_bps
            && self.avg_cue_ul_bps == other.avg_cue_ul_bps
            && self.avg_cue_dl_bps == other.avg_cue_dl_bps
            && self.densification_ratio == other.densification_ratio
            && self.ledger == other.ledger
    }
}

pub fn run_simulation(config: &SimConfig) -> Result<RunResult, SimError> {
    Simulator::new(config.clone())?.run()
}

/// Same pipeline and random draws as [`run_simulation`] with every pair held
/// in cellular mode.
pub fn run_disabled_baseline(config: &SimConfig) -> Result<RunResult, SimError> {
    run_simulation(&config.disabled())
}

/// An enabled run, its matched disabled baseline, and the gains between them.
#[derive(Clone, Debug, PartialEq)]
pub struct PairedRun {
    pub enabled: RunResult,
    pub disabled: RunResult,
    pub gains: GainReport,
}

pub fn run_paired(config: &SimConfig, a1: f64, a2: f64) -> Result<PairedRun, SimError> {
    let enabled = run_simulation(config)?;
    let disabled = run_disabled_baseline(config)?;
    let gains = GainReport::from_runs(&enabled, &disabled, a1, a2);
    Ok(PairedRun {
        enabled,
        disabled,
        gains,
    })
}
