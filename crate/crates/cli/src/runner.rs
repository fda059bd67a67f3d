//! Expands configurations into replications and runs them.

use d2dsim_core::parallel;
use d2dsim_core::sim::{run_paired, PairedRun, SimError};

use crate::config::ExperimentConfig;

/// One replication: the enabled run, its matched baseline and the gains.
#[derive(Clone, Debug)]
pub struct Replication {
    pub config: ExperimentConfig,
    pub rep: u64,
    pub run: PairedRun,
}

/// Runs `replications` matched pairs for every configuration. Replications
/// may run concurrently; the result follows configuration order, then
/// replication index.
pub fn run_experiments(configs: &[ExperimentConfig]) -> Result<Vec<Replication>, SimError> {
    let jobs: Vec<(usize, u64)> = configs
        .iter()
        .enumerate()
        .flat_map(|(i, c)| (0..c.replications).map(move |r| (i, r)))
        .collect();
    let runs = parallel::map(&jobs, |&(i, r)| {
        let c = &configs[i];
        run_paired(&c.sim_config(r), c.a1, c.a2)
    });
    jobs.iter()
        .zip(runs)
        .map(|(&(i, rep), run)| {
            Ok(Replication {
                config: configs[i].clone(),
                rep,
                run: run?,
            })
        })
        .collect()
}
