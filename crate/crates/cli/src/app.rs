//! Command-line front end. `main` only parses arguments and writes the
//! rendered CSV, so the whole command path is callable from tests.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::{parse_with_overrides, ExperimentConfig, Overrides};
use crate::presets::{preset_densification_sweep, preset_ue_density_sweep, DEFAULT_PAIR_SWEEP};
use crate::report::to_csv;
use crate::runner::run_experiments;

#[derive(Parser)]
#[command(
    name = "d2dsim",
    version,
    about = "Multi-cell D2D mode selection and scheduling simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run one configuration.
    Run(Common),
    /// Cell types 1-5 under every scheme with a fixed population.
    SweepDensification {
        #[command(flatten)]
        common: Common,
        /// Total UE count, split evenly into CUEs and pairs
        /// (default: CUEs + 2 x pairs of the configuration).
        #[arg(long)]
        total_ues: Option<usize>,
    },
    /// Overlay over cell types 1-5 and a grid of pair counts.
    SweepUes {
        #[command(flatten)]
        common: Common,
        /// Comma-separated pair counts.
        #[arg(long, value_delimiter = ',')]
        pair_grid: Option<Vec<usize>>,
    },
}

#[derive(Args)]
pub struct Common {
    /// key=value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub cell_type: Option<String>,
    #[arg(long)]
    pub cues: Option<String>,
    #[arg(long)]
    pub pairs: Option<String>,
    #[arg(long)]
    pub snapshots: Option<String>,
    #[arg(long)]
    pub reps: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// CSV destination (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn load(&self) -> Result<ExperimentConfig> {
        let text = match &self.config {
            Some(path) => {
                std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?
            }
            None => String::new(),
        };
        let overrides = Overrides {
            scheme: self.scheme.clone(),
            cell_type: self.cell_type.clone(),
            n_cues: self.cues.clone(),
            n_pairs: self.pairs.clone(),
            snapshots: self.snapshots.clone(),
            replications: self.reps.clone(),
            seed: self.seed.clone(),
            out: self.out.clone(),
        };
        let origin = self
            .config
            .as_ref()
            .map_or("flags".to_string(), |p| p.display().to_string());
        parse_with_overrides(&text, &overrides).with_context(|| format!("invalid configuration ({origin})"))
    }
}

fn metadata(command: &str, base: &ExperimentConfig, extra: Vec<String>) -> Vec<String> {
    let mut m = vec![
        format!("d2dsim {} {command}", env!("CARGO_PKG_VERSION")),
        format!(
            "snapshots={} replications={} base_seed={} policy={} a1={} a2={} boundary_interference={}",
            base.snapshots,
            base.replications,
            base.seed,
            base.policy.as_str(),
            base.a1,
            base.a2,
            base.boundary_interference
        ),
        "throughput columns: D2D-enabled run, network sum per snapshot averaged over snapshots, bits/s".to_string(),
        "gain columns: percent over the matched D2D-disabled run, NaN where the baseline is zero".to_string(),
        "seed column: base_seed + replication index".to_string(),
    ];
    m.extend(extra);
    m
}

/// CSV produced by a command, and where it should go.
pub struct Rendered {
    pub csv: String,
    pub rows: usize,
    pub out: Option<PathBuf>,
}

/// Parses a full argument list (program name first) and renders it.
pub fn render_args<I, T>(args: I) -> Result<Rendered>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    render(&Cli::try_parse_from(args)?)
}

pub fn render(cli: &Cli) -> Result<Rendered> {
    let (base, configs, meta) = match &cli.command {
        Command::Run(common) => {
            let base = common.load()?;
            let meta = metadata("run", &base, vec![]);
            (base.clone(), vec![base], meta)
        }
        Command::SweepDensification { common, total_ues } => {
            let base = common.load()?;
            let total = total_ues.unwrap_or(base.n_cues + 2 * base.n_pairs);
            let configs = preset_densification_sweep(&base, total)?;
            let extra = vec![format!(
                "population: {total} UEs as {k} CUEs + {k} pairs (default split, overridable)",
                k = total / 3
            )];
            let meta = metadata("sweep-densification", &base, extra);
            (base, configs, meta)
        }
        Command::SweepUes { common, pair_grid } => {
            let base = common.load()?;
            let grid = pair_grid.clone().unwrap_or_else(|| DEFAULT_PAIR_SWEEP.to_vec());
            let configs = preset_ue_density_sweep(&base, &grid)?;
            let label = if pair_grid.is_some() {
                "user-supplied"
            } else {
                "default stand-in"
            };
            let list: Vec<String> = grid.iter().map(|p| p.to_string()).collect();
            let extra = vec![
                format!("pair grid: {} ({label})", list.join(",")),
                format!("scheme fixed to overlay, {} CUEs", base.n_cues),
            ];
            let meta = metadata("sweep-ues", &base, extra);
            (base, configs, meta)
        }
    };
    let rows = run_experiments(&configs)?;
    Ok(Rendered {
        csv: to_csv(&meta, &rows),
        rows: rows.len(),
        out: base.out,
    })
}
