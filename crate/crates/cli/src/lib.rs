//! Experiment harness around `d2dsim-core`: configuration files, sweep
//! presets, replication runner and CSV output.

pub mod app;
pub mod config;
pub mod presets;
pub mod report;
pub mod runner;

pub use config::{parse_config, parse_with_overrides, to_config_text, ConfigError, ExperimentConfig, Overrides};
pub use presets::{preset_densification_sweep, preset_ue_density_sweep, PresetError, DEFAULT_PAIR_SWEEP};
pub use report::{emit_csv, to_csv, CSV_HEADER};
pub use runner::{run_experiments, Replication};
