use thiserror::Error;

use super::RunResult;

pub const DEFAULT_GAIN_WEIGHT: f64 = 0.5;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GainError {
    #[error("{metric} gain undefined: the D2D-disabled baseline delivers zero throughput")]
    ZeroBaseline { metric: &'static str },
    #[error("EVM must lie in (0, 1], got {0}")]
    EvmOutOfRange(f64),
}

fn percent_change(enabled: f64, disabled: f64, metric: &'static str) -> Result<f64, GainError> {
    if disabled == 0.0 {
        return Err(GainError::ZeroBaseline { metric });
    }
    if enabled == disabled {
        return Ok(0.0);
    }
    Ok(100.0 * (enabled - disabled) / disabled)
}

/// Percentage pair throughput gain of the D2D-enabled run over the baseline.
pub fn direct_gain(enabled: &RunResult, disabled: &RunResult) -> Result<f64, GainError> {
    percent_change(enabled.avg_pair_bps, disabled.avg_pair_bps, "direct")
}

/// Percentage CUE downlink throughput gain of the D2D-enabled run.
pub fn offload_gain(enabled: &RunResult, disabled: &RunResult) -> Result<f64, GainError> {
    percent_change(enabled.avg_cue_dl_bps, disabled.avg_cue_dl_bps, "offloading")
}

pub fn total_gain(g_dir: f64, g_off: f64, a1: f64, a2: f64) -> f64 {
    a1 * g_dir + a2 * g_off
}

/// Direct, offloading and weighted total gain, in percent. Undefined gains are
/// NaN and the reason is kept in `diagnostics`.
#[derive(Clone, Debug, PartialEq)]
pub struct GainReport {
    pub g_dir: f64,
    pub g_off: f64,
    pub g_tot: f64,
    pub a1: f64,
    pub a2: f64,
    pub diagnostics: Vec<GainError>,
}

impl GainReport {
    pub fn new(g_dir: f64, g_off: f64, a1: f64, a2: f64) -> Self {
        Self {
            g_dir,
            g_off,
            g_tot: total_gain(g_dir, g_off, a1, a2),
            a1,
            a2,
            diagnostics: Vec::new(),
        }
    }

    pub fn from_runs(enabled: &RunResult, disabled: &RunResult, a1: f64, a2: f64) -> Self {
        let mut diagnostics = Vec::new();
        let mut value = |r: Result<f64, GainError>| {
            r.unwrap_or_else(|e| {
                diagnostics.push(e);
                f64::NAN
            })
        };
        let g_dir = value(direct_gain(enabled, disabled));
        let g_off = value(offload_gain(enabled, disabled));
        Self {
            diagnostics,
            ..Self::new(g_dir, g_off, a1, a2)
        }
    }
}

/// SNR estimate from a measured error vector magnitude: `10 log10(1 / EVM^2)`.
pub fn evm_to_snr_db(evm: f64) -> Result<f64, GainError> {
    if !(evm > 0.0 && evm <= 1.0) {
        return Err(GainError::EvmOutOfRange(evm));
    }
    // Subtracting from zero keeps EVM = 1 at +0 rather than -0.
    Ok(0.0 - 20.0 * evm.log10())
}
