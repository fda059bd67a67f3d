//! Link budget, noise, SINR and capacity.
//!
//! There is no fading or shadowing; a link's quality is fixed by geometry and
//! the interference it sees. Cells on the layout boundary get extra
//! interference drawn from an [`EmpiricalCdf`] calibrated per layout, standing
//! in for the neighbours that are not simulated.

use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::topology::{CellLayout, CellType, Point};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("boundary interference requested from an empty CDF; run calibration first")]
    EmptyCdf,
    #[error("calibration needs at least 100 samples, got {0}")]
    TooFewSamples(usize),
    #[error("interference sample {0} is negative or not finite")]
    BadSample(f64),
    #[error("CDF text line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadioParams {
    pub carrier_freq_ghz: f64,
    pub bandwidth_hz: f64,
    pub noise_density_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub pathloss_exponent: f64,
    /// Path loss at the 1 m reference distance.
    pub pathloss_ref_db: f64,
    pub min_distance_m: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            carrier_freq_ghz: 2.6,
            bandwidth_hz: 5e6,
            noise_density_dbm_hz: -174.0,
            noise_figure_db: 7.0,
            pathloss_exponent: 3.0,
            pathloss_ref_db: 40.7,
            min_distance_m: 1.0,
        }
    }
}

/// Free-space loss at 1 m, `20 log10(4 pi f / c)`.
pub fn free_space_ref_db(carrier_freq_ghz: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * carrier_freq_ghz * 1e9 / SPEED_OF_LIGHT).log10()
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

pub fn path_loss_db(distance_m: f64, params: &RadioParams) -> f64 {
    let d = distance_m.max(params.min_distance_m);
    params.pathloss_ref_db + 10.0 * params.pathloss_exponent * d.log10()
}

pub fn noise_power_dbm(params: &RadioParams) -> f64 {
    params.noise_density_dbm_hz + 10.0 * params.bandwidth_hz.log10() + params.noise_figure_db
}

pub fn noise_power_mw(params: &RadioParams) -> f64 {
    dbm_to_mw(noise_power_dbm(params))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkSample {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub distance_m: f64,
}

pub fn rx_power_dbm(link: &LinkSample, params: &RadioParams) -> f64 {
    link.tx_power_dbm + link.tx_gain_dbi + link.rx_gain_dbi - path_loss_db(link.distance_m, params)
}

pub fn rx_power_mw(link: &LinkSample, params: &RadioParams) -> f64 {
    dbm_to_mw(rx_power_dbm(link, params))
}

pub fn sinr_linear(signal_dbm: f64, interferers_mw: &[f64], params: &RadioParams) -> f64 {
    sinr_from_total(dbm_to_mw(signal_dbm), interferers_mw.iter().sum(), params)
}

/// SINR with the signal already in mW and interference pre-summed.
pub fn sinr_from_total(signal_mw: f64, interference_mw: f64, params: &RadioParams) -> f64 {
    signal_mw / (interference_mw + noise_power_mw(params))
}

/// Shannon capacity `B log2(1 + sinr)`; zero for non-positive SINR.
pub fn capacity_bps(sinr: f64, bandwidth_hz: f64) -> f64 {
    if sinr > 0.0 {
        bandwidth_hz * sinr.ln_1p() / std::f64::consts::LN_2
    } else {
        0.0
    }
}

/// Noise-limited uplink SNR (dB) of a UE at full power on the cell edge.
pub fn edge_uplink_snr_db(cell_type: &CellType, params: &RadioParams) -> f64 {
    let link = LinkSample {
        tx_power_dbm: cell_type.ue_max_power_dbm,
        tx_gain_dbi: cell_type.ue_antenna_gain_dbi,
        rx_gain_dbi: cell_type.enb_antenna_gain_dbi,
        distance_m: cell_type.radius_m,
    };
    rx_power_dbm(&link, params) - noise_power_dbm(params)
}

/// Empirical distribution of one missing neighbour's interference, in mW.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmpiricalCdf {
    samples: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self, ChannelError> {
        if let Some(&bad) = samples.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(ChannelError::BadSample(bad));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Left-continuous empirical quantile, `q` in `[0, 1]`.
    pub fn quantile(&self, q: f64) -> Option<f64> {
        if self.samples.is_empty() {
            return None;
        }
        let n = self.samples.len();
        let idx = ((q.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n) - 1;
        Some(self.samples[idx])
    }

    pub fn median(&self) -> Option<f64> {
        self.quantile(0.5)
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, ChannelError> {
        if self.samples.is_empty() {
            return Err(ChannelError::EmptyCdf);
        }
        let u: f64 = rng.random();
        let idx = ((u * self.samples.len() as f64) as usize).min(self.samples.len() - 1);
        Ok(self.samples[idx])
    }

    /// One mW value per line, ascending.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 24);
        for s in &self.samples {
            let _ = writeln!(out, "{s:?}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ChannelError> {
        let samples = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.trim().parse::<f64>().map_err(|e| ChannelError::Parse {
                    line: i + 1,
                    reason: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(samples)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkDirection {
    /// Co-channel UE in a neighbouring cell, received at the eNB.
    Uplink,
    /// Neighbouring eNB, received by a UE placed uniformly in the cell.
    Downlink,
}

/// Monte-Carlo calibration of per-neighbour boundary interference.
///
/// The reference cell is the layout cell with the most neighbours. Each sample
/// picks one of its neighbours uniformly and records the interference power
/// that neighbour's active transmitter produces. A single-cell layout has no
/// neighbour, so a synthetic one is placed one across-flats width away, which
/// is exactly where a packed neighbour would sit.
pub fn calibrate_edge_cdf<R: Rng + ?Sized>(
    layout: &CellLayout,
    params: &RadioParams,
    direction: LinkDirection,
    rng: &mut R,
    n_samples: usize,
) -> Result<EmpiricalCdf, ChannelError> {
    if n_samples < 100 {
        return Err(ChannelError::TooFewSamples(n_samples));
    }
    let ct = &layout.cell_type;
    let reference = (0..layout.num_cells())
        .max_by_key(|&c| (layout.neighbors(c).len(), std::cmp::Reverse(c)))
        .unwrap_or(0);
    let ref_cell = &layout.cells[reference];
    let mut neighbors: Vec<crate::topology::Cell> = layout
        .neighbors(reference)
        .iter()
        .map(|&c| layout.cells[c].clone())
        .collect();
    if neighbors.is_empty() {
        let r = ct.radius_m;
        let mut synthetic = ref_cell.clone();
        synthetic.cell_id = usize::MAX;
        synthetic.center = Point::new(ref_cell.center.x + 1.5 * r, ref_cell.center.y + 0.5 * 3f64.sqrt() * r);
        neighbors.push(synthetic);
    }

    let mut samples = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let nb = &neighbors[rng.random_range(0..neighbors.len())];
        let link = match direction {
            LinkDirection::Uplink => LinkSample {
                tx_power_dbm: ct.ue_max_power_dbm,
                tx_gain_dbi: ct.ue_antenna_gain_dbi,
                rx_gain_dbi: ct.enb_antenna_gain_dbi,
                distance_m: nb.sample_point(rng).distance(&ref_cell.center),
            },
            LinkDirection::Downlink => LinkSample {
                tx_power_dbm: ct.enb_max_power_dbm,
                tx_gain_dbi: ct.enb_antenna_gain_dbi,
                rx_gain_dbi: ct.ue_antenna_gain_dbi,
                distance_m: ref_cell.sample_point(rng).distance(&nb.center),
            },
        };
        samples.push(rx_power_mw(&link, params));
    }
    EmpiricalCdf::new(samples)
}

/// Sum of `missing_neighbors` independent draws from `cdf`.
pub fn sample_boundary_interference<R: Rng + ?Sized>(
    cdf: &EmpiricalCdf,
    missing_neighbors: usize,
    rng: &mut R,
) -> Result<f64, ChannelError> {
    if cdf.is_empty() {
        return Err(ChannelError::EmptyCdf);
    }
    let mut total = 0.0;
    for _ in 0..missing_neighbors {
        total += cdf.sample(rng)?;
    }
    Ok(total)
}
