//! Experiment grids. Every preset is a pure function of its arguments.

use d2dsim_core::{CellType, SharingScheme};
use thiserror::Error;

use crate::config::ExperimentConfig;

/// Pair counts of the UE-density sweep when none are given.
pub const DEFAULT_PAIR_SWEEP: [usize; 4] = [12, 24, 36, 48];

#[derive(Debug, Error, PartialEq)]
pub enum PresetError {
    #[error("total UE count {0} cannot be split into equal CUE and pair counts (needs a positive multiple of 3)")]
    Split(usize),
    #[error("the pair sweep is empty")]
    EmptySweep,
}

/// Cell types 1 to 5, each under the three schemes, with a fixed population
/// of `total_ues` users split as `total/3` CUEs plus `total/3` pairs.
/// Ordered by cell type, then scheme. All other settings come from `base`.
pub fn preset_densification_sweep(
    base: &ExperimentConfig,
    total_ues: usize,
) -> Result<Vec<ExperimentConfig>, PresetError> {
    if total_ues == 0 || !total_ues.is_multiple_of(3) {
        return Err(PresetError::Split(total_ues));
    }
    let k = total_ues / 3;
    Ok(CellType::ALL
        .iter()
        .flat_map(|&cell_type| {
            SharingScheme::ALL.into_iter().map(move |scheme| ExperimentConfig {
                scheme,
                cell_type,
                n_cues: k,
                n_pairs: k,
                ..base.clone()
            })
        })
        .collect())
}

/// Overlay only: `base.n_cues` CUEs, each pair count of `pairs`, for every
/// cell type. Ordered by cell type, then pair count.
pub fn preset_ue_density_sweep(base: &ExperimentConfig, pairs: &[usize]) -> Result<Vec<ExperimentConfig>, PresetError> {
    if pairs.is_empty() {
        return Err(PresetError::EmptySweep);
    }
    Ok(CellType::ALL
        .iter()
        .flat_map(|&cell_type| {
            pairs.iter().map(move |&n_pairs| ExperimentConfig {
                scheme: SharingScheme::Overlay,
                cell_type,
                n_pairs,
                ..base.clone()
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densification_grid() {
        let base = ExperimentConfig::default();
        let grid = preset_densification_sweep(&base, 108).unwrap();
        assert_eq!(grid.len(), 15);
        assert!(grid
            .iter()
            .all(|c| c.n_cues == 36 && c.n_pairs == 36 && c.seed == base.seed));
        assert!(grid.iter().all(|c| c.n_cues + 2 * c.n_pairs == 108));
        assert_eq!(grid[0].cell_type.id, 1);
        assert_eq!(grid[14].cell_type.id, 5);
        assert_eq!(grid[1].scheme, SharingScheme::Underlay1);
        assert_eq!(preset_densification_sweep(&base, 100), Err(PresetError::Split(100)));
        assert_eq!(preset_densification_sweep(&base, 108).unwrap(), grid);
    }

    #[test]
    fn ue_density_grid() {
        let base = ExperimentConfig::default();
        let grid = preset_ue_density_sweep(&base, &DEFAULT_PAIR_SWEEP).unwrap();
        assert_eq!(grid.len(), 20);
        assert!(grid.iter().all(|c| c.scheme == SharingScheme::Overlay));
        assert!(grid.iter().all(|c| c.n_cues == 36));
        let pairs: Vec<usize> = grid[..4].iter().map(|c| c.n_pairs).collect();
        assert_eq!(pairs, DEFAULT_PAIR_SWEEP);
        assert_eq!(preset_ue_density_sweep(&base, &[]), Err(PresetError::EmptySweep));
    }
}
