use crate::rrm::ServiceHistory;

/// Cumulative per-entity service over a run.
///
/// A snapshot is a unit interval, so credited rates (bits/s) accumulate
/// directly as bits.
#[derive(Clone, Debug, PartialEq)]
pub struct ThroughputLedger {
    /// Uplink bits per entity, CUEs first.
    pub ul_bits: Vec<f64>,
    /// Downlink bits per CUE.
    pub dl_bits: Vec<f64>,
    /// Uplink scheduling count per entity.
    pub scheduled: Vec<u64>,
    /// Snapshots in which each pair was scheduled in direct mode.
    pub direct: Vec<u64>,
    pub snapshots: u64,
    num_cues: usize,
}

impl ThroughputLedger {
    pub fn new(num_cues: usize, num_pairs: usize) -> Self {
        let n = num_cues + num_pairs;
        Self {
            ul_bits: vec![0.0; n],
            dl_bits: vec![0.0; num_cues],
            scheduled: vec![0; n],
            direct: vec![0; num_pairs],
            snapshots: 0,
            num_cues,
        }
    }

    pub fn num_cues(&self) -> usize {
        self.num_cues
    }

    pub fn num_pairs(&self) -> usize {
        self.direct.len()
    }

    pub fn total_ul_bits(&self) -> f64 {
        self.ul_bits.iter().sum()
    }

    pub fn pair_ul_bits(&self) -> f64 {
        self.ul_bits[self.num_cues..].iter().sum()
    }

    pub fn cue_ul_bits(&self) -> f64 {
        self.ul_bits[..self.num_cues].iter().sum()
    }

    pub fn cue_dl_bits(&self) -> f64 {
        self.dl_bits.iter().sum()
    }
}

impl ServiceHistory for ThroughputLedger {
    fn num_entities(&self) -> usize {
        self.ul_bits.len()
    }

    fn times_scheduled(&self, entity: usize) -> u64 {
        self.scheduled[entity]
    }

    fn average_rate(&self, entity: usize) -> f64 {
        if self.snapshots == 0 {
            0.0
        } else {
            self.ul_bits[entity] / self.snapshots as f64
        }
    }
}
