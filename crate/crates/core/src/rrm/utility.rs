use crate::channel::{capacity_bps, noise_power_mw, rx_power_mw, LinkSample, RadioParams};
use crate::topology::{CellLayout, UePopulation};

/// Aggregate co-channel interference (mW) seen by every receiver a snapshot
/// can use. Built from the previous snapshot's transmitter set.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceEstimate {
    /// At the serving eNB of each CUE.
    pub cue_ul: Vec<f64>,
    /// At each CUE on the downlink.
    pub cue_dl: Vec<f64>,
    /// At each pair receiver on the direct link.
    pub pair_dm: Vec<f64>,
    /// At the eNB of each pair's transmitter cell.
    pub pair_cm_ul: Vec<f64>,
    /// At each pair receiver on the downlink leg.
    pub pair_cm_dl: Vec<f64>,
}

impl InterferenceEstimate {
    pub fn zero(num_cues: usize, num_pairs: usize) -> Self {
        Self {
            cue_ul: vec![0.0; num_cues],
            cue_dl: vec![0.0; num_cues],
            pair_dm: vec![0.0; num_pairs],
            pair_cm_ul: vec![0.0; num_pairs],
            pair_cm_dl: vec![0.0; num_pairs],
        }
    }
}

/// Per-entity rates in bits/s and the scheduler weights that go with them.
#[derive(Clone, Debug, PartialEq)]
pub struct EntityUtilities {
    /// Uplink rate of each CUE.
    pub u_leg: Vec<f64>,
    /// Direct-link rate of each pair.
    pub u_dm: Vec<f64>,
    /// Two-hop rate of each pair: the worse of its uplink and downlink legs.
    pub u_cm: Vec<f64>,
    /// One weight per entity, CUEs first.
    pub weights: Vec<f64>,
}

impl EntityUtilities {
    pub fn num_entities(&self) -> usize {
        self.u_leg.len() + self.u_dm.len()
    }

    /// Multiplies every rate by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |v: &[f64]| v.iter().map(|u| u * factor).collect();
        Self {
            u_leg: s(&self.u_leg),
            u_dm: s(&self.u_dm),
            u_cm: s(&self.u_cm),
            weights: self.weights.clone(),
        }
    }
}

/// Received powers for every transmitter/receiver combination of a drop.
///
/// Users are static for a run, so the table is built once and all per-snapshot
/// work is table lookups.
#[derive(Clone, Debug)]
pub struct LinkTable {
    num_cells: usize,
    num_ues: usize,
    num_pairs: usize,
    num_cues: usize,
    bandwidth_hz: f64,
    noise_mw: f64,
    /// `[ue * L + cell]`: uplink power of `ue` at eNB `cell`.
    ue_to_enb: Vec<f64>,
    /// `[ue * P + pair]`: uplink power of `ue` at the receiver of `pair`.
    ue_to_pair_rx: Vec<f64>,
    /// `[cell * K + ue]`: downlink power of eNB `cell` at `ue`.
    enb_to_ue: Vec<f64>,
    serving: Vec<usize>,
    pair_tx: Vec<usize>,
    pair_rx: Vec<usize>,
    pair_tx_cell: Vec<usize>,
    pair_rx_cell: Vec<usize>,
}

impl LinkTable {
    pub fn new(layout: &CellLayout, pop: &UePopulation, params: &RadioParams) -> Self {
        let ct = &layout.cell_type;
        let l = layout.num_cells();
        let k = pop.total_ues();
        let p = pop.num_pairs();
        let ue_tx = |d: f64, rx_gain: f64| {
            rx_power_mw(
                &LinkSample {
                    tx_power_dbm: ct.ue_max_power_dbm,
                    tx_gain_dbi: ct.ue_antenna_gain_dbi,
                    rx_gain_dbi: rx_gain,
                    distance_m: d,
                },
                params,
            )
        };
        let mut ue_to_enb = Vec::with_capacity(k * l);
        let mut ue_to_pair_rx = Vec::with_capacity(k * p);
        for ue in &pop.ues {
            for cell in &layout.cells {
                ue_to_enb.push(ue_tx(ue.position.distance(&cell.center), cell.enb_antenna_gain_dbi));
            }
            for pair in &pop.pairs {
                let rx = &pop.ues[pair.rx].position;
                ue_to_pair_rx.push(ue_tx(ue.position.distance(rx), ct.ue_antenna_gain_dbi));
            }
        }
        let mut enb_to_ue = Vec::with_capacity(l * k);
        for cell in &layout.cells {
            for ue in &pop.ues {
                enb_to_ue.push(rx_power_mw(
                    &LinkSample {
                        tx_power_dbm: cell.enb_max_power_dbm,
                        tx_gain_dbi: cell.enb_antenna_gain_dbi,
                        rx_gain_dbi: ct.ue_antenna_gain_dbi,
                        distance_m: ue.position.distance(&cell.center),
                    },
                    params,
                ));
            }
        }
        Self {
            num_cells: l,
            num_ues: k,
            num_pairs: p,
            num_cues: pop.num_cues,
            bandwidth_hz: params.bandwidth_hz,
            noise_mw: noise_power_mw(params),
            ue_to_enb,
            ue_to_pair_rx,
            enb_to_ue,
            serving: pop.ues.iter().map(|u| u.serving_cell).collect(),
            pair_tx: pop.pairs.iter().map(|pr| pr.tx).collect(),
            pair_rx: pop.pairs.iter().map(|pr| pr.rx).collect(),
            pair_tx_cell: pop.pairs.iter().map(|pr| pr.tx_cell).collect(),
            pair_rx_cell: pop.pairs.iter().map(|pr| pr.rx_cell).collect(),
        }
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn num_cues(&self) -> usize {
        self.num_cues
    }

    pub fn num_pairs(&self) -> usize {
        self.num_pairs
    }

    pub fn ul_at_enb(&self, ue: usize, cell: usize) -> f64 {
        self.ue_to_enb[ue * self.num_cells + cell]
    }

    pub fn ul_at_pair_rx(&self, ue: usize, pair: usize) -> f64 {
        self.ue_to_pair_rx[ue * self.num_pairs + pair]
    }

    pub fn dl_at_ue(&self, cell: usize, ue: usize) -> f64 {
        self.enb_to_ue[cell * self.num_ues + ue]
    }

    pub fn serving_cell(&self, ue: usize) -> usize {
        self.serving[ue]
    }

    pub fn pair_tx(&self, pair: usize) -> usize {
        self.pair_tx[pair]
    }

    pub fn pair_rx(&self, pair: usize) -> usize {
        self.pair_rx[pair]
    }

    pub fn pair_tx_cell(&self, pair: usize) -> usize {
        self.pair_tx_cell[pair]
    }

    pub fn pair_rx_cell(&self, pair: usize) -> usize {
        self.pair_rx_cell[pair]
    }

    pub fn capacity(&self, signal_mw: f64, interference_mw: f64) -> f64 {
        capacity_bps(signal_mw / (interference_mw + self.noise_mw), self.bandwidth_hz)
    }

    pub fn cue_ul_capacity(&self, cue: usize, interference_mw: f64) -> f64 {
        self.capacity(self.ul_at_enb(cue, self.serving[cue]), interference_mw)
    }

    pub fn cue_dl_capacity(&self, cue: usize, interference_mw: f64) -> f64 {
        self.capacity(self.dl_at_ue(self.serving[cue], cue), interference_mw)
    }

    pub fn pair_dm_capacity(&self, pair: usize, interference_mw: f64) -> f64 {
        self.capacity(self.ul_at_pair_rx(self.pair_tx[pair], pair), interference_mw)
    }

    pub fn pair_cm_ul_capacity(&self, pair: usize, interference_mw: f64) -> f64 {
        self.capacity(
            self.ul_at_enb(self.pair_tx[pair], self.pair_tx_cell[pair]),
            interference_mw,
        )
    }

    pub fn pair_cm_dl_capacity(&self, pair: usize, interference_mw: f64) -> f64 {
        self.capacity(
            self.dl_at_ue(self.pair_rx_cell[pair], self.pair_rx[pair]),
            interference_mw,
        )
    }

    /// Rates of every entity under `est`, with unit weights.
    pub fn utilities(&self, est: &InterferenceEstimate) -> EntityUtilities {
        let u_leg = (0..self.num_cues)
            .map(|i| self.cue_ul_capacity(i, est.cue_ul[i]))
            .collect();
        let u_dm = (0..self.num_pairs)
            .map(|j| self.pair_dm_capacity(j, est.pair_dm[j]))
            .collect();
        let u_cm = (0..self.num_pairs)
            .map(|j| {
                self.pair_cm_ul_capacity(j, est.pair_cm_ul[j])
                    .min(self.pair_cm_dl_capacity(j, est.pair_cm_dl[j]))
            })
            .collect();
        EntityUtilities {
            u_leg,
            u_dm,
            u_cm,
            weights: vec![1.0; self.num_cues + self.num_pairs],
        }
    }
}

/// Rates of every CUE and pair given the interference estimate.
pub fn compute_utilities(
    pop: &UePopulation,
    layout: &CellLayout,
    params: &RadioParams,
    est: &InterferenceEstimate,
) -> EntityUtilities {
    LinkTable::new(layout, pop, params).utilities(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{capacity_bps, dbm_to_mw, noise_power_dbm, path_loss_db};
    use crate::topology::{build_layout, CellType, Point};

    fn scenario(ct: CellType, cue: Point, tx: Point, rx: Point) -> (CellLayout, UePopulation) {
        let l = build_layout(ct);
        let pop = UePopulation::from_positions(&l, &[cue], &[(tx, rx)]).unwrap();
        (l, pop)
    }

    #[test]
    fn cellular_rate_is_the_worse_leg() {
        let (l, pop) = scenario(
            CellType::ALL[0],
            Point::new(50.0, 0.0),
            Point::new(100.0, 0.0),
            Point::new(-200.0, 0.0),
        );
        let p = RadioParams::default();
        let u = compute_utilities(&pop, &l, &p, &InterferenceEstimate::zero(1, 1));
        let t = LinkTable::new(&l, &pop, &p);
        let ul = t.pair_cm_ul_capacity(0, 0.0);
        let dl = t.pair_cm_dl_capacity(0, 0.0);
        assert_ne!(ul, dl);
        assert_eq!(u.u_cm[0], ul.min(dl));
    }

    #[test]
    fn colocated_pair_direct_beats_cellular() {
        let (l, pop) = scenario(
            CellType::ALL[4],
            Point::new(10.0, 0.0),
            Point::new(60.0, 20.0),
            Point::new(60.2, 20.0),
        );
        let p = RadioParams::default();
        let u = compute_utilities(&pop, &l, &p, &InterferenceEstimate::zero(1, 1));
        // Link budget by hand: 14.7 dBm, 0 dBi both ends, clamped to 1 m.
        let snr = dbm_to_mw(14.7 - path_loss_db(1.0, &p) - noise_power_dbm(&p));
        let expected = capacity_bps(snr, 5e6);
        assert!((u.u_dm[0] - expected).abs() < 1e-6 * expected);
        assert!(u.u_dm[0] > u.u_cm[0]);
    }

    #[test]
    fn silent_transmitters_have_zero_rate() {
        let mut ct = CellType::ALL[0];
        ct.ue_max_power_dbm = f64::NEG_INFINITY;
        let (l, pop) = scenario(ct, Point::new(0.0, 80.0), Point::new(30.0, 0.0), Point::new(60.0, 0.0));
        let u = compute_utilities(&pop, &l, &RadioParams::default(), &InterferenceEstimate::zero(1, 1));
        assert_eq!(u.u_leg, vec![0.0]);
        assert_eq!(u.u_dm, vec![0.0]);
        assert_eq!(u.u_cm, vec![0.0]);
    }

    #[test]
    fn interference_lowers_rates() {
        let (l, pop) = scenario(
            CellType::ALL[0],
            Point::new(50.0, 0.0),
            Point::new(100.0, 0.0),
            Point::new(150.0, 0.0),
        );
        let t = LinkTable::new(&l, &pop, &RadioParams::default());
        let clean = t.utilities(&InterferenceEstimate::zero(1, 1));
        let mut est = InterferenceEstimate::zero(1, 1);
        est.cue_ul[0] = 1e-9;
        est.pair_dm[0] = 1e-9;
        let noisy = t.utilities(&est);
        assert!(noisy.u_leg[0] < clean.u_leg[0]);
        assert!(noisy.u_dm[0] < clean.u_dm[0]);
        assert_eq!(noisy.u_cm[0], clean.u_cm[0]);
    }
}
