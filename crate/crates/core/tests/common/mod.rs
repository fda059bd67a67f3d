#![allow(dead_code)]

use d2dsim_core::rrm::{EntityUtilities, SharingScheme, SnapshotProblem};
use proptest::prelude::*;
use rand::Rng;

pub fn random_problem<R: Rng>(
    rng: &mut R,
    scheme: SharingScheme,
    cells: usize,
    nc: usize,
    np: usize,
) -> SnapshotProblem {
    SnapshotProblem {
        scheme,
        utilities: EntityUtilities {
            u_leg: (0..nc).map(|_| rng.random_range(1e5..4e7)).collect(),
            u_dm: (0..np).map(|_| rng.random_range(0.0..8e7)).collect(),
            u_cm: (0..np).map(|_| rng.random_range(0.0..4e7)).collect(),
            weights: (0..nc + np).map(|_| 1.0 / rng.random_range(1..6) as f64).collect(),
        },
        cue_cell: (0..nc).map(|_| rng.random_range(0..cells)).collect(),
        pair_tx_cell: (0..np).map(|_| rng.random_range(0..cells)).collect(),
        pair_rx_cell: (0..np).map(|_| rng.random_range(0..cells)).collect(),
        pair_distance: (0..np).map(|_| rng.random_range(1.0..200.0)).collect(),
        d_max: 150.0,
        num_cells: cells,
        direct_mode_allowed: rng.random_bool(0.85),
    }
}

/// Problems with at most `max_entities` entities, any scheme.
pub fn arb_problem(max_entities: usize) -> impl Strategy<Value = SnapshotProblem> {
    (1usize..=4, 0usize..=max_entities, 0usize..3)
        .prop_flat_map(move |(cells, n, s)| (Just(cells), Just(s), 0..=n, Just(n)))
        .prop_flat_map(|(cells, s, np, n)| {
            let nc = n - np;
            (
                Just(SharingScheme::ALL[s]),
                Just(cells),
                prop::collection::vec(1e5f64..4e7, nc),
                prop::collection::vec(0f64..8e7, np),
                prop::collection::vec(0f64..4e7, np),
                prop::collection::vec(1u32..6, nc + np),
                prop::collection::vec(0..cells, nc),
                prop::collection::vec((0..cells, 0..cells, 1f64..200.0), np),
                any::<bool>(),
            )
        })
        .prop_map(
            |(scheme, cells, u_leg, u_dm, u_cm, w, cue_cell, pairs, allowed)| SnapshotProblem {
                scheme,
                utilities: EntityUtilities {
                    u_leg,
                    u_dm,
                    u_cm,
                    weights: w.into_iter().map(|k| 1.0 / k as f64).collect(),
                },
                cue_cell,
                pair_tx_cell: pairs.iter().map(|p| p.0).collect(),
                pair_rx_cell: pairs.iter().map(|p| p.1).collect(),
                pair_distance: pairs.iter().map(|p| p.2).collect(),
                d_max: 150.0,
                num_cells: cells,
                direct_mode_allowed: allowed,
            },
        )
}
