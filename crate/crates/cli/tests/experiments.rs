use d2dsim::report::csv_row;
use d2dsim::{
    parse_config, preset_densification_sweep, preset_ue_density_sweep, run_experiments, to_config_text, to_csv,
    ExperimentConfig, CSV_HEADER,
};
use d2dsim_core::{CellType, SchedulerPolicy, SharingScheme};
use proptest::prelude::*;

fn quick() -> ExperimentConfig {
    ExperimentConfig {
        snapshots: 6,
        calibration_samples: 200,
        ..ExperimentConfig::default()
    }
}

#[test]
fn fifteen_runs_fifteen_rows() {
    let configs = preset_densification_sweep(&quick(), 18).unwrap();
    let rows = run_experiments(&configs).unwrap();
    let csv = to_csv(&[], &rows);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 16);
    assert_eq!(lines[0], CSV_HEADER);
}

#[test]
fn rows_follow_configuration_then_replication_order() {
    let base = ExperimentConfig {
        replications: 3,
        seed: 40,
        ..quick()
    };
    let configs = preset_ue_density_sweep(&base, &[1, 2]).unwrap();
    let rows = run_experiments(&configs).unwrap();
    assert_eq!(rows.len(), 30);
    for (k, r) in rows.iter().enumerate() {
        assert_eq!(r.rep, (k % 3) as u64);
        assert_eq!(r.run.enabled.config.seed, 40 + (k % 3) as u64);
        assert_eq!(r.config, configs[k / 3]);
    }
}

#[test]
fn total_gain_column_is_the_weighted_sum() {
    let configs = preset_densification_sweep(&quick(), 24).unwrap();
    for r in run_experiments(&configs).unwrap() {
        let row = csv_row(&r);
        let f: Vec<f64> = row.split(',').skip(9).map(|v| v.parse().unwrap()).collect();
        let expect = 0.5 * f[0] + 0.5 * f[1];
        assert!(
            f[2].to_bits() == expect.to_bits() || (f[2].is_nan() && expect.is_nan()),
            "{row}"
        );
    }
}

fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
    (
        0usize..3,
        1u8..=5,
        (0usize..80, 0usize..80),
        (1u64..1000, 1u64..50, any::<u64>()),
        any::<bool>(),
        (0.0f64..2.0, 0.0f64..2.0),
        any::<bool>(),
        100usize..5000,
        proptest::option::of("[a-z]{1,8}\\.csv"),
    )
        .prop_filter("non-empty population", |(_, _, (c, p), ..)| c + p > 0)
        .prop_map(
            |(s, ct, (c, p), (snap, reps, seed), pf, (a1, a2), bi, cal, out)| ExperimentConfig {
                scheme: SharingScheme::ALL[s],
                cell_type: CellType::from_id(ct).unwrap(),
                n_cues: c,
                n_pairs: p,
                snapshots: snap,
                replications: reps,
                seed,
                policy: if pf {
                    SchedulerPolicy::ProportionalFairness
                } else {
                    SchedulerPolicy::RoundRobin
                },
                out: out.map(Into::into),
                a1,
                a2,
                boundary_interference: bi,
                calibration_samples: cal,
            },
        )
}

proptest! {
    #[test]
    fn config_text_round_trips(cfg in arb_config()) {
        prop_assert_eq!(parse_config(&to_config_text(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn presets_are_pure(total in 3usize..300, seed in any::<u64>()) {
        let base = ExperimentConfig { seed, ..ExperimentConfig::default() };
        prop_assert_eq!(preset_densification_sweep(&base, total), preset_densification_sweep(&base, total));
        let grid = [total / 3 + 1, total];
        prop_assert_eq!(preset_ue_density_sweep(&base, &grid), preset_ue_density_sweep(&base, &grid));
    }
}
