mod common;

use common::{arb_problem, random_problem};
use d2dsim_core::rrm::{
    build_program, check_decision, solve_bruteforce, solve_exact, solve_snapshot, Decision, PairMode, SharingScheme,
    SnapshotProblem,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn with_scheme(p: &SnapshotProblem, scheme: SharingScheme) -> SnapshotProblem {
    SnapshotProblem { scheme, ..p.clone() }
}

#[test]
fn all_three_solvers_agree_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for k in 0..240 {
        let scheme = SharingScheme::ALL[k % 3];
        let np = rng.random_range(0..=6);
        let nc = rng.random_range(0..=(8 - np).min(8));
        let cells = rng.random_range(1..=4);
        let p = random_problem(&mut rng, scheme, cells, nc, np);
        let program = build_program(&p);
        let brute = solve_bruteforce(&program).unwrap();
        let exact = solve_exact(&program).unwrap();
        let structured = solve_snapshot(&p);
        assert_eq!(
            exact.objective_value.to_bits(),
            brute.objective_value.to_bits(),
            "instance {k}"
        );
        assert_eq!(structured, brute, "instance {k}");
        assert_eq!(exact, brute, "instance {k}");
    }
}

#[test]
fn structured_and_generic_agree_at_network_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for k in 0..30 {
        let scheme = SharingScheme::ALL[k % 3];
        let p = random_problem(&mut rng, scheme, 9, 18, 18);
        assert_eq!(
            solve_snapshot(&p),
            solve_exact(&build_program(&p)).unwrap(),
            "instance {k}"
        );
    }
}

#[test]
fn overlay_is_the_most_constrained_scheme() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..200 {
        let np = rng.random_range(0..=6);
        let nc = rng.random_range(0..=(10 - np).min(6));
        let cells = rng.random_range(1..=3);
        let p = random_problem(&mut rng, SharingScheme::Overlay, cells, nc, np);
        let ov = solve_snapshot(&p).objective_value;
        for s in [SharingScheme::Underlay1, SharingScheme::Underlay2] {
            assert!(ov <= solve_snapshot(&with_scheme(&p, s)).objective_value);
        }
    }
}

#[test]
fn hopeless_pairs_never_go_direct() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..100 {
        let mut p = random_problem(&mut rng, SharingScheme::Underlay1, 2, 3, 5);
        p.d_max = 0.5;
        let d = solve_snapshot(&p);
        assert!(d.x.iter().all(|&x| !x));
    }
}

#[test]
fn one_cell_one_transmitter_under_overlay() {
    // Equal weights: the single best rate in the cell wins.
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..100 {
        let mut p = random_problem(&mut rng, SharingScheme::Overlay, 1, 4, 4);
        p.utilities.weights.iter_mut().for_each(|w| *w = 1.0);
        p.direct_mode_allowed = true;
        p.pair_distance.iter_mut().for_each(|d| *d = 10.0);
        let d = solve_snapshot(&p);
        let u = &p.utilities;
        let best = u
            .u_leg
            .iter()
            .chain(u.u_dm.iter().zip(&u.u_cm).map(|(a, b)| if a > b { a } else { b }))
            .cloned()
            .fold(0.0, f64::max);
        // Direct mode is folded as u_cm + (u_dm - u_cm), so allow an ulp or two.
        assert!(
            (d.objective_value - best).abs() <= 1e-12 * best,
            "{} vs {best}",
            d.objective_value
        );
        assert_eq!(d.y.iter().filter(|&&y| y).count(), usize::from(best > 0.0));
    }
}

fn objective(p: &SnapshotProblem, d: &Decision) -> f64 {
    let program = build_program(p);
    program.objective_value(&program.encode(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn optimum_is_feasible_and_consistent(p in arb_problem(9)) {
        let d = solve_snapshot(&p);
        prop_assert!(check_decision(&p, &d).is_ok());
        let program = build_program(&p);
        prop_assert!(program.is_feasible(&program.encode(&d)));
        prop_assert_eq!(objective(&p, &d), d.objective_value);
        prop_assert!(d.objective_value >= 0.0);
    }

    #[test]
    fn optimum_beats_every_single_entity_schedule(p in arb_problem(9)) {
        let d = solve_snapshot(&p);
        let nc = p.num_cues();
        for e in 0..p.num_entities() {
            for direct in [false, true] {
                let mut y = vec![false; p.num_entities()];
                let mut x = vec![false; p.num_pairs()];
                y[e] = true;
                if e >= nc {
                    if direct && !p.direct_mode_possible(e - nc) {
                        continue;
                    }
                    x[e - nc] = direct;
                } else if direct {
                    continue;
                }
                let single = Decision { y, x, objective_value: 0.0 };
                prop_assert!(check_decision(&p, &single).is_ok());
                prop_assert!(objective(&p, &single) <= d.objective_value);
            }
        }
    }

    #[test]
    fn forced_cellular_mode_never_selects_direct(p in arb_problem(9)) {
        let p = SnapshotProblem { direct_mode_allowed: false, ..p };
        let d = solve_snapshot(&p);
        for j in 0..p.num_pairs() {
            prop_assert_ne!(d.pair_mode(j), Some(PairMode::Direct));
        }
    }

    #[test]
    fn forced_cellular_overlay_equals_underlay1(p in arb_problem(9)) {
        let p = SnapshotProblem { direct_mode_allowed: false, ..p };
        let a = solve_snapshot(&with_scheme(&p, SharingScheme::Overlay));
        let b = solve_snapshot(&with_scheme(&p, SharingScheme::Underlay1));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn scheme_nesting(p in arb_problem(9)) {
        let ov = solve_snapshot(&with_scheme(&p, SharingScheme::Overlay)).objective_value;
        prop_assert!(ov <= solve_snapshot(&with_scheme(&p, SharingScheme::Underlay1)).objective_value);
        prop_assert!(ov <= solve_snapshot(&with_scheme(&p, SharingScheme::Underlay2)).objective_value);
    }
}
