use fockmodes_core::entanglement::{rank_bound, schmidt_spectrum, Partition};
use fockmodes_core::fixtures;
use fockmodes_core::fock::{enumerate_sector, PureState};
use fockmodes_core::optimize::{
    optimize_entanglement, Direction, EntropyObjective, NelderMead, OptConfig,
};
use fockmodes_core::permanent::fock_matrix_element;
use fockmodes_core::transform::{
    apply_redefinition, exp_map, unitarity_residual, HermitianParams, ModeUnitary,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn arb_unitary(m: usize) -> impl Strategy<Value = ModeUnitary> {
    proptest::collection::vec(-3.5f64..3.5, m * m)
        .prop_map(move |t| exp_map(&HermitianParams::new(m, t).unwrap()))
}

fn arb_state(m: usize, max_total: u32) -> impl Strategy<Value = PureState> {
    proptest::collection::vec(
        (
            proptest::collection::vec(0u32..=max_total, m),
            -1.0f64..1.0,
            -1.0f64..1.0,
        ),
        1..6,
    )
    .prop_filter_map("nonzero and within the photon cap", move |terms| {
        let terms: Vec<_> = terms
            .into_iter()
            .filter(|(o, _, _)| o.iter().sum::<u32>() <= max_total)
            .map(|(o, re, im)| (o, Complex64::new(re, im)))
            .collect();
        PureState::from_terms(m, terms).ok()?.normalize().ok()
    })
}

fn arb_case() -> impl Strategy<Value = (PureState, ModeUnitary, ModeUnitary)> {
    (1usize..=4).prop_flat_map(|m| (arb_state(m, 3), arb_unitary(m), arb_unitary(m)))
}

fn max_diff(a: &PureState, b: &PureState) -> f64 {
    let mut worst: f64 = 0.0;
    for (o, x) in a.iter() {
        worst = worst.max((x - b.amplitude(o)).norm());
    }
    for (o, y) in b.iter() {
        worst = worst.max((y - a.amplitude(o)).norm());
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn redefinition_preserves_norm_and_sectors((s, u, _) in arb_case()) {
        let out = apply_redefinition(&s, &u).unwrap();
        prop_assert!((out.norm_sqr().sqrt() - 1.0).abs() < 1e-12);
        let (before, after) = (s.sector_weights(), out.sector_weights());
        for (n, w) in &before {
            prop_assert!((w - after.get(n).copied().unwrap_or(0.0)).abs() < 1e-12);
        }
        prop_assert!(after.keys().all(|n| before.contains_key(n)));
    }

    #[test]
    fn redefinitions_compose((s, v, w) in arb_case()) {
        let stepwise = apply_redefinition(&apply_redefinition(&s, &v).unwrap(), &w).unwrap();
        let direct = apply_redefinition(&s, &w.compose(&v).unwrap()).unwrap();
        prop_assert!(max_diff(&stepwise, &direct) < 1e-10);
    }

    #[test]
    fn adjoint_undoes_redefinition((s, u, _) in arb_case()) {
        let back = apply_redefinition(&apply_redefinition(&s, &u).unwrap(), &u.adjoint()).unwrap();
        prop_assert!(max_diff(&back, &s) < 1e-10);
    }

    #[test]
    fn expansion_matches_permanents(u in arb_unitary(3)) {
        let mut worst: f64 = 0.0;
        for total in 0..=3 {
            let sector = enumerate_sector(3, total);
            for n in &sector {
                let out = apply_redefinition(&PureState::basis(n.clone()), &u).unwrap();
                for m in &sector {
                    let e = fock_matrix_element(&u, m, n).unwrap();
                    worst = worst.max((e - out.amplitude(m)).norm());
                }
            }
        }
        prop_assert!(worst < 1e-10, "max deviation {worst}");
    }

    #[test]
    fn exp_map_is_unitary(m in 1usize..=6, seed in proptest::collection::vec(-10.0f64..10.0, 36)) {
        let u = exp_map(&HermitianParams::new(m, seed[..m * m].to_vec()).unwrap());
        prop_assert!(unitarity_residual(u.entries()) <= 1e-12);
    }

    #[test]
    fn entropy_is_side_symmetric((s, u, _) in arb_case()) {
        let m = s.mode_count();
        prop_assume!(m >= 2);
        let t = apply_redefinition(&s, &u).unwrap();
        let p = Partition::split_at(m / 2, m).unwrap();
        let ab = schmidt_spectrum(&t, &p).unwrap();
        let ba = schmidt_spectrum(&t, &p.swapped()).unwrap();
        prop_assert!((ab.entropy_bits - ba.entropy_bits).abs() < 1e-12);
        for (x, y) in ab.lambdas.iter().zip(&ba.lambdas) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!(ab.entropy_bits <= (ab.numerical_rank as f64).log2() + 1e-10);
    }

    #[test]
    fn local_redefinitions_keep_entropy(
        s in arb_state(4, 3),
        ua in arb_unitary(2),
        ub in arb_unitary(2),
        scramble in arb_unitary(4),
    ) {
        let s = apply_redefinition(&s, &scramble).unwrap();
        let p = Partition::new(vec![0, 2], vec![1, 3], 4).unwrap();
        let local = ModeUnitary::local(4, &[(p.side_a(), &ua), (p.side_b(), &ub)]).unwrap();
        let before = schmidt_spectrum(&s, &p).unwrap().entropy_bits;
        let after = schmidt_spectrum(&apply_redefinition(&s, &local).unwrap(), &p).unwrap().entropy_bits;
        prop_assert!((before - after).abs() < 1e-10);
    }

    #[test]
    fn schmidt_rank_within_bound(total in 1u32..=3, u in arb_unitary(4), k in 1usize..=3) {
        let occs = enumerate_sector(4, total);
        let s = PureState::uniform(4, occs.iter().step_by(2).cloned()).unwrap();
        let p = Partition::split_at(k, 4).unwrap();
        let spectrum = schmidt_spectrum(&apply_redefinition(&s, &u).unwrap(), &p).unwrap();
        prop_assert!(spectrum.numerical_rank <= rank_bound(&s, &p).unwrap());
    }

    #[test]
    fn mixed_number_rank_within_bound(s in arb_state(3, 3), u in arb_unitary(3), k in 1usize..=2) {
        let p = Partition::split_at(k, 3).unwrap();
        let spectrum = schmidt_spectrum(&apply_redefinition(&s, &u).unwrap(), &p).unwrap();
        prop_assert!(spectrum.numerical_rank <= rank_bound(&s, &p).unwrap());
    }
}

#[test]
fn simplex_trace_on_entropy_objective_is_monotone() {
    let s = fixtures::two_photon_pair();
    let p = Partition::split_at(1, 2).unwrap();
    let objective = EntropyObjective::new(&s, &p).unwrap();
    let x0 = objective.start_point(7, 3);
    let m = NelderMead::default()
        .minimize(|t| objective.entropy_at(t), &x0)
        .unwrap();
    assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
    assert!(m.value <= objective.entropy_at(&x0));
}

fn small_cases() -> Vec<(PureState, Partition)> {
    vec![
        (
            fixtures::single_photon_pair(),
            Partition::split_at(1, 2).unwrap(),
        ),
        (
            fixtures::two_photon_pair(),
            Partition::split_at(1, 2).unwrap(),
        ),
        (fixtures::vacuum_pair(), Partition::split_at(1, 2).unwrap()),
        (
            PureState::uniform(3, [[2, 1, 0], [0, 1, 2], [1, 1, 1]]).unwrap(),
            Partition::split_at(1, 3).unwrap(),
        ),
    ]
}

#[test]
fn sandwich_and_ceiling() {
    for (s, p) in small_cases() {
        let e0 = schmidt_spectrum(&s, &p).unwrap().entropy_bits;
        let cfg = OptConfig::new(Direction::Min)
            .with_restarts(6)
            .with_seed(11);
        let lo = optimize_entanglement(&s, &p, &cfg).unwrap();
        let hi = optimize_entanglement(
            &s,
            &p,
            &OptConfig {
                direction: Direction::Max,
                ..cfg
            },
        )
        .unwrap();
        assert!(lo.best_entropy_bits <= e0 + 1e-9);
        assert!(hi.best_entropy_bits >= e0 - 1e-9);
        let cap = (rank_bound(&s, &p).unwrap() as f64).log2();
        assert!(hi.best_entropy_bits <= cap + 1e-9);
        for r in [&lo, &hi] {
            let again = schmidt_spectrum(&apply_redefinition(&s, &r.best_unitary).unwrap(), &p)
                .unwrap()
                .entropy_bits;
            assert!((again - r.best_entropy_bits).abs() < 1e-9);
        }
    }
}

#[test]
fn optimizer_is_deterministic_and_monotone_in_restarts() {
    let s = fixtures::vacuum_pair();
    let p = Partition::split_at(1, 2).unwrap();
    for dir in [Direction::Min, Direction::Max] {
        let cfg = OptConfig::new(dir).with_restarts(4).with_seed(3);
        let a = optimize_entanglement(&s, &p, &cfg).unwrap();
        let b = optimize_entanglement(&s, &p, &cfg).unwrap();
        assert_eq!(
            a.per_restart_values
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>(),
            b.per_restart_values
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>()
        );
        let more = optimize_entanglement(&s, &p, &cfg.with_restarts(7)).unwrap();
        assert_eq!(&more.per_restart_values[..4], &a.per_restart_values[..]);
        assert!(!dir.better(a.best_entropy_bits, more.best_entropy_bits));
    }
}

#[test]
fn restart_order_does_not_change_result() {
    use fockmodes_core::optimize::merge_restarts;
    let s = fixtures::two_photon_pair();
    let p = Partition::split_at(1, 2).unwrap();
    let cfg = OptConfig::new(Direction::Max).with_restarts(5);
    let objective = EntropyObjective::new(&s, &p).unwrap();
    let mut outcomes: Vec<_> = (0..5)
        .map(|k| objective.run_restart(&cfg, k).unwrap())
        .collect();
    let forward = merge_restarts(&s, &p, &cfg, outcomes.clone()).unwrap();
    outcomes.reverse();
    let backward = merge_restarts(&s, &p, &cfg, outcomes).unwrap();
    assert_eq!(forward, backward);
    assert_eq!(forward, optimize_entanglement(&s, &p, &cfg).unwrap());
}

#[test]
fn oversized_search_rejected() {
    let s = PureState::basis(vec![1u32; 13]);
    let p = Partition::split_at(6, 13).unwrap();
    assert!(optimize_entanglement(&s, &p, &OptConfig::new(Direction::Min)).is_err());
    let zero = OptConfig::new(Direction::Min).with_restarts(0);
    assert!(optimize_entanglement(
        &fixtures::vacuum_pair(),
        &Partition::split_at(1, 2).unwrap(),
        &zero
    )
    .is_err());
}
