mod common;

use proptest::prelude::*;

use rkm_core::bench::{from_json, parse_instance, parse_label_cover, parse_mcsp, read_records_csv, records_to_csv, to_json};
use rkm_core::bench::{wilcoxon_signed_rank, RunRecord};
use rkm_core::exact::{branch_and_bound, brute_force_rkm, BnbConfig};
use rkm_core::generators::Family;
use rkm_core::hardness::partition::PartitionSystem;
use rkm_core::hardness::toy::{planted_label_cover, ToySpec};
use rkm_core::hardness::{verify_partition_system, VerifyMode};
use rkm_core::heuristics::{
    greedy_down, greedy_up, is_local_optimum, local_search, randomized_local_search, HeuristicConfig,
};
use rkm_core::lp::{build_rkm_lp, solve_lp, solve_rkm_lp};
use rkm_core::mcsp::{congestion, facilities_to_selection, mcsp_to_rkm, selection_to_facilities};
use rkm_core::rng::SeededRng;
use rkm_core::{eval_objective, RkmInstance, SetSelection};

use common::{random_mcsp, small_instance};

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

prop_compose! {
    fn tiny_instance()(fam in family(), nf in 4usize..=9, ng in 1usize..=4, cpg in 1usize..=4, k in 1usize..=4, seed in any::<u64>()) -> RkmInstance {
        small_instance(fam, nf, ng, cpg, k.min(nf), seed)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn congestion_equals_uniform_objective(seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let mcsp = random_mcsp(&mut rng, 8, 6);
        let inst = mcsp_to_rkm(&mcsp).unwrap();
        let sel = SetSelection::new(rng.sample_indices(mcsp.n_sets(), mcsp.t));
        let open = selection_to_facilities(mcsp.n_sets(), &sel);
        prop_assert_eq!(open.len(), inst.k);
        prop_assert_eq!(congestion(&mcsp, &sel).unwrap().max as f64, eval_objective(&inst, &open).unwrap().cost);
        prop_assert_eq!(facilities_to_selection(mcsp.n_sets(), &open), sel);
    }

    #[test]
    fn heuristics_are_bracketed_by_lp_and_opt(inst in tiny_instance(), seed in any::<u64>()) {
        let opt = brute_force_rkm(&inst).unwrap().opt_value;
        let lp = solve_rkm_lp(&inst).unwrap().value;
        prop_assert!(lp <= opt + 1e-6);
        let cfg = HeuristicConfig::default().with_seed(seed);
        let outcomes = [
            greedy_up(&inst),
            greedy_down(&inst),
            local_search(&inst, &cfg).unwrap(),
            randomized_local_search(&inst, &HeuristicConfig::randomized().with_seed(seed)).unwrap(),
        ];
        for out in &outcomes {
            prop_assert_eq!(out.solution.len(), inst.k);
            prop_assert_eq!(out.objective, eval_objective(&inst, &out.solution).unwrap().cost);
            prop_assert!(out.objective >= opt);
            prop_assert!(out.objective >= lp - 1e-6);
        }
        prop_assert!(outcomes[1].trace.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(outcomes[2].trace.windows(2).all(|w| w[1] < w[0]));
        prop_assert!(is_local_optimum(&inst, &outcomes[2].solution, cfg.ell).unwrap());
    }

    #[test]
    fn branch_and_bound_matches_enumeration(inst in tiny_instance()) {
        let brute = brute_force_rkm(&inst).unwrap();
        let bnb = branch_and_bound(&inst, &BnbConfig::default()).unwrap();
        prop_assert!(bnb.proved_optimal);
        prop_assert!((bnb.opt_value - brute.opt_value).abs() <= 1e-9 * brute.opt_value.max(1.0));
        prop_assert_eq!(eval_objective(&inst, &bnb.witness).unwrap().cost, bnb.opt_value);
        prop_assert_eq!(eval_objective(&inst, &brute.witness).unwrap().cost, brute.opt_value);
    }

    #[test]
    fn column_generation_agrees_with_the_full_model(inst in tiny_instance()) {
        let full = solve_lp(&build_rkm_lp(&inst)).unwrap();
        let cg = solve_rkm_lp(&inst).unwrap();
        prop_assert!((full.objective - cg.value).abs() <= 1e-6 * full.objective.abs().max(1.0));
    }

    #[test]
    fn randomized_search_is_deterministic(inst in tiny_instance(), seed in any::<u64>()) {
        let cfg = HeuristicConfig::randomized().with_seed(seed);
        prop_assert_eq!(randomized_local_search(&inst, &cfg).unwrap(), randomized_local_search(&inst, &cfg).unwrap());
    }

    #[test]
    fn wilcoxon_is_symmetric(xs in prop::collection::vec((-10i32..10, -10i32..10), 6..30)) {
        let a: Vec<f64> = xs.iter().map(|p| p.0 as f64).collect();
        let b: Vec<f64> = xs.iter().map(|p| p.1 as f64).collect();
        match (wilcoxon_signed_rank(&a, &b), wilcoxon_signed_rank(&b, &a)) {
            (Ok(x), Ok(y)) => {
                prop_assert!((0.0..=1.0).contains(&x.p_value));
                prop_assert_eq!(x.p_value, y.p_value);
                prop_assert_eq!(x.statistic, y.statistic);
            }
            (x, y) => prop_assert_eq!(x.is_err(), y.is_err()),
        }
    }

    #[test]
    fn hypercube_systems_verify(r in 2usize..=3, colors in 1usize..=5) {
        let ps = PartitionSystem::hypercube(r, colors).unwrap();
        prop_assert!(ps.check_partition_property().is_ok());
        prop_assert!(verify_partition_system(&ps, VerifyMode::Exhaustive).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn instance_json_round_trip(fam in family(), nf in 1usize..=15, ng in 1usize..=5, cpg in 1usize..=6, seed in any::<u64>()) {
        let inst = small_instance(fam, nf, ng, cpg, 1 + (seed as usize % nf), seed);
        prop_assert_eq!(parse_instance(&to_json(&inst).unwrap()).unwrap(), inst);
    }

    #[test]
    fn mcsp_json_round_trip(seed in any::<u64>()) {
        let mcsp = random_mcsp(&mut SeededRng::new(seed), 12, 9);
        prop_assert_eq!(parse_mcsp(&to_json(&mcsp).unwrap()).unwrap(), mcsp);
    }

    #[test]
    fn label_cover_json_round_trip(r in 2usize..=3, part_size in 1usize..=3, labels in 1usize..=3, extra in 0usize..3, seed in any::<u64>()) {
        let spec = ToySpec { r, part_size, n_labels: labels, n_colors: r + 1 };
        let (lc, labeling) = planted_label_cover(&spec, part_size + extra, seed).unwrap();
        prop_assert_eq!(parse_label_cover(&to_json(&lc).unwrap()).unwrap(), lc);
        prop_assert_eq!(from_json::<rkm_core::hardness::Labeling>(&to_json(&labeling).unwrap()).unwrap(), labeling);
    }

    #[test]
    fn records_round_trip(rows in prop::collection::vec(record(), 0..8)) {
        prop_assert_eq!(read_records_csv(records_to_csv(&rows).unwrap().as_bytes()).unwrap(), rows.clone());
        prop_assert_eq!(from_json::<Vec<RunRecord>>(&to_json(&rows).unwrap()).unwrap(), rows);
    }
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), -1e6..1e6f64, any::<f64>().prop_filter("finite", |x| x.is_finite())]
}

prop_compose! {
    fn record()(
        id in "[a-z_0-9]{1,12}",
        fam in family(),
        sizes in (1usize..100, 1usize..500, 1usize..20, 1usize..10),
        solver in prop::sample::select(vec!["greedy_up", "greedy_down", "local_search"]),
        seed in any::<u64>(),
        objective in finite(),
        lp in prop::option::of(finite()),
        ratio in prop::option::of(finite()),
        wall in prop::option::of(0.0..1e4f64),
        iterations in 0usize..10_000,
    ) -> RunRecord {
        RunRecord {
            instance_id: id,
            family: fam.name().into(),
            n_facilities: sizes.0,
            n_clients: sizes.1,
            n_groups: sizes.2,
            k: sizes.3,
            solver: solver.into(),
            seed,
            objective,
            lp_value: lp,
            ratio,
            wall_time_ms: wall,
            iterations,
        }
    }
}
