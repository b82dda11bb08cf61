use super::*;
use crate::instance::{Metric, RkmInstance};
use crate::mcsp::{build_integrality_gap, mcsp_to_rkm, McspInstance};

fn approx(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6
}

#[test]
fn max_of_lower_bounds() {
    let mut lp = LpModel::new();
    let t = lp.add_var("T", f64::NEG_INFINITY, f64::INFINITY);
    lp.add_constraint("a", vec![(t, 1.0)], Sense::Ge, 3.0);
    lp.add_constraint("b", vec![(t, 1.0)], Sense::Ge, 5.0);
    lp.set_objective(vec![(t, 1.0)]);
    let sol = solve_lp(&lp).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!(approx(sol.objective, 5.0));
}

#[test]
fn infeasible_and_unbounded() {
    let mut lp = LpModel::new();
    let x = lp.add_var("x", 0.0, 1.0);
    lp.add_constraint("c", vec![(x, 1.0)], Sense::Ge, 2.0);
    lp.set_objective(vec![(x, 1.0)]);
    assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);

    let mut lp = LpModel::new();
    let x = lp.add_var("x", 0.0, f64::INFINITY);
    let y = lp.add_var("y", 0.0, f64::INFINITY);
    lp.add_constraint("c", vec![(x, 1.0), (y, -1.0)], Sense::Le, 1.0);
    lp.set_objective(vec![(y, -1.0)]);
    assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn small_textbook_lp() {
    // max 3a + 5b s.t. a <= 4, 2b <= 12, 3a + 2b <= 18  -> 36 at (2, 6)
    let mut lp = LpModel::new();
    let a = lp.add_var("a", 0.0, f64::INFINITY);
    let b = lp.add_var("b", 0.0, f64::INFINITY);
    lp.add_constraint("r1", vec![(a, 1.0)], Sense::Le, 4.0);
    lp.add_constraint("r2", vec![(b, 2.0)], Sense::Le, 12.0);
    lp.add_constraint("r3", vec![(a, 3.0), (b, 2.0)], Sense::Le, 18.0);
    lp.set_objective(vec![(a, -3.0), (b, -5.0)]);
    let sol = solve_lp(&lp).unwrap();
    assert!(approx(sol.objective, -36.0));
    assert!(approx(sol.values[a], 2.0) && approx(sol.values[b], 6.0));
    // duals price the binding rows
    assert!(approx(sol.duals[0], 0.0));
    assert!(approx(sol.duals[1], -1.5));
    assert!(approx(sol.duals[2], -1.0));
}

#[test]
fn equality_and_free_variables() {
    let mut lp = LpModel::new();
    let a = lp.add_var("a", f64::NEG_INFINITY, f64::INFINITY);
    let b = lp.add_var("b", -2.0, 2.0);
    lp.add_constraint("e", vec![(a, 1.0), (b, 1.0)], Sense::Eq, 1.0);
    lp.add_constraint("g", vec![(a, 1.0), (b, -1.0)], Sense::Ge, -3.0);
    lp.set_objective(vec![(a, 1.0)]);
    let sol = solve_lp(&lp).unwrap();
    assert!(approx(sol.objective, -1.0), "{}", sol.objective);
    assert!(approx(sol.values[b], 2.0));
}

#[test]
fn all_sites_open_gives_zero() {
    let inst = RkmInstance::on_points(Metric::Uniform { n: 4 }, vec![vec![0, 1], vec![2, 3]], 4).unwrap();
    assert!(approx(rkm_lp_value(&inst).unwrap(), 0.0));
}

#[test]
fn midpoint_client_costs_five() {
    let inst = RkmInstance::new(
        Metric::Line { points: vec![0.0, 10.0, 5.0] },
        vec![0, 1],
        vec![2],
        vec![vec![0]],
        1,
    )
    .unwrap();
    assert!(approx(rkm_lp_value(&inst).unwrap(), 5.0));
}

#[test]
fn gap_instances_have_lp_value_one() {
    for d in [2, 3] {
        let mcsp = build_integrality_gap(d).unwrap();
        let sol = solve_lp(&build_mcsp_lp(&mcsp)).unwrap();
        assert!(approx(sol.objective, 1.0), "d={d}: {}", sol.objective);
    }
    let rkm = mcsp_to_rkm(&build_integrality_gap(2).unwrap()).unwrap();
    assert!(approx(rkm_lp_value(&rkm).unwrap(), 1.0));
}

#[test]
fn disjoint_sets_lp_is_t_over_n() {
    let inst = McspInstance::new(6, vec![vec![0, 1], vec![2, 3], vec![4, 5]], 2).unwrap();
    let sol = solve_lp(&build_mcsp_lp(&inst)).unwrap();
    assert!(approx(sol.objective, 2.0 / 3.0));
    let all = McspInstance::new(6, inst.sets.clone(), 3).unwrap();
    assert!(approx(solve_lp(&build_mcsp_lp(&all)).unwrap().objective, 1.0));
}

#[test]
fn canonical_assignment_keeps_group_costs_below_t() {
    let inst = RkmInstance::new(
        Metric::Line { points: vec![0.0, 4.0, 9.0, 1.0, 5.0, 8.0, 2.0] },
        vec![0, 1, 2],
        vec![3, 4, 5, 6],
        vec![vec![0, 1], vec![2, 3], vec![0, 3]],
        1,
    )
    .unwrap();
    let sol = solve_lp(&build_rkm_lp(&inst)).unwrap();
    let lay = RkmLpLayout::of(&inst);
    let canon = canonicalize_assignment(&inst, &sol.values);
    let costs = fractional_group_costs(&inst, &canon);
    assert!(costs.iter().all(|&c| c <= sol.objective + 1e-7));
    for i in 0..lay.n_clients {
        let total: f64 = (0..lay.n_facilities).map(|j| canon[lay.y(i, j)]).sum();
        assert!(approx(total, 1.0));
        for j in 0..lay.n_facilities {
            if canon[lay.x(j)] <= 0.0 {
                assert_eq!(canon[lay.y(i, j)], 0.0);
            }
        }
    }
}

#[test]
fn rounding_probabilities_saturate() {
    let inst = McspInstance::new(4, vec![vec![0, 1], vec![2, 3], vec![1, 2]], 1).unwrap();
    let mut sol = solve_lp(&build_mcsp_lp(&inst)).unwrap();
    sol.values[0] = 0.5;
    sol.values[1] = 0.5;
    sol.values[2] = 0.0;
    for seed in 0..50 {
        let out = round_mcsp(&inst, &sol, seed, Repair::None);
        assert_eq!(out.drawn, vec![0, 1]);
        let fixed = round_mcsp(&inst, &sol, seed, Repair::TrimOrPad);
        assert_eq!(fixed.selection.chosen.len(), 1);
        assert!(fixed.repaired);
    }
}

#[test]
fn padding_uses_lowest_unchosen() {
    let inst = McspInstance::new(3, vec![vec![0], vec![1], vec![2]], 2).unwrap();
    let mut sol = solve_lp(&build_mcsp_lp(&inst)).unwrap();
    sol.values = vec![0.0, 0.0, 1.0, 1.0];
    let out = round_mcsp(&inst, &sol, 1, Repair::TrimOrPad);
    assert_eq!(out.drawn, vec![2]);
    assert_eq!(out.selection.chosen, vec![0, 2]);
}

#[test]
fn export_lists_rows_in_order() {
    let mcsp = McspInstance::new(2, vec![vec![0], vec![1]], 1).unwrap();
    let text = to_lp_format(&build_mcsp_lp(&mcsp));
    let expected = "Minimize\n obj: + 1 z\nSubject To\n elem_0: + 1 y_0 - 1 z <= 0\n \
                    elem_1: + 1 y_1 - 1 z <= 0\n card: + 1 y_0 + 1 y_1 = 1\nBounds\n \
                    0 <= y_0 <= 1\n 0 <= y_1 <= 1\n 0 <= z <= +inf\nEnd\n";
    assert_eq!(text, expected);
}

#[test]
fn degenerate_cycling_prone_lp_terminates() {
    // Beale's example, classic cycling under naive Dantzig pivoting
    let mut lp = LpModel::new();
    let v: Vec<usize> = (0..4).map(|i| lp.add_var(format!("x{i}"), 0.0, f64::INFINITY)).collect();
    lp.add_constraint("r1", vec![(v[0], 0.25), (v[1], -60.0), (v[2], -0.04), (v[3], 9.0)], Sense::Le, 0.0);
    lp.add_constraint("r2", vec![(v[0], 0.5), (v[1], -90.0), (v[2], -0.02), (v[3], 3.0)], Sense::Le, 0.0);
    lp.add_constraint("r3", vec![(v[2], 1.0)], Sense::Le, 1.0);
    lp.set_objective(vec![(v[0], -0.75), (v[1], 150.0), (v[2], -0.02), (v[3], 6.0)]);
    let sol = solve_lp(&lp).unwrap();
    assert!(approx(sol.objective, -0.05), "{}", sol.objective);
}

#[test]
fn column_generation_matches_full_model() {
    use crate::generators::{generate, Family, GenSpec};
    for (s, family) in Family::ALL.into_iter().enumerate() {
        for seed in 0..4u64 {
            let inst = generate(&GenSpec::new(family, 9, 3, 5, seed * 7 + s as u64).with_k(3))
                .unwrap()
                .instance;
            let full = solve_lp(&build_rkm_lp(&inst)).unwrap();
            let cg = solve_rkm_lp(&inst).unwrap();
            assert!((full.objective - cg.value).abs() <= 1e-6 * (1.0 + full.objective), "{} vs {}", full.objective, cg.value);
            let lay = RkmLpLayout::of(&inst);
            assert!(build_rkm_lp(&inst).max_relative_violation(&cg.values) <= 1e-7);
            assert_eq!(cg.values.len(), lay.n_vars());
        }
    }
}

#[test]
fn column_generation_respects_fixings() {
    let inst = RkmInstance::new(
        Metric::Line { points: vec![0.0, 10.0, 20.0, 1.0, 19.0] },
        vec![0, 1, 2],
        vec![3, 4],
        vec![vec![0], vec![1]],
        1,
    )
    .unwrap();
    let fixed = [Some(false), Some(true), None];
    let full = solve_lp(&build_rkm_lp_fixed(&inst, &fixed)).unwrap();
    let cg = solve_rkm_lp_fixed(&inst, &fixed).unwrap();
    assert!(approx(full.objective, cg.value));
    assert!(approx(cg.value, 9.0));
    let both_open = [Some(true), Some(true), None];
    assert_eq!(solve_rkm_lp_fixed(&inst, &both_open).unwrap().status, LpStatus::Infeasible);
    assert_eq!(solve_lp(&build_rkm_lp_fixed(&inst, &both_open)).unwrap().status, LpStatus::Infeasible);
}
