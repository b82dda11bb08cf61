//! The Robust k-Median relaxation solved by column generation.
//!
//! The full model has a link row `y_ij <= x_j` for every client-site pair, so
//! its basis grows with `clients * sites`. Here only pairs in a working set
//! carry a `y` column and a link row. After each solve the missing pairs are
//! priced with the current duals: a missing link row is slack at `y_ij = 0`
//! and has dual zero, so the reduced cost of `y_ij` is
//! `-(u_i + d(i, j) * sum_g m_gi w_g)` with `u` the assignment duals, `w` the
//! group duals and `m_gi` the multiplicity of client `i` in group `g`. Pairs
//! with negative reduced cost join the working set and the model is re-solved
//! from the previous basis. When the restricted model is infeasible the same
//! pricing runs on the phase-one duals. The final answer is optimal for the
//! full model.

use std::collections::HashMap;

use super::model::{LpModel, LpStatus, Sense};
use super::relax::RkmLpLayout;
use super::simplex::{solve_lp_warm, Basis, BasisStatus};
use crate::error::{Error, Result};
use crate::instance::RkmInstance;

/// Nearest sites per client in the first working set.
pub const INITIAL_NEIGHBOURS: usize = 4;
/// Most negative pairs added per client and round.
pub const ADDED_PER_CLIENT: usize = 4;
const MAX_ROUNDS: usize = 10_000;
const PRICING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RkmLpResult {
    pub status: LpStatus,
    /// Optimal `T`; NaN unless optimal.
    pub value: f64,
    /// Values in the full [`RkmLpLayout`] (absent pairs are zero).
    pub values: Vec<f64>,
    pub pivots: usize,
    pub rounds: usize,
    /// Pair columns in the final working set.
    pub pair_columns: usize,
}

pub fn solve_rkm_lp(inst: &RkmInstance) -> Result<RkmLpResult> {
    solve_rkm_lp_fixed(inst, &vec![None; inst.n_facilities()])
}

/// Column-generation solve with some `x_j` fixed to 0 or 1.
pub fn solve_rkm_lp_fixed(inst: &RkmInstance, fixed: &[Option<bool>]) -> Result<RkmLpResult> {
    let lay = RkmLpLayout::of(inst);
    let (n_f, n_c) = (lay.n_facilities, lay.n_clients);
    if fixed.len() != n_f {
        return Err(Error::Parameter(format!("{} fixings for {n_f} sites", fixed.len())));
    }
    let dist: Vec<Vec<f64>> = (0..n_c).map(|i| (0..n_f).map(|j| inst.distance(i, j)).collect()).collect();
    let mut memberships: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_c];
    for (g, members) in inst.groups.iter().enumerate() {
        for &c in members {
            match memberships[c].last_mut() {
                Some(last) if last.0 == g => last.1 += 1.0,
                _ => memberships[c].push((g, 1.0)),
            }
        }
    }
    let usable: Vec<usize> = (0..n_f).filter(|&j| fixed[j] != Some(false)).collect();

    let mut in_set = vec![vec![false; n_f]; n_c];
    for i in 0..n_c {
        let mut near = usable.clone();
        near.sort_by(|&a, &b| dist[i][a].total_cmp(&dist[i][b]).then(a.cmp(&b)));
        for &j in near.iter().take(INITIAL_NEIGHBOURS) {
            in_set[i][j] = true;
        }
    }

    let mut pair_status: HashMap<(usize, usize), (BasisStatus, BasisStatus)> = HashMap::new();
    let mut basis: Option<Basis> = None;
    let mut pivots = 0;
    for round in 1..=MAX_ROUNDS {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (i, row) in in_set.iter().enumerate() {
            pairs.extend(row.iter().enumerate().filter(|&(_, &on)| on).map(|(j, _)| (i, j)));
        }
        let model = restricted_model(inst, fixed, &pairs, &dist, &memberships);
        let start = basis.as_ref().map(|b| carry_basis(b, &pairs, &pair_status, n_f, n_c, inst.n_groups()));
        let (sol, new_basis) = solve_lp_warm(&model, start.as_ref())?;
        pivots += sol.iterations;
        if sol.status == LpStatus::Unbounded {
            return Err(Error::Numerical("relaxation reported unbounded".into()));
        }

        let n_pairs = pairs.len();
        pair_status.clear();
        for (p, &pair) in pairs.iter().enumerate() {
            pair_status.insert(pair, (new_basis.columns[n_f + p], new_basis.rows[p]));
        }
        let assign_dual = &sol.duals[n_pairs..n_pairs + n_c];
        let group_dual = &sol.duals[n_pairs + n_c..n_pairs + n_c + inst.n_groups()];

        let mut added = 0;
        for i in 0..n_c {
            let weight: f64 = memberships[i].iter().map(|&(g, m)| group_dual[g] * m).sum();
            let mut cands: Vec<(f64, usize)> = usable
                .iter()
                .filter(|&&j| !in_set[i][j])
                .map(|&j| (-assign_dual[i] - weight * dist[i][j], j))
                .filter(|&(d, _)| d < -PRICING_TOL)
                .collect();
            cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(_, j) in cands.iter().take(ADDED_PER_CLIENT) {
                in_set[i][j] = true;
                added += 1;
            }
        }
        basis = Some(new_basis);

        if added == 0 {
            let mut values = vec![0.0; lay.n_vars()];
            values[..n_f].copy_from_slice(&sol.values[..n_f]);
            for (p, &(i, j)) in pairs.iter().enumerate() {
                values[lay.y(i, j)] = sol.values[n_f + p];
            }
            values[lay.t()] = sol.values[n_f + n_pairs];
            let value = if sol.status == LpStatus::Optimal { values[lay.t()] } else { f64::NAN };
            return Ok(RkmLpResult {
                status: sol.status,
                value,
                values,
                pivots,
                rounds: round,
                pair_columns: n_pairs,
            });
        }
    }
    Err(Error::Numerical(format!("column generation did not settle in {MAX_ROUNDS} rounds")))
}

/// Columns: `x`, the pairs in order, `T`. Rows: one link per pair, one
/// assignment per client, one per group, the budget.
fn restricted_model(
    inst: &RkmInstance,
    fixed: &[Option<bool>],
    pairs: &[(usize, usize)],
    dist: &[Vec<f64>],
    memberships: &[Vec<(usize, f64)>],
) -> LpModel {
    let n_f = inst.n_facilities();
    let mut lp = LpModel::new();
    for (j, fix) in fixed.iter().enumerate() {
        let (lo, up) = match fix {
            Some(true) => (1.0, 1.0),
            Some(false) => (0.0, 0.0),
            None => (0.0, 1.0),
        };
        lp.add_var(format!("x_{j}"), lo, up);
    }
    for &(i, j) in pairs {
        lp.add_var(format!("y_{i}_{j}"), 0.0, 1.0);
    }
    let t = lp.add_var("T", 0.0, f64::INFINITY);
    let mut assign: Vec<Vec<(usize, f64)>> = vec![Vec::new(); inst.n_clients()];
    let mut group: Vec<Vec<(usize, f64)>> = vec![Vec::new(); inst.n_groups()];
    for (p, &(i, j)) in pairs.iter().enumerate() {
        let col = n_f + p;
        lp.add_constraint(format!("link_{i}_{j}"), vec![(col, 1.0), (j, -1.0)], Sense::Le, 0.0);
        assign[i].push((col, 1.0));
        if dist[i][j] != 0.0 {
            for &(g, m) in &memberships[i] {
                group[g].push((col, m * dist[i][j]));
            }
        }
    }
    for (i, row) in assign.into_iter().enumerate() {
        lp.add_constraint(format!("assign_{i}"), row, Sense::Ge, 1.0);
    }
    for (g, mut row) in group.into_iter().enumerate() {
        row.push((t, -1.0));
        lp.add_constraint(format!("group_{g}"), row, Sense::Le, 0.0);
    }
    lp.add_constraint("budget", (0..n_f).map(|j| (j, 1.0)).collect(), Sense::Le, inst.k as f64);
    lp.set_objective(vec![(t, 1.0)]);
    lp
}

/// Basis for a grown working set: known pairs keep their statuses, new
/// pairs start nonbasic at zero with a basic link slack.
fn carry_basis(
    old: &Basis,
    pairs: &[(usize, usize)],
    pair_status: &HashMap<(usize, usize), (BasisStatus, BasisStatus)>,
    n_f: usize,
    n_c: usize,
    n_g: usize,
) -> Basis {
    let old_pairs = old.columns.len() - n_f - 1;
    let mut columns: Vec<BasisStatus> = old.columns[..n_f].to_vec();
    let mut rows = Vec::with_capacity(pairs.len() + n_c + n_g + 1);
    for pair in pairs {
        let (c, r) = pair_status
            .get(pair)
            .copied()
            .unwrap_or((BasisStatus::AtLower, BasisStatus::Basic));
        columns.push(c);
        rows.push(r);
    }
    columns.push(old.columns[n_f + old_pairs]);
    rows.extend_from_slice(&old.rows[old_pairs..]);
    Basis { columns, rows }
}
