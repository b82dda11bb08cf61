//! LP relaxations of Robust k-Median and MCSP.

use super::colgen::solve_rkm_lp;
use super::model::{LpModel, LpSolution, LpStatus, Sense};
use crate::error::{Error, Result};
use crate::instance::RkmInstance;
use crate::mcsp::McspInstance;

/// Column layout of [`build_rkm_lp`]: `x_j` first, then `y_ij` row-major by
/// client, then `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RkmLpLayout {
    pub n_facilities: usize,
    pub n_clients: usize,
}

impl RkmLpLayout {
    pub fn of(inst: &RkmInstance) -> Self {
        Self {
            n_facilities: inst.n_facilities(),
            n_clients: inst.n_clients(),
        }
    }

    pub fn x(&self, site: usize) -> usize {
        site
    }

    pub fn y(&self, client: usize, site: usize) -> usize {
        self.n_facilities + client * self.n_facilities + site
    }

    pub fn t(&self) -> usize {
        self.n_facilities * (1 + self.n_clients)
    }

    pub fn n_vars(&self) -> usize {
        self.t() + 1
    }
}

/// Relaxation of the instance:
///
/// ```text
/// min T  s.t.  y_ij - x_j <= 0                       for every client i, site j
///              sum_j y_ij >= 1                       for every client i
///              sum_{i in g} d(i, j) y_ij - T <= 0     for every group g
///              sum_j x_j <= k
///              0 <= x, y <= 1,  T >= 0
/// ```
///
/// Rows appear in that order. A client listed twice in a group gets twice the
/// coefficient.
pub fn build_rkm_lp(inst: &RkmInstance) -> LpModel {
    build_rkm_lp_fixed(inst, &vec![None; inst.n_facilities()])
}

/// As [`build_rkm_lp`] with some `x_j` fixed to 0 or 1.
pub fn build_rkm_lp_fixed(inst: &RkmInstance, fixed: &[Option<bool>]) -> LpModel {
    let lay = RkmLpLayout::of(inst);
    let (n_f, n_c) = (lay.n_facilities, lay.n_clients);
    let mut lp = LpModel::new();
    for (j, fix) in fixed.iter().enumerate().take(n_f) {
        let (lo, up) = match fix {
            Some(true) => (1.0, 1.0),
            Some(false) => (0.0, 0.0),
            None => (0.0, 1.0),
        };
        lp.add_var(format!("x_{j}"), lo, up);
    }
    for i in 0..n_c {
        for j in 0..n_f {
            lp.add_var(format!("y_{i}_{j}"), 0.0, 1.0);
        }
    }
    let t = lp.add_var("T", 0.0, f64::INFINITY);
    for i in 0..n_c {
        for j in 0..n_f {
            lp.add_constraint(
                format!("link_{i}_{j}"),
                vec![(lay.y(i, j), 1.0), (lay.x(j), -1.0)],
                Sense::Le,
                0.0,
            );
        }
    }
    for i in 0..n_c {
        lp.add_constraint(
            format!("assign_{i}"),
            (0..n_f).map(|j| (lay.y(i, j), 1.0)).collect(),
            Sense::Ge,
            1.0,
        );
    }
    let mut weight = vec![0.0; n_c];
    for (g, members) in inst.groups.iter().enumerate() {
        weight.iter_mut().for_each(|w| *w = 0.0);
        for &c in members {
            weight[c] += 1.0;
        }
        let mut coeffs = Vec::new();
        for (i, &wi) in weight.iter().enumerate() {
            if wi == 0.0 {
                continue;
            }
            for j in 0..n_f {
                let d = inst.distance(i, j);
                if d != 0.0 {
                    coeffs.push((lay.y(i, j), wi * d));
                }
            }
        }
        coeffs.push((t, -1.0));
        lp.add_constraint(format!("group_{g}"), coeffs, Sense::Le, 0.0);
    }
    lp.add_constraint(
        "budget",
        (0..n_f).map(|j| (lay.x(j), 1.0)).collect(),
        Sense::Le,
        inst.k as f64,
    );
    lp.set_objective(vec![(t, 1.0)]);
    lp
}

/// Optimal value of the relaxation (solved by column generation).
pub fn rkm_lp_value(inst: &RkmInstance) -> Result<f64> {
    let res = solve_rkm_lp(inst)?;
    if res.status != LpStatus::Optimal {
        return Err(Error::Numerical(format!(
            "relaxation reported {:?}, expected an optimum",
            res.status
        )));
    }
    Ok(res.value)
}

/// Reassigns every client's unit of demand greedily to its nearest sites,
/// filling each site up to `x_j`. No group cost grows, so `T` stays feasible,
/// and afterwards `y_ij > 0` only where `x_j > 0`.
pub fn canonicalize_assignment(inst: &RkmInstance, values: &[f64]) -> Vec<f64> {
    let lay = RkmLpLayout::of(inst);
    let mut out = values.to_vec();
    let mut order: Vec<usize> = (0..lay.n_facilities).collect();
    for i in 0..lay.n_clients {
        order.sort_by(|&a, &b| inst.distance(i, a).total_cmp(&inst.distance(i, b)).then(a.cmp(&b)));
        let mut need = 1.0f64;
        for &j in &order {
            let take = need.min(values[lay.x(j)].max(0.0));
            out[lay.y(i, j)] = take;
            need -= take;
        }
        if need > 0.0 {
            // sum_j x_j < 1 can only happen through round-off; keep the
            // client whole on its nearest site
            out[lay.y(i, order[0])] += need;
        }
    }
    out
}

/// Largest group cost `sum_{i in g} sum_j d(i, j) y_ij` under LP values.
pub fn fractional_group_costs(inst: &RkmInstance, values: &[f64]) -> Vec<f64> {
    let lay = RkmLpLayout::of(inst);
    inst.groups
        .iter()
        .map(|g| {
            g.iter()
                .map(|&i| {
                    (0..lay.n_facilities)
                        .map(|j| inst.distance(i, j) * values[lay.y(i, j)])
                        .sum::<f64>()
                })
                .sum()
        })
        .collect()
}

/// MCSP relaxation: `min z` subject to `sum_{X ni e} y(X) <= z` per element,
/// `sum_X y(X) = t`, `0 <= y <= 1`, `z >= 0`. Set variables come first.
pub fn build_mcsp_lp(inst: &McspInstance) -> LpModel {
    let n = inst.n_sets();
    let mut lp = LpModel::new();
    for s in 0..n {
        lp.add_var(format!("y_{s}"), 0.0, 1.0);
    }
    let z = lp.add_var("z", 0.0, f64::INFINITY);
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); inst.m];
    for (s, set) in inst.sets.iter().enumerate() {
        for &e in set {
            rows[e].push((s, 1.0));
        }
    }
    for (e, mut row) in rows.into_iter().enumerate() {
        row.push((z, -1.0));
        lp.add_constraint(format!("elem_{e}"), row, Sense::Le, 0.0);
    }
    lp.add_constraint("card", (0..n).map(|s| (s, 1.0)).collect(), Sense::Eq, inst.t as f64);
    lp.set_objective(vec![(z, 1.0)]);
    lp
}

/// Set values `y(X)` of an MCSP relaxation solution.
pub fn mcsp_set_values<'a>(inst: &McspInstance, sol: &'a LpSolution) -> &'a [f64] {
    &sol.values[..inst.n_sets()]
}
