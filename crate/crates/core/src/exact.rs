//! Exact oracles: exhaustive enumeration and an LP-based branch and bound.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, combinations};
use crate::error::{Error, Result};
use crate::heuristics::greedy_down;
use crate::instance::{eval_objective, FacilitySolution, RkmInstance};
use crate::lp::{solve_rkm_lp_fixed, LpStatus, RkmLpResult};

pub const BRUTE_FORCE_CAP: u128 = 10_000_000;
pub const DEFAULT_NODE_BUDGET: usize = 100_000;
/// Open nodes are re-sorted best bound first this often.
pub const RESORT_EVERY: usize = 1_000;
const INTEGRAL_TOL: f64 = 1e-6;
const PRUNE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub opt_value: f64,
    pub witness: FacilitySolution,
    pub nodes_explored: usize,
    pub proved_optimal: bool,
    /// `(nodes explored, objective)` whenever the incumbent improved.
    pub incumbent_history: Vec<(usize, f64)>,
}

/// Minimum over all `k`-subsets; the witness is the lexicographically
/// smallest optimal subset.
pub fn brute_force_rkm(inst: &RkmInstance) -> Result<ExactResult> {
    brute_force_rkm_capped(inst, BRUTE_FORCE_CAP)
}

pub fn brute_force_rkm_capped(inst: &RkmInstance, cap: u128) -> Result<ExactResult> {
    let n_f = inst.n_facilities();
    let count = binomial(n_f as u64, inst.k as u64);
    if count > cap {
        return Err(Error::SizeCap {
            what: "facility subsets".into(),
            size: count,
            cap,
        });
    }
    if inst.k == 0 || inst.k > n_f {
        return Err(Error::Parameter(format!("k = {} must lie in [1, {n_f}]", inst.k)));
    }
    let cost = inst.cost_matrix();
    let mut best = (f64::INFINITY, Vec::new());
    let mut history = Vec::new();
    let mut nearest = vec![0.0; inst.n_clients()];
    let mut seen = 0;
    for open in combinations(n_f, inst.k) {
        seen += 1;
        for (c, d) in nearest.iter_mut().enumerate() {
            *d = open.iter().map(|&f| cost.get(c, f)).fold(f64::INFINITY, f64::min);
        }
        let v = inst
            .groups
            .iter()
            .map(|g| g.iter().map(|&c| nearest[c]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        if v < best.0 {
            best = (v, open);
            history.push((seen, v));
        }
    }
    let witness = FacilitySolution::new(best.1);
    Ok(ExactResult {
        opt_value: eval_objective(inst, &witness)?.cost,
        witness,
        nodes_explored: seen,
        proved_optimal: true,
        incumbent_history: history,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BnbConfig {
    pub node_budget: usize,
}

impl Default for BnbConfig {
    fn default() -> Self {
        Self {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

struct Node {
    fixed: Vec<Option<bool>>,
    /// Relaxation value of the parent, a lower bound for this subtree.
    bound: f64,
}

struct Search<'a> {
    inst: &'a RkmInstance,
    best: f64,
    witness: Vec<usize>,
    nodes: usize,
    history: Vec<(usize, f64)>,
}

impl Search<'_> {
    fn offer(&mut self, open: Vec<usize>) -> Result<()> {
        let sol = FacilitySolution::new(open);
        let v = eval_objective(self.inst, &sol)?.cost;
        if v < self.best {
            self.best = v;
            self.witness = sol.open;
            self.history.push((self.nodes, v));
        }
        Ok(())
    }

    fn prunable(&self, bound: f64) -> bool {
        bound >= self.best - PRUNE_TOL * (1.0 + self.best.abs())
    }

    /// Fixed-open sites padded to `k` with the lowest sites not fixed closed.
    fn completion(&self, fixed: &[Option<bool>], mut open: Vec<usize>) -> Vec<usize> {
        for (j, fix) in fixed.iter().enumerate() {
            if open.len() >= self.inst.k {
                break;
            }
            if *fix != Some(false) && !open.contains(&j) {
                open.push(j);
            }
        }
        open
    }
}

/// Branch and bound on the site variables with the relaxation as bound.
///
/// Nodes are explored depth first, the child that agrees with the rounded
/// relaxation value first, and the open list is re-sorted best bound first
/// every [`RESORT_EVERY`] nodes. The branching site is the most fractional
/// one, lowest index on ties. The greedy-down solution seeds the incumbent.
/// A node whose relaxation fails numerically is branched without pruning. On
/// budget exhaustion the incumbent is returned with `proved_optimal = false`.
pub fn branch_and_bound(inst: &RkmInstance, cfg: &BnbConfig) -> Result<ExactResult> {
    let n_f = inst.n_facilities();
    if inst.k == 0 || inst.k > n_f {
        return Err(Error::Parameter(format!("k = {} must lie in [1, {n_f}]", inst.k)));
    }
    let start = greedy_down(inst);
    let mut search = Search {
        inst,
        best: start.objective,
        witness: start.solution.open,
        nodes: 0,
        history: vec![(0, start.objective)],
    };
    let mut stack = vec![Node {
        fixed: vec![None; n_f],
        bound: f64::NEG_INFINITY,
    }];
    while let Some(node) = stack.pop() {
        if search.nodes >= cfg.node_budget {
            stack.push(node);
            break;
        }
        if search.prunable(node.bound) {
            continue;
        }
        search.nodes += 1;
        if search.nodes.is_multiple_of(RESORT_EVERY) {
            // stable, so equal bounds keep their depth-first order
            stack.sort_by(|a, b| b.bound.total_cmp(&a.bound));
        }
        let n_open = node.fixed.iter().filter(|f| **f == Some(true)).count();
        let n_free = node.fixed.iter().filter(|f| f.is_none()).count();
        if n_open > inst.k || n_open + n_free == 0 {
            continue;
        }

        let relaxation = match solve_rkm_lp_fixed(inst, &node.fixed) {
            Ok(r) => Some(r),
            Err(e) => {
                log::warn!("relaxation failed at node {}: {e}; branching without a bound", search.nodes);
                None
            }
        };
        let (bound, branch) = match &relaxation {
            Some(r) if r.status == LpStatus::Infeasible => continue,
            Some(r) if r.status == LpStatus::Optimal => {
                if search.prunable(r.value) {
                    continue;
                }
                (r.value, pick_branch(&node.fixed, r))
            }
            _ => (node.bound, node.fixed.iter().position(|f| f.is_none()).map(|j| (j, true))),
        };
        let Some((j, up_first)) = branch else {
            // integral relaxation or nothing left to fix: the node's best
            // completion is known
            let open: Vec<usize> = match &relaxation {
                Some(r) => (0..n_f).filter(|&j| r.values[j] > 0.5).collect(),
                None => (0..n_f).filter(|&j| node.fixed[j] == Some(true)).collect(),
            };
            let full = search.completion(&node.fixed, open);
            if !full.is_empty() {
                search.offer(full)?;
            }
            continue;
        };
        let child = |v: bool| {
            let mut fixed = node.fixed.clone();
            fixed[j] = Some(v);
            Node { fixed, bound }
        };
        // the preferred child is pushed last so it is popped first
        stack.push(child(!up_first));
        stack.push(child(up_first));
    }
    let witness = FacilitySolution::new(search.witness);
    Ok(ExactResult {
        opt_value: eval_objective(inst, &witness)?.cost,
        witness,
        nodes_explored: search.nodes,
        proved_optimal: stack.is_empty(),
        incumbent_history: search.history,
    })
}

/// Most fractional free site and whether its up branch goes first, or
/// `None` when every free site is integral.
fn pick_branch(fixed: &[Option<bool>], r: &RkmLpResult) -> Option<(usize, bool)> {
    let mut best: Option<(f64, usize)> = None;
    for (j, fix) in fixed.iter().enumerate() {
        if fix.is_some() {
            continue;
        }
        let x = r.values[j];
        let dist = (x - x.round()).abs();
        if dist <= INTEGRAL_TOL {
            continue;
        }
        let closeness = (x - 0.5).abs();
        if best.is_none_or(|(b, _)| closeness < b) {
            best = Some((closeness, j));
        }
    }
    best.map(|(_, j)| (j, r.values[j] >= 0.5))
}
