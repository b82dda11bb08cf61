//! Greedy and local-search heuristics.
//!
//! All four solvers share one evaluation scheme: a client's cost is the
//! distance to its nearest open site and a group's cost is the sum over its
//! members in listed order, so every value they report is bit-identical to
//! [`eval_objective`] on the same site set.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::combinatorics::combinations;
use crate::error::{Error, Result};
use crate::instance::{eval_objective, CostMatrix, FacilitySolution, RkmInstance, IMPROVEMENT_TOL};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicConfig {
    /// Largest swap size of the local searches.
    pub ell: usize,
    /// Neighbours drawn per round by the randomized search.
    pub samples: usize,
    /// Consecutive non-improving rounds before the randomized search stops.
    pub stall_rounds: usize,
    pub seed: u64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self {
            ell: 2,
            samples: 200,
            stall_rounds: 10,
            seed: 0,
        }
    }
}

impl HeuristicConfig {
    /// Settings for the randomized search: swaps up to size 3, 200 samples.
    pub fn randomized() -> Self {
        Self {
            ell: 3,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.ell == 0 || self.samples == 0 || self.stall_rounds == 0 {
            return Err(Error::Parameter(
                "ell, samples and stall_rounds must all be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    GreedyUp,
    GreedyDown,
    LocalSearch,
    RandomizedLocalSearch,
}

impl Solver {
    pub const ALL: [Solver; 4] = [
        Solver::GreedyUp,
        Solver::GreedyDown,
        Solver::LocalSearch,
        Solver::RandomizedLocalSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Solver::GreedyUp => "greedy_up",
            Solver::GreedyDown => "greedy_down",
            Solver::LocalSearch => "local_search",
            Solver::RandomizedLocalSearch => "randomized_local_search",
        }
    }

    /// Whether the output depends on the seed.
    pub fn is_randomized(self) -> bool {
        matches!(self, Solver::LocalSearch | Solver::RandomizedLocalSearch)
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Solver::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| {
            Error::Parameter(format!(
                "unknown solver {s:?} (greedy_up, greedy_down, local_search, randomized_local_search)"
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicOutcome {
    pub solution: FacilitySolution,
    /// Recomputed with [`eval_objective`].
    pub objective: f64,
    /// Objective after every step, starting point included where one exists.
    pub trace: Vec<f64>,
    pub iterations: usize,
}

/// Uniform result record of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRun {
    pub solver: Solver,
    pub seed: u64,
    pub objective: f64,
    pub open_sites: Vec<usize>,
    pub iterations: usize,
    pub wall_time_ms: f64,
    pub trace: Vec<f64>,
}

pub fn run_solver(inst: &RkmInstance, solver: Solver, cfg: &HeuristicConfig) -> Result<SolverRun> {
    let start = Instant::now();
    let out = match solver {
        Solver::GreedyUp => greedy_up(inst),
        Solver::GreedyDown => greedy_down(inst),
        Solver::LocalSearch => local_search(inst, cfg)?,
        Solver::RandomizedLocalSearch => randomized_local_search(inst, cfg)?,
    };
    Ok(SolverRun {
        solver,
        seed: cfg.seed,
        objective: out.objective,
        open_sites: out.solution.open,
        iterations: out.iterations,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        trace: out.trace,
    })
}

fn finish(inst: &RkmInstance, open: Vec<usize>, trace: Vec<f64>, iterations: usize) -> HeuristicOutcome {
    let solution = FacilitySolution::new(open);
    let objective = eval_objective(inst, &solution)
        .expect("heuristics keep at least one valid site open")
        .cost;
    HeuristicOutcome {
        solution,
        objective,
        trace,
        iterations,
    }
}

/// Max over groups of the summed per-client costs, in listed order.
fn objective_of(groups: &[Vec<usize>], client_cost: impl Fn(usize) -> f64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for g in groups {
        let s: f64 = g.iter().map(|&c| client_cost(c)).sum();
        worst = worst.max(s);
    }
    worst
}

/// Like [`objective_of`] but gives up (returning `None`) as soon as some
/// group reaches `cutoff`.
fn objective_below(groups: &[Vec<usize>], cutoff: f64, client_cost: impl Fn(usize) -> f64) -> Option<f64> {
    let mut worst = f64::NEG_INFINITY;
    for g in groups {
        let s: f64 = g.iter().map(|&c| client_cost(c)).sum();
        if s >= cutoff {
            return None;
        }
        worst = worst.max(s);
    }
    Some(worst)
}

/// Opens `k` sites one at a time, each time the one giving the smallest
/// objective. The empty set counts as `+inf`, so the first step picks the
/// best single site.
pub fn greedy_up(inst: &RkmInstance) -> HeuristicOutcome {
    let cost = inst.cost_matrix();
    let n_f = inst.n_facilities();
    let mut nearest = vec![f64::INFINITY; inst.n_clients()];
    let mut is_open = vec![false; n_f];
    let mut open = Vec::with_capacity(inst.k);
    let mut trace = Vec::with_capacity(inst.k);
    for _ in 0..inst.k {
        let mut best: Option<(f64, usize)> = None;
        for f in (0..n_f).filter(|&f| !is_open[f]) {
            let v = objective_of(&inst.groups, |c| nearest[c].min(cost.get(c, f)));
            if best.is_none_or(|(b, _)| v < b) {
                best = Some((v, f));
            }
        }
        let (v, f) = best.expect("k <= n_f leaves a closed site");
        is_open[f] = true;
        open.push(f);
        for (c, d) in nearest.iter_mut().enumerate() {
            *d = d.min(cost.get(c, f));
        }
        trace.push(v);
    }
    finish(inst, open, trace, inst.k)
}

/// Nearest and second-nearest open site of every client.
struct TwoNearest {
    first: Vec<(f64, usize)>,
    second: Vec<(f64, usize)>,
}

const NONE: (f64, usize) = (f64::INFINITY, usize::MAX);

impl TwoNearest {
    fn new(cost: &CostMatrix, n_clients: usize, is_open: &[bool]) -> Self {
        let mut me = Self {
            first: vec![NONE; n_clients],
            second: vec![NONE; n_clients],
        };
        for c in 0..n_clients {
            me.refresh(cost, c, is_open);
        }
        me
    }

    fn refresh(&mut self, cost: &CostMatrix, c: usize, is_open: &[bool]) {
        let (mut a, mut b) = (NONE, NONE);
        for (f, &d) in cost.row(c).iter().enumerate() {
            if !is_open[f] {
                continue;
            }
            if d < a.0 {
                b = a;
                a = (d, f);
            } else if d < b.0 {
                b = (d, f);
            }
        }
        self.first[c] = a;
        self.second[c] = b;
    }

    /// Cost of client `c` once `closed` is shut.
    fn cost_without(&self, c: usize, closed: usize) -> f64 {
        if self.first[c].1 == closed {
            self.second[c].0
        } else {
            self.first[c].0
        }
    }
}

/// Starts with every site open and closes `n_f - k` of them, each time the
/// one whose closure gives the smallest objective.
pub fn greedy_down(inst: &RkmInstance) -> HeuristicOutcome {
    let cost = inst.cost_matrix();
    let n_f = inst.n_facilities();
    let n_c = inst.n_clients();
    let mut is_open = vec![true; n_f];
    let mut near = TwoNearest::new(&cost, n_c, &is_open);
    let mut trace = vec![objective_of(&inst.groups, |c| near.first[c].0)];
    for _ in 0..n_f - inst.k {
        let mut best: Option<(f64, usize)> = None;
        for f in (0..n_f).filter(|&f| is_open[f]) {
            let v = objective_of(&inst.groups, |c| near.cost_without(c, f));
            if best.is_none_or(|(b, _)| v < b) {
                best = Some((v, f));
            }
        }
        let (v, f) = best.expect("more than k sites open");
        is_open[f] = false;
        for c in 0..n_c {
            if near.first[c].1 == f || near.second[c].1 == f {
                near.refresh(&cost, c, &is_open);
            }
        }
        trace.push(v);
    }
    let open: Vec<usize> = (0..n_f).filter(|&f| is_open[f]).collect();
    finish(inst, open, trace, n_f - inst.k)
}

/// Current open set of a search plus, per client, its `depth` nearest open
/// sites. Closing at most `depth - 1` sites always leaves a cached survivor.
struct SwapState<'a> {
    inst: &'a RkmInstance,
    cost: CostMatrix,
    open: Vec<usize>,
    depth: usize,
    ranked: Vec<Vec<(f64, usize)>>,
}

impl<'a> SwapState<'a> {
    fn new(inst: &'a RkmInstance, open: Vec<usize>, max_swap: usize) -> Self {
        let mut me = Self {
            inst,
            cost: inst.cost_matrix(),
            open,
            depth: max_swap + 1,
            ranked: Vec::new(),
        };
        me.rebuild();
        me
    }

    fn rebuild(&mut self) {
        self.open.sort_unstable();
        let cost = &self.cost;
        let open = &self.open;
        let depth = self.depth;
        self.ranked = (0..self.inst.n_clients())
            .map(|c| {
                let mut r: Vec<(f64, usize)> = open.iter().map(|&f| (cost.get(c, f), f)).collect();
                r.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                r.truncate(depth);
                r
            })
            .collect();
    }

    fn closed(&self) -> Vec<usize> {
        let mut is_open = vec![false; self.inst.n_facilities()];
        for &f in &self.open {
            is_open[f] = true;
        }
        (0..self.inst.n_facilities()).filter(|&f| !is_open[f]).collect()
    }

    fn value(&self) -> f64 {
        objective_of(&self.inst.groups, |c| self.ranked[c][0].0)
    }

    fn client_cost(&self, c: usize, close: &[usize], add: &[usize]) -> f64 {
        let kept = self.ranked[c]
            .iter()
            .find(|(_, f)| !close.contains(f))
            .map_or(f64::INFINITY, |r| r.0);
        add.iter().map(|&f| self.cost.get(c, f)).fold(kept, f64::min)
    }

    /// Objective after the swap if it is below `cutoff`.
    fn swap_value(&self, close: &[usize], add: &[usize], cutoff: f64) -> Option<f64> {
        objective_below(&self.inst.groups, cutoff, |c| self.client_cost(c, close, add))
    }

    fn apply(&mut self, close: &[usize], add: &[usize]) {
        self.open.retain(|f| !close.contains(f));
        self.open.extend_from_slice(add);
        self.rebuild();
    }
}

fn check_search(inst: &RkmInstance, cfg: &HeuristicConfig) -> Result<()> {
    cfg.validate()?;
    if inst.k == 0 || inst.k > inst.n_facilities() {
        return Err(Error::Parameter(format!(
            "k = {} must lie in [1, n_facilities = {}]",
            inst.k,
            inst.n_facilities()
        )));
    }
    Ok(())
}

/// Steepest descent over swaps of size `1..=cfg.ell` from `k` sites drawn
/// uniformly with `cfg.seed`. Each iteration takes the best swap if it
/// improves by more than the tolerance; ties go to the first swap in
/// `(size, closed sites, opened sites)` lexicographic order.
pub fn local_search(inst: &RkmInstance, cfg: &HeuristicConfig) -> Result<HeuristicOutcome> {
    check_search(inst, cfg)?;
    let mut rng = SeededRng::new(cfg.seed);
    let start = rng.sample_indices(inst.n_facilities(), inst.k);
    let mut state = SwapState::new(inst, start, cfg.ell);
    let mut current = state.value();
    let mut trace = vec![current];
    let mut iterations = 0;
    loop {
        let closed = state.closed();
        let max_size = cfg.ell.min(state.open.len()).min(closed.len());
        let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
        for size in 1..=max_size {
            for ci in combinations(state.open.len(), size) {
                let close: Vec<usize> = ci.iter().map(|&i| state.open[i]).collect();
                for ai in combinations(closed.len(), size) {
                    let add: Vec<usize> = ai.iter().map(|&i| closed[i]).collect();
                    let cutoff = best.as_ref().map_or(current - IMPROVEMENT_TOL, |b| b.0);
                    if let Some(v) = state.swap_value(&close, &add, cutoff) {
                        best = Some((v, close.clone(), add));
                    }
                }
            }
        }
        let Some((v, close, add)) = best else { break };
        state.apply(&close, &add);
        current = v;
        trace.push(v);
        iterations += 1;
    }
    Ok(finish(inst, state.open, trace, iterations))
}

/// Local search over sampled neighbourhoods. Each round draws `cfg.samples`
/// swaps (size uniform in `1..=min(ell, k, n_f - k)`, then a uniform swap of
/// that size) and moves to the best strict improvement among them. Stops
/// after `cfg.stall_rounds` rounds in a row without one.
pub fn randomized_local_search(inst: &RkmInstance, cfg: &HeuristicConfig) -> Result<HeuristicOutcome> {
    check_search(inst, cfg)?;
    let mut rng = SeededRng::new(cfg.seed);
    let start = rng.sample_indices(inst.n_facilities(), inst.k);
    let max_size = cfg.ell.min(inst.k).min(inst.n_facilities() - inst.k);
    let mut state = SwapState::new(inst, start, max_size);
    let mut current = state.value();
    let mut trace = vec![current];
    let mut rounds = 0;
    let mut stall = 0;
    while max_size > 0 && stall < cfg.stall_rounds {
        rounds += 1;
        let closed = state.closed();
        let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
        for _ in 0..cfg.samples {
            let size = 1 + rng.below(max_size);
            let mut close = rng.sample_from(&state.open, size);
            let mut add = rng.sample_from(&closed, size);
            close.sort_unstable();
            add.sort_unstable();
            let cutoff = best.as_ref().map_or(current - IMPROVEMENT_TOL, |b| b.0);
            if let Some(v) = state.swap_value(&close, &add, cutoff) {
                best = Some((v, close, add));
            }
        }
        match best {
            Some((v, close, add)) => {
                state.apply(&close, &add);
                current = v;
                trace.push(v);
                stall = 0;
            }
            None => stall += 1,
        }
    }
    Ok(finish(inst, state.open, trace, rounds))
}

/// Full neighbourhood scan with the plain evaluator: true when no swap of
/// size `1..=ell` improves `sol` by more than the tolerance.
pub fn is_local_optimum(inst: &RkmInstance, sol: &FacilitySolution, ell: usize) -> Result<bool> {
    let current = eval_objective(inst, sol)?.cost;
    let closed: Vec<usize> = (0..inst.n_facilities()).filter(|f| !sol.open.contains(f)).collect();
    for size in 1..=ell.min(sol.open.len()).min(closed.len()) {
        for ci in combinations(sol.open.len(), size) {
            for ai in combinations(closed.len(), size) {
                let mut open: Vec<usize> = sol
                    .open
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !ci.contains(i))
                    .map(|(_, &f)| f)
                    .collect();
                open.extend(ai.iter().map(|&i| closed[i]));
                let v = eval_objective(inst, &FacilitySolution::new(open))?.cost;
                if v < current - IMPROVEMENT_TOL {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
