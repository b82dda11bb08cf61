//! Benchmark sweeps over generated instances.
//!
//! Seeds fan out from the master seed with [`derive_seed`]: cell `c` (family
//! and size, in config order) gets `derive_seed(master, c)`, its instance `i`
//! gets `derive_seed(cell_seed, i)`, and a solver run on that instance gets
//! `derive_seed(instance_seed, 1 + tag)` where `tag` is the solver's fixed
//! position in [`BenchSolver::ALL`]. Adding or removing solvers therefore
//! never changes another solver's seed.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::records::{ratio_of, summarize, RunRecord, SummaryRow};
use crate::error::{Error, Result};
use crate::exact::{branch_and_bound, brute_force_rkm, BnbConfig};
use crate::generators::{generate, Family, GenSpec};
use crate::heuristics::{run_solver, HeuristicConfig, Solver};
use crate::instance::RkmInstance;
use crate::lp::rkm_lp_value;
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchSolver {
    GreedyUp,
    GreedyDown,
    LocalSearch,
    RandomizedLocalSearch,
    BruteForce,
    BranchAndBound,
}

impl BenchSolver {
    pub const ALL: [BenchSolver; 6] = [
        BenchSolver::GreedyUp,
        BenchSolver::GreedyDown,
        BenchSolver::LocalSearch,
        BenchSolver::RandomizedLocalSearch,
        BenchSolver::BruteForce,
        BenchSolver::BranchAndBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchSolver::BruteForce => "brute_force",
            BenchSolver::BranchAndBound => "branch_and_bound",
            h => h.heuristic().expect("heuristic variant").name(),
        }
    }

    pub fn heuristic(self) -> Option<Solver> {
        match self {
            BenchSolver::GreedyUp => Some(Solver::GreedyUp),
            BenchSolver::GreedyDown => Some(Solver::GreedyDown),
            BenchSolver::LocalSearch => Some(Solver::LocalSearch),
            BenchSolver::RandomizedLocalSearch => Some(Solver::RandomizedLocalSearch),
            _ => None,
        }
    }

    fn tag(self) -> u64 {
        Self::ALL.iter().position(|&s| s == self).expect("listed") as u64
    }
}

impl fmt::Display for BenchSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|v| v.name()).collect();
            Error::Parameter(format!("unknown solver {s:?} ({})", names.join(", ")))
        })
    }
}

/// One size of the grid. `clients_per_group` is the mean for `gauss_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeCell {
    pub n_facilities: usize,
    pub n_groups: usize,
    pub clients_per_group: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub families: Vec<Family>,
    pub sizes: Vec<SizeCell>,
    pub solvers: Vec<BenchSolver>,
    pub instances_per_cell: usize,
    pub master_seed: u64,
    /// Settings for local search; the seed field is replaced per run.
    pub local_search: HeuristicConfig,
    /// Settings for randomized local search; the seed field is replaced per run.
    pub randomized: HeuristicConfig,
    pub node_budget: usize,
    /// Off by default so that output is reproducible byte for byte.
    pub record_wall_time: bool,
}

impl BenchConfig {
    pub fn new(families: Vec<Family>, sizes: Vec<SizeCell>, solvers: Vec<BenchSolver>, instances_per_cell: usize, master_seed: u64) -> Self {
        Self {
            families,
            sizes,
            solvers,
            instances_per_cell,
            master_seed,
            local_search: HeuristicConfig::default(),
            randomized: HeuristicConfig::randomized(),
            node_budget: BnbConfig::default().node_budget,
            record_wall_time: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() || self.sizes.is_empty() || self.solvers.is_empty() {
            return Err(Error::Parameter("families, sizes and solvers must all be non-empty".into()));
        }
        if self.instances_per_cell == 0 {
            return Err(Error::Parameter("instances_per_cell must be positive".into()));
        }
        self.local_search.validate()?;
        self.randomized.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchOutput {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
}

struct Job {
    family: Family,
    size: SizeCell,
    index: usize,
    seed: u64,
}

/// Generates every instance of the grid, solves its relaxation and runs the
/// configured solvers. A failed relaxation leaves `lp_value` empty and the
/// sweep continues. Instances are processed in parallel; records come out in
/// grid order regardless.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchOutput> {
    cfg.validate()?;
    let mut jobs = Vec::new();
    let mut cell = 0u64;
    for &family in &cfg.families {
        for &size in &cfg.sizes {
            let cell_seed = derive_seed(cfg.master_seed, cell);
            for index in 0..cfg.instances_per_cell {
                jobs.push(Job {
                    family,
                    size,
                    index,
                    seed: derive_seed(cell_seed, index as u64),
                });
            }
            cell += 1;
        }
    }
    let per_job: Vec<Result<Vec<RunRecord>>> = jobs.par_iter().map(|job| run_job(cfg, job)).collect();
    let mut records = Vec::new();
    for r in per_job {
        records.extend(r?);
    }
    let summary = summarize(&records);
    Ok(BenchOutput { records, summary })
}

fn run_job(cfg: &BenchConfig, job: &Job) -> Result<Vec<RunRecord>> {
    let s = job.size;
    let spec = GenSpec::new(job.family, s.n_facilities, s.n_groups, s.clients_per_group, job.seed).with_k(s.k);
    let inst = generate(&spec)?.instance;
    let id = format!(
        "{}_f{}_g{}_c{}_k{}_{}",
        job.family, s.n_facilities, s.n_groups, s.clients_per_group, s.k, job.index
    );
    let lp_value = match rkm_lp_value(&inst) {
        Ok(v) => Some(v),
        Err(e) => {
            log::warn!("{id}: relaxation failed: {e}");
            None
        }
    };
    let mut out = Vec::with_capacity(cfg.solvers.len());
    for &solver in &cfg.solvers {
        let seed = derive_seed(job.seed, 1 + solver.tag());
        let start = Instant::now();
        let (objective, iterations) = solve_one(cfg, &inst, solver, seed)?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        out.push(RunRecord {
            instance_id: id.clone(),
            family: job.family.to_string(),
            n_facilities: inst.n_facilities(),
            n_clients: inst.n_clients(),
            n_groups: inst.n_groups(),
            k: inst.k,
            solver: solver.to_string(),
            seed,
            objective,
            lp_value,
            ratio: ratio_of(objective, lp_value),
            wall_time_ms: cfg.record_wall_time.then_some(elapsed),
            iterations,
        });
    }
    Ok(out)
}

/// Objective and iteration count of one solver on one instance.
pub fn solve_one(cfg: &BenchConfig, inst: &RkmInstance, solver: BenchSolver, seed: u64) -> Result<(f64, usize)> {
    match solver {
        BenchSolver::BruteForce => {
            let r = brute_force_rkm(inst)?;
            Ok((r.opt_value, r.nodes_explored))
        }
        BenchSolver::BranchAndBound => {
            let r = branch_and_bound(inst, &BnbConfig { node_budget: cfg.node_budget })?;
            Ok((r.opt_value, r.nodes_explored))
        }
        h => {
            let h = h.heuristic().expect("heuristic variant");
            let base = if h == Solver::RandomizedLocalSearch { &cfg.randomized } else { &cfg.local_search };
            let run = run_solver(inst, h, &base.clone().with_seed(seed))?;
            Ok((run.objective, run.iterations))
        }
    }
}
