use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rkm_core::bench::{
    from_json, parse_instance, read_records_csv, records_to_csv, run_benchmark, solve_one, to_json,
    wilcoxon_signed_rank_with, BenchConfig, BenchSolver, RunRecord, SizeCell, WilcoxonMethod,
};
use rkm_core::exact::{branch_and_bound, brute_force_rkm, BnbConfig, ExactResult};
use rkm_core::generators::{generate, Family, GenSpec};
use rkm_core::heuristics::HeuristicConfig;
use rkm_core::lp::{build_rkm_lp, solve_rkm_lp, to_lp_format, LpStatus};
use rkm_core::rng::derive_seed;
use rkm_core::{Error, RkmInstance};

mod gadget;

#[derive(Parser)]
#[command(name = "rkm", version, about = "Robust k-Median toolkit: generators, solvers, bounds and hardness gadgets")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output path; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for sweeps (0 picks one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random planar instances.
    Generate(GenerateArgs),
    /// Run heuristics on an instance.
    Solve(SolveArgs),
    /// Solve the LP relaxation of an instance.
    Lp(LpArgs),
    /// Solve an instance exactly.
    Exact(ExactArgs),
    /// Run a benchmark sweep.
    Bench(BenchArgs),
    /// Build hardness gadgets with certificates.
    Gadget(gadget::GadgetArgs),
    /// Check a certificate written by `gadget`.
    Verify(VerifyArgs),
    /// Wilcoxon signed-rank comparison of two CSV columns.
    Stats(StatsArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value = "uniform")]
    family: Family,
    #[arg(long, default_value_t = 30)]
    facilities: usize,
    #[arg(long, default_value_t = 10)]
    groups: usize,
    /// Group size, or the mean group size for gauss_exp.
    #[arg(long, default_value_t = 10)]
    clients_per_group: usize,
    #[arg(long, default_value_t = 7)]
    k: usize,
    /// Number of instances; more than one writes `instance_<i>.json` into the `--out` directory.
    #[arg(long, default_value_t = 1)]
    count: usize,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Comma-separated solvers.
    #[arg(long, value_delimiter = ',', default_value = "greedy_up,greedy_down,local_search,randomized_local_search")]
    solvers: Vec<String>,
    /// Swap size of local search.
    #[arg(long, default_value_t = 2)]
    ell: usize,
    /// Swap size of randomized local search.
    #[arg(long, default_value_t = 3)]
    randomized_ell: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 10)]
    stall_rounds: usize,
    /// Skip the relaxation (no lp_value or ratio).
    #[arg(long)]
    no_lp: bool,
    #[arg(long)]
    wall_time: bool,
}

#[derive(Args)]
struct LpArgs {
    instance: PathBuf,
    /// Also write the model in CPLEX LP format.
    #[arg(long)]
    export: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExactMethod {
    BruteForce,
    BranchAndBound,
}

#[derive(Args)]
struct ExactArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = ExactMethod::BranchAndBound)]
    method: ExactMethod,
    #[arg(long, default_value_t = 100_000)]
    node_budget: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "uniform")]
    families: Vec<Family>,
    #[arg(long, value_delimiter = ',', default_value = "30")]
    facilities: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "10")]
    groups: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "10")]
    clients_per_group: Vec<usize>,
    #[arg(long, default_value_t = 7)]
    k: usize,
    #[arg(long, default_value_t = 10)]
    instances: usize,
    /// Comma-separated solvers (greedy_up, greedy_down, local_search,
    /// randomized_local_search, brute_force, branch_and_bound).
    #[arg(long, value_delimiter = ',', default_value = "greedy_up,greedy_down,local_search,randomized_local_search")]
    solvers: Vec<String>,
    /// Record wall-clock times (makes the output non-reproducible).
    #[arg(long)]
    wall_time: bool,
    /// Write the summary as JSON here.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    certificate: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatsMethod {
    Auto,
    Exact,
    Normal,
}

#[derive(Args)]
struct StatsArgs {
    /// Run-record CSV or any CSV with a header row.
    input: PathBuf,
    /// Compare two columns row by row.
    #[arg(long, requires = "col_b", conflicts_with = "solver_a")]
    col_a: Option<String>,
    #[arg(long, requires = "col_a")]
    col_b: Option<String>,
    /// Compare two solvers of a run-record CSV, paired by instance.
    #[arg(long, requires = "solver_b")]
    solver_a: Option<String>,
    #[arg(long, requires = "solver_a")]
    solver_b: Option<String>,
    /// Record column used with --solver-a/--solver-b.
    #[arg(long, default_value = "objective", value_parser = ["objective", "ratio"])]
    column: String,
    #[arg(long, value_enum, default_value_t = StatsMethod::Auto)]
    method: StatsMethod,
}

/// Error with the exit code it maps to.
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parameter(_) => 1,
            e if e.is_numerical() => 3,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::data(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

pub struct Ctx {
    seed: u64,
    out: Option<PathBuf>,
    format: Format,
}

impl Ctx {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Writes `text` to `--out` or standard output.
    pub fn emit(&self, text: &str) -> CliResult<()> {
        match &self.out {
            Some(p) => fs::write(p, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    pub fn emit_json<T: Serialize>(&self, value: &T) -> CliResult<()> {
        self.emit(&to_json(value)?)
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let ctx = Ctx {
        seed: cli.seed,
        out: cli.out,
        format: cli.format,
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(&ctx, a),
        Command::Solve(a) => cmd_solve(&ctx, a),
        Command::Lp(a) => cmd_lp(&ctx, a),
        Command::Exact(a) => cmd_exact(&ctx, a),
        Command::Bench(a) => cmd_bench(&ctx, a),
        Command::Gadget(a) => gadget::run(&ctx, a),
        Command::Verify(a) => gadget::verify(&ctx, &a.certificate),
        Command::Stats(a) => cmd_stats(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[derive(Serialize)]
struct InstanceFile<'a> {
    #[serde(flatten)]
    instance: &'a RkmInstance,
    metadata: &'a rkm_core::generators::GenMetadata,
}

fn cmd_generate(ctx: &Ctx, a: GenerateArgs) -> CliResult<()> {
    if a.count == 0 {
        return Err(Failure::usage("--count must be positive"));
    }
    let spec_for = |seed| GenSpec::new(a.family, a.facilities, a.groups, a.clients_per_group, seed).with_k(a.k);
    if a.count == 1 {
        let g = generate(&spec_for(ctx.seed))?;
        return ctx.emit_json(&InstanceFile { instance: &g.instance, metadata: &g.metadata });
    }
    let dir = ctx
        .out
        .as_ref()
        .ok_or_else(|| Failure::usage("--out DIR is required with --count > 1"))?;
    fs::create_dir_all(dir)?;
    for i in 0..a.count {
        let g = generate(&spec_for(derive_seed(ctx.seed, i as u64)))?;
        let text = to_json(&InstanceFile { instance: &g.instance, metadata: &g.metadata })?;
        fs::write(dir.join(format!("instance_{i}.json")), text)?;
    }
    Ok(())
}

fn parse_solvers(names: &[String]) -> CliResult<Vec<BenchSolver>> {
    let solvers = names
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<BenchSolver>())
        .collect::<Result<Vec<_>, _>>()?;
    if solvers.is_empty() {
        return Err(Failure::usage("at least one solver is required"));
    }
    Ok(solvers)
}

fn emit_records(ctx: &Ctx, records: &[RunRecord]) -> CliResult<()> {
    match ctx.format {
        Format::Csv => ctx.emit(&records_to_csv(records)?),
        Format::Json => ctx.emit_json(&records),
    }
}

fn cmd_solve(ctx: &Ctx, a: SolveArgs) -> CliResult<()> {
    let inst = parse_any_instance(&read_text(&a.instance)?)?;
    let solvers = parse_solvers(&a.solvers)?;
    let mut cfg = BenchConfig::new(vec![Family::Uniform], vec![], solvers.clone(), 1, ctx.seed);
    cfg.local_search = HeuristicConfig {
        ell: a.ell,
        samples: a.samples,
        stall_rounds: a.stall_rounds,
        seed: ctx.seed,
    };
    cfg.randomized = HeuristicConfig { ell: a.randomized_ell, ..cfg.local_search.clone() };
    cfg.local_search.validate()?;
    cfg.randomized.validate()?;
    let lp_value = if a.no_lp { None } else { Some(rkm_core::lp::rkm_lp_value(&inst)?) };
    let id = a.instance.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut records = Vec::new();
    for solver in solvers {
        let start = std::time::Instant::now();
        let (objective, iterations) = solve_one(&cfg, &inst, solver, ctx.seed)?;
        records.push(RunRecord {
            instance_id: id.clone(),
            family: String::new(),
            n_facilities: inst.n_facilities(),
            n_clients: inst.n_clients(),
            n_groups: inst.n_groups(),
            k: inst.k,
            solver: solver.to_string(),
            seed: ctx.seed,
            objective,
            lp_value,
            ratio: rkm_core::bench::ratio_of(objective, lp_value),
            wall_time_ms: a.wall_time.then(|| start.elapsed().as_secs_f64() * 1e3),
            iterations,
        });
    }
    emit_records(ctx, &records)
}

#[derive(Serialize)]
struct LpReport {
    status: LpStatus,
    lp_value: f64,
    pivots: usize,
    /// Site values `x_j`.
    x: Vec<f64>,
    /// Nonzero assignments `(client, site, y)`.
    y: Vec<(usize, usize, f64)>,
}

fn cmd_lp(ctx: &Ctx, a: LpArgs) -> CliResult<()> {
    let inst = parse_any_instance(&read_text(&a.instance)?)?;
    if let Some(path) = &a.export {
        fs::write(path, to_lp_format(&build_rkm_lp(&inst)))?;
    }
    let res = solve_rkm_lp(&inst)?;
    if res.status != LpStatus::Optimal {
        return Err(Failure { code: 3, message: format!("relaxation is {:?}", res.status) });
    }
    let (n_f, n_c) = (inst.n_facilities(), inst.n_clients());
    let y = (0..n_c)
        .flat_map(|i| (0..n_f).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, res.values[n_f + i * n_f + j]))
        .filter(|t| t.2 != 0.0)
        .collect();
    eprintln!("lp value {}", res.value);
    ctx.emit_json(&LpReport {
        status: res.status,
        lp_value: res.value,
        pivots: res.pivots,
        x: res.values[..n_f].to_vec(),
        y,
    })
}

#[derive(Serialize)]
struct ExactReport {
    #[serde(flatten)]
    result: ExactResult,
    lp_value: Option<f64>,
}

fn cmd_exact(ctx: &Ctx, a: ExactArgs) -> CliResult<()> {
    let inst = parse_any_instance(&read_text(&a.instance)?)?;
    let result = match a.method {
        ExactMethod::BruteForce => brute_force_rkm(&inst)?,
        ExactMethod::BranchAndBound => branch_and_bound(&inst, &BnbConfig { node_budget: a.node_budget })?,
    };
    let lp_value = rkm_core::lp::rkm_lp_value(&inst).ok();
    match lp_value {
        Some(lp) => eprintln!("opt {} vs lp {lp}", result.opt_value),
        None => eprintln!("opt {}", result.opt_value),
    }
    ctx.emit_json(&ExactReport { result, lp_value })
}

fn cmd_bench(ctx: &Ctx, a: BenchArgs) -> CliResult<()> {
    let solvers = parse_solvers(&a.solvers)?;
    let mut sizes = Vec::new();
    for &n_facilities in &a.facilities {
        for &n_groups in &a.groups {
            for &clients_per_group in &a.clients_per_group {
                sizes.push(SizeCell { n_facilities, n_groups, clients_per_group, k: a.k });
            }
        }
    }
    let mut cfg = BenchConfig::new(a.families, sizes, solvers, a.instances, ctx.seed);
    cfg.record_wall_time = a.wall_time;
    let out = run_benchmark(&cfg)?;
    if let Some(path) = &a.summary {
        fs::write(path, to_json(&out.summary)?)?;
    }
    for row in &out.summary {
        let show = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));
        eprintln!(
            "{:<12} {:<24} mean {} median {} (included {}, filtered {}, zero lp {}, lp failed {})",
            row.family,
            row.solver,
            show(row.mean_ratio),
            show(row.median_ratio),
            row.included,
            row.filtered_out,
            row.zero_lp,
            row.lp_failed
        );
    }
    match ctx.format {
        Format::Json => ctx.emit_json(&out),
        Format::Csv => ctx.emit(&records_to_csv(&out.records)?),
    }
}

fn cmd_stats(ctx: &Ctx, a: StatsArgs) -> CliResult<()> {
    let text = read_text(&a.input)?;
    let (label_a, label_b, xs, ys) = if let (Some(ca), Some(cb)) = (&a.col_a, &a.col_b) {
        let (xs, ys) = csv_columns(&text, ca, cb)?;
        (ca.clone(), cb.clone(), xs, ys)
    } else if let (Some(sa), Some(sb)) = (&a.solver_a, &a.solver_b) {
        let records = read_records_csv(text.as_bytes())?;
        let (xs, ys) = paired_by_instance(&records, sa, sb, &a.column)?;
        (sa.clone(), sb.clone(), xs, ys)
    } else {
        return Err(Failure::usage("give --col-a/--col-b or --solver-a/--solver-b"));
    };
    let method = match a.method {
        StatsMethod::Auto => WilcoxonMethod::Auto,
        StatsMethod::Exact => WilcoxonMethod::Exact,
        StatsMethod::Normal => WilcoxonMethod::Normal,
    };
    let res = wilcoxon_signed_rank_with(&xs, &ys, method)?;
    #[derive(Serialize)]
    struct Report {
        a: String,
        b: String,
        pairs: usize,
        #[serde(flatten)]
        result: rkm_core::bench::WilcoxonResult,
    }
    ctx.emit_json(&Report { a: label_a, b: label_b, pairs: xs.len(), result: res })
}

fn csv_columns(text: &str, a: &str, b: &str) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| Failure::data(e.to_string()))?.clone();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Failure::data(format!("no column {name:?}")))
    };
    let (ia, ib) = (find(a)?, find(b)?);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (row, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| Failure::data(e.to_string()))?;
        let cell = |i: usize| -> CliResult<Option<f64>> {
            let s = rec.get(i).unwrap_or("").trim();
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| Failure::data(format!("row {}: {s:?} is not a number", row + 1)))
        };
        if let (Some(x), Some(y)) = (cell(ia)?, cell(ib)?) {
            xs.push(x);
            ys.push(y);
        }
    }
    Ok((xs, ys))
}

fn paired_by_instance(records: &[RunRecord], a: &str, b: &str, column: &str) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let value = |r: &RunRecord| if column == "ratio" { r.ratio } else { Some(r.objective) };
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for ra in records.iter().filter(|r| r.solver == a) {
        let partner = records.iter().find(|r| r.solver == b && r.instance_id == ra.instance_id);
        if let Some(rb) = partner {
            if let (Some(x), Some(y)) = (value(ra), value(rb)) {
                xs.push(x);
                ys.push(y);
            }
        }
    }
    if xs.is_empty() {
        return Err(Failure::data(format!("no instances with both {a} and {b}")));
    }
    Ok((xs, ys))
}

/// Parses a document that is either a bare instance or carries one.
pub fn parse_any_instance(text: &str) -> CliResult<RkmInstance> {
    match parse_instance(text) {
        Ok(inst) => Ok(inst),
        Err(first) => {
            #[derive(serde::Deserialize)]
            struct Carrier {
                rkm_instance: RkmInstance,
            }
            match from_json::<Carrier>(text) {
                Ok(c) => Ok(c.rkm_instance),
                Err(_) => Err(first.into()),
            }
        }
    }
}
