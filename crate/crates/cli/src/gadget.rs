//! Hardness gadgets and their certificates.

use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};

use rkm_core::bench::from_json;
use rkm_core::hardness::toy::{planted_label_cover, ToySpec};
use rkm_core::hardness::{
    build_partition_system, induced_selection, lc_to_mcsp, mcsp_to_line_rkm, sat_to_lc, satisfaction_stats,
    verify_partition_system, Cnf, LabelCoverInstance, Labeling, LineEmbedding, PartitionSystem, Provenance,
    SatLabelCover, SatMode, SatisfactionStats, VerifyMode,
};
use rkm_core::lp::{build_mcsp_lp, solve_lp};
use rkm_core::mcsp::{brute_force_mcsp, build_integrality_gap, congestion, mcsp_to_rkm, McspInstance, SetSelection};
use rkm_core::{eval_objective, FacilitySolution, RkmInstance};

use crate::{read_text, CliResult, Ctx, Failure};

#[derive(Args)]
pub struct GadgetArgs {
    #[command(subcommand)]
    kind: GadgetKind,
}

#[derive(Args, Clone, Copy)]
pub struct ToyArgs {
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 2)]
    part_size: usize,
    #[arg(long, default_value_t = 2)]
    labels: usize,
    #[arg(long, default_value_t = 2)]
    colors: usize,
    #[arg(long, default_value_t = 3)]
    edges: usize,
}

#[derive(Subcommand)]
enum GadgetKind {
    /// MCSP instance with LP value 1 and integral optimum d, plus its
    /// Robust k-Median form.
    IntegralityGap {
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Skip the exhaustive integral optimum.
        #[arg(long)]
        no_exact: bool,
    },
    /// Planted Label Cover instance reduced to MCSP with its congestion-one
    /// selection.
    LabelCoverMcsp(ToyArgs),
    /// As label-cover-mcsp, embedded on the line with the complement
    /// facility set.
    LineEmbedding(ToyArgs),
    /// Label Cover instance of a 3-CNF formula.
    SatToLc {
        /// DIMACS file.
        cnf: PathBuf,
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Sample this many random strings instead of enumerating.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Random partition system.
    PartitionSystem {
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 4)]
        colors: usize,
        #[arg(long)]
        z_size: Option<usize>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    IntegralityGap {
        d: usize,
        mcsp: McspInstance,
        rkm_instance: RkmInstance,
        lp_value: f64,
        integral_opt: Option<usize>,
    },
    LabelCoverMcsp {
        label_cover: LabelCoverInstance,
        labeling: Labeling,
        mcsp: McspInstance,
        provenance: Provenance,
        selection: SetSelection,
        congestion: usize,
    },
    LineEmbedding {
        label_cover: LabelCoverInstance,
        labeling: Labeling,
        mcsp: McspInstance,
        provenance: Provenance,
        rkm_instance: RkmInstance,
        embedding: LineEmbedding,
        open_sites: FacilitySolution,
        objective: f64,
    },
    SatToLc {
        formula: Cnf,
        r: usize,
        reduction: SatLabelCover,
        /// Satisfying assignment found by enumeration, when one exists.
        assignment: Option<Vec<bool>>,
        stats: Option<SatisfactionStats>,
    },
    PartitionSystem {
        system: PartitionSystem,
    },
}

fn toy(a: &ToyArgs, seed: u64) -> CliResult<(LabelCoverInstance, Labeling, McspInstance, Provenance, SetSelection)> {
    let spec = ToySpec {
        r: a.r,
        part_size: a.part_size,
        n_labels: a.labels,
        n_colors: a.colors,
    };
    let (lc, labeling) = planted_label_cover(&spec, a.edges, seed)?;
    let (mcsp, prov) = lc_to_mcsp(&lc, seed)?;
    let selection = induced_selection(&prov, &labeling);
    Ok((lc, labeling, mcsp, prov, selection))
}

pub fn run(ctx: &Ctx, args: GadgetArgs) -> CliResult<()> {
    let cert = match args.kind {
        GadgetKind::IntegralityGap { d, no_exact } => {
            let mcsp = build_integrality_gap(d)?;
            let lp = solve_lp(&build_mcsp_lp(&mcsp))?;
            let integral_opt = if no_exact { None } else { Some(brute_force_mcsp(&mcsp)?.opt_value) };
            eprintln!(
                "lp {} integral {}",
                lp.objective,
                integral_opt.map_or("-".into(), |v| v.to_string())
            );
            Certificate::IntegralityGap {
                d,
                rkm_instance: mcsp_to_rkm(&mcsp)?,
                mcsp,
                lp_value: lp.objective,
                integral_opt,
            }
        }
        GadgetKind::LabelCoverMcsp(a) => {
            let (label_cover, labeling, mcsp, provenance, selection) = toy(&a, ctx.seed())?;
            let c = congestion(&mcsp, &selection)?.max;
            eprintln!("{} sets, {} elements, congestion {c}", mcsp.n_sets(), mcsp.m);
            Certificate::LabelCoverMcsp {
                label_cover,
                labeling,
                mcsp,
                provenance,
                selection,
                congestion: c,
            }
        }
        GadgetKind::LineEmbedding(a) => {
            let (label_cover, labeling, mcsp, provenance, selection) = toy(&a, ctx.seed())?;
            let (rkm_instance, embedding) = mcsp_to_line_rkm(&mcsp, &provenance)?;
            let open_sites = complement(mcsp.n_sets(), &selection);
            let objective = eval_objective(&rkm_instance, &open_sites)?.cost;
            eprintln!("line instance with {} sites, complement objective {objective}", rkm_instance.n_facilities());
            Certificate::LineEmbedding {
                label_cover,
                labeling,
                mcsp,
                provenance,
                rkm_instance,
                embedding,
                open_sites,
                objective,
            }
        }
        GadgetKind::SatToLc { cnf, r, sample } => {
            let formula = Cnf::parse_dimacs(&read_text(&cnf)?)?;
            let mode = match sample {
                Some(count) => SatMode::Sample { count, seed: ctx.seed() },
                None => SatMode::Enumerate,
            };
            let reduction = sat_to_lc(&formula, r, mode)?;
            let assignment = satisfying_assignment(&formula);
            let stats = match &assignment {
                Some(x) => Some(satisfaction_stats(&reduction.lc, &reduction.labeling_from_assignment(x))?),
                None => None,
            };
            eprintln!(
                "{} vertices, {} edges; satisfiable: {}",
                reduction.lc.n_vertices(),
                reduction.lc.n_edges(),
                assignment.is_some()
            );
            Certificate::SatToLc { formula, r, reduction, assignment, stats }
        }
        GadgetKind::PartitionSystem { r, colors, z_size } => Certificate::PartitionSystem {
            system: build_partition_system(r, colors, z_size, ctx.seed())?,
        },
    };
    ctx.emit_json(&cert)
}

fn complement(n_sets: usize, sel: &SetSelection) -> FacilitySolution {
    FacilitySolution::new((0..n_sets).filter(|s| !sel.chosen.contains(s)).collect())
}

/// Lexicographically first satisfying assignment, for up to 24 variables.
fn satisfying_assignment(formula: &Cnf) -> Option<Vec<bool>> {
    if formula.n_vars > 24 {
        return None;
    }
    (0u64..1 << formula.n_vars)
        .map(|bits| (0..formula.n_vars).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
        .find(|x| formula.is_satisfied_by(x))
}

fn check(ok: bool, what: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(Failure::data(format!("certificate rejected: {what}")))
    }
}

pub fn verify(ctx: &Ctx, path: &Path) -> CliResult<()> {
    let cert: Certificate = from_json(&read_text(path)?)?;
    let message = match cert {
        Certificate::IntegralityGap { d, mcsp, rkm_instance, lp_value, integral_opt } => {
            mcsp.check()?;
            check(mcsp == build_integrality_gap(d)?, "instance differs from the construction")?;
            check(rkm_instance == mcsp_to_rkm(&mcsp)?, "converted instance differs")?;
            let lp = solve_lp(&build_mcsp_lp(&mcsp))?.objective;
            check((lp - lp_value).abs() <= 1e-6, "lp value differs")?;
            if let Some(opt) = integral_opt {
                check(brute_force_mcsp(&mcsp)?.opt_value == opt, "integral optimum differs")?;
            }
            format!("ok: lp {lp}, integral {}", integral_opt.map_or("-".into(), |v| v.to_string()))
        }
        Certificate::LabelCoverMcsp { label_cover, labeling, mcsp, provenance, selection, congestion: claimed } => {
            label_cover.validate()?;
            labeling.validate(&label_cover)?;
            mcsp.check()?;
            check(induced_selection(&provenance, &labeling) == selection, "selection is not induced by the labeling")?;
            let c = congestion(&mcsp, &selection)?;
            check(c.max == claimed, "congestion differs")?;
            let exact_cover = c.per_element.iter().all(|&n| n == 1);
            check(claimed != 1 || exact_cover, "some element is not covered exactly once")?;
            format!("ok: congestion {}", c.max)
        }
        Certificate::LineEmbedding { mcsp, provenance, rkm_instance, open_sites, objective, .. } => {
            let (rebuilt, _) = mcsp_to_line_rkm(&mcsp, &provenance)?;
            check(rebuilt == rkm_instance, "line instance differs from the embedding")?;
            open_sites.validate(&rkm_instance)?;
            let v = eval_objective(&rkm_instance, &open_sites)?.cost;
            check(v == objective, "objective differs")?;
            format!("ok: objective {v}")
        }
        Certificate::SatToLc { formula, r, reduction, assignment, stats } => {
            reduction.lc.validate()?;
            check(reduction.lc.r == r, "wrong number of provers")?;
            match (&assignment, stats) {
                (Some(x), Some(s)) => {
                    check(formula.is_satisfied_by(x), "assignment does not satisfy the formula")?;
                    let got = satisfaction_stats(&reduction.lc, &reduction.labeling_from_assignment(x))?;
                    check(got == s, "satisfaction statistics differ")?;
                    format!("ok: strong {} weak {}", s.strong_fraction, s.weak_fraction)
                }
                _ => "ok: structure valid".into(),
            }
        }
        Certificate::PartitionSystem { system } => {
            system.check_partition_property()?;
            verify_partition_system(&system, VerifyMode::Exhaustive)
                .map_err(|v| Failure::data(format!("certificate rejected: {v}")))?;
            format!("ok: partition system r={} colors={} z={}", system.r, system.n_colors, system.z_size)
        }
    };
    ctx.emit(&format!("{message}\n"))
}
