//! Benchmark harness: sweeps, run records, summaries, file formats and the
//! Wilcoxon signed-rank test.

pub mod io;
pub mod records;
pub mod stats;
pub mod sweep;

pub use io::{
    from_json, parse_instance, parse_label_cover, parse_mcsp, read_records_csv, records_to_csv, to_json,
    write_records_csv, CSV_HEADER, FORMAT_VERSION,
};
pub use records::{ratio_of, summarize, RunRecord, SummaryRow};
pub use stats::{wilcoxon_signed_rank, wilcoxon_signed_rank_with, WilcoxonMethod, WilcoxonResult};
pub use sweep::{run_benchmark, solve_one, BenchConfig, BenchOutput, BenchSolver, SizeCell};
