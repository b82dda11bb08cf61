//! Hardness constructions: partition systems, Label Cover, the reduction to
//! MCSP, its line-metric embedding and the 3SAT front end.

pub mod label_cover;
pub mod line;
pub mod partition;
pub mod reduction;
pub mod sat;
pub mod toy;

pub use label_cover::{satisfaction_stats, LabelCoverInstance, Labeling, SatisfactionStats};
pub use line::{mcsp_to_line_rkm, LineEmbedding};
pub use partition::{build_partition_system, verify_partition_system, PartitionSystem, VerifyMode};
pub use reduction::{decode_labeling, induced_selection, lc_to_mcsp, lc_to_mcsp_with, Provenance};
pub use sat::{sat_to_lc, Cnf, SatLabelCover, SatMode};
