//! Robust k-Median: instances, hardness gadgets, LP relaxations, heuristics,
//! exact oracles, random instance families and a benchmark harness.

pub mod bench;
pub mod combinatorics;
pub mod error;
pub mod exact;
pub mod generators;
pub mod hardness;
pub mod heuristics;
pub mod instance;
pub mod lp;
pub mod mcsp;
pub mod rng;

pub use error::{Error, Result};
pub use instance::{eval_objective, validate_instance, Evaluation, FacilitySolution, Metric, RkmInstance};
pub use mcsp::{McspInstance, SetSelection};
