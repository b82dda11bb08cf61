//! Linear programming: a model type, a revised simplex solver, the two
//! relaxations and randomized rounding.

pub mod colgen;
pub mod export;
pub mod model;
pub mod relax;
pub mod rounding;
pub mod simplex;

pub use colgen::{solve_rkm_lp, solve_rkm_lp_fixed, RkmLpResult};
pub use export::to_lp_format;
pub use model::{Constraint, LpModel, LpSolution, LpStatus, Sense, Variable};
pub use relax::{
    build_mcsp_lp, build_rkm_lp, build_rkm_lp_fixed, canonicalize_assignment, fractional_group_costs,
    rkm_lp_value, RkmLpLayout,
};
pub use rounding::{pick_probability, round_mcsp, Repair, RoundingOutcome};
pub use simplex::{solve_lp, solve_lp_warm, Basis, BasisStatus};

#[cfg(test)]
mod tests;
