//! (r, C)-partition systems.
//!
//! A ground set `Z` with one r-way partition per color, such that any `r`
//! parts taken from `r` distinct colors share an element. Stored as a dense
//! `color x element -> part` table, which makes the partition property
//! (every element in exactly one part per color) hold by construction.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, next_combination};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SeededRng};

/// Constant multiplying the exponent and the size in the default ground-set size.
pub const DEFAULT_SIZE_CONSTANT: u32 = 3;
/// Tuple count up to which verification is exhaustive.
pub const EXHAUSTIVE_TUPLE_LIMIT: u128 = 1_000_000;
/// Number of tuples checked in sampled verification.
pub const SAMPLED_TUPLES: usize = 100_000;
/// Random draws before construction gives up.
pub const MAX_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSystem {
    pub z_size: usize,
    pub r: usize,
    pub n_colors: usize,
    /// `parts[c][e]` is the part of element `e` under color `c`.
    pub parts: Vec<Vec<u32>>,
}

/// `r` distinct colors and one part per color whose intersection is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionViolation {
    pub colors: Vec<usize>,
    pub parts: Vec<usize>,
}

impl std::fmt::Display for IntersectionViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "empty intersection for colors {:?} with parts {:?}", self.colors, self.parts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Exhaustive when the tuple count is at most [`EXHAUSTIVE_TUPLE_LIMIT`].
    Auto { seed: u64 },
    Exhaustive,
    Sampled { seed: u64 },
}

/// `ceil(c * r^(c*r) * ln(max(|C|, 2)))` with `c = size_constant`.
pub fn default_z_size(r: usize, n_colors: usize, size_constant: u32) -> usize {
    let c = size_constant as f64;
    let size = c * (r as f64).powf(c * r as f64) * (n_colors.max(2) as f64).ln();
    size.ceil() as usize
}

impl PartitionSystem {
    pub fn part(&self, color: usize, element: usize) -> usize {
        self.parts[color][element] as usize
    }

    /// Elements of part `j` under color `c`.
    pub fn members(&self, color: usize, part: usize) -> Vec<usize> {
        self.parts[color]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p as usize == part)
            .map(|(e, _)| e)
            .collect()
    }

    /// One draw: every element picks a part uniformly and independently per color.
    pub fn random(r: usize, n_colors: usize, z_size: usize, seed: u64) -> Result<Self> {
        check_params(r, n_colors, z_size)?;
        let mut rng = SeededRng::new(seed);
        let parts = (0..n_colors)
            .map(|_| (0..z_size).map(|_| rng.below(r) as u32).collect())
            .collect();
        Ok(Self {
            z_size,
            r,
            n_colors,
            parts,
        })
    }

    /// The hypercube system `Z = [r]^|C|`: element `e` lies in the part given
    /// by its base-`r` digit at position `c`.
    pub fn hypercube(r: usize, n_colors: usize) -> Result<Self> {
        if r < 2 || n_colors == 0 {
            return Err(Error::Parameter(format!(
                "hypercube needs r >= 2 and at least one color (r = {r}, |C| = {n_colors})"
            )));
        }
        let size = (r as u128).checked_pow(n_colors as u32).unwrap_or(u128::MAX);
        if size > 10_000_000 {
            return Err(Error::SizeCap {
                what: "hypercube ground set".into(),
                size,
                cap: 10_000_000,
            });
        }
        let z_size = size as usize;
        let mut parts = vec![vec![0u32; z_size]; n_colors];
        for e in 0..z_size {
            let mut rest = e;
            for row in parts.iter_mut() {
                row[e] = (rest % r) as u32;
                rest /= r;
            }
        }
        Ok(Self {
            z_size,
            r,
            n_colors,
            parts,
        })
    }

    /// Shape check: table dimensions and part indices in range.
    pub fn check_partition_property(&self) -> Result<()> {
        if self.parts.len() != self.n_colors {
            return Err(Error::InvalidInstance("one partition per color required".into()));
        }
        for (c, row) in self.parts.iter().enumerate() {
            if row.len() != self.z_size {
                return Err(Error::InvalidInstance(format!("color {c} does not cover the ground set")));
            }
            if let Some(e) = row.iter().position(|&p| p as usize >= self.r) {
                return Err(Error::InvalidInstance(format!(
                    "element {e} has part {} >= r under color {c}",
                    row[e]
                )));
            }
        }
        Ok(())
    }

    pub fn tuple_count(&self) -> u128 {
        binomial(self.n_colors as u64, self.r as u64).saturating_mul((self.r as u128).pow(self.r as u32))
    }
}

fn check_params(r: usize, n_colors: usize, z_size: usize) -> Result<()> {
    if r < 2 {
        return Err(Error::Parameter(format!("partition systems need r >= 2, got {r}")));
    }
    if n_colors < r {
        return Err(Error::Parameter(format!(
            "partition systems need at least r = {r} colors, got {n_colors}"
        )));
    }
    if z_size == 0 {
        return Err(Error::Parameter("ground set must be non-empty".into()));
    }
    if r > u32::MAX as usize {
        return Err(Error::Parameter("r too large".into()));
    }
    Ok(())
}

/// Random construction with verification and retries.
///
/// `z_size = None` uses [`default_z_size`] with [`DEFAULT_SIZE_CONSTANT`].
/// Attempt `i` draws with seed `derive_seed(seed, i)`; after
/// [`MAX_ATTEMPTS`] failed verifications the last violation is reported.
pub fn build_partition_system(
    r: usize,
    n_colors: usize,
    z_size: Option<usize>,
    seed: u64,
) -> Result<PartitionSystem> {
    let z_size = z_size.unwrap_or_else(|| default_z_size(r, n_colors, DEFAULT_SIZE_CONSTANT));
    check_params(r, n_colors, z_size)?;
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        let attempt_seed = derive_seed(seed, attempt as u64);
        let ps = PartitionSystem::random(r, n_colors, z_size, attempt_seed)?;
        match verify_partition_system(&ps, VerifyMode::Auto { seed: attempt_seed }) {
            Ok(()) => return Ok(ps),
            Err(v) => last = Some(v),
        }
    }
    Err(Error::ConstructionFailure {
        attempts: MAX_ATTEMPTS,
        detail: last.map(|v| v.to_string()).unwrap_or_default(),
    })
}

/// Checks the r-intersecting property.
///
/// For a fixed set of `r` distinct colors, one pass over `Z` records which
/// part tuples are hit; the check passes when all `r^r` tuples are hit.
/// Exhaustive mode does this for every color subset; sampled mode for random
/// color subsets until [`SAMPLED_TUPLES`] tuples have been covered. The
/// reported violation is the first missing tuple in lexicographic order.
pub fn verify_partition_system(
    ps: &PartitionSystem,
    mode: VerifyMode,
) -> std::result::Result<(), IntersectionViolation> {
    let r = ps.r;
    if ps.n_colors < r {
        return Ok(());
    }
    let exhaustive = match mode {
        VerifyMode::Exhaustive => true,
        VerifyMode::Sampled { .. } => false,
        VerifyMode::Auto { .. } => ps.tuple_count() <= EXHAUSTIVE_TUPLE_LIMIT,
    };
    if exhaustive {
        let mut colors: Vec<usize> = (0..r).collect();
        loop {
            check_color_subset(ps, &colors)?;
            if !next_combination(&mut colors, ps.n_colors) {
                return Ok(());
            }
        }
    } else {
        let seed = match mode {
            VerifyMode::Auto { seed } | VerifyMode::Sampled { seed } => seed,
            VerifyMode::Exhaustive => unreachable!(),
        };
        let mut rng = SeededRng::new(seed);
        let per_subset = r.pow(r as u32);
        let subsets = SAMPLED_TUPLES.div_ceil(per_subset);
        for _ in 0..subsets {
            let mut colors = rng.sample_indices(ps.n_colors, r);
            colors.sort_unstable();
            check_color_subset(ps, &colors)?;
        }
        Ok(())
    }
}

fn check_color_subset(
    ps: &PartitionSystem,
    colors: &[usize],
) -> std::result::Result<(), IntersectionViolation> {
    let r = ps.r;
    let total = r.pow(colors.len() as u32);
    let mut hit = vec![false; total];
    let mut remaining = total;
    for e in 0..ps.z_size {
        // colors[0] is the most significant digit so index order is lexicographic
        let idx = colors
            .iter()
            .fold(0usize, |acc, &c| acc * r + ps.parts[c][e] as usize);
        if !hit[idx] {
            hit[idx] = true;
            remaining -= 1;
            if remaining == 0 {
                return Ok(());
            }
        }
    }
    let missing = hit.iter().position(|&h| !h).expect("some tuple missing");
    let mut parts = vec![0; colors.len()];
    let mut rest = missing;
    for slot in parts.iter_mut().rev() {
        *slot = rest % r;
        rest /= r;
    }
    Err(IntersectionViolation {
        colors: colors.to_vec(),
        parts,
    })
}
