//! Small random Label Cover instances with a planted strongly satisfying
//! labeling, for certificate and counting tests.

use super::label_cover::{LabelCoverInstance, Labeling};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToySpec {
    pub r: usize,
    /// Vertices per part.
    pub part_size: usize,
    /// Labels per vertex.
    pub n_labels: usize,
    pub n_colors: usize,
}

impl ToySpec {
    fn check(&self) -> Result<()> {
        if self.r < 2 || self.part_size == 0 || self.n_labels == 0 || self.n_colors < self.r {
            return Err(Error::Parameter(format!(
                "toy label cover needs r >= 2, part_size >= 1, n_labels >= 1 and n_colors >= r, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// `n_edges` edges (at least `part_size`) such that every vertex has an edge.
/// The first `part_size` edges pair up random permutations of the parts and
/// the rest pick uniform vertices.
pub fn planted_label_cover(
    spec: &ToySpec,
    n_edges: usize,
    seed: u64,
) -> Result<(LabelCoverInstance, Labeling)> {
    spec.check()?;
    if n_edges < spec.part_size {
        return Err(Error::Parameter(format!(
            "{n_edges} edges cannot touch all {} vertices of a part",
            spec.part_size
        )));
    }
    let mut rng = SeededRng::new(seed);
    let mut edges = permutation_round(spec, &mut rng);
    while edges.len() < n_edges {
        edges.push((0..spec.r).map(|_| rng.below(spec.part_size)).collect());
    }
    plant(spec, edges, &mut rng)
}

/// Vertex-regular instance: `rounds` rounds of permutation edges, so every
/// vertex has degree `rounds = r|E|/|V|`.
pub fn regular_label_cover(
    spec: &ToySpec,
    rounds: usize,
    seed: u64,
) -> Result<(LabelCoverInstance, Labeling)> {
    spec.check()?;
    if rounds == 0 {
        return Err(Error::Parameter("at least one round of edges required".into()));
    }
    let mut rng = SeededRng::new(seed);
    let mut edges = Vec::new();
    for _ in 0..rounds {
        edges.extend(permutation_round(spec, &mut rng));
    }
    plant(spec, edges, &mut rng)
}

fn permutation_round(spec: &ToySpec, rng: &mut SeededRng) -> Vec<Vec<usize>> {
    let perms: Vec<Vec<usize>> = (0..spec.r)
        .map(|_| rng.sample_indices(spec.part_size, spec.part_size))
        .collect();
    (0..spec.part_size)
        .map(|i| perms.iter().map(|p| p[i]).collect())
        .collect()
}

/// Draws the planted labels, a common color per edge, and projections that
/// send every planted label to its edge's color and the other labels to
/// uniform colors.
fn plant(
    spec: &ToySpec,
    edges: Vec<Vec<usize>>,
    rng: &mut SeededRng,
) -> Result<(LabelCoverInstance, Labeling)> {
    let planted: Vec<Vec<usize>> = (0..spec.r)
        .map(|_| (0..spec.part_size).map(|_| rng.below(spec.n_labels)).collect())
        .collect();
    let projections = edges
        .iter()
        .map(|edge| {
            let color = rng.below(spec.n_colors);
            edge.iter()
                .enumerate()
                .map(|(j, &v)| {
                    (0..spec.n_labels)
                        .map(|l| {
                            if l == planted[j][v] {
                                color
                            } else {
                                rng.below(spec.n_colors)
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let lc = LabelCoverInstance::with_uniform_labels(
        &vec![spec.part_size; spec.r],
        &vec![spec.n_labels; spec.r],
        spec.n_colors,
        edges,
        projections,
    )?;
    Ok((lc, Labeling::total(planted.into_iter().flatten().collect())))
}
