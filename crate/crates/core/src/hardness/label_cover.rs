//! r-Hypergraph Label Cover instances and labelings.
//!
//! Vertices are numbered globally, part by part. Labels of a vertex are
//! `0..label_sizes[part][vertex]` and colors are `0..n_colors`. Label counts
//! may differ between vertices of one part (the 3SAT construction produces
//! one label per satisfying answer), and a vertex may have no label at all.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCoverInstance {
    pub r: usize,
    /// `label_sizes[j][i]`: number of labels of vertex `i` in part `j`.
    pub label_sizes: Vec<Vec<usize>>,
    pub n_colors: usize,
    /// `edges[h][j]`: the part-`j` vertex (index within the part) of edge `h`.
    pub edges: Vec<Vec<usize>>,
    /// `projections[h][j][l]`: color of label `l` of edge `h`'s part-`j` vertex.
    pub projections: Vec<Vec<Vec<usize>>>,
}

impl LabelCoverInstance {
    /// Builds and validates an instance whose part-`j` vertices all carry
    /// `labels_per_part[j]` labels.
    pub fn with_uniform_labels(
        part_sizes: &[usize],
        labels_per_part: &[usize],
        n_colors: usize,
        edges: Vec<Vec<usize>>,
        projections: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if part_sizes.len() != labels_per_part.len() {
            return Err(Error::Parameter("one label count per part required".into()));
        }
        let label_sizes = part_sizes
            .iter()
            .zip(labels_per_part)
            .map(|(&n, &l)| vec![l; n])
            .collect();
        let lc = Self {
            r: part_sizes.len(),
            label_sizes,
            n_colors,
            edges,
            projections,
        };
        lc.validate()?;
        Ok(lc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 2 {
            return Err(Error::InvalidInstance(format!("label cover needs r >= 2, got {}", self.r)));
        }
        if self.label_sizes.len() != self.r {
            return Err(Error::InvalidInstance(format!(
                "{} parts listed, expected r = {}",
                self.label_sizes.len(),
                self.r
            )));
        }
        if self.projections.len() != self.edges.len() {
            return Err(Error::InvalidInstance("one projection table per edge required".into()));
        }
        for (h, edge) in self.edges.iter().enumerate() {
            if edge.len() != self.r {
                return Err(Error::InvalidInstance(format!(
                    "edge {h} has {} vertices, expected one per part",
                    edge.len()
                )));
            }
            if self.projections[h].len() != self.r {
                return Err(Error::InvalidInstance(format!("edge {h}: one projection per part required")));
            }
            for (j, &v) in edge.iter().enumerate() {
                let Some(&labels) = self.label_sizes[j].get(v) else {
                    return Err(Error::InvalidInstance(format!(
                        "edge {h}: vertex {v} not in part {j}"
                    )));
                };
                let table = &self.projections[h][j];
                if table.len() != labels {
                    return Err(Error::InvalidInstance(format!(
                        "edge {h}, part {j}: projection covers {} labels, vertex has {labels}",
                        table.len()
                    )));
                }
                if let Some(&c) = table.iter().find(|&&c| c >= self.n_colors) {
                    return Err(Error::InvalidInstance(format!(
                        "edge {h}, part {j}: color {c} out of range"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        self.label_sizes.iter().map(Vec::len).collect()
    }

    pub fn n_vertices(&self) -> usize {
        self.label_sizes.iter().map(Vec::len).sum()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Global id of the first vertex of each part.
    pub fn part_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.r);
        let mut acc = 0;
        for part in &self.label_sizes {
            offsets.push(acc);
            acc += part.len();
        }
        offsets
    }

    pub fn vertex_id(&self, part: usize, index: usize) -> usize {
        self.label_sizes[..part].iter().map(Vec::len).sum::<usize>() + index
    }

    /// `(part, index within part)` of a global vertex id.
    pub fn locate(&self, mut v: usize) -> (usize, usize) {
        for (j, part) in self.label_sizes.iter().enumerate() {
            if v < part.len() {
                return (j, v);
            }
            v -= part.len();
        }
        panic!("vertex id out of range");
    }

    /// Label count per global vertex id.
    pub fn label_counts(&self) -> Vec<usize> {
        self.label_sizes.iter().flatten().copied().collect()
    }

    /// Global vertex ids of an edge, in part order.
    pub fn edge_vertices(&self, h: usize) -> Vec<usize> {
        let offsets = self.part_offsets();
        self.edges[h]
            .iter()
            .enumerate()
            .map(|(j, &i)| offsets[j] + i)
            .collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices()];
        for h in 0..self.n_edges() {
            for v in self.edge_vertices(h) {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Every vertex has degree `r|E|/|V|`.
    pub fn is_vertex_regular(&self) -> bool {
        let deg = self.degrees();
        let n_v = deg.len();
        n_v > 0
            && deg.iter().all(|&d| d == deg[0])
            && deg[0] * n_v == self.r * self.n_edges()
    }
}

/// A label per vertex (global ids). `None` is only admissible for vertices
/// without labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    pub sigma: Vec<Option<usize>>,
}

impl Labeling {
    pub fn total(sigma: Vec<usize>) -> Self {
        Self {
            sigma: sigma.into_iter().map(Some).collect(),
        }
    }

    pub fn validate(&self, lc: &LabelCoverInstance) -> Result<()> {
        let counts = lc.label_counts();
        if self.sigma.len() != counts.len() {
            return Err(Error::InvalidSelection(format!(
                "labeling covers {} vertices, instance has {}",
                self.sigma.len(),
                counts.len()
            )));
        }
        for (v, (&s, &n)) in self.sigma.iter().zip(&counts).enumerate() {
            match s {
                Some(l) if l >= n => {
                    return Err(Error::InvalidSelection(format!(
                        "vertex {v}: label {l} out of range ({n} labels)"
                    )))
                }
                None if n > 0 => {
                    return Err(Error::InvalidSelection(format!("vertex {v} is unlabeled")))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatisfactionStats {
    pub strong_fraction: f64,
    pub weak_fraction: f64,
}

/// Colors the edge's vertices project to under a labeling (`None` when a
/// vertex is unlabeled).
pub fn edge_colors(lc: &LabelCoverInstance, labeling: &Labeling, h: usize) -> Vec<Option<usize>> {
    let offsets = lc.part_offsets();
    lc.edges[h]
        .iter()
        .enumerate()
        .map(|(j, &i)| labeling.sigma[offsets[j] + i].map(|l| lc.projections[h][j][l]))
        .collect()
}

/// Fractions of strongly satisfied edges (all parts project to one color)
/// and weakly satisfied edges (some pair of parts agrees). Unlabeled
/// vertices agree with nobody.
pub fn satisfaction_stats(lc: &LabelCoverInstance, labeling: &Labeling) -> Result<SatisfactionStats> {
    labeling.validate(lc)?;
    if lc.n_edges() == 0 {
        return Ok(SatisfactionStats {
            strong_fraction: 1.0,
            weak_fraction: 1.0,
        });
    }
    let mut strong = 0usize;
    let mut weak = 0usize;
    for h in 0..lc.n_edges() {
        let colors = edge_colors(lc, labeling, h);
        let all_same = colors[0].is_some() && colors.iter().all(|&c| c == colors[0]);
        let some_pair = (0..colors.len()).any(|a| {
            colors[a].is_some() && ((a + 1)..colors.len()).any(|b| colors[b] == colors[a])
        });
        strong += all_same as usize;
        weak += some_pair as usize;
    }
    let n = lc.n_edges() as f64;
    Ok(SatisfactionStats {
        strong_fraction: strong as f64 / n,
        weak_fraction: weak as f64 / n,
    })
}
