//! Embedding a reduced MCSP instance into a line metric.
//!
//! Every vertex gets a block of consecutive unit-spaced positions, one per
//! label, and consecutive blocks are exactly two apart. A closed site is then
//! at distance exactly one from an open neighbour in its own block when one
//! exists, and at least one from any open site in any case.

use serde::{Deserialize, Serialize};

use super::reduction::Provenance;
use crate::error::{Error, Result};
use crate::instance::{Metric, RkmInstance};
use crate::mcsp::McspInstance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineEmbedding {
    /// Coordinate of every facility site (set index).
    pub position: Vec<f64>,
    pub block_gap: f64,
}

pub const BLOCK_GAP: f64 = 2.0;

/// Lays the sets out on the line by `(vertex, label)` and builds the Robust
/// k-Median instance with one group per element and `k = |sets| - t`.
pub fn mcsp_to_line_rkm(mcsp: &McspInstance, prov: &Provenance) -> Result<(RkmInstance, LineEmbedding)> {
    let n = mcsp.n_sets();
    if prov.set_origin.len() != n {
        return Err(Error::Parameter(format!(
            "provenance describes {} sets, instance has {n}",
            prov.set_origin.len()
        )));
    }
    for (s, o) in prov.set_origin.iter().enumerate() {
        let consistent = prov
            .vertex_first_set
            .get(o.vertex)
            .is_some_and(|&first| first + o.label == s);
        if !consistent {
            return Err(Error::Parameter(format!(
                "provenance of set {s} does not follow vertex/label order"
            )));
        }
    }

    let mut position = Vec::with_capacity(n);
    let mut next_start = 0.0;
    let mut s = 0;
    while s < n {
        let vertex = prov.set_origin[s].vertex;
        let start = next_start;
        while s < n && prov.set_origin[s].vertex == vertex {
            position.push(start + prov.set_origin[s].label as f64);
            s += 1;
        }
        next_start = position[s - 1] + BLOCK_GAP;
    }

    let mut groups = vec![Vec::new(); mcsp.m];
    for (i, set) in mcsp.sets.iter().enumerate() {
        for &e in set {
            groups[e].push(i);
        }
    }
    let k = n - mcsp.t;
    if k == 0 {
        return Err(Error::Parameter("t equals the number of sets (k = 0)".into()));
    }
    let inst = RkmInstance::on_points(Metric::Line { points: position.clone() }, groups, k)?;
    Ok((
        inst,
        LineEmbedding {
            position,
            block_gap: BLOCK_GAP,
        },
    ))
}
