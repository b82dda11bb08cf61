//! Label Cover to Minimum Congestion Set Packing.
//!
//! Each edge `h` owns a private block `U_h` of `m*` elements carrying its own
//! partition system. The set `X(v, l)` is the union, over edges `h` at `v`, of
//! the part of `U_h` indexed by `v`'s part `j` under the color `v`'s label `l`
//! projects to. Picking `X(v, l)` means labeling `v` with `l`, and `t = |V|`
//! asks for one label per vertex.

use serde::{Deserialize, Serialize};

use super::label_cover::{LabelCoverInstance, Labeling};
use super::partition::{build_partition_system, default_z_size, PartitionSystem, DEFAULT_SIZE_CONSTANT};
use crate::error::{Error, Result};
use crate::mcsp::{McspInstance, SetSelection};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetOrigin {
    pub vertex: usize,
    pub label: usize,
}

/// Where every set and element of the reduced instance came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// `(vertex, label)` of every set, in set order.
    pub set_origin: Vec<SetOrigin>,
    /// First set index of every vertex; its sets are consecutive by label.
    pub vertex_first_set: Vec<usize>,
    /// Size `m*` of every per-edge block.
    pub ground_size: usize,
    pub n_edges: usize,
    /// The partition system used on each edge block.
    pub partition_systems: Vec<PartitionSystem>,
}

impl Provenance {
    /// `(edge, ground element)` of a universe element.
    pub fn element_origin(&self, element: usize) -> (usize, usize) {
        (element / self.ground_size, element % self.ground_size)
    }

    pub fn set_index(&self, vertex: usize, label: usize) -> usize {
        self.vertex_first_set[vertex] + label
    }
}

/// Builds the MCSP instance with default block size
/// `m* = ceil(3 * r^(3r) * ln(max(|C|, 2)))`.
pub fn lc_to_mcsp(lc: &LabelCoverInstance, seed: u64) -> Result<(McspInstance, Provenance)> {
    lc_to_mcsp_with(lc, seed, None)
}

/// As [`lc_to_mcsp`] with an explicit block size. The partition system of
/// edge `h` is built from seed `seed + h`.
pub fn lc_to_mcsp_with(
    lc: &LabelCoverInstance,
    seed: u64,
    ground_size: Option<usize>,
) -> Result<(McspInstance, Provenance)> {
    lc.validate()?;
    let r = lc.r;
    if lc.n_colors < r {
        return Err(Error::Parameter(format!(
            "partition systems need at least r = {r} colors, instance has {}",
            lc.n_colors
        )));
    }
    let degrees = lc.degrees();
    if let Some(v) = degrees.iter().position(|&d| d == 0) {
        return Err(Error::Parameter(format!("vertex {v} has no incident edge")));
    }
    let m_star = ground_size.unwrap_or_else(|| default_z_size(r, lc.n_colors, DEFAULT_SIZE_CONSTANT));

    let counts = lc.label_counts();
    let mut set_origin = Vec::new();
    let mut vertex_first_set = Vec::with_capacity(counts.len());
    for (v, &n) in counts.iter().enumerate() {
        vertex_first_set.push(set_origin.len());
        set_origin.extend((0..n).map(|label| SetOrigin { vertex: v, label }));
    }
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); set_origin.len()];

    let mut systems = Vec::with_capacity(lc.n_edges());
    let mut covered = vec![false; m_star];
    for h in 0..lc.n_edges() {
        let ps = build_partition_system(r, lc.n_colors, Some(m_star), seed.wrapping_add(h as u64))?;
        // members[c][j]: ground elements of part j under color c
        let mut members = vec![vec![Vec::new(); r]; lc.n_colors];
        for (c, row) in ps.parts.iter().enumerate() {
            for (z, &j) in row.iter().enumerate() {
                members[c][j as usize].push(z);
            }
        }
        covered.iter_mut().for_each(|x| *x = false);
        let base = h * m_star;
        for (j, v) in lc.edge_vertices(h).into_iter().enumerate() {
            for (label, &c) in lc.projections[h][j].iter().enumerate() {
                let set = &mut sets[vertex_first_set[v] + label];
                for &z in &members[c][j] {
                    set.push(base + z);
                    covered[z] = true;
                }
            }
        }
        if let Some(z) = covered.iter().position(|&c| !c) {
            return Err(Error::InvalidInstance(format!(
                "edge {h}: ground element {z} lies in no set (the projections of the edge \
                 never reach the part containing it)"
            )));
        }
        systems.push(ps);
    }

    let mcsp = McspInstance::new(lc.n_edges() * m_star, sets, lc.n_vertices())?;
    let prov = Provenance {
        set_origin,
        vertex_first_set,
        ground_size: m_star,
        n_edges: lc.n_edges(),
        partition_systems: systems,
    };
    Ok((mcsp, prov))
}

/// The selection `{X(v, sigma(v))}` of a labeling. Unlabeled vertices
/// contribute nothing.
pub fn induced_selection(prov: &Provenance, labeling: &Labeling) -> SetSelection {
    SetSelection::new(
        labeling
            .sigma
            .iter()
            .enumerate()
            .filter_map(|(v, s)| s.map(|l| prov.set_index(v, l)))
            .collect(),
    )
}

/// Labels each vertex with a uniform draw from the labels whose sets were
/// chosen; vertices with no chosen set get their lowest label.
pub fn decode_labeling(
    lc: &LabelCoverInstance,
    sel: &SetSelection,
    prov: &Provenance,
    seed: u64,
) -> Labeling {
    let counts = lc.label_counts();
    let mut chosen = vec![false; prov.set_origin.len()];
    for &s in &sel.chosen {
        if s < chosen.len() {
            chosen[s] = true;
        }
    }
    let mut rng = SeededRng::new(seed);
    let sigma = counts
        .iter()
        .enumerate()
        .map(|(v, &n)| {
            let palette: Vec<usize> = (0..n).filter(|&l| chosen[prov.set_index(v, l)]).collect();
            if !palette.is_empty() {
                Some(palette[rng.below(palette.len())])
            } else if n > 0 {
                Some(0)
            } else {
                None
            }
        })
        .collect();
    Labeling { sigma }
}

/// `lambda(h)`: chosen sets `X(v, l)` with `v` on edge `h`.
pub fn edge_loads(lc: &LabelCoverInstance, prov: &Provenance, sel: &SetSelection) -> Vec<usize> {
    let mut per_vertex = vec![0usize; lc.n_vertices()];
    for &s in &sel.chosen {
        per_vertex[prov.set_origin[s].vertex] += 1;
    }
    (0..lc.n_edges())
        .map(|h| lc.edge_vertices(h).iter().map(|&v| per_vertex[v]).sum())
        .collect()
}

/// `lambda(h)` counted from the universe side: chosen sets meeting `U_h`.
pub fn edge_loads_by_elements(mcsp: &McspInstance, prov: &Provenance, sel: &SetSelection) -> Vec<usize> {
    let mut loads = vec![0usize; prov.n_edges];
    for &s in &sel.chosen {
        let mut last = usize::MAX;
        for &e in &mcsp.sets[s] {
            let (h, _) = prov.element_origin(e);
            if h != last {
                loads[h] += 1;
                last = h;
            }
        }
    }
    loads
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcsp::congestion;

    fn single_edge() -> LabelCoverInstance {
        LabelCoverInstance::with_uniform_labels(
            &[1, 1],
            &[2, 2],
            2,
            vec![vec![0, 0]],
            vec![vec![vec![0, 1], vec![0, 1]]],
        )
        .unwrap()
    }

    #[test]
    fn single_edge_structure() {
        let lc = single_edge();
        let (mcsp, prov) = lc_to_mcsp(&lc, 0).unwrap();
        assert_eq!(mcsp.n_sets(), 4);
        assert_eq!(mcsp.t, 2);
        assert_eq!(mcsp.m, prov.ground_size);
        let ps = &prov.partition_systems[0];
        // X(u, l) = A^0_l, X(v, l) = A^1_l
        for l in 0..2 {
            assert_eq!(mcsp.sets[prov.set_index(0, l)], ps.members(l, 0));
            assert_eq!(mcsp.sets[prov.set_index(1, l)], ps.members(l, 1));
        }
    }

    #[test]
    fn agreeing_labels_give_congestion_one() {
        let lc = single_edge();
        let (mcsp, prov) = lc_to_mcsp(&lc, 3).unwrap();
        let sel = induced_selection(&prov, &Labeling::total(vec![0, 0]));
        let c = congestion(&mcsp, &sel).unwrap();
        assert_eq!(c.max, 1);
        assert!(c.per_element.iter().all(|&x| x == 1));
    }

    #[test]
    fn disagreeing_labels_collide() {
        let lc = single_edge();
        let (mcsp, prov) = lc_to_mcsp(&lc, 3).unwrap();
        let sel = SetSelection::new(vec![prov.set_index(0, 0), prov.set_index(1, 1)]);
        let c = congestion(&mcsp, &sel).unwrap();
        let ps = &prov.partition_systems[0];
        let a = ps.members(0, 0);
        let b = ps.members(1, 1);
        let expected: Vec<usize> = (0..mcsp.m)
            .map(|z| a.contains(&z) as usize + b.contains(&z) as usize)
            .collect();
        assert_eq!(c.per_element, expected);
        assert!(a.iter().any(|z| b.contains(z)));
        assert_eq!(c.max, 2);
    }

    #[test]
    fn decode_singletons_and_fallback() {
        let lc = LabelCoverInstance::with_uniform_labels(
            &[2, 1],
            &[2, 2],
            2,
            vec![vec![0, 0], vec![1, 0]],
            vec![vec![vec![0, 1], vec![0, 1]], vec![vec![0, 1], vec![0, 1]]],
        )
        .unwrap();
        let (_, prov) = lc_to_mcsp(&lc, 0).unwrap();
        // vertices: u = 0, w = 1 (part 0), v = 2 (part 1); w untouched
        let sel = SetSelection::new(vec![prov.set_index(0, 1), prov.set_index(2, 1)]);
        let lab = decode_labeling(&lc, &sel, &prov, 99);
        assert_eq!(lab.sigma, vec![Some(1), Some(0), Some(1)]);
    }

    #[test]
    fn decode_draws_uniformly_from_palette() {
        let lc = single_edge();
        let (_, prov) = lc_to_mcsp(&lc, 0).unwrap();
        let sel = SetSelection::new(vec![prov.set_index(0, 0), prov.set_index(0, 1)]);
        let trials = 10_000;
        let ones = (0..trials)
            .filter(|&s| decode_labeling(&lc, &sel, &prov, s).sigma[0] == Some(1))
            .count();
        let freq = ones as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.05, "{freq}");
    }

    #[test]
    fn load_counts_agree() {
        let lc = single_edge();
        let (mcsp, prov) = lc_to_mcsp(&lc, 1).unwrap();
        let sel = SetSelection::new(vec![0, 1]);
        assert_eq!(edge_loads(&lc, &prov, &sel), vec![2]);
        assert_eq!(edge_loads_by_elements(&mcsp, &prov, &sel), vec![2]);
    }

    #[test]
    fn isolated_vertex_rejected() {
        let lc = LabelCoverInstance::with_uniform_labels(
            &[2, 1],
            &[2, 2],
            2,
            vec![vec![0, 0]],
            vec![vec![vec![0, 1], vec![0, 1]]],
        )
        .unwrap();
        assert!(matches!(lc_to_mcsp(&lc, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn universe_is_disjoint_union() {
        let lc = LabelCoverInstance::with_uniform_labels(
            &[2, 2],
            &[2, 2],
            2,
            vec![vec![0, 0], vec![1, 1], vec![0, 1]],
            vec![vec![vec![0, 1], vec![0, 1]]; 3],
        )
        .unwrap();
        let (mcsp, prov) = lc_to_mcsp(&lc, 0).unwrap();
        assert_eq!(mcsp.m, 3 * prov.ground_size);
        assert_eq!(prov.element_origin(prov.ground_size + 5), (1, 5));
    }
}
