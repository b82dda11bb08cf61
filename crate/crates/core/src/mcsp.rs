//! Minimum Congestion Set Packing.
//!
//! Pick exactly `t` sets so that the most-covered element is covered as few
//! times as possible. On uniform metrics this is the same problem as Robust
//! k-Median: one site per set, one client group per element, and the chosen
//! sets are exactly the closed sites.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, combinations};
use crate::error::{Error, Result};
use crate::instance::{FacilitySolution, Metric, RkmInstance};

pub const DEFAULT_GAP_ELEMENT_CAP: u128 = 1_000_000;
pub const DEFAULT_BRUTE_FORCE_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct McspInstance {
    /// Universe size; elements are `0..m`.
    pub m: usize,
    /// Sorted element lists.
    pub sets: Vec<Vec<usize>>,
    pub t: usize,
}

impl McspInstance {
    /// Sorts and dedups every set, then checks: elements in range, no empty
    /// set, the sets cover the universe, and `1 <= t <= |sets|`.
    pub fn new(m: usize, mut sets: Vec<Vec<usize>>, t: usize) -> Result<Self> {
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
        }
        let inst = Self { m, sets, t };
        inst.check()?;
        Ok(inst)
    }

    pub fn check(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidInstance("empty universe".into()));
        }
        if self.t == 0 {
            return Err(Error::InvalidInstance("t must be positive".into()));
        }
        if self.t > self.sets.len() {
            return Err(Error::InvalidInstance(format!(
                "t = {} exceeds the number of sets {}",
                self.t,
                self.sets.len()
            )));
        }
        let mut covered = vec![false; self.m];
        for (i, s) in self.sets.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidInstance(format!("set {i} is empty")));
            }
            if !s.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidInstance(format!("set {i} is not sorted and duplicate-free")));
            }
            for &e in s {
                if e >= self.m {
                    return Err(Error::InvalidInstance(format!(
                        "set {i} contains element {e} outside the universe of size {}",
                        self.m
                    )));
                }
                covered[e] = true;
            }
        }
        if let Some(e) = covered.iter().position(|&c| !c) {
            return Err(Error::InvalidInstance(format!("element {e} is in no set")));
        }
        Ok(())
    }

    pub fn n_sets(&self) -> usize {
        self.sets.len()
    }

    /// Number of sets containing each element.
    pub fn frequencies(&self) -> Vec<usize> {
        let mut freq = vec![0; self.m];
        for s in &self.sets {
            for &e in s {
                freq[e] += 1;
            }
        }
        freq
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SetSelection {
    pub chosen: Vec<usize>,
}

impl SetSelection {
    pub fn new(mut chosen: Vec<usize>) -> Self {
        chosen.sort_unstable();
        chosen.dedup();
        Self { chosen }
    }

    pub fn validate(&self, inst: &McspInstance) -> Result<()> {
        if let Some(&bad) = self.chosen.iter().find(|&&s| s >= inst.n_sets()) {
            return Err(Error::InvalidSelection(format!("set {bad} out of range")));
        }
        if self.chosen.len() != inst.t {
            return Err(Error::InvalidSelection(format!(
                "{} sets chosen, expected t = {}",
                self.chosen.len(),
                inst.t
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Congestion {
    pub max: usize,
    pub per_element: Vec<usize>,
}

/// Congestion of a size-`t` selection.
pub fn congestion(inst: &McspInstance, sel: &SetSelection) -> Result<Congestion> {
    sel.validate(inst)?;
    Ok(congestion_of_sets(inst, &sel.chosen))
}

/// Congestion of any collection of set indices (no size check).
pub fn congestion_of_sets(inst: &McspInstance, chosen: &[usize]) -> Congestion {
    let mut per_element = vec![0usize; inst.m];
    for &s in chosen {
        for &e in &inst.sets[s] {
            per_element[e] += 1;
        }
    }
    let max = per_element.iter().copied().max().unwrap_or(0);
    Congestion { max, per_element }
}

/// Uniform-metric Robust k-Median instance with the same objective values.
///
/// Site `i` stands for set `i` and carries one client at the same point;
/// group `e` holds the clients of the sets containing element `e`;
/// `k = |sets| - t`. Closing exactly the chosen sets reproduces the
/// congestion as the objective.
pub fn mcsp_to_rkm(inst: &McspInstance) -> Result<RkmInstance> {
    let n = inst.n_sets();
    let k = n - inst.t;
    if k == 0 {
        return Err(Error::Parameter(
            "t equals the number of sets: no facility may be opened (k = 0)".into(),
        ));
    }
    let mut groups = vec![Vec::new(); inst.m];
    for (i, s) in inst.sets.iter().enumerate() {
        for &e in s {
            groups[e].push(i);
        }
    }
    RkmInstance::on_points(Metric::Uniform { n }, groups, k)
}

/// Facility solution corresponding to a selection: open every unchosen set.
pub fn selection_to_facilities(n_sets: usize, sel: &SetSelection) -> FacilitySolution {
    let mut chosen = vec![false; n_sets];
    for &s in &sel.chosen {
        chosen[s] = true;
    }
    FacilitySolution::new((0..n_sets).filter(|&s| !chosen[s]).collect())
}

/// Selection corresponding to a facility solution: choose every closed site.
pub fn facilities_to_selection(n_sites: usize, sol: &FacilitySolution) -> SetSelection {
    let mut open = vec![false; n_sites];
    for &f in &sol.open {
        open[f] = true;
    }
    SetSelection::new((0..n_sites).filter(|&f| !open[f]).collect())
}

/// Inverse of [`mcsp_to_rkm`] for uniform instances whose clients sit on sites.
///
/// Set `f` collects the groups with a client on site `f`'s point. Sites must
/// sit on distinct points, and a group may not list two clients on the same
/// point (the MCSP side cannot count multiplicity). Every site must be used by
/// some group, otherwise its set would be empty.
pub fn rkm_uniform_to_mcsp(inst: &RkmInstance) -> Result<McspInstance> {
    if !inst.metric.is_uniform() {
        return Err(Error::UnsupportedMetric(format!(
            "expected a uniform metric, found {}",
            inst.metric.kind()
        )));
    }
    let n_points = inst.metric.n_points();
    let mut site_at_point = vec![usize::MAX; n_points];
    for (f, &p) in inst.facility_sites.iter().enumerate() {
        if site_at_point[p] != usize::MAX {
            return Err(Error::InvalidInstance(format!(
                "sites {} and {f} share point {p}",
                site_at_point[p]
            )));
        }
        site_at_point[p] = f;
    }
    let mut sets = vec![Vec::new(); inst.n_facilities()];
    for (g, members) in inst.groups.iter().enumerate() {
        let mut seen = Vec::with_capacity(members.len());
        for &c in members {
            let p = inst.client_points[c];
            let f = site_at_point[p];
            if f == usize::MAX {
                return Err(Error::InvalidInstance(format!(
                    "client {c} does not coincide with a facility site"
                )));
            }
            if seen.contains(&f) {
                return Err(Error::InvalidInstance(format!(
                    "group {g} lists two clients on point {p}"
                )));
            }
            seen.push(f);
            sets[f].push(g);
        }
    }
    if let Some(f) = sets.iter().position(|s| s.is_empty()) {
        return Err(Error::InvalidInstance(format!(
            "site {f} serves no group; its set would be empty"
        )));
    }
    let t = inst.n_facilities() - inst.k;
    if t == 0 {
        return Err(Error::Parameter("k equals the facility count: t = 0".into()));
    }
    McspInstance::new(inst.n_groups(), sets, t)
}

/// The integrality-gap family with gap `d`.
///
/// With `eta = d^2`, the universe is every size-`d` subset of `[eta]` in
/// lexicographic order, set `X_i` holds the subsets containing `i`, and
/// `t = d`. Every element lies in exactly `d` sets, so `y = 1/d` is a
/// fractional solution of congestion one, while any `d` chosen sets share
/// the element formed by their indices.
pub fn build_integrality_gap(d: usize) -> Result<McspInstance> {
    build_integrality_gap_capped(d, DEFAULT_GAP_ELEMENT_CAP)
}

pub fn build_integrality_gap_capped(d: usize, element_cap: u128) -> Result<McspInstance> {
    if d < 2 {
        return Err(Error::Parameter(format!("integrality gap needs d >= 2, got {d}")));
    }
    let eta = d * d;
    let m = binomial(eta as u64, d as u64);
    if m > element_cap {
        return Err(Error::SizeCap {
            what: "integrality-gap universe".into(),
            size: m,
            cap: element_cap,
        });
    }
    let mut sets = vec![Vec::new(); eta];
    let mut m = 0;
    for subset in combinations(eta, d) {
        for &i in &subset {
            sets[i].push(m);
        }
        m += 1;
    }
    McspInstance::new(m, sets, d)
}

/// Element labels of the integrality-gap universe (1-based subsets).
pub fn integrality_gap_elements(d: usize) -> Vec<Vec<usize>> {
    combinations(d * d, d)
        .map(|s| s.into_iter().map(|i| i + 1).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct McspOptimum {
    pub opt_value: usize,
    pub witness: SetSelection,
}

/// Exact minimum congestion by enumeration; the witness is the
/// lexicographically smallest optimal selection.
pub fn brute_force_mcsp(inst: &McspInstance) -> Result<McspOptimum> {
    brute_force_mcsp_capped(inst, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn brute_force_mcsp_capped(inst: &McspInstance, cap: u128) -> Result<McspOptimum> {
    let n = inst.n_sets();
    let count = binomial(n as u64, inst.t as u64);
    if count > cap {
        return Err(Error::SizeCap {
            what: "MCSP selections".into(),
            size: count,
            cap,
        });
    }
    let mut search = McspSearch {
        inst,
        counts: vec![0; inst.m],
        stack: Vec::with_capacity(inst.t),
        best: usize::MAX,
        witness: Vec::new(),
    };
    search.descend(0, 0);
    Ok(McspOptimum {
        opt_value: search.best,
        witness: SetSelection::new(search.witness),
    })
}

struct McspSearch<'a> {
    inst: &'a McspInstance,
    counts: Vec<usize>,
    stack: Vec<usize>,
    best: usize,
    witness: Vec<usize>,
}

impl McspSearch<'_> {
    // Depth-first in lexicographic order; congestion only grows with depth,
    // so any branch already at the incumbent value is cut.
    fn descend(&mut self, next: usize, current_max: usize) {
        let t = self.inst.t;
        if self.stack.len() == t {
            if current_max < self.best {
                self.best = current_max;
                self.witness = self.stack.clone();
            }
            return;
        }
        let remaining = t - self.stack.len();
        for s in next..=(self.inst.n_sets() - remaining) {
            let mut new_max = current_max;
            for &e in &self.inst.sets[s] {
                self.counts[e] += 1;
                new_max = new_max.max(self.counts[e]);
            }
            if new_max < self.best {
                self.stack.push(s);
                self.descend(s + 1, new_max);
                self.stack.pop();
            }
            for &e in &self.inst.sets[s] {
                self.counts[e] -= 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::eval_objective;

    fn two_sets() -> McspInstance {
        McspInstance::new(3, vec![vec![0, 1], vec![1, 2]], 2).unwrap()
    }

    #[test]
    fn congestion_counts_overlap() {
        let c = congestion(&two_sets(), &SetSelection::new(vec![0, 1])).unwrap();
        assert_eq!(c.per_element, vec![1, 2, 1]);
        assert_eq!(c.max, 2);
    }

    #[test]
    fn single_set_has_congestion_one() {
        let inst = McspInstance::new(3, vec![vec![0, 1], vec![1, 2]], 1).unwrap();
        for s in 0..2 {
            assert_eq!(congestion(&inst, &SetSelection::new(vec![s])).unwrap().max, 1);
        }
    }

    #[test]
    fn wrong_selection_size_is_rejected() {
        assert!(matches!(
            congestion(&two_sets(), &SetSelection::new(vec![0])),
            Err(Error::InvalidSelection(_))
        ));
    }

    #[test]
    fn gap_instance_two_sets_share_an_element() {
        let inst = build_integrality_gap(2).unwrap();
        let c = congestion(&inst, &SetSelection::new(vec![0, 1])).unwrap();
        // element {1,2} is index 0 in lexicographic order
        assert_eq!(c.per_element[0], 2);
        assert_eq!(c.max, 2);
    }

    #[test]
    fn gap_instance_d2_shape() {
        let inst = build_integrality_gap(2).unwrap();
        assert_eq!(inst.m, 6);
        assert_eq!(inst.n_sets(), 4);
        assert_eq!(inst.t, 2);
        assert!(inst.sets.iter().all(|s| s.len() == 3));
        assert_eq!(
            integrality_gap_elements(2),
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]
        );
        assert_eq!(inst.sets[0], vec![0, 1, 2]);
    }

    #[test]
    fn gap_instance_frequencies_and_sizes() {
        for d in 2..=4 {
            let inst = build_integrality_gap(d).unwrap();
            let eta = (d * d) as u64;
            assert!(inst.frequencies().iter().all(|&f| f == d));
            let size = binomial(eta - 1, d as u64 - 1) as usize;
            assert!(inst.sets.iter().all(|s| s.len() == size));
        }
    }

    #[test]
    fn gap_parameter_and_cap_errors() {
        assert!(matches!(build_integrality_gap(1), Err(Error::Parameter(_))));
        assert!(matches!(
            build_integrality_gap_capped(3, 10),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn gap_optimum_equals_d() {
        assert_eq!(brute_force_mcsp(&build_integrality_gap(2).unwrap()).unwrap().opt_value, 2);
        assert_eq!(brute_force_mcsp(&build_integrality_gap(3).unwrap()).unwrap().opt_value, 3);
    }

    #[test]
    fn disjoint_sets_have_optimum_one() {
        let inst = McspInstance::new(6, vec![vec![0, 1], vec![2], vec![3, 4], vec![5]], 3).unwrap();
        let opt = brute_force_mcsp(&inst).unwrap();
        assert_eq!(opt.opt_value, 1);
        assert_eq!(opt.witness.chosen, vec![0, 1, 2]);
    }

    #[test]
    fn all_sets_chosen_gives_max_frequency() {
        let inst = McspInstance::new(3, vec![vec![0, 1], vec![1, 2], vec![1]], 3).unwrap();
        assert_eq!(brute_force_mcsp(&inst).unwrap().opt_value, 3);
    }

    #[test]
    fn witness_is_lexicographically_smallest() {
        let inst = McspInstance::new(3, vec![vec![0], vec![1], vec![2], vec![0, 1, 2]], 2).unwrap();
        assert_eq!(brute_force_mcsp(&inst).unwrap().witness.chosen, vec![0, 1]);
    }

    #[test]
    fn brute_force_cap() {
        let inst = build_integrality_gap(3).unwrap();
        assert!(matches!(brute_force_mcsp_capped(&inst, 10), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn invalid_instances_rejected() {
        assert!(McspInstance::new(3, vec![vec![0, 1]], 1).is_err());
        assert!(McspInstance::new(2, vec![vec![0, 1], vec![]], 1).is_err());
        assert!(McspInstance::new(2, vec![vec![0, 1]], 2).is_err());
        assert!(McspInstance::new(2, vec![vec![0, 5]], 1).is_err());
    }

    #[test]
    fn reduction_shape_and_value() {
        let inst = McspInstance::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]], 1).unwrap();
        let rkm = mcsp_to_rkm(&inst).unwrap();
        assert_eq!(rkm.n_facilities(), 3);
        assert_eq!(rkm.k, 2);
        assert_eq!(rkm.groups.len(), 3);
        assert!(rkm.groups.iter().all(|g| g.len() == 2));
        for s in 0..3 {
            let sel = SetSelection::new(vec![s]);
            let sol = selection_to_facilities(3, &sel);
            let ev = eval_objective(&rkm, &sol).unwrap();
            assert_eq!(ev.cost, congestion(&inst, &sel).unwrap().max as f64);
            assert_eq!(facilities_to_selection(3, &sol), sel);
        }
    }

    #[test]
    fn whole_universe_single_set_rejected() {
        let inst = McspInstance::new(3, vec![vec![0, 1, 2]], 1).unwrap();
        assert!(matches!(mcsp_to_rkm(&inst), Err(Error::Parameter(_))));
    }

    #[test]
    fn round_trip_restores_sets() {
        let inst = build_integrality_gap(2).unwrap();
        let back = rkm_uniform_to_mcsp(&mcsp_to_rkm(&inst).unwrap()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn reverse_rejects_non_uniform_and_full_k() {
        let line = RkmInstance::on_points(Metric::Line { points: vec![0.0, 1.0] }, vec![vec![0, 1]], 1).unwrap();
        assert!(matches!(rkm_uniform_to_mcsp(&line), Err(Error::UnsupportedMetric(_))));
        let full = RkmInstance::on_points(Metric::Uniform { n: 2 }, vec![vec![0, 1]], 2).unwrap();
        assert!(matches!(rkm_uniform_to_mcsp(&full), Err(Error::Parameter(_))));
    }

    #[test]
    fn reverse_rejects_uncovered_site() {
        let inst = RkmInstance::on_points(Metric::Uniform { n: 3 }, vec![vec![0, 1]], 1).unwrap();
        assert!(matches!(rkm_uniform_to_mcsp(&inst), Err(Error::InvalidInstance(_))));
    }
}
