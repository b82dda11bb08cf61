//! Robust k-Median instances, facility solutions and the min-max objective.
//!
//! An instance lives on a set of metric points. Facility sites and client
//! points are both lists of point indices, so a client may sit exactly on a
//! site. Groups are lists of client indices; the objective is the largest,
//! over groups, of the summed distance from each member client to its nearest
//! open site. A client listed twice in a group is counted twice.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Relative tolerance used when validating metric axioms.
pub const METRIC_TOL: f64 = 1e-9;

/// Tolerance for strict-improvement comparisons inside the solvers.
pub const IMPROVEMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Metric {
    /// Dense symmetric distance matrix.
    Explicit { matrix: Vec<Vec<f64>> },
    /// `n` points at pairwise distance one.
    Uniform { n: usize },
    /// Points in the plane with Euclidean distance.
    Planar { points: Vec<[f64; 2]> },
    /// Points on the real line.
    Line { points: Vec<f64> },
}

impl Metric {
    pub fn n_points(&self) -> usize {
        match self {
            Metric::Explicit { matrix } => matrix.len(),
            Metric::Uniform { n } => *n,
            Metric::Planar { points } => points.len(),
            Metric::Line { points } => points.len(),
        }
    }

    pub fn distance(&self, p: usize, q: usize) -> f64 {
        match self {
            Metric::Explicit { matrix } => matrix[p][q],
            Metric::Uniform { .. } => {
                if p == q {
                    0.0
                } else {
                    1.0
                }
            }
            Metric::Planar { points } => {
                let dx = points[p][0] - points[q][0];
                let dy = points[p][1] - points[q][1];
                dx.hypot(dy)
            }
            Metric::Line { points } => (points[p] - points[q]).abs(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Metric::Explicit { .. } => "explicit",
            Metric::Uniform { .. } => "uniform",
            Metric::Planar { .. } => "planar",
            Metric::Line { .. } => "line",
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, Metric::Uniform { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RkmInstance {
    pub metric: Metric,
    /// Point index of every facility site.
    pub facility_sites: Vec<usize>,
    /// Point index of every client.
    pub client_points: Vec<usize>,
    /// Client indices per group.
    pub groups: Vec<Vec<usize>>,
    pub k: usize,
}

impl RkmInstance {
    /// Builds an instance after the cheap structural checks. The O(n³)
    /// triangle-inequality check only runs in [`validate_instance`].
    pub fn new(
        metric: Metric,
        facility_sites: Vec<usize>,
        client_points: Vec<usize>,
        groups: Vec<Vec<usize>>,
        k: usize,
    ) -> Result<Self> {
        let inst = Self {
            metric,
            facility_sites,
            client_points,
            groups,
            k,
        };
        let violations = inst.structural_violations();
        if let Some(v) = violations.first() {
            return Err(Error::InvalidInstance(v.to_string()));
        }
        Ok(inst)
    }

    /// The classic form: every point is both a site and a client.
    pub fn on_points(metric: Metric, groups: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        let n = metric.n_points();
        Self::new(metric, (0..n).collect(), (0..n).collect(), groups, k)
    }

    pub fn n_facilities(&self) -> usize {
        self.facility_sites.len()
    }

    pub fn n_clients(&self) -> usize {
        self.client_points.len()
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    /// Distance between client `c` and facility site `f`.
    pub fn distance(&self, c: usize, f: usize) -> f64 {
        self.metric
            .distance(self.client_points[c], self.facility_sites[f])
    }

    /// Dense client-by-site distance table.
    pub fn cost_matrix(&self) -> CostMatrix {
        let n_f = self.n_facilities();
        let mut data = Vec::with_capacity(self.n_clients() * n_f);
        for c in 0..self.n_clients() {
            for f in 0..n_f {
                data.push(self.distance(c, f));
            }
        }
        CostMatrix {
            n_facilities: n_f,
            data,
        }
    }

    fn structural_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n_points = self.metric.n_points();
        let n_f = self.n_facilities();
        if n_f == 0 {
            out.push(Violation::NoFacilities);
        }
        if self.k == 0 {
            out.push(Violation::ZeroK);
        }
        if self.k > n_f {
            out.push(Violation::KExceedsFacilities { k: self.k, n_f });
        }
        if self.groups.is_empty() {
            out.push(Violation::NoGroups);
        }
        for (i, &p) in self.facility_sites.iter().enumerate() {
            if p >= n_points {
                out.push(Violation::PointOutOfRange {
                    field: "facility_sites",
                    index: i,
                    point: p,
                });
            }
        }
        for (i, &p) in self.client_points.iter().enumerate() {
            if p >= n_points {
                out.push(Violation::PointOutOfRange {
                    field: "client_points",
                    index: i,
                    point: p,
                });
            }
        }
        for (g, members) in self.groups.iter().enumerate() {
            if members.is_empty() {
                out.push(Violation::EmptyGroup(g));
            }
            for (pos, &c) in members.iter().enumerate() {
                if c >= self.n_clients() {
                    out.push(Violation::ClientOutOfRange {
                        group: g,
                        position: pos,
                        client: c,
                    });
                }
            }
        }
        match &self.metric {
            Metric::Explicit { matrix } => {
                let n = matrix.len();
                for (i, row) in matrix.iter().enumerate() {
                    if row.len() != n {
                        out.push(Violation::NotSquare { row: i, len: row.len(), n });
                    }
                }
            }
            Metric::Planar { points } => {
                for (i, p) in points.iter().enumerate() {
                    if !p[0].is_finite() || !p[1].is_finite() {
                        out.push(Violation::NonFiniteCoordinate(i));
                    }
                }
            }
            Metric::Line { points } => {
                for (i, p) in points.iter().enumerate() {
                    if !p.is_finite() {
                        out.push(Violation::NonFiniteCoordinate(i));
                    }
                }
            }
            Metric::Uniform { .. } => {}
        }
        out
    }
}

/// Row-major `n_clients x n_facilities` distance table.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    n_facilities: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    #[inline]
    pub fn get(&self, client: usize, site: usize) -> f64 {
        self.data[client * self.n_facilities + site]
    }

    #[inline]
    pub fn row(&self, client: usize) -> &[f64] {
        &self.data[client * self.n_facilities..(client + 1) * self.n_facilities]
    }

    pub fn n_facilities(&self) -> usize {
        self.n_facilities
    }
}

/// A set of open facility sites, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FacilitySolution {
    pub open: Vec<usize>,
}

impl FacilitySolution {
    pub fn new(mut open: Vec<usize>) -> Self {
        open.sort_unstable();
        open.dedup();
        Self { open }
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    /// Checks `|open| = k` and that every index names a site.
    pub fn validate(&self, inst: &RkmInstance) -> Result<()> {
        if let Some(&bad) = self.open.iter().find(|&&f| f >= inst.n_facilities()) {
            return Err(Error::InvalidSelection(format!(
                "site {bad} out of range (n_f = {})",
                inst.n_facilities()
            )));
        }
        if self.open.len() != inst.k {
            return Err(Error::InvalidSelection(format!(
                "{} sites open, expected k = {}",
                self.open.len(),
                inst.k
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub cost: f64,
    pub group_costs: Vec<f64>,
    /// Most expensive group; lowest index on ties.
    pub argmax: usize,
}

/// Objective of an open-site set: the maximum over groups of the summed
/// nearest-open-site distances.
///
/// Any non-empty set of valid sites is accepted, so partial and oversized
/// sets can be compared; use [`FacilitySolution::validate`] for the `|F| = k`
/// contract.
pub fn eval_objective(inst: &RkmInstance, sol: &FacilitySolution) -> Result<Evaluation> {
    if sol.is_empty() {
        return Err(Error::NoFacilitiesOpen);
    }
    if let Some(&bad) = sol.open.iter().find(|&&f| f >= inst.n_facilities()) {
        return Err(Error::InvalidSelection(format!("site {bad} out of range")));
    }
    let nearest: Vec<f64> = (0..inst.n_clients())
        .map(|c| {
            sol.open
                .iter()
                .map(|&f| inst.distance(c, f))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(evaluation_from_client_costs(inst, &nearest))
}

pub(crate) fn evaluation_from_client_costs(inst: &RkmInstance, client_cost: &[f64]) -> Evaluation {
    let group_costs: Vec<f64> = inst
        .groups
        .iter()
        .map(|g| g.iter().map(|&c| client_cost[c]).sum())
        .collect();
    let (argmax, cost) = argmax_lowest(&group_costs);
    Evaluation {
        cost,
        group_costs,
        argmax,
    }
}

fn argmax_lowest(values: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// One broken invariant of an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoFacilities,
    ZeroK,
    KExceedsFacilities { k: usize, n_f: usize },
    NoGroups,
    EmptyGroup(usize),
    ClientOutOfRange { group: usize, position: usize, client: usize },
    PointOutOfRange { field: &'static str, index: usize, point: usize },
    NotSquare { row: usize, len: usize, n: usize },
    NonFiniteCoordinate(usize),
    NegativeDistance { i: usize, j: usize, d: f64 },
    NonzeroDiagonal { i: usize, d: f64 },
    Asymmetric { i: usize, j: usize },
    TriangleInequality { i: usize, j: usize, l: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoFacilities => write!(f, "no facility sites"),
            Violation::ZeroK => write!(f, "k must be positive"),
            Violation::KExceedsFacilities { k, n_f } => {
                write!(f, "k exceeds facility count ({k} > {n_f})")
            }
            Violation::NoGroups => write!(f, "no client groups"),
            Violation::EmptyGroup(g) => write!(f, "group {g} is empty"),
            Violation::ClientOutOfRange { group, position, client } => write!(
                f,
                "groups[{group}][{position}]: client index {client} out of range"
            ),
            Violation::PointOutOfRange { field, index, point } => {
                write!(f, "{field}[{index}]: point index {point} out of range")
            }
            Violation::NotSquare { row, len, n } => {
                write!(f, "distance matrix not square: row {row} has {len} entries, expected {n}")
            }
            Violation::NonFiniteCoordinate(i) => write!(f, "point {i} has a non-finite coordinate"),
            Violation::NegativeDistance { i, j, d } => {
                write!(f, "negative or non-finite distance d({i},{j}) = {d}")
            }
            Violation::NonzeroDiagonal { i, d } => write!(f, "nonzero diagonal d({i},{i}) = {d}"),
            Violation::Asymmetric { i, j } => write!(f, "asymmetric distance between {i} and {j}"),
            Violation::TriangleInequality { i, j, l } => write!(
                f,
                "triangle inequality fails: d({i},{l}) > d({i},{j}) + d({j},{l})"
            ),
        }
    }
}

/// Checks every instance and metric invariant, including the O(n³) triangle
/// inequality for explicit matrices. Returns all violations found.
pub fn validate_instance(inst: &RkmInstance) -> Vec<Violation> {
    let mut out = inst.structural_violations();
    if let Metric::Explicit { matrix } = &inst.metric {
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return out;
        }
        let scale = matrix
            .iter()
            .flatten()
            .fold(1.0f64, |m, &d| if d.is_finite() { m.max(d.abs()) } else { m });
        let tol = METRIC_TOL * scale;
        for i in 0..n {
            if matrix[i][i].abs() > tol {
                out.push(Violation::NonzeroDiagonal { i, d: matrix[i][i] });
            }
            for j in 0..n {
                let d = matrix[i][j];
                if !d.is_finite() || d < -tol {
                    out.push(Violation::NegativeDistance { i, j, d });
                }
                if j > i && (d - matrix[j][i]).abs() > tol {
                    out.push(Violation::Asymmetric { i, j });
                }
            }
        }
        for i in 0..n {
            for l in (i + 1)..n {
                for j in 0..n {
                    if j != i && j != l && matrix[i][l] > matrix[i][j] + matrix[j][l] + tol {
                        out.push(Violation::TriangleInequality { i, j, l });
                        break;
                    }
                }
            }
        }
    }
    out
}
