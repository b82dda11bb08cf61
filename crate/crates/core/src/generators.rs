//! Random planar instance families.
//!
//! Facilities are always uniform on the `[0, 100]^2` square. Clients are
//! uniform on the square (`uniform`) or drawn from one rotated Gaussian per
//! group (`gauss_const` with equal group sizes, `gauss_exp` with
//! exponentially distributed group sizes). Gaussian clients are not clipped
//! to the square.
//!
//! Points are numbered facilities first, then clients group by group. The
//! draw order is fixed: facility coordinates, then per group its parameters
//! followed by its clients.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Metric, RkmInstance};
use crate::rng::SeededRng;

pub const SQUARE_SIDE: f64 = 100.0;
pub const MAX_VARIANCE: f64 = 50.0;
pub const DEFAULT_K: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Uniform,
    GaussConst,
    GaussExp,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Uniform, Family::GaussConst, Family::GaussExp];

    pub fn name(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::GaussConst => "gauss_const",
            Family::GaussExp => "gauss_exp",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown family {s:?} (uniform, gauss_const, gauss_exp)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub family: Family,
    pub n_facilities: usize,
    pub n_groups: usize,
    /// Group size of the `uniform` and `gauss_const` families.
    pub clients_per_group: usize,
    /// Mean group size of the `gauss_exp` family.
    pub mean_clients_per_group: f64,
    pub k: usize,
    pub seed: u64,
}

impl GenSpec {
    /// Spec with `k = 7`; `clients_per_group` doubles as the exponential mean.
    pub fn new(family: Family, n_facilities: usize, n_groups: usize, clients_per_group: usize, seed: u64) -> Self {
        Self {
            family,
            n_facilities,
            n_groups,
            clients_per_group,
            mean_clients_per_group: clients_per_group as f64,
            k: DEFAULT_K,
            seed,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_facilities == 0 || self.n_groups == 0 {
            return Err(Error::Parameter("n_facilities and n_groups must be positive".into()));
        }
        if self.k == 0 || self.k > self.n_facilities {
            return Err(Error::Parameter(format!(
                "k = {} must lie in [1, n_facilities = {}]",
                self.k, self.n_facilities
            )));
        }
        match self.family {
            Family::GaussExp => {
                if !(self.mean_clients_per_group.is_finite() && self.mean_clients_per_group > 0.0) {
                    return Err(Error::Parameter("mean_clients_per_group must be positive".into()));
                }
            }
            _ => {
                if self.clients_per_group == 0 {
                    return Err(Error::Parameter("clients_per_group must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

/// Drawn parameters of one Gaussian group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianGroup {
    pub mean: [f64; 2],
    /// Diagonal `(v1, v2)` before rotation.
    pub variances: [f64; 2],
    pub theta: f64,
    /// `R(theta) diag(v1, v2) R(theta)^T`.
    pub covariance: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenMetadata {
    pub spec: GenSpec,
    pub group_sizes: Vec<usize>,
    /// Empty for the uniform family.
    pub gaussians: Vec<GaussianGroup>,
    pub clipped: bool,
    pub group_size_rounding: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedInstance {
    pub instance: RkmInstance,
    pub metadata: GenMetadata,
}

fn uniform_point(rng: &mut SeededRng) -> [f64; 2] {
    let x = rng.uniform_range(0.0, SQUARE_SIDE);
    let y = rng.uniform_range(0.0, SQUARE_SIDE);
    [x, y]
}

/// Group size `max(1, floor(x + 1/2))` for an exponential draw `x`.
pub fn round_group_size(x: f64) -> usize {
    ((x + 0.5).floor() as usize).max(1)
}

pub fn generate(spec: &GenSpec) -> Result<GeneratedInstance> {
    spec.validate()?;
    let mut rng = SeededRng::new(spec.seed);
    let mut points: Vec<[f64; 2]> = (0..spec.n_facilities).map(|_| uniform_point(&mut rng)).collect();
    let mut groups = Vec::with_capacity(spec.n_groups);
    let mut group_sizes = Vec::with_capacity(spec.n_groups);
    let mut gaussians = Vec::new();
    for _ in 0..spec.n_groups {
        let first = points.len() - spec.n_facilities;
        let size = match spec.family {
            Family::Uniform => {
                for _ in 0..spec.clients_per_group {
                    points.push(uniform_point(&mut rng));
                }
                spec.clients_per_group
            }
            Family::GaussConst | Family::GaussExp => {
                let v1 = rng.uniform_range(0.0, MAX_VARIANCE);
                let v2 = rng.uniform_range(0.0, MAX_VARIANCE);
                let theta = rng.uniform_range(0.0, 2.0 * std::f64::consts::PI);
                let mean = uniform_point(&mut rng);
                let size = if spec.family == Family::GaussExp {
                    round_group_size(rng.exponential(spec.mean_clients_per_group))
                } else {
                    spec.clients_per_group
                };
                let (s, c) = theta.sin_cos();
                let (r1, r2) = (v1.sqrt(), v2.sqrt());
                for _ in 0..size {
                    let (z1, z2) = rng.normal_pair();
                    points.push([mean[0] + c * r1 * z1 - s * r2 * z2, mean[1] + s * r1 * z1 + c * r2 * z2]);
                }
                let covariance = [
                    [c * c * v1 + s * s * v2, c * s * (v1 - v2)],
                    [c * s * (v1 - v2), s * s * v1 + c * c * v2],
                ];
                gaussians.push(GaussianGroup {
                    mean,
                    variances: [v1, v2],
                    theta,
                    covariance,
                });
                size
            }
        };
        groups.push((first..first + size).collect());
        group_sizes.push(size);
    }
    let n_clients = points.len() - spec.n_facilities;
    let instance = RkmInstance::new(
        Metric::Planar { points },
        (0..spec.n_facilities).collect(),
        (spec.n_facilities..spec.n_facilities + n_clients).collect(),
        groups,
        spec.k,
    )?;
    Ok(GeneratedInstance {
        instance,
        metadata: GenMetadata {
            spec: spec.clone(),
            group_sizes,
            gaussians,
            clipped: false,
            group_size_rounding: "max(1, round half up)".into(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(inst: &RkmInstance) -> &[[f64; 2]] {
        match &inst.metric {
            Metric::Planar { points } => points,
            _ => unreachable!(),
        }
    }

    #[test]
    fn uniform_ranges_and_sizes() {
        let g = generate(&GenSpec::new(Family::Uniform, 10, 4, 6, 3)).unwrap();
        let inst = &g.instance;
        assert_eq!(inst.n_facilities(), 10);
        assert_eq!(inst.n_clients(), 24);
        assert!(inst.groups.iter().all(|g| g.len() == 6));
        assert_eq!(inst.k, 7);
        assert!(points(inst)
            .iter()
            .all(|p| (0.0..=100.0).contains(&p[0]) && (0.0..=100.0).contains(&p[1])));
    }

    #[test]
    fn deterministic_per_seed() {
        for family in Family::ALL {
            let spec = GenSpec::new(family, 8, 3, 5, 11);
            let a = serde_json::to_string(&generate(&spec).unwrap()).unwrap();
            let b = serde_json::to_string(&generate(&spec).unwrap()).unwrap();
            assert_eq!(a, b);
            let c = serde_json::to_string(&generate(&GenSpec { seed: 12, ..spec }).unwrap()).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn gaussian_moments_match_drawn_parameters() {
        let g = generate(&GenSpec::new(Family::GaussConst, 1, 1, 10_000, 5).with_k(1)).unwrap();
        let pts = &points(&g.instance)[1..];
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
        let my = pts.iter().map(|p| p[1]).sum::<f64>() / n;
        let mut cov = [[0.0; 2]; 2];
        for p in pts {
            let d = [p[0] - mx, p[1] - my];
            for a in 0..2 {
                for b in 0..2 {
                    cov[a][b] += d[a] * d[b] / (n - 1.0);
                }
            }
        }
        let gp = &g.metadata.gaussians[0];
        let sigma = gp.covariance;
        assert!((mx - gp.mean[0]).abs() <= 3.0 * (sigma[0][0] / n).sqrt() + 1e-9);
        assert!((my - gp.mean[1]).abs() <= 3.0 * (sigma[1][1] / n).sqrt() + 1e-9);
        // eigenvalues of the sample covariance against the drawn variances
        let tr = cov[0][0] + cov[1][1];
        let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let mut eig = [tr / 2.0 - disc, tr / 2.0 + disc];
        let mut want = gp.variances;
        eig.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (e, w) in eig.iter().zip(want) {
            // variance of a sample variance is about 2 v^2 / n
            let sd = (2.0 * w * w / n).sqrt();
            assert!((e - w).abs() <= 3.0 * sd + 0.1, "{e} vs {w}");
        }
    }

    #[test]
    fn exponential_group_sizes() {
        let mut spec = GenSpec::new(Family::GaussExp, 7, 1000, 110, 9);
        spec.mean_clients_per_group = 110.0;
        let g = generate(&spec).unwrap();
        let mean = g.metadata.group_sizes.iter().sum::<usize>() as f64 / 1000.0;
        assert!((mean - 110.0).abs() <= 10.0, "{mean}");
        assert!(g.metadata.group_sizes.iter().all(|&s| s >= 1));
        assert_eq!(round_group_size(0.2), 1);
        assert_eq!(round_group_size(2.5), 3);
        assert_eq!(round_group_size(2.49), 2);
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&GenSpec::new(Family::Uniform, 5, 2, 3, 0)).is_err());
        assert!(generate(&GenSpec::new(Family::Uniform, 8, 0, 3, 0)).is_err());
        assert!("gauss".parse::<Family>().is_err());
        assert_eq!("gauss_exp".parse::<Family>().unwrap(), Family::GaussExp);
    }
}
