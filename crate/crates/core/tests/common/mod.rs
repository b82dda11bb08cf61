#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use rkm_core::generators::{generate, Family, GenSpec};
use rkm_core::lp::{LpModel, Sense};
use rkm_core::mcsp::McspInstance;
use rkm_core::rng::SeededRng;
use rkm_core::RkmInstance;

/// Random MCSP instance with `1..=max_m` elements, `2..=max_sets` sets and
/// `t < |sets|`. Uncovered elements are added to a random set.
pub fn random_mcsp(rng: &mut SeededRng, max_m: usize, max_sets: usize) -> McspInstance {
    let m = 1 + rng.below(max_m);
    let n = 2 + rng.below(max_sets - 1);
    let t = 1 + rng.below(n - 1);
    let mut sets: Vec<Vec<usize>> = (0..n)
        .map(|_| (0..m).filter(|_| rng.uniform() < 0.4).collect())
        .collect();
    for e in 0..m {
        if !sets.iter().any(|s| s.contains(&e)) {
            let i = rng.below(n);
            sets[i].push(e);
        }
    }
    for s in &mut sets {
        if s.is_empty() {
            s.push(rng.below(m));
        }
    }
    McspInstance::new(m, sets, t).unwrap()
}

pub fn small_instance(family: Family, n_facilities: usize, n_groups: usize, cpg: usize, k: usize, seed: u64) -> RkmInstance {
    generate(&GenSpec::new(family, n_facilities, n_groups, cpg, seed).with_k(k))
        .unwrap()
        .instance
}

/// Outcome of the rational vertex enumeration.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleLp {
    Infeasible,
    Optimal(BigRational),
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coefficient")
}

/// Solves `A x = b` exactly; `None` when singular.
fn solve_exact(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= &f * p;
                }
                let v = &f * &b[col];
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Minimum of a model with finite bounds, by enumerating every basic point
/// in exact arithmetic. Only usable for a handful of variables.
pub fn vertex_enumeration(model: &LpModel) -> OracleLp {
    let n = model.n_vars();
    let mut planes: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    for c in &model.constraints {
        let mut row = vec![BigRational::zero(); n];
        for &(j, a) in &c.coeffs {
            row[j] += rat(a);
        }
        planes.push((row, rat(c.rhs)));
    }
    for (j, v) in model.variables.iter().enumerate() {
        for bound in [v.lower, v.upper] {
            assert!(bound.is_finite(), "oracle needs finite bounds");
            let mut row = vec![BigRational::zero(); n];
            row[j] = rat(1.0);
            planes.push((row, rat(bound)));
        }
    }
    let feasible = |x: &[BigRational]| {
        let bounds_ok = model
            .variables
            .iter()
            .zip(x)
            .all(|(v, xj)| *xj >= rat(v.lower) && *xj <= rat(v.upper));
        bounds_ok
            && model.constraints.iter().all(|c| {
                let lhs: BigRational = c.coeffs.iter().map(|&(j, a)| rat(a) * &x[j]).sum();
                let rhs = rat(c.rhs);
                match c.sense {
                    Sense::Le => lhs <= rhs,
                    Sense::Ge => lhs >= rhs,
                    Sense::Eq => lhs == rhs,
                }
            })
    };
    let mut best: Option<BigRational> = None;
    for combo in rkm_core::combinatorics::combinations(planes.len(), n) {
        let a = combo.iter().map(|&i| planes[i].0.clone()).collect();
        let b = combo.iter().map(|&i| planes[i].1.clone()).collect();
        let Some(x) = solve_exact(a, b) else { continue };
        if !feasible(&x) {
            continue;
        }
        let value: BigRational = model.objective.iter().map(|&(j, c)| rat(c) * &x[j]).sum();
        if best.as_ref().is_none_or(|b| value < *b) {
            best = Some(value);
        }
    }
    match best {
        Some(v) => OracleLp::Optimal(v),
        None => OracleLp::Infeasible,
    }
}

/// Tiny LP with integer data: up to three variables and three rows.
pub fn random_tiny_lp(rng: &mut SeededRng) -> LpModel {
    let mut model = LpModel::new();
    let n = 1 + rng.below(3);
    for j in 0..n {
        let lower = -(rng.below(3) as f64);
        let upper = lower + 1.0 + rng.below(4) as f64;
        model.add_var(format!("x{j}"), lower, upper);
    }
    let coef = |rng: &mut SeededRng| rng.below(7) as f64 - 3.0;
    for i in 0..1 + rng.below(3) {
        let coeffs: Vec<(usize, f64)> = (0..n).map(|j| (j, coef(rng))).filter(|&(_, a)| a != 0.0).collect();
        let sense = [Sense::Le, Sense::Ge, Sense::Eq][rng.below(3)];
        let rhs = rng.below(9) as f64 - 3.0;
        model.add_constraint(format!("r{i}"), coeffs, sense, rhs);
    }
    let obj = (0..n).map(|j| (j, coef(rng))).collect();
    model.set_objective(obj);
    model
}

pub fn to_f64(x: &BigRational) -> f64 {
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    let abs = x.abs();
    sign * (num_traits::ToPrimitive::to_f64(abs.numer()).unwrap() / num_traits::ToPrimitive::to_f64(abs.denom()).unwrap())
}
