//! Wilcoxon signed-rank test for paired samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fewest non-zero differences the test accepts.
pub const MIN_PAIRS: usize = 6;
/// Largest sample handled by exact enumeration in automatic mode.
pub const EXACT_MAX_PAIRS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WilcoxonMethod {
    /// Exact up to [`EXACT_MAX_PAIRS`] non-zero pairs, normal beyond.
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub p_value: f64,
    /// Pairs left after dropping zero differences.
    pub n: usize,
    pub method: WilcoxonMethod,
}

pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    wilcoxon_signed_rank_with(a, b, WilcoxonMethod::Auto)
}

/// Two-sided test of `a - b`. Zero differences are dropped and tied
/// absolute differences share their average rank.
pub fn wilcoxon_signed_rank_with(a: &[f64], b: &[f64], method: WilcoxonMethod) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::Parameter(format!("paired samples differ in length ({} vs {})", a.len(), b.len())));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::Parameter("non-finite difference".into()));
    }
    let n = diffs.len();
    if n < MIN_PAIRS {
        return Err(Error::InsufficientData(format!(
            "{n} non-zero differences, at least {MIN_PAIRS} needed"
        )));
    }
    let (ranks, tie_sizes) = average_ranks(&diffs);
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let statistic = w_plus.min(total - w_plus);
    let method = match method {
        WilcoxonMethod::Auto if n <= EXACT_MAX_PAIRS => WilcoxonMethod::Exact,
        WilcoxonMethod::Auto => WilcoxonMethod::Normal,
        m => m,
    };
    let p_value = match method {
        WilcoxonMethod::Exact => exact_p(&ranks, w_plus)?,
        _ => normal_p(n, &tie_sizes, w_plus),
    };
    Ok(WilcoxonResult {
        statistic,
        p_value,
        n,
        method,
    })
}

/// Average ranks of `|d|` (1-based) and the sizes of the tie blocks.
fn average_ranks(diffs: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut ranks = vec![0.0; diffs.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && diffs[order[end]].abs() == diffs[order[start]].abs() {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        ties.push(end - start);
        start = end;
    }
    (ranks, ties)
}

/// Exact null distribution of `W+` over all `2^n` sign patterns. Ranks are
/// doubled so tied half ranks stay integral.
fn exact_p(ranks: &[f64], w_plus: f64) -> Result<f64> {
    if ranks.len() > 62 {
        return Err(Error::Parameter(format!("exact mode supports at most 62 pairs, got {}", ranks.len())));
    }
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let observed = (2.0 * w_plus).round() as usize;
    let all = (1u64 << ranks.len()) as f64;
    let lower: u64 = counts[..=observed].iter().sum();
    let upper: u64 = counts[observed..].iter().sum();
    Ok((2.0 * lower.min(upper) as f64 / all).min(1.0))
}

/// Normal approximation with tie and continuity corrections.
fn normal_p(n: usize, tie_sizes: &[usize], w_plus: f64) -> f64 {
    let n = n as f64;
    let mean = n * (n + 1.0) / 4.0;
    let tie_term: f64 = tie_sizes.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    libm::erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    // direct enumeration of every sign pattern, no dynamic programming
    fn enumerate_p(ranks: &[f64], w_plus: f64) -> f64 {
        let n = ranks.len();
        let (mut lo, mut hi) = (0u64, 0u64);
        for mask in 0u64..(1 << n) {
            let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if w <= w_plus + 1e-9 {
                lo += 1;
            }
            if w >= w_plus - 1e-9 {
                hi += 1;
            }
        }
        (2.0 * lo.min(hi) as f64 / (1u64 << n) as f64).min(1.0)
    }

    #[test]
    fn all_negative_six_pairs() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let b = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.p_value, 0.03125);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.method, WilcoxonMethod::Exact);
    }

    #[test]
    fn identical_samples_are_insufficient() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        assert!(matches!(wilcoxon_signed_rank(&a, &a), Err(Error::InsufficientData(_))));
        assert!(wilcoxon_signed_rank(&a, &a[..6]).is_err());
    }

    #[test]
    fn symmetric_differences_give_large_p() {
        let a = [1.0, -1.0, 2.0, -2.0, 3.0, -3.0, 4.0, -4.0];
        let b = [0.0; 8];
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn dp_matches_enumeration_with_ties() {
        let d = [0.5, -1.0, 1.0, 2.0, -2.0, 2.0, 3.5, -0.25, 4.0, 1.0];
        let zeros = [0.0; 10];
        let (ranks, _) = average_ranks(&d);
        let w_plus: f64 = d.iter().zip(&ranks).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum();
        let r = wilcoxon_signed_rank(&d, &zeros).unwrap();
        assert!((r.p_value - enumerate_p(&ranks, w_plus)).abs() < 1e-15);
    }

    #[test]
    fn large_samples_use_the_normal_approximation() {
        let a: Vec<f64> = (0..40).map(|i| i as f64 * 0.1 + if i % 3 == 0 { 1.0 } else { -0.2 }).collect();
        let b: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.method, WilcoxonMethod::Normal);
        assert!((0.0..=1.0).contains(&r.p_value));
    }
}
