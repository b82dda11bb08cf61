use serde::{Deserialize, Serialize};

/// Relaxation values at or below this count as zero and carry no ratio.
pub const ZERO_LP: f64 = 1e-9;
/// Ratios at or below `1 + FILTER_SLACK` are left out of summaries.
pub const FILTER_SLACK: f64 = 1e-6;

/// One solver run on one instance. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub family: String,
    pub n_facilities: usize,
    pub n_clients: usize,
    pub n_groups: usize,
    pub k: usize,
    pub solver: String,
    pub seed: u64,
    pub objective: f64,
    /// Empty when the relaxation failed.
    pub lp_value: Option<f64>,
    /// `objective / lp_value`; empty when the relaxation failed or is zero.
    pub ratio: Option<f64>,
    /// Only filled in when timing was requested.
    pub wall_time_ms: Option<f64>,
    pub iterations: usize,
}

/// `objective / lp`, or `None` when the bound is missing or zero.
pub fn ratio_of(objective: f64, lp_value: Option<f64>) -> Option<f64> {
    match lp_value {
        Some(lp) if lp > ZERO_LP => Some(objective / lp),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub family: String,
    pub solver: String,
    pub records: usize,
    /// Records whose ratio passed the filter and entered mean and median.
    pub included: usize,
    /// Records with a ratio at or below `1 + FILTER_SLACK`.
    pub filtered_out: usize,
    pub zero_lp: usize,
    pub lp_failed: usize,
    pub mean_ratio: Option<f64>,
    pub median_ratio: Option<f64>,
}

/// Per `(family, solver)` mean and median ratio over the records whose ratio
/// exceeds `1 + FILTER_SLACK`, in order of first appearance.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in records {
        let key = (r.family.clone(), r.solver.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(family, solver)| {
            let mut row = SummaryRow {
                family: family.clone(),
                solver: solver.clone(),
                records: 0,
                included: 0,
                filtered_out: 0,
                zero_lp: 0,
                lp_failed: 0,
                mean_ratio: None,
                median_ratio: None,
            };
            let mut ratios = Vec::new();
            for r in records.iter().filter(|r| r.family == family && r.solver == solver) {
                row.records += 1;
                match (r.lp_value, r.ratio) {
                    (None, _) => row.lp_failed += 1,
                    (Some(_), None) => row.zero_lp += 1,
                    (Some(_), Some(q)) if q > 1.0 + FILTER_SLACK => ratios.push(q),
                    _ => row.filtered_out += 1,
                }
            }
            row.included = ratios.len();
            if !ratios.is_empty() {
                row.mean_ratio = Some(ratios.iter().sum::<f64>() / ratios.len() as f64);
                row.median_ratio = Some(median(&mut ratios));
            }
            row
        })
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(solver: &str, lp: Option<f64>, objective: f64) -> RunRecord {
        RunRecord {
            instance_id: "i".into(),
            family: "uniform".into(),
            n_facilities: 3,
            n_clients: 3,
            n_groups: 1,
            k: 1,
            solver: solver.into(),
            seed: 0,
            objective,
            lp_value: lp,
            ratio: ratio_of(objective, lp),
            wall_time_ms: None,
            iterations: 0,
        }
    }

    #[test]
    fn filter_and_counts() {
        let records = vec![
            rec("a", Some(1.0), 1.0),
            rec("a", Some(1.0), 2.0),
            rec("a", Some(2.0), 3.0),
            rec("a", Some(2.0), 5.0),
            rec("a", Some(0.0), 3.0),
            rec("a", None, 3.0),
            rec("b", Some(1.0), 1.0),
        ];
        let rows = summarize(&records);
        assert_eq!(rows.len(), 2);
        let a = &rows[0];
        assert_eq!((a.records, a.included, a.filtered_out, a.zero_lp, a.lp_failed), (6, 3, 1, 1, 1));
        assert!((a.mean_ratio.unwrap() - 6.0 / 3.0).abs() < 1e-12);
        assert_eq!(a.median_ratio, Some(2.0));
        assert_eq!(rows[1].mean_ratio, None);
    }
}
