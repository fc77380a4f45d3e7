use serde::{Deserialize, Serialize};

use crate::irrl::EvalSummary;

/// Cross-seed mean and population standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Ignores NaN entries (e.g. execution time of a seed with no success).
    pub fn of(values: &[f64]) -> Self {
        let finite: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
        if finite.is_empty() {
            return Self {
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let n = finite.len() as f64;
        let mean = finite.iter().sum::<f64>() / n;
        let var = finite.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self { mean, std: var.sqrt() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedMetrics {
    pub seed: u64,
    pub summary: EvalSummary,
}

/// Evaluation results per seed plus their cross-seed aggregate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub policy: String,
    pub ped_model: String,
    pub episodes_per_seed: usize,
    pub per_seed: Vec<SeedMetrics>,
    pub success_rate: MeanStd,
    pub collision_rate: MeanStd,
    pub timeout_rate: MeanStd,
    pub exec_time_mean: MeanStd,
    pub return_mean_discounted: MeanStd,
    pub return_mean_undiscounted: MeanStd,
}

impl MetricsReport {
    pub fn new(policy: &str, ped_model: &str, per_seed: Vec<SeedMetrics>) -> Self {
        let col = |f: fn(&EvalSummary) -> f64| MeanStd::of(&per_seed.iter().map(|s| f(&s.summary)).collect::<Vec<_>>());
        Self {
            policy: policy.to_string(),
            ped_model: ped_model.to_string(),
            episodes_per_seed: per_seed.first().map_or(0, |s| s.summary.episodes),
            success_rate: col(|s| s.success_rate),
            collision_rate: col(|s| s.collision_rate),
            timeout_rate: col(|s| s.timeout_rate),
            exec_time_mean: col(|s| s.exec_time_mean),
            return_mean_discounted: col(|s| s.return_discounted_mean),
            return_mean_undiscounted: col(|s| s.return_undiscounted_mean),
            per_seed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width console table, one row per seed and a mean ± std row.
    pub fn table(&self) -> String {
        let mut out = format!(
            "policy {} | pedestrians {} | {} episodes per seed\n{:>8} {:>9} {:>9} {:>9} {:>9} {:>10} {:>10}\n",
            self.policy,
            self.ped_model,
            self.episodes_per_seed,
            "seed",
            "success",
            "collision",
            "timeout",
            "time[s]",
            "return",
            "undisc."
        );
        for s in &self.per_seed {
            let m = &s.summary;
            out.push_str(&format!(
                "{:>8} {:>9.3} {:>9.3} {:>9.3} {:>9.2} {:>10.4} {:>10.4}\n",
                s.seed,
                m.success_rate,
                m.collision_rate,
                m.timeout_rate,
                m.exec_time_mean,
                m.return_discounted_mean,
                m.return_undiscounted_mean
            ));
        }
        let pm = |m: &MeanStd, p: usize| format!("{:.p$}±{:.p$}", m.mean, m.std);
        out.push_str(&format!(
            "{:>8} {:>9} {:>9} {:>9} {:>9} {:>10} {:>10}\n",
            "mean",
            pm(&self.success_rate, 3),
            pm(&self.collision_rate, 3),
            pm(&self.timeout_rate, 3),
            pm(&self.exec_time_mean, 2),
            pm(&self.return_mean_discounted, 4),
            pm(&self.return_mean_undiscounted, 4)
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(s: f64, c: f64, r: f64) -> EvalSummary {
        EvalSummary {
            episodes: 10,
            success_rate: s,
            collision_rate: c,
            timeout_rate: 1.0 - s - c,
            exec_time_mean: 9.0,
            return_discounted_mean: r,
            return_undiscounted_mean: r * 2.0,
        }
    }

    #[test]
    fn aggregates_match_recomputation() {
        let per_seed = vec![
            SeedMetrics { seed: 1, summary: summary(0.8, 0.2, 0.4) },
            SeedMetrics { seed: 2, summary: summary(0.6, 0.3, 0.1) },
            SeedMetrics { seed: 3, summary: summary(0.9, 0.1, 0.5) },
        ];
        let r = MetricsReport::new("irrl", "sfm", per_seed);
        let mean = (0.4 + 0.1 + 0.5) / 3.0;
        let var = ((0.4f64 - mean).powi(2) + (0.1f64 - mean).powi(2) + (0.5f64 - mean).powi(2)) / 3.0;
        assert!((r.return_mean_discounted.mean - mean).abs() < 1e-12);
        assert!((r.return_mean_discounted.std - var.sqrt()).abs() < 1e-12);
        assert_eq!(r.exec_time_mean.std, 0.0);
        assert!(r.table().contains("mean"));
    }

    #[test]
    fn nan_entries_are_skipped() {
        let m = MeanStd::of(&[f64::NAN, 2.0, 4.0]);
        assert_eq!(m.mean, 3.0);
        assert_eq!(m.std, 1.0);
        assert!(MeanStd::of(&[f64::NAN]).mean.is_nan());
    }
}
