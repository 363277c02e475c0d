use std::fmt::Write as _;

use finder_core::planner::Variant;
use serde::{Deserialize, Serialize};

use crate::config::BenchConfig;
use crate::error::BenchError;
use crate::metrics::{mean_successful_steps, mspl, spl_term, success_rate, EpisodeResult};
use crate::stats::{bonferroni_threshold, wilcoxon_signed_rank, Wilcoxon};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy: Variant,
    pub episodes: usize,
    pub success_rate: f64,
    pub mspl: f64,
    /// Mean steps over successful episodes.
    pub mean_steps: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Per-episode success indicator.
    Success,
    /// Per-episode `S·ℓ/max(p, ℓ)`.
    Spl,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Success => "S",
            Metric::Spl => "SPL",
        }
    }

    pub fn sample(self, rows: &[EpisodeResult]) -> Vec<f64> {
        rows.iter()
            .map(|r| match self {
                Metric::Success => f64::from(u8::from(r.success)),
                Metric::Spl => spl_term(r),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: Variant,
    pub b: Variant,
    pub metric: Metric,
    pub test: Wilcoxon,
    /// `a` beats `b` on this metric at the corrected threshold.
    pub significant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub version: String,
    pub seed: u64,
    pub episodes: usize,
    pub alpha: f64,
    /// Bonferroni-corrected per-test threshold.
    pub threshold: f64,
    pub policies: Vec<PolicySummary>,
    pub comparisons: Vec<Comparison>,
}

impl BenchReport {
    /// Summarises `results` per policy and tests the first configured policy
    /// against every other on both metrics.
    pub fn build(cfg: &BenchConfig, results: &[EpisodeResult]) -> Result<Self, BenchError> {
        let rows = |v: Variant| -> Vec<EpisodeResult> { results.iter().filter(|r| r.policy == v).cloned().collect() };
        let policies = cfg
            .policies
            .iter()
            .map(|&v| {
                let rs = rows(v);
                Ok(PolicySummary {
                    policy: v,
                    episodes: rs.len(),
                    success_rate: success_rate(&rs)?,
                    mspl: mspl(&rs)?,
                    mean_steps: mean_successful_steps(&rs),
                })
            })
            .collect::<Result<Vec<_>, BenchError>>()?;

        let reference = cfg.policies[0];
        let others = &cfg.policies[1..];
        let threshold = bonferroni_threshold(cfg.alpha, 2 * others.len());
        let base = rows(reference);
        let mut comparisons = Vec::new();
        for &other in others {
            let rs = rows(other);
            for metric in [Metric::Success, Metric::Spl] {
                let (xa, xb) = (metric.sample(&base), metric.sample(&rs));
                let test = wilcoxon_signed_rank(&xa, &xb)?;
                let significant = test.p_value < threshold && test.w_plus > test.w_minus;
                comparisons.push(Comparison { a: reference, b: other, metric, test, significant });
            }
        }
        Ok(Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            episodes: cfg.episodes,
            alpha: cfg.alpha,
            threshold,
            policies,
            comparisons,
        })
    }

    pub fn summary(&self, v: Variant) -> Option<&PolicySummary> {
        self.policies.iter().find(|p| p.policy == v)
    }

    pub fn comparison(&self, b: Variant, metric: Metric) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.b == b && c.metric == metric)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "finder bench report v{}", self.version);
        let _ = writeln!(out, "seed {}  episodes {}", self.seed, self.episodes);
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<16} {:>7} {:>7} {:>10}", "policy", "SR", "MSPL", "steps(ok)");
        for p in &self.policies {
            let steps = p.mean_steps.map_or_else(|| "-".to_string(), |s| format!("{s:.1}"));
            let _ = writeln!(
                out,
                "{:<16} {:>6.1}% {:>7.3} {:>10}",
                p.policy.name(),
                100.0 * p.success_rate,
                p.mspl,
                steps
            );
        }
        if !self.comparisons.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "Wilcoxon signed-rank, two-sided; Bonferroni threshold {:.2e} (alpha {}, {} tests)",
                self.threshold,
                self.alpha,
                self.comparisons.len()
            );
            for c in &self.comparisons {
                let _ = writeln!(
                    out,
                    "{} vs {:<16} {:<4} n={:<4} W+={:<8} W-={:<8} p={:.3e}{}",
                    c.a.name(),
                    c.b.name(),
                    c.metric.name(),
                    c.test.n,
                    c.test.w_plus,
                    c.test.w_minus,
                    c.test.p_value,
                    if c.significant { "  *" } else { "" }
                );
            }
        }
        out
    }
}
