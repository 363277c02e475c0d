//! Wilcoxon signed-rank test for paired samples.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::BenchError;

/// Largest number of non-zero differences handled by the exact null
/// distribution.
pub const EXACT_MAX_N: usize = 25;
/// Smallest number of non-zero differences handled by the exact null
/// distribution.
pub const EXACT_MIN_N: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMethod {
    /// Exact null distribution of the rank sum.
    Exact,
    /// Normal approximation with continuity and tie corrections.
    Normal,
    /// Every difference was zero.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wilcoxon {
    /// Number of non-zero differences.
    pub n: usize,
    /// Rank sum of positive differences `a - b`.
    pub w_plus: f64,
    pub w_minus: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub method: WilcoxonMethod,
}

impl Wilcoxon {
    /// The smaller of the two rank sums.
    pub fn statistic(&self) -> f64 {
        self.w_plus.min(self.w_minus)
    }
}

/// Two-sided signed-rank test of `a` against `b`. Zero differences are
/// dropped; tied magnitudes share their average rank.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<Wilcoxon, BenchError> {
    if a.len() != b.len() {
        return Err(BenchError::Unpaired(a.len(), b.len()));
    }
    let mut diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(Wilcoxon { n, w_plus: 0.0, w_minus: 0.0, p_value: 1.0, method: WilcoxonMethod::Degenerate });
    }
    diffs.sort_by(|x, y| x.abs().total_cmp(&y.abs()));

    let mut ranks = vec![0.0; n];
    let mut tie_groups = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && diffs[j + 1].abs() == diffs[i].abs() {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        ranks[i..=j].fill(avg);
        if j > i {
            tie_groups.push(j - i + 1);
        }
        i = j + 1;
    }
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).fold(0.0, |a, r| a + r);
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;

    if (EXACT_MIN_N..=EXACT_MAX_N).contains(&n) && tie_groups.is_empty() {
        let t = w_plus.min(w_minus) as usize;
        let p = 2.0 * exact_lower_tail(n, t);
        return Ok(Wilcoxon { n, w_plus, w_minus, p_value: p.min(1.0), method: WilcoxonMethod::Exact });
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_adj: f64 = tie_groups.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_adj;
    let p = if var <= 0.0 {
        1.0
    } else {
        let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
        let std_normal = Normal::new(0.0, 1.0).unwrap_or_else(|_| unreachable!());
        (2.0 * std_normal.sf(z)).min(1.0)
    };
    Ok(Wilcoxon { n, w_plus, w_minus, p_value: p, method: WilcoxonMethod::Normal })
}

/// `P(W ≤ t)` under the null for `n` untied ranks.
fn exact_lower_tail(n: usize, t: usize) -> f64 {
    let max = n * (n + 1) / 2;
    // counts[s]: number of rank subsets with sum s.
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    for r in 1..=n {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let hits: u64 = counts[..=t.min(max)].iter().sum();
    hits as f64 / (1u64 << n) as f64
}

/// Per-test significance threshold for `tests` simultaneous comparisons.
pub fn bonferroni_threshold(alpha: f64, tests: usize) -> f64 {
    alpha / tests.max(1) as f64
}
