//! Paired significance test and effect size for comparing two methods.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// Minimum number of non-zero paired differences.
pub const MIN_PAIRS: usize = 5;
/// Largest sample evaluated with the exact null distribution.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Pairs left after dropping zero differences.
    pub n: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Two-sided.
    pub p_value: f64,
    pub exact: bool,
}

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped and tied absolute differences share their
/// average rank. Up to [`EXACT_MAX_N`] pairs the p-value comes from the
/// exact permutation distribution of the (possibly tied) ranks; above that
/// from the tie-corrected normal approximation with continuity correction.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<WilcoxonResult> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let diffs: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n < MIN_PAIRS {
        return Err(Error::TooFewPairs {
            needed: MIN_PAIRS,
            found: n,
        });
    }

    // doubled average ranks keep everything integral
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| libm::fabs(diffs[i]).total_cmp(&libm::fabs(diffs[j])));
    let mut rank2 = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && libm::fabs(diffs[order[end]]) == libm::fabs(diffs[order[start]]) {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let r2 = (start + 1 + end) as u64;
        for &i in &order[start..end] {
            rank2[i] = r2;
        }
        tie_sizes.push(end - start);
        start = end;
    }
    let w2_plus: u64 = (0..n).filter(|&i| diffs[i] > 0.0).map(|i| rank2[i]).sum();
    let total2 = (n * (n + 1)) as u64;
    let w_plus = w2_plus as f64 / 2.0;
    let w_minus = (total2 - w2_plus) as f64 / 2.0;

    let (p_value, exact) = if n <= EXACT_MAX_N {
        (exact_p(&rank2, w2_plus), true)
    } else {
        (normal_p(n, w_plus, &tie_sizes), false)
    };
    Ok(WilcoxonResult {
        n,
        w_plus,
        w_minus,
        p_value,
        exact,
    })
}

/// Counts sign assignments by their doubled positive-rank sum.
fn exact_p(rank2: &[u64], w2: u64) -> f64 {
    let max: u64 = rank2.iter().sum();
    let mut ways = vec![0u64; max as usize + 1];
    ways[0] = 1;
    let mut reach = 0usize;
    for &r in rank2 {
        let r = r as usize;
        for s in (0..=reach).rev() {
            let c = ways[s];
            if c != 0 {
                ways[s + r] += c;
            }
        }
        reach += r;
    }
    let total = (1u64 << rank2.len()) as f64;
    let w2 = w2 as usize;
    let lower: u64 = ways[..=w2].iter().sum();
    let upper: u64 = ways[w2..].iter().sum();
    (2.0 * lower.min(upper) as f64 / total).min(1.0)
}

fn normal_p(n: usize, w_plus: f64, tie_sizes: &[usize]) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_adj: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum::<f64>()
        / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_adj;
    if var <= 0.0 {
        return 1.0;
    }
    let z = (libm::fabs(w_plus - mean) - 0.5) / libm::sqrt(var);
    if z <= 0.0 {
        return 1.0;
    }
    libm::erfc(z / core::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Effect-size magnitude on |delta|: negligible < 0.147 <= small < 0.33 <=
/// medium < 0.474 <= large.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    pub fn of(delta: f64) -> Self {
        let d = libm::fabs(delta);
        if d < 0.147 {
            Magnitude::Negligible
        } else if d < 0.33 {
            Magnitude::Small
        } else if d < 0.474 {
            Magnitude::Medium
        } else {
            Magnitude::Large
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Magnitude::Negligible => "negligible",
            Magnitude::Small => "small",
            Magnitude::Medium => "medium",
            Magnitude::Large => "large",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CliffsDelta {
    pub delta: f64,
    pub magnitude: Magnitude,
}

/// `(#{x_i > y_j} - #{x_i < y_j}) / (|x| |y|)`.
pub fn cliffs_delta(x: &[f64], y: &[f64]) -> Result<CliffsDelta> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut score: i64 = 0;
    for a in x {
        for b in y {
            match a.partial_cmp(b) {
                Some(Ordering::Greater) => score += 1,
                Some(Ordering::Less) => score -= 1,
                _ => {}
            }
        }
    }
    let delta = score as f64 / (x.len() * y.len()) as f64;
    Ok(CliffsDelta {
        delta,
        magnitude: Magnitude::of(delta),
    })
}

/// Wilcoxon plus Cliff's delta on two paired samples. A degenerate
/// Wilcoxon (too few non-zero differences) is kept as an error value so
/// the effect size is still reported.
#[derive(Debug, Clone, PartialEq)]
pub struct StatResult {
    pub n: usize,
    pub wilcoxon: Result<WilcoxonResult>,
    pub cliffs: CliffsDelta,
}

pub fn compare(x: &[f64], y: &[f64]) -> Result<StatResult> {
    Ok(StatResult {
        n: x.len(),
        wilcoxon: wilcoxon_signed_rank(x, y),
        cliffs: cliffs_delta(x, y)?,
    })
}
