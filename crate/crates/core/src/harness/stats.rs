//! Paired two-sided Wilcoxon signed-rank test at the 5% level.

use crate::error::{invalid, Result};

/// Two-sided 5% normal quantile.
const Z_975: f64 = 1.959_963_984_540_054;

/// Largest sample size that uses exact critical values.
pub const EXACT_LIMIT: usize = 25;

/// Fewest nonzero differences for which the test is run at all.
pub const MIN_PAIRS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `a` tends to be smaller (better under minimization).
    FavorsA,
    FavorsB,
    Neither,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WilcoxonResult {
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Number of nonzero differences.
    pub n: usize,
    pub significant: bool,
    pub direction: Direction,
    /// Fewer than [`MIN_PAIRS`] nonzero differences; never significant.
    pub insufficient: bool,
}

/// Signed-rank test on the paired differences `a_i - b_i`.
///
/// Zero differences are dropped, tied magnitudes get average ranks. Up to
/// [`EXACT_LIMIT`] pairs the statistic is compared with the exact two-sided
/// critical value; above that a continuity-corrected normal approximation
/// with tie correction is used.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return invalid(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        ));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return invalid("paired samples must be finite");
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    let (ranks, tie_groups) = average_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let w_minus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d < 0.0)
        .map(|(_, r)| r)
        .sum();
    let statistic = w_plus.min(w_minus);
    let direction = if w_plus < w_minus {
        Direction::FavorsA
    } else if w_minus < w_plus {
        Direction::FavorsB
    } else {
        Direction::Neither
    };

    if n < MIN_PAIRS {
        return Ok(WilcoxonResult {
            statistic,
            w_plus,
            w_minus,
            n,
            significant: false,
            direction,
            insufficient: true,
        });
    }

    let significant = if n <= EXACT_LIMIT {
        match exact_critical_value(n) {
            Some(c) => statistic <= c as f64,
            None => false,
        }
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let ties: f64 = tie_groups.iter().map(|&t| (t * t * t - t) as f64).sum();
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
        let z = ((statistic - mean).abs() - 0.5) / var.sqrt();
        z >= Z_975
    };

    Ok(WilcoxonResult {
        statistic,
        w_plus,
        w_minus,
        n,
        significant,
        direction,
        insufficient: false,
    })
}

/// 1-based ranks with ties averaged, plus the sizes of tied groups.
fn average_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut groups = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        if end - start > 1 {
            groups.push(end - start);
        }
        start = end;
    }
    (ranks, groups)
}

/// Largest `c` with `P(W <= c) <= 0.05` two-sided under the null, i.e.
/// `2 P(W+ <= c) <= 0.05`, from the exact distribution of `W+` for `n`
/// untied ranks. `None` when no such `c` exists (`n < 6`).
pub fn exact_critical_value(n: usize) -> Option<usize> {
    let max = n * (n + 1) / 2;
    // counts[w] = number of subsets of {1..n} with rank sum w.
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    for r in 1..=n {
        for w in (r..=max).rev() {
            counts[w] += counts[w - r];
        }
    }
    let total = (1u64 << n) as f64;
    let mut cumulative = 0u64;
    let mut critical = None;
    for (w, &c) in counts.iter().enumerate() {
        cumulative += c;
        if 2.0 * cumulative as f64 / total <= 0.05 {
            critical = Some(w);
        } else {
            break;
        }
    }
    critical
}
