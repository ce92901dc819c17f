//! Mean / std tables with significance marks against a reference variant.

use std::collections::BTreeMap;
use std::fmt;

use super::stats::{wilcoxon_signed_rank, Direction};
use crate::error::{invalid, Result};
use crate::objective::BaseFunctionId;
use crate::orchestrator::{RunLog, VariantId};

/// Outcome of a variant against the reference, under minimization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mark {
    Better,
    Similar,
    Worse,
}

impl Mark {
    pub fn symbol(self) -> &'static str {
        match self {
            Mark::Better => "+",
            Mark::Similar => "≈",
            Mark::Worse => "-",
        }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mark::Better => "better",
            Mark::Similar => "similar",
            Mark::Worse => "worse",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub function: BaseFunctionId,
    pub variant: VariantId,
    pub runs: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
    pub median: f64,
    pub reference: VariantId,
    pub mark: Mark,
}

/// Compares `candidate` against `reference` on seed-paired final fitness.
pub fn compare(candidate: &[f64], reference: &[f64]) -> Result<Mark> {
    let r = wilcoxon_signed_rank(candidate, reference)?;
    Ok(match (r.significant, r.direction) {
        (true, Direction::FavorsA) => Mark::Better,
        (true, Direction::FavorsB) => Mark::Worse,
        _ => Mark::Similar,
    })
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// One row per `(function, variant)` cell, in order of first appearance.
///
/// Every cell must cover the same seeds as the reference cell of its function.
pub fn summarize(logs: &[RunLog], reference: VariantId) -> Result<Vec<SummaryRow>> {
    if logs.is_empty() {
        return invalid("nothing to summarize");
    }
    let mut order: Vec<(BaseFunctionId, VariantId)> = Vec::new();
    let mut cells: BTreeMap<(BaseFunctionId, VariantId), BTreeMap<u64, f64>> = BTreeMap::new();
    for log in logs {
        let key = (log.config.function, log.config.variant);
        let cell = cells.entry(key).or_default();
        if cell.is_empty() {
            order.push(key);
        }
        if cell.insert(log.config.seed, log.best_fitness).is_some() {
            return invalid(format!(
                "seed {} appears twice for {} / {}",
                log.config.seed, key.0, key.1
            ));
        }
    }

    let mut rows = Vec::with_capacity(order.len());
    for key in order {
        let cell = &cells[&key];
        let Some(ref_cell) = cells.get(&(key.0, reference)) else {
            return invalid(format!("no {reference} runs for {}", key.0));
        };
        if !cell.keys().eq(ref_cell.keys()) {
            return invalid(format!(
                "{} / {} and {} / {reference} were run on different seeds",
                key.0, key.1, key.0
            ));
        }
        let values: Vec<f64> = cell.values().copied().collect();
        let ref_values: Vec<f64> = ref_cell.values().copied().collect();
        rows.push(SummaryRow {
            function: key.0,
            variant: key.1,
            runs: values.len(),
            mean: mean(&values),
            std: sample_std(&values),
            median: median(&values),
            reference,
            mark: compare(&values, &ref_values)?,
        });
    }
    Ok(rows)
}
