//! CSV and manifest emission.
//!
//! Layout under the output directory:
//!
//! ```text
//! manifest.txt          key=value settings reproducing the batch
//! summary.csv           one row per (function, variant)
//! runs.csv              one row per run with its final result
//! curves/<run_id>.csv   per-generation convergence of one run
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! identical runs produce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use super::experiment::ExperimentSpec;
use super::summary::{summarize, SummaryRow};
use crate::error::{Error, Result};
use crate::orchestrator::RunLog;

#[derive(Clone, Debug, PartialEq)]
pub struct OutputFiles {
    pub manifest: PathBuf,
    pub summary: PathBuf,
    pub runs: PathBuf,
    pub curves: Vec<PathBuf>,
}

/// Header of a convergence CSV for `n` formulations.
pub fn convergence_header(n: usize) -> Vec<String> {
    let mut header: Vec<String> = ["run_id", "generation", "fes", "best_fitness"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((0..n).map(|k| format!("formulation_best_{k}")));
    header.extend((0..n).map(|k| format!("alloc_p_{k}")));
    header
}

pub fn write_convergence(log: &RunLog, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let n = log.final_bests.len();
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    w.write_record(convergence_header(n)).map_err(csv_err)?;
    let id = log.run_id();
    for r in &log.records {
        let mut row = vec![
            id.clone(),
            r.generation.to_string(),
            r.fes.to_string(),
            r.global_best.to_string(),
        ];
        row.extend(r.formulation_best.iter().map(f64::to_string));
        row.extend(r.allocation.iter().map(f64::to_string));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_summary(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    w.write_record([
        "function",
        "variant",
        "runs",
        "mean",
        "std",
        "median",
        "reference",
        "mark",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.function.to_string(),
            r.variant.to_string(),
            r.runs.to_string(),
            r.mean.to_string(),
            r.std.to_string(),
            r.median.to_string(),
            r.reference.to_string(),
            r.mark.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_runs(logs: &[RunLog], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    w.write_record([
        "run_id",
        "function",
        "variant",
        "seed",
        "fes",
        "final_fitness",
        "best_formulation",
    ])
    .map_err(csv_err)?;
    for log in logs {
        w.write_record([
            log.run_id(),
            log.config.function.to_string(),
            log.config.variant.to_string(),
            log.config.seed.to_string(),
            log.total_fes.to_string(),
            log.best_fitness.to_string(),
            log.best_formulation.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the manifest, run table, summary and (optionally) curves.
pub fn write_outputs(logs: &[RunLog], spec: &ExperimentSpec) -> Result<OutputFiles> {
    let dir = &spec.out_dir;
    create_dir(dir)?;
    let manifest = dir.join("manifest.txt");
    fs::write(&manifest, spec.manifest()).map_err(|source| Error::Io {
        path: manifest.clone(),
        source,
    })?;

    let rows = summarize(logs, spec.reference)?;
    let summary = dir.join("summary.csv");
    write_summary(&rows, &summary)?;

    let runs = dir.join("runs.csv");
    write_runs(logs, &runs)?;

    let mut curves = Vec::new();
    if spec.curves {
        let curve_dir = dir.join("curves");
        create_dir(&curve_dir)?;
        for log in logs {
            let path = curve_dir.join(format!("{}.csv", log.run_id()));
            write_convergence(log, &path)?;
            curves.push(path);
        }
    }
    Ok(OutputFiles {
        manifest,
        summary,
        runs,
        curves,
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        assert_eq!(
            convergence_header(2).join(","),
            "run_id,generation,fes,best_fitness,formulation_best_0,formulation_best_1,alloc_p_0,alloc_p_1"
        );
    }

    #[test]
    fn unwritable_destination_names_the_path() {
        let tmp = tempfile::tempdir().unwrap();
        let blocker = tmp.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = create_dir(&blocker.join("sub")).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }
}
