//! Plot-ready CSV files derived from a solve report. The first line of each
//! file names its columns.

use std::path::{Path, PathBuf};

use varexp_core::solver::SolveReport;

use crate::csvio::CsvError;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `distances.csv`: `n,k,distance`, one row per stage and level. The first
/// stage has no predecessor, so its distance is empty.
pub fn write_distances(path: &Path, report: &SolveReport) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "k", "distance"])?;
    for s in &report.stages {
        for (j, k) in report.k_levels.iter().enumerate() {
            let d = s.distances.as_ref().and_then(|d| d.get(j).copied());
            w.write_record([s.n.to_string(), k.to_string(), opt(d)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `tails.csv`: `n,k,tail,excess_modular`.
pub fn write_tails(path: &Path, report: &SolveReport) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "k", "tail", "excess_modular"])?;
    for s in &report.stages {
        for (j, k) in report.k_levels.iter().enumerate() {
            w.write_record([
                s.n.to_string(),
                k.to_string(),
                opt(s.tails.get(j).copied()),
                opt(s.excess_modulars.get(j).copied()),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `residuals.csv`: `n,iteration,residual_norm,step_length`; iteration 0 is
/// the initial guess and has no step.
pub fn write_residuals(path: &Path, report: &SolveReport) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "iteration", "residual_norm", "step_length"])?;
    for s in &report.stages {
        for (i, r) in s.inner.residual_norms.iter().enumerate() {
            let step = i.checked_sub(1).and_then(|j| s.inner.step_lengths.get(j).copied());
            w.write_record([s.n.to_string(), i.to_string(), r.to_string(), opt(step)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `profiles.csv`: `n,node,x,y,u,barrier`.
pub fn write_profiles(path: &Path, report: &SolveReport) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "node", "x", "y", "u", "barrier"])?;
    for s in &report.stages {
        for (i, x) in s.solution.grid().nodes().iter().enumerate() {
            w.write_record([
                s.n.to_string(),
                i.to_string(),
                x[0].to_string(),
                x[1].to_string(),
                s.solution.value(i).to_string(),
                s.barrier.value(i).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes all four files into `dir` and returns their paths.
pub fn emit_plot_data(report: &SolveReport, dir: &Path) -> Result<Vec<PathBuf>, CsvError> {
    let writers: [(&str, fn(&Path, &SolveReport) -> Result<(), CsvError>); 4] = [
        ("distances.csv", write_distances),
        ("tails.csv", write_tails),
        ("residuals.csv", write_residuals),
        ("profiles.csv", write_profiles),
    ];
    let mut out = Vec::new();
    for (name, write) in writers {
        let path = dir.join(name);
        write(&path, report)?;
        out.push(path);
    }
    Ok(out)
}
