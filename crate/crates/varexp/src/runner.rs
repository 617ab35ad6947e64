//! Dispatches a configuration to one of the four modes and writes its
//! artifacts. Reports carry no timings, so identical runs give identical
//! JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use varexp_core::expr::Expr;
use varexp_core::modular::{sobolev_constant, weighted_constant, ConstantEstimate};
use varexp_core::solver::{manufactured_convergence, natural_growth_scheme, outer_scheme, SchemeFailure, SolveReport};
use varexp_core::Variant;

use crate::config::{ConfigError, Mode, RunConfig};
use crate::csvio::{self, CsvError};
use crate::manifest::write_manifest;
use crate::plot::emit_plot_data;
use crate::suites::{run_suites, SuiteResult};

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    /// The run finished but a verification check failed.
    DiagnosticFailure = 1,
    /// An inner nonlinear solve did not converge.
    InnerFailure = 2,
    /// Bad configuration, rejected hypotheses or bad usage.
    Usage = 64,
    /// Output could not be written.
    Io = 74,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Rejected(String),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("output: {0}")]
    Csv(#[from] CsvError),
}

impl RunError {
    pub fn status(&self) -> Status {
        match self {
            RunError::Config(_) | RunError::Rejected(_) => Status::Usage,
            RunError::Io(_) | RunError::Csv(_) => Status::Io,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub resolution: Option<usize>,
}

#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub directory: PathBuf,
    /// Files written, manifest last.
    pub files: Vec<PathBuf>,
    /// Human-readable summary for the terminal.
    pub summary: String,
}

/// Loads `config_path` (or the built-in benchmark), applies overrides and
/// validates.
pub fn prepare(config_path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut config = match config_path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::parse("{}", Path::new("."))?,
    };
    if let Some(m) = overrides.mode {
        config.mode = Some(m);
    }
    if let Some(s) = overrides.seed {
        config.seed = Some(s);
    }
    if let Some(r) = overrides.resolution {
        config.problem.resolution = r;
    }
    if let Some(o) = &overrides.out {
        config.output.directory = o.clone();
    } else if config.output.directory.is_relative() {
        config.output.directory = config.base_dir.join(&config.output.directory);
    }
    config.validate()?;
    Ok(config)
}

pub fn run(config_path: Option<&Path>, overrides: &Overrides) -> Result<Outcome, RunError> {
    let config = prepare(config_path, overrides)?;
    let threads = overrides
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    run_config(&config, threads)
}

pub fn run_config(config: &RunConfig, threads: usize) -> Result<Outcome, RunError> {
    let dir = config.output.directory.clone();
    fs::create_dir_all(&dir)?;
    let mode = config.mode.unwrap_or(Mode::Solve);
    let mut w = Writer {
        dir: dir.clone(),
        files: Vec::new(),
        config,
    };
    let (status, summary) = match mode {
        Mode::Solve => solve(config, &mut w)?,
        Mode::Verify => verify(config, threads, &mut w)?,
        Mode::Constants => constants(config, &mut w)?,
        Mode::Manufactured => manufactured(config, &mut w)?,
    };
    let manifest = write_manifest(&dir, &w.files)?;
    let mut files = w.files;
    files.push(manifest);
    Ok(Outcome {
        status,
        directory: dir,
        files,
        summary,
    })
}

struct Writer<'a> {
    dir: PathBuf,
    files: Vec<PathBuf>,
    config: &'a RunConfig,
}

impl Writer<'_> {
    fn json(&self) -> bool {
        self.config.output.wants("json")
    }

    fn csv(&self) -> bool {
        self.config.output.wants("csv")
    }

    fn report(&mut self, mode: &str, body: serde_json::Value) -> Result<(), RunError> {
        if !self.json() {
            return Ok(());
        }
        let doc = json!({
            "mode": mode,
            "seed": self.config.seed(),
            "config": self.config,
            "result": body,
        });
        let path = self.dir.join("report.json");
        fs::write(&path, serde_json::to_string_pretty(&doc).expect("serializable") + "\n")?;
        self.files.push(path);
        Ok(())
    }

    fn csv_file(&mut self, name: &str, write: impl FnOnce(&Path) -> Result<(), CsvError>) -> Result<(), RunError> {
        if !self.csv() {
            return Ok(());
        }
        let path = self.dir.join(name);
        write(&path)?;
        self.files.push(path);
        Ok(())
    }
}

fn solve(config: &RunConfig, w: &mut Writer) -> Result<(Status, String), RunError> {
    let spec = config.problem_spec()?;
    let result = match spec.variant() {
        Variant::Natural => natural_growth_scheme(&spec, &config.solver),
        Variant::Subnatural => outer_scheme(&spec, &config.solver),
    };
    let (report, status) = match result {
        Ok(r) => {
            let ok = r.converged && r.checks.passed();
            (r, if ok { Status::Ok } else { Status::DiagnosticFailure })
        }
        Err(SchemeFailure::Rejected(e)) => return Err(RunError::Rejected(e.to_string())),
        Err(SchemeFailure::Inner { report, .. }) => (*report, Status::InnerFailure),
    };
    w.report("solve", serde_json::to_value(&report).expect("serializable"))?;
    if w.csv() {
        if let Some(u) = report.final_solution() {
            w.csv_file("solution.csv", |p| csvio::write_grid_function(p, u))?;
        }
        let plots = emit_plot_data(&report, &w.dir)?;
        w.files.extend(plots);
    }
    Ok((status, solve_summary(&report)))
}

fn solve_summary(r: &SolveReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "stages: {}", r.stages.len());
    for st in &r.stages {
        let d = st
            .distances
            .as_ref()
            .map(|d| d.iter().fold(0.0f64, |a, &b| a.max(b)))
            .map_or("-".to_string(), |d| format!("{d:.3e}"));
        let _ = writeln!(
            s,
            "  n = {:<6} newton {:>3}  residual {:.2e}  max d {}  max u {:.6}",
            st.n,
            st.inner.iterations(),
            st.residual_norm,
            d,
            st.max_value
        );
    }
    let _ = writeln!(s, "converged: {} (stage {:?})", r.converged, r.converged_at);
    for c in &r.checks.checks {
        let _ = writeln!(s, "  {:<32} {}", c.name, if c.passed { "pass" } else { "FAIL" });
    }
    if let Some(f) = &r.failure {
        let _ = writeln!(s, "failure: {f}");
    }
    s
}

pub fn suite_table(results: &[SuiteResult]) -> String {
    let mut s = format!("{:<26} {:>9} {:>14}  verdict\n", "suite", "instances", "worst slack");
    for r in results {
        let _ = writeln!(
            s,
            "{:<26} {:>9} {:>14.3e}  {}",
            r.name,
            r.instances,
            r.worst_slack,
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    s
}

fn verify(config: &RunConfig, threads: usize, w: &mut Writer) -> Result<(Status, String), RunError> {
    let results = run_suites(config.seed(), config.verify.scale, threads);
    let passed = results.iter().all(|r| r.passed);
    w.report("verify", json!({ "passed": passed, "suites": results }))?;
    w.csv_file("summary.csv", |p| {
        let mut c = csv::Writer::from_path(p)?;
        c.write_record(["suite", "instances", "worst_slack", "tolerance", "passed"])?;
        for r in &results {
            c.write_record([
                r.name.clone(),
                r.instances.to_string(),
                r.worst_slack.to_string(),
                r.tolerance.to_string(),
                r.passed.to_string(),
            ])?;
        }
        c.flush()?;
        Ok(())
    })?;
    let status = if passed { Status::Ok } else { Status::DiagnosticFailure };
    Ok((status, suite_table(&results)))
}

#[derive(Serialize)]
struct EstimateSummary<'a> {
    value: f64,
    converged: bool,
    starts: usize,
    iterations: usize,
    diagnostics: &'a varexp_core::ValidationReport,
}

impl<'a> From<&'a ConstantEstimate> for EstimateSummary<'a> {
    fn from(e: &'a ConstantEstimate) -> Self {
        Self {
            value: e.value,
            converged: e.converged,
            starts: e.starts,
            iterations: e.iterations,
            diagnostics: &e.diagnostics,
        }
    }
}

fn write_trace(path: &Path, trace: &[(usize, f64)]) -> Result<(), CsvError> {
    let mut c = csv::Writer::from_path(path)?;
    c.write_record(["iteration", "quotient"])?;
    for (i, v) in trace {
        c.write_record([i.to_string(), v.to_string()])?;
    }
    c.flush()?;
    Ok(())
}

fn constants(config: &RunConfig, w: &mut Writer) -> Result<(Status, String), RunError> {
    let grid = config.grid()?;
    let ex = config.exponents()?;
    let cc = config.constants.to_config(config.seed());
    let s = sobolev_constant(&ex.p, &ex.q, &grid, &cc).map_err(|e| RunError::Rejected(e.to_string()))?;
    let c = if config.constants.weighted {
        let g = config.data("problem.g", &config.problem.g, &grid)?;
        Some(weighted_constant(&g, &ex.eta, &ex.q, &grid, &cc).map_err(|e| RunError::Rejected(e.to_string()))?)
    } else {
        None
    };
    w.report(
        "constants",
        json!({
            "sobolev": EstimateSummary::from(&s),
            "weighted": c.as_ref().map(EstimateSummary::from),
        }),
    )?;
    w.csv_file("sobolev_minimizer.csv", |p| csvio::write_grid_function(p, &s.minimizer))?;
    w.csv_file("sobolev_trace.csv", |p| write_trace(p, &s.trace))?;
    let mut summary = format!("S = {:.10} (converged {})\n", s.value, s.converged);
    if let Some(c) = &c {
        w.csv_file("weighted_minimizer.csv", |p| csvio::write_grid_function(p, &c.minimizer))?;
        w.csv_file("weighted_trace.csv", |p| write_trace(p, &c.trace))?;
        let _ = writeln!(summary, "C = {:.10} (converged {})", c.value, c.converged);
    }
    let ok = s.converged && c.as_ref().is_none_or(|c| c.converged);
    Ok((if ok { Status::Ok } else { Status::DiagnosticFailure }, summary))
}

fn manufactured(config: &RunConfig, w: &mut Writer) -> Result<(Status, String), RunError> {
    let m = &config.manufactured;
    let parse = |key: &str, src: &str| Expr::parse(src).map_err(|e| ConfigError {
        key: key.into(),
        line: None,
        message: e.to_string(),
    });
    let u = parse("manufactured.solution", &m.solution)?;
    let grads = m
        .gradient
        .iter()
        .map(|g| parse("manufactured.gradient", g))
        .collect::<Result<Vec<_>, _>>()?;
    let ex = config.exponents()?;
    let exact = |x: varexp_core::Point| u.eval(x[0], x[1]);
    let grad = |x: varexp_core::Point| {
        let mut out = [0.0; 2];
        for (o, g) in out.iter_mut().zip(&grads) {
            *o = g.eval(x[0], x[1]);
        }
        out
    };
    let rows = match manufactured_convergence(
        &config.domain()?,
        &ex.p,
        &ex.q,
        ex.variant,
        &m.resolutions,
        &config.solver,
        &exact,
        &grad,
    ) {
        Ok(r) => r,
        Err(f) => {
            w.report("manufactured", json!({ "failure": f.to_string() }))?;
            let status = match f.error {
                varexp_core::Error::NotConverged { .. } | varexp_core::Error::Singular(_) => Status::InnerFailure,
                _ => return Err(RunError::Rejected(f.to_string())),
            };
            return Ok((status, format!("failure: {f}\n")));
        }
    };
    w.report("manufactured", json!({ "rows": rows }))?;
    w.csv_file("convergence.csv", |p| {
        let mut c = csv::Writer::from_path(p)?;
        c.write_record(["resolution", "h", "error", "ratio", "iterations"])?;
        for r in &rows {
            c.write_record([
                r.resolution.to_string(),
                r.h.to_string(),
                r.error.to_string(),
                r.ratio.map(|x| x.to_string()).unwrap_or_default(),
                r.iterations.to_string(),
            ])?;
        }
        c.flush()?;
        Ok(())
    })?;
    let mut s = format!("{:>10} {:>12} {:>12} {:>8}\n", "resolution", "h", "error", "ratio");
    for r in &rows {
        let ratio = r.ratio.map_or("-".to_string(), |x| format!("{x:.3}"));
        let _ = writeln!(s, "{:>10} {:>12.4e} {:>12.4e} {:>8}", r.resolution, r.h, r.error, ratio);
    }
    Ok((Status::Ok, s))
}
