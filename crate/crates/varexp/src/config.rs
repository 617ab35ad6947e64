//! Run configuration: one JSON document with problem, solver, constants,
//! manufactured, verify and output blocks. Every block and field is
//! optional; defaults reproduce the standard benchmark.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use varexp_core::expr::Expr;
use varexp_core::modular::ConstantConfig;
use varexp_core::solver::{ProblemSpec, SolverConfig};
use varexp_core::{DomainDescriptor, ExponentField, ExponentTriple, Grid, GridFunction, Variant};

use crate::csvio;

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Solve,
    Verify,
    Constants,
    Manufactured,
}

/// A configuration problem, located by its dotted key and, when it can be
/// found in the source text, the line it appears on.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config key `{}` (line {line}): {}", self.key, self.message),
            None => write!(f, "config key `{}`: {}", self.key, self.message),
        }
    }
}

/// Nodal data: an expression in `x`, `y`, a CSV file, or a single-node
/// spike on a constant background.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataSource {
    Expr(String),
    Csv { csv: PathBuf },
    Spike { spike: Spike },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spike {
    pub base: f64,
    pub value: f64,
    /// The spike sits at the node nearest to this point.
    pub at: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemBlock {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub resolution: usize,
    pub p: String,
    pub q: String,
    pub eta: String,
    pub f: DataSource,
    pub g: DataSource,
    pub lambda: f64,
    pub variant: Variant,
}

impl Default for ProblemBlock {
    fn default() -> Self {
        Self {
            lower: vec![0.0],
            upper: vec![1.0],
            resolution: 256,
            p: "2.2+0.2*x".into(),
            q: "1.7+0.2*x".into(),
            eta: "0.5".into(),
            f: DataSource::Expr("1".into()),
            g: DataSource::Expr("1".into()),
            lambda: 1.0,
            variant: Variant::Subnatural,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsBlock {
    pub starts: usize,
    pub max_iterations: usize,
    pub relative_tolerance: f64,
    pub window: usize,
    /// Estimate the weighted constant `C(g, η, q)` as well.
    pub weighted: bool,
}

impl Default for ConstantsBlock {
    fn default() -> Self {
        let c = ConstantConfig::default();
        Self {
            starts: c.starts,
            max_iterations: c.max_iterations,
            relative_tolerance: c.relative_tolerance,
            window: c.window,
            weighted: true,
        }
    }
}

impl ConstantsBlock {
    pub fn to_config(&self, seed: u64) -> ConstantConfig {
        ConstantConfig {
            starts: self.starts,
            seed,
            max_iterations: self.max_iterations,
            relative_tolerance: self.relative_tolerance,
            window: self.window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ManufacturedBlock {
    pub resolutions: Vec<usize>,
    /// Exact solution; zero on the boundary.
    pub solution: String,
    /// Its gradient, one expression per axis.
    pub gradient: Vec<String>,
}

impl Default for ManufacturedBlock {
    fn default() -> Self {
        Self {
            resolutions: vec![16, 32, 64, 128],
            solution: "x*(1-x)".into(),
            gradient: vec!["1-2*x".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyBlock {
    /// Multiplies every suite's instance count.
    pub scale: f64,
}

impl Default for VerifyBlock {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub directory: PathBuf,
    /// Subset of `json`, `csv`.
    pub formats: Vec<String>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec!["json".into(), "csv".into()],
        }
    }
}

impl OutputBlock {
    pub fn wants(&self, format: &str) -> bool {
        self.formats.iter().any(|f| f == format)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub problem: ProblemBlock,
    pub solver: SolverConfig,
    pub constants: ConstantsBlock,
    pub manufactured: ManufacturedBlock,
    pub verify: VerifyBlock,
    pub output: OutputBlock,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
    #[serde(skip)]
    source: Option<String>,
}

/// Line of the first `"key":` occurrence in `text`, searching after the
/// enclosing block's own key when there is one.
fn find_line(text: &str, dotted: &str) -> Option<usize> {
    let mut offset = 0;
    for part in dotted.split('.') {
        let needle = format!("\"{part}\"");
        let rest = &text[offset..];
        let mut found = None;
        let mut search = 0;
        while let Some(i) = rest[search..].find(&needle) {
            let at = search + i;
            let after = rest[at + needle.len()..].trim_start();
            if after.starts_with(':') {
                found = Some(at);
                break;
            }
            search = at + needle.len();
        }
        offset += found?;
    }
    Some(text[..offset].matches('\n').count() + 1)
}

fn error_at(source: Option<&str>, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        line: source.and_then(|s| find_line(s, key)),
        message: message.into(),
    }
}

/// Guesses the key a serde message is about (`unknown field `x``,
/// `missing field `x``, `invalid type ...`).
fn serde_key(message: &str) -> String {
    for marker in ["unknown field `", "missing field `"] {
        if let Some(i) = message.find(marker) {
            let rest = &message[i + marker.len()..];
            if let Some(end) = rest.find('`') {
                return rest[..end].to_string();
            }
        }
    }
    "<document>".into()
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut config: RunConfig = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            ConfigError {
                key: serde_key(&msg),
                line: Some(e.line()),
                message: msg,
            }
        })?;
        config.base_dir = base_dir.to_path_buf();
        config.source = Some(text.to_string());
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            key: "<file>".into(),
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        error_at(self.source.as_deref(), key, message)
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Checks expressions, paths, the domain and the solver block.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let pb = &self.problem;
        for (key, src) in [("problem.p", &pb.p), ("problem.q", &pb.q), ("problem.eta", &pb.eta)] {
            Expr::parse(src).map_err(|e| self.err(key, format!("cannot parse \"{src}\": {e}")))?;
        }
        for (key, data) in [("problem.f", &pb.f), ("problem.g", &pb.g)] {
            match data {
                DataSource::Expr(src) => {
                    Expr::parse(src).map_err(|e| self.err(key, format!("cannot parse \"{src}\": {e}")))?;
                }
                DataSource::Csv { csv } => {
                    let path = self.resolve(csv);
                    if !path.is_file() {
                        return Err(self.err(key, format!("file {} does not exist", path.display())));
                    }
                }
                DataSource::Spike { spike } => {
                    if spike.at.len() != pb.lower.len() {
                        return Err(self.err(key, "spike location must have one coordinate per axis"));
                    }
                }
            }
        }
        self.domain()?;
        if pb.resolution < 2 {
            return Err(self.err("problem.resolution", "resolution must be at least 2"));
        }
        if !(pb.lambda >= 0.0) {
            return Err(self.err("problem.lambda", "λ must be nonnegative"));
        }
        self.solver.validate().map_err(|e| self.err("solver", e.to_string()))?;
        if self.mode == Some(Mode::Manufactured) {
            self.validate_manufactured()?;
        }
        for f in &self.output.formats {
            if f != "json" && f != "csv" {
                return Err(self.err("output.formats", format!("unknown format \"{f}\"")));
            }
        }
        Ok(())
    }

    fn validate_manufactured(&self) -> Result<(), ConfigError> {
        let pb = &self.problem;
        let m = &self.manufactured;
        Expr::parse(&m.solution).map_err(|e| self.err("manufactured.solution", e.to_string()))?;
        if m.gradient.len() != pb.lower.len() {
            return Err(self.err("manufactured.gradient", "need one gradient expression per axis"));
        }
        for g in &m.gradient {
            Expr::parse(g).map_err(|e| self.err("manufactured.gradient", e.to_string()))?;
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<DomainDescriptor, ConfigError> {
        let pb = &self.problem;
        if pb.lower.len() != pb.upper.len() || !(1..=2).contains(&pb.lower.len()) {
            return Err(self.err("problem.lower", "lower and upper need the same length, 1 or 2"));
        }
        let pad = |v: &[f64]| [v[0], v.get(1).copied().unwrap_or(0.0)];
        DomainDescriptor::new(pb.lower.len(), pad(&pb.lower), pad(&pb.upper))
            .map_err(|e| self.err("problem.upper", e.to_string()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn field(&self, key: &str, src: &str) -> Result<ExponentField, ConfigError> {
        ExponentField::from_expr(self.domain()?, src).map_err(|e| self.err(key, e.to_string()))
    }

    pub fn exponents(&self) -> Result<ExponentTriple, ConfigError> {
        let pb = &self.problem;
        Ok(ExponentTriple::new(
            self.field("problem.p", &pb.p)?,
            self.field("problem.q", &pb.q)?,
            self.field("problem.eta", &pb.eta)?,
            pb.variant,
        ))
    }

    pub fn grid(&self) -> Result<Arc<Grid>, ConfigError> {
        Grid::build(&self.domain()?, self.problem.resolution)
            .map(Arc::new)
            .map_err(|e| self.err("problem.resolution", e.to_string()))
    }

    pub fn data(&self, key: &str, source: &DataSource, grid: &Arc<Grid>) -> Result<GridFunction, ConfigError> {
        match source {
            DataSource::Expr(src) => {
                let e = Expr::parse(src).map_err(|e| self.err(key, e.to_string()))?;
                GridFunction::from_fn(grid.clone(), |x| e.eval(x[0], x[1])).map_err(|e| self.err(key, e.to_string()))
            }
            DataSource::Csv { csv } => {
                csvio::read_grid_function(&self.resolve(csv), grid).map_err(|e| self.err(key, e.to_string()))
            }
            DataSource::Spike { spike } => {
                let at = [spike.at[0], spike.at.get(1).copied().unwrap_or(0.0)];
                let node = grid
                    .interior_nodes()
                    .min_by(|&a, &b| {
                        let d = |i: usize| {
                            let x = grid.node(i);
                            (x[0] - at[0]).powi(2) + (x[1] - at[1]).powi(2)
                        };
                        d(a).total_cmp(&d(b))
                    })
                    .ok_or_else(|| self.err(key, "grid has no interior node"))?;
                let mut v = vec![spike.base; grid.num_nodes()];
                v[node] = spike.value;
                GridFunction::new(grid.clone(), v).map_err(|e| self.err(key, e.to_string()))
            }
        }
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec, ConfigError> {
        let grid = self.grid()?;
        let f = self.data("problem.f", &self.problem.f, &grid)?;
        let g = self.data("problem.g", &self.problem.g, &grid)?;
        ProblemSpec::new(self.exponents()?, f, g, self.problem.lambda).map_err(|e| self.err("problem", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_benchmark() {
        let c = RunConfig::parse("{}", Path::new(".")).unwrap();
        assert_eq!(c.problem.resolution, 256);
        assert_eq!(c.seed(), DEFAULT_SEED);
        let spec = c.problem_spec().unwrap();
        assert_eq!(spec.grid().num_nodes(), 257);
    }

    #[test]
    fn malformed_expression_names_key_and_line() {
        let text = "{\n  \"problem\": {\n    \"p\": \"2+*x\"\n  }\n}";
        let err = RunConfig::parse(text, Path::new(".")).unwrap_err();
        assert_eq!(err.key, "problem.p");
        assert_eq!(err.line, Some(3));
        assert!(err.to_string().contains("problem.p"));
    }

    #[test]
    fn unknown_key_is_reported() {
        let text = "{\n  \"problem\": {\n    \"pp\": \"2\"\n  }\n}";
        let err = RunConfig::parse(text, Path::new(".")).unwrap_err();
        assert_eq!(err.key, "pp");
        assert!(err.line.is_some());
    }

    #[test]
    fn missing_csv_rejected() {
        let text = r#"{"problem": {"f": {"csv": "nope.csv"}}}"#;
        let err = RunConfig::parse(text, Path::new("/nonexistent")).unwrap_err();
        assert_eq!(err.key, "problem.f");
    }

    #[test]
    fn spike_data() {
        let text = r#"{"problem": {"resolution": 8, "f": {"spike": {"base": 1, "value": 100, "at": [0.5]}}}}"#;
        let c = RunConfig::parse(text, Path::new(".")).unwrap();
        let spec = c.problem_spec().unwrap();
        assert_eq!(spec.f().value(4), 100.0);
        assert_eq!(spec.f().value(3), 1.0);
    }
}
