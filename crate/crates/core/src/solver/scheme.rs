//! Outer truncation schemes and their diagnostics.
//!
//! Stage `n` solves the problem with data `T_n(f)`, `T_n(g)` and source
//! `λ g_n T_n(w)₊^η`, warm started from the previous stage. Each stage also
//! solves the comparison problem `-Δ_p v_n = λ g n^{η⁺} + f` and records tails
//! `τ(n,k) = ∫_{u_n >= k} |∇u_n|^q`, excess modulars `∫|∇G_k(u_n)|^p` and
//! truncate distances `‖∇T_k u_n - ∇T_k u_{n'}‖_{L^p}` to the previous stage.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::assemble::{energy_of, weak_solution_residual, EnergyIdentity, Operator};
use super::newton::{newton, predictor, solve_reference, InnerFailure, InnerTrace};
use super::{ProblemSpec, SolverConfig, COMPARISON_TOLERANCE, NONNEGATIVITY_TOLERANCE};
use crate::exponent::{data_exponents, ExponentField, Variant};
use crate::grid::{dirichlet_project, Grid, GridFunction, QuadratureRule};
use crate::math;
use crate::modular::{barycenter_values, gradient_modular, gradient_norm, luxemburg_norm};
use crate::report::{Check, ValidationReport};
use crate::toolkit::{check_test_map_property, excess_fn, truncate_fn, TruncationLevel};
use crate::toolkit::hamiltonian_value;
use crate::{Error, Result};

/// Diagnostics of one outer stage.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StageRecord {
    pub n: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub solution: GridFunction,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub barrier: GridFunction,
    pub inner: InnerTrace,
    pub residual_norm: f64,
    /// `∫|∇u_n|^p`.
    pub gradient_modular: f64,
    /// `‖∇u_n‖_{L^q}`.
    pub gradient_norm_q: f64,
    /// `τ(n,k)` for each diagnostic level.
    pub tails: Vec<f64>,
    /// `∫|∇G_k(u_n)|^p` for each diagnostic level.
    pub excess_modulars: Vec<f64>,
    /// `d(n,k)` for each level; absent at the first stage.
    pub distances: Option<Vec<f64>>,
    /// `min(v_n - u_n)`.
    pub barrier_margin: f64,
    pub min_value: f64,
    pub max_value: f64,
    pub energy: EnergyIdentity,
    /// Data and solution are below `n`, so no truncation acted.
    pub truncation_inactive: bool,
    /// Distances below the outer tolerance and the gradient norm stable.
    pub distance_converged: bool,
    pub converged: bool,
}

/// `‖f‖_{L^{q₀}}` and `‖g‖_{L^{q₁}}`, reported but not gated.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DataNorms {
    pub q0: f64,
    pub f_norm: f64,
    pub g_norm: f64,
}

#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolveReport {
    pub variant: Variant,
    pub delta: f64,
    pub inner_tolerance: f64,
    pub outer_tolerance: f64,
    pub k_levels: Vec<f64>,
    pub stages: Vec<StageRecord>,
    pub converged: bool,
    /// Index of the first stage whose verdict was converged.
    pub converged_at: Option<usize>,
    pub checks: ValidationReport,
    pub admissibility: ValidationReport,
    pub map_property: Option<ValidationReport>,
    /// Informational hypotheses the instance does not meet.
    pub outside_hypotheses: Vec<String>,
    pub data_norms: Option<DataNorms>,
    /// Weak-form defects of the final solution against the default tests.
    pub weak_residual: Vec<f64>,
    pub failure: Option<String>,
}

impl SolveReport {
    fn new(spec: &ProblemSpec, config: &SolverConfig) -> Self {
        let outside = spec
            .admissibility()
            .checks
            .iter()
            .filter(|c| c.informational && !c.passed)
            .map(|c| c.name.clone())
            .collect();
        Self {
            variant: spec.variant(),
            delta: config.delta,
            inner_tolerance: config.tolerance,
            outer_tolerance: config.outer_tolerance,
            k_levels: config.k_levels.clone(),
            stages: Vec::new(),
            converged: false,
            converged_at: None,
            checks: ValidationReport::new("scheme"),
            admissibility: spec.admissibility().clone(),
            map_property: None,
            outside_hypotheses: outside,
            data_norms: None,
            weak_residual: Vec::new(),
            failure: None,
        }
    }

    pub fn final_solution(&self) -> Option<&GridFunction> {
        self.stages.last().map(|s| &s.solution)
    }

    /// `d(n,k)` over the stages for diagnostic level index `j`.
    pub fn distance_series(&self, j: usize) -> Vec<(f64, f64)> {
        self.stages
            .iter()
            .filter_map(|s| s.distances.as_ref().map(|d| (s.n, d[j])))
            .collect()
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SchemeFailure {
    /// The instance or configuration was rejected before any solve.
    #[error(transparent)]
    Rejected(#[from] Error),
    /// An inner solve failed; the report holds all completed stages.
    #[error("stage n = {n}: {failure}")]
    Inner {
        n: f64,
        failure: InnerFailure,
        report: Box<SolveReport>,
    },
}

/// Barrier and sign checks of `w` against `v_k`.
pub fn check_comparison(w: &GridFunction, v_k: &GridFunction) -> Result<ValidationReport> {
    if !w.same_grid(v_k) {
        return Err(Error::InvalidArgument("w and v_k live on different grids".into()));
    }
    let margin = w
        .values()
        .iter()
        .zip(v_k.values())
        .map(|(a, b)| b - a)
        .fold(f64::INFINITY, f64::min);
    let mut r = ValidationReport::new("comparison");
    r.push(Check::slack("below_barrier", margin, COMPARISON_TOLERANCE).with_value(margin));
    r.push(Check::slack("nonnegative", w.min(), COMPARISON_TOLERANCE).with_value(w.min()));
    Ok(r)
}

/// Hats at interior nodes near a quarter, a half and three quarters of the
/// first axis, and a sine bump.
pub fn default_test_functions(grid: &alloc::sync::Arc<Grid>) -> Vec<GridFunction> {
    let lo = grid.domain().lower();
    let dim = grid.dimension();
    let mid_y = if dim == 1 { 0.0 } else { lo[1] + 0.5 * grid.domain().extent(1) };
    let mut tests = Vec::new();
    for frac in [0.25, 0.5, 0.75] {
        let target = [lo[0] + frac * grid.domain().extent(0), mid_y];
        let node = grid
            .interior_nodes()
            .min_by(|&a, &b| {
                let d = |i: usize| {
                    let x = grid.node(i);
                    { let (a, b) = (x[0] - target[0], x[1] - target[1]); a * a + b * b }
                };
                d(a).total_cmp(&d(b))
            });
        if let Some(node) = node {
            let mut v = vec![0.0; grid.num_nodes()];
            v[node] = 1.0;
            tests.push(GridFunction::new(grid.clone(), v).expect("finite"));
        }
    }
    let d = *grid.domain();
    let bump = GridFunction::from_fn(grid.clone(), |x| {
        let s = |axis: usize| math::sin(core::f64::consts::PI * (x[axis] - d.lower()[axis]) / d.extent(axis));
        if dim == 1 { s(0) } else { s(0) * s(1) }
    })
    .expect("finite");
    tests.push(dirichlet_project(&bump));
    tests
}

fn data_norms(spec: &ProblemSpec) -> Option<DataNorms> {
    let (q0, q1) = data_exponents(spec.exponents(), spec.grid().dimension()).ok()?;
    let q0_field = ExponentField::constant(*spec.grid().domain(), q0).ok()?;
    Some(DataNorms {
        q0,
        f_norm: luxemburg_norm(spec.f(), &q0_field),
        g_norm: luxemburg_norm(spec.g(), &q1),
    })
}

struct Stage<'a> {
    spec: &'a ProblemSpec,
    config: &'a SolverConfig,
    p: &'a ExponentField,
    q_bary: Vec<f64>,
}

impl Stage<'_> {
    fn tails(&self, u: &GridFunction) -> Vec<f64> {
        let grid = u.grid();
        let bary = barycenter_values(u);
        let gnorm = u.gradient_norms();
        self.config
            .k_levels
            .iter()
            .map(|&k| {
                (0..grid.num_elements())
                    .filter(|&e| bary[e] >= k)
                    .map(|e| grid.volume(e) * math::abs_pow(gnorm[e], self.q_bary[e]))
                    .fold(0.0, |a, b| a + b)
            })
            .collect()
    }

    fn record(
        &self,
        n: f64,
        op: &Operator,
        solution: GridFunction,
        barrier: GridFunction,
        inner: InnerTrace,
        previous: Option<(&GridFunction, f64)>,
    ) -> StageRecord {
        let levels = &self.config.k_levels;
        let tol = self.config.outer_tolerance;
        let gq = gradient_norm(&solution, &self.spec.exponents().q);
        let distances = previous.map(|(prev, _)| {
            levels
                .iter()
                .map(|&k| {
                    let level = TruncationLevel::new(k).expect("validated levels");
                    let a = truncate_fn(&solution, level);
                    let b = truncate_fn(prev, level);
                    let diff = GridFunction::new(
                        solution.grid().clone(),
                        a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect(),
                    )
                    .expect("finite");
                    gradient_norm(&diff, self.p)
                })
                .collect::<Vec<f64>>()
        });
        let stable = previous.is_some_and(|(_, prev_gq)| math::abs(gq - prev_gq) <= tol * gq.max(1.0));
        let distance_converged = stable && distances.as_ref().is_some_and(|d| d.iter().all(|&x| x < tol));
        let truncation_inactive =
            self.spec.f().max() <= n && self.spec.g().max() <= n && solution.max() <= n;
        let barrier_margin = barrier
            .values()
            .iter()
            .zip(solution.values())
            .map(|(v, w)| v - w)
            .fold(f64::INFINITY, f64::min);
        StageRecord {
            n,
            residual_norm: inner.final_residual(),
            gradient_modular: gradient_modular(&solution, self.p),
            gradient_norm_q: gq,
            tails: self.tails(&solution),
            excess_modulars: levels
                .iter()
                .map(|&k| gradient_modular(&excess_fn(&solution, TruncationLevel::new(k).expect("validated")), self.p))
                .collect(),
            distances,
            barrier_margin,
            min_value: solution.min(),
            max_value: solution.max(),
            energy: energy_of(op, &solution),
            truncation_inactive,
            distance_converged,
            converged: distance_converged || truncation_inactive,
            inner,
            solution,
            barrier,
        }
    }
}

fn finalize(report: &mut SolveReport, spec: &ProblemSpec) {
    let stages = &report.stages;
    let min_value = stages.iter().map(|s| s.min_value).fold(f64::INFINITY, f64::min);
    let margin = stages.iter().map(|s| s.barrier_margin).fold(f64::INFINITY, f64::min);
    let tail_increase = stages
        .iter()
        .flat_map(|s| s.tails.windows(2).map(|w| w[1] - w[0]))
        .fold(f64::NEG_INFINITY, f64::max);
    let energy = stages.iter().map(|s| s.energy.relative_slack()).fold(f64::INFINITY, f64::min);
    let mut checks = ValidationReport::new("scheme");
    checks.push(Check::slack("nonnegativity", min_value, NONNEGATIVITY_TOLERANCE).with_value(min_value));
    checks.push(Check::slack("below_barrier", margin, COMPARISON_TOLERANCE).with_value(margin));
    let tail_slack = if tail_increase.is_finite() { -tail_increase } else { 0.0 };
    checks.push(Check::slack("tails_nonincreasing_in_k", tail_slack, 0.0));
    checks.push(Check::slack("energy_identity", energy, 1e-8).with_value(energy));
    if let Some(last) = stages.last() {
        if let Some(d) = &last.distances {
            let worst = d.iter().copied().fold(0.0, f64::max);
            checks.push(Check::new("final_distances_below_tolerance", worst < report.outer_tolerance, report.outer_tolerance - worst).with_value(worst));
        }
        let tests = default_test_functions(spec.grid());
        if let Ok(defects) = weak_solution_residual(&last.solution, spec, &tests) {
            // A defect sums nodal residuals weighted by the test function's
            // nodal values, so the bound grows with their l1 mass.
            let slack = defects
                .iter()
                .zip(&tests)
                .map(|(d, t)| {
                    let mass = t.values().iter().fold(0.0, |a, v| a + math::abs(*v));
                    10.0 * report.inner_tolerance * mass.max(1.0) - math::abs(*d)
                })
                .fold(f64::INFINITY, f64::min);
            let worst = defects.iter().fold(0.0f64, |m, d| m.max(math::abs(*d)));
            checks.push(Check::new("weak_residual", slack >= 0.0, slack).with_value(worst));
            report.weak_residual = defects;
        }
        report.converged = last.converged;
    }
    if let Some(map) = &report.map_property {
        checks.push(Check::new("map_property", map.passed(), map.worst_slack()));
    }
    report.converged_at = stages.iter().position(|s| s.converged);
    report.checks = checks;
}

fn run(spec: &ProblemSpec, config: &SolverConfig, mut report: SolveReport) -> core::result::Result<SolveReport, SchemeFailure> {
    let stage = Stage {
        spec,
        config,
        p: &spec.exponents().p,
        q_bary: QuadratureRule::barycenter(spec.grid()).sample(&spec.exponents().q),
    };
    report.data_norms = data_norms(spec);
    let mut schedule = config.schedule.clone();
    let mut extensions = 0;
    let mut previous: Option<(GridFunction, f64)> = None;
    let mut i = 0;
    while i < schedule.len() {
        let n = schedule[i];
        let op = Operator::stage(spec, config, Some(n), Some(n));
        let attempt = (|| {
            let start = match &previous {
                Some((u, _)) => u.clone(),
                None => predictor(&op)?,
            };
            let inner = newton(&op, &start, config)?;
            let barrier = solve_reference(spec, config, n)?;
            Ok::<_, InnerFailure>((inner, barrier))
        })();
        let (inner, barrier) = match attempt {
            Ok(v) => v,
            Err(failure) => {
                finalize(&mut report, spec);
                report.converged = false;
                report.failure = Some(format!("stage n = {n}: {failure}"));
                return Err(SchemeFailure::Inner {
                    n,
                    failure,
                    report: Box::new(report),
                });
            }
        };
        let rec = stage.record(
            n,
            &op,
            inner.solution,
            barrier.solution,
            inner.trace,
            previous.as_ref().map(|(u, g)| (u, *g)),
        );
        previous = Some((rec.solution.clone(), rec.gradient_norm_q));
        let (done, distance_ok) = (rec.converged, rec.distance_converged);
        report.stages.push(rec);
        if done && config.stop_at_convergence {
            break;
        }
        if i + 1 == schedule.len() && config.extend_schedule && !distance_ok && extensions < config.max_extensions {
            schedule.push(2.0 * n);
            extensions += 1;
        }
        i += 1;
    }
    finalize(&mut report, spec);
    Ok(report)
}

/// Truncation scheme for the sub-natural problem.
pub fn outer_scheme(spec: &ProblemSpec, config: &SolverConfig) -> core::result::Result<SolveReport, SchemeFailure> {
    config.validate()?;
    if spec.variant() != Variant::Subnatural {
        return Err(Error::InvalidArgument("outer_scheme needs the sub-natural variant; use natural_growth_scheme".into()).into());
    }
    run(spec, config, SolveReport::new(spec, config))
}

/// Truncation scheme for `q ≡ p`, `p⁻ >= 2`.
pub fn natural_growth_scheme(spec: &ProblemSpec, config: &SolverConfig) -> core::result::Result<SolveReport, SchemeFailure> {
    config.validate()?;
    let t = spec.exponents();
    if spec.variant() != Variant::Natural {
        return Err(Error::InvalidArgument("natural_growth_scheme needs the natural variant".into()).into());
    }
    let pts = spec.grid().domain().validation_points();
    if let Some(x) = pts.iter().find(|&&x| t.p.eval(x) < 2.0) {
        return Err(Error::Hypothesis(format!(
            "natural growth needs p >= 2, found p = {} at ({}, {})",
            t.p.eval(*x),
            x[0],
            x[1]
        ))
        .into());
    }
    if let Some(x) = pts.iter().find(|&&x| t.q.eval(x) != t.p.eval(x)) {
        return Err(Error::Hypothesis(format!(
            "natural growth needs q = p, found q = {} and p = {} at ({}, {})",
            t.q.eval(*x),
            t.p.eval(*x),
            x[0],
            x[1]
        ))
        .into());
    }
    let mut report = SolveReport::new(spec, config);
    let s_grid: Vec<f64> = (0..10_000).map(|i| 5.0 * i as f64 / 9_999.0).collect();
    report.map_property = Some(check_test_map_property(Variant::Natural, Some(t.p.max()), &s_grid)?);
    run(spec, config, report)
}

/// Effect of replacing `|ξ|^q` by `H_n` and `H_{2n}` on one inner solve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HamiltonianConsistency {
    pub n: f64,
    /// `‖w_n - w_{2n}‖_∞`.
    pub difference: f64,
    /// `sup |H_n - H_{2n}|` over the element gradients of `w_n`.
    pub hamiltonian_gap: f64,
    /// `‖z‖_∞` for `-Δ_p z = gap`, the admitted difference.
    pub tolerance: f64,
    /// `min(w_n - w_{2n})`; nonnegative since `H_{2n} >= H_n`.
    pub ordering: f64,
    pub passed: bool,
}

/// Solves the stage problem at data level `level` with `H_n` and with
/// `H_{2n}` and compares the two solutions.
pub fn hamiltonian_consistency(
    spec: &ProblemSpec,
    config: &SolverConfig,
    n: f64,
    level: Option<f64>,
) -> core::result::Result<HamiltonianConsistency, InnerFailure> {
    let solve = |m: f64| {
        let cfg = SolverConfig {
            hamiltonian_regularization: Some(m),
            ..config.clone()
        };
        cfg.validate()?;
        let op = Operator::stage(spec, &cfg, level, level);
        newton(&op, &predictor(&op)?, &cfg)
    };
    let a = solve(n)?.solution;
    let b = solve(2.0 * n)?.solution;
    let q = QuadratureRule::barycenter(spec.grid()).sample(&spec.exponents().q);
    let gap = a
        .gradient_norms()
        .iter()
        .zip(&q)
        .map(|(&xi, &q)| hamiltonian_value(xi, q, Some(2.0 * n)) - hamiltonian_value(xi, q, Some(n)))
        .fold(0.0f64, f64::max)
        * config.gradient_weight;
    let tolerance = if gap > 0.0 {
        let bound = ProblemSpec::new(
            spec.exponents().clone(),
            GridFunction::constant(spec.grid().clone(), gap)?,
            spec.g().clone(),
            0.0,
        )?;
        solve_reference(&bound, config, 1.0)?.solution.max_abs()
    } else {
        0.0
    };
    let diff: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
    let difference = diff.iter().fold(0.0f64, |m, d| m.max(math::abs(*d)));
    let ordering = diff.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(HamiltonianConsistency {
        n,
        difference,
        hamiltonian_gap: gap,
        tolerance,
        ordering,
        passed: difference <= tolerance + config.tolerance && ordering >= -NONNEGATIVITY_TOLERANCE,
    })
}
