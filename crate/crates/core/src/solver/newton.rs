//! Damped Newton iteration on the interior nodal residual.

use alloc::vec::Vec;

use super::assemble::Operator;
use super::{ProblemSpec, SolverConfig};
use crate::grid::{stiffness_matrix, GridFunction};
use crate::math;
use crate::{Error, Result};

/// Iteration history of one inner solve.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InnerTrace {
    /// Max-norm of the residual before each step and after the last one.
    pub residual_norms: Vec<f64>,
    /// Accepted step length of each Newton step.
    pub step_lengths: Vec<f64>,
    pub converged: bool,
}

impl InnerTrace {
    pub fn iterations(&self) -> usize {
        self.step_lengths.len()
    }

    pub fn final_residual(&self) -> f64 {
        self.residual_norms.last().copied().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone)]
pub struct InnerSolution {
    pub solution: GridFunction,
    pub trace: InnerTrace,
}

/// A failed inner solve with everything computed up to the failure.
#[derive(Debug, Clone, thiserror::Error)]
#[error("inner solver failed after {} steps: {error}", trace.iterations())]
pub struct InnerFailure {
    pub error: Error,
    pub trace: InnerTrace,
    pub last_iterate: Option<GridFunction>,
}

impl InnerFailure {
    fn new(error: Error, trace: InnerTrace, last: Option<GridFunction>) -> Self {
        Self {
            error,
            trace,
            last_iterate: last,
        }
    }
}

impl From<Error> for InnerFailure {
    fn from(error: Error) -> Self {
        Self::new(error, InnerTrace::default(), None)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(math::abs(*x)))
}

fn norm2(v: &[f64]) -> f64 {
    math::sqrt(v.iter().map(|x| x * x).sum())
}

/// Newton with backtracking on the residual 2-norm; stops on the max-norm.
pub(crate) fn newton(op: &Operator, initial: &GridFunction, config: &SolverConfig) -> core::result::Result<InnerSolution, InnerFailure> {
    let grid = op.grid().clone();
    let wrap = |w: &[f64]| GridFunction::new(grid.clone(), w.to_vec()).ok();
    let mut w = initial.values().to_vec();
    let mut trace = InnerTrace::default();
    let mut r = op.residual(&w).map_err(|e| InnerFailure::new(e, trace.clone(), wrap(&w)))?;
    loop {
        let rn = max_abs(&r);
        trace.residual_norms.push(rn);
        if rn <= config.tolerance {
            trace.converged = true;
            let solution = GridFunction::new(grid.clone(), w).expect("finite iterate");
            return Ok(InnerSolution {
                solution: crate::grid::dirichlet_project(&solution),
                trace,
            });
        }
        if trace.iterations() >= config.max_iterations {
            let err = Error::NotConverged {
                iterations: trace.iterations(),
                residual: rn,
            };
            return Err(InnerFailure::new(err, trace, wrap(&w)));
        }
        let lu = match op.jacobian(&w).factor() {
            Ok(lu) => lu,
            Err(e) => return Err(InnerFailure::new(e, trace, wrap(&w))),
        };
        let minus_r: Vec<f64> = r.iter().map(|x| -x).collect();
        let step = op.nodal(&lu.solve(&minus_r));
        let merit = norm2(&r);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = w.iter().zip(&step).map(|(a, d)| a + t * d).collect();
            if let Ok(rt) = op.residual(&trial) {
                if norm2(&rt) <= (1.0 - config.damping.armijo * t) * merit {
                    w = trial;
                    r = rt;
                    break;
                }
            }
            t *= config.damping.factor;
            if t < config.damping.min_step {
                let err = Error::NotConverged {
                    iterations: trace.iterations(),
                    residual: rn,
                };
                return Err(InnerFailure::new(err, trace, wrap(&w)));
            }
        }
        trace.step_lengths.push(t);
    }
}

/// Solution of `-Δ w = rhs` with the predictor right side of `op`.
pub(crate) fn predictor(op: &Operator) -> Result<GridFunction> {
    let grid = op.grid();
    let lu = stiffness_matrix(grid, &op.dofs).factor()?;
    let w = lu.solve(&op.predictor_rhs());
    GridFunction::new(grid.clone(), op.nodal(&w))
}

fn check_boundary(initial: &GridFunction, spec: &ProblemSpec) -> Result<()> {
    if initial.grid().as_ref() != spec.grid().as_ref() {
        return Err(Error::InvalidArgument("initial guess lives on a different grid".into()));
    }
    if let Some(i) = initial.grid().boundary_nodes().find(|&i| initial.value(i) != 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "initial guess is {} at boundary node {i}",
            initial.value(i)
        )));
    }
    Ok(())
}

/// Solves the stage problem with data truncated at `n` and source argument
/// truncated at `k`, starting from `initial`.
pub fn solve_regularized(
    spec: &ProblemSpec,
    config: &SolverConfig,
    n: Option<f64>,
    k: Option<f64>,
    initial: &GridFunction,
) -> core::result::Result<InnerSolution, InnerFailure> {
    config.validate()?;
    check_boundary(initial, spec)?;
    newton(&Operator::stage(spec, config, n, k), initial, config)
}

/// Comparison barrier `v_k` solving `-Δ_p v = λ g k^{η⁺} + f`.
pub fn solve_reference(spec: &ProblemSpec, config: &SolverConfig, k: f64) -> core::result::Result<InnerSolution, InnerFailure> {
    config.validate()?;
    if !(k > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("level k = {k} must be positive")).into());
    }
    let op = Operator::reference(spec, config, k);
    let start = predictor(&op)?;
    newton(&op, &start, config)
}
