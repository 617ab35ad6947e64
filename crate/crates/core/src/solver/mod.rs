//! Discrete regularized problems, their damped Newton solver and the outer
//! truncation schemes.
//!
//! The inner problem at truncation level `n` and source level `k` is
//!
//! ```text
//! -div((|∇w|² + δ²)^{(p-2)/2} ∇w) + H(∇w) = λ g_n (T_k w)₊^η + f_n
//! ```
//!
//! on P1 elements with zero boundary values, where `H` is `|ξ|^q` or its
//! bounded regularization `H_n`.

mod assemble;
mod manufactured;
mod newton;
mod scheme;

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::exponent::{check_admissibility, ExponentTriple, Variant};
use crate::grid::{Grid, GridFunction};
use crate::report::ValidationReport;
use crate::{Error, Result};

pub use assemble::{
    assemble_residual, check_discrete_monotonicity, energy_identity, weak_solution_residual, EnergyIdentity,
};
pub use manufactured::{manufactured_convergence, manufactured_problem, ConvergenceRow, Manufactured};
pub use newton::{solve_reference, solve_regularized, InnerFailure, InnerSolution, InnerTrace};
pub use scheme::{
    check_comparison, default_test_functions, hamiltonian_consistency, natural_growth_scheme, outer_scheme,
    HamiltonianConsistency, SchemeFailure, SolveReport, StageRecord,
};

/// Tolerance on the nonnegativity of accepted solutions.
pub const NONNEGATIVITY_TOLERANCE: f64 = 1e-8;
/// Tolerance of the comparison `0 <= w <= v_k`.
pub const COMPARISON_TOLERANCE: f64 = 1e-6;

/// A complete discrete problem instance.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    grid: Arc<Grid>,
    exponents: ExponentTriple,
    f: GridFunction,
    g: GridFunction,
    lambda: f64,
    admissibility: ValidationReport,
}

impl ProblemSpec {
    /// Validates data signs, `g ≢ 0` when `λ > 0` and the admissibility of
    /// the exponents for their variant.
    pub fn new(exponents: ExponentTriple, f: GridFunction, g: GridFunction, lambda: f64) -> Result<Self> {
        let grid = f.grid().clone();
        if !f.same_grid(&g) {
            return Err(Error::InvalidArgument("f and g live on different grids".into()));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidData(format!("λ = {lambda} must be finite and nonnegative")));
        }
        if f.min() < 0.0 {
            return Err(Error::InvalidData(format!("f has negative value {}", f.min())));
        }
        if g.min() < 0.0 {
            return Err(Error::InvalidData(format!("g has negative value {}", g.min())));
        }
        if lambda > 0.0 && g.is_zero() {
            return Err(Error::InvalidData("g must not vanish identically when λ > 0".into()));
        }
        let admissibility = check_admissibility(&exponents, grid.dimension());
        if !admissibility.passed() {
            let failed: Vec<String> = admissibility
                .failures()
                .map(|c| format!("{} (slack {:.3e})", c.name, c.slack))
                .collect();
            return Err(Error::Hypothesis(format!(
                "exponents not admissible for the {:?} variant: {}",
                exponents.variant,
                failed.join(", ")
            )));
        }
        Ok(Self {
            grid,
            exponents,
            f,
            g,
            lambda,
            admissibility,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn exponents(&self) -> &ExponentTriple {
        &self.exponents
    }

    pub fn variant(&self) -> Variant {
        self.exponents.variant
    }

    pub fn f(&self) -> &GridFunction {
        &self.f
    }

    pub fn g(&self) -> &GridFunction {
        &self.g
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn admissibility(&self) -> &ValidationReport {
        &self.admissibility
    }
}

/// Backtracking parameters of the damped Newton iteration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct Damping {
    /// Sufficient-decrease constant on the residual 2-norm.
    pub armijo: f64,
    /// Step reduction factor.
    pub factor: f64,
    pub min_step: f64,
}

impl Default for Damping {
    fn default() -> Self {
        Self {
            armijo: 1e-4,
            factor: 0.5,
            min_step: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SolverConfig {
    /// Flux regularization `δ` in `(|∇w|² + δ²)^{(p-2)/2}`.
    pub delta: f64,
    /// Inner stopping tolerance on the max-norm of the nodal residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub damping: Damping,
    /// Lag the whole Hamiltonian term instead of differentiating it.
    pub picard_hamiltonian: bool,
    /// Weight of the gradient term; `0` removes it.
    pub gradient_weight: f64,
    /// Regularization index of `H_n` inside each stage; `None` keeps `|ξ|^q`.
    pub hamiltonian_regularization: Option<f64>,
    /// Truncation levels `n₁ < n₂ < …` of the outer scheme.
    pub schedule: Vec<f64>,
    /// Levels `k` at which tails and truncate distances are recorded.
    pub k_levels: Vec<f64>,
    pub outer_tolerance: f64,
    /// Append doubled levels while the last stage still truncates.
    pub extend_schedule: bool,
    pub max_extensions: usize,
    /// Stop at the first stage whose verdict is converged.
    pub stop_at_convergence: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            delta: 1e-6,
            tolerance: 1e-10,
            max_iterations: 100,
            damping: Damping::default(),
            picard_hamiltonian: false,
            gradient_weight: 1.0,
            hamiltonian_regularization: None,
            schedule: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            k_levels: vec![1.0, 2.0, 4.0, 8.0],
            outer_tolerance: 1e-4,
            extend_schedule: true,
            max_extensions: 8,
            stop_at_convergence: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|x| *x > 0.0 && x.is_finite());
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("δ = {} must be positive", self.delta)));
        }
        if !(self.tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidArgument("inner tolerance and iteration cap must be positive".into()));
        }
        if !(self.damping.factor > 0.0 && self.damping.factor < 1.0 && self.damping.min_step > 0.0) {
            return Err(Error::InvalidArgument("damping factor must lie in (0, 1)".into()));
        }
        if self.schedule.is_empty() || !increasing(&self.schedule) {
            return Err(Error::InvalidArgument("truncation schedule must be positive and strictly increasing".into()));
        }
        if !increasing(&self.k_levels) {
            return Err(Error::InvalidArgument("k levels must be positive and strictly increasing".into()));
        }
        if let Some(n) = self.hamiltonian_regularization {
            if !(n > 0.0) {
                return Err(Error::InvalidArgument(format!("regularization index {n} must be positive")));
            }
        }
        if !(self.gradient_weight >= 0.0) || !(self.outer_tolerance > 0.0) {
            return Err(Error::InvalidArgument("gradient weight and outer tolerance must be nonnegative".into()));
        }
        Ok(())
    }
}
