//! Manufactured solutions for `-Δ_p u + |∇u|^q = f` with `λ = 0`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::assemble::Operator;
use super::newton::{newton, predictor, InnerFailure};
use super::{ProblemSpec, SolverConfig};
use crate::exponent::{DomainDescriptor, ExponentField, ExponentTriple, Point, Variant};
use crate::grid::{Grid, GridFunction};
use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Manufactured {
    pub spec: ProblemSpec,
    pub exact: GridFunction,
}

/// Forcing `f = -div(|∇u|^{p-2}∇u) + |∇u|^q` from the exact gradient, with
/// the divergence taken by central differences of the exact flux.
fn forcing(p: &ExponentField, q: &ExponentField, grad: &dyn Fn(Point) -> [f64; 2], dim: usize, x: Point) -> f64 {
    let flux = |y: Point, axis: usize| {
        let g = grad(y);
        let n = math::sqrt(g[0] * g[0] + g[1] * g[1]);
        if n == 0.0 {
            0.0
        } else {
            math::powf(n, p.eval(y) - 2.0) * g[axis]
        }
    };
    let h = 1e-5;
    let mut div = 0.0;
    for axis in 0..dim {
        let (mut a, mut b) = (x, x);
        a[axis] += h;
        b[axis] -= h;
        div += (flux(a, axis) - flux(b, axis)) / (2.0 * h);
    }
    let g = grad(x);
    -div + math::abs_pow(math::sqrt(g[0] * g[0] + g[1] * g[1]), q.eval(x))
}

/// Problem with `λ = 0`, `g ≡ 0`, `η ≡ 0` whose exact solution is `u`.
pub fn manufactured_problem(
    p: &ExponentField,
    q: &ExponentField,
    variant: Variant,
    grid: &Arc<Grid>,
    u: &dyn Fn(Point) -> f64,
    grad: &dyn Fn(Point) -> [f64; 2],
) -> Result<Manufactured> {
    let dim = grid.dimension();
    let mut values = Vec::with_capacity(grid.num_nodes());
    for &x in grid.nodes() {
        let f = forcing(p, q, grad, dim, x);
        if f < -1e-6 {
            return Err(Error::InvalidData(format!(
                "manufactured forcing is negative ({f}) at ({}, {})",
                x[0], x[1]
            )));
        }
        values.push(f.max(0.0));
    }
    let f = GridFunction::new(grid.clone(), values)?;
    let exact = GridFunction::from_fn(grid.clone(), u)?;
    let eta = ExponentField::constant(*grid.domain(), 0.0)?;
    let spec = ProblemSpec::new(
        ExponentTriple::new(p.clone(), q.clone(), eta, variant),
        f,
        GridFunction::zeros(grid.clone()),
        0.0,
    )?;
    Ok(Manufactured { spec, exact })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvergenceRow {
    pub resolution: usize,
    pub h: f64,
    /// Max nodal error.
    pub error: f64,
    /// Error ratio to the previous (coarser) row.
    pub ratio: Option<f64>,
    pub iterations: usize,
}

/// Solves the manufactured problem at each resolution and tabulates the
/// max-norm error.
#[allow(clippy::too_many_arguments)]
pub fn manufactured_convergence(
    domain: &DomainDescriptor,
    p: &ExponentField,
    q: &ExponentField,
    variant: Variant,
    resolutions: &[usize],
    config: &SolverConfig,
    u: &dyn Fn(Point) -> f64,
    grad: &dyn Fn(Point) -> [f64; 2],
) -> core::result::Result<Vec<ConvergenceRow>, InnerFailure> {
    config.validate()?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(resolutions.len());
    for &res in resolutions {
        let grid = Arc::new(Grid::build(domain, res)?);
        let m = manufactured_problem(p, q, variant, &grid, u, grad)?;
        let op = Operator::stage(&m.spec, config, None, None);
        let out = newton(&op, &predictor(&op)?, config)?;
        let error = out
            .solution
            .values()
            .iter()
            .zip(m.exact.values())
            .fold(0.0f64, |e, (a, b)| e.max(math::abs(a - b)));
        let ratio = rows.last().map(|r| r.error / error);
        rows.push(ConvergenceRow {
            resolution: res,
            h: grid.h(),
            error,
            ratio,
            iterations: out.trace.iterations(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{assemble_residual, solve_regularized};

    fn field(s: &str) -> ExponentField {
        ExponentField::from_expr(DomainDescriptor::unit_interval(), s).unwrap()
    }

    fn u(x: Point) -> f64 {
        x[0] * (1.0 - x[0])
    }

    fn du(x: Point) -> [f64; 2] {
        [1.0 - 2.0 * x[0], 0.0]
    }

    #[test]
    fn forcing_matches_closed_form() {
        let grid = Arc::new(Grid::build(&DomainDescriptor::unit_interval(), 32).unwrap());
        let m = manufactured_problem(&field("2"), &field("1"), Variant::Subnatural, &grid, &u, &du).unwrap();
        for (i, x) in grid.nodes().iter().enumerate() {
            let exact = 2.0 + (1.0 - 2.0 * x[0]).abs();
            assert!((m.spec.f().value(i) - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn residual_of_interpolant_shrinks() {
        let mut prev = f64::INFINITY;
        for res in [16, 32, 64] {
            let grid = Arc::new(Grid::build(&DomainDescriptor::unit_interval(), res).unwrap());
            let m = manufactured_problem(&field("2"), &field("1"), Variant::Subnatural, &grid, &u, &du).unwrap();
            let r = assemble_residual(&m.exact, &m.spec, &SolverConfig::default(), None, None).unwrap();
            let worst = r.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            assert!(worst < prev);
            prev = worst;
        }
    }

    #[test]
    fn second_order_in_max_norm() {
        let rows = manufactured_convergence(
            &DomainDescriptor::unit_interval(),
            &field("2"),
            &field("1"),
            Variant::Subnatural,
            &[16, 32, 64],
            &SolverConfig::default(),
            &u,
            &du,
        )
        .unwrap();
        for r in &rows[1..] {
            assert!(r.ratio.unwrap() >= 3.0, "{rows:?}");
        }
        let grid = Arc::new(Grid::build(&DomainDescriptor::unit_interval(), 16).unwrap());
        let m = manufactured_problem(&field("2"), &field("1"), Variant::Subnatural, &grid, &u, &du).unwrap();
        let out = solve_regularized(&m.spec, &SolverConfig::default(), None, None, &GridFunction::zeros(grid)).unwrap();
        assert!(out.solution.min() >= -1e-8);
    }
}
