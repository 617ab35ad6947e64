//! Modulars, Luxemburg norms and constants of the variable-exponent theory,
//! evaluated on P1 grid functions.
//!
//! All nonlinear integrands use the barycenter rule: one exponent sample per
//! element, function values taken at the barycenter and gradients constant
//! per element. Every inequality below is a statement about an arbitrary
//! measure, so it holds exactly for the discrete (weighted point) measure
//! induced by the rule.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exponent::{conjugate_exponent, critical_exponent, ExponentField};
use crate::grid::{dot, norm, stiffness_matrix, Dofs, Grid, GridFunction, QuadratureRule};
use crate::math;
use crate::report::{Check, ValidationReport};
use crate::{Error, Result};

/// Tolerance on slacks of the norm–modular, Hölder and product checks.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// `ρ(v) = Σ_k w_k |v_k|^{e_k}` for a fixed set of weighted points.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularEvaluator {
    exponents: Vec<f64>,
    weights: Vec<f64>,
    e_min: f64,
    e_max: f64,
}

impl ModularEvaluator {
    pub fn new(field: &ExponentField, rule: &QuadratureRule) -> Self {
        Self::from_parts(rule.sample(field), rule.weights().to_vec()).expect("rule and field agree")
    }

    /// Barycenter rule on `grid`.
    pub fn on_grid(field: &ExponentField, grid: &Grid) -> Self {
        Self::new(field, &QuadratureRule::barycenter(grid))
    }

    pub fn from_parts(exponents: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if exponents.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: weights.len(),
                found: exponents.len(),
            });
        }
        if let Some(e) = exponents.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::InvalidArgument(format!("exponent {e} must be positive and finite")));
        }
        let e_min = exponents.iter().copied().fold(f64::INFINITY, f64::min);
        let e_max = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            exponents,
            weights,
            e_min,
            e_max,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Minimum exponent over the points.
    pub fn exponent_min(&self) -> f64 {
        self.e_min
    }

    pub fn exponent_max(&self) -> f64 {
        self.e_max
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn modular(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        values
            .iter()
            .zip(&self.exponents)
            .zip(&self.weights)
            .map(|((&v, &e), &w)| w * math::abs_pow(v, e))
            .sum()
    }

    /// Luxemburg norm `inf{λ > 0 : ρ(v/λ) <= 1}`.
    pub fn norm(&self, values: &[f64]) -> f64 {
        self.norm_with_weights(values).0
    }

    /// Norm together with `a_k = w_k e_k |v_k/λ|^{e_k}` at the root, which
    /// determine the derivative `∂λ/∂v_k = λ a_k / (v_k Σ a)`.
    fn norm_with_weights(&self, values: &[f64]) -> (f64, Vec<f64>) {
        let lambda = self.solve_unit_level(values);
        if lambda == 0.0 {
            return (0.0, vec![0.0; values.len()]);
        }
        let a = values
            .iter()
            .zip(&self.exponents)
            .zip(&self.weights)
            .map(|((&v, &e), &w)| w * e * math::abs_pow(v / lambda, e))
            .collect();
        (lambda, a)
    }

    /// Gradient of the norm with respect to each point value.
    pub fn norm_gradient(&self, values: &[f64]) -> (f64, Vec<f64>) {
        let (lambda, a) = self.norm_with_weights(values);
        let total: f64 = a.iter().sum();
        let grad = values
            .iter()
            .zip(&a)
            .map(|(&v, &ak)| if v == 0.0 || total == 0.0 { 0.0 } else { lambda * ak / (v * total) })
            .collect();
        (lambda, grad)
    }

    /// Solves `ρ(v/λ) = 1` for `λ`.
    ///
    /// The bracket starts at `[ε, max|v|·|Ω|^{1/e⁻} + 1]` with the upper end
    /// doubled until `ρ(v/λ) <= 1`. Inside it, `t = ln λ` is updated by
    /// Newton steps on the convex decreasing map `t ↦ ln ρ(v e^{-t})`, with
    /// a bisection step whenever Newton would leave the bracket.
    fn solve_unit_level(&self, values: &[f64]) -> f64 {
        let mut log_a = Vec::with_capacity(values.len());
        let mut exps = Vec::with_capacity(values.len());
        let mut vmax = 0.0f64;
        for ((&v, &e), &w) in values.iter().zip(&self.exponents).zip(&self.weights) {
            let av = math::abs(v);
            if av > 0.0 && w > 0.0 {
                log_a.push(math::ln(w) + e * math::ln(av));
                exps.push(e);
                vmax = vmax.max(av);
            }
        }
        if log_a.is_empty() {
            return 0.0;
        }
        // ln ρ(v e^{-t}) and its derivative, via a shifted log-sum-exp.
        let f = |t: f64| -> (f64, f64) {
            let m = log_a
                .iter()
                .zip(&exps)
                .map(|(la, e)| la - e * t)
                .fold(f64::NEG_INFINITY, f64::max);
            let (mut s, mut ds) = (0.0, 0.0);
            for (la, e) in log_a.iter().zip(&exps) {
                let z = math::exp(la - e * t - m);
                s += z;
                ds -= e * z;
            }
            (m + math::ln(s), ds / s)
        };

        let measure = self.measure();
        let mut hi = vmax * math::powf(measure.max(1e-300), 1.0 / self.e_min) + 1.0;
        let mut t_hi = math::ln(hi);
        while f(t_hi).0 > 0.0 {
            hi *= 2.0;
            t_hi = math::ln(hi);
        }
        let mut t_lo = math::ln(f64::EPSILON);
        let mut flo = f(t_lo).0;
        while flo < 0.0 {
            t_lo -= 40.0;
            flo = f(t_lo).0;
        }

        let mut t = t_lo;
        for _ in 0..200 {
            let (ft, dft) = f(t);
            if ft == 0.0 {
                return math::exp(t);
            }
            if ft > 0.0 {
                t_lo = t;
            } else {
                t_hi = t;
            }
            let newton = t - ft / dft;
            let next = if dft < 0.0 && newton > t_lo && newton < t_hi {
                newton
            } else {
                0.5 * (t_lo + t_hi)
            };
            if math::abs(next - t) <= 4.0 * f64::EPSILON * (1.0 + math::abs(t)) || t_hi - t_lo <= 4.0 * f64::EPSILON * (1.0 + math::abs(t)) {
                return math::exp(next);
            }
            t = next;
        }
        math::exp(t)
    }
}

/// Values of `u` at the barycenters of the elements of its grid.
pub fn barycenter_values(u: &GridFunction) -> Vec<f64> {
    let grid = u.grid();
    let k = grid.nodes_per_element() as f64;
    (0..grid.num_elements())
        .map(|e| grid.element_nodes(e).iter().map(|&i| u.value(i)).sum::<f64>() / k)
        .collect()
}

/// `ρ(u) = ∫ |u|^{e(x)}` with the barycenter rule.
pub fn modular(u: &GridFunction, e: &ExponentField) -> f64 {
    ModularEvaluator::on_grid(e, u.grid()).modular(&barycenter_values(u))
}

/// `∫ |∇u|^{e(x)}`.
pub fn gradient_modular(u: &GridFunction, e: &ExponentField) -> f64 {
    ModularEvaluator::on_grid(e, u.grid()).modular(&u.gradient_norms())
}

/// `‖u‖_{L^{e(·)}}`; relative accuracy near machine precision.
pub fn luxemburg_norm(u: &GridFunction, e: &ExponentField) -> f64 {
    ModularEvaluator::on_grid(e, u.grid()).norm(&barycenter_values(u))
}

/// `‖∇u‖_{L^{e(·)}}`.
pub fn gradient_norm(u: &GridFunction, e: &ExponentField) -> f64 {
    ModularEvaluator::on_grid(e, u.grid()).norm(&u.gradient_norms())
}

/// Relative slack `(a - b) / max(1, |a|, |b|)` of `a >= b`.
fn rel_slack(a: f64, b: f64) -> f64 {
    (a - b) / 1.0f64.max(math::abs(a)).max(math::abs(b))
}

/// Unit-ball equivalence and the two-sided power bounds between the norm and
/// the modular, on point values `values`.
pub fn check_norm_modular_values(eval: &ModularEvaluator, values: &[f64]) -> ValidationReport {
    let norm = eval.norm(values);
    let rho = eval.modular(values);
    let (lo, hi) = (eval.exponent_min(), eval.exponent_max());
    let mut report = ValidationReport::new("norm_modular_relations");

    let unit = if math::abs(norm - 1.0) <= 1e-12 {
        -math::abs(rho - 1.0)
    } else if norm > 1.0 {
        rho - 1.0
    } else {
        1.0 - rho
    };
    // Strict side only matters away from the unit sphere; at it the slack is
    // the distance of ρ from 1.
    report.push(Check::slack("unit_ball_equivalence", unit, INEQUALITY_SLACK).with_value(norm));

    let (lower, upper) = if norm >= 1.0 {
        (math::powf(norm, lo), math::powf(norm, hi))
    } else {
        (math::powf(norm, hi), math::powf(norm, lo))
    };
    report.push(Check::slack("modular_lower_power_bound", rel_slack(rho, lower), INEQUALITY_SLACK).with_value(rho));
    report.push(Check::slack("modular_upper_power_bound", rel_slack(upper, rho), INEQUALITY_SLACK).with_value(rho));
    report
}

pub fn check_norm_modular_relations(u: &GridFunction, e: &ExponentField) -> ValidationReport {
    check_norm_modular_values(&ModularEvaluator::on_grid(e, u.grid()), &barycenter_values(u))
}

/// `|∫ u v| <= (1/e⁻ + 1/(e')⁻) ‖u‖_{e} ‖v‖_{e'}`; the value is the ratio of
/// the left side to the bound.
pub fn check_holder(u: &GridFunction, v: &GridFunction, e: &ExponentField) -> Result<ValidationReport> {
    if !u.same_grid(v) {
        return Err(Error::InvalidArgument("grid functions live on different grids".into()));
    }
    let conj = conjugate_exponent(e)?;
    let grid = u.grid();
    let eval = ModularEvaluator::on_grid(e, grid);
    let eval_conj = ModularEvaluator::on_grid(&conj, grid);
    let (uv, vv) = (barycenter_values(u), barycenter_values(v));
    let lhs = math::abs(uv.iter().zip(&vv).zip(eval.weights()).map(|((a, b), w)| a * b * w).sum::<f64>());
    let constant = 1.0 / eval.exponent_min() + 1.0 / eval_conj.exponent_min();
    let bound = constant * eval.norm(&uv) * eval_conj.norm(&vv);
    let ratio = if bound == 0.0 { 0.0 } else { lhs / bound };
    let mut report = ValidationReport::new("holder");
    report.push(Check::slack("holder_bound", rel_slack(bound, lhs), INEQUALITY_SLACK).with_value(ratio));
    Ok(report)
}

/// Sandwich between `‖f^{p}‖_{q}` and powers of `‖f‖_{pq}`.
pub fn check_product_lemma(f: &GridFunction, p: &ExponentField, q: &ExponentField) -> Result<ValidationReport> {
    let grid = f.grid();
    let rule = QuadratureRule::barycenter(grid);
    let pv = rule.sample(p);
    let qv = rule.sample(q);
    if let Some(k) = pv.iter().zip(&qv).position(|(a, b)| a * b < 1.0) {
        return Err(Error::Hypothesis(format!("p·q < 1 at quadrature point {k}")));
    }
    let fv = barycenter_values(f);
    if fv.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidData("f is identically zero".into()));
    }
    let pq: Vec<f64> = pv.iter().zip(&qv).map(|(a, b)| a * b).collect();
    let eval_pq = ModularEvaluator::from_parts(pq, rule.weights().to_vec())?;
    let eval_q = ModularEvaluator::from_parts(qv, rule.weights().to_vec())?;
    let f_pow: Vec<f64> = fv.iter().zip(&pv).map(|(&v, &e)| math::abs_pow(v, e)).collect();

    let norm_pq = eval_pq.norm(&fv);
    let middle = eval_q.norm(&f_pow);
    let p_min = pv.iter().copied().fold(f64::INFINITY, f64::min);
    let p_max = pv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lower, upper) = if norm_pq <= 1.0 {
        (math::powf(norm_pq, p_max), math::powf(norm_pq, p_min))
    } else {
        (math::powf(norm_pq, p_min), math::powf(norm_pq, p_max))
    };
    let mut report = ValidationReport::new("product_lemma");
    let case = if norm_pq <= 1.0 { "case (i)" } else { "case (ii)" };
    report.push(Check::slack("lower", rel_slack(middle, lower), INEQUALITY_SLACK).with_value(middle).note(case));
    report.push(Check::slack("upper", rel_slack(upper, middle), INEQUALITY_SLACK).with_value(middle).note(case));
    Ok(report)
}

/// Settings for the multi-start Rayleigh-quotient descent.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ConstantConfig {
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop once the relative decrease over `window` accepted steps falls
    /// below this.
    pub relative_tolerance: f64,
    pub window: usize,
}

impl Default for ConstantConfig {
    fn default() -> Self {
        Self {
            starts: 8,
            seed: 0,
            max_iterations: 5000,
            relative_tolerance: 1e-8,
            window: 20,
        }
    }
}

/// Best value of a discrete Rayleigh quotient found by descent. It is an
/// upper bound on the discrete infimum, which is itself only an
/// approximation of the continuum constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantEstimate {
    pub value: f64,
    pub minimizer: GridFunction,
    /// `(iteration, quotient)` for each accepted step of the best start.
    pub trace: Vec<(usize, f64)>,
    pub converged: bool,
    pub starts: usize,
    pub iterations: usize,
    /// Hypotheses that are reported but not required at the discrete level.
    pub diagnostics: ValidationReport,
}

/// Discrete quotient `‖∇v‖_{L^{a}} / ‖c v‖_{L^{b}}` over interior nodal
/// vectors, with per-element weight `c`.
struct Quotient {
    grid: Arc<Grid>,
    dofs: Dofs,
    top: ModularEvaluator,
    bottom: ModularEvaluator,
    bottom_weight: Vec<f64>,
}

impl Quotient {
    fn nodal(&self, v: &[f64]) -> GridFunction {
        GridFunction::new(self.grid.clone(), self.dofs.extend(v, self.grid.num_nodes())).expect("finite")
    }

    fn bottom_values(&self, u: &GridFunction) -> Vec<f64> {
        barycenter_values(u).iter().zip(&self.bottom_weight).map(|(a, c)| a * c).collect()
    }

    fn value(&self, v: &[f64]) -> f64 {
        let u = self.nodal(v);
        self.top.norm(&u.gradient_norms()) / self.bottom.norm(&self.bottom_values(&u))
    }

    fn denominator(&self, v: &[f64]) -> f64 {
        self.bottom.norm(&self.bottom_values(&self.nodal(v)))
    }

    fn value_and_gradient(&self, v: &[f64]) -> (f64, Vec<f64>) {
        let u = self.nodal(v);
        let grid = &self.grid;
        let grads = u.gradients();
        let gnorms: Vec<f64> = grads.iter().map(|&g| norm(g)).collect();
        let (top, dtop) = self.top.norm_gradient(&gnorms);
        let bvals = self.bottom_values(&u);
        let (bottom, dbottom) = self.bottom.norm_gradient(&bvals);

        let mut d_top = vec![0.0; self.dofs.len()];
        let mut d_bottom = vec![0.0; self.dofs.len()];
        let share = 1.0 / grid.nodes_per_element() as f64;
        for e in 0..grid.num_elements() {
            let ids = grid.element_nodes(e);
            let hats = grid.hat_gradients(e);
            for (l, &node) in ids.iter().enumerate() {
                let Some(j) = self.dofs.index(node) else { continue };
                if gnorms[e] > 0.0 {
                    d_top[j] += dtop[e] * dot(grads[e], hats[l]) / gnorms[e];
                }
                d_bottom[j] += dbottom[e] * self.bottom_weight[e] * share;
            }
        }
        let q = top / bottom;
        let grad = d_top
            .iter()
            .zip(&d_bottom)
            .map(|(a, b)| (a - q * b) / bottom)
            .collect();
        (q, grad)
    }
}

struct Descent {
    value: f64,
    v: Vec<f64>,
    trace: Vec<(usize, f64)>,
    converged: bool,
    iterations: usize,
}

/// Normalized, preconditioned descent on the quotient.
///
/// Directions are the quotient gradient mapped through the inverse P1
/// Laplacian (an `H¹₀` gradient), which makes the iteration count largely
/// independent of the mesh. Each iterate is rescaled to unit denominator;
/// the step is halved on non-decrease and grown by 1.5 after success.
fn descend(problem: &Quotient, precond: &crate::banded::BandLu, start: Vec<f64>, config: &ConstantConfig) -> Descent {
    let normalize = |v: &mut Vec<f64>| {
        let d = problem.denominator(v);
        if d > 0.0 {
            v.iter_mut().for_each(|x| *x /= d);
        }
    };
    let mut v = start;
    normalize(&mut v);
    let (mut q, mut grad) = problem.value_and_gradient(&v);
    let mut trace = vec![(0, q)];
    let mut step = 1.0;
    let mut converged = false;
    let mut it = 0;
    while it < config.max_iterations {
        it += 1;
        let dir = precond.solve(&grad);
        let mut accepted = false;
        while step > 1e-14 {
            let mut trial: Vec<f64> = v.iter().zip(&dir).map(|(a, d)| a - step * d).collect();
            if problem.denominator(&trial) == 0.0 {
                step *= 0.5;
                continue;
            }
            normalize(&mut trial);
            let qt = problem.value(&trial);
            if qt < q {
                v = trial;
                q = qt;
                accepted = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No descent possible at machine resolution.
            converged = true;
            break;
        }
        trace.push((it, q));
        if trace.len() > config.window {
            let old = trace[trace.len() - 1 - config.window].1;
            if (old - q) / q < config.relative_tolerance {
                converged = true;
                break;
            }
        }
        grad = problem.value_and_gradient(&v).1;
    }
    Descent {
        value: q,
        v,
        trace,
        converged,
        iterations: it,
    }
}

fn minimize(problem: &Quotient, config: &ConstantConfig, diagnostics: ValidationReport) -> Result<ConstantEstimate> {
    if problem.dofs.is_empty() {
        return Err(Error::InvalidResolution(problem.grid.resolution()));
    }
    let precond = stiffness_matrix(&problem.grid, &problem.dofs).factor()?;
    let mut best: Option<Descent> = None;
    for s in 0..config.starts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(s as u64));
        let start: Vec<f64> = (0..problem.dofs.len()).map(|_| rng.random_range(0.0..1.0)).collect();
        let run = descend(problem, &precond, start, config);
        // Strict `<` keeps the lowest start index among ties.
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    Ok(ConstantEstimate {
        value: best.value,
        minimizer: problem.nodal(&best.v),
        trace: best.trace,
        converged: best.converged,
        starts: config.starts.max(1),
        iterations: best.iterations,
        diagnostics,
    })
}

/// Upper estimate of `inf ‖∇v‖_{L^{p(·)}} / ‖v‖_{L^{q(·)}}` over nonzero
/// grid functions vanishing on the boundary.
pub fn sobolev_constant(
    p: &ExponentField,
    q: &ExponentField,
    grid: &Arc<Grid>,
    config: &ConstantConfig,
) -> Result<ConstantEstimate> {
    let n = grid.dimension();
    let mut diagnostics = ValidationReport::new("sobolev_constant");
    diagnostics.push(
        Check::new("p_below_dimension", p.max() < n as f64, n as f64 - p.max())
            .informational()
            .note("not required for the discrete quotient"),
    );
    let margin = grid
        .domain()
        .validation_points()
        .iter()
        .map(|&x| critical_exponent(p.eval(x), n) - q.eval(x))
        .fold(f64::INFINITY, f64::min);
    diagnostics.push(
        Check::new("q_uniformly_subcritical", margin > 0.0, margin)
            .with_value(margin)
            .informational(),
    );
    let ne = grid.num_elements();
    let problem = Quotient {
        grid: grid.clone(),
        dofs: Dofs::new(grid),
        top: ModularEvaluator::on_grid(p, grid),
        bottom: ModularEvaluator::on_grid(q, grid),
        bottom_weight: vec![1.0; ne],
    };
    minimize(&problem, config, diagnostics)
}

/// Upper estimate of `inf ‖∇φ‖_{L^{q(·)}} / ‖g^{1/η(·)} φ‖_{L^{η(·)}}`.
///
/// Requires `g >= 0`, `g ≢ 0` and `η⁻ > 0`: the weight `g^{1/η}` has no
/// meaning where `η` vanishes.
pub fn weighted_constant(
    g: &GridFunction,
    eta: &ExponentField,
    q: &ExponentField,
    grid: &Arc<Grid>,
    config: &ConstantConfig,
) -> Result<ConstantEstimate> {
    if !g.same_grid(&GridFunction::zeros(grid.clone())) {
        return Err(Error::InvalidArgument("g lives on a different grid".into()));
    }
    if g.min() < 0.0 {
        return Err(Error::InvalidData(format!("g has negative value {}", g.min())));
    }
    if g.is_zero() {
        return Err(Error::InvalidData("g is identically zero".into()));
    }
    let rule = QuadratureRule::barycenter(grid);
    let eta_vals = rule.sample(eta);
    if eta.min() <= 0.0 || eta_vals.iter().any(|&e| e <= 0.0) {
        return Err(Error::Hypothesis(format!(
            "weighted constant needs η > 0 everywhere (η⁻ = {})",
            eta.min()
        )));
    }
    let weight = barycenter_values(g)
        .iter()
        .zip(&eta_vals)
        .map(|(&gv, &e)| math::powf(gv, 1.0 / e))
        .collect();
    let problem = Quotient {
        grid: grid.clone(),
        dofs: Dofs::new(grid),
        top: ModularEvaluator::on_grid(q, grid),
        bottom: ModularEvaluator::from_parts(eta_vals, rule.weights().to_vec())?,
        bottom_weight: weight,
    };
    minimize(&problem, config, ValidationReport::new("weighted_constant"))
}

/// Value of the Sobolev quotient at a given function.
pub fn sobolev_quotient(v: &GridFunction, p: &ExponentField, q: &ExponentField) -> f64 {
    gradient_norm(v, p) / luxemburg_norm(v, q)
}

/// Value of the weighted quotient at a given function.
pub fn weighted_quotient(phi: &GridFunction, g: &GridFunction, eta: &ExponentField, q: &ExponentField) -> f64 {
    let grid = phi.grid();
    let rule = QuadratureRule::barycenter(grid);
    let eta_vals = rule.sample(eta);
    let vals: Vec<f64> = barycenter_values(phi)
        .iter()
        .zip(barycenter_values(g))
        .zip(&eta_vals)
        .map(|((&f, gv), &e)| math::powf(gv, 1.0 / e) * f)
        .collect();
    let bottom = ModularEvaluator::from_parts(eta_vals, rule.weights().to_vec()).expect("positive η");
    gradient_norm(phi, q) / bottom.norm(&vals)
}
