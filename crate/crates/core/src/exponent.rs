//! Variable exponents `p(·)`, `q(·)`, `η(·)` and everything derived from them.
//!
//! Extrema are taken over a validation lattice of the closed box (1024
//! points in 1D, 128×128 in 2D), not symbolically.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::Expr;
use crate::grid::Grid;
use crate::math;
use crate::report::{Check, ValidationReport};
use crate::{Error, Result};

/// A point of the domain; the second coordinate is 0 in 1D.
pub type Point = [f64; 2];

/// Threshold used for every strict inequality in admissibility checks.
pub const ADMISSIBILITY_SLACK: f64 = 1e-9;

pub const VALIDATION_POINTS_1D: usize = 1024;
pub const VALIDATION_POINTS_2D: usize = 128;

/// An axis-aligned box in one or two dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DomainDescriptor {
    dimension: usize,
    lower: [f64; 2],
    upper: [f64; 2],
}

impl DomainDescriptor {
    pub fn new(dimension: usize, lower: [f64; 2], upper: [f64; 2]) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidDomain(format!("dimension {dimension} is not 1 or 2")));
        }
        for axis in 0..dimension {
            let (a, b) = (lower[axis], upper[axis]);
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(Error::InvalidDomain(format!(
                    "axis {axis} has empty or non-finite extent [{a}, {b}]"
                )));
            }
        }
        let mut lower = lower;
        let mut upper = upper;
        if dimension == 1 {
            lower[1] = 0.0;
            upper[1] = 0.0;
        }
        Ok(Self { dimension, lower, upper })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(1, [a, 0.0], [b, 0.0])
    }

    pub fn rectangle(lower: [f64; 2], upper: [f64; 2]) -> Result<Self> {
        Self::new(2, lower, upper)
    }

    pub fn unit_interval() -> Self {
        Self::interval(0.0, 1.0).expect("unit interval")
    }

    pub fn unit_square() -> Self {
        Self::rectangle([0.0, 0.0], [1.0, 1.0]).expect("unit square")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn lower(&self) -> [f64; 2] {
        self.lower
    }

    pub fn upper(&self) -> [f64; 2] {
        self.upper
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dimension).map(|a| self.extent(a)).product()
    }

    /// Boundary marker: true when `x` lies on a face of the box (within `tol`
    /// relative to the box extent).
    pub fn is_on_boundary(&self, x: Point, tol: f64) -> bool {
        (0..self.dimension).any(|a| {
            let scale = self.extent(a);
            math::abs(x[a] - self.lower[a]) <= tol * scale || math::abs(x[a] - self.upper[a]) <= tol * scale
        })
    }

    /// Uniform lattice of the closed box with `n` points per axis.
    pub fn lattice(&self, n: usize) -> Vec<Point> {
        let n = n.max(2);
        let coord = |axis: usize, i: usize| {
            self.lower[axis] + self.extent(axis) * (i as f64) / ((n - 1) as f64)
        };
        if self.dimension == 1 {
            (0..n).map(|i| [coord(0, i), 0.0]).collect()
        } else {
            let mut pts = Vec::with_capacity(n * n);
            for j in 0..n {
                for i in 0..n {
                    pts.push([coord(0, i), coord(1, j)]);
                }
            }
            pts
        }
    }

    pub fn validation_points(&self) -> Vec<Point> {
        match self.dimension {
            1 => self.lattice(VALIDATION_POINTS_1D),
            _ => self.lattice(VALIDATION_POINTS_2D),
        }
    }
}

/// Nodal samples on a uniform lattice, interpolated piecewise linearly on the
/// same triangle split used by [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    per_axis: usize,
    values: Vec<f64>,
}

#[derive(Clone)]
enum Source {
    Constant(f64),
    Expr(Expr),
    Samples(Samples),
    Func(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
}

/// A continuous scalar exponent over a box with cached extrema.
#[derive(Clone)]
pub struct ExponentField {
    source: Source,
    domain: DomainDescriptor,
    min: f64,
    max: f64,
    argmin: Point,
    argmax: Point,
    label: String,
}

impl fmt::Debug for ExponentField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExponentField")
            .field("label", &self.label)
            .field("min", &self.min)
            .field("max", &self.max)
            .finish()
    }
}

impl ExponentField {
    fn build(source: Source, domain: DomainDescriptor, label: String) -> Result<Self> {
        let mut field = Self {
            source,
            domain,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            argmin: [0.0; 2],
            argmax: [0.0; 2],
            label,
        };
        if let Source::Constant(c) = field.source {
            if !c.is_finite() {
                return Err(Error::NonFinite(format!("exponent '{}'", field.label)));
            }
            field.min = c;
            field.max = c;
            field.argmin = domain.lower;
            field.argmax = domain.lower;
            return Ok(field);
        }
        let mut points = domain.validation_points();
        if let Source::Samples(samples) = &field.source {
            // A piecewise linear interpolant attains its extrema at the nodes.
            points.extend(domain.lattice(samples.per_axis));
        }
        for x in points {
            let v = field.eval(x);
            if !v.is_finite() {
                return Err(Error::NonFinite(format!(
                    "exponent '{}' at ({}, {})",
                    field.label, x[0], x[1]
                )));
            }
            if v < field.min {
                field.min = v;
                field.argmin = x;
            }
            if v > field.max {
                field.max = v;
                field.argmax = x;
            }
        }
        Ok(field)
    }

    pub fn constant(domain: DomainDescriptor, value: f64) -> Result<Self> {
        Self::build(Source::Constant(value), domain, format!("{value}"))
    }

    pub fn from_expr(domain: DomainDescriptor, source: &str) -> Result<Self> {
        let expr = Expr::parse(source)?;
        if expr.is_constant() {
            let c = expr.eval(0.0, 0.0);
            return Self::build(Source::Constant(c), domain, String::from(source));
        }
        Self::build(Source::Expr(expr), domain, String::from(source))
    }

    pub fn from_fn<F>(domain: DomainDescriptor, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(Point) -> f64 + Send + Sync + 'static,
    {
        Self::build(Source::Func(Arc::new(f)), domain, label.into())
    }

    /// Samples on the `per_axis`-point lattice of the box (row-major in 2D).
    pub fn from_samples(domain: DomainDescriptor, per_axis: usize, values: Vec<f64>) -> Result<Self> {
        let expected = if domain.dimension() == 1 { per_axis } else { per_axis * per_axis };
        if per_axis < 2 {
            return Err(Error::InvalidResolution(per_axis));
        }
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: values.len(),
            });
        }
        Self::build(
            Source::Samples(Samples { per_axis, values }),
            domain,
            format!("samples[{per_axis}]"),
        )
    }

    pub fn eval(&self, x: Point) -> f64 {
        match &self.source {
            Source::Constant(c) => *c,
            Source::Expr(e) => e.eval(x[0], x[1]),
            Source::Func(f) => f(x),
            Source::Samples(s) => self.interpolate(s, x),
        }
    }

    fn interpolate(&self, s: &Samples, x: Point) -> f64 {
        let n = s.per_axis;
        let cells = (n - 1) as f64;
        let local = |axis: usize| {
            let t = (x[axis] - self.domain.lower[axis]) / self.domain.extent(axis) * cells;
            let t = t.clamp(0.0, cells);
            let i = (math::floor(t) as usize).min(n - 2);
            (i, t - i as f64)
        };
        let (i, s0) = local(0);
        if self.domain.dimension() == 1 {
            return s.values[i] * (1.0 - s0) + s.values[i + 1] * s0;
        }
        let (j, t0) = local(1);
        let v = |a: usize, b: usize| s.values[b * n + a];
        let (v00, v10, v01, v11) = (v(i, j), v(i + 1, j), v(i, j + 1), v(i + 1, j + 1));
        if s0 >= t0 {
            v00 + s0 * (v10 - v00) + t0 * (v11 - v10)
        } else {
            v00 + t0 * (v01 - v00) + s0 * (v11 - v01)
        }
    }

    /// `Some(c)` if the field is known to be the constant `c`.
    pub fn as_constant(&self) -> Option<f64> {
        match self.source {
            Source::Constant(c) => Some(c),
            _ => None,
        }
    }

    pub fn domain(&self) -> &DomainDescriptor {
        &self.domain
    }

    /// `e⁻` over the validation lattice.
    pub fn min(&self) -> f64 {
        self.min
    }

    /// `e⁺` over the validation lattice.
    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn argmin(&self) -> Point {
        self.argmin
    }

    pub fn argmax(&self) -> Point {
        self.argmax
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Pointwise image under `f`; extrema are recomputed.
    pub fn map<F>(&self, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if let Some(c) = self.as_constant() {
            return Self::build(Source::Constant(f(c)), self.domain, label.into());
        }
        let inner = self.clone();
        Self::from_fn(self.domain, label, move |x| f(inner.eval(x)))
    }

    /// Pointwise combination of two fields on the same domain.
    pub fn zip_with<F>(&self, other: &ExponentField, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        if let (Some(a), Some(b)) = (self.as_constant(), other.as_constant()) {
            return Self::build(Source::Constant(f(a, b)), self.domain, label.into());
        }
        let (a, b) = (self.clone(), other.clone());
        Self::from_fn(self.domain, label, move |x| f(a.eval(x), b.eval(x)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Variant {
    /// `max{p-1, 1} <= q < p`.
    Subnatural,
    /// `q = p` and `p >= 2`.
    Natural,
}

#[derive(Debug, Clone)]
pub struct ExponentTriple {
    pub p: ExponentField,
    pub q: ExponentField,
    pub eta: ExponentField,
    pub variant: Variant,
}

impl ExponentTriple {
    pub fn new(p: ExponentField, q: ExponentField, eta: ExponentField, variant: Variant) -> Self {
        Self { p, q, eta, variant }
    }
}

/// `1/e + 1/e' = 1` pointwise.
pub fn conjugate_exponent(e: &ExponentField) -> Result<ExponentField> {
    if e.min() <= 1.0 {
        return Err(Error::ConjugateUnbounded { min: e.min() });
    }
    e.map(format!("({})'", e.label()), |v| v / (v - 1.0))
}

/// `e* = N e / (N - e)` pointwise.
pub fn sobolev_conjugate(e: &ExponentField, dimension: usize) -> Result<ExponentField> {
    let n = dimension as f64;
    if e.max() >= n {
        return Err(Error::Supercritical {
            max: e.max(),
            dimension,
        });
    }
    e.map(format!("({})*", e.label()), move |v| n * v / (n - v))
}

/// Critical embedding exponent at one point: `N e/(N - e)` below the
/// dimension and `+inf` at or above it (embedding into every `L^r`).
pub fn critical_exponent(e: f64, dimension: usize) -> f64 {
    let n = dimension as f64;
    if e < n {
        n * e / (n - e)
    } else {
        f64::INFINITY
    }
}

fn conj(v: f64) -> f64 {
    if v.is_infinite() {
        1.0
    } else {
        v / (v - 1.0)
    }
}

/// Checks the standing hypotheses on the exponent triple.
///
/// Strict inequalities pass when their slack exceeds
/// [`ADMISSIBILITY_SLACK`]; non-strict ones when the slack is at least
/// `-ADMISSIBILITY_SLACK`. `p⁺ < N` is reported but does not gate (the
/// discrete problems are well posed without it). Where `q(x) >= N` the
/// critical exponent `q*` is taken as `+inf`.
pub fn check_admissibility(t: &ExponentTriple, dimension: usize) -> ValidationReport {
    let mut report = ValidationReport::new("admissibility");
    let pts = t.p.domain().validation_points();
    let tol = ADMISSIBILITY_SLACK;

    // Worst slack of `g` over the validation lattice.
    let worst = |g: &dyn Fn(Point) -> f64| -> (f64, Point) {
        pts.iter().fold((f64::INFINITY, pts[0]), |(best, at), &x| {
            let s = g(x);
            if s < best {
                (s, x)
            } else {
                (best, at)
            }
        })
    };
    let strict = |name: &str, g: &dyn Fn(Point) -> f64| {
        let (s, at) = worst(g);
        Check::new(name, s > tol, s).at(at)
    };
    let weak = |name: &str, g: &dyn Fn(Point) -> f64| {
        let (s, at) = worst(g);
        Check::slack(name, s, tol).at(at)
    };

    let (p, q, eta) = (&t.p, &t.q, &t.eta);
    report.push(strict("p_above_one", &|x| p.eval(x) - 1.0));
    report.push(
        strict("p_below_dimension", &|x| dimension as f64 - p.eval(x))
            .informational()
            .note("not required by the discrete problems"),
    );
    report.push(weak("eta_nonnegative", &|x| eta.eval(x)));
    let margin = |x: Point| critical_exponent(q.eval(x), dimension) - 1.0 - eta.eval(x);
    report.push(strict("eta_below_critical", &|x| margin(x)));
    let (inf_margin, at) = worst(&|x| margin(x));
    report.push(Check::new("uniform_subcriticality", inf_margin > tol, inf_margin).at(at).with_value(inf_margin));

    match t.variant {
        Variant::Subnatural => {
            report.push(weak("q_at_least_p_minus_one", &|x| q.eval(x) - (p.eval(x) - 1.0)));
            report.push(weak("q_at_least_one", &|x| q.eval(x) - 1.0));
            report.push(strict("q_below_p", &|x| p.eval(x) - q.eval(x)));
        }
        Variant::Natural => {
            report.push(weak("q_equals_p", &|x| -math::abs(q.eval(x) - p.eval(x))));
            report.push(weak("p_at_least_two", &|x| p.eval(x) - 2.0));
        }
    }
    report
}

/// Integrability exponents for the data: `q₀ = (N q⁻/(N - q⁻))'` and
/// `q₁ = (q*/(η + 1))'`.
pub fn data_exponents(t: &ExponentTriple, dimension: usize) -> Result<(f64, ExponentField)> {
    let n = dimension as f64;
    let q_min = t.q.min();
    if q_min >= n {
        return Err(Error::Supercritical { max: q_min, dimension });
    }
    let q0 = conj(n * q_min / (n - q_min));
    let q1 = t.q.zip_with(&t.eta, "q1", move |q, eta| {
        conj(critical_exponent(q, dimension) / (eta + 1.0))
    })?;
    Ok((q0, q1))
}

/// Result of the log-Hölder probe.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogHolderEstimate {
    /// Largest observed `|e(x)-e(y)| |ln|x-y||`.
    pub constant: f64,
    pub worst_pair: (Point, Point),
    /// Ratios along the bisection refinement of the worst pair.
    pub refinement: Vec<f64>,
    pub bounded: bool,
}

/// Threshold beyond which a ratio is considered divergent.
pub const LOG_HOLDER_DIVERGENCE: f64 = 1e3;

/// Estimates the smallest `C` with `|e(x)-e(y)| <= C/|ln|x-y||` for
/// `|x-y| < 1/2`.
///
/// Random pairs (distances log-uniform in `[1e-9, 1/2)`) give a first
/// estimate. The worst pairs are then refined by bisection towards the half
/// with the larger oscillation. If the oscillation stops decaying while the
/// distance goes to zero, the ratio grows like `osc·|ln r|`; it is
/// extrapolated to the depth where it would cross
/// [`LOG_HOLDER_DIVERGENCE`] and the field is flagged unbounded.
pub fn log_holder_estimate(e: &ExponentField, sample_pairs: usize, seed: u64) -> LogHolderEstimate {
    let domain = *e.domain();
    let dim = domain.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ratio = |a: Point, b: Point| {
        let r = dist(a, b);
        if r <= 0.0 || r >= 0.5 {
            return 0.0;
        }
        math::abs(e.eval(a) - e.eval(b)) * math::abs(math::ln(r))
    };

    let mut candidates: Vec<(f64, Point, Point)> = Vec::new();
    let mut best = (0.0, domain.lower, domain.lower);
    for _ in 0..sample_pairs {
        let a: Point = core::array::from_fn(|ax| {
            if ax < dim {
                rng.random_range(domain.lower[ax]..=domain.upper[ax])
            } else {
                0.0
            }
        });
        let log_r = rng.random_range(math::ln(1e-9)..math::ln(0.5));
        let r = math::exp(log_r);
        let dir: Point = if dim == 1 {
            [if rng.random_bool(0.5) { 1.0 } else { -1.0 }, 0.0]
        } else {
            let th = rng.random_range(0.0..core::f64::consts::TAU);
            [math::cos(th), math::sin(th)]
        };
        let b = [a[0] + r * dir[0], a[1] + r * dir[1]];
        if !inside(&domain, b) {
            continue;
        }
        let rho = ratio(a, b);
        if rho > best.0 {
            best = (rho, a, b);
        }
        candidates.push((math::abs(e.eval(a) - e.eval(b)), a, b));
    }

    // Refine the pairs with the largest oscillation.
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0));
    candidates.truncate(8);
    let mut refinement = Vec::new();
    let mut bounded = true;
    for (osc0, a0, b0) in candidates.iter().copied() {
        if osc0 == 0.0 {
            continue;
        }
        let (mut a, mut b) = (a0, b0);
        let mut trace = Vec::new();
        let mut oscs = Vec::new();
        for _ in 0..60 {
            let m = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            if m == a || m == b {
                break;
            }
            let left = math::abs(e.eval(a) - e.eval(m));
            let right = math::abs(e.eval(m) - e.eval(b));
            if left >= right {
                b = m;
            } else {
                a = m;
            }
            let rho = ratio(a, b);
            if rho > best.0 {
                best = (rho, a, b);
            }
            trace.push(rho);
            oscs.push(math::abs(e.eval(a) - e.eval(b)));
        }
        // Divergence: oscillation has stopped decaying over the last levels.
        if oscs.len() >= 20 {
            let last = oscs[oscs.len() - 1];
            let earlier = oscs[oscs.len() - 20];
            if last > 1e-12 && last >= 0.5 * earlier {
                bounded = false;
                // Further halvings add `osc·ln 2` each; extend to the crossing.
                let log_r = math::abs(math::ln(dist(a, b)));
                let levels = (LOG_HOLDER_DIVERGENCE / last - log_r) / core::f64::consts::LN_2;
                let levels = if levels > 0.0 { math::floor(levels) + 1.0 } else { 0.0 };
                trace.push(last * (log_r + levels * core::f64::consts::LN_2));
            }
        }
        if !bounded {
            refinement = trace;
            break;
        }
        if trace.len() > refinement.len() {
            refinement = trace;
        }
    }

    LogHolderEstimate {
        constant: if bounded { best.0 } else { f64::INFINITY },
        worst_pair: (best.1, best.2),
        refinement,
        bounded,
    }
}

/// Report form of [`log_holder_estimate`].
pub fn check_log_holder(e: &ExponentField, sample_pairs: usize, seed: u64) -> ValidationReport {
    let est = log_holder_estimate(e, sample_pairs, seed);
    let mut report = ValidationReport::new("log_holder");
    let mut check = Check::new(
        "log_holder_bounded",
        est.bounded,
        if est.bounded { 0.0 } else { f64::NEG_INFINITY },
    )
    .with_value(est.constant)
    .at(est.worst_pair.0)
    .note("modulus |e(x)-e(y)| <= C/|ln|x-y|| for |x-y| < 1/2");
    if !est.bounded {
        let reached = est.refinement.iter().copied().fold(0.0, f64::max);
        check = check.note(format!(
            "oscillation does not decay under pair refinement; extrapolated ratio reaches {reached:e}"
        ));
    }
    report.push(check);
    report
}

fn dist(a: Point, b: Point) -> f64 {
    math::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]))
}

fn inside(d: &DomainDescriptor, x: Point) -> bool {
    (0..d.dimension()).all(|a| x[a] >= d.lower()[a] && x[a] <= d.upper()[a])
}

/// Splits elements into `{p >= 2}` and `{p < 2}` by the exponent at the
/// element barycenter.
pub fn partition_by_exponent(p: &ExponentField, grid: &Grid) -> (Vec<bool>, Vec<bool>) {
    let degenerate: Vec<bool> = (0..grid.num_elements())
        .map(|e| p.eval(grid.barycenter(e)) >= 2.0)
        .collect();
    let singular = degenerate.iter().map(|d| !d).collect();
    (degenerate, singular)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn unit() -> DomainDescriptor {
        DomainDescriptor::unit_interval()
    }

    fn c(v: f64) -> ExponentField {
        ExponentField::constant(unit(), v).unwrap()
    }

    #[test]
    fn domain_validation() {
        assert!(DomainDescriptor::new(3, [0.0; 2], [1.0; 2]).is_err());
        assert!(DomainDescriptor::interval(1.0, 1.0).is_err());
        assert!(DomainDescriptor::rectangle([0.0, 0.0], [1.0, 0.0]).is_err());
        let sq = DomainDescriptor::unit_square();
        assert_eq!(sq.volume(), 1.0);
        assert!(sq.is_on_boundary([0.3, 1.0], 1e-12));
        assert!(!sq.is_on_boundary([0.3, 0.5], 1e-12));
        assert_eq!(sq.validation_points().len(), 128 * 128);
        assert_eq!(unit().validation_points().len(), 1024);
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(conjugate_exponent(&c(2.0)).unwrap().as_constant(), Some(2.0));
        assert_eq!(conjugate_exponent(&c(3.0)).unwrap().as_constant(), Some(1.5));
        let e = ExponentField::from_expr(unit(), "2+x").unwrap();
        let ec = conjugate_exponent(&e).unwrap();
        assert!((ec.eval([0.5, 0.0]) - 2.5 / 1.5).abs() < 1e-15);
        assert!(matches!(
            conjugate_exponent(&c(1.0)),
            Err(Error::ConjugateUnbounded { .. })
        ));
        let crossing = ExponentField::from_expr(unit(), "0.5+x").unwrap();
        assert!(conjugate_exponent(&crossing).is_err());
    }

    #[test]
    fn sobolev_conjugate_examples() {
        let d2 = DomainDescriptor::unit_square();
        let one = ExponentField::constant(d2, 1.0).unwrap();
        assert_eq!(sobolev_conjugate(&one, 2).unwrap().as_constant(), Some(2.0));
        let e = ExponentField::constant(d2, 1.5).unwrap();
        let star = sobolev_conjugate(&e, 2).unwrap().as_constant().unwrap();
        assert!((star - 6.0).abs() < 1e-12);
        assert!(matches!(
            sobolev_conjugate(&c(1.0), 1),
            Err(Error::Supercritical { .. })
        ));
    }

    fn triple2(p: f64, q: f64, eta: f64, variant: Variant) -> ExponentTriple {
        let d = DomainDescriptor::unit_square();
        let f = |v| ExponentField::constant(d, v).unwrap();
        ExponentTriple::new(f(p), f(q), f(eta), variant)
    }

    #[test]
    fn admissibility_examples() {
        let ok = check_admissibility(&triple2(2.0, 1.5, 0.5, Variant::Subnatural), 2);
        assert!(ok.passed(), "{ok:?}");
        let margin = ok.check("uniform_subcriticality").unwrap().value.unwrap();
        assert!((margin - 4.5).abs() < 1e-12);
        // p⁺ < N fails for p = 2, N = 2 but is informational only.
        assert!(!ok.check("p_below_dimension").unwrap().passed);

        let bad = check_admissibility(&triple2(2.0, 2.0, 0.5, Variant::Subnatural), 2);
        assert!(!bad.passed());
        assert!(!bad.check("q_below_p").unwrap().passed);

        let bad = check_admissibility(&triple2(3.0, 1.5, 0.5, Variant::Subnatural), 2);
        assert!(!bad.check("q_at_least_p_minus_one").unwrap().passed);
        assert!((bad.check("q_at_least_p_minus_one").unwrap().slack + 0.5).abs() < 1e-12);

        let nat = check_admissibility(&triple2(2.5, 2.5, 0.5, Variant::Natural), 2);
        assert!(nat.passed(), "{nat:?}");
        let nat = check_admissibility(&triple2(1.9, 1.9, 0.5, Variant::Natural), 2);
        assert!(!nat.check("p_at_least_two").unwrap().passed);
    }

    #[test]
    fn data_exponent_examples() {
        let t = triple2(2.0, 1.5, 0.5, Variant::Subnatural);
        let (q0, q1) = data_exponents(&t, 2).unwrap();
        // q* = 6, conjugate of 6 is 6/5.
        assert!((q0 - 1.2).abs() < 1e-12);
        // (6/1.5)' = 4/3.
        assert!((q1.as_constant().unwrap() - 4.0 / 3.0).abs() < 1e-12);

        let d = DomainDescriptor::unit_square();
        let q = ExponentField::from_expr(d, "1.2+0.3*x").unwrap();
        let t = ExponentTriple::new(q.clone(), q.clone(), ExponentField::constant(d, 0.0).unwrap(), Variant::Subnatural);
        let (_, q1) = data_exponents(&t, 2).unwrap();
        for x in [[0.0, 0.0], [0.3, 0.1], [1.0, 1.0]] {
            let qs = critical_exponent(q.eval(x), 2);
            assert!((q1.eval(x) - qs / (qs - 1.0)).abs() < 1e-12);
        }

        assert!(data_exponents(&triple2(2.5, 2.2, 0.5, Variant::Subnatural), 2).is_err());
    }

    #[test]
    fn log_holder_constant_and_lipschitz() {
        let est = log_holder_estimate(&c(2.5), 2000, 7);
        assert_eq!(est.constant, 0.0);
        assert!(est.bounded);

        // sup_{r<1/2} r |ln r| = 1/e at r = 1/e.
        let e = ExponentField::from_expr(unit(), "2+x").unwrap();
        let est = log_holder_estimate(&e, 20_000, 7);
        assert!(est.bounded);
        let inv_e = 1.0 / core::f64::consts::E;
        assert!(est.constant <= inv_e + 1e-12, "{}", est.constant);
        assert!(est.constant > 0.35, "{}", est.constant);
        assert!(check_log_holder(&e, 2000, 1).passed());
    }

    #[test]
    fn log_holder_flags_jump() {
        let e = ExponentField::from_expr(unit(), "2 + step(x - 0.5)").unwrap();
        let est = log_holder_estimate(&e, 2000, 3);
        assert!(!est.bounded);
        assert!(est.refinement.iter().any(|&r| r > LOG_HOLDER_DIVERGENCE));
        assert!(!check_log_holder(&e, 2000, 3).passed());
    }

    #[test]
    fn partition_examples() {
        let grid = Grid::build(&unit(), 10).unwrap();
        let (a, b) = partition_by_exponent(&c(2.0), &grid);
        assert!(a.iter().all(|&v| v) && b.iter().all(|&v| !v));
        let (a, b) = partition_by_exponent(&c(1.5), &grid);
        assert!(b.iter().all(|&v| v) && a.iter().all(|&v| !v));
        let p = ExponentField::from_expr(unit(), "1.5+x").unwrap();
        let (a, b) = partition_by_exponent(&p, &grid);
        // barycenters 0.05, 0.15, ...: p >= 2 from element 5 on.
        for e in 0..10 {
            assert_eq!(a[e], e >= 5);
            assert_ne!(a[e], b[e]);
        }
    }

    #[test]
    fn samples_interpolate_linearly() {
        let d = unit();
        let f = ExponentField::from_samples(d, 3, alloc::vec![2.0, 3.0, 2.0]).unwrap();
        assert_eq!(f.eval([0.25, 0.0]), 2.5);
        assert_eq!(f.max(), 3.0);
        let sq = DomainDescriptor::unit_square();
        let vals = alloc::vec![1.0, 2.0, 3.0, 4.0]; // value = 1 + x + 2y
        let f = ExponentField::from_samples(sq, 2, vals).unwrap();
        assert!((f.eval([0.3, 0.6]) - (1.0 + 0.3 + 1.2)).abs() < 1e-14);
        assert!(ExponentField::from_samples(d, 3, alloc::vec![1.0]).is_err());
    }

    #[test]
    fn nonfinite_exponent_rejected() {
        assert!(ExponentField::from_expr(unit(), "1/x").is_err());
        assert!(ExponentField::from_expr(unit(), "2+*x").is_err());
    }
}
