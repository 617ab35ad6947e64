//! Pointwise maps and constants used by the existence argument.

use alloc::format;
use alloc::vec::Vec;

use crate::exponent::{ExponentField, Point, Variant};
use crate::grid::GridFunction;
use crate::math;
use crate::report::{Check, ValidationReport};
use crate::{Error, Result};

/// A positive truncation level `k`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TruncationLevel(f64);

impl TruncationLevel {
    pub fn new(k: f64) -> Result<Self> {
        if k > 0.0 {
            Ok(Self(k))
        } else {
            Err(Error::InvalidArgument(format!("truncation level {k} is not positive")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// `T_k(s)`: sign-preserving clamp to `[-k, k]`.
#[inline]
pub fn truncate(s: f64, k: f64) -> f64 {
    s.clamp(-k, k)
}

/// `G_k(s) = s - T_k(s)`.
#[inline]
pub fn excess(s: f64, k: f64) -> f64 {
    s - truncate(s, k)
}

/// `ψ_{k-1}(s) = T_1(G_{k-1}(s))`.
#[inline]
pub fn band_indicator(s: f64, k: f64) -> f64 {
    truncate(excess(s, k - 1.0), 1.0)
}

pub fn truncate_fn(u: &GridFunction, k: TruncationLevel) -> GridFunction {
    u.map(|s| truncate(s, k.get())).expect("clamp preserves finiteness")
}

pub fn excess_fn(u: &GridFunction, k: TruncationLevel) -> GridFunction {
    u.map(|s| excess(s, k.get())).expect("finite")
}

/// `ψ_{k-1}(u)`; requires `k > 1`.
pub fn band_indicator_fn(u: &GridFunction, k: f64) -> Result<GridFunction> {
    if k <= 1.0 {
        return Err(Error::InvalidArgument(format!("band level k = {k} must exceed 1")));
    }
    u.map(|s| band_indicator(s, k))
}

/// The exponential test map `φ(s) = s exp(a s²)`.
///
/// `a = 1/4` in the sub-natural case; `a = 2^{4p⁺-2}` in the natural case,
/// where the map must dominate `2^{2p⁺-1} φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestMap {
    coefficient: f64,
    /// Constant `c` in the property `φ' - c φ`.
    factor: f64,
    variant: Variant,
}

/// Room left in `ln(f64::MAX)` for the polynomial factors of `φ` and `φ'`.
const EXP_BUDGET: f64 = 709.782_712_893_384 - 64.0;

impl TestMap {
    pub fn new(variant: Variant, p_plus: Option<f64>) -> Result<Self> {
        match variant {
            Variant::Subnatural => Ok(Self {
                coefficient: 0.25,
                factor: 1.0,
                variant,
            }),
            Variant::Natural => {
                let p = p_plus.ok_or_else(|| {
                    Error::InvalidArgument("natural test map needs p⁺".into())
                })?;
                if !(p.is_finite() && p > 1.0) {
                    return Err(Error::InvalidArgument(format!("p⁺ = {p} must be finite and above 1")));
                }
                Ok(Self {
                    coefficient: math::powf(2.0, 4.0 * p - 2.0),
                    factor: math::powf(2.0, 2.0 * p - 1.0),
                    variant,
                })
            }
        }
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    /// Largest `|s|` for which `φ` and `φ'` are evaluated.
    pub fn cap(&self) -> f64 {
        math::sqrt(EXP_BUDGET / self.coefficient)
    }

    /// `(φ(s), φ'(s))`.
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        let cap = self.cap();
        if !(math::abs(s) <= cap) {
            return Err(Error::Overflow { arg: s, cap });
        }
        let a = self.coefficient;
        let ex = math::exp(a * s * s);
        Ok((s * ex, ex * (1.0 + 2.0 * a * s * s)))
    }

    /// `φ'(s) - |φ(s)|` (sub-natural) or `φ'(s) - c φ(s)` (natural),
    /// written as `exp(a s²)·(1 + 2 a s² - c s)`; saturates to `±inf` instead
    /// of failing beyond the cap.
    pub fn property_value(&self, s: f64) -> f64 {
        let a = self.coefficient;
        let lin = match self.variant {
            Variant::Subnatural => math::abs(s),
            Variant::Natural => self.factor * s,
        };
        let poly = 1.0 + 2.0 * a * s * s - lin;
        let ex = math::exp(a * s * s);
        if ex.is_infinite() {
            if poly > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        } else {
            ex * poly
        }
    }
}

pub fn test_map(s: f64, variant: Variant, p_plus: Option<f64>) -> Result<(f64, f64)> {
    TestMap::new(variant, p_plus)?.eval(s)
}

/// Verifies `φ' - |φ| >= 1/2` (sub-natural) or `φ' - 2^{2p⁺-1} φ > 0`
/// (natural) on `s_grid`. The report value is the empirical infimum.
pub fn check_test_map_property(
    variant: Variant,
    p_plus: Option<f64>,
    s_grid: &[f64],
) -> Result<ValidationReport> {
    let map = TestMap::new(variant, p_plus)?;
    let (inf, at) = s_grid.iter().fold((f64::INFINITY, 0.0), |(m, at), &s| {
        let v = map.property_value(s);
        if v < m {
            (v, s)
        } else {
            (m, at)
        }
    });
    let mut report = ValidationReport::new("test_map_property");
    let check = match variant {
        Variant::Subnatural => Check::slack("phi_prime_minus_abs_phi_at_least_half", inf - 0.5, 1e-12),
        Variant::Natural => Check::new("phi_prime_minus_c_phi_positive", inf > 0.0, inf),
    };
    report.push(check.at([at, 0.0]).with_value(inf));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct YoungConstant {
    pub epsilon: f64,
    /// Minimal `C_ε` with `s^q <= ε s^p + C_ε` on the validation lattice.
    pub value: f64,
    pub worst_point: Point,
    /// Largest interior maximizer `s*(x)` over the lattice.
    pub max_maximizer: f64,
    /// Smallest `ε s^p + C_ε - s^q` on the verification grid.
    pub verification_slack: f64,
}

/// Smallest `C_ε` with `s^{q(x)} <= ε s^{p(x)} + C_ε` for all `s >= 0`.
///
/// For fixed `x` the gap `s^q - ε s^p` peaks at
/// `s* = (q/(ε p))^{1/(p-q)}` with value `(s*)^q (1 - q/p)`; the constant is
/// the largest peak over the validation lattice. The inequality is then
/// re-checked on a 200×200 `(x, s)` grid with `s ∈ [0, 10 max s*]`.
pub fn young_constant(p: &ExponentField, q: &ExponentField, epsilon: f64) -> Result<YoungConstant> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be positive")));
    }
    let domain = *p.domain();
    let points = domain.validation_points();
    for &x in &points {
        let (pv, qv) = (p.eval(x), q.eval(x));
        if !(pv - 1.0 > 0.0 && pv - 1.0 <= qv && qv < pv) {
            return Err(Error::Hypothesis(format!(
                "need 0 < p-1 <= q < p; at ({}, {}) p = {pv}, q = {qv}",
                x[0], x[1]
            )));
        }
    }
    let peak = |x: Point| {
        let (pv, qv) = (p.eval(x), q.eval(x));
        let s = math::powf(qv / (epsilon * pv), 1.0 / (pv - qv));
        (s, math::powf(s, qv) * (1.0 - qv / pv))
    };
    let mut value = 0.0f64;
    let mut worst_point = points[0];
    let mut max_maximizer = 0.0f64;
    for &x in &points {
        let (s, v) = peak(x);
        max_maximizer = max_maximizer.max(s);
        if v > value {
            value = v;
            worst_point = x;
        }
    }

    let xs: Vec<Point> = if domain.dimension() == 1 { domain.lattice(200) } else { domain.lattice(14) };
    let s_max = 10.0 * max_maximizer;
    let mut slack = f64::INFINITY;
    for &x in &xs {
        let (pv, qv) = (p.eval(x), q.eval(x));
        for j in 0..200 {
            let s = s_max * j as f64 / 199.0;
            let gap = epsilon * math::abs_pow(s, pv) + value - math::abs_pow(s, qv);
            // Relative to the size of the terms being compared.
            let scale = 1.0 + math::abs_pow(s, qv);
            slack = slack.min(gap / scale);
        }
    }
    Ok(YoungConstant {
        epsilon,
        value,
        worst_point,
        max_maximizer,
        verification_slack: slack,
    })
}

/// `H_n(x, ξ) = |ξ|^{q(x)} / (1 + |ξ|^{q(x)}/n)`.
pub fn regularized_hamiltonian(x: Point, xi_norm: f64, n: f64, q: &ExponentField) -> f64 {
    hamiltonian_value(xi_norm, q.eval(x), Some(n))
}

/// `|ξ|^q`, or its bounded regularization when `n` is given.
#[inline]
pub fn hamiltonian_value(xi_norm: f64, q: f64, n: Option<f64>) -> f64 {
    let t = math::abs_pow(xi_norm, q);
    match n {
        None => t,
        Some(n) if t.is_infinite() => n,
        Some(n) => n * t / (n + t),
    }
}

/// Derivative of [`hamiltonian_value`] with respect to `|ξ|`.
#[inline]
pub fn hamiltonian_slope(xi_norm: f64, q: f64, n: Option<f64>) -> f64 {
    if xi_norm <= 0.0 {
        return 0.0;
    }
    let t = math::powf(xi_norm, q);
    let dt = q * math::powf(xi_norm, q - 1.0);
    match n {
        None => dt,
        Some(n) => {
            let d = 1.0 + t / n;
            dt / (d * d)
        }
    }
}

/// Checks the monotonicity inequalities for `a(ξ) = |ξ|^{p-2} ξ`:
///
/// * `p >= 2`: `(a(ξ) - a(η))·(ξ - η) >= 2^{-p} |ξ - η|^p`;
/// * `1 < p <= 2`: `(a(ξ) - a(η))·(ξ - η) >= (p-1) |ξ - η|² (|ξ| + |η|)^{p-2}`.
pub fn check_vector_inequalities(p: f64, xi: &[f64], eta: &[f64]) -> Result<ValidationReport> {
    if xi.len() != eta.len() {
        return Err(Error::LengthMismatch {
            expected: xi.len(),
            found: eta.len(),
        });
    }
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must exceed 1")));
    }
    let norm = |v: &[f64]| math::sqrt(v.iter().map(|a| a * a).sum());
    let (nx, ny) = (norm(xi), norm(eta));
    let flux = |v: f64, n: f64| if n == 0.0 { 0.0 } else { math::powf(n, p - 2.0) * v };
    let diff2: f64 = xi.iter().zip(eta).map(|(a, b)| (a - b) * (a - b)).sum();
    let pairing: f64 = xi
        .iter()
        .zip(eta)
        .map(|(&a, &b)| (flux(a, nx) - flux(b, ny)) * (a - b))
        .sum();

    let mut report = ValidationReport::new("vector_inequalities");
    if p >= 2.0 {
        let bound = math::powf(0.5, p) * math::powf(math::sqrt(diff2), p);
        report.push(Check::slack("degenerate", pairing - bound, 1e-12).with_value(pairing));
    }
    if p <= 2.0 {
        let s = nx + ny;
        let bound = if s == 0.0 { 0.0 } else { (p - 1.0) * diff2 * math::powf(s, p - 2.0) };
        report.push(Check::slack("singular", pairing - bound, 1e-12).with_value(pairing));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::DomainDescriptor;
    use proptest::prelude::*;

    #[test]
    fn truncation_examples() {
        assert_eq!(truncate(3.0, 2.0), 2.0);
        assert_eq!(truncate(-3.0, 2.0), -2.0);
        assert_eq!(truncate(1.5, 2.0), 1.5);
        assert_eq!(excess(3.0, 2.0), 1.0);
        assert_eq!(excess(1.0, 2.0), 0.0);
        assert_eq!(band_indicator(4.0, 5.0), 0.0);
        assert_eq!(band_indicator(5.0, 5.0), 1.0);
        assert_eq!(band_indicator(4.5, 5.0), 0.5);
        assert!(TruncationLevel::new(0.0).is_err());
    }

    #[test]
    fn test_map_examples() {
        for (variant, pp) in [(Variant::Subnatural, None), (Variant::Natural, Some(2.0))] {
            assert_eq!(test_map(0.0, variant, pp).unwrap(), (0.0, 1.0));
        }
        let (v, _) = test_map(1.0, Variant::Subnatural, None).unwrap();
        assert!((v - 0.25f64.exp()).abs() < 1e-15);
        assert!(test_map(1.0, Variant::Natural, None).is_err());
        let map = TestMap::new(Variant::Natural, Some(2.0)).unwrap();
        assert_eq!(map.coefficient(), 64.0);
        assert_eq!(map.factor(), 8.0);
        assert!(matches!(map.eval(5.0), Err(Error::Overflow { .. })));
        assert!(map.eval(map.cap()).unwrap().1.is_finite());
    }

    #[test]
    fn test_map_derivative_matches_central_difference() {
        let h = 1e-5;
        for map in [
            TestMap::new(Variant::Subnatural, None).unwrap(),
            TestMap::new(Variant::Natural, Some(2.0)).unwrap(),
        ] {
            // Past |s| ~ 50/a the step is no longer small against the
            // scale of exp(a s²) and the difference quotient itself is off.
            let top = (map.cap() - 2.0 * h).min(50.0 / map.coefficient());
            for i in 0..=200 {
                let s = -top + 2.0 * top * i as f64 / 200.0;
                let fd = (map.eval(s + h).unwrap().0 - map.eval(s - h).unwrap().0) / (2.0 * h);
                let exact = map.eval(s).unwrap().1;
                assert!(((fd - exact) / exact).abs() < 1e-6, "s = {s}");
            }
        }
    }

    #[test]
    fn test_map_property_scans() {
        let grid: Vec<f64> = (0..10_000).map(|i| -10.0 + 20.0 * i as f64 / 9_999.0).collect();
        let r = check_test_map_property(Variant::Subnatural, None, &grid).unwrap();
        assert!(r.passed());
        let inf = r.checks[0].value.unwrap();
        assert!((0.5..1.0).contains(&inf));
        let r = check_test_map_property(Variant::Subnatural, None, &[0.0]).unwrap();
        assert_eq!(r.checks[0].value, Some(1.0));
        let grid: Vec<f64> = (0..10_000).map(|i| 5.0 * i as f64 / 9_999.0).collect();
        let r = check_test_map_property(Variant::Natural, Some(2.0), &grid).unwrap();
        assert!(r.passed());
        assert!(r.checks[0].value.unwrap() > 0.0);
    }

    fn c(v: f64) -> ExponentField {
        ExponentField::constant(DomainDescriptor::unit_interval(), v).unwrap()
    }

    #[test]
    fn young_examples() {
        let y = young_constant(&c(2.0), &c(1.0), 0.1).unwrap();
        assert!((y.value - 2.5).abs() < 1e-10);
        assert!((y.max_maximizer - 5.0).abs() < 1e-12);
        assert!(y.verification_slack >= -1e-12);

        let (p, q) = (
            ExponentField::from_expr(DomainDescriptor::unit_interval(), "2.2+0.2*x").unwrap(),
            ExponentField::from_expr(DomainDescriptor::unit_interval(), "1.7+0.2*x").unwrap(),
        );
        let values: Vec<f64> = [0.01, 0.1, 1.0]
            .iter()
            .map(|&e| young_constant(&p, &q, e).unwrap().value)
            .collect();
        assert!(values[0] >= values[1] && values[1] >= values[2]);
        assert!(young_constant(&c(2.0), &c(2.0), 0.1).is_err());
        assert!(young_constant(&c(3.0), &c(1.5), 0.1).is_err());
    }

    #[test]
    fn hamiltonian_examples() {
        let q = c(1.5);
        let n = 4.0;
        let xi = math::powf(n, 1.0 / 1.5);
        assert!((regularized_hamiltonian([0.0; 2], xi, n, &q) - 2.0).abs() < 1e-12);
        assert_eq!(regularized_hamiltonian([0.0; 2], 0.0, n, &q), 0.0);
        for n in [1.0, 10.0, 100.0, 1000.0] {
            let xi: f64 = 1.7;
            let t = xi.powf(1.5);
            let h = regularized_hamiltonian([0.0; 2], xi, n, &q);
            assert!((h - t).abs() <= t * t / n + 1e-15);
        }
    }

    #[test]
    fn vector_inequality_examples() {
        let r = check_vector_inequalities(2.0, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!(r.passed());
        assert_eq!(r.check("degenerate").unwrap().value, Some(2.0));
        let r = check_vector_inequalities(1.5, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!(r.passed());
        assert!(check_vector_inequalities(1.0, &[1.0], &[0.0]).is_err());
    }

    proptest! {
        #[test]
        fn truncate_nonexpansive(a in -100.0..100.0f64, b in -100.0..100.0f64, k in 0.01..50.0f64) {
            prop_assert!((truncate(a, k) - truncate(b, k)).abs() <= (a - b).abs());
            prop_assert!((truncate(a, k) + excess(a, k) - a).abs() <= 1e-14 * a.abs());
        }

        #[test]
        fn band_indicator_range_monotone(a in 0.0..20.0f64, d in 0.0..5.0f64, k in 1.01..15.0f64) {
            let (u, v) = (band_indicator(a, k), band_indicator(a + d, k));
            prop_assert!((0.0..=1.0).contains(&u));
            prop_assert!(u <= v);
        }

        #[test]
        fn hamiltonian_bounded_monotone(xi in 0.0..1e3f64, dxi in 0.0..10.0f64, q in 1.0..3.0f64, n in 1u32..1000) {
            let n = n as f64;
            let h = hamiltonian_value(xi, q, Some(n));
            prop_assert!(h >= 0.0 && h < n);
            prop_assert!(hamiltonian_value(xi + dxi, q, Some(n)) >= h);
            prop_assert!(hamiltonian_value(xi, q, Some(2.0 * n)) >= h);
        }

        #[test]
        fn vector_inequalities_hold(
            a in proptest::collection::vec(-1.0..1.0f64, 2),
            b in proptest::collection::vec(-1.0..1.0f64, 2),
            p in 1.05..4.0f64,
        ) {
            prop_assert!(check_vector_inequalities(p, &a, &b).unwrap().passed());
        }
    }
}
