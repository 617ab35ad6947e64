//! Randomized property suites run by `verify` mode.
//!
//! Every suite draws its instances from its own ChaCha stream seeded with
//! `seed + index`, so results do not depend on the thread count.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use varexp_core::exponent::{check_admissibility, ExponentTriple};
use varexp_core::modular::{
    check_holder, check_norm_modular_relations, check_product_lemma, gradient_norm, luxemburg_norm, sobolev_constant,
    ConstantConfig,
};
use varexp_core::solver::check_discrete_monotonicity;
use varexp_core::toolkit::{
    band_indicator, check_test_map_property, check_vector_inequalities, excess, hamiltonian_slope,
    hamiltonian_value, truncate, young_constant, TestMap,
};
use varexp_core::{DomainDescriptor, ExponentField, Grid, GridFunction, Variant};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub instances: usize,
    /// Smallest slack of any instance; negative beyond the tolerance fails.
    pub worst_slack: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: Option<String>,
}

struct Tally {
    instances: usize,
    worst: f64,
    failed: usize,
}

impl Tally {
    fn new() -> Self {
        Self {
            instances: 0,
            worst: f64::INFINITY,
            failed: 0,
        }
    }

    fn add(&mut self, slack: f64, passed: bool) {
        self.instances += 1;
        self.worst = self.worst.min(slack);
        if !passed || slack.is_nan() {
            self.failed += 1;
        }
    }

    fn finish(self, name: &str, tolerance: f64, note: Option<String>) -> SuiteResult {
        SuiteResult {
            name: name.into(),
            instances: self.instances,
            worst_slack: self.worst,
            tolerance,
            passed: self.failed == 0,
            note,
        }
    }
}

type Suite = fn(&mut ChaCha8Rng, f64) -> SuiteResult;

pub const SUITES: &[(&str, Suite)] = &[
    ("luxemburg_closed_form", luxemburg_closed_form),
    ("norm_modular_relations", norm_modular),
    ("holder", holder),
    ("product_lemma", product_lemma),
    ("young_constant", young),
    ("vector_inequalities", vector_inequalities),
    ("test_map", test_map),
    ("truncations", truncations),
    ("hamiltonian", hamiltonian),
    ("admissibility", admissibility),
    ("discrete_monotonicity", monotonicity),
    ("sobolev_constant", sobolev),
];

fn count(base: usize, scale: f64) -> usize {
    ((base as f64 * scale).round() as usize).max(1)
}

fn line(res: usize) -> Arc<Grid> {
    Arc::new(Grid::build(&DomainDescriptor::unit_interval(), res).expect("valid resolution"))
}

fn random_function(rng: &mut ChaCha8Rng, grid: &Arc<Grid>, amplitude: f64) -> GridFunction {
    let v = (0..grid.num_nodes()).map(|_| rng.random_range(-amplitude..amplitude)).collect();
    GridFunction::new(grid.clone(), v).expect("finite")
}

/// `a + b sin(c x + d)` with range inside `[lo, hi]`.
fn random_exponent(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> ExponentField {
    let a = rng.random_range(lo..hi);
    let room = (a - lo).min(hi - a);
    let b = rng.random_range(0.0..=room);
    let c = rng.random_range(0.0..10.0);
    let d = rng.random_range(0.0..2.0 * PI);
    ExponentField::from_fn(DomainDescriptor::unit_interval(), format!("{a}+{b}sin({c}x+{d})"), move |x| {
        a + b * (c * x[0] + d).sin()
    })
    .expect("finite")
}

fn constant(v: f64) -> ExponentField {
    ExponentField::constant(DomainDescriptor::unit_interval(), v).expect("finite")
}

fn luxemburg_closed_form(rng: &mut ChaCha8Rng, scale: f64) -> SuiteResult {
    let tol = 1e-8;
    let mut t = Tally::new();
    for _ in 0..count(100, scale) {
        let grid = line(rng.random_range(8..=64));
        let u = random_function(rng, &grid, 3.0);
        for p in [1.5, 2.0, 3.0] {
            let sum: f64 = (0..grid.num_elements())
                .map(|e| {
                    let ids = grid.element_nodes(e);
                    let mean = 0.5 * (u.value(ids[0]) + u.value(ids[1]));
                    grid.volume(e) * mean.abs().powf(p)
                })
                .sum();
            let exact = sum.powf(1.0 / p);
            let err = (luxemburg_norm(&u, &constant(p)) - exact).abs() / exact.max(f64::MIN_POSITIVE);
            t.add(tol - err, err <= tol);
        }
    }
    t.finish("luxemburg_closed_form", 0.0, Some("relative error against the closed-form L^p norm".into()))
}

fn norm_modular(rng: &mut ChaCha8Rng, scale: f64) -> SuiteResult {
    let mut t = Tally::new();
    for i in 0..count(1000, scale) {
        let grid = line(rng.random_range(8..=48));
        let e = random_exponent(rng, 1.05, 4.0);
        let amp = rng.random_range(0.01..10.0);
        let mut u = random_function(rng, &grid, amp);
        if i % 2 == 0 {
            let n = luxemburg_norm(&u, &e);
            if n > 0.0 {
                u = u.scaled(1.0 / n);
            }
        }
        let r = check_norm_modular_relations(&u, &e);
        t.add(r.worst_slack(), r.passed());
    }
    t.finish("norm_modular_relations", 1e-9, Some("half the instances rescaled to unit norm".into()))
}

fn holder(rng: &mut ChaCha8Rng, scale: f64) -> SuiteResult {
    let mut t = Tally::new();
    for _ in 0..count(1000, scale) {
        let grid = line(rng.random_range(8..=48));
        let e = random_exponent(rng, 1.1, 5.0);
        let u = random_function(rng, &grid, 5.0);
        let v = random_function(rng, &grid, 5.0);
        let r = check_holder(&u, &v, &e).expect("e > 1");
        t.add(r.worst_slack(), r.passed());
    }
    t.finish("holder", 1e-9, None)
}

fn product_lemma(rng: &mut ChaCha8Rng, scale: f64) -> SuiteResult {
    let mut t = Tally::new();
    let n = count(1000, scale);
    for i in 0..n {
        let grid = line(rng.random_range(8..=48));
        let p = random_exponent(rng, 1.0, 3.0);
        let q = random_exponent(rng, 1.0, 3.0);
        let amp = rng.random_range(0.05..5.0);
        let mut f = random_function(rng, &grid, amp);
        if f.is_zero() {
            continue;
        }
        if i % 3 == 0 {
            let pq = p.zip_with(&q, "pq", |a, b| a * b).expect("finite");
            f = f.scaled(1.0 / luxemburg_norm(&f, &pq));
        }
        let r = check_product_lemma(&f, &p, &q).expect("p q >= 1");
        t.add(r.worst_slack(), r.passed());
    }
    t.finish("product_lemma", 1e-9, Some("a third of the instances on the unit sphere of L^{pq}".into()))
}

fn young(_: &mut ChaCha8Rng, _: f64) -> SuiteResult {
    let mut t = Tally::new();
    let mut note = String::new();
    for (p, q, eps) in [(2.0, 1.0, 0.1), (2.0, 1.5, 0.1), (2.5, 1.8, 0.05)] {
        let y = young_constant(&constant(p), &constant(q), eps).expect("hypotheses hold");
        t.add(y.verification_slack, y.verification_slack >= -1e-12);
        note.push_str(&format!("C({p},{q},{eps}) = {:.12}; ", y.value));
        if (p, q) == (2.0, 1.0) {
            let err = (y.value - 2.5).abs();
            t.add(1e-10 - err, err <= 1e-10);
        }
    }
    t.finish("young_constant", 1e-12, Some(note.trim_end_matches("; ").into()))
}

fn vector_inequalities(rng: &mut ChaCha8Rng, scale: f64) -> SuiteResult {
    let mut t = Tally::new();
    let draw = |rng: &mut ChaCha8Rng| {
        let r = 10f64.powf(rng.random_range(-3.0..2.0));
        let a = rng.random_range(0.0..2.0 * PI);
        [r * a.cos(), r * a.sin()]
    };
    for p in [1.5, 2.0, 3.0] {
        for _ in 0..count(10_000, scale) {
            let xi = draw(rng);
            let eta = draw(rng);
            let r = check_vector_inequalities(p, &xi, &eta).expect("p > 1");
            t.add(r.worst_slack(), r.passed());
        }
    }
    t.finish("vector_inequalities", 1e-12, None)
}

fn test_map(_: &mut ChaCha8Rng, _: f64) -> SuiteResult {
    let mut t = Tally::new();
    let grid = |a: f64, b: f64| -> Vec<f64> { (0..10_000).map(|i| a + (b - a) * i as f64 / 9_999.0).collect() };
    let sub = check_test_map_property(Variant::Subnatural, None, &grid(-10.0, 10.0)).expect("valid map");
    t.add(sub.worst_slack(), sub.passed());
    for p_plus in [2.0, 2.5, 3.0] {
        let nat = check_test_map_property(Variant::Natural, Some(p_plus), &grid(0.0, 5.0)).expect("valid map");
        t.add(nat.worst_slack(), nat.passed());
    }
    let h = 1e-5;
    for map in [
        TestMap::new(Variant::Subnatural, None).expect("valid"),
        TestMap::new(Variant::Natural, Some(2.0)).expect("valid"),
    ] {
        let top = (map.cap() - 2.0 * h).min(5.0).min(50.0 / map.coefficient());
        for s in grid(-top, top) {
            let fd = (map.eval(s + h).expect("in range").0 - map.eval(s - h).expect("in range").0) / (2.0 * h);
            let exact = map.eval(s).expect("in range").1;
            let err = ((fd - exact) / exact).abs();
            t.add(1e-6 - err, err <= 1e-6);
        }
    }
    t.finish(
        "test_map",
        1e-12,
        Some(format!("sub-natural infimum {:.6}", sub.checks[0].value.unwrap_or(f64::NAN))),
    )
}

fn truncations(rng: &mut ChaCha8Rng, scale: f64) -> SuiteResult {
    let mut t = Tally::new();
    for _ in 0..count(10_000, scale) {
        let a: f64 = rng.random_range(-50.0..50.0);
        let b: f64 = rng.random_range(-50.0..50.0);
        let k = rng.random_range(0.01..30.0);
        let lip = (a - b).abs() - (truncate(a, k) - truncate(b, k)).abs();
        t.add(lip, lip >= 0.0);
        let split = (truncate(a, k) + excess(a, k) - a).abs();
        t.add(-split, split <= 1e-12 * a.abs().max(1.0));
        let kk = k + 1.0;
        let psi = band_indicator(a.abs(), kk);
        let hi = band_indicator(a.abs() + b.abs(), kk);
        let ok = (0.0..=1.0).contains(&psi) && hi >= psi;
        t.add(if ok { 0.0 } else { -1.0 }, ok);
    }
    t.finish("truncations", 1e-12, None)
}

fn hamiltonian(rng: &mut ChaCha8Rng, scale: f64) -> SuiteResult {
    let mut t = Tally::new();
    for _ in 0..count(10_000, scale) {
        let xi = 10f64.powf(rng.random_range(-3.0..2.0));
        let q = rng.random_range(1.0..4.0);
        let n = 10f64.powf(rng.random_range(0.0..4.0));
        let exact = hamiltonian_value(xi, q, None);
        let hn = hamiltonian_value(xi, q, Some(n));
        let h2n = hamiltonian_value(xi, q, Some(2.0 * n));
        let bound = exact.min(n) - hn;
        t.add(bound / exact.max(1.0), bound >= -1e-12 * exact.max(1.0));
        t.add(h2n - hn, h2n >= hn);
        let d = 1e-6 * xi;
        let fd = (hamiltonian_value(xi + d, q, Some(n)) - hamiltonian_value(xi - d, q, Some(n))) / (2.0 * d);
        let slope = hamiltonian_slope(xi, q, Some(n));
        // Differences lose digits once H_n saturates, so scale by H_n/|ξ| as well.
        let err = (fd - slope).abs() / slope.abs().max(hn / xi).max(1e-300);
        t.add(1e-5 - err, err <= 1e-5);
    }
    t.finish("hamiltonian", 1e-12, Some("H_n <= min(|ξ|^q, n), monotone in n, slope".into()))
}

fn admissibility(rng: &mut ChaCha8Rng, scale: f64) -> SuiteResult {
    let mut t = Tally::new();
    let mut verdict = |ok: bool, expected: bool| t.add(if ok == expected { 0.0 } else { -1.0 }, ok == expected);
    for _ in 0..count(500, scale) {
        let dim = rng.random_range(1..=2usize);
        let nf = dim as f64;
        let p = rng.random_range(1.1..4.0);
        // q strictly above N p/(N + p) keeps η = p - 1 below q* - 1.
        let lo = 1f64.max(p - 1.0).max(nf * p / (nf + p) + 1e-6);
        let q = rng.random_range(lo..p);
        let d = if dim == 1 { DomainDescriptor::unit_interval() } else { DomainDescriptor::unit_square() };
        let f = |v: f64| ExponentField::constant(d, v).expect("finite");
        let triple = |q: f64, eta: f64| ExponentTriple::new(f(p), f(q), f(eta), Variant::Subnatural);
        verdict(check_admissibility(&triple(q, p - 1.0), dim).passed(), true);
        let q_star = if q < nf { nf * q / (nf - q) } else { f64::INFINITY };
        let eta = rng.random_range(0.0..(q_star - 1.0).min(5.0) * 0.999);
        verdict(check_admissibility(&triple(q, eta), dim).passed(), true);
        verdict(check_admissibility(&triple(p + 0.1, eta), dim).passed(), false);
    }
    t.finish("admissibility", 0.0, Some("constant-exponent cases accepted, q >= p rejected".into()))
}

fn monotonicity(rng: &mut ChaCha8Rng, scale: f64) -> SuiteResult {
    let mut t = Tally::new();
    let fields = [
        ExponentField::from_expr(DomainDescriptor::unit_interval(), "2+0.3*sin(pi*x)").expect("valid"),
        ExponentField::from_expr(DomainDescriptor::unit_interval(), "1.5+0.4*x").expect("valid"),
        ExponentField::from_expr(DomainDescriptor::unit_interval(), "3-x*x").expect("valid"),
    ];
    let grid = line(64);
    for p in &fields {
        for _ in 0..count(200, scale) {
            let u = varexp_core::grid::dirichlet_project(&random_function(rng, &grid, 1.0));
            let v = varexp_core::grid::dirichlet_project(&random_function(rng, &grid, 1.0));
            let pairing = check_discrete_monotonicity(&u, &v, p).expect("same grid");
            let diff = GridFunction::new(grid.clone(), u.values().iter().zip(v.values()).map(|(a, b)| a - b).collect())
                .expect("finite");
            let strict = gradient_norm(&diff, p) <= 1e-3 || pairing > 1e-10;
            t.add(pairing, pairing >= -1e-12 && strict);
        }
    }
    t.finish("discrete_monotonicity", 1e-12, Some("strictly positive once the gradient gap exceeds 1e-3".into()))
}

fn sobolev(_: &mut ChaCha8Rng, _: f64) -> SuiteResult {
    let mut t = Tally::new();
    let est = sobolev_constant(&constant(2.0), &constant(2.0), &line(128), &ConstantConfig::default())
        .expect("valid problem");
    let rel = (est.value - PI).abs() / PI;
    t.add(0.01 - rel, rel <= 0.01 && est.converged);
    t.finish("sobolev_constant", 0.0, Some(format!("S(2,2,(0,1)) ≈ {:.8} at 128 cells", est.value)))
}

/// Runs every suite on up to `threads` worker threads.
pub fn run_suites(seed: u64, scale: f64, threads: usize) -> Vec<SuiteResult> {
    let next = AtomicUsize::new(0);
    let mut results: Vec<Option<SuiteResult>> = vec![None; SUITES.len()];
    let slots: Vec<std::sync::Mutex<Option<SuiteResult>>> = SUITES.iter().map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..threads.clamp(1, SUITES.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((_, suite)) = SUITES.get(i) else { break };
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
                *slots[i].lock().expect("no poisoning") = Some(suite(&mut rng, scale));
            });
        }
    });
    for (slot, out) in slots.into_iter().zip(results.iter_mut()) {
        *out = slot.into_inner().expect("no poisoning");
    }
    results.into_iter().map(|r| r.expect("every suite ran")).collect()
}
