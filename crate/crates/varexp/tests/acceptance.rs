//! Acceptance criteria. Each criterion prints one `PASS`/`FAIL` line with
//! its measurements, and the target exits nonzero if any fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varexp_core::exponent::ExponentTriple;
use varexp_core::modular::{
    check_holder, check_norm_modular_relations, check_product_lemma, gradient_norm, luxemburg_norm,
    sobolev_constant, ConstantConfig,
};
use varexp_core::solver::{
    check_discrete_monotonicity, default_test_functions, manufactured_convergence, natural_growth_scheme,
    outer_scheme, weak_solution_residual, ProblemSpec, SchemeFailure, SolveReport, SolverConfig,
};
use varexp_core::toolkit::{check_vector_inequalities, young_constant, TestMap};
use varexp_core::{DomainDescriptor, Error, ExponentField, Grid, GridFunction, Point, Variant};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn unit() -> DomainDescriptor {
    DomainDescriptor::unit_interval()
}

fn line(res: usize) -> Arc<Grid> {
    Arc::new(Grid::build(&unit(), res).unwrap())
}

fn field(src: &str) -> ExponentField {
    ExponentField::from_expr(unit(), src).unwrap()
}

fn constant(v: f64) -> ExponentField {
    ExponentField::constant(unit(), v).unwrap()
}

fn random_function(rng: &mut ChaCha8Rng, grid: &Arc<Grid>, amplitude: f64) -> GridFunction {
    let v = (0..grid.num_nodes()).map(|_| rng.random_range(-amplitude..amplitude)).collect();
    GridFunction::new(grid.clone(), v).unwrap()
}

fn random_exponent(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> ExponentField {
    let a = rng.random_range(lo..hi);
    let b = rng.random_range(0.0..=(a - lo).min(hi - a));
    let c = rng.random_range(0.0..10.0);
    ExponentField::from_fn(unit(), "random", move |x| a + b * (c * x[0]).sin()).unwrap()
}

/// Per-element means, volumes and exponents at barycenters.
fn element_data(u: &GridFunction, e: &ExponentField) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let grid = u.grid();
    let mut mean = Vec::new();
    let mut vol = Vec::new();
    let mut exp = Vec::new();
    for k in 0..grid.num_elements() {
        let ids = grid.element_nodes(k);
        mean.push(ids.iter().map(|&i| u.value(i)).sum::<f64>() / ids.len() as f64);
        vol.push(grid.volume(k));
        let c = grid.barycenter(k);
        exp.push(e.eval(c));
    }
    (mean, vol, exp)
}

fn modular_of(values: &[f64], vol: &[f64], exp: &[f64]) -> f64 {
    values.iter().zip(vol).zip(exp).map(|((v, w), e)| w * v.abs().powf(*e)).sum()
}

/// Luxemburg norm by plain bisection on `λ ↦ ρ(v/λ) - 1`.
fn bisect_norm(values: &[f64], vol: &[f64], exp: &[f64]) -> f64 {
    if values.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    let rho = |l: f64| modular_of(&values.iter().map(|v| v / l).collect::<Vec<_>>(), vol, exp);
    let (mut lo, mut hi) = (1e-300_f64.max(1e-12), 1.0);
    while rho(hi) > 1.0 {
        hi *= 2.0;
    }
    while rho(lo) <= 1.0 {
        lo /= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rho(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn gradient_norm_oracle(u: &GridFunction, p: &ExponentField) -> f64 {
    let grid = u.grid();
    let g = u.gradient_norms();
    let vol = grid.volumes().to_vec();
    let exp: Vec<f64> = (0..grid.num_elements()).map(|k| p.eval(grid.barycenter(k))).collect();
    bisect_norm(&g, &vol, &exp)
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let grid = line(rng.random_range(8..=64));
        let u = random_function(&mut rng, &grid, 3.0);
        for p in [1.5, 2.0, 3.0] {
            let (mean, vol, _) = element_data(&u, &constant(p));
            let exact = mean.iter().zip(&vol).map(|(m, w)| w * m.abs().powf(p)).sum::<f64>().powf(1.0 / p);
            let err = (luxemburg_norm(&u, &constant(p)) - exact).abs() / exact;
            worst = worst.max(err);
        }
    }
    outcome(worst <= 1e-8, format!("300 norms, worst relative error {worst:.2e} (tol 1e-8)"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = f64::INFINITY;
    let mut library_ok = true;
    let mut unit_cases = 0;
    for i in 0..1000 {
        let grid = line(rng.random_range(8..=48));
        let e = random_exponent(&mut rng, 1.05, 4.0);
        let amp = rng.random_range(0.01..10.0);
        let mut u = random_function(&mut rng, &grid, amp);
        if i % 2 == 0 {
            u = u.scaled(1.0 / luxemburg_norm(&u, &e));
            unit_cases += 1;
        }
        library_ok &= check_norm_modular_relations(&u, &e).passed();
        let (mean, vol, exp) = element_data(&u, &e);
        let rho = modular_of(&mean, &vol, &exp);
        let norm = luxemburg_norm(&u, &e);
        let e_min = exp.iter().copied().fold(f64::INFINITY, f64::min);
        let e_max = exp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // (i): norm and modular sit on the same side of 1.
        let side = if (norm - 1.0).abs() <= 1e-9 {
            -(rho - 1.0).abs()
        } else {
            (norm - 1.0).signum() * (rho - 1.0)
        };
        // (ii): power bounds.
        let (lo, hi) = if norm >= 1.0 {
            (norm.powf(e_min), norm.powf(e_max))
        } else {
            (norm.powf(e_max), norm.powf(e_min))
        };
        let scale = rho.max(1e-300);
        let slack = side.min((rho - lo) / scale).min((hi - rho) / scale);
        let slack = if (norm - 1.0).abs() <= 1e-9 { slack.max(side) } else { slack };
        worst = worst.min(slack);
    }
    outcome(
        library_ok && worst >= -1e-9,
        format!("1000 instances ({unit_cases} on the unit sphere), worst slack {worst:.2e}, library checks {library_ok}"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_holder = f64::INFINITY;
    let mut worst_product = f64::INFINITY;
    let mut library_ok = true;
    for _ in 0..1000 {
        let grid = line(rng.random_range(8..=48));
        let e = random_exponent(&mut rng, 1.1, 5.0);
        let u = random_function(&mut rng, &grid, 5.0);
        let v = random_function(&mut rng, &grid, 5.0);
        library_ok &= check_holder(&u, &v, &e).unwrap().passed();
        let (um, vol, exp) = element_data(&u, &e);
        let (vm, _, _) = element_data(&v, &e);
        let conj: Vec<f64> = exp.iter().map(|p| p / (p - 1.0)).collect();
        let lhs: f64 = um.iter().zip(&vm).zip(&vol).map(|((a, b), w)| (a * b).abs() * w).sum();
        let c = 1.0 / exp.iter().copied().fold(f64::INFINITY, f64::min)
            + 1.0 / conj.iter().copied().fold(f64::INFINITY, f64::min);
        let bound = c * bisect_norm(&um, &vol, &exp) * bisect_norm(&vm, &vol, &conj);
        worst_holder = worst_holder.min((bound - lhs) / bound);
    }
    for _ in 0..1000 {
        let grid = line(rng.random_range(8..=48));
        let p = random_exponent(&mut rng, 1.0, 3.0);
        let q = random_exponent(&mut rng, 1.0, 3.0);
        let amp = rng.random_range(0.05..5.0);
        let f = random_function(&mut rng, &grid, amp);
        library_ok &= check_product_lemma(&f, &p, &q).unwrap().passed();
        let (fm, vol, pv) = element_data(&f, &p);
        let (_, _, qv) = element_data(&f, &q);
        let pq: Vec<f64> = pv.iter().zip(&qv).map(|(a, b)| a * b).collect();
        let fp: Vec<f64> = fm.iter().zip(&pv).map(|(v, e)| v.abs().powf(*e)).collect();
        let n = bisect_norm(&fm, &vol, &pq);
        let mid = bisect_norm(&fp, &vol, &qv);
        let p_min = pv.iter().copied().fold(f64::INFINITY, f64::min);
        let p_max = pv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if n <= 1.0 { (n.powf(p_max), n.powf(p_min)) } else { (n.powf(p_min), n.powf(p_max)) };
        worst_product = worst_product.min((mid - lo) / mid).min((hi - mid) / mid);
    }
    // The oracle norms come from bisection, accurate to about 1e-15 relative.
    let ok = library_ok && worst_holder >= -1e-9 && worst_product >= -1e-9;
    outcome(
        ok,
        format!(
            "1000+1000 instances, Hölder slack {worst_holder:.2e}, product slack {worst_product:.2e}, library checks {library_ok}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (p, q, eps) in [(2.0, 1.0, 0.1), (2.0, 1.5, 0.1), (2.5, 1.8, 0.05)] {
        let y = young_constant(&constant(p), &constant(q), eps).unwrap();
        // Closed-form maximizer of s^q - ε s^p.
        let s_star = (q / (eps * p)).powf(1.0 / (p - q));
        let exact = s_star.powf(q) - eps * s_star.powf(p);
        let mut slack = f64::INFINITY;
        for i in 0..200 {
            let _x = i as f64 / 199.0;
            for j in 0..200 {
                let s = 10.0 * s_star * j as f64 / 199.0;
                slack = slack.min((eps * s.powf(p) + y.value - s.powf(q)) / (1.0 + s.powf(q)));
            }
        }
        ok &= slack >= -1e-12 && (y.value - exact).abs() <= 1e-10 * exact.max(1.0);
        if (p, q) == (2.0, 1.0) {
            ok &= (y.value - 2.5).abs() <= 1e-10;
        }
        detail.push(format!("C({p},{q},{eps})={:.10}", y.value));
    }
    outcome(ok, detail.join(", "))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = f64::INFINITY;
    let mut library_ok = true;
    for p in [1.5, 2.0, 3.0] {
        for _ in 0..10_000 {
            let mut draw = || {
                let r = 10f64.powf(rng.random_range(-3.0..2.0));
                let a = rng.random_range(0.0..2.0 * PI);
                [r * a.cos(), r * a.sin()]
            };
            let (xi, eta) = (draw(), draw());
            library_ok &= check_vector_inequalities(p, &xi, &eta).unwrap().passed();
            let n = |v: [f64; 2]| v[0].hypot(v[1]);
            let a = |v: [f64; 2]| {
                let m = n(v).powf(p - 2.0);
                [m * v[0], m * v[1]]
            };
            let (ax, ay) = (a(xi), a(eta));
            let d = [xi[0] - eta[0], xi[1] - eta[1]];
            let pairing = (ax[0] - ay[0]) * d[0] + (ax[1] - ay[1]) * d[1];
            let scale = pairing.abs().max(1e-300);
            if p >= 2.0 {
                worst = worst.min((pairing - 0.5f64.powf(p) * n(d).powf(p)) / scale);
            }
            if p <= 2.0 {
                let b = (p - 1.0) * n(d).powi(2) * (n(xi) + n(eta)).powf(p - 2.0);
                worst = worst.min((pairing - b) / scale);
            }
        }
    }
    outcome(
        library_ok && worst >= -1e-12,
        format!("30000 pairs, worst relative slack {worst:.2e}, library checks {library_ok}"),
    )
}

fn criterion_6() -> Outcome {
    let grid = |a: f64, b: f64| (0..10_000).map(move |i| a + (b - a) * i as f64 / 9_999.0);
    // φ(s) = s exp(s²/4): φ' - |φ| = exp(s²/4)(1 + s²/2 - |s|) >= 1/2.
    let sub_inf = grid(-10.0, 10.0)
        .map(|s: f64| (s * s / 4.0).exp() * (1.0 + s * s / 2.0 - s.abs()))
        .fold(f64::INFINITY, f64::min);
    let mut ok = sub_inf >= 0.5;
    let mut nat_inf = f64::INFINITY;
    for p in [2.0, 2.5, 3.0] {
        let a = 2f64.powf(4.0 * p - 2.0);
        let c = 2f64.powf(2.0 * p - 1.0);
        // The exponential factor is positive, so the sign is that of the polynomial.
        let inf = grid(0.0, 5.0).map(|s| 1.0 + 2.0 * a * s * s - c * s).fold(f64::INFINITY, f64::min);
        nat_inf = nat_inf.min(inf);
        let map = TestMap::new(Variant::Natural, Some(p)).unwrap();
        ok &= grid(0.0, 5.0).all(|s| map.property_value(s) > 0.0);
    }
    ok &= nat_inf > 0.0;
    let sub = TestMap::new(Variant::Subnatural, None).unwrap();
    ok &= grid(-10.0, 10.0).all(|s| sub.property_value(s) >= 0.5 - 1e-12);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for map in [sub, TestMap::new(Variant::Natural, Some(2.0)).unwrap()] {
        let top = 5f64.min(50.0 / map.coefficient()).min(map.cap() - 2.0 * h);
        for s in grid(-top, top) {
            let fd = (map.eval(s + h).unwrap().0 - map.eval(s - h).unwrap().0) / (2.0 * h);
            let a = map.coefficient();
            let exact = (a * s * s).exp() * (1.0 + 2.0 * a * s * s);
            worst = worst.max(((fd - exact) / exact).abs());
            worst = worst.max(((map.eval(s).unwrap().1 - exact) / exact).abs());
        }
    }
    ok &= worst <= 1e-6;
    outcome(
        ok,
        format!("sub-natural inf {sub_inf:.6} >= 0.5, natural inf {nat_inf:.4} > 0, derivative error {worst:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let p = constant(2.0);
    let mut values = Vec::new();
    let mut converged = true;
    for res in [128, 256, 512] {
        let est = sobolev_constant(&p, &p, &line(res), &ConstantConfig::default()).unwrap();
        converged &= est.converged;
        values.push(est.value);
    }
    let rel = (values[2] - PI).abs() / PI;
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + 1e-6);
    outcome(
        converged && rel <= 0.01 && monotone,
        format!(
            "S at 128/256/512 = {:.6}/{:.6}/{:.6}, error vs π {:.2e}, non-increasing {monotone}",
            values[0], values[1], values[2], rel
        ),
    )
}

fn criterion_8() -> Outcome {
    let config = SolverConfig::default();
    let res = [16, 32, 64, 128];
    let u = |x: Point| x[0] * (1.0 - x[0]);
    let du = |x: Point| [1.0 - 2.0 * x[0], 0.0];
    let a = manufactured_convergence(&unit(), &constant(2.0), &constant(1.0), Variant::Subnatural, &res, &config, &u, &du)
        .unwrap();
    let b = manufactured_convergence(
        &unit(),
        &field("2.2+0.2*x"),
        &field("1.7+0.2*x"),
        Variant::Subnatural,
        &res,
        &config,
        &u,
        &du,
    )
    .unwrap();
    // Forcing oracle for the constant case: f = 2 + |1 - 2x|.
    let grid = line(32);
    let m = varexp_core::solver::manufactured_problem(&constant(2.0), &constant(1.0), Variant::Subnatural, &grid, &u, &du)
        .unwrap();
    let forcing_err = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, x)| (m.spec.f().value(i) - (2.0 + (1.0 - 2.0 * x[0]).abs())).abs())
        .fold(0.0f64, f64::max);
    let ra: Vec<f64> = a[1..].iter().map(|r| r.ratio.unwrap()).collect();
    let rb: Vec<f64> = b[1..].iter().map(|r| r.ratio.unwrap()).collect();
    let ok = ra.iter().all(|&r| r >= 3.0) && rb.iter().all(|&r| r >= 1.8) && forcing_err < 1e-6;
    let fmt = |v: &[f64]| v.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join("/");
    outcome(
        ok,
        format!("constant ratios {} (>= 3), variable ratios {} (>= 1.8)", fmt(&ra), fmt(&rb)),
    )
}

fn benchmark_spec(p: &str, q: &str, f: GridFunction, variant: Variant) -> Result<ProblemSpec, Error> {
    let grid = f.grid().clone();
    let ex = ExponentTriple::new(field(p), field(q), constant(0.5), variant);
    ProblemSpec::new(ex, f, GridFunction::constant(grid, 1.0)?, 1.0)
}

/// Checks the qualitative verdicts of a finished scheme run against the
/// stored solutions.
fn scheme_verdicts(spec: &ProblemSpec, report: &SolveReport, config: &SolverConfig) -> (bool, String) {
    let p = &spec.exponents().p;
    let q = &spec.exponents().q;
    let last = report.stages.last().unwrap();
    let prev = &report.stages[report.stages.len() - 2];
    let mut d_max = 0.0f64;
    for &k in &config.k_levels {
        let tk = |u: &GridFunction| u.map(|s| s.clamp(-k, k)).unwrap();
        let (a, b) = (tk(&last.solution), tk(&prev.solution));
        let diff = GridFunction::new(a.grid().clone(), a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect()).unwrap();
        d_max = d_max.max(gradient_norm_oracle(&diff, p));
    }
    let min_u = report.stages.iter().map(|s| s.solution.min()).fold(f64::INFINITY, f64::min);
    let barrier = report
        .stages
        .iter()
        .flat_map(|s| s.solution.values().iter().zip(s.barrier.values()).map(|(u, v)| u - v))
        .fold(f64::NEG_INFINITY, f64::max);
    let grid = spec.grid();
    let mut tails_ok = true;
    for s in &report.stages {
        let (mean, vol, qe) = element_data(&s.solution, q);
        let g = s.solution.gradient_norms();
        let tails: Vec<f64> = config
            .k_levels
            .iter()
            .map(|&k| (0..grid.num_elements()).filter(|&e| mean[e] >= k).map(|e| vol[e] * g[e].powf(qe[e])).sum())
            .collect();
        tails_ok &= tails.windows(2).all(|w| w[1] <= w[0]);
        tails_ok &= tails.iter().zip(&s.tails).all(|(a, b)| (a - b).abs() <= 1e-12 * a.max(1.0));
    }
    let u = report.final_solution().unwrap();
    let defects = weak_solution_residual(u, spec, &default_test_functions(grid)).unwrap();
    let defect = defects.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let ok = report.converged
        && d_max < config.outer_tolerance
        && min_u >= -1e-8
        && barrier <= 1e-6
        && tails_ok
        && defect <= 10.0 * config.tolerance
        && report.checks.passed();
    (
        ok,
        format!(
            "stages {}, final d {d_max:.1e}, min u {min_u:.1e}, max(u - v) {barrier:.1e}, tails ok {tails_ok}, weak defect {defect:.1e}",
            report.stages.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let grid = line(256);
    let spec = benchmark_spec("2.2+0.2*x", "1.7+0.2*x", GridFunction::constant(grid, 1.0).unwrap(), Variant::Subnatural)
        .unwrap();
    let config = SolverConfig::default();
    let report = outer_scheme(&spec, &config).unwrap();
    let (ok, detail) = scheme_verdicts(&spec, &report, &config);
    outcome(ok, detail)
}

fn criterion_10() -> Outcome {
    let grid = line(256);
    let mut f = vec![1.0; grid.num_nodes()];
    f[128] = 100.0;
    let f = GridFunction::new(grid.clone(), f).unwrap();
    let spec = benchmark_spec("2.5", "2.5", f.clone(), Variant::Natural).unwrap();
    let config = SolverConfig::default();
    let report = natural_growth_scheme(&spec, &config).unwrap();
    let map_ok = report.map_property.as_ref().is_some_and(|m| m.passed());
    let (mut ok, detail) = scheme_verdicts(&spec, &report, &config);
    ok &= map_ok;
    let rejected = |p: &str, q: &str| match benchmark_spec(p, q, f.clone(), Variant::Natural) {
        Err(Error::Hypothesis(_)) => true,
        Err(_) => false,
        Ok(s) => matches!(natural_growth_scheme(&s, &config), Err(SchemeFailure::Rejected(Error::Hypothesis(_)))),
    };
    let low_p = rejected("1.9", "1.9");
    let mismatch = rejected("2.5", "2.2");
    ok &= low_p && mismatch;
    outcome(ok, format!("{detail}, map property {map_ok}, p=1.9 rejected {low_p}, q≠p rejected {mismatch}"))
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid = line(64);
    let mut worst = f64::INFINITY;
    let mut strict_ok = true;
    let mut agree = 0.0f64;
    for src in ["2+0.3*sin(pi*x)", "1.5+0.4*x", "3-x*x"] {
        let p = field(src);
        for _ in 0..200 {
            let mut draw = || {
                let mut v: Vec<f64> = (0..grid.num_nodes()).map(|_| rng.random_range(-1.0..1.0)).collect();
                v[0] = 0.0;
                *v.last_mut().unwrap() = 0.0;
                GridFunction::new(grid.clone(), v).unwrap()
            };
            let (u, v) = (draw(), draw());
            let pairing = check_discrete_monotonicity(&u, &v, &p).unwrap();
            let (gu, gv) = (u.gradients(), v.gradients());
            let oracle: f64 = (0..grid.num_elements())
                .map(|e| {
                    let pe = p.eval(grid.barycenter(e));
                    let a = |g: [f64; 2]| {
                        let n = g[0].hypot(g[1]);
                        if n == 0.0 { 0.0 } else { n.powf(pe - 2.0) * g[0] }
                    };
                    grid.volume(e) * (a(gu[e]) - a(gv[e])) * (gu[e][0] - gv[e][0])
                })
                .sum();
            agree = agree.max((pairing - oracle).abs() / oracle.abs().max(1.0));
            worst = worst.min(pairing);
            let diff = GridFunction::new(grid.clone(), u.values().iter().zip(v.values()).map(|(a, b)| a - b).collect()).unwrap();
            if gradient_norm(&diff, &p) > 1e-3 {
                strict_ok &= pairing > 1e-10;
            }
        }
    }
    outcome(
        worst >= -1e-12 && strict_ok && agree <= 1e-10,
        format!("600 pairs, min pairing {worst:.3e}, strict {strict_ok}, oracle agreement {agree:.1e}"),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 11] = [
        (1, "Luxemburg norm matches closed form", criterion_1, Duration::from_secs(5)),
        (2, "norm-modular relations", criterion_2, Duration::from_secs(10)),
        (3, "Hölder and product-lemma sandwich", criterion_3, Duration::from_secs(20)),
        (4, "Young constant", criterion_4, Duration::from_secs(2)),
        (5, "vector inequalities", criterion_5, Duration::from_secs(2)),
        (6, "test-map properties", criterion_6, Duration::from_secs(1)),
        (7, "Sobolev constant sanity", criterion_7, Duration::from_secs(30)),
        (8, "manufactured-solution convergence", criterion_8, Duration::from_secs(60)),
        (9, "truncation scheme on the benchmark", criterion_9, Duration::from_secs(300)),
        (10, "natural-growth variant", criterion_10, Duration::from_secs(300)),
        (11, "discrete strict monotonicity", criterion_11, Duration::from_secs(5)),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (id, name, run, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let passed = out.passed && took <= budget;
        if !passed {
            failures += 1;
        }
        println!(
            "{} criterion {id}: {name}: {} [{:.2} s, budget {} s]",
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
