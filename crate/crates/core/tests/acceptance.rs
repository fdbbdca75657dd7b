//! Acceptance criteria 1–10. Each test prints one `criterion N: PASS|FAIL` line.

use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use fracsym::geometry::{schwarz_rearrange, Domain, GridFunction, Lattice, PointFn, Primitive};
use fracsym::quadrature::{double_integral, exterior_tail_integral, radial_comparison_check, CubatureSpec};
use fracsym::seminorm::{seminorm_fullspace, Ladder, Region, SeminormRequest};
use fracsym::theorems::{
    sample_on_domain, verify_comparison, verify_counterexample, CounterexampleOptions, CounterexampleReport,
};
use fracsym::young::{
    beta, classify_theorem2_case, complementary, delta2_constant, exponent_bounds, legendre_identity_residual,
    log_grid, KernelSpec, LambdaProbe, TheoremCase, YoungFunction,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn report(n: u32, what: &str, ok: bool, detail: &str) {
    println!("criterion {n} ({what}): {} | {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn single_threaded(resolution: usize) -> CubatureSpec {
    CubatureSpec { base_resolution: resolution, refinement_levels: 2, threads: Some(1), ..Default::default() }
}

fn two_intervals() -> Domain {
    "box(0,1)+box(2,4)".parse().unwrap()
}

fn l_shape() -> Domain {
    Domain::new(vec![
        Primitive::Box { lo: vec![0.0, 0.0], hi: vec![2.0, 1.0] },
        Primitive::Box { lo: vec![0.0, 0.0], hi: vec![1.0, 2.0] },
    ])
    .unwrap()
}

fn square() -> YoungFunction {
    YoungFunction::power(2.0).unwrap()
}

fn square_plus_cube() -> YoungFunction {
    YoungFunction::double_phase(2.0, 3.0).unwrap()
}

struct Run {
    label: String,
    report: CounterexampleReport,
    elapsed: Duration,
}

fn run(label: &str, domain: Domain, young: YoungFunction, resolution: usize) -> Run {
    let t = Instant::now();
    let report =
        verify_counterexample(&domain, &young, 0.5, &CounterexampleOptions::default(), &single_threaded(resolution))
            .unwrap();
    Run { label: label.to_string(), report, elapsed: t.elapsed() }
}

fn one_dimensional_runs() -> &'static [Run] {
    static RUNS: OnceLock<Vec<Run>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let ball = Domain::cube(vec![-1.0], vec![1.0]).unwrap();
        vec![
            run("(0,1)+(2,4), t^2", two_intervals(), square(), 256),
            run("(0,1)+(2,4), t^2+t^3", two_intervals(), square_plus_cube(), 256),
            run("ball (-1,1), t^2", ball.clone(), square(), 256),
            run("ball (-1,1), t^2+t^3", ball, square_plus_cube(), 256),
        ]
    })
}

fn l_shape_run() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| run("L-shape, t^2", l_shape(), square(), 48))
}

fn describe(r: &Run) -> String {
    let best = r
        .report
        .rows
        .iter()
        .filter(|row| row.pass)
        .map(|row| format!("eps {:.4e} margin {:.3e} err {:.3e}", row.epsilon, row.margin, row.combined_error))
        .next()
        .unwrap_or_else(|| "no passing eps".into());
    format!("{}: {best}, tail {}, {:.2?}", r.label, r.report.tail_distinguished(), r.elapsed)
}

#[test]
fn criterion_01_one_dimensional_counterexamples() {
    let runs = one_dimensional_runs();
    let ok = runs.iter().all(|r| {
        r.report.passed()
            && r.report.tail_distinguished()
            && r.report.rearrangement_exact
            && r.elapsed <= Duration::from_secs(60)
    });
    let detail: Vec<String> = runs.iter().map(describe).collect();
    report(1, "1D counterexample", ok, &detail.join("; "));
}

#[test]
fn criterion_02_l_shape_counterexample() {
    let r = l_shape_run();
    let ok = r.report.passed() && r.elapsed <= Duration::from_secs(20 * 60);
    report(2, "2D counterexample", ok, &describe(r));
}

fn corpus_functions() -> Vec<Ladder> {
    let unit = Domain::cube(vec![0.0], vec![1.0]).unwrap();
    let sq = Domain::cube(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
    let f = |g: fn(&[f64]) -> f64| -> PointFn { Arc::new(g) };
    let mut corpus = vec![
        sample_on_domain(&unit, 64, 2, f(|x| (1.0 - (2.0 * x[0] - 1.0).abs()).max(0.0))).unwrap(),
        sample_on_domain(&unit, 64, 2, f(|x| (1.0 - 4.0 * (x[0] - 0.3).abs()).max(0.0))).unwrap(),
        sample_on_domain(&unit, 64, 2, f(|x| (std::f64::consts::PI * x[0]).sin().powi(2))).unwrap(),
        sample_on_domain(
            &unit,
            64,
            2,
            f(|x| (1.0 - 8.0 * (x[0] - 0.25).abs()).max(0.0) + 0.5 * (1.0 - 8.0 * (x[0] - 0.75).abs()).max(0.0)),
        )
        .unwrap(),
        sample_on_domain(&sq, 24, 2, f(|x| (0.4 - ((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2)).sqrt()).max(0.0)))
            .unwrap(),
        sample_on_domain(&sq, 24, 2, f(|x| (0.3 - (x[0] - 0.35).abs().max((x[1] - 0.6).abs())).max(0.0))).unwrap(),
    ];
    let mut rng = StdRng::seed_from_u64(20_241);
    for k in 0..3 {
        let n = 20 + 4 * k;
        let values: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() }).collect();
        let g = GridFunction::new(Lattice::new(vec![0.0], 1.0 / n as f64).unwrap(), vec![0], vec![n], values).unwrap();
        corpus.push(Ladder::from_grid(g, 2));
    }
    for k in 0..2 {
        let n = 9 + 3 * k;
        let values: Vec<f64> = (0..n * n).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() }).collect();
        let g =
            GridFunction::new(Lattice::new(vec![0.0, 0.0], 1.0 / n as f64).unwrap(), vec![0, 0], vec![n, n], values)
                .unwrap();
        corpus.push(Ladder::from_grid(g, 2));
    }
    corpus
}

#[test]
fn criterion_03_polya_szego_direction() {
    let corpus = corpus_functions();
    let young = square();
    let spec = CubatureSpec { base_resolution: 64, refinement_levels: 2, ..Default::default() };
    let mut violations = 0;
    let mut worst: f64 = f64::NEG_INFINITY;
    for u in &corpus {
        let dim = u.finest().dim();
        let kernel = KernelSpec::fractional(0.5, dim).unwrap();
        let req = |u: Ladder| SeminormRequest {
            u,
            young: young.clone(),
            kernel: kernel.clone(),
            region: Region::FullSpace,
            spec: spec.clone(),
        };
        let full = seminorm_fullspace(&req(u.clone())).unwrap();
        let star = seminorm_fullspace(&req(u.map(schwarz_rearrange).unwrap())).unwrap();
        let slack = full.error_bound + star.error_bound;
        worst = worst.max((star.value - full.value) / slack.max(f64::MIN_POSITIVE));
        if star.value > full.value + slack {
            violations += 1;
        }
    }
    let ok = corpus.len() >= 10 && violations == 0;
    report(
        3,
        "rearrangement lowers the full-space seminorm",
        ok,
        &format!("{} functions, {violations} violations, max (I[u*]-I[u])/errors = {worst:.3}", corpus.len()),
    );
}

#[test]
fn criterion_04_decomposition_identity() {
    let mut rows = 0;
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for r in one_dimensional_runs().iter().chain(std::iter::once(l_shape_run())) {
        for row in &r.report.rows {
            rows += 1;
            worst = worst.max(row.identity_residual / row.identity_bound);
            if row.identity_residual > row.identity_bound {
                bad.push(format!("{} eps {:.3e}", r.label, row.epsilon));
            }
        }
    }
    report(
        4,
        "full = domain + 2 cross",
        bad.is_empty(),
        &format!("{rows} rows, max residual/bound = {worst:.3e}, violations {bad:?}"),
    );
}

#[test]
fn criterion_05_radial_comparison_closed_forms() {
    let spec = CubatureSpec::default();
    let e = std::f64::consts::E;
    let within = |v: f64, exact: f64| ((v - exact) / exact).abs() <= 0.01;
    let mut details = Vec::new();
    let mut ok = true;

    let exp = |r: f64| (-r).exp();
    let d = Domain::cube(vec![1.0], vec![3.0]).unwrap();
    let c = radial_comparison_check(&exp, &d, 0.0, &spec).unwrap();
    let exact = [2.0 * (1.0 - 1.0 / e), 1.0 / e - e.powi(-3), 2.0 - (1.0 / e - e.powi(-3)), 2.0 / e];
    let got =
        [c.over_symmetrized.clone(), c.over_domain.clone(), c.outside_domain.clone(), c.outside_symmetrized.clone()];
    ok &= got.iter().zip(&exact).all(|(g, x)| within(g.value, *x));
    ok &= c.inside_margin() > got[0].error_bound + got[1].error_bound;
    ok &= c.outside_margin() > got[2].error_bound + got[3].error_bound;
    details.push(format!(
        "e^-|y| on (1,3): {:.6} > {:.6}, outside {:.6} > {:.6}",
        got[0].value, got[1].value, got[2].value, got[3].value
    ));

    let inv = |r: f64| (1.0 + r).powi(-2);
    let d = Domain::cube(vec![0.0], vec![2.0]).unwrap();
    let c = radial_comparison_check(&inv, &d, 0.0, &spec).unwrap();
    let exact = [1.0, 2.0 / 3.0, 4.0 / 3.0, 1.0];
    let got =
        [c.over_symmetrized.clone(), c.over_domain.clone(), c.outside_domain.clone(), c.outside_symmetrized.clone()];
    ok &= got.iter().zip(&exact).all(|(g, x)| within(g.value, *x));
    ok &= c.inside_margin() > got[0].error_bound + got[1].error_bound;
    ok &= c.outside_margin() > got[2].error_bound + got[3].error_bound;
    details.push(format!(
        "(1+|y|)^-2 on (0,2): {:.6} > {:.6}, outside {:.6} > {:.6}",
        got[0].value, got[1].value, got[2].value, got[3].value
    ));
    report(5, "radial comparison inequalities", ok, &details.join("; "));
}

#[test]
fn criterion_06_young_calculus() {
    let grid = log_grid(1e-6, 1e6, 50);
    let samples: Vec<f64> = (0..100).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 99.0)).collect();
    let mut rng = StdRng::seed_from_u64(6);
    let mut ok = true;
    let mut details = Vec::new();
    for y in YoungFunction::catalog() {
        let (pm, pp) = exponent_bounds(&y, &grid).unwrap();
        let exps = (pm - y.p_minus()).abs() <= 1e-2 && (pp - y.p_plus()).abs() <= 1e-2;
        let residual = samples
            .iter()
            .map(|&t| legendre_identity_residual(&y, t).unwrap() / (1.0 + t * y.density(t)))
            .fold(0.0, f64::max);
        let mut violations = 0;
        for _ in 0..1000 {
            let a = 10f64.powf(rng.gen_range(-3.0..3.0));
            let b = 10f64.powf(rng.gen_range(-3.0..3.0));
            let rhs = y.eval(a) + complementary(&y, b).unwrap();
            if a * b > rhs * (1.0 + 1e-9) {
                violations += 1;
            }
        }
        let d2 = delta2_constant(&y, &grid).unwrap();
        let d2_ok = d2 <= 2f64.powf(y.p_plus()) * (1.0 + 1e-9);
        ok &= exps && residual <= 1e-6 && violations == 0 && d2_ok;
        details.push(format!(
            "{y}: p-={pm:.4}/{:.4} p+={pp:.4}/{:.4} legendre {residual:.1e} young-violations {violations} delta2 {d2:.3}",
            y.p_minus(),
            y.p_plus()
        ));
    }
    report(6, "Young calculus", ok, &details.join("; "));
}

#[test]
fn criterion_07_beta_classifier() {
    let grid = log_grid(1e-8, 1e8, 4);
    let mut worst: f64 = 0.0;
    for (p, s) in [(2.0, 0.5), (2.0, 0.75), (3.0, 0.6)] {
        let y = YoungFunction::power(p).unwrap();
        for k in 0..=16 {
            let lambda = 10f64.powf(-4.0 + 0.5 * k as f64);
            let exact = lambda.powf(p - 1.0 / s);
            let b = beta(&y, s, lambda, &grid).unwrap().value;
            worst = worst.max(((b - exact) / exact).abs());
        }
    }
    let probe = LambdaProbe::default();
    let sq = square();
    let c1 = classify_theorem2_case(&sq, 0.5, 1, TheoremCase::Bounded, &probe, &grid).unwrap();
    let c2 = classify_theorem2_case(&sq, 0.75, 1, TheoremCase::Bounded, &probe, &grid).unwrap();
    let c3 = classify_theorem2_case(&sq, 0.8, 2, TheoremCase::Exterior, &probe, &grid).unwrap();
    let ok = worst <= 1e-8 && !c1 && c2 && c3;
    report(
        7,
        "beta classifier",
        ok,
        &format!(
            "homogeneity max rel err {worst:.2e}; (2,0.5,case 1)={c1}, (2,0.75,case 1)={c2}, (2,0.8,N=2,case 3)={c3}"
        ),
    );
}

fn random_grid(rng: &mut StdRng, dim: usize) -> GridFunction {
    let shape: Vec<usize> = (0..dim).map(|_| rng.gen_range(1..=64)).collect();
    let n: usize = shape.iter().product();
    let levels = rng.gen_range(1..6);
    let values: Vec<f64> =
        (0..n).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(1..=levels) as f64 * 0.25 }).collect();
    let lo: Vec<i64> = (0..dim).map(|_| rng.gen_range(-20..20)).collect();
    let anchor: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    GridFunction::new(Lattice::new(anchor, 0.1).unwrap(), lo, shape, values).unwrap()
}

fn positive_sorted(g: &GridFunction) -> Vec<f64> {
    let mut v: Vec<f64> = g.values().iter().copied().filter(|&x| x > 0.0).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn criterion_08_rearrangement() {
    let mut rng = StdRng::seed_from_u64(8);
    let mut failures = Vec::new();
    for trial in 0..1000 {
        let dim = 1 + trial % 2;
        let u = random_grid(&mut rng, dim);
        let r = schwarz_rearrange(&u).unwrap();
        if positive_sorted(&u) != positive_sorted(&r) {
            failures.push(format!("equimeasurability #{trial}"));
        }
        let rr = schwarz_rearrange(&r).unwrap();
        if rr.values() != r.values() || rr.lo() != r.lo() {
            failures.push(format!("idempotence #{trial}"));
        }
        let shift: Vec<i64> = (0..dim).map(|_| rng.gen_range(-50..50)).collect();
        let t = schwarz_rearrange(&u.translated_cells(&shift)).unwrap();
        if t.values() != r.values() || t.lo() != r.lo() {
            failures.push(format!("translation #{trial}"));
        }
    }
    for trial in 0..200 {
        let dim = 1 + trial % 2;
        let m: i64 = rng.gen_range(1..=(if dim == 1 { 31 } else { 15 }));
        let side = (2 * m + 1) as usize;
        let decay = rng.gen_range(0.01..1.0);
        let cutoff = rng.gen_range(0.0..(m * m) as f64 + 1.0);
        let mut values = Vec::with_capacity(side.pow(dim as u32));
        for lin in 0..side.pow(dim as u32) {
            let mut rem = lin;
            let mut r2 = 0i64;
            for _ in 0..dim {
                let k = (rem % side) as i64 - m;
                rem /= side;
                r2 += k * k;
            }
            let r2 = r2 as f64;
            values.push(if r2 <= cutoff { (-decay * r2).exp().max(0.0) } else { 0.0 });
        }
        let u = GridFunction::new(Lattice::new(vec![0.0; dim], 0.5).unwrap(), vec![-m; dim], vec![side; dim], values)
            .unwrap();
        let r = schwarz_rearrange(&u).unwrap();
        if r.values() != u.values() || r.lo() != u.lo() {
            failures.push(format!("fixed point #{trial}"));
        }
    }
    report(
        8,
        "discrete rearrangement",
        failures.is_empty(),
        &format!("1000 random grids + 200 radial grids, failures {:?}", &failures[..failures.len().min(5)]),
    );
}

#[test]
fn criterion_09_quadrature_convergence() {
    let unit = Domain::cube(vec![0.0], vec![1.0]).unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    let one = |_: &[f64], _: &[f64]| 1.0;
    let dist = |x: &[f64], y: &[f64]| (x[0] - y[0]).abs();
    let inv_sqrt = |x: &[f64], y: &[f64]| (x[0] - y[0]).abs().powf(-0.5);
    type Pair<'a> = &'a (dyn Fn(&[f64], &[f64]) -> f64 + Sync);
    let examples: [(&str, Pair, f64); 3] =
        [("1", &one, 1.0), ("|x-y|", &dist, 1.0 / 3.0), ("|x-y|^-1/2", &inv_sqrt, 8.0 / 3.0)];
    for (name, f, exact) in examples {
        for levels in 2..=4 {
            let spec = CubatureSpec { base_resolution: 8, refinement_levels: levels, ..Default::default() };
            let e = double_integral(f, &unit, &unit, &spec).unwrap();
            let hit = e.contains(exact);
            ok &= hit;
            details.push(format!(
                "{name} L={levels}: {:.6} ± {:.1e}{}",
                e.value,
                e.error_bound,
                if hit { "" } else { " MISS" }
            ));
        }
    }
    let y = square();
    let k = KernelSpec::fractional(0.5, 1).unwrap();
    let d = Domain::cube(vec![-1.0], vec![1.0]).unwrap();
    let spec = CubatureSpec { truncation_radius: Some(4.0), ..Default::default() };
    let a = exterior_tail_integral(&[0.0], &y, &k, 1.0, &d, 0.01, &spec).unwrap();
    let r = a.metadata.truncation_radius.unwrap();
    let b = exterior_tail_integral(
        &[0.0],
        &y,
        &k,
        1.0,
        &d,
        0.01,
        &CubatureSpec { truncation_radius: Some(2.0 * r), ..spec },
    )
    .unwrap();
    let moved = (b.value - a.value).abs();
    ok &= moved < a.metadata.tail_bound && a.contains(2.0);
    details.push(format!("tail: R_t {r} -> {}, moved {moved:.2e} < bound {:.2e}", 2.0 * r, a.metadata.tail_bound));
    report(9, "quadrature convergence", ok, &details.join("; "));
}

#[test]
fn criterion_10_comparison_constant_stability() {
    let unit = Domain::cube(vec![0.0], vec![1.0]).unwrap();
    let y = square();
    let shapes: Vec<PointFn> = vec![
        Arc::new(|x: &[f64]| (1.0 - (2.0 * x[0] - 1.0).abs()).max(0.0)),
        Arc::new(|x: &[f64]| (1.0 - 4.0 * (x[0] - 0.3).abs()).max(0.0)),
        Arc::new(|x: &[f64]| (std::f64::consts::PI * x[0]).sin().powi(2)),
        Arc::new(|x: &[f64]| (x[0] * (1.0 - x[0])).max(0.0)),
        Arc::new(|x: &[f64]| (1.0 - 8.0 * (x[0] - 0.25).abs()).max(0.0) + (1.0 - 8.0 * (x[0] - 0.7).abs()).max(0.0)),
    ];
    let max_rho = |cells: usize| {
        let corpus: Vec<Ladder> =
            shapes.iter().map(|f| sample_on_domain(&unit, cells, 2, f.clone()).unwrap()).collect();
        let spec = CubatureSpec { base_resolution: cells, refinement_levels: 2, ..Default::default() };
        let r = verify_comparison(&unit, &y, 0.75, TheoremCase::Bounded, &corpus, &spec).unwrap();
        (r.all_finite(), r.empirical_lower_bound())
    };
    let (finite_a, coarse) = max_rho(64);
    let (finite_b, fine) = max_rho(128);
    let change = (fine / coarse - 1.0).abs();
    let ok = finite_a && finite_b && change <= 0.25;
    report(
        10,
        "comparison ratio stability",
        ok,
        &format!("max rho {coarse:.6} at 64 cells, {fine:.6} at 128 cells, change {:.1}%", 100.0 * change),
    );
}
