//! Acceptance suite. Runs every criterion at its stated tolerance, prints
//! one PASS/FAIL line per criterion and exits nonzero if any failed.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tunefft::cache::{recurrence_q2, recurrence_qo, scaling_report, CacheRow, IdealCache, Policy, Strategy};
use tunefft::oracle::{naive_dft_reference, rel_l2_error, tolerance};
use tunefft::plan::{sub, PlanOptions};
use tunefft::selftest::{random_vector, self_test, Check};
use tunefft::twiddle::{max_error, recurrence_improved, recurrence_naive};
use tunefft::{DftProblem, Mode, Plan, Planner, PlannerConfig, Recipe, Sign, TwiddleKind};
use tunefft_cli::{accuracy_row, textbook_fft};
use tunefft_codelet::{
    create_dag, extract_matrix, op_count, parse_dag_json, schedule, simplify, unparse, Algorithm, CodeletSpec, Op,
    OpCount, Target,
};

type C64 = Complex64;
type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle_sizes() -> Vec<usize> {
    let mut v: Vec<usize> = (1..=64).collect();
    v.extend([97, 101, 127, 96, 100, 120, 128, 210, 1000, 3600, 3840, 4096]);
    v.extend((10..=16).map(|k| 1usize << k));
    v.sort();
    v.dedup();
    v
}

fn oracle_equivalence() -> Outcome {
    let mut planner = Planner::new(PlannerConfig::default());
    let mut worst = (0.0f64, 0usize);
    let sizes = oracle_sizes();
    for &n in &sizes {
        let plan = planner.plan(&DftProblem::dft_1d(n, Sign::Forward, false)).map_err(|e| format!("n={n}: {e}"))?;
        let x = random_vector(&mut rng(n as u64), n);
        let y = plan.run(&x, false).map_err(|e| e.to_string())?;
        let e = rel_l2_error(&y, &naive_dft_reference(&x, Sign::Forward));
        ensure(e <= tolerance(n), || format!("n={n} error {e:.3e} > {:.3e} with {}", tolerance(n), plan.sexpr()))?;
        if e / tolerance(n) > worst.0 {
            worst = (e / tolerance(n), n);
        }
    }
    Ok(format!("{} sizes, worst error/tolerance {:.2e} at n={}", sizes.len(), worst.0, worst.1))
}

fn self_tests() -> Outcome {
    let mut planner = Planner::new(PlannerConfig::default());
    let mut notes = Vec::new();
    for n in [16usize, 27, 97, 210] {
        let plan = planner.plan(&DftProblem::dft_1d(n, Sign::Forward, false)).map_err(|e| e.to_string())?;
        let r = self_test(|x| plan.run(x, false).unwrap(), n, Sign::Forward, 100, n as u64);
        ensure(r.passed(), || format!("n={n}: {} failures, max residuals {:?}", r.failures.len(), r.max_residual))?;
        notes.push(format!("n={n} max {:.1e}", r.max_residual.iter().cloned().fold(0.0, f64::max)));
    }
    let plan = planner.plan(&DftProblem::dft_1d(16, Sign::Forward, false)).map_err(|e| e.to_string())?;
    let faulty = |x: &[C64]| {
        let mut y = plan.run(x, false).unwrap();
        y[3] = -y[3];
        y
    };
    let r = self_test(faulty, 16, Sign::Forward, 100, 1);
    ensure(!r.passed(), || "negated output 3 went undetected".into())?;
    let by_impulse = r.failures.iter().any(|f| f.1 == Check::Impulse);
    Ok(format!("100 trials each passed ({}); fault detected (impulse check: {by_impulse})", notes.join(", ")))
}

fn codelet_op_counts() -> Outcome {
    let simplified = |n: usize, alg: Algorithm| op_count(&simplify(&create_dag(&CodeletSpec::notw(n, alg)).unwrap()));
    let c2 = simplified(2, Algorithm::Ct);
    ensure(c2 == OpCount { adds: 4, mults: 0 }, || format!("n=2: {c2:?}"))?;
    let c4 = simplified(4, Algorithm::Ct);
    ensure(c4 == OpCount { adds: 16, mults: 0 }, || format!("n=4: {c4:?}"))?;
    for (n, lg) in [(8usize, 3usize), (16, 4), (32, 5)] {
        let raw = op_count(&create_dag(&CodeletSpec::notw(n, Algorithm::Ct)).unwrap()).total();
        ensure(raw == 5 * n * lg, || format!("unsimplified n={n}: {raw} ops, expected {}", 5 * n * lg))?;
    }
    // split-radix count 4n lg n − 6n + 8 at n = 64
    let bound = 4 * 64 * 6 - 6 * 64 + 8;
    let sr = simplified(64, Algorithm::SplitRadix).total();
    ensure((1000..=bound).contains(&sr), || format!("split-radix 64: {sr} ops outside [1000, {bound}]"))?;
    Ok(format!("n=2 {c2:?}, n=4 {c4:?}, raw 8/16/32 = 5n lg n, split-radix 64 = {sr} ops"))
}

fn dft_matrix(n: usize) -> Vec<Vec<C64>> {
    (0..n)
        .map(|k| (0..n).map(|l| C64::from_polar(1.0, -2.0 * std::f64::consts::PI * ((l * k % n) as f64) / n as f64)).collect())
        .collect()
}

fn generator_semantics() -> Outcome {
    let mut checked = 0;
    let mut worst = 0.0f64;
    for n in (1..=16).chain([32, 64]) {
        let want = dft_matrix(n);
        for alg in Algorithm::ALL {
            let Ok(raw) = create_dag(&CodeletSpec::notw(n, alg)) else { continue };
            let simple = simplify(&raw);
            let order = schedule(&simple).map_err(|e| e.to_string())?;
            let scheduled = simple.reordered(order.as_slice());
            let json = unparse(&order, &simple, Target::DagJson).map_err(|e| e.to_string())?;
            let reparsed = parse_dag_json(&json).map_err(|e| e.to_string())?;
            for (stage, dag) in [("created", &raw), ("simplified", &simple), ("scheduled", &scheduled), ("unparsed", &reparsed)] {
                let m = extract_matrix(dag);
                let err = m
                    .iter()
                    .zip(&want)
                    .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
                    .fold(0.0, f64::max);
                ensure(err <= 1e-13, || format!("n={n} {alg} {stage}: entry error {err:.2e}"))?;
                worst = worst.max(err);
            }
            let negative = simple.nodes().iter().filter(|op| matches!(op, Op::MulConst(_, c) if *c <= 0.0)).count();
            ensure(negative == 0, || format!("n={n} {alg}: {negative} non-positive constants"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} size/algorithm pairs through 4 stages, worst entry error {worst:.1e}, no negative constants"))
}

fn cache_model() -> Outcome {
    let start = Instant::now();
    let q2 = recurrence_q2(8, 2).map_err(|e| e.to_string())?;
    let qo = recurrence_qo(16, 4).map_err(|e| e.to_string())?;
    ensure(q2 == 24 && qo == 48, || format!("Q2(8;2)={q2}, Qo(16;4)={qo}"))?;
    for n in [1usize, 2, 8, 64] {
        ensure(recurrence_q2(n, 64) == Ok(n as u64) && recurrence_qo(n, 64) == Ok(n as u64), || format!("Q({n}) with n <= Z"))?;
    }
    let cache = IdealCache::new(64, 1, Policy::OptimalOffline).map_err(|e| e.to_string())?;
    let q = |s: Strategy| CacheRow::run(s, 4096, cache).map(|r| r.misses as f64).map_err(|e| e.to_string());
    let (bf, df, fs) = (q(Strategy::BreadthFirst)?, q(Strategy::DepthFirst)?, q(Strategy::FourStep)?);
    ensure(bf >= 1.5 * df && df >= 1.5 * fs, || format!("Q(bf)={bf} Q(df)={df} Q(4step)={fs}"))?;
    let range: Vec<usize> = (10..=16).map(|k| 1 << k).collect();
    let mut spreads = Vec::new();
    for (s, sizes, col) in [
        (Strategy::BreadthFirst, range.clone(), 0),
        (Strategy::DepthFirst, range.clone(), 1),
        (Strategy::FourStep, vec![1 << 8, 1 << 12, 1 << 16], 2),
    ] {
        let rows = scaling_report(s, &sizes, cache).map_err(|e| e.to_string())?;
        let v: Vec<f64> = rows.iter().map(|r| r.ratios()[col]).collect();
        let spread = v.iter().cloned().fold(f64::MIN, f64::max) / v.iter().cloned().fold(f64::MAX, f64::min);
        ensure(spread < 2.0, || format!("{s} scaling ratio varies {spread:.2}x: {v:?}"))?;
        spreads.push(format!("{s} {spread:.2}x"));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("Q(bf)={bf} Q(df)={df} Q(4step)={fs}; scaling spreads {}; {secs:.1}s", spreads.join(", ")))
}

fn accuracy_growth() -> Outcome {
    let start = Instant::now();
    let err = |w: Vec<C64>, n: usize| max_error(&w, n);
    let naive = err(recurrence_naive(1 << 14), 1 << 14) / err(recurrence_naive(1 << 7), 1 << 7);
    ensure(naive >= 32.0, || format!("rec-naive ratio {naive:.1} < 32"))?;
    let improved = err(recurrence_improved(1 << 14), 1 << 14) / err(recurrence_improved(1 << 7), 1 << 7);
    ensure((3.0..=64.0).contains(&improved), || format!("rec-improved ratio {improved:.1} outside [3, 64]"))?;
    let small = accuracy_row(1 << 6, TwiddleKind::FullTable, 64, 6)?;
    let large = accuracy_row(1 << 18, TwiddleKind::FullTable, 4, 18)?;
    let fft = large.fft_error / small.fft_error;
    ensure(fft <= 3.0, || format!("FFT RMS error ratio {fft:.2} > 3 ({:.2e} vs {:.2e})", large.fft_error, small.fft_error))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {secs:.1}s"))?;
    Ok(format!("rec-naive {naive:.0}x, rec-improved {improved:.1}x, full-table FFT error 2^18/2^6 = {fft:.2}; {secs:.1}s"))
}

/// Minimum over interleaved rounds of the mean time per apply within
/// `window`, for each plan. Alternating the plans spreads host noise
/// evenly over both.
fn paired_times(plans: &[&dyn Fn()], rounds: usize, window: Duration) -> Vec<f64> {
    let mut best = vec![f64::INFINITY; plans.len()];
    for f in plans {
        f();
    }
    for _ in 0..rounds {
        for (i, f) in plans.iter().enumerate() {
            let start = Instant::now();
            let mut iters = 0u32;
            while start.elapsed() < window {
                f();
                iters += 1;
            }
            best[i] = best[i].min(start.elapsed().as_secs_f64() / iters as f64);
        }
    }
    best
}

fn runner(plan: &Plan) -> impl Fn() + '_ {
    let n = plan.problem.sz.dims[0].n;
    let x = random_vector(&mut rng(7), n);
    let out = std::cell::RefCell::new(vec![C64::new(0.0, 0.0); n]);
    move || plan.apply(&x, &mut out.borrow_mut()).unwrap()
}

fn planner_behavior() -> Outcome {
    let sizes: Vec<usize> = (10..=16).map(|k| 1usize << k).chain([3600]).collect();
    let mut est = Planner::new(PlannerConfig::default());
    for &n in &sizes {
        est.plan(&DftProblem::dft_1d(n, Sign::Forward, false)).map_err(|e| e.to_string())?;
    }
    ensure(est.measurements() == 0, || format!("estimate mode timed {} plans", est.measurements()))?;
    let hits = est.memo_hits();
    est.plan(&DftProblem::dft_1d(1024, Sign::Forward, false)).map_err(|e| e.to_string())?;
    ensure(est.memo_hits() > hits && hits > 0, || "no memo hit".into())?;

    let mut meas = Planner::new(PlannerConfig::new(Mode::Measure));
    let t0 = Instant::now();
    let mut wins = 0;
    let mut report = Vec::new();
    for &n in &sizes {
        let p = DftProblem::dft_1d(n, Sign::Forward, false);
        let pm = meas.plan(&p).map_err(|e| e.to_string())?;
        let pe = est.plan(&p).map_err(|e| e.to_string())?;
        let t = paired_times(&[&runner(&pm), &runner(&pe)], 15, Duration::from_millis(4));
        let ratio = t[0] / t[1];
        if ratio <= 1.25 {
            wins += 1;
        }
        report.push(format!("{n}:{ratio:.2}"));
    }
    let planning = t0.elapsed().as_secs_f64();
    let timed = meas.measurements();
    ensure(timed > 0, || "measure mode timed nothing".into())?;

    let text = meas.export_wisdom();
    let mut again = Planner::new(PlannerConfig::new(Mode::Measure));
    again.import_wisdom(&text).map_err(|e| e.to_string())?;
    ensure(again.export_wisdom() == text, || "wisdom export/import/export differs".into())?;
    for &n in &sizes {
        let p = DftProblem::dft_1d(n, Sign::Forward, false);
        let a = again.plan(&p).map_err(|e| e.to_string())?.sexpr();
        let b = meas.plan(&p).map_err(|e| e.to_string())?.sexpr();
        ensure(a == b, || format!("n={n}: imported plan {a} differs from {b}"))?;
    }
    ensure(again.measurements() == 0, || format!("imported wisdom still timed {} plans", again.measurements()))?;
    let need = (sizes.len() * 4).div_ceil(5);
    ensure(wins >= need, || format!("measured plan within 1.25x of estimate plan on {wins}/{} sizes (need {need}): {}", sizes.len(), report.join(" ")))?;
    Ok(format!(
        "0 timings in estimate mode, memo hits {hits}, wisdom round-trips ({} lines), measure/estimate time {} ({wins}/{} within 1.25x; planning {planning:.1}s, {timed} timings)",
        text.lines().count(),
        report.join(" "),
        sizes.len()
    ))
}

fn inplace_composite() -> Outcome {
    let mut planner = Planner::new(PlannerConfig::default());
    let mut notes = Vec::new();
    for (n, p) in [(16usize, 2usize), (64, 4)] {
        let prob = DftProblem::dft_1d(n, Sign::Forward, true);
        let norm = prob.normalize().map_err(|e| e.to_string())?;
        let child_problem = sub::indirect_c2(&sub::dif_c2(&sub::dit_c1(&norm, p), p).normalize().map_err(|e| e.to_string())?);
        let child = planner.recipe(&child_problem).map_err(|e| e.to_string())?;
        let recipe = Arc::new(Recipe::Inplace { p, q: p, m: n / (p * p), child });
        let plan = Plan::new(recipe, &prob, &PlanOptions::default()).map_err(|e| e.to_string())?;
        let x = random_vector(&mut rng(n as u64 + 1), n);
        let y = plan.run(&x, false).map_err(|e| e.to_string())?;
        let e = rel_l2_error(&y, &naive_dft_reference(&x, Sign::Forward));
        ensure(e <= tolerance(n), || format!("n={n}: error {e:.2e}"))?;
        let (z, violations) = plan.apply_logged(x, 0).map_err(|e| e.to_string())?;
        ensure(violations.is_empty(), || format!("n={n}: {violations:?}"))?;
        ensure(z == y, || format!("n={n}: logged run differs"))?;
        notes.push(format!("n={n} {} error {e:.1e} scratch {}", plan.sexpr(), plan.scratch_len()));
    }
    Ok(format!("{}; write log clean", notes.join("; ")))
}

fn benchmark() -> Outcome {
    let n = 1 << 16;
    let p = DftProblem::dft_1d(n, Sign::Forward, false);
    let planned = Planner::new(PlannerConfig::default()).plan(&p).map_err(|e| e.to_string())?;
    let measured = Planner::new(PlannerConfig::new(Mode::Measure)).plan(&p).map_err(|e| e.to_string())?;
    let x = random_vector(&mut rng(16), n);
    let want = tunefft::oracle::reference_fft_dd(&x, Sign::Forward);
    for (what, y) in [("planned", planned.run(&x, false).map_err(|e| e.to_string())?), ("textbook", textbook_fft(&x, Sign::Forward)?)] {
        let e = rel_l2_error(&y, &want);
        ensure(e <= tolerance(n), || format!("{what} FFT wrong before timing: {e:.2e}"))?;
    }
    let textbook = || {
        std::hint::black_box(textbook_fft(&x, Sign::Forward).unwrap());
    };
    let t = paired_times(&[&runner(&planned), &runner(&measured), &textbook], 9, Duration::from_millis(20));
    let speedup = t[2] / t[0];
    let penalty = t[0] / t[1];
    ensure(speedup >= 1.0, || format!("planned {:.3e}s vs textbook {:.3e}s: {speedup:.2}x", t[0], t[2]))?;
    Ok(format!(
        "n=2^16 estimate plan {:.3e}s, measure plan {:.3e}s, textbook {:.3e}s: speedup {speedup:.2}x; estimate/measure time {penalty:.2} (reported)",
        t[0], t[1], t[2]
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("self-test", self_tests),
        ("codelet op counts", codelet_op_counts),
        ("generator semantics", generator_semantics),
        ("cache model", cache_model),
        ("accuracy growth", accuracy_growth),
        ("planner behavior", planner_behavior),
        ("in-place composite", inplace_composite),
        ("benchmark", benchmark),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS [{secs:.1}s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL [{secs:.1}s] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
