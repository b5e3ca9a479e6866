//! Experiment harness behind the `tunefft` binary: file transforms,
//! benchmarks against a textbook radix-2 FFT, twiddle-accuracy runs,
//! cache simulations, codelet emission and self-tests.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tunefft::cache::{CacheRow, IdealCache, Policy, Strategy, CSV_HEADER};
use tunefft::oracle::{naive_dft, reference_fft_dd, rel_l2_error, tolerance};
use tunefft::plan::PlanOptions;
use tunefft::selftest::{random_vector, self_test, SelfTestReport};
use tunefft::twiddle::provider_max_error;
use tunefft::{DftProblem, Mode, Plan, Planner, PlannerConfig, Sign, TwiddleKind, TwiddleProvider};
use tunefft_codelet::schedule::{breadth_order, max_live};
use tunefft_codelet::{create_dag, op_count, schedule, simplify, unparse, Algorithm, CodeletKind, CodeletSpec, Target};

pub type C64 = Complex64;
pub type CliResult<T> = Result<T, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Index `i` with its low `bits` bits reversed.
pub fn bit_reverse(i: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - bits)
    }
}

/// The usual textbook FFT: a bit-reversal pass, then `lg n` breadth-first
/// passes of radix-2 butterflies with twiddles from a sine/cosine
/// recurrence per pass.
pub fn textbook_fft(x: &[C64], sign: Sign) -> CliResult<Vec<C64>> {
    let n = x.len();
    if !n.is_power_of_two() {
        return Err(format!("textbook FFT needs a power of two, got {n}"));
    }
    let bits = n.trailing_zeros();
    let mut a = vec![C64::new(0.0, 0.0); n];
    for (i, v) in x.iter().enumerate() {
        a[bit_reverse(i, bits)] = *v;
    }
    let mut len = 2;
    while len <= n {
        let theta = sign.value() as f64 * 2.0 * std::f64::consts::PI / len as f64;
        let half = (0.5 * theta).sin();
        let wp = C64::new(-2.0 * half * half, theta.sin());
        let mut w = C64::new(1.0, 0.0);
        for j in 0..len / 2 {
            for start in (0..n).step_by(len) {
                let t = w * a[start + j + len / 2];
                let u = a[start + j];
                a[start + j] = u + t;
                a[start + j + len / 2] = u - t;
            }
            w += w * wp;
        }
        len *= 2;
    }
    Ok(a)
}

pub fn read_samples(path: &Path) -> CliResult<Vec<C64>> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    decode_samples(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

/// Little-endian f64 pairs (re, im).
pub fn decode_samples(bytes: &[u8]) -> CliResult<Vec<C64>> {
    if bytes.len() % 16 != 0 {
        return Err(format!("length {} is not a whole number of complex samples", bytes.len()));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            C64::new(re, im)
        })
        .collect())
}

pub fn encode_samples(x: &[C64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 * x.len());
    for v in x {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn write_samples(path: &Path, x: &[C64]) -> CliResult<()> {
    fs::write(path, encode_samples(x)).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    if let Some(p) = path {
        fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    Ok(())
}

pub fn parse_sizes(s: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad size `{t}`")))
        .collect()
}

/// Median over `reps` of the mean time per call, each mean taken over
/// the fewest calls that fill `window`. One warm-up call is discarded.
pub fn median_time(mut f: impl FnMut(), window: Duration, reps: usize) -> f64 {
    f();
    let mut iters = 1usize;
    loop {
        let start = Instant::now();
        for _ in 0..iters {
            f();
        }
        let t = start.elapsed();
        if t >= window || iters >= 1 << 30 {
            break;
        }
        iters *= 2;
    }
    let mut samples: Vec<f64> = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            for _ in 0..iters {
                f();
            }
            start.elapsed().as_secs_f64() / iters as f64
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    samples[samples.len() / 2]
}

pub struct TransformArgs<'a> {
    pub n: usize,
    pub inverse: bool,
    pub mode: Mode,
    pub wisdom: Option<&'a Path>,
    pub input: &'a Path,
    pub output: &'a Path,
}

/// Transforms the samples of `input` and writes them to `output`. An
/// existing wisdom file is loaded first and rewritten afterwards.
pub fn cmd_transform(a: &TransformArgs) -> CliResult<String> {
    let x = read_samples(a.input)?;
    if x.len() != a.n {
        return Err(format!("{} holds {} samples, expected {}", a.input.display(), x.len(), a.n));
    }
    let mut planner = Planner::new(PlannerConfig::new(a.mode));
    if let Some(w) = a.wisdom {
        if w.exists() {
            let text = fs::read_to_string(w).map_err(|e| format!("{}: {e}", w.display()))?;
            planner.import_wisdom(&text).map_err(|e| format!("{}: {e}", w.display()))?;
        }
    }
    let sign = if a.inverse { Sign::Backward } else { Sign::Forward };
    let plan = planner.plan(&DftProblem::dft_1d(a.n, sign, false)).map_err(|e| e.to_string())?;
    let y = plan.run(&x, false).map_err(|e| e.to_string())?;
    write_samples(a.output, &y)?;
    if let Some(w) = a.wisdom {
        write_text(Some(w), &planner.export_wisdom())?;
    }
    Ok(format!("n={} plan={}\n", a.n, plan.sexpr()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub n: usize,
    pub mode: Mode,
    pub plan: String,
    pub seconds: f64,
    pub speed: f64,
    pub baseline_seconds: Option<f64>,
    /// `baseline_seconds / seconds`.
    pub ratio: Option<f64>,
}

pub const BENCH_HEADER: &str = "n,mode,plan,seconds,speed,baseline_seconds,ratio";

pub fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Measure => "measure",
        Mode::Estimate => "estimate",
        Mode::WisdomOnly => "wisdom-only",
    }
}

impl BenchRecord {
    pub fn csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|v| format!("{v:.6e}")).unwrap_or_default();
        format!(
            "{},{},\"{}\",{:.6e},{:.6e},{},{}",
            self.n,
            mode_name(self.mode),
            self.plan,
            self.seconds,
            self.speed,
            opt(self.baseline_seconds),
            self.ratio.map(|r| format!("{r:.4}")).unwrap_or_default()
        )
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub window: Duration,
    pub reps: usize,
    pub seed: u64,
    pub baseline: bool,
}

impl Default for BenchConfig {
    fn default() -> BenchConfig {
        BenchConfig {
            window: Duration::from_millis(20),
            reps: 5,
            seed: 0,
            baseline: true,
        }
    }
}

fn check_against(y: &[C64], x: &[C64], what: &str) -> CliResult<()> {
    let n = x.len();
    let want = if n.is_power_of_two() && n > 1024 {
        reference_fft_dd(x, Sign::Forward)
    } else {
        naive_dft(x, Sign::Forward)
    };
    let e = rel_l2_error(y, &want);
    if e <= tolerance(n) {
        Ok(())
    } else {
        Err(format!("{what} is wrong at n={n}: relative error {e:.3e}"))
    }
}

/// Times the planned forward transform of size `n`, and the textbook
/// baseline for powers of two. Both are checked against the oracle
/// before any timing.
pub fn bench_size(planner: &mut Planner, n: usize, cfg: &BenchConfig) -> CliResult<BenchRecord> {
    let problem = DftProblem::dft_1d(n, Sign::Forward, false);
    let plan = planner.plan(&problem).map_err(|e| e.to_string())?;
    let x = random_vector(&mut rng(cfg.seed ^ n as u64), n);
    check_against(&plan.run(&x, false).map_err(|e| e.to_string())?, &x, "planned FFT")?;
    let mut out = vec![C64::new(0.0, 0.0); n];
    let seconds = median_time(|| plan.apply(&x, &mut out).unwrap(), cfg.window, cfg.reps);
    let baseline_seconds = if cfg.baseline && n.is_power_of_two() {
        check_against(&textbook_fft(&x, Sign::Forward)?, &x, "textbook FFT")?;
        Some(median_time(
            || {
                std::hint::black_box(textbook_fft(&x, Sign::Forward).unwrap());
            },
            cfg.window,
            cfg.reps,
        ))
    } else {
        None
    };
    Ok(BenchRecord {
        n,
        mode: planner.config.mode,
        plan: plan.sexpr(),
        seconds,
        speed: 1.0 / seconds,
        baseline_seconds,
        ratio: baseline_seconds.map(|b| b / seconds),
    })
}

pub const DEFAULT_BENCH_SIZES: [usize; 6] = [1024, 3600, 3840, 4096, 16384, 65536];

pub fn cmd_bench(sizes: &[usize], modes: &[Mode], cfg: &BenchConfig, csv: Option<&Path>) -> CliResult<String> {
    let mut text = format!("{BENCH_HEADER}\n");
    for &mode in modes {
        let mut planner = Planner::new(PlannerConfig {
            seed: cfg.seed,
            ..PlannerConfig::new(mode)
        });
        for &n in sizes {
            let r = bench_size(&mut planner, n, cfg)?;
            let _ = writeln!(text, "{}", r.csv());
        }
    }
    write_text(csv, &text)?;
    Ok(text)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AccuracyRow {
    pub n: usize,
    pub twiddle: TwiddleKind,
    /// Relative RMS error of the planned forward FFT over the trials.
    pub fft_error: f64,
    pub twiddle_error: f64,
}

pub const ACCURACY_HEADER: &str = "n,twiddle,fft_rel_rms_error,twiddle_max_error";

impl AccuracyRow {
    pub fn csv(&self) -> String {
        format!("{},{},{:.6e},{:.6e}", self.n, self.twiddle.name(), self.fft_error, self.twiddle_error)
    }
}

/// FFT error of an estimate-mode plan using `twiddle` tables, measured on
/// `trials` random inputs against the double-double FFT, with the
/// provider's own worst-case error at size `n`.
pub fn accuracy_row(n: usize, twiddle: TwiddleKind, trials: usize, seed: u64) -> CliResult<AccuracyRow> {
    if !n.is_power_of_two() {
        return Err(format!("accuracy sizes must be powers of two, got {n}"));
    }
    let mut planner = Planner::new(PlannerConfig {
        options: PlanOptions { twiddle },
        ..PlannerConfig::default()
    });
    let plan = planner.plan(&DftProblem::dft_1d(n, Sign::Forward, false)).map_err(|e| e.to_string())?;
    let mut r = rng(seed ^ (n as u64).rotate_left(17));
    let mut sum = 0.0;
    for _ in 0..trials.max(1) {
        let x = random_vector(&mut r, n);
        let e = rel_l2_error(&plan.run(&x, false).map_err(|e| e.to_string())?, &reference_fft_dd(&x, Sign::Forward));
        sum += e * e;
    }
    Ok(AccuracyRow {
        n,
        twiddle,
        fft_error: (sum / trials.max(1) as f64).sqrt(),
        twiddle_error: provider_max_error(&TwiddleProvider::new(twiddle, n)),
    })
}

pub fn cmd_accuracy(sizes: &[usize], twiddle: TwiddleKind, trials: usize, seed: u64, csv: Option<&Path>) -> CliResult<String> {
    let mut text = format!("{ACCURACY_HEADER}\n");
    for &n in sizes {
        let _ = writeln!(text, "{}", accuracy_row(n, twiddle, trials, seed)?.csv());
    }
    write_text(csv, &text)?;
    Ok(text)
}

pub fn cmd_cachesim(strategy: Strategy, n: usize, z: usize, l: usize, policy: Policy, csv: Option<&Path>) -> CliResult<String> {
    let cache = IdealCache::new(z, l, policy).map_err(|e| e.to_string())?;
    let row = CacheRow::run(strategy, n, cache).map_err(|e| e.to_string())?;
    let text = format!("{CSV_HEADER}\n{}\n", row.csv());
    write_text(csv, &text)?;
    Ok(text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Emit {
    Source,
    DagJson,
    Stats,
}

impl std::str::FromStr for Emit {
    type Err = String;
    fn from_str(s: &str) -> Result<Emit, String> {
        match s {
            "source" => Ok(Emit::Source),
            "dag-json" => Ok(Emit::DagJson),
            "stats" => Ok(Emit::Stats),
            _ => Err(format!("unknown emit target `{s}` (source|dag-json|stats)")),
        }
    }
}

pub fn cmd_codelet(n: usize, alg: Algorithm, kind: CodeletKind, emit: Emit) -> CliResult<String> {
    let spec = CodeletSpec::notw(n, alg).with_kind(kind);
    let raw = create_dag(&spec).map_err(|e| e.to_string())?;
    let dag = simplify(&raw);
    let order = schedule(&dag).map_err(|e| e.to_string())?;
    match emit {
        Emit::Source => unparse(&order, &dag, Target::NeutralSource).map_err(|e| e.to_string()),
        Emit::DagJson => unparse(&order, &dag, Target::DagJson).map_err(|e| e.to_string()),
        Emit::Stats => {
            let (before, after) = (op_count(&raw), op_count(&dag));
            Ok(format!(
                "n,alg,kind,raw_adds,raw_mults,adds,mults,total,max_live,breadth_max_live\n{n},{alg},{},{},{},{},{},{},{},{}\n",
                kind.name(),
                before.adds,
                before.mults,
                after.adds,
                after.mults,
                after.total(),
                max_live(&dag, &order),
                max_live(&dag, &breadth_order(&dag))
            ))
        }
    }
}

pub fn selftest_plan(n: usize, trials: usize, seed: u64) -> CliResult<(Plan, SelfTestReport)> {
    let mut planner = Planner::new(PlannerConfig::default());
    let plan = planner.plan(&DftProblem::dft_1d(n, Sign::Forward, false)).map_err(|e| e.to_string())?;
    let report = self_test(|x| plan.run(x, false).expect("planned size"), n, Sign::Forward, trials, seed);
    Ok((plan, report))
}

/// Fails when any check exceeds the threshold.
pub fn cmd_selftest(n: usize, trials: usize, seed: u64) -> CliResult<String> {
    let (plan, r) = selftest_plan(n, trials, seed)?;
    let text = format!(
        "n={n} trials={trials} plan={} threshold={:.3e} linearity={:.3e} impulse={:.3e} shift={:.3e} failures={}\n",
        plan.sexpr(),
        r.threshold,
        r.max_residual[0],
        r.max_residual[1],
        r.max_residual[2],
        r.failures.len()
    );
    if r.passed() {
        Ok(text)
    } else {
        Err(format!("self-test failed: {text}"))
    }
}
