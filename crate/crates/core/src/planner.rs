//! Dynamic-programming search over the plan space.
//!
//! For a problem the planner enumerates every applicable step, solves the
//! resulting subproblems recursively (memoized by normalized signature),
//! scores each complete candidate and keeps the best. Scores are measured
//! run times or, in estimate mode, [`Plan::cost`]. Ties go to the lower
//! estimate, then to the lexicographically smaller s-expression.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::codelets;
use crate::plan::{bluestein_length, is_prime, sub, Plan, PlanOptions, Recipe};
use crate::problem::DftProblem;
use crate::selftest::random_vector;
use crate::Error;

type C64 = Complex64;

/// Most radices tried per Cooley-Tukey node.
pub const MAX_RADICES: usize = 8;
/// Deepest recursion the search follows.
pub const MAX_DEPTH: usize = 64;
/// Largest size the O(n²) plan is offered for when others apply.
pub const GENERIC_MAX: usize = 128;
/// Prime factors above this go through Bluestein rather than Rader.
pub const RADER_MAX_FACTOR: usize = 64;
/// Most candidates measure mode times per problem.
pub const MEASURE_TOP: usize = 3;
/// Measure mode skips candidates estimated above this multiple of the cheapest.
pub const MEASURE_SLACK: f64 = 3.0;
/// Measure mode ranks problems estimated below this cost by the estimate.
pub const MEASURE_MIN_COST: f64 = 10000.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Measure,
    Estimate,
    WisdomOnly,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "measure" => Ok(Mode::Measure),
            "estimate" => Ok(Mode::Estimate),
            "wisdom-only" => Ok(Mode::WisdomOnly),
            _ => Err(format!("unknown mode `{s}` (measure|estimate|wisdom-only)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlannerConfig {
    pub mode: Mode,
    pub repetitions: usize,
    pub window: Duration,
    pub seed: u64,
    pub options: PlanOptions,
}

impl Default for PlannerConfig {
    fn default() -> PlannerConfig {
        PlannerConfig {
            mode: Mode::Estimate,
            repetitions: 5,
            window: Duration::from_millis(1),
            seed: 0,
            options: PlanOptions::default(),
        }
    }
}

impl PlannerConfig {
    pub fn new(mode: Mode) -> PlannerConfig {
        PlannerConfig {
            mode,
            ..PlannerConfig::default()
        }
    }
}

#[derive(Clone, Debug)]
struct Entry {
    recipe: Arc<Recipe>,
    score: f64,
}

pub struct Planner {
    pub config: PlannerConfig,
    memo: BTreeMap<String, Entry>,
    in_progress: HashSet<String>,
    measurements: usize,
    memo_hits: usize,
    rng: ChaCha8Rng,
}

fn largest_prime_factor(mut n: usize) -> usize {
    let mut best = 1;
    let mut d = 2;
    while d * d <= n {
        while n % d == 0 {
            best = d;
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        best = best.max(n);
    }
    best
}

/// Cooley-Tukey radices tried for size `n`: divisors with a codelet, the
/// divisor nearest `√n` for large `n`, and for sizes without any such
/// divisor their smallest prime factor.
pub fn radices(n: usize) -> Vec<usize> {
    let mut rs: Vec<usize> = codelets::SIZES.iter().copied().filter(|&r| r < n && n % r == 0).collect();
    if n >= 1 << 14 {
        let root = (n as f64).sqrt();
        let near = (2..n)
            .filter(|r| n % r == 0)
            .min_by(|a, b| ((*a as f64) - root).abs().total_cmp(&((*b as f64) - root).abs()));
        if let Some(r) = near {
            if !rs.contains(&r) {
                rs.push(r);
            }
        }
    }
    if rs.is_empty() && !is_prime(n) && n > 1 {
        rs.push((2..n).find(|d| n % d == 0).unwrap());
    }
    if rs.len() > MAX_RADICES {
        rs.drain(..rs.len() - MAX_RADICES);
    }
    rs
}

impl Planner {
    pub fn new(config: PlannerConfig) -> Planner {
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Planner {
            config,
            memo: BTreeMap::new(),
            in_progress: HashSet::new(),
            measurements: 0,
            memo_hits: 0,
            rng,
        }
    }

    /// Timing runs performed so far.
    pub fn measurements(&self) -> usize {
        self.measurements
    }

    /// Subproblems answered from the memo table so far.
    pub fn memo_hits(&self) -> usize {
        self.memo_hits
    }

    /// Score recorded for a problem's memo entry: seconds in measure
    /// mode, estimated cost otherwise, NaN for imported wisdom.
    pub fn score(&self, problem: &DftProblem) -> Option<f64> {
        let sig = problem.normalize().ok()?.forward().signature();
        self.memo.get(&sig).map(|e| e.score)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn clear(&mut self) {
        self.memo.clear();
    }

    pub fn plan(&mut self, problem: &DftProblem) -> Result<Plan, Error> {
        let recipe = self.recipe(problem)?;
        Plan::new(recipe, problem, &self.config.options)
    }

    /// The chosen recipe for `problem`, from the memo table if present.
    pub fn recipe(&mut self, problem: &DftProblem) -> Result<Arc<Recipe>, Error> {
        let p = problem.normalize()?.forward();
        self.best(&p, 0)
    }

    fn best(&mut self, problem: &DftProblem, depth: usize) -> Result<Arc<Recipe>, Error> {
        let p = problem.normalize()?.forward();
        let sig = p.signature();
        if let Some(e) = self.memo.get(&sig) {
            self.memo_hits += 1;
            return Ok(e.recipe.clone());
        }
        if self.config.mode == Mode::WisdomOnly {
            return Err(Error::NoPlan(sig));
        }
        if depth > MAX_DEPTH || !self.in_progress.insert(sig.clone()) {
            return Err(Error::NoPlan(sig));
        }
        let result = self.search(&p, depth);
        self.in_progress.remove(&sig);
        let (plan, score) = result?;
        let recipe = plan.recipe.clone();
        self.memo.insert(sig, Entry { recipe: recipe.clone(), score });
        Ok(recipe)
    }

    fn search(&mut self, p: &DftProblem, depth: usize) -> Result<(Plan, f64), Error> {
        let mut cands = self.candidates(p, depth);
        let mut best: Option<(f64, f64, String, Plan)> = None;
        let mut tried_generic = false;
        loop {
            let mut plans: Vec<Plan> = Vec::new();
            for r in cands.drain(..) {
                tried_generic |= matches!(*r, Recipe::Generic(_));
                if let Ok(plan) = Plan::new(r, p, &self.config.options) {
                    plans.push(plan);
                }
            }
            let mut timed = false;
            if self.config.mode == Mode::Measure {
                // time only the plans the estimate does not rule out
                plans.sort_by(|a, b| a.cost().total_cmp(&b.cost()).then_with(|| a.sexpr().cmp(&b.sexpr())));
                if let Some(floor) = plans.first().map(Plan::cost) {
                    plans.retain(|q| q.cost() <= MEASURE_SLACK * floor);
                    plans.truncate(MEASURE_TOP);
                    timed = plans.len() > 1 && floor >= MEASURE_MIN_COST;
                }
            }
            for plan in plans {
                let score = if timed { self.measure(&plan) } else { plan.cost() };
                let key = (score, plan.cost(), plan.sexpr());
                let better = match &best {
                    None => true,
                    Some((s, c, e, _)) => key.0 < *s || (key.0 == *s && (key.1 < *c || (key.1 == *c && key.2 < *e))),
                };
                if better {
                    best = Some((key.0, key.1, key.2, plan));
                }
            }
            if best.is_some() || tried_generic || p.sz.rank() != 1 || !p.vecsz.dims.is_empty() {
                break;
            }
            tried_generic = true;
            cands.push(Arc::new(Recipe::Generic(p.sz.dims[0].n)));
        }
        best.map(|(s, _, _, plan)| (plan, s)).ok_or_else(|| Error::NoPlan(p.signature()))
    }

    fn sub(&mut self, q: &DftProblem, depth: usize) -> Option<Arc<Recipe>> {
        self.best(q, depth + 1).ok()
    }

    fn candidates(&mut self, p: &DftProblem, depth: usize) -> Vec<Arc<Recipe>> {
        let mut out: Vec<Recipe> = Vec::new();
        let vr = p.vecsz.rank();
        let loops: Vec<usize> = match vr {
            0 => vec![],
            1 => vec![0],
            _ => vec![0, vr - 1],
        };
        match p.sz.rank() {
            0 => {
                out.push(Recipe::Copy);
                if p.inplace && !p.strides_match() {
                    if vr == 2 {
                        out.push(Recipe::Transpose(p.vecsz.dims[0].n));
                    }
                    if vr >= 3 {
                        for dim in 0..vr {
                            if let Some(c) = self.sub(&sub::loop_child(p, dim), depth) {
                                out.push(Recipe::Loop { dim, child: c });
                            }
                        }
                    }
                }
                return out.into_iter().map(Arc::new).collect();
            }
            1 => {}
            rank => {
                let passes: Option<Vec<_>> = (0..rank).map(|d| self.sub(&sub::rank_pass(p, d), depth)).collect();
                if let Some(cs) = passes {
                    out.push(Recipe::RankReduce(cs));
                }
            }
        }
        for &dim in &loops {
            if let Some(c) = self.sub(&sub::loop_child(p, dim), depth) {
                out.push(Recipe::Loop { dim, child: c });
            }
        }
        if p.sz.rank() != 1 {
            return out.into_iter().map(Arc::new).collect();
        }
        let d = p.sz.dims[0];
        let n = d.n;
        if codelets::has_codelet(n) && vr <= 1 {
            out.push(Recipe::Direct(n));
        }
        if vr <= 1 {
            for r in radices(n).into_iter().filter(|_| !p.inplace && vr == 0) {
                let Some(c1) = self.sub(&sub::dit_c1(p, r), depth) else { continue };
                let c2 = if codelets::twiddle(r).is_some() {
                    Some(Arc::new(Recipe::DirectTw(r)))
                } else {
                    self.sub(&sub::dit_c2(p, r), depth)
                };
                if let Some(c2) = c2 {
                    out.push(Recipe::Dit { r, c1, c2 });
                }
            }
            if p.inplace && vr == 0 && p.strides_match() {
                for r in radices(n) {
                    let c1 = if codelets::twiddle_dif(r).is_some() {
                        Some(Arc::new(Recipe::DirectTw(r)))
                    } else {
                        self.sub(&sub::dif_c1(p, r), depth)
                    };
                    let Some(c1) = c1 else { continue };
                    if let Some(c2) = self.sub(&sub::dif_c2(p, r), depth) {
                        out.push(Recipe::Dif { r, c1, c2 });
                    }
                }
            }
            let vn = p.vecsz.dims.first().map_or(1, |v| v.n);
            let strided = d.is.abs() != 1 || d.os.abs() != 1;
            let mismatched = !p.strides_match();
            if strided || (p.inplace && mismatched) {
                let t = if p.inplace && mismatched {
                    vn
                } else {
                    (1..=vn).rev().find(|t| vn % t == 0 && t * n <= n.max(2048)).unwrap_or(1)
                };
                if let Some(c) = self.sub(&sub::buffer_child(n, t), depth) {
                    out.push(Recipe::Buffer { b: t * n, child: c });
                }
            }
        }
        if p.inplace && !p.strides_match() {
            let c1 = self.sub(&sub::indirect_c1(p), depth);
            let c2 = self.sub(&sub::indirect_c2(p), depth);
            if let (Some(c1), Some(c2)) = (c1, c2) {
                out.push(Recipe::Indirect { c1, c2 });
            }
        }
        if vr == 0 {
            if n >= 3 && is_prime(n) && largest_prime_factor(n - 1) <= RADER_MAX_FACTOR {
                if let Some(c) = self.sub(&sub::contiguous(n - 1), depth) {
                    out.push(Recipe::Rader { p: n, child: c });
                }
            }
            if largest_prime_factor(n) > RADER_MAX_FACTOR {
                let m = bluestein_length(n);
                if let Some(c) = self.sub(&sub::contiguous(m), depth) {
                    out.push(Recipe::Bluestein { n, m, child: c });
                }
            }
            if n <= GENERIC_MAX {
                out.push(Recipe::Generic(n));
            }
            if p.inplace && d.is == d.os {
                let ps: Vec<usize> = codelets::SIZES
                    .iter()
                    .copied()
                    .filter(|&q| n % (q * q) == 0 && codelets::twiddle(q).is_some())
                    .collect();
                for &q in ps.iter().rev().take(3) {
                    let m = n / (q * q);
                    let Ok(c2) = sub::dif_c2(&sub::dit_c1(p, q), q).normalize() else { continue };
                    if let Some(c) = self.sub(&sub::indirect_c2(&c2), depth) {
                        out.push(Recipe::Inplace { p: q, q, m, child: c });
                    }
                }
            }
        }
        out.into_iter().map(Arc::new).collect()
    }

    /// Median over `repetitions` of the mean time per apply, each taken
    /// over the fewest back-to-back applies that fill the timing window.
    pub fn measure(&mut self, plan: &Plan) -> f64 {
        self.measurements += 1;
        let p = &plan.problem;
        let ip = p.inplace;
        let off_i = if ip {
            p.min_offset(false).max(p.min_offset(true))
        } else {
            p.min_offset(false)
        };
        let len_i = p.required_len(off_i, false).max(if ip { p.required_len(off_i, true) } else { 0 });
        let input = random_vector(&mut self.rng, len_i);
        let mut data = input.clone();
        let mut output = vec![C64::new(0.0, 0.0); if ip { 0 } else { p.required_len(p.min_offset(true), true) }];
        let mut run = |times: usize| {
            let start = Instant::now();
            for _ in 0..times {
                if ip {
                    plan.apply_inplace_at(&mut data, off_i).expect("plan matches its problem");
                } else {
                    plan.apply(&input, &mut output).expect("plan matches its problem");
                }
            }
            start.elapsed()
        };
        run(1);
        let mut iters = 1usize;
        loop {
            let t = run(iters);
            if t >= self.config.window || iters >= 1 << 30 {
                break;
            }
            iters = if t.as_nanos() == 0 {
                iters * 16
            } else {
                let want = self.config.window.as_nanos() as f64 / t.as_nanos() as f64;
                ((iters as f64 * want * 1.1).ceil() as usize).clamp(iters + 1, iters * 16)
            };
        }
        let mut samples: Vec<f64> = (0..self.config.repetitions.max(1))
            .map(|_| run(iters).as_secs_f64() / iters as f64)
            .collect();
        samples.sort_by(f64::total_cmp);
        samples[samples.len() / 2]
    }

    /// `<signature> := <plan>` per memo entry, sorted by signature.
    pub fn export_wisdom(&self) -> String {
        let mut s = String::new();
        for (sig, e) in &self.memo {
            s.push_str(sig);
            s.push_str(" := ");
            s.push_str(&e.recipe.to_string());
            s.push('\n');
        }
        s
    }

    /// Adds every entry of a wisdom text to the memo table. A malformed
    /// line rejects the whole text.
    pub fn import_wisdom(&mut self, text: &str) -> Result<usize, Error> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Wisdom { line: i + 1, msg };
            let (sig, sexpr) = t.split_once(":=").ok_or_else(|| err("missing `:=`".into()))?;
            let problem = DftProblem::parse_signature(sig.trim()).map_err(err)?;
            let problem = problem.normalize().map_err(|e| err(e.to_string()))?;
            let recipe = Recipe::parse(sexpr.trim()).map_err(|e| err(e.to_string()))?;
            entries.push((problem.signature(), recipe));
        }
        let n = entries.len();
        for (sig, recipe) in entries {
            self.memo.insert(
                sig,
                Entry {
                    recipe: Arc::new(recipe),
                    score: f64::NAN,
                },
            );
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radix_candidates() {
        assert_eq!(radices(64), vec![2, 4, 8, 16, 32]);
        assert_eq!(radices(1 << 16), vec![2, 4, 8, 16, 32, 64, 256]);
        assert_eq!(radices(17 * 19), vec![17]);
        assert!(radices(97).is_empty());
    }

    #[test]
    fn largest_factor() {
        assert_eq!(largest_prime_factor(96), 3);
        assert_eq!(largest_prime_factor(202), 101);
    }
}
