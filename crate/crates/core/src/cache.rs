//! Ideal-cache model: miss-count recurrences and a trace simulator.
//!
//! Traces record data-element touches only. A radix-2 butterfly touches
//! each of its two elements once (the read and the write of an element
//! count as one touch), so a size-`n` radix-2 FFT produces `n·lg n`
//! touches under every traversal. The four-step traversal also touches
//! every element once per transposition.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Belady: evict the line whose next use is farthest away.
    OptimalOffline,
    Lru,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::OptimalOffline => "opt",
            Policy::Lru => "lru",
        }
    }
}

impl FromStr for Policy {
    type Err = String;
    fn from_str(s: &str) -> Result<Policy, String> {
        match s {
            "opt" => Ok(Policy::OptimalOffline),
            "lru" => Ok(Policy::Lru),
            _ => Err(format!("unknown policy `{s}` (opt|lru)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdealCache {
    /// Capacity in elements.
    pub z: usize,
    /// Line size in elements.
    pub l: usize,
    pub policy: Policy,
}

impl IdealCache {
    pub fn new(z: usize, l: usize, policy: Policy) -> Result<IdealCache, Error> {
        if l == 0 || z < l {
            return Err(Error::Invalid(format!("need Z >= L >= 1, got Z={z} L={l}")));
        }
        if l > 1 && z < l * l {
            return Err(Error::Invalid(format!("cache is not tall: Z={z} < L²={}", l * l)));
        }
        Ok(IdealCache { z, l, policy })
    }

    fn lines(&self) -> usize {
        self.z / self.l
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    BreadthFirst,
    DepthFirst,
    FourStep,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::BreadthFirst, Strategy::DepthFirst, Strategy::FourStep];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::BreadthFirst => "bf",
            Strategy::DepthFirst => "df",
            Strategy::FourStep => "fourstep",
        }
    }

    pub fn trace(self, n: usize) -> Result<Vec<usize>, Error> {
        match self {
            Strategy::BreadthFirst => trace_breadth_first(n),
            Strategy::DepthFirst => trace_depth_first(n),
            Strategy::FourStep => trace_four_step(n),
        }
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Strategy, String> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown strategy `{s}` (bf|df|fourstep)"))
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exact miss count of `trace` on `cache`.
pub fn simulate(trace: &[usize], cache: &IdealCache) -> usize {
    let lines: Vec<usize> = trace.iter().map(|a| a / cache.l).collect();
    match cache.policy {
        Policy::OptimalOffline => belady(&lines, cache.lines()),
        Policy::Lru => lru(&lines, cache.lines()),
    }
}

fn belady(lines: &[usize], capacity: usize) -> usize {
    // next[t]: time of the next access to lines[t], or usize::MAX
    let mut next = vec![usize::MAX; lines.len()];
    let mut last: HashMap<usize, usize> = HashMap::new();
    for t in (0..lines.len()).rev() {
        if let Some(&u) = last.get(&lines[t]) {
            next[t] = u;
        }
        last.insert(lines[t], t);
    }
    let mut resident: HashMap<usize, usize> = HashMap::new();
    let mut by_next: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut misses = 0;
    for (t, &line) in lines.iter().enumerate() {
        match resident.get(&line) {
            Some(&old) => {
                by_next.remove(&(old, line));
            }
            None => {
                misses += 1;
                if resident.len() == capacity {
                    let victim = by_next.pop_last().expect("cache is full");
                    resident.remove(&victim.1);
                }
            }
        }
        resident.insert(line, next[t]);
        by_next.insert((next[t], line));
    }
    misses
}

fn lru(lines: &[usize], capacity: usize) -> usize {
    let mut stamp: HashMap<usize, usize> = HashMap::new();
    let mut by_age: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut misses = 0;
    for (t, &line) in lines.iter().enumerate() {
        match stamp.get(&line) {
            Some(&old) => {
                by_age.remove(&(old, line));
            }
            None => {
                misses += 1;
                if stamp.len() == capacity {
                    let victim = by_age.pop_first().expect("cache is full");
                    stamp.remove(&victim.1);
                }
            }
        }
        stamp.insert(line, t);
        by_age.insert((t, line));
    }
    misses
}

fn check_pow2(n: usize) -> Result<(), Error> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Invalid(format!("n={n} is not a power of two")));
    }
    Ok(())
}

/// Iterative radix-2: every butterfly of one span before the next.
pub fn trace_breadth_first(n: usize) -> Result<Vec<usize>, Error> {
    check_pow2(n)?;
    let mut t = Vec::with_capacity(n * n.trailing_zeros() as usize);
    let mut half = 1;
    while half < n {
        for start in (0..n).step_by(2 * half) {
            for j in start..start + half {
                t.push(j);
                t.push(j + half);
            }
        }
        half *= 2;
    }
    Ok(t)
}

/// Recursive radix-2: both halves completely, then the combining pass.
pub fn trace_depth_first(n: usize) -> Result<Vec<usize>, Error> {
    check_pow2(n)?;
    fn rec(lo: usize, len: usize, t: &mut Vec<usize>) {
        if len < 2 {
            return;
        }
        let half = len / 2;
        rec(lo, half, t);
        rec(lo + half, half, t);
        for j in lo..lo + half {
            t.push(j);
            t.push(j + half);
        }
    }
    let mut t = Vec::with_capacity(n * n.trailing_zeros() as usize);
    rec(0, n, &mut t);
    Ok(t)
}

/// Radix-√n Cooley-Tukey, recursively: `n₂` column transforms of size
/// `n₁`, `n₁` row transforms of size `n₂`, then a transposition. For `n`
/// an odd power of two, `n₁ = 2n₂`.
pub fn trace_four_step(n: usize) -> Result<Vec<usize>, Error> {
    check_pow2(n)?;
    fn rec(base: usize, stride: usize, len: usize, t: &mut Vec<usize>) {
        if len < 2 {
            return;
        }
        if len == 2 {
            t.push(base);
            t.push(base + stride);
            return;
        }
        let k = len.trailing_zeros();
        let n1 = 1usize << k.div_ceil(2);
        let n2 = len / n1;
        for j2 in 0..n2 {
            rec(base + j2 * stride, stride * n2, n1, t);
        }
        for j1 in 0..n1 {
            rec(base + j1 * n2 * stride, stride, n2, t);
        }
        transpose(base, stride, n1, n2, t);
    }
    let mut t = Vec::new();
    rec(0, 1, n, &mut t);
    Ok(t)
}

/// Touches every element of an `n1 × n2` block once, in recursive
/// quadrant order. Square blocks touch `(i, j)` next to its mirror.
fn transpose(base: usize, stride: usize, n1: usize, n2: usize, t: &mut Vec<usize>) {
    let at = |i: usize, j: usize| base + (i * n2 + j) * stride;
    if n1 == n2 {
        fn diag(lo: usize, hi: usize, at: &dyn Fn(usize, usize) -> usize, t: &mut Vec<usize>) {
            if hi - lo <= 1 {
                if hi > lo {
                    t.push(at(lo, lo));
                }
                return;
            }
            let mid = (lo + hi) / 2;
            diag(lo, mid, at, t);
            off(lo, mid, mid, hi, at, t);
            diag(mid, hi, at, t);
        }
        fn off(i0: usize, i1: usize, j0: usize, j1: usize, at: &dyn Fn(usize, usize) -> usize, t: &mut Vec<usize>) {
            if (i1 - i0) * (j1 - j0) <= 16 {
                for i in i0..i1 {
                    for j in j0..j1 {
                        t.push(at(i, j));
                        t.push(at(j, i));
                    }
                }
            } else if i1 - i0 >= j1 - j0 {
                let m = (i0 + i1) / 2;
                off(i0, m, j0, j1, at, t);
                off(m, i1, j0, j1, at, t);
            } else {
                let m = (j0 + j1) / 2;
                off(i0, i1, j0, m, at, t);
                off(i0, i1, m, j1, at, t);
            }
        }
        diag(0, n1, &at, t);
    } else {
        fn block(i0: usize, i1: usize, j0: usize, j1: usize, at: &dyn Fn(usize, usize) -> usize, t: &mut Vec<usize>) {
            if (i1 - i0) * (j1 - j0) <= 16 {
                for i in i0..i1 {
                    for j in j0..j1 {
                        t.push(at(i, j));
                    }
                }
            } else if i1 - i0 >= j1 - j0 {
                let m = (i0 + i1) / 2;
                block(i0, m, j0, j1, at, t);
                block(m, i1, j0, j1, at, t);
            } else {
                let m = (j0 + j1) / 2;
                block(i0, i1, j0, m, at, t);
                block(i0, i1, m, j1, at, t);
            }
        }
        block(0, n1, 0, n2, &at, t);
    }
}

fn require_pow2(v: usize, what: &str) -> Result<(), Error> {
    if v == 0 || !v.is_power_of_two() {
        return Err(Error::Invalid(format!("{what}={v} is not a power of two")));
    }
    Ok(())
}

/// Depth-first radix-2 recurrence `Q₂(n) = 2Q₂(n/2) + n`, `Q₂(n) = n`
/// for `n ≤ Z`.
pub fn recurrence_q2(n: usize, z: usize) -> Result<u64, Error> {
    require_pow2(n, "n")?;
    require_pow2(z, "Z")?;
    fn q(n: u64, z: u64) -> u64 {
        if n <= z {
            n
        } else {
            2 * q(n / 2, z) + n
        }
    }
    Ok(q(n as u64, z as u64))
}

/// Four-step recurrence `Q_o(n) = 2√n·Q_o(√n) + n`, `Q_o(n) = n` for
/// `n ≤ Z`.
pub fn recurrence_qo(n: usize, z: usize) -> Result<u64, Error> {
    require_pow2(z, "Z")?;
    fn q(n: u64, z: u64) -> Result<u64, Error> {
        if n <= z {
            return Ok(n);
        }
        let r = (n as f64).sqrt().round() as u64;
        if r * r != n || !n.is_power_of_two() {
            return Err(Error::Invalid(format!("n={n} is not a power of four above Z")));
        }
        Ok(2 * r * q(r, z)? + n)
    }
    q(n as u64, z as u64)
}

/// `n·⌈log_Z n⌉`.
pub fn closed_qb(n: usize, z: usize) -> Result<u64, Error> {
    if z < 2 {
        return Err(Error::Invalid(format!("Z={z} must be at least 2")));
    }
    let (mut k, mut p) = (0u64, 1u128);
    while p < n as u128 {
        p *= z as u128;
        k += 1;
    }
    Ok(n as u64 * k)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CacheRow {
    pub n: usize,
    pub strategy: Strategy,
    pub cache: IdealCache,
    pub misses: usize,
    pub accesses: usize,
}

pub const CSV_HEADER: &str = "n,strategy,Z,L,policy,misses,accesses";

impl CacheRow {
    pub fn run(strategy: Strategy, n: usize, cache: IdealCache) -> Result<CacheRow, Error> {
        let trace = strategy.trace(n)?;
        Ok(CacheRow {
            n,
            strategy,
            cache,
            misses: simulate(&trace, &cache),
            accesses: trace.len(),
        })
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.strategy,
            self.cache.z,
            self.cache.l,
            self.cache.policy.name(),
            self.misses,
            self.accesses
        )
    }

    /// `Q/(n lg n)`, `Q/(n lg(n/Z))`, `Q/(n log_Z n)`.
    pub fn ratios(&self) -> [f64; 3] {
        let n = self.n as f64;
        let q = self.misses as f64;
        let z = self.cache.z as f64;
        [
            q / (n * n.log2()),
            q / (n * (n / z).log2()),
            q / (n * n.log2() / z.log2()),
        ]
    }
}

pub const SCALING_HEADER: &str = "n,strategy,Z,L,policy,misses,accesses,q_per_nlgn,q_per_nlg_n_over_z,q_per_nlogz_n";

/// Simulated misses of `strategy` for each `n`, with the three
/// normalizations of the miss count.
pub fn scaling_report(strategy: Strategy, sizes: &[usize], cache: IdealCache) -> Result<Vec<CacheRow>, Error> {
    sizes.iter().map(|&n| CacheRow::run(strategy, n, cache)).collect()
}

pub fn scaling_csv(rows: &[CacheRow]) -> String {
    let mut s = String::from(SCALING_HEADER);
    s.push('\n');
    for r in rows {
        let [a, b, c] = r.ratios();
        s.push_str(&format!("{},{a:.6},{b:.6},{c:.6}\n", r.csv()));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thrash_with_one_line() {
        let c = IdealCache::new(1, 1, Policy::Lru).unwrap();
        assert_eq!(simulate(&[0, 1, 0, 1], &c), 4);
    }

    #[test]
    fn tall_cache_enforced() {
        assert!(IdealCache::new(8, 4, Policy::Lru).is_err());
        assert!(IdealCache::new(16, 4, Policy::Lru).is_ok());
        assert!(IdealCache::new(0, 1, Policy::Lru).is_err());
    }

    #[test]
    fn recurrences() {
        assert_eq!(recurrence_q2(8, 2).unwrap(), 24);
        assert_eq!(recurrence_qo(16, 4).unwrap(), 48);
        assert_eq!(closed_qb(4096, 64).unwrap(), 8192);
        assert!(recurrence_qo(32, 4).is_err());
    }

    #[test]
    fn breadth_first_eight() {
        let t = trace_breadth_first(8).unwrap();
        assert_eq!(t.len(), 24);
        assert_eq!(&t[..8], &[0, 1, 2, 3, 4, 5, 6, 7]);
        assert!(trace_breadth_first(12).is_err());
    }
}
