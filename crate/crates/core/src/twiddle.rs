//! Twiddle-factor providers and their error measurement.
//!
//! Every provider yields `ω_n^k = exp(−2πik/n)` for `0 ≤ k < n`. The
//! full table evaluates each entry independently; the two-table scheme
//! stores `⌈√n⌉`-sized tables and multiplies once per lookup; the two
//! recurrences build each entry from the previous one and accumulate
//! error.

use std::str::FromStr;

use num_complex::Complex64;
use tunefft_codelet::roots::unit_root;

use crate::dd::unit_root_dd;
use crate::problem::Sign;

type C64 = Complex64;

/// `ω_n^j` for the given sign with exact argument reduction.
pub fn exact_root(j: usize, n: usize, sign: Sign) -> C64 {
    let (c, s) = unit_root(sign.value() as i64 * (j % n.max(1)) as i64, n as u64);
    C64::new(c, s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum TwiddleKind {
    #[default]
    FullTable,
    TwoTable,
    RecurrenceNaive,
    RecurrenceImproved,
}

impl TwiddleKind {
    pub const ALL: [TwiddleKind; 4] = [
        TwiddleKind::FullTable,
        TwiddleKind::TwoTable,
        TwiddleKind::RecurrenceImproved,
        TwiddleKind::RecurrenceNaive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TwiddleKind::FullTable => "full",
            TwiddleKind::TwoTable => "twotable",
            TwiddleKind::RecurrenceNaive => "rec-naive",
            TwiddleKind::RecurrenceImproved => "rec-improved",
        }
    }
}

impl FromStr for TwiddleKind {
    type Err = String;
    fn from_str(s: &str) -> Result<TwiddleKind, String> {
        TwiddleKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown twiddle kind `{s}` (full|twotable|rec-naive|rec-improved)"))
    }
}

#[derive(Clone, Debug)]
enum Storage {
    Table(Vec<C64>),
    Split { r: usize, fine: Vec<C64>, coarse: Vec<C64> },
}

#[derive(Clone, Debug)]
pub struct TwiddleProvider {
    pub kind: TwiddleKind,
    pub n: usize,
    storage: Storage,
}

impl TwiddleProvider {
    pub fn new(kind: TwiddleKind, n: usize) -> TwiddleProvider {
        match kind {
            TwiddleKind::FullTable => make_full_table(n),
            TwiddleKind::TwoTable => make_two_table(n),
            TwiddleKind::RecurrenceNaive => TwiddleProvider {
                kind,
                n,
                storage: Storage::Table(recurrence_naive(n)),
            },
            TwiddleKind::RecurrenceImproved => TwiddleProvider {
                kind,
                n,
                storage: Storage::Table(recurrence_improved(n)),
            },
        }
    }

    /// `ω_n^k`; panics for `k ≥ n`.
    pub fn lookup(&self, k: usize) -> C64 {
        assert!(k < self.n, "twiddle index {k} out of range for n={}", self.n);
        match &self.storage {
            Storage::Table(t) => t[k],
            Storage::Split { r, fine, coarse } => fine[k % r] * coarse[k / r],
        }
    }

    pub fn try_lookup(&self, k: usize) -> Option<C64> {
        (k < self.n).then(|| self.lookup(k))
    }

    /// The split radix of a two-table provider.
    pub fn split(&self) -> Option<usize> {
        match self.storage {
            Storage::Split { r, .. } => Some(r),
            Storage::Table(_) => None,
        }
    }

    pub fn values(&self) -> Vec<C64> {
        (0..self.n).map(|k| self.lookup(k)).collect()
    }
}

pub fn make_full_table(n: usize) -> TwiddleProvider {
    TwiddleProvider {
        kind: TwiddleKind::FullTable,
        n,
        storage: Storage::Table((0..n).map(|k| exact_root(k, n, Sign::Forward)).collect()),
    }
}

/// Two tables of `r = ⌈√n⌉` entries: `T1[j] = ω^j` (fine) and
/// `T2[j] = ω^{jr}` (coarse).
pub fn make_two_table(n: usize) -> TwiddleProvider {
    let r = (1..=n.max(1)).find(|r| r * r >= n).unwrap_or(1);
    let fine = (0..r).map(|j| exact_root(j, n, Sign::Forward)).collect();
    let coarse = (0..n.div_ceil(r).max(1))
        .map(|j| exact_root(j * r, n, Sign::Forward))
        .collect();
    TwiddleProvider {
        kind: TwiddleKind::TwoTable,
        n,
        storage: Storage::Split { r, fine, coarse },
    }
}

pub fn two_table_lookup(provider: &TwiddleProvider, k: usize) -> Result<C64, crate::Error> {
    if provider.split().is_none() {
        return Err(crate::Error::Invalid("not a two-table provider".into()));
    }
    provider
        .try_lookup(k)
        .ok_or_else(|| crate::Error::Invalid(format!("twiddle index {k} >= {}", provider.n)))
}

/// `w[k+1] = w[k]·e^{−iθ}`.
pub fn recurrence_naive(n: usize) -> Vec<C64> {
    let step = exact_root(1, n.max(1), Sign::Forward);
    let mut w = Vec::with_capacity(n);
    let mut cur = C64::new(1.0, 0.0);
    for _ in 0..n {
        w.push(cur);
        cur *= step;
    }
    w
}

/// `w[k+1] = w[k] + w[k]·(e^{−iθ} − 1)` with `cos θ − 1 = −2sin²(θ/2)`.
pub fn recurrence_improved(n: usize) -> Vec<C64> {
    let theta = 2.0 * std::f64::consts::PI / n.max(1) as f64;
    let h = (theta / 2.0).sin();
    let d = C64::new(-2.0 * h * h, -theta.sin());
    let mut w = Vec::with_capacity(n);
    let mut cur = C64::new(1.0, 0.0);
    for _ in 0..n {
        w.push(cur);
        cur += cur * d;
    }
    w
}

/// `max_k |w[k] − ω_n^k|` against double-double exact values.
pub fn max_error(w: &[C64], n: usize) -> f64 {
    w.iter()
        .enumerate()
        .map(|(k, v)| {
            let (c, s) = unit_root_dd(-(k as i64), n as u64);
            let dr = (v.re - c.hi) - c.lo;
            let di = (v.im - s.hi) - s.lo;
            dr.hypot(di)
        })
        .fold(0.0, f64::max)
}

pub fn provider_max_error(p: &TwiddleProvider) -> f64 {
    max_error(&p.values(), p.n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_roots() {
        let t = make_full_table(4).values();
        assert_eq!(t, vec![C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0)]);
        assert_eq!(make_full_table(1).values(), vec![C64::new(1.0, 0.0)]);
    }

    #[test]
    fn two_table_heads_are_exact() {
        let p = make_two_table(16);
        assert_eq!(p.split(), Some(4));
        assert_eq!(two_table_lookup(&p, 0).unwrap(), C64::new(1.0, 0.0));
        assert!(two_table_lookup(&p, 16).is_err());
        assert_eq!(make_two_table(10).split(), Some(4));
    }

    #[test]
    fn recurrences_start_at_one() {
        assert_eq!(recurrence_naive(1000)[0], C64::new(1.0, 0.0));
        assert_eq!(recurrence_improved(1000)[0], C64::new(1.0, 0.0));
        assert_eq!(max_error(&make_full_table(64).values(), 64), max_error(&make_full_table(64).values(), 64));
    }
}
