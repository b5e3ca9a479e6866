//! Randomized self-test of a transform claiming to compute the DFT.
//!
//! Each trial runs three checks: linearity on random inputs and scalars,
//! the transform of an impulse at a random position against its analytic
//! phase ramp, and the circular time-shift property
//! `F(shift₁ x)[k] = ω^k·F(x)[k]`. A check passes when its relative L2
//! residual is at most `1e−10·log2(n+2)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::{rel_l2_error, tolerance};
use crate::problem::Sign;
use crate::twiddle::exact_root;

type C64 = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Linearity,
    Impulse,
    Shift,
}

#[derive(Clone, Debug)]
pub struct SelfTestReport {
    pub n: usize,
    pub trials: usize,
    pub threshold: f64,
    /// Largest residual seen per check, in [`Check`] order.
    pub max_residual: [f64; 3],
    pub failures: Vec<(usize, Check, f64)>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Runs `trials` rounds of all three checks on `transform`.
pub fn self_test<F>(mut transform: F, n: usize, sign: Sign, trials: usize, seed: u64) -> SelfTestReport
where
    F: FnMut(&[C64]) -> Vec<C64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let threshold = tolerance(n);
    let mut report = SelfTestReport {
        n,
        trials,
        threshold,
        max_residual: [0.0; 3],
        failures: Vec::new(),
    };
    if n == 0 {
        return report;
    }
    let record = |trial: usize, check: Check, r: f64, report: &mut SelfTestReport| {
        let slot = &mut report.max_residual[check as usize];
        *slot = slot.max(r);
        if !(r <= threshold) {
            report.failures.push((trial, check, r));
        }
    };
    for trial in 0..trials {
        let x = random_vector(&mut rng, n);
        let y = random_vector(&mut rng, n);
        let a = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let b = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let fx = transform(&x);
        let fy = transform(&y);
        let mix: Vec<C64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let fmix = transform(&mix);
        let want: Vec<C64> = fx.iter().zip(&fy).map(|(u, v)| a * u + b * v).collect();
        record(trial, Check::Linearity, rel_l2_error(&fmix, &want), &mut report);

        let j = rng.gen_range(0..n);
        let mut delta = vec![C64::new(0.0, 0.0); n];
        delta[j] = C64::new(1.0, 0.0);
        let ramp: Vec<C64> = (0..n).map(|k| exact_root(j * k % n, n, sign)).collect();
        record(trial, Check::Impulse, rel_l2_error(&transform(&delta), &ramp), &mut report);

        let shifted: Vec<C64> = (0..n).map(|i| x[(i + n - 1) % n]).collect();
        let want: Vec<C64> = fx
            .iter()
            .enumerate()
            .map(|(k, v)| v * exact_root(k, n, sign))
            .collect();
        record(trial, Check::Shift, rel_l2_error(&transform(&shifted), &want), &mut report);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::naive_dft;

    #[test]
    fn naive_passes() {
        let r = self_test(|x| naive_dft(x, Sign::Forward), 16, Sign::Forward, 20, 1);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn negated_output_is_caught() {
        let r = self_test(
            |x| {
                let mut y = naive_dft(x, Sign::Forward);
                y[3] = -y[3];
                y
            },
            16,
            Sign::Forward,
            20,
            1,
        );
        assert!(!r.passed());
        assert!(r.failures.iter().any(|f| f.1 == Check::Impulse));
    }
}
