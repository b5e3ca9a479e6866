//! Reference transforms.

use num_complex::Complex64;

use crate::dd::{two_prod, two_sum, unit_root_dd, Dd};
use crate::problem::Sign;
use crate::twiddle::exact_root;

type C64 = Complex64;

/// Direct O(n²) evaluation of the DFT definition.
pub fn naive_dft(x: &[C64], sign: Sign) -> Vec<C64> {
    let n = x.len();
    let w: Vec<C64> = (0..n).map(|j| exact_root(j, n, sign)).collect();
    (0..n)
        .map(|k| {
            let mut acc = C64::new(0.0, 0.0);
            let mut idx = 0;
            for &v in x {
                acc += v * w[idx];
                idx += k;
                if idx >= n {
                    idx -= n;
                }
            }
            acc
        })
        .collect()
}

/// Error-free accumulator: the running sum plus a compensation term.
#[derive(Clone, Copy, Default)]
struct Acc {
    s: f64,
    c: f64,
}

impl Acc {
    #[inline(always)]
    fn add_prod(&mut self, a: f64, b: Dd) {
        let (p, e) = two_prod(a, b.hi);
        let (s, f) = two_sum(self.s, p);
        self.s = s;
        self.c += e + f + a * b.lo;
    }

    fn value(self) -> f64 {
        self.s + self.c
    }
}

fn dd_roots(n: usize, sign: Sign) -> Vec<(Dd, Dd)> {
    (0..n)
        .map(|j| unit_root_dd(sign.value() as i64 * j as i64, n as u64))
        .collect()
}

/// The naive DFT with double-double twiddles and compensated summation,
/// accurate to a few units in the last place.
pub fn naive_dft_reference(x: &[C64], sign: Sign) -> Vec<C64> {
    let n = x.len();
    let w = dd_roots(n, sign);
    (0..n)
        .map(|k| {
            let (mut re, mut im) = (Acc::default(), Acc::default());
            let mut idx = 0;
            for &v in x {
                let (c, s) = w[idx];
                re.add_prod(v.re, c);
                re.add_prod(-v.im, s);
                im.add_prod(v.re, s);
                im.add_prod(v.im, c);
                idx += k;
                if idx >= n {
                    idx -= n;
                }
            }
            C64::new(re.value(), im.value())
        })
        .collect()
}

#[derive(Clone, Copy)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    fn add(self, b: Cdd) -> Cdd {
        Cdd {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }

    fn sub(self, b: Cdd) -> Cdd {
        Cdd {
            re: self.re - b.re,
            im: self.im - b.im,
        }
    }

    fn mul(self, b: Cdd) -> Cdd {
        Cdd {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

/// Radix-2 FFT carried out entirely in double-double arithmetic.
/// `x.len()` must be a power of two.
pub fn reference_fft_dd(x: &[C64], sign: Sign) -> Vec<C64> {
    let n = x.len();
    assert!(n.is_power_of_two(), "reference_fft_dd needs a power of two");
    if n == 1 {
        return x.to_vec();
    }
    let bits = n.trailing_zeros();
    let mut a: Vec<Cdd> = vec![
        Cdd {
            re: Dd::ZERO,
            im: Dd::ZERO
        };
        n
    ];
    for (i, v) in x.iter().enumerate() {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        a[j] = Cdd {
            re: Dd::new(v.re),
            im: Dd::new(v.im),
        };
    }
    let w: Vec<Cdd> = dd_roots(n, sign)
        .into_iter()
        .take(n / 2)
        .map(|(c, s)| Cdd { re: c, im: s })
        .collect();
    let mut len = 2;
    while len <= n {
        let step = n / len;
        for start in (0..n).step_by(len) {
            for j in 0..len / 2 {
                let t = a[start + j + len / 2].mul(w[j * step]);
                let u = a[start + j];
                a[start + j] = u.add(t);
                a[start + j + len / 2] = u.sub(t);
            }
        }
        len *= 2;
    }
    a.iter()
        .map(|v| C64::new(v.re.to_f64(), v.im.to_f64()))
        .collect()
}

/// The most accurate available reference: the double-double FFT for
/// powers of two above 1024, the compensated naive DFT otherwise.
pub fn reference_dft(x: &[C64], sign: Sign) -> Vec<C64> {
    if x.len() > 1024 && x.len().is_power_of_two() {
        reference_fft_dd(x, sign)
    } else {
        naive_dft_reference(x, sign)
    }
}

/// `‖a − b‖₂ / ‖b‖₂`; zero when both vanish.
pub fn rel_l2_error(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    if den == 0.0 {
        return if num == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (num / den).sqrt()
}

/// Tolerance used for oracle comparisons: `1e−10·log2(n+2)`.
pub fn tolerance(n: usize) -> f64 {
    1e-10 * ((n + 2) as f64).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_point_example() {
        let x = [1.0, 2.0, 3.0, 4.0].map(|v| C64::new(v, 0.0));
        let y = naive_dft(&x, Sign::Forward);
        let want = [C64::new(10.0, 0.0), C64::new(-2.0, 2.0), C64::new(-2.0, 0.0), C64::new(-2.0, -2.0)];
        assert_eq!(y, want);
        assert_eq!(naive_dft_reference(&x, Sign::Forward), want);
    }

    #[test]
    fn dd_fft_matches_compensated_naive() {
        let x: Vec<C64> = (0..64).map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos())).collect();
        let a = reference_fft_dd(&x, Sign::Forward);
        let b = naive_dft_reference(&x, Sign::Forward);
        assert!(rel_l2_error(&a, &b) < 1e-15);
    }
}
