//! Double-double arithmetic for reference values.
//!
//! Only what the accuracy oracles need: sums, products, division by a
//! double and sine/cosine of rational multiples of 2π.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// 2π as a double-double.
pub const TWO_PI: Dd = Dd {
    hi: 6.283_185_307_179_586,
    lo: 2.449_293_598_294_706_4e-16,
};

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact conversion of an integer below 2^106.
    pub fn from_int(v: i128) -> Dd {
        let hi = v as f64;
        let lo = (v - hi as i128) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let (s, f) = two_sum(self.hi, -p);
        let r = s + (f - e + self.lo);
        let q2 = r / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    pub fn div(self, d: Dd) -> Dd {
        let q1 = self.hi / d.hi;
        let r = self - d * Dd::new(q1);
        let q2 = r.hi / d.hi;
        let r = r - d * Dd::new(q2);
        let q3 = r.hi / d.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

fn sin_cos_small(x: Dd) -> (Dd, Dd) {
    // Taylor series; |x| ≤ π/4 so 30 terms are far past double-double
    let x2 = x * x;
    let mut s = x;
    let mut term = x;
    let mut c = Dd::ONE;
    let mut cterm = Dd::ONE;
    for k in 1..30 {
        let k = k as f64;
        term = -(term * x2).div_f64((2.0 * k) * (2.0 * k + 1.0));
        cterm = -(cterm * x2).div_f64((2.0 * k - 1.0) * (2.0 * k));
        s = s + term;
        c = c + cterm;
    }
    (c, s)
}

/// `(cos, sin)` of `2πk/n` in double-double, with the argument reduced
/// exactly to the first octant.
pub fn unit_root_dd(k: i64, n: u64) -> (Dd, Dd) {
    let n4 = 4 * n as i128;
    let quarter = n as i128;
    let mut m = 4 * (k as i128).rem_euclid(n as i128);
    let mut octant = 0u8;
    if m > n4 - m {
        m = n4 - m;
        octant |= 4;
    }
    if m > quarter {
        m -= quarter;
        octant |= 2;
    }
    if m > quarter - m {
        m = quarter - m;
        octant |= 1;
    }
    let theta = (TWO_PI * Dd::from_int(m)).div(Dd::from_int(n4));
    let (mut c, mut s) = sin_cos_small(theta);
    if octant & 1 != 0 {
        std::mem::swap(&mut c, &mut s);
    }
    if octant & 2 != 0 {
        let t = c;
        c = -s;
        s = t;
    }
    if octant & 4 != 0 {
        s = -s;
    }
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let (c, s) = unit_root_dd(1, 8);
        let h = Dd::new(0.5);
        // cos² = 1/2
        let d = c * c - h;
        assert!(d.to_f64().abs() < 1e-30);
        assert!((s - c).to_f64().abs() < 1e-30);
        let (c3, s3) = unit_root_dd(1, 12);
        // sin(π/6) = 1/2, cos² = 3/4
        assert!((s3 - h).to_f64().abs() < 1e-30);
        assert!((c3 * c3 - Dd::new(0.75)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn unit_modulus() {
        for n in [7u64, 100, 4096, 1 << 20] {
            for k in [1i64, 3, 17, (n / 3) as i64] {
                let (c, s) = unit_root_dd(k, n);
                let m = c * c + s * s - Dd::ONE;
                assert!(m.to_f64().abs() < 1e-30, "{k}/{n}");
            }
        }
    }
}
