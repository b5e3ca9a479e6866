//! Roots of unity with exact argument reduction.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Returns `(cos, sin)` of `2πk/n`.
///
/// The argument is reduced to the first octant with integer arithmetic on
/// `k/n`, so multiples of π/4 come out exact and symmetric entries are
/// bitwise equal up to sign.
pub fn unit_root(k: i64, n: u64) -> (f64, f64) {
    assert!(n > 0, "unit_root of order zero");
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
    let (mut c, mut s) = if m == 0 {
        (1.0, 0.0)
    } else if 2 * m == quarter {
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    } else {
        let theta = 2.0 * PI * (m as f64 / n4 as f64);
        (theta.cos(), theta.sin())
    };
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

/// `ω_n^e` for a transform of the given sign: `exp(sign·2πi·e/n)`.
pub fn omega(e: i64, n: usize, sign: i32) -> (f64, f64) {
    unit_root(sign as i64 * e, n as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_roots_are_exact() {
        assert_eq!(unit_root(0, 4), (1.0, 0.0));
        assert_eq!(unit_root(1, 4), (0.0, 1.0));
        assert_eq!(unit_root(2, 4), (-1.0, 0.0));
        assert_eq!(unit_root(3, 4), (0.0, -1.0));
        assert_eq!(unit_root(-1, 4), (0.0, -1.0));
    }

    #[test]
    fn eighth_roots_are_symmetric() {
        let (c, s) = unit_root(1, 8);
        assert_eq!(c, s);
        let (c3, s3) = unit_root(3, 8);
        assert_eq!((c3, s3), (-c, s));
    }

    #[test]
    fn agrees_with_direct_evaluation() {
        for n in 1..200u64 {
            for k in 0..n as i64 {
                let (c, s) = unit_root(k, n);
                let t = 2.0 * PI * k as f64 / n as f64;
                assert!((c - t.cos()).abs() < 1e-14, "cos {k}/{n}");
                assert!((s - t.sin()).abs() < 1e-14, "sin {k}/{n}");
            }
        }
    }
}
