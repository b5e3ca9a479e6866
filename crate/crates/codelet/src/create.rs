//! Dag creation by symbolic evaluation of an FFT algorithm.
//!
//! Creation makes no attempt at optimization: every twiddle multiplication
//! is emitted as a full complex product (four real multiplications and two
//! additions), including multiplications by one.

use crate::dag::{Builder, Dag, Input, NodeId};
use crate::roots::omega;
use crate::{is_prime, smallest_factor, Algorithm, CodeletKind, CodeletSpec, GenError};

/// A complex value as a pair of real nodes.
#[derive(Clone, Copy, Debug)]
pub struct C {
    pub re: NodeId,
    pub im: NodeId,
}

fn cadd(b: &mut Builder, x: C, y: C) -> C {
    C {
        re: b.add(x.re, y.re),
        im: b.add(x.im, y.im),
    }
}

fn csub(b: &mut Builder, x: C, y: C) -> C {
    C {
        re: b.sub(x.re, y.re),
        im: b.sub(x.im, y.im),
    }
}

fn cmul_const(b: &mut Builder, x: C, (c, s): (f64, f64)) -> C {
    let rc = b.mul_const(x.re, c);
    let is = b.mul_const(x.im, s);
    let rs = b.mul_const(x.re, s);
    let ic = b.mul_const(x.im, c);
    C {
        re: b.sub(rc, is),
        im: b.add(rs, ic),
    }
}

fn cmul_var(b: &mut Builder, x: C, w: C) -> C {
    let rr = b.mul(x.re, w.re);
    let ii = b.mul(x.im, w.im);
    let ri = b.mul(x.re, w.im);
    let ir = b.mul(x.im, w.re);
    C {
        re: b.sub(rr, ii),
        im: b.add(ri, ir),
    }
}

/// `u + s·i·t` for `s = ±1`.
fn add_rot(b: &mut Builder, u: C, t: C, s: i32) -> C {
    if s > 0 {
        C {
            re: b.sub(u.re, t.im),
            im: b.add(u.im, t.re),
        }
    } else {
        C {
            re: b.add(u.re, t.im),
            im: b.sub(u.im, t.re),
        }
    }
}

/// Direct evaluation of the DFT definition, multiplying only where both
/// indices are nonzero.
fn dft_definition(b: &mut Builder, x: &[C], sign: i32) -> Vec<C> {
    let n = x.len();
    if n == 2 {
        return vec![cadd(b, x[0], x[1]), csub(b, x[0], x[1])];
    }
    (0..n)
        .map(|k| {
            let mut acc = x[0];
            for (l, &xl) in x.iter().enumerate().skip(1) {
                let term = if k == 0 {
                    xl
                } else {
                    cmul_const(b, xl, omega((l * k % n) as i64, n, sign))
                };
                acc = cadd(b, acc, term);
            }
            acc
        })
        .collect()
}

/// Decimation-in-time Cooley-Tukey with the smallest prime factor as
/// radix, recursing down to size one.
pub fn ct(b: &mut Builder, x: &[C], sign: i32) -> Vec<C> {
    let n = x.len();
    if n == 1 {
        return x.to_vec();
    }
    let r = smallest_factor(n);
    let m = n / r;
    let sub: Vec<Vec<C>> = (0..r)
        .map(|l2| {
            let part: Vec<C> = (0..m).map(|l1| x[l1 * r + l2]).collect();
            ct(b, &part, sign)
        })
        .collect();
    let mut y = vec![x[0]; n];
    for k1 in 0..m {
        let t: Vec<C> = (0..r)
            .map(|l2| {
                if l2 == 0 {
                    sub[0][k1]
                } else {
                    cmul_const(b, sub[l2][k1], omega((l2 * k1) as i64, n, sign))
                }
            })
            .collect();
        for (k2, v) in dft_definition(b, &t, sign).into_iter().enumerate() {
            y[k1 + k2 * m] = v;
        }
    }
    y
}

fn split_radix(b: &mut Builder, x: &[C], sign: i32) -> Vec<C> {
    let n = x.len();
    match n {
        1 => return x.to_vec(),
        2 => return vec![cadd(b, x[0], x[1]), csub(b, x[0], x[1])],
        _ => {}
    }
    let q = n / 4;
    let even: Vec<C> = x.iter().step_by(2).copied().collect();
    let odd1: Vec<C> = x.iter().skip(1).step_by(4).copied().collect();
    let odd3: Vec<C> = x.iter().skip(3).step_by(4).copied().collect();
    let u = split_radix(b, &even, sign);
    let z1 = split_radix(b, &odd1, sign);
    let z3 = split_radix(b, &odd3, sign);
    let mut y = vec![x[0]; n];
    for k in 0..q {
        let a = cmul_const(b, z1[k], omega(k as i64, n, sign));
        let c = cmul_const(b, z3[k], omega(3 * k as i64, n, sign));
        let s = cadd(b, a, c);
        let d = csub(b, a, c);
        y[k] = cadd(b, u[k], s);
        y[k + 2 * q] = csub(b, u[k], s);
        y[k + q] = add_rot(b, u[k + q], d, sign);
        y[k + 3 * q] = add_rot(b, u[k + q], d, -sign);
    }
    y
}

/// Coprime split `n = n1·n2` with `n1` the prime power of the smallest
/// prime factor.
pub fn pfa_factors(n: usize) -> Option<(usize, usize)> {
    if n < 6 {
        return None;
    }
    let p = smallest_factor(n);
    let mut n1 = 1;
    while n % (n1 * p) == 0 {
        n1 *= p;
    }
    let n2 = n / n1;
    (n2 > 1 && n1 <= 16 && n2 <= 16).then_some((n1, n2))
}

fn pfa(b: &mut Builder, x: &[C], sign: i32, n1: usize, n2: usize) -> Vec<C> {
    let n = n1 * n2;
    // rows: fixed l2, length n1 over l1
    let rows: Vec<Vec<C>> = (0..n2)
        .map(|l2| {
            let row: Vec<C> = (0..n1).map(|l1| x[(l1 * n2 + l2 * n1) % n]).collect();
            ct(b, &row, sign)
        })
        .collect();
    let mut y = vec![x[0]; n];
    for k1 in 0..n1 {
        let col: Vec<C> = (0..n2).map(|l2| rows[l2][k1]).collect();
        for (k2, v) in ct(b, &col, sign).into_iter().enumerate() {
            y[crt(k1, n1, k2, n2)] = v;
        }
    }
    y
}

/// The unique `k < n1·n2` with `k ≡ k1 (mod n1)` and `k ≡ k2 (mod n2)`.
fn crt(k1: usize, n1: usize, k2: usize, n2: usize) -> usize {
    (0..n1 * n2)
        .find(|k| k % n1 == k1 && k % n2 == k2)
        .expect("moduli are coprime")
}

pub fn primitive_root(p: usize) -> usize {
    let phi = p - 1;
    let mut factors = Vec::new();
    let mut m = phi;
    while m > 1 {
        let f = smallest_factor(m);
        factors.push(f);
        while m % f == 0 {
            m /= f;
        }
    }
    (2..p)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, phi / f, p) != 1))
        .unwrap_or(1)
}

pub fn pow_mod(base: usize, mut e: usize, m: usize) -> usize {
    let (mut acc, mut b) = (1u128, base as u128 % m as u128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    acc as usize
}

fn rader(b: &mut Builder, x: &[C], sign: i32) -> Vec<C> {
    let p = x.len();
    let len = p - 1;
    let g = primitive_root(p);
    let ginv = pow_mod(g, p - 2, p);
    let a: Vec<C> = (0..len).map(|j| x[pow_mod(g, j, p)]).collect();
    // transform of b_q = ω^{g^{-q}}, scaled for the unnormalized inverse
    let bq: Vec<(f64, f64)> = (0..len)
        .map(|q| omega(pow_mod(ginv, q, p) as i64, p, sign))
        .collect();
    let bhat: Vec<(f64, f64)> = (0..len)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (q, &(c, s)) in bq.iter().enumerate() {
                let (wc, ws) = omega((q * k % len) as i64, len, -1);
                re += c * wc - s * ws;
                im += c * ws + s * wc;
            }
            (re / len as f64, im / len as f64)
        })
        .collect();
    let ahat = ct(b, &a, -1);
    let prod: Vec<C> = ahat
        .iter()
        .zip(&bhat)
        .map(|(&v, &w)| cmul_const(b, v, w))
        .collect();
    let conv = ct(b, &prod, 1);
    let mut y = vec![x[0]; p];
    let mut total = x[0];
    for &v in &x[1..] {
        total = cadd(b, total, v);
    }
    y[0] = total;
    for (m, &c) in conv.iter().enumerate() {
        y[pow_mod(ginv, m, p)] = cadd(b, x[0], c);
    }
    y
}

/// Builds the unsimplified dag for `spec`.
pub fn create_dag(spec: &CodeletSpec) -> Result<Dag, GenError> {
    let n = spec.n;
    let inapplicable = GenError::Inapplicable {
        alg: spec.algorithm,
        n,
    };
    let ok = n >= 1
        && match spec.algorithm {
            Algorithm::Ct => true,
            Algorithm::SplitRadix => n.is_power_of_two(),
            Algorithm::Pfa => pfa_factors(n).is_some(),
            Algorithm::Rader => n >= 3 && is_prime(n),
        };
    if !ok || (spec.sign != 1 && spec.sign != -1) {
        return Err(inapplicable);
    }
    let twiddles = if spec.kind == CodeletKind::Notw { 0 } else { n - 1 };
    let mut b = Builder::raw(n, twiddles);
    let load = |b: &mut Builder, i: Input| C {
        re: b.load_re(i),
        im: b.load_im(i),
    };
    let mut x: Vec<C> = (0..n).map(|k| load(&mut b, Input::Data(k))).collect();
    if spec.kind == CodeletKind::Twiddle {
        for l in 1..n {
            let w = load(&mut b, Input::Twiddle(l - 1));
            x[l] = cmul_var(&mut b, x[l], w);
        }
    }
    let mut y = match spec.algorithm {
        Algorithm::Ct => ct(&mut b, &x, spec.sign),
        Algorithm::SplitRadix => split_radix(&mut b, &x, spec.sign),
        Algorithm::Pfa => {
            let (n1, n2) = pfa_factors(n).ok_or(inapplicable)?;
            pfa(&mut b, &x, spec.sign, n1, n2)
        }
        Algorithm::Rader => rader(&mut b, &x, spec.sign),
    };
    if spec.kind == CodeletKind::TwiddleDif {
        for k in 1..n {
            let w = load(&mut b, Input::Twiddle(k - 1));
            y[k] = cmul_var(&mut b, y[k], w);
        }
    }
    for (k, v) in y.iter().enumerate() {
        b.store_re(k, v.re);
        b.store_im(k, v.im);
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(13), 2);
        assert_eq!(primitive_root(23), 5);
    }

    #[test]
    fn pfa_splits() {
        assert_eq!(pfa_factors(6), Some((2, 3)));
        assert_eq!(pfa_factors(12), Some((4, 3)));
        assert_eq!(pfa_factors(15), Some((3, 5)));
        assert_eq!(pfa_factors(8), None);
        assert_eq!(pfa_factors(34), None);
    }

    #[test]
    fn inapplicable_algorithms_are_rejected() {
        for (n, alg) in [(6, Algorithm::SplitRadix), (9, Algorithm::Rader), (16, Algorithm::Pfa)] {
            assert!(create_dag(&CodeletSpec::notw(n, alg)).is_err());
        }
        assert!(create_dag(&CodeletSpec::notw(0, Algorithm::Ct)).is_err());
    }
}
