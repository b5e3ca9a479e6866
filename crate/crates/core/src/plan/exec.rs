//! Plan execution and the public `apply` entry points.

use num_complex::Complex64;
use tunefft_codelet::CodeletKind;

use super::mem::{LogMem, Memory, Port, RawMem};
use super::{Node, Plan, TwStep};
use crate::codelets::{self, NotwFn, TwFn};
use crate::problem::Sign;
use crate::Error;

type C64 = Complex64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Problems found by a logged execution.
pub type Violations = Vec<String>;

#[derive(Clone, Copy)]
enum Kern<'a> {
    Notw(NotwFn),
    Tw(TwFn, &'a [f64], CodeletKind),
}

/// One codelet call: `n` points read at `ip + j·is`, written at `op + k·os`.
#[inline]
fn codelet<M: Memory>(mem: &mut M, n: usize, k: Kern, ip: Port, is: isize, op: Port, os: isize) {
    if let (Some((ri, ii)), Some((ro, io))) = (mem.raw(ip), mem.raw(op)) {
        // SAFETY: addresses were bounds-checked by `Plan::apply*`
        unsafe {
            match k {
                Kern::Notw(f) => f(ri, ii, 2 * is, ro, io, 2 * os),
                Kern::Tw(f, w, _) => f(ri, ii, 2 * is, ro, io, 2 * os, w.as_ptr()),
            }
        }
        return;
    }
    let mut x = [ZERO; 64];
    let mut y = [ZERO; 64];
    for (j, v) in x[..n].iter_mut().enumerate() {
        *v = mem.load(ip, j as isize * is);
    }
    if mem.interpreted() {
        let (kind, w): (CodeletKind, Vec<C64>) = match k {
            Kern::Notw(_) => (CodeletKind::Notw, vec![]),
            Kern::Tw(_, w, kind) => (kind, w.chunks(2).take(n - 1).map(|c| C64::new(c[0], c[1])).collect()),
        };
        let out = tunefft_codelet::execute(&codelets::dag(n, kind), &x[..n], &w).expect("codelet arity");
        y[..n].copy_from_slice(&out);
    } else {
        let xr = x.as_ptr() as *const f64;
        let yr = y.as_mut_ptr() as *mut f64;
        // SAFETY: local arrays hold 64 complex values, n ≤ 64
        unsafe {
            match k {
                Kern::Notw(f) => f(xr, xr.add(1), 2, yr, yr.add(1), 2),
                Kern::Tw(f, w, _) => f(xr, xr.add(1), 2, yr, yr.add(1), 2, w.as_ptr()),
            }
        }
    }
    for (k, v) in y[..n].iter().enumerate() {
        mem.store(op, k as isize * os, *v);
    }
}

fn copy_rec<M: Memory>(mem: &mut M, dims: &[crate::IoDim], ip: Port, op: Port) {
    match dims {
        [] => {
            let v = mem.load(ip, 0);
            mem.store(op, 0, v);
        }
        [d] => {
            for j in 0..d.n as isize {
                let v = mem.load(ip, j * d.is);
                mem.store(op, j * d.os, v);
            }
        }
        [d, rest @ ..] => {
            for j in 0..d.n as isize {
                copy_rec(mem, rest, ip.at(j * d.is), op.at(j * d.os));
            }
        }
    }
}

fn swap<M: Memory>(mem: &mut M, ip: Port, op: Port, x: isize, y: isize) {
    let a = mem.load(ip, x);
    let b = mem.load(ip, y);
    mem.store(op, x, b);
    mem.store(op, y, a);
}

/// Swaps `(i, j) ↔ (j, i)` for `i` in `i0..i1`, `j` in `j0..j1`, all
/// above the diagonal.
#[allow(clippy::too_many_arguments)]
fn transpose_off<M: Memory>(mem: &mut M, ip: Port, op: Port, a: isize, b: isize, i0: usize, i1: usize, j0: usize, j1: usize) {
    if (i1 - i0) <= 8 && (j1 - j0) <= 8 {
        for i in i0..i1 {
            for j in j0.max(i + 1)..j1 {
                let (i, j) = (i as isize, j as isize);
                swap(mem, ip, op, i * a + j * b, j * a + i * b);
            }
        }
    } else if i1 - i0 >= j1 - j0 {
        let m = (i0 + i1) / 2;
        transpose_off(mem, ip, op, a, b, i0, m, j0, j1);
        transpose_off(mem, ip, op, a, b, m, i1, j0, j1);
    } else {
        let m = (j0 + j1) / 2;
        transpose_off(mem, ip, op, a, b, i0, i1, j0, m);
        transpose_off(mem, ip, op, a, b, i0, i1, m, j1);
    }
}

impl Plan {
    pub(super) fn exec<M: Memory>(&self, mem: &mut M, ip: Port, op: Port, sb: usize) {
        match &self.node {
            Node::Noop => {}
            Node::Copy { dims } => copy_rec(mem, dims, ip, op),
            Node::Transpose { n, a, b } => transpose_off(mem, ip, op, *a, *b, 0, *n, 0, *n),
            Node::Direct { n, kernel, is, os, v } => {
                for j in 0..v.n as isize {
                    codelet(mem, *n, Kern::Notw(kernel.f), ip.at(j * v.is), *is, op.at(j * v.os), *os);
                }
            }
            Node::Dit { r, m, o, v, c1, step } => {
                let (r, m, o) = (*r, *m, *o);
                c1.exec(mem, ip, op, sb);
                let w = op.work();
                let mo = m as isize * o;
                match step {
                    TwStep::Fused { kernel, tw } => {
                        for j in 0..v.n as isize {
                            let base = w.at(j * v.os);
                            for k in 0..m {
                                let t = &tw[2 * k * (r - 1)..];
                                let at = base.at(k as isize * o);
                                codelet(mem, r, Kern::Tw(kernel.f, t, CodeletKind::Twiddle), at, mo, at.work(), mo);
                            }
                        }
                    }
                    TwStep::Separate { tw, child } => {
                        for j in 0..v.n as isize {
                            let base = w.at(j * v.os);
                            for k in 0..m {
                                for l in 1..r {
                                    let i = k as isize * o + l as isize * mo;
                                    let x = mem.load(base, i);
                                    mem.store(base, i, x * tw[k * (r - 1) + l - 1]);
                                }
                            }
                        }
                        child.exec(mem, w, op, sb);
                    }
                }
            }
            Node::Dif { r, m, is, s, v, sv, step, c2 } => {
                let (r, m, is, s) = (*r, *m, *is, *s);
                let t = op.work();
                let (ms, mi) = (m as isize * s, m as isize * is);
                match step {
                    TwStep::Fused { kernel, tw } => {
                        for j in 0..v.n as isize {
                            for l in 0..m {
                                let w = &tw[2 * l * (r - 1)..];
                                let src = ip.at(j * v.is + l as isize * is);
                                let dst = t.at(j * sv + l as isize * s);
                                codelet(mem, r, Kern::Tw(kernel.f, w, CodeletKind::TwiddleDif), src, mi, dst, ms);
                            }
                        }
                    }
                    TwStep::Separate { tw, child } => {
                        child.exec(mem, ip, t, sb);
                        for j in 0..v.n as isize {
                            let base = t.at(j * sv);
                            for l in 0..m {
                                for k in 1..r {
                                    let i = l as isize * s + k as isize * ms;
                                    let x = mem.load(base, i);
                                    mem.store(base, i, x * tw[l * (r - 1) + k - 1]);
                                }
                            }
                        }
                    }
                }
                c2.exec(mem, t, op, sb);
            }
            Node::Loop { d, child } => {
                for j in 0..d.n as isize {
                    child.exec(mem, ip.at(j * d.is), op.at(j * d.os), sb);
                }
            }
            Node::Indirect { c1, c2 } => {
                c1.exec(mem, ip, op, sb);
                c2.exec(mem, op.work(), op, sb);
            }
            Node::Buffer { n, t, is, os, v, child } => {
                let (n, t) = (*n, *t);
                let a = Port::scratch(sb);
                let b = Port::scratch(sb + n * t);
                let csb = sb + 2 * n * t;
                for blk in 0..v.n / t {
                    for j in 0..t {
                        let src = ip.at((blk * t + j) as isize * v.is);
                        for l in 0..n {
                            let x = mem.load(src, l as isize * is);
                            mem.store(a, (j * n + l) as isize, x);
                        }
                    }
                    child.exec(mem, a, b, csb);
                    for j in 0..t {
                        let dst = op.at((blk * t + j) as isize * v.os);
                        for k in 0..n {
                            let y = mem.load(b, (j * n + k) as isize);
                            mem.store(dst, k as isize * os, y);
                        }
                    }
                }
            }
            Node::Rader { p, is, os, perm, out, bhat, child } => {
                let p1 = p - 1;
                let s = Port::scratch(sb);
                let t = Port::scratch(sb + p1);
                let csb = sb + 2 * p1;
                let x0 = mem.load(ip, 0);
                for (q, &g) in perm.iter().enumerate() {
                    let x = mem.load(ip, g as isize * is);
                    mem.store(s, q as isize, x);
                }
                child.exec(mem, s, t, csb);
                let a0 = mem.load(t, 0);
                for (k, b) in bhat.iter().enumerate() {
                    let y = mem.load(t, k as isize);
                    mem.store(t, k as isize, y * b);
                }
                child.exec(mem, t.swapped(), s.swapped(), csb);
                mem.store(op, 0, x0 + a0);
                for (j, &k) in out.iter().enumerate() {
                    let y = mem.load(s, j as isize);
                    mem.store(op, k as isize * os, x0 + y);
                }
            }
            Node::Bluestein { n, m, is, os, chirp, chat, child } => {
                let (n, m) = (*n, *m);
                let s = Port::scratch(sb);
                let t = Port::scratch(sb + m);
                let csb = sb + 2 * m;
                for (l, c) in chirp.iter().enumerate() {
                    let x = mem.load(ip, l as isize * is);
                    mem.store(s, l as isize, x * c.conj());
                }
                for l in n..m {
                    mem.store(s, l as isize, ZERO);
                }
                child.exec(mem, s, t, csb);
                for (k, c) in chat.iter().enumerate() {
                    let y = mem.load(t, k as isize);
                    mem.store(t, k as isize, y * c);
                }
                child.exec(mem, t.swapped(), s.swapped(), csb);
                for (k, c) in chirp.iter().enumerate() {
                    let y = mem.load(s, k as isize);
                    mem.store(op, k as isize * os, y * c.conj());
                }
            }
            Node::Generic { n, is, os, w } => {
                let n = *n;
                let s = Port::scratch(sb);
                for l in 0..n {
                    let x = mem.load(ip, l as isize * is);
                    mem.store(s, l as isize, x);
                }
                for k in 0..n {
                    let mut acc = ZERO;
                    let mut idx = 0;
                    for l in 0..n {
                        acc += mem.load(s, l as isize) * w[idx];
                        idx += k;
                        if idx >= n {
                            idx -= n;
                        }
                    }
                    mem.store(op, k as isize * os, acc);
                }
            }
            Node::RankReduce { passes } => {
                for (d, pass) in passes.iter().enumerate() {
                    if d == 0 {
                        pass.exec(mem, ip, op, sb);
                    } else {
                        pass.exec(mem, op.work(), op, sb);
                    }
                }
            }
        }
    }

    fn check_bounds(&self, len: usize, off: usize, output: bool) -> Result<(), Error> {
        if self.problem.is_empty() {
            return Ok(());
        }
        let (lo, _) = self.problem.all_dims().span(output);
        if (off as isize) + lo < 0 {
            return Err(Error::Invalid(format!(
                "offset {off} too small for negative strides, need {}",
                -lo
            )));
        }
        let need = self.problem.required_len(off, output);
        if len < need {
            return Err(Error::Bounds { len, need });
        }
        Ok(())
    }

    fn swap(&self) -> bool {
        self.problem.sign == Sign::Backward
    }

    /// Out-of-place transform with the data starting at offsets that keep
    /// every address non-negative.
    pub fn apply(&self, input: &[C64], output: &mut [C64]) -> Result<(), Error> {
        let (i, o) = (self.problem.min_offset(false), self.problem.min_offset(true));
        self.apply_at(input, i, output, o)
    }

    pub fn apply_at(&self, input: &[C64], in_off: usize, output: &mut [C64], out_off: usize) -> Result<(), Error> {
        if self.problem.inplace {
            return Err(Error::Invalid("in-place plan applied out of place".into()));
        }
        self.check_bounds(input.len(), in_off, false)?;
        self.check_bounds(output.len(), out_off, true)?;
        let mut scratch = vec![ZERO; self.scratch];
        let mut mem = RawMem {
            inp: input.as_ptr() as *mut C64,
            out: output.as_mut_ptr(),
            scratch: scratch.as_mut_ptr(),
            interp: false,
        };
        let sw = self.swap();
        self.exec(&mut mem, Port::input(in_off as isize, sw), Port::output(out_off as isize, sw), 0);
        Ok(())
    }

    pub fn apply_inplace(&self, data: &mut [C64]) -> Result<(), Error> {
        let off = self.problem.min_offset(false).max(self.problem.min_offset(true));
        self.apply_inplace_at(data, off)
    }

    pub fn apply_inplace_at(&self, data: &mut [C64], off: usize) -> Result<(), Error> {
        self.run_inplace(data, off, false)
    }

    fn run_inplace(&self, data: &mut [C64], off: usize, interp: bool) -> Result<(), Error> {
        if !self.problem.inplace {
            return Err(Error::Invalid("out-of-place plan applied in place".into()));
        }
        self.check_bounds(data.len(), off, false)?;
        self.check_bounds(data.len(), off, true)?;
        let mut scratch = vec![ZERO; self.scratch];
        let p = data.as_mut_ptr();
        let mut mem = RawMem {
            inp: p,
            out: p,
            scratch: scratch.as_mut_ptr(),
            interp,
        };
        let sw = self.swap();
        self.exec(&mut mem, Port::input(off as isize, sw), Port::output(off as isize, sw), 0);
        Ok(())
    }

    /// Applies the plan to a contiguous vector, in or out of place as the
    /// plan requires, and returns the result. Codelets run through the dag
    /// interpreter when `interpreted` is set.
    pub fn run(&self, x: &[C64], interpreted: bool) -> Result<Vec<C64>, Error> {
        if self.problem.inplace {
            let mut d = x.to_vec();
            self.run_inplace(&mut d, self.problem.min_offset(false).max(self.problem.min_offset(true)), interpreted)?;
            return Ok(d);
        }
        let mut out = vec![ZERO; self.problem.required_len(self.problem.min_offset(true), true)];
        if !interpreted {
            self.apply(x, &mut out)?;
            return Ok(out);
        }
        let (i, o) = (self.problem.min_offset(false), self.problem.min_offset(true));
        self.check_bounds(x.len(), i, false)?;
        let mut scratch = vec![ZERO; self.scratch];
        let mut mem = RawMem {
            inp: x.as_ptr() as *mut C64,
            out: out.as_mut_ptr(),
            scratch: scratch.as_mut_ptr(),
            interp: true,
        };
        let sw = self.swap();
        self.exec(&mut mem, Port::input(i as isize, sw), Port::output(o as isize, sw), 0);
        Ok(out)
    }

    /// Runs the plan through a shadow write log. Returns the output buffer
    /// (the input buffer when in place) and every read of an already
    /// overwritten input element or write to an out-of-place input.
    pub fn apply_logged(&self, input: Vec<C64>, output_len: usize) -> Result<(Vec<C64>, Violations), Error> {
        let ip = self.problem.inplace;
        let off_i = if ip {
            self.problem.min_offset(false).max(self.problem.min_offset(true))
        } else {
            self.problem.min_offset(false)
        };
        let off_o = if ip { off_i } else { self.problem.min_offset(true) };
        self.check_bounds(input.len(), off_i, false)?;
        if ip {
            self.check_bounds(input.len(), off_o, true)?;
        } else {
            self.check_bounds(output_len, off_o, true)?;
        }
        let mut mem = LogMem::new(input, vec![ZERO; if ip { 0 } else { output_len }], self.scratch, ip);
        let sw = self.swap();
        self.exec(&mut mem, Port::input(off_i as isize, sw), Port::output(off_o as isize, sw), 0);
        let out = if ip { mem.input } else { mem.output };
        Ok((out, mem.violations))
    }
}
