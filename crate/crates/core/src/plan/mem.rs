//! Memory seen by executing plans.
//!
//! Plans address three buffers (input, output and a scratch arena)
//! through [`Port`]s. A port with `swap` set exchanges real and imaginary
//! parts on every access, which turns a forward transform into a backward
//! one: `DFT₊(x) = swap(DFT₋(swap(x)))`.

use std::collections::HashSet;

use num_complex::Complex64;

type C64 = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Buf {
    In,
    Out,
    Scratch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Port {
    pub buf: Buf,
    pub off: isize,
    pub swap: bool,
    /// Reads through this port expect the caller's original input.
    pub orig: bool,
}

impl Port {
    pub fn input(off: isize, swap: bool) -> Port {
        Port {
            buf: Buf::In,
            off,
            swap,
            orig: true,
        }
    }

    pub fn output(off: isize, swap: bool) -> Port {
        Port {
            buf: Buf::Out,
            off,
            swap,
            orig: false,
        }
    }

    pub fn scratch(off: usize) -> Port {
        Port {
            buf: Buf::Scratch,
            off: off as isize,
            swap: false,
            orig: false,
        }
    }

    #[inline]
    pub fn at(self, d: isize) -> Port {
        Port {
            off: self.off + d,
            ..self
        }
    }

    /// Same place, holding intermediate data.
    pub fn work(self) -> Port {
        Port { orig: false, ..self }
    }

    pub fn swapped(self) -> Port {
        Port {
            swap: !self.swap,
            ..self
        }
    }
}

pub trait Memory {
    fn load(&mut self, p: Port, i: isize) -> C64;
    fn store(&mut self, p: Port, i: isize, v: C64);
    /// `(re, im)` pointers to the element at `p`, or `None` if every
    /// access must go through [`Memory::load`] and [`Memory::store`].
    fn raw(&mut self, p: Port) -> Option<(*mut f64, *mut f64)>;
    /// Run codelets through the dag interpreter instead of compiled code.
    fn interpreted(&self) -> bool {
        false
    }
}

#[inline(always)]
fn swap_if(v: C64, swap: bool) -> C64 {
    if swap {
        C64::new(v.im, v.re)
    } else {
        v
    }
}

/// Direct access to caller buffers. For in-place execution `inp` and
/// `out` are the same pointer.
pub struct RawMem {
    pub inp: *mut C64,
    pub out: *mut C64,
    pub scratch: *mut C64,
    pub interp: bool,
}

impl RawMem {
    #[inline(always)]
    fn ptr(&self, p: Port, i: isize) -> *mut C64 {
        let base = match p.buf {
            Buf::In => self.inp,
            Buf::Out => self.out,
            Buf::Scratch => self.scratch,
        };
        // SAFETY: plans only form addresses inside the bounds checked
        // before execution started
        unsafe { base.offset(p.off + i) }
    }
}

impl Memory for RawMem {
    #[inline(always)]
    fn load(&mut self, p: Port, i: isize) -> C64 {
        swap_if(unsafe { *self.ptr(p, i) }, p.swap)
    }

    #[inline(always)]
    fn store(&mut self, p: Port, i: isize, v: C64) {
        unsafe { *self.ptr(p, i) = swap_if(v, p.swap) }
    }

    #[inline(always)]
    fn raw(&mut self, p: Port) -> Option<(*mut f64, *mut f64)> {
        if self.interp {
            return None;
        }
        let re = self.ptr(p, 0) as *mut f64;
        let im = unsafe { re.add(1) };
        Some(if p.swap { (im, re) } else { (re, im) })
    }

    fn interpreted(&self) -> bool {
        self.interp
    }
}

/// Owned buffers with a shadow write log. Records every read of original
/// input data from an address the plan has already overwritten, and every
/// write to the input of an out-of-place transform.
pub struct LogMem {
    pub input: Vec<C64>,
    pub output: Vec<C64>,
    pub scratch: Vec<C64>,
    pub inplace: bool,
    written: HashSet<isize>,
    pub violations: Vec<String>,
    pub interp: bool,
}

impl LogMem {
    pub fn new(input: Vec<C64>, output: Vec<C64>, scratch: usize, inplace: bool) -> LogMem {
        LogMem {
            input,
            output,
            scratch: vec![C64::new(0.0, 0.0); scratch],
            inplace,
            written: HashSet::new(),
            violations: Vec::new(),
            interp: false,
        }
    }

    fn resolve(&self, b: Buf) -> Buf {
        if self.inplace && b == Buf::Out {
            Buf::In
        } else {
            b
        }
    }

    fn slot(&mut self, b: Buf, a: isize) -> &mut C64 {
        let a = usize::try_from(a).expect("negative address");
        match b {
            Buf::In => &mut self.input[a],
            Buf::Out => &mut self.output[a],
            Buf::Scratch => &mut self.scratch[a],
        }
    }
}

impl Memory for LogMem {
    fn load(&mut self, p: Port, i: isize) -> C64 {
        let b = self.resolve(p.buf);
        let a = p.off + i;
        if p.orig && b == Buf::In && self.written.contains(&a) {
            self.violations.push(format!("read of overwritten input element {a}"));
        }
        swap_if(*self.slot(b, a), p.swap)
    }

    fn store(&mut self, p: Port, i: isize, v: C64) {
        let b = self.resolve(p.buf);
        let a = p.off + i;
        if b == Buf::In {
            if !self.inplace {
                self.violations.push(format!("write to input element {a}"));
            }
            self.written.insert(a);
        }
        *self.slot(b, a) = swap_if(v, p.swap);
    }

    fn raw(&mut self, _: Port) -> Option<(*mut f64, *mut f64)> {
        None
    }

    fn interpreted(&self) -> bool {
        self.interp
    }
}
