//! Codelet kernels compiled from the generator at build time, plus the
//! generator dags themselves for interpreted execution.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use tunefft_codelet::{generate_best, CodeletKind, Dag};

/// `(ri, ii, is, ro, io, os)`, strides in `f64` units.
pub type NotwFn = unsafe fn(*const f64, *const f64, isize, *mut f64, *mut f64, isize);
/// As [`NotwFn`] with a trailing pointer to `n − 1` interleaved twiddles.
pub type TwFn = unsafe fn(*const f64, *const f64, isize, *mut f64, *mut f64, isize, *const f64);

pub struct Kernel<F> {
    pub n: usize,
    pub algorithm: &'static str,
    pub adds: usize,
    pub mults: usize,
    pub f: F,
}

impl<F> Kernel<F> {
    pub fn ops(&self) -> usize {
        self.adds + self.mults
    }
}

mod generated {
    #![allow(clippy::all, unused_unsafe)]
    use super::{Kernel, NotwFn, TwFn};
    include!(concat!(env!("OUT_DIR"), "/kernels.rs"));
}

/// Sizes with a direct codelet.
pub const SIZES: [usize; 11] = [2, 3, 4, 5, 7, 8, 11, 13, 16, 32, 64];

pub fn notw(n: usize) -> Option<&'static Kernel<NotwFn>> {
    generated::NOTW.iter().find(|k| k.n == n)
}

pub fn twiddle(n: usize) -> Option<&'static Kernel<TwFn>> {
    generated::TWIDDLE.iter().find(|k| k.n == n)
}

pub fn twiddle_dif(n: usize) -> Option<&'static Kernel<TwFn>> {
    generated::TWIDDLE_DIF.iter().find(|k| k.n == n)
}

pub fn has_codelet(n: usize) -> bool {
    SIZES.contains(&n)
}

/// The generator dag behind a compiled kernel, regenerated on first use.
pub fn dag(n: usize, kind: CodeletKind) -> Arc<Dag> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, CodeletKind), Arc<Dag>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    map.entry((n, kind))
        .or_insert_with(|| {
            Arc::new(
                generate_best(n, kind, -1)
                    .expect("codelet sizes are generable")
                    .dag,
            )
        })
        .clone()
}
