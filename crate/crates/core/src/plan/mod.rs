//! Executable plans.
//!
//! A [`Recipe`] names the algorithmic steps; [`Plan::new`] instantiates it
//! for a concrete problem, deriving every subproblem, checking that each
//! step applies and precomputing twiddle tables. Plans are immutable and
//! may be applied concurrently to disjoint buffers.

mod exec;
pub mod mem;
mod recipe;

use std::sync::Arc;

use num_complex::Complex64;
use tunefft_codelet::roots::unit_root;

use crate::codelets::{self, Kernel, NotwFn, TwFn};
use crate::problem::{DftProblem, IoDim, IoTensor, Sign};
use crate::twiddle::{exact_root, TwiddleKind, TwiddleProvider};
use crate::Error;

pub use exec::Violations;
pub use recipe::Recipe;

type C64 = Complex64;

/// Per-node overhead in the cost estimate, in operations.
pub const NODE_OVERHEAD: f64 = 16.0;
/// Weight of one non-unit-stride access in the cost estimate.
pub const STRIDE_PENALTY: f64 = 0.5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PlanOptions {
    /// Provider of the Cooley-Tukey twiddle tables.
    pub twiddle: TwiddleKind,
}

pub struct Plan {
    pub recipe: Arc<Recipe>,
    /// The normalized problem this plan solves.
    pub problem: DftProblem,
    node: Node,
    scratch: usize,
    cost: f64,
}

/// The vector loop of a node that allows at most one; `n = 1` if absent.
#[derive(Clone, Copy, Debug)]
struct VLoop {
    n: usize,
    is: isize,
    os: isize,
}

impl VLoop {
    fn of(v: &IoTensor) -> Option<VLoop> {
        match v.dims[..] {
            [] => Some(VLoop { n: 1, is: 0, os: 0 }),
            [d] => Some(VLoop { n: d.n, is: d.is, os: d.os }),
            _ => None,
        }
    }

    fn tensor(self, is: isize, os: isize) -> IoTensor {
        if self.n == 1 {
            IoTensor::empty()
        } else {
            IoTensor::new(vec![IoDim::new(self.n, is, os)])
        }
    }
}

enum TwStep {
    Fused {
        kernel: &'static Kernel<TwFn>,
        /// `m·(r−1)` twiddles interleaved as re, im.
        tw: Vec<f64>,
    },
    Separate {
        tw: Vec<C64>,
        child: Box<Plan>,
    },
}

enum Node {
    Noop,
    Copy {
        dims: Vec<IoDim>,
    },
    Transpose {
        n: usize,
        a: isize,
        b: isize,
    },
    Direct {
        n: usize,
        kernel: &'static Kernel<NotwFn>,
        is: isize,
        os: isize,
        v: VLoop,
    },
    Dit {
        r: usize,
        m: usize,
        o: isize,
        v: VLoop,
        c1: Box<Plan>,
        step: TwStep,
    },
    Dif {
        r: usize,
        m: usize,
        is: isize,
        s: isize,
        v: VLoop,
        sv: isize,
        step: TwStep,
        c2: Box<Plan>,
    },
    Loop {
        d: IoDim,
        child: Box<Plan>,
    },
    Indirect {
        c1: Box<Plan>,
        c2: Box<Plan>,
    },
    Buffer {
        n: usize,
        t: usize,
        is: isize,
        os: isize,
        v: VLoop,
        child: Box<Plan>,
    },
    Rader {
        p: usize,
        is: isize,
        os: isize,
        perm: Vec<usize>,
        out: Vec<usize>,
        bhat: Vec<C64>,
        child: Box<Plan>,
    },
    Bluestein {
        n: usize,
        m: usize,
        is: isize,
        os: isize,
        chirp: Vec<C64>,
        chat: Vec<C64>,
        child: Box<Plan>,
    },
    Generic {
        n: usize,
        is: isize,
        os: isize,
        w: Vec<C64>,
    },
    RankReduce {
        passes: Vec<Plan>,
    },
}

fn inapplicable(r: &Recipe, p: &DftProblem, why: &str) -> Error {
    Error::Inapplicable(format!("{r} on `{}`: {why}", p.signature()))
}

/// Smallest primitive root modulo the prime `p`.
pub fn primitive_root(p: usize) -> usize {
    let phi = p - 1;
    let mut factors = Vec::new();
    let mut m = phi;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, phi / f, p) != 1))
        .unwrap_or(1)
}

fn pow_mod(b: usize, mut e: usize, m: usize) -> usize {
    let (mut acc, mut b) = (1u128, b as u128 % m as u128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    acc as usize
}

/// The input order `g^q mod p`, `q = 0..p−1`, of Rader's algorithm.
pub fn rader_permutation(p: usize) -> Vec<usize> {
    let g = primitive_root(p);
    let mut v = Vec::with_capacity(p - 1);
    let mut x = 1;
    for _ in 0..p - 1 {
        v.push(x);
        x = x * g % p;
    }
    v
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Smallest power of two `≥ 2n − 1`.
pub fn bluestein_length(n: usize) -> usize {
    (2 * n).saturating_sub(1).max(1).next_power_of_two()
}

/// Whether the dimensions read and write the same set of addresses.
fn same_address_set(dims: &[IoDim]) -> bool {
    let mut a: Vec<(usize, isize)> = dims.iter().map(|d| (d.n, d.is)).collect();
    let mut b: Vec<(usize, isize)> = dims.iter().map(|d| (d.n, d.os)).collect();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// Subproblems of each step, shared by instantiation and the planner.
pub mod sub {
    use super::*;

    pub fn dit_c1(p: &DftProblem, r: usize) -> DftProblem {
        let d = p.sz.dims[0];
        let m = d.n / r;
        DftProblem::new(
            IoTensor::new(vec![IoDim::new(m, r as isize * d.is, d.os)]),
            p.vecsz.with(IoDim::new(r, d.is, m as isize * d.os)),
            p.inplace,
            Sign::Forward,
        )
    }

    /// The size-`r` transforms of a Cooley-Tukey DIT step, in place on
    /// the output.
    pub fn dit_c2(p: &DftProblem, r: usize) -> DftProblem {
        let d = p.sz.dims[0];
        let m = d.n / r;
        let o = d.os;
        let v: Vec<IoDim> = p.vecsz.dims.iter().map(|x| x.out_only()).collect();
        DftProblem::new(
            IoTensor::new(vec![IoDim::new(r, m as isize * o, m as isize * o)]),
            IoTensor::new(v).with(IoDim::new(m, o, o)),
            true,
            Sign::Forward,
        )
    }

    /// `(s, s_v)`: where a DIF step keeps its intermediate array.
    pub fn dif_layout(p: &DftProblem) -> (isize, isize) {
        let d = p.sz.dims[0];
        let v = VLoop::of(&p.vecsz).unwrap_or(VLoop { n: 1, is: 0, os: 0 });
        if p.inplace {
            (d.is, v.is)
        } else {
            (d.os, v.os)
        }
    }

    /// The size-`r` transforms of a DIF step, from the input into the
    /// intermediate array.
    pub fn dif_c1(p: &DftProblem, r: usize) -> DftProblem {
        let d = p.sz.dims[0];
        let m = d.n / r;
        let (s, sv) = dif_layout(p);
        let v = VLoop::of(&p.vecsz).unwrap_or(VLoop { n: 1, is: 0, os: 0 });
        DftProblem::new(
            IoTensor::new(vec![IoDim::new(r, m as isize * d.is, m as isize * s)]),
            v.tensor(v.is, sv).with(IoDim::new(m, d.is, s)),
            p.inplace,
            Sign::Forward,
        )
    }

    pub fn dif_c2(p: &DftProblem, r: usize) -> DftProblem {
        let d = p.sz.dims[0];
        let m = d.n / r;
        let (s, sv) = dif_layout(p);
        let v = VLoop::of(&p.vecsz).unwrap_or(VLoop { n: 1, is: 0, os: 0 });
        DftProblem::new(
            IoTensor::new(vec![IoDim::new(m, s, r as isize * d.os)]),
            v.tensor(sv, v.os).with(IoDim::new(r, m as isize * s, d.os)),
            true,
            Sign::Forward,
        )
    }

    pub fn loop_child(p: &DftProblem, dim: usize) -> DftProblem {
        let mut v = p.vecsz.dims.clone();
        v.remove(dim);
        DftProblem::new(p.sz.clone(), IoTensor::new(v), p.inplace, Sign::Forward)
    }

    pub fn indirect_c1(p: &DftProblem) -> DftProblem {
        DftProblem::new(IoTensor::empty(), p.all_dims(), p.inplace, Sign::Forward)
    }

    pub fn indirect_c2(p: &DftProblem) -> DftProblem {
        DftProblem::new(p.sz.out_only(), p.vecsz.out_only(), true, Sign::Forward)
    }

    pub fn buffer_child(n: usize, t: usize) -> DftProblem {
        DftProblem::new(
            IoTensor::new(vec![IoDim::new(n, 1, 1)]),
            IoTensor::new(vec![IoDim::new(t, n as isize, n as isize)]),
            false,
            Sign::Forward,
        )
    }

    pub fn contiguous(n: usize) -> DftProblem {
        DftProblem::dft_1d(n, Sign::Forward, false)
    }

    pub fn rank_pass(p: &DftProblem, d: usize) -> DftProblem {
        let n = &p.sz.dims;
        let others: Vec<IoDim> = n.iter().enumerate().filter(|&(i, _)| i != d).map(|(_, x)| *x).collect();
        let v = p.vecsz.concat(&IoTensor::new(others));
        if d == 0 {
            DftProblem::new(IoTensor::new(vec![n[0]]), v, p.inplace, Sign::Forward)
        } else {
            DftProblem::new(IoTensor::new(vec![n[d].out_only()]), v.out_only(), true, Sign::Forward)
        }
    }

    /// The recipe an in-place composite stands for.
    pub fn inplace_tree(p: &DftProblem, q: usize, m: usize, child: Arc<Recipe>) -> Result<Recipe, Error> {
        let twist = if m == 1 {
            Arc::new(Recipe::Transpose(q))
        } else {
            let dit1 = dit_c1(p, q);
            let c2 = dif_c2(&dit1, q).normalize()?;
            let moves = indirect_c1(&c2).normalize()?;
            let k = moves
                .vecsz
                .dims
                .iter()
                .position(|d| d.n == m && d.is == d.os)
                .ok_or_else(|| Error::Inapplicable(format!("no transpose loop in `{}`", moves.signature())))?;
            Arc::new(Recipe::Indirect {
                c1: Arc::new(Recipe::Loop {
                    dim: k,
                    child: Arc::new(Recipe::Transpose(q)),
                }),
                c2: child,
            })
        };
        Ok(Recipe::Dit {
            r: q,
            c1: Arc::new(Recipe::Dif {
                r: q,
                c1: Arc::new(Recipe::DirectTw(q)),
                c2: twist,
            }),
            c2: Arc::new(Recipe::DirectTw(q)),
        })
    }
}

fn tw_table(opts: &PlanOptions, n: usize, m: usize, r: usize) -> Vec<C64> {
    let prov = TwiddleProvider::new(opts.twiddle, n);
    let mut t = Vec::with_capacity(m * (r - 1));
    for k in 0..m {
        for l in 1..r {
            t.push(prov.lookup(l * k));
        }
    }
    t
}

fn interleave(t: &[C64]) -> Vec<f64> {
    t.iter().flat_map(|c| [c.re, c.im]).collect()
}

impl Plan {
    /// Instantiates `recipe` for `problem`.
    pub fn new(recipe: Arc<Recipe>, problem: &DftProblem, opts: &PlanOptions) -> Result<Plan, Error> {
        let p = problem.normalize()?;
        let rc = &*recipe;
        let bad = |why: &str| inapplicable(rc, &p, why);
        let child = |r: &Arc<Recipe>, q: &DftProblem| Plan::new(r.clone(), q, opts).map(Box::new);
        let rank_n = p.sz.rank();
        let one = |p: &DftProblem| -> Option<IoDim> { (p.sz.rank() == 1).then(|| p.sz.dims[0]) };
        let node = match rc {
            Recipe::Copy => {
                if rank_n != 0 {
                    return Err(bad("copy needs a rank-0 problem"));
                }
                if p.is_empty() || (p.inplace && p.strides_match()) {
                    Node::Noop
                } else if p.inplace {
                    return Err(bad("in-place copy with differing strides"));
                } else {
                    Node::Copy { dims: p.vecsz.dims.clone() }
                }
            }
            Recipe::Transpose(n) => {
                let ok = rank_n == 0 && p.inplace && p.vecsz.rank() == 2 && {
                    let [a, b] = [p.vecsz.dims[0], p.vecsz.dims[1]];
                    a.n == *n && b.n == *n && a.is == b.os && a.os == b.is
                };
                if !ok {
                    return Err(bad("not an in-place square transposition"));
                }
                let d = p.vecsz.dims[0];
                Node::Transpose { n: *n, a: d.is, b: d.os }
            }
            Recipe::Direct(n) => {
                let d = one(&p).filter(|d| d.n == *n).ok_or_else(|| bad("size mismatch"))?;
                let kernel = codelets::notw(*n).ok_or_else(|| bad("no codelet of this size"))?;
                let v = VLoop::of(&p.vecsz).ok_or_else(|| bad("vector rank above one"))?;
                if p.inplace && (d.is != d.os || v.is != v.os) {
                    return Err(bad("in-place with differing strides"));
                }
                Node::Direct {
                    n: *n,
                    kernel,
                    is: d.is,
                    os: d.os,
                    v,
                }
            }
            Recipe::DirectTw(_) => return Err(bad("twiddle codelets only run inside a Cooley-Tukey step")),
            Recipe::Dit { r, c1, c2 } => {
                let (r, d) = (*r, one(&p).ok_or_else(|| bad("needs rank-1 N"))?);
                if r < 2 || r >= d.n || d.n % r != 0 {
                    return Err(bad("radix does not split n"));
                }
                let v = VLoop::of(&p.vecsz).ok_or_else(|| bad("vector rank above one"))?;
                let m = d.n / r;
                let c1 = child(c1, &sub::dit_c1(&p, r))?;
                let tw = tw_table(opts, d.n, m, r);
                let step = match **c2 {
                    Recipe::DirectTw(rr) if rr == r => TwStep::Fused {
                        kernel: codelets::twiddle(r).ok_or_else(|| bad("no twiddle codelet"))?,
                        tw: interleave(&tw),
                    },
                    Recipe::DirectTw(_) => return Err(bad("twiddle codelet size differs from radix")),
                    _ => TwStep::Separate {
                        tw,
                        child: child(c2, &sub::dit_c2(&p, r))?,
                    },
                };
                Node::Dit {
                    r,
                    m,
                    o: d.os,
                    v,
                    c1,
                    step,
                }
            }
            Recipe::Dif { r, c1, c2 } => {
                let (r, d) = (*r, one(&p).ok_or_else(|| bad("needs rank-1 N"))?);
                if r < 2 || r > d.n || d.n % r != 0 {
                    return Err(bad("radix does not split n"));
                }
                let v = VLoop::of(&p.vecsz).ok_or_else(|| bad("vector rank above one"))?;
                let m = d.n / r;
                let (s, sv) = sub::dif_layout(&p);
                // table[ℓ1][k2 − 1] = ω_n^{ℓ1·k2}
                let tw = tw_table(opts, d.n, m, r);
                let step = match **c1 {
                    Recipe::DirectTw(rr) if rr == r => TwStep::Fused {
                        kernel: codelets::twiddle_dif(r).ok_or_else(|| bad("no twiddle codelet"))?,
                        tw: interleave(&tw),
                    },
                    Recipe::DirectTw(_) => return Err(bad("twiddle codelet size differs from radix")),
                    _ => TwStep::Separate {
                        tw,
                        child: child(c1, &sub::dif_c1(&p, r))?,
                    },
                };
                let c2 = child(c2, &sub::dif_c2(&p, r))?;
                Node::Dif {
                    r,
                    m,
                    is: d.is,
                    s,
                    v,
                    sv,
                    step,
                    c2,
                }
            }
            Recipe::Loop { dim, child: c } => {
                let d = *p.vecsz.dims.get(*dim).ok_or_else(|| bad("no such vector dimension"))?;
                let sub = sub::loop_child(&p, *dim);
                if p.inplace && (d.is != d.os || !same_address_set(&sub.all_dims().dims)) {
                    return Err(bad("in-place iterations would overlap"));
                }
                Node::Loop { d, child: child(c, &sub)? }
            }
            Recipe::Indirect { c1, c2 } => {
                if rank_n == 0 {
                    return Err(bad("needs rank(N) > 0"));
                }
                if p.inplace && p.strides_match() {
                    return Err(bad("in-place with matching strides"));
                }
                Node::Indirect {
                    c1: child(c1, &sub::indirect_c1(&p))?,
                    c2: child(c2, &sub::indirect_c2(&p))?,
                }
            }
            Recipe::Buffer { b, child: c } => {
                let d = one(&p).ok_or_else(|| bad("needs rank-1 N"))?;
                let v = VLoop::of(&p.vecsz).ok_or_else(|| bad("vector rank above one"))?;
                let n = d.n;
                if *b == 0 || b % n != 0 || v.n % (b / n) != 0 {
                    return Err(bad("block must hold whole transforms dividing the loop"));
                }
                let t = b / n;
                let contiguous = d.is == 1 && d.os == 1 && (v.n == 1 || (v.is == n as isize && v.os == n as isize));
                if contiguous && !p.inplace {
                    return Err(bad("already contiguous"));
                }
                if p.inplace && (d.is != d.os || v.is != v.os) && t != v.n {
                    return Err(bad("in-place with differing strides needs one block"));
                }
                Node::Buffer {
                    n,
                    t,
                    is: d.is,
                    os: d.os,
                    v,
                    child: child(c, &sub::buffer_child(n, t))?,
                }
            }
            Recipe::Rader { p: pr, child: c } => {
                let d = one(&p).filter(|d| d.n == *pr).ok_or_else(|| bad("size mismatch"))?;
                if !p.vecsz.dims.is_empty() || *pr < 3 || !is_prime(*pr) {
                    return Err(bad("needs a prime size ≥ 3 without vector loops"));
                }
                let pr = *pr;
                let c = child(c, &sub::contiguous(pr - 1))?;
                let g = primitive_root(pr);
                let perm = rader_permutation(pr);
                let ginv = pow_mod(g, pr - 2, pr);
                let mut out = Vec::with_capacity(pr - 1);
                let mut x = 1;
                for _ in 0..pr - 1 {
                    out.push(x);
                    x = x * ginv % pr;
                }
                let scale = 1.0 / (pr - 1) as f64;
                let b: Vec<C64> = out.iter().map(|&e| exact_root(e, pr, Sign::Forward) * scale).collect();
                let bhat = c.run_forward(&b);
                Node::Rader {
                    p: pr,
                    is: d.is,
                    os: d.os,
                    perm,
                    out,
                    bhat,
                    child: c,
                }
            }
            Recipe::Bluestein { n, m, child: c } => {
                let d = one(&p).filter(|d| d.n == *n).ok_or_else(|| bad("size mismatch"))?;
                if !p.vecsz.dims.is_empty() {
                    return Err(bad("needs no vector loops"));
                }
                let (n, m) = (*n, *m);
                if !m.is_power_of_two() || m < 2 * n - 1 {
                    return Err(bad("padded length must be a power of two ≥ 2n − 1"));
                }
                let c = child(c, &sub::contiguous(m))?;
                let chirp: Vec<C64> = (0..n)
                    .map(|j| {
                        let e = (j as u128 * j as u128 % (2 * n) as u128) as i64;
                        let (co, si) = unit_root(e, 2 * n as u64);
                        C64::new(co, si)
                    })
                    .collect();
                let scale = 1.0 / m as f64;
                let mut pad = vec![C64::new(0.0, 0.0); m];
                for j in 0..n {
                    pad[j] = chirp[j] * scale;
                    if j > 0 {
                        pad[m - j] = chirp[j] * scale;
                    }
                }
                let chat = c.run_forward(&pad);
                Node::Bluestein {
                    n,
                    m,
                    is: d.is,
                    os: d.os,
                    chirp,
                    chat,
                    child: c,
                }
            }
            Recipe::Generic(n) => {
                let d = one(&p).filter(|d| d.n == *n).ok_or_else(|| bad("size mismatch"))?;
                if !p.vecsz.dims.is_empty() {
                    return Err(bad("needs no vector loops"));
                }
                Node::Generic {
                    n: *n,
                    is: d.is,
                    os: d.os,
                    w: (0..*n).map(|j| exact_root(j, *n, Sign::Forward)).collect(),
                }
            }
            Recipe::RankReduce(cs) => {
                if rank_n < 2 || cs.len() != rank_n {
                    return Err(bad("needs one pass per dimension of N, rank ≥ 2"));
                }
                let passes = cs
                    .iter()
                    .enumerate()
                    .map(|(d, c)| Plan::new(c.clone(), &sub::rank_pass(&p, d), opts))
                    .collect::<Result<Vec<_>, _>>()?;
                Node::RankReduce { passes }
            }
            Recipe::Inplace { p: pp, q, m, child: c } => {
                let d = one(&p).ok_or_else(|| bad("needs rank-1 N"))?;
                if pp != q {
                    return Err(bad("only square composites"));
                }
                if !p.inplace || !p.vecsz.dims.is_empty() || d.is != d.os || pp * q * m != d.n || *q < 2 {
                    return Err(bad("needs an in-place transform of size p·q·m with matching strides"));
                }
                let tree = sub::inplace_tree(&p, *q, *m, c.clone())?;
                let mut plan = Plan::new(Arc::new(tree), &p, opts)?;
                plan.recipe = recipe.clone();
                plan.problem = p;
                return Ok(plan);
            }
        };
        let scratch = node.scratch();
        let mut plan = Plan {
            recipe,
            problem: p,
            node,
            scratch,
            cost: 0.0,
        };
        plan.cost = plan.node.cost();
        Ok(plan)
    }

    pub fn parse(sexpr: &str, problem: &DftProblem, opts: &PlanOptions) -> Result<Plan, Error> {
        Plan::new(Arc::new(Recipe::parse(sexpr)?), problem, opts)
    }

    pub fn sexpr(&self) -> String {
        self.recipe.to_string()
    }

    /// Deterministic operation-count estimate; lower is better.
    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// Scratch elements one application needs.
    pub fn scratch_len(&self) -> usize {
        self.scratch
    }

    /// Runs the plan forward on a contiguous copy of `x`, as used for
    /// precomputing transformed convolution kernels.
    fn run_forward(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        let mut scratch = vec![C64::new(0.0, 0.0); self.scratch];
        let mut mem = mem::RawMem {
            inp: x.as_ptr() as *mut C64,
            out: out.as_mut_ptr(),
            scratch: scratch.as_mut_ptr(),
            interp: false,
        };
        self.exec(&mut mem, mem::Port::input(0, false), mem::Port::output(0, false), 0);
        out
    }
}

impl Node {
    fn scratch(&self) -> usize {
        match self {
            Node::Noop | Node::Copy { .. } | Node::Transpose { .. } | Node::Direct { .. } => 0,
            Node::Dit { c1, step, .. } => c1.scratch.max(step.scratch()),
            Node::Dif { c2, step, .. } => c2.scratch.max(step.scratch()),
            Node::Loop { child, .. } => child.scratch,
            Node::Indirect { c1, c2 } => c1.scratch.max(c2.scratch),
            Node::Buffer { n, t, child, .. } => 2 * n * t + child.scratch,
            Node::Rader { p, child, .. } => 2 * (p - 1) + child.scratch,
            Node::Bluestein { m, child, .. } => 2 * m + child.scratch,
            Node::Generic { n, .. } => *n,
            Node::RankReduce { passes } => passes.iter().map(|p| p.scratch).max().unwrap_or(0),
        }
    }

    fn cost(&self) -> f64 {
        let pen = |n: usize, s: isize| if s.abs() == 1 { 0.0 } else { STRIDE_PENALTY * n as f64 };
        let body = match self {
            Node::Noop => return 0.0,
            Node::Copy { dims } => dims.iter().map(|d| d.n).product::<usize>() as f64,
            Node::Transpose { n, .. } => 2.0 * (n * n) as f64,
            Node::Direct { n, kernel, is, os, v } => {
                v.n as f64 * (kernel.ops() as f64 + pen(*n, *is) + pen(*n, *os))
            }
            Node::Dit { r, m, o, v, c1, step } => {
                let s = *m as isize * o;
                c1.cost + step.cost(*r, *m, v.n, s, s)
            }
            Node::Dif { r, m, is, s, v, step, c2, .. } => {
                c2.cost + step.cost(*r, *m, v.n, *m as isize * is, *m as isize * s)
            }
            Node::Loop { d, child } => d.n as f64 * child.cost,
            Node::Indirect { c1, c2 } => c1.cost + c2.cost,
            Node::Buffer { n, t, v, child, .. } => {
                (v.n / t) as f64 * child.cost + 2.0 * (n * v.n) as f64
            }
            Node::Rader { p, child, .. } => 2.0 * child.cost + 10.0 * *p as f64,
            Node::Bluestein { n, m, child, .. } => 2.0 * child.cost + 6.0 * *m as f64 + 12.0 * *n as f64,
            Node::Generic { n, .. } => 8.0 * (n * n) as f64,
            Node::RankReduce { passes } => passes.iter().map(|p| p.cost).sum(),
        };
        body + NODE_OVERHEAD
    }
}

impl TwStep {
    fn scratch(&self) -> usize {
        match self {
            TwStep::Fused { .. } => 0,
            TwStep::Separate { child, .. } => child.scratch,
        }
    }

    fn cost(&self, r: usize, m: usize, vn: usize, is: isize, os: isize) -> f64 {
        match self {
            TwStep::Fused { kernel, .. } => {
                let pen = |s: isize| if s.abs() == 1 { 0.0 } else { STRIDE_PENALTY * r as f64 };
                (vn * m) as f64 * (kernel.ops() as f64 + pen(is) + pen(os))
            }
            TwStep::Separate { child, .. } => child.cost + 6.0 * ((r - 1) * m * vn) as f64,
        }
    }
}
