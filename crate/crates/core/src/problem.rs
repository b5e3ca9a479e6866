//! I/O tensors and DFT problems.
//!
//! A problem `dft(N, V, I, O)` asks for a `rank(N)`-dimensional DFT of
//! size `N`, repeated over the vector loops `V`. Each dimension is a
//! triple `(n, is, os)` of length and input/output strides counted in
//! complex elements. Buffers are not part of the problem: they are passed
//! when a plan is applied, so a [`DftProblem`] records only whether input
//! and output coincide.

use std::fmt;

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IoDim {
    pub n: usize,
    pub is: isize,
    pub os: isize,
}

impl IoDim {
    pub const fn new(n: usize, is: isize, os: isize) -> IoDim {
        IoDim { n, is, os }
    }

    /// The same dimension reading with the output stride.
    pub fn out_only(self) -> IoDim {
        IoDim { is: self.os, ..self }
    }
}

impl fmt::Display for IoDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.n, self.is, self.os)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IoTensor {
    pub dims: Vec<IoDim>,
}

impl IoTensor {
    pub fn new(dims: Vec<IoDim>) -> IoTensor {
        IoTensor { dims }
    }

    pub fn empty() -> IoTensor {
        IoTensor { dims: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    /// Number of index tuples, 1 for rank zero.
    pub fn count(&self) -> usize {
        self.dims.iter().map(|d| d.n).product()
    }

    pub fn with(&self, d: IoDim) -> IoTensor {
        let mut dims = self.dims.clone();
        dims.push(d);
        IoTensor { dims }
    }

    pub fn concat(&self, other: &IoTensor) -> IoTensor {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        IoTensor { dims }
    }

    pub fn out_only(&self) -> IoTensor {
        IoTensor {
            dims: self.dims.iter().map(|d| d.out_only()).collect(),
        }
    }

    /// `(min, max)` offset reached through the input (or output) strides.
    pub fn span(&self, output: bool) -> (isize, isize) {
        let (mut lo, mut hi) = (0isize, 0isize);
        for d in &self.dims {
            if d.n == 0 {
                return (0, 0);
            }
            let s = if output { d.os } else { d.is };
            let reach = s * (d.n as isize - 1);
            if reach < 0 {
                lo += reach;
            } else {
                hi += reach;
            }
        }
        (lo, hi)
    }

    /// Whether two distinct index tuples can reach the same address.
    pub fn aliases(&self, output: bool) -> bool {
        let mut dims: Vec<(usize, isize)> = self
            .dims
            .iter()
            .filter(|d| d.n > 1)
            .map(|d| (d.n, if output { d.os } else { d.is }.abs()))
            .collect();
        if self.dims.iter().any(|d| d.n == 0) {
            return false;
        }
        if dims.iter().any(|&(_, s)| s == 0) {
            return true;
        }
        dims.sort_by_key(|&(_, s)| s);
        // nested strides: each dim jumps past everything below it
        let mut reach = 0isize;
        let nested = dims.iter().all(|&(n, s)| {
            let ok = s > reach;
            reach += s * (n as isize - 1);
            ok
        });
        if nested {
            return false;
        }
        let total: usize = dims.iter().map(|&(n, _)| n).product();
        if total > 1 << 22 {
            return true;
        }
        let mut addrs = vec![0isize];
        for &(n, s) in &dims {
            let mut next = Vec::with_capacity(addrs.len() * n);
            for &a in &addrs {
                for j in 0..n as isize {
                    next.push(a + j * s);
                }
            }
            addrs = next;
        }
        addrs.sort_unstable();
        addrs.windows(2).any(|w| w[0] == w[1])
    }
}

impl fmt::Display for IoTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dims.is_empty() {
            return f.write_str("-");
        }
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Exponent sign of the transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    /// `ω_n = exp(−2πi/n)`.
    Forward,
    /// Unnormalized inverse, `exp(+2πi/n)`.
    Backward,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Forward => -1,
            Sign::Backward => 1,
        }
    }

    pub fn from_value(v: i32) -> Option<Sign> {
        match v {
            -1 => Some(Sign::Forward),
            1 => Some(Sign::Backward),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DftProblem {
    /// Transform dimensions `N`.
    pub sz: IoTensor,
    /// Vector loops `V`.
    pub vecsz: IoTensor,
    pub inplace: bool,
    pub sign: Sign,
}

impl DftProblem {
    pub fn new(sz: IoTensor, vecsz: IoTensor, inplace: bool, sign: Sign) -> DftProblem {
        DftProblem {
            sz,
            vecsz,
            inplace,
            sign,
        }
    }

    /// Contiguous one-dimensional transform of length `n`.
    pub fn dft_1d(n: usize, sign: Sign, inplace: bool) -> DftProblem {
        DftProblem::new(
            IoTensor::new(vec![IoDim::new(n, 1, 1)]),
            IoTensor::empty(),
            inplace,
            sign,
        )
    }

    /// Row-major multi-dimensional transform over contiguous data.
    pub fn dft_nd(shape: &[usize], sign: Sign, inplace: bool) -> DftProblem {
        let mut dims = Vec::with_capacity(shape.len());
        let mut stride = 1isize;
        for &n in shape.iter().rev() {
            dims.push(IoDim::new(n, stride, stride));
            stride *= n as isize;
        }
        dims.reverse();
        DftProblem::new(IoTensor::new(dims), IoTensor::empty(), inplace, sign)
    }

    pub fn with_sign(&self, sign: Sign) -> DftProblem {
        DftProblem { sign, ..self.clone() }
    }

    pub fn forward(&self) -> DftProblem {
        self.with_sign(Sign::Forward)
    }

    /// Every dimension of `N` and `V` together.
    pub fn all_dims(&self) -> IoTensor {
        self.sz.concat(&self.vecsz)
    }

    pub fn is_empty(&self) -> bool {
        self.all_dims().dims.iter().any(|d| d.n == 0)
    }

    /// Whether every dimension reads and writes with the same stride.
    pub fn strides_match(&self) -> bool {
        self.all_dims().dims.iter().all(|d| d.is == d.os)
    }

    /// Canonical form: length-one dimensions dropped and `V` sorted by
    /// decreasing `|os|`, then decreasing `|is|`. A problem with a
    /// zero-length dimension keeps only that dimension in `V`. Rejects
    /// strides under which distinct outputs share an address.
    pub fn normalize(&self) -> Result<DftProblem, Error> {
        let all = self.all_dims();
        if all.aliases(true) || (self.inplace && all.aliases(false)) {
            return Err(Error::Aliasing(self.signature()));
        }
        if self.is_empty() {
            return Ok(DftProblem::new(
                IoTensor::empty(),
                IoTensor::new(vec![IoDim::new(0, 0, 0)]),
                self.inplace,
                self.sign,
            ));
        }
        let sz = IoTensor::new(self.sz.dims.iter().copied().filter(|d| d.n != 1).collect());
        let mut v: Vec<IoDim> = self.vecsz.dims.iter().copied().filter(|d| d.n != 1).collect();
        v.sort_by(|a, b| {
            b.os.abs()
                .cmp(&a.os.abs())
                .then(b.is.abs().cmp(&a.is.abs()))
                .then(a.n.cmp(&b.n))
                .then(a.os.cmp(&b.os))
                .then(a.is.cmp(&b.is))
        });
        Ok(DftProblem::new(sz, IoTensor::new(v), self.inplace, self.sign))
    }

    /// `dft n=<dims> v=<dims> inplace=<0|1> sign=<-1|1>`.
    pub fn signature(&self) -> String {
        format!(
            "dft n={} v={} inplace={} sign={}",
            self.sz,
            self.vecsz,
            self.inplace as u8,
            self.sign.value()
        )
    }

    pub fn parse_signature(s: &str) -> Result<DftProblem, String> {
        let mut sz = None;
        let mut v = None;
        let mut inplace = None;
        let mut sign = None;
        let mut words = s.split_whitespace();
        if words.next() != Some("dft") {
            return Err("signature must start with `dft`".into());
        }
        for w in words {
            let (key, val) = w.split_once('=').ok_or_else(|| format!("bad field `{w}`"))?;
            match key {
                "n" => sz = Some(parse_tensor(val)?),
                "v" => v = Some(parse_tensor(val)?),
                "inplace" => {
                    inplace = Some(match val {
                        "0" => false,
                        "1" => true,
                        _ => return Err(format!("bad inplace flag `{val}`")),
                    })
                }
                "sign" => {
                    let n: i32 = val.parse().map_err(|_| format!("bad sign `{val}`"))?;
                    sign = Some(Sign::from_value(n).ok_or_else(|| format!("bad sign `{val}`"))?);
                }
                _ => return Err(format!("unknown field `{key}`")),
            }
        }
        Ok(DftProblem::new(
            sz.ok_or("missing n=")?,
            v.ok_or("missing v=")?,
            inplace.ok_or("missing inplace=")?,
            sign.ok_or("missing sign=")?,
        ))
    }

    /// Smallest buffer length (from offset 0) holding every input or
    /// output element when the data starts at `offset`.
    pub fn required_len(&self, offset: usize, output: bool) -> usize {
        if self.is_empty() {
            return 0;
        }
        let (_, hi) = self.all_dims().span(output);
        offset + hi as usize + 1
    }

    /// The base offset that keeps every address non-negative.
    pub fn min_offset(&self, output: bool) -> usize {
        (-self.all_dims().span(output).0) as usize
    }
}

fn parse_tensor(s: &str) -> Result<IoTensor, String> {
    if s == "-" {
        return Ok(IoTensor::empty());
    }
    let mut dims = Vec::new();
    for part in s.split(',') {
        let f: Vec<&str> = part.split(':').collect();
        let [n, is, os] = f[..] else {
            return Err(format!("bad dimension `{part}`"));
        };
        let bad = |_| format!("bad dimension `{part}`");
        dims.push(IoDim::new(n.parse().map_err(bad)?, is.parse().map_err(bad)?, os.parse().map_err(bad)?));
    }
    Ok(IoTensor::new(dims))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(dims: &[(usize, isize, isize)]) -> IoTensor {
        IoTensor::new(dims.iter().map(|&(n, i, o)| IoDim::new(n, i, o)).collect())
    }

    #[test]
    fn single_iteration_loops_vanish() {
        let p = DftProblem::new(v(&[(4, 1, 1)]), v(&[(1, 5, 7)]), false, Sign::Forward);
        assert_eq!(p.normalize().unwrap().vecsz, IoTensor::empty());
    }

    #[test]
    fn vector_loops_sorted_by_stride() {
        let p = DftProblem::new(v(&[(5, 2, 2)]), v(&[(2, 1, 1), (3, 10, 10)]), false, Sign::Forward);
        assert_eq!(p.normalize().unwrap().vecsz, v(&[(3, 10, 10), (2, 1, 1)]));
        let q = DftProblem::dft_1d(4, Sign::Forward, false);
        assert_eq!(q.normalize().unwrap(), q);
    }

    #[test]
    fn aliasing_strides_are_rejected() {
        let p = DftProblem::new(v(&[(4, 1, 1)]), v(&[(2, 1, 2)]), false, Sign::Forward);
        assert!(matches!(p.normalize(), Err(Error::Aliasing(_))));
        let q = DftProblem::new(v(&[(4, 1, 0)]), IoTensor::empty(), false, Sign::Forward);
        assert!(q.normalize().is_err());
        // interleaved but distinct
        let r = DftProblem::new(v(&[(4, 2, 2)]), v(&[(2, 1, 1)]), false, Sign::Forward);
        assert!(r.normalize().is_ok());
    }

    #[test]
    fn signature_round_trip() {
        let p = DftProblem::new(v(&[(8, 2, -1)]), v(&[(3, 16, 8)]), true, Sign::Backward);
        let s = p.signature();
        assert_eq!(s, "dft n=8:2:-1 v=3:16:8 inplace=1 sign=1");
        assert_eq!(DftProblem::parse_signature(&s).unwrap(), p);
        let e = DftProblem::dft_1d(8, Sign::Forward, false).signature();
        assert_eq!(e, "dft n=8:1:1 v=- inplace=0 sign=-1");
    }

    #[test]
    fn spans_with_negative_strides() {
        let t = v(&[(4, -1, 1), (2, 8, 8)]);
        assert_eq!(t.span(false), (-3, 8));
        assert_eq!(t.span(true), (0, 11));
    }
}
