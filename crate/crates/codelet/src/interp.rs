//! Direct evaluation of dags.

use num_complex::Complex64;

use crate::dag::{Dag, Input, Op};
use crate::GenError;

/// Evaluates `dag` in node order.
pub fn execute(dag: &Dag, x: &[Complex64], w: &[Complex64]) -> Result<Vec<Complex64>, GenError> {
    if x.len() != dag.n {
        return Err(GenError::Arity {
            expected: dag.n,
            got: x.len(),
        });
    }
    if w.len() != dag.twiddles {
        return Err(GenError::Arity {
            expected: dag.twiddles,
            got: w.len(),
        });
    }
    let mut y = vec![Complex64::new(0.0, 0.0); dag.n];
    let mut val = vec![0.0f64; dag.nodes.len()];
    let fetch = |i: Input| match i {
        Input::Data(k) => x[k],
        Input::Twiddle(k) => w[k],
    };
    for (id, op) in dag.nodes.iter().enumerate() {
        val[id] = match *op {
            Op::LoadRe(i) => fetch(i).re,
            Op::LoadIm(i) => fetch(i).im,
            Op::Zero => 0.0,
            Op::Add(a, b) => val[a] + val[b],
            Op::Sub(a, b) => val[a] - val[b],
            Op::Neg(a) => -val[a],
            Op::MulConst(a, c) => val[a] * c,
            Op::Mul(a, b) => val[a] * val[b],
            Op::StoreRe(k, a) => {
                y[k].re = val[a];
                0.0
            }
            Op::StoreIm(k, a) => {
                y[k].im = val[a];
                0.0
            }
        };
    }
    Ok(y)
}

/// The complex matrix `M[k][l]` = output `k` for a unit impulse at input
/// `l`, with every twiddle input set to one.
pub fn extract_matrix(dag: &Dag) -> Vec<Vec<Complex64>> {
    let w = vec![Complex64::new(1.0, 0.0); dag.twiddles];
    extract_matrix_with(dag, &w)
}

pub fn extract_matrix_with(dag: &Dag, w: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = dag.n;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for l in 0..n {
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        x[l] = Complex64::new(1.0, 0.0);
        let y = execute(dag, &x, w).expect("arity matches by construction");
        for k in 0..n {
            m[k][l] = y[k];
        }
    }
    m
}

/// The real `2n × 2n` matrix of the network, rows and columns ordered
/// `re0, im0, re1, im1, ...`. Twiddle inputs are set to one.
pub fn extract_real_matrix(dag: &Dag) -> Vec<Vec<f64>> {
    let n = dag.n;
    let w = vec![Complex64::new(1.0, 0.0); dag.twiddles];
    let mut m = vec![vec![0.0; 2 * n]; 2 * n];
    for col in 0..2 * n {
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        if col % 2 == 0 {
            x[col / 2].re = 1.0;
        } else {
            x[col / 2].im = 1.0;
        }
        let y = execute(dag, &x, &w).expect("arity matches by construction");
        for k in 0..n {
            m[2 * k][col] = y[k].re;
            m[2 * k + 1][col] = y[k].im;
        }
    }
    m
}
