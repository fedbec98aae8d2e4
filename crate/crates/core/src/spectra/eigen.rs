//! Hermitian eigensolvers.
//!
//! [`eigen_decompose`] runs cyclic complex Jacobi rotations and returns the
//! eigenvector frame. [`eigenvalues`] skips the frame: it reduces to a real
//! symmetric tridiagonal matrix with Householder reflections and finishes
//! with implicit-shift QL, which is what keeps dimension 1024 tractable.

use super::matrix::{HermitianOperator, Matrix, C64};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 30;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of the full Frobenius norm.
pub const OFF_DIAGONAL_REL_TOL: f64 = 1e-13;
const QL_MAX_ITERATIONS: usize = 60;

/// Eigenvalues in descending order with matching unit eigenvectors stored as
/// the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenDecomposition {
    /// `V diag(f(lambda)) V*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        HermitianOperator::from_hermitian_unchecked(weighted_outer_sum(&self.vectors, &mapped))
    }
}

/// `sum_k w_k v_k v_k*` over the columns of `v`, built so the result is
/// exactly Hermitian.
pub(crate) fn weighted_outer_sum(v: &Matrix, weights: &[f64]) -> Matrix {
    let n = v.dim();
    let mut out = Matrix::zeros(n);
    let active: Vec<usize> = (0..n).filter(|&k| weights[k] != 0.0).collect();
    for i in 0..n {
        for j in i..n {
            let mut acc = C64::new(0.0, 0.0);
            for &k in &active {
                acc += v[(i, k)] * v[(j, k)].conj() * weights[k];
            }
            if i == j {
                out[(i, i)] = C64::new(acc.re, 0.0);
            } else {
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
    }
    out
}

fn off_diagonal_norm(m: &Matrix) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi eigendecomposition.
pub fn eigen_decompose(a: &HermitianOperator) -> Result<EigenDecomposition> {
    let n = a.dim();
    let mut m = a.matrix().clone();
    let mut v = Matrix::identity(n);
    let threshold = OFF_DIAGONAL_REL_TOL * m.frobenius_norm();

    let mut sweep = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off <= threshold {
            break;
        }
        if sweep == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure {
                sweeps: sweep,
                off_norm: off,
            });
        }
        sweep += 1;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = Matrix::from_fn(n, |row, col| v[(row, order[col])]);
    Ok(EigenDecomposition { values, vectors })
}

/// Annihilates `m[p][q]` with the unitary `J = diag(1, conj(e)) R`, where
/// `e` is the phase of `m[p][q]` and `R` the real rotation that diagonalizes
/// the resulting real 2x2 block. Applies `m <- J* m J` and `v <- v J`.
fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let h = m[(p, q)];
    let g = h.norm();
    if g == 0.0 {
        return;
    }
    let n = m.dim();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.is_infinite() {
        0.0
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase_conj = (h / g).conj();
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = phase_conj * (-s);
    let jqq = phase_conj * c;

    for k in 0..n {
        let x = m[(k, p)];
        let y = m[(k, q)];
        m[(k, p)] = x * jpp + y * jqp;
        m[(k, q)] = x * jpq + y * jqq;
    }
    for k in 0..n {
        let x = m[(p, k)];
        let y = m[(q, k)];
        m[(p, k)] = jpp.conj() * x + jqp.conj() * y;
        m[(q, k)] = jpq.conj() * x + jqq.conj() * y;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;

    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)];
        v[(k, p)] = x * jpp + y * jqp;
        v[(k, q)] = x * jpq + y * jqq;
    }
}

/// Eigenvalues only, descending.
pub fn eigenvalues(a: &HermitianOperator) -> Result<Vec<f64>> {
    let m = a.matrix();
    let n = m.dim();
    let mut values = if m.is_diagonal() {
        (0..n).map(|i| m[(i, i)].re).collect()
    } else {
        let (mut d, mut e) = tridiagonalize(m);
        tridiagonal_ql(&mut d, &mut e)?;
        d
    };
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Householder reduction to tridiagonal form. Returns the (real) diagonal
/// and the moduli of the subdiagonal; a Hermitian tridiagonal matrix is
/// unitarily similar to the real one with `|e_i|` off the diagonal.
fn tridiagonalize(a: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.dim();
    let mut m = a.clone();
    let mut e = vec![0.0; n];
    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut p = vec![C64::new(0.0, 0.0); n];

    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        let len = n - start;
        let xnorm = (start..n).map(|i| m[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        e[k] = xnorm;
        if xnorm == 0.0 {
            continue;
        }
        let x0 = m[(start, k)];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // v = x - alpha e_1 with alpha = -phase |x|, so v_0 = x_0 + phase |x|
        v[0] = x0 + phase * xnorm;
        for i in 1..len {
            v[i] = m[(start + i, k)];
        }
        let vnorm2: f64 = v[..len].iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // p = tau * S v over the trailing block S = m[start.., start..]
        let data = m.data();
        for i in 0..len {
            let row = &data[(start + i) * n + start..(start + i) * n + n];
            let mut acc = C64::new(0.0, 0.0);
            for (s, vj) in row.iter().zip(&v[..len]) {
                acc += s * vj;
            }
            p[i] = acc * tau;
        }
        let vp: C64 = v[..len].iter().zip(&p[..len]).map(|(vi, pi)| vi.conj() * pi).sum();
        let kappa = 0.5 * tau * vp.re;
        for i in 0..len {
            p[i] -= v[i] * kappa;
        }
        // S <- S - v w* - w v*
        let data = m.data_mut();
        for i in 0..len {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut data[(start + i) * n + start..(start + i) * n + n];
            for ((s, vj), wj) in row.iter_mut().zip(&v[..len]).zip(&p[..len]) {
                *s -= vi * wj.conj() + wi * vj.conj();
            }
        }
    }
    if n >= 2 {
        e[n - 2] = m[(n - 1, n - 2)].norm();
    }
    if n >= 1 {
        e[n - 1] = 0.0;
    }
    let d = (0..n).map(|i| m[(i, i)].re).collect();
    (d, e)
}

/// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix
/// (`e[i]` couples rows `i` and `i + 1`). Overwrites `d` with eigenvalues.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m] == 0.0 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > QL_MAX_ITERATIONS {
                return Err(Error::ConvergenceFailure {
                    sweeps: iterations,
                    off_norm: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
