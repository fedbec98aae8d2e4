use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest supported matrix order (twelve tensor factors of `M_2`).
pub const MAX_DIM: usize = 4096;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<C64>,
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::DimensionOverflow { dim: n, max: MAX_DIM });
    }
    Ok(())
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(n: usize, data: Vec<C64>) -> Result<Self> {
        check_dim(n)?;
        if data.len() != n * n {
            return Err(Error::BadMatrixData {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(Matrix { n, data })
    }

    /// Builds from real row-major entries.
    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        Self::from_vec(n, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, k: C64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Matrix {
        self.scale(C64::new(k, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// `trace / n`, so the identity has trace 1.
    pub fn normalized_trace(&self) -> C64 {
        self.trace() / self.n as f64
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .all(|(idx, z)| idx / n == idx % n || (z.re == 0.0 && z.im == 0.0))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Result<Matrix> {
        let n = self.n * other.n;
        check_dim(n)?;
        let m = other.n;
        let mut out = Matrix::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                let a = self[(i, j)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for k in 0..m {
                    let row = (i * m + k) * n + j * m;
                    let src = &other.data[k * m..(k + 1) * m];
                    for (dst, b) in out.data[row..row + m].iter_mut().zip(src) {
                        *dst = a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(x + x*) / 2`.
    pub fn real_part(&self) -> HermitianOperator {
        HermitianOperator::symmetrized(self)
    }

    /// `(x - x*) / 2i`.
    pub fn imag_part(&self) -> HermitianOperator {
        let minus_i = C64::new(0.0, -1.0);
        HermitianOperator::symmetrized(&self.scale(minus_i))
    }

    fn assert_same_dim(&self, other: &Matrix) {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        self.assert_same_dim(rhs);
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        self.assert_same_dim(rhs);
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.assert_same_dim(rhs);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            let row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (dst, b) in row.iter_mut().zip(&rhs.data[k * n..(k + 1) * n]) {
                    *dst += a * b;
                }
            }
        }
        out
    }
}

impl Neg for &Matrix {
    type Output = Matrix;

    fn neg(self) -> Matrix {
        self.scale_real(-1.0)
    }
}

/// A self-adjoint matrix. Construction symmetrizes, so the stored entries
/// are conjugate-symmetric up to rounding in the input.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: Matrix,
}

impl HermitianOperator {
    /// Symmetrizes `(m + m*) / 2` and checks the dimension cap.
    pub fn new(m: Matrix) -> Result<Self> {
        check_dim(m.dim())?;
        Ok(Self::symmetrized(&m))
    }

    fn symmetrized(m: &Matrix) -> Self {
        let n = m.dim();
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
            for j in i + 1..n {
                let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        HermitianOperator { m: out }
    }

    /// Wraps a matrix already known to be exactly Hermitian.
    pub(crate) fn from_hermitian_unchecked(m: Matrix) -> Self {
        HermitianOperator { m }
    }

    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_real(n, entries)?)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        check_dim(values.len())?;
        Ok(HermitianOperator {
            m: Matrix::diagonal(values),
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(HermitianOperator { m: Matrix::identity(n) })
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }

    pub fn scale(&self, k: f64) -> HermitianOperator {
        HermitianOperator {
            m: self.m.scale_real(k),
        }
    }

    /// `a + c I`.
    pub fn shift(&self, c: f64) -> HermitianOperator {
        let mut m = self.m.clone();
        for i in 0..m.dim() {
            m[(i, i)].re += c;
        }
        HermitianOperator { m }
    }

    pub fn normalized_trace(&self) -> f64 {
        self.m.normalized_trace().re
    }

    pub fn tensor(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        Ok(HermitianOperator {
            m: self.m.kron(&other.m)?,
        })
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;

    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator { m: &self.m + &rhs.m }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;

    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator { m: &self.m - &rhs.m }
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;

    fn neg(self) -> HermitianOperator {
        self.scale(-1.0)
    }
}
