//! Dense square matrices used throughout the crate.
//!
//! [`CMatrix`] keeps complex entries in two row-major real planes so rotation
//! kernels can address real and imaginary parts without complex multiplies.
//! Factorizations (LU, SVD) are delegated to `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{NojdError, Result};

/// Square complex matrix stored as split real/imaginary planes, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            re: vec![0.0; n * n],
            im: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.re[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let z = f(i, j);
                m.re[i * n + j] = z.re;
                m.im[i * n + j] = z.im;
            }
        }
        m
    }

    pub fn from_planes(n: usize, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        for len in [re.len(), im.len()] {
            if len != n * n {
                return Err(NojdError::DimensionMismatch {
                    expected: n * n,
                    actual: len,
                });
            }
        }
        Ok(Self { n, re, im })
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, z) in d.iter().enumerate() {
            m.re[i * n + i] = z.re;
            m.im[i * n + i] = z.im;
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let k = i * self.n + j;
        Complex64::new(self.re[k], self.im[k])
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        let k = i * self.n + j;
        self.re[k] = z.re;
        self.im[k] = z.im;
    }

    #[inline]
    pub fn re(&self) -> &[f64] {
        &self.re
    }

    #[inline]
    pub fn im(&self) -> &[f64] {
        &self.im
    }

    #[inline]
    pub fn planes_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.re, &mut self.im)
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.re[j * n + i] = self.re[i * n + j];
                out.im[j * n + i] = -self.im[i * n + j];
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.re[j * n + i] = self.re[i * n + j];
                out.im[j * n + i] = self.im[i * n + j];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let (ar, ai) = (self.re[i * n + k], self.im[i * n + k]);
                if ar == 0.0 && ai == 0.0 {
                    continue;
                }
                let row = k * n;
                let dst = i * n;
                for j in 0..n {
                    let (br, bi) = (rhs.re[row + j], rhs.im[row + j]);
                    out.re[dst + j] += ar * br - ai * bi;
                    out.im[dst + j] += ar * bi + ai * br;
                }
            }
        }
        out
    }

    /// `self * diag(d) * self^H`.
    pub fn congruence_diag(&self, d: &[Complex64]) -> Self {
        let scaled = self.matmul(&CMatrix::diagonal(d));
        scaled.matmul(&self.adjoint())
    }

    /// `self * m * self^H`.
    pub fn congruence(&self, m: &Self) -> Self {
        self.matmul(m).matmul(&self.adjoint())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for k in 0..self.n * self.n {
            let z = Complex64::new(self.re[k], self.im[k]) * s;
            out.re[k] = z.re;
            out.im[k] = z.im;
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.re.iter_mut().zip(&rhs.re).for_each(|(a, b)| *a += b);
        out.im.iter_mut().zip(&rhs.im).for_each(|(a, b)| *a += b);
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.re.iter_mut().zip(&rhs.re).for_each(|(a, b)| *a -= b);
        out.im.iter_mut().zip(&rhs.im).for_each(|(a, b)| *a -= b);
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re.iter().chain(&self.im).map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Squared Frobenius mass of the off-diagonal entries.
    pub fn off_diag_sqr(&self) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let k = i * n + j;
                    s += self.re[k] * self.re[k] + self.im[k] * self.im[k];
                }
            }
        }
        s
    }

    pub fn is_finite(&self) -> bool {
        self.re.iter().chain(&self.im).all(|x| x.is_finite())
    }

    /// `‖M − M^H‖_F / ‖M‖_F`, zero for the zero matrix.
    pub fn hermitian_residual(&self) -> f64 {
        let norm = self.norm();
        if norm == 0.0 {
            return 0.0;
        }
        self.sub(&self.adjoint()).norm() / norm
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "square matrix required");
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    /// Inverse by LU with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let lu = self.to_nalgebra().lu();
        let inv = lu.try_inverse().ok_or(NojdError::Singular)?;
        if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NojdError::Singular);
        }
        Ok(Self::from_nalgebra(&inv))
    }

    pub fn determinant(&self) -> Complex64 {
        self.to_nalgebra().lu().determinant()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let svd = self.to_nalgebra().svd(false, false);
        let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// 2-norm condition number; infinite for singular input.
    pub fn condition_number(&self) -> f64 {
        let s = self.singular_values();
        match (s.first(), s.last()) {
            (Some(&max), Some(&min)) if min > 0.0 => max / min,
            _ => f64::INFINITY,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.re
            .iter()
            .zip(&other.re)
            .chain(self.im.iter().zip(&other.im))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Square real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] = x;
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().zip(&rhs.data).for_each(|(a, b)| *a -= b);
        out
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn off_diag_sqr(&self) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += self.data[i * n + j] * self.data[i * n + j];
                }
            }
        }
        s
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "square matrix required");
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self
            .to_nalgebra()
            .lu()
            .try_inverse()
            .ok_or(NojdError::Singular)?;
        if inv.iter().any(|x| !x.is_finite()) {
            return Err(NojdError::Singular);
        }
        Ok(Self::from_nalgebra(&inv))
    }

    pub fn determinant(&self) -> f64 {
        self.to_nalgebra().lu().determinant()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
