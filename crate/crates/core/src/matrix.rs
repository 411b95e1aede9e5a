//! Dense square complex matrices and the validated Hermitian newtype.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Dense `dim × dim` complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Cx::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Cx::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_row_major(entries: Vec<Cx<T>>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() {
            return Err(Error::Format(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Format("rows are not all of length dim".into()));
        }
        Ok(Self::from_fn(dim, |i, j| {
            Complex::new(rows[i][j], T::zero())
        }))
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex::new(v, T::zero());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.dim).fold(Cx::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_sq(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Hilbert–Schmidt (Frobenius) norm.
    pub fn frobenius(&self) -> T {
        self.frobenius_sq().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// Frobenius distance `‖self − other‖₂`.
    pub fn distance(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc + (*a - *b).norm_sqr())
            .sqrt()
    }

    pub fn map(&self, f: impl Fn(Cx<T>) -> Cx<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Trace norm `‖M‖₁`, the sum of singular values.
    pub fn trace_norm(&self) -> Result<T> {
        let gram = &self.adjoint() * self;
        let (values, _) = crate::jacobi::jacobi_eigen(&gram, 200)?;
        Ok(values
            .into_iter()
            .fold(T::zero(), |acc, v| acc + v.max(T::zero()).sqrt()))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Cx<T>, Cx<T>) -> Cx<T>) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Cx<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Cx<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Real> Neg for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn neg(self) -> CMatrix<T> {
        self.map(|z| -z)
    }
}

/// A square complex matrix validated to be Hermitian.
///
/// Construction checks `|m_ij − conj(m_ji)| ≤ τ·max|m|` with `τ = 1e-12` (or a
/// few ulps for lower-precision scalars) and then stores the exact Hermitian
/// part, so downstream code may rely on exact symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T> {
    inner: CMatrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if m.dim() == 0 {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        let rel = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
        let tol = rel * m.max_abs();
        let defect = m.hermitian_defect();
        if defect > tol {
            return Err(Error::NotHermitian {
                asymmetry: defect.as_f64(),
                tolerance: tol.as_f64(),
            });
        }
        Ok(Self {
            inner: m.hermitian_part(),
        })
    }

    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        Self::new(CMatrix::from_real_rows(rows)?)
    }

    pub fn diagonal(values: &[T]) -> Self {
        Self {
            inner: CMatrix::diagonal(values),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: CMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: CMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.inner
    }

    /// `self + t·other`, Hermitian by construction.
    pub fn add_scaled(&self, other: &Self, t: T) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            inner: &self.inner + &other.inner.scale_real(t),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, -T::one())
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            inner: self.inner.scale_real(s),
        }
    }

    pub fn frobenius(&self) -> T {
        self.inner.frobenius()
    }
}

impl<T> AsRef<CMatrix<T>> for HermitianMatrix<T> {
    fn as_ref(&self) -> &CMatrix<T> {
        &self.inner
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn product_and_adjoint() {
        let a = CMatrix::from_row_major(vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let b = &a * &a.adjoint();
        assert_eq!(b[(0, 0)], c(2.0, 0.0));
        assert_eq!(b[(0, 1)], c(2.0, 0.0));
        assert_eq!(b[(1, 1)], c(4.0, 0.0));
        assert!(b.is_hermitian(0.0));
        assert_eq!(a.trace(), c(1.0, 0.0));
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        assert!(CMatrix::<f64>::from_row_major(vec![c(1.0, 0.0); 3]).is_err());
        let m = CMatrix::from_row_major(vec![c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(Error::NotHermitian { .. })
        ));
        assert!(HermitianMatrix::<f64>::new(CMatrix::zeros(0)).is_err());
    }

    #[test]
    fn hermitian_part_is_exact() {
        let m = CMatrix::from_row_major(vec![
            c(1.0, 1e-15),
            c(0.5, 0.25),
            c(0.5, -0.25),
            c(-2.0, 0.0),
        ])
        .unwrap();
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.matrix().hermitian_defect(), 0.0);
        assert_eq!(h.matrix()[(0, 0)].im, 0.0);
    }

    #[test]
    fn trace_norm_of_diagonal() {
        let m = CMatrix::<f64>::diagonal(&[3.0, -4.0, 0.5]);
        assert!((m.trace_norm().unwrap() - 7.5).abs() < 1e-12);
    }
}
