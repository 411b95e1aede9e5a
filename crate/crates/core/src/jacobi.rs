//! Cyclic Jacobi eigensolver for Hermitian matrices.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::scalar::{Cx, Real};

/// Diagonalizes a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns the (unsorted) eigenvalues and a unitary matrix whose column `k`
/// is the eigenvector for eigenvalue `k`. Only the Hermitian part of `m` is
/// read.
pub fn jacobi_eigen<T: Real>(m: &CMatrix<T>, max_sweeps: usize) -> Result<(Vec<T>, CMatrix<T>)> {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::<T>::identity(n);
    let scale = a.frobenius();
    if n <= 1 || scale.is_zero() {
        return Ok(((0..n).map(|i| a[(i, i)].re).collect(), v));
    }
    let target = T::epsilon() * scale;
    let skip = T::epsilon() * T::epsilon() * scale;

    for _sweep in 0..max_sweeps {
        if off_diagonal(&a) <= target {
            return Ok(((0..n).map(|i| a[(i, i)].re).collect(), v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = a[(p, q)];
                let g_abs = g.norm();
                if g_abs <= skip {
                    a[(p, q)] = Cx::zero();
                    a[(q, p)] = Cx::zero();
                    continue;
                }
                rotate(&mut a, &mut v, p, q, g, g_abs);
            }
        }
    }
    if off_diagonal(&a) <= target {
        return Ok(((0..n).map(|i| a[(i, i)].re).collect(), v));
    }
    Err(Error::NoConvergence {
        iterations: max_sweeps,
    })
}

fn off_diagonal<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

// Zeroes a[p][q] with U = diag(1, conj e)·[[c, s], [-s, c]], e = g/|g|.
fn rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize, g: Cx<T>, g_abs: T) {
    let n = a.dim();
    let e = g / g_abs;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (T::lit(2.0) * g_abs);
    let t = if theta.is_infinite() {
        T::zero()
    } else {
        let sgn = if theta < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        sgn / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let u_qp = -e.conj() * s;
    let u_qq = e.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * u_qp;
        a[(k, q)] = akp * s + akq * u_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * u_qp;
        v[(k, q)] = vkp * s + vkq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * u_qp.conj();
        a[(q, k)] = apk * s + aqk * u_qq.conj();
    }
    a[(p, q)] = Cx::zero();
    a[(q, p)] = Cx::zero();
    a[(p, p)] = Complex::new(app - t * g_abs, T::zero());
    a[(q, q)] = Complex::new(aqq + t * g_abs, T::zero());
}
