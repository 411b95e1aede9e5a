//! Independent divided-difference oracle based on the Opitz formula: for the
//! upper bidiagonal matrix `J` with the nodes on the diagonal and ones above
//! it, `f^[n](x₀, …, x_n)` is the top-right entry of `f(J)`.
//!
//! `f(J)` is formed without any divided-difference recursion: Horner's rule
//! for polynomials, triangular inversion and powers for resolvents, and
//! scaling-and-squaring of the Taylor series for `e^(iωx)`. Nodes are used
//! exactly as given (no snapping). Intended for verification only.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::function::{CFunction, FunctionKind};
use crate::matrix::CMatrix;
use crate::scalar::{Cx, Real};

pub fn dd_oracle_opitz<T: Real>(f: &CFunction<T>, nodes: &[T]) -> Result<Cx<T>> {
    if nodes.is_empty() {
        return Err(Error::InvalidArgument(
            "divided difference needs at least one node".into(),
        ));
    }
    let n = nodes.len() - 1;
    f.require_order(n)?;
    let j = bidiagonal(nodes);
    let fj = function_of(f, &j)?;
    let v = fj[(0, n)];
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::DomainError {
            at: format!("nodes {nodes:?}"),
        });
    }
    Ok(v)
}

fn bidiagonal<T: Real>(nodes: &[T]) -> CMatrix<T> {
    let n = nodes.len();
    CMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex::new(nodes[i], T::zero())
        } else if j == i + 1 {
            Cx::one()
        } else {
            Cx::zero()
        }
    })
}

fn function_of<T: Real>(f: &CFunction<T>, j: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = j.dim();
    match f.kind() {
        FunctionKind::Polynomial(coeffs) => {
            let mut acc = CMatrix::zeros(n);
            for &c in coeffs.iter().rev() {
                acc = &acc * j;
                for i in 0..n {
                    acc[(i, i)] += Complex::new(c, T::zero());
                }
            }
            Ok(acc)
        }
        FunctionKind::Resolvent { m, alpha } => Ok(resolvent_power(j, *alpha, *m)),
        FunctionKind::ConjResolvent { m, alpha } => Ok(resolvent_power(j, alpha.conj(), *m)),
        FunctionKind::Cis { omega } => Ok(expm(&j.scale(Complex::new(T::zero(), *omega)))),
        FunctionKind::Product(a, b) => Ok(&function_of(a, j)? * &function_of(b, j)?),
        FunctionKind::User { .. } => Err(Error::InvalidArgument(
            "the Opitz oracle does not support user-callable functions".into(),
        )),
    }
}

// (J − αI)^(−m) for upper-triangular J.
fn resolvent_power<T: Real>(j: &CMatrix<T>, alpha: Cx<T>, m: usize) -> CMatrix<T> {
    let n = j.dim();
    let mut shifted = j.clone();
    for i in 0..n {
        shifted[(i, i)] -= alpha;
    }
    let inv = upper_triangular_inverse(&shifted);
    let mut out = CMatrix::identity(n);
    for _ in 0..m {
        out = &out * &inv;
    }
    out
}

fn upper_triangular_inverse<T: Real>(u: &CMatrix<T>) -> CMatrix<T> {
    let n = u.dim();
    let mut inv = CMatrix::zeros(n);
    for col in 0..n {
        for row in (0..=col).rev() {
            let rhs: Cx<T> = if row == col { Cx::one() } else { Cx::zero() };
            let s = (row + 1..=col).fold(rhs, |acc, k| acc - u[(row, k)] * inv[(k, col)]);
            inv[(row, col)] = s / u[(row, row)];
        }
    }
    inv
}

fn expm<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let n = a.dim();
    let norm = a.frobenius();
    let mut squarings = 0;
    let mut scale = T::one();
    while norm * scale > T::lit(0.25) {
        scale *= T::lit(0.5);
        squarings += 1;
    }
    let b = a.scale_real(scale);
    let mut term = CMatrix::identity(n);
    let mut sum = CMatrix::identity(n);
    for k in 1..40 {
        term = (&term * &b).scale_real(T::one() / T::from_count(k));
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_examples() {
        let cube = CFunction::<f64>::monomial(3);
        assert_eq!(dd_oracle_opitz(&cube, &[1.0, 2.0, 3.0]).unwrap().re, 6.0);
        let sq = CFunction::<f64>::monomial(2);
        assert_eq!(dd_oracle_opitz(&sq, &[3.0, 3.0]).unwrap().re, 6.0);
    }

    #[test]
    fn cis_single_node_and_confluent() {
        let f = CFunction::<f64>::cis(1.3);
        let v = dd_oracle_opitz(&f, &[0.7]).unwrap();
        assert!((v - f.value(0.7).unwrap()).norm() < 1e-14);
        let d = dd_oracle_opitz(&f, &[0.7, 0.7, 0.7]).unwrap();
        assert!((d - f.derivative(2, 0.7).unwrap() * 0.5).norm() < 1e-13);
    }

    #[test]
    fn rejects_user_functions() {
        let f = CFunction::user(3, |_, _x: f64| Complex::new(0.0, 0.0));
        assert!(dd_oracle_opitz(&f, &[0.0, 1.0]).is_err());
    }
}
