//! Scalar functions carried together with their derivatives.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{binomial, is_finite, real, Cx, Real};

/// User-supplied `(k, x) ↦ f^(k)(x)`.
pub type DerivativeFn<T> = Arc<dyn Fn(usize, T) -> Cx<T> + Send + Sync>;

/// The closed catalog of function families, plus an escape hatch for callers
/// that supply their own derivatives.
#[derive(Clone)]
pub enum FunctionKind<T> {
    /// `Σ c_j x^j` with real coefficients.
    Polynomial(Vec<T>),
    /// `(x − α)^(−m)`, `Im α ≠ 0`.
    Resolvent {
        m: usize,
        alpha: Cx<T>,
    },
    /// `conj((x − α)^(−m)) = (x − conj α)^(−m)`.
    ConjResolvent {
        m: usize,
        alpha: Cx<T>,
    },
    /// `e^(iωx)`.
    Cis {
        omega: T,
    },
    /// Pointwise product of two catalog functions.
    Product(Box<CFunction<T>>, Box<CFunction<T>>),
    User {
        order: usize,
        f: DerivativeFn<T>,
    },
}

/// A scalar function `ℝ → ℂ` with derivatives available up to [`CFunction::order`].
#[derive(Clone)]
pub struct CFunction<T> {
    kind: FunctionKind<T>,
}

impl<T: Real> fmt::Debug for CFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FunctionKind::Polynomial(c) => write!(f, "poly{c:?}"),
            FunctionKind::Resolvent { m, alpha } => write!(f, "(x-({alpha}))^-{m}"),
            FunctionKind::ConjResolvent { m, alpha } => write!(f, "conj((x-({alpha}))^-{m})"),
            FunctionKind::Cis { omega } => write!(f, "exp(i*{omega}*x)"),
            FunctionKind::Product(a, b) => write!(f, "({a:?})*({b:?})"),
            FunctionKind::User { order, .. } => write!(f, "user(order {order})"),
        }
    }
}

/// Order reported by the analytic families.
pub const UNBOUNDED_ORDER: usize = usize::MAX;

impl<T: Real> CFunction<T> {
    pub fn polynomial(coeffs: Vec<T>) -> Self {
        Self {
            kind: FunctionKind::Polynomial(coeffs),
        }
    }

    /// `x^degree`.
    pub fn monomial(degree: usize) -> Self {
        let mut coeffs = vec![T::zero(); degree + 1];
        coeffs[degree] = T::one();
        Self::polynomial(coeffs)
    }

    pub fn constant(c: T) -> Self {
        Self::polynomial(vec![c])
    }

    /// `f_{m,α}(x) = (x − α)^(−m)`.
    pub fn resolvent(m: usize, alpha: Cx<T>) -> Result<Self> {
        if alpha.im.is_zero() {
            return Err(Error::RealPole);
        }
        Ok(Self {
            kind: FunctionKind::Resolvent { m, alpha },
        })
    }

    /// Complex conjugate of `f_{m,α}`.
    pub fn conj_resolvent(m: usize, alpha: Cx<T>) -> Result<Self> {
        if alpha.im.is_zero() {
            return Err(Error::RealPole);
        }
        Ok(Self {
            kind: FunctionKind::ConjResolvent { m, alpha },
        })
    }

    pub fn cis(omega: T) -> Self {
        Self {
            kind: FunctionKind::Cis { omega },
        }
    }

    pub fn product(a: CFunction<T>, b: CFunction<T>) -> Self {
        Self {
            kind: FunctionKind::Product(Box::new(a), Box::new(b)),
        }
    }

    /// Wraps a caller-supplied derivative oracle valid for `k ≤ order`.
    pub fn user(order: usize, f: impl Fn(usize, T) -> Cx<T> + Send + Sync + 'static) -> Self {
        Self {
            kind: FunctionKind::User {
                order,
                f: Arc::new(f),
            },
        }
    }

    pub fn kind(&self) -> &FunctionKind<T> {
        &self.kind
    }

    /// Highest derivative order available.
    pub fn order(&self) -> usize {
        match &self.kind {
            FunctionKind::User { order, .. } => *order,
            FunctionKind::Product(a, b) => a.order().min(b.order()),
            _ => UNBOUNDED_ORDER,
        }
    }

    /// True when `f` is real-valued on ℝ.
    pub fn is_real_valued(&self) -> bool {
        match &self.kind {
            FunctionKind::Polynomial(_) => true,
            FunctionKind::Resolvent { m, .. } | FunctionKind::ConjResolvent { m, .. } => *m == 0,
            FunctionKind::Cis { omega } => omega.is_zero(),
            FunctionKind::Product(a, b) => a.is_real_valued() && b.is_real_valued(),
            FunctionKind::User { .. } => false,
        }
    }

    pub fn require_order(&self, required: usize) -> Result<()> {
        let available = self.order();
        if available < required {
            return Err(Error::OrderTooLow {
                required,
                available,
            });
        }
        Ok(())
    }

    pub fn value(&self, x: T) -> Result<Cx<T>> {
        self.derivative(0, x)
    }

    /// `f^(k)(x)`, checked against the declared order and for finiteness.
    pub fn derivative(&self, k: usize, x: T) -> Result<Cx<T>> {
        self.require_order(k)?;
        let v = self.raw_derivative(k, x);
        if !is_finite(v) {
            return Err(Error::DomainError {
                at: format!("x = {x:e} (derivative order {k})"),
            });
        }
        Ok(v)
    }

    fn raw_derivative(&self, k: usize, x: T) -> Cx<T> {
        match &self.kind {
            FunctionKind::Polynomial(coeffs) => real(poly_derivative(coeffs, k, x)),
            FunctionKind::Resolvent { m, alpha } => resolvent_derivative(*m, *alpha, k, x),
            FunctionKind::ConjResolvent { m, alpha } => {
                resolvent_derivative(*m, alpha.conj(), k, x)
            }
            FunctionKind::Cis { omega } => {
                let iw = Complex::new(T::zero(), *omega);
                iw.powu(k as u32) * Complex::new(T::zero(), *omega * x).exp()
            }
            FunctionKind::Product(a, b) => (0..=k).fold(Cx::zero(), |acc, j| {
                acc + a.raw_derivative(j, x) * b.raw_derivative(k - j, x) * binomial::<T>(k, j)
            }),
            FunctionKind::User { f, .. } => f(k, x),
        }
    }
}

fn poly_derivative<T: Real>(coeffs: &[T], k: usize, x: T) -> T {
    if k >= coeffs.len() {
        return T::zero();
    }
    let mut acc = T::zero();
    for j in (k..coeffs.len()).rev() {
        // j! / (j − k)!
        let falling = (j - k + 1..=j).fold(T::one(), |p, i| p * T::from_count(i));
        acc = acc * x + coeffs[j] * falling;
    }
    acc
}

fn resolvent_derivative<T: Real>(m: usize, alpha: Cx<T>, k: usize, x: T) -> Cx<T> {
    if m == 0 {
        return if k == 0 { Cx::one() } else { Cx::zero() };
    }
    // d^k/dx^k z^(−m) = (−1)^k m(m+1)…(m+k−1) z^(−m−k)
    let rising = (0..k).fold(T::one(), |p, i| p * T::from_count(m + i));
    let sign = if k.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    };
    let z = real(x) - alpha;
    z.inv().powu((m + k) as u32) * (sign * rising)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives_are_exact() {
        // 1 + 2x + 3x^2 + 4x^3
        let p = CFunction::polynomial(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(p.value(2.0).unwrap().re, 1.0 + 4.0 + 12.0 + 32.0);
        assert_eq!(p.derivative(1, 2.0).unwrap().re, 2.0 + 12.0 + 48.0);
        assert_eq!(p.derivative(2, 2.0).unwrap().re, 6.0 + 48.0);
        assert_eq!(p.derivative(3, 2.0).unwrap().re, 24.0);
        assert_eq!(p.derivative(4, 2.0).unwrap().re, 0.0);
    }

    #[test]
    fn resolvent_derivatives() {
        let alpha = Complex::new(0.0, 1.0);
        let f = CFunction::resolvent(2, alpha).unwrap();
        let x = 0.7;
        let z = Complex::new(x, -1.0);
        let d2 = f.derivative(2, x).unwrap();
        assert!((d2 - z.powi(-4) * 6.0).norm() < 1e-14);
        let g = CFunction::conj_resolvent(2, alpha).unwrap();
        assert!((g.value(x).unwrap() - f.value(x).unwrap().conj()).norm() < 1e-15);
        assert_eq!(
            CFunction::<f64>::resolvent(1, Complex::new(2.0, 0.0)).unwrap_err(),
            Error::RealPole
        );
        let f0 = CFunction::resolvent(0, alpha).unwrap();
        assert_eq!(f0.value(3.0).unwrap(), Cx::one());
        assert_eq!(f0.derivative(1, 3.0).unwrap(), Cx::zero());
    }

    #[test]
    fn cis_and_product() {
        let f = CFunction::cis(2.0);
        let d = f.derivative(2, 0.3).unwrap();
        assert!((d + Complex::new(0.0, 0.6).exp() * 4.0).norm() < 1e-14);
        // x * x = x^2
        let p = CFunction::product(CFunction::monomial(1), CFunction::monomial(1));
        assert_eq!(p.derivative(2, 5.0).unwrap().re, 2.0);
        assert_eq!(p.derivative(1, 5.0).unwrap().re, 10.0);
    }

    #[test]
    fn user_order_is_enforced() {
        let f = CFunction::user(1, |k, x: f64| match k {
            0 => Complex::new(x.sin(), 0.0),
            _ => Complex::new(x.cos(), 0.0),
        });
        assert!(f.derivative(1, 0.0).is_ok());
        assert_eq!(
            f.derivative(2, 0.0).unwrap_err(),
            Error::OrderTooLow {
                required: 2,
                available: 1
            }
        );
        let bad = CFunction::user(0, |_, x: f64| Complex::new(1.0 / x, 0.0));
        assert!(matches!(bad.value(0.0), Err(Error::DomainError { .. })));
    }
}
