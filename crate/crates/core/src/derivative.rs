//! Higher derivatives of `t ↦ f(A + tK)` as multiple operator integrals,
//! operator Taylor remainders, and a finite-difference oracle.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::CFunction;
use crate::matrix::{CMatrix, HermitianMatrix};
use crate::moi::moi_eval;
use crate::quadrature::QuadratureSpec;
use crate::scalar::{binomial, factorial, Real};
use crate::spectral::{eigendecompose, SpectralData, ToleranceConfig};
use crate::symbol::Symbol;

fn check_dims<T: Real>(a: &HermitianMatrix<T>, k: &HermitianMatrix<T>) -> Result<()> {
    if a.dim() != k.dim() {
        return Err(Error::DimMismatch {
            expected: a.dim(),
            found: k.dim(),
        });
    }
    Ok(())
}

/// `Γ^{B,…,B}(f^[order])(K, …, K)` over `spectra` (first entry for the first slot).
fn divided_difference_moi<T: Real>(
    f: &CFunction<T>,
    spectra: &[&SpectralData<T>],
    k: &HermitianMatrix<T>,
    order: usize,
    tol: &ToleranceConfig<T>,
) -> Result<CMatrix<T>> {
    let phi = Symbol::divided_difference(f, order, tol)?;
    let ks = vec![k.matrix(); order];
    Ok(moi_eval(spectra, &phi, &ks)?.value)
}

/// `φ^(k)(t)` for `φ(t) = f(A + tK) − f(A)`, computed as
/// `k! · Γ^{A+tK,…,A+tK}(f^[k])(K, …, K)`.
pub fn gamma_derivative<T: Real>(
    f: &CFunction<T>,
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    t: T,
    order: usize,
    tol: &ToleranceConfig<T>,
) -> Result<CMatrix<T>> {
    if order == 0 {
        return Err(Error::InvalidArgument(
            "derivative order must be positive".into(),
        ));
    }
    check_dims(a, k)?;
    f.require_order(order)?;
    let s = eigendecompose(&a.add_scaled(k, t)?, tol)?;
    let spectra = vec![&s; order + 1];
    Ok(divided_difference_moi(f, &spectra, k, order, tol)?.scale_real(factorial::<T>(order)))
}

/// Central finite difference of order `order` and step `h` of `s ↦ f(A + sK)` at `t`.
///
/// Stencil points are `t + (order/2 − j)h`, `j = 0..=order`; truncation error is `O(h²)`.
pub fn fd_derivative_oracle<T: Real>(
    f: &CFunction<T>,
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    t: T,
    order: usize,
    h: T,
    tol: &ToleranceConfig<T>,
) -> Result<CMatrix<T>> {
    check_dims(a, k)?;
    if h.is_nan() || h <= T::zero() {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {h}"
        )));
    }
    let half = T::from_count(order) * T::lit(0.5);
    let mut acc = CMatrix::zeros(a.dim());
    for j in 0..=order {
        let s = t + (half - T::from_count(j)) * h;
        let fs = eigendecompose(&a.add_scaled(k, s)?, tol)?.apply_function(f)?;
        let sign = if j % 2 == 0 { T::one() } else { -T::one() };
        acc = &acc + &fs.scale_real(sign * binomial::<T>(order, j));
    }
    Ok(acc.scale_real(T::one() / h.powi(order as i32)))
}

/// Comparison of the operator-integral derivative with the finite-difference oracle.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct DerivativeReport<T> {
    pub order: usize,
    pub t: T,
    pub moi_value: CMatrix<T>,
    pub fd_value: CMatrix<T>,
    /// Steps `(h₁, h₂)` with `h₂ < h₁`; `fd_value` uses `h₁`.
    pub fd_steps: (T, T),
    /// Frobenius residuals at `h₁` and `h₂`.
    pub residuals: (T, T),
    /// `log(r₁/r₂) / log(h₁/h₂)`.
    pub richardson_slope: T,
}

impl<T: Real> DerivativeReport<T> {
    pub fn residual(&self) -> T {
        self.residuals.0
    }
}

/// Default finite-difference steps `{h, h/2}` with `h = 1e-3·(1 + ‖A‖₂ + ‖K‖₂)`
/// for `order ≤ 2` and ten times that for higher orders.
///
/// Rounding in the stencil grows like `ε/h^order`; at `order = 3` the smaller
/// step leaves it comparable to the `O(h²)` truncation error.
pub fn default_fd_steps<T: Real>(
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    order: usize,
) -> (T, T) {
    let base = if order <= 2 { 1e-3 } else { 1e-2 };
    let h = T::lit(base) * (T::one() + a.frobenius() + k.frobenius());
    (h, h * T::lit(0.5))
}

#[allow(clippy::too_many_arguments)]
pub fn derivative_report<T: Real>(
    f: &CFunction<T>,
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    t: T,
    order: usize,
    steps: (T, T),
    tol: &ToleranceConfig<T>,
) -> Result<DerivativeReport<T>> {
    let moi_value = gamma_derivative(f, a, k, t, order, tol)?;
    let fd_value = fd_derivative_oracle(f, a, k, t, order, steps.0, tol)?;
    let fd_fine = fd_derivative_oracle(f, a, k, t, order, steps.1, tol)?;
    let r1 = moi_value.distance(&fd_value);
    let r2 = moi_value.distance(&fd_fine);
    Ok(DerivativeReport {
        order,
        t,
        moi_value,
        fd_value,
        fd_steps: steps,
        residuals: (r1, r2),
        richardson_slope: richardson_slope(steps, (r1, r2)),
    })
}

/// Empirical convergence order from residuals at two step sizes.
pub fn richardson_slope<T: Real>(steps: (T, T), residuals: (T, T)) -> T {
    (residuals.0 / residuals.1).ln() / (steps.0 / steps.1).ln()
}

/// `Γ^{A+K,A,…,A}(f^[n])(K, …, K)`, the operator Taylor remainder of order `n`.
pub fn taylor_remainder_moi<T: Real>(
    f: &CFunction<T>,
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    n: usize,
    tol: &ToleranceConfig<T>,
) -> Result<CMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "remainder order must be positive".into(),
        ));
    }
    check_dims(a, k)?;
    f.require_order(n)?;
    let sak = eigendecompose(&a.add_scaled(k, T::one())?, tol)?;
    let sa = eigendecompose(a, tol)?;
    let mut spectra = vec![&sak];
    spectra.extend(std::iter::repeat_n(&sa, n));
    divided_difference_moi(f, &spectra, k, n, tol)
}

/// `f(A+K) − f(A) − Σ_{k=1}^{n−1} φ^(k)(0)/k!`, from functional calculus and
/// [`gamma_derivative`].
pub fn taylor_remainder_direct<T: Real>(
    f: &CFunction<T>,
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    n: usize,
    tol: &ToleranceConfig<T>,
) -> Result<CMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "remainder order must be positive".into(),
        ));
    }
    check_dims(a, k)?;
    f.require_order(n)?;
    let fak = eigendecompose(&a.add_scaled(k, T::one())?, tol)?.apply_function(f)?;
    let fa = eigendecompose(a, tol)?.apply_function(f)?;
    let mut out = &fak - &fa;
    for j in 1..n {
        let dj = gamma_derivative(f, a, k, T::zero(), j, tol)?;
        out = &out - &dj.scale_real(T::one() / factorial::<T>(j));
    }
    Ok(out)
}

/// `2 ∫₀¹ (1 − t) Γ^{A_t,A_t,A_t}(f^[2])(K, K) dt` with `A_t = A + tK`, by Gauss–Legendre.
pub fn integral_remainder<T: Real>(
    f: &CFunction<T>,
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    quad: &QuadratureSpec,
    tol: &ToleranceConfig<T>,
) -> Result<CMatrix<T>> {
    check_dims(a, k)?;
    f.require_order(2)?;
    let rule = quad.rule_on(T::zero(), T::one())?;
    let mut acc = CMatrix::zeros(a.dim());
    for (t, w) in rule.pairs() {
        let s = eigendecompose(&a.add_scaled(k, t)?, tol)?;
        let g = divided_difference_moi(f, &[&s, &s, &s], k, 2, tol)?;
        acc = &acc + &g.scale_real(T::lit(2.0) * (T::one() - t) * w);
    }
    Ok(acc)
}

/// Quadrature of the scalar integrand `2(1 − t)·tr(Γ^{A_t,A_t,A_t}(f^[2])(K, K))`.
pub fn integral_remainder_trace<T: Real>(
    f: &CFunction<T>,
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    quad: &QuadratureSpec,
    tol: &ToleranceConfig<T>,
) -> Result<Complex<T>> {
    check_dims(a, k)?;
    f.require_order(2)?;
    let rule = quad.rule_on(T::zero(), T::one())?;
    let mut acc = Complex::new(T::zero(), T::zero());
    for (t, w) in rule.pairs() {
        let s = eigendecompose(&a.add_scaled(k, t)?, tol)?;
        let g = divided_difference_moi(f, &[&s, &s, &s], k, 2, tol)?;
        acc += g.trace() * (T::lit(2.0) * (T::one() - t) * w);
    }
    Ok(acc)
}
