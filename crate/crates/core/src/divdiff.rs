//! Divided differences with confluent nodes, the ψ and h kernels, and the
//! finite tensor expansions of divided differences of `(x − α)^(−m)`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::function::CFunction;
use crate::quadrature::GaussLegendre;
use crate::scalar::{factorial, Cx, Real};
use crate::spectral::ToleranceConfig;

/// Sorts the nodes and snaps groups closer than `tau` to their mean.
///
/// A group keeps absorbing nodes while they stay within `tau` of its first member.
pub fn snap_nodes<T: Real>(nodes: &[T], tau: T) -> Vec<T> {
    let mut z = nodes.to_vec();
    z.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut start = 0;
    while start < z.len() {
        let mut end = start + 1;
        while end < z.len() && z[end] - z[start] < tau {
            end += 1;
        }
        if end - start > 1 {
            let mean =
                z[start..end].iter().fold(T::zero(), |a, &b| a + b) / T::from_count(end - start);
            z[start..end].iter_mut().for_each(|v| *v = mean);
        }
        start = end;
    }
    z
}

/// `f^[n](x₀, …, x_n)` for `n + 1 = nodes.len()`.
///
/// Nodes within the configured node threshold are treated as coincident and
/// handled by the confluent rule `f^[k](x, …, x) = f^(k)(x)/k!`.
pub fn divided_difference<T: Real>(
    f: &CFunction<T>,
    nodes: &[T],
    tol: &ToleranceConfig<T>,
) -> Result<Cx<T>> {
    if nodes.is_empty() {
        return Err(Error::InvalidArgument(
            "divided difference needs at least one node".into(),
        ));
    }
    if let Some(bad) = nodes.iter().find(|x| !x.is_finite()) {
        return Err(Error::DomainError {
            at: format!("node {bad}"),
        });
    }
    let n = nodes.len() - 1;
    f.require_order(n)?;
    let max_abs = nodes.iter().fold(T::zero(), |a, x| a.max(x.abs()));
    let z = snap_nodes(nodes, tol.node_threshold(max_abs));

    let mut table = z.iter().map(|&x| f.value(x)).collect::<Result<Vec<_>>>()?;
    for k in 1..=n {
        for i in 0..=n - k {
            let gap = z[i + k] - z[i];
            table[i] = if gap.is_zero() {
                f.derivative(k, z[i])? / factorial::<T>(k)
            } else {
                (table[i + 1] - table[i]) / gap
            };
        }
    }
    Ok(table[0])
}

/// `ψ(x, y) = f^[2](x, y, x)`.
pub fn psi_kernel<T: Real>(
    f: &CFunction<T>,
    x: T,
    y: T,
    tol: &ToleranceConfig<T>,
) -> Result<Cx<T>> {
    f.require_order(2)?;
    divided_difference(f, &[x, y, x], tol)
}

/// `∫₀¹ λ f″(λx + (1 − λ)y) dλ` by Gauss–Legendre quadrature.
pub fn psi_integral<T: Real>(
    f: &CFunction<T>,
    x: T,
    y: T,
    rule: &GaussLegendre<T>,
) -> Result<Cx<T>> {
    f.require_order(2)?;
    let unit = rule.on_interval(T::zero(), T::one());
    let total = unit.pairs().try_fold(Cx::zero(), |acc, (lam, w)| {
        Ok(acc + f.derivative(2, lam * x + (T::one() - lam) * y)? * (w * lam))
    });
    total
}

/// `h(x, y, u) = |u − y| / (x − y)²` on the closed segment between `x` and `y`.
///
/// Fails with [`Error::DiagonalInput`] when `|x − y| < tau_merge`.
pub fn h_kernel<T: Real>(x: T, y: T, u: T, tau_merge: T) -> Result<T> {
    let gap = x - y;
    if gap.abs() < tau_merge || gap.is_zero() {
        return Err(Error::DiagonalInput {
            gap: gap.abs().as_f64(),
        });
    }
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    if u < lo || u > hi {
        return Ok(T::zero());
    }
    Ok((u - y).abs() / (gap * gap))
}

/// One summand `c · g₁(x₀) g₂(x₁) ⋯` of a tensor expansion.
#[derive(Clone)]
pub struct TensorTerm<T> {
    pub coeff: Cx<T>,
    pub factors: Vec<CFunction<T>>,
}

/// Finite sum of elementary tensors of one-variable functions.
#[derive(Clone)]
pub struct TensorExpansion<T> {
    pub arity: usize,
    pub terms: Vec<TensorTerm<T>>,
}

impl<T: Real> std::fmt::Debug for TensorTerm<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) {:?}", self.coeff, self.factors)
    }
}

impl<T: Real> std::fmt::Debug for TensorExpansion<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TensorExpansion")
            .field("arity", &self.arity)
            .field("terms", &self.terms)
            .finish()
    }
}

impl<T: Real> TensorExpansion<T> {
    pub fn eval(&self, point: &[T]) -> Result<Cx<T>> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: point.len(),
            });
        }
        self.terms.iter().try_fold(Cx::zero(), |acc, term| {
            let prod = term
                .factors
                .iter()
                .zip(point)
                .try_fold(term.coeff, |p, (g, &x)| Ok::<_, Error>(p * g.value(x)?))?;
            Ok(acc + prod)
        })
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Tensor expansion of `f_{m,α}^[1]` (`order = 1`) or `f_{m,α}^[2]` (`order = 2`).
///
/// Built from `f_m^[1] = −Σ_{k=1}^m f_k ⊗ f_{m−k+1}` and
/// `f_m^[2](x₀,x₁,x₂) = −Σ_{k=1}^m f_k^[1](x₀,x₁) f_{m−k+1}(x₂)`.
pub fn rational_dd_expand<T: Real>(
    m: usize,
    alpha: Cx<T>,
    order: usize,
) -> Result<TensorExpansion<T>> {
    if alpha.im.is_zero() {
        return Err(Error::RealPole);
    }
    let f = |k: usize| CFunction::resolvent(k, alpha);
    let one = Complex::new(T::one(), T::zero());
    let mut terms = Vec::new();
    match order {
        1 => {
            for k in 1..=m {
                terms.push(TensorTerm {
                    coeff: -one,
                    factors: vec![f(k)?, f(m - k + 1)?],
                });
            }
        }
        2 => {
            // −Σ_k (−Σ_j f_j ⊗ f_{k−j+1}) ⊗ f_{m−k+1}
            for k in 1..=m {
                for j in 1..=k {
                    terms.push(TensorTerm {
                        coeff: one,
                        factors: vec![f(j)?, f(k - j + 1)?, f(m - k + 1)?],
                    });
                }
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "rational expansion supports order 1 or 2, got {other}"
            )))
        }
    }
    Ok(TensorExpansion {
        arity: order + 1,
        terms,
    })
}
