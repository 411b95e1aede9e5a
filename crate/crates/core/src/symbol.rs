//! Symbols of multiple operator integrals.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use crate::divdiff::{divided_difference, TensorExpansion};
use crate::error::{Error, Result};
use crate::function::CFunction;
use crate::scalar::{Cx, Real};
use crate::spectral::{SpectralData, ToleranceConfig};

/// Pointwise symbol `(t₁, …, t_n) ↦ φ(t₁, …, t_n)`.
pub type SymbolFn<T> = Arc<dyn Fn(&[T]) -> Result<Cx<T>> + Send + Sync>;
/// Two-variable factor of a separable symbol.
pub type PairFn<T> = Arc<dyn Fn(T, T) -> Result<Cx<T>> + Send + Sync>;

/// One pair `(a_k, b_k)` of a separable symbol `φ(s,t,u) = Σ_k a_k(s,t) b_k(t,u)`.
#[derive(Clone)]
pub struct SeparableTerm<T> {
    pub a: PairFn<T>,
    pub b: PairFn<T>,
}

/// Finite separable series with optional declared sup-norm bounds
/// `‖a‖_∞ = sup ‖(a_k(s,t))_k‖` and `‖b‖_∞ = sup ‖(b_k(t,u))_k‖`.
#[derive(Clone)]
pub struct SeparableSeries<T> {
    terms: Vec<SeparableTerm<T>>,
    bounds: Option<(T, T)>,
}

impl<T: Real> SeparableSeries<T> {
    pub fn new(terms: Vec<SeparableTerm<T>>) -> Self {
        Self {
            terms,
            bounds: None,
        }
    }

    /// Attaches caller-declared bounds; they are checked against the spectral grid on use.
    pub fn with_bounds(mut self, a_bound: T, b_bound: T) -> Self {
        self.bounds = Some((a_bound, b_bound));
        self
    }

    pub fn terms(&self) -> &[SeparableTerm<T>] {
        &self.terms
    }

    pub fn declared_bounds(&self) -> Option<(T, T)> {
        self.bounds
    }

    /// Three-variable expansion `Σ c·g₁⊗g₂⊗g₃` regrouped as `a = c·g₁⊗g₂`, `b = 1⊗g₃`.
    pub fn from_expansion(exp: &TensorExpansion<T>) -> Result<Self> {
        if exp.arity != 3 {
            return Err(Error::ArityMismatch {
                expected: 3,
                found: exp.arity,
            });
        }
        let terms = exp
            .terms
            .iter()
            .map(|term| {
                let (g1, g2, g3) = (
                    term.factors[0].clone(),
                    term.factors[1].clone(),
                    term.factors[2].clone(),
                );
                let c = term.coeff;
                SeparableTerm {
                    a: Arc::new(move |s, t| Ok(c * g1.value(s)? * g2.value(t)?)) as PairFn<T>,
                    b: Arc::new(move |_t, u| g3.value(u)) as PairFn<T>,
                }
            })
            .collect();
        Ok(Self::new(terms))
    }

    pub fn eval(&self, s: T, t: T, u: T) -> Result<Cx<T>> {
        self.terms.iter().try_fold(Cx::zero(), |acc, term| {
            Ok(acc + (term.a)(s, t)? * (term.b)(t, u)?)
        })
    }

    /// `(‖a‖_∞, ‖b‖_∞)` over `σ(A₁)×σ(A₂)` and `σ(A₂)×σ(A₃)` respectively.
    pub fn grid_bounds(
        &self,
        first: &SpectralData<T>,
        second: &SpectralData<T>,
        third: &SpectralData<T>,
    ) -> Result<(T, T)> {
        let sup = |left: &SpectralData<T>, right: &SpectralData<T>, pick_a: bool| -> Result<T> {
            let mut best = T::zero();
            for cx in left.clusters() {
                for cy in right.clusters() {
                    let mut sq = T::zero();
                    for term in &self.terms {
                        let v = if pick_a {
                            (term.a)(cx.value, cy.value)?
                        } else {
                            (term.b)(cx.value, cy.value)?
                        };
                        sq += v.norm_sqr();
                    }
                    best = best.max(sq.sqrt());
                }
            }
            Ok(best)
        };
        Ok((sup(first, second, true)?, sup(second, third, false)?))
    }

    /// Declared bounds after validation, or the grid bounds if none were declared.
    pub fn effective_bounds(
        &self,
        first: &SpectralData<T>,
        second: &SpectralData<T>,
        third: &SpectralData<T>,
    ) -> Result<(T, T)> {
        let (ga, gb) = self.grid_bounds(first, second, third)?;
        match self.bounds {
            None => Ok((ga, gb)),
            Some((a, b)) => {
                let slack = T::one() + T::lit(1e-12);
                if ga > a * slack || gb > b * slack {
                    return Err(Error::InvalidArgument(format!(
                        "declared separable bounds ({a}, {b}) are below the grid sup ({ga}, {gb})"
                    )));
                }
                Ok((a, b))
            }
        }
    }
}

#[derive(Clone)]
pub enum SymbolForm<T> {
    Callable(SymbolFn<T>),
    /// `f₁ ⊗ ⋯ ⊗ f_n`.
    Tensor(Vec<CFunction<T>>),
    /// Arity 3 only.
    Separable(SeparableSeries<T>),
}

/// An `n`-variable symbol φ.
#[derive(Clone)]
pub struct Symbol<T> {
    arity: usize,
    form: SymbolForm<T>,
}

impl<T: Real> fmt::Debug for Symbol<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.form {
            SymbolForm::Callable(_) => "callable",
            SymbolForm::Tensor(_) => "tensor",
            SymbolForm::Separable(_) => "separable",
        };
        write!(f, "Symbol({kind}, arity {})", self.arity)
    }
}

impl<T: Real> Symbol<T> {
    pub fn callable(
        arity: usize,
        f: impl Fn(&[T]) -> Result<Cx<T>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            arity,
            form: SymbolForm::Callable(Arc::new(f)),
        }
    }

    pub fn constant(arity: usize, c: Cx<T>) -> Self {
        Self::callable(arity, move |_| Ok(c))
    }

    pub fn tensor(factors: Vec<CFunction<T>>) -> Self {
        Self {
            arity: factors.len(),
            form: SymbolForm::Tensor(factors),
        }
    }

    pub fn separable(series: SeparableSeries<T>) -> Self {
        Self {
            arity: 3,
            form: SymbolForm::Separable(series),
        }
    }

    /// `f^[order]` as an `(order + 1)`-variable symbol.
    pub fn divided_difference(
        f: &CFunction<T>,
        order: usize,
        tol: &ToleranceConfig<T>,
    ) -> Result<Self> {
        f.require_order(order)?;
        let f = f.clone();
        let tol = *tol;
        Ok(Self::callable(order + 1, move |x| {
            divided_difference(&f, x, &tol)
        }))
    }

    /// Pointwise sum of a tensor expansion.
    pub fn from_expansion(exp: TensorExpansion<T>) -> Self {
        let arity = exp.arity;
        Self::callable(arity, move |x| exp.eval(x))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn form(&self) -> &SymbolForm<T> {
        &self.form
    }

    pub fn as_separable(&self) -> Option<&SeparableSeries<T>> {
        match &self.form {
            SymbolForm::Separable(s) => Some(s),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[T]) -> Result<Cx<T>> {
        if x.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: x.len(),
            });
        }
        match &self.form {
            SymbolForm::Callable(f) => f(x),
            SymbolForm::Tensor(fs) => fs
                .iter()
                .zip(x)
                .try_fold(Complex::new(T::one(), T::zero()), |p, (g, &xi)| {
                    Ok(p * g.value(xi)?)
                }),
            SymbolForm::Separable(s) => s.eval(x[0], x[1], x[2]),
        }
    }

    /// `ψ(s, t) = φ(s, t, s)`.
    pub fn restrict_aba(&self) -> Result<Self> {
        if self.arity != 3 {
            return Err(Error::ArityMismatch {
                expected: 3,
                found: self.arity,
            });
        }
        let phi = self.clone();
        Ok(Self::callable(2, move |x| phi.eval(&[x[0], x[1], x[0]])))
    }

    /// `φ̃(s, t) = φ(t, s)`.
    pub fn swapped(&self) -> Result<Self> {
        if self.arity != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                found: self.arity,
            });
        }
        let phi = self.clone();
        Ok(Self::callable(2, move |x| phi.eval(&[x[1], x[0]])))
    }

    /// Pointwise product of two symbols of equal arity.
    pub fn pointwise_product(&self, other: &Self) -> Result<Self> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        let (u, v) = (self.clone(), other.clone());
        Ok(Self::callable(self.arity, move |x| {
            Ok(u.eval(x)? * v.eval(x)?)
        }))
    }
}

/// `(uv)(t₁, …, t_n) = u(t₁, …, t_{k+1}) v(t_{k+1}, …, t_n)`, sharing the variable `t_{k+1}`.
///
/// `u` has arity `k + 1 ≥ 2` and `v` arity `n − k ≥ 2`. Two elementary tensors
/// give an elementary tensor whose shared factor is the product of the two.
pub fn symbol_product<T: Real>(u: &Symbol<T>, v: &Symbol<T>) -> Result<Symbol<T>> {
    if u.arity < 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: u.arity,
        });
    }
    if v.arity < 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: v.arity,
        });
    }
    let k = u.arity - 1;
    let n = u.arity + v.arity - 1;
    if let (SymbolForm::Tensor(fu), SymbolForm::Tensor(fv)) = (&u.form, &v.form) {
        let mut factors = fu[..k].to_vec();
        factors.push(CFunction::product(fu[k].clone(), fv[0].clone()));
        factors.extend_from_slice(&fv[1..]);
        return Ok(Symbol::tensor(factors));
    }
    let (u, v) = (u.clone(), v.clone());
    Ok(Symbol::callable(n, move |x| {
        Ok(u.eval(&x[..=k])? * v.eval(&x[k..])?)
    }))
}
