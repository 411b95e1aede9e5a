//! Multiple operator integrals on finite Hermitian data.
//!
//! In the eigenbases the operator `Γ^{A₁,…,A_n}(φ)(K₁, …, K_{n−1})` is
//!
//! ```text
//! Σ φ(λ_{c₁}, …, λ_{c_n}) P_{c₁} K₁ P_{c₂} ⋯ K_{n−1} P_{c_n}
//! ```
//!
//! summed over cluster multi-indices. Each `K_i` is rotated once into the
//! adjacent eigenbases, `K̃_i = V_i* K_i V_{i+1}`, and the sum is accumulated
//! entrywise with φ tabulated once per cluster tuple.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::function::CFunction;
use crate::matrix::{CMatrix, HermitianMatrix};
use crate::scalar::{Cx, Real};
use crate::spectral::{eigendecompose, SpectralData, ToleranceConfig};
use crate::symbol::Symbol;

/// Value of a multiple operator integral, with the trace-norm certificate
/// `‖a‖_∞‖b‖_∞‖X‖₂‖Y‖₂` when the symbol is a separable series.
#[derive(Debug, Clone, PartialEq)]
pub struct MoiResult<T> {
    pub value: CMatrix<T>,
    pub certificate: Option<T>,
}

fn check_inputs<T: Real>(
    spectra: &[&SpectralData<T>],
    arity: usize,
    ks: &[&CMatrix<T>],
) -> Result<usize> {
    if spectra.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one spectrum is required".into(),
        ));
    }
    if arity != spectra.len() {
        return Err(Error::ArityMismatch {
            expected: spectra.len(),
            found: arity,
        });
    }
    if ks.len() + 1 != spectra.len() {
        return Err(Error::ArityMismatch {
            expected: spectra.len() - 1,
            found: ks.len(),
        });
    }
    let d = spectra[0].dim();
    for found in spectra
        .iter()
        .map(|s| s.dim())
        .chain(ks.iter().map(|k| k.dim()))
    {
        if found != d {
            return Err(Error::DimMismatch { expected: d, found });
        }
    }
    Ok(d)
}

/// `Γ^{A₁,…,A_n}(φ)(K₁, …, K_{n−1})`.
///
/// `n = 1` is accepted and gives `φ(A₁)`.
pub fn moi_eval<T: Real>(
    spectra: &[&SpectralData<T>],
    phi: &Symbol<T>,
    ks: &[&CMatrix<T>],
) -> Result<MoiResult<T>> {
    let d = check_inputs(spectra, phi.arity(), ks)?;
    let n = spectra.len();

    let table = tabulate(spectra, phi)?;
    let rotated: Vec<CMatrix<T>> = ks
        .iter()
        .enumerate()
        .map(|(i, k)| &(&spectra[i].eigenvectors().adjoint() * k) * spectra[i + 1].eigenvectors())
        .collect();

    let mut inner = CMatrix::zeros(d);
    if n == 1 {
        for a in 0..d {
            inner[(a, a)] = table.values[spectra[0].cluster_of(a)];
        }
    } else {
        let mut acc = Accumulator {
            spectra,
            rotated: &rotated,
            table: &table,
            row: vec![Cx::zero(); d],
        };
        for a in 0..d {
            acc.row.iter_mut().for_each(|z| *z = Cx::zero());
            let offset = spectra[0].cluster_of(a) * table.strides[0];
            acc.walk(0, a, Complex::new(T::one(), T::zero()), offset);
            for b in 0..d {
                inner[(a, b)] = acc.row[b];
            }
        }
    }
    let value = &(spectra[0].eigenvectors() * &inner) * &spectra[n - 1].eigenvectors().adjoint();

    let certificate = match (phi.as_separable(), n) {
        (Some(series), 3) => {
            let (a, b) = series.effective_bounds(spectra[0], spectra[1], spectra[2])?;
            Some(a * b * ks[0].frobenius() * ks[1].frobenius())
        }
        _ => None,
    };
    Ok(MoiResult { value, certificate })
}

struct Table<T> {
    values: Vec<Cx<T>>,
    strides: Vec<usize>,
}

fn tabulate<T: Real>(spectra: &[&SpectralData<T>], phi: &Symbol<T>) -> Result<Table<T>> {
    let sizes: Vec<usize> = spectra.iter().map(|s| s.clusters().len()).collect();
    let mut strides = vec![1; sizes.len()];
    for i in (0..sizes.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * sizes[i + 1];
    }
    let total: usize = sizes.iter().product();
    let mut values = Vec::with_capacity(total);
    let mut idx = vec![0usize; sizes.len()];
    let mut point = vec![T::zero(); sizes.len()];
    for _ in 0..total {
        for (i, &c) in idx.iter().enumerate() {
            point[i] = spectra[i].clusters()[c].value;
        }
        let v = phi.eval(&point).map_err(|e| match e {
            Error::DomainError { .. } => Error::SymbolDomainError {
                at: format!("{point:?}"),
            },
            other => other,
        })?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::SymbolDomainError {
                at: format!("{point:?}"),
            });
        }
        values.push(v);
        for i in (0..idx.len()).rev() {
            idx[i] += 1;
            if idx[i] < sizes[i] {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok(Table { values, strides })
}

struct Accumulator<'a, T> {
    spectra: &'a [&'a SpectralData<T>],
    rotated: &'a [CMatrix<T>],
    table: &'a Table<T>,
    row: Vec<Cx<T>>,
}

impl<T: Real> Accumulator<'_, T> {
    // `level` is the index of the next rotated perturbation to apply.
    fn walk(&mut self, level: usize, j: usize, prod: Cx<T>, offset: usize) {
        let k = &self.rotated[level];
        let next = level + 1;
        let last = next == self.rotated.len();
        let stride = self.table.strides[next];
        for jn in 0..k.dim() {
            let entry = k[(j, jn)];
            if entry.is_zero() {
                continue;
            }
            let p = prod * entry;
            let off = offset + self.spectra[next].cluster_of(jn) * stride;
            if last {
                self.row[jn] = self.row[jn] + self.table.values[off] * p;
            } else {
                self.walk(next, jn, p, off);
            }
        }
    }
}

/// `f₁(A₁) X₁ f₂(A₂) ⋯ X_{n−1} f_n(A_n)` computed by functional calculus and products.
pub fn tensor_product_formula<T: Real>(
    spectra: &[&SpectralData<T>],
    factors: &[CFunction<T>],
    ks: &[&CMatrix<T>],
) -> Result<CMatrix<T>> {
    check_inputs(spectra, factors.len(), ks)?;
    let mut out = spectra[0].apply_function(&factors[0])?;
    for i in 1..spectra.len() {
        out = &out * ks[i - 1];
        out = &out * &spectra[i].apply_function(&factors[i])?;
    }
    Ok(out)
}

/// `Σ_k Γ^{A₁,A₂}(a_k)(X) · Γ^{A₂,A₃}(b_k)(Y)` for a separable symbol.
pub fn moi_separable_eval<T: Real>(
    spectra: [&SpectralData<T>; 3],
    phi: &Symbol<T>,
    x: &CMatrix<T>,
    y: &CMatrix<T>,
) -> Result<MoiResult<T>> {
    let series = phi.as_separable().ok_or_else(|| {
        Error::InvalidArgument("moi_separable_eval requires a separable-series symbol".into())
    })?;
    check_inputs(&spectra, 3, &[x, y])?;
    let d = x.dim();
    let mut value = CMatrix::zeros(d);
    for term in series.terms() {
        let a = term.a.clone();
        let b = term.b.clone();
        let sa = Symbol::callable(2, move |p| a(p[0], p[1]));
        let sb = Symbol::callable(2, move |p| b(p[0], p[1]));
        let left = moi_eval(&spectra[..2], &sa, &[x])?.value;
        let right = moi_eval(&spectra[1..], &sb, &[y])?.value;
        value = &value + &(&left * &right);
    }
    let (a, b) = series.effective_bounds(spectra[0], spectra[1], spectra[2])?;
    Ok(MoiResult {
        value,
        certificate: Some(a * b * x.frobenius() * y.frobenius()),
    })
}

/// `tr(Γ^{A,B,A}(φ)(X, Y))` evaluated as `tr(Γ^{A,B}(ψ)(X) · Y)` with `ψ(s,t) = φ(s,t,s)`.
pub fn trace_reduce_aba<T: Real>(
    spectra: [&SpectralData<T>; 3],
    phi: &Symbol<T>,
    x: &CMatrix<T>,
    y: &CMatrix<T>,
) -> Result<Cx<T>> {
    check_inputs(&spectra, phi.arity(), &[x, y])?;
    let (first, third) = (spectra[0], spectra[2]);
    let tol = T::lit(1e-12) * (T::one() + first.spectral_radius()) * T::from_count(first.dim());
    if !first.same_operator(third, tol) {
        return Err(Error::SpectraMismatch);
    }
    let psi = phi.restrict_aba()?;
    let reduced = moi_eval(&spectra[..2], &psi, &[x])?.value;
    Ok((&reduced * y).trace())
}

/// `|tr(Γ^{A,B}(u)(X) Γ^{B,A}(v)(Y)) − tr(Γ^{A,B}(u·ṽ)(X) Y)|` with `ṽ(s,t) = v(t,s)`.
pub fn trace_pair_identity_check<T: Real>(
    a: &SpectralData<T>,
    b: &SpectralData<T>,
    u: &Symbol<T>,
    v: &Symbol<T>,
    x: &CMatrix<T>,
    y: &CMatrix<T>,
) -> Result<T> {
    let left = moi_eval(&[a, b], u, &[x])?.value;
    let right = moi_eval(&[b, a], v, &[y])?.value;
    let lhs = (&left * &right).trace();
    let uv = u.pointwise_product(&v.swapped()?)?;
    let rhs = (&moi_eval(&[a, b], &uv, &[x])?.value * y).trace();
    Ok((lhs - rhs).norm())
}

/// Frobenius residual of the perturbation identity
///
/// ```text
/// Γ^{…,B,…}(f^[n−1])(K…) − Γ^{…,A,…}(f^[n−1])(K…) = Γ^{…,B,A,…}(f^[n])(K₁…K_{i−1}, B−A, K_i…)
/// ```
///
/// where `context` holds the `n − 1` fixed spectra, `B`/`A` are inserted at
/// 1-based position `slot`, and `B − A` is inserted as the `slot`-th perturbation.
#[allow(clippy::too_many_arguments)]
pub fn perturbation_identity_check<T: Real>(
    context: &[&SpectralData<T>],
    slot: usize,
    f: &CFunction<T>,
    n: usize,
    ks: &[&CMatrix<T>],
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidArgument("order n must be at least 1".into()));
    }
    f.require_order(n)?;
    if context.len() + 1 != n {
        return Err(Error::ArityMismatch {
            expected: n - 1,
            found: context.len(),
        });
    }
    if ks.len() + 1 != n {
        return Err(Error::ArityMismatch {
            expected: n - 1,
            found: ks.len(),
        });
    }
    if slot == 0 || slot > n {
        return Err(Error::InvalidArgument(format!(
            "slot {slot} outside 1..={n}"
        )));
    }
    let sa = eigendecompose(a, tol)?;
    let sb = eigendecompose(b, tol)?;
    let diff = b.sub(a)?;
    let i = slot - 1;

    fn splice<'a, S>(context: &[&'a S], i: usize, inserted: &[&'a S]) -> Vec<&'a S> {
        let mut v = context[..i].to_vec();
        v.extend_from_slice(inserted);
        v.extend_from_slice(&context[i..]);
        v
    }
    let lower = Symbol::divided_difference(f, n - 1, tol)?;
    let upper = Symbol::divided_difference(f, n, tol)?;

    let lhs_b = moi_eval(&splice(context, i, &[&sb]), &lower, ks)?.value;
    let lhs_a = moi_eval(&splice(context, i, &[&sa]), &lower, ks)?.value;
    let mut rhs_ks: Vec<&CMatrix<T>> = ks[..i].to_vec();
    rhs_ks.push(diff.matrix());
    rhs_ks.extend_from_slice(&ks[i..]);
    let rhs = moi_eval(&splice(context, i, &[&sb, &sa]), &upper, &rhs_ks)?.value;
    Ok((&lhs_b - &lhs_a).distance(&rhs))
}

/// `sup |φ|` over the cluster grid `σ(A₁) × ⋯ × σ(A_n)`.
pub fn symbol_grid_sup<T: Real>(spectra: &[&SpectralData<T>], phi: &Symbol<T>) -> Result<T> {
    let table = tabulate(spectra, phi)?;
    Ok(table.values.iter().fold(T::zero(), |m, z| m.max(z.norm())))
}
