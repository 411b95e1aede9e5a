//! Constructive Koplienko spectral shift data.
//!
//! For `A_t = A + tK` the measure `ν_t` on ℝ² puts mass `tr(P_i K P_j K)` at
//! each pair of eigenvalue clusters `(λ_i, λ_j)` of `A_t`. The aggregate
//! `ν = 2∫₀¹(1 − t) ν_t dt` is split into a diagonal part `α = ½ν|_Δ` and an
//! off-diagonal part smeared along `[x, y]` by the ramp `h(x, y, u)`, giving
//! the density `κ`. With `γ = α + κ du`,
//!
//! ```text
//! tr(Γ^{A+K,A,A}(f^[2])(K, K)) = ∫ f″ dγ.
//! ```

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::derivative::{taylor_remainder_direct, taylor_remainder_moi};
use crate::error::{Error, Result};
use crate::function::CFunction;
use crate::matrix::HermitianMatrix;
use crate::quadrature::{GaussLegendre, QuadratureSpec};
use crate::scalar::{Cx, Real};
use crate::spectral::{eigendecompose, ToleranceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom<T> {
    pub x: T,
    pub y: T,
    pub weight: T,
}

/// Finite nonnegative measure on ℝ² made of point masses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure2D<T> {
    atoms: Vec<Atom<T>>,
    total_mass: T,
}

impl<T: Real> DiscreteMeasure2D<T> {
    pub fn new(atoms: Vec<Atom<T>>) -> Self {
        let total_mass = atoms.iter().fold(T::zero(), |acc, a| acc + a.weight);
        Self { atoms, total_mass }
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn total_mass(&self) -> T {
        self.total_mass
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total weight of atoms within `tol` of `(x, y)`.
    pub fn weight_near(&self, x: T, y: T, tol: T) -> T {
        self.atoms
            .iter()
            .filter(|a| (a.x - x).abs() <= tol && (a.y - y).abs() <= tol)
            .fold(T::zero(), |acc, a| acc + a.weight)
    }

    /// `∫ g dν`.
    pub fn integrate(&self, g: impl Fn(T, T) -> Result<Cx<T>>) -> Result<Cx<T>> {
        self.atoms
            .iter()
            .try_fold(Cx::zero(), |acc, a| Ok(acc + g(a.x, a.y)? * a.weight))
    }
}

fn check_dims<T: Real>(a: &HermitianMatrix<T>, k: &HermitianMatrix<T>) -> Result<()> {
    if a.dim() != k.dim() {
        return Err(Error::DimMismatch {
            expected: a.dim(),
            found: k.dim(),
        });
    }
    Ok(())
}

/// `ν_t`: atoms at cluster pairs of `A + tK` with weights `Σ_{a∈i, b∈j} |K̃_ab|²`.
///
/// Zero-weight pairs are omitted.
pub fn nu_t_atoms<T: Real>(
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    t: T,
    tol: &ToleranceConfig<T>,
) -> Result<DiscreteMeasure2D<T>> {
    check_dims(a, k)?;
    let s = eigendecompose(&a.add_scaled(k, t)?, tol)?;
    let v = s.eigenvectors();
    let rotated = &(&v.adjoint() * k.matrix()) * v;
    let clusters = s.clusters();
    let mut atoms = Vec::new();
    for ci in clusters {
        for cj in clusters {
            let mut w = T::zero();
            for p in ci.columns.clone() {
                for q in cj.columns.clone() {
                    w += rotated[(p, q)].norm_sqr();
                }
            }
            if w > T::zero() {
                atoms.push(Atom {
                    x: ci.value,
                    y: cj.value,
                    weight: w,
                });
            }
        }
    }
    Ok(DiscreteMeasure2D::new(atoms))
}

/// `ν = 2∫₀¹(1 − t) ν_t dt` by Gauss–Legendre on `[0, 1]`, the weight `2(1 − t)`
/// folded into the atom weights.
pub fn nu_aggregate<T: Real>(
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    quad: &QuadratureSpec,
    tol: &ToleranceConfig<T>,
) -> Result<DiscreteMeasure2D<T>> {
    check_dims(a, k)?;
    let rule = quad.rule_on(T::zero(), T::one())?;
    let mut atoms = Vec::new();
    for (t, w) in rule.pairs() {
        let scale = T::lit(2.0) * (T::one() - t) * w;
        for atom in nu_t_atoms(a, k, t, tol)?.atoms {
            atoms.push(Atom {
                weight: atom.weight * scale,
                ..atom
            });
        }
    }
    Ok(DiscreteMeasure2D::new(atoms))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagAtom<T> {
    pub x: T,
    pub mass: T,
}

/// The measure `γ = α + κ du`.
///
/// `κ` is linear on each segment `[breakpoints[i], breakpoints[i+1]]` with
/// end values `segments[i] = (κ(b_i⁺), κ(b_{i+1}⁻))`; it may jump at breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct SsfObject<T> {
    breakpoints: Vec<T>,
    segments: Vec<(T, T)>,
    diag_atoms: Vec<DiagAtom<T>>,
    mass: T,
}

/// Number of Gauss–Legendre points per panel in [`trace_formula_rhs`].
pub const PANEL_POINTS: usize = 4;
/// Panels are at most `support length / PANELS_PER_SUPPORT` wide.
pub const PANELS_PER_SUPPORT: usize = 512;

impl<T: Real> SsfObject<T> {
    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[(T, T)] {
        &self.segments
    }

    pub fn diag_atoms(&self) -> &[DiagAtom<T>] {
        &self.diag_atoms
    }

    /// `γ(ℝ)`.
    pub fn mass(&self) -> T {
        self.mass
    }

    /// `∫ κ du`.
    pub fn density_mass(&self) -> T {
        self.segments
            .iter()
            .zip(self.breakpoints.windows(2))
            .fold(T::zero(), |acc, ((l, r), w)| {
                acc + (w[1] - w[0]) * (*l + *r) * T::lit(0.5)
            })
    }

    pub fn atomic_mass(&self) -> T {
        self.diag_atoms
            .iter()
            .fold(T::zero(), |acc, a| acc + a.mass)
    }

    /// Closed interval carrying `κ`, if any.
    pub fn support(&self) -> Option<(T, T)> {
        Some((*self.breakpoints.first()?, *self.breakpoints.last()?))
    }

    /// `κ(u)`, right-continuous at breakpoints; zero outside the support.
    pub fn kappa_at(&self, u: T) -> T {
        let b = &self.breakpoints;
        if b.len() < 2 || u < b[0] || u > b[b.len() - 1] {
            return T::zero();
        }
        let i = match b.binary_search_by(|p| p.partial_cmp(&u).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => i.min(self.segments.len() - 1),
            Err(i) => i - 1,
        };
        let (l, r) = self.segments[i];
        let width = b[i + 1] - b[i];
        if width.is_zero() {
            return l;
        }
        let s = (u - b[i]) / width;
        l + (r - l) * s
    }

    /// `(u, κ)` samples at every breakpoint and segment midpoint.
    pub fn samples(&self) -> Vec<(T, T)> {
        let mut out = Vec::with_capacity(2 * self.segments.len() + 1);
        for (i, (l, r)) in self.segments.iter().enumerate() {
            let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
            out.push((a, *l));
            out.push(((a + b) * T::lit(0.5), (*l + *r) * T::lit(0.5)));
        }
        if let (Some(&last), Some(&(_, r))) = (self.breakpoints.last(), self.segments.last()) {
            out.push((last, r));
        }
        out
    }

    /// `u,kappa` CSV sampling `κ` at breakpoints and midpoints.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("u,kappa\n");
        for (u, k) in self.samples() {
            s.push_str(&format!("{},{}\n", u.as_f64(), k.as_f64()));
        }
        s
    }

    /// `∫ g(u) κ(u) du` with 4-point Gauss–Legendre on each panel.
    pub fn integrate_density(&self, g: impl Fn(T) -> Result<Cx<T>>) -> Result<Cx<T>> {
        let Some((lo, hi)) = self.support() else {
            return Ok(Cx::zero());
        };
        let max_panel = (hi - lo) / T::from_count(PANELS_PER_SUPPORT);
        let base = GaussLegendre::<T>::new(PANEL_POINTS);
        let mut acc = Cx::zero();
        for (i, &(l, r)) in self.segments.iter().enumerate() {
            let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
            let width = b - a;
            if width.is_zero() || (l.is_zero() && r.is_zero()) {
                continue;
            }
            let pieces = (width / max_panel).ceil().to_usize().unwrap_or(1).max(1);
            let step = width / T::from_count(pieces);
            for p in 0..pieces {
                let pa = a + step * T::from_count(p);
                let pb = if p + 1 == pieces { b } else { pa + step };
                for (u, w) in base.on_interval(pa, pb).pairs() {
                    let kappa = l + (r - l) * ((u - a) / width);
                    acc += g(u)? * (w * kappa);
                }
            }
        }
        Ok(acc)
    }
}

/// Assembles `γ` from the aggregated measure `ν`.
///
/// Atoms with `|x − y| < merge·(1 + ‖A‖₂ + ‖K‖₂)` are folded into diagonal
/// atoms at `(x + y)/2` with mass `½w`; the rest contribute the ramp
/// `w·|u − y|/(x − y)²` on the segment between `x` and `y`.
pub fn build_ssf<T: Real>(
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    quad: &QuadratureSpec,
    tol: &ToleranceConfig<T>,
) -> Result<SsfObject<T>> {
    let nu = nu_aggregate(a, k, quad, tol)?;
    let tau = tol.merge_threshold(a.frobenius() + k.frobenius());
    Ok(assemble(&nu, tau))
}

/// Splits `ν` into diagonal atoms and exact piecewise-linear `κ`.
pub fn assemble<T: Real>(nu: &DiscreteMeasure2D<T>, tau_merge: T) -> SsfObject<T> {
    let half = T::lit(0.5);
    let mut diag: Vec<DiagAtom<T>> = Vec::new();
    let mut ramps: Vec<Atom<T>> = Vec::new();
    for atom in nu.atoms() {
        if (atom.x - atom.y).abs() < tau_merge {
            diag.push(DiagAtom {
                x: (atom.x + atom.y) * half,
                mass: atom.weight * half,
            });
        } else {
            ramps.push(*atom);
        }
    }
    diag.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap_or(std::cmp::Ordering::Equal));
    let mut merged: Vec<DiagAtom<T>> = Vec::with_capacity(diag.len());
    for d in diag {
        match merged.last_mut() {
            Some(last) if last.x == d.x => last.mass += d.mass,
            _ => merged.push(d),
        }
    }

    let mut breakpoints: Vec<T> = ramps.iter().flat_map(|r| [r.x, r.y]).collect();
    breakpoints.sort_by(|p, q| p.partial_cmp(q).unwrap_or(std::cmp::Ordering::Equal));
    breakpoints.dedup();
    let nseg = breakpoints.len().saturating_sub(1);
    let mut segments = vec![(T::zero(), T::zero()); nseg];
    let index_of = |v: T| {
        breakpoints
            .binary_search_by(|p| p.partial_cmp(&v).unwrap_or(std::cmp::Ordering::Less))
            .expect("ramp endpoint is a breakpoint")
    };
    for r in &ramps {
        let gap = r.x - r.y;
        let slope = r.weight / (gap * gap);
        let (lo, hi) = if r.x < r.y { (r.x, r.y) } else { (r.y, r.x) };
        for s in index_of(lo)..index_of(hi) {
            let (u0, u1) = (breakpoints[s], breakpoints[s + 1]);
            segments[s].0 += slope * (u0 - r.y).abs();
            segments[s].1 += slope * (u1 - r.y).abs();
        }
    }

    let mut ssf = SsfObject {
        breakpoints,
        segments,
        diag_atoms: merged,
        mass: T::zero(),
    };
    ssf.mass = ssf.density_mass() + ssf.atomic_mass();
    ssf
}

/// `∫ f″ dγ = Σ f″(x)·mass + ∫ f″ κ du`.
pub fn trace_formula_rhs<T: Real>(ssf: &SsfObject<T>, f: &CFunction<T>) -> Result<Cx<T>> {
    f.require_order(2)?;
    let atomic = ssf
        .diag_atoms()
        .iter()
        .try_fold(Cx::<T>::zero(), |acc, d| {
            Ok::<_, Error>(acc + f.derivative(2, d.x)? * d.mass)
        })?;
    Ok(atomic + ssf.integrate_density(|u| f.derivative(2, u))?)
}

/// `tr(Γ^{A+K,A,A}(f^[2])(K, K))`, cross-checked against
/// `tr(f(A+K) − f(A) − d/dt f(A+tK)|₀)`.
///
/// Fails with [`Error::InternalInconsistency`] when the two disagree by more
/// than `1e-9·(1 + |value|)`.
pub fn trace_formula_lhs<T: Real>(
    f: &CFunction<T>,
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Cx<T>> {
    f.require_order(2)?;
    let via_moi = taylor_remainder_moi(f, a, k, 2, tol)?.trace();
    let via_calculus = taylor_remainder_direct(f, a, k, 2, tol)?.trace();
    let limit = T::lit(1e-9).max(T::epsilon() * T::lit(1e4)) * (T::one() + via_moi.norm());
    if (via_moi - via_calculus).norm() > limit {
        return Err(Error::InternalInconsistency {
            first: format!("{via_moi}"),
            second: format!("{via_calculus}"),
        });
    }
    Ok(via_moi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceReport<T> {
    pub lhs: Complex<T>,
    pub rhs: Complex<T>,
    pub abs_err: T,
    /// `|lhs − rhs| / (1 + |lhs|)`.
    pub rel_err: T,
    /// `|2·γ(ℝ) − ‖K‖₂²|`.
    pub mass_check: T,
}

/// Both sides of the trace formula for `(f, A, K)`.
pub fn verify_trace_formula<T: Real>(
    f: &CFunction<T>,
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    quad: &QuadratureSpec,
    tol: &ToleranceConfig<T>,
) -> Result<TraceReport<T>> {
    f.require_order(2)?;
    let ssf = build_ssf(a, k, quad, tol)?;
    verify_with_ssf(f, a, k, &ssf, tol)
}

/// [`verify_trace_formula`] with a prebuilt [`SsfObject`] for `(A, K)`.
pub fn verify_with_ssf<T: Real>(
    f: &CFunction<T>,
    a: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
    ssf: &SsfObject<T>,
    tol: &ToleranceConfig<T>,
) -> Result<TraceReport<T>> {
    let lhs = trace_formula_lhs(f, a, k, tol)?;
    let rhs = trace_formula_rhs(ssf, f)?;
    let abs_err = (lhs - rhs).norm();
    Ok(TraceReport {
        lhs,
        rhs,
        abs_err,
        rel_err: abs_err / (T::one() + lhs.norm()),
        mass_check: (T::lit(2.0) * ssf.mass() - k.matrix().frobenius_sq()).abs(),
    })
}
