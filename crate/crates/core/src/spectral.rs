//! Eigendecomposition, eigenvalue clustering, Borel functional calculus and
//! spectral truncation for Hermitian matrices.

use std::ops::Range;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::function::CFunction;
use crate::jacobi::jacobi_eigen;
use crate::matrix::{CMatrix, HermitianMatrix};
use crate::scalar::{Cx, Real};

const MAX_SWEEPS: usize = 100;

/// Relative thresholds; each is multiplied by a problem scale before use.
///
/// * `cluster`: eigenvalues closer than `cluster·(1 + spectral radius)` share a projection.
/// * `node`: divided-difference nodes closer than `node·(1 + max|node|)` are coincident.
/// * `merge`: ν atoms with `|x − y| < merge·(1 + ‖A‖₂ + ‖K‖₂)` are folded onto the diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig<T> {
    pub cluster: T,
    pub node: T,
    pub merge: T,
}

impl<T: Real> Default for ToleranceConfig<T> {
    fn default() -> Self {
        let floor = T::epsilon() * T::lit(64.0);
        Self {
            cluster: T::lit(1e-9).max(floor),
            node: T::lit(1e-7).max(floor * T::lit(16.0)),
            merge: T::lit(1e-6).max(floor * T::lit(64.0)),
        }
    }
}

impl<T: Real> ToleranceConfig<T> {
    pub fn new(cluster: T, node: T, merge: T) -> Result<Self> {
        let cfg = Self {
            cluster,
            node,
            merge,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("cluster", self.cluster),
            ("node", self.node),
            ("merge", self.merge),
        ] {
            if !v.is_finite() || v <= T::zero() {
                return Err(Error::InvalidArgument(format!(
                    "tolerance `{name}` must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn cluster_threshold(&self, spectral_radius: T) -> T {
        self.cluster * (T::one() + spectral_radius)
    }

    pub fn node_threshold(&self, max_abs_node: T) -> T {
        self.node * (T::one() + max_abs_node)
    }

    pub fn merge_threshold(&self, scale: T) -> T {
        self.merge * (T::one() + scale)
    }
}

/// Group of (numerically) equal eigenvalues sharing one spectral projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster<T> {
    /// Column indices into the eigenvector matrix.
    pub columns: Range<usize>,
    /// Mean of the member eigenvalues.
    pub value: T,
}

/// Eigenvalues (ascending), orthonormal eigenvectors and the cluster partition.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData<T> {
    eigenvalues: Vec<T>,
    eigenvectors: CMatrix<T>,
    clusters: Vec<Cluster<T>>,
    cluster_of: Vec<usize>,
    tol: ToleranceConfig<T>,
}

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending and each eigenvector is rotated so its
/// first significant component is real and positive, which makes the output
/// reproducible for a fixed input.
pub fn eigendecompose<T: Real>(
    a: &HermitianMatrix<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<SpectralData<T>> {
    cfg.validate()?;
    let (values, vectors) = jacobi_eigen(a.matrix(), MAX_SWEEPS)?;
    Ok(SpectralData::from_pairs(values, vectors, *cfg))
}

impl<T: Real> SpectralData<T> {
    fn from_pairs(values: Vec<T>, vectors: CMatrix<T>, tol: ToleranceConfig<T>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            values[i]
                .partial_cmp(&values[j])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let eigenvalues: Vec<T> = order.iter().map(|&i| values[i]).collect();
        let mut eigenvectors = CMatrix::from_fn(n, |r, c| vectors[(r, order[c])]);
        fix_phases(&mut eigenvectors);
        let radius = eigenvalues
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()));
        let (clusters, cluster_of) = build_clusters(&eigenvalues, tol.cluster_threshold(radius));
        Self {
            eigenvalues,
            eigenvectors,
            clusters,
            cluster_of,
            tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix<T> {
        &self.eigenvectors
    }

    pub fn clusters(&self) -> &[Cluster<T>] {
        &self.clusters
    }

    /// Cluster index of eigenvector column `column`.
    pub fn cluster_of(&self, column: usize) -> usize {
        self.cluster_of[column]
    }

    pub fn tolerances(&self) -> &ToleranceConfig<T> {
        &self.tol
    }

    pub fn spectral_radius(&self) -> T {
        self.eigenvalues
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    /// Spectral projection `P_c = Σ_{k ∈ c} v_k v_k*`.
    pub fn projection(&self, cluster: usize) -> CMatrix<T> {
        let cols = self.clusters[cluster].columns.clone();
        let v = &self.eigenvectors;
        CMatrix::from_fn(self.dim(), |i, j| {
            cols.clone()
                .fold(Cx::zero(), |acc, k| acc + v[(i, k)] * v[(j, k)].conj())
        })
    }

    /// `V Λ V*` with the raw (unclustered) eigenvalues.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let d: Vec<Cx<T>> = self
            .eigenvalues
            .iter()
            .map(|&v| Complex::new(v, T::zero()))
            .collect();
        self.conjugate_diagonal(&d)
    }

    /// `V diag(d) V*`.
    pub fn conjugate_diagonal(&self, d: &[Cx<T>]) -> CMatrix<T> {
        let v = &self.eigenvectors;
        let n = self.dim();
        CMatrix::from_fn(n, |i, j| {
            (0..n).fold(Cx::zero(), |acc, k| {
                acc + v[(i, k)] * d[k] * v[(j, k)].conj()
            })
        })
    }

    /// `f(A) = Σ_c f(λ_c) P_c`, evaluated once per cluster.
    pub fn apply_function(&self, f: &CFunction<T>) -> Result<CMatrix<T>> {
        self.apply_map(|x| f.value(x))
    }

    /// Functional calculus for an arbitrary fallible scalar map.
    pub fn apply_map(&self, f: impl Fn(T) -> Result<Cx<T>>) -> Result<CMatrix<T>> {
        let per_cluster = self
            .clusters
            .iter()
            .map(|c| f(c.value))
            .collect::<Result<Vec<_>>>()?;
        let d: Vec<Cx<T>> = self.cluster_of.iter().map(|&c| per_cluster[c]).collect();
        Ok(self.conjugate_diagonal(&d))
    }

    /// Regroups eigenvalues with an absolute threshold `tau`.
    ///
    /// A new cluster starts whenever an eigenvalue is at least `tau` above the
    /// first member of the current cluster, so every cluster spread is below `tau`.
    pub fn cluster_spectrum(&self, tau: T) -> Self {
        let (clusters, cluster_of) = build_clusters(&self.eigenvalues, tau);
        Self {
            clusters,
            cluster_of,
            ..self.clone()
        }
    }

    /// Spectral data of `E((−j, j)) A`: eigenvalues with `|λ| ≥ j` become 0.
    pub fn spectral_truncate(&self, j: T) -> Self {
        let values: Vec<T> = self
            .eigenvalues
            .iter()
            .map(|&v| if v.abs() < j { v } else { T::zero() })
            .collect();
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let eigenvalues: Vec<T> = order.iter().map(|&i| values[i]).collect();
        let eigenvectors = CMatrix::from_fn(n, |r, c| self.eigenvectors[(r, order[c])]);
        let radius = eigenvalues
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()));
        let (clusters, cluster_of) =
            build_clusters(&eigenvalues, self.tol.cluster_threshold(radius));
        Self {
            eigenvalues,
            eigenvectors,
            clusters,
            cluster_of,
            tol: self.tol,
        }
    }

    /// True when both decompositions describe the same operator within `tol`.
    pub fn same_operator(&self, other: &Self, tol: T) -> bool {
        self.dim() == other.dim() && self.reconstruct().distance(&other.reconstruct()) <= tol
    }
}

/// Free-function form of [`SpectralData::apply_function`].
pub fn apply_function<T: Real>(s: &SpectralData<T>, f: &CFunction<T>) -> Result<CMatrix<T>> {
    s.apply_function(f)
}

/// Free-function form of [`SpectralData::spectral_truncate`].
pub fn spectral_truncate<T: Real>(s: &SpectralData<T>, j: T) -> SpectralData<T> {
    s.spectral_truncate(j)
}

/// Free-function form of [`SpectralData::cluster_spectrum`].
pub fn cluster_spectrum<T: Real>(s: &SpectralData<T>, tau: T) -> SpectralData<T> {
    s.cluster_spectrum(tau)
}

fn build_clusters<T: Real>(sorted: &[T], tau: T) -> (Vec<Cluster<T>>, Vec<usize>) {
    let mut clusters: Vec<Cluster<T>> = Vec::new();
    let mut cluster_of = Vec::with_capacity(sorted.len());
    let mut start = 0;
    for i in 0..=sorted.len() {
        let close = i < sorted.len() && i > start && sorted[i] - sorted[start] < tau;
        if i == sorted.len() || (i > start && !close) {
            if i > start {
                let members = &sorted[start..i];
                let mean =
                    members.iter().fold(T::zero(), |a, &b| a + b) / T::from_count(members.len());
                clusters.push(Cluster {
                    columns: start..i,
                    value: mean,
                });
            }
            start = i;
        }
        if i < sorted.len() {
            cluster_of.push(clusters.len());
        }
    }
    (clusters, cluster_of)
}

fn fix_phases<T: Real>(v: &mut CMatrix<T>) {
    let n = v.dim();
    for col in 0..n {
        let max = (0..n).fold(T::zero(), |acc, r| acc.max(v[(r, col)].norm()));
        if max.is_zero() {
            continue;
        }
        let threshold = max * T::lit(1e-8);
        if let Some(r) = (0..n).find(|&r| v[(r, col)].norm() > threshold) {
            let z = v[(r, col)];
            let phase = z.conj() / z.norm();
            for row in 0..n {
                v[(row, col)] *= phase;
            }
            v[(r, col)] = Complex::new(v[(r, col)].norm(), T::zero());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig<f64> {
        ToleranceConfig::default()
    }

    #[test]
    fn flip_matrix() {
        let a = HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = eigendecompose(&a, &cfg()).unwrap();
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-15);
        let p0 = s.projection(0);
        let p1 = s.projection(1);
        let half = |re: f64| Complex::new(re, 0.0);
        let expect0 =
            CMatrix::from_row_major(vec![half(0.5), half(-0.5), half(-0.5), half(0.5)]).unwrap();
        let expect1 =
            CMatrix::from_row_major(vec![half(0.5), half(0.5), half(0.5), half(0.5)]).unwrap();
        assert!(p0.distance(&expect0) < 1e-15);
        assert!(p1.distance(&expect1) < 1e-15);
        // phase convention: first component real positive
        assert!(s.eigenvectors()[(0, 0)].re > 0.0 && s.eigenvectors()[(0, 0)].im == 0.0);
    }

    #[test]
    fn diagonal_input_gives_identity_vectors() {
        let a = HermitianMatrix::diagonal(&[5.0, 2.0]);
        let s = eigendecompose(&a, &cfg()).unwrap();
        assert_eq!(s.eigenvalues(), &[2.0, 5.0]);
        let v = s.eigenvectors();
        assert_eq!(v[(0, 1)].re, 1.0);
        assert_eq!(v[(1, 0)].re, 1.0);
        assert_eq!(v[(0, 0)].re, 0.0);
    }

    #[test]
    fn functional_calculus_examples() {
        let a = HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = eigendecompose(&a, &cfg()).unwrap();
        let id = s.apply_function(&CFunction::monomial(1)).unwrap();
        assert!(id.distance(a.matrix()) < 1e-15);
        let one = s.apply_function(&CFunction::constant(1.0)).unwrap();
        assert!(one.distance(&CMatrix::identity(2)) < 1e-15);
        let sq = s.apply_function(&CFunction::monomial(2)).unwrap();
        assert!(sq.distance(&CMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn truncation_examples() {
        let s = eigendecompose(&HermitianMatrix::diagonal(&[1.0, 10.0]), &cfg()).unwrap();
        let t = s.spectral_truncate(5.0);
        assert!(t.reconstruct().distance(&CMatrix::diagonal(&[1.0, 0.0])) < 1e-15);
        let u = s.spectral_truncate(11.0);
        assert_eq!(u, s);

        let s = eigendecompose(&HermitianMatrix::diagonal(&[-3.0, 2.0, 7.0]), &cfg()).unwrap();
        let t = s.spectral_truncate(4.0);
        assert!(
            t.reconstruct()
                .distance(&CMatrix::diagonal(&[-3.0, 2.0, 0.0]))
                < 1e-15
        );
        assert_eq!(t.eigenvalues(), &[-3.0, 0.0, 2.0]);
    }

    #[test]
    fn clustering_examples() {
        let a = HermitianMatrix::diagonal(&[1.0, 1.0 + 1e-14, 3.0]);
        let s = eigendecompose(&a, &cfg()).unwrap().cluster_spectrum(1e-8);
        assert_eq!(s.clusters().len(), 2);
        assert_eq!(s.clusters()[0].columns, 0..2);
        assert_eq!(s.clusters()[1].columns, 2..3);

        let b = HermitianMatrix::diagonal(&[1.0, 2.0, 3.0]);
        let s = eigendecompose(&b, &cfg()).unwrap().cluster_spectrum(0.0);
        assert_eq!(s.clusters().len(), 3);

        let c = HermitianMatrix::diagonal(&[2.0, 2.0, 2.0, -1.0]);
        let s = eigendecompose(&c, &cfg()).unwrap();
        assert_eq!(s.clusters().len(), 2);
        let p = s.projection(1);
        assert!((&p * &p).distance(&p) < 1e-10);
        assert!((p.trace().re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_tolerances() {
        assert!(ToleranceConfig::new(0.0, 1e-7, 1e-6).is_err());
        assert!(ToleranceConfig::new(1e-9, -1.0, 1e-6).is_err());
        assert!(ToleranceConfig::new(1e-9, 1e-7, f64::NAN).is_err());
    }
}
