//! Seeded random Hermitian inputs.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{CMatrix, HermitianMatrix};
use crate::scalar::Real;

/// Generator used for every seeded draw.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `(M + M*)/2` with entries of `M` uniform on `[−scale, scale]`, real and
/// imaginary parts independent.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    scale: f64,
) -> HermitianMatrix<T> {
    let mut draw = || T::lit(rng.gen_range(-scale..=scale));
    let m = CMatrix::from_fn(dim, |_, _| Complex::new(draw(), draw()));
    HermitianMatrix::new((&m + &m.adjoint()).scale_real(T::lit(0.5))).expect("dim is positive")
}

/// Random complex matrix with entries uniform on `[−scale, scale]²`.
pub fn random_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> CMatrix<T> {
    let mut draw = || T::lit(rng.gen_range(-scale..=scale));
    CMatrix::from_fn(dim, |_, _| Complex::new(draw(), draw()))
}

/// A seeded test pair `(A, K)` with `dim ∈ [min_dim, max_dim]`.
#[derive(Debug, Clone)]
pub struct Pair<T> {
    pub a: HermitianMatrix<T>,
    pub k: HermitianMatrix<T>,
}

/// `count` pairs drawn from one stream seeded by `seed`; `K` is scaled by
/// `k_scale` relative to `A`.
pub fn ensemble<T: Real>(
    seed: u64,
    count: usize,
    min_dim: usize,
    max_dim: usize,
    k_scale: f64,
) -> Vec<Pair<T>> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let dim = rng.gen_range(min_dim..=max_dim);
            let a = random_hermitian(&mut rng, dim, 1.0);
            let k = random_hermitian(&mut rng, dim, k_scale);
            Pair { a, k }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_hermitian_and_reproducible() {
        let a: HermitianMatrix<f64> = random_hermitian(&mut seeded_rng(7), 4, 1.0);
        let b: HermitianMatrix<f64> = random_hermitian(&mut seeded_rng(7), 4, 1.0);
        assert_eq!(a, b);
        assert_eq!(a.matrix().hermitian_defect(), 0.0);
        let e = ensemble::<f64>(3, 5, 2, 6, 0.5);
        assert_eq!(e.len(), 5);
        assert!(e
            .iter()
            .all(|p| (2..=6).contains(&p.a.dim()) && p.a.dim() == p.k.dim()));
    }
}
