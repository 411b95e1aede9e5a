#![allow(dead_code)]

use num_complex::Complex;
use opint::sample::{random_hermitian, random_matrix, seeded_rng, SeededRng};
use opint::{Function, Hermitian, Matrix};

pub const I: Complex<f64> = Complex { re: 0.0, im: 1.0 };

pub struct Entry {
    pub name: String,
    pub f: Function,
    /// Polynomial degree, `None` for the analytic families.
    pub degree: Option<usize>,
}

/// x², x³, x⁴, x⁶, (x − i)^(−m) and conjugates for m = 1..4, e^(ix).
pub fn catalog() -> Vec<Entry> {
    let mut out: Vec<Entry> = [2, 3, 4, 6]
        .into_iter()
        .map(|d| Entry {
            name: format!("x^{d}"),
            f: Function::monomial(d),
            degree: Some(d),
        })
        .collect();
    for m in 1..=4 {
        out.push(Entry {
            name: format!("f_{m},i"),
            f: Function::resolvent(m, I).unwrap(),
            degree: None,
        });
        out.push(Entry {
            name: format!("conj f_{m},i"),
            f: Function::conj_resolvent(m, I).unwrap(),
            degree: None,
        });
    }
    out.push(Entry {
        name: "e^ix".into(),
        f: Function::cis(1.0),
        degree: None,
    });
    out
}

pub fn rng(seed: u64) -> SeededRng {
    seeded_rng(seed)
}

pub fn hermitian(rng: &mut SeededRng, dim: usize, scale: f64) -> Hermitian {
    random_hermitian(rng, dim, scale)
}

pub fn matrix(rng: &mut SeededRng, dim: usize) -> Matrix {
    random_matrix(rng, dim, 1.0)
}

/// Largest singular value of a Hermitian matrix.
pub fn op_norm(h: &Hermitian) -> f64 {
    let s = opint::eigendecompose(h, &Default::default()).unwrap();
    s.spectral_radius()
}

/// Fourth-order central difference of `g` at `x`.
pub fn derivative_5pt(g: impl Fn(f64) -> Complex<f64>, x: f64, h: f64) -> Complex<f64> {
    (g(x - 2.0 * h) - g(x - h) * 8.0 + g(x + h) * 8.0 - g(x + 2.0 * h)) / (12.0 * h)
}

pub fn rel(err: f64, scale: f64) -> f64 {
    err / scale.max(1.0)
}
