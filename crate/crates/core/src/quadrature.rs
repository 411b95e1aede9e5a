//! Gauss–Legendre quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Number of nodes of a Gauss–Legendre rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes: 64 }
    }
}

impl QuadratureSpec {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::BadQuadrature { nodes });
        }
        Ok(Self { nodes })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.nodes).map(|_| ())
    }

    /// Nodes and weights on `[a, b]`.
    pub fn rule_on<T: Real>(&self, a: T, b: T) -> Result<GaussLegendre<T>> {
        self.validate()?;
        Ok(GaussLegendre::new(self.nodes).on_interval(a, b))
    }
}

/// Nodes and weights of an `n`-point Gauss–Legendre rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Rule on `[-1, 1]`; roots of `P_n` by Newton iteration from Chebyshev guesses.
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let pi = T::PI();
        let half = T::lit(0.5);
        let nt = T::from_count(n);
        for i in 0..n.div_ceil(2) {
            let mut x = (pi * (T::from_count(i) + T::lit(0.75)) / (nt + half)).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= T::epsilon() * T::lit(4.0) {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    /// Affinely maps the rule from `[-1, 1]` onto `[a, b]`.
    pub fn on_interval(&self, a: T, b: T) -> Self {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        Self {
            nodes: self.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: self.weights.iter().map(|&w| w * half).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.pairs().fold(T::zero(), |acc, (x, w)| acc + w * f(x))
    }
}

// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=n {
        let kt = T::from_count(k);
        let p2 = ((T::lit(2.0) * kt - T::one()) * x * p1 - (kt - T::one()) * p0) / kt;
        p0 = p1;
        p1 = p2;
    }
    let nt = T::from_count(n);
    let dp = nt * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}
