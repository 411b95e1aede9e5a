mod common;

use num_complex::Complex;
use opint::koplienko::{assemble, Atom, DiscreteMeasure2D};
use opint::sample::random_hermitian;
use opint::{
    build_ssf, divided_difference, eigendecompose, gamma_derivative, h_kernel, moi_eval,
    nu_t_atoms, perturbation_identity_check, psi_kernel, tensor_product_formula, trace_formula_rhs,
    trace_pair_identity_check, Function, GaussLegendre, Hermitian, Matrix, QuadratureSpec,
    Spectrum, Symbol, Tolerances,
};
use proptest::prelude::*;

use common::{catalog, hermitian, matrix, rng};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn spec(h: &Hermitian) -> Spectrum {
    eigendecompose(h, &tol()).unwrap()
}

fn poly() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 1..=7)
}

fn catalog_index() -> impl Strategy<Value = usize> {
    0..catalog().len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reconstruction(seed in any::<u64>(), dim in 1usize..=32) {
        let a: Hermitian = random_hermitian(&mut rng(seed), dim, 1.0);
        let s = spec(&a);
        let err = s.reconstruct().distance(a.matrix());
        prop_assert!(err <= 1e-10 * (1.0 + a.frobenius()), "{err}");
    }

    #[test]
    fn calculus_is_multiplicative(seed in any::<u64>(), dim in 1usize..=6, p in poly(), q in poly()) {
        let s = spec(&hermitian(&mut rng(seed), dim, 1.0));
        let (f, g) = (Function::polynomial(p), Function::polynomial(q));
        let fg = s.apply_function(&Function::product(f.clone(), g.clone())).unwrap();
        let prod = &s.apply_function(&f).unwrap() * &s.apply_function(&g).unwrap();
        prop_assert!(fg.distance(&prod) <= 1e-10 * (1.0 + prod.frobenius()));
    }

    #[test]
    fn projections_resolve_identity(seed in any::<u64>(), dim in 1usize..=6, repeat in 0usize..3) {
        // repeated eigenvalues exercise multi-column clusters
        let mut g = rng(seed);
        let mut values: Vec<f64> = (0..dim).map(|i| i as f64 * 0.7 - 1.0).collect();
        for i in 0..repeat.min(dim.saturating_sub(1)) {
            values[i + 1] = values[i];
        }
        let basis = spec(&hermitian(&mut g, dim, 1.0)).eigenvectors().clone();
        let a = Hermitian::new(&(&basis * &Matrix::diagonal(&values)) * &basis.adjoint()).unwrap();
        let s = spec(&a);
        let n = s.clusters().len();
        let mut sum = Matrix::zeros(dim);
        for i in 0..n {
            let pi = s.projection(i);
            sum = &sum + &pi;
            for j in 0..n {
                let pij = &pi * &s.projection(j);
                let expect = if i == j { pi.clone() } else { Matrix::zeros(dim) };
                prop_assert!(pij.distance(&expect) < 1e-10);
            }
        }
        prop_assert!(sum.distance(&Matrix::identity(dim)) < 1e-10);
    }

    #[test]
    fn truncation_distance_is_monotone(seed in any::<u64>(), dim in 1usize..=6) {
        let a = hermitian(&mut rng(seed), dim, 2.0);
        let s = spec(&a);
        let mut previous = f64::INFINITY;
        for step in 1..=40 {
            let j = 0.1 * step as f64;
            let d = s.spectral_truncate(j).reconstruct().distance(a.matrix());
            prop_assert!(d <= previous + 1e-12);
            previous = d;
        }
        let beyond = s.spectral_truncate(s.spectral_radius() * 1.01 + 1e-9);
        prop_assert_eq!(beyond.eigenvalues(), s.eigenvalues());
    }

    #[test]
    fn divided_differences_are_bounded(p in poly(), nodes in prop::collection::vec(-1.0..1.0f64, 2..=5)) {
        let f = Function::polynomial(p);
        let n = nodes.len() - 1;
        let value = divided_difference(&f, &nodes, &tol()).unwrap().norm();
        // sup of |f^(n)|/n! on [−1, 1] bounded by a fine scan plus slack
        let sup = (0..=2000)
            .map(|i| f.derivative(n, -1.0 + i as f64 / 1000.0).unwrap().norm())
            .fold(0.0, f64::max);
        let fact: f64 = (1..=n).map(|i| i as f64).product();
        prop_assert!(value <= sup / fact * (1.0 + 1e-6) + 1e-12);
    }

    #[test]
    fn divided_difference_matches_oracle(i in catalog_index(), nodes in prop::collection::vec(-2.0..2.0f64, 1..=5)) {
        let e = &catalog()[i];
        let a = divided_difference(&e.f, &nodes, &tol()).unwrap();
        let b = opint::dd_oracle_opitz(&e.f, &nodes).unwrap();
        prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn moi_is_linear(seed in any::<u64>(), dim in 2usize..=5, i in catalog_index(), j in catalog_index(), c in -2.0..2.0f64) {
        let mut g = rng(seed);
        let sa = spec(&hermitian(&mut g, dim, 1.0));
        let sb = spec(&hermitian(&mut g, dim, 1.0));
        let (k1, k2) = (matrix(&mut g, dim), matrix(&mut g, dim));
        let cat = catalog();
        let u = Symbol::divided_difference(&cat[i].f, 1, &tol()).unwrap();
        let v = Symbol::divided_difference(&cat[j].f, 1, &tol()).unwrap();
        let (u2, v2) = (u.clone(), v.clone());
        let combo = Symbol::callable(2, move |x| Ok(u2.eval(x)? + v2.eval(x)? * c));
        let lhs = moi_eval(&[&sa, &sb], &combo, &[&k1]).unwrap().value;
        let rhs = &moi_eval(&[&sa, &sb], &u, &[&k1]).unwrap().value
            + &moi_eval(&[&sa, &sb], &v, &[&k1]).unwrap().value.scale_real(c);
        prop_assert!(lhs.distance(&rhs) <= 1e-12 * (1.0 + lhs.frobenius()));

        let mixed = &k1 + &k2.scale_real(c);
        let lhs = moi_eval(&[&sa, &sb], &u, &[&mixed]).unwrap().value;
        let rhs = &moi_eval(&[&sa, &sb], &u, &[&k1]).unwrap().value
            + &moi_eval(&[&sa, &sb], &u, &[&k2]).unwrap().value.scale_real(c);
        prop_assert!(lhs.distance(&rhs) <= 1e-12 * (1.0 + lhs.frobenius()));
    }

    #[test]
    fn real_symbols_preserve_hermiticity(seed in any::<u64>(), dim in 2usize..=6, p in poly()) {
        let mut g = rng(seed);
        let s = spec(&hermitian(&mut g, dim, 1.0));
        let k = hermitian(&mut g, dim, 1.0);
        let phi = Symbol::divided_difference(&Function::polynomial(p), 1, &tol()).unwrap();
        let out = moi_eval(&[&s, &s], &phi, &[k.matrix()]).unwrap().value;
        prop_assert!(out.hermitian_defect() <= 1e-10 * (1.0 + out.frobenius()));
    }

    #[test]
    fn elementary_tensors_match_products(seed in any::<u64>(), dim in 1usize..=4, n in 1usize..=4, shift in catalog_index()) {
        let mut g = rng(seed);
        let cat = catalog();
        let spectra: Vec<Spectrum> = (0..n).map(|_| spec(&hermitian(&mut g, dim, 1.0))).collect();
        let sr: Vec<&Spectrum> = spectra.iter().collect();
        let ks: Vec<Matrix> = (1..n).map(|_| matrix(&mut g, dim)).collect();
        let kr: Vec<&Matrix> = ks.iter().collect();
        let factors: Vec<Function> = (0..n).map(|i| cat[(i + shift) % cat.len()].f.clone()).collect();
        let via_moi = moi_eval(&sr, &Symbol::tensor(factors.clone()), &kr).unwrap().value;
        let direct = tensor_product_formula(&sr, &factors, &kr).unwrap();
        prop_assert!(via_moi.distance(&direct) <= 1e-10 * (1.0 + direct.frobenius()));
    }

    #[test]
    fn identities_hold_on_random_inputs(seed in any::<u64>(), dim in 2usize..=5, i in catalog_index(), j in catalog_index()) {
        let mut g = rng(seed);
        let cat = catalog();
        let a = hermitian(&mut g, dim, 1.0);
        let b = hermitian(&mut g, dim, 1.0);
        let (sa, sb) = (spec(&a), spec(&b));
        let (x, y) = (matrix(&mut g, dim), matrix(&mut g, dim));
        let u = Symbol::divided_difference(&cat[i].f, 1, &tol()).unwrap();
        let v = Symbol::divided_difference(&cat[j].f, 1, &tol()).unwrap();
        prop_assert!(trace_pair_identity_check(&sa, &sb, &u, &v, &x, &y).unwrap() < 1e-9);
        let sc = spec(&hermitian(&mut g, dim, 1.0));
        for slot in 1..=2 {
            let r = perturbation_identity_check(&[&sc], slot, &cat[i].f, 2, &[&x], &a, &b, &tol()).unwrap();
            prop_assert!(r < 1e-9, "slot {slot}: {r}");
        }
    }

    #[test]
    fn derivative_is_lipschitz_in_t(seed in any::<u64>(), dim in 2usize..=4, i in catalog_index(), order in 1usize..=3) {
        let mut g = rng(seed);
        let a = hermitian(&mut g, dim, 1.0);
        let k = hermitian(&mut g, dim, 0.5);
        let f = &catalog()[i].f;
        let at = |t: f64| gamma_derivative(f, &a, &k, t, order, &tol()).unwrap();
        let samples: Vec<Matrix> = (0..10).map(|s| at(s as f64 / 9.0)).collect();
        let slopes: Vec<f64> = samples.windows(2).map(|w| w[1].distance(&w[0]) * 9.0).collect();
        let bound = slopes.iter().cloned().fold(0.0, f64::max);
        // a refined scan between the first two points stays within twice the coarse constant
        let fine: Vec<Matrix> = (0..=10).map(|s| at(s as f64 / 90.0)).collect();
        for w in fine.windows(2) {
            prop_assert!(w[1].distance(&w[0]) * 90.0 <= 2.0 * bound + 1e-9);
        }
    }

    #[test]
    fn nu_t_is_positive_with_hs_mass(seed in any::<u64>(), dim in 1usize..=6, t in 0.0..1.0f64) {
        let mut g = rng(seed);
        let a = hermitian(&mut g, dim, 1.0);
        let k = hermitian(&mut g, dim, 0.5);
        let nu = nu_t_atoms(&a, &k, t, &tol()).unwrap();
        prop_assert!(nu.atoms().iter().all(|x| x.weight >= 0.0));
        let hs = k.matrix().frobenius_sq();
        prop_assert!((nu.total_mass() - hs).abs() <= 1e-12 * (1.0 + hs));
    }

    #[test]
    fn ramp_quadrature_reproduces_psi(p in poly(), x in -2.0..2.0f64, gap in 0.05..3.0f64) {
        let y = x + gap;
        let f = Function::polynomial(p);
        let rule = GaussLegendre::new(4).on_interval(x, y);
        let quad = rule.pairs().fold(Complex::new(0.0, 0.0), |acc, (u, w)| {
            acc + f.derivative(2, u).unwrap() * (w * h_kernel(x, y, u, 1e-9).unwrap())
        });
        let psi = psi_kernel(&f, x, y, &tol()).unwrap();
        prop_assert!((quad - psi).norm() <= 1e-9 * (1.0 + psi.norm()));
    }

    #[test]
    fn assembled_density_matches_atoms(atoms in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, 0.0..1.0f64), 0..12), p in poly()) {
        let atoms: Vec<Atom<f64>> = atoms.into_iter().map(|(x, y, weight)| Atom { x, y, weight }).collect();
        let nu = DiscreteMeasure2D::new(atoms);
        let ssf = assemble(&nu, 1e-6);
        prop_assert!((2.0 * ssf.mass() - nu.total_mass()).abs() <= 1e-12 * (1.0 + nu.total_mass()));
        prop_assert!(ssf.segments().iter().all(|&(l, r)| l >= 0.0 && r >= 0.0));
        // ∫ f″ dγ = Σ w ψ(x, y) with ψ(x, x) = f″(x)/2
        let f = Function::polynomial(p);
        let expect = nu.integrate(|x, y| psi_kernel(&f, x, y, &tol())).unwrap();
        let rhs = trace_formula_rhs(&ssf, &f).unwrap();
        prop_assert!((rhs - expect).norm() <= 1e-8 * (1.0 + expect.norm()));
    }
}

#[test]
fn rhs_converges_in_quadrature_order() {
    let mut g = rng(12);
    let a = hermitian(&mut g, 4, 1.0);
    let k = hermitian(&mut g, 4, 0.5);
    let f = Function::resolvent(3, common::I).unwrap();
    let rhs: Vec<Complex<f64>> = [8, 16, 32]
        .iter()
        .map(|&n| {
            trace_formula_rhs(
                &build_ssf(&a, &k, &QuadratureSpec::new(n).unwrap(), &tol()).unwrap(),
                &f,
            )
            .unwrap()
        })
        .collect();
    let reference = trace_formula_rhs(
        &build_ssf(&a, &k, &QuadratureSpec::new(128).unwrap(), &tol()).unwrap(),
        &f,
    )
    .unwrap();
    let gaps: Vec<f64> = rhs.iter().map(|r| (r - reference).norm()).collect();
    assert!(gaps[0] > gaps[1] && gaps[1] >= gaps[2], "{gaps:?}");
    assert!(gaps[2] < 1e-10, "{gaps:?}");
}

#[test]
fn catalog_derivative_orders_agree_with_oracle_at_t() {
    let mut g = rng(13);
    let a = hermitian(&mut g, 3, 1.0);
    let k = hermitian(&mut g, 3, 0.5);
    for e in catalog() {
        let d = gamma_derivative(&e.f, &a, &k, 0.0, 1, &tol()).unwrap();
        let fd = opint::fd_derivative_oracle(&e.f, &a, &k, 0.0, 1, 1e-4, &tol()).unwrap();
        assert!(d.distance(&fd) < 1e-6, "{}", e.name);
    }
}
