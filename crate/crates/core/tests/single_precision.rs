use opint::{
    eigendecompose, gamma_derivative, verify_trace_formula, CFunction, HermitianMatrix,
    QuadratureSpec, ToleranceConfig,
};

fn pair() -> (HermitianMatrix<f32>, HermitianMatrix<f32>) {
    let a = HermitianMatrix::from_real_rows(&[
        vec![0.6, 0.2, -0.1],
        vec![0.2, -0.4, 0.3],
        vec![-0.1, 0.3, 1.0],
    ])
    .unwrap();
    let k = HermitianMatrix::from_real_rows(&[
        vec![0.1, -0.2, 0.05],
        vec![-0.2, 0.0, 0.15],
        vec![0.05, 0.15, -0.1],
    ])
    .unwrap();
    (a, k)
}

#[test]
fn eigendecomposition_in_f32() {
    let (a, _) = pair();
    let s = eigendecompose(&a, &ToleranceConfig::default()).unwrap();
    assert!(s.reconstruct().distance(a.matrix()) < 1e-5);
}

#[test]
fn trace_formula_in_f32() {
    let (a, k) = pair();
    let tol = ToleranceConfig::default();
    let r = verify_trace_formula(
        &CFunction::monomial(4),
        &a,
        &k,
        &QuadratureSpec::new(16).unwrap(),
        &tol,
    )
    .unwrap();
    assert!(r.rel_err < 1e-4, "{r:?}");
    assert!(r.mass_check < 1e-5);
    let d = gamma_derivative(&CFunction::monomial(2), &a, &k, 0.0, 2, &tol).unwrap();
    let k2 = k.matrix() * k.matrix();
    assert!(d.distance(&k2.scale_real(2.0)) < 1e-5);
}
