//! Multiple operator integrals for Hermitian matrices, higher-order
//! derivatives of matrix functions, and a constructive Koplienko trace formula.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for `f32`
//! and `f64`); the aliases below fix it to `f64`.
//!
//! ```
//! use opint::{verify_trace_formula, Function, Hermitian, QuadratureSpec, Tolerances};
//!
//! let a = Hermitian::diagonal(&[-0.5, 0.25, 1.0]);
//! let k = Hermitian::from_real_rows(&[
//!     vec![0.1, 0.4, -0.2],
//!     vec![0.4, 0.0, 0.3],
//!     vec![-0.2, 0.3, -0.6],
//! ])?;
//! let f = Function::resolvent(3, opint::C64::new(0.0, 1.0))?;
//! let report = verify_trace_formula(&f, &a, &k, &QuadratureSpec::default(), &Tolerances::default())?;
//! assert!(report.rel_err < 1e-10);
//! # Ok::<(), opint::Error>(())
//! ```

pub mod derivative;
pub mod divdiff;
pub mod error;
pub mod function;
pub mod io;
pub mod jacobi;
pub mod koplienko;
pub mod matrix;
pub mod moi;
pub mod oracle;
pub mod quadrature;
pub mod sample;
pub mod scalar;
pub mod spectral;
pub mod symbol;

pub use derivative::{
    derivative_report, fd_derivative_oracle, gamma_derivative, integral_remainder,
    integral_remainder_trace, richardson_slope, taylor_remainder_direct, taylor_remainder_moi,
    DerivativeReport,
};
pub use divdiff::{divided_difference, h_kernel, psi_integral, psi_kernel, rational_dd_expand};
pub use error::{Error, Result};
pub use function::{CFunction, FunctionKind};
pub use koplienko::{
    build_ssf, nu_aggregate, nu_t_atoms, trace_formula_lhs, trace_formula_rhs,
    verify_trace_formula, DiscreteMeasure2D, SsfObject, TraceReport,
};
pub use matrix::{CMatrix, HermitianMatrix};
pub use moi::{
    moi_eval, moi_separable_eval, perturbation_identity_check, tensor_product_formula,
    trace_pair_identity_check, trace_reduce_aba, MoiResult,
};
pub use oracle::dd_oracle_opitz;
pub use quadrature::{GaussLegendre, QuadratureSpec};
pub use scalar::{Cx, Real};
pub use spectral::{eigendecompose, Cluster, SpectralData, ToleranceConfig};
pub use symbol::{symbol_product, SeparableSeries, Symbol};

pub type C64 = Cx<f64>;
pub type Matrix = CMatrix<f64>;
pub type Hermitian = HermitianMatrix<f64>;
pub type Spectrum = SpectralData<f64>;
pub type Function = CFunction<f64>;
pub type Tolerances = ToleranceConfig<f64>;
pub type Ssf = SsfObject<f64>;
