//! JSON interchange for matrices, functions and SSF data.

use num_complex::Complex;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::function::{CFunction, FunctionKind};
use crate::koplienko::{DiagAtom, SsfObject};
use crate::matrix::{CMatrix, HermitianMatrix};
use crate::scalar::Real;

/// `{"dim": d, "re": [[…]], "im": [[…]]}`; `im` defaults to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixFile {
    pub fn from_matrix<T: Real>(m: &CMatrix<T>) -> Self {
        let d = m.dim();
        let rows = |part: fn(&Complex<T>) -> T| {
            (0..d)
                .map(|i| (0..d).map(|j| part(&m[(i, j)]).as_f64()).collect())
                .collect::<Vec<Vec<f64>>>()
        };
        let im = rows(|z| z.im);
        let has_im = im.iter().flatten().any(|v| *v != 0.0);
        Self {
            dim: d,
            re: rows(|z| z.re),
            im: has_im.then_some(im),
        }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<CMatrix<T>> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::Format("dim must be positive".into()));
        }
        let check = |name: &str, rows: &[Vec<f64>]| -> Result<()> {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(Error::Format(format!("\"{name}\" must be {d}x{d}")));
            }
            Ok(())
        };
        check("re", &self.re)?;
        if let Some(im) = &self.im {
            check("im", im)?;
        }
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let re = self.re[i][j];
                let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::Format(format!("non-finite entry at ({i}, {j})")));
                }
                entries.push(Complex::new(T::lit(re), T::lit(im)));
            }
        }
        CMatrix::from_row_major(entries)
    }
}

impl<T: Real> Serialize for CMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile::from_matrix(self).serialize(s)
    }
}

pub fn parse_matrix<T: Real>(json: &str) -> Result<CMatrix<T>> {
    let file: MatrixFile = serde_json::from_str(json).map_err(|e| Error::Format(e.to_string()))?;
    file.to_matrix()
}

pub fn parse_hermitian<T: Real>(json: &str) -> Result<HermitianMatrix<T>> {
    HermitianMatrix::new(parse_matrix(json)?)
}

pub fn matrix_to_json<T: Real>(m: &CMatrix<T>) -> String {
    serde_json::to_string_pretty(&MatrixFile::from_matrix(m)).expect("matrix serializes")
}

/// Function spec as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Poly { coeffs: Vec<f64> },
    Resolvent { m: usize, alpha: [f64; 2] },
    ConjResolvent { m: usize, alpha: [f64; 2] },
    Cis { omega: f64 },
}

impl FunctionSpec {
    pub fn build<T: Real>(&self) -> Result<CFunction<T>> {
        let alpha = |a: &[f64; 2]| Complex::new(T::lit(a[0]), T::lit(a[1]));
        match self {
            FunctionSpec::Poly { coeffs } => Ok(CFunction::polynomial(
                coeffs.iter().map(|c| T::lit(*c)).collect(),
            )),
            FunctionSpec::Resolvent { m, alpha: a } => CFunction::resolvent(*m, alpha(a)),
            FunctionSpec::ConjResolvent { m, alpha: a } => CFunction::conj_resolvent(*m, alpha(a)),
            FunctionSpec::Cis { omega } => Ok(CFunction::cis(T::lit(*omega))),
        }
    }

    /// Inverse of [`FunctionSpec::build`] for the kinds that have a file form.
    pub fn from_function<T: Real>(f: &CFunction<T>) -> Option<Self> {
        let pair = |a: &Complex<T>| [a.re.as_f64(), a.im.as_f64()];
        Some(match f.kind() {
            FunctionKind::Polynomial(c) => FunctionSpec::Poly {
                coeffs: c.iter().map(|v| v.as_f64()).collect(),
            },
            FunctionKind::Resolvent { m, alpha } => FunctionSpec::Resolvent {
                m: *m,
                alpha: pair(alpha),
            },
            FunctionKind::ConjResolvent { m, alpha } => FunctionSpec::ConjResolvent {
                m: *m,
                alpha: pair(alpha),
            },
            FunctionKind::Cis { omega } => FunctionSpec::Cis {
                omega: omega.as_f64(),
            },
            _ => return None,
        })
    }
}

pub fn parse_function<T: Real>(json: &str) -> Result<CFunction<T>> {
    let spec: FunctionSpec =
        serde_json::from_str(json).map_err(|e| Error::Format(e.to_string()))?;
    spec.build()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct SidecarAtom {
    x: f64,
    mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Sidecar {
    diag_atoms: Vec<SidecarAtom>,
    mass: f64,
}

/// `{"diag_atoms": [{"x", "mass"}], "mass"}` accompanying the κ CSV.
pub fn ssf_sidecar<T: Real>(ssf: &SsfObject<T>) -> serde_json::Value {
    let sidecar = Sidecar {
        diag_atoms: ssf
            .diag_atoms()
            .iter()
            .map(|DiagAtom { x, mass }| SidecarAtom {
                x: x.as_f64(),
                mass: mass.as_f64(),
            })
            .collect(),
        mass: ssf.mass().as_f64(),
    };
    serde_json::to_value(sidecar).expect("sidecar serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let json = r#"{"dim":2,"re":[[1,0.5],[0.5,-1]],"im":[[0,2],[-2,0]]}"#;
        let m: CMatrix<f64> = parse_matrix(json).unwrap();
        assert_eq!(m[(0, 1)], Complex::new(0.5, 2.0));
        let back: CMatrix<f64> = parse_matrix(&matrix_to_json(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn imaginary_part_is_optional() {
        let h: HermitianMatrix<f64> = parse_hermitian(r#"{"dim":1,"re":[[3]]}"#).unwrap();
        assert_eq!(h.matrix()[(0, 0)], Complex::new(3.0, 0.0));
    }

    #[test]
    fn malformed_matrices_are_rejected() {
        assert!(matches!(
            parse_matrix::<f64>(r#"{"dim":2,"re":[[1,2]]}"#),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            parse_matrix::<f64>("[1,2]"),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            parse_hermitian::<f64>(r#"{"dim":2,"re":[[0,1],[5,0]]}"#),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn function_specs() {
        let f: CFunction<f64> = parse_function(r#"{"kind":"poly","coeffs":[0,0,1]}"#).unwrap();
        assert_eq!(f.value(3.0).unwrap(), Complex::new(9.0, 0.0));
        let g: CFunction<f64> =
            parse_function(r#"{"kind":"resolvent","m":1,"alpha":[0,1]}"#).unwrap();
        assert_eq!(g.value(0.0).unwrap(), Complex::new(0.0, 1.0));
        let c: CFunction<f64> = parse_function(r#"{"kind":"cis","omega":2}"#).unwrap();
        assert!((c.value(0.5).unwrap() - Complex::new(1f64.cos(), 1f64.sin())).norm() < 1e-15);
        assert_eq!(
            parse_function::<f64>(r#"{"kind":"resolvent","m":1,"alpha":[0,0]}"#).unwrap_err(),
            Error::RealPole
        );
        assert!(matches!(
            parse_function::<f64>(r#"{"kind":"spline"}"#),
            Err(Error::Format(_))
        ));
        let spec = FunctionSpec::from_function(&g).unwrap();
        assert_eq!(
            spec,
            FunctionSpec::Resolvent {
                m: 1,
                alpha: [0.0, 1.0]
            }
        );
    }
}
