//! Exact polynomial interpolation of the continuous path functions.
//!
//! Each path is the unique polynomial of minimal degree through its anchors.
//! The solve runs in exact rational arithmetic (Newton divided differences,
//! then expansion to the monomial basis) and rounds to `f64` only at the end,
//! so the wide spread of anchor abscissae costs no digits.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurements::builtin_scale;

const SCHEME_JSON: &str = include_str!("../data/scheme.json");

/// Names of the five paths a running scheme needs.
pub const PATH_NAMES: [&str; 5] = ["n_s", "n_sb1", "n_sb2", "n_g", "n_f"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub x: f64,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolySpec {
    pub name: String,
    pub degree: usize,
    pub anchors: Vec<Anchor>,
}

/// A fitted polynomial, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyPath {
    pub name: String,
    pub coefficients: Vec<f64>,
}

impl PolyPath {
    pub fn new(name: impl Into<String>, coefficients: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            coefficients,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        eval_polynomial(self, x)
    }

    pub fn derivative(&self) -> PolyPath {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect();
        PolyPath::new(format!("{}'", self.name), coefficients)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }
}

/// Horner evaluation.
pub fn eval_polynomial(p: &PolyPath, x: f64) -> f64 {
    p.coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn validate(spec: &PolySpec) -> Result<()> {
    if spec.anchors.len() != spec.degree + 1 {
        return Err(Error::DegreeMismatch {
            name: spec.name.clone(),
            degree: spec.degree,
            expected: spec.degree + 1,
            got: spec.anchors.len(),
        });
    }
    for (i, a) in spec.anchors.iter().enumerate() {
        if !a.x.is_finite() || !a.target.is_finite() {
            return Err(Error::Invalid(format!("{}: anchor {i} is not finite", spec.name)));
        }
        if let Some(j) = spec.anchors[..i].iter().position(|b| b.x == a.x) {
            return Err(Error::SingularSystem {
                first: j,
                second: i,
                x: a.x,
            });
        }
    }
    Ok(())
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite values convert exactly")
}

/// Interpolating polynomial through the anchors of `spec`.
pub fn solve_polynomial(spec: &PolySpec) -> Result<PolyPath> {
    validate(spec)?;
    let xs: Vec<BigRational> = spec.anchors.iter().map(|a| exact(a.x)).collect();
    let n = xs.len();

    // Divided differences in place: after pass k, dd[i] = f[x_{i-k}, ..., x_i].
    let mut dd: Vec<BigRational> = spec.anchors.iter().map(|a| exact(a.target)).collect();
    for k in 1..n {
        for i in (k..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - k]);
        }
    }

    // Expand the Newton form from the innermost factor outwards.
    let mut poly: Vec<BigRational> = vec![dd[n - 1].clone()];
    for k in (0..n - 1).rev() {
        let mut next = vec![BigRational::zero(); poly.len() + 1];
        for (j, c) in poly.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * &xs[k];
        }
        next[0] += &dd[k];
        poly = next;
    }

    let coefficients = poly
        .iter()
        .map(|c| c.to_f64().expect("coefficients are finite"))
        .collect();
    Ok(PolyPath::new(spec.name.clone(), coefficients))
}

/// Solves the Vandermonde system `V c = y` directly by LU decomposition in
/// double precision. Used to cross-check [`solve_polynomial`].
pub fn solve_vandermonde(spec: &PolySpec) -> Result<PolyPath> {
    validate(spec)?;
    let n = spec.anchors.len();
    let v = DMatrix::from_fn(n, n, |i, j| spec.anchors[i].x.powi(j as i32));
    let y = DVector::from_iterator(n, spec.anchors.iter().map(|a| a.target));
    let c = v
        .lu()
        .solve(&y)
        .ok_or_else(|| Error::Invalid(format!("{}: Vandermonde system is singular", spec.name)))?;
    Ok(PolyPath::new(spec.name.clone(), c.iter().copied().collect()))
}

/// Largest `|p(x) − target|` over the anchors.
pub fn max_residual(spec: &PolySpec, p: &PolyPath) -> f64 {
    spec.anchors
        .iter()
        .map(|a| (p.eval(a.x) - a.target).abs())
        .fold(0.0, f64::max)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    functions: Vec<RawFunction>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunction {
    name: String,
    degree: usize,
    anchors: Vec<RawAnchor>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnchor {
    x: Option<f64>,
    scale_name: Option<String>,
    target: f64,
}

/// Parses a scheme file `{functions: [{name, degree, anchors: [{x | scale_name, target}]}]}`.
///
/// Every one of the five path names must appear exactly once.
pub fn parse_scheme(json: &str) -> Result<Vec<PolySpec>> {
    let raw: RawScheme = serde_json::from_str(json).map_err(|e| Error::Invalid(format!("scheme file: {e}")))?;
    let mut specs = Vec::with_capacity(raw.functions.len());
    for (i, f) in raw.functions.into_iter().enumerate() {
        let at = |msg: String| Error::Invalid(format!("functions[{i}] ({}): {msg}", f.name));
        if !PATH_NAMES.contains(&f.name.as_str()) {
            return Err(at(format!("unknown path name; expected one of {PATH_NAMES:?}")));
        }
        let anchors = f
            .anchors
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let x = match (&a.x, &a.scale_name) {
                    (Some(x), None) => *x,
                    (None, Some(name)) => builtin_scale(name).map_err(|e| at(format!("anchors[{j}]: {e}")))?.x,
                    _ => return Err(at(format!("anchors[{j}]: exactly one of x, scale_name is required"))),
                };
                Ok(Anchor { x, target: a.target })
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = PolySpec {
            name: f.name.clone(),
            degree: f.degree,
            anchors,
        };
        validate(&spec)?;
        specs.push(spec);
    }
    for name in PATH_NAMES {
        let count = specs.iter().filter(|s| s.name == name).count();
        if count != 1 {
            return Err(Error::Invalid(format!("scheme file: path {name} appears {count} times")));
        }
    }
    Ok(specs)
}

/// The five builtin path specifications: quadratics `n_s`, `n_sb1`, `n_sb2`
/// and cubics `n_g`, `n_f`, anchored at full-precision scale positions.
pub fn builtin_scheme_specs() -> &'static [PolySpec] {
    static SPECS: OnceLock<Vec<PolySpec>> = OnceLock::new();
    SPECS.get_or_init(|| parse_scheme(SCHEME_JSON).expect("embedded scheme is valid"))
}

pub fn spec_named<'a>(specs: &'a [PolySpec], name: &str) -> Result<&'a PolySpec> {
    specs
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::Invalid(format!("no path named {name}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtin(name: &str) -> PolyPath {
        solve_polynomial(spec_named(builtin_scheme_specs(), name).unwrap()).unwrap()
    }

    // Coefficients (ascending) from a 40-digit LU solve of the same anchors.
    const REFERENCE: [(&str, &[f64]); 5] = [
        ("n_s", &[1.09010105449, 3.66138857002, -0.0690324928702]),
        ("n_sb1", &[1.08906885178, -0.402911157117, 0.184990272118]),
        ("n_sb2", &[0.922693487582, 0.273821870575, 0.143344361653]),
        ("n_g", &[29.8784244895, 0.473311182929, 0.0550484310884, -0.00233002973022]),
        ("n_f", &[134.656418097, -2.50830288196, -0.487621779042, 0.0176532234984]),
    ];

    #[test]
    fn builtin_coefficients_match_reference() {
        for (name, reference) in REFERENCE {
            let p = builtin(name);
            assert_eq!(p.coefficients.len(), reference.len());
            for (c, r) in p.coefficients.iter().zip(reference) {
                assert!((c - r).abs() <= 1e-11 * r.abs().max(1.0), "{name}: {c} vs {r}");
            }
        }
    }

    #[test]
    fn seventeen_anchors() {
        let specs = builtin_scheme_specs();
        assert_eq!(specs.iter().map(|s| s.anchors.len()).sum::<usize>(), 17);
        let targets = |n: &str| -> Vec<f64> {
            spec_named(specs, n).unwrap().anchors.iter().map(|a| a.target).collect()
        };
        assert_eq!(targets("n_g"), vec![29.0, 30.0, 31.0, 42.0]);
        assert_eq!(targets("n_f"), vec![137.0, 134.000001, 128.0001, 42.0]);
        assert_eq!(targets("n_sb2"), vec![1.0, 2.01, 42.0]);
    }

    #[test]
    fn anchors_reproduced() {
        for spec in builtin_scheme_specs() {
            let p = solve_polynomial(spec).unwrap();
            assert!(max_residual(spec, &p) < 1e-9, "{}", spec.name);
        }
        let ns = builtin("n_s");
        let x_z = builtin_scale("m_Z").unwrap().x;
        assert!((ns.eval(x_z) - 8.001).abs() < 1e-9);
        let nf = builtin("n_f");
        assert!((nf.eval(builtin_scale("m0").unwrap().x) - 137.0).abs() < 1e-9);
    }

    #[test]
    fn identity_line() {
        let spec = PolySpec {
            name: "id".into(),
            degree: 1,
            anchors: vec![Anchor { x: 0.0, target: 0.0 }, Anchor { x: 1.0, target: 1.0 }],
        };
        assert_eq!(solve_polynomial(&spec).unwrap().coefficients, vec![0.0, 1.0]);
        let p = PolyPath::new("p", vec![3.5, -1.0, 2.0]);
        assert_eq!(eval_polynomial(&p, 0.0), 3.5);
    }

    #[test]
    fn solver_errors() {
        let dup = PolySpec {
            name: "dup".into(),
            degree: 1,
            anchors: vec![Anchor { x: 2.0, target: 0.0 }, Anchor { x: 2.0, target: 1.0 }],
        };
        assert!(matches!(solve_polynomial(&dup), Err(Error::SingularSystem { first: 0, second: 1, .. })));
        let short = PolySpec {
            name: "short".into(),
            degree: 3,
            anchors: vec![Anchor { x: 2.0, target: 0.0 }],
        };
        assert!(matches!(solve_polynomial(&short), Err(Error::DegreeMismatch { expected: 4, got: 1, .. })));
    }

    #[test]
    fn solvers_agree() {
        for spec in builtin_scheme_specs() {
            let a = solve_polynomial(spec).unwrap();
            let b = solve_vandermonde(spec).unwrap();
            for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
                assert!((x - y).abs() < 1e-10, "{}: {x} vs {y}", spec.name);
            }
        }
    }

    #[test]
    fn electromagnetic_path_rises_at_electron_scale() {
        let nf = builtin("n_f");
        let x0 = builtin_scale("m0").unwrap().x;
        assert!(nf.derivative().eval(x0) > 0.0);
    }

    #[test]
    fn scheme_file_errors() {
        let missing = r#"{"functions": [{"name": "n_s", "degree": 1, "anchors": [{"x": 0, "target": 1}, {"x": 1, "target": 2}]}]}"#;
        assert!(parse_scheme(missing).unwrap_err().to_string().contains("n_sb1"));
        let bad_scale = r#"{"functions": [{"name": "n_s", "degree": 0, "anchors": [{"scale_name": "m_W", "target": 1}]}]}"#;
        assert!(parse_scheme(bad_scale).unwrap_err().to_string().contains("m_W"));
        let unknown = r#"{"functions": [{"name": "n_q", "degree": 0, "anchors": [{"x": 0, "target": 1}]}]}"#;
        assert!(parse_scheme(unknown).unwrap_err().to_string().contains("unknown path"));
    }
}
