//! The polygon coupling formula and the two element kinds of the candidate set.
//!
//! A pure element is `α(n₁,n₂) = n₂·cos(π/n₁)·tan(π/(n₁n₂))/π`. A mean element
//! is the arithmetic mean of two neighbours in `n₁` sharing `n₂`, and models a
//! measurement sitting on the boundary between two consecutive values.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative error bound of the native evaluation path, in units of the value.
///
/// Each of the six floating point operations contributes at most one rounding
/// (libm `cos`/`tan` are faithfully rounded); the bound is certified against
/// the extended precision oracle in the test suite.
const NATIVE_REL_BOUND: f64 = 8.0 * f64::EPSILON;

/// Index pair `(n₁, n₂)` of a pure element.
///
/// Valid pairs are `(2, 1)` and every `n₁ ≥ 3, n₂ ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawIndex", into = "RawIndex")]
pub struct PolygonIndex {
    n1: u32,
    n2: u32,
}

#[derive(Serialize, Deserialize)]
struct RawIndex {
    n1: u32,
    n2: u32,
}

impl TryFrom<RawIndex> for PolygonIndex {
    type Error = Error;

    fn try_from(raw: RawIndex) -> Result<Self> {
        PolygonIndex::new(raw.n1, raw.n2)
    }
}

impl From<PolygonIndex> for RawIndex {
    fn from(idx: PolygonIndex) -> Self {
        RawIndex { n1: idx.n1, n2: idx.n2 }
    }
}

impl PolygonIndex {
    pub fn new(n1: u32, n2: u32) -> Result<Self> {
        check_pair(i64::from(n1), i64::from(n2))?;
        Ok(Self { n1, n2 })
    }

    /// Validates a pair given as signed integers, as produced by quantized paths.
    pub fn from_signed(n1: i64, n2: i64) -> Result<Self> {
        check_pair(n1, n2)?;
        let n1 = u32::try_from(n1).map_err(|_| Error::domain(format!("n1 = {n1} exceeds u32")))?;
        let n2 = u32::try_from(n2).map_err(|_| Error::domain(format!("n2 = {n2} exceeds u32")))?;
        Ok(Self { n1, n2 })
    }

    pub fn n1(self) -> u32 {
        self.n1
    }

    pub fn n2(self) -> u32 {
        self.n2
    }

    /// The complementary pair `(n₂, n₁)`, if it is itself valid.
    pub fn swapped(self) -> Result<Self> {
        Self::new(self.n2, self.n1)
    }
}

fn check_pair(n1: i64, n2: i64) -> Result<()> {
    if n1 < 2 {
        return Err(Error::domain(format!(
            "n1 = {n1} violates n1 >= 2 (n1 <= 1 gives non-positive values)"
        )));
    }
    if n2 < 1 {
        return Err(Error::domain(format!("n2 = {n2} violates n2 >= 1")));
    }
    if n1 == 2 && n2 != 1 {
        return Err(Error::domain(format!(
            "(2, {n2}) violates n1 = 2 => n2 = 1 (cos(pi/2) = 0)"
        )));
    }
    Ok(())
}

impl fmt::Display for PolygonIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n1, self.n2)
    }
}

/// A member of the candidate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CqElement {
    Pure(PolygonIndex),
    /// Mean of `(n₁, n₂)` and `(n₁ + 1, n₂)`; the index holds the lower `n₁`.
    Mean(PolygonIndex),
}

impl CqElement {
    pub fn pure(n1: u32, n2: u32) -> Result<Self> {
        PolygonIndex::new(n1, n2).map(CqElement::Pure)
    }

    pub fn mean(n1: u32, n2: u32) -> Result<Self> {
        let idx = PolygonIndex::new(n1, n2)?;
        upper_neighbour(idx)?;
        Ok(CqElement::Mean(idx))
    }

    pub fn index(self) -> PolygonIndex {
        match self {
            CqElement::Pure(idx) | CqElement::Mean(idx) => idx,
        }
    }

    pub fn is_mean(self) -> bool {
        matches!(self, CqElement::Mean(_))
    }

    /// Deterministic order: `n₁`, then `n₂`, pure before mean.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        let a = self.index();
        let b = other.index();
        (a.n1, a.n2, self.is_mean()).cmp(&(b.n1, b.n2, other.is_mean()))
    }
}

impl fmt::Display for CqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CqElement::Pure(idx) => write!(f, "alpha{idx}"),
            CqElement::Mean(idx) => write!(f, "mean{idx}"),
        }
    }
}

fn upper_neighbour(idx: PolygonIndex) -> Result<PolygonIndex> {
    let n1 = idx
        .n1
        .checked_add(1)
        .ok_or_else(|| Error::domain("n1 + 1 overflows"))?;
    PolygonIndex::new(n1, idx.n2)
}

/// The three running couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Strong,
    Weak,
    Em,
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::Strong => "strong",
            Sector::Weak => "weak",
            Sector::Em => "em",
        })
    }
}

/// A coupling value with the absolute error bound of the path that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingValue {
    pub value: f64,
    pub precision_bound: f64,
}

impl CouplingValue {
    pub fn reciprocal(self) -> f64 {
        1.0 / self.value
    }
}

/// `α(n₁, n₂)` in double precision.
///
/// For `n₂ = 1` the product `cos θ · tan θ` collapses to `sin θ`, which also
/// covers the `tan(π/2)` singularity at `(2, 1)`.
pub fn alpha_pure(idx: PolygonIndex) -> CouplingValue {
    let n1 = f64::from(idx.n1);
    let value = if idx.n2 == 1 {
        (PI / n1).sin() / PI
    } else {
        let n2 = f64::from(idx.n2);
        n2 * (PI / n1).cos() * (PI / (n1 * n2)).tan() / PI
    };
    CouplingValue {
        value,
        precision_bound: value * NATIVE_REL_BOUND,
    }
}

/// Mean of `α(n₁, n₂)` and `α(n₁ + 1, n₂)`.
pub fn alpha_mean(idx: PolygonIndex) -> Result<CouplingValue> {
    let upper = upper_neighbour(idx)?;
    let a = alpha_pure(idx);
    let b = alpha_pure(upper);
    let value = 0.5 * (a.value + b.value);
    Ok(CouplingValue {
        value,
        precision_bound: 0.5 * (a.precision_bound + b.precision_bound) + value * f64::EPSILON,
    })
}

pub fn alpha_element(e: CqElement) -> Result<CouplingValue> {
    match e {
        CqElement::Pure(idx) => Ok(alpha_pure(idx)),
        CqElement::Mean(idx) => alpha_mean(idx),
    }
}

/// Limit of `α(n₁, n₂)` as `n₂ → ∞`: `cos(π/n₁)/n₁`.
pub fn lower_asymptote(n1: u32) -> Result<f64> {
    if n1 < 3 {
        return Err(Error::domain(format!("lower_asymptote needs n1 >= 3, got {n1}")));
    }
    let n1 = f64::from(n1);
    Ok((PI / n1).cos() / n1)
}

/// `n₁·α(n₁, n₂)`: the quantized velocity as a fraction of light speed.
pub fn velocity_ratio(idx: PolygonIndex) -> f64 {
    f64::from(idx.n1) * alpha_pure(idx).value
}

#[cfg(test)]
mod tests {
    use super::*;

    macro_rules! assert_close {
        ($a:expr, $b:expr, $tol:expr) => {{
            let (a, b): (f64, f64) = ($a, $b);
            assert!((a - b).abs() <= $tol, "{a} vs {b} (tol {})", $tol);
        }};
    }

    fn pure(n1: u32, n2: u32) -> f64 {
        alpha_pure(PolygonIndex::new(n1, n2).unwrap()).value
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn printed_values() {
        assert_close!(pure(137, 29), 0.0072973525318, 5e-13);
        assert_close!(pure(2, 1), 0.318309886183, 5e-12);
        assert_close!(pure(2, 1), 1.0 / PI, 1e-16);
        assert_close!(pure(42, 42), 0.023742972654, 5e-12);
        assert_close!(pure(8, 2), 0.116992293559, 5e-12);
    }

    #[test]
    fn domain_rules() {
        assert!(PolygonIndex::new(1, 1).is_err());
        assert!(PolygonIndex::new(0, 5).is_err());
        assert!(PolygonIndex::new(3, 0).is_err());
        let err = PolygonIndex::new(2, 2).unwrap_err();
        assert!(err.to_string().contains("n1 = 2"), "{err}");
        assert!(PolygonIndex::new(2, 1).is_ok());
        assert!(PolygonIndex::from_signed(-4, 1).is_err());
        assert!(CqElement::mean(2, 1).is_ok());
        assert!(CqElement::mean(2, 3).is_err());
    }

    #[test]
    fn mean_elements() {
        let m = alpha_mean(PolygonIndex::new(133, 30).unwrap()).unwrap();
        assert!((m.reciprocal() - 133.5).abs() < 0.05);
        let m = alpha_mean(PolygonIndex::new(2, 1).unwrap()).unwrap().value;
        let closed = (1.0 / PI + (PI / 3.0).sin() / PI) / 2.0;
        assert_close!(m, closed, 1e-16);
        assert_close!(m, 0.296987, 5e-7);
        let e = CqElement::mean(133, 30).unwrap();
        assert_eq!(alpha_element(e).unwrap(), alpha_mean(e.index()).unwrap());
        assert_close!(alpha_element(CqElement::pure(29, 137).unwrap()).unwrap().value, 0.034280626357, 5e-12);
    }

    #[test]
    fn asymptote() {
        assert_close!(lower_asymptote(3).unwrap(), 1.0 / 6.0, 1e-16);
        let a137 = lower_asymptote(137).unwrap();
        assert!(a137 < pure(137, 29));
        assert_close!(a137, 0.00729735, 5e-9);
        let a30 = lower_asymptote(30).unwrap();
        assert!(a30 < 0.033150736696 && a30 < pure(30, 133));
        assert_close!(a30, 0.0331507298, 5e-11);
        assert!(lower_asymptote(2).is_err());
    }

    #[test]
    fn velocity() {
        let idx = |a, b| PolygonIndex::new(a, b).unwrap();
        assert_close!(velocity_ratio(idx(137, 29)), 137.0 * 0.0072973525318, 1e-10);
        assert_close!(velocity_ratio(idx(2, 1)), 2.0 / PI, 1e-15);
        assert_close!(velocity_ratio(idx(3, 1)), 3.0 * (PI / 3.0).sin() / PI, 1e-15);
        assert_close!(velocity_ratio(idx(3, 1)), 0.826993, 5e-7);
    }

    #[test]
    fn serde_rejects_invalid_index() {
        let ok: CqElement = serde_json::from_str(r#"{"kind":"pure","n1":137,"n2":29}"#).unwrap();
        assert_eq!(ok, CqElement::pure(137, 29).unwrap());
        assert!(serde_json::from_str::<CqElement>(r#"{"kind":"pure","n1":2,"n2":4}"#).is_err());
    }
}
