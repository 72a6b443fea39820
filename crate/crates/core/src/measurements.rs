//! Energy scales, measured couplings and the identification report.
//!
//! Masses are carried in GeV; the running variable is `x = log₁₀(mass / GeV)`.
//! The unification scale has no mass of its own and is stored as `x = 16`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::coupling::{alpha_element, CqElement, Sector};
use crate::error::{Error, Result};
use crate::printed::PrintedValue;
use crate::search::{match_measurement, nearest, SearchCaps, SearchHit, Truncation};

const SCALES_JSON: &str = include_str!("../data/scales.json");
const IDENTIFICATIONS_JSON: &str = include_str!("../data/identifications.json");

/// Window half-width, in σ, used when listing candidates for a measurement.
pub const DEFAULT_MAX_Z: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyScale {
    pub name: String,
    pub mass_gev: f64,
    pub x: f64,
}

impl EnergyScale {
    pub fn from_mass(name: impl Into<String>, mass_gev: f64) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            mass_gev,
            x: xmass_of(mass_gev)?,
        })
    }

    pub fn from_x(name: impl Into<String>, x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::domain(format!("x = {x} is not finite")));
        }
        Ok(Self {
            name: name.into(),
            mass_gev: 10f64.powf(x),
            x,
        })
    }
}

/// `log₁₀` of an energy in GeV.
pub fn xmass_of(mass_gev: f64) -> Result<f64> {
    if !(mass_gev > 0.0) || !mass_gev.is_finite() {
        return Err(Error::domain(format!("mass {mass_gev} GeV must be positive and finite")));
    }
    Ok(mass_gev.log10())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScale {
    name: String,
    mass_mev: Option<f64>,
    mass_gev: Option<f64>,
    x: Option<f64>,
}

impl RawScale {
    fn into_scale(self) -> Result<EnergyScale> {
        match (self.mass_mev, self.mass_gev, self.x) {
            (Some(mev), None, None) => EnergyScale::from_mass(self.name, mev / 1000.0),
            (None, Some(gev), None) => EnergyScale::from_mass(self.name, gev),
            (None, None, Some(x)) => EnergyScale::from_x(self.name, x),
            _ => Err(Error::Invalid(format!(
                "scale '{}' needs exactly one of mass_mev, mass_gev, x",
                self.name
            ))),
        }
    }
}

/// The electron, tau, Z and unification scales.
pub fn builtin_scales() -> &'static [EnergyScale] {
    static SCALES: OnceLock<Vec<EnergyScale>> = OnceLock::new();
    SCALES.get_or_init(|| {
        let raw: Vec<RawScale> = serde_json::from_str(SCALES_JSON).expect("embedded scales parse");
        raw.into_iter()
            .map(|r| r.into_scale().expect("embedded scales are valid"))
            .collect()
    })
}

pub fn builtin_scale(name: &str) -> Result<&'static EnergyScale> {
    builtin_scales()
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::Invalid(format!("unknown scale '{name}'")))
}

/// `α_em / mixing`: the weak coupling implied by an electromagnetic value and
/// the weak mixing factor.
pub fn weak_from_em(alpha_em: f64, mixing: f64) -> Result<f64> {
    if !(alpha_em > 0.0) {
        return Err(Error::domain(format!("alpha_em = {alpha_em} must be > 0")));
    }
    if !(mixing > 0.0 && mixing <= 1.0) {
        return Err(Error::domain(format!("mixing = {mixing} must lie in (0, 1]")));
    }
    Ok(alpha_em / mixing)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Uncertainty {
    Sigma(f64),
    Range { lo: f64, hi: f64 },
}

/// A measured coupling, always expressed in coupling units (not reciprocal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredCoupling {
    pub name: String,
    pub scale: EnergyScale,
    pub center: f64,
    pub uncertainty: Uncertainty,
    /// Set when the value was supplied as `1/α ± σ`.
    pub reciprocal: bool,
    pub claimed_identification: Vec<CqElement>,
}

impl MeasuredCoupling {
    pub fn new(name: impl Into<String>, scale: EnergyScale, center: f64, uncertainty: Uncertainty) -> Result<Self> {
        let name = name.into();
        if !(center > 0.0) || !center.is_finite() {
            return Err(Error::domain(format!("{name}: center {center} must be > 0")));
        }
        match uncertainty {
            Uncertainty::Sigma(s) if !(s > 0.0) || !s.is_finite() => {
                return Err(Error::domain(format!("{name}: sigma {s} must be > 0")));
            }
            Uncertainty::Range { lo, hi } if !(lo < hi) => {
                return Err(Error::domain(format!("{name}: range [{lo}, {hi}] is empty")));
            }
            Uncertainty::Range { lo, hi } if !(lo <= center && center <= hi) => {
                return Err(Error::domain(format!(
                    "{name}: center {center} outside range [{lo}, {hi}]"
                )));
            }
            _ => {}
        }
        Ok(Self {
            name,
            scale,
            center,
            uncertainty,
            reciprocal: false,
            claimed_identification: Vec::new(),
        })
    }

    /// From a measurement of `1/α`. A σ is carried over to first order,
    /// `σ_α = σ / c²`; a range maps endpoint by endpoint.
    pub fn from_reciprocal(
        name: impl Into<String>,
        scale: EnergyScale,
        inverse_center: f64,
        inverse_uncertainty: Uncertainty,
    ) -> Result<Self> {
        let name = name.into();
        if !(inverse_center > 0.0) {
            return Err(Error::domain(format!("{name}: inverse center must be > 0")));
        }
        let unc = match inverse_uncertainty {
            Uncertainty::Sigma(s) => Uncertainty::Sigma(s / (inverse_center * inverse_center)),
            Uncertainty::Range { lo, hi } => {
                if !(lo > 0.0 && lo < hi) {
                    return Err(Error::domain(format!("{name}: inverse range [{lo}, {hi}] invalid")));
                }
                Uncertainty::Range {
                    lo: 1.0 / hi,
                    hi: 1.0 / lo,
                }
            }
        };
        let mut m = Self::new(name, scale, 1.0 / inverse_center, unc)?;
        m.reciprocal = true;
        Ok(m)
    }

    pub fn with_identification(mut self, elements: Vec<CqElement>) -> Self {
        self.claimed_identification = elements;
        self
    }

    pub fn z_score(&self, value: f64) -> Option<f64> {
        match self.uncertainty {
            Uncertainty::Sigma(s) => Some((value - self.center).abs() / s),
            Uncertainty::Range { .. } => None,
        }
    }

    /// Within one σ, or inside the explicit range.
    pub fn in_stated_range(&self, value: f64) -> bool {
        match self.uncertainty {
            Uncertainty::Sigma(s) => (value - self.center).abs() <= s,
            Uncertainty::Range { lo, hi } => lo <= value && value <= hi,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasurement {
    name: String,
    mass_gev: Option<f64>,
    x: Option<f64>,
    center: f64,
    sigma: Option<f64>,
    range: Option<[f64; 2]>,
    #[serde(default)]
    reciprocal: bool,
    #[serde(default)]
    claims: Vec<CqElement>,
}

/// Parses a measurement file: a JSON array of
/// `{name, mass_gev | x, center, sigma | range: [lo, hi], reciprocal?, claims?}`.
pub fn parse_measurements(json: &str) -> Result<Vec<MeasuredCoupling>> {
    let raw: Vec<RawMeasurement> =
        serde_json::from_str(json).map_err(|e| Error::Invalid(format!("measurement file: {e}")))?;
    raw.into_iter()
        .enumerate()
        .map(|(i, r)| {
            let at = |msg: String| Error::Invalid(format!("measurements[{i}] ({}): {msg}", r.name));
            let scale = match (r.mass_gev, r.x) {
                (Some(m), None) => EnergyScale::from_mass(format!("{} scale", r.name), m),
                (None, Some(x)) => EnergyScale::from_x(format!("{} scale", r.name), x),
                _ => return Err(at("exactly one of mass_gev, x is required".into())),
            }
            .map_err(|e| at(e.to_string()))?;
            let unc = match (r.sigma, r.range) {
                (Some(s), None) => Uncertainty::Sigma(s),
                (None, Some([lo, hi])) => Uncertainty::Range { lo, hi },
                _ => return Err(at("exactly one of sigma, range is required".into())),
            };
            let m = if r.reciprocal {
                MeasuredCoupling::from_reciprocal(r.name.clone(), scale, r.center, unc)
            } else {
                MeasuredCoupling::new(r.name.clone(), scale, r.center, unc)
            }
            .map_err(|e| at(e.to_string()))?;
            Ok(m.with_identification(r.claims))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    /// A measured value with a stated uncertainty.
    Measured,
    /// An approximate value; its printed digits imply a half-unit range.
    Approximate,
    /// An assignment with no measured counterpart; echoed with its value.
    Prediction,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIdentification {
    label: String,
    sector: Sector,
    scale: String,
    kind: RowKind,
    center: Option<f64>,
    sigma: Option<f64>,
    #[serde(default)]
    reciprocal: bool,
    printed_center: Option<PrintedValue>,
    derived_from: Option<DerivedWeak>,
    claims: Vec<RawClaim>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct DerivedWeak {
    inverse_em: f64,
    mixing: f64,
}

#[derive(Deserialize)]
struct RawClaim {
    #[serde(flatten)]
    element: CqElement,
    printed: Option<PrintedValue>,
    #[serde(default)]
    misprint: bool,
}

/// One row of the embedded identification table.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationEntry {
    pub label: String,
    pub sector: Sector,
    pub kind: RowKind,
    pub scale: EnergyScale,
    pub measurement: Option<MeasuredCoupling>,
    pub claims: Vec<Claim>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub element: CqElement,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed: Option<PrintedValue>,
    pub misprint: bool,
}

/// The identification table: measured rows and pure assignments.
pub fn builtin_identifications() -> &'static [IdentificationEntry] {
    static ROWS: OnceLock<Vec<IdentificationEntry>> = OnceLock::new();
    ROWS.get_or_init(|| {
        let raw: Vec<RawIdentification> =
            serde_json::from_str(IDENTIFICATIONS_JSON).expect("embedded identifications parse");
        raw.into_iter()
            .map(|r| r.into_entry().expect("embedded identifications are valid"))
            .collect()
    })
}

/// The measured rows of the identification table as measurements.
pub fn builtin_measurements() -> Vec<MeasuredCoupling> {
    builtin_identifications()
        .iter()
        .filter_map(|e| e.measurement.clone())
        .collect()
}

impl RawIdentification {
    fn into_entry(self) -> Result<IdentificationEntry> {
        let scale = builtin_scale(&self.scale)?.clone();
        let claimed: Vec<CqElement> = self.claims.iter().map(|c| c.element).collect();
        let measurement = match self.kind {
            RowKind::Prediction => None,
            RowKind::Measured => {
                let (center, sigma) = self
                    .center
                    .zip(self.sigma)
                    .ok_or_else(|| Error::Invalid(format!("{}: measured rows need center and sigma", self.label)))?;
                let m = if self.reciprocal {
                    MeasuredCoupling::from_reciprocal(&self.label, scale.clone(), center, Uncertainty::Sigma(sigma))?
                } else {
                    MeasuredCoupling::new(&self.label, scale.clone(), center, Uncertainty::Sigma(sigma))?
                };
                Some(m.with_identification(claimed))
            }
            RowKind::Approximate => {
                let printed = self
                    .printed_center
                    .as_ref()
                    .ok_or_else(|| Error::Invalid(format!("{}: approximate rows need printed_center", self.label)))?;
                let center = match self.derived_from {
                    Some(d) => weak_from_em(1.0 / d.inverse_em, d.mixing)?,
                    None => printed.value(),
                };
                let half = 0.5 * 10f64.powi(-(printed.decimals() as i32));
                let unc = Uncertainty::Range {
                    lo: printed.value() - half,
                    hi: printed.value() + half,
                };
                let m = MeasuredCoupling::new(&self.label, scale.clone(), center, unc)?;
                Some(m.with_identification(claimed))
            }
        };
        Ok(IdentificationEntry {
            label: self.label,
            sector: self.sector,
            kind: self.kind,
            scale,
            measurement,
            claims: self
                .claims
                .into_iter()
                .map(|c| Claim {
                    element: c.element,
                    printed: c.printed,
                    misprint: c.misprint,
                })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimStatus {
    /// Inside the stated uncertainty.
    Confirmed,
    /// Outside the stated uncertainty.
    Flagged,
    /// No measurement to test against; value echoed.
    Echo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimCheck {
    pub element: CqElement,
    pub value: f64,
    pub reciprocal_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed: Option<PrintedValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed_agrees: Option<bool>,
    pub misprint: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_stated_range: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_nearest: Option<bool>,
    pub status: ClaimStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentificationRow {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector: Option<Sector>,
    pub kind: RowKind,
    pub scale: String,
    pub x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<Uncertainty>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nearest: Option<SearchHit>,
    /// Elements inside `center ± 3σ` (or the range).
    pub candidates: usize,
    pub truncated: Vec<Truncation>,
    pub claims: Vec<ClaimCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentificationReport {
    pub caps: SearchCaps,
    pub rows: Vec<IdentificationRow>,
}

impl IdentificationReport {
    pub fn row(&self, label: &str) -> Option<&IdentificationRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

impl IdentificationRow {
    pub fn claim(&self, e: CqElement) -> Option<&ClaimCheck> {
        self.claims.iter().find(|c| c.element == e)
    }
}

/// Checks every assignment in the embedded identification table against its
/// measurement. Nothing is adopted on trust: each claim is evaluated, located
/// relative to the stated uncertainty and compared with the true nearest
/// capped element.
pub fn reproduce_identifications(caps: &SearchCaps) -> Result<IdentificationReport> {
    let rows = builtin_identifications()
        .iter()
        .map(|entry| {
            let claims: Vec<Claim> = entry.claims.clone();
            build_row(
                &entry.label,
                Some(entry.sector),
                entry.kind,
                &entry.scale,
                entry.measurement.as_ref(),
                &claims,
                caps,
            )
        })
        .collect::<Result<_>>()?;
    Ok(IdentificationReport { caps: *caps, rows })
}

/// The same checks for user-supplied measurements; their `claims` play the
/// role of the assignments.
pub fn identify_measurements(measurements: &[MeasuredCoupling], caps: &SearchCaps) -> Result<IdentificationReport> {
    let rows = measurements
        .iter()
        .map(|m| {
            let claims: Vec<Claim> = m
                .claimed_identification
                .iter()
                .map(|&element| Claim {
                    element,
                    printed: None,
                    misprint: false,
                })
                .collect();
            build_row(&m.name, None, RowKind::Measured, &m.scale, Some(m), &claims, caps)
        })
        .collect::<Result<_>>()?;
    Ok(IdentificationReport { caps: *caps, rows })
}

fn build_row(
    label: &str,
    sector: Option<Sector>,
    kind: RowKind,
    scale: &EnergyScale,
    measurement: Option<&MeasuredCoupling>,
    claims: &[Claim],
    caps: &SearchCaps,
) -> Result<IdentificationRow> {
    let (nearest_hit, candidates, truncated) = match measurement {
        Some(m) => {
            let hit = nearest(m.center, caps)?;
            let window = match_measurement(m, caps, DEFAULT_MAX_Z)?;
            (Some(hit), window.hits.len(), window.truncated)
        }
        None => (None, 0, Vec::new()),
    };
    let checks = claims
        .iter()
        .map(|c| {
            let value = alpha_element(c.element)?.value;
            let printed_agrees = c.printed.as_ref().map(|p| p.agrees_with(value));
            let check = match measurement {
                Some(m) => {
                    let within = m.in_stated_range(value);
                    ClaimCheck {
                        element: c.element,
                        value,
                        reciprocal_value: 1.0 / value,
                        printed: c.printed.clone(),
                        printed_agrees,
                        misprint: c.misprint,
                        distance: Some((value - m.center).abs()),
                        z_score: m.z_score(value),
                        within_stated_range: Some(within),
                        is_nearest: nearest_hit.map(|h| h.element == c.element),
                        status: if within {
                            ClaimStatus::Confirmed
                        } else {
                            ClaimStatus::Flagged
                        },
                    }
                }
                None => ClaimCheck {
                    element: c.element,
                    value,
                    reciprocal_value: 1.0 / value,
                    printed: c.printed.clone(),
                    printed_agrees,
                    misprint: c.misprint,
                    distance: None,
                    z_score: None,
                    within_stated_range: None,
                    is_nearest: None,
                    status: ClaimStatus::Echo,
                },
            };
            Ok(check)
        })
        .collect::<Result<_>>()?;
    Ok(IdentificationRow {
        label: label.to_owned(),
        sector,
        kind,
        scale: scale.name.clone(),
        x: scale.x,
        center: measurement.map(|m| m.center),
        uncertainty: measurement.map(|m| m.uncertainty),
        nearest: nearest_hit,
        candidates,
        truncated,
        claims: checks,
    })
}
