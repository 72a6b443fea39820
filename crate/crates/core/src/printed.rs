//! Decimal literals that remember how many places they were printed with.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A value transcribed from a printed table. Comparisons against it use a
/// tolerance of five units in its last printed place.
#[derive(Debug, Clone, PartialEq)]
pub struct PrintedValue {
    text: String,
    value: f64,
    decimals: u32,
}

impl PrintedValue {
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        let value: f64 = trimmed
            .parse()
            .map_err(|_| Error::Invalid(format!("'{text}' is not a decimal number")))?;
        if trimmed.contains(['e', 'E']) {
            return Err(Error::Invalid(format!("'{text}' must use fixed notation")));
        }
        let decimals = trimmed
            .split_once('.')
            .map_or(0, |(_, frac)| frac.len() as u32);
        Ok(Self {
            text: trimmed.to_owned(),
            value,
            decimals,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn decimals(&self) -> u32 {
        self.decimals
    }

    /// `5 × 10^(−decimals)`.
    pub fn tolerance(&self) -> f64 {
        5.0 * 10f64.powi(-(self.decimals as i32))
    }

    pub fn agrees_with(&self, computed: f64) -> bool {
        (computed - self.value).abs() <= self.tolerance()
    }
}

impl Serialize for PrintedValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for PrintedValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        PrintedValue::parse(&text).map_err(serde::de::Error::custom)
    }
}
