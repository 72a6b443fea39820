//! Capped search over the candidate set.
//!
//! For fixed `n₁` (and element kind) the values form a family that decreases
//! strictly in `n₂` from `α(n₁, 1)` towards `cos(π/n₁)/n₁`, and the family tops
//! `α(n₁, 1)` decrease in `n₁`. Window queries and nearest-element queries walk
//! the families in `n₁` order, prune with those two bounds, and binary-search
//! `n₂` inside each surviving family.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::coupling::{alpha_element, lower_asymptote, CouplingValue, CqElement, PolygonIndex};
use crate::error::{Error, Result};
use crate::measurements::{MeasuredCoupling, Uncertainty};

/// Finite bounds on the otherwise countably infinite set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCaps {
    pub max_n1: u32,
    pub max_n2: u32,
    pub include_means: bool,
}

impl SearchCaps {
    pub fn new(max_n1: u32, max_n2: u32, include_means: bool) -> Result<Self> {
        if max_n1 < 3 {
            return Err(Error::domain(format!("max_n1 = {max_n1} must be >= 3")));
        }
        if max_n2 < 1 {
            return Err(Error::domain(format!("max_n2 = {max_n2} must be >= 1")));
        }
        Ok(Self {
            max_n1,
            max_n2,
            include_means,
        })
    }

    /// Whether the element lies inside the caps. A mean needs both of its
    /// constituents inside.
    pub fn contains(&self, e: CqElement) -> bool {
        let idx = e.index();
        let top_n1 = if e.is_mean() { idx.n1() + 1 } else { idx.n1() };
        (!e.is_mean() || self.include_means) && top_n1 <= self.max_n1 && idx.n2() <= self.max_n2
    }
}

impl Default for SearchCaps {
    fn default() -> Self {
        Self {
            max_n1: 1000,
            max_n2: 1000,
            include_means: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub element: CqElement,
    pub value: CouplingValue,
    pub distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_score: Option<f64>,
}

impl SearchHit {
    /// Distance ascending, then the element's canonical order.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then_with(|| self.element.canonical_cmp(&other.element))
    }
}

/// Hits of a window or match query plus every `n₁` whose family would
/// contribute infinitely many elements without the `n₂` cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowResult {
    pub hits: Vec<SearchHit>,
    pub truncated: Vec<Truncation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub n1: u32,
    pub mean: bool,
}

impl WindowResult {
    pub fn is_truncated(&self) -> bool {
        !self.truncated.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = CqElement> + '_ {
        self.hits.iter().map(|h| h.element)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Pure,
    Mean,
}

/// One `n₁` slice of the candidate set, monotone decreasing in `n₂`.
#[derive(Debug, Clone, Copy)]
struct Family {
    kind: Kind,
    n1: u32,
    n2_max: u32,
}

impl Family {
    fn element(&self, n2: u32) -> CqElement {
        let idx = PolygonIndex::new(self.n1, n2).expect("family indices are valid");
        match self.kind {
            Kind::Pure => CqElement::Pure(idx),
            Kind::Mean => CqElement::Mean(idx),
        }
    }

    fn value(&self, n2: u32) -> CouplingValue {
        alpha_element(self.element(n2)).expect("family elements are valid")
    }

    fn top(&self) -> f64 {
        self.value(1).value
    }

    /// Infimum over all `n₂`, when the family is infinite.
    fn asymptote(&self) -> Option<f64> {
        if self.n1 < 3 {
            return None;
        }
        let a = lower_asymptote(self.n1).ok()?;
        match self.kind {
            Kind::Pure => Some(a),
            Kind::Mean => Some(0.5 * (a + lower_asymptote(self.n1 + 1).ok()?)),
        }
    }

    /// Smallest `n₂` in `[1, n2_max + 1]` with `pred` false, for a predicate
    /// that is true on a prefix of the family.
    fn partition_point(&self, pred: impl Fn(f64) -> bool) -> u32 {
        let (mut lo, mut hi) = (1u32, self.n2_max + 1);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if pred(self.value(mid).value) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// Families in ascending `n₁`, kind by kind. Tops decrease along each list.
fn families(caps: &SearchCaps) -> [Vec<Family>; 2] {
    let n2_max = |n1: u32| if n1 == 2 { 1 } else { caps.max_n2 };
    let pure = (2..=caps.max_n1)
        .map(|n1| Family {
            kind: Kind::Pure,
            n1,
            n2_max: n2_max(n1),
        })
        .collect();
    let mean = if caps.include_means {
        (2..caps.max_n1)
            .map(|n1| Family {
                kind: Kind::Mean,
                n1,
                n2_max: n2_max(n1),
            })
            .collect()
    } else {
        Vec::new()
    };
    [pure, mean]
}

/// Every capped element with value in `[lo, hi]`, sorted by value descending.
pub fn elements_in_window(lo: f64, hi: f64, caps: &SearchCaps) -> Result<WindowResult> {
    if !(lo > 0.0) {
        return Err(Error::domain(format!("window lower bound {lo} must be > 0")));
    }
    if !(hi > lo) {
        return Err(Error::domain(format!("window upper bound {hi} must exceed {lo}")));
    }
    let center = 0.5 * (lo + hi);
    let mut hits = Vec::new();
    let mut truncated = Vec::new();

    for list in families(caps) {
        for fam in list {
            if fam.top() < lo {
                break;
            }
            if let Some(asym) = fam.asymptote() {
                if asym >= hi {
                    continue;
                }
                if asym >= lo {
                    truncated.push(Truncation {
                        n1: fam.n1,
                        mean: fam.kind == Kind::Mean,
                    });
                }
            }
            let first = fam.partition_point(|v| v > hi);
            let end = fam.partition_point(|v| v >= lo);
            for n2 in first..end {
                let value = fam.value(n2);
                hits.push(SearchHit {
                    element: fam.element(n2),
                    value,
                    distance: (value.value - center).abs(),
                    z_score: None,
                });
            }
        }
    }

    hits.sort_by(|a, b| {
        b.value
            .value
            .total_cmp(&a.value.value)
            .then_with(|| a.element.canonical_cmp(&b.element))
    });
    truncated.sort_by_key(|t| (t.n1, t.mean));
    Ok(WindowResult { hits, truncated })
}

/// The capped element closest to `value`.
pub fn nearest(value: f64, caps: &SearchCaps) -> Result<SearchHit> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::domain(format!("query value {value} must be > 0")));
    }
    let mut best: Option<SearchHit> = None;
    let consider = |best: &mut Option<SearchHit>, fam: &Family, n2: u32| {
        let v = fam.value(n2);
        let hit = SearchHit {
            element: fam.element(n2),
            value: v,
            distance: (v.value - value).abs(),
            z_score: None,
        };
        if best.is_none_or(|b| hit.rank_cmp(&b) == Ordering::Less) {
            *best = Some(hit);
        }
    };

    for list in families(caps) {
        for fam in list {
            if let Some(b) = best {
                if fam.top() < value - b.distance {
                    break;
                }
            }
            // First n2 at or below the query; its predecessor is the last above.
            let k = fam.partition_point(|v| v > value);
            if k <= fam.n2_max {
                consider(&mut best, &fam, k);
            }
            if k > 1 {
                consider(&mut best, &fam, k - 1);
            }
        }
    }
    Ok(best.expect("caps always contain (2, 1)"))
}

/// Capped elements consistent with a measurement, sorted by distance to its
/// center.
///
/// With a σ the window is `center ± max_z·σ` and each hit carries its z-score;
/// with an explicit range the window is that range.
pub fn match_measurement(m: &MeasuredCoupling, caps: &SearchCaps, max_z: f64) -> Result<WindowResult> {
    if !(max_z > 0.0) {
        return Err(Error::domain(format!("max_z = {max_z} must be > 0")));
    }
    let (lo, hi) = match m.uncertainty {
        Uncertainty::Sigma(s) => (m.center - max_z * s, m.center + max_z * s),
        Uncertainty::Range { lo, hi } => (lo, hi),
    };
    let lo = lo.max(f64::MIN_POSITIVE);
    if hi <= lo {
        return Ok(WindowResult {
            hits: Vec::new(),
            truncated: Vec::new(),
        });
    }
    let mut result = elements_in_window(lo, hi, caps)?;
    for hit in &mut result.hits {
        hit.distance = (hit.value.value - m.center).abs();
        hit.z_score = m.z_score(hit.value.value);
    }
    result.hits.sort_by(SearchHit::rank_cmp);
    Ok(result)
}
