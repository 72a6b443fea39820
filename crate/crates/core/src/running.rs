//! Floor-quantized step functions and the three running couplings.
//!
//! Four step functions are needed: `s` and `s_b` for the strong coupling and
//! `g`, `f` shared by the weak and electromagnetic couplings. The second
//! parameters of the latter two are wired by complementarity (`f_b ≡ g`,
//! `g_b ≡ f`), so
//!
//! ```text
//! α_s(x) = α(s(x), s_b(x))
//! α_g(x) = α(g(x), f(x))
//! α_f(x) = α(f(x), g(x))
//! ```

use serde::{Deserialize, Serialize};

use crate::coupling::{alpha_pure, CouplingValue, PolygonIndex, Sector};
use crate::error::{Error, Result};
use crate::fit::{builtin_scheme_specs, solve_polynomial, spec_named, PolySpec, PolyPath};

/// Lowest value of a slot that feeds `n₁`.
pub const FIRST_SLOT_MIN: i64 = 2;
/// Lowest value of a slot that feeds `n₂`.
pub const SECOND_SLOT_MIN: i64 = 1;

/// Range of `x` the scheme is declared for; rows outside are extrapolated.
pub const VALID_X: (f64, f64) = (-3.0, 17.0);

/// Scan step used to bracket step edges before bisection.
pub const EDGE_SCAN_STEP: f64 = 1e-3;
/// Width below which a bracketed edge is considered located.
pub const EDGE_TOLERANCE: f64 = 1e-10;

/// `max(⌊path(x)⌋, floor_min)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pub path: PolyPath,
    pub floor_min: i64,
}

impl StepFunction {
    pub fn new(path: PolyPath, floor_min: i64) -> Self {
        Self { path, floor_min }
    }

    pub fn raw_floor(&self, x: f64) -> i64 {
        self.path.eval(x).floor() as i64
    }

    pub fn clamp_active(&self, x: f64) -> bool {
        self.raw_floor(x) < self.floor_min
    }
}

pub fn step_value(sf: &StepFunction, x: f64) -> i64 {
    sf.raw_floor(x).max(sf.floor_min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrongVariant {
    Sb1,
    Sb2,
}

impl StrongVariant {
    pub fn path_name(self) -> &'static str {
        match self {
            StrongVariant::Sb1 => "n_sb1",
            StrongVariant::Sb2 => "n_sb2",
        }
    }
}

/// Integer parameters of every step function at one `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Quantized {
    pub s: i64,
    pub s_b: i64,
    pub g: i64,
    pub f: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunningScheme {
    pub s: StepFunction,
    pub s_b: StepFunction,
    pub g: StepFunction,
    pub f: StepFunction,
    pub variant: StrongVariant,
}

impl RunningScheme {
    pub fn from_specs(specs: &[PolySpec], variant: StrongVariant) -> Result<Self> {
        let path = |name: &str| spec_named(specs, name).and_then(solve_polynomial);
        Ok(Self {
            s: StepFunction::new(path("n_s")?, FIRST_SLOT_MIN),
            s_b: StepFunction::new(path(variant.path_name())?, SECOND_SLOT_MIN),
            g: StepFunction::new(path("n_g")?, SECOND_SLOT_MIN),
            f: StepFunction::new(path("n_f")?, FIRST_SLOT_MIN),
            variant,
        })
    }

    pub fn builtin(variant: StrongVariant) -> Self {
        Self::from_specs(builtin_scheme_specs(), variant).expect("builtin scheme solves")
    }

    pub fn quantize(&self, x: f64) -> Quantized {
        Quantized {
            s: step_value(&self.s, x),
            s_b: step_value(&self.s_b, x),
            g: step_value(&self.g, x),
            f: step_value(&self.f, x),
        }
    }

    /// Integer pair fed to the coupling formula for a sector.
    ///
    /// With `s` at its floor of 2 the only admissible strong pair is `(2, 1)`,
    /// so `s_b` is pinned to 1 there.
    pub fn pair(&self, sector: Sector, x: f64) -> (i64, i64) {
        let q = self.quantize(x);
        match sector {
            Sector::Strong if q.s == FIRST_SLOT_MIN => (q.s, SECOND_SLOT_MIN),
            Sector::Strong => (q.s, q.s_b),
            Sector::Weak => (q.g, q.f),
            Sector::Em => (q.f, q.g),
        }
    }

    pub fn index_at(&self, sector: Sector, x: f64) -> Result<PolygonIndex> {
        let (n1, n2) = self.pair(sector, x);
        PolygonIndex::from_signed(n1, n2).map_err(|e| {
            Error::domain(format!("{sector} sector at x = {x}: pair ({n1}, {n2}) invalid: {e}"))
        })
    }
}

pub fn coupling_at(scheme: &RunningScheme, sector: Sector, x: f64) -> Result<CouplingValue> {
    scheme.index_at(sector, x).map(alpha_pure)
}

/// Largest pairwise difference between the three sector values.
pub fn unification_residual(scheme: &RunningScheme, x: f64) -> Result<f64> {
    let a = coupling_at(scheme, Sector::Strong, x)?.value;
    let b = coupling_at(scheme, Sector::Weak, x)?.value;
    let c = coupling_at(scheme, Sector::Em, x)?.value;
    Ok((a - b).abs().max((a - c).abs()).max((b - c).abs()))
}

/// Both strong variants; they share `s`, `g` and `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemePair {
    pub sb1: RunningScheme,
    pub sb2: RunningScheme,
}

impl SchemePair {
    pub fn from_specs(specs: &[PolySpec]) -> Result<Self> {
        Ok(Self {
            sb1: RunningScheme::from_specs(specs, StrongVariant::Sb1)?,
            sb2: RunningScheme::from_specs(specs, StrongVariant::Sb2)?,
        })
    }

    pub fn builtin() -> Self {
        Self::from_specs(builtin_scheme_specs()).expect("builtin scheme solves")
    }

    pub fn get(&self, variant: StrongVariant) -> &RunningScheme {
        match variant {
            StrongVariant::Sb1 => &self.sb1,
            StrongVariant::Sb2 => &self.sb2,
        }
    }

    pub fn row(&self, x: f64) -> Result<TableRow> {
        let at = |scheme: &RunningScheme, sector| coupling_at(scheme, sector, x).map(|v| v.value);
        Ok(TableRow {
            x,
            alpha_s1: at(&self.sb1, Sector::Strong)?,
            alpha_s2: at(&self.sb2, Sector::Strong)?,
            alpha_g: at(&self.sb1, Sector::Weak)?,
            alpha_f: at(&self.sb1, Sector::Em)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub x: f64,
    pub alpha_s1: f64,
    pub alpha_s2: f64,
    pub alpha_g: f64,
    pub alpha_f: f64,
}

impl TableRow {
    pub fn cells(&self) -> [f64; 4] {
        [self.alpha_s1, self.alpha_s2, self.alpha_g, self.alpha_f]
    }

    pub fn extrapolated(&self) -> bool {
        self.x < VALID_X.0 || self.x > VALID_X.1
    }
}

/// Grid `x_from, x_from + step, …` up to `x_to` inclusive. Points are computed
/// as `x_from + i·step`, never by accumulation.
pub fn table_grid(x_from: f64, x_to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::domain(format!("step {step} must be > 0")));
    }
    if !(x_from <= x_to) || !x_from.is_finite() || !x_to.is_finite() {
        return Err(Error::domain(format!("range [{x_from}, {x_to}] is empty")));
    }
    let count = ((x_to - x_from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| x_from + i as f64 * step).collect())
}

pub fn generate_table(schemes: &SchemePair, x_from: f64, x_to: f64, step: f64) -> Result<Vec<TableRow>> {
    table_grid(x_from, x_to, step)?
        .into_iter()
        .map(|x| schemes.row(x))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepEdge {
    pub x: f64,
    pub from: i64,
    pub to: i64,
}

/// Every `x` in `[x_lo, x_hi]` where the clamped step value changes.
///
/// Brackets come from a scan at [`EDGE_SCAN_STEP`]; each is split until its
/// width is below [`EDGE_TOLERANCE`]. Two crossings closer together than the
/// scan step with no net change are not seen.
pub fn step_edges(sf: &StepFunction, x_lo: f64, x_hi: f64) -> Result<Vec<StepEdge>> {
    if !(x_lo < x_hi) {
        return Err(Error::domain(format!("edge interval [{x_lo}, {x_hi}] is empty")));
    }
    let n = ((x_hi - x_lo) / EDGE_SCAN_STEP).ceil() as usize;
    let at = |i: usize| if i == n { x_hi } else { x_lo + i as f64 * EDGE_SCAN_STEP };
    let mut edges = Vec::new();
    let mut a = x_lo;
    let mut va = step_value(sf, a);
    for i in 1..=n {
        let b = at(i);
        let vb = step_value(sf, b);
        if vb != va {
            refine(sf, a, va, b, vb, &mut edges);
        }
        a = b;
        va = vb;
    }
    Ok(edges)
}

fn refine(sf: &StepFunction, a: f64, va: i64, b: f64, vb: i64, out: &mut Vec<StepEdge>) {
    if va == vb {
        return;
    }
    let mid = 0.5 * (a + b);
    if b - a < EDGE_TOLERANCE || mid <= a || mid >= b {
        out.push(StepEdge { x: mid, from: va, to: vb });
        return;
    }
    let vm = step_value(sf, mid);
    refine(sf, a, va, mid, vm, out);
    refine(sf, mid, vm, b, vb, out);
}
