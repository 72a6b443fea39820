//! Exact coupling values from the polygon formula `α(n₁, n₂)`.
//!
//! * [`coupling`]: the formula, mean elements and analytic bounds.
//! * [`oracle`]: extended precision evaluation used to certify the native path.
//! * [`search`]: window, nearest and measurement queries over the candidate set.
//! * [`measurements`]: energy scales, measured values, identification report.
//! * [`fit`]: exact interpolation of the continuous path functions.
//! * [`running`]: floor quantization, complementarity wiring, running couplings.
//! * [`report`]: reference table, golden verification, CSV/JSON output.

// `!(x > 0.0)` is used on purpose so that NaN is rejected along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod error;
pub mod fit;
pub mod measurements;
pub mod oracle;
pub mod printed;
pub mod report;
pub mod running;
pub mod search;

pub use coupling::{
    alpha_element, alpha_mean, alpha_pure, lower_asymptote, velocity_ratio, CouplingValue, CqElement,
    PolygonIndex, Sector,
};
pub use error::{Error, Result};
pub use fit::{builtin_scheme_specs, eval_polynomial, solve_polynomial, Anchor, PolyPath, PolySpec};
pub use measurements::{reproduce_identifications, xmass_of, EnergyScale, MeasuredCoupling, Uncertainty};
pub use oracle::alpha_oracle;
pub use report::{verify_against_reference, ReferenceTable, Tolerance, VerificationReport};
pub use running::{
    coupling_at, generate_table, step_edges, step_value, unification_residual, RunningScheme, SchemePair,
    StepFunction, StrongVariant, TableRow,
};
pub use search::{elements_in_window, match_measurement, nearest, SearchCaps, SearchHit};
