//! Reference table, golden verification and table serialization.

use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::printed::PrintedValue;
use crate::running::{generate_table, SchemePair, TableRow};

const REFERENCE_JSON: &str = include_str!("../data/reference_table.json");

pub const COLUMNS: [&str; 4] = ["alpha_s1", "alpha_s2", "alpha_g", "alpha_f"];
pub const CSV_HEADER: &str = "x,alpha_s1,alpha_s2,alpha_g,alpha_f";
pub const DECIMALS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub x: i32,
    pub alpha_s1: PrintedValue,
    pub alpha_s2: PrintedValue,
    pub alpha_g: PrintedValue,
    pub alpha_f: PrintedValue,
}

impl ReferenceRow {
    pub fn cells(&self) -> [&PrintedValue; 4] {
        [&self.alpha_s1, &self.alpha_s2, &self.alpha_g, &self.alpha_f]
    }

    pub fn cell_mut(&mut self, column: usize) -> &mut PrintedValue {
        match column {
            0 => &mut self.alpha_s1,
            1 => &mut self.alpha_s2,
            2 => &mut self.alpha_g,
            3 => &mut self.alpha_f,
            _ => panic!("column {column} out of range"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub provenance: String,
    pub rows: Vec<ReferenceRow>,
}

impl ReferenceTable {
    pub fn parse(json: &str) -> Result<Self> {
        let table: ReferenceTable =
            serde_json::from_str(json).map_err(|e| Error::Invalid(format!("reference table: {e}")))?;
        if table.rows.len() != 21 {
            return Err(Error::Invalid(format!("reference table has {} rows, expected 21", table.rows.len())));
        }
        for (i, row) in table.rows.iter().enumerate() {
            if row.x != i as i32 - 3 {
                return Err(Error::Invalid(format!("reference row {i} has x = {}, expected {}", row.x, i as i32 - 3)));
            }
        }
        Ok(table)
    }

    pub fn builtin() -> &'static ReferenceTable {
        static TABLE: OnceLock<ReferenceTable> = OnceLock::new();
        TABLE.get_or_init(|| ReferenceTable::parse(REFERENCE_JSON).expect("embedded reference table is valid"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", content = "value", rename_all = "kebab-case")]
pub enum Tolerance {
    /// Five units in each cell's last printed place.
    PerCell,
    Absolute(f64),
}

impl Tolerance {
    fn for_cell(self, cell: &PrintedValue) -> f64 {
        match self {
            Tolerance::PerCell => cell.tolerance(),
            Tolerance::Absolute(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellCheck {
    pub x: i32,
    pub column: &'static str,
    pub reference: PrintedValue,
    pub computed: f64,
    pub difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub tolerance: Tolerance,
    pub cells: Vec<CellCheck>,
    pub max_difference: f64,
    pub passed: usize,
    pub pass: bool,
}

impl VerificationReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &CellCheck> {
        self.cells.iter().filter(|c| !c.pass)
    }
}

/// Numeric cell-by-cell comparison of a generated table with a reference.
pub fn verify_table(reference: &ReferenceTable, generated: &[TableRow], tolerance: Tolerance) -> Result<VerificationReport> {
    if let Tolerance::Absolute(t) = tolerance {
        if !(t > 0.0) {
            return Err(Error::domain(format!("tolerance {t} must be > 0")));
        }
    }
    let mut cells = Vec::with_capacity(reference.rows.len() * 4);
    for rref in &reference.rows {
        let row = generated
            .iter()
            .find(|r| r.x == f64::from(rref.x))
            .ok_or_else(|| Error::Invalid(format!("generated table has no row at x = {}", rref.x)))?;
        for ((column, cell), computed) in COLUMNS.iter().zip(rref.cells()).zip(row.cells()) {
            let difference = (computed - cell.value()).abs();
            let tol = tolerance.for_cell(cell);
            cells.push(CellCheck {
                x: rref.x,
                column,
                reference: cell.clone(),
                computed,
                difference,
                tolerance: tol,
                pass: difference <= tol,
            });
        }
    }
    let max_difference = cells.iter().map(|c| c.difference).fold(0.0, f64::max);
    let passed = cells.iter().filter(|c| c.pass).count();
    Ok(VerificationReport {
        tolerance,
        pass: passed == cells.len(),
        cells,
        max_difference,
        passed,
    })
}

/// Regenerates x = −3…17 from `schemes` and checks it against the embedded
/// reference table.
pub fn verify_against_reference(schemes: &SchemePair, tolerance: Tolerance) -> Result<VerificationReport> {
    let generated = generate_table(schemes, -3.0, 17.0, 1.0)?;
    verify_table(ReferenceTable::builtin(), &generated, tolerance)
}

/// Fixed notation with [`DECIMALS`] places; ties resolve to even and a
/// negative zero prints as zero.
pub fn fmt_fixed(v: f64) -> String {
    let s = format!("{:.*}", DECIMALS, v);
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_owned()
    } else {
        s
    }
}

fn rounded(v: f64) -> f64 {
    fmt_fixed(v).parse().expect("formatted number parses")
}

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_fixed(r.x),
            fmt_fixed(r.alpha_s1),
            fmt_fixed(r.alpha_s2),
            fmt_fixed(r.alpha_g),
            fmt_fixed(r.alpha_f)
        );
    }
    out
}

/// `{meta: {variant, tolerance?}, rows: [{x, alpha_s1, …}]}` with every number
/// rounded to [`DECIMALS`] places. Extrapolated rows carry `"extrapolated": true`.
pub fn table_json(rows: &[TableRow], tolerance: Option<f64>) -> String {
    let mut meta = json!({ "variant": "both" });
    if let Some(t) = tolerance {
        meta["tolerance"] = json!(t);
    }
    let rows: Vec<_> = rows
        .iter()
        .map(|r| {
            let mut row = json!({
                "x": rounded(r.x),
                "alpha_s1": rounded(r.alpha_s1),
                "alpha_s2": rounded(r.alpha_s2),
                "alpha_g": rounded(r.alpha_g),
                "alpha_f": rounded(r.alpha_f),
            });
            if r.extrapolated() {
                row["extrapolated"] = json!(true);
            }
            row
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&json!({ "meta": meta, "rows": rows })).expect("json serializes");
    s.push('\n');
    s
}

/// Parses a CSV table produced by [`table_csv`].
pub fn parse_table_csv(text: &str) -> Result<Vec<TableRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::Invalid(format!("unexpected CSV header {other:?}"))),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let v: Vec<f64> = line
                .split(',')
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Invalid(format!("CSV line {}: {e}", i + 2)))?;
            if v.len() != 5 {
                return Err(Error::Invalid(format!("CSV line {}: expected 5 fields", i + 2)));
            }
            Ok(TableRow {
                x: v[0],
                alpha_s1: v[1],
                alpha_s2: v[2],
                alpha_g: v[3],
                alpha_f: v[4],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_shape() {
        let t = ReferenceTable::builtin();
        assert_eq!(t.rows.len(), 21);
        assert_eq!(t.rows[0].x, -3);
        assert_eq!(t.rows[20].x, 17);
        assert_eq!(t.rows[0].alpha_g.decimals(), 11);
        assert_eq!(t.rows[0].alpha_f.decimals(), 12);
        assert_eq!(t.rows[20].alpha_f.text(), "0.026929698539");
    }

    #[test]
    fn per_cell_pass() {
        let r = verify_against_reference(&SchemePair::builtin(), Tolerance::PerCell).unwrap();
        assert_eq!(r.cells.len(), 84);
        assert!(r.pass, "{:?}", r.mismatches().collect::<Vec<_>>());
        assert!(r.max_difference < 1e-11);
    }

    #[test]
    fn tight_tolerance_fails_on_rounding_cells() {
        let r = verify_against_reference(&SchemePair::builtin(), Tolerance::Absolute(1e-15)).unwrap();
        assert!(!r.pass);
        // The printed 1/π cells end in …184 against 0.3183098861837907.
        assert!(r.mismatches().any(|c| c.x == -3 && c.column == "alpha_s1"));
    }

    #[test]
    fn absolute_tolerance_on_truncated_column() {
        // The α_g column is printed truncated to 11 places, so only that column
        // exceeds 5e-12; everything passes at 1e-11.
        let r = verify_against_reference(&SchemePair::builtin(), Tolerance::Absolute(5e-12)).unwrap();
        assert!(r.mismatches().all(|c| c.column == "alpha_g"));
        assert!(r.mismatches().count() > 0);
        let r = verify_against_reference(&SchemePair::builtin(), Tolerance::Absolute(1e-11)).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn injected_fault_is_the_only_mismatch() {
        let mut reference = ReferenceTable::builtin().clone();
        let generated = generate_table(&SchemePair::builtin(), -3.0, 17.0, 1.0).unwrap();
        *reference.rows[7].cell_mut(3) = PrintedValue::parse("0.008543929692").unwrap();
        let r = verify_table(&reference, &generated, Tolerance::PerCell).unwrap();
        let bad: Vec<_> = r.mismatches().map(|c| (c.x, c.column)).collect();
        assert_eq!(bad, vec![(4, "alpha_f")]);
    }

    #[test]
    fn fixed_formatting() {
        assert_eq!(fmt_fixed(0.0072973525318), "0.007297352532");
        assert_eq!(fmt_fixed(-3.0), "-3.000000000000");
        assert_eq!(fmt_fixed(-1e-15), "0.000000000000");
        // Exact binary ties at the 13th place go to even.
        assert_eq!(fmt_fixed(2f64.powi(-13)), "0.000122070312");
        assert_eq!(format!("{:.1}", 0.25), "0.2");
    }

    #[test]
    fn csv_round_trip() {
        let rows = generate_table(&SchemePair::builtin(), -3.0, 17.0, 1.0).unwrap();
        let csv = table_csv(&rows);
        let parsed = parse_table_csv(&csv).unwrap();
        assert_eq!(table_csv(&parsed), csv);
        assert_eq!(csv.lines().count(), 22);
    }

    #[test]
    fn json_is_idempotent() {
        let rows = generate_table(&SchemePair::builtin(), -4.0, 18.0, 0.5).unwrap();
        let text = table_json(&rows, Some(1e-12));
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let mut again = serde_json::to_string_pretty(&value).unwrap();
        again.push('\n');
        assert_eq!(again, text);
        assert_eq!(value["rows"][0]["extrapolated"], json!(true));
        assert!(value["rows"][2].get("extrapolated").is_none());
    }
}
