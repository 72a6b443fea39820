//! Command line front end.
//!
//! Exit codes: 0 success, 1 domain or validation error, 2 verification
//! failure, 64 usage error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qcoupling::coupling::{alpha_mean, alpha_pure, velocity_ratio, CqElement, PolygonIndex};
use qcoupling::fit::{builtin_scheme_specs, max_residual, parse_scheme, solve_polynomial, solve_vandermonde, PolySpec};
use qcoupling::measurements::{
    builtin_scale, identify_measurements, parse_measurements, reproduce_identifications, EnergyScale,
    IdentificationReport, MeasuredCoupling, Uncertainty, DEFAULT_MAX_Z,
};
use qcoupling::oracle::alpha_oracle;
use qcoupling::report::{fmt_fixed, table_csv, table_json, verify_table, ReferenceTable, Tolerance};
use qcoupling::running::{generate_table, step_edges, SchemePair, StepEdge};
use qcoupling::search::{elements_in_window, match_measurement, nearest, SearchCaps, SearchHit, WindowResult};
use qcoupling::Error;

const EXIT_DOMAIN: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "qcoupling", version, about = "Coupling values from the polygon formula and their running scheme")]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Largest n1 considered by searches.
    #[arg(long, global = true, default_value_t = 1000)]
    caps_n1: u32,

    /// Largest n2 considered by searches.
    #[arg(long, global = true, default_value_t = 1000)]
    caps_n2: u32,

    /// Include mean elements in searches.
    #[arg(long, global = true, default_value_t = true, action = clap::ArgAction::Set)]
    include_means: bool,

    /// Strong-coupling variant used by `edges`.
    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Both)]
    variant: VariantArg,

    /// Alternative path anchors (JSON).
    #[arg(long, global = true)]
    scheme: Option<PathBuf>,

    /// Measurement file (JSON) for `match` and `identify`.
    #[arg(long, global = true)]
    measurements: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Sb1,
    Sb2,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PathArg {
    S,
    Sb,
    G,
    F,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate alpha(n1, n2).
    Eval {
        #[arg(long, allow_negative_numbers = true)]
        n1: i64,
        #[arg(long, allow_negative_numbers = true)]
        n2: i64,
        /// Also print the extended precision value to this many significant digits.
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Evaluate the mean of alpha(n1, n2) and alpha(n1 + 1, n2).
    Mean {
        #[arg(long, allow_negative_numbers = true)]
        n1: i64,
        #[arg(long, allow_negative_numbers = true)]
        n2: i64,
        #[arg(long)]
        digits: Option<u32>,
    },
    /// List elements with value in [lo, hi].
    Search {
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
    },
    /// Find the element closest to a value.
    Nearest {
        #[arg(long)]
        value: f64,
        /// Interpret --value as 1/alpha.
        #[arg(long)]
        reciprocal: bool,
    },
    /// Match a measurement (or every entry of --measurements) against the set.
    Match {
        #[arg(long)]
        center: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
        /// Center and uncertainty are given for 1/alpha.
        #[arg(long)]
        reciprocal: bool,
        /// Window half-width in sigma.
        #[arg(long, default_value_t = DEFAULT_MAX_Z)]
        max_z: f64,
    },
    /// Check the builtin (or --measurements) identifications.
    Identify,
    /// Solve the path polynomials and cross-check the two solvers.
    Fit,
    /// Generate the running-coupling table.
    Table {
        #[arg(long, allow_negative_numbers = true, default_value_t = -3.0)]
        from: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 17.0)]
        to: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
    },
    /// Locate the step edges of a quantized path.
    Edges {
        #[arg(long, value_enum, default_value_t = PathArg::All)]
        path: PathArg,
        #[arg(long, allow_negative_numbers = true, default_value_t = -3.0)]
        from: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 17.0)]
        to: f64,
    },
    /// Regenerate the table and compare it with the embedded reference.
    Verify {
        /// Absolute tolerance; default is five units in each cell's last printed place.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.common.out {
                Some(path) => std::fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    use std::io::Write;
                    // A closed pipe (e.g. `| head`) is not an error worth reporting.
                    let _ = std::io::stdout().lock().write_all(out.text.as_bytes());
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(out.code),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_DOMAIN)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let c = &cli.common;
    let caps = || SearchCaps::new(c.caps_n1, c.caps_n2, c.include_means);
    match &cli.command {
        Command::Eval { n1, n2, digits } => {
            let idx = PolygonIndex::from_signed(*n1, *n2)?;
            eval_output(CqElement::Pure(idx), *digits, c.format)
        }
        Command::Mean { n1, n2, digits } => {
            let idx = PolygonIndex::from_signed(*n1, *n2)?;
            alpha_mean(idx)?;
            eval_output(CqElement::Mean(idx), *digits, c.format)
        }
        Command::Search { lo, hi } => {
            let caps = caps()?;
            let result = elements_in_window(*lo, *hi, &caps)?;
            Ok(Output::ok(hits_output(&caps, &result, c.format, None)))
        }
        Command::Nearest { value, reciprocal } => {
            let caps = caps()?;
            let query = if *reciprocal { 1.0 / value } else { *value };
            let hit = nearest(query, &caps)?;
            let result = WindowResult {
                hits: vec![hit],
                truncated: Vec::new(),
            };
            Ok(Output::ok(hits_output(&caps, &result, c.format, Some(query))))
        }
        Command::Match {
            center,
            sigma,
            lo,
            hi,
            reciprocal,
            max_z,
        } => {
            let caps = caps()?;
            let measurements = match (&c.measurements, center) {
                (Some(path), None) => parse_measurements(&read(path)?)?,
                (None, Some(center)) => vec![cli_measurement(*center, *sigma, *lo, *hi, *reciprocal)?],
                _ => return Err(Error::Invalid("give either --center or --measurements".into())),
            };
            Ok(Output::ok(match_output(&measurements, &caps, *max_z, c.format)?))
        }
        Command::Identify => {
            let caps = caps()?;
            let report = match &c.measurements {
                Some(path) => identify_measurements(&parse_measurements(&read(path)?)?, &caps)?,
                None => reproduce_identifications(&caps)?,
            };
            Ok(Output::ok(identify_output(&report, c.format)))
        }
        Command::Fit => {
            let specs = load_specs(c)?;
            Ok(Output::ok(fit_output(&specs, c.format)?))
        }
        Command::Table { from, to, step } => {
            let schemes = SchemePair::from_specs(&load_specs(c)?)?;
            let rows = generate_table(&schemes, *from, *to, *step)?;
            if rows.iter().any(|r| r.extrapolated()) {
                eprintln!("note: rows outside x in [-3, 17] are extrapolated");
            }
            Ok(Output::ok(match c.format {
                Format::Csv => table_csv(&rows),
                Format::Json => table_json(&rows, None),
            }))
        }
        Command::Edges { path, from, to } => {
            let schemes = SchemePair::from_specs(&load_specs(c)?)?;
            Ok(Output::ok(edges_output(&schemes, *path, c.variant, *from, *to, c.format)?))
        }
        Command::Verify { tolerance } => {
            let schemes = SchemePair::from_specs(&load_specs(c)?)?;
            let tolerance = match tolerance {
                Some(t) => Tolerance::Absolute(*t),
                None => Tolerance::PerCell,
            };
            let generated = generate_table(&schemes, -3.0, 17.0, 1.0)?;
            let report = verify_table(ReferenceTable::builtin(), &generated, tolerance)?;
            eprintln!(
                "verify: {}/{} cells within tolerance, max difference {:.3e}: {}",
                report.passed,
                report.cells.len(),
                report.max_difference,
                if report.pass { "PASS" } else { "FAIL" }
            );
            let text = match c.format {
                Format::Json => pretty(&serde_json::to_value(&report).expect("report serializes")),
                Format::Csv => {
                    let mut s = String::from("x,column,reference,computed,difference,tolerance,pass\n");
                    for cell in &report.cells {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{:.3e},{:.1e},{}",
                            cell.x,
                            cell.column,
                            cell.reference.text(),
                            fmt_fixed(cell.computed),
                            cell.difference,
                            cell.tolerance,
                            cell.pass
                        );
                    }
                    s
                }
            };
            Ok(Output {
                text,
                code: if report.pass { 0 } else { EXIT_VERIFY },
            })
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn load_specs(c: &Common) -> Result<Vec<PolySpec>, Error> {
    match &c.scheme {
        Some(path) => parse_scheme(&read(path)?),
        None => Ok(builtin_scheme_specs().to_vec()),
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn element_fields(e: CqElement) -> (&'static str, u32, u32) {
    let idx = e.index();
    (if e.is_mean() { "mean" } else { "pure" }, idx.n1(), idx.n2())
}

fn eval_output(e: CqElement, digits: Option<u32>, format: Format) -> Result<Output, Error> {
    let value = match e {
        CqElement::Pure(idx) => alpha_pure(idx),
        CqElement::Mean(idx) => alpha_mean(idx)?,
    };
    let oracle = digits.map(|d| alpha_oracle(e, d)).transpose()?;
    let velocity = match e {
        CqElement::Pure(idx) => Some(velocity_ratio(idx)),
        CqElement::Mean(_) => None,
    };
    let (kind, n1, n2) = element_fields(e);
    let text = match format {
        Format::Json => {
            let mut v = json!({
                "kind": kind,
                "n1": n1,
                "n2": n2,
                "alpha": value.value,
                "inverse": value.reciprocal(),
                "precision_bound": value.precision_bound,
            });
            if let Some(vel) = velocity {
                v["velocity_ratio"] = json!(vel);
            }
            if let Some(o) = &oracle {
                v["oracle"] = json!(o);
            }
            pretty(&v)
        }
        Format::Csv => {
            let mut header = String::from("kind,n1,n2,alpha,inverse,precision_bound");
            let mut row = format!(
                "{kind},{n1},{n2},{},{},{:.1e}",
                fmt_fixed(value.value),
                fmt_fixed(value.reciprocal()),
                value.precision_bound
            );
            if let Some(vel) = velocity {
                header.push_str(",velocity_ratio");
                let _ = write!(row, ",{}", fmt_fixed(vel));
            }
            if let Some(o) = &oracle {
                header.push_str(",oracle");
                let _ = write!(row, ",{o}");
            }
            format!("{header}\n{row}\n")
        }
    };
    Ok(Output::ok(text))
}

fn hit_json(h: &SearchHit) -> serde_json::Value {
    let (kind, n1, n2) = element_fields(h.element);
    let mut v = json!({
        "kind": kind,
        "n1": n1,
        "n2": n2,
        "alpha": h.value.value,
        "inverse": h.value.reciprocal(),
        "distance": h.distance,
    });
    if let Some(z) = h.z_score {
        v["z_score"] = json!(z);
    }
    v
}

fn hit_csv(h: &SearchHit) -> String {
    let (kind, n1, n2) = element_fields(h.element);
    let z = h.z_score.map(|z| format!("{z:.4}")).unwrap_or_default();
    format!("{kind},{n1},{n2},{},{:.6e},{z}", fmt_fixed(h.value.value), h.distance)
}

fn note_truncation(result: &WindowResult) {
    if result.is_truncated() {
        let list: Vec<String> = result
            .truncated
            .iter()
            .map(|t| format!("{}{}", if t.mean { "mean " } else { "" }, t.n1))
            .collect();
        eprintln!("note: n2 cap truncates the families n1 = {}", list.join(", "));
    }
}

fn hits_output(caps: &SearchCaps, result: &WindowResult, format: Format, query: Option<f64>) -> String {
    note_truncation(result);
    match format {
        Format::Json => {
            let mut meta = json!({ "caps": caps, "truncated": result.truncated });
            if let Some(q) = query {
                meta["query"] = json!(q);
            }
            pretty(&json!({
                "meta": meta,
                "hits": result.hits.iter().map(hit_json).collect::<Vec<_>>(),
            }))
        }
        Format::Csv => {
            let mut s = String::from("kind,n1,n2,alpha,distance,z_score\n");
            for h in &result.hits {
                s.push_str(&hit_csv(h));
                s.push('\n');
            }
            s
        }
    }
}

fn cli_measurement(
    center: f64,
    sigma: Option<f64>,
    lo: Option<f64>,
    hi: Option<f64>,
    reciprocal: bool,
) -> Result<MeasuredCoupling, Error> {
    let unc = match (sigma, lo, hi) {
        (Some(s), None, None) => Uncertainty::Sigma(s),
        (None, Some(lo), Some(hi)) => Uncertainty::Range { lo, hi },
        _ => return Err(Error::Invalid("give either --sigma or both --lo and --hi".into())),
    };
    let scale = EnergyScale::from_x("unspecified", 0.0)?;
    if reciprocal {
        MeasuredCoupling::from_reciprocal("cli", scale, center, unc)
    } else {
        MeasuredCoupling::new("cli", scale, center, unc)
    }
}

fn match_output(measurements: &[MeasuredCoupling], caps: &SearchCaps, max_z: f64, format: Format) -> Result<String, Error> {
    let results = measurements
        .iter()
        .map(|m| match_measurement(m, caps, max_z).map(|r| (m, r)))
        .collect::<Result<Vec<_>, _>>()?;
    for (_, r) in &results {
        note_truncation(r);
    }
    Ok(match format {
        Format::Json => pretty(&json!({
            "meta": { "caps": caps, "max_z": max_z },
            "measurements": results.iter().map(|(m, r)| json!({
                "name": m.name,
                "center": m.center,
                "uncertainty": m.uncertainty,
                "truncated": r.truncated,
                "hits": r.hits.iter().map(hit_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("measurement,kind,n1,n2,alpha,distance,z_score\n");
            for (m, r) in &results {
                for h in &r.hits {
                    let _ = writeln!(s, "{},{}", m.name, hit_csv(h));
                }
            }
            s
        }
    })
}

fn identify_output(report: &IdentificationReport, format: Format) -> String {
    match format {
        Format::Json => pretty(&serde_json::to_value(report).expect("report serializes")),
        Format::Csv => {
            let mut s = String::from(
                "label,scale,x,kind,center,element,alpha,inverse,printed,z_score,within_stated_range,is_nearest,nearest,status\n",
            );
            for row in &report.rows {
                for c in &row.claims {
                    let opt = |v: Option<String>| v.unwrap_or_default();
                    let _ = writeln!(
                        s,
                        "{},{},{:.5},{},{},{},{},{},{},{},{},{},{},{}",
                        row.label,
                        row.scale,
                        row.x,
                        serde_json::to_value(row.kind).expect("kind").as_str().unwrap_or(""),
                        opt(row.center.map(fmt_fixed)),
                        c.element.to_string().replace(", ", ";"),
                        fmt_fixed(c.value),
                        fmt_fixed(c.reciprocal_value),
                        opt(c.printed.as_ref().map(|p| p.text().to_owned())),
                        opt(c.z_score.map(|z| format!("{z:.4}"))),
                        opt(c.within_stated_range.map(|b| b.to_string())),
                        opt(c.is_nearest.map(|b| b.to_string())),
                        opt(row.nearest.map(|h| h.element.to_string().replace(", ", ";"))),
                        serde_json::to_value(c.status).expect("status").as_str().unwrap_or(""),
                    );
                }
            }
            s
        }
    }
}

fn fit_output(specs: &[PolySpec], format: Format) -> Result<String, Error> {
    let mut rows = Vec::new();
    for spec in specs {
        let exact = solve_polynomial(spec)?;
        let lu = solve_vandermonde(spec)?;
        let solver_diff = exact
            .coefficients
            .iter()
            .zip(&lu.coefficients)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        rows.push((spec, exact.clone(), max_residual(spec, &exact), solver_diff));
    }
    Ok(match format {
        Format::Json => pretty(&json!({
            "paths": rows.iter().map(|(spec, p, res, diff)| json!({
                "name": spec.name,
                "degree": spec.degree,
                "anchors": spec.anchors,
                "coefficients": p.coefficients,
                "max_residual": res,
                "max_solver_difference": diff,
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let width = rows.iter().map(|(s, ..)| s.degree + 1).max().unwrap_or(0);
            let mut s = String::from("name,degree");
            for k in 0..width {
                let _ = write!(s, ",c{k}");
            }
            s.push_str(",max_residual,max_solver_difference\n");
            for (spec, p, res, diff) in &rows {
                let _ = write!(s, "{},{}", spec.name, spec.degree);
                for k in 0..width {
                    match p.coefficients.get(k) {
                        Some(c) => {
                            let _ = write!(s, ",{c:.15e}");
                        }
                        None => s.push(','),
                    }
                }
                let _ = writeln!(s, ",{res:.3e},{diff:.3e}");
            }
            s
        }
    })
}

fn edges_output(
    schemes: &SchemePair,
    path: PathArg,
    variant: VariantArg,
    from: f64,
    to: f64,
    format: Format,
) -> Result<String, Error> {
    let s = &schemes.sb1;
    let mut selected = Vec::new();
    let want = |p: PathArg| path == p || path == PathArg::All;
    if want(PathArg::S) {
        selected.push(("s", &s.s));
    }
    if want(PathArg::Sb) {
        if variant != VariantArg::Sb2 {
            selected.push(("s_b1", &schemes.sb1.s_b));
        }
        if variant != VariantArg::Sb1 {
            selected.push(("s_b2", &schemes.sb2.s_b));
        }
    }
    if want(PathArg::G) {
        selected.push(("g", &s.g));
    }
    if want(PathArg::F) {
        selected.push(("f", &s.f));
    }
    let mut found: Vec<(&str, StepEdge)> = Vec::new();
    for (name, sf) in selected {
        for e in step_edges(sf, from, to)? {
            found.push((name, e));
        }
    }
    Ok(match format {
        Format::Json => pretty(&json!({
            "meta": { "from": from, "to": to, "scale_x": {
                "m0": builtin_scale("m0")?.x, "m_tau": builtin_scale("m_tau")?.x,
                "m_Z": builtin_scale("m_Z")?.x, "m_U": builtin_scale("m_U")?.x } },
            "edges": found.iter().map(|(n, e)| json!({ "path": n, "x": e.x, "from": e.from, "to": e.to })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut out = String::from("path,x,from,to\n");
            for (n, e) in &found {
                let _ = writeln!(out, "{n},{},{},{}", fmt_fixed(e.x), e.from, e.to);
            }
            out
        }
    })
}
