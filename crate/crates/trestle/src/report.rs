//! Report rendering: Markdown, CSV, and JSON views of every result,
//! plus the embedded run manifest.
//!
//! The three formats carry identical numeric values at identical
//! rounding; only styling differs (markdown displays percent and
//! currency markers, CSV and JSON carry bare numbers). All rounding is
//! half away from zero and happens here, never in the computation
//! modules.

use crate::canonical;
use crate::data::ValidationReport;
use crate::error::Error;
use crate::growth::{CagrOutcome, CagrRow, ShareRow};
use crate::manifest::RunManifest;
use crate::regress::OlsFit;
use crate::scenario::{CalibrationResult, ScenarioRow};
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format \"{other}\", expected csv, markdown, or json"))),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Format::Markdown => write!(f, "markdown"),
            Format::Csv => write!(f, "csv"),
            Format::Json => write!(f, "json"),
        }
    }
}

/// How negative money renders in markdown: accounting parentheses
/// "($59.66)" or a plain minus sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeStyle {
    Parens,
    Minus,
}

impl std::str::FromStr for NegativeStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "parens" => Ok(NegativeStyle::Parens),
            "minus" => Ok(NegativeStyle::Minus),
            other => Err(Error::Config(format!("unknown negative style \"{other}\", expected parens or minus"))),
        }
    }
}

/// Rounds half away from zero at `dp` decimals.
pub fn round_dp(x: f64, dp: u32) -> f64 {
    let p = 10f64.powi(dp as i32);
    (x * p).round() / p
}

/// Fixed-point rendering of the half-away-from-zero rounding.
pub fn fmt_fixed(x: f64, dp: usize) -> String {
    format!("{:.dp$}", round_dp(x, dp as u32))
}

/// Shortest display after trimming float dust (six decimals).
fn fmt_clean(x: f64) -> String {
    round_dp(x, 6).to_string()
}

fn group_thousands(mut n: u64) -> String {
    let mut groups = Vec::new();
    loop {
        let (q, r) = (n / 1000, n % 1000);
        if q == 0 {
            groups.push(r.to_string());
            break;
        }
        groups.push(format!("{r:03}"));
        n = q;
    }
    groups.reverse();
    groups.join(",")
}

/// Whole-currency markdown cell, comma-grouped: "$530,161".
fn money_whole(x: f64, style: NegativeStyle) -> String {
    let rounded = round_dp(x, 0);
    let body = format!("${}", group_thousands(rounded.abs() as u64));
    sign_wrap(body, rounded < 0.0, style)
}

/// Two-decimal markdown money cell: "$300.17" or "($59.66)".
fn money_2dp(x: f64, style: NegativeStyle) -> String {
    let rounded = round_dp(x, 2);
    let body = format!("${:.2}", rounded.abs());
    sign_wrap(body, rounded < 0.0, style)
}

fn sign_wrap(body: String, negative: bool, style: NegativeStyle) -> String {
    match (negative, style) {
        (false, _) => body,
        (true, NegativeStyle::Parens) => format!("({body})"),
        (true, NegativeStyle::Minus) => format!("-{body}"),
    }
}

/// Percent markdown cell at `dp` decimals, minus-signed: "-0.011%".
fn pct_cell(pct: f64, dp: usize) -> String {
    format!("{}%", fmt_fixed(pct, dp))
}

fn md_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&format!("| {} |\n", headers.join(" | ")));
    out.push_str(&format!("|{}\n", " --- |".repeat(headers.len())));
    for row in rows {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}

fn csv_quote(cell: &str, delimiter: char) -> String {
    if cell.contains(delimiter) || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

fn csv_line(cells: &[String], delimiter: char) -> String {
    cells
        .iter()
        .map(|c| csv_quote(c, delimiter))
        .collect::<Vec<_>>()
        .join(&delimiter.to_string())
}

fn manifest_markdown(m: &RunManifest) -> String {
    let mut out = String::from("\n## Run manifest\n\n");
    out.push_str(&format!("- tool: {} {}\n", m.tool, m.version));
    out.push_str(&format!("- subcommand: {}\n", m.subcommand));
    out.push_str(&format!("- format: {}\n", m.format));
    for i in &m.inputs {
        out.push_str(&format!("- input: {} sha256={}\n", i.path, i.sha256));
    }
    for (k, v) in &m.settings {
        out.push_str(&format!("- setting: {k} = {v}\n"));
    }
    out
}

fn manifest_csv(m: &RunManifest) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# manifest tool={} version={} subcommand={} format={}\n",
        m.tool, m.version, m.subcommand, m.format
    ));
    for i in &m.inputs {
        out.push_str(&format!("# manifest input={} sha256={}\n", i.path, i.sha256));
    }
    for (k, v) in &m.settings {
        out.push_str(&format!("# manifest setting {k}={v}\n"));
    }
    out
}

fn json_report(m: &RunManifest, report: &str, payload: serde_json::Value) -> String {
    let mut root = serde_json::Map::new();
    root.insert("manifest".into(), serde_json::to_value(m).expect("manifest serializes"));
    root.insert("report".into(), json!(report));
    if let serde_json::Value::Object(fields) = payload {
        for (k, v) in fields {
            root.insert(k, v);
        }
    }
    let mut out = serde_json::to_string_pretty(&serde_json::Value::Object(root)).expect("report serializes");
    out.push('\n');
    out
}

fn opt_pct_json(v: Option<f64>, dp: u32) -> serde_json::Value {
    match v {
        Some(x) => json!(round_dp(x, dp)),
        None => serde_json::Value::Null,
    }
}

/// A CAGR row with its reference figure and annotation resolved.
struct CagrDisplay<'a> {
    row: &'a CagrRow,
    computed_pct: Option<f64>,
    published_pct: Option<f64>,
    note: String,
}

fn cagr_displays(rows: &[CagrRow]) -> Vec<CagrDisplay<'_>> {
    rows.iter()
        .map(|row| {
            let computed_pct = match &row.outcome {
                CagrOutcome::Defined(rate) => Some(rate * 100.0),
                CagrOutcome::Undefined { .. } => None,
            };
            let published_pct = canonical::published_cagr_pct(row.kind, &row.category);
            let note = match (&row.outcome, published_pct) {
                (CagrOutcome::Undefined { reason }, _) => reason.clone(),
                (CagrOutcome::Defined(rate), Some(pub_pct)) => {
                    let computed = fmt_fixed(rate * 100.0, 2);
                    let published = fmt_fixed(pub_pct, 2);
                    if computed == published {
                        String::new()
                    } else {
                        format!("published figure is {published}%; the table endpoints compute {computed}%")
                    }
                }
                _ => String::new(),
            };
            CagrDisplay { row, computed_pct, published_pct, note }
        })
        .collect()
}

pub fn render_cagr(rows: &[CagrRow], format: Format, manifest: &RunManifest) -> String {
    let displays = cagr_displays(rows);
    let headers = ["series", "category", "begin", "end", "periods", "cagr_pct", "published_pct", "note"];
    match format {
        Format::Markdown => {
            let body: Vec<Vec<String>> = displays
                .iter()
                .map(|d| {
                    vec![
                        d.row.kind.to_string(),
                        d.row.category.clone(),
                        d.row.begin.to_string(),
                        d.row.end.to_string(),
                        d.row.periods.to_string(),
                        d.computed_pct.map(|p| pct_cell(p, 2)).unwrap_or_else(|| "undefined".into()),
                        d.published_pct.map(|p| pct_cell(p, 2)).unwrap_or_default(),
                        d.note.clone(),
                    ]
                })
                .collect();
            let mut out = String::from("# Compound annual growth by category\n\n");
            out.push_str(&md_table(&headers, &body));
            out.push_str(&manifest_markdown(manifest));
            out
        }
        Format::Csv => {
            let mut out = manifest_csv(manifest);
            out.push_str(&csv_line(&headers.map(String::from), ','));
            out.push('\n');
            for d in &displays {
                let cells = vec![
                    d.row.kind.to_string(),
                    d.row.category.clone(),
                    d.row.begin.to_string(),
                    d.row.end.to_string(),
                    d.row.periods.to_string(),
                    d.computed_pct.map(|p| fmt_fixed(p, 2)).unwrap_or_default(),
                    d.published_pct.map(|p| fmt_fixed(p, 2)).unwrap_or_default(),
                    d.note.clone(),
                ];
                out.push_str(&csv_line(&cells, ','));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows_json: Vec<serde_json::Value> = displays
                .iter()
                .map(|d| {
                    json!({
                        "series": d.row.kind.to_string(),
                        "category": d.row.category,
                        "begin": d.row.begin,
                        "end": d.row.end,
                        "periods": d.row.periods,
                        "cagr_pct": opt_pct_json(d.computed_pct, 2),
                        "published_pct": opt_pct_json(d.published_pct, 2),
                        "note": if d.note.is_empty() { serde_json::Value::Null } else { json!(d.note) },
                    })
                })
                .collect();
            json_report(manifest, "cagr", json!({ "rows": rows_json }))
        }
    }
}

pub fn render_shares(rows: &[ShareRow], format: Format, manifest: &RunManifest) -> String {
    let headers = ["year", "railway_value_added", "gdp_market_prices", "share_pct", "published_pct", "note"];
    let display: Vec<(&ShareRow, f64, Option<f64>, String)> = rows
        .iter()
        .map(|r| {
            let pct = r.share * 100.0;
            let published = canonical::published_share_pct(r.year);
            let note = match published {
                Some(p) if fmt_fixed(pct, 3) != fmt_fixed(p, 3) => format!(
                    "published figure is {}%; the table values compute {}%",
                    fmt_fixed(p, 3),
                    fmt_fixed(pct, 3)
                ),
                _ => String::new(),
            };
            (r, pct, published, note)
        })
        .collect();
    match format {
        Format::Markdown => {
            let body: Vec<Vec<String>> = display
                .iter()
                .map(|(r, pct, published, note)| {
                    vec![
                        r.year.to_string(),
                        r.railway_value_added.to_string(),
                        r.gdp_market_prices.to_string(),
                        pct_cell(*pct, 3),
                        published.map(|p| pct_cell(p, 3)).unwrap_or_default(),
                        note.clone(),
                    ]
                })
                .collect();
            let mut out = String::from("# Railway value added as a share of GDP (million GEL)\n\n");
            out.push_str(&md_table(&headers, &body));
            out.push_str(&manifest_markdown(manifest));
            out
        }
        Format::Csv => {
            let mut out = manifest_csv(manifest);
            out.push_str(&csv_line(&headers.map(String::from), ','));
            out.push('\n');
            for (r, pct, published, note) in &display {
                let cells = vec![
                    r.year.to_string(),
                    r.railway_value_added.to_string(),
                    r.gdp_market_prices.to_string(),
                    fmt_fixed(*pct, 3),
                    published.map(|p| fmt_fixed(p, 3)).unwrap_or_default(),
                    note.clone(),
                ];
                out.push_str(&csv_line(&cells, ','));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows_json: Vec<serde_json::Value> = display
                .iter()
                .map(|(r, pct, published, note)| {
                    json!({
                        "year": r.year,
                        "railway_value_added": r.railway_value_added,
                        "gdp_market_prices": r.gdp_market_prices,
                        "share_pct": round_dp(*pct, 3),
                        "published_pct": opt_pct_json(*published, 3),
                        "note": if note.is_empty() { serde_json::Value::Null } else { json!(note) },
                    })
                })
                .collect();
            json_report(manifest, "gdp-share", json!({ "rows": rows_json }))
        }
    }
}

pub fn render_validation(report: &ValidationReport, format: Format, manifest: &RunManifest) -> String {
    let headers = ["severity", "series", "year", "total", "component_sum", "discrepancy"];
    let rows: Vec<Vec<String>> = report
        .findings
        .iter()
        .map(|f| {
            vec![
                f.severity.to_string(),
                f.kind.to_string(),
                f.year.to_string(),
                f.total.to_string(),
                fmt_clean(f.component_sum),
                fmt_clean(f.discrepancy),
            ]
        })
        .collect();
    match format {
        Format::Markdown => {
            let mut out = String::from("# Component consistency report\n\n");
            if report.is_consistent() {
                out.push_str(&format!(
                    "No findings: component sums reproduce printed totals within {}.\n",
                    fmt_clean(report.tolerance)
                ));
            } else {
                out.push_str(&format!(
                    "{} finding(s) at tolerance {}.\n\n",
                    report.findings.len(),
                    fmt_clean(report.tolerance)
                ));
                out.push_str(&md_table(&headers, &rows));
            }
            out.push_str(&manifest_markdown(manifest));
            out
        }
        Format::Csv => {
            let mut out = manifest_csv(manifest);
            out.push_str(&csv_line(&headers.map(String::from), ','));
            out.push('\n');
            for row in &rows {
                out.push_str(&csv_line(row, ','));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let findings: Vec<serde_json::Value> = report
                .findings
                .iter()
                .map(|f| {
                    json!({
                        "severity": f.severity.to_string(),
                        "series": f.kind.to_string(),
                        "year": f.year,
                        "total": f.total,
                        "component_sum": round_dp(f.component_sum, 6),
                        "discrepancy": round_dp(f.discrepancy, 6),
                    })
                })
                .collect();
            json_report(
                manifest,
                "validate",
                json!({
                    "tolerance": report.tolerance,
                    "consistent": report.is_consistent(),
                    "findings": findings,
                }),
            )
        }
    }
}

/// The published matrix headers, reproduced exactly.
pub const MATRIX_HEADERS: [&str; 6] = [
    "Growth in Freight Transportation (CAGR %)",
    "The total volume of transportation after 16 years",
    "Cost adjustment %",
    "GDP in current prices, mln. Gel",
    "The current value of the effect balance",
    "The economic share of railway in GDP",
];

/// Positional short aliases for the matrix columns, written as a
/// `# columns:` comment so `regress` selectors like `--x g` work on
/// the CSV output.
pub const MATRIX_ALIASES: [&str; 6] = ["g", "volume", "cost_adjustment", "gdp_pv", "effect", "share"];

const CURRENCY_CAVEAT: &str = "The effect column is million USD and the GDP column million GEL; \
the share divides them directly, as published, without currency conversion.";

pub fn render_matrix(rows: &[ScenarioRow], style: NegativeStyle, format: Format, manifest: &RunManifest) -> String {
    match format {
        Format::Markdown => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        format!("{}%", fmt_clean(r.g * 100.0)),
                        fmt_fixed(r.volume_h, 2),
                        format!("{}%", fmt_clean(r.cost_adjustment * 100.0)),
                        money_whole(r.gdp_pv, style),
                        money_2dp(r.effect_pv, style),
                        pct_cell(r.share * 100.0, 3),
                    ]
                })
                .collect();
            let mut out = String::from("# Matrix (Results)\n\n");
            out.push_str(&md_table(&MATRIX_HEADERS, &body));
            out.push_str(&format!("\nNote: {CURRENCY_CAVEAT}\n"));
            out.push_str(&manifest_markdown(manifest));
            out
        }
        Format::Csv => {
            let mut out = manifest_csv(manifest);
            out.push_str(&format!("# note {CURRENCY_CAVEAT}\n"));
            out.push_str(&format!("# columns: {}\n", MATRIX_ALIASES.join(", ")));
            out.push_str(&csv_line(&MATRIX_HEADERS.map(String::from), ','));
            out.push('\n');
            for r in rows {
                let cells = vec![
                    r.g.to_string(),
                    fmt_fixed(r.volume_h, 2),
                    r.cost_adjustment.to_string(),
                    fmt_fixed(r.gdp_pv, 0),
                    fmt_fixed(r.effect_pv, 2),
                    fmt_fixed(r.share * 100.0, 3),
                ];
                out.push_str(&csv_line(&cells, ','));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows_json: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        MATRIX_HEADERS[0]: r.g,
                        MATRIX_HEADERS[1]: round_dp(r.volume_h, 2),
                        MATRIX_HEADERS[2]: r.cost_adjustment,
                        MATRIX_HEADERS[3]: round_dp(r.gdp_pv, 0) as i64,
                        MATRIX_HEADERS[4]: round_dp(r.effect_pv, 2),
                        MATRIX_HEADERS[5]: round_dp(r.share * 100.0, 3),
                    })
                })
                .collect();
            json_report(manifest, "matrix", json!({ "note": CURRENCY_CAVEAT, "rows": rows_json }))
        }
    }
}

fn calibration_fields(result: &CalibrationResult) -> Vec<(&'static str, f64)> {
    let mut fields = Vec::new();
    let mut push = |name, v: Option<f64>| {
        if let Some(x) = v {
            fields.push((name, x));
        }
    };
    push("reduced_a", result.reduced_a);
    push("reduced_b", result.reduced_b);
    push("fit_r2", result.fit_r2);
    push("implied_discount", result.implied_discount);
    push("cost0", result.cost0);
    push("asset_base", result.asset_base);
    push("residual_max", result.residual_max);
    fields
}

pub fn render_calibration(result: &CalibrationResult, format: Format, manifest: &RunManifest) -> String {
    let fields = calibration_fields(result);
    render_parameter_table("Calibration result", "calibrate", &fields, format, manifest)
}

pub fn render_ols(fit: &OlsFit, format: Format, manifest: &RunManifest) -> String {
    let fields = vec![
        ("slope", fit.slope),
        ("intercept", fit.intercept),
        ("r2", fit.r2),
        ("n", fit.n as f64),
        ("residual_max", fit.residual_max()),
    ];
    render_parameter_table("Least-squares fit", "regress", &fields, format, manifest)
}

/// Calibration-style outputs are parameter/value pairs at full
/// precision: they feed configs, so no display rounding is applied.
fn render_parameter_table(
    title: &str,
    report: &str,
    fields: &[(&'static str, f64)],
    format: Format,
    manifest: &RunManifest,
) -> String {
    match format {
        Format::Markdown => {
            let body: Vec<Vec<String>> = fields.iter().map(|(k, v)| vec![k.to_string(), v.to_string()]).collect();
            let mut out = format!("# {title}\n\n");
            out.push_str(&md_table(&["parameter", "value"], &body));
            out.push_str(&manifest_markdown(manifest));
            out
        }
        Format::Csv => {
            let mut out = manifest_csv(manifest);
            out.push_str("parameter,value\n");
            for (k, v) in fields {
                out.push_str(&format!("{k},{v}\n"));
            }
            out
        }
        Format::Json => {
            let mut payload = serde_json::Map::new();
            for (k, v) in fields {
                payload.insert(k.to_string(), json!(v));
            }
            json_report(manifest, report, json!({ "result": payload }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(fmt_fixed(0.2435, 3), "0.244");
        assert_eq!(fmt_fixed(-0.2435, 3), "-0.244");
        assert_eq!(fmt_fixed(2.5, 0), "3");
        assert_eq!(fmt_fixed(-2.5, 0), "-3");
        assert_eq!(fmt_fixed(-3.0044697864 , 2), "-3.00");
    }

    #[test]
    fn money_cells_follow_the_published_styles() {
        assert_eq!(money_whole(530161.0, NegativeStyle::Parens), "$530,161");
        assert_eq!(money_2dp(-59.66, NegativeStyle::Parens), "($59.66)");
        assert_eq!(money_2dp(-59.66, NegativeStyle::Minus), "-$59.66");
        assert_eq!(money_2dp(300.17, NegativeStyle::Parens), "$300.17");
        assert_eq!(money_whole(1234567.0, NegativeStyle::Minus), "$1,234,567");
    }

    #[test]
    fn percent_cells_use_minus_signs() {
        assert_eq!(pct_cell(-0.01125, 3), "-0.011%");
        assert_eq!(pct_cell(0.09433, 3), "0.094%");
    }

    #[test]
    fn clean_format_trims_float_dust() {
        assert_eq!(fmt_clean(1.0000000000000002 * 1.0), "1");
        assert_eq!(fmt_clean(200.10000000000036), "200.1");
        assert_eq!(fmt_clean(0.5), "0.5");
    }

    #[test]
    fn csv_cells_with_delimiters_are_quoted() {
        assert_eq!(csv_quote("GDP in current prices, mln. Gel", ','), "\"GDP in current prices, mln. Gel\"");
        assert_eq!(csv_quote("plain", ','), "plain");
        assert_eq!(csv_quote("a\"b", ','), "\"a\"\"b\"");
    }
}
