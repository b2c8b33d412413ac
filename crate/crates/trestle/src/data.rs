//! Tabular data model: freight series, GDP series, and the component
//! consistency check.
//!
//! Parsers accept `#` comment lines and blank lines anywhere. Error
//! positions are 1-based and count physical lines of the source text,
//! comments included. Serialization uses shortest round-trip float
//! formatting, so parse∘serialize reproduces every value exactly.

use crate::error::{Error, Result};

/// Freight categories that must sum to the published total.
pub const COMPONENT_CATEGORIES: [&str; 4] = ["local", "import", "export", "transit"];
/// Category holding the published total.
pub const TOTAL_CATEGORY: &str = "total";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Volumes,
    Revenues,
}

impl std::fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeriesKind::Volumes => write!(f, "volumes"),
            SeriesKind::Revenues => write!(f, "revenues"),
        }
    }
}

/// One named row of the freight table, one value per year.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub category: String,
    pub values: Vec<f64>,
}

/// Annual freight volumes and revenues, categories in declaration order.
///
/// Invariants, enforced on construction: years are consecutive and
/// ascending, every series has one finite non-negative value per year,
/// and category names are unique within each kind.
#[derive(Debug, Clone, PartialEq)]
pub struct FreightDataset {
    years: Vec<i32>,
    volumes: Vec<Series>,
    revenues: Vec<Series>,
}

impl FreightDataset {
    pub fn new(years: Vec<i32>, volumes: Vec<Series>, revenues: Vec<Series>) -> Result<Self> {
        if years.is_empty() {
            return Err(structure("freight table", "no year columns"));
        }
        for w in years.windows(2) {
            if w[1] != w[0] + 1 {
                return Err(structure(
                    "freight table",
                    format!("years must be consecutive and ascending, found {} after {}", w[1], w[0]),
                ));
            }
        }
        if volumes.is_empty() && revenues.is_empty() {
            return Err(structure("freight table", "no category rows"));
        }
        for (kind, series) in [(SeriesKind::Volumes, &volumes), (SeriesKind::Revenues, &revenues)] {
            for (i, s) in series.iter().enumerate() {
                if s.category.is_empty() {
                    return Err(structure("freight table", format!("{kind} row {} has an empty category", i + 1)));
                }
                if series[..i].iter().any(|prior| prior.category == s.category) {
                    return Err(structure("freight table", format!("duplicate {kind} category \"{}\"", s.category)));
                }
                if s.values.len() != years.len() {
                    return Err(structure(
                        "freight table",
                        format!(
                            "{kind} category \"{}\" has {} values for {} years",
                            s.category,
                            s.values.len(),
                            years.len()
                        ),
                    ));
                }
                for (y, v) in years.iter().zip(&s.values) {
                    if !v.is_finite() || *v < 0.0 {
                        return Err(structure(
                            "freight table",
                            format!("{kind} category \"{}\", year {y}: value {v} must be finite and non-negative", s.category),
                        ));
                    }
                }
            }
        }
        Ok(FreightDataset { years, volumes, revenues })
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn series(&self, kind: SeriesKind) -> &[Series] {
        match kind {
            SeriesKind::Volumes => &self.volumes,
            SeriesKind::Revenues => &self.revenues,
        }
    }

    pub fn values(&self, kind: SeriesKind, category: &str) -> Option<&[f64]> {
        self.series(kind)
            .iter()
            .find(|s| s.category == category)
            .map(|s| s.values.as_slice())
    }
}

/// Parses a freight table. The first non-comment line is the header
/// (`category,<year>,...`); body rows are volume series unless the
/// label starts with the word `revenue`, whose remainder names the
/// revenue category.
pub fn parse_freight_table(text: &str, name: &str, delimiter: char) -> Result<FreightDataset> {
    let mut years: Option<Vec<i32>> = None;
    let mut volumes = Vec::new();
    let mut revenues = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cells = split_cells(trimmed, delimiter);
        match &years {
            None => {
                if cells.len() < 2 {
                    return Err(parse(name, lineno, 1, "header needs a label and at least one year"));
                }
                let mut parsed = Vec::with_capacity(cells.len() - 1);
                for (col, cell) in cells.iter().enumerate().skip(1) {
                    let year: i32 = cell
                        .parse()
                        .map_err(|_| parse(name, lineno, col + 1, format!("invalid year \"{cell}\"")))?;
                    parsed.push(year);
                }
                years = Some(parsed);
            }
            Some(years) => {
                let label = cells[0].to_ascii_lowercase();
                if label.is_empty() {
                    return Err(parse(name, lineno, 1, "row has an empty category label"));
                }
                if cells.len() - 1 != years.len() {
                    return Err(structure(
                        name,
                        format!(
                            "line {lineno}: category \"{label}\" has {} values for {} year columns",
                            cells.len() - 1,
                            years.len()
                        ),
                    ));
                }
                let mut values = Vec::with_capacity(years.len());
                for (col, cell) in cells.iter().enumerate().skip(1) {
                    let v: f64 = cell
                        .parse()
                        .map_err(|_| parse(name, lineno, col + 1, format!("invalid number \"{cell}\"")))?;
                    values.push(v);
                }
                match label.strip_prefix("revenue") {
                    Some(rest) if rest.is_empty() => {
                        return Err(parse(name, lineno, 1, "revenue row is missing a category name"));
                    }
                    Some(rest) => revenues.push(Series { category: rest.trim().to_string(), values }),
                    None => volumes.push(Series { category: label, values }),
                }
            }
        }
    }

    match years {
        Some(years) => FreightDataset::new(years, volumes, revenues).map_err(|e| relocate(e, name)),
        None => Err(structure(name, "no header line found")),
    }
}

pub fn serialize_freight_table(ds: &FreightDataset, delimiter: char) -> String {
    let mut out = String::from("category");
    for y in ds.years() {
        out.push(delimiter);
        out.push_str(&y.to_string());
    }
    out.push('\n');
    for s in ds.series(SeriesKind::Volumes) {
        push_row(&mut out, &s.category, &s.values, delimiter);
    }
    for s in ds.series(SeriesKind::Revenues) {
        push_row(&mut out, &format!("revenue {}", s.category), &s.values, delimiter);
    }
    out
}

fn push_row(out: &mut String, label: &str, values: &[f64], delimiter: char) {
    out.push_str(label);
    for v in values {
        out.push(delimiter);
        out.push_str(&v.to_string());
    }
    out.push('\n');
}

/// One year of value-added accounting, both figures in million GEL.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdpRow {
    pub year: i32,
    pub railway_value_added: f64,
    pub gdp_market_prices: f64,
}

/// Annual railway value added against GDP at market prices.
///
/// Years are strictly increasing (gaps allowed); value added is finite
/// and non-negative; GDP is finite and strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct GdpSeries {
    rows: Vec<GdpRow>,
}

impl GdpSeries {
    pub fn new(rows: Vec<GdpRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(structure("gdp table", "no data rows"));
        }
        for w in rows.windows(2) {
            if w[1].year <= w[0].year {
                return Err(structure(
                    "gdp table",
                    format!("years must be strictly increasing, found {} after {}", w[1].year, w[0].year),
                ));
            }
        }
        for r in &rows {
            if !r.railway_value_added.is_finite() || r.railway_value_added < 0.0 {
                return Err(structure(
                    "gdp table",
                    format!("year {}: railway value added {} must be finite and non-negative", r.year, r.railway_value_added),
                ));
            }
            if !r.gdp_market_prices.is_finite() || r.gdp_market_prices <= 0.0 {
                return Err(structure(
                    "gdp table",
                    format!("year {}: GDP {} must be finite and positive", r.year, r.gdp_market_prices),
                ));
            }
        }
        Ok(GdpSeries { rows })
    }

    pub fn rows(&self) -> &[GdpRow] {
        &self.rows
    }
}

/// Parses a GDP table with header `year,railway_value_added,gdp_market_prices`.
pub fn parse_gdp_table(text: &str, name: &str, delimiter: char) -> Result<GdpSeries> {
    let mut saw_header = false;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cells = split_cells(trimmed, delimiter);
        if cells.len() != 3 {
            return Err(structure(name, format!("line {lineno}: expected 3 columns, found {}", cells.len())));
        }
        if !saw_header {
            saw_header = true;
            continue;
        }
        let year: i32 = cells[0]
            .parse()
            .map_err(|_| parse(name, lineno, 1, format!("invalid year \"{}\"", cells[0])))?;
        let railway_value_added: f64 = cells[1]
            .parse()
            .map_err(|_| parse(name, lineno, 2, format!("invalid number \"{}\"", cells[1])))?;
        let gdp_market_prices: f64 = cells[2]
            .parse()
            .map_err(|_| parse(name, lineno, 3, format!("invalid number \"{}\"", cells[2])))?;
        rows.push(GdpRow { year, railway_value_added, gdp_market_prices });
    }
    if !saw_header {
        return Err(structure(name, "no header line found"));
    }
    GdpSeries::new(rows).map_err(|e| relocate(e, name))
}

pub fn serialize_gdp_table(gs: &GdpSeries, delimiter: char) -> String {
    let mut out = format!("year{delimiter}railway_value_added{delimiter}gdp_market_prices\n");
    for r in gs.rows() {
        out.push_str(&format!(
            "{}{delimiter}{}{delimiter}{}\n",
            r.year, r.railway_value_added, r.gdp_market_prices
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

impl std::fmt::Display for Severity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Severity::Warning => write!(f, "warning"),
            Severity::Error => write!(f, "error"),
        }
    }
}

/// One component-sum discrepancy beyond tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub kind: SeriesKind,
    pub year: i32,
    pub total: f64,
    pub component_sum: f64,
    pub discrepancy: f64,
    pub severity: Severity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub tolerance: f64,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_consistent(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Checks that local + import + export + transit reproduces the total
/// for every year, in both volumes and revenues. Findings are warnings:
/// published statistics are reported, never rejected. A kind lacking
/// the total or any component is skipped, there is nothing to sum.
pub fn validate_components(ds: &FreightDataset, tolerance: f64) -> Result<ValidationReport> {
    if !tolerance.is_finite() || tolerance <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be finite and positive, got {tolerance}")));
    }
    let mut findings = Vec::new();
    for kind in [SeriesKind::Volumes, SeriesKind::Revenues] {
        let total = match ds.values(kind, TOTAL_CATEGORY) {
            Some(t) => t,
            None => continue,
        };
        let components: Option<Vec<&[f64]>> =
            COMPONENT_CATEGORIES.iter().map(|c| ds.values(kind, c)).collect();
        let components = match components {
            Some(c) => c,
            None => continue,
        };
        for (i, year) in ds.years().iter().enumerate() {
            let sum: f64 = components.iter().map(|c| c[i]).sum();
            let discrepancy = (sum - total[i]).abs();
            if discrepancy > tolerance {
                findings.push(Finding {
                    kind,
                    year: *year,
                    total: total[i],
                    component_sum: sum,
                    discrepancy,
                    severity: Severity::Warning,
                });
            }
        }
    }
    Ok(ValidationReport { tolerance, findings })
}

/// A generic numeric table for ad-hoc regression: a header row naming
/// the columns, then all-numeric rows. A `# columns: a, b, ...` comment
/// supplies optional positional short aliases; `trestle matrix` writes
/// one so its long display headers stay addressable.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub aliases: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    /// Resolves a column selector: exact header, exact alias
    /// (case-insensitive), 1-based index, or unique case-insensitive
    /// substring of a header, in that order. Indexes resolve before
    /// substrings so digits never get captured by headers that happen
    /// to contain them.
    pub fn resolve_column(&self, selector: &str) -> Result<usize> {
        if let Some(i) = self.headers.iter().position(|h| h == selector) {
            return Ok(i);
        }
        let lowered = selector.to_ascii_lowercase();
        if let Some(i) = self.headers.iter().position(|h| h.to_ascii_lowercase() == lowered) {
            return Ok(i);
        }
        if let Some(i) = self.aliases.iter().position(|a| a.to_ascii_lowercase() == lowered) {
            return Ok(i);
        }
        if let Ok(idx) = selector.parse::<usize>() {
            if idx >= 1 && idx <= self.headers.len() {
                return Ok(idx - 1);
            }
        }
        let matches: Vec<usize> = self
            .headers
            .iter()
            .enumerate()
            .filter(|(_, h)| h.to_ascii_lowercase().contains(&lowered))
            .map(|(i, _)| i)
            .collect();
        match matches.len() {
            1 => return Ok(matches[0]),
            n if n > 1 => {
                let names: Vec<&str> = matches.iter().map(|&i| self.headers[i].as_str()).collect();
                return Err(Error::Structure {
                    locus: "column selector".into(),
                    message: format!("\"{selector}\" is ambiguous, matches: {}", names.join(", ")),
                });
            }
            _ => {}
        }
        Err(Error::Structure {
            locus: "column selector".into(),
            message: format!("no column matches \"{selector}\"; available: {}", self.headers.join(", ")),
        })
    }

    pub fn column(&self, index: usize) -> &[f64] {
        &self.columns[index]
    }
}

/// Parses a generic delimited numeric table for `regress`.
pub fn parse_table(text: &str, name: &str, delimiter: char) -> Result<Table> {
    let mut headers: Option<Vec<String>> = None;
    let mut aliases: Vec<String> = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some(list) = rest.trim().strip_prefix("columns:") {
                aliases = list.split(delimiter).map(|a| a.trim().to_string()).collect();
            }
            continue;
        }
        let cells = split_cells(trimmed, delimiter);
        match &headers {
            None => {
                headers = Some(cells.clone());
                columns = vec![Vec::new(); cells.len()];
            }
            Some(h) => {
                if cells.len() != h.len() {
                    return Err(structure(
                        name,
                        format!("line {lineno}: expected {} columns, found {}", h.len(), cells.len()),
                    ));
                }
                for (col, cell) in cells.iter().enumerate() {
                    let v: f64 = cell
                        .parse()
                        .map_err(|_| parse(name, lineno, col + 1, format!("invalid number \"{cell}\"")))?;
                    columns[col].push(v);
                }
            }
        }
    }

    let headers = headers.ok_or_else(|| structure(name, "no header line found"))?;
    if aliases.len() != headers.len() {
        aliases = Vec::new();
    }
    Ok(Table { headers, aliases, columns })
}

/// Splits one delimited line, honoring double-quoted cells ("" inside
/// quotes is a literal quote). Whitespace around cells is trimmed.
fn split_cells(line: &str, delimiter: char) -> Vec<String> {
    let mut cells = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        if in_quotes {
            if c == '"' {
                if chars.peek() == Some(&'"') {
                    cur.push('"');
                    chars.next();
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push(c);
            }
        } else if c == '"' {
            in_quotes = true;
        } else if c == delimiter {
            cells.push(std::mem::take(&mut cur).trim().to_string());
        } else {
            cur.push(c);
        }
    }
    cells.push(cur.trim().to_string());
    cells
}

fn parse(name: &str, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { locus: name.to_string(), line, column, message: message.into() }
}

fn structure(name: &str, message: impl Into<String>) -> Error {
    Error::Structure { locus: name.to_string(), message: message.into() }
}

/// Re-homes a constructor error onto the file being parsed.
fn relocate(e: Error, name: &str) -> Error {
    match e {
        Error::Structure { message, .. } => structure(name, message),
        other => other,
    }
}
