//! Growth analytics: compound annual growth rates over freight series
//! and the railway share of GDP.

use crate::data::{FreightDataset, GdpSeries, SeriesKind};
use crate::error::{Error, Result};

/// A compound annual growth rate between two endpoint observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CagrResult {
    pub begin: f64,
    pub end: f64,
    pub periods: u32,
    pub rate: f64,
}

/// rate = (end / begin)^(1 / periods) - 1.
///
/// Both endpoints must be finite and strictly positive; a zero
/// endpoint has no geometric growth rate.
pub fn cagr(begin: f64, end: f64, periods: u32) -> Result<CagrResult> {
    if periods == 0 {
        return Err(Error::Domain("cagr: periods must be at least 1".into()));
    }
    if !begin.is_finite() || begin <= 0.0 {
        return Err(Error::Domain(format!("cagr: begin value {begin} must be finite and positive")));
    }
    if !end.is_finite() || end <= 0.0 {
        return Err(Error::Domain(format!("cagr: end value {end} must be finite and positive")));
    }
    let rate = (end / begin).powf(1.0 / periods as f64) - 1.0;
    Ok(CagrResult { begin, end, periods, rate })
}

/// Rate outcome for one report row. Zero endpoints are reported, not
/// errors: a series that starts or ends at nothing still belongs in
/// the survey.
#[derive(Debug, Clone, PartialEq)]
pub enum CagrOutcome {
    Defined(f64),
    Undefined { reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CagrRow {
    pub kind: SeriesKind,
    pub category: String,
    pub begin: f64,
    pub end: f64,
    pub periods: u32,
    pub outcome: CagrOutcome,
}

/// Endpoint-to-endpoint CAGR for every series, volumes first, in
/// declaration order. Needs at least two years of data.
pub fn cagr_report(ds: &FreightDataset) -> Result<Vec<CagrRow>> {
    let years = ds.years();
    if years.len() < 2 {
        return Err(Error::Domain("cagr report: need at least two years".into()));
    }
    let periods = (years.len() - 1) as u32;
    let mut rows = Vec::new();
    for kind in [SeriesKind::Volumes, SeriesKind::Revenues] {
        for s in ds.series(kind) {
            let begin = s.values[0];
            let end = *s.values.last().expect("series has one value per year");
            let outcome = if begin <= 0.0 || end <= 0.0 {
                let which = if begin <= 0.0 { years[0] } else { years[years.len() - 1] };
                CagrOutcome::Undefined { reason: format!("no growth rate: value is 0 in {which}") }
            } else {
                CagrOutcome::Defined(cagr(begin, end, periods)?.rate)
            };
            rows.push(CagrRow { kind, category: s.category.clone(), begin, end, periods, outcome });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShareRow {
    pub year: i32,
    pub railway_value_added: f64,
    pub gdp_market_prices: f64,
    /// Dimensionless ratio, not percent.
    pub share: f64,
}

/// Railway value added as a share of GDP, year by year.
pub fn gdp_share_table(gs: &GdpSeries) -> Vec<ShareRow> {
    gs.rows()
        .iter()
        .map(|r| ShareRow {
            year: r.year,
            railway_value_added: r.railway_value_added,
            gdp_market_prices: r.gdp_market_prices,
            share: r.railway_value_added / r.gdp_market_prices,
        })
        .collect()
}
