//! Canonical parameters and published reference figures.
//!
//! The toolkit reproduces a published freight-economics analysis of
//! the Georgian Railway. The figures that analysis printed, and the
//! calibrated parameters that regenerate them, live here: they are the
//! built-in defaults for the scenario commands and the reference
//! columns in reports. Calibrated values are frozen at full precision
//! so repeated runs are byte-identical; `trestle calibrate` re-derives
//! every one of them.

use crate::data::SeriesKind;

/// Fitted base-year volume, million tons (2017; the actual was 10.6726).
pub const V0: f64 = 10.698;
/// Grid of growth rates, 1% through 15% in 1% steps.
pub const GROWTH_GRID_SPEC: &str = "0.01:0.15:0.01";
pub const HORIZON: u32 = 16;
pub const GROWTH_MODE: &str = "simple";
/// Per-period fractional cost reduction.
pub const COST_ADJUSTMENT: f64 = 0.01;
/// 2017 GDP at current market prices, million GEL.
pub const GDP0: f64 = 37847.0;
pub const GDP_GROWTH: f64 = 0.04;
/// Discount rate implied by the published GDP present value; output of
/// `calibrate --target table3 --what discount`.
pub const DISCOUNT_RATE: f64 = 0.05673216439762829;
/// Published present value of projected GDP, million GEL.
pub const GDP_PV_TARGET: f64 = 530161.0;
pub const TARIFF_USD_PER_TON: f64 = 10.0;
/// Reduced-form coefficients fitted to the published matrix; output of
/// `calibrate --target table3 --what reduced`.
pub const REDUCED_A: f64 = -99.64180952380948;
pub const REDUCED_B: f64 = 3998.1142857142854;
/// Growth rates of the rows used as structural-calibration anchors.
pub const STRUCTURAL_ANCHOR_RATES: [f64; 2] = [0.01, 0.15];

/// The published matrix: growth rate, final volume (million tons),
/// effect PV (million USD), share of GDP (percent points).
pub const PUBLISHED_MATRIX: [(f64, f64, f64, f64); 15] = [
    (0.01, 12.41, -59.66, -0.011),
    (0.02, 14.12, -19.68, -0.004),
    (0.03, 15.84, 20.30, 0.004),
    (0.04, 17.55, 60.28, 0.011),
    (0.05, 19.26, 100.26, 0.019),
    (0.06, 20.97, 140.25, 0.026),
    (0.07, 22.68, 180.23, 0.034),
    (0.08, 24.40, 220.21, 0.042),
    (0.09, 26.11, 260.19, 0.049),
    (0.10, 27.82, 300.17, 0.057),
    (0.11, 29.53, 340.15, 0.064),
    (0.12, 31.24, 380.13, 0.072),
    (0.13, 32.96, 420.11, 0.079),
    (0.14, 34.67, 460.09, 0.087),
    (0.15, 36.38, 500.08, 0.094),
];

/// (g, effect PV) pairs of the published matrix, for calibration.
pub fn published_effect_rows() -> Vec<(f64, f64)> {
    PUBLISHED_MATRIX.iter().map(|r| (r.0, r.2)).collect()
}

/// The anchor subset of the published rows used by structural
/// calibration: the endpoints of the grid.
pub fn structural_anchor_rows() -> Vec<(f64, f64)> {
    PUBLISHED_MATRIX
        .iter()
        .filter(|r| STRUCTURAL_ANCHOR_RATES.contains(&r.0))
        .map(|r| (r.0, r.2))
        .collect()
}

/// Published endpoint-to-endpoint growth conclusions, percent.
pub const PUBLISHED_CAGR_PCT: [(SeriesKind, &str, f64); 10] = [
    (SeriesKind::Volumes, "total", -3.09),
    (SeriesKind::Volumes, "local", -1.57),
    (SeriesKind::Volumes, "import", 6.82),
    (SeriesKind::Volumes, "export", 2.45),
    (SeriesKind::Volumes, "transit", -6.26),
    (SeriesKind::Revenues, "total", 1.11),
    (SeriesKind::Revenues, "local", -1.42),
    (SeriesKind::Revenues, "import", 12.28),
    (SeriesKind::Revenues, "export", 6.00),
    (SeriesKind::Revenues, "transit", -0.63),
];

/// Published railway share of GDP, percent, 2006-2017.
pub const PUBLISHED_SHARE_PCT: [(i32, f64); 12] = [
    (2006, 0.476),
    (2007, 0.338),
    (2008, 0.283),
    (2009, 0.272),
    (2010, 0.303),
    (2011, 0.292),
    (2012, 0.268),
    (2013, 0.261),
    (2014, 0.243),
    (2015, 0.240),
    (2016, 0.173),
    (2017, 0.145),
];

pub fn published_cagr_pct(kind: SeriesKind, category: &str) -> Option<f64> {
    PUBLISHED_CAGR_PCT
        .iter()
        .find(|(k, c, _)| *k == kind && *c == category)
        .map(|(_, _, pct)| *pct)
}

pub fn published_share_pct(year: i32) -> Option<f64> {
    PUBLISHED_SHARE_PCT.iter().find(|(y, _)| *y == year).map(|(_, pct)| *pct)
}
