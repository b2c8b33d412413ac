//! The freight-growth sensitivity matrix and the calibration routines
//! that recover its unpublished parameters.
//!
//! Each matrix row maps a growth rate to the final-year volume, the PV
//! of the railway EVA stream (the "effect"), and that effect's share
//! of projected GDP. Two effect engines exist: a reduced form, affine
//! in the growth rate, and a structural engine that prices the EVA
//! cash flows; under a fixed grid and mode both are affine in g, which
//! is what makes two-anchor calibration exact.

use crate::error::{Error, Result};
use crate::regress::ols_fit;
use crate::valuation::{eva_stream, gdp_pv, npv, EvaParams, GdpProjection};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthMode {
    /// volume_t = v0·(1 + g·t). Default: reproduces the published
    /// volume column, which is affine in g despite its CAGR label.
    Simple,
    /// volume_t = v0·(1+g)^t.
    Compound,
}

impl std::str::FromStr for GrowthMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simple" => Ok(GrowthMode::Simple),
            "compound" => Ok(GrowthMode::Compound),
            other => Err(Error::Config(format!("unknown growth mode \"{other}\", expected simple or compound"))),
        }
    }
}

impl std::fmt::Display for GrowthMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GrowthMode::Simple => write!(f, "simple"),
            GrowthMode::Compound => write!(f, "compound"),
        }
    }
}

/// Per-year volumes for t = 1..horizon, million tons.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumePath {
    volumes: Vec<f64>,
    pub mode: GrowthMode,
}

impl VolumePath {
    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn final_volume(&self) -> f64 {
        *self.volumes.last().expect("horizon >= 1")
    }
}

pub fn volume_path(v0: f64, g: f64, horizon: u32, mode: GrowthMode) -> Result<VolumePath> {
    if !v0.is_finite() || v0 <= 0.0 {
        return Err(Error::Domain(format!("volume path: v0 {v0} must be positive")));
    }
    if !g.is_finite() {
        return Err(Error::Domain("volume path: growth rate must be finite".into()));
    }
    if horizon < 1 {
        return Err(Error::Domain("volume path: horizon must be at least 1".into()));
    }
    let mut volumes = Vec::with_capacity(horizon as usize);
    for t in 1..=horizon as i32 {
        let v = match mode {
            GrowthMode::Simple => v0 * (1.0 + g * t as f64),
            GrowthMode::Compound => v0 * (1.0 + g).powi(t),
        };
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Domain(format!(
                "volume path: rate {g} drives the year-{t} volume to {v}; volumes must stay positive"
            )));
        }
        volumes.push(v);
    }
    Ok(VolumePath { volumes, mode })
}

/// Reduced-form effect PV: a + b·g, million USD.
pub fn effect_pv_reduced(g: f64, a: f64, b: f64) -> f64 {
    a + b * g
}

/// effect_pv / gdp_pv. Dimensionless in form; the numerator is million
/// USD and the denominator million GEL, divided as-published without
/// currency conversion (see report caveat).
pub fn share_of_gdp(effect_pv: f64, gdp_pv: f64) -> Result<f64> {
    if !gdp_pv.is_finite() || gdp_pv <= 0.0 {
        return Err(Error::Domain(format!("share: GDP present value {gdp_pv} must be positive")));
    }
    if !effect_pv.is_finite() {
        return Err(Error::Domain("share: effect present value must be finite".into()));
    }
    Ok(effect_pv / gdp_pv)
}

/// How a matrix row's effect PV is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffectEngine {
    Reduced { a: f64, b: f64 },
    Structural { tariff: f64, cost0: f64, asset_base: f64 },
}

/// Everything needed to build the matrix. One horizon and one discount
/// rate govern both the volume/EVA side and the GDP projection.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub v0: f64,
    pub growth_grid: Vec<f64>,
    pub horizon: u32,
    pub mode: GrowthMode,
    pub cost_adjustment: f64,
    pub gdp: GdpProjection,
    pub engine: EffectEngine,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.v0.is_finite() || self.v0 <= 0.0 {
            return Err(Error::Domain(format!("scenario: v0 {} must be positive", self.v0)));
        }
        if self.growth_grid.is_empty() {
            return Err(Error::Domain("scenario: growth grid is empty".into()));
        }
        for g in &self.growth_grid {
            if !g.is_finite() || *g <= -1.0 {
                return Err(Error::Domain(format!("scenario: growth rate {g} must be finite and exceed -1")));
            }
        }
        if self.horizon < 1 {
            return Err(Error::Domain("scenario: horizon must be at least 1".into()));
        }
        if self.horizon != self.gdp.horizon {
            return Err(Error::Domain(format!(
                "scenario: volume horizon {} and GDP horizon {} must match",
                self.horizon, self.gdp.horizon
            )));
        }
        if !self.cost_adjustment.is_finite() || !(0.0..1.0).contains(&self.cost_adjustment) {
            return Err(Error::Domain(format!(
                "scenario: cost adjustment {} must lie in [0, 1)",
                self.cost_adjustment
            )));
        }
        Ok(())
    }

    fn eva_params(&self) -> Option<EvaParams> {
        match self.engine {
            EffectEngine::Reduced { .. } => None,
            EffectEngine::Structural { tariff, cost0, asset_base } => Some(EvaParams {
                tariff,
                cost0,
                cost_adjustment: self.cost_adjustment,
                asset_base,
                discount: self.gdp.discount,
                base_volume: self.v0,
            }),
        }
    }
}

/// One matrix row. Monetary units: effect_pv million USD, gdp_pv
/// million GEL; share is their direct ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioRow {
    pub g: f64,
    pub volume_h: f64,
    pub cost_adjustment: f64,
    pub gdp_pv: f64,
    pub effect_pv: f64,
    pub share: f64,
}

/// Builds the matrix: one row per grid rate, ascending. The GDP
/// projection is priced once; rounding happens only at render time.
pub fn build_matrix(cfg: &ScenarioConfig) -> Result<Vec<ScenarioRow>> {
    cfg.validate()?;
    let gdp_present = gdp_pv(&cfg.gdp)?;
    let mut grid = cfg.growth_grid.clone();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("grid rates are finite"));
    let eva = cfg.eva_params();
    let mut rows = Vec::with_capacity(grid.len());
    for g in grid {
        let path = volume_path(cfg.v0, g, cfg.horizon, cfg.mode)?;
        let effect_pv = match (&cfg.engine, &eva) {
            (EffectEngine::Reduced { a, b }, _) => effect_pv_reduced(g, *a, *b),
            (EffectEngine::Structural { .. }, Some(p)) => npv(&eva_stream(p, path.volumes(), cfg.horizon)?, p.discount)?,
            (EffectEngine::Structural { .. }, None) => unreachable!("structural engine always yields params"),
        };
        let share = share_of_gdp(effect_pv, gdp_present)?;
        rows.push(ScenarioRow {
            g,
            volume_h: path.final_volume(),
            cost_adjustment: cfg.cost_adjustment,
            gdp_pv: gdp_present,
            effect_pv,
            share,
        });
    }
    Ok(rows)
}

/// Effect PV under the structural engine for a single growth rate:
/// price the EVA stream along the volume path.
pub fn structural_effect_pv(
    p: &EvaParams,
    v0: f64,
    g: f64,
    horizon: u32,
    mode: GrowthMode,
) -> Result<f64> {
    let path = volume_path(v0, g, horizon, mode)?;
    npv(&eva_stream(p, path.volumes(), horizon)?, p.discount)
}

/// Output of a calibration run; fields are filled by whichever routine
/// produced the result.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CalibrationResult {
    /// Effect PV at g = 0, million USD.
    pub reduced_a: Option<f64>,
    /// Effect PV slope per unit growth rate, million USD.
    pub reduced_b: Option<f64>,
    pub fit_r2: Option<f64>,
    pub implied_discount: Option<f64>,
    /// Base-period operating cost, million USD.
    pub cost0: Option<f64>,
    /// Capital employed, million USD.
    pub asset_base: Option<f64>,
    /// Worst absolute deviation from the target rows, million USD
    /// (for the implied discount: deviation from the target PV).
    pub residual_max: Option<f64>,
}

/// Fits the reduced form effect = a + b·g by least squares.
pub fn calibrate_reduced(rows: &[(f64, f64)]) -> Result<CalibrationResult> {
    let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let fit = ols_fit(&xs, &ys)?;
    Ok(CalibrationResult {
        reduced_a: Some(fit.intercept),
        reduced_b: Some(fit.slope),
        fit_r2: Some(fit.r2),
        residual_max: Some(fit.residual_max()),
        ..CalibrationResult::default()
    })
}

/// Recovers (cost0, asset_base) from effect-PV anchors by least
/// squares. For a fixed grid and mode the effect PV is affine in both
/// unknowns:
///
///   effect(g) = T(g) − cost0·K(g) − asset_base·M
///
/// with T the tariff-income PV, K the cost-shape PV, and M the PV of
/// the per-period capital charge per unit of assets. Anchors with
/// identical g (or a zero discount rate, which removes the capital
/// charge) leave the design singular.
pub fn calibrate_structural(
    anchors: &[(f64, f64)],
    tariff: f64,
    discount: f64,
    cost_adjustment: f64,
    v0: f64,
    horizon: u32,
    mode: GrowthMode,
) -> Result<CalibrationResult> {
    if anchors.len() < 2 {
        return Err(Error::Calibration(format!("structural: need at least 2 anchors, got {}", anchors.len())));
    }
    // Probe parameters validate the shared economics once.
    let probe = EvaParams {
        tariff,
        cost0: 0.0,
        cost_adjustment,
        asset_base: 0.0,
        discount,
        base_volume: v0,
    };
    probe.validate()?;

    let charge_pv: f64 = (1..=horizon as i32).map(|t| discount / (1.0 + discount).powi(t)).sum();
    let mut sum_kk = 0.0;
    let mut sum_km = 0.0;
    let mut sum_mm = 0.0;
    let mut sum_kz = 0.0;
    let mut sum_mz = 0.0;
    for (g, effect) in anchors {
        let path = volume_path(v0, *g, horizon, mode)?;
        let mut income_pv = 0.0;
        let mut cost_shape_pv = 0.0;
        for (i, v) in path.volumes().iter().enumerate() {
            let t = i as i32 + 1;
            let disc = (1.0 + discount).powi(t);
            income_pv += tariff * v / disc;
            cost_shape_pv += (v / v0) * (1.0 - cost_adjustment).powi(t) / disc;
        }
        let z = income_pv - effect;
        sum_kk += cost_shape_pv * cost_shape_pv;
        sum_km += cost_shape_pv * charge_pv;
        sum_mm += charge_pv * charge_pv;
        sum_kz += cost_shape_pv * z;
        sum_mz += charge_pv * z;
    }
    let det = sum_kk * sum_mm - sum_km * sum_km;
    if det.abs() <= 1e-12 * (sum_kk * sum_mm).max(f64::MIN_POSITIVE) {
        return Err(Error::Calibration(
            "structural: anchors do not separate cost0 from asset_base (identical growth rates or a zero capital charge)".into(),
        ));
    }
    let cost0 = (sum_kz * sum_mm - sum_mz * sum_km) / det;
    let asset_base = (sum_kk * sum_mz - sum_km * sum_kz) / det;

    let params = EvaParams { cost0, asset_base, ..probe };
    let residual_max = structural_residual_max(&params, v0, horizon, mode, anchors)?;
    Ok(CalibrationResult {
        cost0: Some(cost0),
        asset_base: Some(asset_base),
        residual_max: Some(residual_max),
        ..CalibrationResult::default()
    })
}

/// Worst absolute deviation of the structural engine from the given
/// (g, effect_pv) rows.
pub fn structural_residual_max(
    p: &EvaParams,
    v0: f64,
    horizon: u32,
    mode: GrowthMode,
    rows: &[(f64, f64)],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (g, effect) in rows {
        let fitted = structural_effect_pv(p, v0, *g, horizon, mode)?;
        worst = worst.max((fitted - effect).abs());
    }
    Ok(worst)
}
