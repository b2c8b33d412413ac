//! Financial primitives: CAPM discount rate, NPV, projected-GDP
//! present value, implied-rate recovery, and the per-year EVA stream.
//!
//! Discounting is end-of-period throughout: periods run t = 1..horizon
//! and the base period t = 0 is excluded. Every stream carries its
//! currency unit; values are stored in millions of that currency.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapmParams {
    pub risk_free: f64,
    pub beta: f64,
    pub market_premium: f64,
}

/// rate = risk_free + beta × market_premium.
pub fn capm_rate(p: CapmParams) -> Result<f64> {
    if !p.risk_free.is_finite() || p.risk_free <= -1.0 {
        return Err(Error::Domain(format!("capm: risk-free rate {} must exceed -1", p.risk_free)));
    }
    if !p.beta.is_finite() || !p.market_premium.is_finite() {
        return Err(Error::Domain("capm: beta and market premium must be finite".into()));
    }
    let rate = p.risk_free + p.beta * p.market_premium;
    if !rate.is_finite() || rate <= -1.0 {
        return Err(Error::Domain(format!("capm: resulting rate {rate} must exceed -1")));
    }
    Ok(rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurrencyUnit {
    MillionUsd,
    MillionGel,
}

impl std::fmt::Display for CurrencyUnit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurrencyUnit::MillionUsd => write!(f, "million USD"),
            CurrencyUnit::MillionGel => write!(f, "million GEL"),
        }
    }
}

/// Per-period cash flows for t = 1..horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct CashflowStream {
    values: Vec<f64>,
    pub unit: CurrencyUnit,
}

impl CashflowStream {
    pub fn new(values: Vec<f64>, unit: CurrencyUnit) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("cash-flow stream needs at least one period".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("cash-flow stream values must be finite".into()));
        }
        Ok(CashflowStream { values, unit })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn horizon(&self) -> u32 {
        self.values.len() as u32
    }
}

/// Σ_{t=1..horizon} s[t] / (1+rate)^t.
pub fn npv(s: &CashflowStream, rate: f64) -> Result<f64> {
    if !rate.is_finite() || rate <= -1.0 {
        return Err(Error::Domain(format!("npv: rate {rate} must exceed -1")));
    }
    Ok(s
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v / (1.0 + rate).powi(i as i32 + 1))
        .sum())
}

/// GDP growing at a constant rate from a base-year level, discounted
/// back to the base year. Units are million GEL.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdpProjection {
    pub gdp0: f64,
    pub growth: f64,
    pub horizon: u32,
    pub discount: f64,
}

impl GdpProjection {
    pub fn new(gdp0: f64, growth: f64, horizon: u32, discount: f64) -> Result<Self> {
        if !gdp0.is_finite() || gdp0 <= 0.0 {
            return Err(Error::Domain(format!("gdp projection: gdp0 {gdp0} must be positive")));
        }
        if !growth.is_finite() || growth <= -1.0 {
            return Err(Error::Domain(format!("gdp projection: growth {growth} must exceed -1")));
        }
        if horizon < 1 {
            return Err(Error::Domain("gdp projection: horizon must be at least 1".into()));
        }
        if !discount.is_finite() || discount <= -1.0 {
            return Err(Error::Domain(format!("gdp projection: discount {discount} must exceed -1")));
        }
        Ok(GdpProjection { gdp0, growth, horizon, discount })
    }
}

/// The projected GDP levels gdp0·(1+growth)^t for t = 1..horizon.
pub fn gdp_stream(g: &GdpProjection) -> CashflowStream {
    let values = (1..=g.horizon).map(|t| g.gdp0 * (1.0 + g.growth).powi(t as i32)).collect();
    CashflowStream::new(values, CurrencyUnit::MillionGel).expect("projection invariants ensure a valid stream")
}

/// PV = Σ gdp0·(1+growth)^t / (1+discount)^t, by discounting the
/// projected stream.
pub fn gdp_pv(g: &GdpProjection) -> Result<f64> {
    npv(&gdp_stream(g), g.discount)
}

/// Recovers the discount rate under which the projected GDP stream is
/// worth `target_pv`, by bisection. gdp_pv is continuous and strictly
/// decreasing in the discount rate, so within the bracket
/// [growth - 0.5, growth + 1.0] the solution is unique when it exists.
pub fn implied_discount(gdp0: f64, growth: f64, horizon: u32, target_pv: f64) -> Result<f64> {
    if !target_pv.is_finite() || target_pv <= 0.0 {
        return Err(Error::Calibration(format!("implied discount: target PV {target_pv} must be positive")));
    }
    let pv_at = |rate: f64| -> Result<f64> { gdp_pv(&GdpProjection::new(gdp0, growth, horizon, rate)?) };
    let mut lo = (growth - 0.5).max(-1.0 + 1e-9);
    let mut hi = growth + 1.0;
    let pv_lo = pv_at(lo)?;
    let pv_hi = pv_at(hi)?;
    if target_pv > pv_lo || target_pv < pv_hi {
        return Err(Error::Calibration(format!(
            "implied discount: target PV {target_pv} outside the achievable interval [{pv_hi:.6}, {pv_lo:.6}] \
             for rates in [{lo}, {hi}]"
        )));
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let pv = pv_at(mid)?;
        if ((pv - target_pv) / target_pv).abs() < 1e-10 {
            return Ok(mid);
        }
        if pv > target_pv {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Economics of the structural EVA engine. Monetary fields are million
/// USD: with volumes in million tons and a USD-per-ton tariff, income
/// tariff × v_t lands in million USD directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaParams {
    pub tariff: f64,
    /// Operating cost in the base period, at base_volume throughput.
    pub cost0: f64,
    /// Per-period fractional cost reduction ("cost adjustment").
    pub cost_adjustment: f64,
    /// Capital employed; charged at the discount rate each period.
    pub asset_base: f64,
    pub discount: f64,
    /// Throughput at which cost0 is incurred; operating cost scales
    /// with v_t / base_volume.
    pub base_volume: f64,
}

impl EvaParams {
    pub fn validate(&self) -> Result<()> {
        if !self.tariff.is_finite() || self.tariff <= 0.0 {
            return Err(Error::Domain(format!("eva: tariff {} must be positive", self.tariff)));
        }
        if !self.cost_adjustment.is_finite() || !(0.0..1.0).contains(&self.cost_adjustment) {
            return Err(Error::Domain(format!(
                "eva: cost adjustment {} must lie in [0, 1)",
                self.cost_adjustment
            )));
        }
        if !self.cost0.is_finite() {
            return Err(Error::Domain("eva: cost0 must be finite".into()));
        }
        if !self.asset_base.is_finite() {
            return Err(Error::Domain("eva: asset base must be finite".into()));
        }
        if !self.discount.is_finite() || self.discount <= -1.0 {
            return Err(Error::Domain(format!("eva: discount {} must exceed -1", self.discount)));
        }
        if !self.base_volume.is_finite() || self.base_volume <= 0.0 {
            return Err(Error::Domain(format!("eva: base volume {} must be positive", self.base_volume)));
        }
        Ok(())
    }
}

/// EVA_t = tariff·v_t − cost0·(v_t / base_volume)·(1 − cost_adjustment)^t
/// − asset_base·discount, for t = 1..horizon.
///
/// Income and operating cost both scale with throughput; the capital
/// charge does not. EVA_t is strictly increasing in v_t whenever the
/// per-unit base cost cost0 / base_volume stays below the tariff.
pub fn eva_stream(p: &EvaParams, volumes: &[f64], horizon: u32) -> Result<CashflowStream> {
    p.validate()?;
    if volumes.len() as u32 != horizon {
        return Err(Error::Domain(format!(
            "eva: {} volumes supplied for a {horizon}-period horizon",
            volumes.len()
        )));
    }
    let values = volumes
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let t = i as i32 + 1;
            p.tariff * v
                - p.cost0 * (v / p.base_volume) * (1.0 - p.cost_adjustment).powi(t)
                - p.asset_base * p.discount
        })
        .collect();
    CashflowStream::new(values, CurrencyUnit::MillionUsd)
}
