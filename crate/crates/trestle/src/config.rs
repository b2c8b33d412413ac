//! Plain-text `key = value` configuration with layered precedence:
//! CLI flag over config file over built-in canonical defaults.
//!
//! The canonical defaults regenerate the published matrix, so
//! `trestle matrix` works with no configuration at all. The resolved
//! parameter set, including any auto-calibrated values, is recorded as
//! strings for the run manifest.

use std::collections::BTreeMap;

use crate::canonical;
use crate::error::{Error, Result};
use crate::scenario::{calibrate_structural, EffectEngine, GrowthMode, ScenarioConfig};
use crate::valuation::{capm_rate, CapmParams, GdpProjection};

const KNOWN_KEYS: [&str; 17] = [
    "v0",
    "growth_grid",
    "horizon",
    "growth_mode",
    "cost_adjustment",
    "gdp0",
    "gdp_growth",
    "discount_rate",
    "capm.risk_free",
    "capm.beta",
    "capm.premium",
    "engine",
    "reduced_a",
    "reduced_b",
    "tariff_usd_per_ton",
    "cost0",
    "asset_base",
];

/// Parses `key = value` lines. `#` starts a comment, full-line or
/// trailing; keys must be known; duplicates are rejected.
pub fn parse_config(text: &str, name: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{name}: line {}: expected key = value", idx + 1)))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!("{name}: line {}: unknown key \"{key}\"", idx + 1)));
        }
        if value.is_empty() {
            return Err(Error::Config(format!("{name}: line {}: key \"{key}\" has no value", idx + 1)));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::Config(format!("{name}: line {}: duplicate key \"{key}\"", idx + 1)));
        }
    }
    Ok(map)
}

/// Growth grid syntax: either `start:end:step` or a comma-separated
/// list of rates. Range endpoints are inclusive (to float tolerance).
pub fn parse_growth_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| Error::Config(format!("growth_grid \"{spec}\": {msg}"));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:end:step".into()));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad(format!("invalid start \"{}\"", parts[0])))?;
        let end: f64 = parts[1].trim().parse().map_err(|_| bad(format!("invalid end \"{}\"", parts[1])))?;
        let step: f64 = parts[2].trim().parse().map_err(|_| bad(format!("invalid step \"{}\"", parts[2])))?;
        if !start.is_finite() || !end.is_finite() || !step.is_finite() || step <= 0.0 || end < start {
            return Err(bad("need finite start <= end and step > 0".into()));
        }
        let count = ((end - start) / step + 0.5).floor() as usize + 1;
        let mut grid = Vec::with_capacity(count);
        for i in 0..count {
            // Snapping to twelve decimals keeps range-generated points on
            // the decimal lattice the range string names (0.07, not
            // 0.06999999999999999).
            let g = crate::report::round_dp(start + step * i as f64, 12);
            if g <= end + step * 1e-9 {
                grid.push(g);
            }
        }
        Ok(grid)
    } else {
        let grid: Vec<f64> = spec
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad(format!("invalid rate \"{s}\""))))
            .collect::<Result<_>>()?;
        if grid.is_empty() {
            return Err(bad("no rates given".into()));
        }
        Ok(grid)
    }
}

/// Flag-level overrides, all optional. Strings keep the user's
/// spelling for the manifest; parsing happens during resolution.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub entries: Vec<(&'static str, String)>,
}

impl Overrides {
    pub fn set(&mut self, key: &'static str, value: Option<String>) {
        if let Some(v) = value {
            self.entries.push((key, v));
        }
    }
}

/// A fully resolved run: the scenario plus every parameter as a string
/// for the manifest, in key order.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub scenario: ScenarioConfig,
    pub settings: BTreeMap<String, String>,
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::Config(format!("key \"{key}\": invalid number \"{value}\"")))?;
    if !v.is_finite() {
        return Err(Error::Config(format!("key \"{key}\": value must be finite, got \"{value}\"")));
    }
    Ok(v)
}

fn parse_u32(key: &str, value: &str) -> Result<u32> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("key \"{key}\": invalid integer \"{value}\"")))
}

/// Merges defaults, an optional config file, and flag overrides, then
/// builds the scenario. The discount rate comes either from
/// `discount_rate` or from the three `capm.*` keys; supplying both
/// explicitly is ambiguous and rejected. A structural engine without
/// explicit `cost0`/`asset_base` calibrates them from the published
/// anchor rows under the resolved economics.
pub fn resolve(file: Option<(&str, &str)>, flags: &Overrides) -> Result<Resolved> {
    let mut merged: BTreeMap<String, String> = BTreeMap::new();
    let mut explicit: BTreeMap<String, bool> = BTreeMap::new();

    let defaults: [(&str, String); 10] = [
        ("v0", canonical::V0.to_string()),
        ("growth_grid", canonical::GROWTH_GRID_SPEC.to_string()),
        ("horizon", canonical::HORIZON.to_string()),
        ("growth_mode", canonical::GROWTH_MODE.to_string()),
        ("cost_adjustment", canonical::COST_ADJUSTMENT.to_string()),
        ("gdp0", canonical::GDP0.to_string()),
        ("gdp_growth", canonical::GDP_GROWTH.to_string()),
        ("discount_rate", canonical::DISCOUNT_RATE.to_string()),
        ("engine", "reduced".to_string()),
        ("tariff_usd_per_ton", canonical::TARIFF_USD_PER_TON.to_string()),
    ];
    for (k, v) in defaults {
        merged.insert(k.to_string(), v);
        explicit.insert(k.to_string(), false);
    }
    merged.insert("reduced_a".to_string(), canonical::REDUCED_A.to_string());
    merged.insert("reduced_b".to_string(), canonical::REDUCED_B.to_string());
    explicit.insert("reduced_a".to_string(), false);
    explicit.insert("reduced_b".to_string(), false);

    if let Some((text, name)) = file {
        for (k, v) in parse_config(text, name)? {
            explicit.insert(k.clone(), true);
            merged.insert(k, v);
        }
    }
    for (k, v) in &flags.entries {
        if !KNOWN_KEYS.contains(k) {
            return Err(Error::Config(format!("unknown override key \"{k}\"")));
        }
        explicit.insert(k.to_string(), true);
        merged.insert(k.to_string(), v.clone());
    }

    let is_explicit = |key: &str| explicit.get(key).copied().unwrap_or(false);
    let get = |key: &str| merged.get(key).map(String::as_str);

    let capm_keys = ["capm.risk_free", "capm.beta", "capm.premium"];
    let capm_given = capm_keys.iter().filter(|k| get(k).is_some()).count();
    let discount = if capm_given > 0 {
        if is_explicit("discount_rate") {
            return Err(Error::Config(
                "discount_rate and capm.* are mutually exclusive; configure one of them".into(),
            ));
        }
        if capm_given < capm_keys.len() {
            return Err(Error::Config(
                "capm requires all three keys: capm.risk_free, capm.beta, capm.premium".into(),
            ));
        }
        capm_rate(CapmParams {
            risk_free: parse_f64("capm.risk_free", get("capm.risk_free").unwrap())?,
            beta: parse_f64("capm.beta", get("capm.beta").unwrap())?,
            market_premium: parse_f64("capm.premium", get("capm.premium").unwrap())?,
        })?
    } else {
        parse_f64("discount_rate", get("discount_rate").expect("default exists"))?
    };

    let v0 = parse_f64("v0", get("v0").expect("default exists"))?;
    let grid_spec = get("growth_grid").expect("default exists").to_string();
    let growth_grid = parse_growth_grid(&grid_spec)?;
    let horizon = parse_u32("horizon", get("horizon").expect("default exists"))?;
    let mode: GrowthMode = get("growth_mode").expect("default exists").parse()?;
    let cost_adjustment = parse_f64("cost_adjustment", get("cost_adjustment").expect("default exists"))?;
    let gdp0 = parse_f64("gdp0", get("gdp0").expect("default exists"))?;
    let gdp_growth = parse_f64("gdp_growth", get("gdp_growth").expect("default exists"))?;
    let tariff = parse_f64("tariff_usd_per_ton", get("tariff_usd_per_ton").expect("default exists"))?;

    let engine_name = get("engine").expect("default exists").to_ascii_lowercase();
    let mut calibrated_note: Option<(f64, f64)> = None;
    let engine = match engine_name.as_str() {
        "reduced" => EffectEngine::Reduced {
            a: parse_f64("reduced_a", get("reduced_a").expect("default exists"))?,
            b: parse_f64("reduced_b", get("reduced_b").expect("default exists"))?,
        },
        "structural" => {
            let cost0 = get("cost0").map(|v| parse_f64("cost0", v)).transpose()?;
            let asset_base = get("asset_base").map(|v| parse_f64("asset_base", v)).transpose()?;
            let (cost0, asset_base) = match (cost0, asset_base) {
                (Some(c), Some(a)) => (c, a),
                (None, None) => {
                    let result = calibrate_structural(
                        &canonical::structural_anchor_rows(),
                        tariff,
                        discount,
                        cost_adjustment,
                        v0,
                        horizon,
                        mode,
                    )?;
                    let pair = (
                        result.cost0.expect("structural calibration yields cost0"),
                        result.asset_base.expect("structural calibration yields asset_base"),
                    );
                    calibrated_note = Some(pair);
                    pair
                }
                _ => {
                    return Err(Error::Config(
                        "structural engine needs both cost0 and asset_base (or neither, to auto-calibrate)".into(),
                    ))
                }
            };
            EffectEngine::Structural { tariff, cost0, asset_base }
        }
        other => return Err(Error::Config(format!("unknown engine \"{other}\", expected reduced or structural"))),
    };

    let gdp = GdpProjection::new(gdp0, gdp_growth, horizon, discount)?;
    let scenario = ScenarioConfig { v0, growth_grid, horizon, mode, cost_adjustment, gdp, engine };
    scenario.validate()?;

    let mut settings: BTreeMap<String, String> = BTreeMap::new();
    settings.insert("v0".into(), v0.to_string());
    settings.insert("growth_grid".into(), grid_spec);
    settings.insert("horizon".into(), horizon.to_string());
    settings.insert("growth_mode".into(), mode.to_string());
    settings.insert("cost_adjustment".into(), cost_adjustment.to_string());
    settings.insert("gdp0".into(), gdp0.to_string());
    settings.insert("gdp_growth".into(), gdp_growth.to_string());
    settings.insert("discount_rate".into(), discount.to_string());
    settings.insert("engine".into(), engine_name);
    settings.insert("tariff_usd_per_ton".into(), tariff.to_string());
    match engine {
        EffectEngine::Reduced { a, b } => {
            settings.insert("reduced_a".into(), a.to_string());
            settings.insert("reduced_b".into(), b.to_string());
        }
        EffectEngine::Structural { cost0, asset_base, .. } => {
            settings.insert("cost0".into(), cost0.to_string());
            settings.insert("asset_base".into(), asset_base.to_string());
            if calibrated_note.is_some() {
                settings.insert("cost0_source".into(), "calibrated".into());
                settings.insert("asset_base_source".into(), "calibrated".into());
            }
        }
    }
    for k in capm_keys {
        if let Some(v) = get(k) {
            settings.insert(k.into(), v.to_string());
        }
    }
    Ok(Resolved { scenario, settings })
}
