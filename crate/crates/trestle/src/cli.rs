//! Command-line surface: argument definitions and dispatch into the
//! library. Every subcommand returns the rendered report as a string;
//! `main` owns printing and process exit codes.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::canonical;
use crate::config::{self, Overrides};
use crate::data;
use crate::error::{Error, Result};
use crate::growth;
use crate::manifest::RunManifest;
use crate::regress::ols_fit;
use crate::report::{self, Format, NegativeStyle};
use crate::scenario::{self, CalibrationResult, GrowthMode};
use crate::valuation::{self, EvaParams};

#[derive(Debug, Parser)]
#[command(
    name = "trestle",
    version,
    about = "Freight growth, GDP share, and discounted-effect analytics for the Georgian Railway series"
)]
pub struct Cli {
    /// Output format for every report.
    #[arg(long, global = true, value_enum, default_value = "markdown")]
    pub format: FormatArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Markdown,
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Markdown => Format::Markdown,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NegativesArg {
    Parens,
    Minus,
}

impl From<NegativesArg> for NegativeStyle {
    fn from(n: NegativesArg) -> NegativeStyle {
        match n {
            NegativesArg::Parens => NegativeStyle::Parens,
            NegativesArg::Minus => NegativeStyle::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhatArg {
    /// Discount rate implied by the published GDP present value.
    Discount,
    /// Reduced-form effect line a + b*g over the published rows.
    Reduced,
    /// Structural cost0 and asset_base from two anchor rows.
    Structural,
    /// All of the above in one pass.
    All,
}

fn what_name(what: WhatArg) -> &'static str {
    match what {
        WhatArg::Discount => "discount",
        WhatArg::Reduced => "reduced",
        WhatArg::Structural => "structural",
        WhatArg::All => "all",
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compound annual growth for every volume and revenue series.
    Cagr {
        /// Freight table: a category column followed by year columns.
        file: PathBuf,
    },
    /// Railway value added as a share of GDP, year by year.
    GdpShare {
        /// GDP table: year, railway_value_added, gdp_market_prices.
        file: PathBuf,
    },
    /// Check that component series sum to the printed totals.
    Validate {
        file: PathBuf,
        /// Largest acceptable |total - component sum|.
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        tolerance: f64,
    },
    /// Build the growth-to-GDP-share scenario matrix.
    Matrix(Box<MatrixArgs>),
    /// Recover unpublished parameters from the published figures.
    Calibrate {
        /// Calibration target; only "table3" is known.
        #[arg(long, default_value = "table3")]
        target: String,
        /// Which parameters to recover.
        #[arg(long, value_enum, default_value = "all")]
        what: WhatArg,
    },
    /// Ordinary least squares of one table column on another.
    Regress {
        /// Regressor column: header, alias, or 1-based index.
        #[arg(long)]
        x: String,
        /// Response column: header, alias, or 1-based index.
        #[arg(long)]
        y: String,
        /// Delimited numeric table, e.g. a matrix CSV.
        file: PathBuf,
        #[arg(long, default_value_t = ',')]
        delimiter: char,
    },
}

/// Scenario overrides. Values stay strings here; resolution parses
/// them so file keys and flags share one error surface.
#[derive(Debug, clap::Args)]
pub struct MatrixArgs {
    /// Scenario config file (key = value lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Base-year volume, million tons.
    #[arg(long, allow_negative_numbers = true)]
    pub v0: Option<String>,
    /// Growth grid: "start:end:step" or a comma list of rates.
    #[arg(long, allow_negative_numbers = true)]
    pub grid: Option<String>,
    /// Projection horizon in years.
    #[arg(long)]
    pub horizon: Option<String>,
    /// Volume path: simple or compound.
    #[arg(long)]
    pub mode: Option<String>,
    /// Annual cost adjustment as a decimal rate.
    #[arg(long, allow_negative_numbers = true)]
    pub cost_adjustment: Option<String>,
    /// Base-year GDP, million GEL.
    #[arg(long, allow_negative_numbers = true)]
    pub gdp0: Option<String>,
    /// Annual GDP growth as a decimal rate.
    #[arg(long, allow_negative_numbers = true)]
    pub gdp_growth: Option<String>,
    /// Discount rate; mutually exclusive with the CAPM triple.
    #[arg(long, allow_negative_numbers = true)]
    pub discount_rate: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub capm_risk_free: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub capm_beta: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub capm_premium: Option<String>,
    /// Effect engine: reduced or structural.
    #[arg(long)]
    pub engine: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub reduced_a: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub reduced_b: Option<String>,
    /// Flat tariff, USD per ton.
    #[arg(long, allow_negative_numbers = true)]
    pub tariff: Option<String>,
    /// Base-period operating cost for the structural engine.
    #[arg(long, allow_negative_numbers = true)]
    pub cost0: Option<String>,
    /// Capital employed for the structural engine.
    #[arg(long, allow_negative_numbers = true)]
    pub asset_base: Option<String>,
    /// Negative money cells: accounting parens or a minus sign.
    #[arg(long, value_enum, default_value = "parens")]
    pub negatives: NegativesArg,
}

fn matrix_overrides(args: &MatrixArgs) -> Overrides {
    let mut flags = Overrides::default();
    flags.set("v0", args.v0.clone());
    flags.set("growth_grid", args.grid.clone());
    flags.set("horizon", args.horizon.clone());
    flags.set("growth_mode", args.mode.clone());
    flags.set("cost_adjustment", args.cost_adjustment.clone());
    flags.set("gdp0", args.gdp0.clone());
    flags.set("gdp_growth", args.gdp_growth.clone());
    flags.set("discount_rate", args.discount_rate.clone());
    flags.set("capm.risk_free", args.capm_risk_free.clone());
    flags.set("capm.beta", args.capm_beta.clone());
    flags.set("capm.premium", args.capm_premium.clone());
    flags.set("engine", args.engine.clone());
    flags.set("reduced_a", args.reduced_a.clone());
    flags.set("reduced_b", args.reduced_b.clone());
    flags.set("tariff_usd_per_ton", args.tariff.clone());
    flags.set("cost0", args.cost0.clone());
    flags.set("asset_base", args.asset_base.clone());
    flags
}

pub fn run(cli: Cli) -> Result<String> {
    let format: Format = cli.format.into();
    match cli.command {
        Command::Cagr { file } => {
            let (name, text) = read_input(&file)?;
            let ds = data::parse_freight_table(&text, &name, ',')?;
            let rows = growth::cagr_report(&ds)?;
            let mut manifest = RunManifest::new("cagr", &format.to_string());
            manifest.add_input(&name, text.as_bytes());
            Ok(report::render_cagr(&rows, format, &manifest))
        }
        Command::GdpShare { file } => {
            let (name, text) = read_input(&file)?;
            let gs = data::parse_gdp_table(&text, &name, ',')?;
            let rows = growth::gdp_share_table(&gs);
            let mut manifest = RunManifest::new("gdp-share", &format.to_string());
            manifest.add_input(&name, text.as_bytes());
            Ok(report::render_shares(&rows, format, &manifest))
        }
        Command::Validate { file, tolerance } => {
            let (name, text) = read_input(&file)?;
            let ds = data::parse_freight_table(&text, &name, ',')?;
            let rep = data::validate_components(&ds, tolerance)?;
            let mut manifest = RunManifest::new("validate", &format.to_string());
            manifest.add_input(&name, text.as_bytes());
            manifest.set("tolerance", tolerance);
            Ok(report::render_validation(&rep, format, &manifest))
        }
        Command::Matrix(args) => run_matrix(&args, format),
        Command::Calibrate { target, what } => run_calibrate(&target, what, format),
        Command::Regress { x, y, file, delimiter } => {
            let (name, text) = read_input(&file)?;
            let table = data::parse_table(&text, &name, delimiter)?;
            let xi = table.resolve_column(&x)?;
            let yi = table.resolve_column(&y)?;
            let fit = ols_fit(table.column(xi), table.column(yi))?;
            let mut manifest = RunManifest::new("regress", &format.to_string());
            manifest.add_input(&name, text.as_bytes());
            manifest.set("x", &x);
            manifest.set("y", &y);
            manifest.set("delimiter", delimiter);
            Ok(report::render_ols(&fit, format, &manifest))
        }
    }
}

fn run_matrix(args: &MatrixArgs, format: Format) -> Result<String> {
    let flags = matrix_overrides(args);
    let file_text = match &args.config {
        Some(path) => {
            let (name, text) = read_input(path)?;
            Some((name, text))
        }
        None => None,
    };
    let resolved = config::resolve(file_text.as_ref().map(|(n, t)| (t.as_str(), n.as_str())), &flags)?;
    let rows = scenario::build_matrix(&resolved.scenario)?;

    let mut manifest = RunManifest::new("matrix", &format.to_string());
    if let Some((name, text)) = &file_text {
        manifest.add_input(name, text.as_bytes());
    }
    manifest.extend(&resolved.settings);
    manifest.set(
        "negatives",
        match args.negatives {
            NegativesArg::Parens => "parens",
            NegativesArg::Minus => "minus",
        },
    );
    Ok(report::render_matrix(&rows, args.negatives.into(), format, &manifest))
}

fn run_calibrate(target: &str, what: WhatArg, format: Format) -> Result<String> {
    if target != "table3" {
        return Err(Error::Config(format!("unknown calibration target \"{target}\"; known targets: table3")));
    }
    let mode: GrowthMode = canonical::GROWTH_MODE.parse()?;
    let implied = valuation::implied_discount(
        canonical::GDP0,
        canonical::GDP_GROWTH,
        canonical::HORIZON,
        canonical::GDP_PV_TARGET,
    )?;

    let mut result = CalibrationResult::default();
    if matches!(what, WhatArg::Discount | WhatArg::Structural | WhatArg::All) {
        result.implied_discount = Some(implied);
    }
    if matches!(what, WhatArg::Discount) {
        let proj = valuation::GdpProjection::new(canonical::GDP0, canonical::GDP_GROWTH, canonical::HORIZON, implied)?;
        result.residual_max = Some((valuation::gdp_pv(&proj)? - canonical::GDP_PV_TARGET).abs());
    }
    if matches!(what, WhatArg::Reduced | WhatArg::All) {
        let reduced = scenario::calibrate_reduced(&canonical::published_effect_rows())?;
        result.reduced_a = reduced.reduced_a;
        result.reduced_b = reduced.reduced_b;
        result.fit_r2 = reduced.fit_r2;
        if matches!(what, WhatArg::Reduced) {
            result.residual_max = reduced.residual_max;
        }
    }
    if matches!(what, WhatArg::Structural | WhatArg::All) {
        let structural = scenario::calibrate_structural(
            &canonical::structural_anchor_rows(),
            canonical::TARIFF_USD_PER_TON,
            implied,
            canonical::COST_ADJUSTMENT,
            canonical::V0,
            canonical::HORIZON,
            mode,
        )?;
        result.cost0 = structural.cost0;
        result.asset_base = structural.asset_base;
        // The acceptance bar is the worst deviation over every
        // published row, not just the two anchors the fit used.
        let params = EvaParams {
            tariff: canonical::TARIFF_USD_PER_TON,
            cost0: structural.cost0.expect("structural fit yields cost0"),
            cost_adjustment: canonical::COST_ADJUSTMENT,
            asset_base: structural.asset_base.expect("structural fit yields asset_base"),
            discount: implied,
            base_volume: canonical::V0,
        };
        result.residual_max = Some(scenario::structural_residual_max(
            &params,
            canonical::V0,
            canonical::HORIZON,
            mode,
            &canonical::published_effect_rows(),
        )?);
    }

    let mut manifest = RunManifest::new("calibrate", &format.to_string());
    manifest.set("target", target);
    manifest.set("what", what_name(what));
    manifest.set("v0", canonical::V0);
    manifest.set("growth_mode", canonical::GROWTH_MODE);
    manifest.set("horizon", canonical::HORIZON);
    manifest.set("cost_adjustment", canonical::COST_ADJUSTMENT);
    manifest.set("tariff_usd_per_ton", canonical::TARIFF_USD_PER_TON);
    manifest.set("gdp0", canonical::GDP0);
    manifest.set("gdp_growth", canonical::GDP_GROWTH);
    manifest.set("gdp_pv_target", canonical::GDP_PV_TARGET);
    manifest.set("anchors", format!("{:?}", canonical::STRUCTURAL_ANCHOR_RATES));
    Ok(report::render_calibration(&result, format, &manifest))
}

fn read_input(path: &Path) -> Result<(String, String)> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: name.clone(), source })?;
    Ok((name, text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_flag_is_global() {
        let cli = Cli::try_parse_from(["trestle", "cagr", "f.csv", "--format", "json"]).unwrap();
        assert_eq!(cli.format, FormatArg::Json);
        let cli = Cli::try_parse_from(["trestle", "cagr", "f.csv"]).unwrap();
        assert_eq!(cli.format, FormatArg::Markdown);
    }

    #[test]
    fn unknown_format_is_a_usage_error() {
        assert!(Cli::try_parse_from(["trestle", "--format", "yaml", "cagr", "f.csv"]).is_err());
    }

    #[test]
    fn matrix_flags_map_to_config_keys() {
        let cli = Cli::try_parse_from([
            "trestle",
            "matrix",
            "--v0",
            "10.7",
            "--grid",
            "0.01:0.03:0.01",
            "--mode",
            "compound",
            "--tariff",
            "12",
        ])
        .unwrap();
        let Command::Matrix(args) = cli.command else {
            panic!("expected matrix");
        };
        let flags = matrix_overrides(&args);
        let keys: Vec<&str> = flags.entries.iter().map(|(k, _)| *k).collect();
        assert_eq!(keys, ["v0", "growth_grid", "growth_mode", "tariff_usd_per_ton"]);
        assert_eq!(flags.entries[3].1, "12");
    }

    #[test]
    fn calibrate_rejects_unknown_targets() {
        let err = run_calibrate("table9", WhatArg::All, Format::Markdown).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn calibrate_all_fills_every_field() {
        let out = run_calibrate("table3", WhatArg::All, Format::Csv).unwrap();
        for field in ["reduced_a", "reduced_b", "fit_r2", "implied_discount", "cost0", "asset_base", "residual_max"] {
            assert!(out.contains(field), "missing {field} in:\n{out}");
        }
    }
}
