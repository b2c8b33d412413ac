//! Analytics for the Georgian Railway freight series: compound annual
//! growth, railway value added as a share of GDP, and a discounted
//! economic-effect scenario matrix mapping freight growth rates to GDP
//! shares.
//!
//! The crate is organized as a small pipeline:
//!
//! - [`data`] parses and validates the bundled freight and GDP tables;
//! - [`growth`] computes CAGR and GDP-share tables;
//! - [`valuation`] prices cash flows (CAPM, NPV, GDP projections, EVA);
//! - [`scenario`] assembles the growth-rate matrix and calibrates the
//!   unpublished parameters behind it;
//! - [`regress`] is the least-squares helper shared by calibration and
//!   the `regress` subcommand;
//! - [`canonical`] pins the published reference figures and baseline
//!   parameters the reports annotate against;
//! - [`config`], [`report`], [`manifest`], and [`cli`] wire the
//!   pipeline to files, formats, and the command line.
//!
//! Computation never rounds; rendering rounds half away from zero at
//! the precision each published column uses. Reports embed a run
//! manifest (tool version, input digests, resolved settings) and are
//! byte-identical across repeated runs on the same inputs.

pub mod canonical;
pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod growth;
pub mod manifest;
pub mod regress;
pub mod report;
pub mod scenario;
pub mod valuation;
