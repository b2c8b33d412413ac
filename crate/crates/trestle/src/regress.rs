//! Ordinary least squares for one regressor, via the closed-form
//! normal equations.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n: usize,
    /// y - (intercept + slope x), observation order.
    pub residuals: Vec<f64>,
}

impl OlsFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    pub fn residual_max(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// Fits y = intercept + slope x.
///
/// Degenerate designs (fewer than two points, or zero x-variance) are
/// calibration errors. A constant y is fine: slope 0 with r2 = 1 when
/// the fit is exact, else 0, since explained variance is meaningless
/// without variance.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<OlsFit> {
    if x.len() != y.len() {
        return Err(Error::Calibration(format!("ols: {} x values vs {} y values", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::Calibration(format!("ols: need at least 2 points, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Calibration("ols: inputs must be finite".into()));
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mean_x).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mean_x) * (yi - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::Calibration("ols: zero variance in x, slope is unidentified".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(xi, yi)| yi - (intercept + slope * xi)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = y.iter().map(|yi| (yi - mean_y).powi(2)).sum();
    // Constant y leaves ss_tot at float dust; compare against the
    // data's own scale rather than literal zero.
    let tot_floor = f64::EPSILON * n * (1.0 + mean_y * mean_y);
    let r2 = if ss_tot <= tot_floor {
        if ss_res <= tot_floor {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(OlsFit { slope, intercept, r2, n: x.len(), residuals })
}
