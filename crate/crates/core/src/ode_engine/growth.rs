//! Tail asymptotics of numerical solutions.
//!
//! Two models are fitted on a log-uniform resampling of the window: a power
//! law `|ψ| ≈ C r^γ` (linear in `log r` after taking logs) and logarithmic
//! growth `ψ ≈ A log r + B`. A power fit cannot detect logarithmic growth by
//! its exponent alone, since the local exponent of `log r` is `1/log r`, which
//! is still 0.1–0.2 on practical windows; the two fits are compared instead.

use serde::{Deserialize, Serialize};

use super::trajectory::SolutionTrajectory;
use crate::error::{Error, Result};

const FIT_POINTS: usize = 201;
/// Largest relative RMS deviation for which `A log r + B` is accepted.
pub const LOG_FIT_THRESHOLD: f64 = 0.02;
/// Smallest change `|A| Δlog r / max|ψ|` for which the log term counts as
/// growth rather than a constant.
const LOG_SIGNIFICANCE: f64 = 0.1;
/// A clean power law above this exponent is never called logarithmic.
const LOG_MAX_EXPONENT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthKind {
    Power,
    Logarithmic,
    /// `ψ` vanishes or changes sign in the window.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub kind: GrowthKind,
    /// Slope of `log|ψ|` against `log r`.
    pub exponent: f64,
    /// `C` in `|ψ| ≈ C r^γ`.
    pub prefactor: f64,
    /// `A` in `ψ ≈ A log r + B`.
    pub log_coefficient: f64,
    /// `B` in `ψ ≈ A log r + B`.
    pub log_intercept: f64,
    pub fit_window: (f64, f64),
    /// RMS deviation of the selected model: in `log|ψ|` for power laws,
    /// relative to the RMS of `ψ` for logarithmic growth.
    pub residual: f64,
    /// Relative RMS deviation from `A log r + B`, whatever the selected model.
    pub log_fit_residual: f64,
}

impl GrowthEstimate {
    pub fn is_conclusive(&self) -> bool {
        self.kind != GrowthKind::Inconclusive
    }

    /// Whether the fitted model grows without bound; inconclusive fits never do.
    pub fn unbounded(&self, bounded_threshold: f64) -> bool {
        match self.kind {
            GrowthKind::Power => self.exponent > bounded_threshold,
            GrowthKind::Logarithmic => self.log_coefficient != 0.0,
            GrowthKind::Inconclusive => false,
        }
    }
}

struct LineFit {
    slope: f64,
    intercept: f64,
    rms_dev: f64,
}

fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    let len = x.len() as f64;
    let mx = x.iter().sum::<f64>() / len;
    let my = y.iter().sum::<f64>() / len;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    LineFit {
        slope,
        intercept,
        rms_dev: (ss / len).sqrt(),
    }
}

/// Fits power-law and logarithmic growth to `traj` over `window`.
pub fn growth_exponent(traj: &SolutionTrajectory, window: (f64, f64)) -> Result<GrowthEstimate> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi >= 10.0 * lo * (1.0 - 1e-12)) {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: format!("fit window must span at least one decade, got [{lo}, {hi}]"),
        });
    }
    if !traj.covers(lo, hi) {
        let (a, b) = traj.r_range();
        return Err(Error::Precondition(format!("fit window [{lo}, {hi}] is outside the trajectory range [{a}, {b}]")));
    }
    let (tl, th) = (lo.ln(), hi.ln());
    let mut ts = Vec::with_capacity(FIT_POINTS);
    let mut psi = Vec::with_capacity(FIT_POINTS);
    for i in 0..FIT_POINTS {
        let t = tl + (th - tl) * i as f64 / (FIT_POINTS - 1) as f64;
        let r = if i == 0 {
            lo
        } else if i == FIT_POINTS - 1 {
            hi
        } else {
            t.exp()
        };
        ts.push(t);
        psi.push(traj.interpolate(r).expect("window checked").0);
    }
    let sign_changes = psi.windows(2).any(|w| w[0].signum() != w[1].signum());
    let vanishes = psi.contains(&0.0);

    let nonzero: Vec<(f64, f64)> = ts.iter().zip(&psi).filter(|(_, v)| **v != 0.0).map(|(t, v)| (*t, v.abs().ln())).collect();
    let (lt, lpsi): (Vec<f64>, Vec<f64>) = nonzero.into_iter().unzip();
    let power = if lt.len() >= 2 {
        fit_line(&lt, &lpsi)
    } else {
        LineFit {
            slope: 0.0,
            intercept: f64::NEG_INFINITY,
            rms_dev: 0.0,
        }
    };
    let log = fit_line(&ts, &psi);
    let rms_psi = (psi.iter().map(|v| v * v).sum::<f64>() / psi.len() as f64).sqrt();
    let max_psi = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let log_residual = if rms_psi > 0.0 { log.rms_dev / rms_psi } else { 0.0 };
    let significance = if max_psi > 0.0 { log.slope.abs() * (th - tl) / max_psi } else { 0.0 };

    let kind = if sign_changes || vanishes {
        GrowthKind::Inconclusive
    } else if log_residual <= LOG_FIT_THRESHOLD && significance >= LOG_SIGNIFICANCE && power.slope < LOG_MAX_EXPONENT {
        GrowthKind::Logarithmic
    } else {
        GrowthKind::Power
    };
    Ok(GrowthEstimate {
        kind,
        exponent: power.slope,
        prefactor: power.intercept.exp(),
        log_coefficient: log.slope,
        log_intercept: log.intercept,
        fit_window: window,
        residual: match kind {
            GrowthKind::Logarithmic => log_residual,
            _ => power.rms_dev,
        },
        log_fit_residual: log_residual,
    })
}

/// "Bounded" as a numeric property: a power law with exponent at most
/// `threshold` on each of the two decades ending at `r_hi`.
pub fn bounded_on_tail(traj: &SolutionTrajectory, r_hi: f64, threshold: f64) -> Result<(bool, [GrowthEstimate; 2])> {
    let fits = [
        growth_exponent(traj, (r_hi / 100.0, r_hi / 10.0))?,
        growth_exponent(traj, (r_hi / 10.0, r_hi))?,
    ];
    let bounded = fits.iter().all(|g| g.kind == GrowthKind::Power && g.exponent <= threshold);
    Ok((bounded, fits))
}
