//! Observables extracted from trajectories: regime labels, decay rates,
//! Rabi frequencies, and the laboratory-to-model unit mapping.

use std::f64::consts::PI;
use std::fmt;

use crate::dynamics::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::model::{xi, ModelParams};

/// Coupling is critical within this distance of d = 1/2.
pub const CRITICAL_TOLERANCE: f64 = 1e-9;
/// ξ at or below this is low chirp.
pub const LOW_CHIRP_MAX_XI: f64 = 0.2;
/// ξ at or above this is high chirp.
pub const HIGH_CHIRP_MIN_XI: f64 = 10.0;
/// Fits with a larger rms log-residual are flagged as non-exponential.
pub const NON_EXPONENTIAL_RMS: f64 = 0.5;
/// Fewest points accepted by [`fit_decay`].
pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingClass {
    Weak,
    Critical,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChirpClass {
    Static,
    Low,
    Intermediate,
    High,
    NotApplicable,
}

impl fmt::Display for CouplingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Weak => "weak",
            Self::Critical => "critical",
            Self::Strong => "strong",
        })
    }
}

impl fmt::Display for ChirpClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Static => "static",
            Self::Low => "low",
            Self::Intermediate => "intermediate",
            Self::High => "high",
            Self::NotApplicable => "not-applicable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub coupling: CouplingClass,
    pub chirp: ChirpClass,
    /// Present exactly when coupling is strong.
    pub xi: Option<f64>,
}

pub fn classify(p: &ModelParams) -> RegimeReport {
    let d = p.d();
    if (d - 0.5).abs() <= CRITICAL_TOLERANCE {
        return RegimeReport {
            coupling: CouplingClass::Critical,
            chirp: ChirpClass::NotApplicable,
            xi: None,
        };
    }
    if d < 0.5 {
        return RegimeReport {
            coupling: CouplingClass::Weak,
            chirp: ChirpClass::NotApplicable,
            xi: None,
        };
    }
    let x = xi(p).expect("strong coupling has a Rabi frequency");
    let chirp = match x.abs() {
        _ if p.chi() == 0.0 => ChirpClass::Static,
        a if a <= LOW_CHIRP_MAX_XI => ChirpClass::Low,
        a if a >= HIGH_CHIRP_MIN_XI => ChirpClass::High,
        _ => ChirpClass::Intermediate,
    };
    RegimeReport {
        coupling: CouplingClass::Strong,
        chirp,
        xi: Some(x),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMode {
    /// Every sample in the window.
    Direct,
    /// Local maxima of pa only, for oscillating data.
    UpperEnvelope,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Γ in units of γ.
    pub rate: f64,
    /// ln pa at t = 0 on the fitted line.
    pub intercept: f64,
    /// Root-mean-square residual of ln pa.
    pub rms_residual: f64,
    pub window: (f64, f64),
    pub points: usize,
}

impl DecayFit {
    pub fn is_non_exponential(&self) -> bool {
        self.rms_residual > NON_EXPONENTIAL_RMS
    }
}

/// Vertex of the parabola through three equally spaced samples, as
/// (offset in units of the spacing, value).
fn parabolic_vertex(y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let curv = y0 - 2.0 * y1 + y2;
    if curv == 0.0 {
        return (0.0, y1);
    }
    let off = 0.5 * (y0 - y2) / curv;
    (off, y1 - 0.25 * (y0 - y2) * off)
}

/// Interior local extrema of `ys`, refined by parabolic interpolation when
/// the sampling is locally uniform. `maxima` selects the kind.
fn extrema(ts: &[f64], ys: &[f64], maxima: bool) -> Vec<(f64, f64)> {
    let sign = if maxima { 1.0 } else { -1.0 };
    let mut out = Vec::new();
    for i in 1..ts.len().saturating_sub(1) {
        let (a, b, c) = (sign * ys[i - 1], sign * ys[i], sign * ys[i + 1]);
        if b > a && b >= c {
            let h0 = ts[i] - ts[i - 1];
            let h1 = ts[i + 1] - ts[i];
            if ((h1 - h0) / h0).abs() < 1e-6 {
                let (off, v) = parabolic_vertex(a, b, c);
                out.push((ts[i] + off * h0, sign * v));
            } else {
                out.push((ts[i], ys[i]));
            }
        }
    }
    out
}

/// Interior local minima of pa as (t, pa), parabolically refined.
pub fn pa_minima(traj: &Trajectory) -> Vec<(f64, f64)> {
    extrema(&traj.times, &traj.pa, false)
}

/// Interior local maxima of pa as (t, pa), parabolically refined.
pub fn pa_maxima(traj: &Trajectory) -> Vec<(f64, f64)> {
    extrema(&traj.times, &traj.pa, true)
}

fn line_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// Least-squares line through ln pa on `window`; rate = −slope.
pub fn fit_decay(traj: &Trajectory, window: (f64, f64), mode: FitMode) -> Result<DecayFit> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(invalid("window", format!("empty window ({lo}, {hi})")));
    }
    let samples: Vec<(f64, f64)> = match mode {
        FitMode::Direct => traj
            .times
            .iter()
            .zip(&traj.pa)
            .map(|(&t, &pa)| (t, pa))
            .filter(|&(t, _)| t >= lo && t <= hi)
            .collect(),
        FitMode::UpperEnvelope => extrema(&traj.times, &traj.pa, true)
            .into_iter()
            .filter(|&(t, _)| t >= lo && t <= hi)
            .collect(),
    };
    if samples.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "need at least {MIN_FIT_POINTS} points in ({lo}, {hi}), got {}",
            samples.len()
        )));
    }
    if let Some(&(t, pa)) = samples.iter().find(|s| s.1 <= 0.0) {
        return Err(Error::Fit(format!("non-positive pa {pa:e} at t = {t}")));
    }
    let logs: Vec<(f64, f64)> = samples.iter().map(|&(t, pa)| (t, pa.ln())).collect();
    let (slope, intercept, rms_residual) = line_fit(&logs);
    Ok(DecayFit {
        rate: -slope,
        intercept,
        rms_residual,
        window,
        points: samples.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiMeasurement {
    /// Angular frequency in units of γ.
    pub omega: f64,
    /// Standard error propagated from the spread of minimum spacings.
    pub uncertainty: f64,
    pub minima: usize,
}

/// Rabi frequency from the spacing of pa minima: |c_a|² returns to its
/// minimum once per Rabi period, so Ω = 2π / mean spacing.
pub fn extract_rabi(traj: &Trajectory) -> Result<RabiMeasurement> {
    let minima = extrema(&traj.times, &traj.pa, false);
    if minima.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 minima of pa, got {}", minima.len())));
    }
    let gaps: Vec<f64> = minima.windows(2).map(|w| w[1].0 - w[0].0).collect();
    let n = gaps.len() as f64;
    let mean = gaps.iter().sum::<f64>() / n;
    let var = if gaps.len() > 1 {
        gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let omega = 2.0 * PI / mean;
    Ok(RabiMeasurement {
        omega,
        uncertainty: omega * (var / n).sqrt() / mean,
        minima: minima.len(),
    })
}

/// Chirp (s⁻²) produced by a cavity mirror moving at `length_rate_si` (m/s):
/// every mode frequency scales as 1/L.
pub fn mirror_chirp(omega0_si: f64, cavity_length_si: f64, length_rate_si: f64) -> Result<f64> {
    if !(cavity_length_si > 0.0) {
        return Err(invalid(
            "cavity_length_si",
            format!("must be positive, got {cavity_length_si}"),
        ));
    }
    Ok(-(omega0_si / cavity_length_si) * length_rate_si)
}

/// SI rate (s⁻¹) or angular frequency to units of γ.
pub fn rate_to_gamma_units(rate_si: f64, gamma_si: f64) -> f64 {
    rate_si / gamma_si
}

/// Units of γ back to SI.
pub fn rate_from_gamma_units(rate: f64, gamma_si: f64) -> f64 {
    rate * gamma_si
}

/// SI chirp (s⁻²) to units of γ².
pub fn chirp_to_gamma_units(chi_si: f64, gamma_si: f64) -> f64 {
    chi_si / (gamma_si * gamma_si)
}

/// Units of γ² back to SI.
pub fn chirp_from_gamma_units(chi: f64, gamma_si: f64) -> f64 {
    chi * gamma_si * gamma_si
}
