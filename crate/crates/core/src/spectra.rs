//! Bath excitation spectra: mode populations per unit detuning.

use num_complex::Complex64 as C64;

use crate::dynamics::AmplitudeState;
use crate::error::{invalid, Error, Result};
use crate::model::{rabi_frequency, structure_function, BathGrid, ModelParams};

/// Smallest coupling for which the strong-coupling spectrum formulas are used.
pub const STRONG_SPECTRUM_MIN_D: f64 = 4.0;

/// Half-width (γ units) of the running mean used to find spectral valleys.
const VALLEY_SMOOTHING: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    /// Instantaneous detunings δ + χt, ascending.
    pub detunings_now: Vec<f64>,
    /// S in units of 1/γ.
    pub values: Vec<f64>,
    pub t: f64,
}

impl SpectrumSeries {
    /// Trapezoidal ∫S dδ over the whole series.
    pub fn integral(&self) -> f64 {
        self.integral_from(f64::NEG_INFINITY)
    }

    /// Trapezoidal ∫S dδ over detunings ≥ `lower`.
    pub fn integral_from(&self, lower: f64) -> f64 {
        self.detunings_now
            .windows(2)
            .zip(self.values.windows(2))
            .filter(|(x, _)| x[0] >= lower)
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }

    /// S-weighted mean detuning over detunings ≥ `lower`.
    pub fn centroid_from(&self, lower: f64) -> f64 {
        let (mut m0, mut m1) = (0.0, 0.0);
        for (&x, &s) in self.detunings_now.iter().zip(&self.values) {
            if x >= lower {
                m0 += s;
                m1 += s * x;
            }
        }
        m1 / m0
    }

    /// Position of the tallest interior local maximum within `radius` of
    /// `target`, or `None` if the interval holds no local maximum.
    pub fn peak_near(&self, target: f64, radius: f64) -> Option<f64> {
        let x = &self.detunings_now;
        let s = &self.values;
        (1..x.len().saturating_sub(1))
            .filter(|&i| (x[i] - target).abs() <= radius)
            .filter(|&i| s[i] > s[i - 1] && s[i] >= s[i + 1])
            .max_by(|&a, &b| s[a].total_cmp(&s[b]))
            .map(|i| x[i])
    }

    fn smoothed(&self) -> Vec<f64> {
        let x = &self.detunings_now;
        let mut out = Vec::with_capacity(x.len());
        let (mut lo, mut hi, mut acc) = (0usize, 0usize, 0.0);
        for &xi in x {
            while hi < x.len() && x[hi] <= xi + VALLEY_SMOOTHING {
                acc += self.values[hi];
                hi += 1;
            }
            while x[lo] < xi - VALLEY_SMOOTHING {
                acc -= self.values[lo];
                lo += 1;
            }
            out.push(acc / (hi - lo) as f64);
        }
        out
    }
}

/// A spectral feature above resonance that no longer exchanges population
/// with the atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetachedPeak {
    /// Detuning of the (smoothed) maximum.
    pub position: f64,
    /// Detuning of the valley separating it from the resonant structure.
    pub valley: f64,
    /// ∫S dδ from the valley upwards.
    pub area: f64,
}

/// S_k = |c_k|²/Δω against the instantaneous detuning of each mode.
pub fn numeric_spectrum(state: &AmplitudeState, grid: &BathGrid, p: &ModelParams) -> Result<SpectrumSeries> {
    if state.c_modes.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: state.c_modes.len(),
        });
    }
    let sweep = p.chi() * state.t;
    let density = grid.density();
    Ok(SpectrumSeries {
        detunings_now: grid.detunings().iter().map(|d| d - grid.center() + sweep).collect(),
        values: state.c_modes.iter().map(|c| c.norm_sqr() * density).collect(),
        t: state.t,
    })
}

fn require_rabi(p: &ModelParams, min_d: f64) -> Result<f64> {
    if p.d() <= min_d {
        return Err(Error::Regime(format!(
            "strong-coupling spectrum needs d > {min_d}, got d = {}",
            p.d()
        )));
    }
    rabi_frequency(p)
}

/// Static-bath mode amplitude per √Δω, driven by c_a ≈ e^{−t/2} cos(Ωt/2),
/// so that |c|² is directly a spectral density.
pub fn static_ck(delta: f64, t: f64, p: &ModelParams) -> Result<C64> {
    let omega = require_rabi(p, 0.5)?;
    let g = structure_function(delta, p).sqrt();
    let term = |shift: f64| {
        let z = C64::new(delta + shift, 0.5);
        ((C64::i() * z * t).exp() - 1.0) / z
    };
    Ok(-0.5 * g * (term(-0.5 * omega) + term(0.5 * omega)))
}

/// Strong-coupling spectrum: two Rabi-split Lorentzians with transient
/// fringes plus the central term that follows the atomic population.
pub fn analytic_static_spectrum(delta: f64, t: f64, p: &ModelParams) -> Result<f64> {
    if t < 0.0 {
        return Err(invalid("t", format!("must be non-negative, got {t}")));
    }
    let omega = require_rabi(p, STRONG_SPECTRUM_MIN_D - f64::EPSILON)?;
    let decay = (-t).exp();
    let lobe = |x: f64| {
        0.25 / (std::f64::consts::PI * (x * x + 0.25))
            * (1.0 + decay - 2.0 * (-0.5 * t).exp() * (x * t).cos())
    };
    let central = decay * (0.5 * omega * t).sin().powi(2) / (std::f64::consts::PI * (delta * delta + 1.0));
    Ok(lobe(delta - 0.5 * omega) + lobe(delta + 0.5 * omega) + central)
}

/// Long-time limit of [`analytic_static_spectrum`]: the vacuum Rabi doublet.
pub fn long_time_spectrum(delta: f64, p: &ModelParams) -> Result<f64> {
    let omega = require_rabi(p, STRONG_SPECTRUM_MIN_D - f64::EPSILON)?;
    let lorentz = |x: f64| 0.5 / (x * x + 0.25);
    Ok((lorentz(delta - 0.5 * omega) + lorentz(delta + 0.5 * omega)) / (2.0 * std::f64::consts::PI))
}

/// The high-frequency feature of a chirped spectrum: tallest smoothed
/// maximum beyond Ω, integrated from the deepest smoothed valley between
/// it and Ω/2.
pub fn detached_peak(series: &SpectrumSeries, p: &ModelParams) -> Result<DetachedPeak> {
    let omega = require_rabi(p, 0.5)?;
    let smooth = series.smoothed();
    let x = &series.detunings_now;
    let peak = (0..x.len())
        .filter(|&i| x[i] > omega)
        .max_by(|&a, &b| smooth[a].total_cmp(&smooth[b]))
        .ok_or_else(|| Error::Fit("no spectrum beyond the Rabi splitting".into()))?;
    let valley = (0..peak)
        .filter(|&i| x[i] > 0.5 * omega)
        .min_by(|&a, &b| smooth[a].total_cmp(&smooth[b]))
        .ok_or_else(|| Error::Fit("high-frequency peak is not separated from resonance".into()))?;
    Ok(DetachedPeak {
        position: x[peak],
        valley: x[valley],
        area: series.integral_from(x[valley]),
    })
}
