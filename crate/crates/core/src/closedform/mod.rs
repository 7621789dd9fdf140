//! Analytic solutions and limits: the static exact and pseudomode dynamics,
//! weak-coupling rates, the high-chirp Markovian rate Γ∞ and the low-chirp
//! Rabi shift.

mod bessel;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use bessel::{bessel_k0i_abs2, j0_y0};

use crate::dynamics::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::model::{rabi_frequency, xi, ModelParams};
use crate::ode::{integrate, ComplexSystem, StepControl};

type C64 = Complex64;

/// Smallest chirp accepted by [`gamma_infinity_asymptotic`].
pub const ASYMPTOTIC_MIN_CHI: f64 = 10.0;
/// Validity gate of [`perturbed_rabi`].
pub const PERTURBED_RABI_MIN_D: f64 = 4.0;
pub const PERTURBED_RABI_MAX_XI: f64 = 0.2;

/// Exact static-reservoir amplitude e^{−t/2}[cos(Ωt/2) + sin(Ωt/2)/Ω].
pub fn static_exact_ca(t: f64, p: &ModelParams) -> Result<C64> {
    let omega = rabi_frequency(p)?;
    let half = 0.5 * omega * t;
    Ok(C64::new(
        (-0.5 * t).exp() * (half.cos() + half.sin() / omega),
        0.0,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudomodeState {
    pub t: f64,
    pub c_a: C64,
    pub b: C64,
}

struct Pseudomode {
    d: f64,
}

impl ComplexSystem for Pseudomode {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, _t: f64, y: &[C64], dy: &mut [C64]) {
        let mi = C64::new(0.0, -1.0);
        dy[0] = mi * self.d * y[1];
        dy[1] = mi * self.d * y[0] - y[1];
    }
}

/// Integrates the atom/pseudomode pair for a static Lorentzian reservoir,
/// sampling every `min(0.01, t_end/100)`.
pub fn pseudomode_solve(p: &ModelParams, t_end: f64, tol: f64) -> Result<Vec<PseudomodeState>> {
    pseudomode_solve_sampled(p, t_end, tol, (0.01_f64).min(t_end / 100.0))
}

pub fn pseudomode_solve_sampled(
    p: &ModelParams,
    t_end: f64,
    tol: f64,
    sample_every: f64,
) -> Result<Vec<PseudomodeState>> {
    if p.chi() != 0.0 {
        return Err(Error::Regime(format!(
            "the pseudomode pair describes the static reservoir only, got chi = {}",
            p.chi()
        )));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(invalid("t_end", format!("must be > 0, got {t_end}")));
    }
    let ctl = StepControl {
        rel_tol: tol,
        abs_tol: tol * 1e-2,
        max_step: 0.1,
        min_step: 0.0,
        max_steps: 10_000_000,
    };
    let y0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let mut out = Vec::new();
    integrate(&Pseudomode { d: p.d() }, 0.0, &y0, t_end, sample_every, &ctl, |t, y| {
        out.push(PseudomodeState {
            t,
            c_a: y[0],
            b: y[1],
        })
    })?;
    Ok(out)
}

/// pa series of a pseudomode run, for use with the analysis helpers.
pub fn pseudomode_trajectory(states: &[PseudomodeState]) -> Trajectory {
    Trajectory {
        times: states.iter().map(|s| s.t).collect(),
        pa: states.iter().map(|s| s.c_a.norm_sqr()).collect(),
        ..Default::default()
    }
}

/// Weak-coupling time-dependent decay rate 2d²(1 − e^{−t}).
pub fn weak_gamma_t(t: f64, p: &ModelParams) -> f64 {
    2.0 * p.d() * p.d() * (1.0 - (-t).exp())
}

/// Markovian decay rate under chirp: Γ∞ = d²|K₀(i/4χ)|²/(πχ).
pub fn gamma_infinity(p: &ModelParams) -> Result<f64> {
    let chi = p.chi();
    if !(chi > 0.0) {
        return Err(invalid(
            "chi",
            format!("Γ∞ needs chi > 0 (the static limit is 2d²), got {chi}"),
        ));
    }
    let x = 4.0 * chi;
    let k2 = bessel_k0i_abs2(1.0 / x)?;
    Ok(2.0 * p.d() * p.d() * (2.0 * k2 / (PI * x)))
}

/// Large-chirp form d² (ln 4χ)² / (πχ).
pub fn gamma_infinity_asymptotic(p: &ModelParams) -> Result<f64> {
    let chi = p.chi();
    if !(chi >= ASYMPTOTIC_MIN_CHI) {
        return Err(Error::Regime(format!(
            "large-chirp expansion needs chi >= {ASYMPTOTIC_MIN_CHI}, got {chi}"
        )));
    }
    Ok(p.d() * p.d() * (4.0 * chi).ln().powi(2) / (PI * chi))
}

/// Markovian amplitude e^{−Γ∞ t/2}.
pub fn markovian_ca(t: f64, p: &ModelParams) -> Result<f64> {
    Ok((-0.5 * gamma_infinity(p)? * t).exp())
}

/// Low-chirp Rabi frequency Ω′ = Ω(1 + χ²/4Ω²) and the phase drift
/// accumulated over one decay time, (χ²/4Ω²)Ω.
pub fn perturbed_rabi(p: &ModelParams) -> Result<(f64, f64)> {
    if p.d() < PERTURBED_RABI_MIN_D {
        return Err(Error::Regime(format!(
            "perturbed Rabi frequency needs d >= {PERTURBED_RABI_MIN_D}, got d = {}",
            p.d()
        )));
    }
    let x = xi(p)?;
    if x.abs() > PERTURBED_RABI_MAX_XI {
        return Err(Error::Regime(format!(
            "perturbed Rabi frequency needs xi <= {PERTURBED_RABI_MAX_XI}, got xi = {x:.4}"
        )));
    }
    let omega = rabi_frequency(p)?;
    let rel = p.chi() * p.chi() / (4.0 * omega * omega);
    Ok((omega * (1.0 + rel), rel * omega))
}

/// Weak-coupling rate with its leading chirp correction, 2d²(1 − 2χ²).
pub fn weak_lowchirp_gamma(p: &ModelParams) -> f64 {
    2.0 * p.d() * p.d() * (1.0 - 2.0 * p.chi() * p.chi())
}
