//! Discrete-bath amplitude equations in the single-excitation sector.
//!
//! The atom amplitude couples to each mode through the real coupling g_k(t)
//! and the closed-form phase δ_k t + χt²/2:
//!
//! ```text
//! dc_a/dt = −i Σ_k g_k(t) e^{−iφ_k(t)} c_k
//! dc_k/dt = −i g_k(t) e^{+iφ_k(t)} c_a
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::{BathGrid, ModelParams, MIN_EDGE_HALF_WIDTHS};
use crate::ode::{integrate, ComplexSystem, StepControl};

type C64 = Complex64;

/// Mode phases are recomputed exactly every this many modes; in between they
/// are advanced by complex multiplication.
const PHASE_RESEED: usize = 128;

/// A grid edge closer to resonance than this (in half-widths) during a run
/// is a coverage violation. Half a half-width of slack below the floor that
/// `build_grid` guarantees.
pub const COVERAGE_LIMIT: f64 = MIN_EDGE_HALF_WIDTHS - 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState {
    pub t: f64,
    pub c_a: C64,
    pub c_modes: Vec<C64>,
}

impl AmplitudeState {
    pub fn pa(&self) -> f64 {
        self.c_a.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub sample_every: f64,
    /// Keep a full snapshot at every sample time.
    pub keep_states: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: 0.01,
            sample_every: 0.01,
            keep_states: false,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("sample_every", self.sample_every),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Excited-state probability |c_a|².
    pub pa: Vec<f64>,
    /// Total excitation probability; empty when the solver has no bath.
    pub norm: Vec<f64>,
    pub states: Option<Vec<AmplitudeState>>,
    pub final_state: Option<AmplitudeState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Linear interpolation of pa at `t` (clamped to the sampled range).
    pub fn pa_at(&self, t: f64) -> f64 {
        interp(&self.times, &self.pa, t)
    }
}

pub(crate) fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    match xs.partition_point(|&v| v < x) {
        0 => ys[0],
        i if i >= xs.len() => ys[ys.len() - 1],
        i => {
            let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            ys[i - 1] * (1.0 - w) + ys[i] * w
        }
    }
}

/// Atom excited, bath empty, t = 0.
pub fn init_state(grid: &BathGrid) -> AmplitudeState {
    AmplitudeState {
        t: 0.0,
        c_a: C64::new(1.0, 0.0),
        c_modes: vec![C64::new(0.0, 0.0); grid.len()],
    }
}

/// |c_a|² + Σ|c_k|².
pub fn norm(state: &AmplitudeState) -> f64 {
    state.c_a.norm_sqr() + state.c_modes.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

struct DiscreteBath<'a> {
    grid: &'a BathGrid,
    chi: f64,
    /// √(Δω d²/π): g_k = prefactor / √(1 + δ_now²).
    prefactor: f64,
}

impl ComplexSystem for DiscreteBath<'_> {
    fn dim(&self) -> usize {
        self.grid.len() + 1
    }

    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]) {
        let det = self.grid.detunings();
        let center = self.grid.center();
        let step = C64::cis(self.grid.spacing() * t);
        let sweep = self.chi * t;
        let chirp_phase = 0.5 * self.chi * t * t;
        let c_a = y[0];
        let mut acc = C64::new(0.0, 0.0);
        let mut rot = C64::new(1.0, 0.0);
        for (k, ((&d, &c_k), dc_k)) in det.iter().zip(&y[1..]).zip(&mut dy[1..]).enumerate() {
            let rel = d - center;
            if k % PHASE_RESEED == 0 {
                rot = C64::cis(rel * t + chirp_phase);
            } else {
                rot *= step;
            }
            let now = rel + sweep;
            let g = self.prefactor / (1.0 + now * now).sqrt();
            // e^{-iφ} c_k accumulates into the atom; e^{+iφ} c_a drives the mode.
            acc += rot.conj() * c_k * g;
            let drive = rot * c_a * g;
            *dc_k = C64::new(drive.im, -drive.re);
        }
        dy[0] = C64::new(acc.im, -acc.re);
    }
}

/// Checks that the grid keeps both edges away from resonance on `[t0, t1]`.
pub fn check_coverage(grid: &BathGrid, p: &ModelParams, t0: f64, t1: f64) -> Result<()> {
    let (lo, hi) = grid.window();
    for t in [t0, t1] {
        let low_edge = lo + p.chi() * t;
        let high_edge = hi + p.chi() * t;
        if low_edge > -COVERAGE_LIMIT {
            return Err(Error::GridCoverage { t, edge: -low_edge });
        }
        if high_edge < COVERAGE_LIMIT {
            return Err(Error::GridCoverage { t, edge: high_edge });
        }
    }
    Ok(())
}

/// Advances `state` to `t_end` on `grid`.
pub fn evolve(
    state: &AmplitudeState,
    grid: &BathGrid,
    p: &ModelParams,
    cfg: &IntegratorConfig,
    t_end: f64,
) -> Result<Trajectory> {
    cfg.validate()?;
    if state.c_modes.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: state.c_modes.len(),
        });
    }
    if !(t_end > state.t) {
        return Err(invalid(
            "t_end",
            format!("must exceed the state time {}, got {t_end}", state.t),
        ));
    }
    check_coverage(grid, p, state.t, t_end)?;

    let sys = DiscreteBath {
        grid,
        chi: p.chi(),
        prefactor: (grid.spacing() * p.d() * p.d() / PI).sqrt(),
    };
    let ctl = StepControl {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        max_step: cfg.max_step,
        min_step: 0.0,
        max_steps: 50_000_000,
    };
    let mut y0 = Vec::with_capacity(grid.len() + 1);
    y0.push(state.c_a);
    y0.extend_from_slice(&state.c_modes);

    let mut traj = Trajectory {
        states: cfg.keep_states.then(Vec::new),
        ..Default::default()
    };
    let y = integrate(&sys, state.t, &y0, t_end, cfg.sample_every, &ctl, |t, y| {
        let pa = y[0].norm_sqr();
        let total = pa + y[1..].iter().map(|c| c.norm_sqr()).sum::<f64>();
        traj.times.push(t);
        traj.pa.push(pa);
        traj.norm.push(total);
        if let Some(states) = traj.states.as_mut() {
            states.push(AmplitudeState {
                t,
                c_a: y[0],
                c_modes: y[1..].to_vec(),
            });
        }
    })?;
    traj.final_state = Some(AmplitudeState {
        t: t_end,
        c_a: y[0],
        c_modes: y[1..].to_vec(),
    });
    Ok(traj)
}
