//! Continuum memory-kernel solver for the atomic amplitude.
//!
//! Solves c′(t) = −∫₀ᵗ K(t − s) c(s) ds, c(0) = 1, by trapezoidal product
//! integration on three nested uniform lattices (N/4, N/2, N steps). The
//! kernel is real, so the amplitude stays real throughout.

use rayon::prelude::*;

use crate::dynamics::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::model::{kernel_lag, rabi_frequency, ModelParams};

/// Smallest accepted step count.
pub const MIN_STEPS: usize = 16;

/// Below this the level differences are treated as round-off and the
/// convergence ratio is not checked.
const CONVERGENCE_FLOOR: f64 = 1e-10;

/// Minimum ratio between successive level differences for a second-order
/// scheme in its asymptotic range (ideal value 4).
pub const MIN_CONVERGENCE_RATIO: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolterraConfig {
    /// Steps on the finest lattice; must be a multiple of 4.
    pub steps: usize,
    /// Precompute K once on the finest lag lattice. Without it each level
    /// evaluates its own kernel values.
    pub kernel_cache: bool,
}

impl VolterraConfig {
    /// Step count resolving the Rabi period and the chirped kernel phase
    /// χτ²/2 over [0, t_end].
    pub fn for_params(p: &ModelParams, t_end: f64) -> Self {
        let omega = if p.is_strong() {
            rabi_frequency(p).unwrap_or(1.0)
        } else {
            1.0
        };
        let chirp_rate = p.chi().abs() * t_end;
        let h = (0.002f64)
            .min(0.02 / omega.max(1.0))
            .min(0.1 / chirp_rate.max(1.0));
        let raw = (t_end / h).ceil() as usize;
        let steps = raw.max(MIN_STEPS).div_ceil(4) * 4;
        Self {
            steps,
            kernel_cache: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < MIN_STEPS {
            return Err(invalid("steps", format!("need at least {MIN_STEPS}, got {}", self.steps)));
        }
        if self.steps % 4 != 0 {
            return Err(invalid("steps", format!("must be a multiple of 4, got {}", self.steps)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolterraSolution {
    /// Finest-level pa sampled on the coarsest lattice; `norm` is empty.
    pub trajectory: Trajectory,
    /// Richardson estimate |y_{N/2} − y_N| / 3 of the error in pa, per sample.
    pub pa_error: Vec<f64>,
    /// max|y_{N/4} − y_{N/2}| / max|y_{N/2} − y_N|; infinite when both
    /// differences sit at round-off level.
    pub convergence_ratio: f64,
}

impl VolterraSolution {
    pub fn max_error(&self) -> f64 {
        self.pa_error.iter().copied().fold(0.0, f64::max)
    }
}

/// Kernel values K(j·h), j = 0..=n.
fn kernel_lattice(p: &ModelParams, h: f64, n: usize) -> Result<Vec<f64>> {
    (0..=n)
        .into_par_iter()
        .map(|j| kernel_lag(j as f64 * h, p))
        .collect()
}

/// March the trapezoidal recursion with kernel samples taken every
/// `stride` entries of `kernel`; returns c at every step.
fn march(kernel: &[f64], stride: usize, h: f64, n: usize) -> Vec<f64> {
    let k = |j: usize| kernel[j * stride];
    let k0 = k(0);
    let denom = 1.0 + 0.25 * h * h * k0;
    let mut c = Vec::with_capacity(n + 1);
    c.push(1.0);
    // F_{n} = −∫₀^{t_n} K c, kept for the next step.
    let mut f_prev = 0.0;
    for m in 1..=n {
        let mut tail = 0.5 * k(m) * c[0];
        for (j, cj) in c.iter().enumerate().take(m).skip(1) {
            tail += k(m - j) * cj;
        }
        let s = h * tail;
        let cm = (c[m - 1] + 0.5 * h * (f_prev - s)) / denom;
        f_prev = -s - 0.5 * h * k0 * cm;
        c.push(cm);
    }
    c
}

pub fn solve_volterra(p: &ModelParams, t_end: f64, cfg: &VolterraConfig) -> Result<VolterraSolution> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(invalid("t_end", format!("must be positive and finite, got {t_end}")));
    }
    cfg.validate()?;
    let n = cfg.steps;
    let h = t_end / n as f64;

    let levels: Vec<Vec<f64>> = if cfg.kernel_cache {
        let kernel = kernel_lattice(p, h, n)?;
        [4, 2, 1]
            .iter()
            .map(|&stride| march(&kernel, stride, h * stride as f64, n / stride))
            .collect()
    } else {
        let mut out = Vec::with_capacity(3);
        for stride in [4usize, 2, 1] {
            let hs = h * stride as f64;
            let kernel = kernel_lattice(p, hs, n / stride)?;
            out.push(march(&kernel, 1, hs, n / stride));
        }
        out
    };

    let coarse = n / 4;
    let mut times = Vec::with_capacity(coarse + 1);
    let mut pa = Vec::with_capacity(coarse + 1);
    let mut pa_error = Vec::with_capacity(coarse + 1);
    let (mut diff_coarse, mut diff_fine) = (0.0f64, 0.0f64);
    for i in 0..=coarse {
        let y4 = levels[0][i].powi(2);
        let y2 = levels[1][2 * i].powi(2);
        let y1 = levels[2][4 * i].powi(2);
        if !y1.is_finite() {
            return Err(Error::VolterraConvergence { ratio: f64::NAN });
        }
        diff_coarse = diff_coarse.max((y4 - y2).abs());
        diff_fine = diff_fine.max((y2 - y1).abs());
        times.push(4.0 * i as f64 * h);
        pa.push(y1);
        pa_error.push((y2 - y1).abs() / 3.0);
    }
    if let Some(t) = times.last_mut() {
        *t = t_end;
    }

    let convergence_ratio = if diff_coarse.max(diff_fine) < CONVERGENCE_FLOOR || diff_fine == 0.0 {
        f64::INFINITY
    } else {
        diff_coarse / diff_fine
    };
    if convergence_ratio < MIN_CONVERGENCE_RATIO {
        return Err(Error::VolterraConvergence {
            ratio: convergence_ratio,
        });
    }

    Ok(VolterraSolution {
        trajectory: Trajectory {
            times,
            pa,
            ..Default::default()
        },
        pa_error,
        convergence_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::{gamma_infinity, static_exact_ca};

    fn params(d: f64, chi: f64) -> ModelParams {
        ModelParams::new(d, chi).unwrap()
    }

    #[test]
    fn rejects_bad_config() {
        let p = params(1.0, 0.0);
        let bad = |steps| VolterraConfig { steps, kernel_cache: true };
        assert!(solve_volterra(&p, 1.0, &bad(12)).is_err());
        assert!(solve_volterra(&p, 1.0, &bad(18)).is_err());
        assert!(solve_volterra(&p, 0.0, &bad(16)).is_err());
    }

    #[test]
    fn static_matches_exact() {
        let p = params(8.0, 0.0);
        let sol = solve_volterra(&p, 1.0, &VolterraConfig::for_params(&p, 1.0)).unwrap();
        for (t, pa) in sol.trajectory.times.iter().zip(&sol.trajectory.pa) {
            let exact = static_exact_ca(*t, &p).unwrap().norm_sqr();
            assert!((pa - exact).abs() < 1e-3, "t={t} {pa} {exact}");
        }
        assert!(sol.convergence_ratio > 3.5, "{}", sol.convergence_ratio);
    }

    #[test]
    fn step_halving_within_estimate() {
        let p = params(8.0, 20.0);
        let cfg = VolterraConfig { steps: 400, kernel_cache: true };
        let a = solve_volterra(&p, 1.0, &cfg).unwrap();
        let b = solve_volterra(&p, 1.0, &VolterraConfig { steps: 800, ..cfg }).unwrap();
        for (i, (&t, &pa)) in a.trajectory.times.iter().zip(&a.trajectory.pa).enumerate() {
            let change = (b.trajectory.pa_at(t) - pa).abs();
            assert!(change <= 4.0 * a.pa_error[i] + 1e-12, "t={t} {change} {}", a.pa_error[i]);
        }
    }

    #[test]
    fn cache_toggle_is_transparent() {
        let p = params(2.0, 5.0);
        let on = VolterraConfig { steps: 64, kernel_cache: true };
        let off = VolterraConfig { kernel_cache: false, ..on };
        let a = solve_volterra(&p, 1.0, &on).unwrap();
        let b = solve_volterra(&p, 1.0, &off).unwrap();
        for (x, y) in a.trajectory.pa.iter().zip(&b.trajectory.pa) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn high_chirp_decays_at_asymptotic_rate() {
        let p = params(8.0, 400.0);
        let sol = solve_volterra(&p, 1.0, &VolterraConfig::for_params(&p, 1.0)).unwrap();
        let tr = &sol.trajectory;
        let rate = (tr.pa_at(0.2) / tr.pa_at(1.0)).ln() / 0.8;
        let g = gamma_infinity(&p).unwrap();
        assert!((rate / g - 1.0).abs() < 0.05, "{rate} {g}");
    }

    #[test]
    fn vanishing_coupling_stays_excited() {
        let p = params(1e-6, 0.0);
        let sol = solve_volterra(&p, 1.0, &VolterraConfig { steps: 64, kernel_cache: true }).unwrap();
        assert!(sol.trajectory.pa.iter().all(|pa| (pa - 1.0).abs() < 1e-6));
    }
}
