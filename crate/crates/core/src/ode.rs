//! Embedded Dormand-Prince 5(4) integrator for complex linear systems,
//! with PI step-size control and sampling on a fixed output cadence.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

type C64 = Complex64;

/// Right-hand side of y′ = f(t, y).
pub trait ComplexSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]);
}

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;
const BETA: f64 = 0.04;

/// Integrates from `t0` to `t_end`, calling `observe(t, y)` at `t0` and at
/// every multiple of `sample_every` past it, and finally at `t_end`.
/// Returns the final state.
pub fn integrate<S, F>(
    sys: &S,
    t0: f64,
    y0: &[C64],
    t_end: f64,
    sample_every: f64,
    ctl: &StepControl,
    mut observe: F,
) -> Result<Vec<C64>>
where
    S: ComplexSystem,
    F: FnMut(f64, &[C64]),
{
    ctl.validate()?;
    if !(sample_every.is_finite() && sample_every > 0.0) {
        return Err(invalid("sample_every", format!("must be > 0, got {sample_every}")));
    }
    if !(t_end > t0) {
        return Err(invalid("t_end", format!("must exceed start time {t0}, got {t_end}")));
    }
    let n = sys.dim();
    if y0.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: y0.len(),
        });
    }
    let zero = C64::new(0.0, 0.0);
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![zero; n]).collect();
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];

    let targets = sample_times(t0, t_end, sample_every);
    observe(t0, &y);
    let mut next_sample = 0;

    let mut t = t0;
    sys.rhs(t, &y, &mut k[0]);
    let mut h = initial_step(sys, t, &y, &k[0], ctl).min(ctl.max_step);
    let min_step = if ctl.min_step > 0.0 {
        ctl.min_step
    } else {
        1e-14 * (t_end - t0).abs().max(1.0)
    };
    let mut err_old = 1e-4_f64;
    let mut steps = 0usize;

    while next_sample < targets.len() {
        let target = targets[next_sample];
        if target - t <= 1e-13 * target.abs().max(1.0) {
            observe(target, &y);
            next_sample += 1;
            continue;
        }
        let mut h_try = h.min(ctl.max_step);
        let clamped = t + h_try >= target;
        if clamped {
            h_try = target - t;
        }
        if h_try < min_step && !clamped {
            return Err(Error::StepUnderflow { t, h: h_try });
        }
        steps += 1;
        if steps > ctl.max_steps {
            return Err(Error::StepUnderflow { t, h: h_try });
        }

        let err = dopri_step(sys, t, &y, h_try, &mut k, &mut tmp, &mut y_new, ctl);
        if err <= 1.0 {
            let fac = (SAFETY * err.max(1e-10).powf(-(0.2 - 0.75 * BETA)) * err_old.powf(BETA))
                .clamp(FAC_MIN, FAC_MAX);
            err_old = err.max(1e-4);
            t = if clamped { target } else { t + h_try };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            let proposal = h_try * fac;
            h = if clamped { proposal.max(h) } else { proposal };
            if clamped {
                observe(target, &y);
                next_sample += 1;
            }
        } else {
            let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
            h = h_try * fac;
            if h < min_step {
                return Err(Error::StepUnderflow { t, h });
            }
        }
    }
    Ok(y)
}

/// Output times after `t0`: multiples of `every`, then `t_end` itself.
pub fn sample_times(t0: f64, t_end: f64, every: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut j = 1usize;
    loop {
        let t = t0 + j as f64 * every;
        if t >= t_end - 1e-9 * every {
            break;
        }
        out.push(t);
        j += 1;
    }
    out.push(t_end);
    out
}

fn initial_step<S: ComplexSystem>(sys: &S, t: f64, y: &[C64], f0: &[C64], ctl: &StepControl) -> f64 {
    let scale = |yi: &C64| ctl.abs_tol + ctl.rel_tol * yi.norm();
    let d0 = y.iter().map(|v| (v.norm() / scale(v)).powi(2)).fold(0.0, f64::max).sqrt();
    let d1 = y
        .iter()
        .zip(f0)
        .map(|(v, f)| (f.norm() / scale(v)).powi(2))
        .fold(0.0, f64::max)
        .sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<C64> = y.iter().zip(f0).map(|(v, f)| v + f * h0).collect();
    let mut f1 = vec![C64::new(0.0, 0.0); y.len()];
    sys.rhs(t + h0, &y1, &mut f1);
    let d2 = y
        .iter()
        .zip(f0.iter().zip(&f1))
        .map(|(v, (a, b))| ((b - a).norm() / scale(v)).powi(2))
        .fold(0.0, f64::max)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

#[allow(clippy::too_many_arguments)]
fn dopri_step<S: ComplexSystem>(
    sys: &S,
    t: f64,
    y: &[C64],
    h: f64,
    k: &mut [Vec<C64>],
    tmp: &mut [C64],
    y_new: &mut [C64],
    ctl: &StepControl,
) -> f64 {
    let n = y.len();
    for i in 0..n {
        tmp[i] = y[i] + k[0][i] * (h * A21);
    }
    sys.rhs(t + C2 * h, tmp, &mut k[1]);
    for i in 0..n {
        tmp[i] = y[i] + (k[0][i] * A31 + k[1][i] * A32) * h;
    }
    sys.rhs(t + C3 * h, tmp, &mut k[2]);
    for i in 0..n {
        tmp[i] = y[i] + (k[0][i] * A41 + k[1][i] * A42 + k[2][i] * A43) * h;
    }
    sys.rhs(t + C4 * h, tmp, &mut k[3]);
    for i in 0..n {
        tmp[i] = y[i] + (k[0][i] * A51 + k[1][i] * A52 + k[2][i] * A53 + k[3][i] * A54) * h;
    }
    sys.rhs(t + C5 * h, tmp, &mut k[4]);
    for i in 0..n {
        tmp[i] = y[i]
            + (k[0][i] * A61 + k[1][i] * A62 + k[2][i] * A63 + k[3][i] * A64 + k[4][i] * A65) * h;
    }
    sys.rhs(t + h, tmp, &mut k[5]);
    for i in 0..n {
        y_new[i] = y[i]
            + (k[0][i] * A71 + k[2][i] * A73 + k[3][i] * A74 + k[4][i] * A75 + k[5][i] * A76) * h;
    }
    sys.rhs(t + h, y_new, &mut k[6]);
    let mut err = 0.0_f64;
    for i in 0..n {
        let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6
            + k[6][i] * E7)
            * h;
        let sc = ctl.abs_tol + ctl.rel_tol * y[i].norm().max(y_new[i].norm());
        err = err.max(e.norm() / sc);
    }
    err
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rotor(f64);
    impl ComplexSystem for Rotor {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[C64], dy: &mut [C64]) {
            dy[0] = C64::new(-0.3, self.0) * y[0];
        }
    }

    fn ctl(tol: f64) -> StepControl {
        StepControl {
            rel_tol: tol,
            abs_tol: tol * 1e-2,
            max_step: 1.0,
            min_step: 0.0,
            max_steps: 1_000_000,
        }
    }

    #[test]
    fn damped_rotation() {
        let mut samples = Vec::new();
        let y = integrate(&Rotor(7.0), 0.0, &[C64::new(1.0, 0.0)], 3.0, 0.25, &ctl(1e-10), |t, y| {
            samples.push((t, y[0]))
        })
        .unwrap();
        let exact = |t: f64| (C64::new(-0.3, 7.0) * t).exp();
        assert!((y[0] - exact(3.0)).norm() < 1e-8);
        assert_eq!(samples.len(), 13);
        for (j, (t, v)) in samples.iter().enumerate() {
            assert_eq!(*t, j as f64 * 0.25);
            assert!((v - exact(*t)).norm() < 1e-8);
        }
    }

    #[test]
    fn odd_horizon_gets_final_sample() {
        let mut times = Vec::new();
        integrate(&Rotor(1.0), 0.0, &[C64::new(1.0, 0.0)], 1.05, 0.5, &ctl(1e-8), |t, _| {
            times.push(t)
        })
        .unwrap();
        assert_eq!(times, vec![0.0, 0.5, 1.0, 1.05]);
    }

    #[test]
    fn rejects_bad_config() {
        let mut c = ctl(1e-8);
        c.rel_tol = 0.0;
        assert!(integrate(&Rotor(1.0), 0.0, &[C64::new(1.0, 0.0)], 1.0, 0.1, &c, |_, _| {}).is_err());
        let c = ctl(1e-8);
        assert!(integrate(&Rotor(1.0), 1.0, &[C64::new(1.0, 0.0)], 0.5, 0.1, &c, |_, _| {}).is_err());
    }

    #[test]
    fn step_budget_exhaustion_is_reported() {
        let mut c = ctl(1e-12);
        c.max_steps = 5;
        let err = integrate(&Rotor(50.0), 0.0, &[C64::new(1.0, 0.0)], 10.0, 10.0, &c, |_, _| {})
            .unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { .. }));
    }
}
