//! Bessel functions J₀ and Y₀ of real positive argument, and |K₀(iy)|².
//!
//! Power/log series below `SERIES_LIMIT`, Hankel amplitude-phase expansion
//! above it. Both branches hold about 1e-12 absolute accuracy at the switch.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{invalid, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 12.0;

/// J₀(x) and Y₀(x) for x > 0.
pub fn j0_y0(x: f64) -> (f64, f64) {
    debug_assert!(x > 0.0);
    if x < SERIES_LIMIT {
        series(x)
    } else {
        hankel(x)
    }
}

fn series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let mut term = 1.0; // (−q)^k / (k!)²
    let mut j0 = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0; // Σ_{k≥1} (−1)^{k+1} H_k q^k/(k!)²
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        j0 += term;
        tail -= harmonic * term;
        if term.abs() < 1e-18 * j0.abs().max(1e-300) && term.abs() * harmonic < 1e-18 {
            break;
        }
    }
    let y0 = 2.0 / PI * (((0.5 * x).ln() + EULER_GAMMA) * j0 + tail);
    (j0, y0)
}

fn hankel(x: f64) -> (f64, f64) {
    // a_k = ∏_{m=1..k} (−(2m−1)²) / (k! 8^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        a *= -((2.0 * kf - 1.0).powi(2)) / (8.0 * kf);
        let term = a / x.powi(k);
        if term.abs() >= last {
            break;
        }
        last = term.abs();
        // P collects even k with sign (−1)^{k/2}; Q odd k with sign (−1)^{(k−1)/2}.
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if last < 1e-17 {
            break;
        }
    }
    let amp = (2.0 / (PI * x)).sqrt();
    let (s, c) = (x - FRAC_PI_4).sin_cos();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

/// |K₀(iy)|² = (π²/4)(J₀(y)² + Y₀(y)²) for y > 0.
pub fn bessel_k0i_abs2(y: f64) -> Result<f64> {
    if !(y.is_finite() && y > 0.0) {
        return Err(invalid("y", format!("must be finite and > 0, got {y}")));
    }
    let (j, yv) = j0_y0(y);
    Ok(0.25 * PI * PI * (j * j + yv * yv))
}
