//! Physical parameterization, the Lorentzian reservoir structure, the linear
//! chirp law, the discrete micro-bath and the continuum memory kernel.
//!
//! Units are dimensionless throughout: the Lorentzian half-width γ is 1, so
//! times are in 1/γ, frequencies and couplings in γ, and chirp rates in γ².
//! All frequencies are detunings from the atomic transition.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_partitioned, QuadOptions};

/// Upper bound on the number of bath modes [`build_grid`] will produce.
pub const DEFAULT_MODE_CAP: usize = 2_000_000;

/// Extra window, in units of Ω, added on both sides under strong coupling.
pub const STRONG_WINDOW_RABI_MULTIPLE: f64 = 3.0;

/// Closest approach (in half-widths) of a grid edge to resonance that
/// [`build_grid`] guarantees.
pub const MIN_EDGE_HALF_WIDTHS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    d: f64,
    chi: f64,
    gamma_si: Option<f64>,
}

impl ModelParams {
    /// `d` is the coupling weight D/γ, `chi` the chirp rate χ/γ².
    pub fn new(d: f64, chi: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(invalid("d", format!("must be finite and > 0, got {d}")));
        }
        if !chi.is_finite() {
            return Err(invalid("chi", format!("must be finite, got {chi}")));
        }
        Ok(Self {
            d,
            chi,
            gamma_si: None,
        })
    }

    /// Attaches the physical half-width γ in s⁻¹, used only for unit conversion.
    pub fn with_gamma_si(mut self, gamma_si: f64) -> Result<Self> {
        if !(gamma_si.is_finite() && gamma_si > 0.0) {
            return Err(invalid("gamma_si", format!("must be > 0, got {gamma_si}")));
        }
        self.gamma_si = Some(gamma_si);
        Ok(self)
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn gamma_si(&self) -> Option<f64> {
        self.gamma_si
    }

    /// Same coupling, different chirp.
    pub fn with_chi(&self, chi: f64) -> Result<Self> {
        let mut p = Self::new(self.d, chi)?;
        p.gamma_si = self.gamma_si;
        Ok(p)
    }

    pub fn is_strong(&self) -> bool {
        self.d > 0.5
    }
}

/// Uniform grid of initial detunings for the discrete bath.
///
/// `center` is the position of the atomic transition (and of the envelope
/// peak) on the detuning axis; [`build_grid`] puts it at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BathGrid {
    detunings: Vec<f64>,
    spacing: f64,
    center: f64,
}

impl BathGrid {
    /// Grid of `count` modes starting at `first` with step `spacing`.
    pub fn uniform(first: f64, spacing: f64, count: usize) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(invalid("spacing", format!("must be > 0, got {spacing}")));
        }
        if count == 0 {
            return Err(invalid("count", "grid needs at least one mode"));
        }
        let detunings = (0..count).map(|k| first + k as f64 * spacing).collect();
        Ok(Self {
            detunings,
            spacing,
            center: 0.0,
        })
    }

    /// The same bath seen from a frame whose reference frequency is lowered
    /// by `offset`: every detuning and the resonance position move together.
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            detunings: self.detunings.iter().map(|d| d + offset).collect(),
            spacing: self.spacing,
            center: self.center + offset,
        }
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }

    /// `(δ_min, δ_max)` measured from resonance.
    pub fn window(&self) -> (f64, f64) {
        (
            self.detunings[0] - self.center,
            self.detunings[self.len() - 1] - self.center,
        )
    }

    /// Density of states of the uniform grid.
    pub fn density(&self) -> f64 {
        1.0 / self.spacing
    }

    /// Coupling of mode `k` at time `t`.
    pub fn coupling(&self, k: usize, t: f64, p: &ModelParams) -> f64 {
        let now = chirped_detuning(self.detunings[k] - self.center, t, p.chi);
        (self.spacing * structure_function(now, p)).sqrt()
    }
}

/// Lorentzian reservoir structure ρ|g|² at detuning `delta`, weight d².
pub fn structure_function(delta: f64, p: &ModelParams) -> f64 {
    p.d * p.d / PI / (1.0 + delta * delta)
}

/// Detuning at time `t` of a mode that started at `delta0`.
pub fn chirped_detuning(delta0: f64, t: f64, chi: f64) -> f64 {
    delta0 + chi * t
}

/// Real, non-negative coupling of the grid mode that started at `delta0`.
pub fn coupling_at(delta0: f64, t: f64, grid: &BathGrid, p: &ModelParams) -> Result<f64> {
    let (lo, hi) = grid.window();
    let slack = 1e-9 * grid.spacing;
    if !(delta0 >= lo - slack && delta0 <= hi + slack) {
        return Err(invalid(
            "delta0",
            format!("{delta0} lies outside the grid window [{lo}, {hi}]"),
        ));
    }
    let now = chirped_detuning(delta0, t, p.chi);
    Ok((grid.spacing * structure_function(now, p)).sqrt())
}

/// Builds a grid that keeps every mode reaching resonance during `[0, horizon]`.
pub fn build_grid(p: &ModelParams, horizon: f64, modes_per_gamma: f64) -> Result<BathGrid> {
    build_grid_capped(p, horizon, modes_per_gamma, DEFAULT_MODE_CAP)
}

pub fn build_grid_capped(
    p: &ModelParams,
    horizon: f64,
    modes_per_gamma: f64,
    cap: usize,
) -> Result<BathGrid> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(invalid("horizon", format!("must be > 0, got {horizon}")));
    }
    if !(modes_per_gamma.is_finite() && modes_per_gamma >= 1.0) {
        return Err(invalid(
            "modes_per_gamma",
            format!("must be >= 1, got {modes_per_gamma}"),
        ));
    }
    // Under strong coupling the far Lorentzian wings still shift the Rabi
    // dynamics; truncation error falls off as (d/W)³, and 3Ω beyond the
    // floor keeps it near 2e-4 for d up to ~16.
    let extra = if p.is_strong() {
        STRONG_WINDOW_RABI_MULTIPLE * (4.0 * p.d * p.d - 1.0).sqrt()
    } else {
        0.0
    };
    let base = MIN_EDGE_HALF_WIDTHS + extra;
    let sweep = p.chi * horizon;
    let w_low = base + sweep.max(0.0);
    let w_high = base + (-sweep).max(0.0);
    let spacing = 1.0 / modes_per_gamma;
    // Anchor on resonance so that δ = 0 is a grid point.
    let lo = (w_low / spacing - 1e-9).ceil();
    let hi = (w_high / spacing - 1e-9).ceil();
    let count_f = lo + hi + 1.0;
    if count_f > cap as f64 {
        return Err(Error::GridTooLarge {
            count: count_f.min(usize::MAX as f64) as usize,
            cap,
        });
    }
    let count = count_f as usize;
    let detunings = (0..count)
        .map(|k| (k as f64 - lo) * spacing)
        .collect();
    Ok(BathGrid {
        detunings,
        spacing,
        center: 0.0,
    })
}

/// Rabi frequency Ω = √(4d² − 1); only defined for strong coupling.
pub fn rabi_frequency(p: &ModelParams) -> Result<f64> {
    if !p.is_strong() {
        return Err(Error::Regime(format!(
            "Rabi frequency needs d > 1/2, got d = {}",
            p.d
        )));
    }
    Ok((4.0 * p.d * p.d - 1.0).sqrt())
}

/// Dimensionless chirp ξ = 4πχ/Ω².
pub fn xi(p: &ModelParams) -> Result<f64> {
    let omega = rabi_frequency(p)?;
    Ok(4.0 * PI * p.chi / (omega * omega))
}

/// Continuum memory kernel K(t, t′).
///
/// With Δ = δ + χ(t + t′)/2 the kernel depends on the lag τ = t − t′ alone:
/// K = (d²/π) ∫ e^{−iΔτ} / √([1 + (Δ + χτ/2)²][1 + (Δ − χτ/2)²]) dΔ.
/// The denominator is even in Δ, so the sine part integrates to zero and K is
/// real; exchanging the arguments conjugates a real number.
pub fn two_time_kernel(t: f64, t_prime: f64, p: &ModelParams) -> Result<Complex64> {
    if t < 0.0 || t_prime < 0.0 {
        return Err(invalid("t", "kernel times must be non-negative"));
    }
    Ok(Complex64::new(kernel_lag(t - t_prime, p)?, 0.0))
}

/// K as a function of the lag τ = t − t′.
pub fn kernel_lag(tau: f64, p: &ModelParams) -> Result<f64> {
    let tau = tau.abs();
    let a = 0.5 * p.chi.abs() * tau;
    let static_part = PI * (-tau).exp();
    if a == 0.0 || tau == 0.0 {
        return Ok(p.d * p.d * static_part / PI);
    }
    let remainder = kernel_remainder(tau, a)?;
    Ok(p.d * p.d * (static_part + 2.0 * remainder) / PI)
}

/// f(Δ) − 1/(1 + Δ²), written without cancellation.
fn lorentz_pair_excess(delta: f64, a: f64) -> f64 {
    let one_d2 = 1.0 + delta * delta;
    let p = (1.0 + (delta + a).powi(2)) * (1.0 + (delta - a).powi(2));
    let sp = p.sqrt();
    a * a * (2.0 * delta * delta - 2.0 - a * a) / ((one_d2 + sp) * sp * one_d2)
}

/// ∫₀^∞ [f(Δ) − 1/(1+Δ²)] cos(Δτ) dΔ.
fn kernel_remainder(tau: f64, a: f64) -> Result<f64> {
    const ABS_TOL: f64 = 1e-11;
    let opts = QuadOptions {
        abs_tol: ABS_TOL,
        rel_tol: 1e-10,
        max_intervals: 200_000,
    };
    let integrand = |x: f64| lorentz_pair_excess(x, a) * (x * tau).cos();
    let mut lambda = 50.0_f64.max(4.0 * a + 50.0);
    let bp = kernel_breakpoints(0.0, lambda, a, tau);
    let mut total = integrate_partitioned(integrand, &bp, opts)?.value;
    loop {
        if lambda * tau >= 30.0 {
            // Two integrations by parts of the oscillatory tail.
            let r = lorentz_pair_excess(lambda, a);
            let h = 1e-4 * lambda;
            let dr = (lorentz_pair_excess(lambda + h, a) - lorentz_pair_excess(lambda - h, a))
                / (2.0 * h);
            let s = (lambda * tau).sin();
            let c = (lambda * tau).cos();
            total += -r * s / tau - dr * c / (tau * tau);
            return Ok(total);
        }
        // Non-oscillatory bound: |f − g| ≲ a²/Δ⁴ beyond the peaks.
        if a * a / lambda.powi(3) < 0.1 * ABS_TOL {
            return Ok(total);
        }
        let next = 2.0 * lambda;
        let bp = kernel_breakpoints(lambda, next, a, tau);
        total += integrate_partitioned(integrand, &bp, opts)?.value;
        lambda = next;
    }
}

fn kernel_breakpoints(lo: f64, hi: f64, a: f64, tau: f64) -> Vec<f64> {
    let seg = 10.0_f64.min(4.0 * PI / tau);
    let n = ((hi - lo) / seg).ceil().max(1.0) as usize;
    let mut bp: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    for x in [a - 6.0, a - 2.0, a, a + 2.0, a + 6.0] {
        if x > lo && x < hi {
            bp.push(x);
        }
    }
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    bp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    fn params(d: f64, chi: f64) -> ModelParams {
        ModelParams::new(d, chi).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(0.0, 1.0).is_err());
        assert!(ModelParams::new(-1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, f64::NAN).is_err());
        assert!(params(1.0, 0.0).with_gamma_si(0.0).is_err());
        assert!(params(1.0, 0.0).with_gamma_si(2.0).is_ok());
    }

    #[test]
    fn structure_function_values() {
        let p = params(1.0, 0.0);
        assert!((structure_function(0.0, &p) - 1.0 / PI).abs() < 1e-15);
        assert!((structure_function(1.0, &p) - 0.5 / PI).abs() < 1e-15);
        assert!((structure_function(-1.0, &p) - 0.5 / PI).abs() < 1e-15);
    }

    #[test]
    fn structure_function_normalization() {
        let p = params(8.0, 0.0);
        let bp: Vec<f64> = (-100..=100).map(|k| k as f64 * 100.0).collect();
        let r = integrate_partitioned(|x| structure_function(x, &p), &bp, QuadOptions::default())
            .unwrap();
        assert!((r.value - 64.0).abs() < 0.064, "{}", r.value);
    }

    #[test]
    fn chirp_law() {
        assert_eq!(chirped_detuning(5.0, 0.0, 20.0), 5.0);
        assert!(chirped_detuning(-2.0, 0.1, 20.0).abs() < 1e-15);
        assert!((chirped_detuning(0.0, 1.0, 8.4) - 8.4).abs() < 1e-15);
    }

    #[test]
    fn coupling_values() {
        let p = params(8.0, 0.0);
        let grid = BathGrid::uniform(-10.0, 0.1, 201).unwrap();
        let g = coupling_at(0.0, 0.0, &grid, &p).unwrap();
        assert!((g - (0.1 * 64.0 / PI).sqrt()).abs() < 1e-12);
        assert!((g - 1.4273).abs() < 1e-4);
        assert!(coupling_at(10.5, 0.0, &grid, &p).is_err());
    }

    #[test]
    fn coupling_peaks_at_resonant_mode() {
        let p = params(8.0, 20.0);
        let grid = BathGrid::uniform(-30.0, 0.1, 401).unwrap();
        let t = 0.5;
        let resonant = coupling_at(-p.chi() * t, t, &grid, &p).unwrap();
        let max = (0..grid.len())
            .map(|k| grid.coupling(k, t, &p))
            .fold(0.0, f64::max);
        assert!((resonant - max).abs() < 1e-12);
    }

    #[test]
    fn sum_rule_on_fine_grid() {
        let p = params(8.0, 0.0);
        let grid = BathGrid::uniform(-20_000.0, 0.05, 800_001).unwrap();
        let sum: f64 = (0..grid.len())
            .map(|k| grid.coupling(k, 0.0, &p).powi(2))
            .sum();
        assert!((sum - 64.0).abs() < 0.32, "{sum}");
    }

    #[test]
    fn grid_examples() {
        // d = 8: Ω = √255, W = 10 + 3Ω ≈ 57.91, rounded out to the 0.1 grid.
        let g = build_grid(&params(8.0, 0.0), 1.0, 10.0).unwrap();
        let (lo, hi) = g.window();
        assert!((lo + 58.0).abs() < 1e-9 && (hi - 58.0).abs() < 1e-9, "{lo} {hi}");
        assert!((g.spacing() - 0.1).abs() < 1e-15);

        let g = build_grid(&params(8.0, 400.0), 1.0, 10.0).unwrap();
        assert!((g.window().0 + 458.0).abs() < 1e-9);
        assert!((g.window().1 - 58.0).abs() < 1e-9);

        let g = build_grid(&params(8.0, -400.0), 1.0, 10.0).unwrap();
        assert!((g.window().1 - 458.0).abs() < 1e-9);

        let g = build_grid(&params(0.2, 0.0), 5.0, 10.0).unwrap();
        assert_eq!(g.len(), 201);
        assert_eq!(g.window(), (-10.0, 10.0));
    }

    #[test]
    fn grid_is_uniform_and_counted() {
        let g = build_grid(&params(3.0, 37.0), 2.3, 13.0).unwrap();
        let (lo, hi) = g.window();
        let expected = ((hi - lo) / g.spacing()).round() as usize + 1;
        assert_eq!(g.len(), expected);
        for w in g.detunings().windows(2) {
            assert!(((w[1] - w[0]) - g.spacing()).abs() < 1e-9 * g.spacing());
        }
    }

    #[test]
    fn grid_cap_and_validation() {
        let p = params(8.0, 1e6);
        let err = build_grid(&p, 10.0, 10.0).unwrap_err();
        assert!(matches!(err, Error::GridTooLarge { .. }));
        assert!(build_grid(&p, 0.0, 10.0).is_err());
        assert!(build_grid(&p, 1.0, 0.5).is_err());
    }

    #[test]
    fn rabi_and_xi() {
        assert!((rabi_frequency(&params(8.0, 0.0)).unwrap() - 255f64.sqrt()).abs() < 1e-12);
        assert!((rabi_frequency(&params(2.0, 0.0)).unwrap() - 3.8730).abs() < 1e-4);
        assert!(rabi_frequency(&params(0.5, 0.0)).is_err());
        assert!(xi(&params(0.3, 1.0)).is_err());
        assert!((xi(&params(8.0, 400.0)).unwrap() - 19.71).abs() < 0.01);
        assert!((xi(&params(8.0, 8.4)).unwrap() - 0.414).abs() < 0.001);
        assert!((xi(&params(8.0, 2.0)).unwrap() - 0.0985).abs() < 0.0005);
    }

    #[test]
    fn kernel_equal_times() {
        for t in [0.0, 0.3, 5.0] {
            let k = two_time_kernel(t, t, &params(8.0, 400.0)).unwrap();
            assert!((k.re - 64.0).abs() < 1e-12 && k.im == 0.0);
        }
    }

    #[test]
    fn kernel_static_reduction() {
        let p = params(1.0, 0.0);
        let k = two_time_kernel(1.0, 0.0, &p).unwrap();
        assert!((k.re - (-1.0f64).exp()).abs() < 1e-12);
    }

    // Direct brute-force quadrature of the lag integral on a huge window.
    fn kernel_oracle(tau: f64, chi: f64, d: f64) -> f64 {
        let a = 0.5 * chi * tau;
        let f = |x: f64| {
            (x * tau).cos() / ((1.0 + (x + a).powi(2)) * (1.0 + (x - a).powi(2))).sqrt()
        };
        let lim = 4.0e4;
        let n = (lim * tau / PI).ceil() as usize;
        let bp: Vec<f64> = (0..=n).map(|k| lim * k as f64 / n as f64).collect();
        let opts = QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_intervals: 1_000_000,
        };
        let body = integrate_partitioned(f, &bp, opts).unwrap().value;
        // Leading oscillatory tail of 1/x².
        let tail = -(lim * tau).sin() / (tau * lim * lim);
        d * d * 2.0 * (body + tail) / PI
    }

    #[test]
    fn kernel_matches_brute_force() {
        for (tau, chi) in [(0.05, 400.0), (0.3, 20.0), (1.0, 8.4), (0.01, 400.0), (2.0, 2.0)] {
            let k = kernel_lag(tau, &params(8.0, chi)).unwrap();
            let o = kernel_oracle(tau, chi, 8.0);
            assert!((k - o).abs() < 1e-6, "tau {tau} chi {chi}: {k} vs {o}");
        }
    }

    #[test]
    fn kernel_collapses_under_fast_chirp() {
        let k = two_time_kernel(0.55, 0.5, &params(8.0, 400.0)).unwrap();
        assert!(k.norm() < 64.0 * 0.2, "{k}");
    }

    #[test]
    fn kernel_hermitian() {
        let p = params(8.0, 20.0);
        let a = two_time_kernel(0.7, 0.2, &p).unwrap();
        let b = two_time_kernel(0.2, 0.7, &p).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn quadrature_sanity_for_oracle() {
        let r = integrate(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, QuadOptions::default()).unwrap();
        assert!((r.value - PI / 4.0).abs() < 1e-13);
    }

    proptest::proptest! {
        #[test]
        fn coupling_follows_the_sweep(delta0 in -40.0f64..40.0, t in 0.0f64..2.0, s in 0.0f64..1.0, chi in -20.0f64..20.0) {
            // A mode started χs lower reaches the same detuning s later.
            let p = ModelParams::new(3.0, chi).unwrap();
            let grid = BathGrid::uniform(-100.0, 0.1, 2001).unwrap();
            let a = coupling_at(delta0, t, &grid, &p).unwrap();
            let b = coupling_at(delta0 - chi * s, t + s, &grid, &p).unwrap();
            proptest::prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }
    }
}
