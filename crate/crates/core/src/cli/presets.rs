//! Experiment runners behind the commands and the figure presets.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::table::{format_value, Table};
use crate::analysis::{chirp_to_gamma_units, classify, fit_decay, mirror_chirp, rate_to_gamma_units, FitMode};
use crate::closedform::{gamma_infinity, markovian_ca};
use crate::dynamics::{evolve, init_state, norm, IntegratorConfig, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::model::{build_grid, rabi_frequency, ModelParams};
use crate::spectra::numeric_spectrum;
use crate::volterra::{solve_volterra, VolterraConfig};

/// Window on which the Γ∞ sweep fits simulated decays.
pub const FIT_WINDOW: (f64, f64) = (0.1, 1.0);

pub const FIG4_CHI: f64 = 400.0;
pub const FIG6_CHI: f64 = 20.0;
pub const FIG7_CHI: f64 = 8.4;
pub const FIG8_CHI: f64 = 2.0;
pub const FIGURE_D: f64 = 8.0;
pub const FIG9_TIMES: [f64; 4] = [3.81, 4.00, 7.60, 7.79];
pub const FIG5_D: [f64; 3] = [0.5, 1.0, 2.0];
pub const FIG5_FITS: [(f64, f64); 3] = [(2.0, 20.0), (2.0, 60.0), (2.0, 200.0)];

/// Optical transition ω₀/2π.
pub const LAB_OMEGA0_SI: f64 = 2.0 * PI * 3.5e14;
pub const LAB_OUTER_LENGTH_SI: f64 = 0.01;
pub const LAB_GAMMA_SI: f64 = 2.0 * PI * 4.1e6;
pub const LAB_COUPLING_SI: f64 = 2.0 * PI * 34e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub modes_per_gamma: f64,
    pub rel_tol: f64,
    pub sample_every: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            modes_per_gamma: 10.0,
            rel_tol: 1e-8,
            sample_every: 0.01,
        }
    }
}

impl Numerics {
    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: 1e-2 * self.rel_tol,
            sample_every: self.sample_every,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Table(Table),
    Lines(Vec<String>),
}

/// Discrete-bath run from the excited atom to `t_end`.
pub fn simulate(p: &ModelParams, t_end: f64, num: &Numerics) -> Result<Trajectory> {
    let grid = build_grid(p, t_end, num.modes_per_gamma)?;
    evolve(&init_state(&grid), &grid, p, &num.integrator(), t_end)
}

pub fn trajectory_table(traj: &Trajectory) -> Table {
    let mut table = Table::new(&["t", "pa", "norm"]);
    for i in 0..traj.len() {
        table.push_full(&[traj.times[i], traj.pa[i], traj.norm[i]]);
    }
    table
}

/// Chirped run beside the static run at the same coupling, optionally with
/// the Markovian Γ∞ decay overlaid.
pub fn comparison_table(d: f64, chi: f64, t_end: f64, num: &Numerics, markov: bool) -> Result<Table> {
    let chirped = ModelParams::new(d, chi)?;
    let fixed = ModelParams::new(d, 0.0)?;
    let (a, b) = rayon::join(|| simulate(&chirped, t_end, num), || simulate(&fixed, t_end, num));
    let (a, b) = (a?, b?);
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let mut cols = vec!["t", "pa", "norm", "pa_static", "norm_static"];
    if markov {
        cols.push("pa_markov");
    }
    let mut table = Table::new(&cols);
    for i in 0..a.len() {
        let mut row = vec![a.times[i], a.pa[i], a.norm[i], b.pa[i], b.norm[i]];
        if markov {
            row.push(markovian_ca(a.times[i], &chirped)?.powi(2));
        }
        table.push_full(&row);
    }
    Ok(table)
}

/// Long-format spectrum snapshots: t, detuning_now, s, norm, closure.
pub fn spectrum_table(p: &ModelParams, times: &[f64], num: &Numerics) -> Result<Table> {
    let mut times = times.to_vec();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let last = *times
        .last()
        .ok_or_else(|| invalid("times", "need at least one snapshot time"))?;
    if times[0] <= 0.0 {
        return Err(invalid("times", format!("snapshot times must be positive, got {}", times[0])));
    }
    let grid = build_grid(p, last, num.modes_per_gamma)?;
    let cfg = num.integrator();
    let mut state = init_state(&grid);
    let mut table = Table::new(&["t", "detuning_now", "s", "norm", "closure"]);
    for &t in &times {
        state = evolve(&state, &grid, p, &cfg, t)?
            .final_state
            .expect("evolve returns its final state");
        let series = numeric_spectrum(&state, &grid, p)?;
        let total = norm(&state);
        let closure = state.pa() + series.integral();
        for (x, s) in series.detunings_now.iter().zip(&series.values) {
            table.push_full(&[t, *x, *s, total, closure]);
        }
    }
    Ok(table)
}

/// `per_decade` logarithmically spaced chirps from `lo` to `hi` inclusive.
pub fn log_sweep(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(invalid("chi-min", format!("need 0 < chi-min <= chi-max, got {lo}, {hi}")));
    }
    if per_decade == 0 {
        return Err(invalid("points-per-decade", "must be positive"));
    }
    let n = ((hi / lo).log10() * per_decade as f64).round() as usize;
    Ok((0..=n)
        .map(|i| if i == n { hi } else { lo * 10f64.powf(i as f64 / per_decade as f64) })
        .collect())
}

struct FittedRate {
    rate: f64,
    rms: f64,
    norm_end: f64,
}

fn fitted_rate(d: f64, chi: f64, num: &Numerics) -> Result<FittedRate> {
    let p = ModelParams::new(d, chi)?;
    let traj = simulate(&p, FIT_WINDOW.1, num)?;
    let fit = fit_decay(&traj, FIT_WINDOW, FitMode::Direct)?;
    Ok(FittedRate {
        rate: fit.rate,
        rms: fit.rms_residual,
        norm_end: *traj.norm.last().expect("non-empty trajectory"),
    })
}

/// Analytic Γ∞ over a chirp sweep for each coupling, with simulated fits at
/// the `(d, chi)` points in `fits` (added to the sweep if absent).
pub fn gamma_inf_table(ds: &[f64], chis: &[f64], fits: &[(f64, f64)], num: &Numerics) -> Result<Table> {
    let fitted: Vec<FittedRate> = fits
        .par_iter()
        .map(|&(d, chi)| fitted_rate(d, chi, num))
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "d",
        "chi",
        "gamma_inf_analytic",
        "gamma_inf_fitted",
        "xi",
        "fit_rms",
        "norm_end",
    ]);
    for &d in ds {
        let mut row_chis = chis.to_vec();
        row_chis.extend(fits.iter().filter(|f| f.0 == d).map(|f| f.1));
        row_chis.sort_by(f64::total_cmp);
        row_chis.dedup();
        for chi in row_chis {
            let p = ModelParams::new(d, chi)?;
            let fit = fits.iter().position(|&f| f == (d, chi)).map(|i| &fitted[i]);
            table.push(vec![
                Some(d),
                Some(chi),
                Some(gamma_infinity(&p)?),
                fit.map(|f| f.rate),
                classify(&p).xi,
                fit.map(|f| f.rms),
                fit.map(|f| f.norm_end),
            ]);
        }
    }
    Ok(table)
}

pub fn volterra_table(p: &ModelParams, t_end: f64, steps: Option<usize>) -> Result<Table> {
    let cfg = match steps {
        Some(steps) => VolterraConfig {
            steps,
            kernel_cache: true,
        },
        None => VolterraConfig::for_params(p, t_end),
    };
    let sol = solve_volterra(p, t_end, &cfg)?;
    let mut table = Table::new(&["t", "pa", "pa_error"]);
    for i in 0..sol.trajectory.len() {
        table.push_full(&[sol.trajectory.times[i], sol.trajectory.pa[i], sol.pa_error[i]]);
    }
    Ok(table)
}

fn field(key: &str, v: f64) -> String {
    format!("{key}={}", format_value(v))
}

pub fn classify_line(p: &ModelParams) -> Result<String> {
    let r = classify(p);
    let mut parts = vec![
        field("d", p.d()),
        field("chi", p.chi()),
        format!("coupling={}", r.coupling),
        format!("chirp={}", r.chirp),
    ];
    if let Some(x) = r.xi {
        parts.push(field("xi", x));
    }
    if p.chi() > 0.0 {
        parts.push(field("gamma_inf", gamma_infinity(p)?));
    }
    Ok(parts.join(" "))
}

pub fn mirror_line(omega0_si: f64, length_si: f64, length_rate_si: f64, gamma_si: Option<f64>) -> Result<String> {
    let chi_si = mirror_chirp(omega0_si, length_si, length_rate_si)?;
    let mut parts = vec![field("chi_si", chi_si)];
    if let Some(g) = gamma_si {
        if !(g > 0.0) {
            return Err(invalid("gamma-si", format!("must be positive, got {g}")));
        }
        parts.push(field("chi_gamma2", chirp_to_gamma_units(chi_si, g)));
    }
    Ok(parts.join(" "))
}

/// The laboratory estimates: an optical transition in a strongly coupled
/// microcavity whose outer mirror moves at a fixed speed.
pub fn laboratory_lines() -> Result<Vec<String>> {
    // (name, mirror speed m/s, γ in s⁻¹, d or None for the lab coupling)
    let scenarios: [(&str, f64, f64, Option<f64>); 4] = [
        ("slow-mirror", 0.1, LAB_GAMMA_SI, None),
        ("fast-mirror", 0.65, LAB_GAMMA_SI, None),
        ("high-q-cavity", 0.65, 0.1 * LAB_GAMMA_SI, None),
        ("weak-coupling", 0.65, 0.1 * LAB_GAMMA_SI, Some(0.2)),
    ];
    let mut out = Vec::new();
    for (name, speed, gamma_si, d) in scenarios {
        let chi_si = mirror_chirp(LAB_OMEGA0_SI, LAB_OUTER_LENGTH_SI, -speed)?;
        let d = d.unwrap_or_else(|| rate_to_gamma_units(LAB_COUPLING_SI, gamma_si));
        let p = ModelParams::new(d, chirp_to_gamma_units(chi_si, gamma_si))?.with_gamma_si(gamma_si)?;
        let mut line = format!(
            "scenario={name} {} {} {} {}",
            field("speed_si", speed),
            field("gamma_si", gamma_si),
            field("chi_si", chi_si),
            classify_line(&p)?
        );
        if !p.is_strong() {
            let g = gamma_infinity(&p)?;
            line.push(' ');
            line.push_str(&field("suppression", g / (2.0 * d * d)));
        }
        out.push(line);
    }
    Ok(out)
}

fn rabi_times(p: &ModelParams, multiples: &[f64]) -> Result<Vec<f64>> {
    let omega = rabi_frequency(p)?;
    Ok(multiples.iter().map(|k| k * PI / omega).collect())
}

/// Figure and scenario presets; each regenerates one data set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Fig2,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Sec5,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Fig2,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Fig8,
        Preset::Fig9,
        Preset::Sec5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
            Preset::Fig9 => "fig9",
            Preset::Sec5 => "sec5",
        }
    }

    pub fn run(self, num: &Numerics) -> Result<Output> {
        let table = match self {
            Preset::Fig2 => {
                let p = ModelParams::new(FIGURE_D, 0.0)?;
                spectrum_table(&p, &rabi_times(&p, &[1.0, 4.0, 5.0, 8.0])?, num)?
            }
            Preset::Fig4 => comparison_table(FIGURE_D, FIG4_CHI, 1.0, num, true)?,
            Preset::Fig5 => gamma_inf_table(&FIG5_D, &log_sweep(1e-3, 1e4, 8)?, &FIG5_FITS, num)?,
            Preset::Fig6 => comparison_table(FIGURE_D, FIG6_CHI, 3.0, num, false)?,
            Preset::Fig7 => comparison_table(FIGURE_D, FIG7_CHI, 8.0, num, false)?,
            Preset::Fig8 => comparison_table(FIGURE_D, FIG8_CHI, 3.0, num, false)?,
            Preset::Fig9 => spectrum_table(&ModelParams::new(FIGURE_D, FIG7_CHI)?, &FIG9_TIMES, num)?,
            Preset::Sec5 => return Ok(Output::Lines(laboratory_lines()?)),
        };
        Ok(Output::Table(table))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_endpoints() {
        let s = log_sweep(1e-3, 1e4, 8).unwrap();
        assert_eq!(s.len(), 57);
        assert_eq!(s[0], 1e-3);
        assert_eq!(*s.last().unwrap(), 1e4);
        assert!((s[8] - 1e-2).abs() < 1e-15);
        assert!(log_sweep(0.0, 1.0, 4).is_err());
        assert!(log_sweep(1.0, 10.0, 0).is_err());
    }

    #[test]
    fn static_limit_rows() {
        let t = gamma_inf_table(&FIG5_D, &[1e-3], &[], &Numerics::default()).unwrap();
        for row in &t.rows {
            let (d, g) = (row[0].unwrap(), row[2].unwrap());
            assert!((g / (2.0 * d * d) - 1.0).abs() < 5e-3, "{d} {g}");
        }
    }

    #[test]
    fn laboratory_estimates() {
        let lines = laboratory_lines().unwrap();
        let value = |line: &str, key: &str| -> f64 {
            let tag = format!("{key}=");
            line.split(' ')
                .find_map(|f| f.strip_prefix(&tag))
                .unwrap()
                .parse()
                .unwrap()
        };
        assert!((value(&lines[0], "xi") / 1.52 - 1.0).abs() < 0.02);
        assert!((value(&lines[0], "chi_si") / 2.2e16 - 1.0).abs() < 0.01);
        assert!((value(&lines[1], "chi") / 215.0 - 1.0).abs() < 0.01);
        assert!((value(&lines[1], "gamma_inf") / 5.05 - 1.0).abs() < 0.02);
        assert!((value(&lines[2], "gamma_inf") / 13.6 - 1.0).abs() < 0.02);
        assert!((value(&lines[3], "suppression") / 9.92e-4 - 1.0).abs() < 0.02);
        // ξ ≈ 9.88 sits just below the high-chirp threshold.
        assert!(lines[1].contains("chirp=intermediate"));
        assert!(lines[3].contains("coupling=weak"));
    }
}
