//! Command-line front end.
//!
//! Settings come from flags, then from an optional `key=value` file given
//! with `--config`, then from defaults. Exit codes: 0 success, 2 invalid
//! input, 3 numerical failure.

mod config;
pub mod presets;
mod table;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::parse_config;
pub use presets::{Numerics, Output, Preset};
pub use table::{format_value, Table};

use crate::error::Error;
use crate::model::ModelParams;

/// Caps the worker threads used by sweeps.
pub const THREADS_ENV: &str = "CHIRPED_BATH_THREADS";

#[derive(Debug, Parser)]
#[command(name = "chirped-bath", version, about = "Emitter decay in a linearly chirped Lorentzian reservoir")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Discrete-bath trajectory: t, pa, norm.
    Simulate,
    /// Continuum memory-kernel trajectory: t, pa, pa_error.
    Volterra,
    /// Γ∞ against chirp, analytic and fitted.
    GammaInf,
    /// Bath spectrum snapshots in long format.
    Spectrum,
    /// Regime report for (d, chi).
    Classify,
    /// Chirp produced by a moving cavity mirror.
    Mirror,
    /// Run every preset into the `--out` directory.
    PaperFigures,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// key=value file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Coupling D/γ.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub d: Option<f64>,
    /// Chirp χ/γ².
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub chi: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub modes_per_gamma: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub sample_every: Option<f64>,
    /// Output file (directory for paper-figures); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub preset: Option<Preset>,
    /// Volterra steps on the finest lattice (multiple of 4).
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Comma-separated snapshot times for `spectrum`.
    #[arg(long, global = true)]
    pub times: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub chi_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub chi_max: Option<f64>,
    #[arg(long, global = true)]
    pub points_per_decade: Option<usize>,
    /// Comma-separated chirps at which `gamma-inf` also fits a simulation.
    #[arg(long, global = true)]
    pub fit_chi: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma_si: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega0_si: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub length_si: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub length_rate_si: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(
                Error::Quadrature { .. }
                | Error::StepUnderflow { .. }
                | Error::VolterraConvergence { .. }
                | Error::Fit(_),
            ) => 3,
            _ => 2,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Flag values merged with the config file and defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub d: Option<f64>,
    pub chi: f64,
    pub t_end: f64,
    pub numerics: Numerics,
    pub out: Option<PathBuf>,
    pub preset: Option<Preset>,
    pub steps: Option<usize>,
    pub times: Option<Vec<f64>>,
    pub chi_min: f64,
    pub chi_max: f64,
    pub points_per_decade: usize,
    pub fit_chi: Vec<f64>,
    pub gamma_si: Option<f64>,
    pub omega0_si: Option<f64>,
    pub length_si: Option<f64>,
    pub length_rate_si: Option<f64>,
}

const KNOWN_KEYS: &[&str] = &[
    "d",
    "chi",
    "t-end",
    "modes-per-gamma",
    "rel-tol",
    "sample-every",
    "out",
    "preset",
    "steps",
    "times",
    "chi-min",
    "chi-max",
    "points-per-decade",
    "fit-chi",
    "gamma-si",
    "omega0-si",
    "length-si",
    "length-rate-si",
];

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| usage(format!("{key}: `{v}`: {e}"))))
        .collect()
}

struct Merge<'a> {
    file: &'a BTreeMap<String, String>,
}

impl Merge<'_> {
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| usage(format!("config `{key}`: `{v}`: {e}"))))
            .transpose()
    }

    fn list(&self, flag: &Option<String>, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match flag.as_ref().or_else(|| self.file.get(key)) {
            Some(s) => parse_list(key, s).map(Some),
            None => Ok(None),
        }
    }
}

impl Settings {
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                parse_config(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
            }
            None => BTreeMap::new(),
        };
        if let Some(bad) = file.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(usage(format!("config: unknown key `{bad}`")));
        }
        let m = Merge { file: &file };
        let preset = match flags.preset {
            Some(p) => Some(p),
            None => file
                .get("preset")
                .map(|v| Preset::from_str(v, true).map_err(|e| usage(format!("config `preset`: {e}"))))
                .transpose()?,
        };
        let defaults = Numerics::default();
        Ok(Self {
            d: m.pick(flags.d, "d")?,
            chi: m.pick(flags.chi, "chi")?.unwrap_or(0.0),
            t_end: m.pick(flags.t_end, "t-end")?.unwrap_or(1.0),
            numerics: Numerics {
                modes_per_gamma: m
                    .pick(flags.modes_per_gamma, "modes-per-gamma")?
                    .unwrap_or(defaults.modes_per_gamma),
                rel_tol: m.pick(flags.rel_tol, "rel-tol")?.unwrap_or(defaults.rel_tol),
                sample_every: m.pick(flags.sample_every, "sample-every")?.unwrap_or(defaults.sample_every),
            },
            out: m.pick(flags.out.clone(), "out")?,
            preset,
            steps: m.pick(flags.steps, "steps")?,
            times: m.list(&flags.times, "times")?,
            chi_min: m.pick(flags.chi_min, "chi-min")?.unwrap_or(1e-3),
            chi_max: m.pick(flags.chi_max, "chi-max")?.unwrap_or(1e4),
            points_per_decade: m.pick(flags.points_per_decade, "points-per-decade")?.unwrap_or(8),
            fit_chi: m.list(&flags.fit_chi, "fit-chi")?.unwrap_or_default(),
            gamma_si: m.pick(flags.gamma_si, "gamma-si")?,
            omega0_si: m.pick(flags.omega0_si, "omega0-si")?,
            length_si: m.pick(flags.length_si, "length-si")?,
            length_rate_si: m.pick(flags.length_rate_si, "length-rate-si")?,
        })
    }

    fn params(&self) -> Result<ModelParams, CliError> {
        let d = self.d.ok_or_else(|| usage("missing --d"))?;
        Ok(ModelParams::new(d, self.chi)?)
    }

    fn required(&self, v: Option<f64>, flag: &str) -> Result<f64, CliError> {
        v.ok_or_else(|| usage(format!("missing --{flag}")))
    }
}

fn preset_for(settings: &Settings, allowed: &[Preset], command: &str) -> Result<Option<Preset>, CliError> {
    match settings.preset {
        Some(p) if allowed.contains(&p) => Ok(Some(p)),
        Some(p) => Err(usage(format!("preset {} does not apply to `{command}`", p.name()))),
        None => Ok(None),
    }
}

/// Executes one command; `paper-figures` writes its files and returns the
/// list of paths.
pub fn execute(command: Command, s: &Settings) -> Result<Output, CliError> {
    use Preset::*;
    let num = &s.numerics;
    let out = match command {
        Command::Simulate => match preset_for(s, &[Fig4, Fig6, Fig7, Fig8], "simulate")? {
            Some(p) => p.run(num)?,
            None => {
                let p = s.params()?;
                Output::Table(presets::trajectory_table(&presets::simulate(&p, s.t_end, num)?))
            }
        },
        Command::Volterra => {
            preset_for(s, &[], "volterra")?;
            Output::Table(presets::volterra_table(&s.params()?, s.t_end, s.steps)?)
        }
        Command::GammaInf => match preset_for(s, &[Fig5], "gamma-inf")? {
            Some(p) => p.run(num)?,
            None => {
                let d = s.required(s.d, "d")?;
                let chis = presets::log_sweep(s.chi_min, s.chi_max, s.points_per_decade)?;
                let fits: Vec<(f64, f64)> = s.fit_chi.iter().map(|&c| (d, c)).collect();
                Output::Table(presets::gamma_inf_table(&[d], &chis, &fits, num)?)
            }
        },
        Command::Spectrum => match preset_for(s, &[Fig2, Fig9], "spectrum")? {
            Some(p) => p.run(num)?,
            None => {
                let times = s.times.as_ref().ok_or_else(|| usage("missing --times"))?;
                Output::Table(presets::spectrum_table(&s.params()?, times, num)?)
            }
        },
        Command::Classify => match preset_for(s, &[Sec5], "classify")? {
            Some(p) => p.run(num)?,
            None => Output::Lines(vec![presets::classify_line(&s.params()?)?]),
        },
        Command::Mirror => match preset_for(s, &[Sec5], "mirror")? {
            Some(p) => p.run(num)?,
            None => Output::Lines(vec![presets::mirror_line(
                s.required(s.omega0_si, "omega0-si")?,
                s.required(s.length_si, "length-si")?,
                s.required(s.length_rate_si, "length-rate-si")?,
                s.gamma_si,
            )?]),
        },
        Command::PaperFigures => {
            let dir = s.out.as_ref().ok_or_else(|| usage("paper-figures needs --out <dir>"))?;
            Output::Lines(write_paper_figures(dir, num)?)
        }
    };
    Ok(out)
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn render(output: &Output) -> String {
    match output {
        Output::Table(t) => t.to_csv(),
        Output::Lines(lines) => lines.iter().map(|l| format!("{l}\n")).collect(),
    }
}

/// Writes to `path`, or to the process stdout when absent.
pub fn write_output(output: &Output, path: Option<&Path>) -> Result<(), CliError> {
    let text = render(output);
    match path {
        Some(p) => fs::write(p, text).map_err(io_err(p)),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

/// Runs every preset into `dir`: `<preset>.csv`, or `.txt` for reports.
pub fn write_paper_figures(dir: &Path, num: &Numerics) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for preset in Preset::ALL {
        let output = preset.run(num)?;
        let ext = match output {
            Output::Table(_) => "csv",
            Output::Lines(_) => "txt",
        };
        let path = dir.join(format!("{}.{ext}", preset.name()));
        write_output(&output, Some(&path))?;
        written.push(path.display().to_string());
    }
    Ok(written)
}

/// Worker count from a `CHIRPED_BATH_THREADS` value; `None` leaves
/// rayon's default.
pub fn parse_thread_cap(value: Option<&str>) -> Result<Option<usize>, CliError> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

fn run(cli: &Cli, threads: Option<&str>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let settings = Settings::resolve(&cli.flags)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = parse_thread_cap(threads)? {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| usage(format!("thread pool: {e}")))?;
    let output = pool.install(|| execute(cli.command, &settings))?;
    match (cli.command, settings.out.as_deref()) {
        (Command::PaperFigures, _) | (_, None) => stdout
            .write_all(render(&output).as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
        (_, Some(path)) => write_output(&output, Some(path)),
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
/// `threads` stands in for the `CHIRPED_BATH_THREADS` value. Results go to
/// `stdout`; diagnostics to stderr.
pub fn run_with<I, T>(args: I, threads: Option<&str>, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli, threads, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    let threads = std::env::var(THREADS_ENV).ok();
    run_with(std::env::args_os(), threads.as_deref(), &mut io::stdout().lock())
}

#[cfg(test)]
mod tests;
