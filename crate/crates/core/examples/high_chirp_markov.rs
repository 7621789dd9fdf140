//! A fast sweep turns strong coupling back into exponential decay at the
//! rate Γ∞.

use chirped_bath::analysis::{fit_decay, FitMode};
use chirped_bath::closedform::gamma_infinity;
use chirped_bath::cli::presets::simulate;
use chirped_bath::cli::Numerics;
use chirped_bath::model::{xi, ModelParams};

fn main() -> chirped_bath::Result<()> {
    let p = ModelParams::new(8.0, 400.0)?;
    let traj = simulate(&p, 1.0, &Numerics::default())?;
    let fit = fit_decay(&traj, (0.1, 1.0), FitMode::Direct)?;

    println!("xi            {:.2}", xi(&p)?);
    println!("Gamma_inf     {:.4}", gamma_infinity(&p)?);
    println!("fitted rate   {:.4} (rms {:.1e})", fit.rate, fit.rms_residual);
    Ok(())
}
