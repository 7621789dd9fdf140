//! A slow chirp raises the Rabi frequency slightly.

use chirped_bath::analysis::extract_rabi;
use chirped_bath::closedform::perturbed_rabi;
use chirped_bath::cli::presets::simulate;
use chirped_bath::cli::Numerics;
use chirped_bath::model::ModelParams;

fn main() -> chirped_bath::Result<()> {
    let num = Numerics::default();
    let chirped = ModelParams::new(8.0, 2.0)?;
    let static_run = extract_rabi(&simulate(&chirped.with_chi(0.0)?, 3.0, &num)?)?;
    let chirped_run = extract_rabi(&simulate(&chirped, 3.0, &num)?)?;
    let (omega, shift) = perturbed_rabi(&chirped)?;

    println!("measured static   {:.4} +- {:.4}", static_run.omega, static_run.uncertainty);
    println!("measured chirped  {:.4} +- {:.4}", chirped_run.omega, chirped_run.uncertainty);
    println!("measured shift    {:+.4}", chirped_run.omega - static_run.omega);
    println!("predicted         {omega:.4} (shift {shift:+.4})");
    Ok(())
}
