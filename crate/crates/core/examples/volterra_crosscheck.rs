//! The continuum memory-kernel solver against the discrete bath.

use chirped_bath::cli::presets::simulate;
use chirped_bath::cli::Numerics;
use chirped_bath::model::ModelParams;
use chirped_bath::volterra::{solve_volterra, VolterraConfig};

fn main() -> chirped_bath::Result<()> {
    let p = ModelParams::new(8.0, 20.0)?;
    let cfg = VolterraConfig::for_params(&p, 1.0);
    let vol = solve_volterra(&p, 1.0, &cfg)?;
    let discrete = simulate(&p, 1.0, &Numerics::default())?;

    println!("steps {}, convergence ratio {:.2}, error estimate {:.1e}", cfg.steps, vol.convergence_ratio, vol.max_error());
    // Compare on the times both solvers sample.
    let mut worst = 0.0f64;
    for (t, pa) in vol.trajectory.times.iter().zip(&vol.trajectory.pa) {
        if let Some(i) = discrete.times.iter().position(|s| (s - t).abs() < 1e-9) {
            worst = worst.max((pa - discrete.pa[i]).abs());
        }
    }
    println!("max |pa_volterra - pa_discrete| = {worst:.2e}");
    Ok(())
}
