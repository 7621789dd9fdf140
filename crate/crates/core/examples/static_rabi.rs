//! Vacuum Rabi oscillations in a static bath: discrete modes against the
//! closed form.

use chirped_bath::closedform::static_exact_ca;
use chirped_bath::dynamics::{evolve, init_state, IntegratorConfig};
use chirped_bath::model::{build_grid, rabi_frequency, ModelParams};

fn main() -> chirped_bath::Result<()> {
    let p = ModelParams::new(8.0, 0.0)?;
    let grid = build_grid(&p, 1.0, 10.0)?;
    let traj = evolve(&init_state(&grid), &grid, &p, &IntegratorConfig::default(), 1.0)?;

    println!("Omega = {:.4}, {} modes", rabi_frequency(&p)?, grid.len());
    println!("{:>6} {:>12} {:>12}", "t", "pa", "exact");
    for (t, pa) in traj.times.iter().zip(&traj.pa).step_by(5) {
        let exact = static_exact_ca(*t, &p)?.norm_sqr();
        println!("{t:>6.2} {pa:>12.6} {exact:>12.6}");
    }
    Ok(())
}
