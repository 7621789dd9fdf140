//! Chirp from a moving cavity mirror, and the laboratory scenarios. A
//! shortening outer cavity sweeps the modes upwards.

use chirped_bath::analysis::{chirp_to_gamma_units, mirror_chirp};
use chirped_bath::cli::presets::{laboratory_lines, LAB_GAMMA_SI, LAB_OMEGA0_SI, LAB_OUTER_LENGTH_SI};

fn main() -> chirped_bath::Result<()> {
    for speed in [-0.1, -0.65] {
        let chi_si = mirror_chirp(LAB_OMEGA0_SI, LAB_OUTER_LENGTH_SI, speed)?;
        println!(
            "dL/dt = {speed} m/s: chi = {chi_si:.3e} s^-2 = {:.1} gamma^2",
            chirp_to_gamma_units(chi_si, LAB_GAMMA_SI)
        );
    }
    for line in laboratory_lines()? {
        println!("{line}");
    }
    Ok(())
}
