//! Markov decay rate against chirp for a few couplings.

use chirped_bath::closedform::gamma_infinity;
use chirped_bath::cli::presets::log_sweep;
use chirped_bath::model::ModelParams;

fn main() -> chirped_bath::Result<()> {
    let ds = [0.5, 1.0, 2.0];
    print!("{:>10}", "chi");
    for d in ds {
        print!(" {:>10}", format!("d={d}"));
    }
    println!();
    for chi in log_sweep(1e-2, 1e4, 2)? {
        print!("{chi:>10.3e}");
        for d in ds {
            print!(" {:>10.4}", gamma_infinity(&ModelParams::new(d, chi)?)?);
        }
        println!();
    }
    Ok(())
}
