//! Coupling and chirp regimes over a small (d, chi) grid.

use chirped_bath::analysis::classify;
use chirped_bath::model::ModelParams;

fn main() -> chirped_bath::Result<()> {
    for d in [0.2, 2.0, 8.0] {
        for chi in [0.0, 2.0, 20.0, 400.0] {
            let r = classify(&ModelParams::new(d, chi)?);
            let xi = r.xi.map_or("-".to_string(), |x| format!("{x:.3}"));
            println!("d={d:<4} chi={chi:<6} coupling={:<7} chirp={:<15} xi={xi}", r.coupling.to_string(), r.chirp.to_string());
        }
    }
    Ok(())
}
