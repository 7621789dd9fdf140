//! Runs a named preset and prints its CSV, as `chirped-bath simulate
//! --preset fig8` would.

use chirped_bath::cli::{Numerics, Output, Preset};

fn main() -> chirped_bath::Result<()> {
    match Preset::Fig8.run(&Numerics::default())? {
        Output::Table(table) => {
            let csv = table.to_csv();
            for line in csv.lines().take(6) {
                println!("{line}");
            }
            println!("... {} rows", csv.lines().count() - 1);
        }
        Output::Lines(lines) => lines.iter().for_each(|l| println!("{l}")),
    }
    Ok(())
}
