//! Sliding-window density segmentation on a biased Dobrushin channel
//! (deletions plus bit flips), at three block lengths.

use repeatcode::harness::{density_check, DensityCheckConfig};

pub fn run() -> repeatcode::Result<()> {
    let cfg = DensityCheckConfig {
        trials: 500,
        ..DensityCheckConfig::default()
    };
    let (rows, pass) = density_check(&cfg)?;
    for r in &rows {
        println!(
            "m = {:>2}, window {:>2}: misclassified {:>3}/{} ({:.3})",
            r.block_len, r.window_len, r.misclassified, r.trials, r.rate
        );
    }
    println!("decreasing: {pass}");
    Ok(())
}

fn main() -> repeatcode::Result<()> {
    run()
}
