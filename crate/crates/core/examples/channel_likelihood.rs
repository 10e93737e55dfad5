//! Sample a deletion channel and score the output under the repeat and
//! trimming-repeat likelihoods.

use repeatcode::channels::{likelihood_rc, likelihood_trc};
use repeatcode::rng::stream_rng;
use repeatcode::{BitString, ChannelModel, RepeatDistribution};

pub fn run() -> repeatcode::Result<()> {
    let dist = RepeatDistribution::deletion(0.2)?;
    let channel = ChannelModel::Repeat(dist.clone());
    let x: BitString = "0110100111010010".parse()?;
    let mut rng = stream_rng(42, 0);
    let sent = channel.transmit(&x, &mut rng);
    println!("x = {x}");
    println!("y = {}", sent.output);
    println!("P_RC(y | x)  = {:.6e}", likelihood_rc(&dist, &x, &sent.output));
    println!("P_TRC(y | x) = {:.6e}", likelihood_trc(&dist, &x, &sent.output));

    // Same output under a different input.
    let other: BitString = "1111111100000000".parse()?;
    println!("P_RC(y | x') = {:.6e}", likelihood_rc(&dist, &other, &sent.output));

    let poisson = ChannelModel::poisson(1.0, 1e-12)?;
    let y = poisson.apply(&x, 7);
    println!("Poisson(1) output of length {}: {y}", y.len());
    println!("log P = {:.4}", poisson.log_likelihood(&x, &y));
    Ok(())
}

fn main() -> repeatcode::Result<()> {
    run()
}
