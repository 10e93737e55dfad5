//! Full encode, channel, decode round trip with the error taxonomy of one
//! transmission.

use rand::Rng;
use repeatcode::harness::{Experiment, ExperimentConfig};
use repeatcode::rng::stream_rng;
use repeatcode::BitString;

pub fn run() -> repeatcode::Result<()> {
    let cfg = ExperimentConfig::from_json(
        r#"{
            "channel": {"kind": "repeat", "pmf": {"type": "deletion", "d": 0.05}},
            "inner": {"block_len": 20, "candidates": 2, "mc_trials": 300},
            "outer": {"q": 4, "n_rs": 15, "k_rs": 11},
            "eta": 0.5,
            "trials": 1,
            "master_seed": 9
        }"#,
    )?;
    let exp = Experiment::build(&cfg)?;
    let p = &exp.params;
    println!(
        "message {} bits -> {} channel bits (rate {:.4}), buffer {} zeros, threshold {}",
        p.message_bits(),
        p.total_len(),
        p.realized_rate(),
        p.buffer_len(),
        p.buffer_threshold()
    );

    let mut rng = stream_rng(1, 0);
    let message = BitString::from_bits((0..p.message_bits()).map(|_| rng.gen::<bool>()));
    let x = p.encode(&message)?;
    let sent = exp.channel.transmit(&x, &mut rng);
    let report = p.decode_detailed(&sent.output);
    let tax = p.classify_errors(&message, &sent, &report)?;
    println!("received {} bits in {} segments", sent.output.len(), report.segmentation.segments.len());
    println!("taxonomy {:?}, weighted {}", tax.counts(), tax.weighted_edit_distance);
    match report.result {
        Ok(m) => println!("decoded correctly: {}", m == message),
        Err(e) => println!("decoder gave up: {e}"),
    }
    Ok(())
}

fn main() -> repeatcode::Result<()> {
    run()
}
