//! Search a balanced inner code for the trimming deletion channel and decode
//! a noisy codeword by maximum likelihood.

use repeatcode::inner_code::{search_inner_code, SearchConfig};
use repeatcode::rng::stream_rng;
use repeatcode::ChannelModel;

pub fn run() -> repeatcode::Result<()> {
    let channel = ChannelModel::deletion(0.1)?;
    let law = channel.trimming_repeat()?;
    let mut cfg = SearchConfig::new(6, 20);
    cfg.zero_run_limit = Some(4);
    cfg.candidates = 4;
    cfg.mc_trials = 500;
    let code = search_inner_code(&law, &cfg, 11)?;
    let est = code.est_failure();
    println!(
        "{} codewords of length {}, rate {:.3}, failure {:.3} +- {:.3}",
        code.codebook().len(),
        code.block_len(),
        code.rate(),
        est.p_hat,
        est.stderr
    );

    let mut rng = stream_rng(3, 0);
    for msg in [0u64, 17, 63] {
        let x = code.encode(msg)?;
        let y = law.apply_with(x, &mut rng);
        let d = code.decode(&y);
        println!("msg {msg:>2}: {x} -> {y} -> {} (gap {:.2})", d.msg, d.second_best_gap);
    }
    Ok(())
}

fn main() -> repeatcode::Result<()> {
    run()
}
