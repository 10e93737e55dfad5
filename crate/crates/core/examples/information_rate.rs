//! Exact information rates of the deletion channel for small blocklengths,
//! and the cost of trimming at the optimizing input.

use repeatcode::harness::info_rate_table;
use repeatcode::info_rate::{DEFAULT_BA_TOL, DEFAULT_BUDGET};
use repeatcode::ChannelModel;

pub fn run() -> repeatcode::Result<()> {
    let channel = ChannelModel::deletion(0.3)?;
    let rows = info_rate_table(&channel, &[1, 2, 3, 4, 5], DEFAULT_BA_TOL, DEFAULT_BUDGET)?;
    println!("{}", channel.describe());
    println!("n  rate      I_RC      I_TRC     gap");
    for r in rows {
        println!("{}  {:.6}  {:.6}  {:.6}  {:.6}", r.n, r.info_rate, r.i_rc, r.i_trc, r.gap);
    }
    Ok(())
}

fn main() -> repeatcode::Result<()> {
    run()
}
