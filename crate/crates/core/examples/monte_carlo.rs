//! Small Monte Carlo run; writes trials.csv and summary.json to a temporary
//! directory and checks the summary against the CSV.

use repeatcode::harness::{aggregate, read_trials_csv, run_simulation, write_outputs, ExperimentConfig};

pub fn run() -> repeatcode::Result<()> {
    let cfg = ExperimentConfig::from_json(
        r#"{
            "name": "monte-carlo-example",
            "channel": {"kind": "repeat", "pmf": {"type": "deletion", "d": 0.05}},
            "inner": {"block_len": 20, "candidates": 2, "mc_trials": 300},
            "outer": {"q": 4, "n_rs": 15, "k_rs": 11},
            "eta": 0.5,
            "trials": 200,
            "master_seed": 4
        }"#,
    )?;
    let (exp, outcome) = run_simulation(&cfg)?;
    let s = &outcome.summary;
    println!("failures {}/{} = {:.4} +- {:.4}", s.failures, s.trials, s.failure_rate, s.stderr);
    if let Some(t) = &s.taxonomy {
        println!("type 3 histogram {:?}, type 4 histogram {:?}", t.type3, t.type4);
    }

    let dir = std::env::temp_dir().join(format!("repeatcode-example-{}", std::process::id()));
    write_outputs(&dir, &exp, &outcome)?;
    let again = aggregate(&exp, &read_trials_csv(&dir.join("trials.csv"))?);
    println!("summary reproduced from CSV: {}", again == outcome.summary);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() -> repeatcode::Result<()> {
    run()
}
