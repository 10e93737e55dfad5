use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use repeatcode::harness::{
    info_rate_table, run_lemma_checks, run_scaling_study, scaling_trend_holds, write_csv, write_json,
    write_outputs, Experiment, ExperimentConfig, LemmaConfig,
};
use repeatcode::info_rate::{DEFAULT_BA_TOL, DEFAULT_BUDGET};
use repeatcode::{BitString, ChannelSpec, Error, InnerCode, OuterCodeParams};

#[derive(Parser)]
#[command(name = "repeatcode", version, about = "Concatenated codes for repeat and Dobrushin channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo run: writes trials.csv, summary.json, code.json, params.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Reuse an inner code instead of searching.
        #[arg(long)]
        code: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Failure rate at several outer sizes, e.g. `--sizes 4:15:11,5:31:23,6:63:47`.
    Scaling {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "4:15:11,5:31:23,6:63:47")]
        sizes: Vec<String>,
    },
    /// Search an inner code and write it as JSON.
    SearchInner {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact information rates for blocklengths 1..=n-max.
    InfoRate {
        /// Channel JSON; `--deletion` is a shortcut.
        #[arg(long, conflicts_with = "deletion")]
        channel: Option<PathBuf>,
        #[arg(long)]
        deletion: Option<f64>,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = DEFAULT_BA_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical checks of the trimming, cutting and density-segmentation bounds.
    LemmaChecks {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a message (a 0/1 string) with the code of `--code`.
    Encode {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        message: String,
    },
    /// Decode a channel output (a 0/1 string, or `@file`).
    Decode {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        input: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parameter(_) | Error::Infeasible(_) | Error::Budget(_) | Error::Json(_) => 2,
                Error::Decode(_) | Error::Length { .. } | Error::BitParse(_) => 3,
                Error::Io(_) => 1,
            })
        }
    }
}

fn load_code(path: &Path) -> repeatcode::Result<InnerCode> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn experiment(config: &Path, code: &Path) -> repeatcode::Result<Experiment> {
    Experiment::with_code(&ExperimentConfig::load(config)?, load_code(code)?)
}

fn parse_size(s: &str) -> repeatcode::Result<OuterCodeParams> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<usize>().map_err(|_| Error::Parameter(format!("bad size {s:?}")));
    match parts.as_slice() {
        [q, n, k] => Ok(OuterCodeParams::new(num(q)? as u32, num(n)?, num(k)?)),
        _ => Err(Error::Parameter(format!("size {s:?} is not q:n:k"))),
    }
}

fn run(command: Command) -> repeatcode::Result<()> {
    match command {
        Command::Simulate {
            config,
            out,
            code,
            trials,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            let out = out
                .or_else(|| cfg.out_dir.clone())
                .ok_or_else(|| Error::Parameter("no output directory (--out or out_dir)".into()))?;
            let exp = match code {
                Some(path) => Experiment::with_code(&cfg, load_code(&path)?)?,
                None => Experiment::build(&cfg)?,
            };
            let outcome = exp.run()?;
            write_outputs(&out, &exp, &outcome)?;
            println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
        }
        Command::Scaling { config, out, sizes } => {
            let cfg = ExperimentConfig::load(&config)?;
            let sizes = sizes.iter().map(|s| parse_size(s)).collect::<repeatcode::Result<Vec<_>>>()?;
            let points = run_scaling_study(&cfg, &sizes)?;
            fs::create_dir_all(&out)?;
            write_csv(&out.join("scaling.csv"), &points)?;
            for p in &points {
                println!(
                    "n_rs={:>4} m={:>3} L={:>4} rate={:.4} failures={}/{} ({:.4} +- {:.4})",
                    p.n_rs, p.msg_bits, p.block_len, p.realized_rate, p.failures, p.trials, p.failure_rate, p.stderr
                );
            }
            println!("non-increasing within 2 sigma: {}", scaling_trend_holds(&points, 2.0));
        }
        Command::SearchInner { config, out } => {
            let exp = Experiment::build(&ExperimentConfig::load(&config)?)?;
            write_json(&out, exp.params.inner())?;
            let est = exp.params.inner().est_failure();
            println!(
                "m={} L={} estimated failure {:.4} +- {:.4} over {} trials",
                exp.params.inner().msg_bits(),
                exp.params.inner().block_len(),
                est.p_hat,
                est.stderr,
                est.trials
            );
        }
        Command::InfoRate {
            channel,
            deletion,
            n_max,
            tol,
            budget,
            out,
        } => {
            let spec = match (channel, deletion) {
                (Some(path), _) => serde_json::from_str(&fs::read_to_string(path)?)?,
                (None, Some(d)) => ChannelSpec::deletion(d),
                (None, None) => return Err(Error::Parameter("give --channel or --deletion".into())),
            };
            let ns: Vec<usize> = (1..=n_max).collect();
            let rows = info_rate_table(&spec.build()?, &ns, tol, budget)?;
            println!("n  info_rate  i_rc      i_trc     gap       H(p*)");
            for r in &rows {
                println!(
                    "{:<2} {:.6}   {:.6}  {:.6}  {:.6}  {:.4}{}",
                    r.n,
                    r.info_rate,
                    r.i_rc,
                    r.i_trc,
                    r.gap,
                    r.optimizer_entropy,
                    if r.converged { "" } else { "  (not converged)" }
                );
            }
            if let Some(out) = out {
                write_csv(&out, &rows)?;
            }
        }
        Command::LemmaChecks { config, out } => {
            let cfg: LemmaConfig = match config {
                Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
                None => LemmaConfig::default(),
            };
            let report = run_lemma_checks(&cfg)?;
            if let Some(out) = out {
                fs::create_dir_all(&out)?;
                write_json(&out.join("lemma_checks.json"), &report)?;
            }
            println!("trimming gap shrinks per bit: {}", report.trimming_pass);
            println!("cutting bound holds:          {}", report.cutting_pass);
            println!("density segmentation:         {}", report.density_pass);
            for r in &report.density {
                println!("  m={:<3} misclassified {}/{}", r.block_len, r.misclassified, r.trials);
            }
        }
        Command::Encode { config, code, message } => {
            let exp = experiment(&config, &code)?;
            let msg: BitString = message.trim().parse()?;
            println!("{}", exp.params.encode(&msg)?);
        }
        Command::Decode { config, code, input } => {
            let exp = experiment(&config, &code)?;
            let text = match input.strip_prefix('@') {
                Some(path) => fs::read_to_string(path)?,
                None => input,
            };
            let y: BitString = text.trim().parse()?;
            println!("{}", exp.params.decode(&y)?);
        }
    }
    Ok(())
}
