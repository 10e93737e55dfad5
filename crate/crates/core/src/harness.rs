//! Experiment driver: end-to-end Monte Carlo runs, scaling studies, exact
//! small-`n` rate checks and the density-segmentation check.
//!
//! Every random draw is keyed by the master seed: the inner-code search uses
//! stream [`INNER_SEARCH_STREAM`](crate::rng::INNER_SEARCH_STREAM), candidate
//! scoring uses a seed derived from it, and trial `i` uses stream `i`. Trials
//! are collected in index order, so results do not depend on thread count.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{balance_window, windows_balanced, BitString};
use crate::channels::{ChannelModel, ChannelSpec, DobrushinLaw, RepeatDistribution, Transmission};
use crate::concat::{segment_by_density, structural_errors, ConcatParams, DensityRule, ErrorTaxonomy, Mode, ParamsSummary};
use crate::error::{param, Error, Result};
use crate::info_rate::{
    build_transition_table, compare_rc_trc, entropy_bits, maximize_mi, mutual_information, uniform_input,
    DEFAULT_BA_MAX_ITER, DEFAULT_BA_TOL, DEFAULT_BUDGET,
};
use crate::inner_code::{search_inner_code, FailureEstimate, InnerCode, SearchConfig, DEFAULT_MAX_CODEWORDS};
use crate::outer::{OuterCode, OuterCodeParams};
use crate::rng::stream_rng;

/// First line of every `trials.csv`.
pub const TRIALS_CSV_VERSION: &str = "# repeatcode trials v1";

fn default_mode() -> Mode {
    Mode::Repeat
}

fn default_true() -> bool {
    true
}

fn default_zeta() -> f64 {
    0.5
}

fn default_gamma() -> f64 {
    0.25
}

fn default_candidates() -> usize {
    8
}

fn default_mc_trials() -> usize {
    1000
}

fn default_max_codewords() -> usize {
    DEFAULT_MAX_CODEWORDS
}

/// Inner-code search settings. The message size is not configurable: it is
/// always the outer symbol size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerConfig {
    pub block_len: usize,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_candidates")]
    pub candidates: usize,
    #[serde(default = "default_mc_trials")]
    pub mc_trials: usize,
    #[serde(default = "default_max_codewords")]
    pub max_codewords: usize,
    /// Dobrushin mode: the decoder assumes up to this many bits cut on each
    /// side of a segment (default: the window length).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trim_max: Option<usize>,
}

/// A complete, reproducible experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    /// The transmission channel (untrimmed).
    pub channel: ChannelSpec,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    pub inner: InnerConfig,
    pub outer: OuterCodeParams,
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    pub trials: usize,
    pub master_seed: u64,
    /// Calibrated upper bound on the failure rate, checked by `simulate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_bound: Option<f64>,
    /// Record the error taxonomy of every trial.
    #[serde(default = "default_true")]
    pub instrumented: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Law the inner decoder uses, and the zero-run limit imposed on codewords.
    fn inner_law(&self, channel: &ChannelModel) -> Result<(ChannelModel, Option<usize>)> {
        let l = self.inner.block_len as f64;
        match self.mode {
            Mode::Repeat => {
                let threshold = (0.5 * channel.mean_output_len() * self.eta * l + 1e-9).floor() as usize;
                Ok((channel.trimming_repeat()?, Some(threshold.max(1))))
            }
            Mode::Dobrushin => {
                let nu = self.nu.ok_or_else(|| Error::Parameter("Dobrushin mode needs nu".into()))?;
                let window = (nu * self.eta * l).round() as usize;
                let t = RepeatDistribution::uniform(0, self.inner.trim_max.unwrap_or(window))?;
                Ok((channel.trimming_dobrushin(t.clone(), t), None))
            }
        }
    }

    pub fn search_config(&self) -> Result<SearchConfig> {
        let channel = self.channel.build()?;
        let (_, zero_run_limit) = self.inner_law(&channel)?;
        Ok(SearchConfig {
            msg_bits: self.outer.symbol_bits(),
            block_len: self.inner.block_len,
            zeta: self.inner.zeta,
            gamma: self.inner.gamma,
            zero_run_limit,
            candidates: self.inner.candidates,
            mc_trials: self.inner.mc_trials,
            max_codewords: self.inner.max_codewords,
        })
    }
}

/// A built experiment: the channel and the assembled code.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub channel: ChannelModel,
    pub params: ConcatParams,
}

impl Experiment {
    /// Builds the channel, searches the inner code and assembles the code.
    pub fn build(config: &ExperimentConfig) -> Result<Self> {
        Self::assemble(config, None)
    }

    /// Like [`Experiment::build`] but with a previously found inner code.
    pub fn with_code(config: &ExperimentConfig, code: InnerCode) -> Result<Self> {
        Self::assemble(config, Some(code))
    }

    fn assemble(config: &ExperimentConfig, code: Option<InnerCode>) -> Result<Self> {
        let channel = config.channel.build()?;
        if channel.is_trimming() {
            return param("the transmission channel must not be a trimming channel");
        }
        OuterCode::new(config.outer.clone())?;
        let (law, _) = config.inner_law(&channel)?;
        let inner = match code {
            Some(code) => {
                if code.model() != &law {
                    return param("inner code was built for a different decoding law");
                }
                code
            }
            None => search_inner_code(&law, &config.search_config()?, config.master_seed)?,
        };
        let density = match config.mode {
            Mode::Repeat => None,
            Mode::Dobrushin => Some(DensityRule {
                nu: config.nu.ok_or_else(|| Error::Parameter("Dobrushin mode needs nu".into()))?,
                kappa: config.kappa.ok_or_else(|| Error::Parameter("Dobrushin mode needs kappa".into()))?,
            }),
        };
        let params = ConcatParams::build(inner, config.outer.clone(), &channel, config.eta, config.mode, density)?;
        Ok(Self {
            config: config.clone(),
            channel,
            params,
        })
    }

    /// Runs trial `i`: random message, encode, channel, decode.
    pub fn run_trial(&self, i: u64) -> Result<TrialRecord> {
        let start = Instant::now();
        let mut rng = stream_rng(self.config.master_seed, i);
        let message = BitString::from_bits((0..self.params.message_bits()).map(|_| rng.gen::<bool>()));
        let x = self.params.encode(&message)?;
        let sent = self.channel.transmit(&x, &mut rng);
        let report = self.params.decode_detailed(&sent.output);
        let success = matches!(&report.result, Ok(m) if *m == message);
        let taxonomy = if self.config.instrumented {
            Some(self.params.classify_errors(&message, &sent, &report)?)
        } else {
            None
        };
        Ok(TrialRecord::new(
            i,
            success,
            report.segmentation.segments.len(),
            sent.output.len(),
            taxonomy,
            start.elapsed(),
        ))
    }

    pub fn run(&self) -> Result<SimulationOutcome> {
        let start = Instant::now();
        let records: Vec<TrialRecord> = (0..self.config.trials as u64)
            .into_par_iter()
            .map(|i| self.run_trial(i))
            .collect::<Result<_>>()?;
        let summary = aggregate(self, &records);
        Ok(SimulationOutcome {
            records,
            summary,
            wall_time: start.elapsed(),
        })
    }
}

/// One row of `trials.csv`. Equality ignores the wall time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub success: bool,
    pub segments: usize,
    pub output_len: usize,
    pub type1: Option<usize>,
    pub type2: Option<usize>,
    pub type3: Option<usize>,
    pub type4: Option<usize>,
    pub weighted: Option<usize>,
    /// Kept out of the CSV so reruns are byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl PartialEq for TrialRecord {
    fn eq(&self, other: &Self) -> bool {
        (self.trial, self.success, self.segments, self.output_len, self.taxonomy())
            == (other.trial, other.success, other.segments, other.output_len, other.taxonomy())
    }
}

impl TrialRecord {
    fn new(
        trial: u64,
        success: bool,
        segments: usize,
        output_len: usize,
        taxonomy: Option<ErrorTaxonomy>,
        wall_time: Duration,
    ) -> Self {
        Self {
            trial,
            success,
            segments,
            output_len,
            type1: taxonomy.map(|t| t.type1_buffer_lost),
            type2: taxonomy.map(|t| t.type2_codeword_vanished),
            type3: taxonomy.map(|t| t.type3_spurious_buffer),
            type4: taxonomy.map(|t| t.type4_inner_decode_fail),
            weighted: taxonomy.map(|t| t.weighted_edit_distance),
            wall_time,
        }
    }

    pub fn taxonomy(&self) -> Option<ErrorTaxonomy> {
        Some(ErrorTaxonomy::new(self.type1?, self.type2?, self.type3?, self.type4?))
    }
}

/// Distribution of each error count over trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyStats {
    pub type1: BTreeMap<usize, usize>,
    pub type2: BTreeMap<usize, usize>,
    pub type3: BTreeMap<usize, usize>,
    pub type4: BTreeMap<usize, usize>,
    pub mean_weighted: f64,
    pub max_weighted: usize,
    /// Failed trials whose weighted count was within the outer redundancy.
    /// Always zero if the budget accounting is sound.
    pub failures_within_budget: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub failure_rate: f64,
    pub stderr: f64,
    pub realized_rate: f64,
    pub mean_segments: f64,
    pub failure_bound: Option<f64>,
    pub within_bound: Option<bool>,
    pub taxonomy: Option<TaxonomyStats>,
}

pub struct SimulationOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: SimulationSummary,
    pub wall_time: Duration,
}

/// Aggregate statistics; a pure function of the records.
pub fn aggregate(exp: &Experiment, records: &[TrialRecord]) -> SimulationSummary {
    let trials = records.len();
    let failures = records.iter().filter(|r| !r.success).count();
    let rate = if trials == 0 { 0.0 } else { failures as f64 / trials as f64 };
    let redundancy = exp.params.outer().params().redundancy();
    let taxonomies: Option<Vec<ErrorTaxonomy>> = records.iter().map(TrialRecord::taxonomy).collect();
    let taxonomy = taxonomies.filter(|t| !t.is_empty()).map(|tax| {
        let hist = |k: usize| {
            let mut h = BTreeMap::new();
            for t in &tax {
                *h.entry(t.counts()[k]).or_insert(0) += 1;
            }
            h
        };
        TaxonomyStats {
            type1: hist(0),
            type2: hist(1),
            type3: hist(2),
            type4: hist(3),
            mean_weighted: tax.iter().map(|t| t.weighted_edit_distance as f64).sum::<f64>() / tax.len() as f64,
            max_weighted: tax.iter().map(|t| t.weighted_edit_distance).max().unwrap_or(0),
            failures_within_budget: records
                .iter()
                .zip(&tax)
                .filter(|(r, t)| !r.success && t.weighted_edit_distance <= redundancy)
                .count(),
        }
    });
    let bound = exp.config.failure_bound;
    SimulationSummary {
        name: exp.config.name.clone(),
        trials,
        failures,
        failure_rate: rate,
        stderr: if trials == 0 { 0.0 } else { (rate * (1.0 - rate) / trials as f64).sqrt() },
        realized_rate: exp.params.realized_rate(),
        mean_segments: if trials == 0 {
            0.0
        } else {
            records.iter().map(|r| r.segments as f64).sum::<f64>() / trials as f64
        },
        failure_bound: bound,
        within_bound: bound.map(|b| rate <= b),
        taxonomy,
    }
}

pub fn write_trials_csv(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut file = fs::File::create(path)?;
    writeln!(file, "{TRIALS_CSV_VERSION}")?;
    let mut w = csv::Writer::from_writer(file);
    for r in records {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let text = fs::read_to_string(path)?;
    match text.lines().next() {
        Some(TRIALS_CSV_VERSION) => {}
        other => return param(format!("unsupported trials.csv header {other:?}")),
    }
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(csv_error))
        .collect()
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Code parameters written next to the trials.
#[derive(Clone, Debug, Serialize)]
pub struct ParamsReport<'a> {
    pub config: &'a ExperimentConfig,
    pub channel: String,
    pub derived: ParamsSummary,
    pub inner_failure: FailureEstimate,
}

/// Writes `trials.csv`, `summary.json`, `code.json`, `params.json` and
/// `timing.json` into `dir`. Only `timing.json` varies between reruns.
pub fn write_outputs(dir: &Path, exp: &Experiment, outcome: &SimulationOutcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_trials_csv(&dir.join("trials.csv"), &outcome.records)?;
    write_json(&dir.join("summary.json"), &outcome.summary)?;
    write_json(&dir.join("code.json"), exp.params.inner())?;
    let report = ParamsReport {
        config: &exp.config,
        channel: exp.channel.describe(),
        derived: exp.params.summary(),
        inner_failure: exp.params.inner().est_failure(),
    };
    write_json(&dir.join("params.json"), &report)?;
    let total: Duration = outcome.records.iter().map(|r| r.wall_time).sum();
    write_json(
        &dir.join("timing.json"),
        &serde_json::json!({
            "wall_time_secs": outcome.wall_time.as_secs_f64(),
            "trial_time_secs": total.as_secs_f64(),
        }),
    )?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Builds the experiment and runs every trial.
pub fn run_simulation(config: &ExperimentConfig) -> Result<(Experiment, SimulationOutcome)> {
    let exp = Experiment::build(config)?;
    let outcome = exp.run()?;
    Ok((exp, outcome))
}

/// One size of a scaling study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub q: u32,
    pub n_rs: usize,
    pub k_rs: usize,
    pub msg_bits: usize,
    pub block_len: usize,
    pub total_len: usize,
    pub realized_rate: f64,
    pub trials: usize,
    pub failures: usize,
    pub failure_rate: f64,
    pub stderr: f64,
}

/// Runs `config` at each outer size. The inner block length is scaled with
/// the symbol size so the inner rate stays at the configured one.
pub fn run_scaling_study(config: &ExperimentConfig, sizes: &[OuterCodeParams]) -> Result<Vec<ScalingPoint>> {
    if sizes.len() < 3 {
        return param("a scaling study needs at least three sizes");
    }
    let base_bits = config.outer.symbol_bits() as f64;
    sizes
        .iter()
        .map(|outer| {
            let mut cfg = config.clone();
            cfg.outer = outer.clone();
            cfg.inner.block_len = (config.inner.block_len as f64 * outer.symbol_bits() as f64 / base_bits).round() as usize;
            cfg.failure_bound = None;
            let (exp, outcome) = run_simulation(&cfg)?;
            let s = &outcome.summary;
            Ok(ScalingPoint {
                q: outer.q,
                n_rs: outer.n_rs,
                k_rs: outer.k_rs,
                msg_bits: outer.symbol_bits(),
                block_len: cfg.inner.block_len,
                total_len: exp.params.total_len(),
                realized_rate: exp.params.realized_rate(),
                trials: s.trials,
                failures: s.failures,
                failure_rate: s.failure_rate,
                stderr: s.stderr,
            })
        })
        .collect()
}

/// Non-increasing failure rate up to `sigmas` combined standard errors.
pub fn scaling_trend_holds(points: &[ScalingPoint], sigmas: f64) -> bool {
    points.windows(2).all(|w| {
        let se = (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        w[1].failure_rate <= w[0].failure_rate + sigmas * se
    })
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Row of the `info-rate` table.
#[derive(Clone, Debug, Serialize)]
pub struct InfoRateRow {
    pub n: usize,
    pub channel: String,
    /// `sup I / n` under the repeat channel.
    pub info_rate: f64,
    pub i_rc: f64,
    pub i_trc: f64,
    pub gap: f64,
    pub optimizer_entropy: f64,
    pub converged: bool,
}

/// For each `n`: Blahut–Arimoto on the repeat channel, then the repeat and
/// trimming-repeat information at that optimizer.
pub fn info_rate_table(channel: &ChannelModel, ns: &[usize], tol: f64, budget: usize) -> Result<Vec<InfoRateRow>> {
    let Some(dist) = channel.repeat_distribution() else {
        return param("info-rate tables are defined for repeat channels");
    };
    ns.iter()
        .map(|&n| {
            let rc = build_transition_table(&ChannelModel::Repeat(dist.clone()), n, budget)?;
            let est = maximize_mi(&rc, tol, DEFAULT_BA_MAX_ITER)?;
            let cmp = compare_rc_trc(dist, n, &est.input_dist, budget)?;
            Ok(InfoRateRow {
                n,
                channel: channel.describe(),
                info_rate: est.info_rate,
                i_rc: cmp.i_rc,
                i_trc: cmp.i_trc,
                gap: cmp.gap,
                optimizer_entropy: entropy_bits(&est.input_dist),
                converged: est.converged,
            })
        })
        .collect()
}

fn default_trim_d() -> f64 {
    0.5
}

fn default_trim_n_max() -> usize {
    8
}

/// Check (a): the trimming gap per bit shrinks with `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrimCheckConfig {
    #[serde(default = "default_trim_d")]
    pub d: f64,
    #[serde(default = "default_trim_n_max")]
    pub n_max: usize,
}

impl Default for TrimCheckConfig {
    fn default() -> Self {
        Self {
            d: default_trim_d(),
            n_max: default_trim_n_max(),
        }
    }
}

/// Check (b): exact information of the trimming Dobrushin channel against
/// the Dobrushin channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutCheckConfig {
    pub d: f64,
    pub flip: f64,
    pub n_max: usize,
    pub trim_max: usize,
}

impl Default for CutCheckConfig {
    fn default() -> Self {
        Self {
            d: 0.1,
            flip: 0.05,
            n_max: 4,
            trim_max: 1,
        }
    }
}

/// Check (c): density segmentation of `c 0^b c 0^b ... c` streams.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityCheckConfig {
    pub channel: ChannelSpec,
    pub block_lens: Vec<usize>,
    pub eta: f64,
    pub nu: f64,
    pub kappa: f64,
    pub zeta: f64,
    pub gamma: f64,
    pub codewords: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for DensityCheckConfig {
    fn default() -> Self {
        Self {
            channel: ChannelSpec::deletion_flip(0.1, 0.05),
            block_lens: vec![16, 32, 64],
            eta: 0.5,
            nu: 1.0,
            kappa: 0.15,
            zeta: 0.5,
            gamma: 0.25,
            codewords: 3,
            trials: 2000,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaConfig {
    #[serde(default)]
    pub trimming: TrimCheckConfig,
    #[serde(default)]
    pub cutting: CutCheckConfig,
    #[serde(default)]
    pub density: DensityCheckConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrimRow {
    pub n: usize,
    pub i_rc: f64,
    pub i_trc: f64,
    pub gap: f64,
    pub gap_per_bit: f64,
    pub trim_pair_entropy: f64,
    pub distinct_trim_pairs: usize,
    pub within_entropy_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CutRow {
    pub n: usize,
    pub cap_dc: f64,
    pub cap_tdc: f64,
    /// Trimming-channel information at the Dobrushin optimizer.
    pub i_tdc_at_dc_optimizer: f64,
    /// `H(T_l) + H(T_r) + E[T_l] + E[T_r]` bits: the cut lengths plus at most
    /// one bit per cut symbol.
    pub allowance: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityRow {
    pub block_len: usize,
    pub window_len: usize,
    pub trials: usize,
    pub misclassified: usize,
    pub rate: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub trimming: Vec<TrimRow>,
    /// Gap per bit strictly decreasing from `n = 2` on, and within the
    /// trim-pair entropy bound everywhere.
    pub trimming_pass: bool,
    pub cutting: Vec<CutRow>,
    /// Zero cuts leave the information unchanged.
    pub cutting_zero_trim_equal: bool,
    pub cutting_pass: bool,
    pub density: Vec<DensityRow>,
    /// Misclassification non-increasing (within 2 standard errors) and lower
    /// at the largest block length than at the smallest, or zero throughout.
    pub density_pass: bool,
}

pub fn trimming_check(cfg: &TrimCheckConfig) -> Result<(Vec<TrimRow>, bool)> {
    let dist = RepeatDistribution::deletion(cfg.d)?;
    let rows: Vec<TrimRow> = (1..=cfg.n_max)
        .map(|n| {
            let c = compare_rc_trc(&dist, n, &uniform_input(n), DEFAULT_BUDGET)?;
            Ok(TrimRow {
                n,
                i_rc: c.i_rc,
                i_trc: c.i_trc,
                gap: c.gap,
                gap_per_bit: c.gap / n as f64,
                trim_pair_entropy: c.trim_pair_entropy,
                distinct_trim_pairs: c.distinct_trim_pairs,
                within_entropy_bound: c.gap <= 2.0 * c.trim_pair_entropy + 1e-12,
            })
        })
        .collect::<Result<_>>()?;
    let decreasing = rows
        .iter()
        .skip(1)
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| w[1].gap_per_bit < w[0].gap_per_bit);
    let pass = decreasing && rows.len() >= 3 && rows.iter().all(|r| r.within_entropy_bound);
    Ok((rows, pass))
}

pub fn cutting_check(cfg: &CutCheckConfig) -> Result<(Vec<CutRow>, bool, bool)> {
    let dc = ChannelModel::Dobrushin(DobrushinLaw::deletion_flip(cfg.d, cfg.flip)?);
    let t = RepeatDistribution::uniform(0, cfg.trim_max)?;
    let tdc = dc.trimming_dobrushin(t.clone(), t.clone());
    let none = dc.trimming_dobrushin(RepeatDistribution::point(0), RepeatDistribution::point(0));
    let allowance = 2.0 * (t.entropy_bits() + t.mean());
    let mut zero_equal = true;
    let rows: Vec<CutRow> = (1..=cfg.n_max)
        .map(|n| {
            let a = build_transition_table(&dc, n, DEFAULT_BUDGET)?;
            let c = build_transition_table(&tdc, n, DEFAULT_BUDGET)?;
            let z = build_transition_table(&none, n, DEFAULT_BUDGET)?;
            let est_dc = maximize_mi(&a, DEFAULT_BA_TOL, DEFAULT_BA_MAX_ITER)?;
            let est_tdc = maximize_mi(&c, DEFAULT_BA_TOL, DEFAULT_BA_MAX_ITER)?;
            let at_opt = mutual_information(&est_dc.input_dist, &c)?;
            let zero = mutual_information(&est_dc.input_dist, &z)?;
            zero_equal &= (zero - est_dc.mi).abs() < 1e-9;
            Ok(CutRow {
                n,
                cap_dc: est_dc.mi,
                cap_tdc: est_tdc.mi,
                i_tdc_at_dc_optimizer: at_opt,
                allowance,
                holds: est_tdc.mi + DEFAULT_BA_TOL >= est_dc.mi - allowance && at_opt >= est_dc.mi - allowance,
            })
        })
        .collect::<Result<_>>()?;
    let pass = zero_equal && rows.iter().all(|r| r.holds);
    Ok((rows, zero_equal, pass))
}

fn random_balanced_word<R: Rng + ?Sized>(len: usize, window: usize, gamma: f64, rng: &mut R) -> Result<BitString> {
    for _ in 0..crate::inner_code::FEASIBILITY_PROBE_LIMIT {
        let w = BitString::from_bits((0..len).map(|_| rng.gen::<bool>()));
        if windows_balanced(&w, window, gamma) {
            return Ok(w);
        }
    }
    Err(Error::Infeasible(format!("no balanced word of length {len} found")))
}

/// Fraction of streams `c_1 0^b ... 0^b c_k` whose density segmentation
/// loses a buffer, loses a codeword or invents a buffer.
pub fn density_check(cfg: &DensityCheckConfig) -> Result<(Vec<DensityRow>, bool)> {
    let channel = cfg.channel.build()?;
    if channel.is_trimming() {
        return param("the density check needs an untrimmed channel");
    }
    if cfg.codewords == 0 || cfg.trials == 0 {
        return param("codewords and trials must be at least 1");
    }
    let threshold = channel.ones_fraction() + cfg.kappa;
    let rows: Vec<DensityRow> = cfg
        .block_lens
        .iter()
        .map(|&m| {
            let b = (cfg.eta * m as f64).round() as usize;
            let window = (cfg.nu * cfg.eta * m as f64).round() as usize;
            let bal_window = balance_window(m, cfg.zeta);
            let misclassified = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| {
                    let mut rng = stream_rng(cfg.seed ^ (m as u64) << 32, t);
                    let mut x = BitString::new();
                    let mut code_ranges = Vec::new();
                    let mut buffer_ranges = Vec::new();
                    for j in 0..cfg.codewords {
                        if j > 0 {
                            buffer_ranges.push(x.len()..x.len() + b);
                            x.push_repeated(false, b);
                        }
                        let w = random_balanced_word(m, bal_window, cfg.gamma, &mut rng)?;
                        code_ranges.push(x.len()..x.len() + m);
                        x.extend_from(&w);
                    }
                    let sent: Transmission = channel.transmit(&x, &mut rng);
                    let seg = segment_by_density(&sent.output, window, threshold);
                    let spans = |rs: &[std::ops::Range<usize>]| rs.iter().map(|r| sent.span_of(r.clone())).collect::<Vec<_>>();
                    let counts = structural_errors(&spans(&code_ranges), &spans(&buffer_ranges), &seg, sent.output.len());
                    Ok(counts.iter().sum::<usize>() > 0)
                })
                .collect::<Result<Vec<bool>>>()?
                .into_iter()
                .filter(|&bad| bad)
                .count();
            let rate = misclassified as f64 / cfg.trials as f64;
            Ok(DensityRow {
                block_len: m,
                window_len: window,
                trials: cfg.trials,
                misclassified,
                rate,
                stderr: (rate * (1.0 - rate) / cfg.trials as f64).sqrt(),
            })
        })
        .collect::<Result<_>>()?;
    let non_increasing = rows.windows(2).all(|w| {
        let se = (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        w[1].rate <= w[0].rate + 2.0 * se
    });
    let all_zero = rows.iter().all(|r| r.misclassified == 0);
    let improves = match (rows.first(), rows.last()) {
        (Some(a), Some(z)) => z.rate < a.rate,
        _ => false,
    };
    Ok((rows, non_increasing && (improves || all_zero)))
}

pub fn run_lemma_checks(cfg: &LemmaConfig) -> Result<LemmaReport> {
    let (trimming, trimming_pass) = trimming_check(&cfg.trimming)?;
    let (cutting, cutting_zero_trim_equal, cutting_pass) = cutting_check(&cfg.cutting)?;
    let (density, density_pass) = density_check(&cfg.density)?;
    Ok(LemmaReport {
        trimming,
        trimming_pass,
        cutting,
        cutting_zero_trim_equal,
        cutting_pass,
        density,
        density_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_config() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{
                "name": "identity",
                "channel": {"kind": "repeat", "pmf": {"1": 1.0}},
                "inner": {"block_len": 14, "candidates": 1, "mc_trials": 10},
                "outer": {"q": 3, "n_rs": 7, "k_rs": 3},
                "eta": 0.5,
                "trials": 40,
                "master_seed": 3
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn identity_simulation_never_fails() {
        let (exp, out) = run_simulation(&identity_config()).unwrap();
        assert_eq!(out.summary.failures, 0);
        let tax = out.summary.taxonomy.unwrap();
        assert_eq!(tax.max_weighted, 0);
        assert_eq!(exp.params.inner().msg_bits(), 6);
    }

    #[test]
    fn csv_round_trip_reproduces_summary() {
        let mut cfg = identity_config();
        cfg.channel = ChannelSpec::deletion(0.05);
        cfg.inner.block_len = 18;
        let (exp, out) = run_simulation(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_outputs(dir.path(), &exp, &out).unwrap();
        let records = read_trials_csv(&dir.path().join("trials.csv")).unwrap();
        assert_eq!(aggregate(&exp, &records), out.summary);
        let text = fs::read_to_string(dir.path().join("trials.csv")).unwrap();
        assert!(text.starts_with(TRIALS_CSV_VERSION));
        let code: InnerCode = serde_json::from_str(&fs::read_to_string(dir.path().join("code.json")).unwrap()).unwrap();
        assert_eq!(code.codebook(), exp.params.inner().codebook());
        let again = Experiment::with_code(&cfg, code).unwrap().run().unwrap();
        assert_eq!(again.records, out.records);
    }

    #[test]
    fn unknown_fields_and_bad_modes_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let mut cfg = identity_config();
        cfg.mode = Mode::Dobrushin;
        assert!(Experiment::build(&cfg).is_err());
        let mut cfg = identity_config();
        cfg.channel = ChannelSpec::deletion(0.1);
        cfg.channel.kind = crate::channels::SpecKind::TrimmingRepeat;
        assert!(Experiment::build(&cfg).is_err());
    }

    #[test]
    fn scaling_needs_three_sizes() {
        let cfg = identity_config();
        let sizes = [OuterCodeParams::new(3, 7, 3), OuterCodeParams::new(4, 15, 7)];
        assert!(run_scaling_study(&cfg, &sizes).is_err());
    }

    #[test]
    fn density_check_identity_channel_is_clean() {
        let cfg = DensityCheckConfig {
            channel: ChannelSpec::deletion(0.0),
            kappa: 0.2,
            trials: 200,
            ..DensityCheckConfig::default()
        };
        let (rows, pass) = density_check(&cfg).unwrap();
        assert!(pass);
        assert!(rows.iter().all(|r| r.misclassified == 0), "{rows:?}");
    }

    #[test]
    fn zero_trim_cut_check_is_exact() {
        let cfg = CutCheckConfig {
            n_max: 2,
            ..CutCheckConfig::default()
        };
        let (rows, zero_equal, pass) = cutting_check(&cfg).unwrap();
        assert!(zero_equal && pass);
        assert!(rows.iter().all(|r| r.cap_tdc <= r.cap_dc + 1e-6));
    }
}
