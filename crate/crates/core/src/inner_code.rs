//! Balanced inner codes for the trimming channels, decoded by exact maximum
//! likelihood over the whole codebook.
//!
//! Codebooks are found by random search: draw codebooks of distinct words
//! that pass the sliding-window balance test (and, optionally, contain no
//! internal zero run reaching a given length), estimate each one's block
//! failure probability by Monte Carlo with common random numbers, keep the
//! best.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{balance_window, check_balance, trim, windows_balanced, BitString};
use crate::channels::{ChannelModel, ChannelSpec};
use crate::error::{param, Error, Result};
use crate::rng::{derive_seed, stream_rng, EVALUATION_STREAM, INNER_SEARCH_STREAM};

/// Consecutive rejected draws after which balance constraints are declared
/// infeasible.
pub const FEASIBILITY_PROBE_LIMIT: usize = 1_000_000;

/// Largest codebook the searcher will build by default.
pub const DEFAULT_MAX_CODEWORDS: usize = 1 << 14;

/// `ceil(m / (rate - eps))`.
pub fn block_len_for_rate(msg_bits: usize, rate: f64, eps: f64) -> Result<usize> {
    if (rate - eps).is_nan() || rate - eps <= 0.0 {
        return param("rate - eps must be positive");
    }
    Ok((msg_bits as f64 / (rate - eps) - 1e-9).ceil() as usize)
}

/// On-disk form of an [`InnerCode`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InnerCodeRecord {
    pub msg_bits: usize,
    pub block_len: usize,
    pub zeta: f64,
    pub gamma: f64,
    /// Codewords have internal zero runs strictly shorter than this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_run_limit: Option<usize>,
    /// The law the decoder uses.
    pub channel: ChannelSpec,
    pub est_failure_prob: f64,
    pub est_stderr: f64,
    pub eval_trials: usize,
    pub search_seed: u64,
    pub codebook: Vec<BitString>,
}

/// A codebook of `2^m` distinct balanced words of equal length, index =
/// message value.
#[derive(Clone, Debug)]
pub struct InnerCode {
    record: InnerCodeRecord,
    model: ChannelModel,
    filter: SupportFilter,
}

/// Cheap necessary condition for a nonzero likelihood.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SupportFilter {
    None,
    /// Each input bit yields at most one copy of itself, so the output is a
    /// subsequence of the input (trimming keeps that true).
    Subsequence,
}

fn support_filter(model: &ChannelModel) -> SupportFilter {
    match model.repeat_distribution() {
        Some(d) if d.max_count() <= 1 => SupportFilter::Subsequence,
        _ => SupportFilter::None,
    }
}

fn is_subsequence(y: &[bool], x: &BitString) -> bool {
    let mut j = 0;
    for bit in x.iter() {
        if j == y.len() {
            return true;
        }
        if bit == y[j] {
            j += 1;
        }
    }
    j == y.len()
}

impl TryFrom<InnerCodeRecord> for InnerCode {
    type Error = Error;

    fn try_from(record: InnerCodeRecord) -> Result<Self> {
        let model = record.channel.build()?;
        if record.codebook.len() != 1usize.checked_shl(record.msg_bits as u32).unwrap_or(0) {
            return param(format!(
                "codebook has {} words, expected 2^{}",
                record.codebook.len(),
                record.msg_bits
            ));
        }
        let mut seen = HashSet::new();
        for (i, w) in record.codebook.iter().enumerate() {
            if w.len() != record.block_len {
                return Err(Error::Length {
                    expected: record.block_len,
                    actual: w.len(),
                });
            }
            if !seen.insert(w) {
                return param(format!("codeword {i} is a duplicate"));
            }
            if !check_balance(w, record.zeta, record.gamma)? {
                return param(format!("codeword {i} ({w}) is not balanced"));
            }
            if record.zero_run_limit.is_some_and(|t| w.max_internal_zero_run() >= t) {
                return param(format!("codeword {i} ({w}) has a zero run reaching the buffer threshold"));
            }
        }
        let filter = support_filter(&model);
        Ok(Self { record, model, filter })
    }
}

impl Serialize for InnerCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.record.serialize(s)
    }
}

impl<'de> Deserialize<'de> for InnerCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        InnerCodeRecord::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

/// Result of [`InnerCode::decode`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerDecision {
    pub msg: u64,
    /// Natural log of the winning likelihood.
    pub log_likelihood: f64,
    /// Log-likelihood margin to the runner-up; infinite if the runner-up has
    /// likelihood zero.
    pub second_best_gap: f64,
    /// Every codeword had likelihood zero; `msg` is then 0.
    pub uninformative: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FailureEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl FailureEstimate {
    fn from_counts(failures: usize, trials: usize) -> Self {
        let p_hat = failures as f64 / trials as f64;
        Self {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            trials,
        }
    }
}

impl InnerCode {
    /// Wraps a given codebook, checking every invariant. The failure estimate
    /// fields start at zero.
    pub fn from_codebook(
        model: &ChannelModel,
        codebook: Vec<BitString>,
        zeta: f64,
        gamma: f64,
        zero_run_limit: Option<usize>,
    ) -> Result<Self> {
        let msg_bits = codebook.len().trailing_zeros() as usize;
        let block_len = codebook.first().map_or(0, BitString::len);
        InnerCodeRecord {
            msg_bits,
            block_len,
            zeta,
            gamma,
            zero_run_limit,
            channel: ChannelSpec::from_model(model),
            est_failure_prob: 0.0,
            est_stderr: 0.0,
            eval_trials: 0,
            search_seed: 0,
            codebook,
        }
        .try_into()
    }

    pub fn record(&self) -> &InnerCodeRecord {
        &self.record
    }

    pub fn msg_bits(&self) -> usize {
        self.record.msg_bits
    }

    pub fn block_len(&self) -> usize {
        self.record.block_len
    }

    pub fn zeta(&self) -> f64 {
        self.record.zeta
    }

    pub fn gamma(&self) -> f64 {
        self.record.gamma
    }

    pub fn zero_run_limit(&self) -> Option<usize> {
        self.record.zero_run_limit
    }

    pub fn codebook(&self) -> &[BitString] {
        &self.record.codebook
    }

    pub fn model(&self) -> &ChannelModel {
        &self.model
    }

    /// `m / block_len`.
    pub fn rate(&self) -> f64 {
        self.record.msg_bits as f64 / self.record.block_len as f64
    }

    pub fn est_failure(&self) -> FailureEstimate {
        FailureEstimate {
            p_hat: self.record.est_failure_prob,
            stderr: self.record.est_stderr,
            trials: self.record.eval_trials,
        }
    }

    pub fn encode(&self, msg: u64) -> Result<&BitString> {
        self.record
            .codebook
            .get(usize::try_from(msg).unwrap_or(usize::MAX))
            .ok_or_else(|| Error::Parameter(format!("message {msg} outside [0, 2^{})", self.record.msg_bits)))
    }

    /// Maximum-likelihood decision; ties go to the smallest message.
    pub fn decode(&self, y: &BitString) -> InnerDecision {
        let ybits: Vec<bool> = y.iter().collect();
        let mut best = (f64::NEG_INFINITY, 0u64);
        let mut second = f64::NEG_INFINITY;
        for (i, c) in self.record.codebook.iter().enumerate() {
            if self.filter == SupportFilter::Subsequence && !is_subsequence(&ybits, c) {
                continue;
            }
            let ll = self.model.log_likelihood(c, y);
            if ll > best.0 {
                second = best.0;
                best = (ll, i as u64);
            } else if ll > second {
                second = ll;
            }
        }
        if best.0 == f64::NEG_INFINITY {
            return InnerDecision {
                msg: 0,
                log_likelihood: f64::NEG_INFINITY,
                second_best_gap: 0.0,
                uninformative: true,
            };
        }
        InnerDecision {
            msg: best.1,
            log_likelihood: best.0,
            second_best_gap: if second == f64::NEG_INFINITY {
                f64::INFINITY
            } else {
                best.0 - second
            },
            uninformative: false,
        }
    }

    /// Whether trial `t` of an evaluation keyed by `seed` fails. The message
    /// and channel draws depend only on `(seed, t)`, so every codebook sees
    /// the same randomness.
    fn trial_fails(&self, seed: u64, t: u64) -> bool {
        let mut rng = stream_rng(seed, t);
        let msg = rng.gen_range(0..self.record.codebook.len() as u64);
        let y = self.model.apply_with(&self.record.codebook[msg as usize], &mut rng);
        let d = self.decode(&y);
        d.uninformative || d.msg != msg
    }

    /// Monte Carlo block failure rate under the code's own channel model.
    pub fn estimate_failure(&self, trials: usize, seed: u64) -> Result<FailureEstimate> {
        if trials == 0 {
            return param("trials must be at least 1");
        }
        let failures = (0..trials as u64)
            .into_par_iter()
            .filter(|&t| self.trial_fails(seed, t))
            .count();
        Ok(FailureEstimate::from_counts(failures, trials))
    }

    fn with_estimate(mut self, est: FailureEstimate, search_seed: u64) -> Self {
        self.record.est_failure_prob = est.p_hat;
        self.record.est_stderr = est.stderr;
        self.record.eval_trials = est.trials;
        self.record.search_seed = search_seed;
        self
    }
}

/// Parameters of [`search_inner_code`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchConfig {
    pub msg_bits: usize,
    pub block_len: usize,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Reject words with an internal zero run of this length or longer.
    #[serde(default)]
    pub zero_run_limit: Option<usize>,
    pub candidates: usize,
    pub mc_trials: usize,
    #[serde(default = "default_max_codewords")]
    pub max_codewords: usize,
}

fn default_zeta() -> f64 {
    0.5
}

fn default_gamma() -> f64 {
    0.25
}

fn default_max_codewords() -> usize {
    DEFAULT_MAX_CODEWORDS
}

impl SearchConfig {
    pub fn new(msg_bits: usize, block_len: usize) -> Self {
        Self {
            msg_bits,
            block_len,
            zeta: default_zeta(),
            gamma: default_gamma(),
            zero_run_limit: None,
            candidates: 8,
            mc_trials: 2000,
            max_codewords: DEFAULT_MAX_CODEWORDS,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.gamma) || self.gamma <= 0.0 {
            return param(format!("gamma must lie in (0, 1/2), got {}", self.gamma));
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return param(format!("zeta must lie in (0, 1], got {}", self.zeta));
        }
        if self.msg_bits == 0 || self.block_len == 0 || self.block_len > 64 {
            return param("need msg_bits >= 1 and 1 <= block_len <= 64");
        }
        if balance_window(self.block_len, self.zeta) == 0 {
            return param("balance window floor(zeta * block_len) is empty");
        }
        let size = 1usize.checked_shl(self.msg_bits as u32).unwrap_or(usize::MAX);
        if self.msg_bits >= 63 || size > self.max_codewords {
            return Err(Error::Budget(format!(
                "2^{} codewords exceed the budget of {}",
                self.msg_bits, self.max_codewords
            )));
        }
        if self.msg_bits > self.block_len {
            return Err(Error::Infeasible(format!(
                "2^{} distinct words do not exist at length {}",
                self.msg_bits, self.block_len
            )));
        }
        if self.candidates == 0 || self.mc_trials == 0 {
            return param("candidates and mc_trials must be at least 1");
        }
        Ok(())
    }

    fn accepts(&self, w: &BitString, window: usize) -> bool {
        windows_balanced(w, window, self.gamma) && self.zero_run_limit.is_none_or(|t| w.max_internal_zero_run() < t)
    }
}

fn random_word<R: Rng + ?Sized>(len: usize, rng: &mut R) -> BitString {
    let v = if len == 64 { rng.gen::<u64>() } else { rng.gen_range(0..1u64 << len) };
    BitString::from_index(v, len)
}

/// `2^m` acceptable words by rejection sampling. With a zero-run limit the
/// words are decoded after trimming, so their trimmed forms must differ.
fn sample_codebook<R: Rng + ?Sized>(cfg: &SearchConfig, rng: &mut R) -> Result<Vec<BitString>> {
    let size = 1usize << cfg.msg_bits;
    let window = balance_window(cfg.block_len, cfg.zeta);
    let mut seen = HashSet::with_capacity(size);
    let mut words = Vec::with_capacity(size);
    let mut misses = 0;
    while words.len() < size {
        let w = random_word(cfg.block_len, rng);
        let key = if cfg.zero_run_limit.is_some() { trim(&w).trimmed } else { w.clone() };
        if cfg.accepts(&w, window) && seen.insert(key) {
            words.push(w);
            misses = 0;
        } else {
            misses += 1;
            if misses >= FEASIBILITY_PROBE_LIMIT {
                return Err(Error::Infeasible(format!(
                    "found only {} of {size} admissible words of length {} after {FEASIBILITY_PROBE_LIMIT} consecutive rejections",
                    words.len(),
                    cfg.block_len
                )));
            }
        }
    }
    Ok(words)
}

/// Random search for a good inner code under `model` (normally a trimming
/// channel). Candidates come from stream [`INNER_SEARCH_STREAM`] of `seed`;
/// all are scored on the same evaluation draws.
pub fn search_inner_code(model: &ChannelModel, cfg: &SearchConfig, seed: u64) -> Result<InnerCode> {
    cfg.validate()?;
    let mut rng = stream_rng(seed, INNER_SEARCH_STREAM);
    let codebooks: Vec<Vec<BitString>> = (0..cfg.candidates)
        .map(|_| sample_codebook(cfg, &mut rng))
        .collect::<Result<_>>()?;
    let eval_seed = derive_seed(seed, EVALUATION_STREAM);
    let scored: Vec<(InnerCode, FailureEstimate)> = codebooks
        .into_iter()
        .map(|cb| {
            let code = InnerCode::from_codebook(model, cb, cfg.zeta, cfg.gamma, cfg.zero_run_limit)?;
            let est = code.estimate_failure(cfg.mc_trials, eval_seed)?;
            Ok((code, est))
        })
        .collect::<Result<_>>()?;
    let (code, est) = scored
        .into_iter()
        .reduce(|best, c| if c.1.p_hat < best.1.p_hat { c } else { best })
        .expect("at least one candidate");
    Ok(code.with_estimate(est, seed))
}
