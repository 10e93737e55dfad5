//! The concatenated code: outer symbols, each inner-encoded, separated by
//! runs of `b` zeros.
//!
//! ```text
//! Enc(x) = c_1 0^b c_2 0^b ... 0^b c_k'
//! ```
//!
//! The receiver finds the buffers, decodes every segment between them with
//! the inner ML decoder and hands the resulting symbols to the outer decoder.
//! In repeat mode a buffer is any maximal zero run of at least
//! `floor((mu/2) eta L)` bits. In Dobrushin mode a window of `round(nu eta L)`
//! bits slides over the output; the receiver enters a buffer when the
//! window's ones-fraction drops below `f + kappa` and leaves it when the
//! fraction is back at or above that level.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bits::{trim, BitString};
use crate::channels::{ChannelModel, Transmission};
use crate::error::{param, Error, Result};
use crate::inner_code::{InnerCode, InnerDecision};
use crate::outer::{OuterCode, OuterCodeParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Repeat,
    Dobrushin,
}

/// Segmentation settings for Dobrushin mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRule {
    pub nu: f64,
    pub kappa: f64,
}

/// Everything needed to encode and decode, plus the derived lengths.
#[derive(Clone, Debug)]
pub struct ConcatParams {
    inner: InnerCode,
    outer: OuterCode,
    mode: Mode,
    eta: f64,
    buffer_len: usize,
    total_len: usize,
    /// Repeat mode: shortest zero run read as a buffer.
    buffer_threshold: usize,
    /// Dobrushin mode.
    window_len: usize,
    density_threshold: f64,
    density: Option<DensityRule>,
    /// Mean output length per input bit of the transmission channel.
    mu: f64,
    ones_fraction: f64,
}

/// Summary of the derived quantities, for reports.
#[derive(Clone, Debug, Serialize)]
pub struct ParamsSummary {
    pub mode: Mode,
    pub msg_bits: usize,
    pub block_len: usize,
    pub eta: f64,
    pub buffer_len: usize,
    pub k_prime: usize,
    pub total_len: usize,
    pub message_bits: usize,
    pub buffer_threshold: usize,
    pub window_len: usize,
    pub density_threshold: f64,
    pub inner_rate: f64,
    pub outer_rate: f64,
    pub realized_rate: f64,
}

impl ConcatParams {
    /// Assembles the code for transmission over `channel` (the untrimmed
    /// channel). `density` is required in Dobrushin mode and ignored
    /// otherwise.
    pub fn build(
        inner: InnerCode,
        outer: OuterCodeParams,
        channel: &ChannelModel,
        eta: f64,
        mode: Mode,
        density: Option<DensityRule>,
    ) -> Result<Self> {
        let outer = OuterCode::new(outer)?;
        if inner.msg_bits() != outer.symbol_bits() {
            return param(format!(
                "inner code carries {} bits but outer symbols have {} bits",
                inner.msg_bits(),
                outer.symbol_bits()
            ));
        }
        if !(eta > 0.0 && eta < 1.0) {
            return param(format!("eta must lie in (0, 1), got {eta}"));
        }
        let block_len = inner.block_len();
        let buffer_len = (eta * block_len as f64).round() as usize;
        if buffer_len == 0 {
            return param("buffer length round(eta * block_len) is zero");
        }
        let k_prime = outer.params().n_rs;
        let total_len = k_prime * (block_len + buffer_len) - buffer_len;
        let mu = channel.mean_output_len();
        let ones_fraction = channel.ones_fraction();
        let mut params = Self {
            inner,
            outer,
            mode,
            eta,
            buffer_len,
            total_len,
            buffer_threshold: 0,
            window_len: 0,
            density_threshold: 0.0,
            density: None,
            mu,
            ones_fraction,
        };
        match mode {
            Mode::Repeat => {
                if channel.repeat_distribution().is_none() {
                    return param("repeat mode needs a repeat channel");
                }
                let threshold = (0.5 * mu * eta * block_len as f64 + 1e-9).floor() as usize;
                if threshold == 0 {
                    return param("buffer threshold floor((mu/2) eta block_len) is zero");
                }
                if let Some(w) = params
                    .inner
                    .codebook()
                    .iter()
                    .find(|w| w.max_internal_zero_run() >= threshold)
                {
                    return param(format!(
                        "codeword {w} has an internal zero run of at least the buffer threshold {threshold}"
                    ));
                }
                params.buffer_threshold = threshold;
            }
            Mode::Dobrushin => {
                let Some(rule) = density else {
                    return param("Dobrushin mode needs nu and kappa");
                };
                if !channel.is_biased() {
                    return param("Dobrushin mode needs a biased channel");
                }
                let f = ones_fraction;
                if !(rule.kappa > 0.0 && rule.kappa < 0.5 - f) {
                    return param(format!("kappa must lie in (0, 1/2 - f) = (0, {:.6})", 0.5 - f));
                }
                let window_len = (rule.nu * eta * block_len as f64).round() as usize;
                if window_len == 0 {
                    return param("window length round(nu eta block_len) is zero");
                }
                params.window_len = window_len;
                params.density_threshold = f + rule.kappa;
                params.density = Some(rule);
            }
        }
        Ok(params)
    }

    pub fn inner(&self) -> &InnerCode {
        &self.inner
    }

    pub fn outer(&self) -> &OuterCode {
        &self.outer
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn buffer_len(&self) -> usize {
        self.buffer_len
    }

    pub fn k_prime(&self) -> usize {
        self.outer.params().n_rs
    }

    pub fn total_len(&self) -> usize {
        self.total_len
    }

    pub fn message_bits(&self) -> usize {
        self.outer.params().message_bits()
    }

    pub fn buffer_threshold(&self) -> usize {
        self.buffer_threshold
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn density_threshold(&self) -> f64 {
        self.density_threshold
    }

    pub fn density_rule(&self) -> Option<DensityRule> {
        self.density
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Ones-fraction `f` of transmitted buffers.
    pub fn ones_fraction(&self) -> f64 {
        self.ones_fraction
    }

    /// Message bits per transmitted bit.
    pub fn realized_rate(&self) -> f64 {
        self.message_bits() as f64 / self.total_len as f64
    }

    pub fn summary(&self) -> ParamsSummary {
        ParamsSummary {
            mode: self.mode,
            msg_bits: self.inner.msg_bits(),
            block_len: self.inner.block_len(),
            eta: self.eta,
            buffer_len: self.buffer_len,
            k_prime: self.k_prime(),
            total_len: self.total_len,
            message_bits: self.message_bits(),
            buffer_threshold: self.buffer_threshold,
            window_len: self.window_len,
            density_threshold: self.density_threshold,
            inner_rate: self.inner.rate(),
            outer_rate: self.outer.params().realized_rate(),
            realized_rate: self.realized_rate(),
        }
    }

    /// Input positions of inner codeword `j` (0-based).
    pub fn codeword_range(&self, j: usize) -> Range<usize> {
        let start = j * (self.inner.block_len() + self.buffer_len);
        start..start + self.inner.block_len()
    }

    /// Input positions of the buffer after codeword `j`, `j < k' - 1`.
    pub fn buffer_range(&self, j: usize) -> Range<usize> {
        let start = self.codeword_range(j).end;
        start..start + self.buffer_len
    }

    pub fn encode(&self, message: &BitString) -> Result<BitString> {
        let symbols = self.outer.encode(message)?;
        let mut out = BitString::with_capacity(self.total_len);
        for (j, sym) in symbols.iter().enumerate() {
            if j > 0 {
                out.push_repeated(false, self.buffer_len);
            }
            out.extend_from(self.inner.encode(sym.to_index())?);
        }
        debug_assert_eq!(out.len(), self.total_len);
        Ok(out)
    }

    pub fn segment(&self, y: &BitString) -> Segmentation {
        match self.mode {
            Mode::Repeat => segment_by_zero_runs(y, self.buffer_threshold),
            Mode::Dobrushin => segment_by_density(y, self.window_len, self.density_threshold),
        }
    }

    /// Segments, inner decisions and the outer result.
    pub fn decode_detailed(&self, y: &BitString) -> DecodeReport {
        let segmentation = self.segment(y);
        let decisions: Vec<InnerDecision> = segmentation
            .segments
            .iter()
            .map(|s| self.inner.decode(&y.slice(s.clone())))
            .collect();
        let symbols: Vec<BitString> = decisions
            .iter()
            .map(|d| BitString::from_index(d.msg, self.outer.symbol_bits()))
            .collect();
        let result = self.outer.decode(&symbols);
        DecodeReport {
            segmentation,
            decisions,
            result,
        }
    }

    pub fn decode(&self, y: &BitString) -> Result<BitString> {
        self.decode_detailed(y).result
    }

    /// Counts the four failure events of a transmission of the codeword of
    /// `message`, given the ground-truth output spans.
    pub fn classify_errors(&self, message: &BitString, sent: &Transmission, report: &DecodeReport) -> Result<ErrorTaxonomy> {
        if sent.spans.len() != self.total_len {
            return Err(Error::Length {
                expected: self.total_len,
                actual: sent.spans.len(),
            });
        }
        let payloads = self.outer.encode(message)?;
        let out_len = sent.output.len();
        let k = self.k_prime();
        let code_spans: Vec<Range<usize>> = (0..k).map(|j| sent.span_of(self.codeword_range(j))).collect();
        let buffer_spans: Vec<Range<usize>> = (0..k.saturating_sub(1)).map(|j| sent.span_of(self.buffer_range(j))).collect();
        let segments = &report.segmentation.segments;
        let [type1, type2, type3] = structural_errors(&code_spans, &buffer_spans, &report.segmentation, out_len);

        let mut type4 = 0;
        for (i, s) in segments.iter().enumerate() {
            let hits: Vec<usize> = (0..k).filter(|&j| overlaps(&code_spans[j], s)).collect();
            if let [j] = hits[..] {
                let exclusive = segments.iter().filter(|t| overlaps(&code_spans[j], t)).count() == 1;
                let truth = self.inner.encode(payloads[j].to_index())?;
                let decided = self.inner.encode(report.decisions[i].msg)?;
                if exclusive && (report.decisions[i].uninformative || decided != truth) {
                    type4 += 1;
                }
            }
        }
        Ok(ErrorTaxonomy::new(type1, type2, type3, type4))
    }

    /// Exact probability that a buffer comes out of a repeat channel with
    /// fewer than `buffer_threshold` zeros.
    pub fn buffer_loss_probability(&self, channel: &ChannelModel) -> Result<f64> {
        let Some(dist) = channel.repeat_distribution() else {
            return param("buffer loss probability is defined for repeat channels");
        };
        let t = self.buffer_threshold;
        // Distribution of the sum of `b` counts, truncated at t.
        let mut acc = vec![0.0; t];
        acc[0] = 1.0;
        for _ in 0..self.buffer_len {
            let mut next = vec![0.0; t];
            for (s, &p) in acc.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for (r, q) in dist.support() {
                    if s + r < t {
                        next[s + r] += p * q;
                    }
                }
            }
            acc = next;
        }
        Ok(acc.iter().sum())
    }
}

/// Type 1-3 counts from the output spans of the true codewords and buffers.
///
/// Type 3 counts detected buffers that touch no true buffer (stream ends
/// count as buffers) plus segments that overlap no codeword.
pub fn structural_errors(
    code_spans: &[Range<usize>],
    buffer_spans: &[Range<usize>],
    seg: &Segmentation,
    out_len: usize,
) -> [usize; 3] {
    let type1 = buffer_spans
        .iter()
        .filter(|b| !seg.buffers.iter().any(|r| touches(b, r)))
        .count();
    let type2 = code_spans
        .iter()
        .filter(|c| !seg.segments.iter().any(|s| overlaps(c, s)))
        .count();
    let ends = [0..0, out_len..out_len];
    let spurious = seg
        .buffers
        .iter()
        .filter(|r| !buffer_spans.iter().chain(ends.iter()).any(|b| touches(b, r)))
        .count();
    let stray = seg
        .segments
        .iter()
        .filter(|s| !code_spans.iter().any(|c| overlaps(c, s)))
        .count();
    [type1, type2, spurious + stray]
}

/// Half-open interval overlap.
fn overlaps(a: &Range<usize>, b: &Range<usize>) -> bool {
    a.start < b.end && b.start < a.end
}

/// Closed-interval contact, so that an empty span at a point still touches a
/// region that contains or borders it.
fn touches(a: &Range<usize>, b: &Range<usize>) -> bool {
    a.start <= b.end && b.start <= a.end
}

/// Output positions of the received inner words and of the detected buffers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Segmentation {
    pub segments: Vec<Range<usize>>,
    pub buffers: Vec<Range<usize>>,
}

impl Segmentation {
    pub fn words(&self, y: &BitString) -> Vec<BitString> {
        self.segments.iter().map(|s| y.slice(s.clone())).collect()
    }
}

/// Maximal zero runs of length at least `threshold` are buffers; the pieces
/// between them are trimmed of zeros and kept if non-empty.
pub fn segment_by_zero_runs(y: &BitString, threshold: usize) -> Segmentation {
    let mut out = Segmentation::default();
    let n = y.len();
    let mut piece_start = 0;
    let mut i = 0;
    let push_piece = |out: &mut Segmentation, range: Range<usize>| {
        let t = trim(&y.slice(range.clone()));
        if !t.trimmed.is_empty() {
            out.segments
                .push(range.start + t.left_cut..range.start + t.left_cut + t.trimmed.len());
        }
    };
    while i < n {
        if y.get(i) {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < n && !y.get(i) {
            i += 1;
        }
        if i - run_start >= threshold {
            push_piece(&mut out, piece_start..run_start);
            out.buffers.push(run_start..i);
            piece_start = i;
        }
    }
    push_piece(&mut out, piece_start..n);
    out
}

/// Sliding-window density segmentation. A buffer starts at the first bit of
/// the window that triggers entry and ends at the last bit of the window that
/// triggers exit; a buffer still open at the end runs to the end. Overlapping
/// buffers are merged.
pub fn segment_by_density(y: &BitString, window: usize, threshold: f64) -> Segmentation {
    let n = y.len();
    let mut buffers: Vec<Range<usize>> = Vec::new();
    if window > 0 && n >= window {
        let prefix = y.prefix_weights();
        let limit = threshold * window as f64;
        let mut open: Option<usize> = None;
        for p in 0..=n - window {
            let low = ((prefix[p + window] - prefix[p]) as f64) < limit - 1e-9;
            match (open, low) {
                (None, true) => open = Some(p),
                (Some(start), false) => {
                    buffers.push(start..p + window);
                    open = None;
                }
                _ => {}
            }
        }
        if let Some(start) = open {
            buffers.push(start..n);
        }
    }
    let mut merged: Vec<Range<usize>> = Vec::new();
    for b in buffers {
        match merged.last_mut() {
            Some(last) if b.start <= last.end => last.end = last.end.max(b.end),
            _ => merged.push(b),
        }
    }
    let mut segments = Vec::new();
    let mut start = 0;
    for b in &merged {
        if b.start > start {
            segments.push(start..b.start);
        }
        start = b.end;
    }
    if n > start {
        segments.push(start..n);
    }
    Segmentation {
        segments,
        buffers: merged,
    }
}

/// Output of [`ConcatParams::decode_detailed`].
#[derive(Debug)]
pub struct DecodeReport {
    pub segmentation: Segmentation,
    pub decisions: Vec<InnerDecision>,
    pub result: Result<BitString>,
}

/// Counts of the four decoding failure events.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorTaxonomy {
    /// A buffer came out too short to be detected.
    pub type1_buffer_lost: usize,
    /// Every output bit of a codeword fell inside buffers (or was deleted).
    pub type2_codeword_vanished: usize,
    /// A buffer was detected where there is none, or a segment holds no
    /// codeword bits at all.
    pub type3_spurious_buffer: usize,
    /// A segment matched one-to-one with a codeword decoded wrongly.
    pub type4_inner_decode_fail: usize,
    /// `3 t1 + t2 + 3 t3 + 2 t4`.
    pub weighted_edit_distance: usize,
}

impl ErrorTaxonomy {
    pub fn new(t1: usize, t2: usize, t3: usize, t4: usize) -> Self {
        Self {
            type1_buffer_lost: t1,
            type2_codeword_vanished: t2,
            type3_spurious_buffer: t3,
            type4_inner_decode_fail: t4,
            weighted_edit_distance: 3 * t1 + t2 + 3 * t3 + 2 * t4,
        }
    }

    pub fn counts(&self) -> [usize; 4] {
        [
            self.type1_buffer_lost,
            self.type2_codeword_vanished,
            self.type3_spurious_buffer,
            self.type4_inner_decode_fail,
        ]
    }
}
