//! Repeat, trimming-repeat, Dobrushin and trimming-Dobrushin channels:
//! samplers (plain and traced) plus exact transition probabilities.

mod distribution;
mod likelihood;
mod spec;

use std::ops::Range;

use rand::Rng;

use crate::bits::{trim, BitString};
use crate::error::{param, Result};
use crate::rng::stream_rng;

pub use distribution::{OutputDistribution, RepeatDistribution, DEFAULT_TAIL_TOL};
pub use likelihood::{
    likelihood_dobrushin, likelihood_rc, likelihood_tdc, likelihood_trc, log_likelihood_dobrushin,
    log_likelihood_rc, log_likelihood_tdc, log_likelihood_trc,
};
pub use spec::{ChannelSpec, LawSpec, ParametricPmf, PmfSpec, SpecKind};

/// Per-bit output laws `D0` (for input 0) and `D1` (for input 1).
#[derive(Clone, Debug, PartialEq)]
pub struct DobrushinLaw {
    pub d0: OutputDistribution,
    pub d1: OutputDistribution,
}

impl DobrushinLaw {
    pub fn new(d0: OutputDistribution, d1: OutputDistribution) -> Self {
        Self { d0, d1 }
    }

    /// The repeat channel with law `dist`, written as a Dobrushin channel.
    pub fn from_repeat(dist: &RepeatDistribution) -> Self {
        Self {
            d0: OutputDistribution::repeat_of(false, dist),
            d1: OutputDistribution::repeat_of(true, dist),
        }
    }

    /// Deletion with probability `d`, then a bit flip with probability `flip`.
    pub fn deletion_flip(d: f64, flip: f64) -> Result<Self> {
        Ok(Self {
            d0: OutputDistribution::deletion_flip(false, d, flip)?,
            d1: OutputDistribution::deletion_flip(true, d, flip)?,
        })
    }

    fn law(&self, bit: bool) -> &OutputDistribution {
        if bit {
            &self.d1
        } else {
            &self.d0
        }
    }

    /// `f = E[w(Y0)] / E|Y0|`, the ones-fraction of a long transmitted buffer.
    pub fn ones_fraction(&self) -> f64 {
        let len = self.d0.mean_len();
        if len == 0.0 {
            0.0
        } else {
            self.d0.mean_weight() / len
        }
    }

    /// Equal expected lengths, `E w(Y0) < E|Y0| / 2` and `E w(Y1) > E|Y1| / 2`.
    pub fn is_biased(&self) -> bool {
        let (l0, l1) = (self.d0.mean_len(), self.d1.mean_len());
        (l0 - l1).abs() <= 1e-9 && self.d0.mean_weight() < 0.5 * l0 && self.d1.mean_weight() > 0.5 * l1
    }
}

/// Discriminant of [`ChannelModel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    Repeat,
    TrimmingRepeat,
    Dobrushin,
    TrimmingDobrushin,
}

/// A binary synchronization channel.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelModel {
    /// Each bit `b` becomes `b^R`, `R` i.i.d.
    Repeat(RepeatDistribution),
    /// A repeat channel followed by removal of the leading and trailing zeros.
    TrimmingRepeat(RepeatDistribution),
    /// Each bit becomes an independent fragment drawn from `D0` or `D1`.
    Dobrushin(DobrushinLaw),
    /// A Dobrushin channel whose output loses `T_l` bits on the left and
    /// `T_r` on the right.
    TrimmingDobrushin {
        law: DobrushinLaw,
        trim_left: RepeatDistribution,
        trim_right: RepeatDistribution,
    },
}

/// A channel output together with, for every input bit, the range of output
/// positions it produced (empty ranges for deleted bits). Ranges of bits cut
/// by a trimming channel are clipped.
#[derive(Clone, Debug, PartialEq)]
pub struct Transmission {
    pub output: BitString,
    pub spans: Vec<Range<usize>>,
}

impl Transmission {
    /// Identity transmission of `x`.
    pub fn identity(x: &BitString) -> Self {
        Self {
            output: x.clone(),
            spans: (0..x.len()).map(|i| i..i + 1).collect(),
        }
    }

    /// Output range covered by the input bits in `inputs`.
    pub fn span_of(&self, inputs: Range<usize>) -> Range<usize> {
        if inputs.is_empty() {
            let at = self.spans.get(inputs.start).map_or(self.output.len(), |s| s.start);
            return at..at;
        }
        self.spans[inputs.start].start..self.spans[inputs.end - 1].end
    }
}

impl ChannelModel {
    pub fn deletion(d: f64) -> Result<Self> {
        Ok(Self::Repeat(RepeatDistribution::deletion(d)?))
    }

    pub fn poisson(lambda: f64, tail_tol: f64) -> Result<Self> {
        Ok(Self::Repeat(RepeatDistribution::poisson(lambda, tail_tol)?))
    }

    pub fn kind(&self) -> ChannelKind {
        match self {
            Self::Repeat(_) => ChannelKind::Repeat,
            Self::TrimmingRepeat(_) => ChannelKind::TrimmingRepeat,
            Self::Dobrushin(_) => ChannelKind::Dobrushin,
            Self::TrimmingDobrushin { .. } => ChannelKind::TrimmingDobrushin,
        }
    }

    pub fn is_trimming(&self) -> bool {
        matches!(self, Self::TrimmingRepeat(_) | Self::TrimmingDobrushin { .. })
    }

    /// The repetition law of a (trimming) repeat channel.
    pub fn repeat_distribution(&self) -> Option<&RepeatDistribution> {
        match self {
            Self::Repeat(d) | Self::TrimmingRepeat(d) => Some(d),
            _ => None,
        }
    }

    /// The per-bit laws; repeat channels are converted.
    pub fn dobrushin_law(&self) -> DobrushinLaw {
        match self {
            Self::Repeat(d) | Self::TrimmingRepeat(d) => DobrushinLaw::from_repeat(d),
            Self::Dobrushin(law) | Self::TrimmingDobrushin { law, .. } => law.clone(),
        }
    }

    /// The channel without its trimming stage.
    pub fn untrimmed(&self) -> Self {
        match self {
            Self::Repeat(d) | Self::TrimmingRepeat(d) => Self::Repeat(d.clone()),
            Self::Dobrushin(law) | Self::TrimmingDobrushin { law, .. } => Self::Dobrushin(law.clone()),
        }
    }

    /// Trimming version of a repeat channel.
    pub fn trimming_repeat(&self) -> Result<Self> {
        match self.repeat_distribution() {
            Some(d) => Ok(Self::TrimmingRepeat(d.clone())),
            None => param("trimming_repeat requires a repeat channel"),
        }
    }

    /// Trimming version of a Dobrushin channel with the given cut laws.
    pub fn trimming_dobrushin(&self, trim_left: RepeatDistribution, trim_right: RepeatDistribution) -> Self {
        Self::TrimmingDobrushin {
            law: self.dobrushin_law(),
            trim_left,
            trim_right,
        }
    }

    /// Expected output length per input bit (`mu`).
    pub fn mean_output_len(&self) -> f64 {
        match self {
            Self::Repeat(d) | Self::TrimmingRepeat(d) => d.mean(),
            Self::Dobrushin(law) | Self::TrimmingDobrushin { law, .. } => 0.5 * (law.d0.mean_len() + law.d1.mean_len()),
        }
    }

    /// Ones-fraction `f` of transmitted zeros (0 for repeat channels).
    pub fn ones_fraction(&self) -> f64 {
        match self {
            Self::Repeat(_) | Self::TrimmingRepeat(_) => 0.0,
            Self::Dobrushin(law) | Self::TrimmingDobrushin { law, .. } => law.ones_fraction(),
        }
    }

    pub fn is_biased(&self) -> bool {
        self.dobrushin_law().is_biased()
    }

    /// Longest fragment a single input bit can produce.
    pub fn max_fragment_len(&self) -> usize {
        match self {
            Self::Repeat(d) | Self::TrimmingRepeat(d) => d.max_count(),
            Self::Dobrushin(law) | Self::TrimmingDobrushin { law, .. } => law.d0.max_len().max(law.d1.max_len()),
        }
    }

    /// `RC_D x` (or the kind's analogue), deterministic in `seed`.
    pub fn apply(&self, x: &BitString, seed: u64) -> BitString {
        self.apply_with(x, &mut stream_rng(seed, 0))
    }

    pub fn apply_with<R: Rng + ?Sized>(&self, x: &BitString, rng: &mut R) -> BitString {
        match self {
            Self::Repeat(d) => repeat_raw(d, x, rng),
            Self::TrimmingRepeat(d) => trim(&repeat_raw(d, x, rng)).trimmed,
            Self::Dobrushin(law) => dobrushin_raw(law, x, rng),
            Self::TrimmingDobrushin {
                law,
                trim_left,
                trim_right,
            } => {
                let z = dobrushin_raw(law, x, rng);
                let (l, r) = (trim_left.sample(rng), trim_right.sample(rng));
                if l + r >= z.len() {
                    BitString::new()
                } else {
                    z.slice(l..z.len() - r)
                }
            }
        }
    }

    /// Like [`ChannelModel::apply_with`] but records which output positions
    /// each input bit produced.
    pub fn transmit<R: Rng + ?Sized>(&self, x: &BitString, rng: &mut R) -> Transmission {
        let mut output = BitString::with_capacity(x.len() * 2);
        let mut spans = Vec::with_capacity(x.len());
        match self {
            Self::Repeat(d) | Self::TrimmingRepeat(d) => {
                for bit in x.iter() {
                    let start = output.len();
                    output.push_repeated(bit, d.sample(rng));
                    spans.push(start..output.len());
                }
            }
            Self::Dobrushin(law) | Self::TrimmingDobrushin { law, .. } => {
                for bit in x.iter() {
                    let start = output.len();
                    output.extend_from(law.law(bit).sample(rng));
                    spans.push(start..output.len());
                }
            }
        }
        let (cut_left, cut_right) = match self {
            Self::TrimmingRepeat(_) => {
                let t = trim(&output);
                (t.left_cut, t.right_cut)
            }
            Self::TrimmingDobrushin {
                trim_left, trim_right, ..
            } => {
                let (l, r) = (trim_left.sample(rng), trim_right.sample(rng));
                let l = l.min(output.len());
                (l, r.min(output.len() - l))
            }
            _ => (0, 0),
        };
        if cut_left + cut_right > 0 {
            let keep = cut_left..output.len() - cut_right;
            output = output.slice(keep.clone());
            for s in spans.iter_mut() {
                let start = s.start.clamp(keep.start, keep.end) - keep.start;
                let end = s.end.clamp(keep.start, keep.end) - keep.start;
                *s = start..end;
            }
        }
        Transmission { output, spans }
    }

    /// Exact `P(y | x)` under this channel.
    pub fn likelihood(&self, x: &BitString, y: &BitString) -> f64 {
        match self {
            Self::Repeat(d) => likelihood_rc(d, x, y),
            Self::TrimmingRepeat(d) => likelihood_trc(d, x, y),
            Self::Dobrushin(law) => likelihood_dobrushin(&law.d0, &law.d1, x, y),
            Self::TrimmingDobrushin {
                law,
                trim_left,
                trim_right,
            } => likelihood_tdc(&law.d0, &law.d1, trim_left, trim_right, x, y),
        }
    }

    /// Natural log of [`ChannelModel::likelihood`], computed without underflow.
    pub fn log_likelihood(&self, x: &BitString, y: &BitString) -> f64 {
        match self {
            Self::Repeat(d) => log_likelihood_rc(d, x, y),
            Self::TrimmingRepeat(d) => log_likelihood_trc(d, x, y),
            Self::Dobrushin(law) => log_likelihood_dobrushin(&law.d0, &law.d1, x, y),
            Self::TrimmingDobrushin {
                law,
                trim_left,
                trim_right,
            } => log_likelihood_tdc(&law.d0, &law.d1, trim_left, trim_right, x, y),
        }
    }

    /// Short human-readable description, used in CSV output.
    pub fn describe(&self) -> String {
        let pmf = |d: &RepeatDistribution| {
            d.support()
                .map(|(r, p)| format!("{r}:{p:.4}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        match self {
            Self::Repeat(d) => format!("RC[{}]", pmf(d)),
            Self::TrimmingRepeat(d) => format!("TRC[{}]", pmf(d)),
            Self::Dobrushin(law) => format!("DC[f={:.4}]", law.ones_fraction()),
            Self::TrimmingDobrushin { law, trim_left, trim_right } => format!(
                "TDC[f={:.4} Tl<={} Tr<={}]",
                law.ones_fraction(),
                trim_left.max_count(),
                trim_right.max_count()
            ),
        }
    }
}

fn repeat_raw<R: Rng + ?Sized>(d: &RepeatDistribution, x: &BitString, rng: &mut R) -> BitString {
    let mut out = BitString::with_capacity(x.len() * (d.mean().ceil() as usize + 1));
    for bit in x.iter() {
        out.push_repeated(bit, d.sample(rng));
    }
    out
}

fn dobrushin_raw<R: Rng + ?Sized>(law: &DobrushinLaw, x: &BitString, rng: &mut R) -> BitString {
    let mut out = BitString::with_capacity(x.len() * 2);
    for bit in x.iter() {
        out.extend_from(law.law(bit).sample(rng));
    }
    out
}
