use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::bits::BitString;
use crate::error::{param, Result};

/// Default tolerance for the probability mass dropped by truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-9;

/// A repetition-count law on `{0, ..., B}`.
///
/// Unbounded laws are truncated once, at construction, and renormalized; the
/// dropped mass is kept in [`RepeatDistribution::tail_mass_dropped`]. Moments
/// are always recomputed from the stored table.
#[derive(Clone, Debug)]
pub struct RepeatDistribution {
    pmf: Vec<f64>,
    mean: f64,
    variance: f64,
    tail_mass_dropped: f64,
    sampler: WeightedIndex<f64>,
}

impl RepeatDistribution {
    /// Builds from a dense table `pmf[r] = P(R = r)`; the table is
    /// renormalized and trailing zeros are dropped.
    pub fn from_pmf(pmf: &[f64]) -> Result<Self> {
        Self::with_dropped(pmf.to_vec(), 0.0)
    }

    /// Builds from a sparse `count -> probability` table.
    pub fn from_table(table: &BTreeMap<usize, f64>) -> Result<Self> {
        let bound = table.keys().next_back().copied().unwrap_or(0);
        let mut pmf = vec![0.0; bound + 1];
        for (&r, &p) in table {
            pmf[r] = p;
        }
        Self::from_pmf(&pmf)
    }

    fn with_dropped(mut pmf: Vec<f64>, tail_mass_dropped: f64) -> Result<Self> {
        if pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return param("repeat probabilities must be finite and non-negative");
        }
        while pmf.len() > 1 && pmf.last() == Some(&0.0) {
            pmf.pop();
        }
        let total: f64 = pmf.iter().sum();
        if total <= 0.0 {
            return param("repeat distribution has zero total mass");
        }
        for p in pmf.iter_mut() {
            *p /= total;
        }
        let mean: f64 = pmf.iter().enumerate().map(|(r, p)| r as f64 * p).sum();
        let variance: f64 = pmf
            .iter()
            .enumerate()
            .map(|(r, p)| (r as f64 - mean).powi(2) * p)
            .sum();
        let sampler = WeightedIndex::new(&pmf).expect("validated weights");
        Ok(Self {
            pmf,
            mean,
            variance,
            tail_mass_dropped,
            sampler,
        })
    }

    /// Bernoulli deletion law: `{0: d, 1: 1 - d}`.
    pub fn deletion(d: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&d) {
            return param(format!("deletion probability must lie in [0, 1), got {d}"));
        }
        Self::from_pmf(&[d, 1.0 - d])
    }

    /// Poisson(`lambda`) truncated at the smallest `B` whose tail mass
    /// `P(R > B)` is below `tail_tol`, then renormalized.
    pub fn poisson(lambda: f64, tail_tol: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return param(format!("Poisson rate must be positive, got {lambda}"));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return param(format!("tail tolerance must lie in (0, 1), got {tail_tol}"));
        }
        // Terms are generated well past the mode until they underflow the
        // tolerance by a wide margin, so tail sums are taken directly rather
        // than as 1 - (head sum).
        let mut terms = vec![(-lambda).exp()];
        let mut r = 0usize;
        loop {
            r += 1;
            let next = terms[r - 1] * lambda / r as f64;
            terms.push(next);
            if r as f64 > lambda && next < tail_tol * 1e-6 {
                break;
            }
            if r > 100_000 {
                return param("Poisson rate too large to tabulate");
            }
        }
        let mut tail = vec![0.0; terms.len() + 1];
        for k in (0..terms.len()).rev() {
            tail[k] = tail[k + 1] + terms[k];
        }
        // tail[k] = P(R >= k); choose smallest B with P(R > B) = tail[B+1] < tol.
        let bound = (0..terms.len())
            .find(|&b| tail[b + 1] < tail_tol)
            .unwrap_or(terms.len() - 1);
        let dropped = tail[bound + 1];
        Self::with_dropped(terms[..=bound].to_vec(), dropped)
    }

    /// Point mass at `r`.
    pub fn point(r: usize) -> Self {
        let mut pmf = vec![0.0; r + 1];
        pmf[r] = 1.0;
        Self::from_pmf(&pmf).expect("point mass is valid")
    }

    /// Uniform on `{lo, ..., hi}`.
    pub fn uniform(lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return param(format!("empty uniform range {lo}..={hi}"));
        }
        let mut pmf = vec![0.0; hi + 1];
        for p in &mut pmf[lo..=hi] {
            *p = 1.0;
        }
        Self::from_pmf(&pmf)
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// `P(R = r)`, zero outside the support.
    #[inline]
    pub fn prob(&self, r: usize) -> f64 {
        self.pmf.get(r).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Largest count with positive probability (the truncation bound `B`).
    pub fn max_count(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn tail_mass_dropped(&self) -> f64 {
        self.tail_mass_dropped
    }

    /// Support as `(count, probability)` pairs with positive probability.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.pmf.iter().copied().enumerate().filter(|(_, p)| *p > 0.0)
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        self.pmf
            .iter()
            .filter(|p| **p > 0.0)
            .map(|p| -p * p.log2())
            .sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sampler.sample(rng)
    }
}

impl PartialEq for RepeatDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.pmf == other.pmf
    }
}

/// Law of the output fragment a single input bit turns into.
#[derive(Clone, Debug)]
pub struct OutputDistribution {
    entries: Vec<(BitString, f64)>,
    sampler: WeightedIndex<f64>,
}

impl OutputDistribution {
    /// Builds from `(fragment, probability)` pairs; duplicate fragments are
    /// merged and the table renormalized.
    pub fn new<I: IntoIterator<Item = (BitString, f64)>>(entries: I) -> Result<Self> {
        let mut merged: BTreeMap<BitString, f64> = BTreeMap::new();
        for (frag, p) in entries {
            if !p.is_finite() || p < 0.0 {
                return param("fragment probabilities must be finite and non-negative");
            }
            if p > 0.0 {
                *merged.entry(frag).or_insert(0.0) += p;
            }
        }
        let total: f64 = merged.values().sum();
        if total <= 0.0 {
            return param("output distribution has zero total mass");
        }
        let entries: Vec<(BitString, f64)> = merged.into_iter().map(|(f, p)| (f, p / total)).collect();
        let sampler = WeightedIndex::new(entries.iter().map(|(_, p)| *p)).expect("validated weights");
        Ok(Self { entries, sampler })
    }

    pub fn point(fragment: BitString) -> Self {
        Self::new([(fragment, 1.0)]).expect("point mass is valid")
    }

    /// `bit^R` with `R` drawn from `repeat`.
    pub fn repeat_of(bit: bool, repeat: &RepeatDistribution) -> Self {
        Self::new(repeat.support().map(|(r, p)| (BitString::repeated(bit, r), p)))
            .expect("repeat law is valid")
    }

    /// Deletion with probability `d`, otherwise the bit is flipped with
    /// probability `flip`.
    pub fn deletion_flip(bit: bool, d: f64, flip: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&d) || !(0.0..=1.0).contains(&flip) {
            return param(format!("invalid deletion/flip probabilities ({d}, {flip})"));
        }
        Self::new([
            (BitString::new(), d),
            (BitString::repeated(bit, 1), (1.0 - d) * (1.0 - flip)),
            (BitString::repeated(!bit, 1), (1.0 - d) * flip),
        ])
    }

    pub fn entries(&self) -> &[(BitString, f64)] {
        &self.entries
    }

    pub fn mean_len(&self) -> f64 {
        self.entries.iter().map(|(f, p)| f.len() as f64 * p).sum()
    }

    pub fn mean_weight(&self) -> f64 {
        self.entries.iter().map(|(f, p)| f.weight() as f64 * p).sum()
    }

    pub fn second_moment_len(&self) -> f64 {
        self.entries.iter().map(|(f, p)| (f.len() as f64).powi(2) * p).sum()
    }

    pub fn max_len(&self) -> usize {
        self.entries.iter().map(|(f, _)| f.len()).max().unwrap_or(0)
    }

    pub fn min_len(&self) -> usize {
        self.entries.iter().map(|(f, _)| f.len()).min().unwrap_or(0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &BitString {
        &self.entries[self.sampler.sample(rng)].0
    }
}

impl PartialEq for OutputDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}
