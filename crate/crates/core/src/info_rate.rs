//! Exact mutual information and finite-blocklength information rates.
//!
//! A [`TransitionTable`] holds `P(y | x)` for every `x` in `{0,1}^n` and every
//! reachable `y`, built by exact enumeration of channel outputs (identical
//! partial outputs are merged, nothing is pruned). [`maximize_mi`] runs
//! Blahut–Arimoto on it with a duality-gap stopping rule.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{balance_window, trim, BitString};
use crate::channels::{ChannelModel, DobrushinLaw, RepeatDistribution};
use crate::error::{param, Error, Result};

/// Default cap on distinct partial outputs per row, and on table entries.
pub const DEFAULT_BUDGET: usize = 1 << 22;

/// Blocklength limit for tables (rows are indexed by `u64`, and `2^n` rows
/// are materialized).
pub const MAX_BLOCKLENGTH: usize = 16;

/// `P(y | x)` over `x in {0,1}^n`. Row `i` is the input
/// `BitString::from_index(i, n)`; entries are `(output index, probability)`.
#[derive(Clone, Debug)]
pub struct TransitionTable {
    n: usize,
    outputs: Vec<BitString>,
    rows: Vec<Vec<(u32, f64)>>,
}

impl TransitionTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> &[BitString] {
        &self.outputs
    }

    pub fn row(&self, x: usize) -> &[(u32, f64)] {
        &self.rows[x]
    }

    pub fn prob(&self, x: &BitString, y: &BitString) -> f64 {
        let Ok(col) = self.outputs.binary_search(y) else {
            return 0.0;
        };
        self.rows[x.to_index() as usize]
            .iter()
            .find(|(c, _)| *c as usize == col)
            .map_or(0.0, |&(_, p)| p)
    }

    pub fn row_sum(&self, x: usize) -> f64 {
        self.rows[x].iter().map(|&(_, p)| p).sum()
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// The same table with output columns reordered by `perm` (column `c`
    /// becomes `perm[c]`); output labels are dropped from the ordering
    /// invariant, so this is only meant for invariance checks.
    pub fn permute_outputs(&self, perm: &[usize]) -> Self {
        let mut outputs = self.outputs.clone();
        for (c, o) in self.outputs.iter().enumerate() {
            outputs[perm[c]] = o.clone();
        }
        Self {
            n: self.n,
            outputs,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|&(c, p)| (perm[c as usize] as u32, p)).collect())
                .collect(),
        }
    }

    fn output_marginal(&self, input: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.outputs.len()];
        for (row, &px) in self.rows.iter().zip(input) {
            if px == 0.0 {
                continue;
            }
            for &(c, p) in row {
                q[c as usize] += px * p;
            }
        }
        q
    }

    /// `D(x) = sum_y P(y|x) log2(P(y|x) / q(y))` for every input.
    fn divergences(&self, q: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&(c, p)| if p > 0.0 { p * (p / q[c as usize]).log2() } else { 0.0 })
                    .sum()
            })
            .collect()
    }
}

/// Output distribution of a single input string, before trimming, as a map.
fn raw_outputs(law: &DobrushinLaw, x: &BitString, budget: usize) -> Result<HashMap<BitString, f64>> {
    let mut cur: HashMap<BitString, f64> = HashMap::from([(BitString::new(), 1.0)]);
    for bit in x.iter() {
        let frags = if bit { law.d1.entries() } else { law.d0.entries() };
        let mut next: HashMap<BitString, f64> = HashMap::with_capacity(cur.len() * frags.len());
        for (prefix, p) in &cur {
            for (frag, q) in frags {
                *next.entry(BitString::concat(&[prefix, frag])).or_default() += p * q;
            }
        }
        if next.len() > budget {
            return Err(Error::Budget(format!(
                "more than {budget} distinct partial outputs for input {x}"
            )));
        }
        cur = next;
    }
    Ok(cur)
}

fn cut(z: &BitString, left: usize, right: usize) -> BitString {
    if left + right >= z.len() {
        BitString::new()
    } else {
        z.slice(left..z.len() - right)
    }
}

fn row_outputs(model: &ChannelModel, law: &DobrushinLaw, x: &BitString, budget: usize) -> Result<HashMap<BitString, f64>> {
    let raw = raw_outputs(law, x, budget)?;
    Ok(match model {
        ChannelModel::Repeat(_) | ChannelModel::Dobrushin(_) => raw,
        ChannelModel::TrimmingRepeat(_) => {
            let mut out = HashMap::new();
            for (z, p) in raw {
                *out.entry(trim(&z).trimmed).or_default() += p;
            }
            out
        }
        ChannelModel::TrimmingDobrushin {
            trim_left, trim_right, ..
        } => {
            let mut out = HashMap::new();
            for (z, p) in raw {
                for (l, pl) in trim_left.support() {
                    for (r, pr) in trim_right.support() {
                        *out.entry(cut(&z, l, r)).or_default() += p * pl * pr;
                    }
                }
            }
            out
        }
    })
}

/// Exact transition table of `model` at blocklength `n`.
///
/// `budget` caps both the distinct partial outputs of any single row and
/// the total number of table entries; exceeding it is an error and no
/// partial table is returned.
pub fn build_transition_table(model: &ChannelModel, n: usize, budget: usize) -> Result<TransitionTable> {
    if n == 0 || n > MAX_BLOCKLENGTH {
        return param(format!("blocklength n = {n} outside 1..={MAX_BLOCKLENGTH}"));
    }
    if (1usize << n) > budget {
        return Err(Error::Budget(format!("2^{n} rows exceed budget {budget}")));
    }
    let law = model.dobrushin_law();
    let maps: Vec<HashMap<BitString, f64>> = (0..1u64 << n)
        .into_par_iter()
        .map(|i| row_outputs(model, &law, &BitString::from_index(i, n), budget))
        .collect::<Result<_>>()?;
    let total: usize = maps.iter().map(HashMap::len).sum();
    if total > budget {
        return Err(Error::Budget(format!("{total} table entries exceed budget {budget}")));
    }
    let mut outputs: Vec<BitString> = maps.iter().flat_map(|m| m.keys().cloned()).collect();
    outputs.sort_unstable();
    outputs.dedup();
    let index: HashMap<&BitString, u32> = outputs.iter().enumerate().map(|(i, y)| (y, i as u32)).collect();
    let rows = maps
        .iter()
        .map(|m| {
            let mut row: Vec<(u32, f64)> = m.iter().map(|(y, &p)| (index[y], p)).collect();
            row.sort_unstable_by_key(|&(c, _)| c);
            row
        })
        .collect();
    Ok(TransitionTable { n, outputs, rows })
}

fn check_input(input: &[f64], tbl: &TransitionTable) -> Result<()> {
    if input.len() != tbl.num_inputs() {
        return Err(Error::Length {
            expected: tbl.num_inputs(),
            actual: input.len(),
        });
    }
    let sum: f64 = input.iter().sum();
    if input.iter().any(|&p| p < 0.0 || !p.is_finite()) || (sum - 1.0).abs() > 1e-9 {
        return param("input distribution must be non-negative and sum to 1");
    }
    Ok(())
}

/// `I(X;Y)` in bits.
pub fn mutual_information(input: &[f64], tbl: &TransitionTable) -> Result<f64> {
    check_input(input, tbl)?;
    let q = tbl.output_marginal(input);
    let d = tbl.divergences(&q);
    Ok(input.iter().zip(&d).map(|(p, d)| p * d).sum::<f64>().max(0.0))
}

pub fn uniform_input(n: usize) -> Vec<f64> {
    vec![1.0 / (1u64 << n) as f64; 1 << n]
}

/// Shannon entropy in bits.
pub fn entropy_bits(dist: &[f64]) -> f64 {
    dist.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct CapacityEstimate {
    pub n: usize,
    /// `mi / n`.
    pub info_rate: f64,
    pub mi: f64,
    /// Indexed like the table rows.
    pub input_dist: Vec<f64>,
    pub iterations: usize,
    /// Upper bound on `sup I - mi`.
    pub convergence_gap: f64,
    pub converged: bool,
    /// Mutual information after each update.
    #[serde(skip)]
    pub history: Vec<f64>,
}

pub const DEFAULT_BA_TOL: f64 = 1e-7;
pub const DEFAULT_BA_MAX_ITER: usize = 200_000;

/// Blahut–Arimoto from the uniform input. Stops when
/// `max_x D(x) - I < tol`; that quantity bounds the distance to the
/// finite-`n` supremum.
pub fn maximize_mi(tbl: &TransitionTable, tol: f64, max_iter: usize) -> Result<CapacityEstimate> {
    if tol.is_nan() || tol <= 0.0 {
        return param("tol must be positive");
    }
    let mut p = uniform_input(tbl.n());
    let mut history = Vec::new();
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    let mut iterations = 0;
    loop {
        let q = tbl.output_marginal(&p);
        let d = tbl.divergences(&q);
        let mi = p.iter().zip(&d).map(|(p, d)| p * d).sum::<f64>().max(0.0);
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gap = (upper - mi).max(0.0);
        history.push(mi);
        if best.as_ref().is_none_or(|b| mi >= b.0) {
            best = Some((mi, gap, p.clone()));
        }
        if gap < tol || iterations >= max_iter {
            let (mi, gap, p) = best.expect("at least one iterate");
            return Ok(CapacityEstimate {
                n: tbl.n(),
                info_rate: mi / tbl.n() as f64,
                mi,
                input_dist: p,
                iterations,
                convergence_gap: gap,
                converged: gap < tol,
                history,
            });
        }
        // p(x) <- p(x) 2^(D(x)) / Z, shifted by the max for stability.
        let mut z = 0.0;
        for (px, dx) in p.iter_mut().zip(&d) {
            *px *= (dx - upper).exp2();
            z += *px;
        }
        for px in p.iter_mut() {
            *px /= z;
        }
        iterations += 1;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrimComparison {
    pub n: usize,
    pub i_rc: f64,
    pub i_trc: f64,
    /// `|i_rc - i_trc|`.
    pub gap: f64,
    /// `H(L, R)`: entropy of the (left, right) zero counts removed by the trim.
    pub trim_pair_entropy: f64,
    pub distinct_trim_pairs: usize,
}

/// `I(X;Y)` under `RC_D` and `TRC_D` for the same input distribution.
pub fn compare_rc_trc(dist: &RepeatDistribution, n: usize, input: &[f64], budget: usize) -> Result<TrimComparison> {
    let rc = build_transition_table(&ChannelModel::Repeat(dist.clone()), n, budget)?;
    let trc = build_transition_table(&ChannelModel::TrimmingRepeat(dist.clone()), n, budget)?;
    let i_rc = mutual_information(input, &rc)?;
    let i_trc = mutual_information(input, &trc)?;
    let q = rc.output_marginal(input);
    let mut pairs: HashMap<(usize, usize), f64> = HashMap::new();
    for (y, &p) in rc.outputs().iter().zip(&q) {
        if p > 0.0 {
            let t = trim(y);
            // The empty output has no zeros to remove on either side.
            let key = if y.is_empty() { (0, 0) } else { (t.left_cut, t.right_cut) };
            *pairs.entry(key).or_default() += p;
        }
    }
    let probs: Vec<f64> = pairs.values().copied().collect();
    Ok(TrimComparison {
        n,
        i_rc,
        i_trc,
        gap: (i_rc - i_trc).abs(),
        trim_pair_entropy: entropy_bits(&probs),
        distinct_trim_pairs: pairs.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    pub window_len: usize,
    /// `E[w(window)] / window_len` for each window start.
    pub window_fractions: Vec<f64>,
    pub min_fraction: f64,
    pub max_fraction: f64,
    /// Some window has expected ones-fraction 0 or 1.
    pub degenerate: bool,
}

/// Expected ones-fraction of every length-`floor(zeta n)` window under an
/// input distribution over `{0,1}^n`.
pub fn balance_report(input: &[f64], n: usize, zeta: f64) -> Result<BalanceReport> {
    if input.len() != 1 << n {
        return Err(Error::Length {
            expected: 1 << n,
            actual: input.len(),
        });
    }
    if !(zeta > 0.0 && zeta <= 1.0) {
        return param("zeta must lie in (0, 1]");
    }
    let window_len = balance_window(n, zeta);
    if window_len == 0 {
        return param("window length floor(zeta n) is zero");
    }
    let mut bit_means = vec![0.0; n];
    for (i, &p) in input.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let x = BitString::from_index(i as u64, n);
        for (j, b) in x.iter().enumerate() {
            if b {
                bit_means[j] += p;
            }
        }
    }
    let window_fractions: Vec<f64> = (0..=n - window_len)
        .map(|s| bit_means[s..s + window_len].iter().sum::<f64>() / window_len as f64)
        .collect();
    let min_fraction = window_fractions.iter().copied().fold(f64::INFINITY, f64::min);
    let max_fraction = window_fractions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(BalanceReport {
        window_len,
        degenerate: min_fraction <= 1e-12 || max_fraction >= 1.0 - 1e-12,
        window_fractions,
        min_fraction,
        max_fraction,
    })
}
