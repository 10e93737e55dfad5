//! Exact transition probabilities by forward dynamic programming over
//! (input position, output position).
//!
//! Each law has a linear-domain entry point and a log-domain one. The log
//! variants run the same recursion on rows that are rescaled by exact powers
//! of two whenever they approach underflow, and add the accumulated exponent
//! back at the end.

use crate::bits::BitString;

use super::distribution::{OutputDistribution, RepeatDistribution};

const RESCALE_BELOW: f64 = 1.0 / (1u128 << 100) as f64 / (1u128 << 100) as f64; // 2^-200
const RESCALE_BY: f64 = (1u128 << 100) as f64 * (1u128 << 100) as f64; // 2^200
const RESCALE_EXP: i64 = 200;

/// A probability represented as `value * 2^(-shift)`.
#[derive(Clone, Copy, Debug)]
struct Scaled {
    value: f64,
    shift: i64,
}

impl Scaled {
    fn ln(self) -> f64 {
        if self.value <= 0.0 {
            f64::NEG_INFINITY
        } else {
            self.value.ln() - self.shift as f64 * std::f64::consts::LN_2
        }
    }
}

fn rescale(row: &mut [f64], shift: &mut i64) {
    let max = row.iter().copied().fold(0.0, f64::max);
    if max > 0.0 && max < RESCALE_BELOW {
        for v in row.iter_mut() {
            *v *= RESCALE_BY;
        }
        *shift += RESCALE_EXP;
    }
}

/// `runs[b][j]`: number of consecutive copies of bit `b` in `y` starting at
/// 0-based position `j` (with `runs[b][len] = 0`).
fn runs_from(y: &[bool]) -> [Vec<usize>; 2] {
    let m = y.len();
    let mut runs = [vec![0; m + 1], vec![0; m + 1]];
    for j in (0..m).rev() {
        let b = y[j] as usize;
        runs[b][j] = runs[b][j + 1] + 1;
        runs[1 - b][j] = 0;
    }
    runs
}

fn bits_of(s: &BitString) -> Vec<bool> {
    s.iter().collect()
}

fn repeat_forward(dist: &RepeatDistribution, x: &BitString, y: &BitString, scaled: bool) -> Scaled {
    let n = x.len();
    let m = y.len();
    let pmf = dist.pmf();
    let bound = dist.max_count();
    if m > bound * n {
        return Scaled { value: 0.0, shift: 0 };
    }
    let yb = bits_of(y);
    let runs = runs_from(&yb);
    let mut cur = vec![0.0; m + 1];
    let mut next = vec![0.0; m + 1];
    cur[0] = 1.0;
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut shift = 0i64;
    for i in 0..n {
        let b = x.get(i) as usize;
        let new_hi = (hi + bound).min(m);
        next[lo..=new_hi].fill(0.0);
        for j in lo..=hi {
            let v = cur[j];
            if v == 0.0 {
                continue;
            }
            let max_r = bound.min(runs[b][j]);
            for r in 0..=max_r {
                next[j + r] += v * pmf[r];
            }
        }
        // Entries that cannot reach the end of y with the remaining input
        // are dead.
        let remaining = n - i - 1;
        let new_lo = lo.max(m.saturating_sub(bound * remaining));
        if new_lo > new_hi {
            return Scaled { value: 0.0, shift: 0 };
        }
        std::mem::swap(&mut cur, &mut next);
        lo = new_lo;
        hi = new_hi;
        if scaled {
            rescale(&mut cur[lo..=hi], &mut shift);
        }
    }
    Scaled { value: if hi == m { cur[m] } else { 0.0 }, shift }
}

/// `P(RC_D x = y)`.
pub fn likelihood_rc(dist: &RepeatDistribution, x: &BitString, y: &BitString) -> f64 {
    repeat_forward(dist, x, y, false).value
}

/// Natural log of [`likelihood_rc`], computed without underflow.
pub fn log_likelihood_rc(dist: &RepeatDistribution, x: &BitString, y: &BitString) -> f64 {
    repeat_forward(dist, x, y, true).ln()
}

fn trimming_forward(dist: &RepeatDistribution, x: &BitString, y: &BitString, scaled: bool) -> Scaled {
    let n = x.len();
    let m = y.len();
    let p0 = dist.prob(0);
    if m == 0 {
        // Every one in x must be deleted; zeros may produce anything.
        let w = x.weight() as i32;
        if !scaled || p0 == 0.0 {
            return Scaled { value: p0.powi(w), shift: 0 };
        }
        let ln = w as f64 * p0.ln();
        let shift = ((-ln / std::f64::consts::LN_2).floor() as i64).max(0);
        return Scaled {
            value: (ln + shift as f64 * std::f64::consts::LN_2).exp(),
            shift,
        };
    }
    if !y.get(0) || !y.get(m - 1) {
        return Scaled { value: 0.0, shift: 0 };
    }
    let pmf = dist.pmf();
    let bound = dist.max_count();
    if m > bound * n {
        return Scaled { value: 0.0, shift: 0 };
    }
    let yb = bits_of(y);
    let runs = runs_from(&yb);
    // State 0: still inside the trimmed zero prefix. State j >= 1: the first
    // j bits of y are produced. State m absorbs the trimmed zero suffix.
    let mut cur = vec![0.0; m + 1];
    let mut next = vec![0.0; m + 1];
    cur[0] = 1.0;
    let mut shift = 0i64;
    let (mut lo, mut hi) = (0usize, 0usize);
    for i in 0..n {
        let b = x.get(i);
        let new_hi = (hi + bound).min(m);
        next[lo..=new_hi].fill(0.0);
        for j in lo..=hi {
            let v = cur[j];
            if v == 0.0 {
                continue;
            }
            if j == 0 {
                if b {
                    next[0] += v * p0;
                    for r in 1..=bound.min(runs[1][0]) {
                        next[r] += v * pmf[r];
                    }
                } else {
                    next[0] += v;
                }
            } else if j == m {
                next[m] += if b { v * p0 } else { v };
            } else {
                let max_r = bound.min(runs[b as usize][j]);
                for r in 0..=max_r {
                    next[j + r] += v * pmf[r];
                }
            }
        }
        let remaining = n - i - 1;
        let new_lo = lo.max(m.saturating_sub(bound * remaining));
        if new_lo > new_hi {
            return Scaled { value: 0.0, shift: 0 };
        }
        std::mem::swap(&mut cur, &mut next);
        lo = new_lo;
        hi = new_hi;
        if scaled {
            rescale(&mut cur[lo..=hi], &mut shift);
        }
    }
    Scaled { value: if hi == m { cur[m] } else { 0.0 }, shift }
}

/// `P(TRC_D x = y) = sum over l, r of P(RC_D x = 0^l y 0^r)`.
///
/// Zero whenever `y` is non-empty and does not start and end with a one.
pub fn likelihood_trc(dist: &RepeatDistribution, x: &BitString, y: &BitString) -> f64 {
    trimming_forward(dist, x, y, false).value
}

pub fn log_likelihood_trc(dist: &RepeatDistribution, x: &BitString, y: &BitString) -> f64 {
    trimming_forward(dist, x, y, true).ln()
}

/// Forward pass for fragment laws against a pattern whose entries are either
/// a required bit or a wildcard. Returns the final row over output lengths
/// `0..=pattern.len()`.
fn fragment_forward(
    d0: &OutputDistribution,
    d1: &OutputDistribution,
    x: &BitString,
    pattern: &[Option<bool>],
    exact_target: bool,
    scaled: bool,
) -> (Vec<f64>, i64) {
    let n = x.len();
    let p_len = pattern.len();
    let max_frag = d0.max_len().max(d1.max_len());
    let mut cur = vec![0.0; p_len + 1];
    let mut next = vec![0.0; p_len + 1];
    cur[0] = 1.0;
    let mut shift = 0i64;
    let (mut lo, mut hi) = (0usize, 0usize);
    for i in 0..n {
        let law = if x.get(i) { d1 } else { d0 };
        let new_hi = (hi + max_frag).min(p_len);
        next[lo..=new_hi].fill(0.0);
        for j in lo..=hi {
            let v = cur[j];
            if v == 0.0 {
                continue;
            }
            for (frag, p) in law.entries() {
                let len = frag.len();
                if j + len > p_len {
                    continue;
                }
                let fits = (0..len).all(|k| match pattern[j + k] {
                    Some(bit) => frag.get(k) == bit,
                    None => true,
                });
                if fits {
                    next[j + len] += v * p;
                }
            }
        }
        let remaining = n - i - 1;
        let new_lo = if exact_target {
            lo.max(p_len.saturating_sub(max_frag * remaining))
        } else {
            lo
        };
        if new_lo > new_hi {
            return (vec![0.0; p_len + 1], 0);
        }
        std::mem::swap(&mut cur, &mut next);
        lo = new_lo;
        hi = new_hi;
        if scaled {
            rescale(&mut cur[lo..=hi], &mut shift);
        }
        cur[..lo].fill(0.0);
        cur[hi + 1..].fill(0.0);
    }
    (cur, shift)
}

fn dobrushin_forward(d0: &OutputDistribution, d1: &OutputDistribution, x: &BitString, y: &BitString, scaled: bool) -> Scaled {
    if y.len() > x.len() * d0.max_len().max(d1.max_len()) {
        return Scaled { value: 0.0, shift: 0 };
    }
    let pattern: Vec<Option<bool>> = y.iter().map(Some).collect();
    let (row, shift) = fragment_forward(d0, d1, x, &pattern, true, scaled);
    Scaled { value: row[y.len()], shift }
}

/// `P(DC x = y)` for the Dobrushin channel with per-bit laws `d0`, `d1`.
pub fn likelihood_dobrushin(d0: &OutputDistribution, d1: &OutputDistribution, x: &BitString, y: &BitString) -> f64 {
    dobrushin_forward(d0, d1, x, y, false).value
}

pub fn log_likelihood_dobrushin(d0: &OutputDistribution, d1: &OutputDistribution, x: &BitString, y: &BitString) -> f64 {
    dobrushin_forward(d0, d1, x, y, true).ln()
}

/// Terms `ln P(T_l = tl) + ln P(T_r = tr) + ln P(cut output = y | tl, tr)`,
/// one forward pass per left cut. Used for the empty output.
fn trimming_dobrushin_terms(
    d0: &OutputDistribution,
    d1: &OutputDistribution,
    trim_left: &RepeatDistribution,
    trim_right: &RepeatDistribution,
    x: &BitString,
    y: &BitString,
    scaled: bool,
) -> Vec<f64> {
    let m = y.len();
    let tr_max = trim_right.max_count();
    let mut terms = Vec::new();
    for (tl, p_tl) in trim_left.support() {
        let mut pattern: Vec<Option<bool>> = vec![None; tl];
        pattern.extend(y.iter().map(Some));
        pattern.extend(std::iter::repeat_n(None, tr_max));
        let (row, shift) = fragment_forward(d0, d1, x, &pattern, false, scaled);
        let log_scale = -(shift as f64) * std::f64::consts::LN_2;
        for (tr, p_tr) in trim_right.support() {
            let mass = if m == 0 {
                // Empty output whenever the cuts consume everything.
                row[..=(tl + tr).min(pattern.len())].iter().sum::<f64>()
            } else {
                row[tl + m + tr]
            };
            if mass > 0.0 {
                let term = if scaled {
                    p_tl.ln() + p_tr.ln() + mass.ln() + log_scale
                } else {
                    p_tl * p_tr * mass
                };
                terms.push(term);
            }
        }
    }
    terms
}

/// Single forward pass for a non-empty cut output `y`. The output stream is
/// in one of three phases: before `y` (state: bits emitted, all to be cut),
/// inside `y` (state: bits of `y` matched) or after it (state: bits emitted
/// past the end of `y`). A fragment may straddle phase boundaries; the left
/// cut is charged when `y` starts and the right cut at the end.
fn tdc_forward(
    d0: &OutputDistribution,
    d1: &OutputDistribution,
    trim_left: &RepeatDistribution,
    trim_right: &RepeatDistribution,
    x: &BitString,
    y: &BitString,
    scaled: bool,
) -> Scaled {
    let m = y.len();
    debug_assert!(m > 0);
    let yb = bits_of(y);
    let tl_pmf = trim_left.pmf();
    let tr_pmf = trim_right.pmf();
    let (tl_max, tr_max) = (trim_left.max_count(), trim_right.max_count());
    // Layout: pre[0..=tl_max], mid[1..m] at offset tl_max, post[0..=tr_max].
    let mid_at = tl_max + 1;
    let post_at = mid_at + m;
    let size = post_at + tr_max + 1;
    let mut cur = vec![0.0; size];
    let mut next = vec![0.0; size];
    cur[0] = 1.0;
    let mut shift = 0i64;
    // Bits of `frag[from..]` placed after `j` matched bits of `y`.
    let place = |next: &mut [f64], frag: &BitString, from: usize, j: usize, w: f64| {
        let len = frag.len() - from;
        let take = len.min(m - j);
        if (0..take).all(|k| frag.get(from + k) == yb[j + k]) {
            let end = j + take;
            if end < m {
                next[mid_at + end - 1] += w;
            } else if len - take <= tr_max {
                next[post_at + len - take] += w;
            }
        }
    };
    for i in 0..x.len() {
        let law = if x.get(i) { d1 } else { d0 };
        next.fill(0.0);
        for c in 0..=tl_max {
            let v = cur[c];
            if v == 0.0 {
                continue;
            }
            for (frag, p) in law.entries() {
                let len = frag.len();
                if c + len <= tl_max {
                    next[c + len] += v * p;
                }
                // `y` starts at offset s inside this fragment.
                for s in 0..len {
                    let w = tl_pmf.get(c + s).copied().unwrap_or(0.0);
                    if w > 0.0 {
                        place(&mut next, frag, s, 0, v * p * w);
                    }
                }
            }
        }
        for j in 1..m {
            let v = cur[mid_at + j - 1];
            if v == 0.0 {
                continue;
            }
            for (frag, p) in law.entries() {
                place(&mut next, frag, 0, j, v * p);
            }
        }
        for e in 0..=tr_max {
            let v = cur[post_at + e];
            if v == 0.0 {
                continue;
            }
            for (frag, p) in law.entries() {
                if e + frag.len() <= tr_max {
                    next[post_at + e + frag.len()] += v * p;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        if scaled {
            rescale(&mut cur, &mut shift);
        }
    }
    let value = (0..=tr_max).map(|e| cur[post_at + e] * tr_pmf.get(e).copied().unwrap_or(0.0)).sum();
    Scaled { value, shift }
}

/// `P(TDC x = y)`: the Dobrushin output with `T_l` bits cut from the left and
/// `T_r` from the right (empty if the cuts exceed its length).
pub fn likelihood_tdc(
    d0: &OutputDistribution,
    d1: &OutputDistribution,
    trim_left: &RepeatDistribution,
    trim_right: &RepeatDistribution,
    x: &BitString,
    y: &BitString,
) -> f64 {
    if y.is_empty() {
        trimming_dobrushin_terms(d0, d1, trim_left, trim_right, x, y, false).into_iter().sum()
    } else {
        tdc_forward(d0, d1, trim_left, trim_right, x, y, false).value
    }
}

pub fn log_likelihood_tdc(
    d0: &OutputDistribution,
    d1: &OutputDistribution,
    trim_left: &RepeatDistribution,
    trim_right: &RepeatDistribution,
    x: &BitString,
    y: &BitString,
) -> f64 {
    if y.is_empty() {
        log_sum_exp(&trimming_dobrushin_terms(d0, d1, trim_left, trim_right, x, y, true))
    } else {
        tdc_forward(d0, d1, trim_left, trim_right, x, y, true).ln()
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::trim;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    /// Brute force over every repetition vector in `support^|x|`.
    fn enumerate_rc(pmf: &[f64], x: &BitString) -> Vec<(BitString, f64)> {
        let mut out = vec![(BitString::new(), 1.0)];
        for bit in x.iter() {
            let mut grown = Vec::new();
            for (prefix, p) in &out {
                for (r, &pr) in pmf.iter().enumerate() {
                    if pr == 0.0 {
                        continue;
                    }
                    let mut y = prefix.clone();
                    y.push_repeated(bit, r);
                    grown.push((y, p * pr));
                }
            }
            out = grown;
        }
        out
    }

    fn oracle_rc(pmf: &[f64], x: &BitString, y: &BitString) -> f64 {
        enumerate_rc(pmf, x).into_iter().filter(|(o, _)| o == y).map(|(_, p)| p).sum()
    }

    fn oracle_trc(pmf: &[f64], x: &BitString, y: &BitString) -> f64 {
        enumerate_rc(pmf, x)
            .into_iter()
            .filter(|(o, _)| &trim(o).trimmed == y)
            .map(|(_, p)| p)
            .sum()
    }

    #[test]
    fn rc_examples() {
        let d = RepeatDistribution::deletion(0.3).unwrap();
        assert!((likelihood_rc(&d, &b("1"), &b("")) - 0.3).abs() < 1e-15);
        assert!((likelihood_rc(&d, &b("11"), &b("1")) - 0.42).abs() < 1e-15);
        let pmf = [0.2, 0.5, 0.3];
        let dist = RepeatDistribution::from_pmf(&pmf).unwrap();
        let expected = oracle_rc(&pmf, &b("10"), &b("100"));
        assert!((expected - 0.15).abs() < 1e-15);
        assert!((likelihood_rc(&dist, &b("10"), &b("100")) - expected).abs() < 1e-15);
        assert_eq!(likelihood_rc(&d, &b("10"), &b("11")), 0.0);
        assert_eq!(likelihood_rc(&d, &b("10"), &b("100")), 0.0);
    }

    #[test]
    fn trc_examples() {
        let d = RepeatDistribution::deletion(0.3).unwrap();
        assert!((likelihood_trc(&d, &b("1"), &b("1")) - 0.7).abs() < 1e-15);
        assert!((likelihood_trc(&d, &b("1"), &b("")) - 0.3).abs() < 1e-15);
        let half = RepeatDistribution::deletion(0.5).unwrap();
        assert!((likelihood_trc(&half, &b("01"), &b("1")) - 0.5).abs() < 1e-15);
        assert!((likelihood_trc(&half, &b("01"), &b("")) - 0.5).abs() < 1e-15);
        assert_eq!(likelihood_trc(&half, &b("01"), &b("01")), 0.0);

        let pmf = [0.5, 0.0, 0.5];
        let dist = RepeatDistribution::from_pmf(&pmf).unwrap();
        let x = b("010");
        let mut total = 0.0;
        for y in ["", "11"] {
            let y = b(y);
            let p = likelihood_trc(&dist, &x, &y);
            assert!((p - oracle_trc(&pmf, &x, &y)).abs() < 1e-15);
            total += p;
        }
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_variants_agree_and_survive_underflow() {
        let d = RepeatDistribution::deletion(0.3).unwrap();
        let x = b("1101001110100101");
        let y = b("11010111001");
        let lin = likelihood_rc(&d, &x, &y);
        assert!(((log_likelihood_rc(&d, &x, &y) - lin.ln()) / lin.ln()).abs() < 1e-9);
        let lin = likelihood_trc(&d, &x, &y);
        assert!(((log_likelihood_trc(&d, &x, &y) - lin.ln()) / lin.ln()).abs() < 1e-9);

        let long_x = BitString::from_bits((0..3000).map(|i| i % 3 != 0));
        let long_y = long_x.slice(0..2000);
        let ll = log_likelihood_rc(&d, &long_x, &long_y);
        assert!(ll.is_finite() && ll < -745.0, "{ll}");
        assert_eq!(likelihood_rc(&d, &long_x, &long_y), 0.0);
    }

    #[test]
    fn dobrushin_reduces_to_repeat() {
        let d = RepeatDistribution::deletion(0.3).unwrap();
        let d0 = OutputDistribution::repeat_of(false, &d);
        let d1 = OutputDistribution::repeat_of(true, &d);
        for n in 0..=6 {
            for xi in 0..(1u64 << n) {
                let x = BitString::from_index(xi, n);
                for len in 0..=n {
                    for yi in 0..(1u64 << len) {
                        let y = BitString::from_index(yi, len);
                        let a = likelihood_rc(&d, &x, &y);
                        let c = likelihood_dobrushin(&d0, &d1, &x, &y);
                        assert!((a - c).abs() < 1e-12, "x={x} y={y}");
                    }
                }
            }
        }
    }

    #[test]
    fn dobrushin_examples() {
        let d0 = OutputDistribution::point(b("0"));
        let d1 = OutputDistribution::point(b("1"));
        let x = b("011010");
        assert_eq!(likelihood_dobrushin(&d0, &d1, &x, &x), 1.0);
        assert_eq!(likelihood_dobrushin(&d0, &d1, &x, &b("011011")), 0.0);
        let flip = OutputDistribution::new([(b("1"), 0.9), (b("0"), 0.1)]).unwrap();
        assert!((likelihood_dobrushin(&d0, &flip, &b("1"), &b("0")) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn tdc_without_trimming_is_dobrushin() {
        let d0 = OutputDistribution::deletion_flip(false, 0.2, 0.1).unwrap();
        let d1 = OutputDistribution::deletion_flip(true, 0.2, 0.1).unwrap();
        let none = RepeatDistribution::point(0);
        let x = b("01101");
        for len in 0..=5 {
            for yi in 0..(1u64 << len) {
                let y = BitString::from_index(yi, len);
                let a = likelihood_dobrushin(&d0, &d1, &x, &y);
                let t = likelihood_tdc(&d0, &d1, &none, &none, &x, &y);
                assert!((a - t).abs() < 1e-14);
                if a > 0.0 {
                    let lt = log_likelihood_tdc(&d0, &d1, &none, &none, &x, &y);
                    assert!((lt - a.ln()).abs() < 1e-9 * a.ln().abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn tdc_matches_enumeration() {
        let d0 = OutputDistribution::deletion_flip(false, 0.2, 0.1).unwrap();
        let d1 = OutputDistribution::deletion_flip(true, 0.2, 0.1).unwrap();
        let tl = RepeatDistribution::from_pmf(&[0.5, 0.3, 0.2]).unwrap();
        let tr = RepeatDistribution::from_pmf(&[0.6, 0.4]).unwrap();
        let x = b("1011");
        // Enumerate all Dobrushin outputs, then all cuts.
        let mut outputs = vec![(BitString::new(), 1.0)];
        for bit in x.iter() {
            let law = if bit { &d1 } else { &d0 };
            let mut grown = Vec::new();
            for (prefix, p) in &outputs {
                for (frag, q) in law.entries() {
                    grown.push((BitString::concat(&[prefix, frag]), p * q));
                }
            }
            outputs = grown;
        }
        let mut table = std::collections::HashMap::<BitString, f64>::new();
        for (z, p) in &outputs {
            for (l, pl) in tl.support() {
                for (r, pr) in tr.support() {
                    let cut = if l + r >= z.len() { BitString::new() } else { z.slice(l..z.len() - r) };
                    *table.entry(cut).or_default() += p * pl * pr;
                }
            }
        }
        let mut total = 0.0;
        for (y, p) in &table {
            let got = likelihood_tdc(&d0, &d1, &tl, &tr, &x, y);
            assert!((got - p).abs() < 1e-14, "y={y}: {got} vs {p}");
            total += got;
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tdc_matches_enumeration_with_long_fragments() {
        let d0 = OutputDistribution::new([(b(""), 0.1), (b("0"), 0.5), (b("00"), 0.2), (b("01"), 0.2)]).unwrap();
        let d1 = OutputDistribution::new([(b("1"), 0.6), (b("110"), 0.3), (b("0"), 0.1)]).unwrap();
        let tl = RepeatDistribution::from_pmf(&[0.4, 0.1, 0.3, 0.2]).unwrap();
        let tr = RepeatDistribution::from_pmf(&[0.2, 0.5, 0.3]).unwrap();
        for x in ["0110", "10", "1", "00101"] {
            let x = b(x);
            let mut outputs = vec![(BitString::new(), 1.0)];
            for bit in x.iter() {
                let law = if bit { &d1 } else { &d0 };
                let mut grown = Vec::new();
                for (prefix, p) in &outputs {
                    for (frag, q) in law.entries() {
                        grown.push((BitString::concat(&[prefix, frag]), p * q));
                    }
                }
                outputs = grown;
            }
            let mut table = std::collections::HashMap::<BitString, f64>::new();
            for (z, p) in &outputs {
                for (l, pl) in tl.support() {
                    for (r, pr) in tr.support() {
                        let cut = if l + r >= z.len() { BitString::new() } else { z.slice(l..z.len() - r) };
                        *table.entry(cut).or_default() += p * pl * pr;
                    }
                }
            }
            for (y, p) in &table {
                let got = likelihood_tdc(&d0, &d1, &tl, &tr, &x, y);
                assert!((got - p).abs() < 1e-14, "x={x} y={y}: {got} vs {p}");
                if *p > 0.0 {
                    let lg = log_likelihood_tdc(&d0, &d1, &tl, &tr, &x, y);
                    assert!((lg - p.ln()).abs() < 1e-9, "x={x} y={y}");
                }
            }
            // Strings outside the support.
            assert_eq!(likelihood_tdc(&d0, &d1, &tl, &tr, &x, &b("1111111111111")), 0.0);
        }
    }

    #[test]
    fn tdc_log_domain_survives_long_inputs() {
        let d0 = OutputDistribution::deletion_flip(false, 0.1, 0.05).unwrap();
        let d1 = OutputDistribution::deletion_flip(true, 0.1, 0.05).unwrap();
        let t = RepeatDistribution::uniform(0, 4).unwrap();
        let x = BitString::from_bits((0..9000).map(|i| i % 3 == 0));
        let y = x.slice(2..8990);
        let ll = log_likelihood_tdc(&d0, &d1, &t, &t, &x, &y);
        assert!(ll.is_finite() && ll < -745.0, "{ll}");
    }
}
