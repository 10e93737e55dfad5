//! Systematic Reed–Solomon codes with errors-and-erasures decoding.
//!
//! Position `i` of a length-`n` codeword holds the coefficient of
//! `x^(n-1-i)`, so the `k` data symbols come first and the `r = n - k` parity
//! symbols last. The generator has roots `alpha^1, ..., alpha^r`.

use super::gf::{FieldElement, GaloisField};
use crate::error::{param, Error, Result};

/// A received position: a symbol, or `None` if erased.
pub type Received = Option<FieldElement>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsDecoded {
    pub codeword: Vec<FieldElement>,
    /// Corrected positions among the non-erased ones.
    pub errors: usize,
    pub erasures: usize,
}

#[derive(Clone, Debug)]
pub struct ReedSolomon {
    field: GaloisField,
    n: usize,
    k: usize,
    /// Generator polynomial, lowest degree first, monic of degree `n - k`.
    generator: Vec<FieldElement>,
}

impl ReedSolomon {
    pub fn new(field: GaloisField, n: usize, k: usize) -> Result<Self> {
        if n > field.order() {
            return param(format!("n_rs = {n} exceeds 2^q - 1 = {}", field.order()));
        }
        if k == 0 || k >= n {
            return param(format!("need 0 < k_rs < n_rs, got k_rs = {k}, n_rs = {n}"));
        }
        let mut generator = vec![1];
        for j in 1..=(n - k) {
            generator = field.poly_mul(&generator, &[field.alpha_pow(j as i64), 1]);
        }
        Ok(Self { field, n, k, generator })
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    fn check_symbols(&self, symbols: &[FieldElement]) -> Result<()> {
        match symbols.iter().find(|&&s| s as usize >= self.field.size()) {
            Some(s) => param(format!("symbol {s} is not an element of GF(2^{})", self.field.q())),
            None => Ok(()),
        }
    }

    pub fn encode(&self, data: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if data.len() != self.k {
            return Err(Error::Length {
                expected: self.k,
                actual: data.len(),
            });
        }
        self.check_symbols(data)?;
        let r = self.redundancy();
        // Remainder of data(x) * x^r modulo the generator, by synthetic
        // division in the high-first layout.
        let mut rem = vec![0 as FieldElement; r];
        for &d in data {
            let feedback = d ^ rem[0];
            rem.rotate_left(1);
            rem[r - 1] = 0;
            if feedback != 0 {
                for (j, slot) in rem.iter_mut().enumerate() {
                    // generator coefficient of x^(r-1-j)
                    *slot ^= self.field.mul(feedback, self.generator[r - 1 - j]);
                }
            }
        }
        let mut codeword = data.to_vec();
        codeword.extend_from_slice(&rem);
        Ok(codeword)
    }

    /// Locator `X_i = alpha^(n-1-i)` of position `i`.
    fn locator(&self, i: usize) -> FieldElement {
        self.field.alpha_pow((self.n - 1 - i) as i64)
    }

    /// `S_j = c(alpha^(j+1))`, `j = 0..r`, with erasures read as zero.
    pub fn syndromes(&self, word: &[Received]) -> Vec<FieldElement> {
        let f = &self.field;
        (1..=self.redundancy())
            .map(|j| {
                let x = f.alpha_pow(j as i64);
                word.iter().fold(0, |acc, s| f.mul(acc, x) ^ s.unwrap_or(0))
            })
            .collect()
    }

    /// Errors-and-erasures decoding. Succeeds whenever `2e + s <= n - k`;
    /// any output is checked by [`ReedSolomon::verify`] before it is returned.
    pub fn decode(&self, received: &[Received]) -> Result<RsDecoded> {
        if received.len() != self.n {
            return Err(Error::Length {
                expected: self.n,
                actual: received.len(),
            });
        }
        let f = &self.field;
        let r = self.redundancy();
        let erased: Vec<usize> = (0..self.n).filter(|&i| received[i].is_none()).collect();
        let s = erased.len();
        if s > r {
            return Err(Error::Decode(format!("{s} erasures exceed redundancy {r}")));
        }
        let syn = self.syndromes(received);
        let mut word: Vec<FieldElement> = received.iter().map(|v| v.unwrap_or(0)).collect();
        if syn.iter().all(|&v| v == 0) {
            return self.finish(received, word);
        }

        let mut gamma = vec![1];
        for &i in &erased {
            gamma = f.poly_mul(&gamma, &[1, self.locator(i)]);
        }
        let mut forney = f.poly_mul(&syn, &gamma);
        forney.truncate(r);
        let lambda = berlekamp_massey(f, &forney[s..]);
        let num_errors = lambda.len() - 1;
        if 2 * num_errors + s > r {
            return Err(Error::Decode("error locator degree beyond decoding radius".into()));
        }

        let psi = f.poly_mul(&lambda, &gamma);
        let mut omega = f.poly_mul(&syn, &psi);
        omega.truncate(r);
        // Formal derivative: only odd-degree terms survive in characteristic 2.
        let dpsi: Vec<FieldElement> = (1..psi.len()).map(|d| if d % 2 == 1 { psi[d] } else { 0 }).collect();

        let mut roots = 0;
        for (i, slot) in word.iter_mut().enumerate() {
            let x_inv = f.inv(self.locator(i)).expect("locators are nonzero");
            if f.eval(&psi, x_inv) != 0 {
                continue;
            }
            roots += 1;
            let denom = f.eval(&dpsi, x_inv);
            let Some(value) = f.div(f.eval(&omega, x_inv), denom) else {
                return Err(Error::Decode("repeated errata locator root".into()));
            };
            *slot ^= value;
        }
        if roots != psi.len() - 1 {
            return Err(Error::Decode(format!(
                "errata locator of degree {} has {roots} roots in the code positions",
                psi.len() - 1
            )));
        }
        self.finish(received, word)
    }

    fn finish(&self, received: &[Received], word: Vec<FieldElement>) -> Result<RsDecoded> {
        match self.verify(received, &word) {
            Some(errors) => Ok(RsDecoded {
                codeword: word,
                errors,
                erasures: received.iter().filter(|v| v.is_none()).count(),
            }),
            None => Err(Error::Decode("re-encode verification rejected the candidate".into())),
        }
    }

    /// Re-encode check. Returns the number of disagreements with the
    /// non-erased positions if `candidate` is a codeword within the decoding
    /// radius of `received`, otherwise `None`.
    pub fn verify(&self, received: &[Received], candidate: &[FieldElement]) -> Option<usize> {
        if received.len() != self.n || candidate.len() != self.n {
            return None;
        }
        let reencoded = self.encode(&candidate[..self.k]).ok()?;
        if reencoded != candidate {
            return None;
        }
        let erasures = received.iter().filter(|v| v.is_none()).count();
        let errors = received
            .iter()
            .zip(candidate)
            .filter(|(r, c)| matches!(r, Some(v) if v != *c))
            .count();
        (2 * errors + erasures <= self.redundancy()).then_some(errors)
    }

    pub fn data<'a>(&self, codeword: &'a [FieldElement]) -> &'a [FieldElement] {
        &codeword[..self.k]
    }
}

/// Shortest LFSR (connection polynomial, lowest degree first, `C_0 = 1`)
/// generating `seq`.
fn berlekamp_massey(f: &GaloisField, seq: &[FieldElement]) -> Vec<FieldElement> {
    let mut c = vec![1 as FieldElement];
    let mut b = vec![1 as FieldElement];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut last_d: FieldElement = 1;
    for n in 0..seq.len() {
        let mut d = seq[n];
        for i in 1..=len.min(c.len() - 1) {
            d ^= f.mul(c[i], seq[n - i]);
        }
        if d == 0 {
            shift += 1;
            continue;
        }
        let coef = f.div(d, last_d).expect("last discrepancy is nonzero");
        let mut next = c.clone();
        if next.len() < b.len() + shift {
            next.resize(b.len() + shift, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            next[i + shift] ^= f.mul(coef, bi);
        }
        if 2 * len <= n {
            b = c;
            len = n + 1 - len;
            last_d = d;
            shift = 1;
        } else {
            shift += 1;
        }
        c = next;
    }
    c.truncate(len + 1);
    c.resize(len + 1, 0);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::index::sample;
    use rand::Rng;

    use crate::rng::stream_rng;

    fn code(q: u32, n: usize, k: usize) -> ReedSolomon {
        ReedSolomon::new(GaloisField::new(q).unwrap(), n, k).unwrap()
    }

    /// Solves for the parity symbols from `c(alpha^j) = 0`, j = 1..=r, by
    /// Gaussian elimination; independent of the generator polynomial.
    fn parity_oracle(rs: &ReedSolomon, data: &[FieldElement]) -> Vec<FieldElement> {
        let f = rs.field();
        let (n, k, r) = (rs.n(), rs.k(), rs.redundancy());
        let mut rows: Vec<Vec<FieldElement>> = (1..=r)
            .map(|j| {
                let a = f.alpha_pow(j as i64);
                let mut row: Vec<FieldElement> = (k..n).map(|i| f.pow(a, (n - 1 - i) as u64)).collect();
                let rhs = (0..k).fold(0, |acc, i| acc ^ f.mul(data[i], f.pow(a, (n - 1 - i) as u64)));
                row.push(rhs);
                row
            })
            .collect();
        for col in 0..r {
            let pivot = (col..r).find(|&i| rows[i][col] != 0).unwrap();
            rows.swap(col, pivot);
            let inv = f.inv(rows[col][col]).unwrap();
            for v in rows[col].iter_mut() {
                *v = f.mul(*v, inv);
            }
            for i in 0..r {
                if i != col && rows[i][col] != 0 {
                    let factor = rows[i][col];
                    for j in 0..=r {
                        let sub = f.mul(factor, rows[col][j]);
                        rows[i][j] ^= sub;
                    }
                }
            }
        }
        rows.iter().map(|row| row[r]).collect()
    }

    fn random_data(rs: &ReedSolomon, rng: &mut impl Rng) -> Vec<FieldElement> {
        (0..rs.k()).map(|_| rng.gen_range(0..rs.field().size()) as FieldElement).collect()
    }

    #[test]
    fn zero_data_gives_zero_codeword() {
        let rs = code(4, 15, 11);
        assert_eq!(rs.encode(&[0; 11]).unwrap(), vec![0; 15]);
        assert!(rs.encode(&[0; 10]).is_err());
        assert!(rs.encode(&[16; 11]).is_err());
    }

    #[test]
    fn parity_matches_linear_algebra_oracle() {
        let mut rng = stream_rng(1, 0);
        for (q, n, k) in [(4, 15, 11), (5, 31, 23), (3, 7, 3)] {
            let rs = code(q, n, k);
            for _ in 0..20 {
                let data = random_data(&rs, &mut rng);
                let cw = rs.encode(&data).unwrap();
                assert_eq!(&cw[..k], &data[..]);
                assert_eq!(cw[k..].to_vec(), parity_oracle(&rs, &data));
                assert!(rs.syndromes(&cw.iter().map(|&v| Some(v)).collect::<Vec<_>>()).iter().all(|&s| s == 0));
            }
        }
    }

    #[test]
    fn minimum_distance_on_sampled_pairs() {
        let rs = code(4, 15, 11);
        let mut rng = stream_rng(2, 0);
        for _ in 0..2000 {
            let a = rs.encode(&random_data(&rs, &mut rng)).unwrap();
            let b = rs.encode(&random_data(&rs, &mut rng)).unwrap();
            if a != b {
                assert!(a.iter().zip(&b).filter(|(x, y)| x != y).count() >= 5);
            }
        }
    }

    #[test]
    fn corrects_within_radius() {
        let mut rng = stream_rng(3, 0);
        for (q, n, k) in [(4, 15, 11), (5, 31, 23), (8, 255, 223)] {
            let rs = code(q, n, k);
            let r = n - k;
            for _ in 0..300 {
                let data = random_data(&rs, &mut rng);
                let cw = rs.encode(&data).unwrap();
                let errors = rng.gen_range(0..=r / 2);
                let erasures = rng.gen_range(0..=r - 2 * errors);
                let positions = sample(&mut rng, n, errors + erasures).into_vec();
                let mut rx: Vec<Received> = cw.iter().map(|&v| Some(v)).collect();
                for &p in &positions[..errors] {
                    let delta = rng.gen_range(1..rs.field().size()) as FieldElement;
                    rx[p] = Some(cw[p] ^ delta);
                }
                for &p in &positions[errors..] {
                    rx[p] = None;
                }
                let out = rs.decode(&rx).unwrap();
                assert_eq!(out.codeword, cw);
                assert_eq!(out.errors, errors);
                assert_eq!(out.erasures, erasures);
            }
        }
    }

    #[test]
    fn beyond_radius_is_never_silently_wrong() {
        let rs = code(4, 15, 11);
        let mut rng = stream_rng(4, 0);
        for _ in 0..2000 {
            let cw = rs.encode(&random_data(&rs, &mut rng)).unwrap();
            let mut rx: Vec<Received> = cw.iter().map(|&v| Some(v)).collect();
            for p in sample(&mut rng, 15, 3).into_vec() {
                rx[p] = Some(cw[p] ^ rng.gen_range(1..16) as FieldElement);
            }
            if let Ok(out) = rs.decode(&rx) {
                assert_ne!(out.codeword, cw);
                assert!(rs.verify(&rx, &out.codeword).is_some());
            }
        }
    }

    #[test]
    fn berlekamp_massey_finds_short_recurrences() {
        let f = GaloisField::new(4).unwrap();
        // s_n = 3 s_{n-1} + 7 s_{n-2}
        let mut s = vec![1, 5];
        for n in 2..10 {
            s.push(f.mul(3, s[n - 1]) ^ f.mul(7, s[n - 2]));
        }
        assert_eq!(berlekamp_massey(&f, &s), vec![1, 3, 7]);
        assert_eq!(berlekamp_massey(&f, &[0, 0, 0]), vec![1]);
    }
}
