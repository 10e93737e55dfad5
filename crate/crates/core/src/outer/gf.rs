//! Arithmetic in GF(2^q), 2 <= q <= 16, through log/antilog tables.

use crate::error::{param, Result};

/// Field elements are stored as their polynomial-basis bit patterns.
pub type FieldElement = u16;

/// A primitive polynomial (bitmask including the x^q term) for each degree.
pub fn default_primitive_poly(q: u32) -> Option<u32> {
    Some(match q {
        2 => 0x7,
        3 => 0xB,
        4 => 0x13,
        5 => 0x25,
        6 => 0x43,
        7 => 0x89,
        8 => 0x11D,
        9 => 0x211,
        10 => 0x409,
        11 => 0x805,
        12 => 0x1053,
        13 => 0x201B,
        14 => 0x4443,
        15 => 0x8003,
        16 => 0x1100B,
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisField {
    q: u32,
    poly: u32,
    /// `exp[i] = alpha^i` for `i < 2 * order`, so products need no reduction.
    exp: Vec<FieldElement>,
    log: Vec<u32>,
}

impl GaloisField {
    pub fn new(q: u32) -> Result<Self> {
        match default_primitive_poly(q) {
            Some(p) => Self::with_poly(q, p),
            None => param(format!("field degree q = {q} outside 2..=16")),
        }
    }

    /// Builds the field from `poly`, which must be primitive (x generates the
    /// multiplicative group).
    pub fn with_poly(q: u32, poly: u32) -> Result<Self> {
        if !(2..=16).contains(&q) {
            return param(format!("field degree q = {q} outside 2..=16"));
        }
        if poly >> q != 1 {
            return param(format!("polynomial {poly:#x} does not have degree {q}"));
        }
        let size = 1usize << q;
        let order = size - 1;
        let mut exp = vec![0; 2 * order];
        let mut log = vec![0; size];
        let mut v = 1u32;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            if v == 1 && i > 0 {
                return param(format!("polynomial {poly:#x} is not primitive"));
            }
            *slot = v as FieldElement;
            log[v as usize] = i as u32;
            v <<= 1;
            if v & (1 << q) != 0 {
                v ^= poly;
            }
        }
        if v != 1 {
            return param(format!("polynomial {poly:#x} is not primitive"));
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(Self { q, poly, exp, log })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    pub fn size(&self) -> usize {
        1 << self.q
    }

    /// Multiplicative order `2^q - 1`.
    pub fn order(&self) -> usize {
        self.size() - 1
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        a ^ b
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        (a != 0).then(|| self.exp[(self.order() - self.log[a as usize] as usize) % self.order()])
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Option<FieldElement> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    /// `alpha^e` for any integer exponent.
    pub fn alpha_pow(&self, e: i64) -> FieldElement {
        self.exp[e.rem_euclid(self.order() as i64) as usize]
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64 * (e % self.order() as u64);
        self.exp[(l % self.order() as u64) as usize]
    }

    /// Evaluates `sum coeffs[i] x^i` (lowest degree first).
    pub fn eval(&self, coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
        coeffs.iter().rev().fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }

    pub fn poly_mul(&self, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] ^= self.mul(ai, bj);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Carry-less multiply then reduce, independent of the tables.
    fn slow_mul(a: u32, b: u32, q: u32, poly: u32) -> u32 {
        let mut prod = 0u64;
        for i in 0..q {
            if b >> i & 1 == 1 {
                prod ^= (a as u64) << i;
            }
        }
        for i in (q..2 * q).rev() {
            if prod >> i & 1 == 1 {
                prod ^= (poly as u64) << (i - q);
            }
        }
        prod as u32
    }

    #[test]
    fn every_default_polynomial_is_primitive() {
        for q in 2..=16 {
            GaloisField::new(q).unwrap();
        }
        // x^4 + x^3 + x^2 + x + 1 is irreducible but x has order 5.
        assert!(GaloisField::with_poly(4, 0x1F).is_err());
        assert!(GaloisField::with_poly(4, 0x15).is_err());
        assert!(GaloisField::new(17).is_err());
    }

    #[test]
    fn field_axioms_exhaustive_gf16() {
        let f = GaloisField::new(4).unwrap();
        let n = f.size() as u16;
        for a in 0..n {
            assert_eq!(f.add(a, a), 0);
            assert_eq!(f.mul(a, 1), a);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..n {
                assert_eq!(f.mul(a, b) as u32, slow_mul(a as u32, b as u32, 4, f.poly()));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..n {
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
                }
            }
        }
        assert_eq!(f.inv(0), None);
    }

    #[test]
    fn tables_match_slow_multiply_up_to_q8() {
        for q in 2..=8 {
            let f = GaloisField::new(q).unwrap();
            for a in 0..f.size() as u16 {
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..f.size() as u16 {
                    assert_eq!(f.mul(a, b) as u32, slow_mul(a as u32, b as u32, q, f.poly()));
                }
            }
        }
    }

    #[test]
    fn powers_and_evaluation() {
        let f = GaloisField::new(5).unwrap();
        assert_eq!(f.alpha_pow(31), 1);
        assert_eq!(f.alpha_pow(-1), f.inv(2).unwrap());
        assert_eq!(f.pow(7, 3), f.mul(7, f.mul(7, 7)));
        // (x + 3)(x + 5) evaluated at 3 is zero.
        let p = f.poly_mul(&[3, 1], &[5, 1]);
        assert_eq!(f.eval(&p, 3), 0);
        assert_eq!(f.eval(&p, 5), 0);
    }
}
