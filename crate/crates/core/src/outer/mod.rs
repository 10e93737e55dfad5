//! Outer code: Reed–Solomon over GF(2^q) with an explicit position index
//! prepended to every symbol.
//!
//! Each transmitted symbol is `h` index bits (big-endian, 1-based) followed by
//! `q` payload bits. The receiver slots symbols by their index, so symbols
//! lost to deletions become erasures and inserted symbols either land in an
//! occupied slot (erasing it on conflict) or are dropped as out of range.

mod gf;
mod rs;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{param, Error, Result};

pub use gf::{default_primitive_poly, FieldElement, GaloisField};
pub use rs::{ReedSolomon, Received, RsDecoded};

fn default_poly_field() -> Option<u32> {
    None
}

/// Serialized outer-code parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OuterCodeParams {
    pub q: u32,
    pub n_rs: usize,
    pub k_rs: usize,
    /// Field polynomial bitmask; the built-in primitive polynomial if absent.
    #[serde(default = "default_poly_field", skip_serializing_if = "Option::is_none")]
    pub irreducible_poly: Option<u32>,
}

impl OuterCodeParams {
    pub fn new(q: u32, n_rs: usize, k_rs: usize) -> Self {
        Self {
            q,
            n_rs,
            k_rs,
            irreducible_poly: None,
        }
    }

    /// The full-length code `(2^q - 1, k_rs)`.
    pub fn full_length(q: u32, k_rs: usize) -> Self {
        Self::new(q, (1usize << q) - 1, k_rs)
    }

    /// Index bits `h = ceil(log2(n_rs + 1))`, enough for indices `1..=n_rs`.
    pub fn header_bits(&self) -> usize {
        (usize::BITS - self.n_rs.leading_zeros()) as usize
    }

    pub fn symbol_bits(&self) -> usize {
        self.header_bits() + self.q as usize
    }

    pub fn message_bits(&self) -> usize {
        self.k_rs * self.q as usize
    }

    pub fn redundancy(&self) -> usize {
        self.n_rs - self.k_rs
    }

    pub fn designed_distance(&self) -> usize {
        self.n_rs - self.k_rs + 1
    }

    /// `(k q) / (n (h + q))`: information bits per transmitted symbol bit.
    pub fn realized_rate(&self) -> f64 {
        self.message_bits() as f64 / (self.n_rs * self.symbol_bits()) as f64
    }

    /// Whether the designed distance covers a `delta` fraction of
    /// worst-case symbol edits: `d >= 2 ceil(delta n) + 1`.
    pub fn tolerates(&self, delta: f64) -> bool {
        self.designed_distance() > 2 * (delta * self.n_rs as f64 - 1e-9).ceil() as usize
    }
}

/// One index-headed symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OuterSymbol {
    /// 1-based position.
    pub index: usize,
    pub payload: FieldElement,
}

/// Built outer code.
#[derive(Clone, Debug)]
pub struct OuterCode {
    params: OuterCodeParams,
    rs: ReedSolomon,
}

impl OuterCode {
    pub fn new(params: OuterCodeParams) -> Result<Self> {
        let field = match params.irreducible_poly {
            Some(poly) => GaloisField::with_poly(params.q, poly)?,
            None => GaloisField::new(params.q)?,
        };
        let rs = ReedSolomon::new(field, params.n_rs, params.k_rs)?;
        if params.symbol_bits() > 63 {
            return param("symbol_bits must fit in 63 bits");
        }
        Ok(Self { params, rs })
    }

    pub fn params(&self) -> &OuterCodeParams {
        &self.params
    }

    pub fn rs(&self) -> &ReedSolomon {
        &self.rs
    }

    pub fn symbol_bits(&self) -> usize {
        self.params.symbol_bits()
    }

    pub fn format_symbol(&self, symbol: OuterSymbol) -> BitString {
        let q = self.params.q as usize;
        BitString::from_index(((symbol.index as u64) << q) | symbol.payload as u64, self.symbol_bits())
    }

    pub fn parse_symbol(&self, bits: &BitString) -> Result<OuterSymbol> {
        if bits.len() != self.symbol_bits() {
            return Err(Error::Length {
                expected: self.symbol_bits(),
                actual: bits.len(),
            });
        }
        let v = bits.to_index();
        let q = self.params.q;
        Ok(OuterSymbol {
            index: (v >> q) as usize,
            payload: (v & ((1 << q) - 1)) as FieldElement,
        })
    }

    fn data_symbols(&self, data_bits: &BitString) -> Result<Vec<FieldElement>> {
        if data_bits.len() != self.params.message_bits() {
            return Err(Error::Length {
                expected: self.params.message_bits(),
                actual: data_bits.len(),
            });
        }
        let q = self.params.q as usize;
        Ok((0..self.params.k_rs)
            .map(|i| data_bits.slice(i * q..(i + 1) * q).to_index() as FieldElement)
            .collect())
    }

    /// RS codeword of `data_bits` (payloads only).
    pub fn encode_payloads(&self, data_bits: &BitString) -> Result<Vec<FieldElement>> {
        self.rs.encode(&self.data_symbols(data_bits)?)
    }

    /// `n_rs` index-headed symbols of `symbol_bits` bits each.
    pub fn encode(&self, data_bits: &BitString) -> Result<Vec<BitString>> {
        Ok(self
            .encode_payloads(data_bits)?
            .into_iter()
            .enumerate()
            .map(|(i, payload)| self.format_symbol(OuterSymbol { index: i + 1, payload }))
            .collect())
    }

    /// Places received symbols by header. Out-of-range indices are dropped,
    /// conflicting duplicates erase their slot, equal duplicates are kept and
    /// empty slots are erasures. Order of `received` is irrelevant.
    pub fn slot(&self, received: &[BitString]) -> Result<Vec<Received>> {
        #[derive(Clone, Copy)]
        enum Slot {
            Empty,
            Value(FieldElement),
            Conflict,
        }
        let mut slots = vec![Slot::Empty; self.params.n_rs];
        for bits in received {
            let sym = self.parse_symbol(bits)?;
            if sym.index == 0 || sym.index > self.params.n_rs {
                continue;
            }
            let slot = &mut slots[sym.index - 1];
            *slot = match *slot {
                Slot::Empty => Slot::Value(sym.payload),
                Slot::Value(v) if v == sym.payload => Slot::Value(v),
                _ => Slot::Conflict,
            };
        }
        Ok(slots
            .into_iter()
            .map(|s| match s {
                Slot::Value(v) => Some(v),
                _ => None,
            })
            .collect())
    }

    pub fn decode_slots(&self, slots: &[Received]) -> Result<BitString> {
        let out = self.rs.decode(slots)?;
        let q = self.params.q as usize;
        let mut bits = BitString::with_capacity(self.params.message_bits());
        for &s in self.rs.data(&out.codeword) {
            bits.extend_from(&BitString::from_index(s as u64, q));
        }
        Ok(bits)
    }

    /// Recovers the data bits from any number of received symbols.
    pub fn decode(&self, received: &[BitString]) -> Result<BitString> {
        self.decode_slots(&self.slot(received)?)
    }
}
