//! Concatenated codes for repeat channels and biased Dobrushin channels.
//!
//! The construction wraps a constant-size balanced inner code (decoded by
//! exact maximum likelihood against the trimming channel) inside an
//! insertion/deletion-tolerant outer code, with runs of zeros between inner
//! codewords so the receiver can resynchronize. Around it sit exact
//! small-blocklength information-rate tools and a Monte Carlo harness.
//!
//! Module map:
//!
//! - [`bits`]: packed bit strings, trimming, the sliding-window balance test.
//! - [`channels`]: channel models, samplers and exact likelihoods.
//! - [`info_rate`]: transition tables, mutual information, Blahut–Arimoto.
//! - [`inner_code`]: balanced inner codebooks and ML decoding.
//! - [`outer`]: GF(2^q), Reed–Solomon errors-and-erasures, index headers.
//! - [`concat`]: the full encoder/decoder and the error taxonomy.
//! - [`harness`]: simulations, scaling studies and numerical bound checks.

pub mod bits;
pub mod channels;
pub mod concat;
pub mod error;
pub mod harness;
pub mod info_rate;
pub mod inner_code;
pub mod outer;
pub mod rng;

pub use bits::{check_balance, trim, weight, BitString, TrimResult};
pub use channels::{ChannelModel, ChannelSpec, DobrushinLaw, OutputDistribution, RepeatDistribution, Transmission};
pub use concat::{ConcatParams, ErrorTaxonomy, Mode};
pub use error::{Error, Result};
pub use inner_code::InnerCode;
pub use outer::{OuterCode, OuterCodeParams};
