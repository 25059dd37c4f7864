//! Joint source-channel coding laboratory for short HARQ-ACK payloads.
//!
//! HARQ-ACK bits are heavily biased toward ACK, so a link that knows the
//! message prior can spend less power on likely messages and protect NACK
//! bits harder than ACK bits. The crate is organised around that pipeline:
//!
//! - [`prior`]: first-order Markov model of ACK/NACK sequences and the
//!   resulting codeword prior.
//! - [`codec`]: the NR short-block baseline code, loadable learned
//!   codebooks, per-codeword power shaping and codebook diagnostics.
//! - [`channel`]: AWGN and SIMO block-fading channels on a PUCCH Format 2
//!   resource grid.
//! - [`receiver`]: codeword and bitwise decoders (MAP, UEP, max-log GLRT),
//!   the optimal noncoherent/coherent fading receivers, a low-complexity
//!   coherent receiver and the classic correlator baseline.
//! - [`harness`]: scenario-driven Monte Carlo BER estimation, SNR threshold
//!   search, CSV and plot output.
//!
//! Message index convention: bit `b_0` is the most significant bit of the
//! index, so for `k = 4` the sequence `0101` is message 5. ACK is bit value
//! 1, NACK is bit value 0; the all-ACK message is index `2^k - 1`.

pub mod channel;
pub mod codec;
mod error;
pub mod harness;
pub mod linalg;
pub mod prior;
pub mod receiver;
pub mod rng;

pub use error::{Error, Result};
pub use num_complex::Complex64;
