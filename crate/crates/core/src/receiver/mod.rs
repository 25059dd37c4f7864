//! Decoders for AWGN and SIMO fading channels.
//!
//! Likelihood producers (AWGN, noncoherent, coherent, low-complexity)
//! fill a per-antenna table `log p(y_l | H_m)`; [`BitDecoder`] turns that
//! table into bit decisions. The correlator baseline decides a message
//! directly.

mod awgn;
pub mod bitwise;
mod chest;
mod correlator;
mod decoder;
mod fading;
mod glrt;
mod lowcomplex;
mod threshold;

pub use awgn::{awgn_codeword_loglik, AwgnReceiver};
pub use bitwise::{
    beta_from_ratio, bit_marginals, bitwise_posteriors, bitwise_posteriors_into, logaddexp, logsumexp, map_ratio,
    max_log_posteriors, max_log_posteriors_into, uep_decode, uep_decode_llr, uep_ratio_from_targets, BitDecision,
    PRUNE_NATS,
};
pub use chest::{estimate_nv, lmmse_chest, ChannelEstimator, ChestConfig, ChestMethod, DEFAULT_TAU_NS};
pub use correlator::{ml_correlator_decode, CorrelatorReceiver};
pub use decoder::{AntennaCombining, BitDecoder, DecoderConfig, DecoderMode, DecoderScratch};
pub use fading::{coherent_loglik, noncoherent_loglik, CoherentReceiver, FadingLoglik, FadingScratch, NoncoherentReceiver};
pub use glrt::{mlm_glrt_decode, mlm_glrt_scores, GlrtPrior};
pub use lowcomplex::{lc_det_factor, lc_kappa, lc_mahalanobis, Counting, LowComplexityReceiver, NoCount, OpCounter};
pub use threshold::one_bit_threshold;
