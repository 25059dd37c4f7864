//! AWGN and SIMO block-fading channels on an OFDM resource grid.

mod awgn;
mod covariance;
mod grid;
mod simo;

pub use awgn::{complex_normal, transmit_awgn, transmit_awgn_into};
pub use covariance::{build_covariance, rmmse_covariance, sinc, FadingCovariance, PowerDelayProfile, PDP_SUM_TOL};
pub use grid::{ReKind, ResourceElement, ResourceGrid, PUCCH_F2_DMRS_SUBCARRIERS};
pub use simo::{transmit_simo, transmit_simo_into, ChannelSampler, ReceivedSignal, SimoScratch, PSD_TOL};
