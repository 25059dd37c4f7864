//! Decoder configuration and the bit decision stage shared by all channels.

use serde::{Deserialize, Serialize};

use super::bitwise::{
    bit_marginals, bitwise_posteriors_into, llr_from_joint, max_log_posteriors_into, uep_bit, BitDecision, PRUNE_NATS,
};
use super::glrt::GlrtPrior;
use crate::prior::{bit, MarkovPrior};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderMode {
    /// Prior-agnostic `argmax_m p(Y | H_m)`.
    CodewordMl,
    /// Bitwise MAP under the true prior.
    BitwiseMap,
    /// Bitwise posteriors under the true prior, thresholded at `uep_ratio`.
    #[default]
    BitwiseUep,
    /// Max-log GLRT over an unknown `rho`, thresholded at `uep_ratio`.
    MlmGlrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AntennaCombining {
    /// `p(Y | b_i) = sum_m pi_m prod_l p(y_l | H_m)`.
    #[default]
    JointExact,
    /// `p(Y | b_i) = prod_l p(y_l | b_i)`.
    PerAntennaFactorized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecoderConfig {
    pub mode: DecoderMode,
    /// Threshold ratio; NACK iff `p(Y|b=0) / p(Y|b=1) >= uep_ratio`.
    pub uep_ratio: f64,
    /// Candidate `rho` values for [`DecoderMode::MlmGlrt`].
    pub glrt_rho_grid: Vec<f64>,
    pub antenna_combining: AntennaCombining,
    /// Replace log-sum-exp by max in the bitwise marginalization.
    pub max_log: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            mode: DecoderMode::BitwiseUep,
            uep_ratio: 0.1,
            glrt_rho_grid: vec![0.0, 0.1, 0.3, 0.5, 0.7, 0.9],
            antenna_combining: AntennaCombining::JointExact,
            max_log: false,
        }
    }
}

impl DecoderConfig {
    pub fn with_mode(mode: DecoderMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.uep_ratio > 0.0 && self.uep_ratio.is_finite()) {
            return Err(Error::InvalidParameter("decoder.uep_ratio must be positive".into()));
        }
        if self.mode == DecoderMode::MlmGlrt && self.glrt_rho_grid.is_empty() {
            return Err(Error::InvalidParameter("decoder.glrt_rho_grid is empty".into()));
        }
        Ok(())
    }
}

/// Buffers for [`BitDecoder::decode_into`].
#[derive(Debug, Default, Clone)]
pub struct DecoderScratch {
    scores: Vec<f64>,
    joint: Vec<(f64, f64)>,
}

/// Turns per-antenna log-likelihoods into bit decisions. Built once per
/// scenario and shared read-only across workers.
#[derive(Debug, Clone)]
pub struct BitDecoder {
    k: usize,
    mode: DecoderMode,
    combining: AntennaCombining,
    max_log: bool,
    /// Log prior (or GLRT envelope) added to the likelihoods.
    log_prior: Vec<f64>,
    marginals: Vec<(f64, f64)>,
    /// Per-bit threshold ratio.
    ratios: Vec<f64>,
}

impl BitDecoder {
    /// `prior` is the decoder's belief: the true source prior for MAP and
    /// UEP, and the known `p` for the GLRT.
    pub fn new(config: &DecoderConfig, prior: &MarkovPrior) -> Result<Self> {
        config.validate()?;
        let k = prior.k();
        let pi = prior.codeword_prior();
        let (log_prior, marginals, max_log) = match config.mode {
            DecoderMode::CodewordMl => (vec![0.0; 1 << k], vec![(0.5, 0.5); k], true),
            DecoderMode::BitwiseMap | DecoderMode::BitwiseUep => (pi.log_probs(), bit_marginals(&pi), config.max_log),
            DecoderMode::MlmGlrt => {
                let g = GlrtPrior::new(prior.p(), &config.glrt_rho_grid, k)?;
                (g.envelope().to_vec(), g.marginals(), true)
            }
        };
        let ratios = match config.mode {
            DecoderMode::CodewordMl => vec![1.0; k],
            DecoderMode::BitwiseMap => marginals.iter().map(|(p0, p1)| p1 / p0).collect(),
            _ => vec![config.uep_ratio; k],
        };
        Ok(Self {
            k,
            mode: config.mode,
            combining: config.antenna_combining,
            max_log,
            log_prior,
            marginals,
            ratios,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mode(&self) -> DecoderMode {
        self.mode
    }

    pub fn num_hypotheses(&self) -> usize {
        self.log_prior.len()
    }

    fn marginalize(&self, scores: &[f64], out: &mut [(f64, f64)]) {
        if self.max_log {
            max_log_posteriors_into(scores, self.k, out);
        } else {
            bitwise_posteriors_into(scores, self.k, PRUNE_NATS, out);
        }
    }

    /// Decides from `loglik[l * M + m] = log p(y_l | H_m)` for `n_r`
    /// antennas; writes bits and LLRs into `out`.
    pub fn decode_into(&self, loglik: &[f64], n_r: usize, scratch: &mut DecoderScratch, out: &mut BitDecision) {
        let m_count = self.log_prior.len();
        debug_assert_eq!(loglik.len(), n_r * m_count);
        out.bits.clear();
        out.llr.clear();
        scratch.joint.resize(self.k, (0.0, 0.0));
        if self.mode == DecoderMode::CodewordMl {
            self.joint_scores(loglik, n_r, scratch);
            let best = (0..m_count).fold(0, |b, m| if scratch.scores[m] > scratch.scores[b] { m } else { b });
            max_log_posteriors_into(&scratch.scores, self.k, &mut scratch.joint);
            for i in 0..self.k {
                out.bits.push(bit(best, i, self.k));
                out.llr.push(scratch.joint[i].1 - scratch.joint[i].0);
            }
            return;
        }
        match self.combining {
            AntennaCombining::JointExact => {
                self.joint_scores(loglik, n_r, scratch);
                let mut joint = std::mem::take(&mut scratch.joint);
                self.marginalize(&scratch.scores, &mut joint);
                out.llr.extend(joint.iter().zip(&self.marginals).map(|(&j, &m)| llr_from_joint(j, m)));
                scratch.joint = joint;
            }
            AntennaCombining::PerAntennaFactorized => {
                out.llr.resize(self.k, 0.0);
                let mut joint = std::mem::take(&mut scratch.joint);
                for l in 0..n_r {
                    scratch.scores.clear();
                    scratch
                        .scores
                        .extend(loglik[l * m_count..(l + 1) * m_count].iter().zip(&self.log_prior).map(|(a, b)| a + b));
                    self.marginalize(&scratch.scores, &mut joint);
                    for (acc, (&j, &m)) in out.llr.iter_mut().zip(joint.iter().zip(&self.marginals)) {
                        *acc += llr_from_joint(j, m);
                    }
                }
                scratch.joint = joint;
            }
        }
        out.bits.extend(out.llr.iter().zip(&self.ratios).map(|(&l, &r)| uep_bit(l, r)));
    }

    fn joint_scores(&self, loglik: &[f64], n_r: usize, scratch: &mut DecoderScratch) {
        let m_count = self.log_prior.len();
        scratch.scores.clear();
        scratch.scores.extend_from_slice(&self.log_prior);
        for l in 0..n_r {
            for (s, v) in scratch.scores.iter_mut().zip(&loglik[l * m_count..(l + 1) * m_count]) {
                *s += v;
            }
        }
    }

    pub fn decode(&self, loglik: &[f64], n_r: usize) -> BitDecision {
        let mut out = BitDecision::default();
        self.decode_into(loglik, n_r, &mut DecoderScratch::default(), &mut out);
        out
    }
}
