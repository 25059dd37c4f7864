//! Max-log GLRT over an unknown correlation parameter.

use super::bitwise::{max_log_posteriors_into, uep_decode, BitDecision};
use crate::prior::MarkovPrior;
use crate::{Error, Result};

/// Known ACK probability `p` with `rho` unknown within a grid. Stores the
/// envelope `max_rho log pi_m(p, rho)`, which is all the max-log GLRT needs.
#[derive(Debug, Clone, PartialEq)]
pub struct GlrtPrior {
    p: f64,
    k: usize,
    grid: Vec<f64>,
    envelope: Vec<f64>,
}

impl GlrtPrior {
    pub fn new(p: f64, rho_grid: &[f64], k: usize) -> Result<Self> {
        if rho_grid.is_empty() {
            return Err(Error::InvalidParameter("GLRT grid is empty".into()));
        }
        let mut envelope = vec![f64::NEG_INFINITY; 1 << k];
        for &rho in rho_grid {
            let pi = MarkovPrior::new(p, rho, k)?.codeword_prior();
            for (e, l) in envelope.iter_mut().zip(pi.log_probs()) {
                *e = e.max(l);
            }
        }
        Ok(Self {
            p,
            k,
            grid: rho_grid.to_vec(),
            envelope,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn envelope(&self) -> &[f64] {
        &self.envelope
    }

    /// Every bit has marginal `p` for every `rho`.
    pub fn marginals(&self) -> Vec<(f64, f64)> {
        vec![(1.0 - self.p, self.p); self.k]
    }
}

/// Per-bit scores `S_j = max_rho max_{m in C_j} [loglik_m + log pi_m(rho)]`.
pub fn mlm_glrt_scores(loglik: &[f64], glrt: &GlrtPrior) -> Vec<(f64, f64)> {
    let scores: Vec<f64> = loglik.iter().zip(&glrt.envelope).map(|(a, b)| a + b).collect();
    let mut out = vec![(0.0, 0.0); glrt.k];
    max_log_posteriors_into(&scores, glrt.k, &mut out);
    out
}

/// NACK iff `(S_0 - ln(1-p)) - (S_1 - ln p) >= ln(ratio)`.
pub fn mlm_glrt_decode(loglik: &[f64], glrt: &GlrtPrior, ratio: f64) -> BitDecision {
    uep_decode(&mlm_glrt_scores(loglik, glrt), &glrt.marginals(), ratio)
}
