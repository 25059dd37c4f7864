//! Source model for HARQ-ACK payloads.
//!
//! Bits follow a stationary first-order Markov chain with ACK probability `p`
//! and lag-one correlation `rho`. The chain induces a prior over the `2^k`
//! messages which every encoder and decoder in the crate consumes.

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::{rng, Error, Result};

/// Largest payload handled by exhaustive enumeration.
pub const MAX_K: usize = 11;

/// Value of bit `i` (0 = most significant) of message `m` with `k` bits.
#[inline]
pub fn bit(m: usize, i: usize, k: usize) -> u8 {
    ((m >> (k - 1 - i)) & 1) as u8
}

/// Bits of message `m`, `b_0` first.
pub fn message_bits(m: usize, k: usize) -> Vec<u8> {
    (0..k).map(|i| bit(m, i, k)).collect()
}

/// Inverse of [`message_bits`].
pub fn message_index(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize)
}

/// Index of the all-ACK message.
pub fn all_ack(k: usize) -> usize {
    (1 << k) - 1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovPrior {
    p: f64,
    rho: f64,
    k: usize,
}

impl MarkovPrior {
    pub fn new(p: f64, rho: f64, k: usize) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidPrior(format!("p = {p} must lie in (0, 1)")));
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidPrior(format!("rho = {rho} must lie in [0, 1]")));
        }
        if k == 0 || k > MAX_K {
            return Err(Error::InvalidPrior(format!("k = {k} must lie in 1..={MAX_K}")));
        }
        Ok(Self { p, rho, k })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `P(b_i = next | b_{i-1} = prev)`.
    pub fn transition(&self, prev: u8, next: u8) -> f64 {
        // Written so that rho = 0 reproduces p and 1 - p bit for bit.
        let (p, rho) = (self.p, self.rho);
        match (prev, next) {
            (0, 1) => p * (1.0 - rho),
            (0, _) => (1.0 - p) + p * rho,
            (_, 0) => (1.0 - p) * (1.0 - rho),
            _ => p + (1.0 - p) * rho,
        }
    }

    fn first(&self, b: u8) -> f64 {
        if b == 1 {
            self.p
        } else {
            1.0 - self.p
        }
    }

    pub fn codeword_prior(&self) -> CodewordPrior {
        codeword_prior(self)
    }
}

/// Chain-rule evaluation of the prior of every message.
pub fn codeword_prior(prior: &MarkovPrior) -> CodewordPrior {
    let k = prior.k;
    let probs = (0..1usize << k)
        .map(|m| {
            let mut prob = prior.first(bit(m, 0, k));
            for i in 1..k {
                prob *= prior.transition(bit(m, i - 1, k), bit(m, i, k));
            }
            prob
        })
        .collect();
    CodewordPrior { probs, k }
}

/// Prior probability of each of the `2^k` messages.
#[derive(Debug, Clone, PartialEq)]
pub struct CodewordPrior {
    probs: Vec<f64>,
    k: usize,
}

impl CodewordPrior {
    /// Builds a prior from explicit probabilities. The sum must be within
    /// `1e-9` of one; the vector is then renormalized exactly.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let len = probs.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidPrior(format!(
                "prior length {len} is not a power of two >= 2"
            )));
        }
        if probs.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidPrior("negative or non-finite probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPrior(format!("probabilities sum to {total}")));
        }
        let k = len.trailing_zeros() as usize;
        Ok(Self {
            probs: probs.into_iter().map(|x| x / total).collect(),
            k,
        })
    }

    pub fn uniform(k: usize) -> Self {
        let len = 1usize << k;
        Self {
            probs: vec![1.0 / len as f64; len],
            k,
        }
    }

    /// Arithmetic mean of a family of priors over the same payload size.
    pub fn mean(family: &[CodewordPrior]) -> Result<Self> {
        let first = family
            .first()
            .ok_or_else(|| Error::InvalidPrior("empty prior family".into()))?;
        if family.iter().any(|p| p.k != first.k) {
            return Err(Error::InvalidPrior("prior family mixes payload sizes".into()));
        }
        let weight = 1.0 / family.len() as f64;
        let mut probs = vec![0.0; first.len()];
        for member in family {
            for (acc, &x) in probs.iter_mut().zip(&member.probs) {
                *acc += weight * x;
            }
        }
        Self::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, m: usize) -> f64 {
        self.probs[m]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Natural-log probabilities; zero-probability messages map to `-inf`.
    pub fn log_probs(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.ln()).collect()
    }

    /// `P(b_i = 1)`.
    pub fn ack_marginal(&self, i: usize) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(m, _)| bit(*m, i, self.k) == 1)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn entropy(&self) -> f64 {
        entropy(self)
    }
}

/// Entropy in bits; zero-probability terms contribute nothing.
pub fn entropy(pi: &CodewordPrior) -> f64 {
    -pi.probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// O(1) sampler of message indices from a codeword prior.
#[derive(Debug, Clone)]
pub struct MessageSampler {
    alias: WeightedAliasIndex<f64>,
}

impl MessageSampler {
    pub fn new(pi: &CodewordPrior) -> Result<Self> {
        let alias = WeightedAliasIndex::new(pi.probs.clone())
            .map_err(|e| Error::InvalidPrior(format!("cannot build sampler: {e}")))?;
        Ok(Self { alias })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.alias.sample(rng)
    }
}

/// `count` i.i.d. message draws, deterministic in `seed`.
pub fn sample_messages(prior: &MarkovPrior, count: usize, seed: u64) -> Result<Vec<usize>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let sampler = MessageSampler::new(&prior.codeword_prior())?;
    let mut rng = rng::seeded(seed);
    Ok((0..count).map(|_| sampler.sample(&mut rng)).collect())
}
