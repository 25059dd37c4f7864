//! Coherent ML correlator, the prior-agnostic practical baseline.

use num_complex::Complex64;

use super::chest::ChannelEstimator;
use super::fading::FadingScratch;
use crate::channel::ReceivedSignal;
use crate::codec::Codebook;

/// `argmax_m Re sum_l y_d,l^H (h_d,l ⊙ c_m)`; ties go to the lower index.
pub fn ml_correlator_decode(codebook: &Codebook, estimates: &[Vec<Complex64>], y: &ReceivedSignal) -> usize {
    let n_d = codebook.len_symbols();
    let mut z = vec![Complex64::from(0.0); n_d];
    for (l, h) in estimates.iter().enumerate() {
        for ((acc, y), h) in z.iter_mut().zip(y.data(l)).zip(h) {
            *acc += y.conj() * h;
        }
    }
    argmax_correlation(codebook, &z)
}

fn argmax_correlation(codebook: &Codebook, z: &[Complex64]) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (m, c) in codebook.codewords().enumerate() {
        let score: f64 = z.iter().zip(c).map(|(z, c)| z.re * c.re - z.im * c.im).sum();
        if score > best.1 {
            best = (m, score);
        }
    }
    best.0
}

/// Correlator with its own channel estimator.
#[derive(Debug, Clone)]
pub struct CorrelatorReceiver {
    estimator: ChannelEstimator,
}

impl CorrelatorReceiver {
    pub fn new(estimator: ChannelEstimator) -> Self {
        Self { estimator }
    }

    pub fn decode(&self, codebook: &Codebook, y: &ReceivedSignal, scratch: &mut FadingScratch) -> usize {
        let mut z = vec![Complex64::from(0.0); y.n_data()];
        for l in 0..y.n_r() {
            self.estimator.estimate_data_into(y.pilots(l), &mut scratch.h);
            for ((acc, y), h) in z.iter_mut().zip(y.data(l)).zip(&scratch.h) {
                *acc += y.conj() * h;
            }
        }
        argmax_correlation(codebook, &z)
    }
}
