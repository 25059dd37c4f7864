use std::f64::consts::PI;

use num_complex::Complex64;

use crate::codec::{Codebook, Hypothesis};
use crate::{Error, Result};

/// `log p(y | H_m) = -|y - g sqrt(alpha) c|^2 / sigma2 - (n/2) ln(pi sigma2)`.
pub fn awgn_codeword_loglik(y: &[Complex64], hypothesis: &Hypothesis, g: f64, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidParameter("noise variance must be positive".into()));
    }
    if y.len() != hypothesis.codeword.len() {
        return Err(Error::InvalidParameter("observation and codeword lengths differ".into()));
    }
    let amp = g * hypothesis.alpha.sqrt();
    let dist: f64 = y.iter().zip(hypothesis.codeword).map(|(a, c)| (a - c * amp).norm_sqr()).sum();
    Ok(-dist / sigma2 - y.len() as f64 * (PI * sigma2).ln())
}

/// Log-likelihoods of every codeword hypothesis at once.
///
/// Uses `|y - a c|^2 = |y|^2 - 2 a Re<c, y> + a^2 |c|^2`, so one real
/// matrix-vector product covers all hypotheses.
#[derive(Debug, Clone)]
pub struct AwgnReceiver {
    k: usize,
    n_real: usize,
    rows: Vec<f64>,
    amp: Vec<f64>,
    energy: Vec<f64>,
    sigma2: f64,
    constant: f64,
}

impl AwgnReceiver {
    /// `alphas[m]` is the data power of hypothesis `m`, `g` the amplitude
    /// gain and `sigma2` the complex noise variance.
    pub fn new(codebook: &Codebook, alphas: &[f64], g: f64, sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) {
            return Err(Error::InvalidParameter("noise variance must be positive".into()));
        }
        if alphas.len() != codebook.num_codewords() {
            return Err(Error::InvalidParameter("one power per codeword required".into()));
        }
        let rows: Vec<f64> = (0..codebook.num_codewords()).flat_map(|m| codebook.real_row(m)).collect();
        let amp: Vec<f64> = alphas.iter().map(|a| g * a.sqrt()).collect();
        let energy = codebook
            .codewords()
            .zip(&amp)
            .map(|(c, a)| a * a * c.iter().map(|s| s.norm_sqr()).sum::<f64>())
            .collect();
        Ok(Self {
            k: codebook.k(),
            n_real: codebook.n(),
            rows,
            amp,
            energy,
            sigma2,
            constant: -(codebook.len_symbols() as f64) * (PI * sigma2).ln(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_hypotheses(&self) -> usize {
        self.amp.len()
    }

    /// Writes `log p(y | H_m)` for all `m` into `out`.
    pub fn loglik_into(&self, y: &[Complex64], out: &mut [f64]) {
        debug_assert_eq!(y.len() * 2, self.n_real);
        let yr: Vec<f64> = y.iter().flat_map(|s| [s.re, s.im]).collect();
        let y2: f64 = yr.iter().map(|v| v * v).sum();
        let inv = 1.0 / self.sigma2;
        for (m, row) in self.rows.chunks_exact(self.n_real).enumerate() {
            let corr: f64 = row.iter().zip(&yr).map(|(a, b)| a * b).sum();
            out[m] = -(y2 - 2.0 * self.amp[m] * corr + self.energy[m]) * inv + self.constant;
        }
    }

    pub fn loglik(&self, y: &[Complex64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_hypotheses()];
        self.loglik_into(y, &mut out);
        out
    }
}
