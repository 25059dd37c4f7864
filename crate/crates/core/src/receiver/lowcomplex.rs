//! Low-complexity coherent receiver for (nearly) flat fading.
//!
//! Under flat fading the conditional data covariance is a rank-one update
//! of the identity, so determinant and Mahalanobis distance have closed
//! forms and only inner products with the codeword remain per hypothesis.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::chest::ChannelEstimator;
use super::fading::{FadingLoglik, FadingScratch};
use crate::channel::ReceivedSignal;
use crate::codec::{Codebook, PowerShaping};
use crate::prior::bit;
use crate::{Error, Result};

/// Arithmetic operation counter; [`NoCount`] compiles away.
pub trait OpCounter {
    fn add(&mut self, ops: u64);
}

#[derive(Debug, Default, Clone, Copy)]
pub struct NoCount;

impl OpCounter for NoCount {
    #[inline(always)]
    fn add(&mut self, _: u64) {}
}

/// Counts scalar multiply-accumulates, compares and other O(1) steps.
#[derive(Debug, Default, Clone, Copy)]
pub struct Counting(pub u64);

impl OpCounter for Counting {
    #[inline]
    fn add(&mut self, ops: u64) {
        self.0 += ops;
    }
}

/// `det(Sigma_d) / NV^{N_d} = 1 + alpha N_d / (beta N_p + 1/SNR)`.
pub fn lc_det_factor(alpha: f64, beta: f64, n_data: usize, n_pilot: usize, snr: f64) -> f64 {
    1.0 + alpha * n_data as f64 / (beta * n_pilot as f64 + 1.0 / snr)
}

/// `kappa = alpha / (alpha N_d + beta N_p + 1/SNR)`, the rank-one weight of
/// `Sigma_d^{-1}`.
pub fn lc_kappa(alpha: f64, beta: f64, n_data: usize, n_pilot: usize, snr: f64) -> f64 {
    alpha / (alpha * n_data as f64 + beta * n_pilot as f64 + 1.0 / snr)
}

/// `(|r|^2 - kappa |r^H c|^2) / NV` for residual `r = y_d - mu_d`.
pub fn lc_mahalanobis(resid: &[Complex64], codeword: &[Complex64], kappa: f64, nv: f64) -> f64 {
    let r2: f64 = resid.iter().map(|v| v.norm_sqr()).sum();
    let rc: Complex64 = resid.iter().zip(codeword).map(|(r, c)| r.conj() * c).sum();
    (r2 - kappa * rc.norm_sqr()) / nv
}

#[derive(Debug, Clone)]
pub struct LowComplexityReceiver {
    estimator: ChannelEstimator,
    codewords: Vec<Complex64>,
    /// `|c_mj|^2`, same layout as `codewords`.
    energy: Vec<f64>,
    scale: Vec<f64>,
    kappa: Vec<f64>,
    log_det: Vec<f64>,
    k: usize,
    n_data: usize,
}

impl LowComplexityReceiver {
    /// `snr` is the receiver's plug-in SNR. The estimator supplies one data
    /// channel estimate per antenna; hypotheses rescale it by
    /// `sqrt(alpha_m / beta_m)`.
    pub fn new(codebook: &Codebook, ps: &PowerShaping, estimator: ChannelEstimator, snr: f64) -> Result<Self> {
        if !(snr > 0.0 && snr.is_finite()) {
            return Err(Error::InvalidParameter("receiver SNR must be positive".into()));
        }
        let (n_d, n_p) = (estimator.n_data(), estimator.n_pilot());
        if codebook.len_symbols() != n_d || ps.alphas().len() != codebook.num_codewords() {
            return Err(Error::InvalidParameter("codebook, shaping and grid sizes differ".into()));
        }
        let m_count = codebook.num_codewords();
        let codewords: Vec<Complex64> = codebook.codewords().flatten().copied().collect();
        let energy = codewords.iter().map(|c| c.norm_sqr()).collect();
        let mut scale = Vec::with_capacity(m_count);
        let mut kappa = Vec::with_capacity(m_count);
        let mut log_det = Vec::with_capacity(m_count);
        for m in 0..m_count {
            let (a, b) = (ps.alpha(m), ps.pilot_power(m));
            scale.push((a / b).sqrt());
            kappa.push(lc_kappa(a, b, n_d, n_p, snr));
            log_det.push(lc_det_factor(a, b, n_d, n_p, snr).ln());
        }
        Ok(Self {
            estimator,
            codewords,
            energy,
            scale,
            kappa,
            log_det,
            k: codebook.k(),
            n_data: n_d,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Per-antenna log-likelihoods with operation counting.
    pub fn loglik_counted<C: OpCounter>(
        &self,
        y: &ReceivedSignal,
        nv: f64,
        scratch: &mut FadingScratch,
        out: &mut [f64],
        counter: &mut C,
    ) {
        let m_count = self.scale.len();
        let n_d = self.n_data;
        let shared = n_d as f64 * (PI * nv).ln();
        let inv_nv = 1.0 / nv;
        counter.add(3);
        for l in 0..y.n_r() {
            let y_d = y.data(l);
            self.estimator.estimate_data_into(y.pilots(l), &mut scratch.h);
            counter.add((n_d * self.estimator.n_pilot()) as u64);
            // per-antenna products reused by every hypothesis
            scratch.a.clear();
            scratch.a.extend(y_d.iter().zip(&scratch.h).map(|(y, h)| y.conj() * h));
            let y2: f64 = y_d.iter().map(|v| v.norm_sqr()).sum();
            counter.add(2 * n_d as u64);
            for m in 0..m_count {
                let c = &self.codewords[m * n_d..(m + 1) * n_d];
                let w = &self.energy[m * n_d..(m + 1) * n_d];
                let (mut a, mut b, mut e, mut f) = (0.0, Complex64::from(0.0), 0.0, Complex64::from(0.0));
                for j in 0..n_d {
                    let z = scratch.a[j];
                    a += z.re * c[j].re - z.im * c[j].im;
                    b += y_d[j].conj() * c[j];
                    e += scratch.h[j].norm_sqr() * w[j];
                    f += scratch.h[j].conj() * w[j];
                }
                counter.add(4 * n_d as u64);
                let s = self.scale[m];
                let r2 = y2 - 2.0 * s * a + s * s * e;
                let rc = b - f * s;
                let delta2 = (r2 - self.kappa[m] * rc.norm_sqr()) * inv_nv;
                out[l * m_count + m] = -delta2 - self.log_det[m] - shared;
                counter.add(8);
            }
        }
    }

    /// Max-log bit scores `max_{m in C_j} [sum_l loglik_l,m + log_prior_m]`
    /// with the full operation count of the receiver.
    pub fn bit_scores_counted<C: OpCounter>(
        &self,
        y: &ReceivedSignal,
        nv: f64,
        log_prior: &[f64],
        scratch: &mut FadingScratch,
        loglik: &mut Vec<f64>,
        out: &mut [(f64, f64)],
        counter: &mut C,
    ) {
        let m_count = self.scale.len();
        let n_r = y.n_r();
        loglik.resize(n_r * m_count, 0.0);
        self.loglik_counted(y, nv, scratch, loglik, counter);
        for v in out.iter_mut() {
            *v = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        }
        for m in 0..m_count {
            let t = (0..n_r).map(|l| loglik[l * m_count + m]).sum::<f64>() + log_prior[m];
            counter.add(n_r as u64 + 1);
            for (i, v) in out.iter_mut().enumerate() {
                if bit(m, i, self.k) == 1 {
                    v.1 = v.1.max(t);
                } else {
                    v.0 = v.0.max(t);
                }
            }
            counter.add(self.k as u64);
        }
    }
}

impl FadingLoglik for LowComplexityReceiver {
    fn num_hypotheses(&self) -> usize {
        self.scale.len()
    }

    fn loglik_into(&self, y: &ReceivedSignal, nv: f64, scratch: &mut FadingScratch, out: &mut [f64]) {
        self.loglik_counted(y, nv, scratch, out, &mut NoCount);
    }
}
