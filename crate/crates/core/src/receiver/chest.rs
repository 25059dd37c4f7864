//! Pilot-based channel and noise-variance estimation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{rmmse_covariance, FadingCovariance, ResourceGrid};
use crate::linalg::{CMatrix, HermitianFactor};
use crate::{Error, Result};

/// Delay span assumed by RMMSE estimation unless configured otherwise.
pub const DEFAULT_TAU_NS: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChestMethod {
    /// LMMSE with the true channel covariance.
    LmmseGenie,
    /// LMMSE with a uniform power delay profile on `[0, tau]`.
    #[default]
    Rmmse,
    /// LMMSE with an all-ones covariance.
    Flat,
}

/// Which covariance the receiver assumes and therefore how it estimates
/// the channel. The pilot power used for estimation is always the largest
/// pilot power over all hypotheses, so the estimator overestimates the SNR
/// rather than underestimating it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChestConfig {
    pub method: ChestMethod,
    pub tau_ns: f64,
}

impl Default for ChestConfig {
    fn default() -> Self {
        Self {
            method: ChestMethod::Rmmse,
            tau_ns: DEFAULT_TAU_NS,
        }
    }
}

impl ChestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.method == ChestMethod::Rmmse && !(self.tau_ns > 0.0 && self.tau_ns.is_finite()) {
            return Err(Error::InvalidParameter("chest.tau_ns must be positive for rmmse".into()));
        }
        Ok(())
    }

    /// Covariance model assumed by the receiver.
    pub fn model_covariance(&self, truth: &FadingCovariance, grid: &ResourceGrid, subcarrier_spacing: f64) -> Result<FadingCovariance> {
        self.validate()?;
        match self.method {
            ChestMethod::LmmseGenie => Ok(truth.clone()),
            ChestMethod::Rmmse => rmmse_covariance(self.tau_ns * 1e-9, subcarrier_spacing, grid),
            ChestMethod::Flat => Ok(FadingCovariance::flat(truth.dim(), truth.n_pilot())),
        }
    }
}

/// `R_a (R_pp + I / (pilot_power snr))^{-1}` for a block `R_a` with `N_p` columns.
fn lmmse_weights(r_a: &CMatrix, r_pp: &CMatrix, snr: f64, pilot_power: f64) -> Result<CMatrix> {
    if !(snr > 0.0 && pilot_power > 0.0) {
        return Err(Error::InvalidParameter("estimation SNR and pilot power must be positive".into()));
    }
    let n_p = r_pp.nrows();
    let reg = r_pp + CMatrix::identity(n_p, n_p) * Complex64::from(1.0 / (pilot_power * snr));
    let factor = HermitianFactor::new(&reg)?;
    // (A^{-1} R_a^H)^H = R_a A^{-1} since A is Hermitian
    Ok(factor.solve(&r_a.adjoint()).adjoint())
}

/// LMMSE data-RE estimate `h_d = R_dp (R_pp + I / (pilot_power snr))^{-1} y_p`.
pub fn lmmse_chest(y_p: &[Complex64], cov: &FadingCovariance, snr: f64, pilot_power: f64) -> Result<Vec<Complex64>> {
    let est = ChannelEstimator::new(cov, snr, pilot_power)?;
    let mut h_p = Vec::new();
    let mut h_d = Vec::new();
    est.estimate_into(y_p, &mut h_p, &mut h_d);
    Ok(h_d)
}

/// Precomputed LMMSE filters for the data REs and, for noise estimation,
/// the pilot REs themselves.
///
/// The estimate is of the effective channel seen by the pilots, i.e. it
/// includes the pilot amplitude.
#[derive(Debug, Clone)]
pub struct ChannelEstimator {
    /// Row-major `N_d x N_p`.
    w_d: Vec<Complex64>,
    /// Row-major `N_p x N_p`.
    w_p: Vec<Complex64>,
    n_pilot: usize,
    n_data: usize,
}

impl ChannelEstimator {
    pub fn new(cov: &FadingCovariance, snr: f64, pilot_power: f64) -> Result<Self> {
        let n_pilot = cov.n_pilot();
        if n_pilot == 0 {
            return Err(Error::InvalidParameter("channel estimation needs pilots".into()));
        }
        let pp = cov.pp();
        let w_d = lmmse_weights(&cov.dp(), &pp, snr, pilot_power)?;
        let w_p = lmmse_weights(&pp, &pp, snr, pilot_power)?;
        Ok(Self {
            w_d: row_major(&w_d),
            w_p: row_major(&w_p),
            n_pilot,
            n_data: cov.n_data(),
        })
    }

    pub fn n_pilot(&self) -> usize {
        self.n_pilot
    }

    pub fn n_data(&self) -> usize {
        self.n_data
    }

    /// Data-RE weights as a dense matrix.
    pub fn data_weights(&self) -> CMatrix {
        CMatrix::from_row_slice(self.n_data, self.n_pilot, &self.w_d)
    }

    pub fn estimate_into(&self, y_p: &[Complex64], h_p: &mut Vec<Complex64>, h_d: &mut Vec<Complex64>) {
        debug_assert_eq!(y_p.len(), self.n_pilot);
        apply(&self.w_p, y_p, h_p);
        apply(&self.w_d, y_p, h_d);
    }

    pub fn estimate_data_into(&self, y_p: &[Complex64], h_d: &mut Vec<Complex64>) {
        apply(&self.w_d, y_p, h_d);
    }
}

fn row_major(m: &CMatrix) -> Vec<Complex64> {
    (0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |c| (r, c))).map(|(r, c)| m[(r, c)]).collect()
}

fn apply(w: &[Complex64], y: &[Complex64], out: &mut Vec<Complex64>) {
    out.clear();
    out.extend(w.chunks_exact(y.len()).map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum::<Complex64>()));
}

/// Noise variance from pilot residuals: mean over antennas of
/// `|y_p - h_p ⊙ c_p|^2 / N_p`. Slices are per antenna.
pub fn estimate_nv(y_p: &[&[Complex64]], h_p: &[&[Complex64]], pilots: &[Complex64]) -> f64 {
    assert_eq!(y_p.len(), h_p.len());
    if y_p.is_empty() || pilots.is_empty() {
        return 0.0;
    }
    let total: f64 = y_p
        .iter()
        .zip(h_p)
        .map(|(y, h)| {
            y.iter().zip(h.iter()).zip(pilots).map(|((y, h), c)| (y - h * c).norm_sqr()).sum::<f64>() / pilots.len() as f64
        })
        .sum();
    total / y_p.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_covariance, complex_normal, ChannelSampler, PowerDelayProfile};

    #[test]
    fn flat_per_pilot_weight() {
        let cov = FadingCovariance::flat(24, 8);
        let est = ChannelEstimator::new(&cov, 1.0, 1.0).unwrap();
        // beta snr / (1 + beta snr N_p) = 1/9
        assert!(est.data_weights().iter().all(|w| (w - Complex64::from(1.0 / 9.0)).norm() < 1e-12));
    }

    #[test]
    fn flat_high_snr_is_pilot_mean() {
        let cov = FadingCovariance::flat(24, 8);
        let y: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let mean = y.iter().sum::<Complex64>() / 8.0;
        let h = lmmse_chest(&y, &cov, 1e9, 1.0).unwrap();
        assert_eq!(h.len(), 16);
        assert!(h.iter().all(|v| (v - mean).norm() < 1e-7));
    }

    #[test]
    fn linear_in_pilots() {
        let g = ResourceGrid::pucch_f2();
        let cov = build_covariance(&PowerDelayProfile::tdl_c_300ns(), 30e3, &g).unwrap();
        let mut rng = crate::rng::seeded(2);
        let y: Vec<Complex64> = (0..8).map(|_| complex_normal(&mut rng, 1.0)).collect();
        let a = Complex64::new(-1.5, 0.25);
        let ya: Vec<Complex64> = y.iter().map(|v| v * a).collect();
        let h = lmmse_chest(&y, &cov, 2.0, 1.0).unwrap();
        let ha = lmmse_chest(&ya, &cov, 2.0, 1.0).unwrap();
        assert!(h.iter().zip(&ha).all(|(x, z)| (x * a - z).norm() < 1e-12));
    }

    #[test]
    fn rmmse_needs_positive_span() {
        let cfg = ChestConfig {
            method: ChestMethod::Rmmse,
            tau_ns: 0.0,
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn nv_degenerate_cases() {
        let y = [Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0)];
        assert_eq!(estimate_nv(&[&y], &[&y], &[Complex64::from(1.0); 2]), 0.0);
        let zero = [Complex64::from(0.0); 2];
        assert!((estimate_nv(&[&y], &[&zero], &[Complex64::from(1.0); 2]) - 3.0).abs() < 1e-15);
    }

    /// With the exact channel on the pilots the residual is pure noise.
    #[test]
    fn nv_estimate_concentrates_at_zero_db() {
        let g = ResourceGrid::pucch_f2();
        let cov = build_covariance(&PowerDelayProfile::tdl_c_300ns(), 30e3, &g).unwrap();
        let sampler = ChannelSampler::new(&cov).unwrap();
        let mut rng = crate::rng::seeded(77);
        let (nv, n_r, trials) = (1.0, 4, 10_000);
        let ones = [Complex64::from(1.0); 8];
        let mut acc = 0.0;
        for _ in 0..trials {
            let mut ys = Vec::new();
            let mut hs = Vec::new();
            for _ in 0..n_r {
                let h: Vec<Complex64> = sampler.sample(&mut rng)[..8].to_vec();
                let y: Vec<Complex64> = h.iter().map(|h| h + complex_normal(&mut rng, nv)).collect();
                ys.push(y);
                hs.push(h);
            }
            let yr: Vec<&[Complex64]> = ys.iter().map(|v| v.as_slice()).collect();
            let hr: Vec<&[Complex64]> = hs.iter().map(|v| v.as_slice()).collect();
            acc += estimate_nv(&yr, &hr, &ones);
        }
        let mean = acc / trials as f64;
        assert!((mean - nv).abs() < 0.05 * nv, "{mean}");
    }
}
