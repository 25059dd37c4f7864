//! Optimal SIMO receivers for Gaussian block fading.
//!
//! Given `H_m`, each antenna observes `y ~ CN(0, NV (SNR D R D^H + I))` with
//! `D = diag([sqrt(beta_m) 1, sqrt(alpha_m) c_m])`. The noncoherent receiver
//! evaluates this density directly. The coherent receiver splits it into
//! `p(y_d | y_p, H_m) p(y_p | H_m)`, which is the LMMSE channel estimate
//! plus the residual uncertainty. Both give the same number.
//!
//! Every covariance is `NV` times an NV-free matrix, so the factorizations
//! are computed once per receiver and the NV used for scoring can change per
//! observation (for example when it is estimated from the pilots).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::{FadingCovariance, ReceivedSignal};
use crate::codec::{Codebook, Hypothesis, PowerShaping};
use crate::linalg::{CMatrix, HermitianFactor};
use crate::{Error, Result};

/// Per-antenna log-likelihoods for every hypothesis.
pub trait FadingLoglik: Sync {
    fn num_hypotheses(&self) -> usize;

    /// Writes `log p(y_l | H_m)` to `out[l * M + m]` using `nv` as the noise
    /// variance. Terms shared by all hypotheses may be dropped.
    fn loglik_into(&self, y: &ReceivedSignal, nv: f64, scratch: &mut FadingScratch, out: &mut [f64]);
}

/// Reusable buffers for the fading receivers.
#[derive(Debug, Default, Clone)]
pub struct FadingScratch {
    pub(crate) a: Vec<Complex64>,
    pub(crate) b: Vec<Complex64>,
    pub(crate) h: Vec<Complex64>,
    pub(crate) hp: Vec<Complex64>,
}

fn check_inputs(y: &ReceivedSignal, hyp: &Hypothesis, cov: &FadingCovariance, snr: f64, nv: f64) -> Result<()> {
    if !(snr > 0.0 && nv > 0.0) {
        return Err(Error::InvalidParameter("SNR and NV must be positive".into()));
    }
    if y.len_grid() != cov.dim() || y.n_pilot() != cov.n_pilot() || hyp.codeword.len() != cov.n_data() {
        return Err(Error::InvalidParameter("signal, covariance and codeword dimensions differ".into()));
    }
    Ok(())
}

/// `SNR D R D^H + I` for transmitted vector `x`.
fn noncoherent_kernel(x: &[Complex64], r: &CMatrix, snr: f64) -> CMatrix {
    let n = x.len();
    CMatrix::from_fn(n, n, |i, j| {
        let v = x[i] * r[(i, j)] * x[j].conj() * snr;
        if i == j {
            v + 1.0
        } else {
            v
        }
    })
}

fn gaussian_term(q: f64, logdet: f64, dim: usize, nv: f64) -> f64 {
    -q / nv - dim as f64 * (PI * nv).ln() - logdet
}

/// `sum_l [-y_l^H Sigma^{-1} y_l - log det(pi Sigma)]` with
/// `Sigma = NV (SNR D R D^H + I)`.
pub fn noncoherent_loglik(y: &ReceivedSignal, hyp: &Hypothesis, cov: &FadingCovariance, snr: f64, nv: f64) -> Result<f64> {
    check_inputs(y, hyp, cov, snr, nv)?;
    let x = hyp.pilot_data_vector(cov.n_pilot());
    let k = HermitianFactor::new(&noncoherent_kernel(&x, cov.matrix(), snr))?;
    let mut scratch = Vec::new();
    Ok((0..y.n_r())
        .map(|l| gaussian_term(k.quad_form_inv(y.antenna(l), &mut scratch), k.logdet(), cov.dim(), nv))
        .sum())
}

/// Coherent factorization of one hypothesis, NV-free.
#[derive(Debug, Clone)]
struct CoherentParts {
    /// `W = R_dp (R_pp + I / (beta SNR))^{-1}`, dense `N_d x N_p`.
    w: CMatrix,
    /// `I + beta SNR R_pp`.
    pilot: Option<HermitianFactor>,
    /// `I + alpha SNR diag(c) (R_dd - W R_pd) diag(c)^H`.
    data: HermitianFactor,
}

fn coherent_parts(hyp: &Hypothesis, cov: &FadingCovariance, snr: f64) -> Result<CoherentParts> {
    let (n_p, n_d) = (cov.n_pilot(), cov.n_data());
    let beta = hyp.pilot_power;
    let (w, pilot, residual) = if n_p == 0 {
        (CMatrix::zeros(n_d, 0), None, cov.dd())
    } else {
        let pp = cov.pp();
        let reg = &pp + CMatrix::identity(n_p, n_p) * Complex64::from(1.0 / (beta * snr));
        let w = HermitianFactor::new(&reg)?.solve(&cov.pd()).adjoint();
        let pilot = HermitianFactor::new(&(CMatrix::identity(n_p, n_p) + pp * Complex64::from(beta * snr)))?;
        let residual = cov.dd() - &w * cov.pd();
        (w, Some(pilot), residual)
    };
    let c = hyp.codeword;
    let s = CMatrix::from_fn(n_d, n_d, |i, j| {
        let v = c[i] * residual[(i, j)] * c[j].conj() * (hyp.alpha * snr);
        if i == j {
            v + 1.0
        } else {
            v
        }
    });
    // the Schur complement carries rounding asymmetry; symmetrize
    let s = (&s + s.adjoint()) * Complex64::from(0.5);
    Ok(CoherentParts {
        w,
        pilot,
        data: HermitianFactor::new(&s)?,
    })
}

fn coherent_antenna(
    parts: &CoherentParts,
    hyp: &Hypothesis,
    y_p: &[Complex64],
    y_d: &[Complex64],
    h: &[Complex64],
    nv: f64,
    include_pilot_term: bool,
    scratch: &mut Vec<Complex64>,
    resid: &mut Vec<Complex64>,
) -> f64 {
    let scale = (hyp.alpha / hyp.pilot_power).sqrt();
    resid.clear();
    resid.extend(y_d.iter().zip(h).zip(hyp.codeword).map(|((y, h), c)| y - h * c * scale));
    let mut v = gaussian_term(parts.data.quad_form_inv(resid, scratch), parts.data.logdet(), y_d.len(), nv);
    if include_pilot_term {
        if let Some(p) = &parts.pilot {
            v += gaussian_term(p.quad_form_inv(y_p, scratch), p.logdet(), y_p.len(), nv);
        }
    }
    v
}

fn mat_vec(w: &CMatrix, y: &[Complex64], out: &mut Vec<Complex64>) {
    out.clear();
    out.extend((0..w.nrows()).map(|i| (0..w.ncols()).map(|j| w[(i, j)] * y[j]).sum::<Complex64>()));
}

/// `sum_l log p(y_d,l | y_p,l, H_m) [+ log p(y_p,l | H_m)]`.
///
/// The conditional mean is `sqrt(alpha/beta) (W y_p) ⊙ c`. The pilot term
/// depends on `m` only through `beta_m`, so with constant pilot power it is
/// a shared offset.
pub fn coherent_loglik(
    y: &ReceivedSignal,
    hyp: &Hypothesis,
    cov: &FadingCovariance,
    snr: f64,
    nv: f64,
    include_pilot_term: bool,
) -> Result<f64> {
    check_inputs(y, hyp, cov, snr, nv)?;
    let parts = coherent_parts(hyp, cov, snr)?;
    let (mut h, mut scratch, mut resid) = (Vec::new(), Vec::new(), Vec::new());
    Ok((0..y.n_r())
        .map(|l| {
            mat_vec(&parts.w, y.pilots(l), &mut h);
            coherent_antenna(&parts, hyp, y.pilots(l), y.data(l), &h, nv, include_pilot_term, &mut scratch, &mut resid)
        })
        .sum())
}

fn hypotheses<'a>(codebook: &'a Codebook, ps: &PowerShaping) -> Vec<Hypothesis<'a>> {
    (0..codebook.num_codewords()).map(|m| ps.hypothesis(codebook.codeword(m), m)).collect()
}

fn check_receiver(codebook: &Codebook, ps: &PowerShaping, cov: &FadingCovariance, snr: f64) -> Result<()> {
    if !(snr > 0.0 && snr.is_finite()) {
        return Err(Error::InvalidParameter("receiver SNR must be positive".into()));
    }
    if ps.alphas().len() != codebook.num_codewords() {
        return Err(Error::InvalidParameter("power shaping and codebook sizes differ".into()));
    }
    if codebook.len_symbols() != cov.n_data() {
        return Err(Error::InvalidParameter(format!(
            "codeword has {} symbols but the grid has {} data REs",
            codebook.len_symbols(),
            cov.n_data()
        )));
    }
    Ok(())
}

/// Batched [`noncoherent_loglik`] with one factorization per hypothesis.
#[derive(Debug, Clone)]
pub struct NoncoherentReceiver {
    kernels: Vec<HermitianFactor>,
    n: usize,
}

impl NoncoherentReceiver {
    /// `cov` is the receiver's channel model and `snr` its plug-in SNR.
    pub fn new(codebook: &Codebook, ps: &PowerShaping, cov: &FadingCovariance, snr: f64) -> Result<Self> {
        check_receiver(codebook, ps, cov, snr)?;
        let kernels = hypotheses(codebook, ps)
            .iter()
            .map(|h| HermitianFactor::new(&noncoherent_kernel(&h.pilot_data_vector(cov.n_pilot()), cov.matrix(), snr)))
            .collect::<Result<_>>()?;
        Ok(Self { kernels, n: cov.dim() })
    }
}

impl FadingLoglik for NoncoherentReceiver {
    fn num_hypotheses(&self) -> usize {
        self.kernels.len()
    }

    fn loglik_into(&self, y: &ReceivedSignal, nv: f64, scratch: &mut FadingScratch, out: &mut [f64]) {
        let m_count = self.kernels.len();
        for l in 0..y.n_r() {
            let y_l = y.antenna(l);
            for (m, k) in self.kernels.iter().enumerate() {
                out[l * m_count + m] = gaussian_term(k.quad_form_inv(y_l, &mut scratch.a), k.logdet(), self.n, nv);
            }
        }
    }
}

/// Batched [`coherent_loglik`]. Hypotheses sharing a pilot power share the
/// channel estimate.
#[derive(Debug, Clone)]
pub struct CoherentReceiver {
    parts: Vec<CoherentParts>,
    /// Hypothesis index to the group of equal pilot power.
    group: Vec<usize>,
    /// Pilot power and estimator of each group.
    groups: Vec<(f64, usize)>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    codewords: Vec<Vec<Complex64>>,
    include_pilot_term: bool,
}

impl CoherentReceiver {
    pub fn new(codebook: &Codebook, ps: &PowerShaping, cov: &FadingCovariance, snr: f64, include_pilot_term: bool) -> Result<Self> {
        check_receiver(codebook, ps, cov, snr)?;
        let hyps = hypotheses(codebook, ps);
        let parts = hyps.iter().map(|h| coherent_parts(h, cov, snr)).collect::<Result<Vec<_>>>()?;
        let mut groups: Vec<(f64, usize)> = Vec::new();
        let group = hyps
            .iter()
            .map(|h| match groups.iter().position(|g| g.0 == h.pilot_power) {
                Some(i) => i,
                None => {
                    groups.push((h.pilot_power, h.m));
                    groups.len() - 1
                }
            })
            .collect();
        Ok(Self {
            parts,
            group,
            groups,
            alpha: hyps.iter().map(|h| h.alpha).collect(),
            beta: hyps.iter().map(|h| h.pilot_power).collect(),
            codewords: hyps.iter().map(|h| h.codeword.to_vec()).collect(),
            include_pilot_term,
        })
    }
}

impl FadingLoglik for CoherentReceiver {
    fn num_hypotheses(&self) -> usize {
        self.parts.len()
    }

    fn loglik_into(&self, y: &ReceivedSignal, nv: f64, scratch: &mut FadingScratch, out: &mut [f64]) {
        let m_count = self.parts.len();
        let n_d = y.n_data();
        for l in 0..y.n_r() {
            let (y_p, y_d) = (y.pilots(l), y.data(l));
            // one estimate per pilot-power group, stacked in scratch.h
            scratch.h.clear();
            for &(_, rep) in &self.groups {
                mat_vec(&self.parts[rep].w, y_p, &mut scratch.hp);
                scratch.h.extend_from_slice(&scratch.hp);
            }
            for m in 0..m_count {
                let g = self.group[m];
                let hyp = Hypothesis {
                    m,
                    codeword: &self.codewords[m],
                    alpha: self.alpha[m],
                    pilot_power: self.beta[m],
                };
                let h = &scratch.h[g * n_d..(g + 1) * n_d];
                out[l * m_count + m] = coherent_antenna(
                    &self.parts[m],
                    &hyp,
                    y_p,
                    y_d,
                    h,
                    nv,
                    self.include_pilot_term,
                    &mut scratch.a,
                    &mut scratch.b,
                );
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_covariance, transmit_simo, PowerDelayProfile, ResourceGrid};
    use crate::codec::{PilotMode, ShapingScheme};
    use crate::prior::MarkovPrior;

    fn setup(mode: PilotMode) -> (Codebook, PowerShaping, FadingCovariance) {
        let cb = Codebook::nr_baseline(4, 32).unwrap();
        let pi = MarkovPrior::new(0.9, 0.0, 4).unwrap().codeword_prior();
        let ps = PowerShaping::new(&ShapingScheme::Step { delta_db: 3.0 }, &pi, mode).unwrap();
        let cov = build_covariance(&PowerDelayProfile::tdl_c_300ns(), 30e3, &ResourceGrid::pucch_f2()).unwrap();
        (cb, ps, cov)
    }

    #[test]
    fn scalar_flat_origin() {
        let cov = FadingCovariance::flat(1, 0);
        let c = [Complex64::from(1.0)];
        let hyp = Hypothesis {
            m: 0,
            codeword: &c,
            alpha: 1.0,
            pilot_power: 1.0,
        };
        let y = ReceivedSignal::new(vec![Complex64::from(0.0)], 1, 0, 1.0, 1.0).unwrap();
        let v = noncoherent_loglik(&y, &hyp, &cov, 1.0, 1.0).unwrap();
        assert!((v + (2.0 * PI).ln()).abs() < 1e-14);
        let w = coherent_loglik(&y, &hyp, &cov, 1.0, 1.0, true).unwrap();
        assert!((w + (2.0 * PI).ln()).abs() < 1e-14);
    }

    #[test]
    fn coherent_matches_noncoherent() {
        for mode in [PilotMode::Constant, PilotMode::Shaped] {
            let (cb, ps, cov) = setup(mode);
            let mut rng = crate::rng::seeded(5);
            for t in 0..20 {
                let m = t % 16;
                let y = transmit_simo(&ps.hypothesis(cb.codeword(m), m), &cov, 4, 0.8, 1.0, 1.0, &mut rng).unwrap();
                for cand in 0..16 {
                    let hyp = ps.hypothesis(cb.codeword(cand), cand);
                    let a = noncoherent_loglik(&y, &hyp, &cov, 0.64, 1.0).unwrap();
                    let b = coherent_loglik(&y, &hyp, &cov, 0.64, 1.0, true).unwrap();
                    assert!((a - b).abs() < 1e-8, "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn batched_receivers_match_free_functions() {
        let (cb, ps, cov) = setup(PilotMode::Shaped);
        let mut rng = crate::rng::seeded(9);
        let y = transmit_simo(&ps.hypothesis(cb.codeword(3), 3), &cov, 2, 1.1, 1.0, 1.0, &mut rng).unwrap();
        let (snr, nv) = (1.3, 0.8);
        let nc = NoncoherentReceiver::new(&cb, &ps, &cov, snr).unwrap();
        let co = CoherentReceiver::new(&cb, &ps, &cov, snr, true).unwrap();
        let mut scratch = FadingScratch::default();
        let (mut a, mut b) = (vec![0.0; 32], vec![0.0; 32]);
        nc.loglik_into(&y, nv, &mut scratch, &mut a);
        co.loglik_into(&y, nv, &mut scratch, &mut b);
        for m in 0..16 {
            let hyp = ps.hypothesis(cb.codeword(m), m);
            let direct = noncoherent_loglik(&y, &hyp, &cov, snr, nv).unwrap();
            assert!((a[m] + a[16 + m] - direct).abs() < 1e-9);
            assert!((b[m] + b[16 + m] - direct).abs() < 1e-8);
        }
    }

    #[test]
    fn constant_pilot_term_is_a_shared_offset() {
        let (cb, ps, cov) = setup(PilotMode::Constant);
        let mut rng = crate::rng::seeded(1);
        let y = transmit_simo(&ps.hypothesis(cb.codeword(0), 0), &cov, 4, 1.0, 1.0, 1.0, &mut rng).unwrap();
        let diffs: Vec<f64> = (0..16)
            .map(|m| {
                let hyp = ps.hypothesis(cb.codeword(m), m);
                coherent_loglik(&y, &hyp, &cov, 1.0, 1.0, true).unwrap() - coherent_loglik(&y, &hyp, &cov, 1.0, 1.0, false).unwrap()
            })
            .collect();
        assert!(diffs.iter().all(|d| (d - diffs[0]).abs() < 1e-9));
    }

    #[test]
    fn high_snr_flat_mean_is_pilot_average() {
        let cov = FadingCovariance::flat(24, 8);
        let cb = Codebook::nr_baseline(4, 32).unwrap();
        let hyp = Hypothesis {
            m: 2,
            codeword: cb.codeword(2),
            alpha: 2.0,
            pilot_power: 0.5,
        };
        let parts = coherent_parts(&hyp, &cov, 1e10).unwrap();
        let y_p: Vec<Complex64> = (0..8).map(|i| Complex64::new(1.0 + i as f64 * 0.1, -0.5)).collect();
        let mean = y_p.iter().sum::<Complex64>() / 8.0;
        let mut h = Vec::new();
        mat_vec(&parts.w, &y_p, &mut h);
        assert!(h.iter().all(|v| (v - mean).norm() < 1e-8));
    }

    #[test]
    fn epsilon_scaling_keeps_the_argmax() {
        let (cb, ps, cov) = setup(PilotMode::Constant);
        let rx = NoncoherentReceiver::new(&cb, &ps, &cov, 1.0).unwrap();
        let mut rng = crate::rng::seeded(12);
        let y = transmit_simo(&ps.hypothesis(cb.codeword(6), 6), &cov, 4, 1.0, 1.0, 1.0, &mut rng).unwrap();
        let ys = y.scaled(3.7);
        let mut scratch = FadingScratch::default();
        let (mut a, mut b) = (vec![0.0; 64], vec![0.0; 64]);
        rx.loglik_into(&y, y.nv, &mut scratch, &mut a);
        rx.loglik_into(&ys, ys.nv, &mut scratch, &mut b);
        let total = |v: &[f64], m: usize| (0..4).map(|l| v[l * 16 + m]).sum::<f64>();
        let best = |v: &[f64]| (0..16).max_by(|&p, &q| total(v, p).total_cmp(&total(v, q))).unwrap();
        assert_eq!(best(&a), best(&b));
        let shift = total(&a, 0) - total(&b, 0);
        assert!((1..16).all(|m| ((total(&a, m) - total(&b, m)) - shift).abs() < 1e-9));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let cb = Codebook::nr_baseline(4, 16).unwrap();
        let (_, ps, cov) = setup(PilotMode::Constant);
        assert!(NoncoherentReceiver::new(&cb, &ps, &cov, 1.0).is_err());
    }
}
