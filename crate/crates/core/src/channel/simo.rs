use num_complex::Complex64;
use rand::Rng;

use super::awgn::complex_normal;
use super::FadingCovariance;
use crate::codec::Hypothesis;
use crate::linalg::{psd_factor, CMatrix};
use crate::{Error, Result};

/// Eigenvalue tolerance for the covariance square root.
pub const PSD_TOL: f64 = 1e-10;

/// Draws `h ~ CN(0, R)` as `F z` with a compact factor `F F^H = R`.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    /// Row-major `n x rank`.
    factor: Vec<Complex64>,
    n: usize,
    rank: usize,
}

impl ChannelSampler {
    pub fn new(cov: &FadingCovariance) -> Result<Self> {
        let f: CMatrix = psd_factor(cov.matrix(), PSD_TOL)?;
        let (n, rank) = f.shape();
        let factor = (0..n).flat_map(|r| (0..rank).map(move |c| (r, c))).map(|(r, c)| f[(r, c)]).collect();
        Ok(Self { factor, n, rank })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, z: &mut Vec<Complex64>, h: &mut Vec<Complex64>) {
        z.clear();
        z.extend((0..self.rank).map(|_| complex_normal(rng, 1.0)));
        h.clear();
        h.extend(self.factor.chunks_exact(self.rank).map(|row| row.iter().zip(z.iter()).map(|(a, b)| a * b).sum::<Complex64>()));
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex64> {
        let (mut z, mut h) = (Vec::new(), Vec::new());
        self.sample_into(rng, &mut z, &mut h);
        h
    }
}

/// Per-antenna observations in pilot-first order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSignal {
    /// Antenna-major, `n_r * n` samples.
    samples: Vec<Complex64>,
    n: usize,
    n_pilot: usize,
    /// True noise variance `eps^2 sigma^2`.
    pub nv: f64,
    /// True SNR `g^2 / sigma^2`.
    pub snr: f64,
}

impl ReceivedSignal {
    pub fn new(samples: Vec<Complex64>, n: usize, n_pilot: usize, nv: f64, snr: f64) -> Result<Self> {
        if n == 0 || samples.len() % n != 0 || n_pilot > n {
            return Err(Error::InvalidParameter("received samples do not tile the grid".into()));
        }
        Ok(Self {
            samples,
            n,
            n_pilot,
            nv,
            snr,
        })
    }

    pub fn empty(n: usize, n_pilot: usize) -> Self {
        Self {
            samples: Vec::new(),
            n,
            n_pilot,
            nv: 0.0,
            snr: 0.0,
        }
    }

    pub fn n_r(&self) -> usize {
        self.samples.len() / self.n
    }

    pub fn len_grid(&self) -> usize {
        self.n
    }

    pub fn n_pilot(&self) -> usize {
        self.n_pilot
    }

    pub fn n_data(&self) -> usize {
        self.n - self.n_pilot
    }

    pub fn antenna(&self, l: usize) -> &[Complex64] {
        &self.samples[l * self.n..(l + 1) * self.n]
    }

    pub fn pilots(&self, l: usize) -> &[Complex64] {
        &self.antenna(l)[..self.n_pilot]
    }

    pub fn data(&self, l: usize) -> &[Complex64] {
        &self.antenna(l)[self.n_pilot..]
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Copy with every sample multiplied by `factor` and NV by `factor^2`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.samples.iter_mut().for_each(|s| *s *= factor);
        out.nv *= factor * factor;
        out
    }
}

/// Reusable buffers for [`transmit_simo_into`].
#[derive(Debug, Default, Clone)]
pub struct SimoScratch {
    x: Vec<Complex64>,
    z: Vec<Complex64>,
    h: Vec<Complex64>,
}

/// `y_l = eps (g h_l ⊙ x + n_l)` for `n_r` independent antennas, with
/// `x = [sqrt(beta) 1, sqrt(alpha) c]`.
#[allow(clippy::too_many_arguments)]
pub fn transmit_simo_into<R: Rng + ?Sized>(
    hypothesis: &Hypothesis,
    n_pilot: usize,
    sampler: &ChannelSampler,
    n_r: usize,
    g: f64,
    sigma2: f64,
    epsilon: f64,
    rng: &mut R,
    scratch: &mut SimoScratch,
    out: &mut ReceivedSignal,
) {
    let n = n_pilot + hypothesis.codeword.len();
    debug_assert_eq!(n, sampler.dim());
    scratch.x.clear();
    let pilot = Complex64::from(hypothesis.pilot_power.sqrt());
    let data = hypothesis.alpha.sqrt();
    scratch.x.extend(std::iter::repeat_n(pilot, n_pilot));
    scratch.x.extend(hypothesis.codeword.iter().map(|&c| c * data));
    out.samples.clear();
    out.n = n;
    out.n_pilot = n_pilot;
    for _ in 0..n_r {
        sampler.sample_into(rng, &mut scratch.z, &mut scratch.h);
        for (h, x) in scratch.h.iter().zip(&scratch.x) {
            out.samples.push((h * x * g + complex_normal(rng, sigma2)) * epsilon);
        }
    }
    out.nv = epsilon * epsilon * sigma2;
    out.snr = g * g / sigma2;
}

/// Allocating form of [`transmit_simo_into`].
#[allow(clippy::too_many_arguments)]
pub fn transmit_simo<R: Rng + ?Sized>(
    hypothesis: &Hypothesis,
    cov: &FadingCovariance,
    n_r: usize,
    g: f64,
    sigma2: f64,
    epsilon: f64,
    rng: &mut R,
) -> Result<ReceivedSignal> {
    if cov.n_data() != hypothesis.codeword.len() {
        return Err(Error::InvalidParameter(format!(
            "grid has {} data REs but the codeword has {} symbols",
            cov.n_data(),
            hypothesis.codeword.len()
        )));
    }
    let sampler = ChannelSampler::new(cov)?;
    let mut out = ReceivedSignal::empty(cov.dim(), cov.n_pilot());
    transmit_simo_into(hypothesis, cov.n_pilot(), &sampler, n_r, g, sigma2, epsilon, rng, &mut SimoScratch::default(), &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_covariance, PowerDelayProfile, ResourceGrid};
    use crate::codec::{Codebook, PowerShaping};
    use crate::rng;

    fn tdl() -> FadingCovariance {
        build_covariance(&PowerDelayProfile::tdl_c_300ns(), 30e3, &ResourceGrid::pucch_f2()).unwrap()
    }

    #[test]
    fn flat_noiseless_is_scalar_times_grid() {
        let cb = Codebook::nr_baseline(4, 32).unwrap();
        let ps = PowerShaping::uniform(16);
        let hyp = ps.hypothesis(cb.codeword(6), 6);
        let cov = FadingCovariance::flat(24, 8);
        let y = transmit_simo(&hyp, &cov, 3, 1.0, 0.0, 1.0, &mut rng::seeded(2)).unwrap();
        let x = hyp.pilot_data_vector(8);
        for l in 0..3 {
            let h = y.antenna(l)[0] / x[0];
            for (a, b) in y.antenna(l).iter().zip(&x) {
                assert!((a - h * b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sample_covariance_matches() {
        let cov = tdl();
        let sampler = ChannelSampler::new(&cov).unwrap();
        assert!(sampler.rank() <= 12);
        let mut rng = rng::seeded(7);
        let n = 24;
        let draws = 100_000;
        let mut acc = CMatrix::zeros(n, n);
        let mut cross = Complex64::new(0.0, 0.0);
        let (mut z, mut h) = (Vec::new(), Vec::new());
        let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
        for _ in 0..draws {
            sampler.sample_into(&mut rng, &mut z, &mut h);
            for i in 0..n {
                for j in 0..n {
                    acc[(i, j)] += h[i] * h[j].conj();
                }
            }
            cross += h[0] * prev[0].conj();
            prev.clone_from(&h);
        }
        acc /= Complex64::from(draws as f64);
        let worst = (acc - cov.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(worst < 0.02, "max deviation {worst}");
        assert!((cross / draws as f64).norm() < 0.01);
    }

    #[test]
    fn antennas_are_independent() {
        let cb = Codebook::nr_baseline(4, 32).unwrap();
        let ps = PowerShaping::uniform(16);
        let hyp = ps.hypothesis(cb.codeword(0), 0);
        let cov = tdl();
        let sampler = ChannelSampler::new(&cov).unwrap();
        let mut rng = rng::seeded(3);
        let mut out = ReceivedSignal::empty(24, 8);
        let mut scratch = SimoScratch::default();
        let draws = 100_000;
        let mut corr = Complex64::new(0.0, 0.0);
        for _ in 0..draws {
            transmit_simo_into(&hyp, 8, &sampler, 2, 1.0, 0.0, 1.0, &mut rng, &mut scratch, &mut out);
            corr += out.pilots(0)[0] * out.pilots(1)[0].conj();
        }
        assert!((corr / draws as f64).norm() < 0.01);
    }

    #[test]
    fn data_re_snr() {
        let cb = Codebook::nr_baseline(4, 32).unwrap();
        let ps = PowerShaping::normalized((0..16).map(|m| 1.0 + m as f64).collect(), &crate::prior::CodewordPrior::uniform(4), Default::default()).unwrap();
        let m = 15;
        let hyp = ps.hypothesis(cb.codeword(m), m);
        let cov = tdl();
        let sampler = ChannelSampler::new(&cov).unwrap();
        let mut rng = rng::seeded(4);
        let mut out = ReceivedSignal::empty(24, 8);
        let mut scratch = SimoScratch::default();
        let (g, sigma2) = (1.3, 0.5);
        let draws = 50_000;
        let mut signal = 0.0;
        for _ in 0..draws {
            transmit_simo_into(&hyp, 8, &sampler, 1, g, 0.0, 1.0, &mut rng, &mut scratch, &mut out);
            signal += out.data(0).iter().map(|s| s.norm_sqr()).sum::<f64>() / 16.0;
        }
        let snr = signal / draws as f64 / sigma2;
        let expected = ps.alpha(m) * g * g / sigma2;
        assert!((snr / expected - 1.0).abs() < 0.02, "{snr} vs {expected}");
    }

    #[test]
    fn epsilon_scales_signal_not_snr() {
        let cb = Codebook::nr_baseline(4, 32).unwrap();
        let ps = PowerShaping::uniform(16);
        let hyp = ps.hypothesis(cb.codeword(2), 2);
        let cov = tdl();
        let a = transmit_simo(&hyp, &cov, 2, 1.0, 0.7, 1.0, &mut rng::seeded(9)).unwrap();
        let b = transmit_simo(&hyp, &cov, 2, 1.0, 0.7, 2.0, &mut rng::seeded(9)).unwrap();
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!((x * 2.0 - y).norm() < 1e-12);
        }
        assert_eq!(a.snr, b.snr);
        assert!((b.nv - 4.0 * a.nv).abs() < 1e-15);
    }

    #[test]
    fn codeword_length_mismatch() {
        let cb = Codebook::nr_baseline(4, 20).unwrap();
        let ps = PowerShaping::uniform(16);
        let hyp = ps.hypothesis(cb.codeword(2), 2);
        assert!(transmit_simo(&hyp, &tdl(), 1, 1.0, 1.0, 1.0, &mut rng::seeded(1)).is_err());
    }
}
