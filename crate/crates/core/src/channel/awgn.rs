use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng;

/// One `CN(0, variance)` draw.
#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// `y = g sqrt(alpha) c + n` with `n ~ CN(0, sigma2 I)`, written into `out`.
pub fn transmit_awgn_into<R: Rng + ?Sized>(
    codeword: &[Complex64],
    alpha: f64,
    g: f64,
    sigma2: f64,
    rng: &mut R,
    out: &mut Vec<Complex64>,
) {
    let amp = g * alpha.sqrt();
    out.clear();
    out.extend(codeword.iter().map(|&c| c * amp + complex_normal(rng, sigma2)));
}

/// Seeded convenience form of [`transmit_awgn_into`].
pub fn transmit_awgn(codeword: &[Complex64], alpha: f64, g: f64, sigma2: f64, seed: u64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(codeword.len());
    transmit_awgn_into(codeword, alpha, g, sigma2, &mut rng::seeded(seed), &mut out);
    out
}
