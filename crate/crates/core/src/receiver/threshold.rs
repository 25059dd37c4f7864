/// Decision threshold of the one-bit UEP test with ACK sent as `+sqrt(P1)`
/// and NACK as `-sqrt(P0)` in real Gaussian noise of variance `sigma2`:
/// decide NACK iff `y <= (sqrt(P1) - sqrt(P0)) / 2 - sigma2 ln(ratio) / (sqrt(P1) + sqrt(P0))`.
pub fn one_bit_threshold(p0: f64, p1: f64, sigma2: f64, ratio: f64) -> f64 {
    let (a0, a1) = (p0.sqrt(), p1.sqrt());
    (a1 - a0) / 2.0 - sigma2 * ratio.ln() / (a1 + a0)
}
