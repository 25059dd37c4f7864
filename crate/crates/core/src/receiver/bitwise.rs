//! Bitwise posteriors and the unequal-error-protection decision rule.
//!
//! All functions take per-hypothesis scores `v_m = log p(y | H_m) + log pi_m`
//! (any additive constant shared by all `m` is harmless) and produce, per
//! bit, the pair `(log p(y, b_i = 0), log p(y, b_i = 1))`.

use crate::prior::{bit, CodewordPrior};
use crate::{Error, Result};

/// Scores further than this below the best hypothesis are skipped by the
/// pruned log-sum-exp. A side whose retained mass is within about 30 nats
/// of the maximum is exact to 1e-9 relative; a side further away is only
/// known to lie at least ~30 nats below the other side, which fixes the
/// decision for any threshold smaller than that.
pub const PRUNE_NATS: f64 = 60.0;

/// Hard bit decisions with their log-likelihood ratios
/// `llr[i] = log p(Y | b_i = 1) - log p(Y | b_i = 0)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BitDecision {
    pub bits: Vec<u8>,
    pub llr: Vec<f64>,
}

/// `ln x`, stable at zero.
fn ln(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// `log(e^a + e^b)` with `-inf` support.
pub fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `log sum exp(v)`.
pub fn logsumexp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Exact bitwise joint log-probabilities by log-sum-exp over each side.
/// A side with no mass (all scores `-inf`) is `-inf`.
pub fn bitwise_posteriors(scores: &[f64], k: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); k];
    bitwise_posteriors_into(scores, k, f64::INFINITY, &mut out);
    out
}

/// Bitwise log-sum-exp with optional pruning (see [`PRUNE_NATS`]). Sides
/// that would underflow relative to the global maximum are recomputed
/// against their own maximum.
pub fn bitwise_posteriors_into(scores: &[f64], k: usize, prune: f64, out: &mut [(f64, f64)]) {
    debug_assert_eq!(scores.len(), 1 << k);
    debug_assert_eq!(out.len(), k);
    let vmax = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if vmax == f64::NEG_INFINITY {
        out.iter_mut().for_each(|o| *o = (f64::NEG_INFINITY, f64::NEG_INFINITY));
        return;
    }
    let mut sums = [[0.0f64; 2]; crate::prior::MAX_K];
    for (m, &v) in scores.iter().enumerate() {
        let d = v - vmax;
        if d < -prune || d == f64::NEG_INFINITY {
            continue;
        }
        let w = d.exp();
        for (i, s) in sums.iter_mut().enumerate().take(k) {
            s[(m >> (k - 1 - i)) & 1] += w;
        }
    }
    for i in 0..k {
        let mut side = [0.0; 2];
        for j in 0..2 {
            side[j] = if sums[i][j] > 0.0 {
                vmax + sums[i][j].ln()
            } else if prune.is_infinite() {
                side_lse(scores, k, i, j as u8)
            } else {
                // nothing retained: report the largest score on the side
                side_max(scores, k, i, j as u8)
            };
        }
        out[i] = (side[0], side[1]);
    }
}

fn side_max(scores: &[f64], k: usize, i: usize, j: u8) -> f64 {
    scores
        .iter()
        .enumerate()
        .filter(|(m, _)| bit(*m, i, k) == j)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn side_lse(scores: &[f64], k: usize, i: usize, j: u8) -> f64 {
    let side: Vec<f64> = scores
        .iter()
        .enumerate()
        .filter(|(m, _)| bit(*m, i, k) == j)
        .map(|(_, &v)| v)
        .collect();
    logsumexp(&side)
}

/// Max-log approximation: `max_{m in C_{b_i=j}} v_m` per side.
pub fn max_log_posteriors_into(scores: &[f64], k: usize, out: &mut [(f64, f64)]) {
    debug_assert_eq!(scores.len(), 1 << k);
    let mut best = [[f64::NEG_INFINITY; 2]; crate::prior::MAX_K];
    for (m, &v) in scores.iter().enumerate() {
        for (i, b) in best.iter_mut().enumerate().take(k) {
            let s = &mut b[(m >> (k - 1 - i)) & 1];
            if v > *s {
                *s = v;
            }
        }
    }
    for i in 0..k {
        out[i] = (best[i][0], best[i][1]);
    }
}

pub fn max_log_posteriors(scores: &[f64], k: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); k];
    max_log_posteriors_into(scores, k, &mut out);
    out
}

/// Per-bit `(P(b_i = 0), P(b_i = 1))` under a codeword prior.
pub fn bit_marginals(prior: &CodewordPrior) -> Vec<(f64, f64)> {
    (0..prior.k())
        .map(|i| {
            let p1 = prior.ack_marginal(i);
            (1.0 - p1, p1)
        })
        .collect()
}

/// Log-likelihood ratio of bit `i` from joint log-probabilities and the
/// bit marginals. A side with zero marginal prior decides for the other
/// side.
pub fn llr_from_joint(joint: (f64, f64), marginal: (f64, f64)) -> f64 {
    match (marginal.0 > 0.0, marginal.1 > 0.0) {
        (true, true) => (joint.1 - ln(marginal.1)) - (joint.0 - ln(marginal.0)),
        (false, true) => f64::INFINITY,
        (true, false) => f64::NEG_INFINITY,
        (false, false) => 0.0,
    }
}

/// NACK (0) iff `p(y|b=0) / p(y|b=1) >= ratio`, i.e. `llr <= -ln ratio`.
/// Ties go to NACK.
#[inline]
pub fn uep_bit(llr: f64, ratio: f64) -> u8 {
    if llr.is_nan() || llr <= -ratio.ln() {
        0
    } else {
        1
    }
}

pub fn uep_decode_llr(llr: Vec<f64>, ratio: f64) -> BitDecision {
    let bits = llr.iter().map(|&l| uep_bit(l, ratio)).collect();
    BitDecision { bits, llr }
}

/// Bitwise UEP decision from joint log-probabilities.
pub fn uep_decode(joint: &[(f64, f64)], marginals: &[(f64, f64)], ratio: f64) -> BitDecision {
    let llr = joint.iter().zip(marginals).map(|(&j, &m)| llr_from_joint(j, m)).collect();
    uep_decode_llr(llr, ratio)
}

/// Ratio that reproduces bitwise MAP: `p / (1 - p)`.
pub fn map_ratio(p: f64) -> f64 {
    p / (1.0 - p)
}

/// Empirical rule: `ratio = BER_NACK,t / BER_ACK,t`.
pub fn uep_ratio_from_targets(ber_ack: f64, ber_nack: f64) -> Result<f64> {
    if !(ber_ack > 0.0 && ber_nack > 0.0 && ber_ack < 1.0 && ber_nack < 1.0) {
        return Err(Error::InvalidParameter("BER targets must lie in (0, 1)".into()));
    }
    Ok(ber_nack / ber_ack)
}

/// `beta` with `beta / (1 - beta) = ratio`.
pub fn beta_from_ratio(ratio: f64) -> f64 {
    ratio / (1.0 + ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::MarkovPrior;
    use proptest::prelude::*;

    /// Brute-force side sums in scaled extended range: factor out the
    /// side max, accumulate with Kahan compensation.
    fn brute(scores: &[f64], k: usize) -> Vec<(f64, f64)> {
        (0..k)
            .map(|i| {
                let side = |j: u8| {
                    let vals: Vec<f64> = (0..scores.len()).filter(|&m| bit(m, i, k) == j).map(|m| scores[m]).collect();
                    let mx = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let (mut s, mut c) = (0.0f64, 0.0f64);
                    for v in vals {
                        let y = (v - mx).exp() - c;
                        let t = s + y;
                        c = (t - s) - y;
                        s = t;
                    }
                    mx + s.ln()
                };
                (side(0), side(1))
            })
            .collect()
    }

    #[test]
    fn matches_brute_force_k3() {
        let mut rng = crate::rng::seeded(17);
        use rand::Rng;
        for _ in 0..200 {
            let scores: Vec<f64> = (0..8).map(|_| rng.random::<f64>() * 80.0 - 60.0).collect();
            let fast = bitwise_posteriors(&scores, 3);
            let slow = brute(&scores, 3);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn partition_identity() {
        let scores = [-3.0, 1.0, 0.5, -10.0, 2.0, -1.0, 0.0, 4.0];
        let total = logsumexp(&scores);
        for (a, b) in bitwise_posteriors(&scores, 3) {
            assert!((logaddexp(a, b) - total).abs() < 1e-12);
        }
    }

    #[test]
    fn pruned_is_exact_near_the_maximum() {
        let scores: Vec<f64> = (0..16).map(|m| -(m as f64) * 3.7).collect();
        let mut pruned = vec![(0.0, 0.0); 4];
        bitwise_posteriors_into(&scores, 4, PRUNE_NATS, &mut pruned);
        let exact = bitwise_posteriors(&scores, 4);
        for (a, b) in pruned.iter().zip(&exact) {
            assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
        }
        // far-away side: decisions still agree
        let mut far = vec![-1000.0; 4];
        far[3] = 0.0;
        let mut p = vec![(0.0, 0.0); 2];
        bitwise_posteriors_into(&far, 2, PRUNE_NATS, &mut p);
        let e = bitwise_posteriors(&far, 2);
        let marg = [(0.5, 0.5); 2];
        assert_eq!(uep_decode(&p, &marg, 0.1).bits, uep_decode(&e, &marg, 0.1).bits);
    }

    #[test]
    fn neg_infinity_side() {
        let scores = [f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0, 1.0];
        let post = bitwise_posteriors(&scores, 2);
        assert_eq!(post[0].0, f64::NEG_INFINITY);
        assert!(post[0].1.is_finite());
        let d = uep_decode(&post, &[(0.5, 0.5); 2], 1.0);
        assert_eq!(d.bits[0], 1);
        assert!(!d.llr.iter().any(|l| l.is_nan()));
    }

    #[test]
    fn flat_prior_ratio_is_likelihood_ratio() {
        let ll = [-2.0, -0.5];
        let post = bitwise_posteriors(&ll, 1);
        let llr = llr_from_joint(post[0], (0.5, 0.5));
        assert!((llr - 1.5).abs() < 1e-15);
    }

    #[test]
    fn ties_go_to_nack() {
        assert_eq!(uep_bit(0.0, 1.0), 0);
        assert_eq!(uep_bit(1e-15, 1.0), 1);
        assert_eq!(uep_bit(-(0.1f64.ln()), 0.1), 0);
    }

    #[test]
    fn targets_rule() {
        let r = uep_ratio_from_targets(0.01, 0.001).unwrap();
        assert!((r - 0.1).abs() < 1e-15);
        assert!((beta_from_ratio(r) - 1.0 / 11.0).abs() < 1e-15);
        assert!(uep_ratio_from_targets(0.0, 0.1).is_err());
    }

    #[test]
    fn max_log_bounds_exact() {
        let scores = [-3.0, 1.0, 0.5, -10.0, 2.0, -1.0, 0.0, 4.0];
        let exact = bitwise_posteriors(&scores, 3);
        let approx = max_log_posteriors(&scores, 3);
        for (e, a) in exact.iter().zip(&approx) {
            assert!(a.0 <= e.0 && e.0 <= a.0 + 4f64.ln() + 1e-12);
            assert!(a.1 <= e.1 && e.1 <= a.1 + 4f64.ln() + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn map_ratio_reproduces_bitwise_map(
            ll in proptest::collection::vec(-30.0f64..5.0, 16),
            p in 0.55f64..0.97,
            rho in 0.0f64..0.9,
        ) {
            let prior = MarkovPrior::new(p, rho, 4).unwrap().codeword_prior();
            let scores: Vec<f64> = ll.iter().zip(prior.log_probs()).map(|(a, b)| a + b).collect();
            let joint = bitwise_posteriors(&scores, 4);
            let d = uep_decode(&joint, &bit_marginals(&prior), map_ratio(p));
            for (i, &(a0, a1)) in joint.iter().enumerate() {
                // argmax of p(b_i = j | y); skip numerically tied cases
                if (a1 - a0).abs() > 1e-9 {
                    prop_assert_eq!(d.bits[i], u8::from(a1 > a0));
                }
            }
        }

        #[test]
        fn max_log_never_exceeds_exact(ll in proptest::collection::vec(-50.0f64..5.0, 32)) {
            let exact = bitwise_posteriors(&ll, 5);
            let approx = max_log_posteriors(&ll, 5);
            let slack = 16f64.ln() + 1e-9;
            for (e, a) in exact.iter().zip(&approx) {
                prop_assert!(a.0 <= e.0 + 1e-12 && e.0 <= a.0 + slack);
                prop_assert!(a.1 <= e.1 + 1e-12 && e.1 <= a.1 + slack);
            }
        }
    }
}
