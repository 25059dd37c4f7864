//! Per-codeword power shaping.
//!
//! Every scheme assigns a data power `alpha[m]` to each message and
//! normalizes so that the prior-weighted average power is one. Pilot REs
//! either keep unit power or follow the data power of the hypothesis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::prior::{all_ack, CodewordPrior};
use crate::{Error, Result};

/// Floor applied to zero probabilities when the caller opts in.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PilotMode {
    #[default]
    Constant,
    Shaped,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShapingScheme {
    /// Equal power for all codewords (the NR baseline).
    Uniform,
    /// `alpha ∝ -ln pi`. With `floor` set, zero probabilities are clamped
    /// to [`PROBABILITY_FLOOR`]; otherwise they are an error.
    Entropy { floor: bool },
    /// `alpha ∝ -ln mean(family)`.
    Arithmetic { family: Vec<CodewordPrior>, floor: bool },
    /// All-ACK message at `P0`, everything else at `P0 * 10^(delta_db / 10)`.
    Step { delta_db: f64 },
    /// Caller-provided relative powers, e.g. exported by a trainer.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerShaping {
    alpha: Vec<f64>,
    pilot_mode: PilotMode,
}

/// A codeword hypothesis: which message, with which data and pilot power.
#[derive(Debug, Clone, Copy)]
pub struct Hypothesis<'a> {
    pub m: usize,
    pub codeword: &'a [Complex64],
    pub alpha: f64,
    pub pilot_power: f64,
}

impl<'a> Hypothesis<'a> {
    /// Transmitted resource grid in pilot-then-data order:
    /// `[sqrt(beta) * 1_{n_pilot}, sqrt(alpha) * c]`.
    pub fn pilot_data_vector(&self, n_pilot: usize) -> Vec<Complex64> {
        let pilot = Complex64::from(self.pilot_power.sqrt());
        let data = self.alpha.sqrt();
        std::iter::repeat_n(pilot, n_pilot)
            .chain(self.codeword.iter().map(|&c| c * data))
            .collect()
    }
}

impl PowerShaping {
    pub fn uniform(num_codewords: usize) -> Self {
        Self {
            alpha: vec![1.0; num_codewords],
            pilot_mode: PilotMode::Constant,
        }
    }

    /// Builds the shaping and normalizes it against `eval_prior`.
    pub fn new(scheme: &ShapingScheme, eval_prior: &CodewordPrior, pilot_mode: PilotMode) -> Result<Self> {
        let len = eval_prior.len();
        let weights = match scheme {
            ShapingScheme::Uniform => vec![1.0; len],
            ShapingScheme::Entropy { floor } => neg_log_weights(eval_prior.probs(), *floor)?,
            ShapingScheme::Arithmetic { family, floor } => {
                let mean = CodewordPrior::mean(family)?;
                if mean.len() != len {
                    return Err(Error::InvalidShaping("prior family size differs from evaluation prior".into()));
                }
                neg_log_weights(mean.probs(), *floor)?
            }
            ShapingScheme::Step { delta_db } => {
                if !delta_db.is_finite() {
                    return Err(Error::InvalidShaping("step delta must be finite".into()));
                }
                let high = 10f64.powf(delta_db / 10.0);
                let ack = all_ack(eval_prior.k());
                (0..len).map(|m| if m == ack { 1.0 } else { high }).collect()
            }
            ShapingScheme::Explicit(w) => {
                if w.len() != len {
                    return Err(Error::InvalidShaping(format!("{} powers for {len} codewords", w.len())));
                }
                w.clone()
            }
        };
        Self::normalized(weights, eval_prior, pilot_mode)
    }

    /// Scales `weights` so that `sum pi[m] alpha[m] = 1`.
    pub fn normalized(weights: Vec<f64>, prior: &CodewordPrior, pilot_mode: PilotMode) -> Result<Self> {
        if weights.len() != prior.len() {
            return Err(Error::InvalidShaping("power vector and prior differ in length".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidShaping("codeword powers must be positive and finite".into()));
        }
        let average: f64 = weights.iter().zip(prior.probs()).map(|(w, p)| w * p).sum();
        Ok(Self {
            alpha: weights.into_iter().map(|w| w / average).collect(),
            pilot_mode,
        })
    }

    pub fn alpha(&self, m: usize) -> f64 {
        self.alpha[m]
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn pilot_mode(&self) -> PilotMode {
        self.pilot_mode
    }

    pub fn with_pilot_mode(mut self, mode: PilotMode) -> Self {
        self.pilot_mode = mode;
        self
    }

    pub fn pilot_power(&self, m: usize) -> f64 {
        match self.pilot_mode {
            PilotMode::Constant => 1.0,
            PilotMode::Shaped => self.alpha[m],
        }
    }

    pub fn max_alpha(&self) -> f64 {
        self.alpha.iter().copied().fold(f64::MIN, f64::max)
    }

    pub fn max_pilot_power(&self) -> f64 {
        match self.pilot_mode {
            PilotMode::Constant => 1.0,
            PilotMode::Shaped => self.max_alpha(),
        }
    }

    /// `sum pi[m] alpha[m]`.
    pub fn average_power(&self, prior: &CodewordPrior) -> f64 {
        self.alpha.iter().zip(prior.probs()).map(|(a, p)| a * p).sum()
    }

    pub fn hypothesis<'a>(&self, codeword: &'a [Complex64], m: usize) -> Hypothesis<'a> {
        Hypothesis {
            m,
            codeword,
            alpha: self.alpha[m],
            pilot_power: self.pilot_power(m),
        }
    }
}

fn neg_log_weights(probs: &[f64], floor: bool) -> Result<Vec<f64>> {
    probs
        .iter()
        .enumerate()
        .map(|(m, &p)| {
            let p = if p > 0.0 {
                p
            } else if floor {
                PROBABILITY_FLOOR
            } else {
                return Err(Error::InvalidShaping(format!(
                    "message {m} has zero prior; entropy shaping needs a probability floor"
                )));
            };
            Ok(-p.ln())
        })
        .collect()
}

/// Convenience wrapper mirroring [`PowerShaping::new`] with constant pilots.
pub fn power_shaping(scheme: &ShapingScheme, eval_prior: &CodewordPrior) -> Result<PowerShaping> {
    PowerShaping::new(scheme, eval_prior, PilotMode::Constant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::MarkovPrior;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn markov(p: f64, rho: f64, k: usize) -> CodewordPrior {
        MarkovPrior::new(p, rho, k).unwrap().codeword_prior()
    }

    #[test]
    fn entropy_one_bit() {
        let pi = markov(0.9, 0.0, 1);
        let ps = power_shaping(&ShapingScheme::Entropy { floor: false }, &pi).unwrap();
        // alpha ∝ (-ln 0.1, -ln 0.9), normalized by 0.9 (-ln 0.9) + 0.1 (-ln 0.1)
        let norm = -0.9 * 0.9f64.ln() - 0.1 * 0.1f64.ln();
        assert_abs_diff_eq!(ps.alpha(0), -(0.1f64.ln()) / norm, epsilon = 1e-12);
        assert_abs_diff_eq!(ps.alpha(0), 7.083, epsilon = 1e-3);
        assert_abs_diff_eq!(ps.alpha(1), 0.324, epsilon = 1e-3);
        assert_abs_diff_eq!(ps.alpha(0) / ps.alpha(1), 0.1f64.ln() / 0.9f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(ps.average_power(&pi), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn arithmetic_of_duplicated_family_is_entropy() {
        let pi = markov(0.85, 0.3, 5);
        let entropy = power_shaping(&ShapingScheme::Entropy { floor: false }, &pi).unwrap();
        let arithmetic = power_shaping(
            &ShapingScheme::Arithmetic { family: vec![pi.clone(), pi.clone()], floor: false },
            &pi,
        )
        .unwrap();
        for (a, b) in entropy.alphas().iter().zip(arithmetic.alphas()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn arithmetic_uses_family_mean() {
        let family = vec![markov(0.9, 0.0, 3), markov(0.9, 0.9, 3)];
        let eval = markov(0.9, 0.5, 3);
        let ps = power_shaping(&ShapingScheme::Arithmetic { family: family.clone(), floor: false }, &eval).unwrap();
        let mean: Vec<f64> = (0..8).map(|m| 0.5 * (family[0].prob(m) + family[1].prob(m))).collect();
        for m in 0..8 {
            let ratio = ps.alpha(m) / ps.alpha(7);
            assert_abs_diff_eq!(ratio, mean[m].ln() / mean[7].ln(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(ps.average_power(&eval), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn step_k2() {
        let pi = markov(0.9, 0.0, 2);
        let ps = power_shaping(&ShapingScheme::Step { delta_db: 3.0 }, &pi).unwrap();
        let p0 = 1.0 / (0.81 + 0.19 * 10f64.powf(0.3));
        assert_abs_diff_eq!(ps.alpha(3), p0, epsilon = 1e-12);
        assert_abs_diff_eq!(ps.alpha(3), 0.841, epsilon = 1e-3);
        for m in 0..3 {
            assert_abs_diff_eq!(ps.alpha(m), 1.678, epsilon = 1e-3);
        }
    }

    #[test]
    fn entropy_rejects_zero_prior_without_floor() {
        let pi = markov(0.9, 1.0, 3);
        assert!(power_shaping(&ShapingScheme::Entropy { floor: false }, &pi).is_err());
        let ps = power_shaping(&ShapingScheme::Entropy { floor: true }, &pi).unwrap();
        assert_abs_diff_eq!(ps.average_power(&pi), 1.0, epsilon = 1e-9);
        assert!(ps.alpha(3) > ps.alpha(0));
    }

    #[test]
    fn pilot_modes() {
        let pi = markov(0.9, 0.0, 2);
        let ps = PowerShaping::new(&ShapingScheme::Step { delta_db: 3.0 }, &pi, PilotMode::Shaped).unwrap();
        assert_eq!(ps.pilot_power(0), ps.alpha(0));
        assert_eq!(ps.max_pilot_power(), ps.max_alpha());
        let ps = ps.with_pilot_mode(PilotMode::Constant);
        assert_eq!(ps.pilot_power(0), 1.0);
        assert_eq!(ps.max_pilot_power(), 1.0);
    }

    #[test]
    fn pilot_data_vector_layout() {
        let c = [Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)];
        let h = Hypothesis { m: 0, codeword: &c, alpha: 4.0, pilot_power: 9.0 };
        let v = h.pilot_data_vector(3);
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], Complex64::new(3.0, 0.0));
        assert_eq!(v[3], Complex64::new(0.0, 2.0));
    }

    proptest! {
        #[test]
        fn schemes_are_normalized(p in 0.55f64..0.97, rho in 0.0f64..0.95, k in 1usize..=7, delta in 0.0f64..10.0) {
            let pi = markov(p, rho, k);
            for scheme in [
                ShapingScheme::Uniform,
                ShapingScheme::Entropy { floor: false },
                ShapingScheme::Step { delta_db: delta },
            ] {
                let ps = power_shaping(&scheme, &pi).unwrap();
                prop_assert!((ps.average_power(&pi) - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn step_is_monotone_in_delta(p in 0.55f64..0.97, rho in 0.0f64..0.95, k in 2usize..=6, d in 0.0f64..8.0, dd in 0.1f64..3.0) {
            let pi = markov(p, rho, k);
            let a = power_shaping(&ShapingScheme::Step { delta_db: d }, &pi).unwrap();
            let b = power_shaping(&ShapingScheme::Step { delta_db: d + dd }, &pi).unwrap();
            let ack = all_ack(k);
            prop_assert!(b.alpha(ack) < a.alpha(ack));
            prop_assert!(b.alpha(0) > a.alpha(0));
        }

        #[test]
        fn entropy_orders_by_prior(p in 0.55f64..0.97, rho in 0.0f64..0.95, k in 1usize..=7) {
            let pi = markov(p, rho, k);
            let ps = power_shaping(&ShapingScheme::Entropy { floor: false }, &pi).unwrap();
            for i in 0..pi.len() {
                for j in 0..pi.len() {
                    if pi.prob(i) > pi.prob(j) * (1.0 + 1e-12) {
                        prop_assert!(ps.alpha(i) < ps.alpha(j));
                    }
                }
            }
        }
    }
}
