//! Decoding when the ACK correlation rho is unknown: the max-log GLRT
//! replaces the prior with its envelope over a grid of rho values.
//!
//!     cargo run --release --example glrt_unknown_correlation

use harq_jscc::harness::config::{PriorConfig, ShapingKind};
use harq_jscc::harness::{Scenario, ScenarioConfig};
use harq_jscc::prior::MarkovPrior;
use harq_jscc::receiver::{DecoderMode, GlrtPrior};

fn main() -> harq_jscc::Result<()> {
    let k = 4;
    let grid = [0.0, 0.1, 0.3, 0.5, 0.7, 0.9];
    let glrt = GlrtPrior::new(0.9, &grid, k)?;
    println!("message  envelope  prior(rho=0)  prior(rho=0.9)");
    let p0 = MarkovPrior::new(0.9, 0.0, k)?.codeword_prior();
    let p9 = MarkovPrior::new(0.9, 0.9, k)?.codeword_prior();
    for m in [0usize, 5, 10, 15] {
        println!(
            "{m:>7}  {:>8.3}  {:>12.3}  {:>14.3}",
            glrt.envelope()[m].exp(),
            p0.prob(m),
            p9.prob(m)
        );
    }

    // The UEP decoder is told the true rho; the GLRT only knows the grid.
    println!("\ntrue rho  decoder        BER_ACK   BER_NACK   (k = 11, step 5.5 dB, 0 dB)");
    for rho in [0.0, 0.7] {
        for mode in [DecoderMode::BitwiseUep, DecoderMode::MlmGlrt] {
            let mut cfg = ScenarioConfig::new(PriorConfig { p: 0.9, rho, k: 11 });
            cfg.shaping.scheme = ShapingKind::Step { delta_db: 5.5 };
            cfg.decoder.config.mode = mode;
            cfg.budget.fixed_trials = Some(10_000);
            let pt = Scenario::new(cfg)?.estimate_ber(0.0, 0)?;
            println!("{rho:>8}  {:<12} {:>9.2e} {:>10.2e}", format!("{mode:?}"), pt.ack().ber, pt.nack().ber);
        }
    }
    Ok(())
}
