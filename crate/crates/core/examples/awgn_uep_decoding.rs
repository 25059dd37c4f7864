//! Decoding one AWGN transmission with each decoder, then a short Monte
//! Carlo comparison of bitwise MAP against bitwise UEP.
//!
//!     cargo run --release --example awgn_uep_decoding

use harq_jscc::channel::transmit_awgn;
use harq_jscc::codec::Codebook;
use harq_jscc::harness::config::PriorConfig;
use harq_jscc::harness::{Scenario, ScenarioConfig};
use harq_jscc::prior::{message_bits, MarkovPrior};
use harq_jscc::receiver::{AwgnReceiver, BitDecoder, DecoderConfig, DecoderMode};

fn main() -> harq_jscc::Result<()> {
    let (k, n) = (11, 32);
    let prior = MarkovPrior::new(0.9, 0.0, k)?;
    let cb = Codebook::nr_baseline(k, n)?;
    let snr_db: f64 = 0.0;
    let g = 10f64.powf(snr_db / 20.0);

    // NACK on the third bit, everything else ACK.
    let mut sent = (1usize << k) - 1;
    sent &= !(1 << (k - 3));
    let y = transmit_awgn(cb.codeword(sent), 1.0, g, 1.0, 42);
    let loglik = AwgnReceiver::new(&cb, &vec![1.0; cb.num_codewords()], g, 1.0)?.loglik(&y);
    println!("sent     {:?}", message_bits(sent, k));
    for mode in [DecoderMode::CodewordMl, DecoderMode::BitwiseMap, DecoderMode::BitwiseUep, DecoderMode::MlmGlrt] {
        let d = BitDecoder::new(&DecoderConfig::with_mode(mode), &prior)?.decode(&loglik, 1);
        println!("{mode:?}: {:?}", d.bits);
    }

    println!("\nMonte Carlo at {snr_db} dB, 20000 trials each");
    for mode in [DecoderMode::BitwiseMap, DecoderMode::BitwiseUep] {
        let mut cfg = ScenarioConfig::new(PriorConfig { p: 0.9, rho: 0.0, k });
        cfg.decoder.config.mode = mode;
        cfg.budget.fixed_trials = Some(20_000);
        let point = Scenario::new(cfg)?.estimate_ber(snr_db, 0)?;
        let (a, b) = (point.ack(), point.nack());
        println!("{mode:?}: BER_ACK {:.2e} ± {:.1e}, BER_NACK {:.2e} ± {:.1e}", a.ber, a.ci, b.ber, b.ci);
    }
    Ok(())
}
