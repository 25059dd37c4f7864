//! The practical prior-agnostic baseline: channel estimate from the pilots,
//! then pick the codeword with the largest real correlation.
//!
//!     cargo run --release --example correlator_baseline

use harq_jscc::channel::{build_covariance, rmmse_covariance, transmit_simo, PowerDelayProfile, ResourceGrid};
use harq_jscc::codec::{Codebook, PowerShaping};
use harq_jscc::receiver::{ChannelEstimator, CorrelatorReceiver, FadingScratch};
use harq_jscc::rng::seeded;

fn main() -> harq_jscc::Result<()> {
    let grid = ResourceGrid::pucch_f2();
    let truth = build_covariance(&PowerDelayProfile::tdl_c_300ns(), 30e3, &grid)?;
    let model = rmmse_covariance(500e-9, 30e3, &grid)?;
    let cb = Codebook::nr_baseline(4, 32)?;
    let ps = PowerShaping::uniform(cb.num_codewords());
    // estimator designed for a nominal 0 dB
    let rx = CorrelatorReceiver::new(ChannelEstimator::new(&model, 1.0, 1.0)?);

    let mut rng = seeded(3);
    let mut scratch = FadingScratch::default();
    println!("{:>7} {:>12}", "SNR dB", "BLER");
    for snr_db in [-6.0f64, -4.0, -2.0, 0.0] {
        let g = 10f64.powf(snr_db / 20.0);
        let trials = 20_000;
        let mut errors = 0;
        for t in 0..trials {
            let m = t % cb.num_codewords();
            let y = transmit_simo(&ps.hypothesis(cb.codeword(m), m), &truth, 4, g, 1.0, 1.0, &mut rng)?;
            errors += usize::from(rx.decode(&cb, &y, &mut scratch) != m);
        }
        println!("{snr_db:>7} {:>12.3e}", errors as f64 / trials as f64);
    }
    Ok(())
}
