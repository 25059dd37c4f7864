//! The optimal noncoherent and coherent fading receivers compute the same
//! likelihoods; the low-complexity receiver approximates the coherent one
//! with closed forms.
//!
//!     cargo run --release --example fading_receivers

use harq_jscc::channel::{build_covariance, transmit_simo, PowerDelayProfile, ResourceGrid};
use harq_jscc::codec::{Codebook, PilotMode, PowerShaping, ShapingScheme};
use harq_jscc::prior::MarkovPrior;
use harq_jscc::receiver::{
    BitDecoder, ChannelEstimator, CoherentReceiver, DecoderConfig, FadingLoglik, FadingScratch, LowComplexityReceiver,
    NoncoherentReceiver,
};
use harq_jscc::rng::seeded;

fn main() -> harq_jscc::Result<()> {
    let (k, n_r) = (4, 4);
    let prior = MarkovPrior::new(0.9, 0.0, k)?;
    let pi = prior.codeword_prior();
    let cb = Codebook::nr_baseline(k, 32)?;
    let ps = PowerShaping::new(&ShapingScheme::Step { delta_db: 3.0 }, &pi, PilotMode::Shaped)?;
    let cov = build_covariance(&PowerDelayProfile::tdl_c_300ns(), 30e3, &ResourceGrid::pucch_f2())?;
    let snr: f64 = 10f64.powf(-0.3);

    let nc = NoncoherentReceiver::new(&cb, &ps, &cov, snr)?;
    let co = CoherentReceiver::new(&cb, &ps, &cov, snr, true)?;
    let lc = LowComplexityReceiver::new(&cb, &ps, ChannelEstimator::new(&cov, snr, ps.max_pilot_power())?, snr)?;
    let decoder = BitDecoder::new(&DecoderConfig::default(), &prior)?;

    let mut rng = seeded(7);
    let mut scratch = FadingScratch::default();
    let m_len = cb.num_codewords();
    let (mut a, mut b, mut c) = (vec![0.0; n_r * m_len], vec![0.0; n_r * m_len], vec![0.0; n_r * m_len]);
    let mut worst: f64 = 0.0;
    for sent in [0usize, 6, 15] {
        let y = transmit_simo(&ps.hypothesis(cb.codeword(sent), sent), &cov, n_r, snr.sqrt(), 1.0, 1.0, &mut rng)?;
        nc.loglik_into(&y, 1.0, &mut scratch, &mut a);
        co.loglik_into(&y, 1.0, &mut scratch, &mut b);
        lc.loglik_into(&y, 1.0, &mut scratch, &mut c);
        worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(worst, f64::max);
        println!(
            "sent {sent:>2}: noncoherent {:?}  coherent {:?}  low-complexity {:?}",
            decoder.decode(&a, n_r).bits,
            decoder.decode(&b, n_r).bits,
            decoder.decode(&c, n_r).bits
        );
    }
    println!("largest noncoherent/coherent difference: {worst:.1e}");
    Ok(())
}
