//! Pilot-based channel estimation on the PUCCH Format 2 grid: how much the
//! assumed covariance costs, and the pilot-residual noise estimate.
//!
//!     cargo run --release --example channel_estimation

use harq_jscc::channel::{build_covariance, complex_normal, ChannelSampler, PowerDelayProfile, ResourceGrid};
use harq_jscc::receiver::{estimate_nv, ChannelEstimator, ChestConfig, ChestMethod};
use harq_jscc::rng::seeded;
use harq_jscc::Complex64;

fn main() -> harq_jscc::Result<()> {
    let grid = ResourceGrid::pucch_f2();
    let scs = 30e3;
    let truth = build_covariance(&PowerDelayProfile::tdl_c_300ns(), scs, &grid)?;
    let sampler = ChannelSampler::new(&truth)?;
    let (n_p, n_d) = (truth.n_pilot(), truth.n_data());
    let pilots = vec![Complex64::from(1.0); n_p];

    println!("{:>7} {:>14} {:>14} {:>14} {:>9}", "SNR dB", "LMMSE genie", "RMMSE 500ns", "flat", "NV est");
    for snr_db in [-6.0f64, -3.0, 0.0, 3.0] {
        let g = 10f64.powf(snr_db / 20.0);
        let snr = g * g;
        let mut mse = [0.0; 3];
        let mut nv_sum = 0.0;
        let trials = 4000;
        let mut rng = seeded(snr_db.to_bits());
        let (mut z, mut h) = (Vec::new(), Vec::new());
        for _ in 0..trials {
            sampler.sample_into(&mut rng, &mut z, &mut h);
            let y_p: Vec<Complex64> = h[..n_p].iter().map(|&x| x * g + complex_normal(&mut rng, 1.0)).collect();
            for (i, method) in [ChestMethod::LmmseGenie, ChestMethod::Rmmse, ChestMethod::Flat].into_iter().enumerate() {
                let model = ChestConfig { method, ..Default::default() }.model_covariance(&truth, &grid, scs)?;
                let est = ChannelEstimator::new(&model, snr, 1.0)?;
                let (mut hp, mut hd) = (Vec::new(), Vec::new());
                est.estimate_into(&y_p, &mut hp, &mut hd);
                mse[i] += hd.iter().zip(&h[n_p..]).map(|(e, x)| (e - x * g).norm_sqr()).sum::<f64>() / (n_d as f64 * snr);
                if method == ChestMethod::Rmmse {
                    nv_sum += estimate_nv(&[&y_p], &[&hp], &pilots);
                }
            }
        }
        let db = |v: f64| 10.0 * (v / trials as f64).log10();
        println!(
            "{snr_db:>7} {:>11.2} dB {:>11.2} dB {:>11.2} dB {:>9.3}",
            db(mse[0]),
            db(mse[1]),
            db(mse[2]),
            nv_sum / trials as f64
        );
    }
    println!("\n(MSE normalized by the channel gain; true NV is 1)");
    Ok(())
}
