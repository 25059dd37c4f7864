//! Operation count of the low-complexity receiver against its
//! `8 * 2^k * (N_r n + k)` budget.
//!
//!     cargo run --release --example low_complexity_ops

use harq_jscc::channel::{transmit_simo, FadingCovariance};
use harq_jscc::codec::{Codebook, PowerShaping};
use harq_jscc::prior::MarkovPrior;
use harq_jscc::receiver::{ChannelEstimator, Counting, FadingScratch, LowComplexityReceiver};
use harq_jscc::rng::seeded;

fn main() -> harq_jscc::Result<()> {
    let n = 32;
    let cov = FadingCovariance::flat(24, 8);
    println!("{:>3} {:>3} {:>10} {:>10}", "k", "N_r", "ops", "budget");
    for k in [3usize, 4, 7, 11] {
        for n_r in [1usize, 4] {
            let cb = Codebook::nr_baseline(k, n)?;
            let pi = MarkovPrior::new(0.9, 0.0, k)?.codeword_prior();
            let ps = PowerShaping::uniform(cb.num_codewords());
            let rx = LowComplexityReceiver::new(&cb, &ps, ChannelEstimator::new(&cov, 1.0, 1.0)?, 1.0)?;
            let y = transmit_simo(&ps.hypothesis(cb.codeword(0), 0), &cov, n_r, 1.0, 1.0, 1.0, &mut seeded(1))?;
            let mut counter = Counting::default();
            let mut scores = vec![(0.0, 0.0); k];
            rx.bit_scores_counted(&y, 1.0, &pi.log_probs(), &mut FadingScratch::default(), &mut Vec::new(), &mut scores, &mut counter);
            let budget = 8 * (1u64 << k) * (n_r * n + k) as u64;
            println!("{k:>3} {n_r:>3} {:>10} {budget:>10}", counter.0);
        }
    }
    Ok(())
}
