//! Message prior, the NR baseline codebook and a few codebook diagnostics.
//!
//!     cargo run --example prior_and_codebook

use harq_jscc::codec::{cosine_similarity, Codebook};
use harq_jscc::prior::{all_ack, message_bits, MarkovPrior};

fn main() -> harq_jscc::Result<()> {
    let k = 4;
    for rho in [0.0, 0.5, 0.9] {
        let pi = MarkovPrior::new(0.9, rho, k)?.codeword_prior();
        let mut ranked: Vec<usize> = (0..pi.len()).collect();
        ranked.sort_by(|&a, &b| pi.prob(b).total_cmp(&pi.prob(a)));
        println!("p = 0.9, rho = {rho}: entropy {:.3} bits", pi.entropy());
        for &m in &ranked[..4] {
            println!("  {:?}  {:.4}", message_bits(m, k), pi.prob(m));
        }
    }

    let cb = Codebook::nr_baseline(k, 32)?;
    println!("\nNR codebook: {} codewords of {} QPSK symbols", cb.num_codewords(), cb.len_symbols());
    let ack = cb.real_row(all_ack(k));
    let worst = (0..cb.num_codewords() - 1)
        .map(|m| cosine_similarity(&ack, &cb.real_row(m)))
        .collect::<harq_jscc::Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    println!("largest cosine similarity to the all-ACK codeword: {worst:.3}");
    Ok(())
}
