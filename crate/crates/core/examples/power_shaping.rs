//! Per-codeword power factors for the shaping schemes.
//!
//!     cargo run --example power_shaping

use harq_jscc::codec::{power_shaping, ShapingScheme};
use harq_jscc::prior::{all_ack, MarkovPrior};

fn main() -> harq_jscc::Result<()> {
    let k = 4;
    let pi = MarkovPrior::new(0.9, 0.0, k)?.codeword_prior();
    let family: Vec<_> = [0.0, 0.5, 0.9]
        .iter()
        .map(|&rho| MarkovPrior::new(0.9, rho, k).map(|p| p.codeword_prior()))
        .collect::<harq_jscc::Result<_>>()?;

    let schemes = [
        ("uniform", ShapingScheme::Uniform),
        ("entropy", ShapingScheme::Entropy { floor: true }),
        ("arithmetic", ShapingScheme::Arithmetic { family, floor: true }),
        ("step 3 dB", ShapingScheme::Step { delta_db: 3.0 }),
    ];
    println!("{:<12} {:>10} {:>10} {:>10} {:>8}", "scheme", "all-ACK", "all-NACK", "max", "avg");
    for (name, scheme) in &schemes {
        let ps = power_shaping(scheme, &pi)?;
        println!(
            "{name:<12} {:>10.3} {:>10.3} {:>10.3} {:>8.3}",
            ps.alpha(all_ack(k)),
            ps.alpha(0),
            ps.max_alpha(),
            ps.average_power(&pi)
        );
    }
    // The average power is always one, so SNR_th is directly the average
    // transmit power; the peak costs 10 log10(max alpha) on top.
    let step = power_shaping(&ShapingScheme::Step { delta_db: 3.0 }, &pi)?;
    println!("\nstep peak-to-average: {:.2} dB", 10.0 * step.max_alpha().log10());
    Ok(())
}
