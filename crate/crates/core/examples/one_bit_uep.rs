//! One bit over real AWGN: the UEP test is a threshold on y. Sweeping the
//! ratio trades NACK errors against ACK errors exactly as the Q-function
//! predicts.
//!
//!     cargo run --example one_bit_uep

use harq_jscc::receiver::one_bit_threshold;
use statrs::distribution::{ContinuousCDF, Normal};

fn main() {
    let (p0, p1, sigma2): (f64, f64, f64) = (1.0, 1.0, 0.5);
    let std = Normal::new(0.0, 1.0).unwrap();
    let q = |x: f64| std.sf(x);
    let s = sigma2.sqrt();
    println!("{:>8} {:>10} {:>12} {:>12}", "ratio", "threshold", "P(ACK|NACK)", "P(NACK|ACK)");
    for ratio in [1.0, 0.5, 0.1, 0.01] {
        let t = one_bit_threshold(p0, p1, sigma2, ratio);
        // NACK sent at -sqrt(P0) is missed when y > t; ACK at +sqrt(P1) is
        // flagged when y <= t.
        let miss_nack = q((t + p0.sqrt()) / s);
        let false_nack = q((p1.sqrt() - t) / s);
        println!("{ratio:>8} {t:>10.4} {miss_nack:>12.3e} {false_nack:>12.3e}");
    }
}
