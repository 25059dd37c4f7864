//! Scenario-driven BER sweep and SNR threshold, the same path the
//! `harq-lab run` command takes. The scenario is plain JSON.
//!
//!     cargo run --release --example snr_threshold_sweep

use harq_jscc::harness::{find_snr_th, Scenario, ScenarioConfig};

const SCENARIO: &str = r#"{
  "name": "entropy_uep_k11",
  "prior": { "p": 0.9, "rho": 0.0, "k": 11 },
  "shaping": { "scheme": "entropy" },
  "decoder": { "mode": "bitwise_uep", "uep_ratio": 0.1 },
  "sweep": { "start_db": -2.5, "stop_db": 0.0, "step_db": 0.5 },
  "budget": { "min_errors": 100 },
  "seed": 11
}"#;

fn main() -> harq_jscc::Result<()> {
    let cfg = ScenarioConfig::from_json(SCENARIO, "inline")?;
    let scenario = Scenario::new(cfg)?;
    let curve = scenario.run_sweep()?;
    println!("{:>7} {:>11} {:>11} {:>9}", "SNR dB", "BER ACK", "BER NACK", "trials");
    for p in &curve.points {
        println!("{:>7} {:>11.3e} {:>11.3e} {:>9}", p.snr_db, p.ack().ber, p.nack().ber, p.counts.trials);
    }
    let th = find_snr_th(&curve, &scenario.config.targets, scenario.shaping.max_alpha())?;
    println!(
        "SNR_th {:.2} dB (ACK {:.2}, NACK {:.2}); peak power {:.2} dB",
        th.snr_th, th.snr_ack, th.snr_nack, th.p_max
    );
    Ok(())
}
