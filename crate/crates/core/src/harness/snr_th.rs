//! SNR threshold search on a BER curve.

use serde::Serialize;

use super::engine::{BerCurve, BerPoint, RateEstimate};
use super::config::Targets;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrThResult {
    pub snr_ack: f64,
    pub snr_nack: f64,
    pub snr_th: f64,
    /// Average transmit power at the threshold, dB.
    pub p_ave: f64,
    /// Peak power `snr_th + 10 log10(max alpha)`, dB.
    pub p_max: f64,
    /// ACK/NACK target already met at the first sweep point; the matching
    /// crossing is then only an upper bound.
    pub below_sweep: [bool; 2],
}

/// Smallest SNR with BER at or below `target`, interpolating log10(BER)
/// linearly in dB between the bracketing points.
pub fn crossing(points: &[(f64, f64)], target: f64, what: &str) -> Result<f64> {
    let i = points
        .iter()
        .position(|&(_, ber)| ber <= target)
        .ok_or_else(|| Error::NotBracketed(format!("{what} target {target:e} not reached by the sweep")))?;
    if i == 0 {
        return Err(Error::NotBracketed(format!(
            "{what} target {target:e} already met at the first point ({} dB)",
            points[0].0
        )));
    }
    let (x0, b0) = points[i - 1];
    let (x1, b1) = points[i];
    if b1 <= 0.0 {
        // no errors observed at the upper point: interpolate the BER itself
        return Ok(x0 + (x1 - x0) * (b0 - target) / (b0 - b1));
    }
    let (l0, l1, lt) = (b0.log10(), b1.log10(), target.log10());
    if l0 == l1 {
        return Ok(x1);
    }
    Ok(x0 + (x1 - x0) * (l0 - lt) / (l0 - l1))
}

/// Fails if a BER rises between consecutive points by more than the sum of
/// their CI half-widths.
pub fn check_monotone(curve: &BerCurve) -> Result<()> {
    let check = |f: fn(&BerPoint) -> RateEstimate, what: &str| -> Result<()> {
        for w in curve.points.windows(2) {
            let (a, b) = (f(&w[0]), f(&w[1]));
            if a.zero_exposure || b.zero_exposure {
                continue;
            }
            if b.ber > a.ber + a.ci + b.ci {
                return Err(Error::NonMonotone(format!(
                    "{what} BER rises from {:e} at {} dB to {:e} at {} dB",
                    a.ber, w[0].snr_db, b.ber, w[1].snr_db
                )));
            }
        }
        Ok(())
    };
    check(BerPoint::ack, "ACK")?;
    check(BerPoint::nack, "NACK")
}

/// `max_alpha` is the largest per-codeword power factor of the scheme.
pub fn find_snr_th(curve: &BerCurve, targets: &Targets, max_alpha: f64) -> Result<SnrThResult> {
    check_monotone(curve)?;
    let ack: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.snr_db, p.ack().ber)).collect();
    let nack: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.snr_db, p.nack().ber)).collect();
    let first = curve.points.first().map_or(f64::NAN, |p| p.snr_db);
    // A class that is already fine at the first point does not matter as long
    // as the other one crosses strictly inside the sweep.
    let bounded = |r: Result<f64>| match r {
        Err(Error::NotBracketed(m)) if m.contains("already met") => Ok((first, true)),
        other => other.map(|x| (x, false)),
    };
    let (snr_ack, ack_low) = bounded(crossing(&ack, targets.ber_ack, "ACK"))?;
    let (snr_nack, nack_low) = bounded(crossing(&nack, targets.ber_nack, "NACK"))?;
    if ack_low && nack_low {
        return Err(Error::NotBracketed(format!("both targets already met at the first point ({first} dB)")));
    }
    let snr_th = snr_ack.max(snr_nack);
    Ok(SnrThResult {
        snr_ack,
        snr_nack,
        snr_th,
        p_ave: snr_th,
        p_max: snr_th + 10.0 * max_alpha.log10(),
        below_sweep: [ack_low, nack_low],
    })
}
