//! CSV output of BER curves.

use std::io::{Read, Write};
use std::path::Path;

use super::engine::{BerCurve, BerPoint, Counts};
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 8] = ["snr_db", "ber_ack", "ber_ack_ci", "ber_nack", "ber_nack_ci", "ack_bits", "nack_bits", "trials"];

pub fn write_curve<W: Write>(curve: &BerCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for p in &curve.points {
        let (a, n) = (p.ack(), p.nack());
        w.write_record([
            p.snr_db.to_string(),
            a.ber.to_string(),
            a.ci.to_string(),
            n.ber.to_string(),
            n.ci.to_string(),
            p.counts.ack_bits.to_string(),
            p.counts.nack_bits.to_string(),
            p.counts.trials.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn save_curve(curve: &BerCurve, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_curve(curve, std::io::BufWriter::new(file))
}

/// Row of a curve CSV as read back.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub snr_db: f64,
    pub ber_ack: f64,
    pub ber_ack_ci: f64,
    pub ber_nack: f64,
    pub ber_nack_ci: f64,
    pub ack_bits: u64,
    pub nack_bits: u64,
    pub trials: u64,
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header != CSV_HEADER {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let f = |i: usize| -> Result<f64> {
            rec[i].trim().parse().map_err(|_| Error::Config(format!("row {}: bad number `{}`", line + 2, &rec[i])))
        };
        let u = |i: usize| -> Result<u64> {
            rec[i].trim().parse().map_err(|_| Error::Config(format!("row {}: bad count `{}`", line + 2, &rec[i])))
        };
        rows.push(CsvRow {
            snr_db: f(0)?,
            ber_ack: f(1)?,
            ber_ack_ci: f(2)?,
            ber_nack: f(3)?,
            ber_nack_ci: f(4)?,
            ack_bits: u(5)?,
            nack_bits: u(6)?,
            trials: u(7)?,
        });
    }
    Ok(rows)
}

pub fn load_rows(path: impl AsRef<Path>) -> Result<Vec<CsvRow>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_rows(file)
}

/// Rebuilds counts from a CSV, rounding `ber * bits` back to error counts.
pub fn curve_from_rows(name: &str, rows: &[CsvRow]) -> BerCurve {
    BerCurve {
        name: name.to_string(),
        points: rows
            .iter()
            .map(|r| BerPoint {
                snr_db: r.snr_db,
                counts: Counts {
                    ack_errors: (r.ber_ack * r.ack_bits as f64).round() as u64,
                    ack_bits: r.ack_bits,
                    nack_errors: (r.ber_nack * r.nack_bits as f64).round() as u64,
                    nack_bits: r.nack_bits,
                    trials: r.trials,
                },
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let curve = BerCurve {
            name: "x".into(),
            points: vec![BerPoint {
                snr_db: -1.5,
                counts: Counts {
                    ack_errors: 12,
                    ack_bits: 900,
                    nack_errors: 3,
                    nack_bits: 100,
                    trials: 250,
                },
            }],
        };
        let mut buf = Vec::new();
        write_curve(&curve, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("snr_db,ber_ack,ber_ack_ci,ber_nack,ber_nack_ci,ack_bits,nack_bits,trials\n"));
        let rows = read_rows(buf.as_slice()).unwrap();
        assert_eq!(curve_from_rows("x", &rows), curve);
    }
}
