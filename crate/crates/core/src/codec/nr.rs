//! NR short-block code (3 <= k <= 11) with QPSK mapping.

use std::path::Path;

use num_complex::Complex64;

use crate::{Error, Result};

const BUNDLED_GENERATOR: &str = include_str!("../../data/nr_generator_32x11.txt");

pub const GENERATOR_ROWS: usize = 32;
pub const GENERATOR_COLS: usize = 11;

/// The 32 x 11 basis sequences of the NR short-block code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NrGenerator {
    rows: Vec<[u8; GENERATOR_COLS]>,
}

impl NrGenerator {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_GENERATOR, "<bundled>").expect("bundled generator matrix is valid")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Plain text, one row of 11 binary digits per line. Blank lines and
    /// `#` comments are skipped.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let bad = |reason: String| Error::DataFile {
            path: origin.to_string(),
            reason,
        };
        let mut rows = Vec::with_capacity(GENERATOR_ROWS);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let digits: Vec<u8> = line
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    other => Err(bad(format!("line {}: unexpected character {other:?}", lineno + 1))),
                })
                .collect::<Result<_>>()?;
            let row: [u8; GENERATOR_COLS] = digits.try_into().map_err(|d: Vec<u8>| {
                bad(format!("line {}: expected {GENERATOR_COLS} digits, found {}", lineno + 1, d.len()))
            })?;
            rows.push(row);
        }
        if rows.len() != GENERATOR_ROWS {
            return Err(bad(format!("expected {GENERATOR_ROWS} rows, found {}", rows.len())));
        }
        Ok(Self { rows })
    }

    /// Coded bits `(G[0..n, 0..k] b) mod 2`.
    pub fn encode(&self, message: &[u8], n: usize) -> Result<Vec<u8>> {
        check_dims(message.len(), n)?;
        Ok(self.rows[..n]
            .iter()
            .map(|row| row.iter().zip(message).fold(0u8, |acc, (g, b)| acc ^ (g & b & 1)))
            .collect())
    }
}

fn check_dims(k: usize, n: usize) -> Result<()> {
    if !(3..=GENERATOR_COLS).contains(&k) {
        return Err(Error::InvalidParameter(format!("NR short-block code needs 3 <= k <= 11, got {k}")));
    }
    if n > GENERATOR_ROWS || n % 2 != 0 || n < k {
        return Err(Error::InvalidParameter(format!(
            "NR short-block code needs even n with k <= n <= 32, got n = {n}"
        )));
    }
    Ok(())
}

/// `(b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`.
pub fn qpsk_map(bits: &[u8]) -> Vec<Complex64> {
    debug_assert!(bits.len() % 2 == 0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    bits.chunks_exact(2)
        .map(|pair| {
            Complex64::new(
                s * (1.0 - 2.0 * f64::from(pair[0])),
                s * (1.0 - 2.0 * f64::from(pair[1])),
            )
        })
        .collect()
}

/// Encodes `message` (length `k`) with the bundled NR generator and maps
/// the coded bits to `n / 2` QPSK symbols.
pub fn nr_encode_modulate(message: &[u8], k: usize, n: usize) -> Result<Vec<Complex64>> {
    if message.len() != k {
        return Err(Error::InvalidParameter(format!(
            "message has {} bits, expected {k}",
            message.len()
        )));
    }
    let coded = NrGenerator::bundled().encode(message, n)?;
    Ok(qpsk_map(&coded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::message_bits;

    #[test]
    fn zero_message_maps_to_constant_symbol() {
        let s = nr_encode_modulate(&[0; 11], 11, 32).unwrap();
        let expected = Complex64::new(1.0, 1.0) / 2f64.sqrt();
        assert!(s.iter().all(|&x| (x - expected).norm() < 1e-15));
    }

    #[test]
    fn unit_message_is_generator_column() {
        let g = NrGenerator::bundled();
        for i in 0..11 {
            let mut msg = [0u8; 11];
            msg[i] = 1;
            let coded = g.encode(&msg, 32).unwrap();
            let column: Vec<u8> = g.rows.iter().map(|r| r[i]).collect();
            assert_eq!(coded, column);
            assert_eq!(nr_encode_modulate(&msg, 11, 32).unwrap(), qpsk_map(&column));
        }
    }

    #[test]
    fn all_ack_vs_all_nack_hamming_distance() {
        let g = NrGenerator::bundled();
        let ack = g.encode(&[1; 11], 32).unwrap();
        let nack = g.encode(&[0; 11], 32).unwrap();
        let dist = ack.iter().zip(&nack).filter(|(a, b)| a != b).count();
        assert_eq!(dist, 22);
    }

    #[test]
    fn symbols_have_unit_energy() {
        for m in [0usize, 5, 77, 2047] {
            let s = nr_encode_modulate(&message_bits(m, 11), 11, 32).unwrap();
            let energy: f64 = s.iter().map(|x| x.norm_sqr()).sum();
            assert!((energy - 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_errors() {
        assert!(nr_encode_modulate(&[0, 1], 2, 32).is_err());
        assert!(nr_encode_modulate(&[0; 4], 4, 34).is_err());
        assert!(nr_encode_modulate(&[0; 4], 4, 31).is_err());
        assert!(nr_encode_modulate(&[0; 4], 5, 32).is_err());
    }

    #[test]
    fn parse_rejects_malformed_files() {
        assert!(NrGenerator::parse("0101", "t").is_err());
        let mut text = BUNDLED_GENERATOR.replacen('1', "2", 1);
        assert!(NrGenerator::parse(&text, "t").is_err());
        text = BUNDLED_GENERATOR.lines().skip(1).collect::<Vec<_>>().join("\n");
        assert!(NrGenerator::parse(&text, "t").is_err());
    }
}
