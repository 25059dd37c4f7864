use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::nr::{qpsk_map, NrGenerator};
use crate::prior::message_bits;
use crate::{Error, Result};

/// Norm tolerance for codebooks constructed in memory.
pub const NORM_TOL: f64 = 1e-9;
/// Norm tolerance for codebooks read from disk.
pub const FILE_NORM_TOL: f64 = 1e-6;

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookSource {
    NrBaseline,
    Loaded,
}

/// `2^k` complex codewords of `n / 2` symbols each, every one with squared
/// norm `n / 2`. Row `m` encodes message `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    k: usize,
    n: usize,
    token_count: usize,
    quantized: bool,
    source: CodebookSource,
    symbols: Vec<Complex64>,
    learnt_alpha: Option<Vec<f64>>,
}

/// On-disk representation. Rows are `[Re s_0, Im s_0, Re s_1, ...]`.
#[derive(Debug, Serialize, Deserialize)]
struct CodebookFile {
    version: u32,
    k: usize,
    n: usize,
    #[serde(rename = "A")]
    token_count: usize,
    quantized: bool,
    codewords: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<Vec<f64>>,
}

impl Codebook {
    /// Validates and wraps complex codewords, one row per message.
    pub fn from_symbols(
        k: usize,
        n: usize,
        token_count: usize,
        quantized: bool,
        source: CodebookSource,
        rows: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        Self::build(k, n, token_count, quantized, source, rows, NORM_TOL)
    }

    /// Same as [`Codebook::from_symbols`] with real-serialized rows.
    pub fn from_real_rows(
        k: usize,
        n: usize,
        token_count: usize,
        quantized: bool,
        rows: &[Vec<f64>],
    ) -> Result<Self> {
        let complex = real_rows_to_complex(n, rows)?;
        Self::build(k, n, token_count, quantized, CodebookSource::Loaded, complex, NORM_TOL)
    }

    fn build(
        k: usize,
        n: usize,
        token_count: usize,
        quantized: bool,
        source: CodebookSource,
        rows: Vec<Vec<Complex64>>,
        tol: f64,
    ) -> Result<Self> {
        if k == 0 || k > crate::prior::MAX_K {
            return Err(Error::InvalidCodebook(format!("k = {k} out of range")));
        }
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidCodebook(format!("n = {n} must be even and positive")));
        }
        if rows.len() != 1 << k {
            return Err(Error::InvalidCodebook(format!(
                "expected {} codewords for k = {k}, found {}",
                1 << k,
                rows.len()
            )));
        }
        let half = n / 2;
        let target = half as f64;
        let level = std::f64::consts::FRAC_1_SQRT_2;
        let mut symbols = Vec::with_capacity(half << k);
        for (m, row) in rows.into_iter().enumerate() {
            if row.len() != half {
                return Err(Error::InvalidCodebook(format!(
                    "codeword {m} has {} symbols, expected {half}",
                    row.len()
                )));
            }
            let norm: f64 = row.iter().map(|s| s.norm_sqr()).sum();
            if !norm.is_finite() || (norm - target).abs() > tol {
                return Err(Error::InvalidCodebook(format!(
                    "codeword {m} has squared norm {norm}, expected {target}"
                )));
            }
            if quantized
                && row
                    .iter()
                    .any(|s| (s.re.abs() - level).abs() > tol || (s.im.abs() - level).abs() > tol)
            {
                return Err(Error::InvalidCodebook(format!(
                    "codeword {m} is flagged quantized but is not QPSK"
                )));
            }
            symbols.extend(row);
        }
        Ok(Self {
            k,
            n,
            token_count,
            quantized,
            source,
            symbols,
            learnt_alpha: None,
        })
    }

    /// NR baseline codebook: every message through the bundled generator.
    pub fn nr_baseline(k: usize, n: usize) -> Result<Self> {
        let generator = NrGenerator::bundled();
        let rows = (0..1usize << k)
            .map(|m| generator.encode(&message_bits(m, k), n).map(|c| qpsk_map(&c)))
            .collect::<Result<Vec<_>>>()?;
        Self::build(k, n, 1, true, CodebookSource::NrBaseline, rows, NORM_TOL)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Complex symbols per codeword (`n / 2`).
    pub fn len_symbols(&self) -> usize {
        self.n / 2
    }

    pub fn num_codewords(&self) -> usize {
        1 << self.k
    }

    pub fn token_count(&self) -> usize {
        self.token_count
    }

    pub fn is_quantized(&self) -> bool {
        self.quantized
    }

    pub fn source(&self) -> CodebookSource {
        self.source
    }

    /// Per-codeword powers exported alongside a learnt-PS codebook.
    pub fn learnt_alpha(&self) -> Option<&[f64]> {
        self.learnt_alpha.as_deref()
    }

    pub fn codeword(&self, m: usize) -> &[Complex64] {
        let half = self.n / 2;
        &self.symbols[m * half..(m + 1) * half]
    }

    pub fn codewords(&self) -> impl Iterator<Item = &[Complex64]> {
        self.symbols.chunks_exact(self.n / 2)
    }

    /// `[Re s_0, Im s_0, Re s_1, ...]` of codeword `m`.
    pub fn real_row(&self, m: usize) -> Vec<f64> {
        self.codeword(m).iter().flat_map(|s| [s.re, s.im]).collect()
    }

    /// Codebook with row `m` taken from row `perm[m]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.num_codewords()];
        if perm.len() != seen.len() || perm.iter().any(|&p| p >= seen.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter("not a permutation of the message set".into()));
        }
        let mut out = self.clone();
        out.symbols = perm.iter().flat_map(|&p| self.codeword(p).iter().copied()).collect();
        out.learnt_alpha = self.learnt_alpha.as_ref().map(|a| perm.iter().map(|&p| a[p]).collect());
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CodebookFile {
            version: FORMAT_VERSION,
            k: self.k,
            n: self.n,
            token_count: self.token_count,
            quantized: self.quantized,
            codewords: (0..self.num_codewords()).map(|m| self.real_row(m)).collect(),
            alpha: self.learnt_alpha.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodebookFile = serde_json::from_str(text)?;
        if file.version != FORMAT_VERSION {
            return Err(Error::InvalidCodebook(format!(
                "unsupported codebook version {}",
                file.version
            )));
        }
        let rows = real_rows_to_complex(file.n, &file.codewords)?;
        let mut cb = Self::build(
            file.k,
            file.n,
            file.token_count,
            file.quantized,
            CodebookSource::Loaded,
            rows,
            FILE_NORM_TOL,
        )?;
        if let Some(alpha) = file.alpha {
            if alpha.len() != cb.num_codewords() {
                return Err(Error::InvalidCodebook(format!(
                    "alpha has {} entries, expected {}",
                    alpha.len(),
                    cb.num_codewords()
                )));
            }
            if alpha.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                return Err(Error::InvalidCodebook("alpha entries must be positive".into()));
            }
            cb.learnt_alpha = Some(alpha);
        }
        Ok(cb)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

fn real_rows_to_complex(n: usize, rows: &[Vec<f64>]) -> Result<Vec<Vec<Complex64>>> {
    rows.iter()
        .enumerate()
        .map(|(m, row)| {
            if row.len() != n || n % 2 != 0 {
                return Err(Error::InvalidCodebook(format!(
                    "codeword {m} has {} reals, expected {n}",
                    row.len()
                )));
            }
            Ok(row.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect())
        })
        .collect()
}

/// Reads and validates a codebook file.
pub fn load_codebook(path: impl AsRef<Path>) -> Result<Codebook> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Codebook::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::nr::nr_encode_modulate;

    #[test]
    fn nr_baseline_matches_encoder() {
        let cb = Codebook::nr_baseline(4, 32).unwrap();
        assert_eq!(cb.num_codewords(), 16);
        assert!(cb.is_quantized());
        for m in 0..16 {
            assert_eq!(cb.codeword(m), nr_encode_modulate(&message_bits(m, 4), 4, 32).unwrap().as_slice());
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let cb = Codebook::nr_baseline(6, 20).unwrap();
        let text = cb.to_json().unwrap();
        let back = Codebook::from_json(&text).unwrap();
        assert_eq!(back.symbols, cb.symbols);
        assert_eq!(back.to_json().unwrap(), text);
        assert_eq!(back.source(), CodebookSource::Loaded);
    }

    #[test]
    fn rejects_norm_violation() {
        let cb = Codebook::nr_baseline(3, 8).unwrap();
        let mut rows: Vec<Vec<f64>> = (0..8).map(|m| cb.real_row(m)).collect();
        // squared norm 2 * (n / 2)
        rows[3] = rows[3].iter().map(|x| x * 2f64.sqrt()).collect();
        let err = Codebook::from_real_rows(3, 8, 1, false, &rows).unwrap_err();
        assert!(matches!(err, Error::InvalidCodebook(_)), "{err}");
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let rows = vec![vec![1.0, 0.0]; 3];
        assert!(Codebook::from_real_rows(1, 2, 1, false, &rows).is_err());
        let rows = vec![vec![1.0, 0.0, 0.0]; 2];
        assert!(Codebook::from_real_rows(1, 2, 1, false, &rows).is_err());
        assert!(Codebook::from_json("{\"version\":2,\"k\":1,\"n\":2,\"A\":1,\"quantized\":false,\"codewords\":[[1,0],[-1,0]]}").is_err());
        assert!(Codebook::from_json("{not json").is_err());
    }

    #[test]
    fn rejects_unquantized_rows_flagged_quantized() {
        let rows = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        assert!(Codebook::from_real_rows(1, 2, 1, true, &rows).is_err());
        assert!(Codebook::from_real_rows(1, 2, 1, false, &rows).is_ok());
    }

    #[test]
    fn optional_alpha_is_read() {
        let text = "{\"version\":1,\"k\":1,\"n\":2,\"A\":1,\"quantized\":false,\"codewords\":[[1,0],[-1,0]],\"alpha\":[1.9,0.1]}";
        let cb = Codebook::from_json(text).unwrap();
        assert_eq!(cb.learnt_alpha(), Some(&[1.9, 0.1][..]));
        let bad = text.replace("1.9", "-1.9");
        assert!(Codebook::from_json(&bad).is_err());
    }
}
