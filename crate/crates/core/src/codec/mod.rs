//! Codebooks, modulation and per-codeword power shaping.

mod codebook;
pub mod diagnostics;
pub mod nr;
mod shaping;

pub use codebook::{load_codebook, Codebook, CodebookSource, FILE_NORM_TOL, NORM_TOL};
pub use diagnostics::{cosine_similarity, permutation_symmetry_check, SymmetryReport};
pub use nr::{nr_encode_modulate, qpsk_map, NrGenerator};
pub use shaping::{power_shaping, Hypothesis, PilotMode, PowerShaping, ShapingScheme, PROBABILITY_FLOOR};
