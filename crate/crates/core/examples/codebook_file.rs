//! Loading a codebook file written by the trainer, validating it and
//! running the structural diagnostics on it.
//!
//!     cargo run --example codebook_file [path/to/codebook.json]

use harq_jscc::codec::diagnostics::{ack_nack_similarity, equal_prior_scrambling, scrambling_preserves_prior};
use harq_jscc::codec::{load_codebook, permutation_symmetry_check};
use harq_jscc::prior::MarkovPrior;

fn main() -> harq_jscc::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/toy_k4_a2.json").to_string());
    let cb = load_codebook(&path)?;
    println!(
        "{path}: k = {}, n = {}, A = {}, quantized = {}",
        cb.k(),
        cb.n(),
        cb.token_count(),
        cb.is_quantized()
    );
    println!("all-ACK vs all-NACK cosine similarity: {:.3}", ack_nack_similarity(&cb));

    let report = permutation_symmetry_check(&cb, cb.token_count())?;
    println!(
        "token permutation symmetry: {} checks, {} violations",
        report.checked,
        report.violations.len()
    );

    // Message relabelling that keeps the prior intact, e.g. to check a
    // result does not hinge on which codeword a message got.
    let pi = MarkovPrior::new(0.9, 0.0, cb.k())?.codeword_prior();
    let perm = equal_prior_scrambling(&pi, 5);
    let scrambled = cb.permuted(&perm)?;
    println!(
        "scrambled codebook keeps the prior: {}, all-ACK codeword unchanged: {}",
        scrambling_preserves_prior(&pi, &perm),
        scrambled.codeword(cb.num_codewords() - 1) == cb.codeword(cb.num_codewords() - 1)
    );
    Ok(())
}
