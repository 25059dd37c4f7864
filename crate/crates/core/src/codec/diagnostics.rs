//! Codebook diagnostics: cosine similarity, token-permutation symmetry and
//! prior-preserving scrambling.

use rand::seq::SliceRandom;

use super::Codebook;
use crate::prior::{all_ack, CodewordPrior};
use crate::{rng, Error, Result};

/// `a . b / (|a| |b|)` over real vectors.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameter("vectors differ in length".into()));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::InvalidParameter("cosine similarity of a zero vector".into()));
    }
    Ok(dot / (na * nb))
}

/// Cosine similarity of the all-ACK and all-NACK codewords.
pub fn ack_nack_similarity(cb: &Codebook) -> f64 {
    cosine_similarity(&cb.real_row(all_ack(cb.k())), &cb.real_row(0))
        .expect("codewords have nonzero norm")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryViolation {
    pub message: usize,
    /// New token `j` is old token `permutation[j]`.
    pub permutation: Vec<usize>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymmetryReport {
    pub checked: usize,
    pub violations: Vec<SymmetryViolation>,
}

impl SymmetryReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const SYMMETRY_TOL: f64 = 1e-6;

struct TokenLayout {
    k: usize,
    tokens: usize,
    token_bits: usize,
    group_len: usize,
}

impl TokenLayout {
    fn new(cb: &Codebook, tokens: usize) -> Result<Self> {
        let k = cb.k();
        if tokens == 0 || tokens > k {
            return Err(Error::InvalidParameter(format!("token count {tokens} invalid for k = {k}")));
        }
        if cb.n() % tokens != 0 {
            return Err(Error::InvalidParameter(format!(
                "n = {} does not split into {tokens} output groups",
                cb.n()
            )));
        }
        Ok(Self {
            k,
            tokens,
            token_bits: k.div_ceil(tokens),
            group_len: cb.n() / tokens,
        })
    }

    /// Applies a token permutation to message `m`. Returns `None` when the
    /// permuted sequence would put a message bit into the zero padding.
    fn permute_message(&self, m: usize, perm: &[usize]) -> Option<usize> {
        let padded = self.tokens * self.token_bits;
        let bits: Vec<u8> = (0..padded)
            .map(|i| if i < self.k { crate::prior::bit(m, i, self.k) } else { 0 })
            .collect();
        let mut out = Vec::with_capacity(padded);
        for &src in perm {
            out.extend_from_slice(&bits[src * self.token_bits..(src + 1) * self.token_bits]);
        }
        if out[self.k..].iter().any(|&b| b != 0) {
            return None;
        }
        Some(crate::prior::message_index(&out[..self.k]))
    }

    fn permute_groups(&self, row: &[f64], perm: &[usize]) -> Vec<f64> {
        perm.iter()
            .flat_map(|&src| row[src * self.group_len..(src + 1) * self.group_len].iter().copied())
            .collect()
    }
}

/// Checks `codeword(P x) == P codeword(x)` for one token permutation over
/// every message.
pub fn check_token_permutation(cb: &Codebook, tokens: usize, perm: &[usize]) -> Result<SymmetryReport> {
    let layout = TokenLayout::new(cb, tokens)?;
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..tokens).collect::<Vec<_>>() {
        return Err(Error::InvalidParameter("not a permutation of the tokens".into()));
    }
    let mut report = SymmetryReport::default();
    for m in 0..cb.num_codewords() {
        let Some(target) = layout.permute_message(m, perm) else {
            continue;
        };
        let expected = layout.permute_groups(&cb.real_row(m), perm);
        let actual = cb.real_row(target);
        let dev = expected
            .iter()
            .zip(&actual)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        report.checked += 1;
        if dev > SYMMETRY_TOL {
            report.violations.push(SymmetryViolation {
                message: m,
                permutation: perm.to_vec(),
                max_deviation: dev,
            });
        }
    }
    Ok(report)
}

/// Group permutation symmetry check. Up to six tokens every permutation is
/// tried; beyond that the adjacent transpositions are checked, which
/// generate the whole symmetric group.
pub fn permutation_symmetry_check(cb: &Codebook, tokens: usize) -> Result<SymmetryReport> {
    let perms: Vec<Vec<usize>> = if tokens <= 6 {
        all_permutations(tokens)
    } else {
        (0..tokens - 1)
            .map(|a| {
                let mut p: Vec<usize> = (0..tokens).collect();
                p.swap(a, a + 1);
                p
            })
            .collect()
    };
    let mut report = SymmetryReport::default();
    for perm in perms {
        let r = check_token_permutation(cb, tokens, &perm)?;
        report.checked += r.checked;
        report.violations.extend(r.violations);
    }
    Ok(report)
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Random message-to-codeword scrambling that only mixes messages with
/// equal prior probability. `perm[m]` is the codeword row used by message `m`.
pub fn equal_prior_scrambling(prior: &CodewordPrior, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..prior.len()).collect();
    order.sort_by(|&a, &b| prior.prob(a).total_cmp(&prior.prob(b)).then(a.cmp(&b)));
    let mut perm: Vec<usize> = (0..prior.len()).collect();
    let mut rng = rng::seeded(seed);
    let mut start = 0;
    while start < order.len() {
        let p = prior.prob(order[start]);
        let mut end = start + 1;
        while end < order.len() && same_prior(prior.prob(order[end]), p) {
            end += 1;
        }
        let class = &order[start..end];
        let mut targets = class.to_vec();
        targets.shuffle(&mut rng);
        for (&m, &t) in class.iter().zip(&targets) {
            perm[m] = t;
        }
        start = end;
    }
    perm
}

fn same_prior(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// True when every message is only mapped onto a codeword of equal prior.
pub fn scrambling_preserves_prior(prior: &CodewordPrior, perm: &[usize]) -> bool {
    perm.len() == prior.len() && perm.iter().enumerate().all(|(m, &t)| same_prior(prior.prob(m), prior.prob(t)))
}
