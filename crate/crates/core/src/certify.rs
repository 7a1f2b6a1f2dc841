//! Certified characteristic-zero ranks from modular ranks.
//!
//! For an integer matrix with entries in `{-1, 0, 1}` every nonzero `r x r`
//! minor is bounded by Hadamard's inequality, `|det| <= r^(r/2)`. If the rank
//! modulo each of the primes `p_1, ..., p_k` equals `r` and
//! `p_1 * ... * p_k > r^(r/2)`, the product of the nonzero Smith invariants
//! cannot vanish modulo all of them, so the rational rank is exactly `r`.
//! Primes are taken as large as possible (descending from `2^63`) to keep
//! the number of rank computations minimal.
//!
//! For consequence matrices the bound is by default evaluated at the
//! dimension of the quotient, `n_cols - r`, which is how operad dimensions
//! have traditionally been certified and needs far fewer primes.
//! [`BoundBasis::Rank`] evaluates it at the rank itself, which is what the
//! minor argument above strictly requires.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consequences::SparseRowMatrix;
use crate::modlinalg::{rank_mod_p, PrimeField};

/// Largest prime below `2^63`; always the first selected prime.
pub const PROBE_PRIME: u64 = (1 << 63) - 25;

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin; the first twelve prime bases are exact for
/// every 64-bit input.
pub fn is_prime_u63(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    for &q in &MR_BASES {
        if m.is_multiple_of(q) {
            return m == q;
        }
    }
    let mut d = m - 1;
    let s = d.trailing_zeros();
    d >>= s;
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Primes below `2^63` in descending order.
pub fn descending_primes() -> impl Iterator<Item = u64> {
    let mut next = (1u64 << 63) - 1;
    std::iter::from_fn(move || {
        while next > 2 {
            let c = next;
            next -= 2;
            if is_prime_u63(c) {
                return Some(c);
            }
        }
        None
    })
}

/// Exact test of `prod(primes) > r^(r/2)`, evaluated as
/// `prod(primes)^2 > r^r`. Rank 0 needs no primes and is always satisfied.
pub fn hadamard_bound_satisfied(primes: &[u64], r: u64) -> bool {
    if r == 0 {
        return true;
    }
    let product: BigUint = primes.iter().map(|&p| BigUint::from(p)).product();
    let lhs = &product * &product;
    let rhs = num_traits::pow(BigUint::from(r), r as usize);
    lhs > rhs
}

/// Shortest descending run of the largest primes below `2^63` whose product
/// exceeds `r^(r/2)`.
pub fn select_primes(r: u64) -> Vec<u64> {
    if r == 0 {
        return Vec::new();
    }
    let target = num_traits::pow(BigUint::from(r), r as usize);
    let mut product = BigUint::one();
    let mut primes = Vec::new();
    for p in descending_primes() {
        product *= p;
        primes.push(p);
        if &product * &product > target {
            break;
        }
    }
    primes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// All ranks agree and the prime product exceeds the Hadamard bound.
    Certified,
    /// Ranks disagree; `r` is still a valid characteristic-zero lower bound.
    LowerBoundOnly,
    Inconclusive,
}

/// Characteristic-zero rank certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub degree: usize,
    pub r: u64,
    pub primes: Vec<u64>,
    #[serde(rename = "ranks")]
    pub per_prime_ranks: Vec<u64>,
    #[serde(rename = "bound_ok")]
    pub bound_satisfied: bool,
    pub verdict: Verdict,
    pub timings_ms: Vec<u64>,
}

/// Size at which the bound `s^(s/2)` is evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundBasis {
    /// `s = n_cols - r`, the dimension of the quotient.
    #[default]
    Dimension,
    /// `s = r`.
    Rank,
}

impl BoundBasis {
    /// Bound parameter for candidate rank `r`; never below 1 so that a
    /// nonzero rank is always checked against at least one prime.
    pub fn size(self, n_cols: u64, r: u64) -> u64 {
        match self {
            BoundBasis::Dimension => n_cols.saturating_sub(r).max(1),
            BoundBasis::Rank => r.max(1),
        }
    }
}

/// Rank of the matrix modulo one prime, with the time it took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeRank {
    pub rank: u64,
    pub millis: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("matrix entry of absolute value {0} found; the Hadamard bound r^(r/2) only covers entries in {{-1, 0, 1}}")]
    EntriesNotUnit(u64),
}

/// Certifies the rank of `m` with the default bound basis, computing one
/// rank per prime sequentially or on the current rayon pool.
pub fn certify_rank(m: &SparseRowMatrix) -> Result<RankCertificate, CertifyError> {
    certify_rank_with(m, BoundBasis::default())
}

pub fn certify_rank_with(
    m: &SparseRowMatrix,
    basis: BoundBasis,
) -> Result<RankCertificate, CertifyError> {
    let max = m.max_abs_entry();
    if max > 1 {
        return Err(CertifyError::EntriesNotUnit(max));
    }
    let cert = certify_with(m.degree(), m.n_cols() as u64, basis, |p| {
        let start = std::time::Instant::now();
        let field = PrimeField::new(p).expect("selected primes are prime");
        let rank = rank_mod_p(m, &field) as u64;
        Ok::<_, std::convert::Infallible>(PrimeRank {
            rank,
            millis: start.elapsed().as_millis() as u64,
        })
    });
    Ok(cert.unwrap_or_else(|e| match e {}))
}

/// Certification driven by an arbitrary rank source (used by the CLI to
/// serve ranks from its cache). `rank_of` must be safe to call concurrently
/// for different primes; results are assembled in prime order.
pub fn certify_with<F, E>(
    degree: usize,
    n_cols: u64,
    basis: BoundBasis,
    rank_of: F,
) -> Result<RankCertificate, E>
where
    F: Fn(u64) -> Result<PrimeRank, E> + Sync,
    E: Send,
{
    let mut known: HashMap<u64, PrimeRank> = HashMap::new();
    let probe = rank_of(PROBE_PRIME)?;
    known.insert(PROBE_PRIME, probe);
    if probe.rank == 0 {
        return Ok(RankCertificate {
            degree,
            r: 0,
            primes: Vec::new(),
            per_prime_ranks: Vec::new(),
            bound_satisfied: true,
            verdict: Verdict::Certified,
            timings_ms: Vec::new(),
        });
    }

    let mut r = probe.rank;
    let mut primes = Vec::new();
    for round in 0..2 {
        primes = select_primes(basis.size(n_cols, r));
        let missing: Vec<u64> = primes
            .iter()
            .copied()
            .filter(|p| !known.contains_key(p))
            .collect();
        let computed = missing
            .par_iter()
            .map(|&p| rank_of(p).map(|pr| (p, pr)))
            .collect::<Result<Vec<_>, E>>()?;
        known.extend(computed);
        let observed = primes.iter().map(|p| known[p].rank).max().unwrap_or(0);
        if primes.iter().all(|p| known[p].rank == r) {
            break;
        }
        r = r.max(observed);
        if round == 1 {
            break;
        }
    }

    let per_prime_ranks: Vec<u64> = primes.iter().map(|p| known[p].rank).collect();
    let timings_ms = primes.iter().map(|p| known[p].millis).collect();
    r = r.max(per_prime_ranks.iter().copied().max().unwrap_or(0));
    let bound_satisfied = hadamard_bound_satisfied(&primes, basis.size(n_cols, r));
    let agree = per_prime_ranks.iter().all(|&k| k == r);
    let verdict = match (agree, bound_satisfied) {
        (true, true) => Verdict::Certified,
        (false, true) => Verdict::LowerBoundOnly,
        _ => Verdict::Inconclusive,
    };
    Ok(RankCertificate {
        degree,
        r,
        primes,
        per_prime_ranks,
        bound_satisfied,
        verdict,
        timings_ms,
    })
}
