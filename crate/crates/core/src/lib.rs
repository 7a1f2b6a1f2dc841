//! Dimension sequences of binary quadratic operads given by multilinear
//! identities, their quadratic duals, and the Ginzburg–Kapranov test on
//! truncated Poincaré series.
//!
//! The pipeline is: parse identities ([`identity_dsl`]), expand their
//! degree-`n` consequences into a sparse integer matrix ([`consequences`]),
//! take its rank modulo large primes ([`modlinalg`]), lift the modular ranks
//! to a certified characteristic-zero rank ([`certify`]), and feed the
//! resulting dimensions into exact power series ([`series`]). The quadratic
//! dual of a presentation is computed in [`dual`].

pub mod certify;
pub mod consequences;
pub mod dual;
pub mod identity_dsl;
pub mod modlinalg;
pub mod monomials;
pub mod series;

pub use certify::{
    certify_rank, certify_rank_with, is_prime_u63, select_primes, BoundBasis, RankCertificate,
    Verdict,
};
pub use consequences::{expand_consequences, operad_dim_mod_p, SparseRowMatrix};
pub use dual::{dual_relations, DualPresentation};
pub use identity_dsl::{
    linearize, parse_identities, parse_identity, preset, Identity, OperadPreset,
};
pub use modlinalg::{rank_mod_p, PrimeField};
pub use monomials::{
    dim_free, enumerate_shapes, Monomial, MonomialBasis, MonomialIndex, TreeShape,
};
pub use series::{gk_defect, poincare, TruncatedSeries};
