//! The consequence matrix: rows span the degree-`n` multilinear part of the
//! T-ideal generated by a set of multilinear identities.
//!
//! Generation is recursive in the degree. Degree-`k` identities contribute
//! all their `S_k`-relabelings. A degree-`d` row `c` produces degree `d + 1`
//! rows by
//!
//! * left and right multiplication by the new variable `w = x_{d+1}`,
//! * substituting `x_i -> x_i w` and `x_i -> w x_i` for every variable,
//!
//! after which the new set is closed under `S_{d+1}`. Rows are deduplicated
//! up to sign at every step.
//!
//! The degree-`d` set is already `S_d`-stable and the moves above commute
//! with permutations fixing `w`, so the `S_{d+1}`-closure only needs the
//! coset representatives `id, (1 w), ..., (d w)`. This yields exactly the
//! same row set as closing under the full group.

use std::collections::HashSet;
use std::io::{self, Write};

use thiserror::Error;

use crate::identity_dsl::Identity;
use crate::modlinalg::{rank_mod_p, FieldError, PrimeField};
use crate::monomials::{
    dim_free, Monomial, MonomialBasis, MonomialError, MonomialIndex, Permutation, Var,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConsequenceError {
    #[error("identity {index} is not multilinear")]
    NotMultilinear { index: usize },
    #[error(
        "identity {index} has degree {identity_degree}, larger than the requested degree {degree}"
    )]
    DegreeTooSmall {
        index: usize,
        identity_degree: usize,
        degree: usize,
    },
    #[error(transparent)]
    Monomial(#[from] MonomialError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A sparse integer row: `(column, entry)` pairs sorted by column, entries
/// nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseRow {
    entries: Vec<(u32, i64)>,
}

impl SparseRow {
    /// Sorts, merges repeated columns and drops zeros.
    pub fn new(mut entries: Vec<(u32, i64)>) -> Self {
        entries.sort_unstable_by_key(|&(c, _)| c);
        let mut merged: Vec<(u32, i64)> = Vec::with_capacity(entries.len());
        for (c, e) in entries {
            match merged.last_mut() {
                Some((lc, le)) if *lc == c => *le += e,
                _ => merged.push((c, e)),
            }
        }
        merged.retain(|&(_, e)| e != 0);
        SparseRow { entries: merged }
    }

    pub fn entries(&self) -> &[(u32, i64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// The row or its negation, whichever has a positive first entry.
    pub fn sign_normalized(mut self) -> Self {
        if self.entries.first().is_some_and(|&(_, e)| e < 0) {
            for (_, e) in &mut self.entries {
                *e = -*e;
            }
        }
        self
    }

    pub fn negated(&self) -> Self {
        SparseRow {
            entries: self.entries.iter().map(|&(c, e)| (c, -e)).collect(),
        }
    }
}

/// Integer matrix with sparse rows, columns indexed by [`MonomialIndex`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseRowMatrix {
    degree: usize,
    n_cols: usize,
    rows: Vec<SparseRow>,
}

impl SparseRowMatrix {
    pub fn new(degree: usize, n_cols: usize, rows: Vec<SparseRow>) -> Self {
        debug_assert!(rows
            .iter()
            .all(|r| r.entries.iter().all(|&(c, _)| (c as usize) < n_cols)));
        SparseRowMatrix {
            degree,
            n_cols,
            rows,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(SparseRow::len).sum()
    }

    pub fn max_abs_entry(&self) -> u64 {
        self.rows
            .iter()
            .flat_map(|r| r.entries.iter())
            .map(|&(_, e)| e.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Writes the textual sparse-triple dump.
    pub fn write_dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "cols={} rows={} degree={}",
            self.n_cols,
            self.rows.len(),
            self.degree
        )?;
        for (i, row) in self.rows.iter().enumerate() {
            write!(w, "{i}")?;
            for &(c, e) in &row.entries {
                write!(w, " {c}:{e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

type Terms = Vec<(i64, Monomial)>;

fn encode(basis: &MonomialBasis, terms: &[(i64, Monomial)]) -> Result<SparseRow, MonomialError> {
    let entries = terms
        .iter()
        .map(|(c, m)| Ok((basis.index_of(m)?.0, *c)))
        .collect::<Result<Vec<_>, MonomialError>>()?;
    Ok(SparseRow::new(entries).sign_normalized())
}

fn decode(basis: &MonomialBasis, row: &SparseRow) -> Result<Terms, MonomialError> {
    row.entries
        .iter()
        .map(|&(c, e)| Ok((e, basis.monomial(MonomialIndex(c))?)))
        .collect()
}

/// Ordered, sign-insensitive deduplicating row set.
#[derive(Default)]
struct RowSet {
    seen: HashSet<SparseRow>,
    rows: Vec<SparseRow>,
}

impl RowSet {
    fn insert(&mut self, row: SparseRow) {
        if row.is_empty() {
            return;
        }
        if self.seen.insert(row.clone()) {
            self.rows.push(row);
        }
    }

    fn into_sorted(self) -> Vec<SparseRow> {
        let mut rows = self.rows;
        rows.sort_unstable();
        rows
    }
}

fn seed_rows(id: &Identity, basis: &MonomialBasis, out: &mut RowSet) -> Result<(), MonomialError> {
    for pi in Permutation::all(id.degree()) {
        let terms: Terms = id
            .terms()
            .iter()
            .map(|t| Ok((t.coeff, t.monomial.relabel(&pi)?)))
            .collect::<Result<_, MonomialError>>()?;
        out.insert(encode(basis, &terms)?);
    }
    Ok(())
}

/// Degree `d` to `d + 1` expansion followed by `S_{d+1}` closure.
fn step(
    rows: &[SparseRow],
    basis: &MonomialBasis,
    next: &MonomialBasis,
    out: &mut RowSet,
) -> Result<(), MonomialError> {
    let d = basis.degree();
    let w = (d + 1) as Var;
    let wm = Monomial::var(w)?;
    let cosets: Vec<Permutation> = std::iter::once(Permutation::identity(d + 1))
        .chain((1..=d).map(|j| Permutation::swap(d + 1, j as Var, w)))
        .collect();
    let mut emit = |terms: Terms| -> Result<(), MonomialError> {
        for tau in &cosets {
            let moved: Terms = terms
                .iter()
                .map(|(c, m)| Ok((*c, m.relabel(tau)?)))
                .collect::<Result<_, MonomialError>>()?;
            out.insert(encode(next, &moved)?);
        }
        Ok(())
    };
    for row in rows {
        let terms = decode(basis, row)?;
        emit(
            terms
                .iter()
                .map(|(c, m)| Ok((*c, wm.product(m)?)))
                .collect::<Result<_, MonomialError>>()?,
        )?;
        emit(
            terms
                .iter()
                .map(|(c, m)| Ok((*c, m.product(&wm)?)))
                .collect::<Result<_, MonomialError>>()?,
        )?;
        for v in 1..=d as Var {
            let vm = Monomial::var(v)?;
            for s in [vm.product(&wm)?, wm.product(&vm)?] {
                let replaced = terms
                    .iter()
                    .map(|(c, m)| {
                        let pos = m
                            .labels()
                            .iter()
                            .position(|&l| l == v)
                            .expect("multilinear term");
                        Ok((*c, m.substitute_at(pos, &s)?))
                    })
                    .collect::<Result<_, MonomialError>>()?;
                emit(replaced)?;
            }
        }
    }
    Ok(())
}

/// Consequence matrix of `ids` in degree `n`. Its row space is the degree-`n`
/// multilinear component of the T-ideal generated by `ids`, and
/// `dim P(n) = dim_free(n) - rank`.
///
/// Rows are deduplicated up to sign and sorted, so the result does not
/// depend on the order of `ids`.
pub fn expand_consequences(
    ids: &[Identity],
    n: usize,
) -> Result<SparseRowMatrix, ConsequenceError> {
    let n_cols = dim_free(n)? as usize;
    for (index, id) in ids.iter().enumerate() {
        if !id.is_multilinear() {
            return Err(ConsequenceError::NotMultilinear { index });
        }
        if id.degree() > n {
            return Err(ConsequenceError::DegreeTooSmall {
                index,
                identity_degree: id.degree(),
                degree: n,
            });
        }
    }
    let Some(start) = ids.iter().map(Identity::degree).min() else {
        return Ok(SparseRowMatrix::new(n, n_cols, Vec::new()));
    };

    let mut basis = MonomialBasis::new(start)?;
    let mut rows: Vec<SparseRow> = Vec::new();
    for d in start..=n {
        let mut set = RowSet::default();
        if d > start {
            let next = MonomialBasis::new(d)?;
            step(&rows, &basis, &next, &mut set)?;
            basis = next;
        }
        for id in ids.iter().filter(|id| id.degree() == d) {
            seed_rows(id, &basis, &mut set)?;
        }
        rows = set.into_sorted();
    }
    Ok(SparseRowMatrix::new(n, n_cols, rows))
}

/// `dim_free(n) - rank_p(M(n))`: an upper bound for the characteristic-zero
/// dimension, equal to it once certified.
pub fn operad_dim_mod_p(ids: &[Identity], n: usize, p: u64) -> Result<u64, ConsequenceError> {
    let field = PrimeField::new(p)?;
    let m = expand_consequences(ids, n)?;
    Ok(m.n_cols() as u64 - rank_mod_p(&m, &field) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity_dsl::{
        parse_identity, preset, ASSOCIATIVITY, LEFT_ALTERNATIVE, RIGHT_ALTERNATIVE,
    };

    const P: u64 = (1u64 << 63) - 25;

    fn ids(srcs: &[&str]) -> Vec<Identity> {
        srcs.iter().map(|s| parse_identity(s).unwrap()).collect()
    }

    #[test]
    fn degree_three_ranks() {
        let f = PrimeField::new(P).unwrap();
        let m = expand_consequences(&ids(&[RIGHT_ALTERNATIVE]), 3).unwrap();
        assert_eq!(m.n_cols(), 12);
        assert_eq!(rank_mod_p(&m, &f), 3);
        let m = expand_consequences(&ids(&[RIGHT_ALTERNATIVE, LEFT_ALTERNATIVE]), 3).unwrap();
        assert_eq!(rank_mod_p(&m, &f), 5);
    }

    #[test]
    fn associative_degree_four() {
        let m = expand_consequences(&ids(&[ASSOCIATIVITY]), 4).unwrap();
        assert_eq!(m.n_cols(), 120);
        assert_eq!(rank_mod_p(&m, &PrimeField::new(P).unwrap()), 96);
    }

    #[test]
    fn empty_identity_set_is_free() {
        let m = expand_consequences(&[], 4).unwrap();
        assert_eq!(m.n_rows(), 0);
        assert_eq!(operad_dim_mod_p(&[], 4, P).unwrap(), 120);
    }

    #[test]
    fn rejects_bad_input() {
        let raw = parse_identity("(x*y)*y = x*(y*y)").unwrap();
        assert_eq!(
            expand_consequences(&[raw], 4),
            Err(ConsequenceError::NotMultilinear { index: 0 })
        );
        assert!(matches!(
            expand_consequences(&ids(&[RIGHT_ALTERNATIVE]), 2),
            Err(ConsequenceError::DegreeTooSmall {
                identity_degree: 3,
                degree: 2,
                ..
            })
        ));
        assert!(operad_dim_mod_p(&ids(&[RIGHT_ALTERNATIVE]), 3, 15).is_err());
    }

    #[test]
    fn preset_rows_have_unit_entries_and_no_duplicates() {
        for name in ["right-alternative", "alternative", "dual-alternative"] {
            let m = expand_consequences(&preset(name).unwrap().identities, 4).unwrap();
            assert_eq!(m.max_abs_entry(), 1, "{name}");
            let mut seen = HashSet::new();
            for r in m.rows() {
                assert!(!r.is_empty());
                assert!(
                    seen.insert(r.clone()) && !seen.contains(&r.negated()),
                    "{name}: duplicate row"
                );
            }
        }
    }

    #[test]
    fn coset_closure_equals_full_closure() {
        // Close degree-4 rows under all of S_4 by brute force.
        let m3 = expand_consequences(&ids(&[RIGHT_ALTERNATIVE]), 3).unwrap();
        let m4 = expand_consequences(&ids(&[RIGHT_ALTERNATIVE]), 4).unwrap();
        let (b3, b4) = (
            MonomialBasis::new(3).unwrap(),
            MonomialBasis::new(4).unwrap(),
        );
        let mut full = RowSet::default();
        let wm = Monomial::var(4).unwrap();
        for row in m3.rows() {
            let terms = decode(&b3, row).unwrap();
            let mut images: Vec<Terms> = vec![
                terms
                    .iter()
                    .map(|(c, m)| (*c, wm.product(m).unwrap()))
                    .collect(),
                terms
                    .iter()
                    .map(|(c, m)| (*c, m.product(&wm).unwrap()))
                    .collect(),
            ];
            for v in 1..=3 {
                let vm = Monomial::var(v).unwrap();
                for s in [vm.product(&wm).unwrap(), wm.product(&vm).unwrap()] {
                    images.push(
                        terms
                            .iter()
                            .map(|(c, m)| (*c, m.substitute(v, &s).unwrap()))
                            .collect(),
                    );
                }
            }
            for t in images {
                for pi in Permutation::all(4) {
                    let moved: Terms = t
                        .iter()
                        .map(|(c, m)| (*c, m.relabel(&pi).unwrap()))
                        .collect();
                    full.insert(encode(&b4, &moved).unwrap());
                }
            }
        }
        assert_eq!(full.into_sorted(), m4.rows().to_vec());
    }

    #[test]
    fn dump_format() {
        let m = SparseRowMatrix::new(2, 2, vec![SparseRow::new(vec![(1, -1), (0, 1)])]);
        let mut out = Vec::new();
        m.write_dump(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "cols=2 rows=1 degree=2\n0 0:1 1:-1\n"
        );
    }
}
