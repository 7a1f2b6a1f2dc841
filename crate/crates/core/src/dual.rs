//! Quadratic duals of binary operads presented by degree-3 identities.
//!
//! The arity-3 space of the free operad has the 12 monomials of
//! [`MonomialBasis`] of degree 3. The dual relation space is the orthogonal
//! complement of the relation space under the diagonal form that pairs a
//! monomial with itself to `sgn(σ)` on the `(ab)c` shape and `-sgn(σ)` on
//! the `a(bc)` shape, where `σ` is the label word. Under this form the
//! associative operad is self-dual.
//!
//! All arithmetic is exact over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::identity_dsl::{Identity, IdentityError, ASSOCIATIVITY};
use crate::monomials::{
    Monomial, MonomialBasis, MonomialError, MonomialIndex, Permutation, ShapeView,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualError {
    #[error("expected a multilinear degree-3 monomial or identity")]
    NotDegreeThree,
    #[error(transparent)]
    Monomial(#[from] MonomialError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
}

const DIM: usize = 12;

fn basis3() -> MonomialBasis {
    MonomialBasis::new(3).expect("degree 3 basis")
}

/// Pairing of two degree-3 multilinear monomials.
pub fn pairing(m1: &Monomial, m2: &Monomial) -> Result<i64, DualError> {
    for m in [m1, m2] {
        if m.degree() != 3 || !m.is_multilinear() {
            return Err(DualError::NotDegreeThree);
        }
    }
    if m1 != m2 {
        return Ok(0);
    }
    let sign = Permutation::new(m1.labels().to_vec())?.sign();
    Ok(match m1.shape().view() {
        ShapeView::Node(l, _) if l.leaf_count() == 2 => sign,
        _ => -sign,
    })
}

fn pairing_diagonal() -> Vec<i64> {
    let basis = basis3();
    basis
        .iter()
        .map(|m| pairing(&m, &m).expect("degree 3"))
        .collect()
}

type Vector = Vec<BigRational>;

/// Reduced row echelon form; returns the nonzero rows and their pivots.
fn rref(mut rows: Vec<Vector>) -> (Vec<Vector>, Vec<usize>) {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..width {
        let Some(found) = (top..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(top, found);
        let inv = rows[top][col].recip();
        for x in rows[top].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != top && !rows[i][col].is_zero() {
                let factor = rows[i][col].clone();
                let pivot_row = rows[top].clone();
                for (x, y) in rows[i].iter_mut().zip(pivot_row.iter()) {
                    *x = &*x - &factor * y;
                }
            }
        }
        pivots.push(col);
        top += 1;
    }
    rows.truncate(top);
    (rows, pivots)
}

/// Subspace of the arity-3 space (or of a quotient of it), stored in reduced
/// row echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSpace {
    width: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl RelationSpace {
    pub fn span(width: usize, vectors: Vec<Vector>) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == width));
        let (basis, pivots) = rref(vectors);
        RelationSpace {
            width,
            basis,
            pivots,
        }
    }

    pub fn from_integer_vectors(width: usize, vectors: &[Vec<i64>]) -> Self {
        Self::span(
            width,
            vectors
                .iter()
                .map(|v| {
                    v.iter()
                        .map(|&x| BigRational::from_integer(x.into()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn full(width: usize) -> Self {
        Self::span(width, (0..width).map(|i| unit(width, i)).collect())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        let mut v = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let factor = v[p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    *x = &*x - &factor * y;
                }
            }
        }
        v.iter().all(Zero::is_zero)
    }

    pub fn contains_space(&self, other: &RelationSpace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &RelationSpace) -> RelationSpace {
        Self::span(
            self.width,
            self.basis
                .iter()
                .chain(other.basis.iter())
                .cloned()
                .collect(),
        )
    }

    /// Basis vectors scaled to primitive integer vectors.
    pub fn integer_basis(&self) -> Vec<Vec<i64>> {
        self.basis.iter().map(|v| primitive(v)).collect()
    }
}

fn unit(width: usize, i: usize) -> Vector {
    (0..width)
        .map(|j| {
            if i == j {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect()
}

fn primitive(v: &[BigRational]) -> Vec<i64> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.iter()
        .map(|x| {
            if g.is_zero() {
                0
            } else {
                (x / &g).to_i64().expect("small coefficients")
            }
        })
        .collect()
}

fn identity_vector(basis: &MonomialBasis, id: &Identity) -> Result<Vector, DualError> {
    let mut v = vec![BigRational::zero(); DIM];
    for t in id.terms() {
        let i = basis.index_of(&t.monomial)?.0 as usize;
        v[i] += BigRational::from_integer(t.coeff.into());
    }
    Ok(v)
}

/// Span of all `S_3`-relabelings of the given degree-3 identities.
pub fn relation_space(ids: &[Identity]) -> Result<RelationSpace, DualError> {
    let basis = basis3();
    let mut vectors = Vec::new();
    for id in ids {
        if id.degree() != 3 || !id.is_multilinear() {
            return Err(DualError::NotDegreeThree);
        }
        for pi in Permutation::all(3) {
            vectors.push(identity_vector(&basis, &id.relabel(&pi)?)?);
        }
    }
    Ok(RelationSpace::span(DIM, vectors))
}

/// Orthogonal complement under the pairing.
pub fn annihilator(space: &RelationSpace) -> RelationSpace {
    let eps = pairing_diagonal();
    let weighted: Vec<Vector> = space
        .basis
        .iter()
        .map(|v| {
            v.iter()
                .zip(&eps)
                .map(|(x, &e)| x * BigRational::from_integer(e.into()))
                .collect()
        })
        .collect();
    let (rows, pivots) = rref(weighted);
    let mut kernel = Vec::new();
    for free in (0..DIM).filter(|c| !pivots.contains(c)) {
        let mut v = unit(DIM, free);
        for (row, &p) in rows.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        kernel.push(v);
    }
    RelationSpace::span(DIM, kernel)
}

/// Presentation of a dual operad.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPresentation {
    /// Associativity holds in the dual and is factored out of `identities`.
    pub associative: bool,
    /// Further relations; left-normed when `associative` is set.
    pub identities: Vec<Identity>,
}

impl DualPresentation {
    /// Identities to feed to the consequence engine (associativity first).
    pub fn engine_identities(&self) -> Result<Vec<Identity>, DualError> {
        let mut out = Vec::new();
        if self.associative {
            out.push(crate::identity_dsl::parse_identity(ASSOCIATIVITY)?);
        }
        out.extend(self.identities.iter().cloned());
        Ok(out)
    }
}

impl fmt::Display for DualPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.associative {
            parts.push("associative".into());
        }
        parts.extend(self.identities.iter().map(|id| id.to_string()));
        if parts.is_empty() {
            return f.write_str("free (no relations)");
        }
        f.write_str(&parts.join("; "))
    }
}

/// The six label words of `S_3` in lexicographic order.
fn words() -> Vec<Vec<u8>> {
    Permutation::all(3)
        .into_iter()
        .map(|p| p.images().to_vec())
        .collect()
}

/// Sends a 12-vector to the 6-dimensional quotient by associativity, where
/// both shapes with the same label word are identified.
fn to_associative_quotient(basis: &MonomialBasis, v: &[BigRational]) -> Vector {
    let ws = words();
    let mut out = vec![BigRational::zero(); ws.len()];
    for (i, x) in v.iter().enumerate() {
        let m = basis.monomial(MonomialIndex(i as u32)).expect("index < 12");
        let w = ws
            .iter()
            .position(|w| w.as_slice() == m.labels())
            .expect("permutation word");
        out[w] += x;
    }
    out
}

/// Candidate generators: `±1` vectors by increasing support, supports in
/// lexicographic order, first coefficient `+1`.
fn candidates(width: usize, max_support: usize) -> Vec<Vec<i64>> {
    fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            subsets(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for k in 1..=max_support.min(width) {
        let mut supports = Vec::new();
        subsets(width, k, 0, &mut Vec::new(), &mut supports);
        for s in supports {
            for signs in 0..1u32 << (k - 1) {
                let mut v = vec![0i64; width];
                v[s[0]] = 1;
                for (j, &i) in s.iter().enumerate().skip(1) {
                    v[i] = if signs >> (j - 1) & 1 == 1 { -1 } else { 1 };
                }
                out.push(v);
            }
        }
    }
    out
}

/// Greedy choice of short generators whose `S_3`-orbits span `target`.
fn short_generators(
    target: &RelationSpace,
    orbit: impl Fn(&[i64]) -> RelationSpace,
    max_support: usize,
) -> Vec<Vec<i64>> {
    let width = target.width();
    let mut chosen = Vec::new();
    let mut spanned = RelationSpace::span(width, Vec::new());
    let fallback = target.integer_basis();
    for c in candidates(width, max_support).into_iter().chain(fallback) {
        if spanned.dim() == target.dim() {
            break;
        }
        let q: Vector = c
            .iter()
            .map(|&x| BigRational::from_integer(x.into()))
            .collect();
        if target.contains(&q) && !spanned.contains(&q) {
            spanned = spanned.sum(&orbit(&c));
            chosen.push(c);
        }
    }
    chosen
}

fn names_xyz() -> Vec<String> {
    ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
}

/// A generating set for the dual relations of a degree-3 presentation.
///
/// When associativity lies in the dual relation space it is reported as a
/// flag and the remaining relations are given in left-normed form, as the
/// shortest `±1` combinations whose `S_3`-orbits generate the rest.
pub fn dual_relations(ids: &[Identity]) -> Result<DualPresentation, DualError> {
    let perp = annihilator(&relation_space(ids)?);
    let assoc = relation_space(&[crate::identity_dsl::parse_identity(ASSOCIATIVITY)?])?;
    let basis = basis3();

    if perp.contains_space(&assoc) {
        let ws = words();
        let quotient = RelationSpace::span(
            ws.len(),
            perp.basis
                .iter()
                .map(|v| to_associative_quotient(&basis, v))
                .collect(),
        );
        let left_normed = |word: &[u8]| -> Monomial {
            let m = Monomial::var(word[0]).unwrap();
            m.product(&Monomial::var(word[1]).unwrap())
                .unwrap()
                .product(&Monomial::var(word[2]).unwrap())
                .unwrap()
        };
        let orbit = |c: &[i64]| {
            let vs = Permutation::all(3)
                .iter()
                .map(|pi| {
                    let mut v = vec![BigRational::zero(); ws.len()];
                    for (i, &x) in c.iter().enumerate() {
                        let moved: Vec<u8> = ws[i].iter().map(|&l| pi.apply(l).unwrap()).collect();
                        let j = ws.iter().position(|w| *w == moved).unwrap();
                        v[j] += BigRational::from_integer(x.into());
                    }
                    v
                })
                .collect();
            RelationSpace::span(ws.len(), vs)
        };
        let gens = short_generators(&quotient, orbit, ws.len());
        let identities = gens
            .iter()
            .map(|c| {
                let terms = c
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(i, &x)| (x, left_normed(&ws[i])))
                    .collect();
                Identity::new(terms, names_xyz())
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(DualPresentation {
            associative: true,
            identities,
        });
    }

    let orbit = |c: &[i64]| {
        let terms: Vec<(i64, Monomial)> = c
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| (x, basis.monomial(MonomialIndex(i as u32)).unwrap()))
            .collect();
        let id = Identity::new(terms, names_xyz()).expect("nonzero combination");
        relation_space(&[id]).expect("degree 3")
    };
    let gens = short_generators(&perp, orbit, 4);
    let identities = gens
        .iter()
        .map(|c| {
            let terms = c
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| (x, basis.monomial(MonomialIndex(i as u32)).unwrap()))
                .collect();
            Identity::new(terms, names_xyz())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DualPresentation {
        associative: false,
        identities,
    })
}
