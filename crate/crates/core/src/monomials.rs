//! Nonassociative monomials: binary tree shapes with labelled leaves.
//!
//! A [`TreeShape`] is stored as its preorder code packed into a `u64`
//! (bit `i` set when the `i`-th preorder vertex is internal), so shapes are
//! `Copy` and cheap to hash. This caps the number of leaves at
//! [`MAX_LEAVES`], far above anything the rank engine can handle.
//!
//! Shapes of a fixed size are ordered canonically: `node(l, r)` sorts first by
//! the number of leaves of `l`, then by `l`, then by `r`. Multilinear
//! monomials of degree `n` are ordered by shape and then by the label word,
//! which gives the column order used by [`MonomialBasis`].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Variable index. Variables are numbered from 1.
pub type Var = u8;

/// Largest supported number of leaves in a shape.
pub const MAX_LEAVES: usize = 32;

/// Largest variable index usable in a monomial.
pub const MAX_VAR: Var = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonomialError {
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("degree {0} exceeds the supported maximum of {MAX_LEAVES}")]
    TooLarge(usize),
    #[error("variable index {0} out of range 1..={MAX_VAR}")]
    BadVariable(usize),
    #[error("label sets overlap on variable {0}")]
    Overlap(Var),
    #[error("variable {0} does not occur in the monomial")]
    Absent(Var),
    #[error("variable {0} occurs {1} times; expected exactly once")]
    Repeated(Var, usize),
    #[error("monomial is not multilinear on 1..={0}")]
    NotMultilinear(usize),
    #[error("permutation is not a bijection on 1..={0}")]
    NotAPermutation(usize),
    #[error("permutation acts on 1..={degree} but the monomial uses variable {var}")]
    OutsideDomain { degree: usize, var: Var },
    #[error("index {index} out of range for degree {degree} (dimension {dim})")]
    IndexOutOfRange {
        index: usize,
        degree: usize,
        dim: u64,
    },
}

/// Association type of a nonassociative product.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeShape {
    code: u64,
    leaves: u8,
}

/// One level of a [`TreeShape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeView {
    Leaf,
    Node(TreeShape, TreeShape),
}

impl TreeShape {
    pub const LEAF: TreeShape = TreeShape { code: 0, leaves: 1 };

    pub fn leaf() -> Self {
        Self::LEAF
    }

    pub fn node(left: TreeShape, right: TreeShape) -> Result<Self, MonomialError> {
        let leaves = left.leaf_count() + right.leaf_count();
        if leaves > MAX_LEAVES {
            return Err(MonomialError::TooLarge(leaves));
        }
        let code = 1 | (left.code << 1) | (right.code << (1 + left.code_len()));
        Ok(TreeShape {
            code,
            leaves: leaves as u8,
        })
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves as usize
    }

    pub fn is_leaf(&self) -> bool {
        self.leaves == 1
    }

    /// Length of the preorder code, `2 * leaves - 1`.
    fn code_len(&self) -> usize {
        2 * self.leaves as usize - 1
    }

    /// Packed preorder code. Two shapes are equal iff their codes are equal.
    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn view(&self) -> ShapeView {
        if self.is_leaf() {
            return ShapeView::Leaf;
        }
        // Walk the left subtree's preorder code, which starts at bit 1.
        let mut need = 1usize;
        let mut pos = 1usize;
        let mut left_leaves = 0u8;
        while need > 0 {
            if self.code >> pos & 1 == 1 {
                need += 1;
            } else {
                need -= 1;
                left_leaves += 1;
            }
            pos += 1;
        }
        let left_len = pos - 1;
        let left = TreeShape {
            code: (self.code >> 1) & low_mask(left_len),
            leaves: left_leaves,
        };
        let right = TreeShape {
            code: self.code >> pos,
            leaves: self.leaves - left_leaves,
        };
        ShapeView::Node(left, right)
    }

    pub fn children(&self) -> Option<(TreeShape, TreeShape)> {
        match self.view() {
            ShapeView::Leaf => None,
            ShapeView::Node(l, r) => Some((l, r)),
        }
    }

    /// Replaces the `leaf`-th leaf (0-based, left to right) by `with`.
    fn replace_leaf(&self, leaf: usize, with: TreeShape) -> Result<Self, MonomialError> {
        let leaves = self.leaf_count() + with.leaf_count() - 1;
        if leaves > MAX_LEAVES {
            return Err(MonomialError::TooLarge(leaves));
        }
        let mut seen = 0usize;
        let mut bit = 0usize;
        loop {
            if self.code >> bit & 1 == 0 {
                if seen == leaf {
                    break;
                }
                seen += 1;
            }
            bit += 1;
        }
        let low = self.code & low_mask(bit);
        let high = self.code >> (bit + 1);
        let code = low | (with.code << bit) | (high << (bit + with.code_len()));
        Ok(TreeShape {
            code,
            leaves: leaves as u8,
        })
    }
}

fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl Ord for TreeShape {
    fn cmp(&self, other: &Self) -> Ordering {
        self.leaves.cmp(&other.leaves).then_with(|| {
            if self.code == other.code {
                return Ordering::Equal;
            }
            match (self.view(), other.view()) {
                (ShapeView::Node(l1, r1), ShapeView::Node(l2, r2)) => {
                    l1.cmp(&l2).then_with(|| r1.cmp(&r2))
                }
                _ => Ordering::Equal,
            }
        })
    }
}

impl PartialOrd for TreeShape {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.view() {
            ShapeView::Leaf => f.write_str("."),
            ShapeView::Node(l, r) => write!(f, "({l:?}{r:?})"),
        }
    }
}

/// All shapes with `n` leaves in canonical order. There are `Catalan(n - 1)`
/// of them.
pub fn enumerate_shapes(n: usize) -> Result<Vec<TreeShape>, MonomialError> {
    if n == 0 {
        return Err(MonomialError::ZeroDegree);
    }
    if n > MAX_LEAVES {
        return Err(MonomialError::TooLarge(n));
    }
    let mut by_size: Vec<Vec<TreeShape>> = vec![Vec::new(), vec![TreeShape::LEAF]];
    for size in 2..=n {
        let mut shapes = Vec::new();
        for k in 1..size {
            for &l in &by_size[k] {
                for &r in &by_size[size - k] {
                    shapes.push(TreeShape::node(l, r)?);
                }
            }
        }
        by_size.push(shapes);
    }
    Ok(by_size.swap_remove(n))
}

/// Catalan number `C(k)`, exact for `k <= 35`.
pub fn catalan(k: usize) -> u64 {
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c as u64
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Dimension of the degree-`n` multilinear part of the free magma algebra:
/// `Catalan(n - 1) * n!`.
pub fn dim_free(n: usize) -> Result<u64, MonomialError> {
    if n == 0 {
        return Err(MonomialError::ZeroDegree);
    }
    if n > 15 {
        return Err(MonomialError::TooLarge(n));
    }
    Ok(catalan(n - 1) * factorial(n))
}

/// A nonassociative monomial: a shape together with the leaf labels read
/// left to right.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    shape: TreeShape,
    labels: Vec<Var>,
}

impl Monomial {
    pub fn var(v: Var) -> Result<Self, MonomialError> {
        check_var(v as usize)?;
        Ok(Monomial {
            shape: TreeShape::LEAF,
            labels: vec![v],
        })
    }

    /// Builds a monomial from a shape and a label word of matching length.
    pub fn from_parts(shape: TreeShape, labels: Vec<Var>) -> Result<Self, MonomialError> {
        if labels.len() != shape.leaf_count() {
            return Err(MonomialError::NotMultilinear(labels.len()));
        }
        for &v in &labels {
            check_var(v as usize)?;
        }
        Ok(Monomial { shape, labels })
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn labels(&self) -> &[Var] {
        &self.labels
    }

    pub fn degree(&self) -> usize {
        self.labels.len()
    }

    /// Splits a product into its two factors.
    pub fn factors(&self) -> Option<(Monomial, Monomial)> {
        let (l, r) = self.shape.children()?;
        let k = l.leaf_count();
        Some((
            Monomial {
                shape: l,
                labels: self.labels[..k].to_vec(),
            },
            Monomial {
                shape: r,
                labels: self.labels[k..].to_vec(),
            },
        ))
    }

    /// Product in the free magma with no restriction on repeated variables.
    pub(crate) fn product(&self, other: &Monomial) -> Result<Monomial, MonomialError> {
        let shape = TreeShape::node(self.shape, other.shape)?;
        let mut labels = Vec::with_capacity(self.labels.len() + other.labels.len());
        labels.extend_from_slice(&self.labels);
        labels.extend_from_slice(&other.labels);
        Ok(Monomial { shape, labels })
    }

    /// Product `self * other` of monomials on disjoint variable sets.
    pub fn graft(&self, other: &Monomial) -> Result<Monomial, MonomialError> {
        if let Some(v) = first_common(self.mask(), other.mask()) {
            return Err(MonomialError::Overlap(v));
        }
        self.product(other)
    }

    /// Replaces the unique leaf labelled `v` by the monomial `s`.
    pub fn substitute(&self, v: Var, s: &Monomial) -> Result<Monomial, MonomialError> {
        let positions: Vec<usize> = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == v)
            .map(|(i, _)| i)
            .collect();
        let pos = match positions.as_slice() {
            [] => return Err(MonomialError::Absent(v)),
            [p] => *p,
            many => return Err(MonomialError::Repeated(v, many.len())),
        };
        let rest = self.mask() & !(1u64 << v);
        if let Some(c) = first_common(rest, s.mask()) {
            return Err(MonomialError::Overlap(c));
        }
        self.substitute_at(pos, s)
    }

    /// Replaces the leaf at position `pos` without any label checks.
    pub(crate) fn substitute_at(
        &self,
        pos: usize,
        s: &Monomial,
    ) -> Result<Monomial, MonomialError> {
        let shape = self.shape.replace_leaf(pos, s.shape)?;
        let mut labels = Vec::with_capacity(self.labels.len() + s.labels.len() - 1);
        labels.extend_from_slice(&self.labels[..pos]);
        labels.extend_from_slice(&s.labels);
        labels.extend_from_slice(&self.labels[pos + 1..]);
        Ok(Monomial { shape, labels })
    }

    /// Applies `pi` to every label; the shape is unchanged.
    pub fn relabel(&self, pi: &Permutation) -> Result<Monomial, MonomialError> {
        let labels = self
            .labels
            .iter()
            .map(|&v| {
                pi.apply(v).ok_or(MonomialError::OutsideDomain {
                    degree: pi.len(),
                    var: v,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Monomial {
            shape: self.shape,
            labels,
        })
    }

    pub(crate) fn map_labels(&self, f: impl Fn(Var) -> Var) -> Monomial {
        Monomial {
            shape: self.shape,
            labels: self.labels.iter().map(|&v| f(v)).collect(),
        }
    }

    /// True iff the labels are exactly a permutation of `1..=degree`.
    pub fn is_multilinear(&self) -> bool {
        let n = self.labels.len();
        n <= MAX_VAR as usize
            && self.mask() == low_mask(n) << 1
            && self.labels.iter().all(|&v| v != 0)
    }

    fn mask(&self) -> u64 {
        self.labels.iter().fold(0u64, |m, &v| m | 1u64 << v)
    }

    /// Renders the monomial with left-normed products unparenthesised.
    pub fn display_with<'a>(&'a self, names: &'a dyn Fn(Var) -> String) -> impl fmt::Display + 'a {
        MonomialDisplay {
            monomial: self,
            names,
        }
    }
}

struct MonomialDisplay<'a> {
    monomial: &'a Monomial,
    names: &'a dyn Fn(Var) -> String,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(
            shape: TreeShape,
            labels: &[Var],
            names: &dyn Fn(Var) -> String,
            f: &mut fmt::Formatter<'_>,
        ) -> fmt::Result {
            match shape.view() {
                ShapeView::Leaf => f.write_str(&names(labels[0])),
                ShapeView::Node(l, r) => {
                    let k = l.leaf_count();
                    go(l, &labels[..k], names, f)?;
                    f.write_str("*")?;
                    if r.is_leaf() {
                        go(r, &labels[k..], names, f)
                    } else {
                        f.write_str("(")?;
                        go(r, &labels[k..], names, f)?;
                        f.write_str(")")
                    }
                }
            }
        }
        go(self.monomial.shape, &self.monomial.labels, self.names, f)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: Var| format!("x{v}");
        let shown = write!(f, "{}", self.display_with(&names));
        shown
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shape
            .cmp(&other.shape)
            .then_with(|| self.labels.cmp(&other.labels))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_var(v: usize) -> Result<(), MonomialError> {
    if v == 0 || v > MAX_VAR as usize {
        Err(MonomialError::BadVariable(v))
    } else {
        Ok(())
    }
}

fn first_common(a: u64, b: u64) -> Option<Var> {
    let both = a & b;
    (both != 0).then(|| both.trailing_zeros() as Var)
}

/// A permutation of `1..=n`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<Var>,
}

impl Permutation {
    /// `images[i]` is the image of `i + 1`.
    pub fn new(images: Vec<Var>) -> Result<Self, MonomialError> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            let v = v as usize;
            if v == 0 || v > n || seen[v] {
                return Err(MonomialError::NotAPermutation(n));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n as Var).collect(),
        }
    }

    /// The transposition exchanging `a` and `b` in `1..=n`.
    pub fn swap(n: usize, a: Var, b: Var) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(a as usize - 1, b as usize - 1);
        p
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[Var] {
        &self.images
    }

    pub fn apply(&self, v: Var) -> Option<Var> {
        (v as usize)
            .checked_sub(1)
            .and_then(|i| self.images.get(i).copied())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize - 1] = (i + 1) as Var;
        }
        Permutation { images: inv }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Permutation) -> Self {
        Permutation {
            images: first
                .images
                .iter()
                .map(|&v| self.images[v as usize - 1])
                .collect(),
        }
    }

    /// Sign of the permutation, `+1` or `-1`.
    pub fn sign(&self) -> i64 {
        let mut seen = vec![false; self.images.len()];
        let mut sign = 1;
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i] as usize - 1;
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }

    /// All permutations of `1..=n` in lexicographic order of image lists.
    pub fn all(n: usize) -> Vec<Permutation> {
        let total = factorial(n) as usize;
        (0..total)
            .map(|r| Permutation {
                images: unrank_permutation(r as u64, n),
            })
            .collect()
    }
}

/// Lexicographic rank of a permutation word of `1..=n`.
fn rank_permutation(word: &[Var]) -> u64 {
    let n = word.len();
    let mut rank = 0u64;
    let mut used = 0u64;
    for (i, &v) in word.iter().enumerate() {
        let smaller_unused = (v as u64 - 1) - (used & low_mask(v as usize)).count_ones() as u64;
        rank += smaller_unused * factorial(n - 1 - i);
        used |= 1u64 << v;
    }
    rank
}

fn unrank_permutation(mut rank: u64, n: usize) -> Vec<Var> {
    let mut pool: Vec<Var> = (1..=n as Var).collect();
    let mut word = Vec::with_capacity(n);
    for i in 0..n {
        let f = factorial(n - 1 - i);
        let k = (rank / f) as usize;
        rank %= f;
        word.push(pool.remove(k));
    }
    word
}

/// Column index of a multilinear monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialIndex(pub u32);

/// Indexing of the multilinear monomials of one degree in canonical order.
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    degree: usize,
    shapes: Vec<TreeShape>,
    shape_pos: HashMap<u64, u32>,
    perms: u64,
}

impl MonomialBasis {
    /// Column indices are `u32`, which limits the degree to 9.
    pub fn new(degree: usize) -> Result<Self, MonomialError> {
        if dim_free(degree)? > u32::MAX as u64 {
            return Err(MonomialError::TooLarge(degree));
        }
        let shapes = enumerate_shapes(degree)?;
        let shape_pos = shapes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.code(), i as u32))
            .collect();
        Ok(MonomialBasis {
            degree,
            shapes,
            shape_pos,
            perms: factorial(degree),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.shapes.len() * self.perms as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shapes(&self) -> &[TreeShape] {
        &self.shapes
    }

    pub fn index_of(&self, m: &Monomial) -> Result<MonomialIndex, MonomialError> {
        if m.degree() != self.degree || !m.is_multilinear() {
            return Err(MonomialError::NotMultilinear(self.degree));
        }
        let shape = self.shape_pos[&m.shape.code()] as u64;
        Ok(MonomialIndex(
            (shape * self.perms + rank_permutation(&m.labels)) as u32,
        ))
    }

    pub fn monomial(&self, index: MonomialIndex) -> Result<Monomial, MonomialError> {
        let i = index.0 as u64;
        if i as usize >= self.len() {
            return Err(MonomialError::IndexOutOfRange {
                index: i as usize,
                degree: self.degree,
                dim: self.len() as u64,
            });
        }
        let shape = self.shapes[(i / self.perms) as usize];
        Ok(Monomial {
            shape,
            labels: unrank_permutation(i % self.perms, self.degree),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Monomial> + '_ {
        (0..self.len()).map(|i| {
            self.monomial(MonomialIndex(i as u32))
                .expect("index in range")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: Var) -> Monomial {
        Monomial::var(v).unwrap()
    }

    fn brute_force_shape_count(n: usize) -> u64 {
        if n == 1 {
            return 1;
        }
        (1..n)
            .map(|k| brute_force_shape_count(k) * brute_force_shape_count(n - k))
            .sum()
    }

    #[test]
    fn shape_counts_match_recursive_count() {
        for n in 1..=10 {
            let shapes = enumerate_shapes(n).unwrap();
            assert_eq!(shapes.len() as u64, brute_force_shape_count(n));
            assert_eq!(shapes.len() as u64, catalan(n - 1));
            let distinct: std::collections::HashSet<_> = shapes.iter().collect();
            assert_eq!(distinct.len(), shapes.len());
            assert!(
                shapes.windows(2).all(|w| w[0] < w[1]),
                "canonical order is sorted for n={n}"
            );
        }
        assert_eq!(enumerate_shapes(6).unwrap().len(), 42);
        assert_eq!(enumerate_shapes(0), Err(MonomialError::ZeroDegree));
    }

    #[test]
    fn degree_three_shape_order() {
        let shapes = enumerate_shapes(3).unwrap();
        let leaf = TreeShape::leaf();
        let cherry = TreeShape::node(leaf, leaf).unwrap();
        assert_eq!(
            shapes,
            vec![
                TreeShape::node(leaf, cherry).unwrap(),
                TreeShape::node(cherry, leaf).unwrap()
            ]
        );
        assert_eq!(enumerate_shapes(1).unwrap(), vec![leaf]);
    }

    #[test]
    fn view_round_trips_node() {
        for n in 2..=7 {
            for s in enumerate_shapes(n).unwrap() {
                let (l, r) = s.children().unwrap();
                assert_eq!(TreeShape::node(l, r).unwrap(), s);
                assert_eq!(l.leaf_count() + r.leaf_count(), n);
            }
        }
    }

    #[test]
    fn free_dimensions() {
        assert_eq!(dim_free(1).unwrap(), 1);
        assert_eq!(dim_free(3).unwrap(), 12);
        assert_eq!(dim_free(6).unwrap(), 30240);
        assert_eq!(dim_free(6).unwrap(), 42 * 720);
        assert!(dim_free(0).is_err());
        for n in 1..=5 {
            assert_eq!(
                MonomialBasis::new(n).unwrap().iter().count() as u64,
                dim_free(n).unwrap()
            );
        }
    }

    #[test]
    fn index_endpoints() {
        let b1 = MonomialBasis::new(1).unwrap();
        assert_eq!(b1.index_of(&x(1)).unwrap(), MonomialIndex(0));
        let b3 = MonomialBasis::new(3).unwrap();
        let last = b3.monomial(MonomialIndex(11)).unwrap();
        assert_eq!(format!("{last:?}"), "x3*x2*x1");
        assert_eq!(b3.index_of(&last).unwrap(), MonomialIndex(11));
        assert!(b3.monomial(MonomialIndex(12)).is_err());
        let first = b3.monomial(MonomialIndex(0)).unwrap();
        assert_eq!(format!("{first:?}"), "x1*(x2*x3)");
    }

    #[test]
    fn index_round_trip_exhaustive() {
        for n in 1..=5 {
            let basis = MonomialBasis::new(n).unwrap();
            let mut previous: Option<Monomial> = None;
            for i in 0..basis.len() {
                let m = basis.monomial(MonomialIndex(i as u32)).unwrap();
                assert_eq!(basis.index_of(&m).unwrap().0 as usize, i);
                if let Some(p) = previous {
                    assert!(p < m, "index order agrees with monomial order");
                }
                previous = Some(m);
            }
        }
    }

    #[test]
    fn index_rejects_non_multilinear() {
        let b = MonomialBasis::new(2).unwrap();
        let xx = x(1).product(&x(1)).unwrap();
        assert!(b.index_of(&xx).is_err());
        let x13 = x(1).graft(&x(3)).unwrap();
        assert!(b.index_of(&x13).is_err());
    }

    #[test]
    fn graft_examples() {
        let x12 = x(1).graft(&x(2)).unwrap();
        assert_eq!(format!("{x12:?}"), "x1*x2");
        let left = x12.graft(&x(3)).unwrap();
        assert_eq!(format!("{left:?}"), "x1*x2*x3");
        let right = x(3).graft(&x12).unwrap();
        assert_eq!(format!("{right:?}"), "x3*(x1*x2)");
        assert_ne!(right, x(3).graft(&x(1)).unwrap().graft(&x(2)).unwrap());
        assert_eq!(x12.graft(&x(2)), Err(MonomialError::Overlap(2)));
    }

    #[test]
    fn graft_is_not_commutative() {
        let basis = MonomialBasis::new(2).unwrap();
        let ms: Vec<_> = basis.iter().collect();
        for a in &ms {
            let b = a.map_labels(|v| v + 2);
            assert_ne!(a.graft(&b).unwrap(), b.graft(a).unwrap());
        }
    }

    #[test]
    fn substitute_examples() {
        let x12 = x(1).graft(&x(2)).unwrap();
        let x23 = x(2).graft(&x(3)).unwrap();
        assert_eq!(
            format!("{:?}", x12.substitute(2, &x23).unwrap()),
            "x1*(x2*x3)"
        );
        assert_eq!(x(1).substitute(1, &x23).unwrap(), x23);
        let m = x12.graft(&x(3)).unwrap();
        let x14 = x(1).graft(&x(4)).unwrap();
        assert_eq!(
            format!("{:?}", m.substitute(1, &x14).unwrap()),
            "x1*x4*x2*x3"
        );
        let expected = x14.graft(&x(2)).unwrap().graft(&x(3)).unwrap();
        assert_eq!(m.substitute(1, &x14).unwrap(), expected);
    }

    #[test]
    fn substitute_errors() {
        let x12 = x(1).graft(&x(2)).unwrap();
        assert_eq!(x12.substitute(3, &x(4)), Err(MonomialError::Absent(3)));
        let x11 = x(1).product(&x(1)).unwrap();
        assert_eq!(x11.substitute(1, &x(4)), Err(MonomialError::Repeated(1, 2)));
        assert_eq!(x12.substitute(1, &x(2)), Err(MonomialError::Overlap(2)));
        // the replaced variable itself may reappear in s
        assert!(x12.substitute(1, &x(1).graft(&x(3)).unwrap()).is_ok());
    }

    #[test]
    fn relabel_examples() {
        let m = x(1).graft(&x(2)).unwrap().graft(&x(3)).unwrap();
        assert_eq!(m.relabel(&Permutation::identity(3)).unwrap(), m);
        assert_eq!(
            format!("{:?}", m.relabel(&Permutation::swap(3, 1, 2)).unwrap()),
            "x2*x1*x3"
        );
        assert!(m.relabel(&Permutation::identity(2)).is_err());
        assert!(Permutation::new(vec![1, 1, 3]).is_err());
        assert!(Permutation::new(vec![1, 4, 3]).is_err());
    }

    #[test]
    fn relabel_group_action_degree_four() {
        let basis = MonomialBasis::new(4).unwrap();
        let perms = Permutation::all(4);
        for m in basis.iter() {
            for s in &perms {
                let back = m.relabel(s).unwrap().relabel(&s.inverse()).unwrap();
                assert_eq!(back, m);
                for t in &perms {
                    let twice = m.relabel(s).unwrap().relabel(t).unwrap();
                    assert_eq!(twice, m.relabel(&t.after(s)).unwrap());
                }
            }
        }
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(Permutation::identity(3).sign(), 1);
        assert_eq!(Permutation::swap(3, 2, 3).sign(), -1);
        assert_eq!(Permutation::new(vec![2, 3, 1]).unwrap().sign(), 1);
        let perms = Permutation::all(4);
        assert_eq!(perms.len(), 24);
        assert_eq!(perms.iter().filter(|p| p.sign() == 1).count(), 12);
    }
}
