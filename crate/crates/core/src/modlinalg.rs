//! Rank of integer matrices over `GF(p)` for primes `p < 2^63`.
//!
//! [`rank_mod_p`] runs sparse Gaussian elimination with a Markowitz pivot
//! rule: the pivot is the nonzero minimising `row_count * col_count`, ties
//! broken by the lowest column and then the lowest row. Pivot rows are
//! dropped as soon as they are used, since only the rank is needed. Once the
//! active submatrix becomes denser than [`RankOptions::dense_threshold`] the
//! remainder is finished by dense elimination.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::certify::is_prime_u63;
use crate::consequences::SparseRowMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not a prime below 2^63")]
    NotPrime(u64),
    #[error("zero has no inverse")]
    NotInvertible,
}

/// The prime field `GF(p)`, `2 <= p < 2^63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= 1 << 63 || !is_prime_u63(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// `((e mod p) + p) mod p`.
    pub fn reduce(&self, e: i64) -> u64 {
        let p = self.p as i128;
        (((e as i128 % p) + p) % p) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        // a + b < 2^64 because both are below 2^63.
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + (self.p - b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        if a.is_multiple_of(self.p) {
            return Err(FieldError::NotInvertible);
        }
        let (mut r0, mut r1) = (self.p as i128, (a % self.p) as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Ok(t0.rem_euclid(self.p as i128) as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOptions {
    /// Switch to dense elimination once `nnz / (rows * cols)` of the active
    /// submatrix exceeds this.
    pub dense_threshold: f64,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            dense_threshold: 0.2,
        }
    }
}

pub fn rank_mod_p(m: &SparseRowMatrix, field: &PrimeField) -> usize {
    rank_mod_p_with(m, field, &RankOptions::default())
}

pub fn rank_mod_p_with(m: &SparseRowMatrix, field: &PrimeField, opts: &RankOptions) -> usize {
    let rows = m
        .rows()
        .iter()
        .map(|r| {
            r.entries()
                .iter()
                .map(|&(c, e)| (c, field.reduce(e)))
                .filter(|&(_, v)| v != 0)
                .collect::<Vec<_>>()
        })
        .collect();
    Markowitz::new(rows, m.n_cols(), *field).run(opts)
}

type Row = Vec<(u32, u64)>;

struct Markowitz {
    field: PrimeField,
    rows: Vec<Row>,
    /// Rows that contained each column at some point; may be stale.
    col_rows: Vec<Vec<u32>>,
    col_count: Vec<u32>,
    /// Count under which each column is filed in `cols_by_count`.
    filed_count: Vec<u32>,
    cols_by_count: BTreeSet<(u32, u32)>,
    filed_len: Vec<u32>,
    rows_by_len: BTreeSet<(u32, u32)>,
    dirty_cols: Vec<u32>,
    is_dirty: Vec<bool>,
    nnz: usize,
    rank: usize,
}

impl Markowitz {
    fn new(rows: Vec<Row>, n_cols: usize, field: PrimeField) -> Self {
        let mut col_rows = vec![Vec::new(); n_cols];
        let mut col_count = vec![0u32; n_cols];
        let mut rows_by_len = BTreeSet::new();
        let mut filed_len = vec![0u32; rows.len()];
        let mut nnz = 0;
        for (i, row) in rows.iter().enumerate() {
            for &(c, _) in row {
                col_rows[c as usize].push(i as u32);
                col_count[c as usize] += 1;
            }
            nnz += row.len();
            if !row.is_empty() {
                rows_by_len.insert((row.len() as u32, i as u32));
                filed_len[i] = row.len() as u32;
            }
        }
        let cols_by_count = col_count
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(c, &k)| (k, c as u32))
            .collect();
        Markowitz {
            field,
            rows,
            col_rows,
            filed_count: col_count.clone(),
            col_count,
            cols_by_count,
            filed_len,
            rows_by_len,
            dirty_cols: Vec::new(),
            is_dirty: vec![false; n_cols],
            nnz,
            rank: 0,
        }
    }

    fn run(mut self, opts: &RankOptions) -> usize {
        loop {
            let live_rows = self.rows_by_len.len();
            let live_cols = self.cols_by_count.len();
            if live_rows == 0 || live_cols == 0 {
                return self.rank;
            }
            if self.nnz as f64 > opts.dense_threshold * live_rows as f64 * live_cols as f64 {
                return self.rank + self.dense_rank();
            }
            let (col, row) = self.choose_pivot();
            self.eliminate(row, col);
        }
    }

    fn entry(&self, row: u32, col: u32) -> Option<u64> {
        let r = &self.rows[row as usize];
        r.binary_search_by_key(&col, |&(c, _)| c)
            .ok()
            .map(|k| r[k].1)
    }

    /// Minimal `row_len * col_count`, ties by lowest column then row.
    ///
    /// Columns are scanned by ascending count and rows by ascending length,
    /// alternately. An entry outside every scanned row and column costs at
    /// least the product of the two frontiers.
    fn choose_pivot(&mut self) -> (u32, u32) {
        let min_len = self.rows_by_len.first().expect("live rows").0 as u64;
        let mut best: Option<(u64, u32, u32)> = None;
        let mut cols = self.cols_by_count.iter().peekable();
        let mut rows = self.rows_by_len.iter().peekable();
        while let (Some(&&(count, col)), Some(&&(len, _))) = (cols.peek(), rows.peek()) {
            if let Some((cost, best_col, _)) = best {
                // every unscanned column costs at least count * min_len
                let floor = count as u64 * min_len;
                if floor > cost
                    || (floor == cost && col > best_col)
                    || count as u64 * len as u64 > cost
                {
                    break;
                }
            }
            cols.next();
            let mut best_row: Option<(u32, u32)> = None;
            for &r in &self.col_rows[col as usize] {
                let len = self.rows[r as usize].len() as u32;
                if len == 0 || best_row.is_some_and(|b| (len, r) >= b) {
                    continue;
                }
                if self.entry(r, col).is_some() {
                    best_row = Some((len, r));
                }
            }
            let (len, r) = best_row.expect("column count agrees with rows");
            let cand = (count as u64 * len as u64, col, r);
            if best.is_none_or(|b| cand < b) {
                best = Some(cand);
            }

            if let Some(&(len, r)) = rows.next() {
                for &(c, _) in &self.rows[r as usize] {
                    let cand = (len as u64 * self.col_count[c as usize] as u64, c, r);
                    if best.is_none_or(|b| cand < b) {
                        best = Some(cand);
                    }
                }
            }
        }
        let (_, col, row) = best.expect("nonempty active submatrix");
        (col, row)
    }

    fn touch(&mut self, col: u32) {
        if !self.is_dirty[col as usize] {
            self.is_dirty[col as usize] = true;
            self.dirty_cols.push(col);
        }
    }

    fn refile_row(&mut self, i: u32) {
        let old = self.filed_len[i as usize];
        let new = self.rows[i as usize].len() as u32;
        if old == new {
            return;
        }
        if old > 0 {
            self.rows_by_len.remove(&(old, i));
        }
        if new > 0 {
            self.rows_by_len.insert((new, i));
        }
        self.filed_len[i as usize] = new;
    }

    fn eliminate(&mut self, pivot_row: u32, col: u32) {
        let f = self.field;
        let prow = std::mem::take(&mut self.rows[pivot_row as usize]);
        self.refile_row(pivot_row);
        let pivot_val = prow[prow.binary_search_by_key(&col, |&(c, _)| c).unwrap()].1;
        let inv = f.inv(pivot_val).expect("pivot is nonzero");
        let prow: Vec<(u32, u64)> = prow.iter().map(|&(c, x)| (c, f.mul(x, inv))).collect();
        self.nnz -= prow.len();
        for &(c, _) in &prow {
            self.col_count[c as usize] -= 1;
            self.touch(c);
        }

        let candidates = std::mem::take(&mut self.col_rows[col as usize]);
        for &i in &candidates {
            let Some(v) = self.entry(i, col) else {
                continue;
            };
            let factor = v;
            let old = std::mem::take(&mut self.rows[i as usize]);
            let mut merged = Vec::with_capacity(old.len() + prow.len());
            let (mut a, mut b) = (0, 0);
            while a < old.len() || b < prow.len() {
                let ca = old.get(a).map_or(u32::MAX, |e| e.0);
                let cb = prow.get(b).map_or(u32::MAX, |e| e.0);
                if ca < cb {
                    merged.push(old[a]);
                    a += 1;
                } else if cb < ca {
                    let val = f.neg(f.mul(factor, prow[b].1));
                    merged.push((cb, val));
                    self.col_count[cb as usize] += 1;
                    self.col_rows[cb as usize].push(i);
                    self.touch(cb);
                    b += 1;
                } else {
                    let val = f.sub(old[a].1, f.mul(factor, prow[b].1));
                    if val != 0 {
                        merged.push((ca, val));
                    } else {
                        self.col_count[ca as usize] -= 1;
                        self.touch(ca);
                    }
                    a += 1;
                    b += 1;
                }
            }
            self.nnz = self.nnz + merged.len() - old.len();
            self.rows[i as usize] = merged;
            self.refile_row(i);
        }

        for col in std::mem::take(&mut self.dirty_cols) {
            let c = col as usize;
            self.is_dirty[c] = false;
            let (old, new) = (self.filed_count[c], self.col_count[c]);
            if old != new {
                if old > 0 {
                    self.cols_by_count.remove(&(old, col));
                }
                if new > 0 {
                    self.cols_by_count.insert((new, col));
                } else {
                    self.col_rows[c].clear();
                }
                self.filed_count[c] = new;
            }
        }
        self.rank += 1;
    }

    /// Rank of the remaining active rows by dense incremental elimination.
    fn dense_rank(&mut self) -> usize {
        let f = self.field;
        let mut position = vec![u32::MAX; self.col_count.len()];
        let mut k = 0usize;
        for &(_, col) in &self.cols_by_count {
            position[col as usize] = 0;
        }
        for (c, pos) in position.iter_mut().enumerate() {
            if *pos == 0 && self.col_count[c] > 0 {
                *pos = k as u32;
                k += 1;
            }
        }
        let mut pivot_of: Vec<Option<usize>> = vec![None; k];
        let mut basis: Vec<Vec<u64>> = Vec::new();
        let live: Vec<u32> = (0..self.rows.len() as u32)
            .filter(|&i| !self.rows[i as usize].is_empty())
            .collect();
        let mut v = vec![0u64; k];
        for i in live {
            if basis.len() == k {
                break;
            }
            v.iter_mut().for_each(|x| *x = 0);
            for &(c, val) in &self.rows[i as usize] {
                v[position[c as usize] as usize] = val;
            }
            for j in 0..k {
                if v[j] == 0 {
                    continue;
                }
                match pivot_of[j] {
                    Some(b) => {
                        let factor = v[j];
                        let brow = &basis[b];
                        for t in j..k {
                            if brow[t] != 0 {
                                v[t] = f.sub(v[t], f.mul(factor, brow[t]));
                            }
                        }
                    }
                    None => {
                        let inv = f.inv(v[j]).expect("nonzero");
                        let mut row = vec![0u64; k];
                        for t in j..k {
                            row[t] = f.mul(v[t], inv);
                        }
                        pivot_of[j] = Some(basis.len());
                        basis.push(row);
                        break;
                    }
                }
            }
        }
        basis.len()
    }
}
