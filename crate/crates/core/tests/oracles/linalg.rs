//! Dense reference ranks: exact over the rationals and modulo a prime.

use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect()
        })
        .collect();
    let width = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = BigRational::one() / m[rank][col].clone();
        let pivot: Vec<BigRational> = m[rank].iter().map(|x| x * &inv).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        m[rank] = pivot;
        rank += 1;
    }
    rank
}

pub fn rank_mod(rows: &[Vec<i64>], p: u64) -> usize {
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
        .collect();
    let width = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = powmod(m[rank][col], p - 2);
        let pivot: Vec<u64> = m[rank].iter().map(|&x| mulmod(x, inv)).collect();
        for row in m.iter_mut().skip(rank + 1) {
            let f = row[col];
            if f != 0 {
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + p - mulmod(f, y)) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}
