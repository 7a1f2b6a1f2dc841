//! Integer octonions by Cayley–Dickson doubling of the quaternions.

use operad_core::monomials::{MonomialBasis, MonomialIndex};
use operad_core::{expand_consequences, preset, Monomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Quaternion = [i64; 4];
pub type Octonion = [i64; 8];

fn qmul(a: Quaternion, b: Quaternion) -> Quaternion {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn qconj(a: Quaternion) -> Quaternion {
    [a[0], -a[1], -a[2], -a[3]]
}

fn qadd(a: Quaternion, b: Quaternion) -> Quaternion {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn qsub(a: Quaternion, b: Quaternion) -> Quaternion {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

fn halves(x: Octonion) -> (Quaternion, Quaternion) {
    ([x[0], x[1], x[2], x[3]], [x[4], x[5], x[6], x[7]])
}

/// Cayley–Dickson doubling: (a, b)(c, d) = (ac - d*b, da + bc*).
pub fn omul(x: Octonion, y: Octonion) -> Octonion {
    let ((a, b), (c, d)) = (halves(x), halves(y));
    let l = qsub(qmul(a, c), qmul(qconj(d), b));
    let r = qadd(qmul(d, a), qmul(b, qconj(c)));
    [l[0], l[1], l[2], l[3], r[0], r[1], r[2], r[3]]
}

pub fn eval(m: &Monomial, values: &[Octonion]) -> Octonion {
    match m.factors() {
        None => values[m.labels()[0] as usize - 1],
        Some((l, r)) => omul(eval(&l, values), eval(&r, values)),
    }
}

pub fn random_octonion(rng: &mut ChaCha8Rng) -> Octonion {
    let mut x = [0; 8];
    for c in &mut x {
        *c = rng.gen_range(-6..=6);
    }
    x
}

/// Largest |coordinate| over all rows and tuples, or 0 if everything vanishes.
pub fn worst_residual(preset_name: &str, n: usize, tuples: usize, seed: u64) -> i64 {
    let ids = preset(preset_name).unwrap().identities;
    let m = expand_consequences(&ids, n).unwrap();
    let basis = MonomialBasis::new(n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0;
    for _ in 0..tuples {
        let values: Vec<Octonion> = (0..n).map(|_| random_octonion(&mut rng)).collect();
        let cache: Vec<Octonion> = (0..basis.len())
            .map(|i| eval(&basis.monomial(MonomialIndex(i as u32)).unwrap(), &values))
            .collect();
        for row in m.rows() {
            let mut acc = [0i64; 8];
            for &(c, e) in row.entries() {
                for k in 0..8 {
                    acc[k] += e * cache[c as usize][k];
                }
            }
            worst = worst.max(acc.iter().map(|x| x.abs()).max().unwrap());
        }
    }
    worst
}
