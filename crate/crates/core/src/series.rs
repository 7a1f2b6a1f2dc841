//! Truncated power series with exact rational coefficients and zero constant
//! term: Poincaré series of operads, composition, and the Ginzburg–Kapranov
//! defect `g_P(g_{P^!}(x)) - x`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation degree must be at least 1")]
    ZeroTruncation,
    #[error("need dimensions up to degree {needed}, only {available} given")]
    MissingDimensions { needed: usize, available: usize },
    #[error("series known to degree {available}, composition needs degree {needed}")]
    InsufficientTruncation { needed: usize, available: usize },
}

/// `c_1 x + ... + c_N x^N + O(x^{N+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    /// `coeffs[k]` is the coefficient of `x^{k+1}`.
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    /// Series from `c_1, ..., c_N`.
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::ZeroTruncation);
        }
        Ok(TruncatedSeries { coeffs })
    }

    pub fn from_integers(coeffs: &[i64]) -> Result<Self, SeriesError> {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    /// The series `x`, truncated at degree `n`.
    pub fn x(n: usize) -> Result<Self, SeriesError> {
        let mut c = vec![BigRational::zero(); n];
        *c.first_mut().ok_or(SeriesError::ZeroTruncation)? = BigRational::one();
        Self::new(c)
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `x^k`; zero for `k = 0`.
    pub fn coeff(&self, k: usize) -> BigRational {
        if k == 0 {
            return BigRational::zero();
        }
        self.coeffs
            .get(k - 1)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncate(&self, n: usize) -> Result<Self, SeriesError> {
        if n > self.truncation() {
            return Err(SeriesError::InsufficientTruncation {
                needed: n,
                available: self.truncation(),
            });
        }
        Self::new(self.coeffs[..n].to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn first_nonzero(&self) -> Option<(usize, BigRational)> {
        self.coeffs
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k + 1, c.clone()))
    }

    pub fn sub(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let n = self.truncation().min(other.truncation());
        TruncatedSeries {
            coeffs: (1..=n).map(|k| self.coeff(k) - other.coeff(k)).collect(),
        }
    }
}

/// Product of two coefficient vectors indexed from `x^0`, truncated at
/// degree `n`.
fn mul_truncated(a: &[BigRational], b: &[BigRational], n: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Poincaré series `Σ (-1)^n dims[n-1] / n! x^n` for `n = 1..=n_max`.
pub fn poincare(dims: &[u64], n_max: usize) -> Result<TruncatedSeries, SeriesError> {
    if n_max == 0 {
        return Err(SeriesError::ZeroTruncation);
    }
    if dims.len() < n_max {
        return Err(SeriesError::MissingDimensions {
            needed: n_max,
            available: dims.len(),
        });
    }
    let mut factorial = BigInt::one();
    let mut coeffs = Vec::with_capacity(n_max);
    for (k, &d) in dims.iter().enumerate().take(n_max) {
        let n = k + 1;
        factorial *= n;
        let sign = if n % 2 == 0 { 1 } else { -1 };
        coeffs.push(BigRational::new(BigInt::from(d) * sign, factorial.clone()));
    }
    TruncatedSeries::new(coeffs)
}

/// `f(g(x))` through degree `n`, by Horner's scheme with every product
/// truncated at `n`.
pub fn compose(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    n: usize,
) -> Result<TruncatedSeries, SeriesError> {
    if n == 0 {
        return Err(SeriesError::ZeroTruncation);
    }
    for s in [f, g] {
        if s.truncation() < n {
            return Err(SeriesError::InsufficientTruncation {
                needed: n,
                available: s.truncation(),
            });
        }
    }
    let mut g_full = vec![BigRational::zero()];
    g_full.extend(g.coeffs.iter().take(n).cloned());
    // f(g) = g (c_1 + g (c_2 + ... + g c_n))
    let mut acc = vec![BigRational::zero(); n + 1];
    for k in (1..=n).rev() {
        acc[0] += f.coeff(k);
        acc = mul_truncated(&acc, &g_full, n);
    }
    TruncatedSeries::new(acc.into_iter().skip(1).collect())
}

/// `g_P(g_{P^!}(x)) - x` through degree `n`. A nonzero coefficient shows the
/// operad is not Koszul.
pub fn gk_defect(
    g_p: &TruncatedSeries,
    g_dual: &TruncatedSeries,
    n: usize,
) -> Result<TruncatedSeries, SeriesError> {
    Ok(compose(g_p, g_dual, n)?.sub(&TruncatedSeries::x(n)?))
}

impl fmt::Display for TruncatedSeries {
    /// `-x + x^2 - 3/2*x^3`; the zero series prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let n = k + 1;
            let negative = c.is_negative();
            match (first, negative) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let abs = c.abs();
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            match n {
                1 => f.write_str("x")?,
                _ => write!(f, "x^{n}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn g_ass(n: usize) -> TruncatedSeries {
        let dims: Vec<u64> = (1..=n as u64).map(|k| (1..=k).product()).collect();
        poincare(&dims, n).unwrap()
    }

    #[test]
    fn poincare_examples() {
        let g = poincare(&[1, 2, 9, 60, 530], 5).unwrap();
        assert_eq!(g.to_string(), "-x + x^2 - 3/2*x^3 + 5/2*x^4 - 53/12*x^5");
        let g = poincare(&[1, 2, 5, 12, 15, 0], 5).unwrap();
        assert_eq!(g.to_string(), "-x + x^2 - 5/6*x^3 + 1/2*x^4 - 1/8*x^5");
        let g = poincare(&[1, 2, 3, 0], 3).unwrap();
        assert_eq!(g.to_string(), "-x + x^2 - 1/2*x^3");
        assert_eq!(
            poincare(&[1, 2], 3),
            Err(SeriesError::MissingDimensions {
                needed: 3,
                available: 2
            })
        );
        assert_eq!(poincare(&[1], 0), Err(SeriesError::ZeroTruncation));
    }

    #[test]
    fn alternative_series_coefficients() {
        let g = poincare(&[1, 2, 7, 32, 175, 1080], 6).unwrap();
        assert_eq!(
            g.to_string(),
            "-x + x^2 - 7/6*x^3 + 4/3*x^4 - 35/24*x^5 + 3/2*x^6"
        );
    }

    #[test]
    fn compose_examples() {
        let minus_x = TruncatedSeries::from_integers(&[-1]).unwrap();
        assert_eq!(
            compose(&minus_x, &minus_x, 1).unwrap(),
            TruncatedSeries::x(1).unwrap()
        );
        for n in 1..=8 {
            let g = g_ass(n);
            assert_eq!(
                compose(&g, &g, n).unwrap(),
                TruncatedSeries::x(n).unwrap(),
                "n={n}"
            );
        }
        let g_alt = poincare(&[1, 2, 7, 32, 175, 1080], 6).unwrap();
        let g_alt_dual = poincare(&[1, 2, 5, 12, 15, 0], 6).unwrap();
        assert_eq!(
            compose(&g_alt, &g_alt_dual, 6).unwrap().to_string(),
            "x - 11/72*x^6"
        );
        assert!(compose(&g_alt, &g_alt_dual, 7).is_err());
    }

    #[test]
    fn defects() {
        let g_ra = poincare(&[1, 2, 9, 60, 530], 5).unwrap();
        let g_ra_dual = poincare(&[1, 2, 3, 0, 0], 5).unwrap();
        let d = gk_defect(&g_ra, &g_ra_dual, 5).unwrap();
        assert_eq!(d.to_string(), "1/6*x^5");
        assert_eq!(d.first_nonzero(), Some((5, q(1, 6))));

        let g_alt = poincare(&[1, 2, 7, 32, 175, 1080], 6).unwrap();
        let g_alt_dual = poincare(&[1, 2, 5, 12, 15, 0], 6).unwrap();
        let d = gk_defect(&g_alt, &g_alt_dual, 6).unwrap();
        assert_eq!(d.first_nonzero(), Some((6, q(-11, 72))));

        let d = gk_defect(&g_ass(8), &g_ass(8), 8).unwrap();
        assert!(d.is_zero());
        assert_eq!(d.to_string(), "0");
    }
}
