//! Exact integer and rational arithmetic, plus the closed-form counting
//! quantities used throughout the crate.
//!
//! Everything here is exact. [`BigInt`] and [`Rational`] are re-exports of
//! the `malachite` types; rationals are always kept in lowest terms with a
//! positive denominator.
//!
//! The `P_k` recursion doubles the bit length of its denominator at every
//! step, so [`PkSequence`] works on [`Dyadic`] values (odd numerator over a
//! power of two) and never touches a gcd.

use std::cmp::Ordering;
use std::fmt;

use malachite::base::num::arithmetic::traits::{BinomialCoefficient, DivExact, Factorial, Pow, Square};
use malachite::base::num::basic::traits::{One, Zero};
use malachite::Natural;
use serde::Serializer;
use thiserror::Error;

pub use malachite::rational::Rational;
pub use malachite::Integer as BigInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("catalan triangle entry C({n}, {k}) requires k <= n")]
    TriangleOutOfRange { n: u64, k: u64 },
}

/// `n!` as an exact integer.
pub fn factorial(n: u64) -> BigInt {
    BigInt::from(Natural::factorial(n))
}

/// Binomial coefficient, zero whenever `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::ZERO;
    }
    BigInt::from(Natural::binomial_coefficient(Natural::from(n), Natural::from(k as u64)))
}

/// Multinomial coefficient `(sum parts)! / prod(parts!)`.
pub fn multinomial(parts: &[u64]) -> BigInt {
    let total: u64 = parts.iter().sum();
    let denom = parts.iter().fold(BigInt::ONE, |acc, &p| acc * factorial(p));
    factorial(total).div_exact(denom)
}

/// `2^e` as an exact integer.
pub fn power_of_two(e: u64) -> BigInt {
    BigInt::ONE << e
}

/// Entry `C(n, k)` of the Catalan triangle: the number of strings of `n`
/// U's and `k` D's in which every prefix has at least as many U's as D's.
pub fn catalan_triangle(n: u64, k: u64) -> Result<BigInt, NumericsError> {
    if k > n {
        return Err(NumericsError::TriangleOutOfRange { n, k });
    }
    Ok(binomial(n + k, k as i64) - binomial(n + k, k as i64 - 1))
}

/// The `r`th Catalan number, `binom(2r, r) / (r + 1)`.
pub fn catalan(r: u64) -> BigInt {
    binomial(2 * r, r as i64).div_exact(BigInt::from(r + 1))
}

/// Both sides of the Catalan sum-product identity
/// `C(m+k-1, k) = sum over x_1+..+x_m = k of prod C_{x_i}`.
///
/// The right-hand side is computed by walking every weak composition of
/// `k` into `m` parts, so the cost grows like `binom(k+m-1, m-1)`.
pub fn sum_product_identity_check(m: u64, k: u64) -> (BigInt, BigInt) {
    assert!(m >= 1, "composition needs at least one part");
    let lhs = catalan_triangle(m + k - 1, k).expect("k <= m + k - 1 when m >= 1");
    let catalans: Vec<BigInt> = (0..=k).map(catalan).collect();
    let rhs = WeakCompositions::new(k, m as usize).fold(BigInt::ZERO, |acc, parts| {
        acc + parts.iter().fold(BigInt::ONE, |p, &x| p * &catalans[x as usize])
    });
    (lhs, rhs)
}

/// Weak compositions of `total` into `parts` non-negative parts, in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct WeakCompositions {
    current: Option<Vec<u64>>,
    total: u64,
}

impl WeakCompositions {
    pub fn new(total: u64, parts: usize) -> Self {
        let current = match parts {
            0 if total == 0 => Some(Vec::new()),
            0 => None,
            _ => {
                let mut first = vec![0; parts];
                first[parts - 1] = total;
                Some(first)
            }
        };
        Self { current, total }
    }
}

impl Iterator for WeakCompositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.current.take()?;
        let len = out.len();
        if len >= 2 {
            // Lexicographic successor: bump the rightmost position (before the
            // last) that still has room, then dump the remainder at the end.
            let mut next = out.clone();
            if let Some(i) = (0..len - 1).rev().find(|&i| {
                let prefix: u64 = next[..=i].iter().sum();
                prefix < self.total
            }) {
                next[i] += 1;
                for slot in next.iter_mut().skip(i + 1) {
                    *slot = 0;
                }
                let used: u64 = next[..len - 1].iter().sum();
                next[len - 1] = self.total - used;
                self.current = Some(next);
            }
        }
        Some(out)
    }
}

/// Number of unicard win-loss sequences ending within `k` passthroughs:
/// `A_1 = 1`, `A_{k+1} = 1 + A_k^2`.
pub fn a_k(k: u32) -> BigInt {
    assert!(k >= 1, "A_k is defined for k >= 1");
    (1..k).fold(BigInt::ONE, |a, _| BigInt::ONE + a.square())
}

/// Probability that a unicard game is `k`-passthrough single-use:
/// `P_1 = 1/2`, `P_{k+1} = 1/2 + P_k^2 / 2`.
pub fn p_k(k: u32) -> Rational {
    assert!(k >= 1, "P_k is defined for k >= 1");
    PkSequence::new()
        .nth(k as usize - 1)
        .expect("sequence is infinite")
        .to_rational()
}

/// A rational of the form `numerator / 2^exponent`, normalized so the
/// numerator is odd (or the value is zero with exponent 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    numerator: BigInt,
    exponent: u64,
}

impl Dyadic {
    pub fn new(numerator: BigInt, exponent: u64) -> Self {
        let mut d = Self { numerator, exponent };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Self::new(BigInt::ZERO, 0)
    }

    pub fn one() -> Self {
        Self::new(BigInt::ONE, 0)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    fn normalize(&mut self) {
        match self.numerator.trailing_zeros() {
            None => self.exponent = 0,
            Some(tz) => {
                let shift = tz.min(self.exponent);
                if shift > 0 {
                    self.numerator >>= shift;
                    self.exponent -= shift;
                }
            }
        }
    }

    /// Numerators of `self` and `other` over the common denominator
    /// `2^max(exponents)`.
    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u64) {
        let e = self.exponent.max(other.exponent);
        (
            &self.numerator << (e - self.exponent),
            &other.numerator << (e - other.exponent),
            e,
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b, e) = self.aligned(other);
        Self::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b, e) = self.aligned(other);
        Self::new(a - b, e)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.numerator * &other.numerator, self.exponent + other.exponent)
    }

    pub fn square(&self) -> Self {
        Self::new((&self.numerator).square(), 2 * self.exponent)
    }

    /// Multiplies by `2^shift` (positive) or divides by `2^-shift`.
    pub fn scale_pow2(&self, shift: i64) -> Self {
        if shift >= 0 {
            Self::new(&self.numerator << shift as u64, self.exponent)
        } else {
            Self::new(self.numerator.clone(), self.exponent + shift.unsigned_abs())
        }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from(self.numerator.clone()) >> self.exponent
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, power_of_two(self.exponent))
    }
}

/// Iterator over `P_1, P_2, ...` as exact dyadic rationals.
#[derive(Debug, Clone, Default)]
pub struct PkSequence {
    next: Option<Dyadic>,
}

impl PkSequence {
    pub fn new() -> Self {
        Self {
            next: Some(Dyadic::new(BigInt::ONE, 1)),
        }
    }
}

impl Iterator for PkSequence {
    type Item = Dyadic;

    fn next(&mut self) -> Option<Dyadic> {
        let current = self.next.take()?;
        // 1/2 + P^2/2 = (2^(2e) + N^2) / 2^(2e+1) for P = N / 2^e
        let e = current.exponent;
        let numerator = power_of_two(2 * e) + (&current.numerator).square();
        self.next = Some(Dyadic::new(numerator, 2 * e + 1));
        Some(current)
    }
}

/// Canonical `p/q` text for a rational, including `q = 1`.
pub fn ratio_string(r: &Rational) -> String {
    let (num, den) = r.numerator_and_denominator_ref();
    if *r < 0u32 {
        format!("-{num}/{den}")
    } else {
        format!("{num}/{den}")
    }
}

/// Parses `p/q` (or a bare integer) into a rational.
pub fn parse_ratio(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q == 0u32 {
                return None;
            }
            Some(Rational::from_integers(p, q))
        }
        None => text.parse::<BigInt>().ok().map(Rational::from),
    }
}

/// `serialize_with` helper: rationals as `"p/q"` strings.
pub fn serialize_ratio<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}

/// `serialize_with` helper: big integers as decimal strings.
pub fn serialize_bigint<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// `Rational` from a small numerator/denominator pair.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::from_signeds(p, q)
}

/// `base^exp` for rationals.
pub fn rational_pow(base: &Rational, exp: u64) -> Rational {
    base.clone().pow(exp)
}
