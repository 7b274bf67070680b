//! Exact arbitrary-precision rationals and the number-theoretic constants
//! (binomials, Bernoulli numbers, Euler numbers, zeta at negative odd
//! integers) that every formula in this crate is built from.
//!
//! All values are carried as [`Rational`], even when they happen to be
//! integers (binomials, Euler numbers); nothing is ever narrowed to a
//! machine integer or a float.

use std::sync::{LazyLock, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// The universal scalar type: an arbitrary-precision fraction kept in
/// canonical form (positive denominator, gcd(|numerator|, denominator) = 1).
///
/// Canonicalisation and structural equality come from `num-rational`'s
/// `Ratio<BigInt>`; its `Display` renders the canonical `"p/q"` form
/// (just `"p"` when the denominator is 1) used verbatim by the CLI and
/// JSON layers.
pub type Rational = num_rational::BigRational;

/// Rational from a small numerator/denominator pair.
///
/// Panics when `denom == 0`.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Rational holding an integer value.
pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// 2^exp as an exact rational; `exp` may be negative.
pub fn pow2(exp: i64) -> Rational {
    let mag = BigInt::one() << exp.unsigned_abs();
    if exp >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

/// n! as a big integer.
pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for t in 2..=u64::from(n) {
        acc *= t;
    }
    acc
}

/// Binomial coefficient C(n, k), carried as a Rational.
///
/// Returns 0 for `k < 0` or `k > n`, matching the convention used by the
/// displayed formulas (out-of-range binomials simply drop terms).
pub fn binomial(n: u32, k: i64) -> Rational {
    if k < 0 || k > i64::from(n) {
        return Rational::zero();
    }
    // Multiplicative form; each partial product is an exact integer.
    let k = (k as u64).min(u64::from(n) - k as u64);
    let n = u64::from(n);
    let mut acc = BigInt::one();
    for t in 1..=k {
        acc = acc * (n - k + t) / t;
    }
    Rational::from_integer(acc)
}

// Memoized prefixes of the constant sequences. Writers extend the vectors
// under the lock, so concurrent callers only ever observe complete
// prefixes; the computed values never change once stored.
static BERNOULLI: LazyLock<Mutex<Vec<Rational>>> =
    LazyLock::new(|| Mutex::new(vec![Rational::one()]));
static EULER: LazyLock<Mutex<Vec<Rational>>> =
    LazyLock::new(|| Mutex::new(vec![Rational::one()]));

/// Bernoulli number B_n under the B_1 = -1/2 convention, from the defining
/// recurrence sum_{k=0}^{n} C(n+1,k) B_k = 0 with B_0 = 1.
pub fn bernoulli(n: u32) -> Rational {
    let mut table = BERNOULLI.lock().unwrap();
    while table.len() <= n as usize {
        let m = table.len() as u32; // next index to fill
        let mut sum = Rational::zero();
        for (k, b) in table.iter().enumerate() {
            sum += binomial(m + 1, k as i64) * b;
        }
        let next = -sum / integer(i64::from(m) + 1);
        table.push(next);
    }
    table[n as usize].clone()
}

/// Euler number E_{2m} (an integer, carried as Rational), from E_0 = 1 and
/// sum_{t=0}^{j} C(2j,2t) E_{2t} = 0 for j >= 1.
pub fn euler_even(m: u32) -> Rational {
    let mut table = EULER.lock().unwrap();
    while table.len() <= m as usize {
        let j = table.len() as u32;
        let mut sum = Rational::zero();
        for (t, e) in table.iter().enumerate() {
            sum += binomial(2 * j, 2 * t as i64) * e;
        }
        table.push(-sum);
    }
    table[m as usize].clone()
}

/// zeta(-(2m+1)), the zeta function at the negative odd integer -(2m+1),
/// expressed with Bernoulli numbers: zeta(-n) = -B_{n+1}/(n+1).
pub fn zeta_neg_odd(m: u32) -> Rational {
    -bernoulli(2 * m + 2) / integer(2 * i64::from(m) + 2)
}

/// Decimal rendering of an exact rational at `digits` fractional digits,
/// rounded half to even. The exact value stays authoritative; this string
/// is advisory output only.
pub fn to_decimal(value: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let numer = value.numer().abs();
    let denom = value.denom().clone();

    let scaled = numer * &scale;
    let mut quot = &scaled / &denom;
    let rem = &scaled % &denom;
    let twice = rem << 1;
    if twice > denom || (twice == denom && &quot % 2 == BigInt::one()) {
        quot += 1;
    }

    let sign = if value.is_negative() && !quot.is_zero() {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        return format!("{sign}{quot}");
    }
    let int_part = &quot / &scale;
    let frac_part = &quot % &scale;
    format!("{sign}{int_part}.{frac_part:0>width$}", width = digits as usize)
}
