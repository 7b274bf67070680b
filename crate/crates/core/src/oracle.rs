//! Independent brute-force verification channel.
//!
//! On [0,1] the Fabius function equals the cumulative distribution of
//! sum_{n>=1} 2^{-n} U_n with the U_n independent uniform on [0,1].
//! Truncating the sum at depth N gives an exactly computable piecewise
//! polynomial CDF F_N; since the discarded tail lies in [0, 2^{-N}],
//!
//! ```text
//! F_N(x - 2^{-N}) <= F(x) <= F_N(x)
//! ```
//!
//! and the corresponding inequalities hold for the moments. Everything
//! here is computed by plain inclusion-exclusion over the 2^N uniform
//! subsets, entirely in exact rational arithmetic, with no input from the
//! recurrence pipeline it is used to check.

use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exact::{binomial, factorial, integer, pow2, Rational};

/// Default cap on the truncation depth; 2^N inclusion-exclusion terms.
pub const DEFAULT_DEPTH_CAP: u32 = 16;

static DEPTH_CAP: AtomicU32 = AtomicU32::new(DEFAULT_DEPTH_CAP);

/// Current cap on the oracle truncation depth.
pub fn depth_cap() -> u32 {
    DEPTH_CAP.load(Ordering::Relaxed)
}

/// Override the depth cap (process-wide). The CLI wires this to the
/// FABIUS_DEPTH_CAP environment variable.
pub fn set_depth_cap(cap: u32) {
    DEPTH_CAP.store(cap, Ordering::Relaxed);
}

/// Exact lower/upper bracket produced by the truncated-CDF oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsPair {
    pub lower: Rational,
    pub upper: Rational,
}

impl BoundsPair {
    pub fn new(lower: Rational, upper: Rational) -> Self {
        assert!(lower <= upper, "bounds pair out of order");
        Self { lower, upper }
    }

    pub fn contains(&self, value: &Rational) -> bool {
        &self.lower <= value && value <= &self.upper
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    /// Requested depth is zero or exceeds the configured cap.
    DepthOutOfRange { depth: u32, cap: u32 },
    /// Evaluation point outside [0, 1].
    ArgumentOutOfRange(Rational),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::DepthOutOfRange { depth, cap } => {
                write!(f, "oracle depth {depth} outside 1..={cap}")
            }
            OracleError::ArgumentOutOfRange(x) => {
                write!(f, "oracle argument {x} outside [0, 1]")
            }
        }
    }
}

impl std::error::Error for OracleError {}

fn check_depth(depth: u32) -> Result<(), OracleError> {
    let cap = depth_cap();
    if depth == 0 || depth > cap {
        return Err(OracleError::DepthOutOfRange { depth, cap });
    }
    Ok(())
}

/// F_N(x) = P(sum_{n=1}^{N} 2^{-n} U_n <= x), exactly.
///
/// Inclusion-exclusion over subsets S of {1..N}:
///
/// ```text
/// F_N(x) = 2^{N(N+1)/2} / N! * sum_S (-1)^{|S|} max(0, x - c_S)^N
/// ```
///
/// with c_S = sum_{n in S} 2^{-n}. Subsets are enumerated through the
/// bijection S -> m = sum_{n in S} 2^{N-n}, which maps |S| to the popcount
/// of m and c_S to m/2^N.
pub fn truncated_cdf(depth: u32, x: &Rational) -> Result<Rational, OracleError> {
    check_depth(depth)?;
    if x.is_negative() || x > &Rational::one() {
        return Err(OracleError::ArgumentOutOfRange(x.clone()));
    }

    let n = depth;
    let two_n = BigInt::one() << n;
    let p = x.numer();
    let q = x.denom();

    // x - m/2^N = (p*2^N - m*q) / (q*2^N); only m with a positive
    // numerator contribute, i.e. m < x * 2^N.
    let mut acc = BigInt::zero();
    let mut u = p * &two_n; // p*2^N - m*q, updated incrementally
    let mut m: u64 = 0;
    while m < 1u64 << n {
        if !u.is_positive() {
            break;
        }
        let term = u.pow(n);
        if m.count_ones().is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
        u -= q;
        m += 1;
    }

    let numer = acc * (BigInt::one() << (u64::from(n) * u64::from(n + 1) / 2));
    let denom = factorial(n) * (q * two_n).pow(n);
    Ok(Rational::new(numer, denom))
}

/// Sandwich bracket for F(2^{-k}) at truncation depth N:
/// lower = F_N(max(0, 2^{-k} - 2^{-N})), upper = F_N(2^{-k}).
pub fn sandwich_check(depth: u32, k: u32) -> Result<BoundsPair, OracleError> {
    let x = pow2(-i64::from(k));
    let shifted = &x - pow2(-i64::from(depth));
    let low_at = if shifted.is_negative() {
        Rational::zero()
    } else {
        shifted
    };
    let lower = truncated_cdf(depth, &low_at)?;
    let upper = truncated_cdf(depth, &x)?;
    Ok(BoundsPair::new(lower, upper))
}

/// Exact bracket for the moment mu_n = int_0^1 F(x) x^n dx:
///
/// ```text
/// int_0^1 F_N(x - 2^{-N}) x^n dx <= mu_n <= int_0^1 F_N(x) x^n dx
/// ```
///
/// Each side integrates the inclusion-exclusion pieces term by term,
/// using int_c^1 (x-c)^N x^n dx = sum_t C(n,t) c^{n-t} (1-c)^{N+t+1} / (N+t+1).
pub fn moment_bounds(depth: u32, n: u32) -> Result<BoundsPair, OracleError> {
    check_depth(depth)?;
    let upper = truncated_moment(depth, n, 0);
    let lower = truncated_moment(depth, n, 1);
    Ok(BoundsPair::new(lower, upper))
}

/// int_0^1 F_N(x - shift*2^{-N}) x^n dx, exactly.
fn truncated_moment(depth: u32, n: u32, shift: u64) -> Rational {
    let nn = depth;
    let two_n = BigInt::one() << nn;

    // For cutoff c = (m+shift)/2^N the integral piece expands to
    //   sum_t C(n,t) a^{n-t} b^{N+t+1} / (2^{N(n+N+1)} (N+t+1))
    // with a = m+shift, b = 2^N - a. Accumulate, per t, the signed
    // integer sums over all 2^N subsets.
    let mut sums = vec![BigInt::zero(); n as usize + 1];
    for m in 0..1u64 << nn {
        let a = BigInt::from(m + shift);
        let b = &two_n - &a;
        if !b.is_positive() {
            continue; // cutoff at or beyond 1 contributes nothing
        }
        let negative = m.count_ones() % 2 == 1;

        let mut a_pows = Vec::with_capacity(n as usize + 1);
        a_pows.push(BigInt::one());
        for _ in 0..n {
            let next = a_pows.last().unwrap() * &a;
            a_pows.push(next);
        }
        let mut b_pow = b.pow(nn + 1);
        for (t, sum) in sums.iter_mut().enumerate() {
            let term = &a_pows[n as usize - t] * &b_pow;
            if negative {
                *sum -= term;
            } else {
                *sum += term;
            }
            b_pow *= &b;
        }
    }

    let mut total = Rational::zero();
    for (t, sum) in sums.into_iter().enumerate() {
        total += binomial(n, t as i64) * Rational::from_integer(sum)
            / integer(i64::from(nn) + t as i64 + 1);
    }
    let scale = pow2(i64::from(nn) * (i64::from(nn) + 1) / 2)
        / Rational::from_integer(factorial(nn));
    let shrink = pow2(-i64::from(nn) * (i64::from(n) + i64::from(nn) + 1));
    total * scale * shrink
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn cdf_single_uniform() {
        // depth 1: CDF of U/2 is 2x on [0, 1/2]
        assert_eq!(truncated_cdf(1, &ratio(1, 4)).unwrap(), ratio(1, 2));
        assert_eq!(truncated_cdf(1, &ratio(1, 2)).unwrap(), integer(1));
    }

    #[test]
    fn cdf_two_uniforms() {
        // area of {u1/2 + u2/4 <= 1/4} in the unit square
        assert_eq!(truncated_cdf(2, &ratio(1, 4)).unwrap(), ratio(1, 4));
    }

    #[test]
    fn cdf_support_endpoints() {
        for depth in 1..=8 {
            assert_eq!(truncated_cdf(depth, &integer(0)).unwrap(), integer(0));
            assert_eq!(truncated_cdf(depth, &integer(1)).unwrap(), integer(1));
        }
    }

    #[test]
    fn cdf_rejects_bad_inputs() {
        assert!(matches!(
            truncated_cdf(0, &ratio(1, 2)),
            Err(OracleError::DepthOutOfRange { .. })
        ));
        assert!(matches!(
            truncated_cdf(depth_cap() + 1, &ratio(1, 2)),
            Err(OracleError::DepthOutOfRange { .. })
        ));
        assert!(matches!(
            truncated_cdf(4, &ratio(-1, 2)),
            Err(OracleError::ArgumentOutOfRange(_))
        ));
        assert!(matches!(
            truncated_cdf(4, &ratio(3, 2)),
            Err(OracleError::ArgumentOutOfRange(_))
        ));
    }

    #[test]
    fn cdf_monotone_on_grid() {
        // 64-point rational grid
        let mut prev = Rational::zero();
        for t in 0..=64 {
            let x = ratio(t, 64);
            let value = truncated_cdf(8, &x).unwrap();
            assert!(value >= prev, "F_8 not monotone at {x}");
            prev = value;
        }
    }

    #[test]
    fn sandwich_shallow() {
        let bounds = sandwich_check(2, 2).unwrap();
        assert_eq!(bounds.lower, integer(0));
        assert_eq!(bounds.upper, ratio(1, 4));
        assert!(bounds.contains(&ratio(5, 72)));
    }

    #[test]
    fn sandwich_deepening_tightens() {
        let mut prev_width: Option<Rational> = None;
        for depth in 4..=10 {
            let bounds = sandwich_check(depth, 2).unwrap();
            assert!(bounds.contains(&ratio(5, 72)));
            let width = bounds.width();
            if let Some(prev) = prev_width {
                assert!(width <= prev, "width grew at depth {depth}");
            }
            prev_width = Some(width);
        }
    }

    #[test]
    fn moment_bounds_shallow() {
        // mu_0 = 1/2, mu_1 = 13/36, mu_2 = 5/18
        for (n, expected) in [(0, ratio(1, 2)), (1, ratio(13, 36)), (2, ratio(5, 18))] {
            let bounds = moment_bounds(10, n).unwrap();
            assert!(bounds.contains(&expected), "mu_{n} escaped oracle bounds");
            assert!(bounds.width() <= pow2(-9));
        }
    }

    #[test]
    fn moment_zero_matches_cdf_mass() {
        // int_0^1 F_N(x) dx computed two ways: the moment machinery and
        // 1 - E[S_N] = 1 - (1 - 2^{-N}) = 2^{-N} short of one... rather,
        // E[S_N] = sum 2^{-n-1} = (1 - 2^{-N})/2, and
        // int_0^1 F_N = 1 - E[S_N].
        for depth in 1..=8 {
            let upper = truncated_moment(depth, 0, 0);
            let expected = integer(1) - (integer(1) - pow2(-i64::from(depth))) / integer(2);
            assert_eq!(upper, expected);
        }
    }
}
