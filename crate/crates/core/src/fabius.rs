//! The scalar pipeline: dyadic values F(2^{-k}), the polynomial coefficient
//! family behind them, the scaled sequence d_i = 2^{i(i+1)/2} i! F(2^{-i-1})
//! by its independent recurrence routes, and the moments
//! mu_n = 1/(n+1) - d_n.
//!
//! Only the anchors F(0) = 0, F(1/2) = 1/2, F(1) = 1 are assumed; every
//! other value is produced bottom-up from the two mutually recursive
//! dyadic formulas, which this module memoizes so that the even/odd mutual
//! recursion never recomputes a value.

use std::fmt;
use std::sync::{LazyLock, Mutex};

use num_traits::{One, Zero};

use crate::exact::{
    bernoulli, binomial, euler_even, factorial, integer, pow2, ratio, zeta_neg_odd, Rational,
};

/// Computation route for [`d_value`]. Both routes must agree bit-exactly;
/// that agreement is one of the crate's core contracts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// The alternating recurrences: even-indexed values from earlier even
    /// ones, odd-indexed values from the evens.
    Alternating,
    /// Direct scaling of a memoized dyadic value: 2^{i(i+1)/2} i! F(2^{-i-1}).
    FromF,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Alternating => "alternating",
            Route::FromF => "from_f",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// F(2^{-k}) for odd k, stored at position (k-1)/2. Odd-indexed values only
// depend on shallower odd-indexed ones, so this table is filled strictly
// bottom-up; even-indexed values are assembled from it on demand.
static F_ODD: LazyLock<Mutex<Vec<Rational>>> = LazyLock::new(|| Mutex::new(vec![ratio(1, 2)]));

fn fabius_dyadic_odd(k: u32) -> Rational {
    debug_assert!(k % 2 == 1);
    let mut table = F_ODD.lock().unwrap();
    while table.len() <= (k as usize - 1) / 2 {
        // next odd target k' = i + 1 with i even, i >= 2:
        // F(2^{-i-1}) = sum_{j=1}^{i/2} 4^{j(j-i)} F(2^{2j-i-1})
        //               / ((2^{i+j} - 2^j)(2j+1)!)
        let i = 2 * table.len() as i64;
        let mut sum = Rational::zero();
        for j in 1..=i / 2 {
            let arg = i + 1 - 2 * j; // odd, < i + 1
            let shallower = &table[(arg as usize - 1) / 2];
            let numer = pow2(2 * j * (j - i)) * shallower;
            let denom = (pow2(i + j) - pow2(j))
                * Rational::from_integer(factorial(2 * j as u32 + 1));
            sum += numer / denom;
        }
        table.push(sum);
    }
    table[(k as usize - 1) / 2].clone()
}

/// F(2^{-k}), exactly.
///
/// Anchored at F(2^{-1}) = 1/2 and built bottom-up from the two mutually
/// recursive dyadic formulas; for even i,
///
/// ```text
/// F(2^{-i})   = sum_{j=0}^{i/2} 4^{j(j-i)} F(2^{2j-i-1}) / (2^{j-1} (2j)!)
/// F(2^{-i-1}) = sum_{j=1}^{i/2} 4^{j(j-i)} F(2^{2j-i-1}) / ((2^{i+j} - 2^j)(2j+1)!)
/// ```
pub fn fabius_dyadic(k: u32) -> Rational {
    if k % 2 == 1 {
        return fabius_dyadic_odd(k);
    }
    // even target k = i; pulls odd-indexed values up to i + 1
    let i = i64::from(k);
    let mut sum = Rational::zero();
    for j in 0..=i / 2 {
        let arg = i + 1 - 2 * j;
        let numer = pow2(2 * j * (j - i) - (j - 1)) * fabius_dyadic_odd(arg as u32);
        sum += numer / Rational::from_integer(factorial(2 * j as u32));
    }
    sum
}

/// Coefficient of x^j in the scale-i polynomial (see [`poly`]).
///
/// Zero whenever `j >= i` or `i - j` is even; otherwise
/// 2^{(1-i)j} F(2^{j-i}) / (2^{(1-j)j/2 - 1} j!). The closed form agrees
/// with the integration recurrence c_i(j) = 2^{1-i} c_{i-1}(j-1) / j seeded
/// by c_m(0) = 2 F(2^{-m}) for odd m (zero for even m).
///
/// Panics for `i = 0`: the index-0 polynomial is identically zero and has
/// no coefficient family.
pub fn poly_coeff(i: u32, j: u32) -> Rational {
    assert!(i >= 1, "poly_coeff: index i must be >= 1");
    if j >= i || (i - j).is_multiple_of(2) {
        return Rational::zero();
    }
    let (i, j) = (i64::from(i), i64::from(j));
    let exp = (1 - i) * j - ((1 - j) * j / 2 - 1);
    pow2(exp) * fabius_dyadic((i - j) as u32) / Rational::from_integer(factorial(j as u32))
}

/// Dense polynomial with exact rational coefficients; index j holds the
/// coefficient of x^j. The zero polynomial has empty support.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    /// Build from coefficients, trimming trailing zeros so that equal
    /// polynomials compare equal structurally.
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest index with a nonzero coefficient; `None` for the zero
    /// polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of x^j (zero beyond the stored support).
    pub fn coeff(&self, j: usize) -> Rational {
        self.coeffs.get(j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Exact evaluation by Horner's scheme.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| integer(j as i64) * c)
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn scale(&self, factor: &Rational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| factor * c).collect())
    }
}

/// The scale-i polynomial: coefficient j equals [`poly_coeff`]`(i, j)`;
/// index 0 gives the zero polynomial. Its value at 1 is F(2^{1-i}) and its
/// derivative is 2^{1-i} times the scale-(i-1) polynomial.
pub fn poly(i: u32) -> Polynomial {
    if i == 0 {
        return Polynomial::zero();
    }
    Polynomial::new((0..i).map(|j| poly_coeff(i, j)).collect())
}

// d_{2t} at position t. Even-indexed values close over themselves:
// d_i = sum_{j=0}^{i/2-1} C(i,2j) d_{2j} / ((2^i - 1)(i - 2j + 1)).
static D_EVEN: LazyLock<Mutex<Vec<Rational>>> = LazyLock::new(|| Mutex::new(vec![ratio(1, 2)]));

fn d_even(t: usize) -> Rational {
    let mut table = D_EVEN.lock().unwrap();
    while table.len() <= t {
        let i = 2 * table.len() as i64;
        let mut sum = Rational::zero();
        for (j, earlier) in table.iter().enumerate() {
            let j = j as i64;
            sum += binomial(i as u32, 2 * j) * earlier / integer(i - 2 * j + 1);
        }
        let value = sum / (pow2(i) - Rational::one());
        table.push(value);
    }
    table[t].clone()
}

/// The scaled dyadic value d_i = 2^{i(i+1)/2} i! F(2^{-i-1}), by the
/// requested route. The routes are independent and must agree exactly.
///
/// Route [`Route::Alternating`] seeds d_0 = 1/2 and uses, for odd i,
/// d_i = sum_{j=0}^{(i+1)/2} C(i+1,2j) d_{2j} / (2^i (i+1)), and for even
/// i >= 2 the even-only recurrence documented on the internal table.
pub fn d_value(i: u32, route: Route) -> Rational {
    match route {
        Route::FromF => {
            let i = i64::from(i);
            pow2(i * (i + 1) / 2)
                * Rational::from_integer(factorial(i as u32))
                * fabius_dyadic(i as u32 + 1)
        }
        Route::Alternating => {
            if i.is_multiple_of(2) {
                return d_even(i as usize / 2);
            }
            let i = i64::from(i);
            let mut sum = Rational::zero();
            for j in 0..=(i + 1) / 2 {
                sum += binomial(i as u32 + 1, 2 * j) * d_even(j as usize);
            }
            sum / (pow2(i) * integer(i + 1))
        }
    }
}

/// Odd-indexed d_i from the closed-form recurrence over zeta values and
/// Euler numbers:
///
/// ```text
/// d_i = sum_{j in {-2, 0, 2, ...}, j < i-1}
///       (zeta(j-i)/(j-i) - 2^j E_{i-j-1} / (2^{i-j+1} - 1))
///       * (2^{i-j+3} - 4) / (2^{i+1} - 1)
///       * (C(i, j+1) d_{j+1}   for j != -2;   1/(i+1) for j = -2)
/// ```
///
/// The earlier odd-indexed values d_{j+1} are taken from the shared
/// alternating-route table, so this route stays independent of itself.
///
/// Panics for even (or zero) `i`.
pub fn d_odd_closed_form(i: u32) -> Rational {
    assert!(i % 2 == 1, "closed-form d recurrence needs odd i, got {i}");
    let i = i64::from(i);
    let mut sum = Rational::zero();
    let mut j = -2i64;
    while j < i - 1 {
        // j - i = -(2m+1) and i - j - 1 = 2m for the same m
        let m = ((i - j - 1) / 2) as u32;
        let zeta_part = zeta_neg_odd(m) / integer(j - i);
        let euler_part = pow2(j) * euler_even(m) / (pow2(i - j + 1) - Rational::one());
        let weight = (pow2(i - j + 3) - integer(4)) / (pow2(i + 1) - Rational::one());
        let basis = if j == -2 {
            ratio(1, i + 1)
        } else {
            binomial(i as u32, j + 1) * d_value((j + 1) as u32, Route::Alternating)
        };
        sum += (zeta_part - euler_part) * weight * basis;
        j += 2;
    }
    sum
}

/// Moment of the Fabius function: mu_n = int_0^1 F(x) x^n dx = 1/(n+1) - d_n.
pub fn moment(n: u32) -> Rational {
    ratio(1, i64::from(n) + 1) - d_value(n, Route::Alternating)
}

/// Residual of the coefficient-sum identity
/// sum_{j=0}^{i+1} c_{i+2}(j) = F(2^{-i-1}): exactly zero on a correct
/// pipeline, since the scale-(i+2) polynomial evaluates to F(2^{-i-1}) at 1.
pub fn coeff_sum_residual(i: u32) -> Rational {
    let mut sum = Rational::zero();
    for j in 0..=i + 1 {
        sum += poly_coeff(i + 2, j);
    }
    sum - fabius_dyadic(i + 1)
}

/// sum_{m=0}^{j} C(2j,2m) E_{2m}: the coefficient-level form of
/// cosh(z) sech(z) = 1. Equals 1 for j = 0 and 0 for every j >= 1.
pub fn euler_identity_sum(j: u32) -> Rational {
    let mut sum = Rational::zero();
    for m in 0..=j {
        sum += binomial(2 * j, 2 * i64::from(m)) * euler_even(m);
    }
    sum
}

/// 1 + sum_{m=0}^{j} B_{2m+2} (4^{m+1} - 16^{m+1}) (2j+1)! / ((2j-2m)! (2m+2)!):
/// the coefficient-level form of the sinh-cancellation identity; exactly
/// zero for every j.
pub fn bernoulli_identity_sum(j: u32) -> Rational {
    let j = i64::from(j);
    let mut sum = Rational::one();
    for m in 0..=j {
        let weight = Rational::from_integer(factorial(2 * j as u32 + 1))
            / Rational::from_integer(
                factorial((2 * j - 2 * m) as u32) * factorial(2 * m as u32 + 2),
            );
        sum += bernoulli(2 * m as u32 + 2) * (pow2(2 * m + 2) - pow2(4 * m + 4)) * weight;
    }
    sum
}

/// Which of the memoized value tables an entry belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    /// k -> F(2^{-k})
    F,
    /// i -> d_i
    D,
    /// n -> mu_n
    Mu,
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableKind::F => "f",
            TableKind::D => "d",
            TableKind::Mu => "mu",
        })
    }
}

/// Materialized tables of F(2^{-k}), d_i and mu_n up to a maximum index,
/// tagged with the route the d-values came from. The F table extends one
/// index past `max_index` so that the scaling identity
/// d_i = 2^{i(i+1)/2} i! F(2^{-i-1}) can be checked on every entry.
#[derive(Clone, Debug)]
pub struct DyadicTable {
    route: Route,
    f: Vec<Rational>,
    d: Vec<Rational>,
    mu: Vec<Rational>,
}

impl DyadicTable {
    pub fn build(max_index: u32, route: Route) -> Self {
        let f = (0..=max_index + 1).map(fabius_dyadic).collect();
        let d: Vec<_> = (0..=max_index).map(|i| d_value(i, route)).collect();
        let mu = d
            .iter()
            .enumerate()
            .map(|(n, d)| ratio(1, n as i64 + 1) - d)
            .collect();
        Self { route, f, d, mu }
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn max_index(&self) -> u32 {
        self.d.len() as u32 - 1
    }

    pub fn f(&self, k: u32) -> &Rational {
        &self.f[k as usize]
    }

    pub fn d(&self, i: u32) -> &Rational {
        &self.d[i as usize]
    }

    pub fn mu(&self, n: u32) -> &Rational {
        &self.mu[n as usize]
    }

    /// Add `delta` to a single entry. Fault injection for mutation tests
    /// of the verification suite; never used on the happy path.
    pub fn perturb(&mut self, kind: TableKind, index: u32, delta: &Rational) {
        let entry = match kind {
            TableKind::F => &mut self.f[index as usize],
            TableKind::D => &mut self.d[index as usize],
            TableKind::Mu => &mut self.mu[index as usize],
        };
        *entry += delta;
    }
}
