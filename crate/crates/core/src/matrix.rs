//! Exact rational linear algebra for the matrix forms of the d-value
//! recurrences.
//!
//! The even-to-odd matrix M_i, the even-extension row R_i and the
//! odd-step matrix G_i = M_i (I_i; R_i) (2e_1; M_{i-1})^{-1} are built
//! entry-exactly from their formulas, the stacked matrix is inverted by
//! exact forward substitution (it is lower triangular with nonzero
//! diagonal, so no pseudo-inverse is needed), and the closed-form last
//! row of G_i is compared bit-exactly against the product route.
//!
//! Entry indices are 1-based throughout this module so the entry formulas
//! can be transcribed verbatim; the translation to 0-based storage is
//! confined to the accessors.

use num_traits::{One, Zero};

use crate::exact::{binomial, euler_even, integer, pow2, zeta_neg_odd, Rational};

/// Dense matrix of exact rationals, row-major, with 1-based accessors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 1..=n {
            *m.entry_mut(k, k) = Rational::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at row `r`, column `c`, both 1-based.
    pub fn entry(&self, r: usize, c: usize) -> &Rational {
        assert!(
            (1..=self.rows).contains(&r) && (1..=self.cols).contains(&c),
            "entry ({r}, {c}) outside {}x{} matrix",
            self.rows,
            self.cols
        );
        &self.data[(r - 1) * self.cols + (c - 1)]
    }

    pub fn entry_mut(&mut self, r: usize, c: usize) -> &mut Rational {
        assert!(
            (1..=self.rows).contains(&r) && (1..=self.cols).contains(&c),
            "entry ({r}, {c}) outside {}x{} matrix",
            self.rows,
            self.cols
        );
        &mut self.data[(r - 1) * self.cols + (c - 1)]
    }

    /// Row `r` (1-based) as a vector.
    pub fn row(&self, r: usize) -> RationalVector {
        RationalVector::new((1..=self.cols).map(|c| self.entry(r, c).clone()).collect())
    }

    /// Exact matrix product.
    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = RationalMatrix::zeros(self.rows, other.cols);
        for r in 1..=self.rows {
            for c in 1..=other.cols {
                let mut acc = Rational::zero();
                for t in 1..=self.cols {
                    acc += self.entry(r, t) * other.entry(t, c);
                }
                *out.entry_mut(r, c) = acc;
            }
        }
        out
    }

    /// Exact matrix-vector product.
    pub fn mul_vec(&self, v: &RationalVector) -> RationalVector {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        RationalVector::new(
            (1..=self.rows)
                .map(|r| {
                    let mut acc = Rational::zero();
                    for t in 1..=self.cols {
                        acc += self.entry(r, t) * v.entry(t);
                    }
                    acc
                })
                .collect(),
        )
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (1..=self.rows).all(|r| {
                (1..=self.cols).all(|c| {
                    let e = self.entry(r, c);
                    if r == c {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }
}

/// Vector of exact rationals with 1-based accessors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalVector {
    data: Vec<Rational>,
}

impl RationalVector {
    pub fn new(data: Vec<Rational>) -> Self {
        Self { data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Entry `j`, 1-based.
    pub fn entry(&self, j: usize) -> &Rational {
        assert!(
            (1..=self.data.len()).contains(&j),
            "entry {j} outside length-{} vector",
            self.data.len()
        );
        &self.data[j - 1]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    /// Entry-wise difference.
    pub fn sub(&self, other: &RationalVector) -> RationalVector {
        assert_eq!(self.len(), other.len(), "length mismatch in difference");
        RationalVector::new(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

/// The i x (i+1) matrix taking the even-indexed values (d_0, d_2, ..., d_{2i})
/// to the odd-indexed ones (d_1, d_3, ..., d_{2i-1}):
/// entry (k, j) = C(2k, 2j-2) / (4^k k). Rejects i = 0.
pub fn matrix_m(i: u32) -> RationalMatrix {
    assert!(i >= 1, "matrix_m: index must be >= 1");
    let mut m = RationalMatrix::zeros(i as usize, i as usize + 1);
    for k in 1..=i as usize {
        for j in 1..=i as usize + 1 {
            *m.entry_mut(k, j) = binomial(2 * k as u32, 2 * j as i64 - 2)
                / (pow2(2 * k as i64) * integer(k as i64));
        }
    }
    m
}

/// The length-i row extending the even-indexed values by one step:
/// entry j = C(2i, 2j-2) / ((4^i - 1)(2i - 2j + 3)). Rejects i = 0.
pub fn row_r(i: u32) -> RationalVector {
    assert!(i >= 1, "row_r: index must be >= 1");
    let i = i as i64;
    RationalVector::new(
        (1..=i)
            .map(|j| {
                binomial(2 * i as u32, 2 * j - 2)
                    / ((pow2(2 * i) - Rational::one()) * integer(2 * i - 2 * j + 3))
            })
            .collect(),
    )
}

/// The (i+1) x (i+1) matrix formed by stacking the row 2e_1 on top of M_i.
/// Lower triangular with diagonal (2, 1/(4*1), 1/(4^2*2), ..., 1/(4^i*i)).
pub fn stacked_matrix(i: u32) -> RationalMatrix {
    let n = i as usize + 1;
    let mut s = RationalMatrix::zeros(n, n);
    *s.entry_mut(1, 1) = integer(2);
    if i >= 1 {
        let m = matrix_m(i);
        for k in 1..=i as usize {
            for j in 1..=n {
                *s.entry_mut(k + 1, j) = m.entry(k, j).clone();
            }
        }
    }
    s
}

/// Exact inverse of [`stacked_matrix`]`(i)`, by forward substitution on the
/// lower triangle. Panics if a diagonal entry is zero (impossible for a
/// correctly built matrix; the check guards construction bugs) and verifies
/// the product against the identity before returning.
pub fn stacked_inverse(i: u32) -> RationalMatrix {
    let a = stacked_matrix(i);
    let n = a.rows();
    for r in 1..=n {
        assert!(
            !a.entry(r, r).is_zero(),
            "stacked matrix has zero diagonal at {r}; construction is broken"
        );
        for c in r + 1..=n {
            assert!(
                a.entry(r, c).is_zero(),
                "stacked matrix is not lower triangular at ({r}, {c})"
            );
        }
    }

    let mut inv = RationalMatrix::zeros(n, n);
    for j in 1..=n {
        *inv.entry_mut(j, j) = Rational::one() / a.entry(j, j);
        for r in j + 1..=n {
            let mut acc = Rational::zero();
            for t in j..r {
                acc += a.entry(r, t) * inv.entry(t, j);
            }
            *inv.entry_mut(r, j) = -acc / a.entry(r, r);
        }
    }

    assert!(
        a.mul(&inv).is_identity(),
        "inverse postcondition failed for stacked matrix {i}"
    );
    inv
}

/// The i x i odd-step matrix G_i = M_i (I_i; R_i) (2e_1; M_{i-1})^{-1},
/// which maps (2d_0, d_1, d_3, ..., d_{2i-3}) to (d_1, d_3, ..., d_{2i-1}).
/// Rejects i = 0.
pub fn matrix_g(i: u32) -> RationalMatrix {
    assert!(i >= 1, "matrix_g: index must be >= 1");
    let n = i as usize;
    // (I_i; R_i): identity with the extension row appended
    let mut extension = RationalMatrix::zeros(n + 1, n);
    for k in 1..=n {
        *extension.entry_mut(k, k) = Rational::one();
    }
    let r = row_r(i);
    for j in 1..=n {
        *extension.entry_mut(n + 1, j) = r.entry(j).clone();
    }
    matrix_m(i).mul(&extension).mul(&stacked_inverse(i - 1))
}

/// The closed form for the last row of G_i: entry j is
///
/// ```text
/// (E_{2(i-j+1)} / 4^{2-j} + zeta(2j-2i-3)/(2j-2i-3) * (1 - 4^{i-j+2}))
///   * 4 / (1 - 4^i)
///   * (C(2i-1, 2j-3)   for j != 1;   1/(2i) for j = 1)
/// ```
///
/// Rejects i = 0.
pub fn closed_form_row(i: u32) -> RationalVector {
    assert!(i >= 1, "closed_form_row: index must be >= 1");
    let i = i as i64;
    RationalVector::new(
        (1..=i)
            .map(|j| {
                // 2j - 2i - 3 = -(2m+1) with m = i - j + 1
                let m = (i - j + 1) as u32;
                let euler_part = euler_even(m) / pow2(2 * (2 - j));
                let zeta_part = zeta_neg_odd(m) / integer(2 * j - 2 * i - 3)
                    * (Rational::one() - pow2(2 * (i - j + 2)));
                let scale = integer(4) / (Rational::one() - pow2(2 * i));
                let weight = if j == 1 {
                    integer(1) / integer(2 * i)
                } else {
                    binomial(2 * i as u32 - 1, 2 * j - 3)
                };
                (euler_part + zeta_part) * scale * weight
            })
            .collect(),
    )
}

/// Entry-wise difference between the last row of the exact product
/// [`matrix_g`]`(i)` and [`closed_form_row`]`(i)`. All-zero on a correct
/// build; any nonzero entry pinpoints a disagreement between the matrix
/// pipeline and the closed form.
pub fn closed_form_residual(i: u32) -> RationalVector {
    matrix_g(i).row(i as usize).sub(&closed_form_row(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{integer, ratio};
    use crate::fabius::{d_value, Route};

    #[test]
    fn matrix_m_entries() {
        let m = matrix_m(1);
        assert_eq!((m.rows(), m.cols()), (1, 2));
        assert_eq!(m.entry(1, 1), &ratio(1, 4));
        assert_eq!(m.entry(1, 2), &ratio(1, 4));

        let m = matrix_m(2);
        assert_eq!(m.entry(2, 2), &ratio(3, 16));
        assert_eq!(m.entry(1, 3), &Rational::zero());
    }

    #[test]
    #[should_panic(expected = "must be >= 1")]
    fn matrix_m_rejects_zero() {
        matrix_m(0);
    }

    #[test]
    fn row_r_entries() {
        let r = row_r(1);
        assert_eq!(r.len(), 1);
        assert_eq!(r.entry(1), &ratio(1, 9));

        let r = row_r(2);
        assert_eq!(r.entry(1), &ratio(1, 75));
        assert_eq!(r.entry(2), &ratio(2, 15));
    }

    #[test]
    #[should_panic(expected = "must be >= 1")]
    fn row_r_rejects_zero() {
        row_r(0);
    }

    #[test]
    fn stacked_is_lower_triangular() {
        for i in 0..=10u32 {
            let s = stacked_matrix(i);
            for r in 1..=s.rows() {
                for c in 1..=s.cols() {
                    if c > r {
                        assert!(s.entry(r, c).is_zero(), "({r}, {c}) nonzero at i = {i}");
                    }
                }
                assert!(!s.entry(r, r).is_zero());
            }
        }
    }

    #[test]
    fn inverse_small_cases() {
        let inv = stacked_inverse(0);
        assert_eq!(inv.entry(1, 1), &ratio(1, 2));

        let inv = stacked_inverse(1);
        assert_eq!(inv.entry(1, 1), &ratio(1, 2));
        assert_eq!(inv.entry(1, 2), &Rational::zero());
        assert_eq!(inv.entry(2, 1), &ratio(-1, 2));
        assert_eq!(inv.entry(2, 2), &integer(4));
    }

    #[test]
    fn inverse_certificate_both_sides() {
        for i in 0..=8 {
            let a = stacked_matrix(i);
            let inv = stacked_inverse(i);
            assert!(a.mul(&inv).is_identity(), "A * inv != I at i = {i}");
            assert!(inv.mul(&a).is_identity(), "inv * A != I at i = {i}");
        }
    }

    #[test]
    fn odd_step_matrix_small_cases() {
        let g = matrix_g(1);
        assert_eq!((g.rows(), g.cols()), (1, 1));
        assert_eq!(g.entry(1, 1), &ratio(5, 36));

        let g = matrix_g(2);
        assert_eq!(g.entry(2, 1), &ratio(-2, 25));
        assert_eq!(g.entry(2, 2), &ratio(23, 30));
    }

    #[test]
    fn odd_step_matrix_reproduces_d() {
        // G_2 (2d_0, d_1)^T = (d_1, d_3)^T
        let g = matrix_g(2);
        let input = RationalVector::new(vec![integer(1), d_value(1, Route::Alternating)]);
        let out = g.mul_vec(&input);
        assert_eq!(out.entry(1), &d_value(1, Route::Alternating));
        assert_eq!(out.entry(2), &d_value(3, Route::Alternating));
    }

    #[test]
    fn closed_form_row_examples() {
        let row = closed_form_row(1);
        assert_eq!(row.entry(1), &ratio(5, 36));

        let row = closed_form_row(2);
        assert_eq!(row.entry(1), &ratio(-2, 25));
        assert_eq!(row.entry(2), &ratio(23, 30));
    }

    #[test]
    fn closed_form_matches_product() {
        for i in 1..=8 {
            let residual = closed_form_residual(i);
            assert!(residual.is_zero(), "nonzero residual row at i = {i}");
        }
    }

    #[test]
    fn vector_accessors() {
        let v = RationalVector::new(vec![integer(1), integer(2)]);
        assert_eq!(v.len(), 2);
        assert!(!v.is_empty());
        assert_eq!(v.entry(2), &integer(2));
        assert!(v.sub(&v).is_zero());
    }
}
