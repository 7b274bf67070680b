//! Exact computation of Fabius-function values at dyadic points.
//!
//! The crate evaluates F(2^{-k}), the scaled sequence
//! d_i = 2^{i(i+1)/2} i! F(2^{-i-1}) and the moments
//! mu_n = int_0^1 F(x) x^n dx = 1/(n+1) - d_n, entirely in
//! arbitrary-precision rational arithmetic, by several independent routes:
//!
//! * the alternating recurrences between even- and odd-indexed values
//!   ([`fabius`]), plus the closed-form recurrence over zeta values and
//!   Euler numbers for the odd-indexed d_i;
//! * the exact matrix pipeline G_i = M_i (I_i; R_i) (2e_1; M_{i-1})^{-1}
//!   and the closed form for its last row ([`matrix`]);
//! * a brute-force truncated-CDF oracle bracketing every value from the
//!   uniform-sum representation of F ([`oracle`]).
//!
//! All routes must agree bit-exactly; [`verify`] bundles the whole
//! invariant suite behind one call.

pub mod exact;
pub mod fabius;
pub mod matrix;
pub mod oracle;
pub mod verify;

pub use exact::{bernoulli, binomial, euler_even, to_decimal, zeta_neg_odd, Rational};
pub use fabius::{
    bernoulli_identity_sum, coeff_sum_residual, d_odd_closed_form, d_value, euler_identity_sum,
    fabius_dyadic, moment, poly, poly_coeff, DyadicTable, Polynomial, Route, TableKind,
};
pub use matrix::{
    closed_form_residual, closed_form_row, matrix_g, matrix_m, row_r, stacked_inverse,
    stacked_matrix, RationalMatrix, RationalVector,
};
pub use oracle::{
    depth_cap, moment_bounds, sandwich_check, set_depth_cap, truncated_cdf, BoundsPair,
    OracleError, DEFAULT_DEPTH_CAP,
};
pub use verify::{run_checks, run_verification, CheckReport, Fault, VerificationContext};
