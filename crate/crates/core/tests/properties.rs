//! Cross-module invariants: route agreement between the recurrence,
//! scaling and closed-form pipelines, containment of every exact value in
//! its brute-force oracle bracket, and randomized properties of the
//! oracle CDF and the rendering layer.

use num_traits::Signed;
use proptest::prelude::*;

use fabius::exact::{integer, pow2, ratio, to_decimal, Rational};
use fabius::{
    d_odd_closed_form, d_value, fabius_dyadic, moment, moment_bounds, sandwich_check,
    truncated_cdf, DyadicTable, Route, TableKind,
};

#[test]
fn routes_agree_bit_exactly() {
    for i in 0..=40 {
        let alternating = d_value(i, Route::Alternating);
        assert_eq!(alternating, d_value(i, Route::FromF), "mismatch at i = {i}");
        if i % 2 == 1 {
            assert_eq!(alternating, d_odd_closed_form(i), "closed form at i = {i}");
        }
    }
}

#[test]
fn oracle_brackets_every_f_value() {
    for k in 0..=12 {
        let bounds = sandwich_check(16, k).unwrap();
        assert!(
            bounds.contains(&fabius_dyadic(k)),
            "F(2^-{k}) escaped its bracket"
        );
        assert!(bounds.width() <= pow2(-15), "bracket too wide at k = {k}");
    }
}

#[test]
fn oracle_brackets_every_moment() {
    for n in 0..=10 {
        let bounds = moment_bounds(16, n).unwrap();
        assert!(bounds.contains(&moment(n)), "mu_{n} escaped its bracket");
        assert!(bounds.width() <= pow2(-15), "bracket too wide at n = {n}");
    }
}

#[test]
fn table_entries_are_consistent() {
    let table = DyadicTable::build(16, Route::FromF);
    assert_eq!(table.route(), Route::FromF);
    for i in 0..=16 {
        assert_eq!(table.d(i), &d_value(i, Route::Alternating));
        assert_eq!(
            table.mu(i),
            &(ratio(1, i64::from(i) + 1) - table.d(i)),
            "mu relation broke at {i}"
        );
        assert!(table.f(i).is_positive());
    }
}

#[test]
fn perturbing_any_entry_is_visible() {
    let table = DyadicTable::build(6, Route::Alternating);
    for kind in [TableKind::F, TableKind::D, TableKind::Mu] {
        let mut corrupted = table.clone();
        corrupted.perturb(kind, 3, &ratio(1, 97));
        let differs = match kind {
            TableKind::F => corrupted.f(3) != table.f(3),
            TableKind::D => corrupted.d(3) != table.d(3),
            TableKind::Mu => corrupted.mu(3) != table.mu(3),
        };
        assert!(differs);
    }
}

/// Rationals in [0, 1] with moderate denominators.
fn unit_rational() -> impl Strategy<Value = Rational> {
    (0u64..=1u64 << 20, 1u64..=1u64 << 20).prop_map(|(a, b)| {
        let (num, den) = if a <= b { (a, b) } else { (b, a) };
        Rational::new(num.into(), den.into())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncated_cdf_is_monotone_and_bounded(
        x in unit_rational(),
        y in unit_rational(),
        depth in 1u32..=8,
    ) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let f_lo = truncated_cdf(depth, &lo).unwrap();
        let f_hi = truncated_cdf(depth, &hi).unwrap();
        prop_assert!(f_lo <= f_hi);
        prop_assert!(f_lo >= Rational::from_integer(0.into()));
        prop_assert!(f_hi <= Rational::from_integer(1.into()));
    }

    #[test]
    fn truncated_cdf_dominates_deeper_truncations(
        x in unit_rational(),
        depth in 1u32..=7,
    ) {
        // adding one more uniform can only shift mass to the right
        let shallow = truncated_cdf(depth, &x).unwrap();
        let deep = truncated_cdf(depth + 1, &x).unwrap();
        prop_assert!(deep <= shallow);
    }

    #[test]
    fn decimal_rendering_is_within_half_ulp(
        x in unit_rational(),
        digits in 1u32..=8,
    ) {
        let rendered = to_decimal(&x, digits);
        let (int_part, frac_part) = rendered.split_once('.').unwrap();
        let scale = Rational::new(1.into(), num_bigint::BigInt::from(10u32).pow(digits));
        let reconstructed = integer(int_part.parse::<i64>().unwrap())
            + integer(frac_part.parse::<i64>().unwrap()) * &scale;
        let error = (reconstructed - &x).abs();
        prop_assert!(error * integer(2) <= scale);
    }
}
