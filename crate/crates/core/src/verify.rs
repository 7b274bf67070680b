//! The bundled invariant suite behind the CLI `verify` subcommand.
//!
//! A verification run materializes the F/d/mu tables once, then replays
//! every cross-route identity against them: each check either recomputes
//! an entry through an independent route or ties several table entries
//! together, so corrupting any single entry fails at least one check.
//! Oracle brackets and the matrix pipeline are prepared separately from
//! the table checks ([`VerificationContext::prepare`]) because they are
//! expensive and independent of the tables; mutation tests can then
//! re-run the cheap table checks many times against one context.

use num_traits::{One, Signed, Zero};

use crate::exact::{
    bernoulli, binomial, euler_even, factorial, integer, pow2, ratio, Rational,
};
use crate::fabius::{
    bernoulli_identity_sum, d_odd_closed_form, euler_identity_sum, poly, poly_coeff, DyadicTable,
    Route, TableKind,
};
use crate::matrix::{closed_form_residual, matrix_g, stacked_inverse, stacked_matrix, RationalMatrix, RationalVector};
use crate::oracle::{moment_bounds, sandwich_check, BoundsPair, OracleError};

/// Outcome of one invariant family.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    fn pass(name: &'static str, detail: impl Into<String>) -> Self {
        CheckReport {
            name,
            passed: true,
            detail: detail.into(),
        }
    }

    fn fail(name: &'static str, detail: impl Into<String>) -> Self {
        CheckReport {
            name,
            passed: false,
            detail: detail.into(),
        }
    }
}

/// A single-entry corruption applied to the freshly built tables before
/// the checks run. Exists so the suite's one guarantee -- any corrupted
/// entry is detected -- can itself be tested.
#[derive(Clone, Copy, Debug)]
pub struct Fault {
    pub table: TableKind,
    pub index: u32,
}

/// Everything a verification run needs that does not depend on the tables:
/// oracle brackets at the requested depth and the exact odd-step matrices.
pub struct VerificationContext {
    max_index: u32,
    oracle_depth: u32,
    f_bounds: Vec<BoundsPair>,
    mu_bounds: Vec<BoundsPair>,
    g_matrices: Vec<RationalMatrix>,
}

impl VerificationContext {
    /// Oracle brackets cover k <= min(max_index, 12) and n <= min(max_index, 10);
    /// deeper table entries are still cross-checked by the exact routes.
    pub fn prepare(max_index: u32, oracle_depth: u32) -> Result<Self, OracleError> {
        let f_bounds = (0..=max_index.min(12))
            .map(|k| sandwich_check(oracle_depth, k))
            .collect::<Result<_, _>>()?;
        let mu_bounds = (0..=max_index.min(10))
            .map(|n| moment_bounds(oracle_depth, n))
            .collect::<Result<_, _>>()?;
        let g_matrices = (1..=max_index.div_ceil(2)).map(matrix_g).collect();
        Ok(Self {
            max_index,
            oracle_depth,
            f_bounds,
            mu_bounds,
            g_matrices,
        })
    }

    pub fn max_index(&self) -> u32 {
        self.max_index
    }

    pub fn oracle_depth(&self) -> u32 {
        self.oracle_depth
    }
}

/// Run every check against freshly built tables (optionally corrupted by
/// `fault`). Reports come back in a fixed order, one per invariant family.
pub fn run_checks(ctx: &VerificationContext, fault: Option<Fault>) -> Vec<CheckReport> {
    let mut table = DyadicTable::build(ctx.max_index, Route::Alternating);
    if let Some(fault) = fault {
        table.perturb(fault.table, fault.index, &ratio(1, 97));
    }

    vec![
        check_anchors(&table),
        check_scaling_identity(&table),
        check_alternating_recurrence(&table),
        check_closed_form_route(&table),
        check_moment_relation(&table),
        check_f_monotonic(&table),
        check_coeff_sum(&table),
        check_coefficient_structure(ctx.max_index),
        check_euler_identity(ctx.max_index),
        check_bernoulli_identity(ctx.max_index),
        check_constant_recurrences(ctx.max_index),
        check_stacked_inverse(ctx.max_index),
        check_closed_form_rows(ctx.max_index),
        check_matrix_consistency(ctx, &table),
        check_f_containment(ctx, &table),
        check_moment_containment(ctx, &table),
    ]
}

/// Convenience wrapper: prepare a context and run the checks once.
pub fn run_verification(
    max_index: u32,
    oracle_depth: u32,
    fault: Option<Fault>,
) -> Result<Vec<CheckReport>, OracleError> {
    let ctx = VerificationContext::prepare(max_index, oracle_depth)?;
    Ok(run_checks(&ctx, fault))
}

fn check_anchors(table: &DyadicTable) -> CheckReport {
    const NAME: &str = "anchors";
    if table.f(0) != &Rational::one() {
        return CheckReport::fail(NAME, format!("F(1) = {}, expected 1", table.f(0)));
    }
    if table.f(1) != &ratio(1, 2) {
        return CheckReport::fail(NAME, format!("F(1/2) = {}, expected 1/2", table.f(1)));
    }
    if table.d(0) != &ratio(1, 2) {
        return CheckReport::fail(NAME, format!("d_0 = {}, expected 1/2", table.d(0)));
    }
    CheckReport::pass(NAME, "F(1) = 1, F(1/2) = 1/2, d_0 = 1/2")
}

fn check_scaling_identity(table: &DyadicTable) -> CheckReport {
    const NAME: &str = "scaling-identity";
    for i in 0..=table.max_index() {
        let scale =
            pow2(i64::from(i) * (i64::from(i) + 1) / 2) * Rational::from_integer(factorial(i));
        if table.d(i) != &(scale * table.f(i + 1)) {
            return CheckReport::fail(NAME, format!("d_{i} != 2^(i(i+1)/2) i! F(2^-{})", i + 1));
        }
    }
    CheckReport::pass(
        NAME,
        format!(
            "d_i = 2^(i(i+1)/2) i! F(2^-i-1) for i <= {}",
            table.max_index()
        ),
    )
}

fn check_alternating_recurrence(table: &DyadicTable) -> CheckReport {
    const NAME: &str = "alternating-recurrence";
    let max = table.max_index();
    for i in 0..=max {
        let ii = i64::from(i);
        if i % 2 == 0 {
            if i == 0 {
                continue; // seed, covered by anchors
            }
            let mut sum = Rational::zero();
            for j in 0..=ii / 2 - 1 {
                sum += binomial(i, 2 * j) * table.d(2 * j as u32) / integer(ii - 2 * j + 1);
            }
            let expected = sum / (pow2(ii) - Rational::one());
            if table.d(i) != &expected {
                return CheckReport::fail(NAME, format!("even recurrence broke at i = {i}"));
            }
        } else {
            if i + 1 > max {
                continue; // recurrence reaches d_{i+1}, outside the table
            }
            let mut sum = Rational::zero();
            for j in 0..=(ii + 1) / 2 {
                sum += binomial(i + 1, 2 * j) * table.d(2 * j as u32);
            }
            let expected = sum / (pow2(ii) * integer(ii + 1));
            if table.d(i) != &expected {
                return CheckReport::fail(NAME, format!("odd recurrence broke at i = {i}"));
            }
        }
    }
    CheckReport::pass(NAME, format!("both recurrences hold over the table, i <= {max}"))
}

fn check_closed_form_route(table: &DyadicTable) -> CheckReport {
    const NAME: &str = "closed-form-route";
    let mut count = 0;
    for i in (1..=table.max_index()).step_by(2) {
        if table.d(i) != &d_odd_closed_form(i) {
            return CheckReport::fail(NAME, format!("closed-form route disagrees at i = {i}"));
        }
        count += 1;
    }
    CheckReport::pass(NAME, format!("matches the zeta/Euler recurrence on {count} odd indices"))
}

fn check_moment_relation(table: &DyadicTable) -> CheckReport {
    const NAME: &str = "moment-relation";
    for n in 0..=table.max_index() {
        let complement = ratio(1, i64::from(n) + 1);
        if table.mu(n) != &(complement.clone() - table.d(n)) {
            return CheckReport::fail(NAME, format!("mu_{n} != 1/(n+1) - d_{n}"));
        }
        if !table.mu(n).is_positive() || table.mu(n) >= &complement {
            return CheckReport::fail(NAME, format!("mu_{n} outside (0, 1/(n+1))"));
        }
    }
    CheckReport::pass(
        NAME,
        format!("mu_n = 1/(n+1) - d_n in (0, 1/(n+1)) for n <= {}", table.max_index()),
    )
}

fn check_f_monotonic(table: &DyadicTable) -> CheckReport {
    const NAME: &str = "f-monotonic";
    for k in 0..=table.max_index() + 1 {
        if !table.f(k).is_positive() {
            return CheckReport::fail(NAME, format!("F(2^-{k}) not positive"));
        }
        if k > 0 && table.f(k) >= table.f(k - 1) {
            return CheckReport::fail(NAME, format!("F(2^-k) not decreasing at k = {k}"));
        }
    }
    CheckReport::pass(
        NAME,
        format!("F(2^-k) positive and strictly decreasing for k <= {}", table.max_index() + 1),
    )
}

fn check_coeff_sum(table: &DyadicTable) -> CheckReport {
    const NAME: &str = "coeff-sum";
    for i in 0..=table.max_index() {
        let mut sum = Rational::zero();
        for j in 0..=i + 1 {
            sum += poly_coeff(i + 2, j);
        }
        if &sum != table.f(i + 1) {
            return CheckReport::fail(
                NAME,
                format!("sum of scale-{} coefficients != F(2^-{})", i + 2, i + 1),
            );
        }
    }
    CheckReport::pass(
        NAME,
        format!("coefficient sums reproduce F(2^-i-1) for i <= {}", table.max_index()),
    )
}

fn check_coefficient_structure(max_index: u32) -> CheckReport {
    const NAME: &str = "coefficient-structure";
    let limit = max_index.clamp(1, 20);
    for i in 1..=limit {
        for j in 0..=i {
            let zero_expected = j >= i || (i - j) % 2 == 0;
            if poly_coeff(i, j).is_zero() != zero_expected {
                return CheckReport::fail(NAME, format!("parity pattern broke at ({i}, {j})"));
            }
        }
        if poly(i).derivative() != poly(i - 1).scale(&pow2(1 - i64::from(i))) {
            return CheckReport::fail(NAME, format!("derivative relation broke at i = {i}"));
        }
    }
    CheckReport::pass(NAME, format!("parity + derivative relation for i <= {limit}"))
}

fn check_euler_identity(max_index: u32) -> CheckReport {
    const NAME: &str = "euler-identity";
    if euler_identity_sum(0) != Rational::one() {
        return CheckReport::fail(NAME, "seed sum at j = 0 is not 1".to_string());
    }
    for j in 1..=max_index.max(1) {
        if !euler_identity_sum(j).is_zero() {
            return CheckReport::fail(NAME, format!("nonzero sum at j = {j}"));
        }
    }
    CheckReport::pass(
        NAME,
        format!("sum C(2j,2m) E_2m vanishes for 1 <= j <= {}", max_index.max(1)),
    )
}

fn check_bernoulli_identity(max_index: u32) -> CheckReport {
    const NAME: &str = "bernoulli-identity";
    for j in 0..=max_index {
        if !bernoulli_identity_sum(j).is_zero() {
            return CheckReport::fail(NAME, format!("nonzero sum at j = {j}"));
        }
    }
    CheckReport::pass(
        NAME,
        format!("sinh-cancellation sum vanishes for j <= {max_index}"),
    )
}

fn check_constant_recurrences(max_index: u32) -> CheckReport {
    const NAME: &str = "constant-recurrences";
    let limit = max_index.max(1);
    for n in 1..=limit {
        let mut sum = Rational::zero();
        for k in 0..=n {
            sum += binomial(n + 1, i64::from(k)) * bernoulli(k);
        }
        if !sum.is_zero() {
            return CheckReport::fail(NAME, format!("Bernoulli residual nonzero at n = {n}"));
        }
        if n % 2 == 1 && n > 1 && !bernoulli(n).is_zero() {
            return CheckReport::fail(NAME, format!("B_{n} expected to vanish"));
        }
    }
    for j in 1..=limit {
        let mut sum = Rational::zero();
        for t in 0..=j {
            sum += binomial(2 * j, 2 * i64::from(t)) * euler_even(t);
        }
        if !sum.is_zero() {
            return CheckReport::fail(NAME, format!("Euler residual nonzero at j = {j}"));
        }
    }
    CheckReport::pass(NAME, format!("defining recurrences hold through index {limit}"))
}

fn check_stacked_inverse(max_index: u32) -> CheckReport {
    const NAME: &str = "stacked-inverse";
    for i in 0..=max_index {
        let a = stacked_matrix(i);
        let inv = stacked_inverse(i);
        if !a.mul(&inv).is_identity() || !inv.mul(&a).is_identity() {
            return CheckReport::fail(NAME, format!("inverse certificate failed at i = {i}"));
        }
    }
    CheckReport::pass(
        NAME,
        format!("two-sided inverse certificate for i <= {max_index}"),
    )
}

fn check_closed_form_rows(max_index: u32) -> CheckReport {
    const NAME: &str = "closed-form-rows";
    for i in 1..=max_index.max(1) {
        if !closed_form_residual(i).is_zero() {
            return CheckReport::fail(NAME, format!("nonzero residual row at i = {i}"));
        }
    }
    CheckReport::pass(
        NAME,
        format!("product and closed-form last rows agree for i <= {}", max_index.max(1)),
    )
}

fn check_matrix_consistency(ctx: &VerificationContext, table: &DyadicTable) -> CheckReport {
    const NAME: &str = "matrix-consistency";
    for (idx, g) in ctx.g_matrices.iter().enumerate() {
        let i = idx as u32 + 1; // 2i - 1 <= max_index by construction
        let mut input = vec![integer(2) * table.d(0)];
        for t in 1..i {
            input.push(table.d(2 * t - 1).clone());
        }
        let output = g.mul_vec(&RationalVector::new(input));
        for t in 1..=i as usize {
            if output.entry(t) != table.d(2 * t as u32 - 1) {
                return CheckReport::fail(
                    NAME,
                    format!("G_{i} output mismatches d_{} ", 2 * t - 1),
                );
            }
        }
    }
    CheckReport::pass(
        NAME,
        format!(
            "G_i reproduces the odd-indexed values for i <= {}",
            ctx.g_matrices.len()
        ),
    )
}

fn check_f_containment(ctx: &VerificationContext, table: &DyadicTable) -> CheckReport {
    const NAME: &str = "oracle-f-containment";
    let width_cap = pow2(1 - i64::from(ctx.oracle_depth));
    for (k, bounds) in ctx.f_bounds.iter().enumerate() {
        if !bounds.contains(table.f(k as u32)) {
            return CheckReport::fail(NAME, format!("F(2^-{k}) escaped its oracle bracket"));
        }
        if bounds.width() > width_cap {
            return CheckReport::fail(NAME, format!("bracket at k = {k} wider than 2^(1-N)"));
        }
    }
    CheckReport::pass(
        NAME,
        format!(
            "depth-{} brackets contain F(2^-k) for k <= {}",
            ctx.oracle_depth,
            ctx.f_bounds.len() - 1
        ),
    )
}

fn check_moment_containment(ctx: &VerificationContext, table: &DyadicTable) -> CheckReport {
    const NAME: &str = "oracle-moment-containment";
    let width_cap = pow2(1 - i64::from(ctx.oracle_depth));
    for (n, bounds) in ctx.mu_bounds.iter().enumerate() {
        if !bounds.contains(table.mu(n as u32)) {
            return CheckReport::fail(NAME, format!("mu_{n} escaped its oracle bracket"));
        }
        if bounds.width() > width_cap {
            return CheckReport::fail(NAME, format!("bracket at n = {n} wider than 2^(1-N)"));
        }
    }
    CheckReport::pass(
        NAME,
        format!(
            "depth-{} brackets contain mu_n for n <= {}",
            ctx.oracle_depth,
            ctx.mu_bounds.len() - 1
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes() {
        let reports = run_verification(8, 10, None).unwrap();
        assert_eq!(reports.len(), 16);
        for report in &reports {
            assert!(report.passed, "{} failed: {}", report.name, report.detail);
        }
    }

    #[test]
    fn depth_violation_propagates() {
        assert!(run_verification(4, 0, None).is_err());
        assert!(run_verification(4, crate::oracle::depth_cap() + 1, None).is_err());
    }

    #[test]
    fn every_single_entry_fault_is_detected() {
        let max_index = 8;
        let ctx = VerificationContext::prepare(max_index, 10).unwrap();

        let mut faults = Vec::new();
        for k in 0..=max_index + 1 {
            faults.push(Fault {
                table: TableKind::F,
                index: k,
            });
        }
        for i in 0..=max_index {
            faults.push(Fault {
                table: TableKind::D,
                index: i,
            });
            faults.push(Fault {
                table: TableKind::Mu,
                index: i,
            });
        }

        for fault in faults {
            let reports = run_checks(&ctx, Some(fault));
            assert!(
                reports.iter().any(|r| !r.passed),
                "fault {:?}[{}] slipped through every check",
                fault.table,
                fault.index
            );
        }
    }

    #[test]
    fn report_order_is_stable() {
        let a = run_verification(2, 6, None).unwrap();
        let b = run_verification(2, 6, None).unwrap();
        let names: Vec<_> = a.iter().map(|r| r.name).collect();
        assert_eq!(names, b.iter().map(|r| r.name).collect::<Vec<_>>());
    }
}
