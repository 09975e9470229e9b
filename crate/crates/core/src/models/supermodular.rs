//! Interval bounds for `E[h(Y1, Y0)]` with supermodular `h`: the antitone
//! coupling attains the lower endpoint and the comonotone coupling the upper
//! one, per covariate value, integrated over the grid.

use crate::measures::ConditionalLawTable;
use crate::quantile::sweep;

/// `(lower, upper)` for `E[h(Y1, Y0)]` over all couplings consistent with
/// the table's conditional laws.
///
/// `h` is evaluated as `h(y1, y0)`. Supermodularity of `h` is the caller's
/// contract; it is what makes the two monotone couplings extremal, and it is
/// not checked here.
pub fn supermodular_interval<F: Fn(f64, f64) -> f64>(
    h: F,
    table: &ConditionalLawTable,
) -> (f64, f64) {
    let lower = table.integrate(|row| sweep(&row.law1, &row.law0, true, &h));
    let upper = table.integrate(|row| sweep(&row.law1, &row.law0, false, &h));
    (lower, upper)
}
