//! Closed-form univariate optimal transport via monotone rearrangement.
//!
//! For univariate laws the extremal couplings pair quantile ranks: the
//! comonotone coupling pairs `F_V^{-1}(u)` with `F_W^{-1}(u)`, the antitone
//! coupling pairs it with `F_W^{-1}(1-u)`. Both integrals are exact sums over
//! the merged step segments of the two quantile functions, so no quadrature
//! error enters here. The quantile convention is the left-continuous inf-form
//! `F^{-1}(t) = inf{x : F(x) >= t}`; step evaluation at a breakpoint takes the
//! value of the segment ending there, which only changes the integrand on a
//! null set.

use crate::error::{Error, Result};
use crate::measures::DiscreteDist;

/// Segments shorter than this are skipped in the merged sweep, so duplicated
/// cumulative breakpoints cannot feed cancellation noise into the sum.
pub const SEGMENT_SKIP_TOL: f64 = 1e-15;

/// A quantile function as a right-closed step function: `value` holds on the
/// segment ending at `u_upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepQuantile {
    breakpoints: Vec<(f64, f64)>,
}

impl StepQuantile {
    /// `(u_upper, value)` pairs, strictly increasing in `u_upper`, ending at 1.
    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }
}

/// Quantile function of a discrete law: cumulative probabilities paired with
/// atom values. The final breakpoint is snapped to exactly 1.
pub fn to_step_quantile(d: &DiscreteDist) -> StepQuantile {
    let mut breakpoints = Vec::with_capacity(d.len());
    let mut cum = 0.0;
    for &(v, p) in d.atoms() {
        cum += p;
        breakpoints.push((cum, v));
    }
    if let Some(last) = breakpoints.last_mut() {
        last.0 = 1.0;
    }
    StepQuantile { breakpoints }
}

/// Merged-segment sweep of `f(F_V^{-1}(u), F_W^{-1}(u)) du` over `(0, 1]`,
/// with `W`'s quantile reversed when `reverse_w` is set.
pub(crate) fn sweep<F: FnMut(f64, f64) -> f64>(
    v: &DiscreteDist,
    w: &DiscreteDist,
    reverse_w: bool,
    mut f: F,
) -> f64 {
    let qv = to_step_quantile(v);
    let qw_atoms: Vec<(f64, f64)> = if reverse_w {
        // F_W^{-1}(1-u) visits the atoms of W in descending value order.
        let mut cum = 0.0;
        w.atoms()
            .iter()
            .rev()
            .map(|&(val, p)| {
                cum += p;
                (cum, val)
            })
            .collect()
    } else {
        to_step_quantile(w).breakpoints().to_vec()
    };
    let mut qw_atoms = qw_atoms;
    if let Some(last) = qw_atoms.last_mut() {
        last.0 = 1.0;
    }

    let a = qv.breakpoints();
    let b = &qw_atoms;
    let mut total = 0.0;
    let mut prev = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        let upper = a[i].0.min(b[j].0);
        let len = upper - prev;
        if len > SEGMENT_SKIP_TOL {
            total += f(a[i].1, b[j].1) * len;
        }
        prev = upper;
        if a[i].0 <= upper + SEGMENT_SKIP_TOL {
            i += 1;
        }
        if b[j].0 <= upper + SEGMENT_SKIP_TOL {
            j += 1;
        }
    }
    total
}

/// `∫₀¹ F_V^{-1}(u) F_W^{-1}(u) du`: the maximal expectation of the product
/// over all couplings of `v` and `w`.
pub fn comonotone_integral(v: &DiscreteDist, w: &DiscreteDist) -> f64 {
    sweep(v, w, false, |x, y| x * y)
}

/// `∫₀¹ F_V^{-1}(u) F_W^{-1}(1-u) du`: the minimal expectation of the
/// product over all couplings of `v` and `w`.
pub fn antitone_integral(v: &DiscreteDist, w: &DiscreteDist) -> f64 {
    sweep(v, w, true, |x, y| x * y)
}

/// Sharp bounds `(max(pA + pB - 1, 0), min(pA, pB))` on the joint probability
/// of two events with marginal probabilities `pA` and `pB`.
pub fn frechet_bounds(p_a: f64, p_b: f64) -> Result<(f64, f64)> {
    for p in [p_a, p_b] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "probability {p} outside [0, 1]"
            )));
        }
    }
    Ok(((p_a + p_b - 1.0).max(0.0), p_a.min(p_b)))
}
