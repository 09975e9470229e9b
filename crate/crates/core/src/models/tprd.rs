//! True-positive-rate disparity: convex identified set for the stacked
//! joint probabilities, solved per covariate value as a 2×J partial
//! transport problem, plus the nonlinear map onto disparity measures and
//! the closed-form single-measure interval.
//!
//! The parameter stacks, for each class `j`,
//! `θ_{2j-1} = Pr(Y1s=1, Y1r=1, Y0=a_j)` and
//! `θ_{2j}   = Pr(Y1s=0, Y1r=1, Y0=a_j)` (1-based in the formulas, 0-based
//! coordinates `2k` and `2k+1` in code). A single disparity is
//! `θ_{2j-1}/(θ_{2j-1}+θ_{2j}) - θ_{2j†-1}/(θ_{2j†-1}+θ_{2j†})`.

use crate::dream::{solve_dream, PartialOtInstance};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Ratio denominators at or below this raise [`Error::DegenerateDenominator`].
pub const DENOM_TOL: f64 = 1e-12;

/// Per-covariate ingredients: grid weight, `Pr(Y1s=1, Y1r=1 | x)`,
/// `Pr(Y1s=0, Y1r=1 | x)`, and the conditional class probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TprdRow {
    pub weight: f64,
    /// `Pr(Y1s = 1, Y1r = 1 | x)`: correctly approved.
    pub p11: f64,
    /// `Pr(Y1s = 0, Y1r = 1 | x)`: wrongly rejected.
    pub p01: f64,
    pub class_probs_x: Vec<f64>,
}

/// The true-positive-rate-disparity model over a finite covariate grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TprdModel {
    rows: Vec<TprdRow>,
}

impl TprdModel {
    pub fn new(rows: Vec<TprdRow>) -> Result<Self> {
        let j = rows
            .first()
            .map(|r| r.class_probs_x.len())
            .ok_or_else(|| Error::InvalidArgument("need at least one grid row".into()))?;
        if j < 2 {
            return Err(Error::InvalidArgument("need at least two classes".into()));
        }
        let wsum: f64 = rows.iter().map(|r| r.weight).sum();
        if (wsum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "row weights sum to {wsum}, expected 1"
            )));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.weight < 0.0
                || !(0.0..=1.0).contains(&r.p11)
                || !(0.0..=1.0).contains(&r.p01)
                || r.p11 + r.p01 > 1.0 + 1e-12
            {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has invalid outcome probabilities"
                )));
            }
            if r.class_probs_x.len() != j {
                return Err(Error::InvalidArgument(format!("row {i} class count mismatch")));
            }
            let s: f64 = r.class_probs_x.iter().sum();
            if (s - 1.0).abs() > 1e-9 || r.class_probs_x.iter().any(|&p| p < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "row {i} class probabilities are not a distribution"
                )));
            }
        }
        Ok(TprdModel { rows })
    }

    pub fn num_classes(&self) -> usize {
        self.rows[0].class_probs_x.len()
    }

    pub fn rows(&self) -> &[TprdRow] {
        &self.rows
    }
}

/// Support function of the θ-identified set at direction `q` (length 2J):
/// per covariate value the transport cost is a 2×J partial problem with
/// `π(1, j) = -q_{2j-1}` on the approved row and `π(0, j) = -q_{2j}` on the
/// rejected row; the support value is minus the integrated cost.
pub fn tprd_theta_support(model: &TprdModel, q: &[f64]) -> Result<f64> {
    let j = model.num_classes();
    if q.len() != 2 * j {
        return Err(Error::InvalidArgument(format!(
            "direction has {} entries, expected 2J = {}",
            q.len(),
            2 * j
        )));
    }
    let pi0: Vec<f64> = (0..j).map(|k| -q[2 * k + 1]).collect();
    let pi1: Vec<f64> = (0..j).map(|k| -q[2 * k]).collect();
    let mut total = 0.0;
    for row in model.rows() {
        let inst = PartialOtInstance::new(
            [pi0.clone(), pi1.clone()],
            [row.p01, row.p11],
            row.class_probs_x.clone(),
        )?;
        total -= row.weight * solve_dream(&inst)?.cost;
    }
    Ok(total)
}

/// Sharp Fréchet bounds `(θᴸ, θᵁ)` for one θ coordinate (0-based: `2k` is
/// the approved-mass coordinate of class `k`, `2k+1` the rejected-mass one).
pub fn tprd_theta_bounds(model: &TprdModel, coord: usize) -> Result<(f64, f64)> {
    let j = model.num_classes();
    if coord >= 2 * j {
        return Err(Error::InvalidArgument(format!(
            "coordinate {coord} out of range (2J = {})",
            2 * j
        )));
    }
    let class = coord / 2;
    let approved = coord.is_multiple_of(2);
    let mut lo = 0.0;
    let mut hi = 0.0;
    for r in model.rows() {
        let p = if approved { r.p11 } else { r.p01 };
        let c = r.class_probs_x[class];
        lo += r.weight * (p + c - 1.0).max(0.0);
        hi += r.weight * p.min(c);
    }
    Ok((lo, hi))
}

/// Map θ to the disparity measures of the requested `(j, j†)` class pairs
/// (0-based). Errors with [`Error::DegenerateDenominator`] when a referenced
/// class has vanishing true-positive mass `θ_{2j-1} + θ_{2j}`.
pub fn tprd_map(theta: &[f64], pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    if !theta.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument("θ must have even length".into()));
    }
    let j = theta.len() / 2;
    let rate = |k: usize| -> Result<f64> {
        let denom = theta[2 * k] + theta[2 * k + 1];
        if denom <= DENOM_TOL {
            return Err(Error::DegenerateDenominator(format!(
                "class {k} has no true-positive mass"
            )));
        }
        Ok(theta[2 * k] / denom)
    };
    pairs
        .iter()
        .map(|&(a, b)| {
            if a >= j || b >= j {
                return Err(Error::InvalidArgument(format!(
                    "pair ({a}, {b}) out of range for J = {j}"
                )));
            }
            Ok(rate(a)? - rate(b)?)
        })
        .collect()
}

/// Sharp interval for the single disparity between classes `j` and `j†`
/// (0-based): the Fréchet bounds of the four involved θ coordinates combine
/// monotonically, the favorable pair on top of each ratio.
pub fn tprd_interval(model: &TprdModel, j: usize, j_dag: usize) -> Result<(f64, f64)> {
    let classes = model.num_classes();
    if j >= classes || j_dag >= classes {
        return Err(Error::InvalidArgument(format!(
            "classes ({j}, {j_dag}) out of range for J = {classes}"
        )));
    }
    if j == j_dag {
        return Err(Error::InvalidArgument("classes in a disparity must differ".into()));
    }
    let (a_lo, a_hi) = tprd_theta_bounds(model, 2 * j)?;
    let (b_lo, b_hi) = tprd_theta_bounds(model, 2 * j + 1)?;
    let (c_lo, c_hi) = tprd_theta_bounds(model, 2 * j_dag)?;
    let (d_lo, d_hi) = tprd_theta_bounds(model, 2 * j_dag + 1)?;
    let ratio = |num: f64, den_other: f64, label: &str| -> Result<f64> {
        let denom = num + den_other;
        if denom <= DENOM_TOL {
            return Err(Error::DegenerateDenominator(format!(
                "{label} true-positive mass vanishes"
            )));
        }
        Ok(num / denom)
    };
    let upper = ratio(a_hi, b_lo, "upper j")? - ratio(c_lo, d_hi, "upper j†")?;
    let lower = ratio(a_lo, b_hi, "lower j")? - ratio(c_hi, d_lo, "lower j†")?;
    Ok((lower, upper))
}
