//! Demographic disparity: closed-form support function and single-measure
//! intervals for any number of protected classes.
//!
//! The parameter vector stacks the within-class positive-decision rates
//! `θ_j = Pr(Y1 = 1 | Y0 = a_j)`. A disparity measure is a contrast
//! `θ_j - θ_j†`; its identified set comes from the support function of the
//! θ-set, which monotone rearrangement reduces to one comonotone quantile
//! integral per covariate value.

use crate::error::{Error, Result};
use crate::measures::DiscreteDist;
use crate::quantile::comonotone_integral;
use serde::{Deserialize, Serialize};

/// Mixture consistency tolerance between per-x class probabilities and the
/// marginal class probabilities.
const MIXTURE_TOL: f64 = 1e-10;

/// Per-covariate ingredients: grid weight, `Pr(Y1 = 1 | x)`, and the
/// conditional class probabilities `Pr(Y0 = a_j | x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DdRow {
    pub weight: f64,
    pub p_y1: f64,
    pub class_probs_x: Vec<f64>,
}

/// The demographic-disparity model over a finite covariate grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DdModel {
    class_probs: Vec<f64>,
    rows: Vec<DdRow>,
}

impl DdModel {
    /// Validate: weights on the simplex, probabilities in range, per-x class
    /// probabilities on the simplex, and the weighted mixture of per-x class
    /// probabilities reproducing `class_probs` within 1e-10.
    pub fn new(class_probs: Vec<f64>, rows: Vec<DdRow>) -> Result<Self> {
        let j = class_probs.len();
        if j < 2 {
            return Err(Error::InvalidArgument("need at least two classes".into()));
        }
        if rows.is_empty() {
            return Err(Error::InvalidArgument("need at least one grid row".into()));
        }
        let wsum: f64 = rows.iter().map(|r| r.weight).sum();
        if (wsum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "row weights sum to {wsum}, expected 1"
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.weight < 0.0 || !(0.0..=1.0).contains(&row.p_y1) {
                return Err(Error::InvalidArgument(format!("row {i} has invalid probabilities")));
            }
            if row.class_probs_x.len() != j {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} classes, expected {j}",
                    row.class_probs_x.len()
                )));
            }
            let s: f64 = row.class_probs_x.iter().sum();
            if (s - 1.0).abs() > 1e-9 || row.class_probs_x.iter().any(|&p| p < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "row {i} class probabilities are not a distribution"
                )));
            }
        }
        for (k, &marginal) in class_probs.iter().enumerate() {
            let mixture: f64 = rows.iter().map(|r| r.weight * r.class_probs_x[k]).sum();
            if (mixture - marginal).abs() > MIXTURE_TOL.max(1e-9) {
                return Err(Error::InvalidArgument(format!(
                    "class {k}: mixture {mixture} does not reproduce marginal {marginal}"
                )));
            }
        }
        Ok(DdModel { class_probs, rows })
    }

    /// Build with marginal class probabilities computed from the mixture.
    pub fn from_rows(rows: Vec<DdRow>) -> Result<Self> {
        let j = rows
            .first()
            .map(|r| r.class_probs_x.len())
            .ok_or_else(|| Error::InvalidArgument("need at least one grid row".into()))?;
        let class_probs: Vec<f64> = (0..j)
            .map(|k| rows.iter().map(|r| r.weight * r.class_probs_x[k]).sum())
            .collect();
        DdModel::new(class_probs, rows)
    }

    pub fn num_classes(&self) -> usize {
        self.class_probs.len()
    }

    pub fn class_probs(&self) -> &[f64] {
        &self.class_probs
    }

    pub fn rows(&self) -> &[DdRow] {
        &self.rows
    }

    fn require_positive_class(&self, k: usize) -> Result<()> {
        if self.class_probs[k] <= 1e-12 {
            return Err(Error::DegenerateClass(format!(
                "class {k} has zero marginal probability"
            )));
        }
        Ok(())
    }

    /// Sharp marginal bounds `[θ_jᴸ, θ_jᵁ]` on a single rate from the
    /// per-covariate Fréchet inequalities.
    pub fn theta_bounds(&self, j: usize) -> Result<(f64, f64)> {
        self.check_class(j)?;
        self.require_positive_class(j)?;
        let cp = self.class_probs[j];
        let lo: f64 = self
            .rows
            .iter()
            .map(|r| r.weight * (r.p_y1 + r.class_probs_x[j] - 1.0).max(0.0))
            .sum();
        let hi: f64 = self
            .rows
            .iter()
            .map(|r| r.weight * r.p_y1.min(r.class_probs_x[j]))
            .sum();
        Ok((lo / cp, hi / cp))
    }

    fn check_class(&self, j: usize) -> Result<()> {
        if j >= self.num_classes() {
            return Err(Error::InvalidArgument(format!(
                "class index {j} out of range (J = {})",
                self.num_classes()
            )));
        }
        Ok(())
    }
}

/// A stack of disparity contrasts: row `k` maps θ to `θ_plus[k] - θ_minus[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisparityMatrix {
    num_classes: usize,
    contrasts: Vec<(usize, usize)>,
}

impl DisparityMatrix {
    pub fn new(num_classes: usize, contrasts: Vec<(usize, usize)>) -> Result<Self> {
        for &(a, b) in &contrasts {
            if a >= num_classes || b >= num_classes {
                return Err(Error::InvalidArgument(format!(
                    "contrast ({a}, {b}) out of range for J = {num_classes}"
                )));
            }
            if a == b {
                return Err(Error::InvalidArgument(format!(
                    "contrast ({a}, {a}) is identically zero"
                )));
            }
        }
        if contrasts.is_empty() {
            return Err(Error::InvalidArgument("no contrasts supplied".into()));
        }
        Ok(DisparityMatrix { num_classes, contrasts })
    }

    /// The canonical stack `[δ(1, J), …, δ(J-1, J)]` against reference class J.
    pub fn canonical(num_classes: usize) -> Self {
        DisparityMatrix {
            num_classes,
            contrasts: (0..num_classes - 1).map(|k| (k, num_classes - 1)).collect(),
        }
    }

    pub fn num_measures(&self) -> usize {
        self.contrasts.len()
    }

    pub fn contrasts(&self) -> &[(usize, usize)] {
        &self.contrasts
    }

    /// `Eᵀ p`: fold a direction over measures back onto classes.
    pub fn transpose_apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.contrasts.len() {
            return Err(Error::InvalidArgument(format!(
                "direction has {} entries, expected {}",
                p.len(),
                self.contrasts.len()
            )));
        }
        let mut q = vec![0.0; self.num_classes];
        for (&(plus, minus), &pk) in self.contrasts.iter().zip(p) {
            q[plus] += pk;
            q[minus] -= pk;
        }
        Ok(q)
    }
}

/// Support function of the identified set for the disparity stack `E θ`,
/// evaluated at direction `p`: one comonotone quantile integral per grid row.
pub fn dd_support(model: &DdModel, e: &DisparityMatrix, p: &[f64]) -> Result<f64> {
    if e.num_classes != model.num_classes() {
        return Err(Error::InvalidArgument("contrast/model class count mismatch".into()));
    }
    let q = e.transpose_apply(p)?;
    for (k, &qk) in q.iter().enumerate() {
        if qk != 0.0 {
            model.require_positive_class(k)?;
        }
    }
    // Values of the class-indicator combination D_q = Σ q_j 1{Y0=a_j}/Pr(Y0=a_j).
    let values: Vec<f64> = q
        .iter()
        .zip(model.class_probs())
        .map(|(&qk, &cp)| if qk == 0.0 { 0.0 } else { qk / cp })
        .collect();
    let mut total = 0.0;
    for row in model.rows() {
        let d = DiscreteDist::bernoulli(row.p_y1)?;
        let pairs: Vec<(f64, f64)> = values
            .iter()
            .zip(&row.class_probs_x)
            .map(|(&v, &p)| (v, p))
            .collect();
        let dq = DiscreteDist::new(&pairs)?;
        total += row.weight * comonotone_integral(&d, &dq);
    }
    Ok(total)
}

/// Sharp interval for the single disparity `θ_j - θ_j†`.
///
/// Writing `P_A = Pr(Y1=1|x)`, `P_B = Pr(Y0=a_j|x)`, `P_C = Pr(Y0=a_j†|x)`:
///
/// ```text
/// upper = E[min{P_A, P_B}]/Pr(a_j) - E[max{P_A + P_C - 1, 0}]/Pr(a_j†)
/// lower = E[max{P_A + P_B - 1, 0}]/Pr(a_j) - E[min{P_A, P_C}]/Pr(a_j†)
/// ```
pub fn dd_interval(model: &DdModel, j: usize, j_dag: usize) -> Result<(f64, f64)> {
    model.check_class(j)?;
    model.check_class(j_dag)?;
    if j == j_dag {
        return Err(Error::InvalidArgument("classes in a disparity must differ".into()));
    }
    model.require_positive_class(j)?;
    model.require_positive_class(j_dag)?;
    let (cp_j, cp_d) = (model.class_probs()[j], model.class_probs()[j_dag]);
    let mut upper = 0.0;
    let mut lower = 0.0;
    for r in model.rows() {
        let (pa, pb, pc) = (r.p_y1, r.class_probs_x[j], r.class_probs_x[j_dag]);
        upper += r.weight * (pa.min(pb) / cp_j - (pa + pc - 1.0).max(0.0) / cp_d);
        lower += r.weight * ((pa + pb - 1.0).max(0.0) / cp_j - pa.min(pc) / cp_d);
    }
    Ok((lower, upper))
}
