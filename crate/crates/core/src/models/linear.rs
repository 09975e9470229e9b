//! Linear projection model: halfspaces and support function of the
//! identified set for the projection coefficients when the two datasets
//! share regressors.
//!
//! With regressors `r = (Y0, X)`, moment matrix `M = E[r rᵀ]`, and
//! `Y1` observed alongside `X` only, each direction `t` yields the valid
//! inequality
//!
//! ```text
//!   tᵀ M θ <= ∫∫₀¹ F⁻¹_{t0ᵀY0|x}(u) F⁻¹_{Y1|x}(u) du dμ_X + tXᵀ E[Y1 X]
//! ```
//!
//! and when `M` is invertible the support function at `q` evaluates the
//! same right-hand side at `t = M⁻ᵀ q`. The multivariate transport reduces
//! to a univariate one because only the scalar projection `t0ᵀY0` enters;
//! its per-`x` law is formed lazily per direction (pushforward for discrete
//! rows, analytic for Gaussian rows).

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Matrix};
use crate::measures::{discretize_gaussian, DiscreteDist, GaussianSpec};
use crate::quantile::comonotone_integral;
use crate::setapprox::Halfspace;

/// Condition-number guard above which `M` is treated as singular and only
/// the halfspace route is available.
pub const CONDITION_GUARD: f64 = 1e12;

/// A univariate conditional law ingredient.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarLaw {
    Discrete(DiscreteDist),
    Gaussian(GaussianSpec),
}

/// A (possibly multivariate) conditional law for the shared regressor block.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorLaw {
    /// Weighted point cloud in `R^{d0}`.
    Discrete { points: Vec<(Vec<f64>, f64)> },
    /// Gaussian with the given mean and covariance.
    Gaussian { mean: Vec<f64>, cov: Matrix },
}

/// One covariate grid row of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct LpModelRow {
    pub weight: f64,
    pub law1: ScalarLaw,
    pub law0: VectorLaw,
}

/// How Gaussian quantile integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantileEval {
    /// Closed form `μ_V μ_W + σ_V σ_W`; requires every row to be Gaussian
    /// on both sides.
    Analytic,
    /// Discretize Gaussian ingredients to this many midpoint-quantile atoms.
    Atoms(usize),
}

/// The linear projection model over a finite covariate grid.
#[derive(Debug, Clone)]
pub struct LinearProjectionModel {
    d0: usize,
    dx: usize,
    m: Matrix,
    cross_moment: Vec<f64>,
    rows: Vec<LpModelRow>,
    eval: QuantileEval,
}

impl LinearProjectionModel {
    /// Validate dimensions, symmetry, and positive semidefiniteness of `M`
    /// (within 1e-10 of scale), and the covariate weights.
    pub fn new(
        d0: usize,
        dx: usize,
        m: Matrix,
        cross_moment: Vec<f64>,
        rows: Vec<LpModelRow>,
        eval: QuantileEval,
    ) -> Result<Self> {
        let d = d0 + dx;
        if d0 == 0 {
            return Err(Error::InvalidArgument("need d0 >= 1 shared regressors".into()));
        }
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::InvalidArgument(format!(
                "moment matrix is {}x{}, expected {d}x{d}",
                m.nrows(),
                m.ncols()
            )));
        }
        if cross_moment.len() != dx {
            return Err(Error::InvalidArgument(format!(
                "cross moment has {} entries, expected dx = {dx}",
                cross_moment.len()
            )));
        }
        let scale = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .fold(0.0f64, |s, ij| s.max(m[ij].abs()))
            .max(1.0);
        for i in 0..d {
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 * scale {
                    return Err(Error::InvalidArgument("moment matrix is not symmetric".into()));
                }
            }
        }
        if !is_psd(&m, 1e-10 * scale) {
            return Err(Error::InvalidArgument(
                "moment matrix is not positive semidefinite".into(),
            ));
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
        for (i, r) in rows.iter().enumerate() {
            if r.weight < 0.0 {
                return Err(Error::InvalidArgument(format!("row {i} has negative weight")));
            }
            match &r.law0 {
                VectorLaw::Discrete { points } => {
                    if points.is_empty() || points.iter().any(|(p, _)| p.len() != d0) {
                        return Err(Error::InvalidArgument(format!(
                            "row {i}: law0 points must live in R^{d0}"
                        )));
                    }
                }
                VectorLaw::Gaussian { mean, cov } => {
                    if mean.len() != d0 || cov.nrows() != d0 || cov.ncols() != d0 {
                        return Err(Error::InvalidArgument(format!(
                            "row {i}: law0 gaussian must live in R^{d0}"
                        )));
                    }
                }
            }
        }
        Ok(LinearProjectionModel {
            d0,
            dx,
            m,
            cross_moment,
            rows,
            eval,
        })
    }

    pub fn dimension(&self) -> usize {
        self.d0 + self.dx
    }

    pub fn d0(&self) -> usize {
        self.d0
    }

    pub fn dx(&self) -> usize {
        self.dx
    }

    pub fn moment_matrix(&self) -> &Matrix {
        &self.m
    }

    /// Scalar law of `wᵀ Y0` at one grid row.
    fn projected_law0(&self, row: &LpModelRow, w: &[f64]) -> ScalarLaw {
        match &row.law0 {
            VectorLaw::Discrete { points } => {
                let pairs: Vec<(f64, f64)> =
                    points.iter().map(|(p, prob)| (dot(w, p), *prob)).collect();
                ScalarLaw::Discrete(
                    DiscreteDist::new(&pairs).expect("projection of a valid cloud"),
                )
            }
            VectorLaw::Gaussian { mean, cov } => {
                let mu = dot(w, mean);
                let var = dot(w, &cov.mul_vec(w)).max(0.0);
                ScalarLaw::Gaussian(GaussianSpec {
                    mean: mu,
                    sd: var.sqrt(),
                })
            }
        }
    }

    /// `∫₀¹ F⁻¹_V(u) F⁻¹_W(u) du` for one row's pair of scalar laws.
    fn pair_integral(&self, v: &ScalarLaw, w: &ScalarLaw) -> Result<f64> {
        match self.eval {
            QuantileEval::Analytic => match (v, w) {
                (ScalarLaw::Gaussian(a), ScalarLaw::Gaussian(b)) => {
                    Ok(a.mean * b.mean + a.sd * b.sd)
                }
                _ => Err(Error::InvalidArgument(
                    "analytic evaluation requires Gaussian laws on both sides".into(),
                )),
            },
            QuantileEval::Atoms(n) => {
                let dv = materialize(v, n)?;
                let dw = materialize(w, n)?;
                Ok(comonotone_integral(&dv, &dw))
            }
        }
    }

    /// Right-hand side of the direction-`t` inequality: the integrated
    /// comonotone quantile product plus the cross-moment term.
    fn offset(&self, t0: &[f64], tx: &[f64]) -> Result<f64> {
        let mut total = dot(tx, &self.cross_moment);
        for row in &self.rows {
            let v = self.projected_law0(row, t0);
            total += row.weight * self.pair_integral(&v, &row.law1)?;
        }
        Ok(total)
    }
}

fn materialize(law: &ScalarLaw, atoms: usize) -> Result<DiscreteDist> {
    match law {
        ScalarLaw::Discrete(d) => Ok(d.clone()),
        ScalarLaw::Gaussian(g) => discretize_gaussian(*g, atoms),
    }
}

/// Cholesky-style positive semidefiniteness check with tolerance.
fn is_psd(m: &Matrix, tol: f64) -> bool {
    let n = m.nrows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    for k in 0..n {
        let pivot = a[k][k];
        if pivot < -tol {
            return false;
        }
        if pivot <= tol {
            // Zero pivot: the row/column must vanish for PSD to survive.
            if (k + 1..n).any(|i| a[i][k].abs() > tol.max(1e-12)) {
                return false;
            }
            continue;
        }
        let (head, tail) = a.split_at_mut(k + 1);
        let pivot_row = &head[k];
        for row in tail.iter_mut() {
            let f = row[k] / pivot;
            for (x, pv) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                *x -= f * pv;
            }
        }
    }
    true
}

fn check_unit(t: &[f64], want_dim: usize) -> Result<()> {
    if t.len() != want_dim {
        return Err(Error::InvalidArgument(format!(
            "direction has {} entries, expected {want_dim}",
            t.len()
        )));
    }
    if (norm(t) - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "direction must be unit length, got ‖t‖ = {}",
            norm(t)
        )));
    }
    Ok(())
}

/// The halfspace `(Mᵀt) · θ <= offset(t)` valid for every identified θ.
/// Works whether or not `M` is invertible.
pub fn lp_halfspace(model: &LinearProjectionModel, t: &[f64]) -> Result<Halfspace> {
    check_unit(t, model.dimension())?;
    let (t0, tx) = t.split_at(model.d0);
    let normal = model.m.tr_mul_vec(t);
    let offset = model.offset(t0, tx)?;
    Halfspace::new(normal, offset)
}

/// Support function of the identified set at unit direction `q`, through
/// `t = M⁻ᵀ q`: with `(A B; C D) = M⁻¹` partitioned at `d0`, the projected
/// law direction is `w = Aᵀq0 + Cᵀq_X` and the affine term uses
/// `q0ᵀB + q_XᵀD`.
///
/// Errors with [`Error::SingularMoment`] when `M` fails the condition-number
/// guard; callers then fall back to [`lp_halfspace`] filtering.
pub fn lp_support(model: &LinearProjectionModel, q: &[f64]) -> Result<f64> {
    check_unit(q, model.dimension())?;
    let cond = model.m.condition_estimate();
    if !cond.is_finite() || cond > CONDITION_GUARD {
        return Err(Error::SingularMoment(cond));
    }
    let inv = model
        .m
        .inverse(1e-14)
        .ok_or(Error::SingularMoment(f64::INFINITY))?;
    let (d0, d) = (model.d0, model.dimension());
    let (q0, qx) = q.split_at(d0);
    // w_k = Σ_i q0_i A[i][k] + Σ_i qx_i C[i][k]; affine_k analogous with B, D.
    let mut w = vec![0.0; d0];
    let mut affine = vec![0.0; d - d0];
    for i in 0..d0 {
        for k in 0..d0 {
            w[k] += q0[i] * inv[(i, k)];
        }
        for k in d0..d {
            affine[k - d0] += q0[i] * inv[(i, k)];
        }
    }
    for i in d0..d {
        for k in 0..d0 {
            w[k] += qx[i - d0] * inv[(i, k)];
        }
        for k in d0..d {
            affine[k - d0] += qx[i - d0] * inv[(i, k)];
        }
    }
    let mut total = dot(&affine, &model.cross_moment);
    for row in &model.rows {
        let v = model.projected_law0(row, &w);
        total += row.weight * model.pair_integral(&v, &row.law1)?;
    }
    Ok(total)
}
