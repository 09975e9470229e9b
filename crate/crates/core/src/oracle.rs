//! Exact small-scale linear-programming oracles for verification.
//!
//! Two independent engines back this module:
//!
//! - [`solve_lp_exact`] enumerates basic feasible solutions of the
//!   standard-form polytope. At desk scale its correctness is self-evident
//!   (it is the definition of an LP vertex optimum), which is the property an
//!   oracle needs; a guard rejects anything large enough to make enumeration
//!   slow.
//! - a dense two-phase simplex with Bland's rule backs [`brute_force_ot`]
//!   and [`brute_force_partial_ot`], where enumeration would be
//!   combinatorially infeasible (transportation problems with hundreds of
//!   variables). The test suite pins it against the enumerator on
//!   randomized instances, so the two engines certify each other before
//!   either is used to certify anything else.

use crate::dream::PartialOtInstance;
use crate::error::{Error, Result};
use crate::linalg::{dot, lu_solve, Matrix};

/// Enumeration guard: maximum variable count of an [`LpProblem`].
pub const MAX_EXACT_VARS: usize = 24;
/// Enumeration guard: maximum total constraint rows of an [`LpProblem`].
pub const MAX_EXACT_ROWS: usize = 40;
/// Candidate basic solutions are feasible when no coordinate is below this.
pub const FEAS_TOL: f64 = 1e-9;
/// Basis systems with a scaled pivot below this are skipped as non-vertices.
const SINGULAR_TOL: f64 = 1e-12;

/// `min cᵀx  s.t.  A_eq x = b_eq, A_ub x <= b_ub, x >= 0`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub eq: (Matrix, Vec<f64>),
    pub ub: (Matrix, Vec<f64>),
}

impl LpProblem {
    pub fn new(objective: Vec<f64>, eq: (Matrix, Vec<f64>), ub: (Matrix, Vec<f64>)) -> Result<Self> {
        let n = objective.len();
        for (mat, rhs, name) in [(&eq.0, &eq.1, "eq"), (&ub.0, &ub.1, "ub")] {
            if mat.nrows() != rhs.len() {
                return Err(Error::InvalidArgument(format!(
                    "{name} matrix has {} rows but rhs has {}",
                    mat.nrows(),
                    rhs.len()
                )));
            }
            if mat.nrows() > 0 && mat.ncols() != n {
                return Err(Error::InvalidArgument(format!(
                    "{name} matrix has {} columns but objective has {n}",
                    mat.ncols()
                )));
            }
        }
        Ok(LpProblem { objective, eq, ub })
    }

    /// Standard form: slacks appended for ub rows, all rows stacked.
    fn standard_form(&self) -> (Matrix, Vec<f64>, Vec<f64>) {
        let n = self.objective.len();
        let (me, mu) = (self.eq.0.nrows(), self.ub.0.nrows());
        let cols = n + mu;
        let mut a = Matrix::zeros(me + mu, cols);
        let mut b = Vec::with_capacity(me + mu);
        for i in 0..me {
            for j in 0..n {
                a[(i, j)] = self.eq.0[(i, j)];
            }
            b.push(self.eq.1[i]);
        }
        for i in 0..mu {
            for j in 0..n {
                a[(me + i, j)] = self.ub.0[(i, j)];
            }
            a[(me + i, n + i)] = 1.0;
            b.push(self.ub.1[i]);
        }
        let mut c = self.objective.clone();
        c.resize(cols, 0.0);
        (a, b, c)
    }

    /// Every variable bounded above by a nonnegative-coefficient row?
    /// A cheap certificate that the recession cone is trivial.
    fn boundedness_certificate(&self) -> bool {
        let n = self.objective.len();
        let row_caps = |mat: &Matrix, covered: &mut [bool]| {
            for i in 0..mat.nrows() {
                let row = mat.row(i);
                if row.iter().all(|&v| v >= 0.0) {
                    for (j, &v) in row.iter().enumerate() {
                        if v > 0.0 {
                            covered[j] = true;
                        }
                    }
                }
            }
        };
        let mut covered = vec![false; n];
        row_caps(&self.ub.0, &mut covered);
        row_caps(&self.eq.0, &mut covered);
        covered.into_iter().all(|c| c)
    }
}

/// Optimal vertex of an LP.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    /// Optimal point in the original (pre-slack) variables.
    pub point: Vec<f64>,
}

/// Global minimum by enumeration of basic feasible solutions.
///
/// Guards: at most [`MAX_EXACT_VARS`] variables and [`MAX_EXACT_ROWS`] rows.
/// Redundant rows are eliminated (inconsistent ones signal infeasibility),
/// and unboundedness is decided by enumerating the recession polytope
/// `{d >= 0 : A d = 0, Σd = 1}` unless a quick certificate rules it out.
pub fn solve_lp_exact(p: &LpProblem) -> Result<LpSolution> {
    let n = p.objective.len();
    if n > MAX_EXACT_VARS {
        return Err(Error::TooLarge(format!("{n} variables > {MAX_EXACT_VARS}")));
    }
    let rows = p.eq.0.nrows() + p.ub.0.nrows();
    if rows > MAX_EXACT_ROWS {
        return Err(Error::TooLarge(format!("{rows} rows > {MAX_EXACT_ROWS}")));
    }
    let (a, b, c) = p.standard_form();
    let (a, b) = drop_dependent_rows(&a, &b)?;
    let best = enumerate_min(&a, &b, &c).ok_or_else(|| {
        Error::Infeasible("no basic feasible solution exists".into())
    })?;

    if !p.boundedness_certificate() {
        // Recession LP: min cᵀd over A d = 0, Σ d = 1, d >= 0.
        let cols = a.ncols();
        let mut ra = Matrix::zeros(a.nrows() + 1, cols);
        for i in 0..a.nrows() {
            for j in 0..cols {
                ra[(i, j)] = a[(i, j)];
            }
        }
        for j in 0..cols {
            ra[(a.nrows(), j)] = 1.0;
        }
        let mut rb = vec![0.0; a.nrows()];
        rb.push(1.0);
        let (ra, rb) = drop_dependent_rows(&ra, &rb)?;
        if let Some((ray_value, _)) = enumerate_min(&ra, &rb, &c) {
            if ray_value < -FEAS_TOL {
                return Err(Error::Unbounded);
            }
        }
    }

    let (value, x) = best;
    Ok(LpSolution {
        value,
        point: x[..n].to_vec(),
    })
}

/// Remove linearly dependent rows of `[A | b]`; error if a dependent row is
/// inconsistent with the rows kept.
fn drop_dependent_rows(a: &Matrix, b: &[f64]) -> Result<(Matrix, Vec<f64>)> {
    let (m, n) = (a.nrows(), a.ncols());
    // Work on the augmented matrix; select pivot rows greedily.
    let mut work: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(b[i]);
            row
        })
        .collect();
    let mut keep: Vec<usize> = Vec::new();
    let mut pivot_cols: Vec<usize> = Vec::new();
    for i in 0..m {
        // Reduce row i by previously chosen pivots.
        for (k, &pc) in keep.iter().zip(&pivot_cols) {
            let f = work[i][pc] / work[*k][pc];
            if f != 0.0 {
                let pivot_row = work[*k].clone();
                for (x, pv) in work[i].iter_mut().zip(&pivot_row) {
                    *x -= f * pv;
                }
            }
        }
        let scale = work[i][..n].iter().fold(0.0f64, |s, v| s.max(v.abs()));
        if scale > 1e-11 {
            let (pc, _) = work[i][..n]
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.abs().partial_cmp(&y.1.abs()).unwrap())
                .unwrap();
            keep.push(i);
            pivot_cols.push(pc);
        } else if work[i][n].abs() > 1e-8 {
            return Err(Error::Infeasible(format!(
                "constraint row {i} is inconsistent with the others"
            )));
        }
    }
    let rows: Vec<Vec<f64>> = keep.iter().map(|&i| a.row(i).to_vec()).collect();
    let rhs: Vec<f64> = keep.iter().map(|&i| b[i]).collect();
    Ok((Matrix::from_rows(&rows), rhs))
}

/// Minimum of `cᵀx` over the vertices of `{x >= 0 : A x = b}`, or `None`
/// when no basis is feasible. `A` must have full row rank.
fn enumerate_min(a: &Matrix, b: &[f64], c: &[f64]) -> Option<(f64, Vec<f64>)> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    enumerate_vertices(a, b, |x| {
        let value = dot(c, x);
        if best.as_ref().is_none_or(|(bv, _)| value < bv - 1e-12) {
            best = Some((value, x.to_vec()));
        }
    });
    best
}

/// Visit every basic feasible solution of `{x >= 0 : A x = b}` once per
/// feasible basis. `A` must have full row rank.
fn enumerate_vertices<F: FnMut(&[f64])>(a: &Matrix, b: &[f64], mut visit: F) {
    let (m, cols) = (a.nrows(), a.ncols());
    if m == 0 {
        visit(&vec![0.0; cols]);
        return;
    }
    if m > cols {
        return;
    }
    let mut basis: Vec<usize> = (0..m).collect();
    let mut submatrix = Matrix::zeros(m, m);
    let mut x = vec![0.0; cols];
    loop {
        for (k, &j) in basis.iter().enumerate() {
            for i in 0..m {
                submatrix[(i, k)] = a[(i, j)];
            }
        }
        if let Some(xb) = lu_solve(&submatrix, b, SINGULAR_TOL) {
            if xb.iter().all(|&v| v >= -FEAS_TOL) {
                x.iter_mut().for_each(|v| *v = 0.0);
                for (k, &j) in basis.iter().enumerate() {
                    x[j] = xb[k].max(0.0);
                }
                visit(&x);
            }
        }
        // Next m-combination of 0..cols in lexicographic order.
        let mut k = m;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if basis[k] != cols - m + k {
                basis[k] += 1;
                for i in k + 1..m {
                    basis[i] = basis[i - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Outcome of the simplex engine.
#[derive(Debug, Clone, PartialEq)]
enum SimplexOutcome {
    Optimal(f64, Vec<f64>),
    Infeasible,
    Unbounded,
}

/// Dense two-phase simplex with Bland's rule on
/// `min cᵀx  s.t.  A x = b, x >= 0`.
fn simplex_min(a: &Matrix, b: &[f64], c: &[f64]) -> SimplexOutcome {
    const PIVOT_TOL: f64 = 1e-11;
    const COST_TOL: f64 = 1e-9;
    let (m, n) = (a.nrows(), a.ncols());

    // Tableau with artificial columns n..n+m appended; rows sign-normalized.
    let width = n + m;
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs: Vec<f64> = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row: Vec<f64> = a.row(i).iter().map(|&v| sign * v).collect();
        row.resize(width, 0.0);
        row[n + i] = 1.0;
        t.push(row);
        rhs.push(sign * b[i]);
    }
    let mut basis: Vec<usize> = (n..width).collect();

    let pivot = |t: &mut Vec<Vec<f64>>, rhs: &mut Vec<f64>, basis: &mut Vec<usize>,
                 row: usize, col: usize| {
        let d = t[row][col];
        for v in t[row].iter_mut() {
            *v /= d;
        }
        rhs[row] /= d;
        let pivot_row = t[row].clone();
        let pivot_rhs = rhs[row];
        for i in 0..t.len() {
            if i == row {
                continue;
            }
            let f = t[i][col];
            if f == 0.0 {
                continue;
            }
            for (v, pv) in t[i].iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            rhs[i] -= f * pivot_rhs;
        }
        basis[row] = col;
    };

    // One simplex phase under Bland's rule; `allowed` marks enterable columns.
    let run_phase = |t: &mut Vec<Vec<f64>>,
                     rhs: &mut Vec<f64>,
                     basis: &mut Vec<usize>,
                     cost: &[f64],
                     allowed: usize|
     -> Option<()> {
        let mut guard = 0usize;
        loop {
            guard += 1;
            assert!(guard < 500_000, "simplex exceeded its iteration bound");
            // Reduced costs from the current basis.
            let mut y = vec![0.0; t.len()];
            for (i, &bi) in basis.iter().enumerate() {
                y[i] = cost[bi];
            }
            let mut entering = None;
            for j in 0..allowed {
                if basis.contains(&j) {
                    continue;
                }
                let reduced = cost[j] - (0..t.len()).map(|i| y[i] * t[i][j]).sum::<f64>();
                if reduced < -COST_TOL {
                    entering = Some(j);
                    break; // Bland: smallest index wins.
                }
            }
            let Some(col) = entering else {
                return Some(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..t.len() {
                if t[i][col] > PIVOT_TOL {
                    let ratio = rhs[i] / t[i][col];
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-12
                                || (ratio < lr + 1e-12 && basis[i] < basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return None; // No blocking row: unbounded in this phase.
            };
            pivot(t, rhs, basis, row, col);
        }
    };

    // Phase 1: minimize the artificial mass.
    let mut phase1_cost = vec![0.0; width];
    for item in phase1_cost.iter_mut().skip(n) {
        *item = 1.0;
    }
    run_phase(&mut t, &mut rhs, &mut basis, &phase1_cost, width)
        .expect("phase 1 is bounded below by zero");
    let artificial_mass: f64 = basis
        .iter()
        .enumerate()
        .filter(|(_, &bi)| bi >= n)
        .map(|(i, _)| rhs[i])
        .sum();
    if artificial_mass > 1e-8 {
        return SimplexOutcome::Infeasible;
    }
    // Remove zero-level artificials from the basis; drop redundant rows.
    let mut i = 0;
    while i < basis.len() {
        if basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| t[i][j].abs() > PIVOT_TOL) {
                pivot(&mut t, &mut rhs, &mut basis, i, col);
            } else {
                t.remove(i);
                rhs.remove(i);
                basis.remove(i);
                continue;
            }
        }
        i += 1;
    }

    // Phase 2 on the real objective, artificial columns barred.
    let mut cost = c.to_vec();
    cost.resize(width, 0.0);
    if run_phase(&mut t, &mut rhs, &mut basis, &cost, n).is_none() {
        return SimplexOutcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n {
            x[bi] = rhs[i].max(0.0);
        }
    }
    SimplexOutcome::Optimal(dot(c[..n].as_ref(), &x), x)
}

/// Exact Kantorovich transport cost between two discrete marginals.
///
/// `cost[(i, j)]` prices moving mass from row atom `i` to column atom `j`;
/// marginals must be nonnegative with equal totals (within 1e-12). Solved as
/// the transportation LP by the simplex engine, which the tests pin to both
/// the enumeration oracle and the closed-form quantile couplings.
pub fn brute_force_ot(cost: &Matrix, marg_row: &[f64], marg_col: &[f64]) -> Result<f64> {
    let (m, n) = (cost.nrows(), cost.ncols());
    if marg_row.len() != m || marg_col.len() != n {
        return Err(Error::InvalidArgument("marginal lengths do not match cost".into()));
    }
    if marg_row.iter().chain(marg_col).any(|&v| !v.is_finite() || v < 0.0) {
        return Err(Error::InvalidArgument("marginals must be >= 0".into()));
    }
    let (tr, tc): (f64, f64) = (marg_row.iter().sum(), marg_col.iter().sum());
    if (tr - tc).abs() > 1e-12 * tr.abs().max(tc.abs()).max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "marginal totals differ: {tr} vs {tc}"
        )));
    }
    if m * n > 4096 {
        return Err(Error::TooLarge(format!("{m}x{n} transport plan")));
    }
    // Variables g(i, j) flattened row-major; row sums then column sums.
    let mut a = Matrix::zeros(m + n, m * n);
    let mut b = Vec::with_capacity(m + n);
    for i in 0..m {
        for j in 0..n {
            a[(i, i * n + j)] = 1.0;
        }
        b.push(marg_row[i]);
    }
    for j in 0..n {
        for i in 0..m {
            a[(m + j, i * n + j)] = 1.0;
        }
        b.push(marg_col[j]);
    }
    let c: Vec<f64> = (0..m * n).map(|k| cost[(k / n, k % n)]).collect();
    match simplex_min(&a, &b, &c) {
        SimplexOutcome::Optimal(v, _) => Ok(v),
        SimplexOutcome::Infeasible => Err(Error::Infeasible(
            "transportation polytope is empty".into(),
        )),
        SimplexOutcome::Unbounded => unreachable!("transport polytopes are bounded"),
    }
}

/// Exact minimum of the 2×J partial transport program, independent of the
/// rank-equilibration solver: the column constraints get slack variables and
/// the LP is solved outright.
pub fn brute_force_partial_ot(inst: &PartialOtInstance) -> Result<f64> {
    let j = inst.num_columns();
    if j > 10 {
        return Err(Error::TooLarge(format!("J = {j} > 10 columns")));
    }
    let need = inst.gamma1[0] + inst.gamma1[1];
    let have: f64 = inst.gamma0.iter().sum();
    if have < need - 1e-12 {
        return Err(Error::Infeasible(format!(
            "column capacity {have} cannot absorb row mass {need}"
        )));
    }
    // Variables g(i, k) flattened as i*J + k, plus one slack per column.
    let cols = 2 * j + j;
    let mut a = Matrix::zeros(2 + j, cols);
    let mut b = Vec::with_capacity(2 + j);
    for i in 0..2 {
        for k in 0..j {
            a[(i, i * j + k)] = 1.0;
        }
        b.push(inst.gamma1[i]);
    }
    for k in 0..j {
        a[(2 + k, k)] = 1.0;
        a[(2 + k, j + k)] = 1.0;
        a[(2 + k, 2 * j + k)] = 1.0;
        b.push(inst.gamma0[k]);
    }
    let mut c = vec![0.0; cols];
    for i in 0..2 {
        for k in 0..j {
            c[i * j + k] = inst.pi[i][k];
        }
    }
    match simplex_min(&a, &b, &c) {
        SimplexOutcome::Optimal(v, _) => Ok(v),
        SimplexOutcome::Infeasible => Err(Error::Infeasible(
            "partial transport polytope is empty".into(),
        )),
        SimplexOutcome::Unbounded => unreachable!("bounded by the capacity rows"),
    }
}

/// Per-covariate ingredients of the demographic-disparity LP.
#[derive(Debug, Clone)]
pub struct KallusCell {
    /// `Pr(Y1 = 1 | X = x)`.
    pub p_y1: f64,
    /// `Pr(Y0 = a_j | X = x)` for `j = 1..J`.
    pub class_probs_x: Vec<f64>,
}

fn kallus_validate(p_len: usize, cell: &KallusCell, class_probs: &[f64]) -> Result<()> {
    let j = class_probs.len();
    if p_len + 1 != j {
        return Err(Error::InvalidArgument(format!(
            "direction has {p_len} entries, expected J - 1 = {}",
            j - 1
        )));
    }
    if cell.class_probs_x.len() != j {
        return Err(Error::InvalidArgument("cell class count mismatch".into()));
    }
    if let Some(k) = class_probs.iter().position(|&c| c <= 1e-12) {
        return Err(Error::DegenerateClass(format!(
            "class {k} has zero marginal probability"
        )));
    }
    if !(0.0..=1.0).contains(&cell.p_y1) {
        return Err(Error::InvalidArgument(format!(
            "Pr(Y1=1|x) = {} outside [0, 1]",
            cell.p_y1
        )));
    }
    Ok(())
}

/// Constraints shared by every direction: variables `P_k(y1)` at index
/// `2k + y1`, simplex rows per decision value, marginal-consistency rows
/// per class, and unit upper bounds.
fn kallus_constraints(cell: &KallusCell) -> ((Matrix, Vec<f64>), (Matrix, Vec<f64>)) {
    let j = cell.class_probs_x.len();
    let nv = 2 * j;
    let mut eq = Matrix::zeros(2 + j, nv);
    let mut eq_rhs = Vec::with_capacity(2 + j);
    for y1 in 0..2 {
        for k in 0..j {
            eq[(y1, 2 * k + y1)] = 1.0;
        }
        eq_rhs.push(1.0);
    }
    for k in 0..j {
        eq[(2 + k, 2 * k)] = 1.0 - cell.p_y1;
        eq[(2 + k, 2 * k + 1)] = cell.p_y1;
        eq_rhs.push(cell.class_probs_x[k]);
    }
    let mut ub = Matrix::zeros(nv, nv);
    for v in 0..nv {
        ub[(v, v)] = 1.0;
    }
    let ub_rhs = vec![1.0; nv];
    ((eq, eq_rhs), (ub, ub_rhs))
}

/// Minimization objective (the negated contrast); only `y1 = 1` variables
/// carry mass.
fn kallus_objective(p: &[f64], cell: &KallusCell, class_probs: &[f64]) -> Vec<f64> {
    let j = class_probs.len();
    let mut objective = vec![0.0; 2 * j];
    for (k, &pk) in p.iter().enumerate() {
        objective[2 * k + 1] -= pk * cell.p_y1 / class_probs[k];
    }
    let p_sum: f64 = p.iter().sum();
    objective[2 * (j - 1) + 1] += p_sum * cell.p_y1 / class_probs[j - 1];
    objective
}

/// The Kallus support-function LP for demographic disparity at one covariate
/// value: maximize the contrast objective over conditional class shares
/// `P_j(y1)` subject to the simplex and marginal-consistency constraints.
///
/// `p` has length `J - 1` (contrasts against the reference class `J`);
/// the returned value is `Φ_K(p, x)`. Solved through [`solve_lp_exact`].
pub fn kallus_dd_lp(p: &[f64], cell: &KallusCell, class_probs: &[f64]) -> Result<f64> {
    kallus_validate(p.len(), cell, class_probs)?;
    let (eq, ub) = kallus_constraints(cell);
    let lp = LpProblem::new(kallus_objective(p, cell, class_probs), eq, ub)?;
    let sol = solve_lp_exact(&lp)?;
    Ok(-sol.value)
}

/// [`kallus_dd_lp`] over many directions at one covariate value: the
/// feasible polytope does not depend on the direction, so its vertices are
/// enumerated once and each direction scans them. Values are identical to
/// the per-direction calls.
pub fn kallus_dd_lp_batch(
    ps: &[Vec<f64>],
    cell: &KallusCell,
    class_probs: &[f64],
) -> Result<Vec<f64>> {
    for p in ps {
        kallus_validate(p.len(), cell, class_probs)?;
    }
    let (eq, ub) = kallus_constraints(cell);
    let nv = 2 * class_probs.len();
    let lp = LpProblem::new(vec![0.0; nv], eq, ub)?;
    let vertices = lp_vertices(&lp)?;
    Ok(ps
        .iter()
        .map(|p| {
            let c = kallus_objective(p, cell, class_probs);
            -vertices
                .iter()
                .map(|v| dot(&c, v))
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

/// All basic feasible solutions of the problem's polytope, projected to the
/// original variables. Errors as [`solve_lp_exact`] does on size and
/// feasibility; the objective of `p` is ignored.
pub fn lp_vertices(p: &LpProblem) -> Result<Vec<Vec<f64>>> {
    let n = p.objective.len();
    if n > MAX_EXACT_VARS {
        return Err(Error::TooLarge(format!("{n} variables > {MAX_EXACT_VARS}")));
    }
    let rows = p.eq.0.nrows() + p.ub.0.nrows();
    if rows > MAX_EXACT_ROWS {
        return Err(Error::TooLarge(format!("{rows} rows > {MAX_EXACT_ROWS}")));
    }
    let (a, b, _) = p.standard_form();
    let (a, b) = drop_dependent_rows(&a, &b)?;
    let mut out = Vec::new();
    enumerate_vertices(&a, &b, |x| out.push(x[..n].to_vec()));
    if out.is_empty() {
        return Err(Error::Infeasible("no basic feasible solution exists".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lp(
        objective: Vec<f64>,
        eq: (Vec<Vec<f64>>, Vec<f64>),
        ub: (Vec<Vec<f64>>, Vec<f64>),
    ) -> LpProblem {
        LpProblem::new(
            objective,
            (Matrix::from_rows(&eq.0), eq.1),
            (Matrix::from_rows(&ub.0), ub.1),
        )
        .unwrap()
    }

    #[test]
    fn simplex_and_enumeration_agree_on_basics() {
        // min x1 s.t. x1 + x2 = 1
        let p = lp(vec![1.0, 0.0], (vec![vec![1.0, 1.0]], vec![1.0]), (vec![], vec![]));
        let s = solve_lp_exact(&p).unwrap();
        assert!((s.value - 0.0).abs() < 1e-12);
        assert!((s.point[1] - 1.0).abs() < 1e-12);

        // min -x1 s.t. x1 <= 2, x1 = x2
        let p = lp(
            vec![-1.0, 0.0],
            (vec![vec![1.0, -1.0]], vec![0.0]),
            (vec![vec![1.0, 0.0]], vec![2.0]),
        );
        let s = solve_lp_exact(&p).unwrap();
        assert!((s.value + 2.0).abs() < 1e-12);
        assert!((s.point[0] - 2.0).abs() < 1e-9 && (s.point[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_detected() {
        // min -x1 s.t. x1 = x2: ray (1, 1) improves forever.
        let p = lp(vec![-1.0, 0.0], (vec![vec![1.0, -1.0]], vec![0.0]), (vec![], vec![]));
        assert!(matches!(solve_lp_exact(&p), Err(Error::Unbounded)));
    }

    #[test]
    fn infeasible_detected() {
        let p = lp(
            vec![1.0],
            (vec![vec![1.0]], vec![2.0]),
            (vec![vec![1.0]], vec![1.0]),
        );
        assert!(matches!(solve_lp_exact(&p), Err(Error::Infeasible(_))));
    }

    #[test]
    fn size_guard() {
        let n = MAX_EXACT_VARS + 1;
        let p = lp(vec![0.0; n], (vec![vec![1.0; n]], vec![1.0]), (vec![], vec![]));
        assert!(matches!(solve_lp_exact(&p), Err(Error::TooLarge(_))));
    }

    #[test]
    fn redundant_and_inconsistent_rows() {
        // A duplicated equality row must not break basis enumeration.
        let p = lp(
            vec![1.0, 0.0],
            (vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 1.0]),
            (vec![], vec![]),
        );
        let s = solve_lp_exact(&p).unwrap();
        assert!(s.value.abs() < 1e-12);

        // The same row with a contradictory right-hand side is infeasible.
        let p = lp(
            vec![1.0, 0.0],
            (vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 2.0]),
            (vec![], vec![]),
        );
        assert!(matches!(solve_lp_exact(&p), Err(Error::Infeasible(_))));
    }

    #[test]
    fn variable_permutation_invariance() {
        let p1 = lp(
            vec![1.0, 2.0, 3.0],
            (vec![vec![1.0, 1.0, 1.0]], vec![1.0]),
            (vec![vec![0.0, 1.0, 0.5]], vec![0.4]),
        );
        // Swap variables 1 and 3.
        let p2 = lp(
            vec![3.0, 2.0, 1.0],
            (vec![vec![1.0, 1.0, 1.0]], vec![1.0]),
            (vec![vec![0.5, 1.0, 0.0]], vec![0.4]),
        );
        let (a, b) = (solve_lp_exact(&p1).unwrap(), solve_lp_exact(&p2).unwrap());
        assert!((a.value - b.value).abs() < 1e-10);
    }

    /// Random bounded LPs: the two engines must agree on both status and value.
    #[test]
    fn simplex_matches_enumeration_on_random_lps() {
        let mut rng = ChaCha8Rng::seed_from_u64(20240801);
        let mut optima = 0;
        for _ in 0..400 {
            let n = rng.random_range(2..=5usize);
            let me = rng.random_range(0..=2usize);
            let mu = rng.random_range(1..=3usize);
            let objective: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let eq_rows: Vec<Vec<f64>> = (0..me)
                .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let eq_rhs: Vec<f64> = (0..me).map(|_| rng.random_range(-0.5..1.0)).collect();
            // One all-ones ub row keeps every instance bounded.
            let mut ub_rows: Vec<Vec<f64>> = vec![vec![1.0; n]];
            let mut ub_rhs: Vec<f64> = vec![rng.random_range(1.0..3.0)];
            for _ in 1..mu {
                ub_rows.push((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
                ub_rhs.push(rng.random_range(0.0..1.5));
            }
            let p = lp(objective, (eq_rows, eq_rhs), (ub_rows, ub_rhs));
            let (a, b, c) = p.standard_form();
            let exact = solve_lp_exact(&p);
            let quick = simplex_min(&a, &b, &c);
            match (exact, quick) {
                (Ok(s), SimplexOutcome::Optimal(v, _)) => {
                    assert!((s.value - v).abs() < 1e-8, "{} vs {v}", s.value);
                    optima += 1;
                }
                (Err(Error::Infeasible(_)), SimplexOutcome::Infeasible) => {}
                (e, q) => panic!("status mismatch: {e:?} vs {q:?}"),
            }
        }
        assert!(optima > 100, "want a healthy share of feasible instances");
    }

    #[test]
    fn transport_one_by_one() {
        let c = Matrix::from_rows(&[vec![3.5]]);
        assert!((brute_force_ot(&c, &[1.0], &[1.0]).unwrap() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn transport_rejects_mass_mismatch() {
        let c = Matrix::from_rows(&[vec![1.0, 2.0]]);
        assert!(matches!(
            brute_force_ot(&c, &[1.0], &[0.3, 0.3]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn transport_row_permutation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (m, n) = (3usize, 4usize);
            let rows: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let mut mr: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..1.0)).collect();
            let mc: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
            let (sr, sc): (f64, f64) = (mr.iter().sum(), mc.iter().sum());
            mr.iter_mut().for_each(|v| *v *= sc / sr);
            let v1 = brute_force_ot(&Matrix::from_rows(&rows), &mr, &mc).unwrap();
            let perm = [2usize, 0, 1];
            let rows2: Vec<Vec<f64>> = perm.iter().map(|&i| rows[i].clone()).collect();
            let mr2: Vec<f64> = perm.iter().map(|&i| mr[i]).collect();
            let v2 = brute_force_ot(&Matrix::from_rows(&rows2), &mr2, &mc).unwrap();
            assert!((v1 - v2).abs() < 1e-9);
        }
    }

    #[test]
    fn partial_ot_trivial_cases() {
        let zero = PartialOtInstance::new(
            [vec![1.0, -1.0], vec![0.5, 0.5]],
            [0.0, 0.0],
            vec![0.5, 0.5],
        )
        .unwrap();
        assert!(brute_force_partial_ot(&zero).unwrap().abs() < 1e-12);

        let single = PartialOtInstance::new([vec![1.0], vec![2.0]], [0.3, 0.2], vec![1.0]).unwrap();
        assert!((brute_force_partial_ot(&single).unwrap() - 0.7).abs() < 1e-10);
    }

    /// The simplex route must equal the enumeration route on the same
    /// standard form, column slacks included, at enumerable sizes.
    #[test]
    fn partial_ot_matches_enumeration_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..150 {
            let j = rng.random_range(1..=4usize);
            let inst = random_partial_instance(&mut rng, j);
            let via_simplex = brute_force_partial_ot(&inst).unwrap();

            let mut eq = Matrix::zeros(2, 2 * j);
            for i in 0..2 {
                for k in 0..j {
                    eq[(i, i * j + k)] = 1.0;
                }
            }
            let mut ub = Matrix::zeros(j, 2 * j);
            for k in 0..j {
                ub[(k, k)] = 1.0;
                ub[(k, j + k)] = 1.0;
            }
            let mut c = inst.pi[0].clone();
            c.extend_from_slice(&inst.pi[1]);
            let p = LpProblem::new(
                c,
                (eq, inst.gamma1.to_vec()),
                (ub, inst.gamma0.clone()),
            )
            .unwrap();
            let via_enum = solve_lp_exact(&p).unwrap().value;
            assert!(
                (via_simplex - via_enum).abs() < 1e-9,
                "J={j}: {via_simplex} vs {via_enum}"
            );
        }
    }

    /// Completing the instance with a zero-cost waste row turns it into a
    /// balanced transport problem with the same value.
    #[test]
    fn partial_ot_waste_row_completion() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        for _ in 0..60 {
            let j = rng.random_range(1..=5usize);
            let inst = random_partial_instance(&mut rng, j);
            let partial = brute_force_partial_ot(&inst).unwrap();
            let have: f64 = inst.gamma0.iter().sum();
            let waste = (have - inst.gamma1[0] - inst.gamma1[1]).max(0.0);
            let cost = Matrix::from_rows(&[
                inst.pi[0].clone(),
                inst.pi[1].clone(),
                vec![0.0; j],
            ]);
            let full = brute_force_ot(
                &cost,
                &[inst.gamma1[0], inst.gamma1[1], waste],
                &inst.gamma0,
            )
            .unwrap();
            assert!(partial <= full + 1e-9);
            assert!((partial - full).abs() < 1e-9);
        }
    }

    #[test]
    fn kallus_zero_direction_and_scaling() {
        let cell = KallusCell {
            p_y1: 0.6,
            class_probs_x: vec![0.2, 0.3, 0.5],
        };
        let class_probs = vec![0.25, 0.35, 0.4];
        let zero = kallus_dd_lp(&[0.0, 0.0], &cell, &class_probs).unwrap();
        assert!(zero.abs() < 1e-10);

        let base = kallus_dd_lp(&[0.7, -0.2], &cell, &class_probs).unwrap();
        let scaled = kallus_dd_lp(&[2.1, -0.6], &cell, &class_probs).unwrap();
        assert!((scaled - 3.0 * base).abs() < 1e-9);
    }

    #[test]
    fn kallus_batch_matches_single_calls() {
        let mut rng = ChaCha8Rng::seed_from_u64(314);
        for _ in 0..10 {
            let j = rng.random_range(2..=4usize);
            let mut cps: Vec<f64> = (0..j).map(|_| rng.random_range(0.1..1.0)).collect();
            let s: f64 = cps.iter().sum();
            cps.iter_mut().for_each(|c| *c /= s);
            let mut cpx: Vec<f64> = (0..j).map(|_| rng.random_range(0.05..1.0)).collect();
            let sx: f64 = cpx.iter().sum();
            cpx.iter_mut().for_each(|c| *c /= sx);
            let cell = KallusCell {
                p_y1: rng.random_range(0.0..=1.0),
                class_probs_x: cpx,
            };
            let ps: Vec<Vec<f64>> = (0..5)
                .map(|_| (0..j - 1).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let batch = kallus_dd_lp_batch(&ps, &cell, &cps).unwrap();
            for (p, &bv) in ps.iter().zip(&batch) {
                let sv = kallus_dd_lp(p, &cell, &cps).unwrap();
                assert!((sv - bv).abs() < 1e-10, "{sv} vs {bv}");
            }
        }
    }

    #[test]
    fn kallus_degenerate_class_rejected() {
        let cell = KallusCell {
            p_y1: 0.5,
            class_probs_x: vec![0.5, 0.5],
        };
        assert!(matches!(
            kallus_dd_lp(&[1.0], &cell, &[1.0, 0.0]),
            Err(Error::DegenerateClass(_))
        ));
    }

    pub(crate) fn random_partial_instance(rng: &mut ChaCha8Rng, j: usize) -> PartialOtInstance {
        let pi0: Vec<f64> = (0..j).map(|_| rng.random_range(-1.0..1.0)).collect();
        let pi1: Vec<f64> = (0..j).map(|_| rng.random_range(-1.0..1.0)).collect();
        let gamma0: Vec<f64> = (0..j).map(|_| rng.random_range(0.0..1.0)).collect();
        let mut gamma1 = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        let have: f64 = gamma0.iter().sum();
        let need = gamma1[0] + gamma1[1];
        if need > 0.0 {
            // Mostly strictly feasible, sometimes exactly tight.
            let tight = rng.random_range(0..10) == 0;
            let scale = if tight { 1.0 } else { rng.random_range(0.2..1.0) };
            if need > have || tight {
                gamma1[0] *= scale * have / need;
                gamma1[1] *= scale * have / need;
            }
        }
        PartialOtInstance::new([pi0, pi1], gamma1, gamma0).unwrap()
    }
}
