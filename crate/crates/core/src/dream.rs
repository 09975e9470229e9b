//! Exact solver for the 2×J optimal partial transport problem.
//!
//! The program is
//!
//! ```text
//!   min  Σ_{i,j} π(i,j) Γ(i,j)
//!   s.t. Γ(i,j) ≥ 0,
//!        Γ(0,j) + Γ(1,j) ≤ γ0(j)   for each column j,
//!        Σ_j Γ(i,j)      = γ1(i)   for each row i,
//! ```
//!
//! i.e. only the row masses must be fully transported; column capacity may
//! be left unused. After reordering the columns so that
//! `d(j) = π(1,j) - π(0,j)` is non-increasing, the cost is submodular and an
//! optimal plan has monotone support: there is a pivot column `J*` with
//! `Γ(1,j) = 0` left of it and `Γ(0,j) = 0` right of it. The solver brackets
//! the pivot by partial-sum feasibility, then for each candidate pivot fills
//! both rows greedily by rank of `π` and repairs the one shared-capacity
//! constraint at the pivot column by moving mass to the cheapest remaining
//! headroom. The minimum over candidate pivots is the exact optimum, which
//! the test suite pins against an independent linear-programming oracle.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Absolute slack applied to constraint checks on solver output.
pub const PLAN_FEAS_TOL: f64 = 1e-10;

/// Total-mass feasibility slack on input instances.
pub const MASS_FEAS_TOL: f64 = 1e-12;

/// Step-3 rebalancing stops once the pivot column's excess drops below this.
const REBALANCE_TOL: f64 = 1e-12;

/// Data of one 2×J partial transport problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialOtInstance {
    /// Costs `π(i, j)` for rows `i ∈ {0, 1}`; `pi[i][j]` is row i, column j.
    pub pi: [Vec<f64>; 2],
    /// Row masses `(γ1(0), γ1(1))`, both fully transported.
    pub gamma1: [f64; 2],
    /// Column capacities `γ0(j)`; zero-capacity columns are kept so indices
    /// stay aligned with whatever the columns denote for the caller.
    pub gamma0: Vec<f64>,
}

impl PartialOtInstance {
    /// Validate shapes and nonnegativity. Total-mass feasibility is checked
    /// at solve time so that constructing an infeasible instance (e.g. from a
    /// file) still yields a diagnosable value.
    pub fn new(pi: [Vec<f64>; 2], gamma1: [f64; 2], gamma0: Vec<f64>) -> Result<Self> {
        let j = gamma0.len();
        if j == 0 {
            return Err(Error::InvalidArgument("instance needs J >= 1 columns".into()));
        }
        if pi[0].len() != j || pi[1].len() != j {
            return Err(Error::InvalidArgument(format!(
                "cost rows have lengths {} and {}, expected {j}",
                pi[0].len(),
                pi[1].len()
            )));
        }
        for row in &pi {
            if row.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidArgument("non-finite cost entry".into()));
            }
        }
        if gamma1.iter().any(|&m| !m.is_finite() || m < 0.0)
            || gamma0.iter().any(|&m| !m.is_finite() || m < 0.0)
        {
            return Err(Error::InvalidArgument("masses must be finite and >= 0".into()));
        }
        Ok(PartialOtInstance { pi, gamma1, gamma0 })
    }

    pub fn num_columns(&self) -> usize {
        self.gamma0.len()
    }

    fn check_feasible(&self) -> Result<()> {
        let need = self.gamma1[0] + self.gamma1[1];
        let have: f64 = self.gamma0.iter().sum();
        if have < need - MASS_FEAS_TOL {
            return Err(Error::Infeasible(format!(
                "column capacity {have} cannot absorb row mass {need}"
            )));
        }
        Ok(())
    }

    /// Apply a column permutation: `permuted.gamma0[k] = gamma0[perm[k]]`.
    fn permute_columns(&self, perm: &[usize]) -> PartialOtInstance {
        PartialOtInstance {
            pi: [
                perm.iter().map(|&j| self.pi[0][j]).collect(),
                perm.iter().map(|&j| self.pi[1][j]).collect(),
            ],
            gamma1: self.gamma1,
            gamma0: perm.iter().map(|&j| self.gamma0[j]).collect(),
        }
    }
}

/// Output of [`solve_dream`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DreamSolution {
    /// Exact optimal cost.
    pub cost: f64,
    /// Optimal plan `Γ(i, j)` in the caller's original column order.
    pub plan: [Vec<f64>; 2],
    /// Pivot column `J*` (1-based, in canonical column order).
    pub pivot: usize,
    /// Pivot bracket `(JL, JU)` (1-based, in canonical column order).
    pub bracket: (usize, usize),
}

/// Reorder columns so the cost is submodular: `d(j) = π(1,j) - π(0,j)`
/// non-increasing, ties broken by ascending original index.
///
/// Returns the permutation (`perm[k]` = original index of canonical column
/// `k`) together with the reordered instance.
pub fn canonical_order(inst: &PartialOtInstance) -> (Vec<usize>, PartialOtInstance) {
    let d: Vec<f64> = inst.pi[1]
        .iter()
        .zip(&inst.pi[0])
        .map(|(a, b)| a - b)
        .collect();
    let mut perm: Vec<usize> = (0..inst.num_columns()).collect();
    perm.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).expect("finite costs").then(a.cmp(&b)));
    let reordered = inst.permute_columns(&perm);
    (perm, reordered)
}

/// Bracket the optimal pivot: `JL` is minimal with
/// `Σ_{j<=JL} γ0(j) >= γ1(0)` and `JU` maximal with
/// `Σ_{j>=JU} γ0(j) >= γ1(1)` (both 1-based). Assumes canonical order.
pub fn narrow_bracket(inst: &PartialOtInstance) -> Result<(usize, usize)> {
    inst.check_feasible()?;
    let j = inst.num_columns();
    let mut jl = 1;
    let mut acc = inst.gamma0[0];
    while acc < inst.gamma1[0] - MASS_FEAS_TOL && jl < j {
        acc += inst.gamma0[jl];
        jl += 1;
    }
    let mut ju = j;
    let mut acc = inst.gamma0[j - 1];
    while acc < inst.gamma1[1] - MASS_FEAS_TOL && ju > 1 {
        ju -= 1;
        acc += inst.gamma0[ju - 1];
    }
    debug_assert!(jl <= ju, "feasible instances always bracket");
    Ok((jl, ju))
}

/// Indices `0..n` offset by `base`, sorted by `(key, index)` ascending.
fn rank_order(keys: &[f64], base: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (base..base + keys.len()).collect();
    order.sort_by(|&a, &b| {
        keys[a - base]
            .partial_cmp(&keys[b - base])
            .expect("finite costs")
            .then(a.cmp(&b))
    });
    order
}

/// Solve the partial transport problem exactly.
///
/// The returned plan is expressed in the caller's original column order;
/// `pivot` and `bracket` refer to the canonical (submodular) order, which
/// callers can reproduce with [`canonical_order`].
pub fn solve_dream(inst: &PartialOtInstance) -> Result<DreamSolution> {
    inst.check_feasible()?;
    let (perm, c) = canonical_order(inst);
    let (jl, ju) = narrow_bracket(&c)?;
    let j = c.num_columns();
    let (p0, p1) = (&c.pi[0], &c.pi[1]);

    let mut best_cost = f64::INFINITY;
    let mut best_plan: Option<[Vec<f64>; 2]> = None;
    let mut best_pivot = jl;

    let mut plan = [vec![0.0; j], vec![0.0; j]];
    for jj in jl..=ju {
        let p = jj - 1; // 0-based pivot column
        plan[0].iter_mut().for_each(|v| *v = 0.0);
        plan[1].iter_mut().for_each(|v| *v = 0.0);

        // Step 2: fill each row greedily by ascending cost rank. Row 0 may
        // occupy columns 1..=jj, row 1 columns jj..=J.
        let order0 = rank_order(&p0[..jj], 0);
        let mut m = c.gamma1[0];
        for &w in &order0 {
            let take = c.gamma0[w].min(m);
            plan[0][w] = take;
            m -= take;
        }
        let order1 = rank_order(&p1[p..], p);
        let mut m = c.gamma1[1];
        for &w in &order1 {
            let take = c.gamma0[w].min(m);
            plan[1][w] = take;
            m -= take;
        }

        // Step 3: both rows may claim the pivot column; push the overflow to
        // the cheapest remaining headroom, in ascending order of the cost
        // increment over the pivot column's own cost. Only columns ranked at
        // or after the pivot within their row can hold headroom, and one
        // ranked pass clears the excess whenever the instance is feasible.
        let mut excess = plan[0][p] + plan[1][p] - c.gamma0[p];
        if excess > REBALANCE_TOL {
            let mut moves: Vec<(f64, usize, usize)> = Vec::with_capacity(j);
            for w in 0..jj {
                if w != p && (p0[w], w) > (p0[p], p) {
                    moves.push((p0[w] - p0[p], 0, w));
                }
            }
            for w in p..j {
                if w != p && (p1[w], w) > (p1[p], p) {
                    moves.push((p1[w] - p1[p], 1, w));
                }
            }
            moves.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite costs").then(a.2.cmp(&b.2)));
            for &(_, i, w) in &moves {
                let headroom = c.gamma0[w] - plan[i][w];
                let mv = excess.min(headroom);
                if mv > 0.0 {
                    plan[i][w] += mv;
                    plan[i][p] -= mv;
                    excess -= mv;
                }
                if excess <= REBALANCE_TOL {
                    break;
                }
            }
            debug_assert!(excess <= REBALANCE_TOL, "rebalance must clear a feasible pivot");
        }

        let cost: f64 = (0..j).map(|k| p0[k] * plan[0][k] + p1[k] * plan[1][k]).sum();
        if cost < best_cost {
            best_cost = cost;
            best_plan = Some(plan.clone());
            best_pivot = jj;
        }
    }

    let canon = best_plan.expect("bracket is never empty");
    // Undo the canonical permutation: canonical column k is original perm[k].
    let mut original = [vec![0.0; j], vec![0.0; j]];
    for (k, &orig) in perm.iter().enumerate() {
        original[0][orig] = canon[0][k];
        original[1][orig] = canon[1][k];
    }
    Ok(DreamSolution {
        cost: best_cost,
        plan: original,
        pivot: best_pivot,
        bracket: (jl, ju),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(pi0: &[f64], pi1: &[f64], gamma1: [f64; 2], gamma0: &[f64]) -> PartialOtInstance {
        PartialOtInstance::new([pi0.to_vec(), pi1.to_vec()], gamma1, gamma0.to_vec()).unwrap()
    }

    #[test]
    fn canonical_order_makes_d_nonincreasing() {
        // d = (4, 1) is already non-increasing, so the order is the identity.
        let i = inst(&[1.0, 2.0], &[5.0, 3.0], [0.1, 0.1], &[0.5, 0.5]);
        let (perm, c) = canonical_order(&i);
        assert_eq!(perm, vec![0, 1]);
        let d: Vec<f64> = c.pi[1].iter().zip(&c.pi[0]).map(|(a, b)| a - b).collect();
        assert!(d.windows(2).all(|w| w[0] >= w[1]));

        // d = (-1, 3) must be flipped.
        let i = inst(&[2.0, 0.0], &[1.0, 3.0], [0.1, 0.1], &[0.5, 0.5]);
        let (perm, c) = canonical_order(&i);
        assert_eq!(perm, vec![1, 0]);
        let d: Vec<f64> = c.pi[1].iter().zip(&c.pi[0]).map(|(a, b)| a - b).collect();
        assert!(d.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn canonical_order_breaks_ties_by_index() {
        let i = inst(&[1.0, 3.0, 2.0], &[2.0, 4.0, 3.0], [0.1, 0.1], &[0.3, 0.3, 0.4]);
        let (perm, _) = canonical_order(&i); // d = (1, 1, 1)
        assert_eq!(perm, vec![0, 1, 2]);
    }

    #[test]
    fn bracket_partial_sums() {
        let i = inst(
            &[0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0],
            [0.4, 0.5],
            &[0.2, 0.3, 0.5],
        );
        assert_eq!(narrow_bracket(&i).unwrap(), (2, 3));
    }

    #[test]
    fn bracket_zero_mass_spans_everything() {
        let i = inst(&[0.0; 4], &[0.0; 4], [0.0, 0.0], &[0.1, 0.2, 0.3, 0.4]);
        assert_eq!(narrow_bracket(&i).unwrap(), (1, 4));
    }

    #[test]
    fn infeasible_reported() {
        let i = inst(&[0.0], &[0.0], [0.6, 0.6], &[1.0]);
        assert!(matches!(narrow_bracket(&i), Err(Error::Infeasible(_))));
        assert!(matches!(solve_dream(&i), Err(Error::Infeasible(_))));
    }

    #[test]
    fn single_column() {
        let i = inst(&[1.0], &[2.0], [0.3, 0.2], &[1.0]);
        let s = solve_dream(&i).unwrap();
        assert!((s.cost - 0.7).abs() < 1e-12);
        assert!((s.plan[0][0] - 0.3).abs() < 1e-12);
        assert!((s.plan[1][0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn one_row_greedy_fill() {
        // Only row 0 carries mass: fill the two cheapest columns.
        let i = inst(
            &[3.0, 1.0, 2.0],
            &[0.0, 0.0, 0.0],
            [0.5, 0.0],
            &[0.4, 0.3, 0.3],
        );
        let s = solve_dream(&i).unwrap();
        assert!((s.cost - 0.7).abs() < 1e-12);
    }

    #[test]
    fn solution_satisfies_plan_invariants() {
        let i = inst(
            &[0.3, -0.2, 0.9, 0.1],
            &[-0.5, 0.4, 0.2, -0.1],
            [0.45, 0.35],
            &[0.3, 0.25, 0.25, 0.3],
        );
        let s = solve_dream(&i).unwrap();
        for row in 0..2 {
            let total: f64 = s.plan[row].iter().sum();
            assert!((total - i.gamma1[row]).abs() < PLAN_FEAS_TOL);
            assert!(s.plan[row].iter().all(|&g| g >= -PLAN_FEAS_TOL));
        }
        for j in 0..4 {
            assert!(s.plan[0][j] + s.plan[1][j] <= i.gamma0[j] + PLAN_FEAS_TOL);
        }
        let direct: f64 = (0..4)
            .map(|j| i.pi[0][j] * s.plan[0][j] + i.pi[1][j] * s.plan[1][j])
            .sum();
        assert!((direct - s.cost).abs() < PLAN_FEAS_TOL);

        // Monotone support in canonical order.
        let (perm, _) = canonical_order(&i);
        let pivot = s.pivot;
        for (k, &orig) in perm.iter().enumerate() {
            if k + 1 < pivot {
                assert!(s.plan[1][orig].abs() <= PLAN_FEAS_TOL);
            }
            if k + 1 > pivot {
                assert!(s.plan[0][orig].abs() <= PLAN_FEAS_TOL);
            }
        }
        assert!(s.bracket.0 <= pivot && pivot <= s.bracket.1);
    }

    #[test]
    fn zero_capacity_columns_are_kept() {
        let i = inst(&[5.0, 1.0], &[5.0, 1.0], [0.2, 0.2], &[0.0, 1.0]);
        let s = solve_dream(&i).unwrap();
        assert_eq!(s.plan[0].len(), 2);
        assert!(s.plan[0][0].abs() < 1e-15 && s.plan[1][0].abs() < 1e-15);
        assert!((s.cost - 0.4).abs() < 1e-12);
    }
}
