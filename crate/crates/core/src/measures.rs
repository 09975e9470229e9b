//! Discrete univariate laws and conditional-law tables over a covariate grid.
//!
//! Every integral against the covariate distribution in this crate runs over
//! a finite weighted grid, so a model's covariate ingredient is always a
//! [`ConditionalLawTable`]: one row per grid point, carrying that point's
//! weight and its pair of conditional laws. Continuous designs are
//! pre-discretized (see [`discretize_gaussian`]).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Values closer than this are merged into one atom at construction.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

/// Probabilities must sum to one within this tolerance after normalization.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// A univariate law as sorted atoms with probabilities.
///
/// Invariants: values strictly increasing, probabilities nonnegative and
/// summing to one within [`PROB_SUM_TOL`]. Construction through
/// [`DiscreteDist::new`] merges duplicates and renormalizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDist {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteDist {
    /// Canonicalize `(value, prob)` pairs into a distribution.
    ///
    /// Equal values (within [`ATOM_MERGE_TOL`]) are merged by summing their
    /// probabilities; the result is sorted and renormalized to total mass one.
    /// Errors on empty input, negative probabilities, non-finite entries, or
    /// zero total mass.
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidDistribution("no atoms supplied".into()));
        }
        for &(v, p) in pairs {
            if !v.is_finite() || !p.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "non-finite atom ({v}, {p})"
                )));
            }
            if p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "negative probability {p} at value {v}"
                )));
            }
        }
        let mut sorted: Vec<(f64, f64)> = pairs.to_vec();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
        let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (v, p) in sorted {
            match atoms.last_mut() {
                Some(last) if v - last.0 <= ATOM_MERGE_TOL => last.1 += p,
                _ => atoms.push((v, p)),
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("total mass is zero".into()));
        }
        for atom in &mut atoms {
            atom.1 /= total;
        }
        Ok(DiscreteDist { atoms })
    }

    /// Point mass at `value`.
    pub fn dirac(value: f64) -> Self {
        DiscreteDist {
            atoms: vec![(value, 1.0)],
        }
    }

    /// Law on {0, 1} with success probability `p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "bernoulli probability {p} outside [0, 1]"
            )));
        }
        DiscreteDist::new(&[(0.0, 1.0 - p), (1.0, p)])
    }

    /// Sorted `(value, prob)` atoms.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// First moment.
    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(v, p)| v * p).sum()
    }

    /// Pushforward through an affine map; `scale` may be negative or zero.
    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        let pairs: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .map(|&(v, p)| (scale * v + shift, p))
            .collect();
        DiscreteDist::new(&pairs).expect("affine image of a valid law is valid")
    }
}

/// Mean and standard deviation of a Gaussian ingredient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mean: f64,
    pub sd: f64,
}

impl GaussianSpec {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        if !mean.is_finite() || !sd.is_finite() || sd < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "gaussian spec requires finite mean and sd >= 0, got ({mean}, {sd})"
            )));
        }
        Ok(GaussianSpec { mean, sd })
    }
}

/// Discretize a Gaussian to `n` equal-weight atoms at the midpoint quantiles
/// `Φ⁻¹((i - ½)/n)·sd + mean`, `i = 1..n`.
///
/// A zero standard deviation collapses to a single Dirac atom. The rule is
/// monotone in the underlying quantile function, which is what preserves
/// comonotone-coupling structure downstream; it is not moment-matched, so
/// second moments converge at roughly `O(1/n)`.
pub fn discretize_gaussian(spec: GaussianSpec, n: usize) -> Result<DiscreteDist> {
    if n == 0 {
        return Err(Error::InvalidArgument("atom count must be positive".into()));
    }
    if spec.sd == 0.0 {
        return Ok(DiscreteDist::dirac(spec.mean));
    }
    let grid = standard_quantile_grid(n);
    let w = 1.0 / n as f64;
    let pairs: Vec<(f64, f64)> = grid
        .iter()
        .map(|&z| (z * spec.sd + spec.mean, w))
        .collect();
    DiscreteDist::new(&pairs)
}

/// Midpoint quantiles of the standard normal, memoized per atom count: the
/// simulation runners discretize the same shapes once per direction and
/// grid row, and the inverse CDF dominated that loop before caching.
fn standard_quantile_grid(n: usize) -> std::sync::Arc<[f64]> {
    use statrs::distribution::{ContinuousCDF, Normal};
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<[f64]>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("quantile cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
            let w = 1.0 / n as f64;
            (1..=n)
                .map(|i| std_normal.inverse_cdf((i as f64 - 0.5) * w))
                .collect()
        })
        .clone()
}

/// One covariate grid point: its weight under the covariate distribution and
/// the pair of conditional laws attached to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawRow {
    pub x_weight: f64,
    pub law1: DiscreteDist,
    pub law0: DiscreteDist,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_label: Option<String>,
}

/// A weighted grid over covariate values, each row holding the two
/// conditional laws whose couplings the identified-set formulas integrate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalLawTable {
    rows: Vec<LawRow>,
}

impl ConditionalLawTable {
    /// Validate and wrap rows: weights nonnegative and summing to one within
    /// [`PROB_SUM_TOL`].
    pub fn new(rows: Vec<LawRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("law table has no rows".into()));
        }
        let mut total = 0.0;
        for (i, row) in rows.iter().enumerate() {
            if !row.x_weight.is_finite() || row.x_weight < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has invalid weight {}",
                    row.x_weight
                )));
            }
            total += row.x_weight;
        }
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidArgument(format!(
                "row weights sum to {total}, expected 1"
            )));
        }
        Ok(ConditionalLawTable { rows })
    }

    /// Build from `(weight, law1, law0)` triples, renormalizing the weights.
    pub fn from_weighted_laws(rows: Vec<(f64, DiscreteDist, DiscreteDist)>) -> Result<Self> {
        let total: f64 = rows.iter().map(|r| r.0).sum();
        if total <= 0.0 {
            return Err(Error::InvalidArgument("weights sum to zero".into()));
        }
        ConditionalLawTable::new(
            rows.into_iter()
                .map(|(w, law1, law0)| LawRow {
                    x_weight: w / total,
                    law1,
                    law0,
                    x_label: None,
                })
                .collect(),
        )
    }

    pub fn rows(&self) -> &[LawRow] {
        &self.rows
    }

    /// Integrate a per-row scalar against the covariate weights.
    pub fn integrate<F: FnMut(&LawRow) -> f64>(&self, mut f: F) -> f64 {
        self.rows.iter().map(|r| r.x_weight * f(r)).sum()
    }
}
