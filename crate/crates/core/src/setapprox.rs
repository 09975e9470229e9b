//! Identified-set approximation by direction sampling and halfspace filtering.
//!
//! A convex identified set is approximated from the outside: sample unit
//! directions, evaluate the support function there, keep the candidate
//! points that satisfy every resulting halfspace. More directions can only
//! shrink the accepted set, which is the containment property the numerical
//! comparisons rely on.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Default absolute acceptance tolerance per halfspace.
pub const DEFAULT_FILTER_TOL: f64 = 1e-9;

/// The constraint `normal · θ <= offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        if norm(&normal) <= 0.0 || !offset.is_finite() {
            return Err(Error::InvalidArgument(
                "halfspace needs a nonzero normal and finite offset".into(),
            ));
        }
        Ok(Halfspace { normal, offset })
    }

    pub fn contains(&self, point: &[f64], tol: f64) -> bool {
        dot(&self.normal, point) <= self.offset + tol
    }
}

/// Sampled candidates, the halfspaces that filtered them, and the mask of
/// survivors. The emitted artifact of every set-approximation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifiedSetApprox {
    pub dimension: usize,
    pub halfspaces: Vec<Halfspace>,
    pub candidates: Vec<Vec<f64>>,
    pub accepted: Vec<bool>,
    pub tolerance: f64,
}

impl IdentifiedSetApprox {
    /// Iterator over accepted candidate points.
    pub fn accepted_points(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.candidates
            .iter()
            .zip(&self.accepted)
            .filter_map(|(c, &a)| a.then_some(c))
    }

    pub fn accepted_count(&self) -> usize {
        self.accepted.iter().filter(|&&a| a).count()
    }
}

/// `n` unit vectors drawn uniformly from the sphere in dimension `d`
/// (normalized Gaussians), reproducible per seed.
pub fn sample_sphere(d: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(d >= 1 && n >= 1, "need d >= 1 and n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&v);
        if len > 1e-12 {
            out.push(v.into_iter().map(|x| x / len).collect());
        }
    }
    out
}

/// `n` unit vectors in dimension `d0 + dx` whose first `d0` coordinates have
/// at most one nonzero entry: the restricted direction family used by the
/// outer-set comparison. Reproducible per seed.
pub fn restricted_directions(d0: usize, dx: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(d0 >= 1 && n >= 1, "need d0 >= 1 and n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let slot = rng.random_range(0..d0);
        let mut v = vec![0.0; d0 + dx];
        v[slot] = rng.sample(StandardNormal);
        for item in v.iter_mut().skip(d0) {
            *item = rng.sample(StandardNormal);
        }
        let len = norm(&v);
        if len > 1e-12 {
            out.push(v.into_iter().map(|x| x / len).collect());
        }
    }
    out
}

/// Keep the candidates that satisfy every halfspace within `tol`.
pub fn filter_candidates(
    candidates: Vec<Vec<f64>>,
    halfspaces: Vec<Halfspace>,
    tol: f64,
) -> Result<IdentifiedSetApprox> {
    let dimension = candidates
        .first()
        .map(|c| c.len())
        .or_else(|| halfspaces.first().map(|h| h.normal.len()))
        .unwrap_or(0);
    for c in &candidates {
        if c.len() != dimension {
            return Err(Error::InvalidArgument(format!(
                "candidate of dimension {} in a dimension-{dimension} problem",
                c.len()
            )));
        }
    }
    for h in &halfspaces {
        if h.normal.len() != dimension {
            return Err(Error::InvalidArgument(format!(
                "halfspace of dimension {} in a dimension-{dimension} problem",
                h.normal.len()
            )));
        }
    }
    let accepted: Vec<bool> = candidates
        .iter()
        .map(|c| halfspaces.iter().all(|h| h.contains(c, tol)))
        .collect();
    Ok(IdentifiedSetApprox {
        dimension,
        halfspaces,
        candidates,
        accepted,
        tolerance: tol,
    })
}

/// Summary measurements of an accepted set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub accepted_count: usize,
    /// Convex hull area of the accepted points; only defined in dimension 2.
    pub hull_area_2d: Option<f64>,
}

/// Accepted-set diagnostics; errors when nothing was accepted.
pub fn diagnostics(approx: &IdentifiedSetApprox) -> Result<Diagnostics> {
    let accepted: Vec<&Vec<f64>> = approx.accepted_points().collect();
    if accepted.is_empty() {
        return Err(Error::EmptySet);
    }
    let hull_area_2d = (approx.dimension == 2).then(|| {
        let pts: Vec<(f64, f64)> = accepted.iter().map(|p| (p[0], p[1])).collect();
        convex_hull_area(&pts)
    });
    Ok(Diagnostics {
        accepted_count: accepted.len(),
        hull_area_2d,
    })
}

/// Empirical range of `c · θ` over the accepted points.
pub fn functional_interval(approx: &IdentifiedSetApprox, c: &[f64]) -> Result<(f64, f64)> {
    if c.len() != approx.dimension {
        return Err(Error::InvalidArgument("functional dimension mismatch".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in approx.accepted_points() {
        let v = dot(c, p);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        return Err(Error::EmptySet);
    }
    Ok((lo, hi))
}

/// Area of the convex hull of a 2-D point cloud via the monotone chain;
/// degenerate (collinear or smaller) clouds report zero.
pub fn convex_hull_area(points: &[(f64, f64)]) -> f64 {
    let hull = convex_hull(points);
    if hull.len() < 3 {
        return 0.0;
    }
    let mut twice_area = 0.0;
    for i in 0..hull.len() {
        let (x1, y1) = hull[i];
        let (x2, y2) = hull[(i + 1) % hull.len()];
        twice_area += x1 * y2 - x2 * y1;
    }
    twice_area.abs() / 2.0
}

/// Monotone-chain convex hull, counter-clockwise without the repeated end.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
