//! Built-in simulation studies: two linear projection designs whose
//! identified sets for the two shared-regressor coefficients are compared
//! against the restricted-direction outer sets.
//!
//! Both runners produce per-panel accepted point clouds on a shared
//! candidate grid, the halfspace families that filtered them, and summary
//! diagnostics (containment, truth membership, hull areas).

use otis_core::models::{
    lp_halfspace, lp_support, LinearProjectionModel, LpModelRow, QuantileEval, ScalarLaw,
    VectorLaw,
};
use otis_core::setapprox::convex_hull_area;
use otis_core::{discretize_gaussian, sample_sphere, GaussianSpec, Halfspace, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::RunConfig;

/// Correlation levels of the first design, one panel each.
pub const SIM1_RHOS: [f64; 6] = [0.0, 0.25, 0.5, 0.75, 0.9, 1.0];

/// `(σ_a, σ_b)` noise scales of the second design, one panel each.
pub const SIM2_SIGMAS: [(f64, f64); 6] =
    [(2.0, 40.0), (2.0, 20.0), (2.0, 2.0), (0.5, 20.0), (0.5, 4.0), (0.5, 0.1)];

/// Gaussian conditional laws are discretized to this many atoms.
pub const SIM_GAUSSIAN_ATOMS: usize = 400;

/// Monte-Carlo draw count behind the second design's conditional laws.
pub const SIM2_DEFAULT_DRAWS: usize = 2_000_000;

/// Per-bin point-cloud size kept for the shared-regressor block.
const SIM2_CLOUD_PER_BIN: usize = 800;

/// Per-bin quantile atoms kept for the outcome law.
const SIM2_Y1_ATOMS: usize = 400;

/// Candidate box of the first design, both axes.
pub const SIM1_BOX: (f64, f64) = (-8.0, 8.0);

/// Candidate box of the second design.
pub const SIM2_BOX: [(f64, f64); 2] = [(-1.5, 3.5), (-1.5, 1.5)];

/// One panel's artifacts.
pub struct PanelOutcome {
    pub label: String,
    /// True coefficient pair of the design.
    pub truth: (f64, f64),
    pub candidates: Vec<(f64, f64)>,
    pub our_accepted: Vec<bool>,
    pub pacini_accepted: Option<Vec<bool>>,
    pub our_halfspaces: Vec<Halfspace>,
    pub pacini_halfspaces: Vec<Halfspace>,
    /// Every candidate accepted by the full family is accepted by the
    /// restricted family (vacuously true when the latter is absent).
    pub contained_in_pacini: bool,
    /// The true coefficient pair satisfies every full-family halfspace.
    pub truth_accepted: bool,
    pub our_hull_area: f64,
    pub pacini_hull_area: f64,
    /// Identified interval for `α_a + α_b` from the canonical ±(1,1)
    /// directions; populated in the singular panel only.
    pub alpha_sum_interval: Option<(f64, f64)>,
}

impl PanelOutcome {
    pub fn accepted_points(&self, ours: bool) -> Vec<(f64, f64)> {
        let mask = if ours {
            &self.our_accepted
        } else {
            match &self.pacini_accepted {
                Some(m) => m,
                None => return Vec::new(),
            }
        };
        self.candidates
            .iter()
            .zip(mask)
            .filter_map(|(&c, &a)| a.then_some(c))
            .collect()
    }
}

/// Square candidate grid over a box, row-major, side = ⌊√n⌋ clamped to 2.
fn candidate_grid(n: usize, bx: (f64, f64), by: (f64, f64)) -> Vec<(f64, f64)> {
    let side = ((n as f64).sqrt() as usize).max(2);
    let step = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (side - 1) as f64;
    let mut out = Vec::with_capacity(side * side);
    for i in 0..side {
        for k in 0..side {
            out.push((step(bx.0, bx.1, i), step(by.0, by.1, k)));
        }
    }
    out
}

/// The four restricted-family directions in the coefficient plane: images of
/// the axis directions under the Schur complement of the shared-regressor
/// block (the restricted `t` with free covariate part that zeroes the
/// covariate coordinates of the halfspace normal).
fn pacini_plane_directions(m: &Matrix, d0: usize) -> Option<Vec<Vec<f64>>> {
    let d = m.nrows();
    let dx = d - d0;
    let mut mxx = Matrix::zeros(dx, dx);
    for i in 0..dx {
        for j in 0..dx {
            mxx[(i, j)] = m[(d0 + i, d0 + j)];
        }
    }
    let mxx_inv = mxx.inverse(1e-12)?;
    // S00 = M00 - M0X MXX⁻¹ MX0.
    let mut s = Matrix::zeros(d0, d0);
    for i in 0..d0 {
        for j in 0..d0 {
            let mut acc = m[(i, j)];
            for a in 0..dx {
                for b in 0..dx {
                    acc -= m[(i, d0 + a)] * mxx_inv[(a, b)] * m[(d0 + b, j)];
                }
            }
            s[(i, j)] = acc;
        }
    }
    let mut dirs = Vec::with_capacity(2 * d0);
    for axis in 0..d0 {
        for sign in [1.0, -1.0] {
            let v: Vec<f64> = (0..d0).map(|i| sign * s[(i, axis)]).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm <= 1e-9 {
                return None;
            }
            dirs.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    Some(dirs)
}

/// Evaluate the support function at plane directions embedded with zeros on
/// the covariate coordinates, yielding halfspaces for the coefficient plane.
fn plane_halfspaces(
    model: &LinearProjectionModel,
    dirs: &[Vec<f64>],
) -> otis_core::Result<Vec<Halfspace>> {
    let d = model.dimension();
    dirs.iter()
        .map(|q2| {
            let mut q = vec![0.0; d];
            q[0] = q2[0];
            q[1] = q2[1];
            let h = lp_support(model, &q)?;
            Halfspace::new(q2.clone(), h)
        })
        .collect()
}

fn accept_mask(cands: &[(f64, f64)], hs: &[Halfspace], tol: f64) -> Vec<bool> {
    cands
        .iter()
        .map(|&(x, y)| hs.iter().all(|h| h.normal[0] * x + h.normal[1] * y <= h.offset + tol))
        .collect()
}

fn point_accepted(p: (f64, f64), hs: &[Halfspace], tol: f64) -> bool {
    hs.iter().all(|h| h.normal[0] * p.0 + h.normal[1] * p.1 <= h.offset + tol)
}

fn hull_of(cands: &[(f64, f64)], mask: &[bool]) -> f64 {
    let pts: Vec<(f64, f64)> = cands
        .iter()
        .zip(mask)
        .filter_map(|(&c, &a)| a.then_some(c))
        .collect();
    convex_hull_area(&pts)
}

fn finish_panel(
    label: String,
    truth: (f64, f64),
    candidates: Vec<(f64, f64)>,
    our_halfspaces: Vec<Halfspace>,
    pacini_halfspaces: Vec<Halfspace>,
    alpha_sum_interval: Option<(f64, f64)>,
    tol: f64,
) -> PanelOutcome {
    let our_accepted = accept_mask(&candidates, &our_halfspaces, tol);
    let pacini_accepted = (!pacini_halfspaces.is_empty())
        .then(|| accept_mask(&candidates, &pacini_halfspaces, tol));
    let contained_in_pacini = match &pacini_accepted {
        Some(pac) => our_accepted.iter().zip(pac).all(|(&a, &b)| !a || b),
        None => true,
    };
    let truth_accepted = point_accepted(truth, &our_halfspaces, tol);
    let our_hull_area = hull_of(&candidates, &our_accepted);
    let pacini_hull_area = pacini_accepted
        .as_ref()
        .map(|m| hull_of(&candidates, m))
        .unwrap_or(0.0);
    PanelOutcome {
        label,
        truth,
        candidates,
        our_accepted,
        pacini_accepted,
        our_halfspaces,
        pacini_halfspaces,
        contained_in_pacini,
        truth_accepted,
        our_hull_area,
        pacini_hull_area,
        alpha_sum_interval,
    }
}

/// First design: shared regressors `(Y0a, Y0b)` jointly normal with
/// correlation ρ, independent of the covariate; outcome
/// `Y1 = Y0a + Y0b + X + ε` with standard normal X and ε. True
/// coefficients `(α_a, α_b, β_1, β_2) = (1, 1, 0, 1)`.
pub fn sim1_model(rho: f64, n_x: usize, atoms: usize) -> LinearProjectionModel {
    let m = Matrix::from_rows(&[
        vec![1.0, rho, 0.0, 0.0],
        vec![rho, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ]);
    let cross = vec![0.0, 1.0];
    let xs = discretize_gaussian(GaussianSpec { mean: 0.0, sd: 1.0 }, n_x).expect("x grid");
    let cov = Matrix::from_rows(&[vec![1.0, rho], vec![rho, 1.0]]);
    let sd1 = (3.0 + 2.0 * rho).sqrt();
    let rows: Vec<LpModelRow> = xs
        .atoms()
        .iter()
        .map(|&(x, w)| LpModelRow {
            weight: w,
            law1: ScalarLaw::Gaussian(GaussianSpec { mean: x, sd: sd1 }),
            law0: VectorLaw::Gaussian {
                mean: vec![0.0, 0.0],
                cov: cov.clone(),
            },
        })
        .collect();
    LinearProjectionModel::new(2, 2, m, cross, rows, QuantileEval::Atoms(atoms))
        .expect("sim1 model is valid")
}

/// Run every panel of the first design.
pub fn run_sim1(config: &RunConfig) -> otis_core::Result<Vec<PanelOutcome>> {
    let candidates = candidate_grid(config.candidates, SIM1_BOX, SIM1_BOX);
    let truth = (1.0, 1.0);
    SIM1_RHOS
        .iter()
        .map(|&rho| {
            let label = format!("rho{rho:.2}");
            let model = sim1_model(rho, config.grid, SIM_GAUSSIAN_ATOMS);
            let sampled = sample_sphere(2, config.directions, config.seed);
            if rho < 1.0 {
                let pacini_dirs = pacini_plane_directions(model.moment_matrix(), 2)
                    .expect("nonsingular block for rho < 1");
                let mut ours = sampled;
                ours.extend(pacini_dirs.iter().cloned());
                let our_halfspaces = plane_halfspaces(&model, &ours)?;
                let pacini_halfspaces = plane_halfspaces(&model, &pacini_dirs)?;
                Ok(finish_panel(
                    label,
                    truth,
                    candidates.clone(),
                    our_halfspaces,
                    pacini_halfspaces,
                    None,
                    config.tol,
                ))
            } else {
                // Singular shared-regressor block: only the halfspace route
                // applies, and every informative normal is parallel to
                // (1, 1), so the panel identifies α_a + α_b as an interval.
                let root = std::f64::consts::FRAC_1_SQRT_2;
                let mut t_dirs = sampled;
                t_dirs.push(vec![root, root]);
                t_dirs.push(vec![-root, -root]);
                let mut our_halfspaces = Vec::new();
                for t2 in &t_dirs {
                    let t = vec![t2[0], t2[1], 0.0, 0.0];
                    let h = lp_halfspace(&model, &t)?;
                    debug_assert!(h.normal[2].abs() < 1e-12 && h.normal[3].abs() < 1e-12);
                    let plane_normal = vec![h.normal[0], h.normal[1]];
                    let scale = (plane_normal[0] * plane_normal[0]
                        + plane_normal[1] * plane_normal[1])
                        .sqrt();
                    if scale > 1e-9 {
                        our_halfspaces.push(Halfspace::new(plane_normal, h.offset)?);
                    }
                }
                // Interval for the coefficient sum from the canonical pair.
                let plus = lp_halfspace(&model, &[root, root, 0.0, 0.0])?;
                let minus = lp_halfspace(&model, &[-root, -root, 0.0, 0.0])?;
                let hi = plus.offset / plus.normal[0];
                let lo = -minus.offset / minus.normal[0].abs();
                Ok(finish_panel(
                    label,
                    truth,
                    candidates.clone(),
                    our_halfspaces,
                    Vec::new(),
                    Some((lo, hi)),
                    config.tol,
                ))
            }
        })
        .collect()
}

/// Second design, Monte-Carlo ingested: `X ~ N(0, 4)`,
/// `Y0a = X² + η_a`, `Y0b = Y0a² + η_b`,
/// `Y1 = Y0a + 0.2·Y0b + 1 + X + ε`. True coefficients `(1, 0.2, 1, 1)`.
/// All six panels share one base draw so that panel differences reflect the
/// noise scales rather than sampling noise.
pub struct Sim2Base {
    x: Vec<f64>,
    eta_a: Vec<f64>,
    eta_b: Vec<f64>,
    eps: Vec<f64>,
    /// Draw indices sorted by x, split into equal-count bins.
    bins: Vec<Vec<usize>>,
}

impl Sim2Base {
    pub fn draw(seed: u64, n_draws: usize, n_bins: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sample = |sd: f64| -> Vec<f64> {
            (0..n_draws)
                .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
                .collect()
        };
        let x = sample(2.0);
        let eta_a = sample(1.0);
        let eta_b = sample(1.0);
        let eps = sample(1.0);
        let mut order: Vec<usize> = (0..n_draws).collect();
        order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).expect("finite draws"));
        let bins = (0..n_bins)
            .map(|k| {
                let lo = k * n_draws / n_bins;
                let hi = (k + 1) * n_draws / n_bins;
                order[lo..hi].to_vec()
            })
            .collect();
        Sim2Base {
            x,
            eta_a,
            eta_b,
            eps,
            bins,
        }
    }

    fn n(&self) -> usize {
        self.x.len()
    }
}

/// Build one panel's model from the shared base draws.
pub fn sim2_model(base: &Sim2Base, sigma_a: f64, sigma_b: f64) -> LinearProjectionModel {
    let n = base.n();
    let y0a: Vec<f64> = (0..n)
        .map(|i| base.x[i] * base.x[i] + sigma_a * base.eta_a[i])
        .collect();
    let y0b: Vec<f64> = (0..n)
        .map(|i| y0a[i] * y0a[i] + sigma_b * base.eta_b[i])
        .collect();
    let y1: Vec<f64> = (0..n)
        .map(|i| y0a[i] + 0.2 * y0b[i] + 1.0 + base.x[i] + base.eps[i])
        .collect();

    // Empirical moments from the same draws keep the halfspaces consistent
    // with the ingested conditional laws.
    let mut m = Matrix::zeros(4, 4);
    let mut ey1r = [0.0f64; 4];
    for i in 0..n {
        let r = [y0a[i], y0b[i], 1.0, base.x[i]];
        for a in 0..4 {
            for b in a..4 {
                m[(a, b)] += r[a] * r[b];
            }
            ey1r[a] += y1[i] * r[a];
        }
    }
    for a in 0..4 {
        for b in a..4 {
            m[(a, b)] /= n as f64;
            m[(b, a)] = m[(a, b)];
        }
        ey1r[a] /= n as f64;
    }

    let rows: Vec<LpModelRow> = base
        .bins
        .iter()
        .map(|bin| {
            let weight = bin.len() as f64 / n as f64;
            // Deterministic stride subsample of the joint regressor cloud.
            let take = bin.len().min(SIM2_CLOUD_PER_BIN);
            let points: Vec<(Vec<f64>, f64)> = (0..take)
                .map(|k| {
                    let i = bin[k * bin.len() / take];
                    (vec![y0a[i], y0b[i]], 1.0 / take as f64)
                })
                .collect();
            let mut ys: Vec<f64> = bin.iter().map(|&i| y1[i]).collect();
            ys.sort_by(|a, b| a.partial_cmp(b).expect("finite outcome"));
            let atoms = SIM2_Y1_ATOMS.min(ys.len());
            let law1: Vec<(f64, f64)> = (0..atoms)
                .map(|k| {
                    let idx = ((k as f64 + 0.5) / atoms as f64 * ys.len() as f64) as usize;
                    (ys[idx.min(ys.len() - 1)], 1.0 / atoms as f64)
                })
                .collect();
            LpModelRow {
                weight,
                law1: ScalarLaw::Discrete(
                    otis_core::DiscreteDist::new(&law1).expect("quantile atoms"),
                ),
                law0: VectorLaw::Discrete { points },
            }
        })
        .collect();
    LinearProjectionModel::new(
        2,
        2,
        m,
        vec![ey1r[2], ey1r[3]],
        rows,
        QuantileEval::Atoms(SIM_GAUSSIAN_ATOMS),
    )
    .expect("sim2 model is valid")
}

/// Run every panel of the second design.
pub fn run_sim2(config: &RunConfig, n_draws: usize) -> otis_core::Result<Vec<PanelOutcome>> {
    let base = Sim2Base::draw(config.seed, n_draws, config.grid);
    let candidates = candidate_grid(config.candidates, SIM2_BOX[0], SIM2_BOX[1]);
    SIM2_SIGMAS
        .iter()
        .map(|&(sa, sb)| {
            let label = format!("sa{sa}_sb{sb}");
            let model = sim2_model(&base, sa, sb);
            let pacini_dirs = pacini_plane_directions(model.moment_matrix(), 2)
                .expect("empirical moments are nonsingular");
            let mut ours = sample_sphere(2, config.directions, config.seed ^ 0x51312);
            ours.extend(pacini_dirs.iter().cloned());
            let our_halfspaces = plane_halfspaces(&model, &ours)?;
            let pacini_halfspaces = plane_halfspaces(&model, &pacini_dirs)?;
            Ok(finish_panel(
                label,
                (1.0, 0.2),
                candidates.clone(),
                our_halfspaces,
                pacini_halfspaces,
                None,
                config.tol,
            ))
        })
        .collect()
}
