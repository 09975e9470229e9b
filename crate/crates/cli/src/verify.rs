//! Oracle-equivalence verification suites behind the `verify` subcommand:
//! the fast closed-form/greedy paths recomputed against the exact
//! linear-programming references on pinned fixtures and seeded random
//! instances. A mismatch reports the offending instance as reproducible
//! JSON.

use otis_core::models::{dd_support, DisparityMatrix};
use otis_core::models::{DdModel, DdRow};
use otis_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one suite.
#[derive(Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub instances: usize,
    pub worst_error: f64,
}

/// A reproducible mismatch: the instance serialized for replay.
#[derive(Debug)]
pub struct VerificationFailure {
    pub suite: &'static str,
    pub error: f64,
    pub tolerance: f64,
    pub instance_json: String,
}

impl std::fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "suite {}: |Δ| = {:.3e} exceeds {:.1e}; offending instance:\n{}",
            self.suite, self.error, self.tolerance, self.instance_json
        )
    }
}

pub type SuiteResult = std::result::Result<SuiteReport, Box<VerificationFailure>>;

/// Compare one partial-transport instance across the two solvers.
pub fn check_dream_instance(inst: &PartialOtInstance, tol: f64) -> SuiteResult {
    let fast = solve_dream(inst).map_err(|e| fail("dream-vs-lp", f64::NAN, tol, inst, &e))?;
    let exact =
        brute_force_partial_ot(inst).map_err(|e| fail("dream-vs-lp", f64::NAN, tol, inst, &e))?;
    let err = (fast.cost - exact).abs();
    if err > tol {
        return Err(fail("dream-vs-lp", err, tol, inst, "cost mismatch"));
    }
    Ok(SuiteReport {
        name: "dream-vs-lp",
        instances: 1,
        worst_error: err,
    })
}

fn fail<E: std::fmt::Display + ?Sized>(
    suite: &'static str,
    error: f64,
    tolerance: f64,
    inst: &impl serde::Serialize,
    context: &E,
) -> Box<VerificationFailure> {
    let mut instance_json =
        serde_json::to_string(inst).unwrap_or_else(|_| "<unserializable>".into());
    instance_json.push_str(&format!("\n// context: {context}"));
    Box::new(VerificationFailure {
        suite,
        error,
        tolerance,
        instance_json,
    })
}

/// Hand-pinned fixtures with independently computed costs.
pub fn dream_fixtures() -> Vec<(PartialOtInstance, f64)> {
    vec![
        // Single column: both rows pay their own price.
        (
            PartialOtInstance::new([vec![1.0], vec![2.0]], [0.3, 0.2], vec![1.0]).unwrap(),
            0.7,
        ),
        // One-row greedy fill of the two cheapest columns.
        (
            PartialOtInstance::new(
                [vec![3.0, 1.0, 2.0], vec![0.0, 0.0, 0.0]],
                [0.5, 0.0],
                vec![0.4, 0.3, 0.3],
            )
            .unwrap(),
            0.7,
        ),
        // Pivot-sharing case: both rows want the middle column, whose
        // capacity holds only half of the total mass; the rest moves out at
        // zero cost.
        (
            PartialOtInstance::new(
                [vec![0.0, -1.0, 2.0], vec![2.0, -1.0, 0.0]],
                [0.5, 0.5],
                vec![0.25, 0.5, 0.25],
            )
            .unwrap(),
            -0.5,
        ),
    ]
}

/// Fixtures plus `count` random instances per column count 2..=10.
pub fn run_dream_suite(count: usize, seed: u64, tol: f64) -> SuiteResult {
    let mut total = 0usize;
    let mut worst: f64 = 0.0;
    for (inst, want) in dream_fixtures() {
        let got = solve_dream(&inst)
            .map_err(|e| fail("dream-vs-lp", f64::NAN, tol, &inst, &e))?
            .cost;
        let err = (got - want).abs();
        if err > tol {
            return Err(fail("dream-vs-lp", err, tol, &inst, "pinned fixture mismatch"));
        }
        let rep = check_dream_instance(&inst, tol)?;
        worst = worst.max(rep.worst_error.max(err));
        total += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for j in 2..=10usize {
        for _ in 0..count {
            let inst = random_partial_instance(&mut rng, j);
            let rep = check_dream_instance(&inst, tol)?;
            worst = worst.max(rep.worst_error);
            total += 1;
        }
    }
    Ok(SuiteReport {
        name: "dream-vs-lp",
        instances: total,
        worst_error: worst,
    })
}

/// Quantile couplings against the transportation LP.
pub fn run_quantile_suite(count: usize, seed: u64, tol: f64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let v = random_dist(&mut rng, 12);
        let w = random_dist(&mut rng, 12);
        let pv: Vec<f64> = v.atoms().iter().map(|a| a.1).collect();
        let pw: Vec<f64> = w.atoms().iter().map(|a| a.1).collect();
        let neg: Vec<Vec<f64>> = v
            .atoms()
            .iter()
            .map(|&(a, _)| w.atoms().iter().map(|&(b, _)| -a * b).collect())
            .collect();
        let pos: Vec<Vec<f64>> = neg.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        let co_lp = -brute_force_ot(&Matrix::from_rows(&neg), &pv, &pw)
            .map_err(|e| fail("quantile-vs-lp", f64::NAN, tol, &(v.clone(), w.clone()), &e))?;
        let anti_lp = brute_force_ot(&Matrix::from_rows(&pos), &pv, &pw)
            .map_err(|e| fail("quantile-vs-lp", f64::NAN, tol, &(v.clone(), w.clone()), &e))?;
        let err = (comonotone_integral(&v, &w) - co_lp)
            .abs()
            .max((antitone_integral(&v, &w) - anti_lp).abs());
        if err > tol {
            return Err(fail("quantile-vs-lp", err, tol, &(v, w), "coupling mismatch"));
        }
        worst = worst.max(err);
    }
    Ok(SuiteReport {
        name: "quantile-vs-lp",
        instances: count,
        worst_error: worst,
    })
}

/// Disparity support function against the integrated Kallus LP.
pub fn run_dd_suite(count: usize, seed: u64, tol: f64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let models = count.div_ceil(5).max(1);
    let mut total = 0usize;
    let mut worst: f64 = 0.0;
    for j in 2..=4usize {
        for _ in 0..models {
            let m = random_dd_model(&mut rng, j, 3);
            let e = DisparityMatrix::canonical(j);
            let dirs = sample_sphere(j - 1, 5, rng.random());
            let mut lp_values = vec![0.0; dirs.len()];
            for row in m.rows() {
                let cell = KallusCell {
                    p_y1: row.p_y1,
                    class_probs_x: row.class_probs_x.clone(),
                };
                let batch = kallus_dd_lp_batch(&dirs, &cell, m.class_probs())
                    .map_err(|err| fail("dd-vs-kallus", f64::NAN, tol, &m, &err))?;
                for (acc, v) in lp_values.iter_mut().zip(batch) {
                    *acc += row.weight * v;
                }
            }
            for (p, lp) in dirs.iter().zip(lp_values) {
                let closed = dd_support(&m, &e, p)
                    .map_err(|err| fail("dd-vs-kallus", f64::NAN, tol, &m, &err))?;
                let err = (closed - lp).abs();
                if err > tol {
                    return Err(fail("dd-vs-kallus", err, tol, &m, "support mismatch"));
                }
                worst = worst.max(err);
                total += 1;
            }
        }
    }
    Ok(SuiteReport {
        name: "dd-vs-kallus",
        instances: total,
        worst_error: worst,
    })
}

pub fn random_dist(rng: &mut ChaCha8Rng, max_atoms: usize) -> DiscreteDist {
    let n = rng.random_range(1..=max_atoms);
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(-5.0..5.0), rng.random_range(0.05..1.0)))
        .collect();
    DiscreteDist::new(&pairs).unwrap()
}

pub fn random_partial_instance(rng: &mut ChaCha8Rng, j: usize) -> PartialOtInstance {
    let pi0: Vec<f64> = (0..j).map(|_| rng.random_range(-1.0..1.0)).collect();
    let pi1: Vec<f64> = (0..j).map(|_| rng.random_range(-1.0..1.0)).collect();
    let gamma0: Vec<f64> = (0..j).map(|_| rng.random_range(0.0..1.0)).collect();
    let mut gamma1 = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
    let have: f64 = gamma0.iter().sum();
    let need = gamma1[0] + gamma1[1];
    if need > 0.0 {
        let tight = rng.random_range(0..10) == 0;
        let scale = if tight { 1.0 } else { rng.random_range(0.2..1.0) };
        if need > have || tight {
            gamma1[0] *= scale * have / need;
            gamma1[1] *= scale * have / need;
        }
    }
    PartialOtInstance::new([pi0, pi1], gamma1, gamma0).unwrap()
}

pub fn random_dd_model(rng: &mut ChaCha8Rng, j: usize, n_x: usize) -> DdModel {
    let raw: Vec<f64> = (0..n_x).map(|_| rng.random_range(0.2..1.0)).collect();
    let wsum: f64 = raw.iter().sum();
    let rows: Vec<DdRow> = raw
        .iter()
        .map(|&w| {
            let mut cp: Vec<f64> = (0..j).map(|_| rng.random_range(0.05..1.0)).collect();
            let s: f64 = cp.iter().sum();
            cp.iter_mut().for_each(|c| *c /= s);
            DdRow {
                weight: w / wsum,
                p_y1: rng.random_range(0.0..=1.0),
                class_probs_x: cp,
            }
        })
        .collect();
    DdModel::from_rows(rows).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_default_scale() {
        let d = run_dream_suite(25, 7, 1e-9).unwrap();
        assert!(d.instances > 9 * 25);
        assert!(d.worst_error <= 1e-9);
        let q = run_quantile_suite(25, 7, 1e-9).unwrap();
        assert!(q.worst_error <= 1e-9);
        let k = run_dd_suite(10, 7, 1e-8).unwrap();
        assert!(k.worst_error <= 1e-8);
    }

    #[test]
    fn perturbed_fixture_fails_with_instance_echo() {
        let (inst, want) = dream_fixtures().into_iter().next().unwrap();
        // Perturb the cost matrix; the pinned expectation must now fail.
        let mut broken = inst.clone();
        broken.pi[0][0] += 0.25;
        let got = solve_dream(&broken).unwrap().cost;
        let err = (got - want).abs();
        assert!(err > 1e-9);
        let failure = fail("dream-vs-lp", err, 1e-9, &broken, &"pinned fixture mismatch");
        assert!(failure.instance_json.contains("\"pi\""));
        assert!(failure.to_string().contains("dream-vs-lp"));
    }
}
