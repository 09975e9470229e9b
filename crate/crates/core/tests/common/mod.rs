//! Shared generators for randomized cross-checks.

use otis_core::{DiscreteDist, PartialOtInstance};
use otis_core::models::{DdModel, DdRow, TprdModel, TprdRow};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_dist(rng: &mut ChaCha8Rng, max_atoms: usize) -> DiscreteDist {
    let n = rng.random_range(1..=max_atoms);
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(-5.0..5.0), rng.random_range(0.05..1.0)))
        .collect();
    DiscreteDist::new(&pairs).unwrap()
}

/// Random instance with uniform costs in [-1, 1] and uniform masses scaled
/// into feasibility; roughly one in ten instances is exactly mass-tight.
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

pub fn random_tprd_model(rng: &mut ChaCha8Rng, j: usize, n_x: usize) -> TprdModel {
    let raw: Vec<f64> = (0..n_x).map(|_| rng.random_range(0.2..1.0)).collect();
    let wsum: f64 = raw.iter().sum();
    let rows: Vec<TprdRow> = raw
        .iter()
        .map(|&w| {
            let p11 = rng.random_range(0.0..0.7);
            let p01 = rng.random_range(0.0..(1.0 - p11));
            let mut cp: Vec<f64> = (0..j).map(|_| rng.random_range(0.05..1.0)).collect();
            let s: f64 = cp.iter().sum();
            cp.iter_mut().for_each(|c| *c /= s);
            TprdRow {
                weight: w / wsum,
                p11,
                p01,
                class_probs_x: cp,
            }
        })
        .collect();
    TprdModel::new(rows).unwrap()
}
