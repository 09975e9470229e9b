//! Randomized cross-checks between the closed-form engines and the
//! linear-programming oracles. The acceptance suite repeats the heaviest of
//! these at full scale; here the counts are kept small enough for routine
//! development runs.

mod common;

use common::*;
use otis_core::models::{dd_interval, dd_support, DisparityMatrix};
use otis_core::models::{supermodular_interval, tprd_interval, tprd_theta_support};
use otis_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Transport cost matrix `f(v_i, w_j)` over the atom grids of two laws.
fn cost_matrix<F: Fn(f64, f64) -> f64>(v: &DiscreteDist, w: &DiscreteDist, f: F) -> Matrix {
    let rows: Vec<Vec<f64>> = v
        .atoms()
        .iter()
        .map(|&(vv, _)| w.atoms().iter().map(|&(wv, _)| f(vv, wv)).collect())
        .collect();
    Matrix::from_rows(&rows)
}

fn probs(d: &DiscreteDist) -> Vec<f64> {
    d.atoms().iter().map(|&(_, p)| p).collect()
}

#[test]
fn quantile_integrals_match_lp_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    for _ in 0..60 {
        let v = random_dist(&mut rng, 6);
        let w = random_dist(&mut rng, 6);
        let neg = brute_force_ot(&cost_matrix(&v, &w, |a, b| -a * b), &probs(&v), &probs(&w))
            .unwrap();
        assert!((comonotone_integral(&v, &w) + neg).abs() < 1e-9);
        let pos = brute_force_ot(&cost_matrix(&v, &w, |a, b| a * b), &probs(&v), &probs(&w))
            .unwrap();
        assert!((antitone_integral(&v, &w) - pos).abs() < 1e-9);
    }
}

#[test]
fn frechet_equals_bernoulli_couplings_on_grid() {
    for i in 0..=10 {
        for k in 0..=10 {
            let (p, q) = (i as f64 / 10.0, k as f64 / 10.0);
            let v = DiscreteDist::bernoulli(p).unwrap();
            let w = DiscreteDist::bernoulli(q).unwrap();
            let (lo, hi) = frechet_bounds(p, q).unwrap();
            assert!((comonotone_integral(&v, &w) - hi).abs() < 1e-12);
            assert!((antitone_integral(&v, &w) - lo).abs() < 1e-12);
        }
    }
}

#[test]
fn dream_matches_lp_oracle_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    for _ in 0..300 {
        let j = rng.random_range(1..=7usize);
        let inst = random_partial_instance(&mut rng, j);
        let dream = solve_dream(&inst).unwrap().cost;
        let lp = brute_force_partial_ot(&inst).unwrap();
        assert!((dream - lp).abs() < 1e-9, "J={j}: {dream} vs {lp}");
    }
}

#[test]
fn dream_bracket_contains_oracle_consistent_pivot() {
    let mut rng = ChaCha8Rng::seed_from_u64(2500);
    for _ in 0..100 {
        let j = rng.random_range(2..=6usize);
        let inst = random_partial_instance(&mut rng, j);
        let sol = solve_dream(&inst).unwrap();
        assert!(sol.bracket.0 <= sol.pivot && sol.pivot <= sol.bracket.1);
        let lp = brute_force_partial_ot(&inst).unwrap();
        assert!((sol.cost - lp).abs() < 1e-9);
    }
}

/// Every solution satisfies the full plan contract, not just the cost:
/// nonnegative entries, exact row sums, capped column sums, monotone
/// support around the pivot in canonical order, and a self-consistent cost.
#[test]
fn dream_plan_invariants_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(2700);
    for _ in 0..400 {
        let j = rng.random_range(1..=12usize);
        let inst = random_partial_instance(&mut rng, j);
        let s = solve_dream(&inst).unwrap();
        for row in 0..2 {
            assert!(s.plan[row].iter().all(|&g| g >= -1e-10));
            let total: f64 = s.plan[row].iter().sum();
            assert!((total - inst.gamma1[row]).abs() < 1e-10);
        }
        for k in 0..j {
            assert!(s.plan[0][k] + s.plan[1][k] <= inst.gamma0[k] + 1e-10);
        }
        let direct: f64 = (0..j)
            .map(|k| inst.pi[0][k] * s.plan[0][k] + inst.pi[1][k] * s.plan[1][k])
            .sum();
        assert!((direct - s.cost).abs() < 1e-10);
        let (perm, _) = canonical_order(&inst);
        for (k, &orig) in perm.iter().enumerate() {
            if k + 1 < s.pivot {
                assert!(s.plan[1][orig].abs() <= 1e-10, "row 1 mass left of pivot");
            }
            if k + 1 > s.pivot {
                assert!(s.plan[0][orig].abs() <= 1e-10, "row 0 mass right of pivot");
            }
        }
    }
}

#[test]
fn dream_permutation_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    for _ in 0..100 {
        let j = rng.random_range(2..=8usize);
        let inst = random_partial_instance(&mut rng, j);
        let base = solve_dream(&inst).unwrap().cost;
        // Rotate columns by one.
        let rot = |v: &Vec<f64>| -> Vec<f64> {
            let mut r = v.clone();
            r.rotate_left(1);
            r
        };
        let rotated = PartialOtInstance::new(
            [rot(&inst.pi[0]), rot(&inst.pi[1])],
            inst.gamma1,
            rot(&inst.gamma0),
        )
        .unwrap();
        let v = solve_dream(&rotated).unwrap().cost;
        assert!((base - v).abs() < 1e-10);
    }
}

#[test]
fn dream_cost_monotone_in_pi() {
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    for _ in 0..100 {
        let j = rng.random_range(1..=6usize);
        let inst = random_partial_instance(&mut rng, j);
        let base = solve_dream(&inst).unwrap().cost;
        let mut bumped = inst.clone();
        let (i, k) = (rng.random_range(0..2), rng.random_range(0..j));
        bumped.pi[i][k] += rng.random_range(0.0..1.0);
        let v = solve_dream(&bumped).unwrap().cost;
        assert!(v >= base - 1e-10);
    }
}

#[test]
fn dream_shift_and_scale_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    for _ in 0..100 {
        let j = rng.random_range(1..=6usize);
        let inst = random_partial_instance(&mut rng, j);
        let base = solve_dream(&inst).unwrap().cost;

        let c = rng.random_range(-1.0..1.0);
        let mut shifted = inst.clone();
        shifted.pi[0].iter_mut().for_each(|v| *v += c);
        shifted.pi[1].iter_mut().for_each(|v| *v += c);
        let want = base + c * (inst.gamma1[0] + inst.gamma1[1]);
        assert!((solve_dream(&shifted).unwrap().cost - want).abs() < 1e-10);

        let lambda = rng.random_range(0.1..3.0);
        let scaled = PartialOtInstance::new(
            inst.pi.clone(),
            [lambda * inst.gamma1[0], lambda * inst.gamma1[1]],
            inst.gamma0.iter().map(|g| lambda * g).collect(),
        )
        .unwrap();
        assert!((solve_dream(&scaled).unwrap().cost - lambda * base).abs() < 1e-10);
    }
}

#[test]
fn kallus_lp_equals_closed_form_integrand_for_two_classes() {
    let mut rng = ChaCha8Rng::seed_from_u64(6006);
    for _ in 0..50 {
        let m = random_dd_model(&mut rng, 2, 1);
        let row = &m.rows()[0];
        let cell = KallusCell {
            p_y1: row.p_y1,
            class_probs_x: row.class_probs_x.clone(),
        };
        let lp = kallus_dd_lp(&[1.0], &cell, m.class_probs()).unwrap();
        // Closed form of the per-x upper integrand for δ(1, 2).
        let (pa, pb, pc) = (row.p_y1, row.class_probs_x[0], row.class_probs_x[1]);
        let want = pa.min(pb) / m.class_probs()[0]
            - (pa + pc - 1.0).max(0.0) / m.class_probs()[1];
        assert!((lp - want).abs() < 1e-9, "{lp} vs {want}");
    }
}

#[test]
fn dd_support_equals_kallus_integral_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    for _ in 0..12 {
        let j = rng.random_range(2..=4usize);
        let m = random_dd_model(&mut rng, j, 3);
        let e = DisparityMatrix::canonical(j);
        for _ in 0..4 {
            let p = sample_sphere(j - 1, 1, rng.random())[0].clone();
            let closed = dd_support(&m, &e, &p).unwrap();
            let lp: f64 = m
                .rows()
                .iter()
                .map(|r| {
                    let cell = KallusCell {
                        p_y1: r.p_y1,
                        class_probs_x: r.class_probs_x.clone(),
                    };
                    r.weight * kallus_dd_lp(&p, &cell, m.class_probs()).unwrap()
                })
                .sum();
            assert!((closed - lp).abs() < 1e-8, "J={j}: {closed} vs {lp}");
        }
    }
}

#[test]
fn dd_interval_duality_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(8008);
    for _ in 0..40 {
        let j = rng.random_range(2..=6usize);
        let m = random_dd_model(&mut rng, j, 3);
        let (a, b) = (0, j - 1);
        let e = DisparityMatrix::new(j, vec![(a, b)]).unwrap();
        let (lo, hi) = dd_interval(&m, a, b).unwrap();
        assert!((hi - dd_support(&m, &e, &[1.0]).unwrap()).abs() < 1e-9);
        assert!((lo + dd_support(&m, &e, &[-1.0]).unwrap()).abs() < 1e-9);
        // Fréchet combination route.
        let (la, ua) = m.theta_bounds(a).unwrap();
        let (lb, ub) = m.theta_bounds(b).unwrap();
        assert!((hi - (ua - lb)).abs() < 1e-10);
        assert!((lo - (la - ub)).abs() < 1e-10);
    }
}

#[test]
fn support_functions_are_consistent_for_nonempty_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(9009);
    for trial in 0..10 {
        let j = rng.random_range(2..=4usize);
        let dd = random_dd_model(&mut rng, j, 3);
        let e = DisparityMatrix::canonical(j);
        let tprd = random_tprd_model(&mut rng, j, 3);
        for q in sample_sphere(j - 1, 10, 100 + trial) {
            let plus = dd_support(&dd, &e, &q).unwrap();
            let minus = dd_support(&dd, &e, &q.iter().map(|v| -v).collect::<Vec<_>>()).unwrap();
            assert!(plus + minus >= -1e-9);
        }
        for q in sample_sphere(2 * j, 10, 200 + trial) {
            let plus = tprd_theta_support(&tprd, &q).unwrap();
            let minus =
                tprd_theta_support(&tprd, &q.iter().map(|v| -v).collect::<Vec<_>>()).unwrap();
            assert!(plus + minus >= -1e-9);
        }
    }
}

/// With a scalar shared regressor, the restricted direction family spans
/// the same circle as the full sphere, so the two filtered sets coincide on
/// a sampled grid once directions are dense enough.
#[test]
fn scalar_regressor_restricted_family_matches_full_sphere() {
    use otis_core::models::{lp_halfspace, LinearProjectionModel, LpModelRow, QuantileEval};
    use otis_core::models::{ScalarLaw, VectorLaw};

    let grid_x = [(-1.0, 0.3), (0.0, 0.4), (1.0, 0.3)];
    let rows: Vec<LpModelRow> = grid_x
        .iter()
        .map(|&(x, w)| LpModelRow {
            weight: w,
            law1: ScalarLaw::Discrete(
                DiscreteDist::new(&[(x - 1.0, 0.5), (x + 1.0, 0.5)]).unwrap(),
            ),
            law0: VectorLaw::Discrete {
                points: vec![(vec![x - 0.5], 0.5), (vec![x + 0.5], 0.5)],
            },
        })
        .collect();
    let mut m = Matrix::zeros(2, 2);
    let mut cross = 0.0;
    for &(x, w) in &grid_x {
        let ey0 = x;
        let ey0sq = x * x + 0.25;
        m[(0, 0)] += w * ey0sq;
        m[(0, 1)] += w * ey0 * x;
        m[(1, 0)] += w * ey0 * x;
        m[(1, 1)] += w * x * x;
        cross += w * x * x; // E[Y1 X] with E[Y1 | x] = x
    }
    let model =
        LinearProjectionModel::new(1, 1, m, vec![cross], rows, QuantileEval::Atoms(64)).unwrap();

    let full = sample_sphere(2, 600, 31);
    let restricted = restricted_directions(1, 1, 600, 77);
    let to_halfspaces = |dirs: &[Vec<f64>]| -> Vec<Halfspace> {
        dirs.iter().map(|t| lp_halfspace(&model, t).unwrap()).collect()
    };
    let cands: Vec<Vec<f64>> = (0..41)
        .flat_map(|i| (0..41).map(move |k| vec![i as f64 / 8.0 - 2.5, k as f64 / 8.0 - 2.5]))
        .collect();
    let a = filter_candidates(cands.clone(), to_halfspaces(&full), 1e-9).unwrap();
    let b = filter_candidates(cands, to_halfspaces(&restricted), 1e-9).unwrap();
    assert_eq!(a.accepted, b.accepted);
    assert!(a.accepted_count() > 0);
}

#[test]
fn supermodular_min_cost_matches_lp_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    for _ in 0..20 {
        let law1 = random_dist(&mut rng, 5);
        let law0 = random_dist(&mut rng, 5);
        let table =
            ConditionalLawTable::from_weighted_laws(vec![(1.0, law1.clone(), law0.clone())])
                .unwrap();
        let (lo, hi) = supermodular_interval(|a, b| a.min(b), &table);
        let min_lp = brute_force_ot(
            &cost_matrix(&law1, &law0, |a, b| a.min(b)),
            &probs(&law1),
            &probs(&law0),
        )
        .unwrap();
        let max_lp = -brute_force_ot(
            &cost_matrix(&law1, &law0, |a, b| -a.min(b)),
            &probs(&law1),
            &probs(&law0),
        )
        .unwrap();
        assert!((lo - min_lp).abs() < 1e-9);
        assert!((hi - max_lp).abs() < 1e-9);
    }
}

#[test]
fn tprd_interval_stays_inside_sampled_support_halfspaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    for trial in 0..5 {
        let m = random_tprd_model(&mut rng, 2, 3);
        let (lo, hi) = tprd_interval(&m, 0, 1).unwrap();
        assert!(lo <= hi + 1e-12);
        // The interval endpoints come from θ tuples inside the identified
        // set; spot-check the upper tuple against sampled halfspaces.
        let (a_lo, a_hi) = otis_core::models::tprd_theta_bounds(&m, 0).unwrap();
        let (b_lo, _) = otis_core::models::tprd_theta_bounds(&m, 1).unwrap();
        let (c_lo, _) = otis_core::models::tprd_theta_bounds(&m, 2).unwrap();
        let (d_lo, d_hi) = otis_core::models::tprd_theta_bounds(&m, 3).unwrap();
        let _ = (a_lo, d_lo);
        let tuple = vec![a_hi, b_lo, c_lo, d_hi];
        for q in sample_sphere(4, 300, 4000 + trial) {
            let h = tprd_theta_support(&m, &q).unwrap();
            let val: f64 = q.iter().zip(&tuple).map(|(a, b)| a * b).sum();
            assert!(val <= h + 1e-8, "violation {} at {q:?}", val - h);
        }
    }
}
