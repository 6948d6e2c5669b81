use ivsensa_core::bisection::DEFAULT_TOL;
use ivsensa_core::continuous::{
    bernstein_approx, bernstein_basis, build_sieve_lp, cdf_bounds, default_a_grid, falsification_point_continuous,
    functional_bounds, qte_bounds, refutation_check, sieve_var, FunctionalSpec, SieveConfig,
};
use ivsensa_core::distributions::{AffineMap, CondDensityTable};
use ivsensa_core::lp::{solve_lp, Sense};
use ivsensa_core::sensitivity::ModelKind;
use ivsensa_core::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn labels() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

fn normalise(v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn bump(degree: usize, centre: f64, width: f64) -> Vec<f64> {
    normalise(
        (0..=degree)
            .map(|m| {
                let u = (m as f64 / degree as f64 - centre) / width;
                (-u * u).exp() + 0.05
            })
            .collect(),
    )
}

/// Independent truth: `Y(x)` has Bernstein weights `v[x]` under every `z`, and
/// the observed sub-densities tilt those weights up or down.
struct Truth {
    table: CondDensityTable,
    v: [Vec<f64>; 2],
}

fn independent_truth(degree: usize) -> Truth {
    let pz = vec![0.5, 0.5];
    let pi1 = [0.4, 0.7];
    let v = [bump(degree, 0.4, 0.25), bump(degree, 0.6, 0.2)];
    let mut weights = Vec::new();
    for x in 0..2 {
        let mut w = Matrix::zeros(2, degree + 1);
        for z in 0..2 {
            let slope = if z == 0 { 0.3 } else { -0.3 };
            let tilted: Vec<f64> = (0..=degree)
                .map(|m| v[x][m] * (1.0 + slope * (2.0 * m as f64 / degree as f64 - 1.0)))
                .collect();
            let u = normalise(tilted);
            let p = if x == 1 { pi1[z] } else { 1.0 - pi1[z] };
            for m in 0..=degree {
                // The unobserved part must be a valid density.
                assert!(v[x][m] - p * u[m] >= 0.0);
            }
            w.row_mut(z).copy_from_slice(&u);
        }
        weights.push(w);
    }
    let pi = vec![1.0 - pi1[0], pi1[0], 1.0 - pi1[1], pi1[1]];
    let table = CondDensityTable::from_weights(labels(), labels(), pz, pi, weights, AffineMap::IDENTITY).unwrap();
    Truth { table, v }
}

fn mean_of(v: &[f64]) -> f64 {
    let degree = v.len() - 1;
    v.iter()
        .enumerate()
        .map(|(m, w)| w * (m + 1) as f64 / (degree + 2) as f64)
        .sum()
}

fn choose(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn cdf_of(v: &[f64], a: f64) -> f64 {
    let n = v.len();
    v.iter()
        .enumerate()
        .map(|(m, w)| {
            let tail: f64 = (m + 1..=n)
                .map(|i| choose(n, i) * a.powi(i as i32) * (1.0 - a).powi((n - i) as i32))
                .sum();
            w * tail
        })
        .sum()
}

fn quantile_of(v: &[f64], tau: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if cdf_of(v, mid) >= tau {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn random_table(rng: &mut ChaCha8Rng, degree: usize) -> CondDensityTable {
    let pz1 = rng.random_range(0.2..0.8);
    let pi: Vec<f64> = (0..2)
        .flat_map(|_| {
            let p: f64 = rng.random_range(0.2..0.8);
            [1.0 - p, p]
        })
        .collect();
    let weights = (0..2)
        .map(|_| {
            let mut w = Matrix::zeros(2, degree + 1);
            for z in 0..2 {
                let row = normalise((0..=degree).map(|_| rng.random_range(0.05..1.0)).collect());
                w.row_mut(z).copy_from_slice(&row);
            }
            w
        })
        .collect();
    CondDensityTable::from_weights(labels(), labels(), vec![1.0 - pz1, pz1], pi, weights, AffineMap::IDENTITY)
        .unwrap()
}

#[test]
fn basis_partition_of_unity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for degree in 1..=30 {
        for _ in 0..100 {
            let y: f64 = rng.random();
            let s: f64 = bernstein_basis(degree, y).unwrap().iter().sum::<f64>() / (degree + 1) as f64;
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn approximation_error_shrinks_with_degree() {
    let err = |degree: usize| {
        let grid: Vec<f64> = (0..=degree).map(|m| (m as f64 / degree as f64).powi(2)).collect();
        (0..=1000)
            .map(|i| i as f64 / 1000.0)
            .map(|y| (bernstein_approx(&grid, y).unwrap() - y * y).abs())
            .fold(0.0, f64::max)
    };
    let e: Vec<f64> = [5, 10, 20, 40].iter().map(|&m| err(m)).collect();
    for w in e.windows(2) {
        assert!(w[1] < w[0] && w[1] > 0.4 * w[0], "{e:?}");
    }
}

#[test]
fn simplex_weights_integrate_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for degree in [1usize, 5, 20] {
        let w = normalise((0..=degree).map(|_| rng.random::<f64>()).collect());
        let n = 20_000;
        let integral: f64 = (0..n)
            .map(|i| (i as f64 + 0.5) / n as f64)
            .map(|y| {
                bernstein_basis(degree, y)
                    .unwrap()
                    .iter()
                    .zip(&w)
                    .map(|(b, w)| b * w)
                    .sum::<f64>()
            })
            .sum::<f64>()
            / n as f64;
        assert!((integral - 1.0).abs() < 1e-6);
    }
}

#[test]
fn program_shape() {
    let table = independent_truth(3).table;
    let cfg = SieveConfig::new(3, 5, 16).unwrap();
    let msm = build_sieve_lp(&table, ModelKind::Msm.at(0.3).unwrap(), &cfg, &FunctionalSpec::Ate, Sense::Maximize)
        .unwrap();
    assert_eq!(msm.num_vars(), 4 * 2 * 4);
    // Two density rows at each of five points, for each of two arms.
    assert_eq!(msm.ineq_rhs.len(), 2 * 5 * 2);
    // Linking rows for both arms plus a simplex row per weight row.
    assert_eq!(msm.eq_rhs.len(), 2 * 2 * 4 + 4 * 2);
    let vacuous =
        build_sieve_lp(&table, ModelKind::Ks.at(1.0).unwrap(), &cfg, &FunctionalSpec::Ate, Sense::Maximize).unwrap();
    assert!(vacuous.ineq_rhs.is_empty());
    let wrong_degree = SieveConfig::new(4, 5, 16).unwrap();
    assert!(functional_bounds(&table, ModelKind::Ks.at(1.0).unwrap(), &wrong_degree, &FunctionalSpec::Ate).is_err());
}

#[test]
fn reduced_programs_match_the_joint_program() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = SieveConfig::new(4, 7, 32).unwrap();
    let specs = [
        FunctionalSpec::Ate,
        FunctionalSpec::CdfAt { arm: 1, a: 0.3 },
        FunctionalSpec::CdfAt { arm: 0, a: 0.55 },
        FunctionalSpec::custom(|x, y| vec![y * y, if x == 0 { 1.0 } else { -y }]),
    ];
    for _ in 0..12 {
        let table = random_table(&mut rng, 4);
        for kind in ModelKind::ALL {
            let theta = rng.random_range(0.0..1.0);
            let model = kind.at(theta).unwrap();
            for spec in &specs {
                let reduced = functional_bounds(&table, model, &cfg, spec).unwrap();
                let lo = solve_lp(&build_sieve_lp(&table, model, &cfg, spec, Sense::Minimize).unwrap()).unwrap();
                let hi = solve_lp(&build_sieve_lp(&table, model, &cfg, spec, Sense::Maximize).unwrap()).unwrap();
                assert_eq!(reduced.is_feasible(), lo.is_optimal(), "{kind} {theta} {spec:?}");
                if let Some((l, u)) = reduced.bounds() {
                    assert!((l - lo.value).abs() < 1e-7 && (u - hi.value).abs() < 1e-7, "{kind} {theta} {spec:?}");
                }
            }
        }
    }
}

#[test]
fn riemann_objective_matches_exact_integral() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let truth = independent_truth(6);
    let cfg = SieveConfig::new(6, 3, 10_000).unwrap();
    let lp = build_sieve_lp(&truth.table, ModelKind::Ks.at(1.0).unwrap(), &cfg, &FunctionalSpec::Ate, Sense::Maximize)
        .unwrap();
    for _ in 0..20 {
        let mut v = vec![0.0; lp.num_vars()];
        let mut exact = 0.0;
        for (block, sign) in [(0usize, 1.0), (2, -1.0)] {
            for j in 0..2 {
                let row = normalise((0..=6).map(|_| rng.random::<f64>()).collect());
                for m in 0..=6 {
                    v[sieve_var(block, j, m, 2, 6)] = row[m];
                }
                exact += sign * truth.table.pz()[j] * mean_of(&row);
            }
        }
        assert!((lp.objective_value(&v) - exact).abs() < 1e-4);
    }
}

#[test]
fn independent_truth_is_covered() {
    let truth = independent_truth(10);
    let cfg = SieveConfig::new(10, 32, 256).unwrap();
    let ate = mean_of(&truth.v[1]) - mean_of(&truth.v[0]);
    let mut previous: Option<ivsensa_core::IdentifiedInterval> = None;
    for theta in [0.0, 0.5, 1.0] {
        for kind in ModelKind::ALL {
            let i = functional_bounds(&truth.table, kind.at(theta).unwrap(), &cfg, &FunctionalSpec::Ate).unwrap();
            let (l, u) = i.bounds().unwrap();
            assert!(l <= ate && ate <= u, "{kind} {theta}: [{l}, {u}] vs {ate}");
            assert!(l >= -1.0 && u <= 1.0);
        }
        let i = functional_bounds(&truth.table, ModelKind::Msm.at(theta).unwrap(), &cfg, &FunctionalSpec::Ate).unwrap();
        if let Some(p) = previous {
            assert!(p.is_subset_of(&i, 1e-9));
        }
        previous = Some(i);
    }
    for kind in ModelKind::ALL {
        assert_eq!(falsification_point_continuous(&truth.table, kind, &cfg, DEFAULT_TOL).unwrap(), 0.0);
    }
    assert!(!refutation_check(&truth.table, cfg.quad).unwrap().refuted);
}

#[test]
fn cdf_band_endpoints_and_coverage() {
    let truth = independent_truth(8);
    let cfg = SieveConfig::new(8, 24, 128).unwrap();
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    for arm in 0..2 {
        let band = cdf_bounds(&truth.table, ModelKind::CDep.at(0.0).unwrap(), &cfg, arm, &grid).unwrap();
        assert!(band.is_feasible());
        assert!(band.lower()[0].abs() < 1e-9);
        assert!((band.lower()[20] - 1.0).abs() < 1e-9 && (band.upper()[20] - 1.0).abs() < 1e-9);
        assert!(band.max_violation() <= 0.01);
        for (i, a) in grid.iter().enumerate() {
            let f = cdf_of(&truth.v[arm], *a);
            assert!(band.lower()[i] - 1e-9 <= f && f <= band.upper()[i] + 1e-9, "arm {arm} a {a}");
        }
    }
}

#[test]
fn qte_contains_truth_and_nests() {
    let truth = independent_truth(8);
    let cfg = SieveConfig::new(8, 24, 128).unwrap();
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let tau = 0.25;
    let qte = quantile_of(&truth.v[1], tau) - quantile_of(&truth.v[0], tau);
    let at = |c: f64| qte_bounds(&truth.table, ModelKind::CDep.at(c).unwrap(), &cfg, tau, &grid).unwrap();
    let q0 = at(0.0);
    assert!(q0.interval.contains(qte), "{:?} vs {qte}", q0.interval);
    assert!(q0.interval.is_subset_of(&at(0.1).interval, 1e-12));
    assert!(qte_bounds(&truth.table, ModelKind::CDep.at(0.0).unwrap(), &cfg, 1.0, &grid).is_err());
    assert_eq!(default_a_grid().len(), 256);
}

#[test]
fn qte_is_reported_in_original_units() {
    let truth = independent_truth(6);
    let cfg = SieveConfig::new(6, 12, 64).unwrap();
    let unit = &truth.table;
    let scaled = CondDensityTable::new(
        labels(),
        labels(),
        unit.pz().to_vec(),
        vec![
            unit.propensity(0, 0),
            unit.propensity(1, 0),
            unit.propensity(0, 1),
            unit.propensity(1, 1),
        ],
        vec![unit.xi(0).clone(), unit.xi(1).clone()],
        AffineMap { shift: 10.0, scale: 4.0 },
    )
    .unwrap();
    let grid = default_a_grid();
    let m = ModelKind::Ks.at(0.2).unwrap();
    let a = qte_bounds(unit, m, &cfg, 0.5, &grid).unwrap().interval.bounds().unwrap();
    let b = qte_bounds(&scaled, m, &cfg, 0.5, &grid).unwrap().interval.bounds().unwrap();
    assert!((4.0 * a.0 - b.0).abs() < 1e-12 && (4.0 * a.1 - b.1).abs() < 1e-12);
    let ea = functional_bounds(unit, m, &cfg, &FunctionalSpec::Ate).unwrap().bounds().unwrap();
    let eb = functional_bounds(&scaled, m, &cfg, &FunctionalSpec::Ate).unwrap().bounds().unwrap();
    assert!((4.0 * ea.0 - eb.0).abs() < 1e-12 && (4.0 * ea.1 - eb.1).abs() < 1e-12);
}

/// Densities piled at opposite ends for the two instrument values, with
/// propensities chosen so that the upper envelope carries mass 1.2.
fn refuted_table(degree: usize, quad: usize) -> CondDensityTable {
    let low = bump(degree, 0.0, 0.08);
    let high = bump(degree, 1.0, 0.08);
    let mut w = Matrix::zeros(2, degree + 1);
    w.row_mut(0).copy_from_slice(&low);
    w.row_mut(1).copy_from_slice(&high);
    let pz = vec![0.5, 0.5];
    let base = CondDensityTable::from_weights(
        labels(),
        labels(),
        pz.clone(),
        vec![0.5, 0.5, 0.5, 0.5],
        vec![w.clone(), w.clone()],
        AffineMap::IDENTITY,
    )
    .unwrap();
    let at_half = refutation_check(&base, quad).unwrap().integrals[1];
    let p = 0.6 / at_half;
    assert!(p < 1.0);
    CondDensityTable::from_weights(
        labels(),
        labels(),
        pz,
        vec![1.0 - p, p, 1.0 - p, p],
        vec![w.clone(), w],
        AffineMap::IDENTITY,
    )
    .unwrap()
}

#[test]
fn refutation_is_detected() {
    let cfg = SieveConfig::new(12, 32, 256).unwrap();
    let table = refuted_table(12, cfg.quad);
    let r = refutation_check(&table, cfg.quad).unwrap();
    assert!(r.refuted);
    assert!((r.integrals[1] - 1.2).abs() < 1e-9);
    for kind in ModelKind::ALL {
        let t = falsification_point_continuous(&table, kind, &cfg, 1e-4).unwrap();
        assert!(t > 0.0, "{kind}");
        assert!(!functional_bounds(&table, kind.at(0.0).unwrap(), &cfg, &FunctionalSpec::Ate)
            .unwrap()
            .is_feasible());
    }
}

#[test]
fn identical_rows_are_not_refuted() {
    let w = Matrix::from_rows(4, &[[0.1, 0.2, 0.3, 0.4], [0.1, 0.2, 0.3, 0.4]]).unwrap();
    let table = CondDensityTable::from_weights(
        labels(),
        labels(),
        vec![0.5, 0.5],
        vec![0.3, 0.7, 0.6, 0.4],
        vec![w.clone(), w],
        AffineMap::IDENTITY,
    )
    .unwrap();
    let r = refutation_check(&table, 4000).unwrap();
    assert!(!r.refuted);
    assert!((r.integrals[1] - 0.7).abs() < 1e-3);
}

/// Grid values of a smooth density at `m / M`.
fn smooth_table(degree: usize) -> CondDensityTable {
    let f = |y: f64, c: f64| 1.0 + 0.8 * (std::f64::consts::PI * (y - c)).cos() * (1.0 - 2.0 * c).signum();
    let mut xi = Vec::new();
    for x in 0..2 {
        let mut m = Matrix::zeros(2, degree + 1);
        for z in 0..2 {
            let c = 0.2 + 0.3 * x as f64 + 0.1 * z as f64;
            let row: Vec<f64> = (0..=degree).map(|k| f(k as f64 / degree as f64, c).max(0.05)).collect();
            let mass: f64 = row.iter().sum::<f64>() / (degree + 1) as f64;
            m.row_mut(z).copy_from_slice(&row.iter().map(|v| v / mass).collect::<Vec<_>>());
        }
        xi.push(m);
    }
    CondDensityTable::new(labels(), labels(), vec![0.4, 0.6], vec![0.6, 0.4, 0.3, 0.7], xi, AffineMap::IDENTITY).unwrap()
}

#[test]
fn sieve_is_stable_under_refinement() {
    let coarse = SieveConfig::new(10, 24, 128).unwrap();
    let fine = SieveConfig::new(20, 48, 256).unwrap();
    for kind in ModelKind::ALL {
        let m = kind.at(0.3).unwrap();
        let a = functional_bounds(&smooth_table(10), m, &coarse, &FunctionalSpec::Ate).unwrap();
        let b = functional_bounds(&smooth_table(20), m, &fine, &FunctionalSpec::Ate).unwrap();
        let (al, au) = a.bounds().unwrap();
        let (bl, bu) = b.bounds().unwrap();
        assert!((al - bl).abs() <= 0.05 && (au - bu).abs() <= 0.05, "{kind}: [{al}, {au}] vs [{bl}, {bu}]");
    }
}
