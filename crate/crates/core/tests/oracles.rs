//! Library results checked against brute-force or independently derived values.

mod common;

use betahalton::discrepancy::{star_disc_1d, star_disc_multi};
use betahalton::numeration::{is_admissible, Expansion};
use betahalton::rauzy::{
    build_cloud, dumont_thomas_value, enumerate_addresses, fixed_point_prefix, walks_from,
};
use betahalton::rotation::{
    halton_points, local_discrepancy, membership_oracle, partition_ck, vdc, HaltonConfig,
};
use betahalton::spectral::{
    abelianize, ambient_projection, lattice_coords, rotation_point, torus_distance, torus_reduce,
    SpectralData, TorusPoint,
};
use betahalton::MBonacciSystem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

#[test]
fn admissible_strings_count_basis_terms() {
    for m in 2..=6 {
        let f = basis(m, 21);
        for k in 0..=20 {
            assert_eq!(admissible_strings(m, k).len() as u64, f[k], "m={m} k={k}");
        }
    }
}

#[test]
fn admissible_strings_expand_every_integer_once() {
    for m in 2..=4 {
        let k = 14;
        let f = basis(m, k + 1);
        let sys = MBonacciSystem::with_max(m, f[k]).unwrap();
        let mut seen = vec![false; f[k] as usize];
        for d in admissible_strings(m, k) {
            let n = value(&f, &d);
            assert!(!seen[n as usize], "value {n} hit twice");
            seen[n as usize] = true;
            // the unique admissible expansion is the greedy one
            assert_eq!(sys.encode(n).unwrap(), Expansion::new(d).unwrap());
        }
        assert!(seen.iter().all(|s| *s));
    }
}

#[test]
fn basis_matches_recurrence() {
    for m in 2..=6 {
        let sys = MBonacciSystem::with_max(m, 1 << 50).unwrap();
        let f = basis(m, sys.basis().len());
        assert_eq!(sys.basis(), &f[..]);
    }
}

#[test]
fn greedy_digits_are_maximal() {
    for m in 2..=5 {
        let sys = MBonacciSystem::with_max(m, 20_000).unwrap();
        let f = sys.basis();
        for n in 0..20_000u64 {
            let e = sys.encode(n).unwrap();
            for j in 0..e.len() {
                if e.digits()[j] == 0 {
                    let mut d = e.digits().to_vec();
                    d[j] = 1;
                    d[..j].iter_mut().for_each(|x| *x = 0);
                    assert!(value(f, &d) > n, "m={m} n={n} j={j}");
                }
            }
        }
    }
}

#[test]
fn substitution_lengths_from_literal_words() {
    for m in 2..=6u8 {
        let f = basis(m as usize, 19);
        for k in 0..=18 {
            assert_eq!(iterate_substitution(m, k).len() as u64, f[k]);
        }
        let word = iterate_substitution(m, 18);
        let prefix = fixed_point_prefix(m as usize, word.len()).unwrap();
        assert_eq!(word, prefix);
    }
}

#[test]
fn walk_lengths_recover_n() {
    for m in 2..=6 {
        let sys = MBonacciSystem::with_max(m, 10_000).unwrap();
        for n in 0..=10_000u64 {
            let e = sys.encode(n).unwrap();
            assert_eq!(dumont_thomas_value(m, e.digits()).unwrap(), n as u128);
        }
    }
}

#[test]
fn eigenvectors_match_power_iteration() {
    for m in 2..=6 {
        let sys = MBonacciSystem::with_max(m, 10).unwrap();
        let spec = SpectralData::new(&sys);
        let (u, v, lambda) = power_iteration(m);
        assert!((lambda - spec.phi).abs() < 1e-12);
        for i in 0..m {
            assert!((u[i] - spec.u[i]).abs() < 1e-12, "u m={m}");
            assert!((v[i] - spec.v[i]).abs() < 1e-12, "v m={m}");
        }
        let b = incidence(m);
        for i in 0..m {
            let bu: f64 = (0..m).map(|j| b[i][j] * spec.u[j]).sum();
            let vb: f64 = (0..m).map(|j| spec.v[j] * b[j][i]).sum();
            assert!((bu - spec.phi * spec.u[i]).abs() <= 1e-10);
            assert!((vb - spec.phi * spec.v[i]).abs() <= 1e-10);
        }
    }
}

#[test]
fn rotation_identity_in_ambient_space() {
    for m in 2..=6 {
        let sys = MBonacciSystem::with_max(m, 10).unwrap();
        let spec = SpectralData::new(&sys);
        let (u, _, phi) = power_iteration(m);
        let unit = |i: usize| {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            e
        };
        let lhs = ambient_projection(&spec, &unit(0));
        let mut rhs = vec![0.0; m];
        for i in 2..=m {
            let diff: Vec<f64> = unit(0)
                .iter()
                .zip(unit(i - 1))
                .map(|(a, b)| a - b)
                .collect();
            let p = ambient_projection(&spec, &diff);
            let w = phi.powi(-(i as i32));
            rhs.iter_mut().zip(p).for_each(|(r, x)| *r += w * x);
        }
        let res = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(res <= 1e-10, "m={m} residual {res}");
        // the projection kills the expanding direction
        let pu = ambient_projection(&spec, &u);
        assert!(pu.iter().all(|x| x.abs() < 1e-12));
    }
}

#[test]
fn cloud_points_follow_the_rotation() {
    for m in 2..=4 {
        let sys = MBonacciSystem::with_max(m, 20_000).unwrap();
        let cloud = build_cloud(&sys, 20_000).unwrap();
        let word = fixed_point_prefix(m, 20_000).unwrap();
        let zero = [TorusPoint::zero(m - 1)];
        let systems = [sys.clone()];
        for n in (0..20_000usize).step_by(37) {
            let direct = torus_reduce(&lattice_coords(&sys, &abelianize(m, &word[..n])));
            let rot = rotation_point(&systems, n as u64, &zero).unwrap();
            assert!(
                torus_distance(cloud.coords(n), rot.coords()) <= 1e-9,
                "m={m} n={n}"
            );
            assert!(direct.distance(&rot) <= 1e-9);
            assert_eq!(cloud.label(n), word[n]);
        }
    }
}

#[test]
fn set_equation_measures_add_up() {
    for m in 2..=5 {
        let sys = MBonacciSystem::with_max(m, 10).unwrap();
        for k in 0..=6 {
            for start in 1..=m as u8 {
                let total: f64 = walks_from(m, start, k)
                    .iter()
                    .map(|w| sys.phi_neg_pow_f64(k + w.end as usize))
                    .sum();
                assert!((total - sys.phi_neg_pow_f64(start as usize)).abs() < 1e-13);
            }
        }
    }
}

#[test]
fn intervals_refine() {
    for m in 2..=4 {
        let sys = MBonacciSystem::with_max(m, 1 << 16).unwrap();
        for k in 0..9 {
            let coarse = partition_ck(&sys, k).unwrap();
            for fine in partition_ck(&sys, k + 1).unwrap() {
                let parents = coarse
                    .iter()
                    .filter(|c| fine.left >= c.left - 1e-12 && fine.right <= c.right + 1e-12)
                    .count();
                assert_eq!(parents, 1, "m={m} k={k}");
            }
        }
    }
}

#[test]
fn one_dim_formula_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let n = rng.gen_range(1..60);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let a = star_disc_1d(&xs).unwrap();
        let b = naive_star_disc_1d(&xs);
        assert!((a - b).abs() < 1e-12);
    }
    let sys = MBonacciSystem::with_max(2, 1000).unwrap();
    let xs: Vec<f64> = (0..500).map(|n| vdc(&sys, n).unwrap()).collect();
    assert!((star_disc_1d(&xs).unwrap() - naive_star_disc_1d(&xs)).abs() < 1e-12);
}

#[test]
fn multi_dim_matches_definition_on_lattices_and_ties() {
    // repeated coordinates exercise the closed/open distinction
    let grid: Vec<Vec<f64>> = (0..4)
        .flat_map(|i| (0..4).map(move |j| vec![i as f64 / 4.0, j as f64 / 4.0]))
        .collect();
    let a = star_disc_multi(&grid, 2).unwrap();
    assert!((a - naive_star_disc(&grid)).abs() < 1e-12);
    assert!((a - 0.4375).abs() < 1e-12);

    let cfg = HaltonConfig::from_orders(&[2, 3, 4], 100).unwrap();
    let pts = halton_points(&cfg, 60).unwrap();
    assert!((star_disc_multi(&pts, 3).unwrap() - naive_star_disc(&pts)).abs() < 1e-12);
}

#[test]
fn local_discrepancy_matches_membership_counts() {
    for m in [2, 3] {
        let sys = MBonacciSystem::with_max(m, 5000).unwrap();
        for k in 0..=4 {
            for count in [1u64, 17, 400] {
                let addrs = enumerate_addresses(m, k).unwrap();
                let oracle = addrs
                    .iter()
                    .map(|a| {
                        let hits = (0..count)
                            .filter(|&n| membership_oracle(&sys, n, a).unwrap())
                            .count();
                        (hits as f64 / count as f64 - a.measure(&sys)).abs()
                    })
                    .fold(0.0, f64::max);
                let got = local_discrepancy(&sys, k, count).unwrap();
                assert!((got - oracle).abs() < 1e-15, "m={m} k={k} N={count}");
            }
        }
    }
}

#[test]
fn expansions_are_admissible_after_trimming() {
    let e = Expansion::new(vec![1, 0, 1, 0, 0]).unwrap();
    assert_eq!(e.digits(), &[1, 0, 1]);
    assert!(is_admissible(2, e.digits()).unwrap());
}
