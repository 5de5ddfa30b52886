//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use betahalton::discrepancy::{
    box_dim_boundary, decay_fit, star_disc_1d, star_disc_multi, theorem_exponent, BoxDimOptions,
};
use betahalton::numeration::is_admissible;
use betahalton::rauzy::{
    build_cloud, enumerate_addresses, set_equation_check, tiling_check, word_length_check,
    GridCheckOptions,
};
use betahalton::rotation::{
    halton_points, interval_for, local_discrepancy, membership_oracle, partition_ck, vdc,
    HaltonConfig,
};
use betahalton::spectral::{
    ambient_projection, lattice_coords, rotation_point, torus_distance, torus_reduce, SpectralData,
    TorusPoint,
};
use betahalton::MBonacciSystem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::*;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lib<T>(r: betahalton::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn roundtrip() -> Outcome {
    let mut failures = 0usize;
    for m in 2..=6 {
        let sys = lib(MBonacciSystem::with_max(m, 1_000_000))?;
        failures += (0..1_000_000u64)
            .into_par_iter()
            .filter(|&n| {
                let e = sys.encode(n).unwrap();
                !is_admissible(m, e.digits()).unwrap() || sys.decode(&e).unwrap() != n
            })
            .count();
    }
    ensure(
        failures == 0,
        format!("n < 10^6, m = 2..6: {failures} failures"),
    )
}

fn word_lengths() -> Outcome {
    let mut mismatches = 0;
    for m in 2..=6u8 {
        let sys = lib(MBonacciSystem::with_max(m as usize, 1 << 40))?;
        let mut word = vec![1u8];
        for k in 0..=25 {
            if k > 0 {
                word = word
                    .iter()
                    .flat_map(|&a| if a < m { vec![1, a + 1] } else { vec![1] })
                    .collect();
            }
            if word.len() as u64 != sys.basis()[k] || !lib(word_length_check(&sys, k))? {
                mismatches += 1;
            }
        }
    }
    ensure(
        mismatches == 0,
        format!("k <= 25, m = 2..6: {mismatches} mismatches"),
    )
}

fn characteristic() -> Outcome {
    let mut worst = 0f64;
    for m in 2..=6 {
        let sys = lib(MBonacciSystem::with_max(m, 1))?;
        let phi = sys.phi_f64();
        let s: f64 = (1..=m).map(|i| phi.powi(-(i as i32))).sum();
        worst = worst.max((s - 1.0).abs());
    }
    ensure(
        worst <= 1e-12,
        format!("max |sum phi^-i - 1| = {worst:.2e}"),
    )
}

fn conjugacy() -> Outcome {
    let mut dist = 0f64;
    let mut residual = 0f64;
    for m in 2..=6 {
        let sys = lib(MBonacciSystem::with_max(m, 10_000))?;
        let systems = [sys.clone()];
        let zero = [TorusPoint::zero(m - 1)];
        for n in 0..=10_000u64 {
            let mut x = vec![0i64; m];
            x[0] = n as i64;
            let a = torus_reduce(&lattice_coords(&sys, &x));
            let b = lib(rotation_point(&systems, n, &zero))?;
            dist = dist.max(torus_distance(a.coords(), b.coords()));
        }
        // the identity pi_c(e_1) = sum_{i>=2} pi_c(e_1 - e_i) phi^{-i}, with
        // the projection built from power-iteration eigenvectors
        let (u, v, phi) = power_iteration(m);
        let spec = SpectralData {
            m,
            phi,
            u,
            v,
            rotation_vector: vec![],
        };
        let unit = |i: usize| {
            (0..m)
                .map(|j| f64::from(u8::from(i == j)))
                .collect::<Vec<_>>()
        };
        let lhs = ambient_projection(&spec, &unit(0));
        let mut rhs = vec![0.0; m];
        for i in 2..=m {
            let d: Vec<f64> = unit(0)
                .iter()
                .zip(unit(i - 1))
                .map(|(a, b)| a - b)
                .collect();
            let w = phi.powi(-(i as i32));
            for (r, p) in rhs.iter_mut().zip(ambient_projection(&spec, &d)) {
                *r += w * p;
            }
        }
        for (a, b) in lhs.iter().zip(&rhs) {
            residual = residual.max((a - b).abs());
        }
    }
    ensure(
        dist <= 1e-9 && residual <= 1e-10,
        format!("n <= 10^4: max torus distance {dist:.2e}; ambient residual {residual:.2e}"),
    )
}

fn partitions() -> Outcome {
    let mut worst_gap = 0f64;
    let mut worst_total = 0f64;
    let mut bad_counts = 0;
    for m in 2..=4 {
        let sys = lib(MBonacciSystem::with_max(m, 1 << 20))?;
        let f = basis(m, 13);
        for k in 0..=12 {
            let p = lib(partition_ck(&sys, k))?;
            if p.len() as u64 != f[k] {
                bad_counts += 1;
            }
            worst_gap = worst_gap
                .max(p[0].left.abs())
                .max((p[p.len() - 1].right - 1.0).abs());
            for w in p.windows(2) {
                worst_gap = worst_gap.max((w[1].left - w[0].right).abs());
            }
            let total: f64 = p.iter().map(|i| i.length()).sum();
            worst_total = worst_total.max((total - 1.0).abs());
        }
    }
    ensure(
        bad_counts == 0 && worst_gap <= 1e-10 && worst_total <= 1e-10,
        format!(
            "m = 2..4, k <= 12: {bad_counts} count mismatches, max gap/overlap {worst_gap:.2e}, max total defect {worst_total:.2e}"
        ),
    )
}

fn vdc_intervals() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut misses = 0usize;
    let mut worst = 0f64;
    for m in 2..=6 {
        let sys = lib(MBonacciSystem::with_max(m, 1_000_000))?;
        for _ in 0..10_000 {
            let n = rng.gen_range(0..=sys.max_n());
            let v = lib(vdc(&sys, n))?;
            for k in 0..=12 {
                let iv = lib(interval_for(&sys, n, k))?;
                if !iv.contains(v, 1e-12) {
                    misses += 1;
                }
                let phi = sys.phi_f64();
                let expected: f64 = phi.powi(-(k as i32))
                    * (1..=m - iv.r).map(|i| phi.powi(-(i as i32))).sum::<f64>();
                worst = worst.max((iv.length() - expected).abs());
            }
        }
    }
    ensure(
        misses == 0 && worst <= 1e-10,
        format!("10^4 n per m = 2..6, k <= 12: {misses} misses, measure defect {worst:.2e}"),
    )
}

fn tiling() -> Outcome {
    let opts = GridCheckOptions::default();
    let mut lines = Vec::new();
    let mut ok = true;
    for (m, depth, res) in [
        (2usize, 100_000usize, 1.0 / 256.0),
        (3, 1_000_000, 1.0 / 32.0),
    ] {
        let sys = lib(MBonacciSystem::with_max(m, depth as u64))?;
        let cloud = lib(build_cloud(&sys, depth))?;
        let t = lib(tiling_check(&sys, &cloud, res, opts))?;
        ok &= t.covered_cells == t.cells;
        let mut ratios = Vec::new();
        for k in 1..=2 {
            let s = lib(set_equation_check(&sys, &cloud, k, res, opts))?;
            ok &= s.ratio <= 0.05;
            ratios.push(format!("k={k} {:.4}", s.ratio));
        }
        lines.push(format!(
            "m={m}: {}/{} cells covered, set-equation ratio {}",
            t.covered_cells,
            t.cells,
            ratios.join(", ")
        ));
    }
    ensure(ok, lines.join("; "))
}

fn frequencies() -> Outcome {
    let mut worst = 0f64;
    for m in 2..=6u8 {
        let sys = lib(MBonacciSystem::with_max(m as usize, 1))?;
        let mut k = 0;
        while basis(m as usize, k + 1)[k] < 100_000 {
            k += 1;
        }
        let word = iterate_substitution(m, k);
        for letter in 1..=m {
            let f = word.iter().filter(|&&a| a == letter).count() as f64 / word.len() as f64;
            worst = worst.max((f - sys.phi_neg_pow_f64(letter as usize)).abs());
        }
    }
    ensure(
        worst <= 1e-3,
        format!("m = 2..6, |sigma^K(1)| >= 10^5: max deviation {worst:.2e}"),
    )
}

/// Every N up to 10^4, then every 50th N up to 10^5.
fn sample_sizes() -> Vec<usize> {
    (100..=10_000)
        .chain((10_050..=100_000).step_by(50))
        .collect()
}

fn vdc_discrepancy() -> Outcome {
    let mut worst = (0f64, 0usize, 0usize);
    for m in [2usize, 3] {
        let sys = lib(MBonacciSystem::with_max(m, 100_000))?;
        let values: Vec<f64> = (0..100_000u64).map(|n| vdc(&sys, n).unwrap()).collect();
        let local = sample_sizes()
            .into_par_iter()
            .map(|n| {
                let d = star_disc_1d(&values[..n]).unwrap();
                (n as f64 * d / (n as f64).ln(), n, m)
            })
            .reduce(|| (0.0, 0, 0), |a, b| if b.0 > a.0 { b } else { a });
        if local.0 > worst.0 {
            worst = local;
        }
    }
    ensure(
        worst.0 <= 3.0,
        format!(
            "{} sample sizes in [10^2, 10^5], m = 2, 3: max N D_N / log N = {:.4} (m = {}, N = {})",
            sample_sizes().len(),
            worst.0,
            worst.2,
            worst.1
        ),
    )
}

fn example_exponent() -> Outcome {
    let e = lib(theorem_exponent(&[2, 3], &[0.0, 1.09336]))?;
    let levels: Vec<u32> = (4..=9).collect();
    let s3 = lib(MBonacciSystem::with_max(3, 1_000_000))?;
    let d3 = lib(box_dim_boundary(
        &lib(build_cloud(&s3, 1_000_000))?,
        &levels,
        BoxDimOptions::default(),
    ))?;
    let s2 = lib(MBonacciSystem::with_max(2, 1_000_000))?;
    let d2 = lib(box_dim_boundary(
        &lib(build_cloud(&s2, 1_000_000))?,
        &levels,
        BoxDimOptions::default(),
    ))?;
    ensure(
        (e + 0.302213).abs() <= 1e-6 && (0.94..=1.25).contains(&d3.slope) && d2.slope <= 0.15,
        format!(
            "exponent {e:.7}; m=3 boundary dimension {:.4} +/- {:.4} (counts {:?}); m=2 control {:.4}",
            d3.slope, d3.stderr, d3.counts, d2.slope
        ),
    )
}

fn halton_decay() -> Outcome {
    let cfg = lib(HaltonConfig::from_orders(&[2, 3], 1 << 13))?;
    let pts = lib(halton_points(&cfg, 1 << 13))?;
    let mut samples = Vec::new();
    for p in 8..=13 {
        let n = 1usize << p;
        samples.push((n as f64, lib(star_disc_multi(&pts[..n], 2))?));
    }
    let fit = lib(decay_fit(&samples))?;
    let values: Vec<String> = samples.iter().map(|(_, d)| format!("{d:.5}")).collect();
    ensure(
        fit.exponent <= -0.30,
        format!(
            "N = 2^8..2^13: D = [{}], fitted exponent {:.4} (r2 {:.3})",
            values.join(", "),
            fit.exponent,
            fit.r2
        ),
    )
}

fn multi_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let instances: Vec<Vec<Vec<f64>>> = (0..200)
        .map(|i| {
            let s = 2 + i % 2;
            let n = rng.gen_range(1..=64);
            let ties = rng.gen_bool(0.3);
            (0..n)
                .map(|_| {
                    (0..s)
                        .map(|_| {
                            if ties {
                                rng.gen_range(0..8) as f64 / 8.0
                            } else {
                                rng.gen::<f64>()
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let worst = instances
        .par_iter()
        .map(|pts| {
            let fast = star_disc_multi(pts, pts[0].len()).unwrap();
            (fast - naive_star_disc(pts)).abs()
        })
        .reduce(|| 0.0, f64::max);
    ensure(
        worst <= 1e-12,
        format!("200 instances, N <= 64, s = 2, 3: max difference {worst:.2e}"),
    )
}

const FIXTURE: &str = include_str!("fixtures/local_discrepancy_m2.txt");

fn local_discrepancies() -> Outcome {
    // memberships partition the index range at every level
    let mut overlaps = 0usize;
    for m in [2usize, 3] {
        let sys = lib(MBonacciSystem::with_max(m, 4000))?;
        for k in 0..=8 {
            let addrs = lib(enumerate_addresses(m, k))?;
            overlaps += (0..2000u64)
                .into_par_iter()
                .filter(|&n| {
                    addrs
                        .iter()
                        .filter(|a| membership_oracle(&sys, n, a).unwrap())
                        .count()
                        != 1
                })
                .count();
        }
    }

    let sys = lib(MBonacciSystem::with_max(2, 1_000_000))?;
    let mut out_of_range = 0;
    let mut worst_scaled = 0f64;
    for j in 10..=27 {
        let n = sys.basis()[j];
        for k in 0..=6 {
            let d = lib(local_discrepancy(&sys, k, n))?;
            if !(0.0..=1.0).contains(&d) {
                out_of_range += 1;
            }
            worst_scaled = worst_scaled.max(d * n as f64);
        }
    }

    let mut drift = 0f64;
    let mut frozen_max = 0f64;
    for line in FIXTURE.lines().filter(|l| !l.starts_with('#')) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let (j, k, expected): (usize, usize, f64) = (
            f[0].parse().unwrap(),
            f[1].parse().unwrap(),
            f[2].parse().unwrap(),
        );
        let n = sys.basis()[j];
        let got = lib(local_discrepancy(&sys, k, n))? * n as f64;
        drift = drift.max((got - expected).abs());
        frozen_max = frozen_max.max(expected);
    }
    ensure(
        overlaps == 0 && out_of_range == 0 && worst_scaled <= 50.0 && drift <= 1e-9,
        format!(
            "k <= 8: {overlaps} indices outside exactly one subtile; N = F_10..F_27, k <= 6: max N delta_k = {worst_scaled:.3e} (bound 50), frozen constant {frozen_max:.6e}, drift {drift:.1e}"
        ),
    )
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "numeration roundtrip",
            limit: Some(Duration::from_secs(30)),
            run: roundtrip,
        },
        Criterion {
            id: 2,
            name: "basis equals substitution lengths",
            limit: None,
            run: word_lengths,
        },
        Criterion {
            id: 3,
            name: "characteristic identity",
            limit: None,
            run: characteristic,
        },
        Criterion {
            id: 4,
            name: "rotation conjugacy",
            limit: None,
            run: conjugacy,
        },
        Criterion {
            id: 5,
            name: "interval partitions",
            limit: None,
            run: partitions,
        },
        Criterion {
            id: 6,
            name: "vdc interval membership",
            limit: None,
            run: vdc_intervals,
        },
        Criterion {
            id: 7,
            name: "tiling and set equation",
            limit: Some(Duration::from_secs(180)),
            run: tiling,
        },
        Criterion {
            id: 8,
            name: "letter frequencies",
            limit: None,
            run: frequencies,
        },
        Criterion {
            id: 9,
            name: "1-D discrepancy bound",
            limit: Some(Duration::from_secs(60)),
            run: vdc_discrepancy,
        },
        Criterion {
            id: 10,
            name: "example exponent and boundary dimension",
            limit: Some(Duration::from_secs(300)),
            run: example_exponent,
        },
        Criterion {
            id: 11,
            name: "Halton decay exponent",
            limit: Some(Duration::from_secs(600)),
            run: halton_decay,
        },
        Criterion {
            id: 12,
            name: "multi-D discrepancy vs oracle",
            limit: None,
            run: multi_oracle,
        },
        Criterion {
            id: 13,
            name: "local discrepancies",
            limit: None,
            run: local_discrepancies,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (mut pass, mut detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if let Some(limit) = c.limit {
            if elapsed > limit {
                pass = false;
                detail.push_str(&format!("; over the {}s limit", limit.as_secs()));
            }
        }
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2} {}: {} ({:.2}s)",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
