//! Self-check suite run by the `verify` command.

use std::time::Instant;

use rayon::prelude::*;

use crate::discrepancy::{
    box_dim_boundary, decay_fit, star_disc_1d, star_disc_multi, star_disc_multi_lower_bound,
    BoxDimOptions,
};
use crate::error::Result;
use crate::numeration::{is_admissible, MBonacciSystem};
use crate::rauzy::{
    build_cloud, fixed_point_prefix, set_equation_check, tiling_check, word_length_check,
    GridCheckOptions,
};
use crate::rotation::{
    halton_points, interval_for, local_discrepancy, partition_ck, vdc, HaltonConfig,
};
use crate::spectral::{lattice_coords, rotation_point, torus_distance, torus_reduce, TorusPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depth {
    Quick,
    Full,
}

impl Depth {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Depth::Quick => quick,
            Depth::Full => full,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn(Depth) -> Result<(bool, String)>;

const CHECKS: &[(&str, Check)] = &[
    ("numeration roundtrip", roundtrip),
    ("word lengths equal basis", word_lengths),
    ("characteristic identity", characteristic),
    ("rotation conjugacy", conjugacy),
    ("interval partition", partition),
    ("vdc inside its interval", vdc_intervals),
    ("tiling and set equation", tiling),
    ("letter frequencies", frequencies),
    ("1-D discrepancy bound", vdc_discrepancy),
    ("boundary dimension", boundary_dimension),
    ("Halton decay", halton_decay),
    ("multi-D discrepancy bounds", multi_bounds),
    ("local discrepancy range", local_range),
];

/// Runs every check; a check that errors counts as failed.
pub fn run(depth: Depth) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let (passed, detail) = match check(depth) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckOutcome {
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

/// Table of outcomes, one line per check.
pub fn render(outcomes: &[CheckOutcome]) -> String {
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for o in outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        s.push_str(&format!(
            "{status}  {:width$}  {:>8.2}s  {}\n",
            o.name, o.seconds, o.detail
        ));
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    s.push_str(&format!("{passed}/{} checks passed\n", outcomes.len()));
    s
}

fn roundtrip(depth: Depth) -> Result<(bool, String)> {
    let limit = depth.pick(20_000u64, 1_000_000);
    let mut bad = 0usize;
    for m in 2..=6 {
        let sys = MBonacciSystem::with_max(m, limit)?;
        bad += (0..limit)
            .into_par_iter()
            .filter(|&n| match sys.encode(n) {
                Ok(e) => !is_admissible(m, e.digits()).unwrap_or(false) || sys.decode(&e) != Ok(n),
                Err(_) => true,
            })
            .count();
    }
    Ok((bad == 0, format!("n < {limit}, m = 2..6, {bad} failures")))
}

fn word_lengths(_: Depth) -> Result<(bool, String)> {
    let mut ok = true;
    for m in 2..=6 {
        let sys = MBonacciSystem::with_max(m, 1 << 40)?;
        for k in 0..=25 {
            ok &= word_length_check(&sys, k)?;
        }
    }
    Ok((ok, "k <= 25, m = 2..6".into()))
}

fn characteristic(_: Depth) -> Result<(bool, String)> {
    let mut worst = 0f64;
    for m in 2..=6 {
        let sys = MBonacciSystem::with_max(m, 1)?;
        let s: f64 = (1..=m).map(|i| sys.phi_neg_pow_f64(i)).sum();
        worst = worst.max((s - 1.0).abs());
    }
    Ok((
        worst <= 1e-12,
        format!("max |sum phi^-i - 1| = {worst:.1e}"),
    ))
}

fn conjugacy(depth: Depth) -> Result<(bool, String)> {
    let limit = depth.pick(1_000u64, 10_000);
    let mut worst = 0f64;
    for m in 2..=6 {
        let sys = MBonacciSystem::with_max(m, limit)?;
        let zero = [TorusPoint::zero(m - 1)];
        let systems = [sys.clone()];
        for n in 0..=limit {
            let mut x = vec![0i64; m];
            x[0] = n as i64;
            let a = torus_reduce(&lattice_coords(&sys, &x));
            let b = rotation_point(&systems, n, &zero)?;
            worst = worst.max(torus_distance(a.coords(), b.coords()));
        }
    }
    Ok((
        worst <= 1e-9,
        format!("n <= {limit}, max distance {worst:.1e}"),
    ))
}

fn partition(depth: Depth) -> Result<(bool, String)> {
    let kmax = depth.pick(9, 12);
    let mut worst = 0f64;
    let mut ok = true;
    for m in 2..=4 {
        let sys = MBonacciSystem::with_max(m, 1 << 20)?;
        for k in 0..=kmax {
            let p = partition_ck(&sys, k)?;
            ok &= p.len() as u64 == sys.basis()[k];
            let mut gap = p[0].left.abs().max((p[p.len() - 1].right - 1.0).abs());
            for w in p.windows(2) {
                gap = gap.max((w[1].left - w[0].right).abs());
            }
            let total: f64 = p.iter().map(|i| i.length()).sum();
            worst = worst.max(gap).max((total - 1.0).abs());
        }
    }
    Ok((
        ok && worst <= 1e-10,
        format!("k <= {kmax}, worst defect {worst:.1e}"),
    ))
}

fn vdc_intervals(depth: Depth) -> Result<(bool, String)> {
    let samples = depth.pick(2_000u64, 10_000);
    let mut misses = 0usize;
    for m in 2..=4 {
        let sys = MBonacciSystem::with_max(m, 1 << 24)?;
        // deterministic spread over the range
        let stride = sys.max_n() / samples;
        for i in 0..samples {
            let n = i * stride + i % 7;
            let v = vdc(&sys, n)?;
            for k in 0..=12 {
                if !interval_for(&sys, n, k)?.contains(v, 1e-12) {
                    misses += 1;
                }
            }
        }
    }
    Ok((
        misses == 0,
        format!("{samples} n per m, k <= 12, {misses} misses"),
    ))
}

fn tiling(depth: Depth) -> Result<(bool, String)> {
    let opts = GridCheckOptions::default();
    let (cases, mut ok, mut detail): (Vec<(usize, usize, f64)>, bool, Vec<String>) = (
        depth.pick(
            vec![(2, 100_000, 1.0 / 256.0), (3, 110_000, 1.0 / 32.0)],
            vec![(2, 100_000, 1.0 / 256.0), (3, 1_000_000, 1.0 / 32.0)],
        ),
        true,
        vec![],
    );
    for (m, cloud_depth, res) in cases {
        let sys = MBonacciSystem::with_max(m, cloud_depth as u64)?;
        let cloud = build_cloud(&sys, cloud_depth)?;
        let t = tiling_check(&sys, &cloud, res, opts)?;
        let s = set_equation_check(&sys, &cloud, 1, res, opts)?;
        ok &= t.covered_fraction == 1.0 && s.ratio <= 0.05;
        detail.push(format!(
            "m={m}: cover {:.3}, set-eq ratio {:.4}",
            t.covered_fraction, s.ratio
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn frequencies(_: Depth) -> Result<(bool, String)> {
    let mut worst = 0f64;
    for m in 2..=6 {
        let sys = MBonacciSystem::with_max(m, 1)?;
        let word = fixed_point_prefix(m, 100_000)?;
        for letter in 1..=m as u8 {
            let f = word.iter().filter(|&&l| l == letter).count() as f64 / word.len() as f64;
            worst = worst.max((f - sys.phi_neg_pow_f64(letter as usize)).abs());
        }
    }
    Ok((worst <= 1e-3, format!("max deviation {worst:.1e}")))
}

fn vdc_discrepancy(depth: Depth) -> Result<(bool, String)> {
    let nmax = depth.pick(10_000usize, 100_000);
    let mut worst = 0f64;
    for m in [2, 3] {
        let sys = MBonacciSystem::with_max(m, nmax as u64)?;
        let values = (0..nmax as u64)
            .map(|n| vdc(&sys, n))
            .collect::<Result<Vec<_>>>()?;
        let mut n = 100usize;
        while n <= nmax {
            let d = star_disc_1d(&values[..n])?;
            worst = worst.max(n as f64 * d / (n as f64).ln());
            n = (n as f64 * 1.25).ceil() as usize;
        }
    }
    Ok((worst <= 3.0, format!("max N D_N / log N = {worst:.3}")))
}

fn boundary_dimension(depth: Depth) -> Result<(bool, String)> {
    let cloud_depth = depth.pick(250_000, 1_000_000);
    let levels: Vec<u32> = depth.pick((4..=8).collect(), (4..=9).collect());
    let s3 = MBonacciSystem::with_max(3, cloud_depth as u64)?;
    let d3 = box_dim_boundary(
        &build_cloud(&s3, cloud_depth)?,
        &levels,
        BoxDimOptions::default(),
    )?;
    let s2 = MBonacciSystem::with_max(2, cloud_depth as u64)?;
    let d2 = box_dim_boundary(
        &build_cloud(&s2, cloud_depth)?,
        &levels,
        BoxDimOptions::default(),
    )?;
    Ok((
        (0.94..=1.25).contains(&d3.slope) && d2.slope <= 0.15,
        format!("m=3 slope {:.4}, m=2 slope {:.4}", d3.slope, d2.slope),
    ))
}

fn halton_decay(depth: Depth) -> Result<(bool, String)> {
    let top = depth.pick(12, 13);
    let cfg = HaltonConfig::from_orders(&[2, 3], 1 << top)?;
    let all = halton_points(&cfg, 1 << top)?;
    let samples = (8..=top)
        .map(|p| {
            let n = 1usize << p;
            star_disc_multi(&all[..n], 2).map(|d| (n as f64, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = decay_fit(&samples)?;
    Ok((
        fit.exponent <= -0.30,
        format!(
            "N = 2^8..2^{top}, exponent {:.4}, r2 {:.3}",
            fit.exponent, fit.r2
        ),
    ))
}

fn multi_bounds(depth: Depth) -> Result<(bool, String)> {
    let n = depth.pick(256, 1024);
    let cfg = HaltonConfig::from_orders(&[2, 3, 4], n as u64)?;
    let pts = halton_points(&cfg, n)?;
    let two: Vec<Vec<f64>> = pts.iter().map(|p| p[..2].to_vec()).collect();
    let exact2 = star_disc_multi(&two, 2)?;
    let lower2 = star_disc_multi_lower_bound(&two, 2, 64)?;
    let exact3 = star_disc_multi(&pts[..n / 4], 3)?;
    let first: Vec<f64> = pts.iter().map(|p| p[0]).collect();
    let d1 = star_disc_1d(&first)?;
    let ok = lower2 <= exact2 && exact2 >= d1 && exact2 >= 1.0 / n as f64 && exact3 <= 1.0;
    Ok((
        ok,
        format!("lower {lower2:.5} <= exact {exact2:.5}, 1-D projection {d1:.5}"),
    ))
}

fn local_range(depth: Depth) -> Result<(bool, String)> {
    let sys = MBonacciSystem::with_max(2, 1_000_000)?;
    let j = depth.pick(20, 25);
    let count = sys.basis()[j];
    let mut worst = 0f64;
    for k in 0..=6 {
        let d = local_discrepancy(&sys, k, count)?;
        if !(0.0..=1.0).contains(&d) {
            return Ok((false, format!("delta_{k} = {d} outside [0, 1]")));
        }
        worst = worst.max(d * count as f64);
    }
    Ok((
        worst <= 50.0,
        format!("N = F_{j}, max N delta_k = {worst:.3}"),
    ))
}
