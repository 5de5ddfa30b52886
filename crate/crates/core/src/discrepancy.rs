//! Measurement engine: star discrepancy (exact in one dimension, exact
//! critical-corner enumeration in several), log-log decay fits, box-counting
//! dimension of fractal boundaries and the Halton decay exponent.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeration::MBonacciSystem;
use crate::rauzy::{refine_cloud, FractalCloud, TorusGrid};

/// Largest number of set-equation levels used to densify a cloud.
pub const MAX_REFINEMENT: usize = 6;

/// Default operation budget for exact multi-dimensional enumeration, in units of `(N + 1)^s`.
pub const DEFAULT_CORNER_BUDGET: f64 = 5e9;

/// Candidate coordinates kept per axis by the subsampled lower bound.
pub const DEFAULT_SUBSAMPLE_CANDIDATES: usize = 2048;

fn check_unit(index: usize, x: f64) -> Result<()> {
    if (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::PointOutOfRange { index, value: x })
    }
}

/// Exact star discrepancy of a one-dimensional point set.
///
/// With `x_(1) <= ... <= x_(N)` sorted, `D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N)`.
pub fn star_disc_1d(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, &x) in points.iter().enumerate() {
        check_unit(i, x)?;
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let i = i as f64;
            ((i + 1.0) / n - x).max(x - i / n)
        })
        .fold(0.0, f64::max);
    Ok(d.min(1.0))
}

fn validate_multi(points: &[Vec<f64>], s: usize) -> Result<()> {
    if s < 2 {
        return Err(Error::InvalidArgument(format!(
            "multi-dimensional discrepancy needs s >= 2, got {s}"
        )));
    }
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != s {
            return Err(Error::InvalidArgument(format!(
                "point {i} has {} coordinates, expected {s}",
                p.len()
            )));
        }
        for &x in p {
            check_unit(i, x)?;
        }
    }
    Ok(())
}

/// Sorted distinct coordinates of one axis followed by 1.0.
fn axis_candidates(points: &[Vec<f64>], axis: usize) -> Vec<f64> {
    let mut c: Vec<f64> = points.iter().map(|p| p[axis]).collect();
    c.sort_by(f64::total_cmp);
    c.dedup();
    c.push(1.0);
    c
}

fn subsample(c: &[f64], keep: usize) -> Vec<f64> {
    if c.len() <= keep {
        return c.to_vec();
    }
    let stride = c.len().div_ceil(keep);
    let mut out: Vec<f64> = c.iter().step_by(stride).copied().collect();
    if out.last() != Some(&1.0) {
        out.push(1.0);
    }
    out
}

/// Largest signed local discrepancy over a candidate grid.
///
/// `closed = true` evaluates `#{x <= w}/N - vol(w)` (boxes approached from
/// above), `closed = false` evaluates `vol(w) - #{x < w}/N`.
struct CornerSearch<'a> {
    points: &'a [Vec<f64>],
    cands: Vec<Vec<f64>>,
    total: f64,
}

impl CornerSearch<'_> {
    fn run(&self, closed: bool) -> f64 {
        let all: Vec<usize> = (0..self.points.len()).collect();
        self.recurse(0, &all, 1.0, closed, true)
    }

    fn inside(&self, x: f64, w: f64, closed: bool) -> bool {
        if closed {
            x <= w
        } else {
            x < w
        }
    }

    fn recurse(&self, axis: usize, subset: &[usize], vol: f64, closed: bool, top: bool) -> f64 {
        let s = self.cands.len();
        if s - axis == 2 {
            return self.sweep(axis, subset, vol, closed);
        }
        let step = |w: &f64| {
            let sub: Vec<usize> = subset
                .iter()
                .copied()
                .filter(|&i| self.inside(self.points[i][axis], *w, closed))
                .collect();
            self.recurse(axis + 1, &sub, vol * w, closed, false)
        };
        if top {
            self.cands[axis]
                .par_iter()
                .map(step)
                .reduce(|| f64::NEG_INFINITY, f64::max)
        } else {
            self.cands[axis]
                .iter()
                .map(step)
                .fold(f64::NEG_INFINITY, f64::max)
        }
    }

    /// Incremental sweep over the last two axes.
    fn sweep(&self, a: usize, subset: &[usize], vol: f64, closed: bool) -> f64 {
        let b = a + 1;
        let ca = &self.cands[a];
        let cb = &self.cands[b];
        let mut order: Vec<(f64, usize)> = subset
            .iter()
            .map(|&i| {
                let y = self.points[i][b];
                // first candidate the point counts towards
                let rank = if closed {
                    cb.partition_point(|&c| c < y)
                } else {
                    cb.partition_point(|&c| c <= y)
                };
                (self.points[i][a], rank)
            })
            .collect();
        order.sort_by(|x, y| x.0.total_cmp(&y.0));

        let mut cnt = vec![0u32; cb.len()];
        let mut next = 0;
        let mut best = f64::NEG_INFINITY;
        for &w1 in ca {
            while next < order.len() && self.inside(order[next].0, w1, closed) {
                cnt[order[next].1] += 1;
                next += 1;
            }
            let base = vol * w1;
            let mut running = 0u32;
            for (t, &w2) in cb.iter().enumerate() {
                running += cnt[t];
                let v = if closed {
                    running as f64 / self.total - base * w2
                } else {
                    base * w2 - running as f64 / self.total
                };
                if v > best {
                    best = v;
                }
            }
        }
        best
    }
}

fn corner_search(points: &[Vec<f64>], cands: Vec<Vec<f64>>) -> f64 {
    let search = CornerSearch {
        points,
        cands,
        total: points.len() as f64,
    };
    let over = search.run(true);
    let under = search.run(false);
    over.max(under).clamp(0.0, 1.0)
}

/// Exact star discrepancy of an `s`-dimensional point set, `s >= 2`.
///
/// The supremum is attained at corners whose coordinates are point
/// coordinates or 1; both the closed and open counting variants are
/// evaluated there. Cost grows like `(N + 1)^s`.
pub fn star_disc_multi(points: &[Vec<f64>], s: usize) -> Result<f64> {
    star_disc_multi_with_budget(points, s, DEFAULT_CORNER_BUDGET)
}

pub fn star_disc_multi_with_budget(points: &[Vec<f64>], s: usize, budget: f64) -> Result<f64> {
    validate_multi(points, s)?;
    let needed = (points.len() as f64 + 1.0).powi(s as i32);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let cands = (0..s).map(|a| axis_candidates(points, a)).collect();
    Ok(corner_search(points, cands))
}

/// Lower bound on the star discrepancy from a thinned candidate grid.
pub fn star_disc_multi_lower_bound(
    points: &[Vec<f64>],
    s: usize,
    candidates_per_axis: usize,
) -> Result<f64> {
    validate_multi(points, s)?;
    let keep = candidates_per_axis.max(2);
    let cands = (0..s)
        .map(|a| subsample(&axis_candidates(points, a), keep))
        .collect();
    Ok(corner_search(points, cands))
}

/// How a discrepancy value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "exact1d")]
    Exact1d,
    #[serde(rename = "brute_force_sD")]
    BruteForce,
    /// Thinned corner grid; the value is a lower bound.
    #[serde(rename = "subsampled_lower_bound")]
    SubsampledLowerBound,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact1d => "exact1d",
            Method::BruteForce => "brute_force_sD",
            Method::SubsampledLowerBound => "subsampled_lower_bound",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscrepancyReport {
    pub n: usize,
    pub value: f64,
    pub method: Method,
    pub dims: usize,
    pub runtime_seconds: f64,
}

/// Measures a point set, falling back to the subsampled lower bound when
/// exact enumeration would exceed `budget`.
pub fn measure(points: &[Vec<f64>], s: usize, budget: f64) -> Result<DiscrepancyReport> {
    let start = Instant::now();
    let (value, method) = if s == 1 {
        let xs: Vec<f64> = points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if p.len() != 1 {
                    Err(Error::InvalidArgument(format!(
                        "point {i} is not one-dimensional"
                    )))
                } else {
                    Ok(p[0])
                }
            })
            .collect::<Result<_>>()?;
        (star_disc_1d(&xs)?, Method::Exact1d)
    } else {
        match star_disc_multi_with_budget(points, s, budget) {
            Ok(v) => (v, Method::BruteForce),
            Err(Error::BudgetExceeded { .. }) => {
                let keep =
                    (budget.powf(1.0 / s as f64) as usize).clamp(2, DEFAULT_SUBSAMPLE_CANDIDATES);
                (
                    star_disc_multi_lower_bound(points, s, keep)?,
                    Method::SubsampledLowerBound,
                )
            }
            Err(e) => return Err(e),
        }
    };
    Ok(DiscrepancyReport {
        n: points.len(),
        value,
        method,
        dims: s,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Least-squares fit of `log D` against `log N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r2: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    let stderr = if xs.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, intercept, r2, stderr)
}

/// Fits `D_N ~ c N^exponent` to `(N, D_N)` samples with strictly increasing `N`.
pub fn decay_fit(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if samples.len() < 4 {
        return Err(Error::Degenerate(format!(
            "need at least 4 samples, got {}",
            samples.len()
        )));
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Degenerate("sample sizes must increase".into()));
    }
    if samples.iter().any(|(n, d)| *n <= 0.0 || *d <= 0.0) {
        return Err(Error::Degenerate(
            "sizes and values must be positive".into(),
        ));
    }
    if samples.iter().all(|(_, d)| *d == samples[0].1) {
        return Err(Error::Degenerate("constant discrepancy values".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, d)| d.ln()).collect();
    let (exponent, intercept, r2, _) = least_squares(&xs, &ys);
    Ok(DecayFit {
        exponent,
        intercept,
        r2,
    })
}

/// Box-counting estimate of a boundary dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct DimensionEstimate {
    pub levels: Vec<u32>,
    pub counts: Vec<u64>,
    pub slope: f64,
    pub stderr: f64,
    /// Set-equation levels used to densify the cloud before counting.
    pub refinement: usize,
}

/// Which cells count as boundary cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryRule {
    /// Occupied cells with an empty face neighbour.
    OuterEdge,
    /// Cells holding points of two or more letters.
    MultiLetter,
    /// Either of the two.
    Both,
}

#[derive(Clone, Copy, Debug)]
pub struct BoxDimOptions {
    pub rule: BoundaryRule,
    /// Minimum mean number of cloud points per cell at the finest level.
    pub min_points_per_cell: f64,
    /// The cloud is densified through the set equation until the finest
    /// level holds this many points per cell on average (0 disables).
    pub target_points_per_cell: f64,
}

impl Default for BoxDimOptions {
    fn default() -> Self {
        Self {
            rule: BoundaryRule::Both,
            min_points_per_cell: 2.0,
            target_points_per_cell: 32.0,
        }
    }
}

/// Number of boundary cells of side `2^-level` on the torus.
pub fn boundary_cell_count(cloud: &FractalCloud, level: u32, rule: BoundaryRule) -> Result<u64> {
    let grid = TorusGrid::new(cloud.dim(), 1usize << level)?;
    let masks = grid.letter_masks(cloud);
    let count = (0..masks.len())
        .into_par_iter()
        .filter(|&cell| {
            let mask = masks[cell];
            if mask == 0 {
                return false;
            }
            let multi = mask.count_ones() >= 2;
            let edge = || grid.neighbours(cell).any(|nb| masks[nb] == 0);
            match rule {
                BoundaryRule::MultiLetter => multi,
                BoundaryRule::OuterEdge => edge(),
                BoundaryRule::Both => multi || edge(),
            }
        })
        .count();
    Ok(count as u64)
}

/// Fits `log N(level) / (level log 2)` over the given grid levels.
pub fn box_dim_boundary(
    cloud: &FractalCloud,
    levels: &[u32],
    opts: BoxDimOptions,
) -> Result<DimensionEstimate> {
    if levels.len() < 2 {
        return Err(Error::InvalidArgument("need at least two levels".into()));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("levels must increase".into()));
    }
    let finest = *levels.last().expect("non-empty");
    let cells = (2f64).powi((finest as usize * cloud.dim()) as i32);
    let density = cloud.len() as f64 / cells;
    if density < opts.min_points_per_cell {
        return Err(Error::InsufficientDensity(format!(
            "{density:.2} points per cell at level {finest}, need {}",
            opts.min_points_per_cell
        )));
    }
    let sys = MBonacciSystem::with_max(cloud.m(), 1)?;
    let mut refinement = 0;
    if opts.target_points_per_cell > density {
        let growth = (opts.target_points_per_cell / density).ln() / sys.phi_f64().ln();
        refinement = (growth.ceil() as usize).min(MAX_REFINEMENT);
    }
    let refined;
    let counted = if refinement > 0 {
        refined = refine_cloud(&sys, cloud, refinement)?;
        &refined
    } else {
        cloud
    };
    let counts = levels
        .iter()
        .map(|&l| boundary_cell_count(counted, l, opts.rule))
        .collect::<Result<Vec<_>>>()?;
    let (slope, stderr) = if counts.iter().all(|c| *c == 0) {
        (0.0, 0.0)
    } else {
        let xs: Vec<f64> = levels
            .iter()
            .map(|&l| l as f64 * std::f64::consts::LN_2)
            .collect();
        let ys: Vec<f64> = counts.iter().map(|&c| (c.max(1) as f64).ln()).collect();
        let (slope, _, _, stderr) = least_squares(&xs, &ys);
        (slope, stderr)
    };
    Ok(DimensionEstimate {
        levels: levels.to_vec(),
        counts,
        slope,
        stderr,
        refinement,
    })
}

/// `max_i (d_i - (m_i - 1)) / sum_i (m_i - 1)`: the decay exponent for Halton
/// sequences with pairwise distinct orders `m_i` and boundary dimensions `d_i`.
pub fn theorem_exponent(ms: &[usize], dims: &[f64]) -> Result<f64> {
    if ms.is_empty() || ms.len() != dims.len() {
        return Err(Error::InvalidArgument(format!(
            "{} orders but {} dimensions",
            ms.len(),
            dims.len()
        )));
    }
    for (i, &m) in ms.iter().enumerate() {
        if m < 2 {
            return Err(Error::InvalidOrder(m));
        }
        if ms[..i].contains(&m) {
            return Err(Error::InvalidArgument(format!(
                "orders must be pairwise distinct, {m} repeats"
            )));
        }
    }
    for (&m, &d) in ms.iter().zip(dims) {
        if !(d >= 0.0 && d < (m - 1) as f64) {
            return Err(Error::InvalidArgument(format!(
                "boundary dimension {d} must lie in [0, {})",
                m - 1
            )));
        }
    }
    let total: usize = ms.iter().map(|m| m - 1).sum();
    let worst = ms
        .iter()
        .zip(dims)
        .map(|(&m, &d)| d - (m - 1) as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(worst / total as f64)
}
