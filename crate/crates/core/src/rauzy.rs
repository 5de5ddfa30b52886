//! Substitutive geometry of the m-bonacci substitution.
//!
//! Rauzy fractals are handled as labeled point clouds: point `n` is the
//! lattice-coordinate image of the abelianized fixed-point prefix
//! `u_1 ... u_n`, labeled by the next letter `u_{n+1}`. Checks against the
//! set equation and the tiling property are done on half-open grid cells of
//! the torus `[0, 1)^{m-1}`, anchored at the origin.

use std::ops::RangeInclusive;

use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::numeration::MBonacciSystem;
use crate::spectral::{self, apply_incidence, contract, lattice_coords, reduce_unit, TorusPoint};

/// Default multiplier of the density heuristic `depth >= factor * resolution^{-(m-1)}`.
pub const DEFAULT_DENSITY_FACTOR: f64 = 100.0;

/// Bytes a cloud may occupy before construction is refused.
pub const DEFAULT_CLOUD_MEMORY_BUDGET: usize = 2 << 30;

/// Largest number of grid cells a rasterization may allocate.
pub const MAX_GRID_CELLS: usize = 1 << 28;

const RENORMALIZE_EVERY: usize = 1 << 16;

/// First `length` letters of the fixed point of the substitution starting with 1.
pub fn fixed_point_prefix(m: usize, length: usize) -> Result<Vec<u8>> {
    if m < 2 {
        return Err(Error::InvalidOrder(m));
    }
    if length == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    let mut word = vec![1u8];
    while word.len() < length {
        let mut next = Vec::with_capacity(word.len() * 2);
        for &a in &word {
            next.push(1);
            if (a as usize) < m {
                next.push(a + 1);
            }
        }
        word = next;
    }
    word.truncate(length);
    Ok(word)
}

/// Length of the `k`-th iterate of the substitution on letter 1, from letter counts.
pub fn word_length(m: usize, k: usize) -> Result<u128> {
    if m < 2 {
        return Err(Error::InvalidOrder(m));
    }
    let mut counts = vec![0i64; m];
    counts[0] = 1;
    for step in 0..k {
        counts = apply_incidence(&counts);
        if counts.iter().any(|c| *c < 0 || *c > i64::MAX / 4) {
            return Err(Error::Overflow { index: step + 1 });
        }
    }
    Ok(counts.iter().map(|c| *c as u128).sum())
}

/// True iff the `k`-th iterate of letter 1 has length `F_k`.
pub fn word_length_check(sys: &MBonacciSystem, k: usize) -> Result<bool> {
    let f = *sys.basis().get(k).ok_or(Error::InvalidArgument(format!(
        "k = {k} beyond basis length {}",
        sys.basis().len()
    )))?;
    Ok(word_length(sys.m(), k)? == f as u128)
}

/// `sum_j |sigma^j(1^{eps_j})|`, the value of a digit string read as a
/// walk in the prefix-suffix graph.
pub fn dumont_thomas_value(m: usize, digits: &[u8]) -> Result<u128> {
    let mut total = 0u128;
    for (j, &d) in digits.iter().enumerate() {
        if d == 1 {
            total += word_length(m, j)?;
        }
    }
    Ok(total)
}

/// Edge `from -> to` of the prefix-suffix graph: `sigma(to) = p from s` with `|p| = prefix_len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrefixSuffixEdge {
    pub from: u8,
    pub to: u8,
    pub prefix_len: u8,
}

/// All edges of the prefix-suffix graph, read off the substitution images.
pub fn prefix_suffix_edges(m: usize) -> Result<Vec<PrefixSuffixEdge>> {
    let sub = spectral::SubstitutionData::new(m)?;
    let mut edges = Vec::with_capacity(2 * m - 1);
    for to in 1..=m as u8 {
        for (pos, &from) in sub.image(to).iter().enumerate() {
            edges.push(PrefixSuffixEdge {
                from,
                to,
                prefix_len: pos as u8,
            });
        }
    }
    Ok(edges)
}

/// Vertices `i_0, ..., i_k` of the walk encoding an expansion: `i_t` is one
/// plus the length of the run of ones starting at digit `t`.
pub fn walk_vertices(e: &crate::numeration::Expansion, k: usize) -> Vec<u8> {
    (0..=k).map(|t| 1 + e.ones_run_from(t) as u8).collect()
}

/// Labeled point cloud approximating the Rauzy fractal and its subtiles.
#[derive(Clone, Debug)]
pub struct FractalCloud {
    m: usize,
    labels: Vec<u8>,
    torus: Vec<f64>,
    raw: Vec<f64>,
}

impl FractalCloud {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m - 1
    }

    /// Number of fixed-point letters consumed, equal to the number of points.
    pub fn depth(&self) -> usize {
        self.labels.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Label `u_{n+1}` of point `n`.
    pub fn label(&self, n: usize) -> u8 {
        self.labels[n]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Reduced coordinates of point `n`.
    pub fn coords(&self, n: usize) -> &[f64] {
        let d = self.dim();
        &self.torus[n * d..(n + 1) * d]
    }

    pub fn point(&self, n: usize) -> TorusPoint {
        spectral::torus_reduce(self.coords(n))
    }

    /// Unreduced lattice coordinates of point `n`, a point of the fractal itself.
    pub fn raw(&self, n: usize) -> &[f64] {
        let d = self.dim();
        &self.raw[n * d..(n + 1) * d]
    }

    pub fn iter_coords(&self) -> impl Iterator<Item = (&[f64], u8)> + '_ {
        self.torus
            .chunks_exact(self.dim())
            .zip(self.labels.iter().copied())
    }

    /// Cloud from explicit labeled points; coordinates are reduced mod 1.
    pub fn from_points(m: usize, points: &[(Vec<f64>, u8)]) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidOrder(m));
        }
        let d = m - 1;
        let mut labels = Vec::with_capacity(points.len());
        let mut torus = Vec::with_capacity(points.len() * d);
        let mut raw = Vec::with_capacity(points.len() * d);
        for (i, (c, l)) in points.iter().enumerate() {
            if c.len() != d || *l < 1 || *l as usize > m {
                return Err(Error::InvalidArgument(format!(
                    "point {i} has the wrong shape"
                )));
            }
            labels.push(*l);
            raw.extend_from_slice(c);
            torus.extend(c.iter().map(|&x| reduce_unit(x)));
        }
        Ok(Self {
            m,
            labels,
            torus,
            raw,
        })
    }
}

/// Builds the cloud of `depth` points with the default memory budget.
pub fn build_cloud(sys: &MBonacciSystem, depth: usize) -> Result<FractalCloud> {
    build_cloud_with_budget(sys, depth, DEFAULT_CLOUD_MEMORY_BUDGET)
}

/// Builds the cloud incrementally: each step adds the lattice coordinates of
/// one standard basis vector to a double-double running sum, which is reset
/// to the directly computed value every 2^16 steps.
pub fn build_cloud_with_budget(
    sys: &MBonacciSystem,
    depth: usize,
    memory_budget: usize,
) -> Result<FractalCloud> {
    let m = sys.m();
    let d = m - 1;
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let bytes = depth.saturating_mul(1 + 16 * d);
    if bytes > memory_budget {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} needs {bytes} bytes, above the memory budget of {memory_budget}"
        )));
    }
    let word = fixed_point_prefix(m, depth)?;

    let gamma: Vec<TwoFloat> = (2..=m).map(|i| sys.phi_neg_pow(i)).collect();
    let one = TwoFloat::from(1.0);
    let mut acc = vec![TwoFloat::from(0.0); d];
    let mut counts = vec![0i64; m];
    let mut torus = Vec::with_capacity(depth * d);
    let mut raw = Vec::with_capacity(depth * d);

    for n in 0..depth {
        if n > 0 {
            // lattice_coords(e_a) = gamma - unit vector at coordinate a - 2 (for a >= 2)
            let a = word[n - 1] as usize;
            counts[a - 1] += 1;
            for (c, g) in acc.iter_mut().zip(&gamma) {
                *c += *g;
            }
            if a >= 2 {
                acc[a - 2] -= one;
            }
            if n % RENORMALIZE_EVERY == 0 {
                let nn = TwoFloat::from(n as u64);
                for (i, c) in acc.iter_mut().enumerate() {
                    *c = nn * gamma[i] - TwoFloat::from(counts[i + 1]);
                }
            }
        }
        for c in &acc {
            let x = c.hi() + c.lo();
            raw.push(x);
            let f = *c - c.floor();
            torus.push(reduce_unit(f.hi() + f.lo()));
        }
    }
    Ok(FractalCloud {
        m,
        labels: word,
        torus,
        raw,
    })
}

/// Address of a level-`k` subtile: the lowest `k` digits, the number `r` of
/// ones ending the digit block, and the terminal letter of the walk.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubtileAddress {
    pub level: usize,
    /// `eps_0, ..., eps_{k-1}` (length exactly `level`).
    pub digits: Vec<u8>,
    pub r: usize,
    pub letter: u8,
}

impl SubtileAddress {
    /// Terminal letters compatible with the digit block: `1..=m-r`.
    pub fn allowed_letters(&self, m: usize) -> RangeInclusive<u8> {
        1..=(m - self.r) as u8
    }

    /// `nu_k = sum_{j<k} eps_j F_j`.
    pub fn nu(&self, sys: &MBonacciSystem) -> u64 {
        self.digits
            .iter()
            .zip(sys.basis())
            .filter(|(d, _)| **d == 1)
            .map(|(_, f)| *f)
            .sum()
    }

    /// Normalized measure `phi^{-k-letter}` of the subtile.
    pub fn measure(&self, sys: &MBonacciSystem) -> f64 {
        sys.phi_neg_pow_f64(self.level + self.letter as usize)
    }

    /// Dense index `bits * m + (letter - 1)` with digit `j` as bit `j`.
    pub fn index(&self, m: usize) -> usize {
        let bits = self
            .digits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, d)| acc | ((*d as usize) << j));
        bits * m + (self.letter as usize - 1)
    }
}

/// Level-`k` subtile of the rotation point of `n`.
pub fn subtile_of(sys: &MBonacciSystem, n: u64, k: usize) -> Result<SubtileAddress> {
    let e = sys.encode(n)?;
    let digits: Vec<u8> = (0..k).map(|j| e.digit(j as isize)).collect();
    let r = e.trailing_ones_before(k);
    let letter = 1 + e.ones_run_from(k) as u8;
    debug_assert!(letter as usize <= sys.m() - r);
    Ok(SubtileAddress {
        level: k,
        digits,
        r,
        letter,
    })
}

/// Every level-`k` subtile address, ordered by digit bits then letter.
pub fn enumerate_addresses(m: usize, k: usize) -> Result<Vec<SubtileAddress>> {
    if m < 2 {
        return Err(Error::InvalidOrder(m));
    }
    if k >= 40 {
        return Err(Error::LevelAboveCap { k, cap: 39 });
    }
    let mut out = Vec::new();
    for bits in 0u64..(1u64 << k) {
        let digits: Vec<u8> = (0..k).map(|j| ((bits >> j) & 1) as u8).collect();
        if !crate::numeration::is_admissible(m, &digits)? {
            continue;
        }
        let r = digits.iter().rev().take_while(|d| **d == 1).count();
        for letter in 1..=(m - r) as u8 {
            out.push(SubtileAddress {
                level: k,
                digits: digits.clone(),
                r,
                letter,
            });
        }
    }
    Ok(out)
}

/// Walk of length `k` in the prefix-suffix graph, reduced to its terminal
/// letter and translation vector `l(sigma^{k-1}(p_{k-1}) ... p_0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkImage {
    pub start: u8,
    pub end: u8,
    pub translation: Vec<i64>,
}

/// All walks of length `k` starting at `start`.
pub fn walks_from(m: usize, start: u8, k: usize) -> Vec<WalkImage> {
    let mut powers = Vec::with_capacity(k);
    let mut e1 = vec![0i64; m];
    e1[0] = 1;
    for _ in 0..k {
        powers.push(e1.clone());
        e1 = apply_incidence(&e1);
    }
    let mut out = Vec::new();
    let mut stack = vec![(start, 0usize, vec![0i64; m])];
    while let Some((letter, step, t)) = stack.pop() {
        if step == k {
            out.push(WalkImage {
                start,
                end: letter,
                translation: t,
            });
            continue;
        }
        if letter == 1 {
            for next in (1..=m as u8).rev() {
                stack.push((next, step + 1, t.clone()));
            }
        } else {
            let mut t2 = t;
            for (a, b) in t2.iter_mut().zip(&powers[step]) {
                *a += b;
            }
            stack.push((letter - 1, step + 1, t2));
        }
    }
    out
}

/// Half-open grid on the torus `[0, 1)^dim` with `cells_per_axis` cells per side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusGrid {
    pub dim: usize,
    pub cells_per_axis: usize,
}

impl TorusGrid {
    /// Grid with cell side `resolution`; `1 / resolution` must be an integer.
    pub fn from_resolution(dim: usize, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "resolution {resolution} outside (0, 1]"
            )));
        }
        let c = (1.0 / resolution).round();
        if ((c * resolution) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "1 / resolution must be an integer, got {}",
                1.0 / resolution
            )));
        }
        Self::new(dim, c as usize)
    }

    pub fn new(dim: usize, cells_per_axis: usize) -> Result<Self> {
        let total = (cells_per_axis as f64).powi(dim as i32);
        if cells_per_axis == 0 || total > MAX_GRID_CELLS as f64 {
            return Err(Error::InvalidArgument(format!(
                "grid of {cells_per_axis}^{dim} cells exceeds the cell cap"
            )));
        }
        Ok(Self {
            dim,
            cells_per_axis,
        })
    }

    pub fn len(&self) -> usize {
        self.cells_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell containing a reduced point.
    #[inline]
    pub fn cell(&self, coords: &[f64]) -> usize {
        let c = self.cells_per_axis;
        coords.iter().rev().fold(0usize, |acc, &x| {
            let i = ((x * c as f64) as usize).min(c - 1);
            acc * c + i
        })
    }

    /// Cell containing an arbitrary point, reduced first.
    #[inline]
    pub fn cell_of_unreduced(&self, coords: &[f64]) -> usize {
        let c = self.cells_per_axis;
        coords.iter().rev().fold(0usize, |acc, &x| {
            let i = ((reduce_unit(x) * c as f64) as usize).min(c - 1);
            acc * c + i
        })
    }

    /// Face-adjacent neighbours on the torus.
    pub fn neighbours(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        let c = self.cells_per_axis;
        let dim = self.dim;
        (0..dim).flat_map(move |axis| {
            let stride = c.pow(axis as u32);
            let i = (cell / stride) % c;
            let base = cell - i * stride;
            let up = base + ((i + 1) % c) * stride;
            let down = base + ((i + c - 1) % c) * stride;
            [up, down]
        })
    }

    /// Letter bitmask per cell for the given cloud.
    pub fn letter_masks(&self, cloud: &FractalCloud) -> Vec<u32> {
        let mut masks = vec![0u32; self.len()];
        for (coords, label) in cloud.iter_coords() {
            masks[self.cell(coords)] |= 1 << (label - 1);
        }
        masks
    }
}

/// Tunables shared by the grid-based checks.
#[derive(Clone, Copy, Debug)]
pub struct GridCheckOptions {
    /// Multiplier in `depth >= factor * resolution^{-(m-1)}`.
    pub density_factor: f64,
}

impl Default for GridCheckOptions {
    fn default() -> Self {
        Self {
            density_factor: DEFAULT_DENSITY_FACTOR,
        }
    }
}

fn check_density(cloud: &FractalCloud, grid: &TorusGrid, factor: f64) -> Result<()> {
    let needed = factor * grid.len() as f64;
    if (cloud.depth() as f64) < needed {
        return Err(Error::InsufficientDensity(format!(
            "depth {} below {needed:.0} required for {} cells",
            cloud.depth(),
            grid.len()
        )));
    }
    Ok(())
}

/// Per-letter outcome of a set-equation comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct LetterComparison {
    pub letter: u8,
    pub lhs_cells: usize,
    pub rhs_cells: usize,
    pub symmetric_difference: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SetEquationReport {
    pub k: usize,
    pub cells_per_axis: usize,
    pub letters: Vec<LetterComparison>,
    /// Total symmetric difference over total union, in cells.
    pub ratio: f64,
}

/// Compares each letter subcloud with the union of its `k`-fold contracted
/// and translated images prescribed by the prefix-suffix graph.
pub fn set_equation_check(
    sys: &MBonacciSystem,
    cloud: &FractalCloud,
    k: usize,
    resolution: f64,
    opts: GridCheckOptions,
) -> Result<SetEquationReport> {
    let m = sys.m();
    if cloud.m() != m {
        return Err(Error::InvalidArgument("cloud built for another m".into()));
    }
    let grid = TorusGrid::from_resolution(m - 1, resolution)?;
    check_density(cloud, &grid, opts.density_factor)?;

    let n = cloud.len();
    let contracted: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut c = cloud.raw(i).to_vec();
            for _ in 0..k {
                c = contract(sys, &c);
            }
            c
        })
        .collect();

    let mut letters = Vec::with_capacity(m);
    let (mut sym_total, mut union_total) = (0usize, 0usize);
    for letter in 1..=m as u8 {
        let mut lhs = vec![false; grid.len()];
        for (coords, l) in cloud.iter_coords() {
            if l == letter {
                lhs[grid.cell(coords)] = true;
            }
        }
        let mut rhs = vec![false; grid.len()];
        for walk in walks_from(m, letter, k) {
            let shift = lattice_coords(sys, &walk.translation);
            for (i, c) in contracted.iter().enumerate() {
                if cloud.label(i) != walk.end {
                    continue;
                }
                let p: Vec<f64> = c.iter().zip(&shift).map(|(a, b)| a + b).collect();
                rhs[grid.cell_of_unreduced(&p)] = true;
            }
        }
        let lhs_cells = lhs.iter().filter(|b| **b).count();
        let rhs_cells = rhs.iter().filter(|b| **b).count();
        let sym = lhs.iter().zip(&rhs).filter(|(a, b)| a != b).count();
        let uni = lhs.iter().zip(&rhs).filter(|(a, b)| **a || **b).count();
        sym_total += sym;
        union_total += uni;
        letters.push(LetterComparison {
            letter,
            lhs_cells,
            rhs_cells,
            symmetric_difference: sym,
        });
    }
    let ratio = if union_total == 0 {
        0.0
    } else {
        sym_total as f64 / union_total as f64
    };
    Ok(SetEquationReport {
        k,
        cells_per_axis: grid.cells_per_axis,
        letters,
        ratio,
    })
}

/// Densifies a cloud through the set equation: every point of `R(end)` is
/// contracted `k` times and translated into `R(start)` along each walk.
///
/// Point density grows by roughly `phi^k` while every new point still lies in
/// the subtile named by its label.
pub fn refine_cloud(sys: &MBonacciSystem, cloud: &FractalCloud, k: usize) -> Result<FractalCloud> {
    let m = sys.m();
    if cloud.m() != m {
        return Err(Error::InvalidArgument("cloud built for another m".into()));
    }
    if k == 0 {
        return Ok(cloud.clone());
    }
    let d = m - 1;
    let mut per_letter = vec![0usize; m];
    for &l in cloud.labels() {
        per_letter[l as usize - 1] += 1;
    }
    let walks: Vec<(WalkImage, Vec<f64>)> = (1..=m as u8)
        .flat_map(|start| walks_from(m, start, k))
        .map(|w| {
            let shift = lattice_coords(sys, &w.translation);
            (w, shift)
        })
        .collect();
    let total: usize = walks
        .iter()
        .map(|(w, _)| per_letter[w.end as usize - 1])
        .sum();
    let bytes = total.saturating_mul(1 + 16 * d);
    if bytes > DEFAULT_CLOUD_MEMORY_BUDGET {
        return Err(Error::InvalidArgument(format!(
            "refinement to {total} points needs {bytes} bytes, above the memory budget"
        )));
    }

    let contracted: Vec<f64> = (0..cloud.len())
        .flat_map(|i| {
            let mut c = cloud.raw(i).to_vec();
            for _ in 0..k {
                c = contract(sys, &c);
            }
            c
        })
        .collect();

    let mut labels = Vec::with_capacity(total);
    let mut torus = Vec::with_capacity(total * d);
    let mut raw = Vec::with_capacity(total * d);
    for (walk, shift) in &walks {
        for (i, &l) in cloud.labels().iter().enumerate() {
            if l != walk.end {
                continue;
            }
            labels.push(walk.start);
            for (c, s) in contracted[i * d..(i + 1) * d].iter().zip(shift) {
                let x = c + s;
                raw.push(x);
                torus.push(reduce_unit(x));
            }
        }
    }
    Ok(FractalCloud {
        m,
        labels,
        torus,
        raw,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TilingReport {
    pub cells: usize,
    pub covered_cells: usize,
    pub covered_fraction: f64,
    /// Cells holding points of two or more letters.
    pub overlap_cells: usize,
    pub overlap_fraction: f64,
}

/// Coverage of the torus grid by the cloud and the fraction of cells shared by several letters.
pub fn tiling_check(
    sys: &MBonacciSystem,
    cloud: &FractalCloud,
    resolution: f64,
    opts: GridCheckOptions,
) -> Result<TilingReport> {
    if cloud.m() != sys.m() {
        return Err(Error::InvalidArgument("cloud built for another m".into()));
    }
    let grid = TorusGrid::from_resolution(sys.m() - 1, resolution)?;
    check_density(cloud, &grid, opts.density_factor)?;
    Ok(tiling_on_grid(cloud, &grid))
}

pub(crate) fn tiling_on_grid(cloud: &FractalCloud, grid: &TorusGrid) -> TilingReport {
    let masks = grid.letter_masks(cloud);
    let cells = masks.len();
    let covered_cells = masks.iter().filter(|m| **m != 0).count();
    let overlap_cells = masks.iter().filter(|m| m.count_ones() >= 2).count();
    TilingReport {
        cells,
        covered_cells,
        covered_fraction: covered_cells as f64 / cells as f64,
        overlap_cells,
        overlap_fraction: overlap_cells as f64 / cells as f64,
    }
}
