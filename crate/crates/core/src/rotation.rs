//! The sequence side: van der Corput and Halton values, the interval
//! partitions `C_k`, subtile membership by digits and local discrepancies.

use rayon::prelude::*;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::numeration::{is_admissible, MBonacciSystem};
use crate::rauzy::{enumerate_addresses, fixed_point_prefix, SubtileAddress};
use crate::spectral::{abelianize, contract, lattice_coords, torus_reduce, TorusPoint};

/// Default cap on the level used by [`local_discrepancy`].
pub const DEFAULT_LEVEL_CAP: usize = 10;

/// Prefix length used to pick the reference point of [`default_offset`].
const OFFSET_REFERENCE_DEPTH: usize = 4096;

/// `V(n) = sum_j eps_j(n) phi^{-j-1}`, summed from the most significant digit down.
pub fn vdc(sys: &MBonacciSystem, n: u64) -> Result<f64> {
    let e = sys.encode(n)?;
    Ok(e.digits()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, d)| **d == 1)
        .map(|(j, _)| sys.phi_neg_pow_f64(j + 1))
        .sum())
}

/// Halton configuration: one system per coordinate, orders pairwise distinct.
#[derive(Clone, Debug)]
pub struct HaltonConfig {
    systems: Vec<MBonacciSystem>,
    offsets: Vec<TorusPoint>,
}

impl HaltonConfig {
    pub fn new(systems: Vec<MBonacciSystem>) -> Result<Self> {
        if systems.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one base is required".into(),
            ));
        }
        for (i, a) in systems.iter().enumerate() {
            if systems[..i].iter().any(|b| b.m() == a.m()) {
                return Err(Error::InvalidArgument(format!(
                    "orders must be pairwise distinct, {} repeats",
                    a.m()
                )));
            }
        }
        let offsets = systems
            .iter()
            .map(|s| TorusPoint::zero(s.m() - 1))
            .collect();
        Ok(Self { systems, offsets })
    }

    /// Builds systems for the given orders, each covering `n <= max_n`.
    pub fn from_orders(ms: &[usize], max_n: u64) -> Result<Self> {
        let systems = ms
            .iter()
            .map(|&m| MBonacciSystem::with_max(m, max_n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(systems)
    }

    /// Replaces the rotation offsets, one per system.
    pub fn with_offsets(mut self, offsets: Vec<TorusPoint>) -> Result<Self> {
        if offsets.len() != self.systems.len()
            || offsets
                .iter()
                .zip(&self.systems)
                .any(|(o, s)| o.dim() != s.m() - 1)
        {
            return Err(Error::InvalidArgument(
                "offset shapes do not match systems".into(),
            ));
        }
        self.offsets = offsets;
        Ok(self)
    }

    pub fn systems(&self) -> &[MBonacciSystem] {
        &self.systems
    }

    pub fn offsets(&self) -> &[TorusPoint] {
        &self.offsets
    }

    pub fn dims(&self) -> usize {
        self.systems.len()
    }
}

/// `H(n) = (V_1(n), ..., V_s(n))`.
pub fn halton(cfg: &HaltonConfig, n: u64) -> Result<Vec<f64>> {
    cfg.systems.iter().map(|s| vdc(s, n)).collect()
}

/// First `count` Halton points.
pub fn halton_points(cfg: &HaltonConfig, count: usize) -> Result<Vec<Vec<f64>>> {
    (0..count as u64)
        .into_par_iter()
        .map(|n| halton(cfg, n))
        .collect()
}

/// An interval of the partition `C_k`:
/// `[mu_k / phi^k, (mu_k + phi^r - sum_{i<r} phi^i) / phi^k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CkInterval {
    pub k: usize,
    pub r: usize,
    /// `sum_{j<k} eps_{k-1-j} phi^j`.
    pub mu_k: f64,
    pub left: f64,
    pub right: f64,
}

impl CkInterval {
    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    /// Membership with a guard band of `tol` on both ends.
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.left - tol && x < self.right + tol
    }
}

/// `phi^{-k} (phi^r - sum_{i<r} phi^i)`, the length of a level-`k` interval ending a run of `r` ones.
pub fn interval_length(sys: &MBonacciSystem, k: usize, r: usize) -> f64 {
    let phi = sys.phi();
    let mut power = TwoFloat::from(1.0);
    let mut lower = TwoFloat::from(0.0);
    for _ in 0..r {
        lower += power;
        power *= phi;
    }
    let len = sys.phi_neg_pow(k) * (power - lower);
    len.hi() + len.lo()
}

/// The interval of `C_k` that contains `V(n)`.
pub fn interval_for(sys: &MBonacciSystem, n: u64, k: usize) -> Result<CkInterval> {
    let e = sys.encode(n)?;
    let r = e.trailing_ones_before(k);
    // mu_k / phi^k = sum_{j<k} eps_j phi^{-j-1}
    let mut left = TwoFloat::from(0.0);
    for j in (0..k.min(e.len())).rev() {
        if e.digit(j as isize) == 1 {
            left += sys.phi_neg_pow(j + 1);
        }
    }
    let phi = sys.phi_f64();
    let mu = (0..k).fold(0.0, |acc, j| acc * phi + e.digit(j as isize) as f64);
    let left = left.hi() + left.lo();
    let right = left + interval_length(sys, k, r);
    Ok(CkInterval {
        k,
        r,
        mu_k: mu,
        left,
        right,
    })
}

/// The `F_k` intervals of `C_k`, sorted by left endpoint.
pub fn partition_ck(sys: &MBonacciSystem, k: usize) -> Result<Vec<CkInterval>> {
    let fk = *sys.basis().get(k).ok_or(Error::InvalidArgument(format!(
        "F_{k} is beyond the basis of this system"
    )))?;
    if fk - 1 > sys.max_n() {
        return Err(Error::OutOfRange {
            n: fk - 1,
            max: sys.max_n(),
        });
    }
    let mut out = (0..fk)
        .map(|n| interval_for(sys, n, k))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.left.total_cmp(&b.left));
    Ok(out)
}

/// `L` with `F_{L-1} <= N - 1 < F_L` (and `L = 0` for `N = 1`).
pub fn level_for_count(sys: &MBonacciSystem, count: u64) -> Result<usize> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    if count - 1 > sys.max_n() {
        return Err(Error::OutOfRange {
            n: count - 1,
            max: sys.max_n(),
        });
    }
    Ok(sys.basis().iter().take_while(|&&f| f < count).count())
}

/// Unreduced lattice coordinates of the shift used by [`default_offset`].
///
/// A fixed reference point of the letter-1 subtile (the first fixed-point
/// prefix past index 2048 followed by letter 1) is contracted `M = max(k, L)`
/// times, landing in `B^M R(1)`.
pub fn default_offset_raw(sys: &MBonacciSystem, k: usize, count: u64) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let levels = level_for_count(sys, count)?.max(k);
    let m = sys.m();
    let word = fixed_point_prefix(m, OFFSET_REFERENCE_DEPTH)?;
    let start = OFFSET_REFERENCE_DEPTH / 2;
    let n = (start..OFFSET_REFERENCE_DEPTH)
        .find(|&i| word[i] == 1)
        .expect("letter 1 has positive frequency");
    let mut c = lattice_coords(sys, &abelianize(m, &word[..n]));
    for _ in 0..levels {
        c = contract(sys, &c);
    }
    Ok(c)
}

/// Deterministic rotation offset for level `k` and sample count `count`.
pub fn default_offset(sys: &MBonacciSystem, k: usize, count: u64) -> Result<TorusPoint> {
    Ok(torus_reduce(&default_offset_raw(sys, k, count)?))
}

fn validate_address(sys: &MBonacciSystem, addr: &SubtileAddress) -> Result<()> {
    let m = sys.m();
    if addr.digits.len() != addr.level || !is_admissible(m, &addr.digits)? {
        return Err(Error::InvalidArgument("address digits invalid".into()));
    }
    let r = addr.digits.iter().rev().take_while(|d| **d == 1).count();
    if r != addr.r || !addr.allowed_letters(m).contains(&addr.letter) {
        return Err(Error::InvalidArgument("address letter invalid".into()));
    }
    Ok(())
}

/// True iff point `n` of the rotation lies in the level-`k` subtile `addr`.
///
/// The low `k` digits of `n` must equal the address digits and the digit
/// tail must continue the walk to the address letter, i.e. the run of ones
/// starting at digit `k` has length `letter - 1`.
pub fn membership_oracle(sys: &MBonacciSystem, n: u64, addr: &SubtileAddress) -> Result<bool> {
    validate_address(sys, addr)?;
    let e = sys.encode(n)?;
    let digits_match = addr
        .digits
        .iter()
        .enumerate()
        .all(|(j, d)| e.digit(j as isize) == *d);
    Ok(digits_match && 1 + e.ones_run_from(addr.level) == addr.letter as usize)
}

/// Dense address index of `n` at level `k`, consistent with [`SubtileAddress::index`].
fn address_index(sys: &MBonacciSystem, n: u64, k: usize) -> Result<usize> {
    let e = sys.encode(n)?;
    let bits = e
        .digits()
        .iter()
        .take(k)
        .enumerate()
        .fold(0usize, |acc, (j, d)| acc | ((*d as usize) << j));
    Ok(bits * sys.m() + e.ones_run_from(k))
}

/// `delta_k = max_S |#{n < N : n in S} / N - lambda(S)|` over level-`k` subtiles.
pub fn local_discrepancy(sys: &MBonacciSystem, k: usize, count: u64) -> Result<f64> {
    local_discrepancy_capped(sys, k, count, DEFAULT_LEVEL_CAP)
}

pub fn local_discrepancy_capped(
    sys: &MBonacciSystem,
    k: usize,
    count: u64,
    cap: usize,
) -> Result<f64> {
    if k > cap {
        return Err(Error::LevelAboveCap { k, cap });
    }
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    if count - 1 > sys.max_n() {
        return Err(Error::OutOfRange {
            n: count - 1,
            max: sys.max_n(),
        });
    }
    let m = sys.m();
    let size = (1usize << k) * m;
    let counts = (0..count)
        .into_par_iter()
        .fold(
            || vec![0u64; size],
            |mut acc, n| {
                let idx = address_index(sys, n, k).expect("n within coverage");
                acc[idx] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let total = count as f64;
    let delta = enumerate_addresses(m, k)?
        .iter()
        .map(|a| (counts[a.index(m)] as f64 / total - a.measure(sys)).abs())
        .fold(0.0, f64::max);
    Ok(delta.min(1.0))
}
