//! Linear-algebraic backbone: the m-bonacci root, the substitution's incidence
//! matrix and eigenvectors, lattice coordinates on the contracting plane and
//! the rotation conjugacy.
//!
//! All geometry lives in coordinates with respect to the lattice basis
//! `b_i = pi_c(e_1 - e_i)`, `i = 2..m`, where `pi_c` projects along the
//! expanding eigenvector onto the contracting hyperplane. In these
//! coordinates the lattice is `Z^{m-1}` and reduction mod the lattice is
//! reduction mod 1.
//!
//! Derivation of the closed form used by [`lattice_coords`]: the rotation
//! identity gives `pi_c(e_1) = sum_{i>=2} phi^{-i} b_i`, and
//! `pi_c(e_i) = pi_c(e_1) - b_i`. For an integer vector `x`,
//!
//! ```text
//! pi_c(x) = sum_j x_j pi_c(e_j)
//!         = (sum_j x_j) pi_c(e_1) - sum_{i>=2} x_i b_i
//!         = sum_{i>=2} ((sum_j x_j) phi^{-i} - x_i) b_i.
//! ```
//!
//! The same formula is linear in `x` and therefore valid for real vectors.

use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::numeration::MBonacciSystem;

const NEWTON_MAX_ITER: usize = 50;

/// Dominant root of `x^m - x^{m-1} - ... - x - 1` in `(1, 2)`.
///
/// Bisection in `f64` brackets the root, Newton steps in double-double
/// arithmetic refine it. Fails if the characteristic residual cannot be
/// brought below `precision`.
pub fn dominant_root(m: usize, precision: f64) -> Result<TwoFloat> {
    if m < 2 {
        return Err(Error::InvalidOrder(m));
    }
    let p = |x: f64| {
        let mut acc = 1.0;
        for _ in 0..m {
            acc = acc * x - 1.0;
        }
        // acc = x^m - x^{m-1} - ... - 1 via Horner on the coefficients (1, -1, ..., -1)
        acc
    };
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut x = TwoFloat::from(0.5 * (lo + hi));
    let mut residual = char_residual(m, x);
    for _ in 0..NEWTON_MAX_ITER {
        let (value, slope) = char_poly_and_derivative(m, x);
        let step = value / slope;
        x -= step;
        let next = char_residual(m, x);
        let small_step = step.abs() <= TwoFloat::from(1e-33) * x;
        residual = next;
        if small_step {
            break;
        }
    }
    if residual.is_nan() || residual > precision {
        return Err(Error::NonConvergence {
            residual,
            tolerance: precision,
        });
    }
    Ok(x)
}

fn char_poly_and_derivative(m: usize, x: TwoFloat) -> (TwoFloat, TwoFloat) {
    let one = TwoFloat::from(1.0);
    let mut value = one;
    let mut slope = TwoFloat::from(0.0);
    for _ in 0..m {
        slope = slope * x + value;
        value = value * x - one;
    }
    (value, slope)
}

/// `|phi^m - (phi^{m-1} + ... + 1)|` evaluated at double-double precision.
pub fn char_residual(m: usize, x: TwoFloat) -> f64 {
    let (value, _) = char_poly_and_derivative(m, x);
    let v = value.hi() + value.lo();
    v.abs()
}

/// The substitution `1 -> 12, 2 -> 13, ..., m-1 -> 1m, m -> 1` with its incidence matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionData {
    pub m: usize,
    /// `images[j - 1]` is the image of letter `j`.
    pub images: Vec<Vec<u8>>,
    /// `incidence[i][j]` counts letter `i + 1` in the image of letter `j + 1`.
    pub incidence: Vec<Vec<u64>>,
}

impl SubstitutionData {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidOrder(m));
        }
        let images = substitution_images(m);
        let mut incidence = vec![vec![0u64; m]; m];
        for (j, image) in images.iter().enumerate() {
            for &letter in image {
                incidence[letter as usize - 1][j] += 1;
            }
        }
        Ok(Self {
            m,
            images,
            incidence,
        })
    }

    /// Image of a single letter.
    pub fn image(&self, letter: u8) -> &[u8] {
        &self.images[letter as usize - 1]
    }
}

fn substitution_images(m: usize) -> Vec<Vec<u8>> {
    (1..=m)
        .map(|i| {
            if i < m {
                vec![1, (i + 1) as u8]
            } else {
                vec![1]
            }
        })
        .collect()
}

/// Letter-count vector of a word over `{1, ..., m}`.
pub fn abelianize(m: usize, word: &[u8]) -> Vec<i64> {
    let mut counts = vec![0i64; m];
    for &letter in word {
        counts[letter as usize - 1] += 1;
    }
    counts
}

/// Incidence matrix `B[i][j] = |sigma(j)|_i` (zero-based indices).
pub fn incidence_matrix(m: usize) -> Result<Vec<Vec<u64>>> {
    Ok(SubstitutionData::new(m)?.incidence)
}

/// Multiplies an integer vector by the incidence matrix.
pub fn apply_incidence(x: &[i64]) -> Vec<i64> {
    // B e_j = e_1 + e_{j+1} for j < m, B e_m = e_1
    let m = x.len();
    let mut y = vec![0i64; m];
    y[0] = x.iter().sum();
    for j in 0..m - 1 {
        y[j + 1] += x[j];
    }
    y
}

/// Dominant eigendata of the incidence matrix.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub m: usize,
    pub phi: f64,
    /// Right eigenvector normalized to unit sum, `u_i = phi^{-i}`.
    pub u: Vec<f64>,
    /// Left eigenvector normalized to unit sum.
    pub v: Vec<f64>,
    /// `(phi^{-2}, ..., phi^{-m})`.
    pub rotation_vector: Vec<f64>,
}

impl SpectralData {
    pub fn new(sys: &MBonacciSystem) -> Self {
        let m = sys.m();
        let phi = sys.phi_f64();
        let u: Vec<f64> = (1..=m).map(|i| sys.phi_neg_pow_f64(i)).collect();
        // v^T B = phi v^T reads phi v_j = v_1 + v_{j+1} (j < m), phi v_m = v_1
        let mut v = vec![0.0; m];
        v[0] = 1.0;
        v[m - 1] = 1.0 / phi;
        for j in (1..m - 1).rev() {
            v[j] = (1.0 + v[j + 1]) / phi;
        }
        let total: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= total);
        let rotation_vector = (2..=m).map(|i| sys.phi_neg_pow_f64(i)).collect();
        Self {
            m,
            phi,
            u,
            v,
            rotation_vector,
        }
    }
}

/// Projection of an ambient vector along `u` onto `v^perp`.
///
/// Used only to cross-check the lattice-coordinate model in ambient space.
pub fn ambient_projection(spec: &SpectralData, x: &[f64]) -> Vec<f64> {
    let vx: f64 = spec.v.iter().zip(x).map(|(a, b)| a * b).sum();
    let vu: f64 = spec.v.iter().zip(&spec.u).map(|(a, b)| a * b).sum();
    let t = vx / vu;
    x.iter().zip(&spec.u).map(|(xi, ui)| xi - t * ui).collect()
}

/// Coordinates of `pi_c(x)` in the lattice basis, for an integer vector `x`.
///
/// `c_{i-1} = (sum_j x_j) phi^{-i} - x_i` for `i = 2..m`.
pub fn lattice_coords(sys: &MBonacciSystem, x: &[i64]) -> Vec<f64> {
    let m = sys.m();
    assert_eq!(x.len(), m, "vector length must equal m");
    let total = TwoFloat::from(x.iter().sum::<i64>());
    (2..=m)
        .map(|i| {
            let c = total * sys.phi_neg_pow(i) - TwoFloat::from(x[i - 1]);
            c.hi() + c.lo()
        })
        .collect()
}

/// Real-vector version of [`lattice_coords`].
pub fn lattice_coords_real(sys: &MBonacciSystem, x: &[f64]) -> Vec<f64> {
    let m = sys.m();
    assert_eq!(x.len(), m, "vector length must equal m");
    let total: f64 = x.iter().sum();
    (2..=m)
        .map(|i| total * sys.phi_neg_pow_f64(i) - x[i - 1])
        .collect()
}

/// Action of the incidence matrix on the contracting plane, in lattice coordinates.
pub fn contract(sys: &MBonacciSystem, c: &[f64]) -> Vec<f64> {
    let m = sys.m();
    assert_eq!(c.len(), m - 1, "coordinate length must equal m - 1");
    // representative sum_i c_{i-1} (e_1 - e_i) in R^m
    let mut x = vec![0.0; m];
    x[0] = c.iter().sum();
    for i in 1..m {
        x[i] = -c[i - 1];
    }
    let mut y = vec![0.0; m];
    y[0] = x.iter().sum();
    for j in 0..m - 1 {
        y[j + 1] += x[j];
    }
    lattice_coords_real(sys, &y)
}

/// A point of the torus `R^{m-1} / Z^{m-1}`, every coordinate in `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn zero(dim: usize) -> Self {
        Self {
            coords: vec![0.0; dim],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Max-norm distance on the torus.
    pub fn distance(&self, other: &TorusPoint) -> f64 {
        torus_distance(&self.coords, &other.coords)
    }

    /// Sum with another point, reduced.
    pub fn add(&self, other: &TorusPoint) -> TorusPoint {
        let c: Vec<f64> = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        torus_reduce(&c)
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

/// Max-norm torus distance between two coordinate vectors.
pub fn torus_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).rem_euclid(1.0);
            d.min(1.0 - d)
        })
        .fold(0.0, f64::max)
}

/// Reduces a single coordinate into `[0, 1)`; a result of exactly 1.0 maps to 0.0.
#[inline]
pub fn reduce_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Reduces coordinates modulo `Z^{m-1}`.
pub fn torus_reduce(c: &[f64]) -> TorusPoint {
    TorusPoint {
        coords: c.iter().map(|&x| reduce_unit(x)).collect(),
    }
}

fn frac_dd(x: TwoFloat) -> f64 {
    let f = x - x.floor();
    reduce_unit(f.hi() + f.lo())
}

/// `frac(n * (phi^{-2}, ..., phi^{-m}))`, computed per `n` at double-double precision.
pub fn rotation_block(sys: &MBonacciSystem, n: u64) -> Vec<f64> {
    let nn = TwoFloat::from(n);
    (2..=sys.m())
        .map(|i| frac_dd(nn * sys.phi_neg_pow(i)))
        .collect()
}

/// Point `n` of the product rotation `prod_i (n gamma_i + offset_i) mod 1`.
pub fn rotation_point(
    systems: &[MBonacciSystem],
    n: u64,
    offsets: &[TorusPoint],
) -> Result<TorusPoint> {
    if systems.len() != offsets.len() {
        return Err(Error::InvalidArgument(format!(
            "{} systems but {} offsets",
            systems.len(),
            offsets.len()
        )));
    }
    let nn = TwoFloat::from(n);
    let mut coords = Vec::new();
    for (sys, off) in systems.iter().zip(offsets) {
        if off.dim() != sys.m() - 1 {
            return Err(Error::InvalidArgument(format!(
                "offset of dimension {} for m = {}",
                off.dim(),
                sys.m()
            )));
        }
        for (i, o) in (2..=sys.m()).zip(off.coords()) {
            let x = nn * sys.phi_neg_pow(i) + TwoFloat::from(*o);
            coords.push(frac_dd(x));
        }
    }
    Ok(TorusPoint { coords })
}
