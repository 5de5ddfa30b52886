//! The m-bonacci linear recurrent number system.
//!
//! Basis terms follow `F_k = 2^k` for `k < m` and `F_k = F_{k-1} + ... + F_{k-m}`
//! afterwards. Every natural number has a unique greedy expansion
//! `n = sum eps_j F_j` whose binary digit string contains no run of `m`
//! consecutive ones. Digits are stored little-endian, so `digits[j]` is the
//! coefficient of `F_j`.

use std::fmt;

use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::spectral;

/// Default tolerance on the characteristic identity `phi^m = phi^{m-1} + ... + 1`.
pub const DEFAULT_PRECISION: f64 = 1e-28;

/// Number of cached negative powers kept beyond the basis length.
const EXTRA_POWERS: usize = 64;

/// Numeration context for one order `m`: exact basis, dominant root and power tables.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct MBonacciSystem {
    m: usize,
    basis: Vec<u64>,
    phi: TwoFloat,
    phi_neg_powers: Vec<TwoFloat>,
    phi_neg_powers_f64: Vec<f64>,
}

impl MBonacciSystem {
    /// Builds the system for order `m`, with basis terms covering every `n <= max_n`.
    pub fn new(m: usize, max_n: u64, precision: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidOrder(m));
        }
        if max_n < 1 {
            return Err(Error::InvalidArgument("max_n must be at least 1".into()));
        }
        let basis = basis_terms(m, max_n)?;
        let phi = spectral::dominant_root(m, precision)?;
        let inv = TwoFloat::from(1.0) / phi;
        let count = basis.len() + EXTRA_POWERS + m;
        let mut phi_neg_powers = Vec::with_capacity(count);
        let mut p = TwoFloat::from(1.0);
        for _ in 0..count {
            phi_neg_powers.push(p);
            p *= inv;
        }
        let phi_neg_powers_f64 = phi_neg_powers.iter().map(|p| p.hi() + p.lo()).collect();
        Ok(Self {
            m,
            basis,
            phi,
            phi_neg_powers,
            phi_neg_powers_f64,
        })
    }

    /// Same as [`MBonacciSystem::new`] with [`DEFAULT_PRECISION`].
    pub fn with_max(m: usize, max_n: u64) -> Result<Self> {
        Self::new(m, max_n, DEFAULT_PRECISION)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Basis terms `F_0, ..., F_K` with `F_K` the first term exceeding `max_n`.
    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    /// Largest `n` this system can encode.
    pub fn max_n(&self) -> u64 {
        self.basis[self.basis.len() - 1] - 1
    }

    /// The m-bonacci number at double-double precision.
    pub fn phi(&self) -> TwoFloat {
        self.phi
    }

    pub fn phi_f64(&self) -> f64 {
        self.phi.hi() + self.phi.lo()
    }

    /// `phi^{-k}` at double-double precision.
    pub fn phi_neg_pow(&self, k: usize) -> TwoFloat {
        match self.phi_neg_powers.get(k) {
            Some(p) => *p,
            None => {
                let last = self.phi_neg_powers.len() - 1;
                let mut p = self.phi_neg_powers[last];
                let inv = self.phi_neg_powers[1];
                for _ in last..k {
                    p *= inv;
                }
                p
            }
        }
    }

    /// `phi^{-k}` rounded to `f64`.
    pub fn phi_neg_pow_f64(&self, k: usize) -> f64 {
        match self.phi_neg_powers_f64.get(k) {
            Some(p) => *p,
            None => {
                let p = self.phi_neg_pow(k);
                p.hi() + p.lo()
            }
        }
    }

    /// Greedy expansion of `n`.
    pub fn encode(&self, n: u64) -> Result<Expansion> {
        if n > self.max_n() {
            return Err(Error::OutOfRange {
                n,
                max: self.max_n(),
            });
        }
        let mut digits = vec![0u8; self.basis.len()];
        let mut rest = n;
        for (j, &f) in self.basis.iter().enumerate().rev() {
            if f <= rest {
                digits[j] = 1;
                rest -= f;
            }
        }
        debug_assert_eq!(rest, 0);
        Ok(Expansion::from_trimmed(digits))
    }

    /// Inverse of [`MBonacciSystem::encode`]; rejects inadmissible strings.
    pub fn decode(&self, e: &Expansion) -> Result<u64> {
        if !is_admissible(self.m, e.digits())? {
            return Err(Error::Inadmissible { m: self.m });
        }
        let mut n: u64 = 0;
        for (j, &d) in e.digits().iter().enumerate() {
            if d == 0 {
                continue;
            }
            let f = *self.basis.get(j).ok_or(Error::OutOfRange {
                n: u64::MAX,
                max: self.max_n(),
            })?;
            n = n.checked_add(f).ok_or(Error::Overflow { index: j })?;
        }
        Ok(n)
    }

    /// `nu_k = sum_{j<k} eps_j F_j`, the value of the lowest `k` digits.
    pub fn low_value(&self, e: &Expansion, k: usize) -> u64 {
        e.digits()
            .iter()
            .take(k)
            .zip(&self.basis)
            .filter(|(d, _)| **d == 1)
            .map(|(_, f)| *f)
            .sum()
    }
}

/// Exact basis terms up to and including the first one exceeding `max_n`.
pub fn basis_terms(m: usize, max_n: u64) -> Result<Vec<u64>> {
    if m < 2 {
        return Err(Error::InvalidOrder(m));
    }
    let mut basis: Vec<u64> = Vec::new();
    loop {
        let k = basis.len();
        let next = if k < m {
            1u64.checked_shl(k as u32)
                .ok_or(Error::Overflow { index: k })?
        } else {
            basis[k - m..]
                .iter()
                .try_fold(0u64, |acc, &f| acc.checked_add(f))
                .ok_or(Error::Overflow { index: k })?
        };
        basis.push(next);
        if next > max_n {
            return Ok(basis);
        }
    }
}

/// Binary digit string of a natural number, little-endian with trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Expansion {
    digits: Vec<u8>,
}

impl Expansion {
    /// Wraps a little-endian digit list. Digits are validated as binary.
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if let Some((position, &digit)) = digits.iter().enumerate().find(|(_, d)| **d > 1) {
            return Err(Error::NonBinaryDigit { position, digit });
        }
        Ok(Self::from_trimmed(digits))
    }

    fn from_trimmed(mut digits: Vec<u8>) -> Self {
        while digits.last() == Some(&0) {
            digits.pop();
        }
        Self { digits }
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Digit `eps_j`; zero beyond the stored length and at negative positions.
    pub fn digit(&self, j: isize) -> u8 {
        if j < 0 {
            return 0;
        }
        self.digits.get(j as usize).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Length `r` of the run of ones ending at position `k - 1`,
    /// i.e. `eps_{k-1} = ... = eps_{k-r} = 1` and `eps_{k-r-1} = 0`.
    pub fn trailing_ones_before(&self, k: usize) -> usize {
        let mut r = 0;
        while r < k && self.digit((k - 1 - r) as isize) == 1 {
            r += 1;
        }
        r
    }

    /// Length of the run of ones starting at position `k` and going upwards.
    pub fn ones_run_from(&self, k: usize) -> usize {
        self.digits.iter().skip(k).take_while(|&&d| d == 1).count()
    }

    /// Digits most-significant-first, `"0"` for the empty expansion.
    pub fn to_msb_string(&self) -> String {
        if self.digits.is_empty() {
            return "0".to_string();
        }
        self.digits
            .iter()
            .rev()
            .map(|d| if *d == 1 { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_msb_string())
    }
}

/// True iff `digits` contains no run of `m` consecutive ones.
pub fn is_admissible(m: usize, digits: &[u8]) -> Result<bool> {
    let mut run = 0;
    for (position, &digit) in digits.iter().enumerate() {
        match digit {
            0 => run = 0,
            1 => {
                run += 1;
                if run >= m {
                    return Ok(false);
                }
            }
            _ => return Err(Error::NonBinaryDigit { position, digit }),
        }
    }
    Ok(true)
}
