//! C interface to `betahalton`.
//!
//! Every function returns a [`BhStatus`]; results are written through out
//! pointers. On failure a message is kept per thread and can be read with
//! [`bh_last_error_message`]. Handles are created by `*_new` and released by
//! the matching `*_free`.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use betahalton::discrepancy;
use betahalton::rotation::{self, HaltonConfig};
use betahalton::spectral::dominant_root;
use betahalton::{Error, Expansion, MBonacciSystem};

/// Status codes returned by every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BhStatus {
    Ok = 0,
    InvalidArgument = 1,
    OutOfRange = 2,
    Overflow = 3,
    Inadmissible = 4,
    NonConvergence = 5,
    EmptyInput = 6,
    PointOutOfRange = 7,
    BudgetExceeded = 8,
    NullPointer = 9,
    BufferTooSmall = 10,
    Internal = 11,
}

/// Opaque m-bonacci numeration system.
pub struct BhSystem(MBonacciSystem);

/// Opaque Halton sequence configuration.
pub struct BhHalton(HaltonConfig);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> BhStatus {
    match e {
        Error::InvalidOrder(_) | Error::InvalidArgument(_) | Error::NonBinaryDigit { .. } => {
            BhStatus::InvalidArgument
        }
        Error::Overflow { .. } => BhStatus::Overflow,
        Error::OutOfRange { .. } | Error::LevelAboveCap { .. } => BhStatus::OutOfRange,
        Error::Inadmissible { .. } => BhStatus::Inadmissible,
        Error::NonConvergence { .. } => BhStatus::NonConvergence,
        Error::EmptyInput => BhStatus::EmptyInput,
        Error::PointOutOfRange { .. } => BhStatus::PointOutOfRange,
        Error::BudgetExceeded { .. } => BhStatus::BudgetExceeded,
        _ => BhStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (BhStatus, String)>) -> BhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            BhStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BhStatus::Internal
        }
    }
}

fn lib<T>(r: betahalton::Result<T>) -> Result<T, (BhStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (BhStatus, String) {
    (BhStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (BhStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, v: T, what: &str) -> Result<(), (BhStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (BhStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

/// Creates a system of order `m` covering `0 <= n <= max_n`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bh_system_new(m: usize, max_n: u64, out: *mut *mut BhSystem) -> BhStatus {
    guard(|| {
        let sys = lib(MBonacciSystem::with_max(m, max_n))?;
        write(out, Box::into_raw(Box::new(BhSystem(sys))), "out")
    })
}

/// Releases a system; null is ignored.
///
/// # Safety
/// `sys` must come from [`bh_system_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bh_system_free(sys: *mut BhSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Largest `n` the system can expand.
///
/// # Safety
/// `sys` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bh_system_max_n(sys: *const BhSystem, out: *mut u64) -> BhStatus {
    guard(|| {
        let s = deref(sys, "sys")?;
        write(out, s.0.max_n(), "out")
    })
}

/// Dominant root of `x^m - x^{m-1} - ... - 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bh_dominant_root(m: usize, out: *mut f64) -> BhStatus {
    guard(|| {
        let r = lib(dominant_root(m, betahalton::numeration::DEFAULT_PRECISION))?;
        write(out, r.hi() + r.lo(), "out")
    })
}

/// Greedy digits of `n`, least significant first, into `digits[0..cap]`.
///
/// `len` receives the digit count. When `cap` is too small nothing is
/// copied, `len` still receives the required size and
/// `BufferTooSmall` is returned.
///
/// # Safety
/// `sys` must be live, `digits` valid for `cap` writes, `len` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bh_encode(
    sys: *const BhSystem,
    n: u64,
    digits: *mut u8,
    cap: usize,
    len: *mut usize,
) -> BhStatus {
    guard(|| {
        let s = deref(sys, "sys")?;
        let e = lib(s.0.encode(n))?;
        write(len, e.len(), "len")?;
        if e.len() > cap {
            return Err((
                BhStatus::BufferTooSmall,
                format!("{} digits do not fit in {cap}", e.len()),
            ));
        }
        if !e.is_empty() {
            if digits.is_null() {
                return Err(null("digits"));
            }
            slice::from_raw_parts_mut(digits, e.len()).copy_from_slice(e.digits());
        }
        Ok(())
    })
}

/// Value of a digit string, least significant first.
///
/// # Safety
/// `sys` must be live, `digits` valid for `len` reads, `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bh_decode(
    sys: *const BhSystem,
    digits: *const u8,
    len: usize,
    out: *mut u64,
) -> BhStatus {
    guard(|| {
        let s = deref(sys, "sys")?;
        let d = input(digits, len, "digits")?;
        let e = lib(Expansion::new(d.to_vec()))?;
        write(out, lib(s.0.decode(&e))?, "out")
    })
}

/// Van der Corput value of `n`.
///
/// # Safety
/// `sys` must be live and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bh_vdc(sys: *const BhSystem, n: u64, out: *mut f64) -> BhStatus {
    guard(|| {
        let s = deref(sys, "sys")?;
        write(out, lib(rotation::vdc(&s.0, n))?, "out")
    })
}

/// Halton configuration for `dims` pairwise distinct orders, covering `n <= max_n`.
///
/// # Safety
/// `ms` must be valid for `dims` reads and `out` for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bh_halton_new(
    ms: *const usize,
    dims: usize,
    max_n: u64,
    out: *mut *mut BhHalton,
) -> BhStatus {
    guard(|| {
        let ms = input(ms, dims, "ms")?;
        let cfg = lib(HaltonConfig::from_orders(ms, max_n))?;
        write(out, Box::into_raw(Box::new(BhHalton(cfg))), "out")
    })
}

/// Releases a Halton handle; null is ignored.
///
/// # Safety
/// `h` must come from [`bh_halton_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bh_halton_free(h: *mut BhHalton) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of coordinates of a Halton point.
///
/// # Safety
/// `h` must be live and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bh_halton_dims(h: *const BhHalton, out: *mut usize) -> BhStatus {
    guard(|| {
        let h = deref(h, "h")?;
        write(out, h.0.dims(), "out")
    })
}

/// Writes Halton point `n` into `point[0..cap]`; `cap` must be at least the dimension.
///
/// # Safety
/// `h` must be live and `point` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn bh_halton_point(
    h: *const BhHalton,
    n: u64,
    point: *mut f64,
    cap: usize,
) -> BhStatus {
    guard(|| {
        let h = deref(h, "h")?;
        if cap < h.0.dims() {
            return Err((
                BhStatus::BufferTooSmall,
                format!("point has {} coordinates, buffer holds {cap}", h.0.dims()),
            ));
        }
        let p = lib(rotation::halton(&h.0, n))?;
        if point.is_null() {
            return Err(null("point"));
        }
        slice::from_raw_parts_mut(point, p.len()).copy_from_slice(&p);
        Ok(())
    })
}

/// Exact star discrepancy of `n` values in `[0, 1)`.
///
/// # Safety
/// `points` must be valid for `n` reads and `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn bh_star_disc_1d(points: *const f64, n: usize, out: *mut f64) -> BhStatus {
    guard(|| {
        let p = input(points, n, "points")?;
        write(out, lib(discrepancy::star_disc_1d(p))?, "out")
    })
}

/// Exact star discrepancy of `n` points of dimension `s >= 2`, stored row-major.
///
/// # Safety
/// `points` must be valid for `n * s` reads and `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn bh_star_disc_multi(
    points: *const f64,
    n: usize,
    s: usize,
    out: *mut f64,
) -> BhStatus {
    guard(|| {
        let total = n
            .checked_mul(s)
            .ok_or((BhStatus::InvalidArgument, "n * s overflows".to_string()))?;
        let flat = input(points, total, "points")?;
        let rows: Vec<Vec<f64>> = if s == 0 {
            Vec::new()
        } else {
            flat.chunks_exact(s).map(<[f64]>::to_vec).collect()
        };
        write(out, lib(discrepancy::star_disc_multi(&rows, s))?, "out")
    })
}

/// Decay exponent `max(d_i - (m_i - 1)) / sum(m_i - 1)`.
///
/// # Safety
/// `ms` and `dims` must be valid for `len` reads and `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn bh_theorem_exponent(
    ms: *const usize,
    dims: *const f64,
    len: usize,
    out: *mut f64,
) -> BhStatus {
    guard(|| {
        let ms = input(ms, len, "ms")?;
        let dims = input(dims, len, "dims")?;
        write(out, lib(discrepancy::theorem_exponent(ms, dims))?, "out")
    })
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to fit `cap` bytes. Returns the full message length without
/// the terminator; an empty message means the last call succeeded.
///
/// # Safety
/// `buf` must be valid for `cap` writes, or null with `cap == 0`.
#[no_mangle]
pub unsafe extern "C" fn bh_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            let dst = slice::from_raw_parts_mut(buf as *mut u8, n + 1);
            dst[..n].copy_from_slice(&msg.as_bytes()[..n]);
            dst[n] = 0;
        }
        msg.len()
    })
}
