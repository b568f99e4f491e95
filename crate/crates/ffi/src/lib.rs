//! C ABI over the `ellstat` library.
//!
//! Every function returns an [`EllstatStatus`]; on failure the message is kept
//! per thread and can be copied out with [`ellstat_last_error`]. Handles are
//! opaque and must be released with their `_free` function.

use ellstat::census::{dyadic_grid, run_census, CensusConfig, CensusReport, FamilyMode};
use ellstat::constants::{euler_constant, ConstantName};
use ellstat::densities::count_symbol_density;
use ellstat::local::{
    classify_by_valuations, global_invariants, GlobalInvariants, KodairaSymbol, WeierstrassCurve,
};
use ellstat::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EllstatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Degenerate = 3,
    NotMinimal = 4,
    BadAt2Or3 = 5,
    Budget = 6,
    Invariant = 7,
    Overflow = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> EllstatStatus {
    match e {
        Error::Degenerate | Error::Zero => EllstatStatus::Degenerate,
        Error::NotMinimal(_) => EllstatStatus::NotMinimal,
        Error::BadAt2Or3 => EllstatStatus::BadAt2Or3,
        Error::Budget(_) => EllstatStatus::Budget,
        Error::Invariant(_) => EllstatStatus::Invariant,
        _ => EllstatStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (EllstatStatus, String)>) -> EllstatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EllstatStatus::Ok,
        Ok(Err((s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            EllstatStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (EllstatStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (EllstatStatus, String) {
    (EllstatStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (EllstatStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (EllstatStatus::InvalidArgument, "string is not UTF-8".into()))
}

/// Copies `s` plus a terminating NUL; fails without writing when `len` is too small.
unsafe fn write_str(s: &str, buf: *mut c_char, len: usize) -> Result<(), (EllstatStatus, String)> {
    if buf.is_null() {
        return Err(null());
    }
    if s.len() + 1 > len {
        return Err((
            EllstatStatus::BufferTooSmall,
            format!("need {} bytes", s.len() + 1),
        ));
    }
    std::ptr::copy_nonoverlapping(s.as_ptr() as *const c_char, buf, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Copies the last error message of this thread into `buf`; returns the
/// number of bytes the full message needs, including the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ellstat_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = e.len().min(len - 1);
            std::ptr::copy_nonoverlapping(e.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        e.len() + 1
    })
}

/// A classified curve with good reduction at 2 and 3.
pub struct EllstatCurve {
    curve: WeierstrassCurve,
    inv: GlobalInvariants,
}

/// Plain global invariants. `d` carries the sign of the discriminant.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct EllstatInvariants {
    pub delta: i64,
    pub conductor: i64,
    pub index: i64,
    pub q: i64,
    pub d: i64,
    pub bad_primes: u32,
}

/// Classifies `y^2 = x^3 + ax + b`; `*out` receives a handle on success.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ellstat_curve_new(
    a: i64,
    b: i64,
    out: *mut *mut EllstatCurve,
) -> EllstatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let curve = WeierstrassCurve::from_i64(a, b).map_err(lib_err)?;
        let inv = global_invariants(&curve).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(EllstatCurve { curve, inv }));
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a handle from [`ellstat_curve_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ellstat_curve_free(c: *mut EllstatCurve) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ellstat_curve_invariants(
    c: *const EllstatCurve,
    out: *mut EllstatInvariants,
) -> EllstatStatus {
    guard(|| {
        let (c, out) = (c.as_ref().ok_or_else(null)?, out.as_mut().ok_or_else(null)?);
        let fit = |x: &num_bigint::BigInt| {
            i64::try_from(x).map_err(|_| (EllstatStatus::Overflow, format!("{x} exceeds 64 bits")))
        };
        *out = EllstatInvariants {
            delta: fit(&c.inv.delta)?,
            conductor: fit(&c.inv.conductor)?,
            index: fit(&c.inv.index)?,
            q: fit(&c.inv.q)?,
            d: fit(&c.inv.d)?,
            bad_primes: c.inv.local.len() as u32,
        };
        Ok(())
    })
}

/// Kodaira symbol at a prime `p >= 5`, e.g. `"I1"` or `"IV*"`, written to `buf`.
///
/// # Safety
/// `c` must be a live handle and `buf` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ellstat_curve_symbol(
    c: *const EllstatCurve,
    p: u64,
    buf: *mut c_char,
    len: usize,
) -> EllstatStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(null)?;
        let s = classify_by_valuations(&c.curve, p).map_err(lib_err)?;
        write_str(&s.to_string(), buf, len)
    })
}

/// Density of a reduction type at `p` as `"num/den"`.
///
/// # Safety
/// `symbol` must be a NUL-terminated string and `buf` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ellstat_symbol_density(
    p: u64,
    symbol: *const c_char,
    buf: *mut c_char,
    len: usize,
) -> EllstatStatus {
    guard(|| {
        let t: KodairaSymbol = read_str(symbol)?.parse().map_err(lib_err)?;
        let r = count_symbol_density(p, t, None).map_err(lib_err)?;
        if !r.matches {
            return Err((
                EllstatStatus::Invariant,
                format!("count {} disagrees with {}", r.density, r.expected),
            ));
        }
        write_str(&r.density.to_string(), buf, len)
    })
}

/// Certified enclosure `[lo, hi]` of a named constant (`sf+`, `sf-`, `sf`,
/// `kappa+`, `kappa-`, `kappa`, `generic`), rounded outward to doubles.
///
/// # Safety
/// `name` must be a NUL-terminated string; `lo` and `hi` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ellstat_constant(
    name: *const c_char,
    p0: u64,
    lo: *mut f64,
    hi: *mut f64,
) -> EllstatStatus {
    guard(|| {
        let n: ConstantName = read_str(name)?.parse().map_err(lib_err)?;
        let (lo, hi) = (lo.as_mut().ok_or_else(null)?, hi.as_mut().ok_or_else(null)?);
        let c = euler_constant(n, p0, 128).map_err(lib_err)?;
        let (l, h) = (c.value.lo_f64(), c.value.hi_f64());
        *lo = l - l.abs() * f64::EPSILON;
        *hi = h + h.abs() * f64::EPSILON;
        Ok(())
    })
}

/// A finished census.
pub struct EllstatCensus {
    report: CensusReport,
}

/// Runs a census on the dyadic grid up to `x_max`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ellstat_census_run(
    x_max: u64,
    kappa: f64,
    full_tables: bool,
    index_cap: u64,
    out: *mut *mut EllstatCensus,
) -> EllstatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let mut cfg = CensusConfig::dyadic(x_max, kappa);
        cfg.grid = dyadic_grid(x_max);
        cfg.index_cap = index_cap;
        if full_tables {
            cfg.mode = FamilyMode::FullTables;
        }
        let report = run_census(&cfg).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(EllstatCensus { report }));
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a handle from [`ellstat_census_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ellstat_census_free(c: *mut EllstatCensus) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of grid points.
///
/// # Safety
/// `c` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ellstat_census_grid_len(
    c: *const EllstatCensus,
    out: *mut usize,
) -> EllstatStatus {
    guard(|| {
        *out.as_mut().ok_or_else(null)? = c.as_ref().ok_or_else(null)?.report.grid.len();
        Ok(())
    })
}

/// Count of `family` (e.g. `"E_sf"`) with conductor below grid point `i`.
///
/// # Safety
/// `c` must be a live handle, `family` NUL-terminated, `x` and `count` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ellstat_census_count(
    c: *const EllstatCensus,
    family: *const c_char,
    i: usize,
    x: *mut u64,
    count: *mut u64,
) -> EllstatStatus {
    guard(|| {
        let r = &c.as_ref().ok_or_else(null)?.report;
        let name = read_str(family)?;
        let f = r
            .families
            .get(name)
            .ok_or_else(|| (EllstatStatus::InvalidArgument, format!("no family {name}")))?;
        let (xv, cv) = match (r.grid.get(i), f.counts.get(i)) {
            (Some(a), Some(b)) => (*a, *b),
            _ => {
                return Err((
                    EllstatStatus::InvalidArgument,
                    format!("grid index {i} out of range"),
                ))
            }
        };
        *x.as_mut().ok_or_else(null)? = xv;
        *count.as_mut().ok_or_else(null)? = cv;
        Ok(())
    })
}

/// The full report as JSON.
///
/// # Safety
/// `c` must be a live handle and `buf` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ellstat_census_json(
    c: *const EllstatCensus,
    buf: *mut c_char,
    len: usize,
) -> EllstatStatus {
    guard(|| {
        let r = &c.as_ref().ok_or_else(null)?.report;
        let s = serde_json::to_string(r).map_err(|e| (EllstatStatus::Invariant, e.to_string()))?;
        write_str(&s, buf, len)
    })
}
