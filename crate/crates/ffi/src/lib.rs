//! C interface to `groupcode`.
//!
//! Every function returns a [`GcStatus`]; on failure `gc_last_error` gives a
//! message for the calling thread. Codes are opaque [`GcCode`] handles
//! released with `gc_code_free`. Array getters follow one pattern: they
//! write at most `len` values to `buf` and always store the full length in
//! `*needed`, returning `GC_STATUS_BUFFER_TOO_SMALL` when `len` is short.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use groupcode::code::{min_distance, CodeRecord, InitialVector};
use groupcode::ivp::optimal_initial_vector;
use groupcode::lattice::{
    group_elements, lattice_from_generators, EnumerationOptions, GroupElementTable,
};
use groupcode::search::{count_estimates, search_optimum, SearchOptions, SearchParams};
use groupcode::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Numerical = 3,
    Internal = 4,
    BufferTooSmall = 5,
}

/// Opaque handle to a found code.
pub struct GcCode {
    record: CodeRecord,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GcCountEstimates {
    pub order: u64,
    pub dim: u32,
    /// `C(M/2, n/2)`, or 0 on overflow.
    pub binomial: u64,
    /// `floor((M/2)^k / phi(M))`, or 0 on overflow.
    pub adam_estimate: u64,
    pub tested_cyclic: u64,
    pub tested_commutative: u64,
    pub raw_count: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GcStatus {
    match e {
        Error::NumericalFailure(_) => GcStatus::Numerical,
        Error::Internal(_) => GcStatus::Internal,
        _ => GcStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (GcStatus, String)>) -> GcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GcStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("panic inside groupcode");
            GcStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (GcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (GcStatus, String) {
    (GcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn code_ref<'a>(code: *const GcCode) -> Result<&'a GcCode, (GcStatus, String)> {
    code.as_ref().ok_or_else(|| null("code"))
}

unsafe fn write_array<T: Copy>(
    values: &[T],
    buf: *mut T,
    len: usize,
    needed: *mut usize,
) -> Result<(), (GcStatus, String)> {
    if needed.is_null() {
        return Err(null("needed"));
    }
    *needed = values.len();
    if len < values.len() {
        return Err((
            GcStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", values.len()),
        ));
    }
    if !values.is_empty() {
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    }
    Ok(())
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gc_version() -> *const c_char {
    const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Best code of order `order` in even dimension `dim`. `threads = 0` uses
/// the default pool.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn gc_search(
    order: u64,
    dim: u32,
    threads: u32,
    out: *mut *mut GcCode,
) -> GcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let params = SearchParams::new(order, dim as usize).with_options(SearchOptions {
            threads: (threads > 0).then_some(threads as usize),
            keep_all: false,
            enumeration: EnumerationOptions::default(),
        });
        let record = search_optimum(&params).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(GcCode { record }));
        Ok(())
    })
}

/// # Safety
/// `code` must come from `gc_search` and not be freed; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gc_code_min_distance(code: *const GcCode, out: *mut f64) -> GcStatus {
    guard(|| {
        let c = code_ref(code)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = c.record.min_distance;
        Ok(())
    })
}

/// Raw and tested candidate counts of the search that produced `code`.
///
/// # Safety
/// As for `gc_code_min_distance`.
#[no_mangle]
pub unsafe extern "C" fn gc_code_counts(
    code: *const GcCode,
    raw: *mut u64,
    tested: *mut u64,
) -> GcStatus {
    guard(|| {
        let c = code_ref(code)?;
        if raw.is_null() || tested.is_null() {
            return Err(null("count output"));
        }
        *raw = c.record.raw_count as u64;
        *tested = c.record.tested_count as u64;
        Ok(())
    })
}

/// Radii `δ_1..δ_k` of the initial vector.
///
/// # Safety
/// `code` valid; `buf` writable for `len` doubles; `needed` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_code_initial_vector(
    code: *const GcCode,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> GcStatus {
    guard(|| {
        let c = code_ref(code)?;
        write_array(&c.record.initial_vector.deltas, buf, len, needed)
    })
}

/// Invariant factors, decreasing, factors of 1 omitted.
///
/// # Safety
/// As for `gc_code_initial_vector`.
#[no_mangle]
pub unsafe extern "C" fn gc_code_factors(
    code: *const GcCode,
    buf: *mut u64,
    len: usize,
    needed: *mut usize,
) -> GcStatus {
    guard(|| {
        let c = code_ref(code)?;
        write_array(&c.record.presentation.invariant_factors, buf, len, needed)
    })
}

/// Exponent vector of generator `index`, paired with factor `index`.
///
/// # Safety
/// As for `gc_code_initial_vector`.
#[no_mangle]
pub unsafe extern "C" fn gc_code_generator(
    code: *const GcCode,
    index: usize,
    buf: *mut u64,
    len: usize,
    needed: *mut usize,
) -> GcStatus {
    guard(|| {
        let c = code_ref(code)?;
        let g = c.record.presentation.generators.get(index).ok_or_else(|| {
            (
                GcStatus::InvalidArgument,
                format!(
                    "generator index {index} out of range ({} generators)",
                    c.record.presentation.generators.len()
                ),
            )
        })?;
        write_array(g, buf, len, needed)
    })
}

/// # Safety
/// `code` must come from `gc_search` (or be null) and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn gc_code_free(code: *mut GcCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Minimum distance of the code generated by `count` exponent vectors of
/// length `blocks` (row-major in `generators`). With `deltas` null the LP
/// optimum is used and its radii are written to `deltas_out` (if non-null,
/// `blocks` doubles).
///
/// # Safety
/// `generators` readable for `count * blocks` values; `deltas` null or
/// readable for `blocks`; `deltas_out` null or writable for `blocks`;
/// `distance` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_evaluate(
    order: u64,
    generators: *const i64,
    count: usize,
    blocks: usize,
    deltas: *const f64,
    deltas_out: *mut f64,
    distance: *mut f64,
) -> GcStatus {
    guard(|| {
        if generators.is_null() {
            return Err(null("generators"));
        }
        if distance.is_null() {
            return Err(null("distance"));
        }
        if count == 0 || blocks == 0 || order < 2 {
            return Err((
                GcStatus::InvalidArgument,
                "need order >= 2 and at least one nonempty generator".into(),
            ));
        }
        let flat = std::slice::from_raw_parts(generators, count * blocks);
        let gens: Vec<Vec<i64>> = flat.chunks(blocks).map(<[i64]>::to_vec).collect();
        let closure = GroupElementTable::closure(&gens, order);
        if closure.len() as u64 != order {
            return Err(lib_err(Error::WrongOrder {
                expected: order,
                actual: closure.len() as u64,
            }));
        }
        let t = lattice_from_generators(&gens, order);
        let table = group_elements(&t, order).map_err(lib_err)?;
        let (d, radii) = if deltas.is_null() {
            let best = optimal_initial_vector(&table, order).map_err(lib_err)?;
            (best.min_distance, best.vector.deltas)
        } else {
            let raw = std::slice::from_raw_parts(deltas, blocks).to_vec();
            let v = InitialVector::normalized(raw).map_err(lib_err)?;
            (min_distance(&table, order, &v), v.deltas)
        };
        if !deltas_out.is_null() {
            ptr::copy_nonoverlapping(radii.as_ptr(), deltas_out, blocks);
        }
        *distance = d;
        Ok(())
    })
}

/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_count_estimates(
    order: u64,
    dim: u32,
    out: *mut GcCountEstimates,
) -> GcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let e = count_estimates(order, dim as usize, &EnumerationOptions::default())
            .map_err(lib_err)?;
        let narrow = |x: Option<u128>| x.and_then(|v| u64::try_from(v).ok()).unwrap_or(0);
        *out = GcCountEstimates {
            order,
            dim,
            binomial: narrow(e.binomial),
            adam_estimate: narrow(e.adam_estimate),
            tested_cyclic: e.tested_cyclic as u64,
            tested_commutative: e.tested_commutative as u64,
            raw_count: e.raw_count as u64,
        };
        Ok(())
    })
}
