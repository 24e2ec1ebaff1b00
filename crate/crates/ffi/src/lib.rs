//! C ABI over `potlab`.
//!
//! Objects are opaque handles created by `*_new`/`*_solve` style functions
//! and released with the matching `*_free`. Every fallible call returns a
//! [`PotlabStatus`]; on failure the message is kept per thread and read back
//! with [`potlab_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use potlab::jacobi::{equilibrium_coefficients, gap_eigenvalues, MeasureModel, MeasureSpec};
use potlab::potential::default_quad_order;
use potlab::sumrule::n_step_sum_rule;
use potlab::{Error, GapSet, GreenModel, JacobiCoeffs, Tail};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotlabStatus {
    Ok = 0,
    InvalidInput = 1,
    Numerical = 2,
    NullPointer = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// A finite-gap set.
pub struct PotlabGapSet(GapSet);

/// A solved Green's function.
pub struct PotlabGreen(GreenModel);

/// Jacobi coefficients with their tail.
pub struct PotlabJacobi(JacobiCoeffs);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> PotlabStatus {
    if e.is_numerical() {
        PotlabStatus::Numerical
    } else {
        PotlabStatus::InvalidInput
    }
}

/// Runs `f`, recording errors and panics.
fn guard<F>(f: F) -> PotlabStatus
where
    F: FnOnce() -> Result<(), PotlabStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PotlabStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside potlab".into());
            PotlabStatus::Panic
        }
    }
}

fn lift<T>(r: potlab::Result<T>) -> Result<T, PotlabStatus> {
    r.map_err(|e| {
        let s = status_of(&e);
        set_error(e.to_string());
        s
    })
}

fn nonnull<T>(p: *const T, name: &str) -> Result<(), PotlabStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        Err(PotlabStatus::NullPointer)
    } else {
        Ok(())
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], PotlabStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    nonnull(p, name)?;
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, v: T, name: &str) -> Result<(), PotlabStatus> {
    nonnull(out, name)?;
    *out = v;
    Ok(())
}

/// Copies `values` into `buf` and stores the count in `count`; fails with
/// `BUFFER_TOO_SMALL` (count still set) when `cap` is short.
unsafe fn write_buf(values: &[f64], buf: *mut f64, cap: usize, count: *mut usize) -> Result<(), PotlabStatus> {
    write_out(count, values.len(), "count")?;
    if values.len() > cap {
        set_error(format!("buffer holds {cap} values, {} needed", values.len()));
        return Err(PotlabStatus::BufferTooSmall);
    }
    if !values.is_empty() {
        nonnull(buf, "buf")?;
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    }
    Ok(())
}

/// Length of the last error message on this thread, without the terminator.
/// Copies at most `cap - 1` bytes plus a NUL into `buf` when `buf` is not null.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn potlab_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// `[alpha, beta]` minus `gap_count` gaps given as `(lo, hi)` pairs in `gaps`.
///
/// # Safety
/// `gaps` must hold `2 * gap_count` values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn potlab_gapset_new(
    alpha: f64,
    beta: f64,
    gaps: *const f64,
    gap_count: usize,
    out: *mut *mut PotlabGapSet,
) -> PotlabStatus {
    guard(|| {
        nonnull(out, "out")?;
        let flat = slice(gaps, 2 * gap_count, "gaps")?;
        let pairs = flat.chunks_exact(2).map(|p| (p[0], p[1])).collect();
        let set = lift(GapSet::new(alpha, beta, pairs))?;
        *out = Box::into_raw(Box::new(PotlabGapSet(set)));
        Ok(())
    })
}

/// The fat Cantor set of the given level on `[0, 1]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn potlab_gapset_fat_cantor(level: u32, out: *mut *mut PotlabGapSet) -> PotlabStatus {
    guard(|| {
        nonnull(out, "out")?;
        let set = lift(potlab::fat_cantor(level))?;
        *out = Box::into_raw(Box::new(PotlabGapSet(set)));
        Ok(())
    })
}

/// # Safety
/// `set` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn potlab_gapset_free(set: *mut PotlabGapSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// # Safety
/// `set` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn potlab_gapset_gap_count(set: *const PotlabGapSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.gap_count())
}

/// Solves for the Green's function; `quad_order == 0` picks the default.
///
/// # Safety
/// `set` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn potlab_green_solve(
    set: *const PotlabGapSet,
    quad_order: usize,
    out: *mut *mut PotlabGreen,
) -> PotlabStatus {
    guard(|| {
        nonnull(set, "set")?;
        nonnull(out, "out")?;
        let s = &(*set).0;
        let order = if quad_order == 0 { default_quad_order(s) } else { quad_order };
        let g = lift(potlab::solve_green(s, order))?;
        *out = Box::into_raw(Box::new(PotlabGreen(g)));
        Ok(())
    })
}

/// # Safety
/// `green` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn potlab_green_free(green: *mut PotlabGreen) {
    if !green.is_null() {
        drop(Box::from_raw(green));
    }
}

/// # Safety
/// `green` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn potlab_green_capacity(green: *const PotlabGreen, out: *mut f64) -> PotlabStatus {
    guard(|| {
        nonnull(green, "green")?;
        write_out(out, (*green).0.capacity(), "out")
    })
}

/// # Safety
/// `green` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn potlab_green_pw_sum(green: *const PotlabGreen, out: *mut f64) -> PotlabStatus {
    guard(|| {
        nonnull(green, "green")?;
        write_out(out, (*green).0.pw_sum(), "out")
    })
}

/// `g(x)`; zero on the set.
///
/// # Safety
/// `green` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn potlab_green_value(green: *const PotlabGreen, x: f64, out: *mut f64) -> PotlabStatus {
    guard(|| {
        nonnull(green, "green")?;
        write_out(out, (*green).0.green_value(x), "out")
    })
}

/// `g'(x)` off the set.
///
/// # Safety
/// `green` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn potlab_green_derivative(green: *const PotlabGreen, x: f64, out: *mut f64) -> PotlabStatus {
    guard(|| {
        nonnull(green, "green")?;
        write_out(out, (*green).0.green_derivative(x), "out")
    })
}

/// Critical points, one per gap, into `buf`.
///
/// # Safety
/// `buf` must be valid for `cap` writes, `count` for one.
#[no_mangle]
pub unsafe extern "C" fn potlab_green_critical_points(
    green: *const PotlabGreen,
    buf: *mut f64,
    cap: usize,
    count: *mut usize,
) -> PotlabStatus {
    guard(|| {
        nonnull(green, "green")?;
        write_buf((*green).0.critical_points(), buf, cap, count)
    })
}

/// Finite Jacobi matrix from `a` (length `n - 1`) and `b` (length `n`).
///
/// # Safety
/// `a` and `b` must hold `a_len` and `b_len` values.
#[no_mangle]
pub unsafe extern "C" fn potlab_jacobi_new(
    a: *const f64,
    a_len: usize,
    b: *const f64,
    b_len: usize,
    out: *mut *mut PotlabJacobi,
) -> PotlabStatus {
    guard(|| {
        nonnull(out, "out")?;
        let a = slice(a, a_len, "a")?.to_vec();
        let b = slice(b, b_len, "b")?.to_vec();
        let j = lift(JacobiCoeffs::new(a, b, Tail::Truncate))?;
        *out = Box::into_raw(Box::new(PotlabJacobi(j)));
        Ok(())
    })
}

/// At least `n` coefficients of the equilibrium measure of the solved set.
///
/// # Safety
/// `green` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn potlab_jacobi_equilibrium(
    green: *const PotlabGreen,
    n: usize,
    out: *mut *mut PotlabJacobi,
) -> PotlabStatus {
    guard(|| {
        nonnull(green, "green")?;
        nonnull(out, "out")?;
        let j = lift(equilibrium_coefficients(&(*green).0, n))?;
        *out = Box::into_raw(Box::new(PotlabJacobi(j)));
        Ok(())
    })
}

/// Coefficients from JSON `{"a": [...], "b": [...], "tail": {...}}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn potlab_jacobi_from_json(json: *const c_char, out: *mut *mut PotlabJacobi) -> PotlabStatus {
    guard(|| {
        nonnull(json, "json")?;
        nonnull(out, "out")?;
        let text = read_str(json)?;
        let j = lift(JacobiCoeffs::from_json(text))?;
        *out = Box::into_raw(Box::new(PotlabJacobi(j)));
        Ok(())
    })
}

/// # Safety
/// `jacobi` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn potlab_jacobi_free(jacobi: *mut PotlabJacobi) {
    if !jacobi.is_null() {
        drop(Box::from_raw(jacobi));
    }
}

/// `a_k`, `b_k` for `k = 1..=n` (tail included) into `a_buf`, `b_buf`.
///
/// # Safety
/// Both buffers must be valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn potlab_jacobi_coefficients(
    jacobi: *const PotlabJacobi,
    n: usize,
    a_buf: *mut f64,
    b_buf: *mut f64,
) -> PotlabStatus {
    guard(|| {
        nonnull(jacobi, "jacobi")?;
        let j = &(*jacobi).0;
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for k in 0..n {
            match (j.a_at(k), j.b_at(k)) {
                (Some(x), Some(y)) => {
                    a.push(x);
                    b.push(y);
                }
                _ => {
                    set_error(format!("only {k} coefficient pairs available"));
                    return Err(PotlabStatus::InvalidInput);
                }
            }
        }
        let mut count = 0;
        write_buf(&a, a_buf, n, &mut count)?;
        write_buf(&b, b_buf, n, &mut count)
    })
}

/// Eigenvalues of the `n x n` truncation lying off the set.
///
/// # Safety
/// `buf` must be valid for `cap` writes, `count` for one.
#[no_mangle]
pub unsafe extern "C" fn potlab_jacobi_gap_eigenvalues(
    jacobi: *const PotlabJacobi,
    green: *const PotlabGreen,
    n: usize,
    buf: *mut f64,
    cap: usize,
    count: *mut usize,
) -> PotlabStatus {
    guard(|| {
        nonnull(jacobi, "jacobi")?;
        nonnull(green, "green")?;
        let ev = lift(gap_eigenvalues(&(*jacobi).0, &(*green).0, n))?;
        let values: Vec<f64> = ev.iter().map(|e| e.value).collect();
        write_buf(&values, buf, cap, count)
    })
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, PotlabStatus> {
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not UTF-8".into());
        PotlabStatus::InvalidInput
    })
}

/// The `n`-step sum rule for `jacobi` whose spectral measure is given as JSON
/// (`NULL` for the equilibrium measure). Writes both sides.
///
/// # Safety
/// Handles must be live; `measure_json` null or NUL-terminated; outputs valid.
#[no_mangle]
pub unsafe extern "C" fn potlab_sum_rule(
    jacobi: *const PotlabJacobi,
    green: *const PotlabGreen,
    measure_json: *const c_char,
    n: usize,
    lhs: *mut f64,
    rhs: *mut f64,
) -> PotlabStatus {
    guard(|| {
        nonnull(jacobi, "jacobi")?;
        nonnull(green, "green")?;
        nonnull(lhs, "lhs")?;
        nonnull(rhs, "rhs")?;
        let spec = if measure_json.is_null() {
            MeasureSpec::equilibrium()
        } else {
            let text = read_str(measure_json)?;
            serde_json_spec(text)?
        };
        let g = &(*green).0;
        let mu = lift(MeasureModel::new(g, spec))?;
        let r = lift(n_step_sum_rule(&(*jacobi).0, &mu, g, n))?;
        *lhs = r.lhs;
        *rhs = r.rhs;
        Ok(())
    })
}

fn serde_json_spec(text: &str) -> Result<MeasureSpec, PotlabStatus> {
    lift(potlab::cli::parse_measure(&text.to_string().into()))
}
