//! C ABI over `fourier-dilation`.
//!
//! Objects cross the boundary as opaque heap handles (`FdGroup`, `FdSymbol`,
//! `FdCocycle`) created by `fd_*` constructors and released by the matching
//! `fd_*_free`. Every fallible call returns an [`FdStatus`]; on failure the
//! message is available from [`fd_last_error_message`] on the same thread.
//! Panics never unwind into C: they are caught and reported as
//! `FD_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use fourier_dilation::catalog;
use fourier_dilation::cocycle::{self, Cocycle};
use fourier_dilation::dilation::{self, DilationOptions};
use fourier_dilation::error::Error;
use fourier_dilation::group::FiniteGroup;
use fourier_dilation::hcalc::{self, GeneratorData, QuadConfig, SectorFunction};
use fourier_dilation::symbols::{self, SymbolFunction};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    GroupAxiom = 5,
    OutOfRange = 6,
    NotCertified = 7,
    Construction = 8,
    Quadrature = 9,
    Io = 10,
    BufferTooSmall = 11,
    Panic = 12,
    Internal = 13,
}

/// A finite group.
pub struct FdGroup(Arc<FiniteGroup>);

/// A complex-valued function on a finite group.
pub struct FdSymbol(SymbolFunction);

/// A 1-cocycle `(b, pi)` extracted from a certified symbol.
pub struct FdCocycle(Arc<Cocycle>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> FdStatus {
    match err {
        Error::Parse { .. } | Error::UnknownGroup(_) | Error::UnknownSymbol(_) => FdStatus::Parse,
        Error::GroupAxiom(_) => FdStatus::GroupAxiom,
        Error::ElementOutOfRange { .. } => FdStatus::OutOfRange,
        Error::NotCertified(_) => FdStatus::NotCertified,
        Error::Construction { .. } | Error::NotOrthogonal(_) => FdStatus::Construction,
        Error::Quadrature { .. } => FdStatus::Quadrature,
        Error::Io(_) => FdStatus::Io,
        Error::Json(_) => FdStatus::Internal,
        _ => FdStatus::InvalidArgument,
    }
}

struct Failure(FdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn guard(body: impl FnOnce() -> FfiResult<()>) -> FdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FdStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            FdStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(FdStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(FdStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_slice(out: *mut f64, len: usize, values: &[f64], what: &str) -> FfiResult<()> {
    if len < values.len() {
        return Err(Failure(FdStatus::BufferTooSmall, format!("`{what}` holds {len} values, {} needed", values.len())));
    }
    if values.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(null(what));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, or null if the last call
/// succeeded. The pointer stays valid until the next `fd_*` call on the
/// same thread.
#[no_mangle]
pub extern "C" fn fd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a group from a description such as `"cyclic 4"`,
/// `"dihedral 3"`, `"symmetric 3"` or `"cyclic 2 x cyclic 3"`.
///
/// # Safety
/// `spec` must be a valid C string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_group_from_spec(spec: *const c_char, out: *mut *mut FdGroup) -> FdStatus {
    guard(|| {
        let g = FiniteGroup::from_spec(string(spec, "spec")?)?;
        write_out(out, boxed(FdGroup(Arc::new(g))), "out")
    })
}

/// Parses a Cayley table: a line `order n`, then `n` rows of `n`
/// whitespace-separated indices with the identity at index 0.
///
/// # Safety
/// `text` must be a valid C string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_group_from_cayley_text(text: *const c_char, out: *mut *mut FdGroup) -> FdStatus {
    guard(|| {
        let g = FiniteGroup::parse_cayley(string(text, "text")?)?;
        write_out(out, boxed(FdGroup(Arc::new(g))), "out")
    })
}

/// Order of the group; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fd_group_order(g: *const FdGroup) -> usize {
    g.as_ref().map_or(0, |g| g.0.order())
}

/// # Safety
/// `g` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_group_multiply(g: *const FdGroup, a: usize, b: usize, out: *mut usize) -> FdStatus {
    guard(|| {
        let g = &borrow(g, "group")?.0;
        g.check_element(a)?;
        g.check_element(b)?;
        write_out(out, g.mul(a, b), "out")
    })
}

/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fd_group_free(g: *mut FdGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Real-valued symbol with `values[s]` at element `s`; `len` must equal
/// the group order.
///
/// # Safety
/// `g` must be a live handle and `values` point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fd_symbol_from_values(
    g: *const FdGroup,
    values: *const f64,
    len: usize,
    out: *mut *mut FdSymbol,
) -> FdStatus {
    guard(|| {
        let g = &borrow(g, "group")?.0;
        let psi = SymbolFunction::from_real(g.clone(), slice(values, len, "values")?)?;
        write_out(out, boxed(FdSymbol(psi)), "out")
    })
}

/// Named symbol on `g`: `zero`, `delta`, `delta:C`, `circle`,
/// `word-length`.
///
/// # Safety
/// `g` must be a live handle, `spec` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn fd_symbol_named(g: *const FdGroup, spec: *const c_char, out: *mut *mut FdSymbol) -> FdStatus {
    guard(|| {
        let g = &borrow(g, "group")?.0;
        let psi = catalog::named_symbol(g.clone(), string(spec, "spec")?)?;
        write_out(out, boxed(FdSymbol(psi)), "out")
    })
}

/// One of the built-in fixtures (`z2-delta`, `z3-circle`, `z4-circle`,
/// `z8-circle`, `s3-word`).
///
/// # Safety
/// `name` must be a valid C string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_symbol_builtin(name: *const c_char, out: *mut *mut FdSymbol) -> FdStatus {
    guard(|| {
        let fixture = catalog::builtin(string(name, "name")?)?;
        write_out(out, boxed(FdSymbol(fixture.psi)), "out")
    })
}

/// New handle to the group a symbol lives on.
///
/// # Safety
/// `psi` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_symbol_group(psi: *const FdSymbol, out: *mut *mut FdGroup) -> FdStatus {
    guard(|| {
        let psi = &borrow(psi, "symbol")?.0;
        write_out(out, boxed(FdGroup(psi.group().clone())), "out")
    })
}

/// # Safety
/// `psi` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fd_symbol_free(psi: *mut FdSymbol) {
    if !psi.is_null() {
        drop(Box::from_raw(psi));
    }
}

/// Certifies `psi` as conditionally of negative type. `*verdict` is 1 if
/// certified and 0 otherwise; a non-certified symbol is not an error.
///
/// # Safety
/// `psi` must be a live handle, `verdict` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_check_symbol(psi: *const FdSymbol, tol: f64, verdict: *mut i32) -> FdStatus {
    guard(|| {
        let psi = &borrow(psi, "symbol")?.0;
        let report = symbols::is_cond_negative_type(psi, tol)?;
        write_out(verdict, i32::from(report.verdict), "verdict")
    })
}

/// Extracts `(b, pi)` from a certified symbol.
///
/// # Safety
/// `psi` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_cocycle_extract(psi: *const FdSymbol, rank_tol: f64, out: *mut *mut FdCocycle) -> FdStatus {
    guard(|| {
        let psi = &borrow(psi, "symbol")?.0;
        let report = symbols::is_cond_negative_type(psi, symbols::DEFAULT_TOL)?;
        if !report.verdict {
            return Err(Failure(
                FdStatus::NotCertified,
                report.failure.unwrap_or_else(|| "not conditionally of negative type".into()),
            ));
        }
        let c = cocycle::extract_cocycle(psi, rank_tol)?;
        write_out(out, boxed(FdCocycle(Arc::new(c))), "out")
    })
}

/// Dimension of the cocycle's Hilbert space; 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fd_cocycle_dim(c: *const FdCocycle) -> usize {
    c.as_ref().map_or(0, |c| c.0.dim())
}

/// Copies `b(s)` (length `dim`) into `out`.
///
/// # Safety
/// `c` must be a live handle and `out` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fd_cocycle_b(c: *const FdCocycle, s: usize, out: *mut f64, len: usize) -> FdStatus {
    guard(|| {
        let c = &borrow(c, "cocycle")?.0;
        c.group().check_element(s)?;
        write_slice(out, len, c.b(s).as_slice(), "out")
    })
}

/// Copies `pi(s)` (`dim * dim`, row-major) into `out`.
///
/// # Safety
/// `c` must be a live handle and `out` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fd_cocycle_pi(c: *const FdCocycle, s: usize, out: *mut f64, len: usize) -> FdStatus {
    guard(|| {
        let c = &borrow(c, "cocycle")?.0;
        c.group().check_element(s)?;
        let m = c.pi(s);
        let row_major: Vec<f64> = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect();
        write_slice(out, len, &row_major, "out")
    })
}

/// # Safety
/// `c` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fd_cocycle_free(c: *mut FdCocycle) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Runs the full dilation verification under both conventions. On success
/// `*json` receives the report (release with [`fd_string_free`]) and
/// `*pass` is 1 if every check passed. `t_grid` may be null with
/// `t_len == 0` for the default grid; `samples == 0` selects the default.
///
/// # Safety
/// `psi` must be a live handle, `t_grid` point to `t_len` doubles, and
/// `json`, `pass` be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fd_dilate(
    psi: *const FdSymbol,
    t_grid: *const f64,
    t_len: usize,
    seed: u64,
    samples: usize,
    json: *mut *mut c_char,
    pass: *mut i32,
) -> FdStatus {
    guard(|| {
        let psi = &borrow(psi, "symbol")?.0;
        let mut opts = DilationOptions { seed, ..Default::default() };
        if t_len > 0 {
            opts.t_grid = slice(t_grid, t_len, "t_grid")?.to_vec();
        }
        if samples > 0 {
            opts.samples = samples;
        }
        let report = dilation::verify_dilation(psi, &opts)?;
        let text = serde_json::to_string(&report).map_err(Error::from)?;
        let text = CString::new(text).map_err(|e| Failure(FdStatus::Internal, e.to_string()))?;
        write_out(pass, i32::from(report.verdict.is_pass()), "pass")?;
        write_out(json, text.into_raw(), "json")
    })
}

/// Applies `f(A_psi)` through the contour integral at half-angle `nu`,
/// writing `Re f(psi(s))` and `Im f(psi(s))` into `out_re` / `out_im`
/// (each of length `len >= order`). `out_im` may be null. `function` is
/// `power:A` or `exp:T:EPS`.
///
/// # Safety
/// `psi` must be a live handle, `function` a valid C string, and the output
/// buffers hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fd_hinfty_apply(
    psi: *const FdSymbol,
    function: *const c_char,
    nu: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    len: usize,
) -> FdStatus {
    guard(|| {
        let psi = &borrow(psi, "symbol")?.0;
        let f = SectorFunction::parse(string(function, "function")?)?;
        let generator = GeneratorData::new(psi)?;
        let values = hcalc::hinfty_apply(&f, &generator, nu, &QuadConfig::default())?;
        let re: Vec<f64> = values.values().iter().map(|v| v.re).collect();
        write_slice(out_re, len, &re, "out_re")?;
        if !out_im.is_null() {
            let im: Vec<f64> = values.values().iter().map(|v| v.im).collect();
            write_slice(out_im, len, &im, "out_im")?;
        }
        Ok(())
    })
}
