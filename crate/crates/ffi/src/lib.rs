//! C ABI over pencil-lab. Pencils are opaque handles; every report comes back
//! as a JSON string the caller releases with `pl_string_free`. Failures set a
//! thread-local message readable through `pl_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pencil_lab::cli::{self, CommonArgs, Outcome};
use pencil_lab::fixtures::fixture;
use pencil_lab::quadrics::{Pencil, PencilJson};
use pencil_lab::Error;

/// Opaque pencil handle.
pub struct PlPencil {
    inner: Pencil,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlStatus {
    Ok = 0,
    CheckFailed = 1,
    InvalidInput = 2,
    SizeGuard = 3,
    NullPointer = 4,
    Internal = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> PlStatus {
    match e {
        Error::SizeGuard(_) => PlStatus::SizeGuard,
        _ => PlStatus::InvalidInput,
    }
}

fn guarded<F: FnOnce() -> PlStatus>(f: F) -> PlStatus {
    clear_error();
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic");
        PlStatus::Internal
    })
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, PlStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(PlStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("argument is not UTF-8");
        PlStatus::InvalidInput
    })
}

unsafe fn store_handle(p: Pencil, out: *mut *mut PlPencil) -> PlStatus {
    *out = Box::into_raw(Box::new(PlPencil { inner: p }));
    PlStatus::Ok
}

/// Message of the last failed call on this thread, or NULL. Owned by the library.
#[no_mangle]
pub extern "C" fn pl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a pencil from JSON: {"field": {"p","k","modulus"}, "A1": [[..]], "A2": [[..]]}.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_pencil_from_json(json: *const c_char, out: *mut *mut PlPencil) -> PlStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return PlStatus::NullPointer;
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let parsed = serde_json::from_str::<PencilJson>(text)
            .map_err(|e| Error::InvalidInput(format!("bad pencil JSON: {e}")))
            .and_then(|pj| pj.to_pencil());
        match parsed {
            Ok(p) => store_handle(p, out),
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Builds a named fixture; `q = 0` selects its default field.
///
/// # Safety
/// `name` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_pencil_from_fixture(name: *const c_char, q: u32, out: *mut *mut PlPencil) -> PlStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return PlStatus::NullPointer;
        }
        let name = match read_str(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match fixture(name, (q != 0).then_some(q)) {
            Ok(fx) => store_handle(fx.pencil, out),
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// # Safety
/// `p` must come from a constructor here and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn pl_pencil_free(p: *mut PlPencil) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of variables N, or 0 for NULL.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_pencil_dim(p: *const PlPencil) -> usize {
    p.as_ref().map_or(0, |h| h.inner.n())
}

/// Field order q, or 0 for NULL.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_pencil_field_order(p: *const PlPencil) -> u32 {
    p.as_ref().map_or(0, |h| h.inner.field().q())
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn pl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

type Cmd = fn(&CommonArgs, &str, &Pencil) -> pencil_lab::Result<Outcome>;

unsafe fn run_cmd(p: *const PlPencil, args: CommonArgs, cmd: Cmd, out: *mut *mut c_char) -> PlStatus {
    guarded(|| {
        let Some(h) = p.as_ref() else {
            set_error("null pencil handle");
            return PlStatus::NullPointer;
        };
        if out.is_null() {
            set_error("null output pointer");
            return PlStatus::NullPointer;
        }
        let res = cli::size_guard(&h.inner, args.force).and_then(|_| cmd(&args, "handle", &h.inner));
        match res {
            Ok(o) => {
                *out = CString::new(o.output).expect("JSON has no nul").into_raw();
                if o.code == cli::EXIT_PASS {
                    PlStatus::Ok
                } else {
                    set_error("a check failed; see the report");
                    PlStatus::CheckFailed
                }
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

fn base_args(samples: usize, seed: u64, force: bool) -> CommonArgs {
    CommonArgs { samples, seed, force, ..Default::default() }
}

/// Classification report as JSON.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_classify(p: *const PlPencil, out: *mut *mut c_char) -> PlStatus {
    run_cmd(p, base_args(0, 0, false), cli::cmd_classify, out)
}

/// Profile count table as JSON.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_count(p: *const PlPencil, force: bool, out: *mut *mut c_char) -> PlStatus {
    run_cmd(p, base_args(0, 0, force), cli::cmd_count, out)
}

/// Full verification report as JSON.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_verify(p: *const PlPencil, samples: usize, seed: u64, force: bool, out: *mut *mut c_char) -> PlStatus {
    run_cmd(p, base_args(samples, seed, force), cli::cmd_verify, out)
}

/// Reduction report (odd N) or delta_v chain (even N) as JSON.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_reduce(p: *const PlPencil, trace: bool, force: bool, out: *mut *mut c_char) -> PlStatus {
    let mut a = base_args(0, 0, force);
    a.trace = trace;
    run_cmd(p, a, cli::cmd_reduce, out)
}

/// Torsor checks as JSON.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_verify_torsor(p: *const PlPencil, samples: usize, seed: u64, force: bool, out: *mut *mut c_char) -> PlStatus {
    run_cmd(p, base_args(samples, seed, force), cli::cmd_verify_torsor, out)
}
