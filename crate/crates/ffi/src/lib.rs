//! C interface to the `fmu` toolkit.
//!
//! Programs are opaque handles created by [`fmu_program_parse`] and released
//! with [`fmu_program_free`]. Every function returns an [`FmuStatus`]; on
//! failure [`fmu_last_error`] describes the problem. Strings handed out by
//! the library are owned by the caller and released with [`fmu_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fmu::analysis::{build_chain, prob_bounds, solve_exact, Effort};
use fmu::equiv::{ciu_approx, EquivOptions, Verdict};
use fmu::prob::Prob;
use fmu::semantics::Config;
use fmu::syntax::{parse_term, parse_type, pretty_context, pretty_type, Term};
use fmu::typecheck::typecheck;

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmuStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    TypeError = 4,
    /// The chain did not close within the node budget.
    Incomplete = 5,
    Internal = 6,
}

/// Outcome of an approximation test.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmuVerdict {
    Holds = 0,
    Distinguished = 1,
    Inconclusive = 2,
}

/// A parsed, closed program.
pub struct FmuProgram {
    term: Term,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

type FfiResult = Result<(), (FmuStatus, String)>;

/// Runs `f`, recording its error and turning panics into `Internal`.
fn guard(f: impl FnOnce() -> FfiResult) -> FmuStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FmuStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            FmuStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (FmuStatus, String)> {
    if p.is_null() {
        return Err((FmuStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (FmuStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn program<'a>(p: *const FmuProgram, what: &str) -> Result<&'a FmuProgram, (FmuStatus, String)> {
    p.as_ref().ok_or((FmuStatus::NullArgument, format!("{what} is null")))
}

fn check_out<T>(p: *mut T, what: &str) -> FfiResult {
    if p.is_null() {
        Err((FmuStatus::NullArgument, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

fn budget(nodes: usize) -> usize {
    if nodes == 0 {
        Effort::default().nodes
    } else {
        nodes
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn fmu_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a closed program from concrete syntax.
///
/// # Safety
/// `src` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fmu_program_parse(src: *const c_char, out: *mut *mut FmuProgram) -> FmuStatus {
    guard(|| {
        check_out(out, "out")?;
        let src = read_str(src, "source")?;
        let term = parse_term(src).map_err(|e| (FmuStatus::ParseError, e.to_string()))?;
        if !term.is_closed() {
            return Err((FmuStatus::ParseError, "program has free variables".into()));
        }
        *out = Box::into_raw(Box::new(FmuProgram { term }));
        Ok(())
    })
}

/// Releases a program. Null is ignored.
///
/// # Safety
/// `p` must come from [`fmu_program_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fmu_program_free(p: *mut FmuProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fmu_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Typechecks a program, against `expected` when it is not null, and
/// stores the printed type in `type_out`.
///
/// # Safety
/// Pointers must be valid; `expected` may be null.
#[no_mangle]
pub unsafe extern "C" fn fmu_program_check(
    p: *const FmuProgram,
    expected: *const c_char,
    type_out: *mut *mut c_char,
) -> FmuStatus {
    guard(|| {
        check_out(type_out, "type_out")?;
        let p = program(p, "program")?;
        let expected = if expected.is_null() {
            None
        } else {
            let src = read_str(expected, "expected type")?;
            Some(parse_type(src).map_err(|e| (FmuStatus::ParseError, e.to_string()))?)
        };
        let ty = typecheck(&p.term, expected.as_ref()).map_err(|e| (FmuStatus::TypeError, e.to_string()))?;
        *type_out = to_c(pretty_type(&ty));
        Ok(())
    })
}

/// Bounds on the termination probability as `"num/den"` strings. `exact`
/// is set to 1 when both bounds coincide because the chain closed.
/// `nodes == 0` selects the default budget.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fmu_prob_bounds(
    p: *const FmuProgram,
    nodes: usize,
    lower: *mut *mut c_char,
    upper: *mut *mut c_char,
    exact: *mut c_int,
) -> FmuStatus {
    guard(|| {
        check_out(lower, "lower")?;
        check_out(upper, "upper")?;
        check_out(exact, "exact")?;
        let p = program(p, "program")?;
        let b = prob_bounds(&Config::new(p.term.erase()), budget(nodes));
        *lower = to_c(b.lower.to_string());
        *upper = to_c(b.upper.to_string());
        *exact = c_int::from(b.exact);
        Ok(())
    })
}

/// Exact termination probability; `Incomplete` if the chain does not close.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fmu_prob_exact(p: *const FmuProgram, nodes: usize, out: *mut *mut c_char) -> FmuStatus {
    guard(|| {
        check_out(out, "out")?;
        let p = program(p, "program")?;
        let g = build_chain(&Config::new(p.term.erase()), budget(nodes));
        let v = solve_exact(&g).map_err(|_| (FmuStatus::Incomplete, format!("chain not closed within {} nodes", g.len())))?;
        *out = to_c(v[0].to_string());
        Ok(())
    })
}

/// Tests whether `lhs` approximates `rhs` at `ty`. When the verdict is not
/// `Holds`, `witness` receives the context in concrete syntax and `left`,
/// `right` the bounds that decided it (lower on the left, upper on the
/// right); otherwise they are set to null. `depth == 0` and `nodes == 0`
/// select defaults.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn fmu_ciu_approx(
    lhs: *const FmuProgram,
    rhs: *const FmuProgram,
    ty: *const c_char,
    depth: usize,
    nodes: usize,
    verdict: *mut FmuVerdict,
    witness: *mut *mut c_char,
    left: *mut *mut c_char,
    right: *mut *mut c_char,
) -> FmuStatus {
    guard(|| {
        check_out(verdict, "verdict")?;
        check_out(witness, "witness")?;
        check_out(left, "left")?;
        check_out(right, "right")?;
        let (l, r) = (program(lhs, "lhs")?, program(rhs, "rhs")?);
        let ty = parse_type(read_str(ty, "type")?).map_err(|e| (FmuStatus::ParseError, e.to_string()))?;
        let defaults = EquivOptions::default();
        let opts = EquivOptions {
            depth: if depth == 0 { defaults.depth } else { depth },
            nodes: budget(nodes),
            ..defaults
        };
        let v = ciu_approx(&l.term, &r.term, &ty, &opts).map_err(|e| (FmuStatus::TypeError, e.to_string()))?;
        let set = |kind, ctx: Option<String>, a: Option<&Prob>, b: Option<&Prob>| {
            *verdict = kind;
            *witness = ctx.map_or(ptr::null_mut(), to_c);
            *left = a.map_or(ptr::null_mut(), |p| to_c(p.to_string()));
            *right = b.map_or(ptr::null_mut(), |p| to_c(p.to_string()));
        };
        match &v {
            Verdict::Holds { .. } => set(FmuVerdict::Holds, None, None, None),
            Verdict::Distinguished { context, lower, upper } => {
                set(FmuVerdict::Distinguished, Some(pretty_context(context)), Some(lower), Some(upper))
            }
            Verdict::Inconclusive { context, left, right } => set(
                FmuVerdict::Inconclusive,
                Some(pretty_context(context)),
                Some(&left.lower),
                Some(&right.upper),
            ),
            Verdict::Differ { .. } => unreachable!("ciu_approx compares probabilities only"),
        }
        Ok(())
    })
}
