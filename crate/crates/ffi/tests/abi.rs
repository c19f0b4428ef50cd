use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::process::Command;
use std::ptr;

use fmu_ffi::*;

fn parse(src: &str) -> *mut FmuProgram {
    let src = CString::new(src).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { fmu_program_parse(src.as_ptr(), &mut p) }, FmuStatus::Ok);
    assert!(!p.is_null());
    p
}

/// Copies and frees a library string.
fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { fmu_string_free(s) };
    out
}

fn last_error() -> String {
    let e = fmu_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_str().unwrap().to_owned()
}

#[test]
fn parse_check_and_exact_probability() {
    let p = parse("fn (x : nat) => rand x");
    let mut ty = ptr::null_mut();
    assert_eq!(unsafe { fmu_program_check(p, ptr::null(), &mut ty) }, FmuStatus::Ok);
    assert_eq!(take(ty), "nat -> nat");
    let want = CString::new("unit").unwrap();
    assert_eq!(unsafe { fmu_program_check(p, want.as_ptr(), &mut ty) }, FmuStatus::TypeError);
    assert!(last_error().contains("mismatch"), "{}", last_error());
    unsafe { fmu_program_free(p) };

    let q = parse("() (+) (fn w => unfold w w) (fold (fn x => unfold x x))");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fmu_prob_exact(q, 0, &mut out) }, FmuStatus::Ok);
    assert_eq!(take(out), "1/2");
    let (mut lo, mut hi, mut exact) = (ptr::null_mut(), ptr::null_mut(), 0);
    assert_eq!(unsafe { fmu_prob_bounds(q, 0, &mut lo, &mut hi, &mut exact) }, FmuStatus::Ok);
    assert_eq!((take(lo), take(hi), exact), ("1/2".into(), "1/2".into(), 1));
    unsafe { fmu_program_free(q) };
}

#[test]
fn errors_are_reported() {
    let mut p = ptr::null_mut();
    let bad = CString::new("fn x =>").unwrap();
    assert_eq!(unsafe { fmu_program_parse(bad.as_ptr(), &mut p) }, FmuStatus::ParseError);
    assert!(p.is_null());
    let open = CString::new("x").unwrap();
    assert_eq!(unsafe { fmu_program_parse(open.as_ptr(), &mut p) }, FmuStatus::ParseError);
    assert!(last_error().contains("free"));
    assert_eq!(unsafe { fmu_program_parse(ptr::null(), &mut p) }, FmuStatus::NullArgument);
    let invalid = [0xffu8, 0];
    assert_eq!(
        unsafe { fmu_program_parse(invalid.as_ptr() as *const c_char, &mut p) },
        FmuStatus::InvalidUtf8
    );
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fmu_prob_exact(ptr::null(), 0, &mut out) }, FmuStatus::NullArgument);

    // A geometric loop does not close in 10 nodes.
    let q = parse("fix[unit][unit] (fn (f : unit -> unit) => fn (_ : unit) => ifz rand 2 then () else f ()) ()".replace("fix", "(tfn a. tfn b. fn (f : (a -> b) -> a -> b) => fn (z : a) => (fn (y : mu r. r -> a -> b) => f (fn (x : a) => unfold y y x)) (fold (fn (y : mu r. r -> a -> b) => f (fn (x : a) => unfold y y x)) at mu r. r -> a -> b) z)").as_str());
    assert_eq!(unsafe { fmu_prob_exact(q, 10, &mut out) }, FmuStatus::Incomplete);
    assert_eq!(unsafe { fmu_prob_exact(q, 0, &mut out) }, FmuStatus::Ok);
    assert_eq!(take(out), "1/1");
    unsafe { fmu_program_free(q) };
    unsafe { fmu_program_free(ptr::null_mut()) };
    unsafe { fmu_string_free(ptr::null_mut()) };
}

#[test]
fn approximation_verdicts() {
    // A well-typed divergent branch, printed from the corpus.
    let l = parse(&fmu::syntax::pretty(&fmu::corpus::build("() (+) omega")));
    let r = parse("()");
    let ty = CString::new("unit").unwrap();
    let mut verdict = FmuVerdict::Inconclusive;
    let (mut w, mut a, mut b) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    let status = unsafe { fmu_ciu_approx(l, r, ty.as_ptr(), 0, 0, &mut verdict, &mut w, &mut a, &mut b) };
    assert_eq!(status, FmuStatus::Ok);
    assert_eq!(verdict, FmuVerdict::Holds);
    assert!(w.is_null() && a.is_null() && b.is_null());

    let status = unsafe { fmu_ciu_approx(r, l, ty.as_ptr(), 0, 0, &mut verdict, &mut w, &mut a, &mut b) };
    assert_eq!(status, FmuStatus::Ok);
    assert_eq!(verdict, FmuVerdict::Distinguished);
    assert_eq!((take(w), take(a), take(b)), ("[-]".into(), "1/1".into(), "1/2".into()));

    let nat = CString::new("nat").unwrap();
    let status = unsafe { fmu_ciu_approx(l, r, nat.as_ptr(), 0, 0, &mut verdict, &mut w, &mut a, &mut b) };
    assert_eq!(status, FmuStatus::TypeError);
    unsafe {
        fmu_program_free(l);
        fmu_program_free(r);
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/fmu.h");
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, header])
            .output()
        else {
            eprintln!("{cc} not available; skipping");
            continue;
        };
        assert!(out.status.success(), "{cc}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
