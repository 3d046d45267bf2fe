use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use pencil_lab_ffi::*;

fn take(s: *mut std::ffi::c_char) -> serde_json::Value {
    assert!(!s.is_null());
    let v = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    unsafe { pl_string_free(s) };
    v
}

fn fixture_handle(name: &str) -> *mut PlPencil {
    let name = CString::new(name).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pl_pencil_from_fixture(name.as_ptr(), 0, &mut h) }, PlStatus::Ok);
    h
}

#[test]
fn count_and_classify_through_handles() {
    let h = fixture_handle("regular-odd-5-shape-2111");
    assert_eq!(unsafe { pl_pencil_dim(h) }, 5);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pl_classify(h, &mut out) }, PlStatus::Ok);
    assert_eq!(take(out)["class"], "RegularNonGeneric");
    assert_eq!(unsafe { pl_count(h, false, &mut out) }, PlStatus::Ok);
    let v = take(out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    unsafe { pl_pencil_free(h) };
}

#[test]
fn json_pencil_and_errors() {
    let good = CString::new(r#"{"field":{"p":7,"k":1,"modulus":[0,1]},"A1":[[1,0,0],[0,1,0],[0,0,1]],"A2":[[0,0,0],[0,1,0],[0,0,3]]}"#).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pl_pencil_from_json(good.as_ptr(), &mut h) }, PlStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pl_verify_torsor(h, 200, 0, false, &mut out) }, PlStatus::Ok);
    assert_eq!(take(out)["pass"], true);
    unsafe { pl_pencil_free(h) };

    let asym = CString::new(r#"{"field":{"p":7,"k":1,"modulus":[0,1]},"A1":[[1,2,0],[0,1,0],[0,0,1]],"A2":[[0,0,0],[0,1,0],[0,0,3]]}"#).unwrap();
    assert_eq!(unsafe { pl_pencil_from_json(asym.as_ptr(), &mut h) }, PlStatus::InvalidInput);
    let msg = unsafe { CStr::from_ptr(pl_last_error()) }.to_str().unwrap().to_string();
    assert!(msg.contains("symmetric"), "{msg}");

    assert_eq!(unsafe { pl_pencil_from_json(ptr::null(), &mut h) }, PlStatus::NullPointer);
    assert_eq!(unsafe { pl_classify(ptr::null(), &mut out) }, PlStatus::NullPointer);
    assert_eq!(unsafe { pl_pencil_dim(ptr::null()) }, 0);
    unsafe { pl_pencil_free(ptr::null_mut()) };
}

#[test]
fn size_guard_status() {
    let name = CString::new("shape-11111111").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pl_pencil_from_fixture(name.as_ptr(), 11, &mut h) }, PlStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pl_count(h, false, &mut out) }, PlStatus::SizeGuard);
    assert!(out.is_null());
    unsafe { pl_pencil_free(h) };
}

#[test]
fn reduce_trace_over_ffi() {
    let h = fixture_handle("cusp-even-6");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pl_reduce(h, true, false, &mut out) }, PlStatus::Ok);
    let steps = take(out);
    assert_eq!(steps[0]["fiber"], "G_a");
    assert_eq!(steps[0]["fiber_sizes"][0], 7);
    unsafe { pl_pencil_free(h) };
}

#[test]
fn header_declares_every_export() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/pencil_lab.h")).unwrap();
    for f in [
        "pl_last_error", "pl_pencil_from_json", "pl_pencil_from_fixture", "pl_pencil_free", "pl_pencil_dim",
        "pl_pencil_field_order", "pl_string_free", "pl_classify", "pl_count", "pl_verify", "pl_reduce", "pl_verify_torsor",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct PlPencil PlPencil;"));
}

/// Compiles tests/c/smoke.c against the header and the static library.
#[test]
fn c_smoke_program() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libpencil_lab_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let out_bin = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("smoke");
    let status = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out_bin)
        .status()
        .expect("cc available");
    assert!(status.success());
    let run = Command::new(&out_bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
