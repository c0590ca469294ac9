use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use modal_lift_ffi::*;

const SHARED_MDL: &str = "fun bar(a, b) = a * b; fun baz(c) = c + 1; fun foo(x, y, z) = bar(x, y) + baz(z); foo(x, y, z)";
const SHARED_MB: &str = "modality feature(FA, FB);
bind x = { -7 @ FA, 3 @ !FA };
bind y = { 1 @ FA & FB, 8 @ FA & !FB, 4 @ !FA & FB, 10 @ !FA & !FB };
bind z = { 5 @ true };";

fn last_error() -> String {
    let p = modal_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load(mdl: &str, mb: &str) -> (*mut ModalProgram, *mut ModalSession) {
    let (src, bind) = (CString::new(mdl).unwrap(), CString::new(mb).unwrap());
    let mut p = ptr::null_mut();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(modal_program_new(src.as_ptr(), &mut p), ModalStatus::Ok);
        assert_eq!(modal_session_new(bind.as_ptr(), 0, 0, &mut s), ModalStatus::Ok);
    }
    (p, s)
}

#[test]
fn deep_run_through_handles() {
    let (p, s) = load(SHARED_MDL, SHARED_MB);
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(modal_run(p, s, ModalMode::Deep, MODAL_FLAG_STATS, ptr::null(), &mut r), ModalStatus::Ok);
        assert_eq!(modal_report_exit_code(r), 0);
        let out = CStr::from_ptr(modal_report_stdout(r)).to_str().unwrap();
        assert!(out.starts_with("-50 @ (FA & !FB)\n"));
        assert!(out.contains("applications.baz=1\n"));
        modal_report_free(r);

        let cfg = CString::new("FA=0,FB=1").unwrap();
        assert_eq!(modal_run(p, s, ModalMode::Plain, 0, cfg.as_ptr(), &mut r), ModalStatus::Ok);
        assert_eq!(CStr::from_ptr(modal_report_stdout(r)).to_str().unwrap(), "18\n");
        modal_report_free(r);

        modal_session_free(s);
        modal_program_free(p);
    }
}

#[test]
fn errors_are_reported_per_thread() {
    let bad = CString::new("1 +").unwrap();
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(modal_program_new(bad.as_ptr(), &mut p), ModalStatus::ParseError);
        assert!(p.is_null());
    }
    assert!(last_error().contains("syntax error"));

    let total = CString::new("modality feature(FA); bind x = { 1 @ FA };").unwrap();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(modal_session_new(total.as_ptr(), 0, 0, &mut s), ModalStatus::InvalidBindings);
    }
    assert!(last_error().contains("totality"));

    let many = CString::new("modality feature(A, B, C);").unwrap();
    unsafe {
        assert_eq!(modal_session_new(many.as_ptr(), 2, 0, &mut s), ModalStatus::BudgetExceeded);
        assert_eq!(modal_program_new(ptr::null(), &mut p), ModalStatus::NullArgument);
    }
    std::thread::spawn(|| assert!(modal_last_error().is_null())).join().unwrap();
}

#[test]
fn swap_flag_repairs_ranges() {
    let mb = CString::new("modality interval; bind r = [9 .. 4];").unwrap();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(modal_session_new(mb.as_ptr(), 0, 0, &mut s), ModalStatus::InvalidBindings);
        assert_eq!(modal_session_new(mb.as_ptr(), 0, MODAL_FLAG_SWAP_EMPTY, &mut s), ModalStatus::Ok);
        modal_session_free(s);
    }
}

#[test]
fn invariant_failures_surface_as_exit_codes() {
    let (p, s) = load("w + 1", "modality interval; bind w = [1 .. 2];");
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(modal_run(p, s, ModalMode::Check, MODAL_FLAG_CHECK_INVARIANTS, ptr::null(), &mut r), ModalStatus::Ok);
        assert_eq!(modal_report_exit_code(r), 0);
        assert_eq!(CStr::from_ptr(modal_report_stdout(r)).to_str().unwrap(), "[2 .. 3]\ncheck=ok\n");
        modal_report_free(r);
        modal_session_free(s);
        modal_program_free(p);
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/modal_lift.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["modal_program_new", "modal_session_new", "modal_run", "modal_report_free", "MODAL_STATUS_OK"] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let probe = std::env::temp_dir().join(format!("modal_lift_probe_{}.c", std::process::id()));
    std::fs::write(
        &probe,
        "#include \"modal_lift.h\"\nint main(void) { ModalProgram *p = 0; \
         return modal_program_new(\"1\", &p) == MODAL_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&probe)
        .status();
    let _ = std::fs::remove_file(&probe);
    match status {
        Ok(s) => assert!(s.success(), "C compiler rejected the header"),
        Err(e) => eprintln!("skipping C compile check: {e}"),
    }
}
