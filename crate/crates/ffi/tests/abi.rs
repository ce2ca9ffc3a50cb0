use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use fourier_dilation_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = fd_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn group(spec: &str) -> *mut FdGroup {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { fd_group_from_spec(c(spec).as_ptr(), &mut g) }, FdStatus::Ok);
    g
}

fn builtin(name: &str) -> *mut FdSymbol {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fd_symbol_builtin(c(name).as_ptr(), &mut s) }, FdStatus::Ok);
    s
}

#[test]
fn group_lifecycle() {
    let g = group("cyclic 4");
    unsafe {
        assert_eq!(fd_group_order(g), 4);
        let mut out = 99;
        assert_eq!(fd_group_multiply(g, 3, 2, &mut out), FdStatus::Ok);
        assert_eq!(out, 1);
        assert!(fd_last_error_message().is_null());
        assert_eq!(fd_group_multiply(g, 4, 0, &mut out), FdStatus::OutOfRange);
        assert!(last_error().contains("out of range"));
        fd_group_free(g);
        fd_group_free(ptr::null_mut());
        assert_eq!(fd_group_order(ptr::null()), 0);
    }
}

#[test]
fn cayley_text_reports_axiom_violations() {
    let mut g = ptr::null_mut();
    let ok = c("order 2\n0 1\n1 0\n");
    let bad = c("order 3\n0 1 2\n1 2 0\n2 0 0\n");
    unsafe {
        assert_eq!(fd_group_from_cayley_text(ok.as_ptr(), &mut g), FdStatus::Ok);
        assert_eq!(fd_group_order(g), 2);
        fd_group_free(g);
        g = ptr::null_mut();
        assert_eq!(fd_group_from_cayley_text(bad.as_ptr(), &mut g), FdStatus::GroupAxiom);
        assert!(g.is_null());
        assert_eq!(fd_group_from_spec(c("klein bottle").as_ptr(), &mut g), FdStatus::Parse);
    }
}

#[test]
fn null_and_utf8_arguments() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(fd_group_from_spec(ptr::null(), &mut g), FdStatus::NullPointer);
        let invalid = [0xffu8, 0xfe, 0];
        assert_eq!(fd_group_from_spec(invalid.as_ptr().cast(), &mut g), FdStatus::InvalidUtf8);
        assert_eq!(fd_group_from_spec(c("cyclic 2").as_ptr(), ptr::null_mut()), FdStatus::NullPointer);
        let mut v = 0;
        assert_eq!(fd_check_symbol(ptr::null(), 1e-10, &mut v), FdStatus::NullPointer);
    }
}

#[test]
fn symbols_and_certification() {
    let g = group("cyclic 3");
    unsafe {
        let mut psi = ptr::null_mut();
        let good = [0.0, 1.5, 1.5];
        assert_eq!(fd_symbol_from_values(g, good.as_ptr(), 3, &mut psi), FdStatus::Ok);
        let mut verdict = -1;
        assert_eq!(fd_check_symbol(psi, 1e-10, &mut verdict), FdStatus::Ok);
        assert_eq!(verdict, 1);
        fd_symbol_free(psi);

        // psi(e) != 0 is not of negative type
        let bad = [1.0, 0.0, 0.0];
        assert_eq!(fd_symbol_from_values(g, bad.as_ptr(), 3, &mut psi), FdStatus::Ok);
        assert_eq!(fd_check_symbol(psi, 1e-10, &mut verdict), FdStatus::Ok);
        assert_eq!(verdict, 0);
        let mut coc = ptr::null_mut();
        assert_eq!(fd_cocycle_extract(psi, 1e-10, &mut coc), FdStatus::NotCertified);
        fd_symbol_free(psi);

        assert_eq!(fd_symbol_from_values(g, good.as_ptr(), 2, &mut psi), FdStatus::InvalidArgument);

        assert_eq!(fd_symbol_named(g, c("circle").as_ptr(), &mut psi), FdStatus::Ok);
        let mut h = ptr::null_mut();
        assert_eq!(fd_symbol_group(psi, &mut h), FdStatus::Ok);
        assert_eq!(fd_group_order(h), 3);
        fd_group_free(h);
        fd_symbol_free(psi);
        fd_group_free(g);
    }
}

#[test]
fn cocycle_matches_psi() {
    let psi = builtin("z4-circle");
    unsafe {
        let mut coc = ptr::null_mut();
        assert_eq!(fd_cocycle_extract(psi, 1e-10, &mut coc), FdStatus::Ok);
        let d = fd_cocycle_dim(coc);
        assert_eq!(d, 2);
        // ||b(s)||^2 = 2 - 2 cos(2 pi s / 4)
        for s in 0..4 {
            let mut b = [0.0; 2];
            assert_eq!(fd_cocycle_b(coc, s, b.as_mut_ptr(), 2), FdStatus::Ok);
            let want = 2.0 - 2.0 * (std::f64::consts::PI * s as f64 / 2.0).cos();
            assert!((b[0] * b[0] + b[1] * b[1] - want).abs() < 1e-12);

            let mut p = [0.0; 4];
            assert_eq!(fd_cocycle_pi(coc, s, p.as_mut_ptr(), 4), FdStatus::Ok);
            let det = p[0] * p[3] - p[1] * p[2];
            assert!((det.abs() - 1.0).abs() < 1e-12);
        }
        let mut small = [0.0; 1];
        assert_eq!(fd_cocycle_b(coc, 1, small.as_mut_ptr(), 1), FdStatus::BufferTooSmall);
        assert_eq!(fd_cocycle_pi(coc, 9, small.as_mut_ptr(), 1), FdStatus::OutOfRange);
        fd_cocycle_free(coc);
        fd_symbol_free(psi);
    }
}

#[test]
fn dilate_returns_json() {
    let psi = builtin("z2-delta");
    unsafe {
        let mut json = ptr::null_mut();
        let mut pass = -1;
        let grid = [0.5, 1.0];
        assert_eq!(fd_dilate(psi, grid.as_ptr(), 2, 7, 20_000, &mut json, &mut pass), FdStatus::Ok);
        assert_eq!(pass, 1);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        fd_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["verdict"], "PASS");
        assert_eq!(v["t_grid"].as_array().unwrap().len(), 2);
        assert_eq!(v["seed"], 7);
        fd_symbol_free(psi);
    }
}

#[test]
fn hinfty_apply_matches_spectral_values() {
    let psi = builtin("z3-circle");
    unsafe {
        let mut re = [0.0; 3];
        let mut im = [0.0; 3];
        let f = c("power:1");
        let st = fd_hinfty_apply(psi, f.as_ptr(), std::f64::consts::FRAC_PI_4, re.as_mut_ptr(), im.as_mut_ptr(), 3);
        assert_eq!(st, FdStatus::Ok, "{}", last_error());
        // f(x) = x / (1 + x)^2 at psi = 0, 3, 3
        let want = [0.0, 3.0 / 16.0, 3.0 / 16.0];
        for s in 0..3 {
            assert!((re[s] - want[s]).abs() < 1e-9, "{s}: {} vs {}", re[s], want[s]);
            assert!(im[s].abs() < 1e-9);
        }
        assert_eq!(
            fd_hinfty_apply(psi, c("sin").as_ptr(), 0.5, re.as_mut_ptr(), ptr::null_mut(), 3),
            FdStatus::InvalidArgument
        );
        fd_symbol_free(psi);
    }
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/fourier_dilation.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["fd_group_from_spec", "fd_dilate", "fd_hinfty_apply", "fd_last_error_message", "FD_STATUS_PANIC"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(&src, "#include \"fourier_dilation.h\"\nint main(void) { return fd_group_order(NULL); }\n").unwrap();
    let Ok(out) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .output()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
