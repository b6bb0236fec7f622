use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use flucstat_ffi::*;

fn last_error() -> String {
    let p = flucstat_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_functions() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(flucstat_qgauss_pdf(1.0, 0.5, 0.0, &mut v), FlucstatStatus::Ok);
        assert!((v - (0.5 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert_eq!(flucstat_stable_pdf(1.0, 1.0, 2.0, 1e-10, &mut v), FlucstatStatus::Ok);
        assert!((v - 1.0 / (std::f64::consts::PI * 5.0)).abs() < 1e-9);
        assert_eq!(flucstat_alpha_from_q(1.72, &mut v), FlucstatStatus::Ok);
        assert!((v - 1.28 / 0.72).abs() < 1e-12);
        assert_eq!(flucstat_q_from_alpha(v, &mut v), FlucstatStatus::Ok);
        assert!((v - 1.72).abs() < 1e-12);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(flucstat_qgauss_pdf(3.5, 1.0, 0.0, &mut v), FlucstatStatus::Domain);
        assert!(last_error().contains("q"));
        assert_eq!(flucstat_alpha_from_q(1.2, &mut v), FlucstatStatus::Domain);
        assert_eq!(flucstat_qgauss_pdf(1.5, 1.0, 0.0, ptr::null_mut()), FlucstatStatus::NullPointer);
        assert!(last_error().contains("null"));
    }
}

#[test]
fn series_handle_lifecycle() {
    let mut raw = vec![0.0; 20_000];
    unsafe {
        assert_eq!(flucstat_stable_sample(1.7, 1.0, raw.len(), 4, raw.as_mut_ptr()), FlucstatStatus::Ok);
        let mut s: *mut FlucstatSeries = ptr::null_mut();
        assert_eq!(flucstat_series_from_values(raw.as_ptr(), raw.len(), &mut s), FlucstatStatus::Ok);
        assert_eq!(flucstat_series_len(s), raw.len());

        let mut vals = vec![0.0; raw.len()];
        assert_eq!(flucstat_series_values(s, vals.as_mut_ptr(), 10), FlucstatStatus::BufferTooSmall);
        assert_eq!(flucstat_series_values(s, vals.as_mut_ptr(), vals.len()), FlucstatStatus::Ok);
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        assert!(mean.abs() < 1e-12);

        let mut c = vec![0.0; 11];
        assert_eq!(flucstat_acf(s, 10, 0, c.as_mut_ptr(), c.len()), FlucstatStatus::Ok);
        assert!((c[0] - 1.0).abs() < 1e-12);

        let mut fit = FlucstatQFit::default();
        assert_eq!(flucstat_fit_qgaussian(s, 0.1, 1.5, &mut fit), FlucstatStatus::Ok);
        assert_eq!(fit.q, 1.5);
        assert_eq!(fit.q_stderr, 0.0);

        let mut h = FlucstatHurst::default();
        assert_eq!(flucstat_dfa_hurst(s, 0, 1, 16, 1024, &mut h), FlucstatStatus::Ok);
        assert!((h.h - 0.5).abs() < 0.1, "{h:?}");

        flucstat_series_free(s);
        flucstat_series_free(ptr::null_mut());
        assert_eq!(flucstat_series_len(ptr::null()), 0);
        assert_eq!(flucstat_acf(ptr::null(), 10, 0, c.as_mut_ptr(), c.len()), FlucstatStatus::NullPointer);
    }
}

#[test]
fn series_read_reports_io_errors() {
    let path = CString::new("/nonexistent/returns.csv").unwrap();
    let mut s: *mut FlucstatSeries = ptr::null_mut();
    unsafe {
        assert_eq!(flucstat_series_read(path.as_ptr(), &mut s), FlucstatStatus::Io);
    }
    assert!(s.is_null());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(flucstat_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/flucstat.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header_path()).unwrap();
    for name in [
        "typedef struct FlucstatSeries FlucstatSeries",
        "FLUCSTAT_STATUS_OK = 0",
        "flucstat_last_error",
        "flucstat_series_from_values",
        "flucstat_series_free",
        "flucstat_fit_qgaussian",
        "flucstat_fit_qexp_acf",
        "flucstat_dfa_hurst",
        "flucstat_stable_pdf",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "flucstat.h"

int main(void) {
    double v = 0.0;
    if (flucstat_qgauss_pdf(1.0, 0.5, 0.0, &v) != FLUCSTAT_STATUS_OK) return 1;
    if (fabs(v - 0.3989422804014327) > 1e-12) return 2;
    if (flucstat_qgauss_pdf(4.0, 1.0, 0.0, &v) != FLUCSTAT_STATUS_DOMAIN) return 3;
    if (flucstat_last_error() == NULL) return 4;

    double raw[4096];
    if (flucstat_stable_sample(1.5, 1.0, 4096, 7, raw) != FLUCSTAT_STATUS_OK) return 5;
    FlucstatSeries *s = NULL;
    if (flucstat_series_from_values(raw, 4096, &s) != FLUCSTAT_STATUS_OK) return 6;
    double c[6];
    if (flucstat_acf(s, 5, 1, c, 6) != FLUCSTAT_STATUS_OK) return 7;
    flucstat_series_free(s);
    printf("ok %s %.6f\n", flucstat_version(), c[0]);
    return 0;
}
"#;

/// Compiles a C caller against the generated header and the static library.
#[test]
fn c_program_links_against_staticlib() {
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let profile_dir = deps.parent().unwrap();
    let lib = profile_dir.join("libflucstat_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header_path().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("ok ") && text.contains("1.000000"), "{text}");
}
