use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use farey_heights_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Takes ownership of a returned string.
fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { fh_string_free(p) };
    s
}

fn last_error() -> String {
    let p = fh_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn chain(n: usize, center: &str) -> *mut FhTower {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { fh_tower_chain(n, c(center).as_ptr(), &mut t) }, FhStatus::Ok);
    t
}

#[test]
fn tower_nodes() {
    let t = chain(4, "1");
    let mut len = 0;
    assert_eq!(unsafe { fh_tower_len(t, &mut len) }, FhStatus::Ok);
    assert_eq!(len, 4);
    let mut nodes = Vec::new();
    for i in 1..=len {
        let mut n = FhNode::default();
        assert_eq!(unsafe { fh_tower_node(t, i, &mut n) }, FhStatus::Ok);
        nodes.push((n.num, n.den, n.mult_pullback));
    }
    // E(i) is the mediant 1/i of (0/1, 1/(i-1)), with multiplicity i.
    assert_eq!(nodes, vec![(1, 1, 1), (1, 2, 2), (1, 3, 3), (1, 4, 4)]);
    let mut n = FhNode::default();
    assert_eq!(unsafe { fh_tower_node(t, 9, &mut n) }, FhStatus::InvalidArgument);
    let mut spec = ptr::null_mut();
    assert_eq!(unsafe { fh_tower_spec(t, &mut spec) }, FhStatus::Ok);
    assert_eq!(take(spec), "custom:.,L,LL");
    let (mut reduced, mut canonical) = (false, false);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { fh_tower_bookkeeping(t, &mut reduced, &mut canonical, &mut text) }, FhStatus::Ok);
    assert!(reduced && canonical);
    assert!(!take(text).is_empty());
    unsafe { fh_tower_free(t) };
}

#[test]
fn spec_round_trip() {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { fh_tower_new(c("t2:4").as_ptr(), c("3").as_ptr(), &mut t) }, FhStatus::Ok);
    let mut spec = ptr::null_mut();
    assert_eq!(unsafe { fh_tower_spec(t, &mut spec) }, FhStatus::Ok);
    let spec = take(spec);
    let mut u = ptr::null_mut();
    assert_eq!(unsafe { fh_tower_new(c(&spec).as_ptr(), c("3").as_ptr(), &mut u) }, FhStatus::Ok);
    let (mut a, mut b) = (0, 0);
    unsafe {
        fh_tower_len(t, &mut a);
        fh_tower_len(u, &mut b);
    }
    assert_eq!(a, b);
    let mut t2 = ptr::null_mut();
    assert_eq!(unsafe { fh_tower_theorem2(4, c("3").as_ptr(), &mut t2) }, FhStatus::Ok);
    unsafe {
        fh_tower_free(t);
        fh_tower_free(u);
        fh_tower_free(t2);
    }
}

#[test]
fn bounds_and_local_heights() {
    let t = chain(4, "1");
    let (mut ok, mut n, mut m) = (false, 0i64, 0i64);
    let (mut lhs, mut bound) = (ptr::null_mut(), ptr::null_mut());
    // a - 1 = 8, b = 4: orders 3 and 2 at 2.
    let st = unsafe {
        fh_per_prime_bound(t, c("9").as_ptr(), c("4").as_ptr(), c("2").as_ptr(), &mut ok, &mut n, &mut m, &mut lhs, &mut bound)
    };
    assert_eq!(st, FhStatus::Ok);
    assert!(ok);
    assert_eq!((n, m), (3, 2));
    // Only E(1), from (0/1, 1/0), contributes: min(3, 2) = 2. The bound is
    // lambda_2(Y = 0) = ord_2(b) log 2.
    assert_eq!(take(lhs), "log(4)");
    assert_eq!(take(bound), "log(4)");

    let mut v = ptr::null_mut();
    assert_eq!(
        unsafe { fh_local_contrib(t, 2, c("9").as_ptr(), c("4").as_ptr(), c("2").as_ptr(), &mut v) },
        FhStatus::Ok
    );
    take(v);
    let st = unsafe { fh_per_prime_bound(t, c("9").as_ptr(), c("4").as_ptr(), c("inf").as_ptr(), &mut ok, ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, FhStatus::InvalidArgument);
    let st = unsafe { fh_per_prime_bound(t, c("1").as_ptr(), c("4").as_ptr(), c("2").as_ptr(), &mut ok, ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, FhStatus::Undefined);
    let st = unsafe { fh_per_prime_bound(t, c("9").as_ptr(), c("4").as_ptr(), c("4").as_ptr(), &mut ok, ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, FhStatus::InvalidArgument);
    unsafe { fh_tower_free(t) };
}

#[test]
fn farey_data() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fh_phi(c("1/2").as_ptr(), c("1/2").as_ptr(), &mut s) }, FhStatus::Ok);
    let at_alpha = take(s);
    assert_eq!(unsafe { fh_phi(c("1/2").as_ptr(), c("2/5").as_ptr(), &mut s) }, FhStatus::Ok);
    let inside = take(s);
    assert_ne!(at_alpha, inside);
    let mut level = 0;
    assert_eq!(unsafe { fh_first_level(c("3/5").as_ptr(), &mut level) }, FhStatus::Ok);
    assert_eq!(level, 4);
    assert_eq!(unsafe { fh_farey_interval(c("3/7").as_ptr(), 2, &mut s) }, FhStatus::Ok);
    assert!(take(s).contains("1/2"));
    assert_eq!(unsafe { fh_height(c("-9/2").as_ptr(), &mut s) }, FhStatus::Ok);
    assert_eq!(take(s), "log(9)");
}

#[test]
fn errors() {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { fh_tower_chain(3, c("1/0").as_ptr(), &mut t) }, FhStatus::ParseError);
    assert!(t.is_null());
    assert_eq!(unsafe { fh_tower_chain(3, c("0").as_ptr(), &mut t) }, FhStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { fh_tower_new(c("ladder:3").as_ptr(), c("1").as_ptr(), &mut t) }, FhStatus::ParseError);
    assert!(last_error().contains("ladder"));
    assert_eq!(unsafe { fh_tower_chain(3, ptr::null(), &mut t) }, FhStatus::NullPointer);
    assert_eq!(unsafe { fh_tower_chain(3, c("1").as_ptr(), ptr::null_mut()) }, FhStatus::NullPointer);
    let mut len = 0;
    assert_eq!(unsafe { fh_tower_len(ptr::null(), &mut len) }, FhStatus::NullPointer);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fh_phi(c("2").as_ptr(), c("1/2").as_ptr(), &mut s) }, FhStatus::InvalidArgument);
    unsafe {
        fh_tower_free(ptr::null_mut());
        fh_string_free(ptr::null_mut());
    }
}

#[test]
fn scan_from_config() {
    let cfg = c("a-range = 2..20\nb-range = 1..8\nS = 2,3\ntower = chain:3\nno-points = true\n");
    let (mut out, mut violations) = (ptr::null_mut(), u64::MAX);
    assert_eq!(unsafe { fh_scan_vojta(cfg.as_ptr(), &mut out, &mut violations) }, FhStatus::Ok);
    let doc: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(violations, 0);
    assert_eq!(doc["config"]["tower"], "chain:3");
    assert!(doc.get("timestamp").is_none_or(|v| v.is_null()));
    assert_eq!(unsafe { fh_scan_vojta(c("color = red").as_ptr(), &mut out, ptr::null_mut()) }, FhStatus::ParseError);
}

#[test]
fn header_declares_every_export() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/farey_heights.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let exported: Vec<&str> = src
        .lines()
        .filter_map(|l| l.trim().split("extern \"C\" fn ").nth(1))
        .map(|r| r.split('(').next().unwrap())
        .collect();
    assert!(exported.len() >= 15);
    for f in exported {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct FhTower FhTower;"));
}

#[test]
fn c_program_links_against_static_lib() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test exe>
    let profile_dir: PathBuf = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libfarey_heights_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let exe = profile_dir.join("ffi_smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap_or_else(|e| panic!("cannot run {cc}: {e}"));
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.ends_with("ok\n"), "{stdout}");
}
