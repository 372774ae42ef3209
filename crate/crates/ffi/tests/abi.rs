use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use podles_ffi::*;

struct Param(*mut PodlesParam);

impl Param {
    fn new(q: f64) -> Self {
        let mut p = ptr::null_mut();
        assert_eq!(unsafe { podles_param_new(q, &mut p) }, PodlesStatus::Ok);
        Param(p)
    }
}

impl Drop for Param {
    fn drop(&mut self) {
        unsafe { podles_param_free(self.0) }
    }
}

struct Elem(*mut PodlesElement);

impl Drop for Elem {
    fn drop(&mut self) {
        unsafe { podles_element_free(self.0) }
    }
}

fn gen(p: &Param, g: PodlesGenerator) -> Elem {
    let mut x = ptr::null_mut();
    assert_eq!(unsafe { podles_element_new(p.0, g, &mut x) }, PodlesStatus::Ok);
    Elem(x)
}

fn mul(x: &Elem, y: &Elem) -> Elem {
    let mut z = ptr::null_mut();
    assert_eq!(unsafe { podles_element_multiply(x.0, y.0, &mut z) }, PodlesStatus::Ok);
    Elem(z)
}

fn haar(x: &Elem) -> PodlesComplex {
    let mut h = PodlesComplex::default();
    assert_eq!(unsafe { podles_element_haar(x.0, &mut h) }, PodlesStatus::Ok);
    h
}

fn last_error() -> String {
    let e = podles_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_string_lossy().into_owned()
}

#[test]
fn param_lifecycle_and_errors() {
    let p = Param::new(0.25);
    assert_eq!(unsafe { podles_param_q(p.0) }, 0.25);
    assert!(unsafe { podles_param_q(ptr::null()) }.is_nan());

    let mut bad = ptr::null_mut();
    for q in [0.0, -0.5, 1.5, f64::NAN] {
        assert_eq!(unsafe { podles_param_new(q, &mut bad) }, PodlesStatus::InvalidParameter);
        assert!(bad.is_null());
    }
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { podles_param_new(0.5, ptr::null_mut()) },
        PodlesStatus::NullPointer
    );
    unsafe { podles_param_free(ptr::null_mut()) };
}

#[test]
fn arithmetic_and_haar() {
    let p = Param::new(0.5);
    let a = gen(&p, PodlesGenerator::A);
    let a_star = gen(&p, PodlesGenerator::AStar);
    // h(a* a) = 1/[2]
    assert!((haar(&mul(&a_star, &a)).re - 0.8).abs() < 1e-14);
    assert_eq!(haar(&a), PodlesComplex::default());

    let mut adj = ptr::null_mut();
    assert_eq!(unsafe { podles_element_adjoint(a.0, &mut adj) }, PodlesStatus::Ok);
    let adj = Elem(adj);
    let mut diff = ptr::null_mut();
    let minus = PodlesComplex { re: -1.0, im: 0.0 };
    let mut neg = ptr::null_mut();
    assert_eq!(
        unsafe { podles_element_scale(a_star.0, minus, &mut neg) },
        PodlesStatus::Ok
    );
    let neg = Elem(neg);
    assert_eq!(unsafe { podles_element_add(adj.0, neg.0, &mut diff) }, PodlesStatus::Ok);
    let diff = Elem(diff);
    let mut norm = PodlesNorm::default();
    assert_eq!(unsafe { podles_gns_norm(diff.0, 8, 1e-6, &mut norm) }, PodlesStatus::Ok);
    assert!(norm.value < 1e-14);

    let other = Param::new(0.7);
    let b = gen(&other, PodlesGenerator::B);
    let mut z = ptr::null_mut();
    assert_eq!(
        unsafe { podles_element_multiply(a.0, b.0, &mut z) },
        PodlesStatus::ParameterMismatch
    );
    assert!(z.is_null());
    assert_eq!(
        unsafe { podles_element_add(ptr::null(), b.0, &mut z) },
        PodlesStatus::NullPointer
    );
    assert!(last_error().contains("null"));
}

#[test]
fn podles_generators_and_states() {
    let p = Param::new(0.6);
    let big_a = gen(&p, PodlesGenerator::SphereA);
    let a = gen(&p, PodlesGenerator::A);
    assert!(unsafe { podles_element_is_podles(big_a.0) });
    assert!(!unsafe { podles_element_is_podles(a.0) });
    assert!(!unsafe { podles_element_is_podles(ptr::null()) });

    let one = gen(&p, PodlesGenerator::One);
    let mut v = PodlesComplex::default();
    assert_eq!(unsafe { podles_state_hn(7, one.0, &mut v) }, PodlesStatus::Ok);
    assert!((v.re - 1.0).abs() < 1e-14 && v.im.abs() < 1e-14);

    let mut b = 0.0;
    assert_eq!(unsafe { podles_berezin_coeff(5, 0, p.0, &mut b) }, PodlesStatus::Ok);
    assert_eq!(b, 1.0);
    assert_eq!(unsafe { podles_berezin_coeff(5, 6, p.0, &mut b) }, PodlesStatus::Ok);
    assert_eq!(b, 0.0);

    let mut d1 = 0.0;
    let mut d2 = 0.0;
    assert_eq!(unsafe { podles_dq_upper(1, p.0, &mut d1) }, PodlesStatus::Ok);
    assert_eq!(unsafe { podles_dq_upper(8, p.0, &mut d2) }, PodlesStatus::Ok);
    assert!(d2 < d1 && d2 > 0.0);

    let mut lip = PodlesNorm::default();
    assert_eq!(unsafe { podles_lipnorm(big_a.0, 12, 1e-6, &mut lip) }, PodlesStatus::Ok);
    assert!(lip.value > 0.0 && lip.degree_used <= 12);
    assert_eq!(
        unsafe { podles_lipnorm(a.0, 12, 1e-6, &mut lip) },
        PodlesStatus::NotPodles
    );
    assert_eq!(
        unsafe { podles_lipnorm(big_a.0, 0, 1e-6, &mut lip) },
        PodlesStatus::InvalidArgument
    );
}

#[test]
fn rho_on_the_spectrum() {
    let p = Param::new(0.5);
    let pt = |kind, power, value| PodlesPoint { kind, power, value };
    let zero = pt(PodlesPointKind::Zero, 0, 0.0);
    let top = pt(PodlesPointKind::Power, 0, 0.0);
    let mut d = -1.0;
    assert_eq!(unsafe { podles_rho_q(zero, zero, p.0, &mut d) }, PodlesStatus::Ok);
    assert_eq!(d, 0.0);
    assert_eq!(unsafe { podles_rho_q(top, zero, p.0, &mut d) }, PodlesStatus::Ok);
    assert!(d > 0.0);
    let real = pt(PodlesPointKind::Real, 0, 0.3);
    assert_ne!(unsafe { podles_rho_q(real, zero, p.0, &mut d) }, PodlesStatus::Ok);

    let classical = Param::new(1.0);
    assert_eq!(
        unsafe { podles_rho_q(real, zero, classical.0, &mut d) },
        PodlesStatus::Ok
    );
    assert!(d > 0.0);
}

#[test]
fn json_round_trip() {
    let p = Param::new(0.5);
    let x = mul(&gen(&p, PodlesGenerator::SphereB), &gen(&p, PodlesGenerator::BStar));
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { podles_element_to_json(x.0, &mut text) }, PodlesStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { podles_element_from_json(text, &mut back) }, PodlesStatus::Ok);
    let back = Elem(back);
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { podles_element_to_json(back.0, &mut again) }, PodlesStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(text) }, unsafe { CStr::from_ptr(again) });
    unsafe {
        podles_string_free(text);
        podles_string_free(again);
        podles_string_free(ptr::null_mut());
    }

    let junk = CString::new("{not json").unwrap();
    let mut y = ptr::null_mut();
    assert_eq!(
        unsafe { podles_element_from_json(junk.as_ptr(), &mut y) },
        PodlesStatus::Parse
    );
    assert!(y.is_null());
    assert_eq!(
        unsafe { podles_element_from_json(ptr::null(), &mut y) },
        PodlesStatus::NullPointer
    );
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(podles_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/podles.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).expect("header is generated by the build script");
    for name in [
        "podles_last_error",
        "podles_version",
        "podles_param_new",
        "podles_param_free",
        "podles_element_new",
        "podles_element_multiply",
        "podles_element_to_json",
        "podles_string_free",
        "podles_state_hn",
        "podles_berezin_coeff",
        "podles_dq_upper",
        "podles_rho_q",
        "podles_gns_norm",
        "podles_lipnorm",
        "PODLES_STATUS_OK",
        "typedef struct PodlesElement PodlesElement",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

fn have(tool: &str) -> bool {
    Command::new(tool)
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

#[test]
fn c_program_links_against_the_static_library() {
    if !have("cc") {
        eprintln!("cc not found, skipping");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libpodles_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
