use std::ffi::{CStr, CString};
use std::ptr;

use toricpf_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(tpf_last_error()) }.to_string_lossy().into_owned()
}

fn standard(name: &str) -> *mut TpfFan {
    let name = CString::new(name).unwrap();
    let mut fan = ptr::null_mut();
    assert_eq!(unsafe { tpf_fan_standard(name.as_ptr(), &mut fan) }, TpfStatus::Ok);
    assert!(!fan.is_null());
    fan
}

fn mul(fan: *const TpfFan, q: i64) -> *mut TpfEndo {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { tpf_endo_mul(fan, q, &mut e) }, TpfStatus::Ok);
    e
}

#[test]
fn parses_fan_and_reads_rays() {
    let json = CString::new(r#"{"dim":1,"rays":[[1],[-1]],"cones":[[0],[1]]}"#).unwrap();
    let mut fan = ptr::null_mut();
    unsafe {
        assert_eq!(tpf_fan_parse(json.as_ptr(), &mut fan), TpfStatus::Ok);
        let (mut dim, mut n, mut rank) = (0usize, 0usize, 0usize);
        assert_eq!(tpf_fan_dim(fan, &mut dim), TpfStatus::Ok);
        assert_eq!(tpf_fan_num_rays(fan, &mut n), TpfStatus::Ok);
        assert_eq!(tpf_fan_pic_rank(fan, &mut rank), TpfStatus::Ok);
        assert_eq!((dim, n, rank), (1, 2, 1));
        let mut rays = [0i64; 2];
        assert_eq!(tpf_fan_rays(fan, rays.as_mut_ptr(), 2), TpfStatus::Ok);
        assert_eq!(rays, [1, -1]);
        assert_eq!(tpf_fan_rays(fan, rays.as_mut_ptr(), 1), TpfStatus::BufferTooSmall);
        let (mut smooth, mut complete) = (false, false);
        assert_eq!(tpf_fan_report(fan, &mut smooth, &mut complete), TpfStatus::Ok);
        assert!(smooth && complete);
        tpf_fan_free(fan);
    }
}

#[test]
fn parse_errors_are_reported() {
    let bad = CString::new(r#"{"dim":1,"rays":[[2],[-1]],"cones":[[0],[1]]}"#).unwrap();
    let garbage = CString::new("{").unwrap();
    let mut fan = ptr::null_mut();
    unsafe {
        assert_eq!(tpf_fan_parse(bad.as_ptr(), &mut fan), TpfStatus::Invalid);
        assert!(fan.is_null());
        assert!(last_error().contains("primitive"), "{}", last_error());
        assert_eq!(tpf_fan_parse(garbage.as_ptr(), &mut fan), TpfStatus::Parse);
        assert!(!last_error().is_empty());
        assert_eq!(tpf_fan_parse(ptr::null(), &mut fan), TpfStatus::NullPointer);
    }
}

#[test]
fn sections_and_positivity() {
    let fan = standard("P2");
    unsafe {
        let d = [2i64, 0, 0];
        let mut n = 0u64;
        assert_eq!(tpf_h0(fan, d.as_ptr(), 3, &mut n), TpfStatus::Ok);
        assert_eq!(n, 6);
        let mut pos = TpfPositivity::NotNef;
        assert_eq!(tpf_positivity(fan, d.as_ptr(), 3, &mut pos), TpfStatus::Ok);
        assert_eq!(pos, TpfPositivity::Ample);
        let z = [0i64; 3];
        assert_eq!(tpf_positivity(fan, z.as_ptr(), 3, &mut pos), TpfStatus::Ok);
        assert_eq!(pos, TpfPositivity::NefNotAmple);
        let mut c = [0i64; 1];
        assert_eq!(tpf_class_of(fan, d.as_ptr(), 3, c.as_mut_ptr(), 1), TpfStatus::Ok);
        assert_eq!(c, [2]);
        assert_eq!(tpf_h0(fan, d.as_ptr(), 2, &mut n), TpfStatus::Invalid);
        tpf_fan_free(fan);
    }
}

#[test]
fn pushforward_on_p1() {
    let fan = standard("P1");
    let e = mul(fan, 2);
    unsafe {
        let mut deg = 0i64;
        assert_eq!(tpf_endo_degree(e, &mut deg), TpfStatus::Ok);
        assert_eq!(deg, 2);
        let d = [0i64, 0];
        let mut dec = ptr::null_mut();
        assert_eq!(tpf_pushforward(e, d.as_ptr(), 2, &mut dec), TpfStatus::Ok);
        let mut len = 0usize;
        assert_eq!(tpf_decomposition_len(dec, &mut len), TpfStatus::Ok);
        assert_eq!(len, 2);
        let mut classes = Vec::new();
        for i in 0..len {
            let mut c = [0i64; 1];
            assert_eq!(tpf_decomposition_class(dec, i, c.as_mut_ptr(), 1), TpfStatus::Ok);
            classes.push(c[0]);
        }
        assert_eq!(classes, vec![-1, 0]);
        let mut c = [0i64; 1];
        assert_eq!(tpf_decomposition_class(dec, 5, c.as_mut_ptr(), 1), TpfStatus::Invalid);
        let mut passed = false;
        assert_eq!(tpf_verify(e, d.as_ptr(), 2, 2, &mut passed), TpfStatus::Ok);
        assert!(passed);
        tpf_decomposition_free(dec);
        tpf_endo_free(e);
        tpf_fan_free(fan);
    }
}

#[test]
fn swap_endomorphism() {
    let fan = standard("P1xP1");
    let m = [0i64, 1, 2, 0];
    let mut e = ptr::null_mut();
    unsafe {
        assert_eq!(tpf_endo_new(fan, m.as_ptr(), 4, &mut e), TpfStatus::Ok);
        let mut yes = false;
        let mut cert = [0i64; 2];
        assert_eq!(tpf_intamp(e, &mut yes, cert.as_mut_ptr(), 2), TpfStatus::Ok);
        assert!(yes);
        assert_eq!(cert, [3, 2]);
        let mut exp = 0i64;
        assert_eq!(tpf_contracting(e, &mut exp), TpfStatus::Ok);
        assert_eq!(exp, 2);
        tpf_endo_free(e);

        let id = mul(fan, 1);
        assert_eq!(tpf_intamp(id, &mut yes, cert.as_mut_ptr(), 2), TpfStatus::Ok);
        assert!(!yes);
        assert_eq!(tpf_contracting(id, &mut exp), TpfStatus::Ok);
        assert_eq!(exp, -1);
        tpf_endo_free(id);

        let shear = [1i64, 1, 0, 1];
        assert_eq!(tpf_endo_new(fan, shear.as_ptr(), 4, &mut e), TpfStatus::Invalid);
        assert!(e.is_null());
        assert!(last_error().contains("ray-compatible"), "{}", last_error());
        tpf_fan_free(fan);
    }
}

#[test]
fn null_handles_are_rejected() {
    unsafe {
        let mut n = 0usize;
        assert_eq!(tpf_fan_dim(ptr::null(), &mut n), TpfStatus::NullPointer);
        let mut deg = 0i64;
        assert_eq!(tpf_endo_degree(ptr::null(), &mut deg), TpfStatus::NullPointer);
        tpf_fan_free(ptr::null_mut());
        tpf_endo_free(ptr::null_mut());
        tpf_decomposition_free(ptr::null_mut());
    }
}

#[test]
fn header_is_generated() {
    let header = include_str!("../include/toricpf.h");
    for name in ["tpf_fan_parse", "tpf_intamp", "tpf_pushforward", "tpf_last_error", "TPF_STATUS_OK"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
