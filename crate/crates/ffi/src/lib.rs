//! C ABI over `toricpf`.
//!
//! Objects are opaque handles released with the matching `*_free`. Every
//! fallible call returns a [`TpfStatus`]; on failure a message is kept per
//! thread and can be read with [`tpf_last_error`]. Divisors and classes are
//! passed as `int64_t` arrays.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use toricpf::cox::{contracting_exponent, cox_ring, induced_cox_endo};
use toricpf::divisor::{class_group, h0, positivity, PicLattice, Positivity, TorusDivisor};
use toricpf::endo::{build_endo, is_int_amplified, IntAmplified, ToricEndomorphism};
use toricpf::fan::{standard_fan, Fan};
use toricpf::io::parse_fan;
use toricpf::lattice::IntMatrix;
use toricpf::pushforward::{decompose_pushforward, verify_decomposition, Decomposition};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpfStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Input text or arrays could not be read.
    Parse = 2,
    /// Input was well formed but mathematically rejected.
    Invalid = 3,
    /// An output buffer was shorter than required.
    BufferTooSmall = 4,
    /// A result does not fit in 64 bits.
    Overflow = 5,
    /// Internal failure; the library caught a panic.
    Panic = 6,
}

/// Positivity of a divisor.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpfPositivity {
    Ample = 0,
    NefNotAmple = 1,
    NotNef = 2,
}

/// A validated fan together with its Picard lattice.
pub struct TpfFan {
    fan: Fan,
    pic: PicLattice,
}

/// A toric endomorphism of a fan.
pub struct TpfEndo {
    endo: ToricEndomorphism,
    pic: PicLattice,
}

/// A push-forward decomposition.
pub struct TpfDecomposition {
    dec: Decomposition,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let mut s = msg.into();
    s.retain(|c| c != '\0');
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

struct Failure(TpfStatus, String);

impl From<toricpf::error::Error> for Failure {
    fn from(e: toricpf::error::Error) -> Self {
        Failure(TpfStatus::Invalid, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TpfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TpfStatus::Ok
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            TpfStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(TpfStatus::NullPointer, "null pointer argument".into())
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(null)
}

unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(TpfStatus::Parse, "input is not UTF-8".into()))
}

unsafe fn divisor(fan: &Fan, coeffs: *const i64, len: usize) -> Result<TorusDivisor, Failure> {
    if len != fan.num_rays() {
        return Err(Failure(
            TpfStatus::Invalid,
            format!("divisor has {len} entries, fan has {} rays", fan.num_rays()),
        ));
    }
    if len == 0 {
        return Ok(TorusDivisor::zero(0));
    }
    if coeffs.is_null() {
        return Err(null());
    }
    let s = std::slice::from_raw_parts(coeffs, len);
    Ok(TorusDivisor::from_i64(s))
}

fn to_i64(x: &BigInt) -> Result<i64, Failure> {
    x.to_i64()
        .ok_or_else(|| Failure(TpfStatus::Overflow, format!("{x} does not fit in int64")))
}

unsafe fn write_ints(values: &[BigInt], buf: *mut i64, len: usize) -> Result<(), Failure> {
    if len < values.len() {
        return Err(Failure(
            TpfStatus::BufferTooSmall,
            format!("buffer holds {len}, need {}", values.len()),
        ));
    }
    if values.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(null());
    }
    let dst = std::slice::from_raw_parts_mut(buf, values.len());
    for (d, v) in dst.iter_mut().zip(values) {
        *d = to_i64(v)?;
    }
    Ok(())
}

fn boxed<T>(value: T, dst: &mut *mut T) {
    *dst = Box::into_raw(Box::new(value));
}

fn fan_handle(fan: Fan) -> Result<TpfFan, Failure> {
    let pic = class_group(&fan)?;
    Ok(TpfFan { fan, pic })
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn tpf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a fan from a JSON document.
#[no_mangle]
pub unsafe extern "C" fn tpf_fan_parse(json: *const c_char, out_fan: *mut *mut TpfFan) -> TpfStatus {
    guard(|| {
        let dst = out(out_fan)?;
        *dst = ptr::null_mut();
        let text = c_str(json)?;
        let doc = parse_fan(text).map_err(|e| Failure(TpfStatus::Parse, e.to_string()))?;
        let fan = doc.to_fan()?;
        boxed(fan_handle(fan)?, dst);
        Ok(())
    })
}

/// Builds a named standard fan such as `P2`, `F1` or `P1xP1`.
#[no_mangle]
pub unsafe extern "C" fn tpf_fan_standard(name: *const c_char, out_fan: *mut *mut TpfFan) -> TpfStatus {
    guard(|| {
        let dst = out(out_fan)?;
        *dst = ptr::null_mut();
        let fan = standard_fan(c_str(name)?)?;
        boxed(fan_handle(fan)?, dst);
        Ok(())
    })
}

/// Releases a fan. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tpf_fan_free(fan: *mut TpfFan) {
    if !fan.is_null() {
        drop(Box::from_raw(fan));
    }
}

#[no_mangle]
pub unsafe extern "C" fn tpf_fan_dim(fan: *const TpfFan, out_dim: *mut usize) -> TpfStatus {
    guard(|| {
        *out(out_dim)? = deref(fan)?.fan.dim();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tpf_fan_num_rays(fan: *const TpfFan, out_n: *mut usize) -> TpfStatus {
    guard(|| {
        *out(out_n)? = deref(fan)?.fan.num_rays();
        Ok(())
    })
}

/// Copies the rays row-major into `buf`, which must hold `num_rays * dim` entries.
#[no_mangle]
pub unsafe extern "C" fn tpf_fan_rays(fan: *const TpfFan, buf: *mut i64, len: usize) -> TpfStatus {
    guard(|| {
        let fan = &deref(fan)?.fan;
        let flat: Vec<BigInt> = fan.rays().iter().flatten().cloned().collect();
        write_ints(&flat, buf, len)
    })
}

#[no_mangle]
pub unsafe extern "C" fn tpf_fan_pic_rank(fan: *const TpfFan, out_rank: *mut usize) -> TpfStatus {
    guard(|| {
        *out(out_rank)? = deref(fan)?.pic.rank();
        Ok(())
    })
}

/// Reports smoothness and completeness.
#[no_mangle]
pub unsafe extern "C" fn tpf_fan_report(
    fan: *const TpfFan,
    out_smooth: *mut bool,
    out_complete: *mut bool,
) -> TpfStatus {
    guard(|| {
        let r = deref(fan)?.fan.report();
        *out(out_smooth)? = r.smooth;
        *out(out_complete)? = r.complete;
        Ok(())
    })
}

/// Writes the Picard class of a divisor into `buf` (length at least the Picard rank).
#[no_mangle]
pub unsafe extern "C" fn tpf_class_of(
    fan: *const TpfFan,
    coeffs: *const i64,
    len: usize,
    buf: *mut i64,
    buf_len: usize,
) -> TpfStatus {
    guard(|| {
        let h = deref(fan)?;
        let d = divisor(&h.fan, coeffs, len)?;
        write_ints(h.pic.class_of(&d).coords(), buf, buf_len)
    })
}

/// Dimension of the space of global sections of O(D).
#[no_mangle]
pub unsafe extern "C" fn tpf_h0(
    fan: *const TpfFan,
    coeffs: *const i64,
    len: usize,
    out_h0: *mut u64,
) -> TpfStatus {
    guard(|| {
        let h = deref(fan)?;
        let d = divisor(&h.fan, coeffs, len)?;
        *out(out_h0)? = h0(&h.fan, &d)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tpf_positivity(
    fan: *const TpfFan,
    coeffs: *const i64,
    len: usize,
    out_pos: *mut TpfPositivity,
) -> TpfStatus {
    guard(|| {
        let h = deref(fan)?;
        let d = divisor(&h.fan, coeffs, len)?;
        *out(out_pos)? = match positivity(&h.fan, &d)? {
            Positivity::Ample => TpfPositivity::Ample,
            Positivity::NefNotAmple => TpfPositivity::NefNotAmple,
            Positivity::NotNef => TpfPositivity::NotNef,
        };
        Ok(())
    })
}

fn endo_handle(h: &TpfFan, matrix: IntMatrix) -> Result<TpfEndo, Failure> {
    let endo = build_endo(&h.fan, matrix)?;
    Ok(TpfEndo { endo, pic: h.pic.clone() })
}

/// Multiplication by `q` on the lattice.
#[no_mangle]
pub unsafe extern "C" fn tpf_endo_mul(fan: *const TpfFan, q: i64, out_endo: *mut *mut TpfEndo) -> TpfStatus {
    guard(|| {
        let dst = out(out_endo)?;
        *dst = ptr::null_mut();
        let h = deref(fan)?;
        let e = endo_handle(h, IntMatrix::scalar(h.fan.dim(), q.into()))?;
        boxed(e, dst);
        Ok(())
    })
}

/// Endomorphism from a `dim x dim` row-major integer matrix.
#[no_mangle]
pub unsafe extern "C" fn tpf_endo_new(
    fan: *const TpfFan,
    matrix: *const i64,
    len: usize,
    out_endo: *mut *mut TpfEndo,
) -> TpfStatus {
    guard(|| {
        let dst = out(out_endo)?;
        *dst = ptr::null_mut();
        let h = deref(fan)?;
        let n = h.fan.dim();
        if len != n * n {
            return Err(Failure(TpfStatus::Invalid, format!("matrix has {len} entries, need {}", n * n)));
        }
        if matrix.is_null() {
            return Err(null());
        }
        let flat = std::slice::from_raw_parts(matrix, len);
        let rows: Vec<Vec<i64>> = flat.chunks(n.max(1)).map(<[i64]>::to_vec).collect();
        boxed(endo_handle(h, IntMatrix::from_rows(&rows)?)?, dst);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tpf_endo_free(endo: *mut TpfEndo) {
    if !endo.is_null() {
        drop(Box::from_raw(endo));
    }
}

#[no_mangle]
pub unsafe extern "C" fn tpf_endo_degree(endo: *const TpfEndo, out_deg: *mut i64) -> TpfStatus {
    guard(|| {
        *out(out_deg)? = to_i64(&deref(endo)?.endo.degree())?;
        Ok(())
    })
}

/// Decides int-amplification. When the answer is yes the certificate class is
/// written to `cert` (length at least the Picard rank).
#[no_mangle]
pub unsafe extern "C" fn tpf_intamp(
    endo: *const TpfEndo,
    out_yes: *mut bool,
    cert: *mut i64,
    cert_len: usize,
) -> TpfStatus {
    guard(|| {
        let h = deref(endo)?;
        let yes = out(out_yes)?;
        match is_int_amplified(&h.endo, &h.pic)? {
            IntAmplified::Yes { certificate } => {
                write_ints(certificate.coords(), cert, cert_len)?;
                *yes = true;
            }
            IntAmplified::No => *yes = false,
        }
        Ok(())
    })
}

/// Decomposes the push-forward of O(D).
#[no_mangle]
pub unsafe extern "C" fn tpf_pushforward(
    endo: *const TpfEndo,
    coeffs: *const i64,
    len: usize,
    out_dec: *mut *mut TpfDecomposition,
) -> TpfStatus {
    guard(|| {
        let dst = out(out_dec)?;
        *dst = ptr::null_mut();
        let h = deref(endo)?;
        let d = divisor(h.endo.fan(), coeffs, len)?;
        let dec = decompose_pushforward(&h.endo, &h.pic, &d)?;
        boxed(TpfDecomposition { dec }, dst);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tpf_decomposition_free(dec: *mut TpfDecomposition) {
    if !dec.is_null() {
        drop(Box::from_raw(dec));
    }
}

#[no_mangle]
pub unsafe extern "C" fn tpf_decomposition_len(dec: *const TpfDecomposition, out_len: *mut usize) -> TpfStatus {
    guard(|| {
        *out(out_len)? = deref(dec)?.dec.len();
        Ok(())
    })
}

/// Copies the class of summand `index` into `buf`.
#[no_mangle]
pub unsafe extern "C" fn tpf_decomposition_class(
    dec: *const TpfDecomposition,
    index: usize,
    buf: *mut i64,
    len: usize,
) -> TpfStatus {
    guard(|| {
        let dec = &deref(dec)?.dec;
        let s = dec.summands.get(index).ok_or_else(|| {
            Failure(TpfStatus::Invalid, format!("index {index} out of range ({})", dec.len()))
        })?;
        write_ints(s.class.coords(), buf, len)
    })
}

/// Decomposes and checks the result on every twist in the box `[-bound, bound]^r`.
#[no_mangle]
pub unsafe extern "C" fn tpf_verify(
    endo: *const TpfEndo,
    coeffs: *const i64,
    len: usize,
    bound: u32,
    out_passed: *mut bool,
) -> TpfStatus {
    guard(|| {
        let h = deref(endo)?;
        let passed = out(out_passed)?;
        let d = divisor(h.endo.fan(), coeffs, len)?;
        let dec = decompose_pushforward(&h.endo, &h.pic, &d)?;
        *passed = verify_decomposition(&h.endo, &h.pic, &d, &dec, bound).passed();
        Ok(())
    })
}

/// Contracting exponent of the induced Cox ring map, or -1 when there is none.
#[no_mangle]
pub unsafe extern "C" fn tpf_contracting(endo: *const TpfEndo, out_exp: *mut i64) -> TpfStatus {
    guard(|| {
        let h = deref(endo)?;
        let ring = cox_ring(h.endo.fan(), &h.pic)?;
        let phi = induced_cox_endo(&h.endo, &ring)?;
        *out(out_exp)? = contracting_exponent(&phi).map_or(-1, |e| e as i64);
        Ok(())
    })
}
