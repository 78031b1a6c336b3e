//! C ABI over `farey-heights`.
//!
//! Every function returns an [`FhStatus`]. Results are written through out
//! pointers; strings handed out are owned by the caller and released with
//! [`fh_string_free`]. Towers live behind the opaque [`FhTower`] handle.
//! On failure the message is kept per thread and read with
//! [`fh_last_error`]. Exact quantities cross the boundary as strings in the
//! same notation the CLI prints (`3/4`, `log(9/2)`).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use farey_heights::exact::Rat;
use farey_heights::harness::report::summary_json;
use farey_heights::harness::{vojta_scan, ConfigFile, ScanConfig, TowerSpec, SCAN_KEYS};
use farey_heights::places::{height_rat, Place};
use farey_heights::stern_brocot::{farey_interval, first_level, phi_direct};
use farey_heights::tower::{check_divisor_bookkeeping, local_contrib, per_prime_bound, SurfacePoint, Tower};
use farey_heights::Error;

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FhStatus {
    Ok = 0,
    /// A precondition failed: zero center, non-prime place, index out of range.
    InvalidArgument = 1,
    /// Malformed rational, tower spec or config text.
    ParseError = 2,
    /// The quantity is undefined there, e.g. a point on the boundary divisor.
    Undefined = 3,
    FactorEffort = 4,
    /// An exact sign could not be certified.
    Inconclusive = 5,
    NullPointer = 6,
    /// A panic or I/O failure inside the library.
    Internal = 7,
}

/// A tower of blowups over one center.
pub struct FhTower(Tower);

/// One exceptional divisor. `den` is 0 for the fraction `1/0`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FhNode {
    pub index: usize,
    pub num: u64,
    pub den: u64,
    pub mult_pullback: u64,
    pub discrepancy: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FhStatus {
    match e {
        Error::Parse(_) | Error::ZeroDenominator | Error::Config(_) => FhStatus::ParseError,
        Error::PointOnDivisor | Error::UndefinedAtLevel(_) => FhStatus::Undefined,
        Error::FactorEffort { .. } => FhStatus::FactorEffort,
        Error::Inconclusive { .. } => FhStatus::Inconclusive,
        Error::Io(_) => FhStatus::Internal,
        Error::NotPrime(_)
        | Error::InvalidBlowup(_)
        | Error::Precondition(_)
        | Error::Overflow(_)
        | Error::SizeCap(_) => FhStatus::InvalidArgument,
    }
}

struct Fail(FhStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

type Res<T> = std::result::Result<T, Fail>;

fn null(what: &str) -> Fail {
    Fail(FhStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure and turns panics into `Internal`.
fn guard(f: impl FnOnce() -> Res<()>) -> FhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FhStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            FhStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Res<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(FhStatus::ParseError, format!("{what} is not UTF-8")))
}

unsafe fn rat(p: *const c_char, what: &str) -> Res<Rat> {
    Ok(text(p, what)?.parse()?)
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Res<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Writes `s` to `out` when `out` is non-null.
unsafe fn put_string(out: *mut *mut c_char, s: String) {
    if !out.is_null() {
        out.write(CString::new(s).expect("no interior nul").into_raw());
    }
}

unsafe fn tower<'a>(t: *const FhTower) -> Res<&'a Tower> {
    t.as_ref().map(|t| &t.0).ok_or_else(|| null("tower"))
}

/// The message of the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a tower from a spec (`chain:N`, `t2:N` or `custom:P1,P2,...`) over
/// `center`.
///
/// # Safety
/// String arguments must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fh_tower_new(spec: *const c_char, center: *const c_char, out: *mut *mut FhTower) -> FhStatus {
    guard(|| {
        let spec: TowerSpec = text(spec, "spec")?.parse()?;
        let t = spec.build(rat(center, "center")?)?;
        put(out, Box::into_raw(Box::new(FhTower(t))), "out")
    })
}

/// The chain tower with `n` blowups.
///
/// # Safety
/// As for [`fh_tower_new`].
#[no_mangle]
pub unsafe extern "C" fn fh_tower_chain(n: usize, center: *const c_char, out: *mut *mut FhTower) -> FhStatus {
    guard(|| {
        let t = TowerSpec::Chain(n).build(rat(center, "center")?)?;
        put(out, Box::into_raw(Box::new(FhTower(t))), "out")
    })
}

/// The tower `X_n` of blowups at the ends of the intervals `I_n`.
///
/// # Safety
/// As for [`fh_tower_new`].
#[no_mangle]
pub unsafe extern "C" fn fh_tower_theorem2(n: usize, center: *const c_char, out: *mut *mut FhTower) -> FhStatus {
    guard(|| {
        let t = TowerSpec::Theorem2(n).build(rat(center, "center")?)?;
        put(out, Box::into_raw(Box::new(FhTower(t))), "out")
    })
}

/// # Safety
/// `t` must come from a tower constructor and not have been freed. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn fh_tower_free(t: *mut FhTower) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of exceptional divisors.
///
/// # Safety
/// `t` must be a live tower; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fh_tower_len(t: *const FhTower, out: *mut usize) -> FhStatus {
    guard(|| put(out, tower(t)?.len(), "out"))
}

/// The divisor `E(index)`, `index` counted from 1.
///
/// # Safety
/// `t` must be a live tower; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fh_tower_node(t: *const FhTower, index: usize, out: *mut FhNode) -> FhStatus {
    guard(|| {
        let n = tower(t)?.node(index)?;
        let node = FhNode {
            index: n.index,
            num: n.fraction.num(),
            den: n.fraction.den(),
            mult_pullback: n.mult_pullback,
            discrepancy: n.discrepancy,
        };
        put(out, node, "out")
    })
}

/// The spec string that rebuilds this tower.
///
/// # Safety
/// `t` must be a live tower; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fh_tower_spec(t: *const FhTower, out: *mut *mut c_char) -> FhStatus {
    guard(|| {
        let s = tower(t)?.spec_string();
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, s);
        Ok(())
    })
}

/// Whether the boundary divisor is reduced and the discrepancies match the
/// canonical-divisor expansion. `pullback` (optional) receives the pullback
/// of `XYZ = 0` as text.
///
/// # Safety
/// `t` must be a live tower; the flags writable; `pullback` writable or null.
#[no_mangle]
pub unsafe extern "C" fn fh_tower_bookkeeping(
    t: *const FhTower,
    reduced: *mut bool,
    canonical_ok: *mut bool,
    pullback: *mut *mut c_char,
) -> FhStatus {
    guard(|| {
        let r = check_divisor_bookkeeping(tower(t)?);
        put(reduced, r.reduced, "reduced")?;
        put(canonical_ok, r.canonical_ok, "canonical_ok")?;
        put_string(pullback, r.pullback_text);
        Ok(())
    })
}

/// Local height of `E(index)` at `[a : b : 1]` and the place `place` (`inf`
/// or a prime), as a log.
///
/// # Safety
/// `t` must be a live tower; strings nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fh_local_contrib(
    t: *const FhTower,
    index: usize,
    a: *const c_char,
    b: *const c_char,
    place: *const c_char,
    out: *mut *mut c_char,
) -> FhStatus {
    guard(|| {
        let t = tower(t)?;
        let p = SurfacePoint::new(rat(a, "a")?, rat(b, "b")?)?;
        let v: Place = text(place, "place")?.parse()?;
        let l = local_contrib(t, t.node(index)?, &p, &v)?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, l.to_string());
        Ok(())
    })
}

/// The per-prime bound at `[a : b : 1]` and the prime `p`. `ok` tells
/// whether it holds; the orders and both sides are optional outputs.
///
/// # Safety
/// `t` must be a live tower; strings nul-terminated; `ok` writable; the other
/// outputs writable or null.
#[no_mangle]
pub unsafe extern "C" fn fh_per_prime_bound(
    t: *const FhTower,
    a: *const c_char,
    b: *const c_char,
    p: *const c_char,
    ok: *mut bool,
    n_p: *mut i64,
    m_p: *mut i64,
    lhs: *mut *mut c_char,
    bound: *mut *mut c_char,
) -> FhStatus {
    guard(|| {
        let t = tower(t)?;
        let pt = SurfacePoint::new(rat(a, "a")?, rat(b, "b")?)?;
        let q = match text(p, "p")?.parse::<Place>()? {
            Place::Prime(q) => q,
            Place::Infinity => return Err(Fail(FhStatus::InvalidArgument, "p must be a prime".into())),
        };
        let r = per_prime_bound(t, &pt, &q)?;
        put(ok, r.ok, "ok")?;
        if !n_p.is_null() {
            n_p.write(r.n_p);
        }
        if !m_p.is_null() {
            m_p.write(r.m_p);
        }
        put_string(lhs, r.lhs.to_string());
        put_string(bound, r.bound.to_string());
        Ok(())
    })
}

/// `phi_alpha(x)` for `x` in the closed interval `I_alpha`.
///
/// # Safety
/// Strings nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fh_phi(alpha: *const c_char, x: *const c_char, out: *mut *mut c_char) -> FhStatus {
    guard(|| {
        let v = phi_direct(&rat(alpha, "alpha")?, &rat(x, "x")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, v.to_string());
        Ok(())
    })
}

/// The level-`level` Farey interval containing `x`, as `(a/b, c/d)`.
///
/// # Safety
/// `x` nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fh_farey_interval(x: *const c_char, level: u64, out: *mut *mut c_char) -> FhStatus {
    guard(|| {
        let iv = farey_interval(&rat(x, "x")?, level)?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, iv.to_string());
        Ok(())
    })
}

/// The Stern-Brocot level at which `x` first appears.
///
/// # Safety
/// `x` nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fh_first_level(x: *const c_char, out: *mut u64) -> FhStatus {
    guard(|| put(out, first_level(&rat(x, "x")?)?, "out"))
}

/// The height `h(x)` as a log.
///
/// # Safety
/// `x` nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fh_height(x: *const c_char, out: *mut *mut c_char) -> FhStatus {
    guard(|| {
        let h = height_rat(&rat(x, "x")?);
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, h.to_string());
        Ok(())
    })
}

/// Runs a Vojta scan described by `key = value` config text (the scan keys
/// of the CLI) and returns the summary JSON without a timestamp.
/// `violations` (optional) receives the number of per-prime violations.
///
/// # Safety
/// `config` nul-terminated; `out` writable; `violations` writable or null.
#[no_mangle]
pub unsafe extern "C" fn fh_scan_vojta(config: *const c_char, out: *mut *mut c_char, violations: *mut u64) -> FhStatus {
    guard(|| {
        let file = ConfigFile::parse(text(config, "config")?)?;
        file.check_known(SCAN_KEYS)?;
        let cfg = ScanConfig::from_config(&file)?;
        let r = vojta_scan(&cfg)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !violations.is_null() {
            violations.write(r.violations.len() as u64);
        }
        let doc = serde_json::to_string(&summary_json(&r, None)).map_err(|e| Fail(FhStatus::Internal, e.to_string()))?;
        put_string(out, doc);
        Ok(())
    })
}
