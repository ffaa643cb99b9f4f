//! C ABI over `nearring-core`.
//!
//! Objects are opaque handles created by `*_new` and released by the
//! matching `*_free`. Every fallible call returns an [`NrStatus`]; on
//! failure the message is available from [`nr_last_error_message`] on the
//! same thread. Strings returned by the library must be released with
//! [`nr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;
use std::time::Duration;

use nearring_core::constructions::build_example_nearring;
use nearring_core::nearring::{units_and_locality, verify_axioms, AdditiveGroup, NearringInstance, VerifyMode};
use nearring_core::pcgroup::{build_presentation, GroupId, PcPresentation};
use nearring_core::search::{search_local_nearrings, SearchOptions, SearchStatus};
use nearring_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotPrime = 3,
    PrimeTooSmall = 4,
    UnknownGroup = 5,
    CapExceeded = 6,
    Io = 7,
    Inconclusive = 8,
    Internal = 9,
}

/// Opaque group handle.
pub struct NrGroup {
    pres: Arc<PcPresentation>,
}

/// Opaque nearring handle.
pub struct NrNearring {
    inner: NearringInstance,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct NrAxiomSummary {
    pub is_nearring: bool,
    pub associativity: bool,
    pub left_distributivity: bool,
    pub left_identity: bool,
    pub right_identity: bool,
    pub zero_symmetric: bool,
    /// Total law instances evaluated.
    pub checks: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct NrLocality {
    pub unit_count: u64,
    pub non_unit_count: u64,
    pub is_local: bool,
    pub non_units_cyclic: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct NrSearchSummary {
    pub exhaustive: bool,
    pub result_count: u64,
    pub branches_explored: u64,
    pub endomorphisms: u64,
    pub identity_candidates: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NrStatus {
    match e {
        Error::NotPrime(_) => NrStatus::NotPrime,
        Error::PrimeTooSmall(_) => NrStatus::PrimeTooSmall,
        Error::UnknownGroup(_) => NrStatus::UnknownGroup,
        Error::CapExceeded { .. } => NrStatus::CapExceeded,
        Error::Io(_) | Error::Json(_) => NrStatus::Io,
        _ => NrStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), NrStatus>) -> NrStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NrStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            NrStatus::Internal
        }
    }
}

fn fail(e: Error) -> NrStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null() -> NrStatus {
    set_error("null pointer argument".into());
    NrStatus::NullPointer
}

unsafe fn cstr<'a>(s: *const c_char) -> Result<&'a str, NrStatus> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string is not UTF-8".into());
        NrStatus::InvalidArgument
    })
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, NrStatus> {
    p.as_mut().ok_or_else(null)
}

unsafe fn group<'a>(g: *const NrGroup) -> Result<&'a NrGroup, NrStatus> {
    g.as_ref().ok_or_else(null)
}

unsafe fn nearring<'a>(n: *const NrNearring) -> Result<&'a NrNearring, NrStatus> {
    n.as_ref().ok_or_else(null)
}

fn element(order: usize, x: u32) -> Result<u32, NrStatus> {
    if (x as usize) < order {
        Ok(x)
    } else {
        Err(fail(Error::InvalidElement(format!("index {x} out of range for order {order}"))))
    }
}

fn mode(exhaustive: bool, samples: u64, seed: u64) -> VerifyMode {
    if exhaustive {
        VerifyMode::Exhaustive
    } else {
        VerifyMode::Sampled { count: samples, seed }
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library.
#[no_mangle]
pub extern "C" fn nr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn nr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a named group (`h1`..`h4`, `c16`, `d16`, `qd16`, `q16`,
/// `g81-7`..`g81-10`). `p` is required for `h1`..`h4` and ignored
/// (pass 0) otherwise.
///
/// # Safety
/// `name` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nr_group_new(name: *const c_char, p: u32, out_group: *mut *mut NrGroup) -> NrStatus {
    guard(|| {
        let name = cstr(name)?;
        let slot = out(out_group)?;
        let id = GroupId::parse(name, (p != 0).then_some(p)).map_err(fail)?;
        let pres = build_presentation(id).map_err(fail)?;
        *slot = Box::into_raw(Box::new(NrGroup { pres: Arc::new(pres) }));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from [`nr_group_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nr_group_free(g: *mut NrGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nr_group_order(g: *const NrGroup, order: *mut u64) -> NrStatus {
    guard(|| {
        *out(order)? = group(g)?.pres.order() as u64;
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nr_group_exponent(g: *const NrGroup, exponent: *mut u32) -> NrStatus {
    guard(|| {
        *out(exponent)? = group(g)?.pres.exponent();
        Ok(())
    })
}

/// Sum of two elements given by canonical index.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nr_group_add(g: *const NrGroup, a: u32, b: u32, sum: *mut u32) -> NrStatus {
    guard(|| {
        let g = &group(g)?.pres;
        let n = g.order();
        let (a, b) = (element(n, a)?, element(n, b)?);
        *out(sum)? = AdditiveGroup::add(g.as_ref(), a, b);
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nr_group_neg(g: *const NrGroup, a: u32, neg: *mut u32) -> NrStatus {
    guard(|| {
        let g = &group(g)?.pres;
        let a = element(g.order(), a)?;
        *out(neg)? = AdditiveGroup::neg(g.as_ref(), a);
        Ok(())
    })
}

/// The explicit local nearring on H1(p), p > 3 prime.
///
/// # Safety
/// `out_nr` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nr_example_nearring_new(p: u32, out_nr: *mut *mut NrNearring) -> NrStatus {
    guard(|| {
        let slot = out(out_nr)?;
        let inner = build_example_nearring(p).map_err(fail)?;
        *slot = Box::into_raw(Box::new(NrNearring { inner }));
        Ok(())
    })
}

/// # Safety
/// `n` must be null or a live nearring handle.
#[no_mangle]
pub unsafe extern "C" fn nr_nearring_free(n: *mut NrNearring) {
    if !n.is_null() {
        drop(Box::from_raw(n));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nr_nearring_order(n: *const NrNearring, order: *mut u64) -> NrStatus {
    guard(|| {
        *out(order)? = nearring(n)?.inner.order() as u64;
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nr_nearring_identity(n: *const NrNearring, identity: *mut u32) -> NrStatus {
    guard(|| {
        *out(identity)? = nearring(n)?.inner.identity;
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nr_nearring_add(n: *const NrNearring, a: u32, b: u32, sum: *mut u32) -> NrStatus {
    guard(|| {
        let nr = &nearring(n)?.inner;
        let (a, b) = (element(nr.order(), a)?, element(nr.order(), b)?);
        *out(sum)? = nr.add(a, b);
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nr_nearring_mul(n: *const NrNearring, a: u32, b: u32, product: *mut u32) -> NrStatus {
    guard(|| {
        let nr = &nearring(n)?.inner;
        let (a, b) = (element(nr.order(), a)?, element(nr.order(), b)?);
        *out(product)? = nr.mul(a, b);
        Ok(())
    })
}

/// Checks the nearring axioms, exhaustively or on `samples` seeded
/// random triples per law.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nr_nearring_verify(
    n: *const NrNearring,
    exhaustive: bool,
    samples: u64,
    seed: u64,
    summary: *mut NrAxiomSummary,
) -> NrStatus {
    guard(|| {
        let nr = &nearring(n)?.inner;
        let slot = out(summary)?;
        let r = verify_axioms(nr, mode(exhaustive, samples, seed));
        *slot = NrAxiomSummary {
            is_nearring: r.is_nearring(),
            associativity: r.associativity.pass,
            left_distributivity: r.left_distributivity.pass,
            left_identity: r.left_identity.pass,
            right_identity: r.right_identity.pass,
            zero_symmetric: r.zero_symmetric,
            checks: r.associativity.checks
                + r.left_distributivity.checks
                + r.left_identity.checks
                + r.right_identity.checks
                + r.right_zero.checks,
        };
        Ok(())
    })
}

/// Units and the non-unit set.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nr_nearring_locality(n: *const NrNearring, locality: *mut NrLocality) -> NrStatus {
    guard(|| {
        let nr = &nearring(n)?.inner;
        let slot = out(locality)?;
        let l = units_and_locality(nr);
        *slot = NrLocality {
            unit_count: l.unit_count as u64,
            non_unit_count: l.l_order as u64,
            is_local: l.is_local,
            non_units_cyclic: l.l_cyclic,
        };
        Ok(())
    })
}

/// Axiom and locality reports as a JSON document. Release with
/// [`nr_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nr_nearring_report_json(
    n: *const NrNearring,
    exhaustive: bool,
    samples: u64,
    seed: u64,
    json: *mut *mut c_char,
) -> NrStatus {
    guard(|| {
        let nr = &nearring(n)?.inner;
        let slot = out(json)?;
        let axioms = verify_axioms(nr, mode(exhaustive, samples, seed));
        let locality = units_and_locality(nr);
        let v = serde_json::json!({
            "group": nr.group.name(),
            "order": nr.order(),
            "identity": nr.identity,
            "axioms": axioms,
            "locality": locality,
        });
        let text = serde_json::to_string(&v).map_err(|e| fail(e.into()))?;
        *slot = CString::new(text).expect("json has no nul").into_raw();
        Ok(())
    })
}

/// Searches a named group for local nearrings with identity
/// (`require_local = false` accepts any nearring with identity).
/// `budget_ms = 0` means unlimited. Returns [`NrStatus::Inconclusive`]
/// when the budget ran out; the summary is filled in either way.
///
/// # Safety
/// `name` must be a valid C string and `summary` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nr_search(
    name: *const c_char,
    require_local: bool,
    allow_large: bool,
    budget_ms: u64,
    summary: *mut NrSearchSummary,
) -> NrStatus {
    guard(|| {
        let name = cstr(name)?;
        let slot = out(summary)?;
        let id = GroupId::parse(name, None).map_err(fail)?;
        let pres = build_presentation(id).map_err(fail)?;
        let opts = SearchOptions {
            require_local,
            allow_large,
            budget: (budget_ms > 0).then(|| Duration::from_millis(budget_ms)),
            ..SearchOptions::default()
        };
        let r = search_local_nearrings(&pres, &opts).map_err(fail)?;
        *slot = NrSearchSummary {
            exhaustive: r.status == SearchStatus::Exhaustive,
            result_count: r.results.len() as u64,
            branches_explored: r.branches_explored,
            endomorphisms: r.endo_count as u64,
            identity_candidates: r.identity_candidates.len() as u64,
        };
        if r.status == SearchStatus::Inconclusive {
            set_error("search budget exhausted".into());
            return Err(NrStatus::Inconclusive);
        }
        Ok(())
    })
}
