//! C ABI over the affine-cluster engine.
//!
//! Every function returns an [`AcStatus`]; results go through out-pointers.
//! On failure the message is available from [`ac_last_error`] on the same
//! thread. Strings handed out must be released with [`ac_string_free`] and
//! handles with their `_free` function. Indices are 0-based.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use affine_cluster::cli::{self, Identity, RunConfig};
use affine_cluster::fixtures;
use affine_cluster::scatter2::{self, Scattering2};
use affine_cluster::seeds::{ExtendedExchangeMatrix, Seed};
use affine_cluster::theta::ThetaEngine;
use affine_cluster::{Error, RootVec, WeightVec};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotAffine = 3,
    NotAcyclic = 4,
    IdentityViolated = 5,
    NotFound = 6,
    BudgetExceeded = 7,
    Internal = 8,
    Panic = 9,
}

/// Theta functions, tubes and identity checks for one affine exchange matrix.
pub struct AcEngine(ThetaEngine);

/// A seed with principal coefficients.
pub struct AcSeed(Seed);

/// A completed rank-2 scattering diagram.
pub struct AcScattering(Scattering2);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(AcStatus, String);

fn status_of(e: &Error) -> AcStatus {
    match e {
        Error::NotAffineType => AcStatus::NotAffine,
        Error::NotAcyclic => AcStatus::NotAcyclic,
        Error::IdentityViolated(_) => AcStatus::IdentityViolated,
        Error::NotFound { .. } => AcStatus::NotFound,
        Error::BudgetExceeded(_) | Error::NonTerminating(_) => AcStatus::BudgetExceeded,
        Error::ContextMismatch | Error::NotDivisible | Error::NonInvertibleImage(_) | Error::NotPointed(_) => {
            AcStatus::Internal
        }
        _ => AcStatus::InvalidArgument,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn fail<T>(status: AcStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn set_error(msg: Option<String>) {
    let c = msg.map(|m| CString::new(m.replace('\0', " ")).unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            AcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(Some(msg));
            AcStatus::Panic
        }
    }
}

unsafe fn nonnull<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().map_or_else(|| fail(AcStatus::NullPointer, format!("{what} is null")), Ok)
}

unsafe fn slice<'a>(p: *const i64, len: usize, what: &str) -> Result<&'a [i64], Failure> {
    if p.is_null() {
        return fail(AcStatus::NullPointer, format!("{what} is null"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_vec(out: *mut i64, len: usize, v: &[i64]) -> Result<(), Failure> {
    if out.is_null() {
        return fail(AcStatus::NullPointer, "output buffer is null");
    }
    if len != v.len() {
        return fail(AcStatus::InvalidArgument, format!("output buffer has length {len}, need {}", v.len()));
    }
    ptr::copy_nonoverlapping(v.as_ptr(), out, len);
    Ok(())
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return fail(AcStatus::NullPointer, "output pointer is null");
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    write_out(out, CString::new(s).map_err(|_| Failure(AcStatus::Internal, "string contains NUL".into()))?.into_raw())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(AcStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(AcStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Row-major `n × n` matrix.
unsafe fn matrix(b: *const i64, n: usize) -> Result<Vec<Vec<i64>>, Failure> {
    if n == 0 {
        return fail(AcStatus::InvalidArgument, "rank must be positive");
    }
    let flat = slice(b, n.checked_mul(n).ok_or(Failure(AcStatus::InvalidArgument, "rank too large".into()))?, "matrix")?;
    Ok(flat.chunks(n).map(|r| r.to_vec()).collect())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ac_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ac_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ac_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds an engine from a row-major `n × n` exchange matrix.
///
/// # Safety
/// `b` must point to `n * n` readable integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_engine_new(b: *const i64, n: usize, out: *mut *mut AcEngine) -> AcStatus {
    guard(|| {
        let e = ThetaEngine::new(&matrix(b, n)?)?;
        write_out(out, boxed(AcEngine(e)))
    })
}

/// Builds an engine from a bundled matrix such as "A2tilde" or "kronecker".
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_engine_from_fixture(name: *const c_char, out: *mut *mut AcEngine) -> AcStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let Some(file) = fixtures::bundled(name) else {
            return fail(AcStatus::InvalidArgument, format!("no bundled matrix {name:?}"));
        };
        let e = ThetaEngine::new(&file.exchange_matrix())?;
        write_out(out, boxed(AcEngine(e)))
    })
}

/// # Safety
/// `e` must be NULL or a handle from `ac_engine_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ac_engine_free(e: *mut AcEngine) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_engine_rank(e: *const AcEngine, out: *mut usize) -> AcStatus {
    guard(|| write_out(out, nonnull(e, "engine")?.0.n()))
}

/// Writes δ in simple-root coordinates; `len` must equal the rank.
///
/// # Safety
/// `e` must be a live handle; `out` must hold `len` integers.
#[no_mangle]
pub unsafe extern "C" fn ac_engine_delta(e: *const AcEngine, out: *mut i64, len: usize) -> AcStatus {
    guard(|| write_vec(out, len, &nonnull(e, "engine")?.0.data.delta.0))
}

/// Writes ν_c of a nonnegative root vector.
///
/// # Safety
/// `e` must be a live handle; `root` and `out` must hold `len` integers.
#[no_mangle]
pub unsafe extern "C" fn ac_engine_nu_c(e: *const AcEngine, root: *const i64, out: *mut i64, len: usize) -> AcStatus {
    guard(|| {
        let e = &nonnull(e, "engine")?.0;
        if len != e.n() {
            return fail(AcStatus::InvalidArgument, format!("expected {} coordinates", e.n()));
        }
        let w = e.data.nu_c(&RootVec(slice(root, len, "root")?.to_vec()))?;
        write_vec(out, len, &w.0)
    })
}

/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_engine_tube_count(e: *const AcEngine, out: *mut usize) -> AcStatus {
    guard(|| write_out(out, nonnull(e, "engine")?.0.tubes.len()))
}

/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_engine_tube_size(e: *const AcEngine, tube: usize, out: *mut usize) -> AcStatus {
    guard(|| {
        let e = &nonnull(e, "engine")?.0;
        let Some(t) = e.tubes.get(tube) else {
            return fail(AcStatus::InvalidArgument, format!("no tube {tube}"));
        };
        write_out(out, t.size())
    })
}

/// Writes orbit element `index` of a tube.
///
/// # Safety
/// `e` must be a live handle; `out` must hold `len` integers.
#[no_mangle]
pub unsafe extern "C" fn ac_engine_tube_element(
    e: *const AcEngine,
    tube: usize,
    index: usize,
    out: *mut i64,
    len: usize,
) -> AcStatus {
    guard(|| {
        let e = &nonnull(e, "engine")?.0;
        let Some(beta) = e.tubes.get(tube).and_then(|t| t.orbit.get(index)) else {
            return fail(AcStatus::InvalidArgument, format!("no element {index} in tube {tube}"));
        };
        write_vec(out, len, &beta.0)
    })
}

/// ϑ of k·ν_c(δ) as text.
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_engine_theta_k_delta(e: *const AcEngine, k: i64, out: *mut *mut c_char) -> AcStatus {
    guard(|| {
        let t = nonnull(e, "engine")?.0.theta_k_delta(k)?;
        write_string(out, t.poly.to_string())
    })
}

/// ϑ of a weight on the imaginary wall or the g-vector of a cluster
/// variable, as text.
///
/// # Safety
/// `e` must be a live handle; `label` must hold `len` integers; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_engine_theta(
    e: *const AcEngine,
    label: *const i64,
    len: usize,
    out: *mut *mut c_char,
) -> AcStatus {
    guard(|| {
        let e = &nonnull(e, "engine")?.0;
        if len != e.n() {
            return fail(AcStatus::InvalidArgument, format!("expected {} coordinates", e.n()));
        }
        let label = WeightVec(slice(label, len, "label")?.to_vec());
        let t = cli::theta_for_label(e, &label).map_err(|c| {
            let status = if c.code == cli::EXIT_VIOLATION { AcStatus::IdentityViolated } else { AcStatus::InvalidArgument };
            Failure(status, c.message)
        })?;
        write_string(out, t.poly.to_string())
    })
}

/// Checks identities by name ("cheby", "imexch", comma-separated, or "all").
/// Returns `AC_STATUS_IDENTITY_VIOLATED` on the first failure.
///
/// # Safety
/// `e` must be a live handle; `identities` must be a NUL-terminated string;
/// `checked` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ac_engine_verify(
    e: *const AcEngine,
    identities: *const c_char,
    seed: u64,
    checked: *mut usize,
) -> AcStatus {
    guard(|| {
        let e = &nonnull(e, "engine")?.0;
        let ids = Identity::parse_list(str_arg(identities, "identities")?)
            .map_err(|c| Failure(AcStatus::InvalidArgument, c.message))?;
        let mut config = RunConfig::new("");
        config.seed = seed;
        let mut total = 0;
        for id in ids {
            total += cli::run_identity(e, id, &config).map_err(|err| match err {
                Error::IdentityViolated(m) => Failure(AcStatus::IdentityViolated, format!("{}: {m}", id.name())),
                other => other.into(),
            })?;
        }
        if !checked.is_null() {
            checked.write(total);
        }
        Ok(())
    })
}

/// Initial seed with principal coefficients for a row-major `n × n`
/// exchange matrix.
///
/// # Safety
/// `b` must point to `n * n` readable integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_seed_new(b: *const i64, n: usize, out: *mut *mut AcSeed) -> AcStatus {
    guard(|| {
        let ext = ExtendedExchangeMatrix::principal(&matrix(b, n)?)?;
        write_out(out, boxed(AcSeed(Seed::initial(ext))))
    })
}

/// # Safety
/// `s` must be NULL or a handle from `ac_seed_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ac_seed_free(s: *mut AcSeed) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Mutates the seed in place at index `k`.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ac_seed_mutate(s: *mut AcSeed, k: usize) -> AcStatus {
    guard(|| {
        let Some(s) = s.as_mut() else {
            return fail(AcStatus::NullPointer, "seed is null");
        };
        s.0 = s.0.mutate(k)?;
        Ok(())
    })
}

/// Cluster variable `i` as text.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_seed_cluster_variable(s: *const AcSeed, i: usize, out: *mut *mut c_char) -> AcStatus {
    guard(|| {
        let s = &nonnull(s, "seed")?.0;
        let Some(x) = s.cluster.get(i) else {
            return fail(AcStatus::InvalidArgument, format!("no cluster variable {i}"));
        };
        write_string(out, x.to_string())
    })
}

/// g-vector of cluster variable `i`.
///
/// # Safety
/// `s` must be a live handle; `out` must hold `len` integers.
#[no_mangle]
pub unsafe extern "C" fn ac_seed_g_vector(s: *const AcSeed, i: usize, out: *mut i64, len: usize) -> AcStatus {
    guard(|| {
        let s = &nonnull(s, "seed")?.0;
        if i >= s.cluster.len() {
            return fail(AcStatus::InvalidArgument, format!("no cluster variable {i}"));
        }
        write_vec(out, len, &s.g_vector(i)?.0)
    })
}

/// Completes the rank-2 scattering diagram of a row-major 2 × 2 matrix
/// through ŷ-degree `order`.
///
/// # Safety
/// `b` must point to 4 readable integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_scatter2_new(b: *const i64, order: usize, out: *mut *mut AcScattering) -> AcStatus {
    guard(|| {
        let sc = scatter2::complete_scattering_rank2(&matrix(b, 2)?, order)?;
        write_out(out, boxed(AcScattering(sc)))
    })
}

/// # Safety
/// `sc` must be NULL or a handle from `ac_scatter2_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ac_scatter2_free(sc: *mut AcScattering) {
    if !sc.is_null() {
        drop(Box::from_raw(sc));
    }
}

/// # Safety
/// `sc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_scatter2_wall_count(sc: *const AcScattering, out: *mut usize) -> AcStatus {
    guard(|| write_out(out, nonnull(sc, "diagram")?.0.walls.len()))
}

/// # Safety
/// `sc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_scatter2_is_consistent(sc: *const AcScattering, out: *mut bool) -> AcStatus {
    guard(|| write_out(out, scatter2::is_consistent(&nonnull(sc, "diagram")?.0)))
}

/// Broken-line theta function of `lambda` (2 integers) through ŷ-degree
/// `order`, as text.
///
/// # Safety
/// `sc` must be a live handle; `lambda` must point to 2 integers; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_scatter2_theta(
    sc: *const AcScattering,
    lambda: *const i64,
    order: usize,
    out: *mut *mut c_char,
) -> AcStatus {
    guard(|| {
        let sc = &nonnull(sc, "diagram")?.0;
        let l = WeightVec(slice(lambda, 2, "lambda")?.to_vec());
        write_string(out, scatter2::theta_via_broken_lines(sc, &l, order)?.to_string())
    })
}
