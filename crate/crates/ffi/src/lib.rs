//! C ABI over `cricket-hazard`.
//!
//! Careers and posterior samples cross the boundary as opaque handles that
//! the caller releases with the matching `*_free` function. Every fallible
//! call returns a [`ChStatus`]; on failure [`ch_last_error`] describes the
//! problem for the calling thread. Output buffers are caller-allocated; a
//! buffer that is too small yields `CH_STATUS_BUFFER_TOO_SMALL` and writes
//! the required length where the function documents it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cricket_hazard::evidence::{ais_log_evidence, quadrature_log_evidence_constant};
use cricket_hazard::model::log_likelihood;
use cricket_hazard::predictive::predictive_pmf;
use cricket_hazard::sampler::{run_chain, summarize, NamedQuery, Pairing};
use cricket_hazard::{AisConfig, Career, ChainConfig, Error, ModelKind, Params, PosteriorSamples};

/// Result codes shared by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Format = 4,
    InvalidConfig = 5,
    InvalidParams = 6,
    Usage = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChModel {
    Varying = 0,
    Constant = 1,
}

impl From<ChModel> for ModelKind {
    fn from(m: ChModel) -> Self {
        match m {
            ChModel::Varying => ModelKind::Varying,
            ChModel::Constant => ModelKind::Constant,
        }
    }
}

/// Opaque career handle.
pub struct ChCareer(Career);

/// Opaque posterior samples handle.
pub struct ChSamples(PosteriorSamples);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChCareerSummary {
    pub innings: usize,
    pub not_outs: usize,
    /// Runs per dismissal; NaN when there are no dismissals.
    pub average: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChEvidence {
    pub log_z: f64,
    /// Standard error of `log_z`.
    pub standard_error_log: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: ChStatus,
    message: String,
}

impl Failure {
    fn new(status: ChStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } => ChStatus::Parse,
            Error::Format { .. } => ChStatus::Format,
            Error::InvalidConfig(_) => ChStatus::InvalidConfig,
            Error::InvalidParams(_) => ChStatus::InvalidParams,
            Error::Usage(_) => ChStatus::Usage,
            Error::Io { .. } => ChStatus::Io,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).unwrap_or_default());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ChStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            ChStatus::Ok
        }
        Ok(Err(fail)) => {
            set_last_error(Some(fail.message));
            fail.status
        }
        Err(_) => {
            set_last_error(Some("internal panic".into()));
            ChStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(ChStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(ChStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(ChStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::new(ChStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_slice<'a>(p: *mut f64, len: usize, needed: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if len < needed {
        return Err(Failure::new(
            ChStatus::BufferTooSmall,
            format!("{what} holds {len} values, {needed} needed"),
        ));
    }
    if p.is_null() {
        return Err(Failure::new(ChStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, needed))
}

/// Message for the last failed call on this thread, or NULL after a
/// successful one. Valid until the next call into this library.
#[no_mangle]
pub extern "C" fn ch_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ch_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses career text (one innings per line, `*` marks a not-out).
///
/// # Safety
/// `text` and `player_id` must be NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ch_career_parse(
    text: *const c_char,
    player_id: *const c_char,
    out: *mut *mut ChCareer,
) -> ChStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let career = Career::parse(str_arg(text, "text")?, str_arg(player_id, "player_id")?)?;
        *out = Box::into_raw(Box::new(ChCareer(career)));
        Ok(())
    })
}

/// Loads a career file; the player id is the file stem.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ch_career_load(path: *const c_char, out: *mut *mut ChCareer) -> ChStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let career = Career::load(str_arg(path, "path")?)?;
        *out = Box::into_raw(Box::new(ChCareer(career)));
        Ok(())
    })
}

/// # Safety
/// `career` must come from this library and not be freed twice. NULL is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn ch_career_free(career: *mut ChCareer) {
    if !career.is_null() {
        drop(Box::from_raw(career));
    }
}

/// # Safety
/// `career` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ch_career_summary(career: *const ChCareer, out: *mut ChCareerSummary) -> ChStatus {
    guard(|| {
        let s = ref_arg(career, "career")?.0.summary();
        *out_arg(out, "out")? = ChCareerSummary {
            innings: s.innings,
            not_outs: s.not_outs,
            average: s.average.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Log likelihood of `params` (4 values for the varying model, 1 for the
/// constant model) on `career`.
///
/// # Safety
/// `career` must be a live handle; `params` must point to `len` values;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ch_log_likelihood(
    career: *const ChCareer,
    model: ChModel,
    params: *const f64,
    len: usize,
    out: *mut f64,
) -> ChStatus {
    guard(|| {
        let career = &ref_arg(career, "career")?.0;
        if params.is_null() {
            return Err(Failure::new(ChStatus::NullPointer, "params is null"));
        }
        let values = std::slice::from_raw_parts(params, len);
        let p = Params::from_values(model.into(), values)?;
        *out_arg(out, "out")? = log_likelihood(&p, career);
        Ok(())
    })
}

/// Runs a Metropolis-Hastings chain with adaptive step sizes during burn-in.
///
/// # Safety
/// `career` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ch_fit(
    career: *const ChCareer,
    model: ChModel,
    iterations: u64,
    burn_in: u64,
    thin: u64,
    seed: u64,
    out: *mut *mut ChSamples,
) -> ChStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let career = &ref_arg(career, "career")?.0;
        let config = ChainConfig::new(iterations, burn_in, thin, seed)?;
        let samples = run_chain(career, model.into(), &config);
        *out = Box::into_raw(Box::new(ChSamples(samples)));
        Ok(())
    })
}

/// # Safety
/// `samples` must come from this library and not be freed twice. NULL is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn ch_samples_free(samples: *mut ChSamples) {
    if !samples.is_null() {
        drop(Box::from_raw(samples));
    }
}

/// Number of retained draws; 0 for NULL.
///
/// # Safety
/// `samples` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ch_samples_len(samples: *const ChSamples) -> usize {
    samples.as_ref().map_or(0, |s| s.0.len())
}

/// Parameters per draw; 0 for NULL.
///
/// # Safety
/// `samples` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ch_samples_dim(samples: *const ChSamples) -> usize {
    samples.as_ref().map_or(0, |s| s.0.dim())
}

/// Overall acceptance rate; NaN for NULL.
///
/// # Safety
/// `samples` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ch_samples_acceptance_rate(samples: *const ChSamples) -> f64 {
    samples.as_ref().map_or(f64::NAN, |s| s.0.acceptance_rate)
}

/// Copies the draws row-major (`len * dim` values) into `buf`.
///
/// # Safety
/// `samples` must be a live handle; `buf` must hold `buf_len` values.
#[no_mangle]
pub unsafe extern "C" fn ch_samples_copy(samples: *const ChSamples, buf: *mut f64, buf_len: usize) -> ChStatus {
    guard(|| {
        let s = &ref_arg(samples, "samples")?.0;
        let dst = out_slice(buf, buf_len, s.len() * s.dim(), "buf")?;
        for (chunk, row) in dst.chunks_exact_mut(s.dim()).zip(s.rows()) {
            chunk.copy_from_slice(row);
        }
        Ok(())
    })
}

/// Posterior means and standard deviations, `dim` values each.
///
/// # Safety
/// `samples` must be a live handle; `means` and `sds` must hold `len`
/// values.
#[no_mangle]
pub unsafe extern "C" fn ch_samples_summary(
    samples: *const ChSamples,
    means: *mut f64,
    sds: *mut f64,
    len: usize,
) -> ChStatus {
    guard(|| {
        let s = &ref_arg(samples, "samples")?.0;
        let summary = summarize(s)?;
        out_slice(means, len, s.dim(), "means")?.copy_from_slice(&summary.means);
        out_slice(sds, len, s.dim(), "sds")?.copy_from_slice(&summary.sds);
        Ok(())
    })
}

/// # Safety
/// `samples` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ch_samples_save(samples: *const ChSamples, path: *const c_char) -> ChStatus {
    guard(|| {
        ref_arg(samples, "samples")?.0.save(str_arg(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ch_samples_load(path: *const c_char, out: *mut *mut ChSamples) -> ChStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let samples = PosteriorSamples::load(str_arg(path, "path")?)?;
        *out = Box::into_raw(Box::new(ChSamples(samples)));
        Ok(())
    })
}

/// Annealed importance sampling estimate of the log evidence, with the
/// default schedule exponent and moves per temperature.
///
/// # Safety
/// `career` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ch_ais_log_evidence(
    career: *const ChCareer,
    model: ChModel,
    num_runs: usize,
    num_temperatures: usize,
    seed: u64,
    out: *mut ChEvidence,
) -> ChStatus {
    guard(|| {
        let career = &ref_arg(career, "career")?.0;
        let config = AisConfig::new(num_runs, num_temperatures, 4.0, 3, seed)?;
        let e = ais_log_evidence(career, model.into(), &config);
        *out_arg(out, "out")? = ChEvidence {
            log_z: e.log_z,
            standard_error_log: e.standard_error_log,
        };
        Ok(())
    })
}

/// Constant-model log evidence by quadrature.
///
/// # Safety
/// `career` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ch_quadrature_log_evidence_constant(career: *const ChCareer, out: *mut f64) -> ChStatus {
    guard(|| {
        let career = &ref_arg(career, "career")?.0;
        *out_arg(out, "out")? = quadrature_log_evidence_constant(career);
        Ok(())
    })
}

/// Posterior-predictive pmf over `0..=x_max` (`x_max + 1` values) and the
/// mass beyond `x_max`.
///
/// # Safety
/// `samples` must be a live handle; `pmf` must hold `pmf_len` values;
/// `tail_mass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ch_predictive(
    samples: *const ChSamples,
    x_max: u32,
    pmf: *mut f64,
    pmf_len: usize,
    tail_mass: *mut f64,
) -> ChStatus {
    guard(|| {
        let s = &ref_arg(samples, "samples")?.0;
        let dst = out_slice(pmf, pmf_len, x_max as usize + 1, "pmf")?;
        let tail = out_arg(tail_mass, "tail_mass")?;
        let d = predictive_pmf(s, x_max)?;
        dst.copy_from_slice(&d.pmf);
        *tail = d.tail_mass;
        Ok(())
    })
}

/// Probability that the named query holds between players `a` and `b`.
/// With `cross_product` false the draws are paired after seeded shuffles.
///
/// # Safety
/// `a` and `b` must be live handles; `query` a NUL-terminated string;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ch_compare(
    a: *const ChSamples,
    b: *const ChSamples,
    query: *const c_char,
    cross_product: bool,
    seed: u64,
    out: *mut f64,
) -> ChStatus {
    guard(|| {
        let (a, b) = (&ref_arg(a, "a")?.0, &ref_arg(b, "b")?.0);
        let query: NamedQuery = str_arg(query, "query")?.parse()?;
        let pairing = if cross_product {
            Pairing::CrossProduct
        } else {
            Pairing::Shuffled { seed }
        };
        *out_arg(out, "out")? = query.evaluate(&[a, b], pairing)?.probability;
        Ok(())
    })
}
