//! C ABI over scenarios, transported densities, atoms and the acceptance suite.
//!
//! Every function returns an [`MkStatus`]; the message of the last failure on the
//! calling thread is available through [`mk_last_error`]. Handles are opaque and
//! must be released with the matching `*_free` function. Panics never cross the
//! boundary; they are reported as [`MkStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use monokinetic::harness::{
    builtin, run_acceptance, run_scenario, AcceptanceConfig, BuiltScenario, HarnessError, RunOptions, Scenario,
};
use monokinetic::transport::{PushSettings, Transport, TransportError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Numerical = 5,
    /// The query point lies on the caustic; the density is undefined there.
    Caustic = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// A validated scenario.
pub struct MkScenario {
    scenario: Scenario,
}

/// System, profile and initial measure built from a scenario.
pub struct MkModel {
    built: BuiltScenario,
    grid_points: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: MkStatus, message: impl Into<String>) -> MkStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.into());
    status
}

fn harness_status(e: HarnessError) -> MkStatus {
    let status = match e {
        HarnessError::Parse { .. } => MkStatus::Parse,
        HarnessError::Output { .. } => MkStatus::Io,
        HarnessError::Numerical(_) => MkStatus::Numerical,
        _ => MkStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

fn transport_status(e: TransportError) -> MkStatus {
    let status = match e {
        TransportError::Caustic { .. } => MkStatus::Caustic,
        TransportError::BadDensity(_) => MkStatus::InvalidArgument,
        _ => MkStatus::Numerical,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> MkStatus) -> MkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(MkStatus::Panic, msg)
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, MkStatus> {
    if s.is_null() {
        return Err(fail(MkStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(MkStatus::InvalidArgument, "string is not UTF-8"))
}

fn transport(m: &MkModel) -> Result<Transport<'_>, MkStatus> {
    Transport::with_options(&m.built.sys, &m.built.mu, m.built.opts)
        .map(|t| t.with_grid(m.grid_points))
        .map_err(transport_status)
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`) and returns the full length including the terminator.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn mk_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates scenario JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mk_scenario_from_json(json: *const c_char, out: *mut *mut MkScenario) -> MkStatus {
    guard(|| {
        if out.is_null() {
            return fail(MkStatus::NullPointer, "null output handle");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Scenario::from_json(text) {
            Ok(scenario) => {
                *out = Box::into_raw(Box::new(MkScenario { scenario }));
                MkStatus::Ok
            }
            Err(e) => harness_status(e),
        }
    })
}

/// Looks up a built-in scenario by name.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mk_scenario_builtin(name: *const c_char, out: *mut *mut MkScenario) -> MkStatus {
    guard(|| {
        if out.is_null() {
            return fail(MkStatus::NullPointer, "null output handle");
        }
        let name = match read_str(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match builtin(name) {
            Some(scenario) => {
                *out = Box::into_raw(Box::new(MkScenario { scenario }));
                MkStatus::Ok
            }
            None => harness_status(HarnessError::UnknownScenario(name.into())),
        }
    })
}

/// Replaces the truncation depth of Cantor-type profiles.
///
/// # Safety
/// `sc` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mk_scenario_set_depth(sc: *mut MkScenario, depth: u32) -> MkStatus {
    guard(|| {
        let Some(sc) = sc.as_mut() else {
            return fail(MkStatus::NullPointer, "null scenario");
        };
        let next = sc.scenario.clone().with_depth(depth);
        match next.validate() {
            Ok(()) => {
                sc.scenario = next;
                MkStatus::Ok
            }
            Err(e) => harness_status(e),
        }
    })
}

/// Runs the scenario and writes its artifacts and manifest into `out_dir`.
///
/// # Safety
/// `sc` must be a live handle and `out_dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn mk_scenario_run(sc: *const MkScenario, out_dir: *const c_char) -> MkStatus {
    guard(|| {
        let Some(sc) = sc.as_ref() else {
            return fail(MkStatus::NullPointer, "null scenario");
        };
        let dir = match read_str(out_dir) {
            Ok(d) => d,
            Err(s) => return s,
        };
        let opts = RunOptions {
            out: Some(PathBuf::from(dir)),
            ..Default::default()
        };
        match run_scenario(&sc.scenario, &opts) {
            Ok(_) => MkStatus::Ok,
            Err(e) => harness_status(e),
        }
    })
}

/// # Safety
/// `sc` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mk_scenario_free(sc: *mut MkScenario) {
    if !sc.is_null() {
        drop(Box::from_raw(sc));
    }
}

/// Builds the model objects of a scenario.
///
/// # Safety
/// `sc` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mk_model_new(sc: *const MkScenario, out: *mut *mut MkModel) -> MkStatus {
    guard(|| {
        let Some(sc) = sc.as_ref() else {
            return fail(MkStatus::NullPointer, "null scenario");
        };
        if out.is_null() {
            return fail(MkStatus::NullPointer, "null output handle");
        }
        match sc.scenario.build() {
            Ok(built) => {
                *out = Box::into_raw(Box::new(MkModel {
                    built,
                    grid_points: sc.scenario.grid_points,
                }));
                MkStatus::Ok
            }
            Err(e) => harness_status(e),
        }
    })
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mk_model_free(m: *mut MkModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of preimages of x under the time-t fold map within the support of
/// the initial density, and whether x is a caustic point.
///
/// # Safety
/// `m` must be a live handle; `count` and `caustic` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mk_model_fold_count(
    m: *const MkModel,
    t: f64,
    x: f64,
    count: *mut usize,
    caustic: *mut bool,
) -> MkStatus {
    guard(|| {
        let Some(m) = m.as_ref() else {
            return fail(MkStatus::NullPointer, "null model");
        };
        if count.is_null() || caustic.is_null() {
            return fail(MkStatus::NullPointer, "null output");
        }
        let tr = match transport(m) {
            Ok(tr) => tr,
            Err(s) => return s,
        };
        match tr.grid(t).and_then(|g| tr.fold.preimages_on(&g, x).map_err(Into::into)) {
            Ok(set) => {
                *count = set.count;
                *caustic = set.is_caustic_point;
                MkStatus::Ok
            }
            Err(e) => transport_status(e),
        }
    })
}

/// Fold-sum density Σ_j ρ^in(y_j)/J_t(y_j); [`MkStatus::Caustic`] on the caustic.
///
/// # Safety
/// `m` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mk_model_density_at(m: *const MkModel, t: f64, x: f64, value: *mut f64) -> MkStatus {
    guard(|| {
        let Some(m) = m.as_ref() else {
            return fail(MkStatus::NullPointer, "null model");
        };
        if value.is_null() {
            return fail(MkStatus::NullPointer, "null output");
        }
        let tr = match transport(m) {
            Ok(tr) => tr,
            Err(s) => return s,
        };
        match tr.density_at(t, x) {
            Ok(d) => {
                *value = d.value;
                MkStatus::Ok
            }
            Err(e) => transport_status(e),
        }
    })
}

/// Histogram of the transported measure: `bins` bin masses written to `total`
/// over the window returned in `window_lo`/`window_hi`.
///
/// # Safety
/// `m` must be a live handle, `total` valid for `bins` doubles, the window
/// pointers valid.
#[no_mangle]
pub unsafe extern "C" fn mk_model_histogram(
    m: *const MkModel,
    t: f64,
    bins: usize,
    total: *mut f64,
    window_lo: *mut f64,
    window_hi: *mut f64,
) -> MkStatus {
    guard(|| {
        let Some(m) = m.as_ref() else {
            return fail(MkStatus::NullPointer, "null model");
        };
        if total.is_null() || window_lo.is_null() || window_hi.is_null() {
            return fail(MkStatus::NullPointer, "null output");
        }
        if bins == 0 {
            return fail(MkStatus::InvalidArgument, "bins must be positive");
        }
        let tr = match transport(m) {
            Ok(tr) => tr,
            Err(s) => return s,
        };
        let settings = PushSettings {
            bins,
            ..Default::default()
        };
        match tr.push_forward(t, &settings) {
            Ok(td) => {
                ptr::copy_nonoverlapping(td.total.as_ptr(), total, bins);
                *window_lo = td.window.0;
                *window_hi = td.window.1;
                MkStatus::Ok
            }
            Err(e) => transport_status(e),
        }
    })
}

/// Atoms of the transported measure at the candidate points. Up to `cap`
/// locations and masses are written; `found` receives the total number, and
/// [`MkStatus::BufferTooSmall`] is returned when it exceeds `cap`.
///
/// # Safety
/// `m` must be a live handle, `candidates` valid for `n` doubles, `xs` and
/// `masses` valid for `cap` doubles and `found` a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn mk_model_atoms(
    m: *const MkModel,
    t: f64,
    candidates: *const f64,
    n: usize,
    xs: *mut f64,
    masses: *mut f64,
    cap: usize,
    found: *mut usize,
) -> MkStatus {
    guard(|| {
        let Some(m) = m.as_ref() else {
            return fail(MkStatus::NullPointer, "null model");
        };
        if found.is_null() || (n > 0 && candidates.is_null()) || (cap > 0 && (xs.is_null() || masses.is_null())) {
            return fail(MkStatus::NullPointer, "null buffer");
        }
        let tr = match transport(m) {
            Ok(tr) => tr,
            Err(s) => return s,
        };
        let cands = if n == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(candidates, n)
        };
        match tr.detect_atoms(t, cands) {
            Ok(report) => {
                *found = report.atoms.len();
                for (i, a) in report.atoms.iter().take(cap).enumerate() {
                    *xs.add(i) = a.x;
                    *masses.add(i) = a.mass;
                }
                if report.atoms.len() > cap {
                    fail(
                        MkStatus::BufferTooSmall,
                        format!("{} atoms, capacity {cap}", report.atoms.len()),
                    )
                } else {
                    MkStatus::Ok
                }
            }
            Err(e) => transport_status(e),
        }
    })
}

/// Runs the acceptance criteria listed in `ids` (all twelve when `n` is 0) and
/// writes one pass flag per criterion run into `passed`.
///
/// # Safety
/// `ids` must be valid for `n` values, `passed` for `cap` flags and `count` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mk_acceptance_run(
    ids: *const u32,
    n: usize,
    passed: *mut bool,
    cap: usize,
    count: *mut usize,
) -> MkStatus {
    guard(|| {
        if count.is_null() || (n > 0 && ids.is_null()) || (cap > 0 && passed.is_null()) {
            return fail(MkStatus::NullPointer, "null buffer");
        }
        let only = if n == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(ids, n)
        };
        let report = run_acceptance(&AcceptanceConfig::default(), only, |_| {});
        *count = report.criteria.len();
        for (i, c) in report.criteria.iter().take(cap).enumerate() {
            *passed.add(i) = c.passed;
        }
        if report.criteria.len() > cap {
            return fail(
                MkStatus::BufferTooSmall,
                format!("{} criteria, capacity {cap}", report.criteria.len()),
            );
        }
        let failed: Vec<String> = report.criteria.iter().filter(|c| !c.passed).map(|c| c.line()).collect();
        if !failed.is_empty() {
            LAST_ERROR.with(|e| *e.borrow_mut() = failed.join("\n"));
        }
        MkStatus::Ok
    })
}
