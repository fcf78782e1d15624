//! C interface to the movable-antenna solver.
//!
//! Objects are opaque heap handles created by `*_new`/`ma_solve` and released
//! with the matching `*_free`. Every function returns a [`MaStatus`]; on
//! failure a description is available from [`ma_last_error_message`] on the
//! same thread. Panics are caught at the boundary and reported as
//! `MA_STATUS_PANIC`.
//!
//! Array outputs use caller-owned buffers: pass a pointer and its capacity in
//! elements; `MA_STATUS_BUFFER_TOO_SMALL` is returned if it does not fit.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ma_array_opt::baselines::{ao_optimize, aps_baseline, fpa_baseline, grid_oracle};
use ma_array_opt::model::{beam_gain, upper_bound, AntennaPositions, Beamformer, ScenarioConfig};
use ma_array_opt::optimizer::{mm_optimize, MMOptions};
use ma_array_opt::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Infeasible = 3,
    Numeric = 4,
    Unsupported = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaScheme {
    Mm = 0,
    Fpa = 1,
    Aps = 2,
    Ao = 3,
    Oracle = 4,
}

impl TryFrom<u32> for MaScheme {
    type Error = (MaStatus, String);

    fn try_from(v: u32) -> Result<Self, Self::Error> {
        Ok(match v {
            0 => MaScheme::Mm,
            1 => MaScheme::Fpa,
            2 => MaScheme::Aps,
            3 => MaScheme::Ao,
            4 => MaScheme::Oracle,
            _ => return Err((MaStatus::Config, format!("unknown scheme {v}"))),
        })
    }
}

/// Solver options. Obtain defaults from [`ma_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub multi_start: usize,
    pub seed: u64,
    /// Lattice spacing for `MA_SCHEME_ORACLE`.
    pub oracle_step: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MaSummary {
    pub lambda_max: f64,
    pub snr: f64,
    pub rate: f64,
    pub bound: f64,
    pub iterations: usize,
    pub n_antennas: usize,
}

/// Opaque scenario handle.
pub struct MaScenario {
    cfg: ScenarioConfig,
}

/// Opaque solution handle.
pub struct MaSolution {
    wavelength: f64,
    x: AntennaPositions,
    w: Beamformer,
    summary: MaSummary,
    trace: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> MaStatus {
    match e {
        Error::Config(_) | Error::Io { .. } | Error::Parse { .. } => MaStatus::Config,
        Error::Infeasible { .. } => MaStatus::Infeasible,
        Error::NotHermitian { .. } | Error::NoConvergence { .. } => MaStatus::Numeric,
        Error::Unsupported(_) => MaStatus::Unsupported,
    }
}

/// Runs `f` behind a panic guard, recording any error for the caller.
fn guard(f: impl FnOnce() -> Result<(), (MaStatus, String)>) -> MaStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MaStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            MaStatus::Panic
        }
    }
}

fn lib(e: Error) -> (MaStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (MaStatus, String) {
    (MaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (MaStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, cap: usize) -> Result<(), (MaStatus, String)> {
    if src.len() > cap {
        return Err((
            MaStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(null("output buffer"));
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ma_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ma_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn ma_options_default() -> MaOptions {
    let o = MMOptions::default();
    MaOptions {
        tol: o.tol,
        max_iters: o.max_iters,
        multi_start: o.multi_start,
        seed: o.rng_seed,
        oracle_step: 0.005,
    }
}

/// Creates a scenario. `angles` points to `n_receivers` angles in radians.
///
/// # Safety
/// `angles` must be valid for `n_receivers` reads and `out` for one write.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ma_scenario_new(
    n_antennas: usize,
    angles: *const f64,
    n_receivers: usize,
    segment_length: f64,
    min_spacing: f64,
    wavelength: f64,
    tx_power: f64,
    noise_power: f64,
    out: *mut *mut MaScenario,
) -> MaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let angles = match n_receivers {
            0 => Vec::new(),
            _ if angles.is_null() => return Err(null("angles")),
            m => std::slice::from_raw_parts(angles, m).to_vec(),
        };
        let cfg = ScenarioConfig::new(
            n_antennas,
            angles,
            segment_length,
            min_spacing,
            wavelength,
            tx_power,
            noise_power,
        )
        .map_err(lib)?;
        *out = Box::into_raw(Box::new(MaScenario { cfg }));
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or a handle from [`ma_scenario_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ma_scenario_free(scenario: *mut MaScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Performance ceiling `M N` on the principal eigenvalue.
///
/// # Safety
/// Pointers must be valid handles / writable.
#[no_mangle]
pub unsafe extern "C" fn ma_scenario_upper_bound(scenario: *const MaScenario, out: *mut f64) -> MaStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = upper_bound(&s.cfg);
        Ok(())
    })
}

/// Runs `scheme` (a [`MaScheme`] value) on `scenario`. `options` may be null
/// for defaults. Unknown scheme values yield `MA_STATUS_CONFIG`.
///
/// # Safety
/// `scenario` must be a live handle, `options` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_solve(
    scenario: *const MaScenario,
    scheme: u32,
    options: *const MaOptions,
    out: *mut *mut MaSolution,
) -> MaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let cfg = &deref(scenario, "scenario")?.cfg;
        let scheme = MaScheme::try_from(scheme)?;
        let o = options.as_ref().copied().unwrap_or_else(|| ma_options_default());
        let opts = MMOptions {
            tol: o.tol,
            max_iters: o.max_iters,
            multi_start: o.multi_start,
            rng_seed: o.seed,
        };
        let bound = upper_bound(cfg);
        let sol = match scheme {
            MaScheme::Mm => {
                let r = mm_optimize(cfg, &opts).map_err(lib)?;
                MaSolution {
                    wavelength: cfg.wavelength(),
                    summary: MaSummary {
                        lambda_max: r.lambda_max,
                        snr: r.snr,
                        rate: r.rate,
                        bound,
                        iterations: r.trace.iterations(),
                        n_antennas: cfg.n_antennas(),
                    },
                    trace: r.trace.lambdas().collect(),
                    x: r.x_opt,
                    w: r.w_opt,
                }
            }
            _ => {
                let r = match scheme {
                    MaScheme::Fpa => fpa_baseline(cfg),
                    MaScheme::Aps => aps_baseline(cfg),
                    MaScheme::Ao => opts.validate().and_then(|_| ao_optimize(cfg, &opts)),
                    MaScheme::Oracle => grid_oracle(cfg, o.oracle_step),
                    MaScheme::Mm => unreachable!(),
                }
                .map_err(lib)?;
                MaSolution {
                    wavelength: cfg.wavelength(),
                    summary: MaSummary {
                        lambda_max: r.lambda_max,
                        snr: r.snr,
                        rate: r.rate,
                        bound,
                        iterations: r.meta.iterations,
                        n_antennas: cfg.n_antennas(),
                    },
                    trace: r.trace,
                    x: r.x,
                    w: r.w,
                }
            }
        };
        *out = Box::into_raw(Box::new(sol));
        Ok(())
    })
}

/// # Safety
/// `solution` must be null or a handle from [`ma_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ma_solution_free(solution: *mut MaSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// # Safety
/// `solution` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_solution_summary(solution: *const MaSolution, out: *mut MaSummary) -> MaStatus {
    guard(|| {
        let s = deref(solution, "solution")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = s.summary;
        Ok(())
    })
}

/// Copies the `N` antenna positions into `buf`.
///
/// # Safety
/// `buf` must be valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn ma_solution_positions(
    solution: *const MaSolution,
    buf: *mut f64,
    capacity: usize,
) -> MaStatus {
    guard(|| copy_out(deref(solution, "solution")?.x.as_slice(), buf, capacity))
}

/// Copies the beamformer as `2 N` interleaved `re, im` values.
///
/// # Safety
/// `buf` must be valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn ma_solution_beamformer(
    solution: *const MaSolution,
    buf: *mut f64,
    capacity: usize,
) -> MaStatus {
    guard(|| {
        let s = deref(solution, "solution")?;
        let flat: Vec<f64> = s.w.as_slice().iter().flat_map(|z| [z.re, z.im]).collect();
        copy_out(&flat, buf, capacity)
    })
}

/// Number of entries [`ma_solution_trace`] will write (0 for non-iterative schemes).
///
/// # Safety
/// `solution` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_solution_trace_len(solution: *const MaSolution, out: *mut usize) -> MaStatus {
    guard(|| {
        let s = deref(solution, "solution")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = s.trace.len();
        Ok(())
    })
}

/// Copies `lambda_max` per iteration, starting with the initial layout.
///
/// # Safety
/// `buf` must be valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn ma_solution_trace(
    solution: *const MaSolution,
    buf: *mut f64,
    capacity: usize,
) -> MaStatus {
    guard(|| copy_out(&deref(solution, "solution")?.trace, buf, capacity))
}

/// Beam gain `|a^H(x, theta) w|^2` of the solution at `theta` (radians).
///
/// # Safety
/// `solution` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_solution_beam_gain(
    solution: *const MaSolution,
    theta: f64,
    out: *mut f64,
) -> MaStatus {
    guard(|| {
        let s = deref(solution, "solution")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = beam_gain(s.x.as_slice(), &s.w, theta, s.wavelength);
        Ok(())
    })
}
