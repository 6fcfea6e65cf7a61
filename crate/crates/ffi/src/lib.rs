//! C interface to the allspeed solver.
//!
//! Every function returns an [`AllspeedStatus`]; results come back through
//! out-pointers. Simulations live behind an opaque handle created by
//! [`allspeed_simulation_new`] and released by [`allspeed_simulation_free`].
//! The message of the last failure on the calling thread is available from
//! [`allspeed_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use allspeed::cases::CaseManifest;
use allspeed::cli::{parse_config, to_config_text, RunConfig};
use allspeed::diagnostics::{checkerboard_metric, ind_p};
use allspeed::gas::{FaceGeometry, GasModel};
use allspeed::schemes::{interface_flux, Central, Dissipation, SchemeConfig};
use allspeed::solver::{SolverConfig, StructuredField};
use allspeed::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllspeedStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Config = 4,
    InvalidState = 5,
    InvalidGrid = 6,
    Numerical = 7,
    BlowUp = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// Dissipation schemes, in the order of the solver's scheme list.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllspeedDissipation {
    Roe = 0,
    PRoe = 1,
    ARoe = 2,
    TRoe = 3,
    LmRoe = 4,
    ARoeNew1 = 5,
    ARoeNew2 = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllspeedCentral {
    PlainAverage = 0,
    MimZero = 1,
    MimPressure = 2,
    MimMarch = 3,
}

/// Summary of a completed run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AllspeedRunReport {
    pub iterations: usize,
    /// Non-zero when a steady run met its tolerance or a transient run
    /// reached its end time.
    pub converged: i32,
    pub final_residual: f64,
    pub time: f64,
}

/// Opaque simulation handle.
pub struct AllspeedSimulation {
    manifest: CaseManifest,
    solver: SolverConfig,
    field: StructuredField,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> AllspeedStatus {
    match e {
        Error::InvalidState(_) => AllspeedStatus::InvalidState,
        Error::InvalidGrid(_) => AllspeedStatus::InvalidGrid,
        Error::Config(_) => AllspeedStatus::Config,
        Error::Numerical(_) => AllspeedStatus::Numerical,
        Error::BlowUp { .. } => AllspeedStatus::BlowUp,
        Error::Parse { .. } => AllspeedStatus::Parse,
        Error::Io(_) => AllspeedStatus::Io,
    }
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), (AllspeedStatus, String)>) -> AllspeedStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AllspeedStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            AllspeedStatus::Panic
        }
    }
}

fn lib(e: Error) -> (AllspeedStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (AllspeedStatus, String) {
    (AllspeedStatus::NullPointer, format!("{what} is null"))
}

unsafe fn sim_ref<'a>(sim: *const AllspeedSimulation) -> Result<&'a AllspeedSimulation, (AllspeedStatus, String)> {
    sim.as_ref().ok_or_else(|| null("simulation handle"))
}

unsafe fn sim_mut<'a>(sim: *mut AllspeedSimulation) -> Result<&'a mut AllspeedSimulation, (AllspeedStatus, String)> {
    sim.as_mut().ok_or_else(|| null("simulation handle"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), (AllspeedStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Copies `text` with a terminating NUL into `buf` when it fits and stores
/// the required size (including the NUL) in `*needed`.
unsafe fn copy_out(text: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), (AllspeedStatus, String)> {
    let n = text.len() + 1;
    if !needed.is_null() {
        needed.write(n);
    }
    if buf.is_null() || len < n {
        return Err((AllspeedStatus::BufferTooSmall, format!("buffer of {len} bytes, {n} needed")));
    }
    ptr::copy_nonoverlapping(text.as_ptr() as *const c_char, buf, text.len());
    buf.add(text.len()).write(0);
    Ok(())
}

impl From<AllspeedDissipation> for Dissipation {
    fn from(d: AllspeedDissipation) -> Self {
        Dissipation::ALL[d as usize]
    }
}

impl From<AllspeedCentral> for Central {
    fn from(c: AllspeedCentral) -> Self {
        Central::ALL[c as usize]
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn allspeed_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the last error message of this thread into `buf`.
///
/// # Safety
/// `buf` must point to `len` writable bytes or be null; `needed` must be
/// null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn allspeed_last_error_message(buf: *mut c_char, len: usize, needed: *mut usize) -> AllspeedStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match copy_out(&msg, buf, len, needed) {
        Ok(()) => AllspeedStatus::Ok,
        Err((s, _)) => s,
    }
}

/// Builds a simulation from configuration text (the format read by the
/// command-line front end) and sets it to its initial state.
///
/// # Safety
/// `config` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn allspeed_simulation_new(config: *const c_char, out: *mut *mut AllspeedSimulation) -> AllspeedStatus {
    guard(|| {
        if config.is_null() {
            return Err(null("config"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let text = CStr::from_ptr(config)
            .to_str()
            .map_err(|_| (AllspeedStatus::InvalidArgument, "config is not UTF-8".to_string()))?;
        let cfg = parse_config(text).map_err(lib)?;
        let manifest = cfg.manifest;
        let grid = manifest.build_grid().map_err(lib)?;
        let field = manifest.initial_field(grid).map_err(lib)?;
        let sim = AllspeedSimulation {
            manifest,
            solver: manifest.solver_config(),
            field,
        };
        out.write(Box::into_raw(Box::new(sim)));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `sim` must come from [`allspeed_simulation_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn allspeed_simulation_free(sim: *mut AllspeedSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Writes the fully resolved configuration text of the simulation.
///
/// # Safety
/// Pointer arguments follow [`allspeed_last_error_message`].
#[no_mangle]
pub unsafe extern "C" fn allspeed_simulation_config(
    sim: *const AllspeedSimulation,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> AllspeedStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let text = to_config_text(&RunConfig::for_manifest(s.manifest));
        copy_out(&text, buf, len, needed)
    })
}

/// Interior cell counts.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn allspeed_simulation_dims(
    sim: *const AllspeedSimulation,
    ni: *mut usize,
    nj: *mut usize,
) -> AllspeedStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        write(ni, s.field.grid().ni, "ni")?;
        write(nj, s.field.grid().nj, "nj")
    })
}

/// Advances `steps` iterations; the last step's density residual goes to
/// `*residual` when it is non-null. A blow-up leaves the field at the
/// last good state.
///
/// # Safety
/// `sim` must be a live handle; `residual` null or valid.
#[no_mangle]
pub unsafe extern "C" fn allspeed_simulation_step(
    sim: *mut AllspeedSimulation,
    steps: usize,
    residual: *mut f64,
) -> AllspeedStatus {
    guard(|| {
        let s = sim_mut(sim)?;
        let mut last = f64::NAN;
        for _ in 0..steps {
            last = s.field.step(&s.solver).map_err(lib)?.residual;
        }
        if !residual.is_null() {
            residual.write(last);
        }
        Ok(())
    })
}

/// Runs the configured march: to `t_final` for transient cases, to the
/// tolerance or the iteration cap for steady ones.
///
/// # Safety
/// `sim` must be a live handle; `report` null or valid.
#[no_mangle]
pub unsafe extern "C" fn allspeed_simulation_run(sim: *mut AllspeedSimulation, report: *mut AllspeedRunReport) -> AllspeedStatus {
    guard(|| {
        let s = sim_mut(sim)?;
        let run = s.manifest.run;
        let r = match run.t_final {
            Some(t) => {
                let n = s.field.run_until(&s.solver, t, run.max_iter).map_err(lib)?;
                AllspeedRunReport {
                    iterations: n,
                    converged: 1,
                    final_residual: s.field.residuals().last().map_or(0.0, |r| r.residual),
                    time: s.field.time(),
                }
            }
            None => {
                let o = s.field.run_steady(&s.solver, run.tol, run.max_iter).map_err(lib)?;
                AllspeedRunReport {
                    iterations: o.iterations,
                    converged: o.converged as i32,
                    final_residual: o.final_residual,
                    time: s.field.time(),
                }
            }
        };
        if !report.is_null() {
            report.write(r);
        }
        Ok(())
    })
}

/// Iteration count and physical (or pseudo) time reached.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn allspeed_simulation_progress(
    sim: *const AllspeedSimulation,
    iteration: *mut usize,
    time: *mut f64,
) -> AllspeedStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        write(iteration, s.field.iteration(), "iteration")?;
        write(time, s.field.time(), "time")
    })
}

/// Copies interior primitives `(rho, u, v, p)` per cell, row-major with `i`
/// fastest, into `buf` of `len` doubles (at least `4 ni nj`).
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn allspeed_simulation_primitives(
    sim: *const AllspeedSimulation,
    buf: *mut f64,
    len: usize,
) -> AllspeedStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let w = s.field.interior_primitives(&s.manifest.gas);
        if len < 4 * w.len() {
            return Err((AllspeedStatus::BufferTooSmall, format!("need {} doubles, got {len}", 4 * w.len())));
        }
        ptr::copy_nonoverlapping(w.as_ptr() as *const f64, buf, 4 * w.len());
        Ok(())
    })
}

/// Pressure fluctuation index `(p_max - p_min) / p_max` and the
/// checkerboard metric of the interior pressure (the latter is NaN on
/// grids narrower than four cells).
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn allspeed_simulation_diagnostics(
    sim: *const AllspeedSimulation,
    ind: *mut f64,
    checkerboard: *mut f64,
) -> AllspeedStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let g = s.field.grid();
        let p: Vec<f64> = s.field.interior_primitives(&s.manifest.gas).iter().map(|w| w[3]).collect();
        if !ind.is_null() {
            ind.write(ind_p(&p).map_err(lib)?);
        }
        if !checkerboard.is_null() {
            checkerboard.write(checkerboard_metric(&p, g.ni, g.nj).unwrap_or(f64::NAN));
        }
        Ok(())
    })
}

/// Numerical flux per unit length through a face with unit normal
/// `(nx, ny)` between primitive states `left` and `right` (each
/// `rho, u, v, p`), for an ideal gas with `gamma = 1.4`. `m_ref` is the
/// global reference Mach number of the cut-offs; the interface smoothing
/// scales `rho*` and `u*` are one and `m_ref` respectively.
///
/// # Safety
/// `left` and `right` must point to 4 doubles, `flux` to 4 writable ones.
#[no_mangle]
pub unsafe extern "C" fn allspeed_interface_flux(
    dissipation: AllspeedDissipation,
    central: AllspeedCentral,
    m_ref: f64,
    left: *const f64,
    right: *const f64,
    nx: f64,
    ny: f64,
    flux: *mut f64,
) -> AllspeedStatus {
    guard(|| {
        if left.is_null() || right.is_null() || flux.is_null() {
            return Err(null("state or flux pointer"));
        }
        if !(nx.is_finite() && ny.is_finite()) || nx == 0.0 && ny == 0.0 {
            return Err((AllspeedStatus::InvalidArgument, "normal must be finite and non-zero".into()));
        }
        let gas = GasModel::inviscid();
        let cfg = SchemeConfig {
            m_ref,
            u_star: m_ref,
            ..SchemeConfig::new(dissipation.into(), central.into())
        };
        cfg.validate().map_err(lib)?;
        let l = std::slice::from_raw_parts(left, 4);
        let r = std::slice::from_raw_parts(right, 4);
        let sl = gas.primitive(l[0], l[1], l[2], l[3]).map_err(lib)?;
        let sr = gas.primitive(r[0], r[1], r[2], r[3]).map_err(lib)?;
        let f = interface_flux(&gas, &sl, &sr, &FaceGeometry::unit(nx, ny), &cfg, None).map_err(lib)?;
        ptr::copy_nonoverlapping(f.as_ptr(), flux, 4);
        Ok(())
    })
}
