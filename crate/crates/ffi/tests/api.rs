use std::ffi::{c_char, CStr, CString};
use std::ptr;

use allspeed_ffi::*;

fn last_error() -> String {
    let mut needed = 0usize;
    unsafe { allspeed_last_error_message(ptr::null_mut(), 0, &mut needed) };
    let mut buf = vec![0 as c_char; needed];
    let s = unsafe { allspeed_last_error_message(buf.as_mut_ptr(), buf.len(), ptr::null_mut()) };
    assert_eq!(s, AllspeedStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn new_sim(text: &str) -> Result<*mut AllspeedSimulation, AllspeedStatus> {
    let c = CString::new(text).unwrap();
    let mut sim = ptr::null_mut();
    match unsafe { allspeed_simulation_new(c.as_ptr(), &mut sim) } {
        AllspeedStatus::Ok => Ok(sim),
        s => {
            assert!(sim.is_null());
            Err(s)
        }
    }
}

#[test]
fn shock_tube_through_the_c_interface() {
    let sim = new_sim("[case]\nname = sod\n").unwrap();
    let mut rep = AllspeedRunReport::default();
    assert_eq!(unsafe { allspeed_simulation_run(sim, &mut rep) }, AllspeedStatus::Ok);
    assert_eq!(rep.converged, 1);
    assert!((rep.time - 0.2).abs() < 1e-14);
    let (mut ni, mut nj) = (0, 0);
    unsafe { allspeed_simulation_dims(sim, &mut ni, &mut nj) };
    assert_eq!((ni, nj), (200, 1));
    let mut w = vec![0.0; 4 * ni];
    assert_eq!(unsafe { allspeed_simulation_primitives(sim, w.as_mut_ptr(), w.len()) }, AllspeedStatus::Ok);
    assert!(w.chunks(4).all(|c| c[0] > 0.0 && c[3] > 0.0));
    assert_eq!(w[0], 1.0);
    let (mut it, mut t) = (0, 0.0);
    unsafe { allspeed_simulation_progress(sim, &mut it, &mut t) };
    assert_eq!(it, rep.iterations);
    let mut small = [0.0; 3];
    assert_eq!(
        unsafe { allspeed_simulation_primitives(sim, small.as_mut_ptr(), small.len()) },
        AllspeedStatus::BufferTooSmall
    );
    unsafe { allspeed_simulation_free(sim) };
}

#[test]
fn errors_map_to_codes() {
    assert_eq!(new_sim("[case]\nname = sod\n[solver]\nbogus = 1\n").unwrap_err(), AllspeedStatus::Parse);
    assert!(last_error().contains("line 4"));
    assert_eq!(new_sim("[case]\nname = cavity\nmach = 2\n").unwrap_err(), AllspeedStatus::Config);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { allspeed_simulation_new(ptr::null(), &mut out) }, AllspeedStatus::NullPointer);
    assert_eq!(unsafe { allspeed_simulation_step(ptr::null_mut(), 1, ptr::null_mut()) }, AllspeedStatus::NullPointer);
    unsafe { allspeed_simulation_free(ptr::null_mut()) };
}

#[test]
fn uniform_flow_is_preserved() {
    let sim = new_sim("[case]\nname = uniform\nmach = 0.3\n").unwrap();
    let mut res = f64::NAN;
    assert_eq!(unsafe { allspeed_simulation_step(sim, 20, &mut res) }, AllspeedStatus::Ok);
    assert!(res < 1e-13);
    let (mut ind, mut cb) = (1.0, 1.0);
    unsafe { allspeed_simulation_diagnostics(sim, &mut ind, &mut cb) };
    assert!(ind < 1e-13 && cb.abs() < 1e-12);
    let mut needed = 0;
    unsafe { allspeed_simulation_config(sim, ptr::null_mut(), 0, &mut needed) };
    let mut buf = vec![0 as c_char; needed];
    assert_eq!(unsafe { allspeed_simulation_config(sim, buf.as_mut_ptr(), needed, ptr::null_mut()) }, AllspeedStatus::Ok);
    let text = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned();
    assert!(text.contains("name = uniform") && text.contains("mach = 0.3"));
    unsafe { allspeed_simulation_free(sim) };
}

#[test]
fn flux_is_consistent_with_the_physical_flux() {
    let w = [1.0, 0.01, 0.002, 1.0 / 1.4];
    let mut f = [0.0; 4];
    for d in [AllspeedDissipation::Roe, AllspeedDissipation::ARoeNew2, AllspeedDissipation::PRoe] {
        let s = unsafe {
            allspeed_interface_flux(d, AllspeedCentral::MimZero, 0.01, w.as_ptr(), w.as_ptr(), 1.0, 0.0, f.as_mut_ptr())
        };
        assert_eq!(s, AllspeedStatus::Ok);
        let p = w[3];
        let exact = [w[1], w[1] * w[1] + p, w[1] * w[2], w[1] * (p / 0.4 + 0.5 * (w[1] * w[1] + w[2] * w[2]) + p)];
        for k in 0..4 {
            assert!((f[k] - exact[k]).abs() < 1e-14, "{d:?} {k}: {} vs {}", f[k], exact[k]);
        }
    }
    let bad = [1.0, 0.0, 0.0, -1.0];
    let s = unsafe {
        allspeed_interface_flux(AllspeedDissipation::Roe, AllspeedCentral::PlainAverage, 0.1, bad.as_ptr(), w.as_ptr(), 1.0, 0.0, f.as_mut_ptr())
    };
    assert_eq!(s, AllspeedStatus::InvalidState);
    let s = unsafe {
        allspeed_interface_flux(AllspeedDissipation::Roe, AllspeedCentral::PlainAverage, 0.1, w.as_ptr(), w.as_ptr(), 0.0, 0.0, f.as_mut_ptr())
    };
    assert_eq!(s, AllspeedStatus::InvalidArgument);
}
