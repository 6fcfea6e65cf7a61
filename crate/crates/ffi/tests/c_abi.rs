//! Compiles a C program against the generated header and the shared
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

#[test]
fn c_program_links_and_runs() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let deps = exe.parent().unwrap();
    let lib_dir = [deps, deps.parent().unwrap()]
        .into_iter()
        .find(|d| d.join("liballspeed_ffi.so").exists())
        .expect("cdylib next to the test binary")
        .to_path_buf();
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("allspeed_smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .arg("-lallspeed_ffi")
        .arg("-o")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "exit {:?}: {stdout}", run.status);
    assert!(stdout.starts_with("8 8 1 0.800 "), "{stdout}");
    assert!(stdout.contains("unknown case"), "{stdout}");
}
