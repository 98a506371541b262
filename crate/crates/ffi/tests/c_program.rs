//! Builds `examples/ellipse.c` against the generated header and the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

fn static_library() -> Option<PathBuf> {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libneutral_inclusion_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = static_library() else {
        eprintln!("static library not found next to the test binary; skipping");
        return;
    };
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("ellipse");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(root.join("include"))
        .arg(root.join("examples/ellipse.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status();
    let status = match status {
        Ok(s) => s,
        Err(e) => {
            eprintln!("no C compiler ({e}); skipping");
            return;
        }
    };
    assert!(status.success(), "C example failed to build");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let perfect: Vec<f64> = text
        .lines()
        .find_map(|l| l.strip_prefix("perfect"))
        .unwrap()
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    let pi = std::f64::consts::PI;
    assert!((perfect[0] + 2.5 * pi).abs() < 1e-5 && (perfect[3] + 1.5 * pi).abs() < 1e-5, "{text}");
    let weak: Vec<f64> = text
        .lines()
        .find_map(|l| l.strip_prefix("weak"))
        .unwrap()
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert!(weak.iter().all(|v| v.abs() < 1e-10), "{text}");
}
