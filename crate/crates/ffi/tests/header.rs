use std::path::{Path, PathBuf};
use std::process::Command;

fn header_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("sepscope.h")
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(header_path()).unwrap();
    for decl in [
        "typedef struct SepDensity SepDensity;",
        "typedef struct SepPolytope SepPolytope;",
        "SEP_STATUS_OK = 0",
        "SEP_STATUS_PANIC = 99",
        "enum SepStatus sep_density_from_json(const char *json, struct SepDensity **out);",
        "void sep_density_free(struct SepDensity *rho);",
        "enum SepStatus sep_sm_measure(const struct SepDensity *rho, double *out);",
        "const char *sep_last_error_message(void);",
        "void sep_string_free(char *s);",
    ] {
        assert!(header.contains(decl), "header lacks `{decl}`");
    }
}

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

/// Compiles and runs a small C program against the static library.
#[test]
fn c_program_links_and_runs() {
    let Some(cc) = ["cc", "clang", "gcc"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let lib_dir = target_dir();
    if !lib_dir.join("libsepscope_ffi.a").exists() {
        eprintln!("static library not built at {}; skipping", lib_dir.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <math.h>
#include "sepscope.h"

int main(void) {
    SepDensity *rho = NULL;
    if (sep_werner_new(0.5, &rho) != SEP_STATUS_OK) return 10;
    double sm = 0.0;
    if (sep_sm_measure(rho, &sm) != SEP_STATUS_OK) return 11;
    if (fabs(sm - 0.1875) > 1e-12) return 12;
    SepScanResult scan;
    if (sep_segment_scan(rho, 101, &scan) != SEP_STATUS_OK) return 13;
    if (!scan.entangled || !scan.conclusive) return 14;
    sep_density_free(rho);
    if (sep_werner_new(3.0, &rho) != SEP_STATUS_BAD_PARAMETER) return 15;
    if (sep_last_error_message() == NULL) return 16;
    printf("ok %s\n", sep_version());
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("smoke");
    let include = header_path().parent().unwrap().to_path_buf();
    let status = Command::new(cc)
        .arg(&src)
        .arg(format!("-I{}", include.display()))
        .arg(lib_dir.join("libsepscope_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(Path::new(&exe)).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
