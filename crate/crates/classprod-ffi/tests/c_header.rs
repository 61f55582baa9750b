//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "classprod.h"

int main(void) {
    CpGroup *g = NULL;
    if (cp_group_new("GL3:2", &g) != CP_STATUS_OK) return 10;
    CpTuple *t = NULL;
    if (cp_tuple_new(g, "C7[1,1],C7[1,1],C2[0]", &t) != CP_STATUS_OK) return 11;
    char *n = NULL;
    if (cp_n_count(t, &n) != CP_STATUS_OK) return 12;
    int32_t yes = -1;
    if (cp_decide(t, &yes) != CP_STATUS_OK) return 13;
    printf("%s %d\n", n, yes);
    cp_string_free(n);
    cp_tuple_free(t);
    CpTuple *bad = NULL;
    if (cp_tuple_new(g, "C9[0]", &bad) != CP_STATUS_INVALID_INPUT || bad != NULL) return 14;
    if (strlen(cp_last_error()) == 0) return 15;
    cp_group_free(g);
    return 0;
}
"#;

/// target/<profile>, found from the test binary in target/<profile>/deps.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = profile_dir().join("libclassprod_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "336 1\n");
}
