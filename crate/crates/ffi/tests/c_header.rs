//! Compiles and runs a C program against the generated header and the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "sdnguard.h"

int main(void) {
    SgScenario *s = NULL;
    const char *cfg = "duration = 10.0\nbenign_hosts = 4\nvictims = 1\n";
    if (sg_scenario_generate(cfg, 5, 2, &s) != SG_STATUS_OK) {
        fprintf(stderr, "generate: %s\n", sg_last_error());
        return 1;
    }
    SgSimReport *r = NULL;
    if (sg_simulate(s, NULL, true, NULL, 0, &r) != SG_STATUS_OK) {
        fprintf(stderr, "simulate: %s\n", sg_last_error());
        return 1;
    }
    if (sg_topology_validate("[switches]\nS1\nS2\n[gateway]\nS1\n", NULL) != SG_STATUS_PARSE) return 2;
    if (strlen(sg_last_error()) == 0) return 3;
    printf("%llu %llu\n", (unsigned long long)sg_scenario_packet_count(s), (unsigned long long)sg_sim_forwarded(r));
    sg_sim_free(r);
    sg_scenario_free(s);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(
        header_dir.join("sdnguard.h").exists(),
        "header not generated"
    );
    // The test binary lives in <target>/<profile>/deps.
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libsdnguard_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("smoke.c");
    let exe = work.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&header_dir)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler named `cc`");
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "smoke program failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let nums: Vec<u64> = text
        .split_whitespace()
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(nums.len(), 2);
    assert!(nums[0] > 0 && nums[1] > 0);
}
