//! Reproducibility gate for the experiment runner: the full suite, re-run
//! with identical configs, must byte-reproduce every report file (JSON, CSV,
//! and SVG; the run log is excluded because it records wall time).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_warpiso")
}

fn scratch_root() -> PathBuf {
    std::env::temp_dir().join(format!("warpiso-acceptance-{}", std::process::id()))
}

/// Run one experiment into `out`, returning (exit code, stdout+stderr).
fn run_experiment(name: &str, config: Option<&Path>, out: &Path, seed: u64) -> (i32, String) {
    let mut cmd = Command::new(bin());
    cmd.arg(name);
    if let Some(cfg) = config {
        cmd.arg("--config").arg(cfg);
    }
    cmd.arg("--out").arg(out);
    cmd.arg("--seed").arg(seed.to_string());
    let output = cmd.output().expect("spawn warpiso");
    let mut text = String::from_utf8_lossy(&output.stdout).into_owned();
    text.push_str(&String::from_utf8_lossy(&output.stderr));
    (output.status.code().unwrap_or(-1), text)
}

/// Every produced file except the wall-time log, keyed by file name.
fn report_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).expect("read output dir") {
        let entry = entry.expect("dir entry");
        let name = entry.file_name().to_string_lossy().into_owned();
        if name == "run.log" {
            continue;
        }
        files.insert(name, std::fs::read(entry.path()).expect("read report file"));
    }
    files
}

#[test]
fn acceptance_reproducibility() {
    let root = scratch_root();
    let _ = std::fs::remove_dir_all(&root);
    std::fs::create_dir_all(&root).expect("create scratch dir");

    // The full suite: every experiment the runner knows, at desk scale.
    let suite: [(&str, &str); 10] = [
        ("classify", "model = \"exp-horn\"\n"),
        (
            "verify-iso",
            "model = \"euclidean2\"\nshape = \"offset-circle(d=1, rho=1)\"\nweight = \"r^2\"\n",
        ),
        ("catalog4", "count = 2\n"),
        ("hm-check", "model = \"euclidean3\"\nk = 2\ncount = 3\n"),
        (
            "chain",
            "model = \"euclidean3\"\nshape = \"ellipsoid(2, 1.5, 1)\"\nl = 1\nk = 2\n",
        ),
        ("stability", "samples = 5\n"),
        ("small-ball", ""),
        ("power-annulus", ""),
        (
            "eigen-lambda",
            "model = \"euclidean3\"\nshape = \"offset-sphere(0.3, 1)\"\nks = [0, 1]\n",
        ),
        ("eigen-steklov", "domain = \"annulus(0.5, 1)\"\n"),
    ];

    let mut failures = 0usize;
    let mut compared_files = 0usize;
    for (name, config_text) in suite {
        let config = if config_text.is_empty() {
            None
        } else {
            let path = root.join(format!("{name}.cfg"));
            std::fs::write(&path, config_text).expect("write config");
            Some(path)
        };
        let out_a = root.join(name).join("a");
        let out_b = root.join(name).join("b");
        let (code_a, log_a) = run_experiment(name, config.as_deref(), &out_a, 7);
        let (code_b, _) = run_experiment(name, config.as_deref(), &out_b, 7);
        if code_a != 0 || code_b != 0 {
            println!("  {name}: exit codes {code_a}/{code_b}\n{log_a}");
            failures += 1;
            continue;
        }
        let files_a = report_files(&out_a);
        let files_b = report_files(&out_b);
        if files_a.is_empty() || !files_a.contains_key("report.json") {
            println!("  {name}: missing report.json");
            failures += 1;
            continue;
        }
        if files_a.keys().ne(files_b.keys()) {
            println!(
                "  {name}: file sets differ: {:?} vs {:?}",
                files_a.keys().collect::<Vec<_>>(),
                files_b.keys().collect::<Vec<_>>()
            );
            failures += 1;
            continue;
        }
        for (file, bytes_a) in &files_a {
            compared_files += 1;
            if bytes_a != &files_b[file] {
                println!("  {name}: {file} differs between identical runs");
                failures += 1;
            }
        }
    }

    // Config hygiene: a misspelled key must be rejected, not ignored —
    // silent drift would undermine the reproducibility promise above.
    let bad = root.join("bad.cfg");
    std::fs::write(&bad, "model = \"euclidean2\"\ntypo_key = 3\n").expect("write config");
    let (code, log) = run_experiment("classify", Some(&bad), &root.join("bad-out"), 0);
    if code != 2 || !log.contains("typo_key") {
        println!("  unknown config key: expected exit 2 naming the key, got {code}:\n{log}");
        failures += 1;
    }

    if failures == 0 {
        println!(
            "ACCEPTANCE 11 reproducibility: PASS — {} experiments re-run with identical \
             configs; {} report files byte-identical; unknown keys rejected",
            suite.len(),
            compared_files
        );
    } else {
        println!("ACCEPTANCE 11 reproducibility: FAIL — {failures} problem(s) above");
    }
    let _ = std::fs::remove_dir_all(&root);
    assert_eq!(failures, 0, "reproducibility criterion failed");
}
