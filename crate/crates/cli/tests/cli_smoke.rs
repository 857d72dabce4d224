//! End-to-end binary checks: each subcommand against real files, the
//! documented exit codes, and byte-stable outputs under a fixed seed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn wayfarer(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wayfarer"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn assert_code(out: &Output, want: i32, what: &str) {
    let got = out.status.code().unwrap_or(-1);
    assert_eq!(
        got,
        want,
        "{what}: exit {got}, stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn bundled_tileset() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets/tileset.toml")
}

/// Every file under `dir`, relative path -> bytes, sorted.
fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn generate_validate_evaluate_report_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();

    let out = wayfarer(
        &["generate", "--preset", "a", "--count", "2", "--seed", "1", "--out", "levels"],
        root,
    );
    assert_code(&out, 0, "generate");
    let level1 = root.join("levels/level_a-1.toml");
    let level2 = root.join("levels/level_a-2.toml");
    assert!(level1.is_file() && level2.is_file());

    // Same command, fresh directory: identical bytes.
    let out = wayfarer(
        &["generate", "--preset", "a", "--count", "2", "--seed", "1", "--out", "again"],
        root,
    );
    assert_code(&out, 0, "generate again");
    assert_eq!(
        fs::read(&level1).unwrap(),
        fs::read(root.join("again/level_a-1.toml")).unwrap()
    );

    let out = wayfarer(&["validate-level", "levels/level_a-1.toml"], root);
    assert_code(&out, 0, "validate-level");
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok: level a-1"));

    let tileset = bundled_tileset();
    let out = wayfarer(&["validate-tileset", tileset.to_str().unwrap()], root);
    assert_code(&out, 0, "validate-tileset");

    let out = wayfarer(
        &[
            "evaluate",
            "--levels",
            "levels/level_a-1.toml",
            "--seed",
            "1",
            "--duration",
            "30",
            "--out",
            "run",
        ],
        root,
    );
    assert_code(&out, 0, "evaluate");
    let summary = root.join("run/summary.json");
    assert!(summary.is_file());
    assert!(root.join("run/fitness/a-1.json").is_file());
    let traces: Vec<_> = fs::read_dir(root.join("run/traces/a-1"))
        .unwrap()
        .collect();
    // 7 configs x 3 spawns.
    assert_eq!(traces.len(), 21);

    let out = wayfarer(&["report", "run", "--out", "charts"], root);
    assert_code(&out, 0, "report");
    let svgs = fs::read_dir(root.join("charts"))
        .unwrap()
        .filter(|e| {
            e.as_ref().unwrap().path().extension().map(|x| x == "svg") == Some(true)
        })
        .count();
    assert!(svgs > 0, "report produced no charts");
}

#[test]
fn evaluate_runs_are_byte_identical_across_invocations() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let out = wayfarer(
        &["generate", "--preset", "b", "--count", "1", "--seed", "3", "--out", "levels"],
        root,
    );
    assert_code(&out, 0, "generate");

    for dir in ["one", "two"] {
        let out = wayfarer(
            &[
                "evaluate",
                "--levels",
                "levels/level_b-3.toml",
                "--seed",
                "9",
                "--duration",
                "20",
                "--workers",
                "3",
                "--out",
                dir,
            ],
            root,
        );
        assert_code(&out, 0, "evaluate");
    }
    assert_eq!(snapshot(&root.join("one")), snapshot(&root.join("two")));
}

#[test]
fn input_mistakes_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();

    let out = wayfarer(&["validate-tileset", "no-such-file.toml"], root);
    assert_code(&out, 2, "missing tileset");

    fs::write(root.join("broken.toml"), "this is [not a level").unwrap();
    let out = wayfarer(&["validate-level", "broken.toml"], root);
    assert_code(&out, 2, "malformed level");

    let out = wayfarer(&["report", "empty-dir", "--out", "charts"], root);
    assert_code(&out, 2, "report on missing inputs");

    let out = wayfarer(&["evaluate", "--levels", "nope.toml"], root);
    assert_code(&out, 2, "evaluate on missing level");

    let out = wayfarer(&["no-such-command"], root);
    assert_code(&out, 2, "unknown subcommand");
}

#[test]
fn failed_work_exits_1_with_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let out = wayfarer(
        &["generate", "--preset", "a", "--count", "1", "--seed", "2", "--out", "levels"],
        root,
    );
    assert_code(&out, 0, "generate");

    // 30 spawn points at 100-unit separation cannot fit in a 350x350
    // world, so the battery records the failure and the run exits 1.
    let out = wayfarer(
        &[
            "evaluate",
            "--levels",
            "levels/level_a-2.toml",
            "--spawns",
            "30",
            "--duration",
            "10",
            "--out",
            "run",
        ],
        root,
    );
    assert_code(&out, 1, "unplaceable spawns");
    assert!(root.join("run/fitness/a-2.partial.json").is_file());
}
