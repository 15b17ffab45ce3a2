use std::path::Path;
use std::process::{Command, Output};

fn nojd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nojd")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn selftest_passes() {
    let out = nojd(&["selftest"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));
}

#[test]
fn generated_files_can_be_solved() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = nojd(&["gen", "--scenario", "ref5", "--seed", "3", "--runs", "2", "--out", d]);
    assert!(out.status.success());
    assert!(dir.path().join("scenario.toml").exists());
    let file = dir.path().join("instance_0001.nojd");
    for algo in ["cjdi", "basic"] {
        let out = nojd(&["run", file.to_str().unwrap(), "--algo", algo]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = stdout(&out);
        assert!(text.contains("converged"), "{text}");
    }
    let scenario = dir.path().join("scenario.toml");
    let again = tempfile::tempdir().unwrap();
    let out = nojd(&["gen", "--scenario", scenario.to_str().unwrap(), "--runs", "2", "--out", again.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&file).unwrap(), std::fs::read(again.path().join("instance_0001.nojd")).unwrap());
}

fn csv_files(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(csv_files(&path));
        } else if path.extension().is_some_and(|e| e == "csv") {
            out.push((path.strip_prefix(root).unwrap_or(&path).display().to_string(), std::fs::read(&path).unwrap()));
        }
    }
    out.sort();
    out
}

#[test]
fn campaigns_are_reproducible() {
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let args = ["campaign", "--scenario", "ref5", "--runs", "6", "--pl", "10,30", "--out", dir.path().to_str().unwrap()];
            let out = nojd(&args);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            assert!(dir.path().join("campaign.txt").exists());
            csv_files(dir.path())
        })
        .collect();
    assert_eq!(runs[0].len(), 4);
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn bad_arguments_fail_cleanly() {
    let out = nojd(&["run", "--scenario", "nonexistent"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown scenario"));
    let out = nojd(&["run", "--algo", "acdc"]);
    assert!(!out.status.success());
    let out = nojd(&["campaign", "--pl", "ten", "--runs", "1"]);
    assert!(!out.status.success());
}
