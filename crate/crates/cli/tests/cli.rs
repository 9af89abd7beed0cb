use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

fn startup_macro() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/startup.mac")
}

#[test]
fn batch_macro_succeeds_and_writes_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run.mac");
    std::fs::write(&run, format!("/control/execute {}\n/run/beamOn 2\n", startup_macro().display())).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_multivis"))
        .args(["--batch", "--macro"])
        .arg(&run)
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svgs: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "svg"))
        .collect();
    assert!(!svgs.is_empty());
}

#[test]
fn batch_macro_with_error_fails() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mac");
    std::fs::write(&bad, "/vis/drawVolume\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_multivis"))
        .current_dir(dir.path())
        .args(["--batch", "--macro"])
        .arg(&bad)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.mac:1:") && err.contains("no current viewer"), "{err}");
}

#[test]
fn interactive_prompt_runs_commands_until_exit() {
    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_multivis"))
        .arg("--out-dir")
        .arg(dir.path())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"/vis/open ATree\n/vis/drawVolume\n/vis/viewer/flush\n/vis/nope\nexit\n/vis/list\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("vis> "));
    assert!(stdout.contains("\"Shape2\":0 / \"Shape2\""), "{stdout}");
    assert!(!stdout.contains("Registered graphics systems"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/vis/nope"));
    assert!(out.status.success());
}

#[test]
fn loads_geometry_and_events_files() {
    let dir = tempfile::tempdir().unwrap();
    let geometry = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/b1.json");
    let events = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/events.jsonl");
    let mac = dir.path().join("m.mac");
    std::fs::write(&mac, "/vis/open SceneExport\n/vis/drawVolume\n/vis/scene/add/trajectories\n/run/beamOn 1\n")
        .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_multivis"))
        .arg("--geometry")
        .arg(&geometry)
        .arg("--events")
        .arg(&events)
        .args(["--batch", "--macro"])
        .arg(&mac)
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.to_string_lossy().ends_with(".scene.json"))
        .max()
        .unwrap();
    let text = std::fs::read_to_string(doc).unwrap();
    assert!(text.contains("\"PN\"") && text.contains("\"proton\""), "event file trajectories missing");
}
