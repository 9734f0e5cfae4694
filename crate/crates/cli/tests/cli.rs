//! End-to-end checks of the binary. Set `BLESS=1` to regenerate the shipped
//! example and the golden map output.

use std::path::{Path, PathBuf};
use std::process::Command;

use hpcli::io::{to_json, RepRecord};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperpolygon"))
}

fn bless() -> bool {
    std::env::var_os("BLESS").is_some()
}

fn check_file(path: &Path, bytes: &[u8]) {
    if bless() {
        std::fs::write(path, bytes).unwrap();
    }
    let want = std::fs::read(path).unwrap();
    assert!(want == bytes, "{} differs from the generated output", path.display());
}

#[test]
fn shipped_example_is_reproducible() {
    let rec = hpcli::example_n4().unwrap();
    check_file(&root().join("data/n4.json"), &to_json(&rec).unwrap());
}

#[test]
fn shipped_example_validates() {
    let out = bin().args(["validate"]).arg(root().join("data/n4.json")).output().unwrap();
    let log = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(0), "{log}");
    assert!(!log.contains("FAIL"));
}

#[test]
fn map_matches_golden() {
    let out = bin().args(["map"]).arg(root().join("data/n4.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    check_file(&root().join("tests/golden/map_n4.json"), &out.stdout);
}

#[test]
fn unitarize_is_idempotent_on_the_example() {
    let dir = tempdir();
    let path = dir.join("u.json");
    let st = bin().arg("unitarize").arg(root().join("data/n4.json")).arg("--out").arg(&path).status().unwrap();
    assert!(st.success());
    let a: RepRecord = serde_json::from_slice(&std::fs::read(root().join("data/n4.json")).unwrap()).unwrap();
    let b: RepRecord = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let d = a.x.iter().flatten().flatten().zip(b.x.iter().flatten().flatten()).fold(0f64, |m, (p, q)| m.max((p - q).abs()));
    assert!(d < 1e-9, "unitarize moved a unitary point by {d}");
}

fn tempdir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("hp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn corrupted(edit: impl FnOnce(&mut serde_json::Value)) -> PathBuf {
    let mut v: serde_json::Value = serde_json::from_slice(&std::fs::read(root().join("data/n4.json")).unwrap()).unwrap();
    edit(&mut v);
    let path = tempdir().join(format!("bad-{}.json", rand_name()));
    std::fs::write(&path, serde_json::to_vec(&v).unwrap()).unwrap();
    path
}

fn rand_name() -> u64 {
    use std::sync::atomic::{AtomicU64, Ordering};
    static N: AtomicU64 = AtomicU64::new(0);
    N.fetch_add(1, Ordering::Relaxed)
}

fn validate_log(path: &Path) -> (Option<i32>, String) {
    let out = bin().arg("validate").arg(path).output().unwrap();
    (out.status.code(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn validate_names_the_broken_invariant() {
    let p = corrupted(|v| v["y"][0][0][0] = serde_json::json!(3.0));
    let (code, log) = validate_log(&p);
    assert_eq!(code, Some(2));
    assert!(log.contains("invariant violated: residue nilpotency"), "{log}");

    let p = corrupted(|v| v["beta"] = serde_json::json!([0.5, 0.5, 0.5, 0.5]));
    let (code, log) = validate_log(&p);
    assert_eq!(code, Some(2));
    assert!(log.contains("invariant violated: weights generic"), "{log}");

    let p = corrupted(|v| {
        v["x"].as_array_mut().unwrap().pop();
    });
    let (code, log) = validate_log(&p);
    assert_eq!(code, Some(2));
    assert!(log.contains("invariant violated: shape"), "{log}");
}

#[test]
fn missing_file_is_an_error() {
    let out = bin().args(["map", "/nonexistent/rep.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_overrides_are_rejected() {
    let out = bin().arg("sweep").arg("morse").arg(root().join("data/n4.json")).args(["--eps", "0.7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eps"));
}

#[test]
fn gh_demo_table_shape() {
    let out = bin().args(["gh-demo", "--centers", "2"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("R,abs_x,V,V_inv"));
    assert_eq!(lines.count(), 4 * 21);
}

// short pairs for these weights: {1,2}, {1,3}, {2,3}
#[test]
fn torelli_reads_weights_only() {
    let p = tempdir().join("beta.json");
    std::fs::write(&p, r#"{"beta": [1.0, 1.1, 1.25, 1.4]}"#).unwrap();
    let out = bin().arg("torelli").arg(&p).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 3);
}
