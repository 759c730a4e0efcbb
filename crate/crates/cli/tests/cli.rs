use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bundled() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/catalog50")
        .canonicalize()
        .unwrap()
}

fn config(dir: &Path, extra: &str) -> PathBuf {
    let b = bundled();
    let path = dir.join("config.toml");
    fs::write(
        &path,
        format!(
            "software = {:?}\npublications = {:?}\nfixture = {:?}\nout = \"out\"\n{extra}",
            b.join("software.jsonl"),
            b.join("publications.jsonl"),
            b.join("archive"),
        ),
    )
    .unwrap();
    path
}

fn run(args: &[&str], cfg: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_archivelink"));
    cmd.args(args).arg("--config").arg(cfg);
    for (k, _) in std::env::vars() {
        if k.starts_with("ARCHIVELINK_") {
            cmd.env_remove(k);
        }
    }
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_catalog_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.toml");
    fs::write(
        &cfg,
        "software = \"nope/software.jsonl\"\npublications = \"nope/publications.jsonl\"\n",
    )
    .unwrap();
    let out = run(&["mine"], &cfg);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("nope/"), "{}", stderr(&out));
}

#[test]
fn empty_publications_yield_empty_mentions() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("software.jsonl"), "").unwrap();
    fs::write(dir.path().join("publications.jsonl"), "").unwrap();
    let cfg = dir.path().join("config.toml");
    fs::write(
        &cfg,
        "software = \"software.jsonl\"\npublications = \"publications.jsonl\"\nout = \"out\"\n",
    )
    .unwrap();
    let out = run(&["mine"], &cfg);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        fs::read(dir.path().join("out/mentions.jsonl")).unwrap(),
        b""
    );
}

#[test]
fn report_without_links_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    let out = run(&["report"], &cfg);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("links.jsonl"), "{}", stderr(&out));
}

#[test]
fn bad_config_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "workers = 0\n");
    assert_eq!(run(&["mine"], &cfg).status.code(), Some(2));
    let cfg = config(dir.path(), "bogus_key = 1\n");
    assert_eq!(run(&["mine"], &cfg).status.code(), Some(2));
    let cfg = config(dir.path(), "rate_limit = 0.0\n");
    assert_eq!(run(&["link"], &cfg).status.code(), Some(2));
}

#[test]
fn unreachable_remote_is_backend_error() {
    let dir = tempfile::tempdir().unwrap();
    let b = bundled();
    let cfg = dir.path().join("config.toml");
    fs::write(
        &cfg,
        format!(
            "software = {:?}\npublications = {:?}\ncdx_endpoint = \"http://127.0.0.1:1\"\nretries = 0\nbackoff_ms = 1\nrate_limit = 1000.0\n",
            b.join("software.jsonl"),
            b.join("publications.jsonl"),
        ),
    )
    .unwrap();
    let out = run(&["link"], &cfg);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn missing_fixture_dir_is_backend_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    let text = fs::read_to_string(&cfg)
        .unwrap()
        .replace("/archive\"", "/no-such-archive\"");
    fs::write(&cfg, text).unwrap();
    let out = run(&["link"], &cfg);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

fn status_of(links: &str, id: &str) -> String {
    links
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .find(|v| v["software_id"] == id)
        .map(|v| v["status"].as_str().unwrap().to_string())
        .unwrap()
}

#[test]
fn keep_all_statuses_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    assert_eq!(run(&["link"], &cfg).status.code(), Some(0));
    let links = fs::read_to_string(dir.path().join("out/links.jsonl")).unwrap();
    assert_eq!(status_of(&links, "sw005"), "not_archived");

    assert_eq!(
        run(&["link", "--keep-all-statuses"], &cfg).status.code(),
        Some(0)
    );
    let links = fs::read_to_string(dir.path().join("out/links.jsonl")).unwrap();
    assert_eq!(status_of(&links, "sw005"), "archived");
}

fn snapshot(out: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn stages_are_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "workers = 4\n");
    let all = |cfg: &Path| {
        for stage in ["mine", "link", "classify", "report"] {
            let out = run(&[stage], cfg);
            assert_eq!(out.status.code(), Some(0), "{stage}: {}", stderr(&out));
        }
    };
    all(&cfg);
    let first = snapshot(&dir.path().join("out"));
    assert_eq!(first.len(), 8);
    all(&cfg);
    assert_eq!(snapshot(&dir.path().join("out")), first);

    let other = tempfile::tempdir().unwrap();
    let cfg = config(other.path(), "workers = 1\n");
    all(&cfg);
    assert_eq!(snapshot(&other.path().join("out")), first);
}

#[test]
fn flags_override_config_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_archivelink"));
    cmd.args(["mine", "--config"])
        .arg(&cfg)
        .env("ARCHIVELINK_OUT", dir.path().join("env-out"));
    assert!(cmd.output().unwrap().status.success());
    assert!(dir.path().join("env-out/mentions.jsonl").exists());

    let mut cmd = Command::new(env!("CARGO_BIN_EXE_archivelink"));
    cmd.args(["mine", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("flag-out"))
        .env("ARCHIVELINK_OUT", dir.path().join("env-out2"));
    assert!(cmd.output().unwrap().status.success());
    assert!(dir.path().join("flag-out/mentions.jsonl").exists());
    assert!(!dir.path().join("env-out2").exists());
}
