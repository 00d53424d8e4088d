use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

fn wsim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsim"))
        .args(args)
        .current_dir(cwd)
        .env_remove("WSIM_SEED")
        .output()
        .expect("wsim runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Runs the bundled fixture and extracts its handshake into `dir/hs.bin`.
fn fixture() -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let out = wsim(&["run", "paper_experiment", "--out-dir", "out"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = wsim(&["extract", "out/capture.wscap", "--ssid", "WPA3OpenWrt", "-o", "hs.bin"], dir.path());
    assert!(out.status.success(), "{}", stdout(&out));
    let hs = dir.path().join("hs.bin");
    (dir, hs)
}

#[test]
fn run_writes_every_artifact() {
    let (dir, _) = fixture();
    let out = dir.path().join("out");
    for name in ["events.jsonl", "capture.wscap", "report.json", "evil_twin_captive_portal_password-WPA3OpenWrt.txt"] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
    let passwords = std::fs::read_to_string(out.join("evil_twin_captive_portal_password-WPA3OpenWrt.txt")).unwrap();
    assert!(passwords.lines().last().unwrap().ends_with("\t12345678"));
}

#[test]
fn verify_exit_codes() {
    let (dir, _) = fixture();
    let ok = wsim(&["verify", "hs.bin", "12345678"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok).trim(), "Verified");

    let wrong = wsim(&["verify", "hs.bin", "wrongpass1"], dir.path());
    assert_eq!(wrong.status.code(), Some(1));
    assert_eq!(stdout(&wrong).trim(), "Rejected");

    let short = wsim(&["verify", "hs.bin", "short"], dir.path());
    assert_eq!(short.status.code(), Some(2));
    assert!(stdout(&short).starts_with("Indeterminate"));
}

#[test]
fn crack_tiny_wordlist() {
    let (dir, _) = fixture();
    std::fs::write(dir.path().join("tiny_wordlist.txt"), "password\n12345678\nletmein\n").unwrap();
    let out = wsim(&["crack", "hs.bin", "tiny_wordlist.txt"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("12345678"));
    assert!(text.contains("tried=2"), "{text}");

    std::fs::write(dir.path().join("miss.txt"), "password\nletmein1\n").unwrap();
    let out = wsim(&["crack", "hs.bin", "miss.txt"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("tried=2"));
}

#[test]
fn report_matches_run_output() {
    let (dir, _) = fixture();
    let online = std::fs::read_to_string(dir.path().join("out/report.json")).unwrap();
    let out = wsim(&["report", "out/events.jsonl", "--json"], dir.path());
    assert!(out.status.success());
    let online: serde_json::Value = serde_json::from_str(&online).unwrap();
    let offline: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(online, offline);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(wsim(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(wsim(&["verify", "missing.bin", "12345678"], dir.path()).status.code(), Some(2));
    assert_eq!(wsim(&["run", "no_such_scenario"], dir.path()).status.code(), Some(2));

    std::fs::write(dir.path().join("bad.toml"), "").unwrap();
    let out = wsim(&["run", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn seed_env_overrides_bundled_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_wsim"))
        .args(["run", "paper_experiment", "--out-dir", "a", "--json"])
        .current_dir(dir.path())
        .env("WSIM_SEED", "99")
        .output()
        .unwrap();
    assert!(out.status.success());
    let base = wsim(&["run", "paper_experiment", "--out-dir", "b"], dir.path());
    assert!(base.status.success());
    let a = std::fs::read(dir.path().join("a/events.jsonl")).unwrap();
    let b = std::fs::read(dir.path().join("b/events.jsonl")).unwrap();
    assert_ne!(a, b);
}

fn http(addr: &str, request: &str) -> String {
    let mut stream = TcpStream::connect(addr).unwrap();
    stream.write_all(request.as_bytes()).unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    response
}

#[test]
fn serve_portal_answers_http() {
    let (dir, _) = fixture();
    let mut child = Command::new(env!("CARGO_BIN_EXE_wsim"))
        .args(["serve-portal", "hs.bin", "--bind", "127.0.0.1:0", "--lang", "spanish", "--password-log", "pw.txt"])
        .current_dir(dir.path())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut lines = BufReader::new(child.stdout.take().unwrap()).lines();
    let banner = lines.next().unwrap().unwrap();
    let addr = banner.rsplit("http://").next().unwrap().trim().to_string();

    let page = http(&addr, "GET / HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n");
    assert!(page.starts_with("HTTP/1.1 200"), "{page}");
    assert!(page.contains("WPA3OpenWrt"));

    let body = "password=12345678";
    let submit = format!(
        "POST /submit HTTP/1.1\r\nHost: x\r\nConnection: close\r\nContent-Type: application/x-www-form-urlencoded\r\nContent-Length: {}\r\n\r\n{body}",
        body.len()
    );
    assert!(http(&addr, &submit).starts_with("HTTP/1.1 200"));

    let status = http(&addr, "GET /status HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n");
    assert!(status.contains(r#""state":"recovered""#), "{status}");
    child.kill().unwrap();
    child.wait().unwrap();
    let log = std::fs::read_to_string(dir.path().join("pw.txt")).unwrap();
    assert!(log.trim_end().ends_with("\t12345678"));
}
