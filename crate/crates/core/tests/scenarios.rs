use wsim_core::frames::PmfPolicy;
use wsim_core::portal::Engagement;
use wsim_core::scenario::{
    bundled, parse_scenario, read_event_log, run_batch, run_scenario, RunReport, ScenarioError, BUNDLED,
};
use wsim_core::stations::ApMode;

#[test]
fn fixture_matches_the_reference_network() {
    let cfg = bundled("paper_experiment").unwrap();
    let ap = &cfg.aps[0];
    assert_eq!(ap.ssid, "WPA3OpenWrt");
    assert_eq!(ap.bssid.to_string(), "B8:27:EB:6C:61:7A");
    assert_eq!(ap.channel, 11);
    assert_eq!(ap.passphrase.as_deref(), Some("12345678"));
    assert_eq!(ap.mode, ApMode::Transition);
    assert_eq!(ap.pmf, PmfPolicy::Disabled);
    assert_eq!(cfg.clients[0].victim.as_ref().unwrap().engagement, Engagement::VeryActive);
}

#[test]
fn offline_report_matches_online_for_every_bundled_scenario() {
    for (name, _) in BUNDLED {
        let dir = tempfile::tempdir().unwrap();
        let run = run_scenario(&bundled(name).unwrap(), dir.path()).unwrap();
        let offline = RunReport::from_log(&read_event_log(&run.paths.event_log).unwrap());
        assert_eq!(offline, run.report, "{name}");
        let on_disk: RunReport = serde_json::from_str(&std::fs::read_to_string(&run.paths.report).unwrap()).unwrap();
        assert_eq!(on_disk, run.report, "{name}");
    }
}

#[test]
fn fixture_run_recovers_the_password() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_scenario(&bundled("paper_experiment").unwrap(), dir.path()).unwrap();
    assert!(run.report.time_to_handshake.is_some());
    assert!(run.report.time_to_password.is_some());
    assert!(run.password_log.last().unwrap().ends_with("\t12345678"));
    let file = run.paths.password_log.unwrap();
    assert_eq!(file.file_name().unwrap(), "evil_twin_captive_portal_password-WPA3OpenWrt.txt");
    assert!(std::fs::read_to_string(file).unwrap().contains("12345678"));
}

#[test]
fn not_active_victims_never_give_up_the_password() {
    let mut cfg = bundled("paper_experiment").unwrap();
    cfg.clients[0].victim.as_mut().unwrap().engagement = Engagement::NotActive;
    let world = cfg.simulate(None).unwrap();
    let report = RunReport::from_log(world.log());
    assert!(report.time_to_handshake.is_some());
    assert_eq!(report.time_to_password, None);
}

#[test]
fn json_mirror_runs_like_toml() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = bundled("paper_experiment").unwrap();
    let path = dir.path().join("fixture.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let parsed = parse_scenario(&path).unwrap();
    assert_eq!(parsed.seed, cfg.seed);
    assert_eq!(parsed.simulate(None).unwrap().log_jsonl(), cfg.simulate(None).unwrap().log_jsonl());
}

#[test]
fn bad_file_reports_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let mut text = bundled_text("paper_experiment").replace("channel = 11", "channel = 15");
    text = text.replace("3C:28:6D:10:22:5E", "B8:27:EB:6C:61:7A");
    std::fs::write(&path, text).unwrap();
    let err = parse_scenario(&path).unwrap_err();
    let fields: Vec<_> = err.issues().iter().map(|i| i.field.clone()).collect();
    assert!(fields.iter().filter(|f| f.contains("channel")).count() >= 2, "{fields:?}");
    let dup = err.issues().iter().filter(|i| i.message.contains("is also used by")).count();
    assert_eq!(dup, 2, "{:?}", err.issues());

    std::fs::write(&path, "seed = 1\nduration_ticks = \"soon\"\n").unwrap();
    assert!(matches!(parse_scenario(&path), Err(ScenarioError::Parse { line: 2, .. })));
}

fn bundled_text(name: &str) -> &'static str {
    BUNDLED.iter().find(|(n, _)| *n == name).unwrap().1
}

#[test]
fn batch_runs_match_single_runs() {
    let configs: Vec<_> = ["paper_experiment", "pmf_required", "bad_token_race"]
        .iter()
        .map(|n| bundled(n).unwrap())
        .collect();
    let batch = run_batch(&configs);
    for (cfg, world) in configs.iter().zip(batch) {
        assert_eq!(world.unwrap().log_jsonl(), cfg.simulate(None).unwrap().log_jsonl());
    }
}
