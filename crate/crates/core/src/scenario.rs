//! Scenario files, whole runs and run reports.
//!
//! A scenario is TOML (sections and `key = value` lines) or the same
//! structure as JSON. Parsing checks everything it can up front and reports
//! every problem it finds, not only the first.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::attacks::{
    crack_dictionary, parse_wordlist, AttackPlan, AttackReport, DeauthStrategy, HandshakeCapture, RogueSecurity,
};
use crate::crypto::Passphrase;
use crate::events::{DisconnectCause, PortalEventKind, SimEvent};
use crate::frames::{write_capture, CaptureError, MacAddr, PmfPolicy, Ssid};
use crate::medium::Tick;
use crate::portal::{default_password_log_name, Engagement, Language, ThinkTime, VictimProfile};
use crate::sim::{LogLine, LogRecord, SimError, World};
use crate::stations::{ApConfig, ApMode, Capability, ClientConfig, KnownNetwork};

/// Overrides the scenario seed when set.
pub const SEED_ENV: &str = "WSIM_SEED";

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub seed: u64,
    pub duration_ticks: Tick,
    #[serde(default)]
    pub loss_rate: f64,
    #[serde(default)]
    pub sniffer_channels: Vec<u8>,
    #[serde(default)]
    pub aps: Vec<ApSpec>,
    #[serde(default)]
    pub clients: Vec<ClientSpec>,
    #[serde(default)]
    pub attack: Option<AttackSpec>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApSpec {
    pub name: String,
    pub ssid: String,
    pub bssid: MacAddr,
    pub channel: u8,
    pub mode: ApMode,
    #[serde(default = "pmf_disabled")]
    pub pmf: PmfPolicy,
    #[serde(default)]
    pub passphrase: Option<String>,
    #[serde(default)]
    pub work_budget_per_second: Option<u32>,
    #[serde(default)]
    pub commit_cost: Option<u32>,
    #[serde(default)]
    pub anticlog_threshold: Option<usize>,
    #[serde(default)]
    pub anticlog_ttl: Option<Tick>,
    #[serde(default)]
    pub sae_session_timeout: Option<Tick>,
    #[serde(default)]
    pub beacon_interval: Option<Tick>,
}

fn pmf_disabled() -> PmfPolicy {
    PmfPolicy::Disabled
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClientSpec {
    pub name: String,
    pub mac: MacAddr,
    pub channel: u8,
    pub capability: Capability,
    pub ssid: String,
    pub passphrase: String,
    #[serde(default)]
    pub start_at: Option<Tick>,
    #[serde(default)]
    pub session_duration: Option<Tick>,
    #[serde(default)]
    pub auto_reconnect: Option<bool>,
    #[serde(default)]
    pub pmf_capable: Option<bool>,
    #[serde(default)]
    pub reconnect_backoff: Option<Tick>,
    #[serde(default)]
    pub max_failures: Option<u32>,
    #[serde(default)]
    pub attempt_timeout: Option<Tick>,
    #[serde(default)]
    pub victim: Option<VictimSpec>,
}

/// Engagement level plus optional overrides of its defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VictimSpec {
    pub engagement: Engagement,
    #[serde(default)]
    pub submit_probability_per_prompt: Option<f64>,
    #[serde(default)]
    pub typo_probability: Option<f64>,
    #[serde(default)]
    pub think_time: Option<ThinkTime>,
}

impl VictimSpec {
    pub fn profile(&self) -> VictimProfile {
        let base = VictimProfile::for_engagement(self.engagement);
        VictimProfile {
            engagement: self.engagement,
            submit_probability_per_prompt: self.submit_probability_per_prompt.unwrap_or(base.submit_probability_per_prompt),
            typo_probability: self.typo_probability.unwrap_or(base.typo_probability),
            think_time: self.think_time.unwrap_or(base.think_time),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSpec {
    pub target_bssid: MacAddr,
    pub target_ssid: String,
    pub strategy: DeauthStrategy,
    #[serde(default = "default_true")]
    pub spoof_mac: bool,
    #[serde(default)]
    pub rogue_security: RogueSecurity,
    #[serde(default = "english")]
    pub portal_language: Language,
    #[serde(default)]
    pub attacker_mac: Option<MacAddr>,
    #[serde(default = "default_true")]
    pub evil_twin: bool,
    #[serde(default)]
    pub start_at: Tick,
    /// Cracked against the captured handshake after the run, for comparison.
    #[serde(default)]
    pub wordlist: Option<PathBuf>,
}

fn english() -> Language {
    Language::English
}

/// Output file names, relative to the run's output directory.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub event_log_path: Option<PathBuf>,
    #[serde(default)]
    pub capture_path: Option<PathBuf>,
    #[serde(default)]
    pub report_path: Option<PathBuf>,
    #[serde(default)]
    pub password_log_path: Option<PathBuf>,
}

/// Where a run put its files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub event_log: PathBuf,
    pub capture: PathBuf,
    pub report: PathBuf,
    pub password_log: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scenario:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<ConfigIssue>),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Capture(#[from] CaptureError),
    #[error("report encoding: {0}")]
    Json(#[from] serde_json::Error),
}

impl ScenarioError {
    fn io(path: &Path, source: io::Error) -> Self {
        ScenarioError::Io { path: path.to_path_buf(), source }
    }

    pub fn issues(&self) -> &[ConfigIssue] {
        match self {
            ScenarioError::Invalid(issues) => issues,
            _ => &[],
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates scenario text. JSON is recognised by a leading `{`.
pub fn parse_scenario_str(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let trimmed = text.trim_start();
    if trimmed.is_empty() {
        return Err(ScenarioError::Parse { line: 1, message: "empty scenario".into() });
    }
    let config: ScenarioConfig = if trimmed.starts_with('{') {
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse { line: e.line(), message: e.to_string() })?
    } else {
        toml::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.span().map_or(1, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?
    };
    let issues = config.validate();
    if issues.is_empty() {
        Ok(config)
    } else {
        Err(ScenarioError::Invalid(issues))
    }
}

/// Reads a scenario file and applies the seed override from the environment.
pub fn parse_scenario(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|e| ScenarioError::io(path, e))?;
    let mut config = parse_scenario_str(&text)?;
    if let Some(attack) = config.attack.as_mut() {
        if let Some(list) = attack.wordlist.as_mut().filter(|p| p.is_relative()) {
            *list = path.parent().unwrap_or(Path::new(".")).join(&*list);
        }
    }
    config.apply_seed_override(std::env::var(SEED_ENV).ok().as_deref())?;
    Ok(config)
}

impl ScenarioConfig {
    pub fn apply_seed_override(&mut self, value: Option<&str>) -> Result<(), ScenarioError> {
        if let Some(raw) = value {
            self.seed = raw.trim().parse().map_err(|_| {
                ScenarioError::Invalid(vec![ConfigIssue {
                    field: SEED_ENV.into(),
                    message: format!("{raw:?} is not an unsigned 64-bit integer"),
                }])
            })?;
        }
        Ok(())
    }

    /// Every problem with the scenario; empty when it is runnable.
    pub fn validate(&self) -> Vec<ConfigIssue> {
        let mut issues = Vec::new();
        let mut issue = |field: String, message: String| issues.push(ConfigIssue { field, message });

        if self.duration_ticks == 0 {
            issue("duration_ticks".into(), "must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.loss_rate) {
            issue("loss_rate".into(), "must lie in [0, 1]".into());
        }
        for (i, ch) in self.sniffer_channels.iter().enumerate() {
            if !(1..=14).contains(ch) {
                issue(format!("sniffer_channels[{i}]"), format!("channel {ch} outside 1..=14"));
            }
        }

        let mut macs: BTreeMap<MacAddr, Vec<String>> = BTreeMap::new();
        let mut names: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, ap) in self.aps.iter().enumerate() {
            let field = format!("aps[{i}]");
            macs.entry(ap.bssid).or_default().push(field.clone());
            *names.entry(&ap.name).or_default() += 1;
            if !(1..=14).contains(&ap.channel) {
                issue(format!("{field}.channel"), format!("channel {} outside 1..=14", ap.channel));
            }
            if let Err(e) = Ssid::new(ap.ssid.clone()) {
                issue(format!("{field}.ssid"), e.to_string());
            }
            match (&ap.passphrase, ap.mode) {
                (None, mode) if mode != ApMode::Open => {
                    issue(format!("{field}.passphrase"), "required for a secured network".into())
                }
                (Some(p), _) => {
                    if let Err(e) = Passphrase::new(p.clone()) {
                        issue(format!("{field}.passphrase"), e.to_string());
                    }
                }
                _ => {}
            }
            if ap.beacon_interval == Some(0) {
                issue(format!("{field}.beacon_interval"), "must be positive".into());
            }
        }
        for (i, c) in self.clients.iter().enumerate() {
            let field = format!("clients[{i}]");
            macs.entry(c.mac).or_default().push(field.clone());
            *names.entry(&c.name).or_default() += 1;
            if !(1..=14).contains(&c.channel) {
                issue(format!("{field}.channel"), format!("channel {} outside 1..=14", c.channel));
            }
            if let Err(e) = Ssid::new(c.ssid.clone()) {
                issue(format!("{field}.ssid"), e.to_string());
            }
            if let Err(e) = Passphrase::new(c.passphrase.clone()) {
                issue(format!("{field}.passphrase"), e.to_string());
            }
            if let Some(v) = &c.victim {
                if let Err(e) = v.profile().validate() {
                    issue(format!("{field}.victim"), e.to_string());
                }
            }
        }
        if let Some(attack) = &self.attack {
            if let Some(mac) = attack.attacker_mac {
                macs.entry(mac).or_default().push("attack.attacker_mac".into());
            }
            if let Err(e) = Ssid::new(attack.target_ssid.clone()) {
                issue("attack.target_ssid".into(), e.to_string());
            }
            if !self.aps.iter().any(|ap| ap.bssid == attack.target_bssid) {
                issue("attack.target_bssid".into(), format!("no access point has BSSID {}", attack.target_bssid));
            }
            if let DeauthStrategy::CommitFlood { rate_per_sec: 0 } = attack.strategy {
                issue("attack.strategy.rate_per_sec".into(), "must be at least 1".into());
            }
            if let RogueSecurity::Wpa2Psk { decoy_passphrase } = &attack.rogue_security {
                if let Err(e) = Passphrase::new(decoy_passphrase.clone()) {
                    issue("attack.rogue_security.decoy_passphrase".into(), e.to_string());
                }
            }
        }
        for (mac, fields) in &macs {
            if fields.len() > 1 {
                for field in fields {
                    let others: Vec<&str> = fields.iter().filter(|f| *f != field).map(String::as_str).collect();
                    issue(field.clone(), format!("MAC {mac} is also used by {}", others.join(", ")));
                }
            }
        }
        for (name, count) in names {
            if count > 1 {
                issue(format!("name {name:?}"), format!("used by {count} stations"));
            }
        }
        issues
    }

    pub fn attack_plan(&self) -> Option<AttackPlan> {
        let spec = self.attack.as_ref()?;
        let ssid = Ssid::new(spec.target_ssid.clone()).ok()?;
        let mut plan = AttackPlan::new(spec.target_bssid, ssid, spec.strategy);
        plan.spoof_mac = spec.spoof_mac;
        plan.rogue_security = spec.rogue_security.clone();
        plan.portal_language = spec.portal_language;
        plan.evil_twin = spec.evil_twin;
        plan.start_at = spec.start_at;
        if let Some(mac) = spec.attacker_mac {
            plan.attacker_mac = mac;
        }
        Some(plan)
    }

    pub fn output_paths(&self, out_dir: &Path) -> OutputPaths {
        let place = |p: &Option<PathBuf>, default: &str| out_dir.join(p.clone().unwrap_or_else(|| default.into()));
        OutputPaths {
            event_log: place(&self.outputs.event_log_path, "events.jsonl"),
            capture: place(&self.outputs.capture_path, "capture.wscap"),
            report: place(&self.outputs.report_path, "report.json"),
            password_log: self
                .attack
                .as_ref()
                .map(|a| place(&self.outputs.password_log_path, &default_password_log_name(&a.target_ssid))),
        }
    }

    /// Builds the world without running it.
    pub fn build_world(&self, password_log: Option<PathBuf>) -> Result<World, ScenarioError> {
        let issues = self.validate();
        if !issues.is_empty() {
            return Err(ScenarioError::Invalid(issues));
        }
        let mut world = World::new(self.seed, self.loss_rate);
        for spec in &self.aps {
            world.add_ap(spec.to_config())?;
        }
        for spec in &self.clients {
            let id = world.add_client(spec.to_config())?;
            if let Some(victim) = &spec.victim {
                world.add_victim(id, victim.profile())?;
            }
        }
        for &ch in &self.sniffer_channels {
            world.add_sniffer(ch)?;
        }
        if let Some(mut plan) = self.attack_plan() {
            plan.password_log_path = password_log;
            world.install_attack(plan).map_err(SimError::from)?;
        }
        Ok(world)
    }

    /// Runs the scenario in memory, including the optional crack.
    pub fn simulate(&self, password_log: Option<PathBuf>) -> Result<World, ScenarioError> {
        let mut world = self.build_world(password_log)?;
        world.run_until(self.duration_ticks)?;
        world.stop_attack("end_of_run");
        if let Some(list) = self.attack.as_ref().and_then(|a| a.wordlist.as_ref()) {
            let words = parse_wordlist(&fs::read_to_string(list).map_err(|e| ScenarioError::io(list, e))?);
            if let Some(hs) = world.handshake().cloned() {
                let outcome = crack_dictionary(&hs, &words);
                world.record_crack(&outcome);
            }
        }
        Ok(world)
    }
}

impl ApSpec {
    pub fn to_config(&self) -> ApConfig {
        let ssid = Ssid::new(self.ssid.clone()).expect("validated");
        let passphrase = self.passphrase.clone().map(|p| Passphrase::new(p).expect("validated"));
        let mut config = ApConfig::new(self.name.clone(), ssid, self.bssid, self.channel, self.mode, passphrase);
        config.pmf = self.pmf;
        if let Some(v) = self.work_budget_per_second {
            config.work_budget_per_second = v;
        }
        if let Some(v) = self.commit_cost {
            config.commit_cost = v;
        }
        if let Some(v) = self.anticlog_threshold {
            config.anticlog_threshold = v;
        }
        if let Some(v) = self.anticlog_ttl {
            config.anticlog_ttl = v;
        }
        if let Some(v) = self.sae_session_timeout {
            config.sae_session_timeout = v;
        }
        if let Some(v) = self.beacon_interval {
            config.beacon_interval = v;
        }
        config
    }
}

impl ClientSpec {
    pub fn to_config(&self) -> ClientConfig {
        let known = KnownNetwork {
            ssid: Ssid::new(self.ssid.clone()).expect("validated"),
            passphrase: Passphrase::new(self.passphrase.clone()).expect("validated"),
        };
        let mut config = ClientConfig::new(self.name.clone(), self.mac, self.channel, self.capability, known);
        config.session_duration = self.session_duration;
        if let Some(v) = self.start_at {
            config.start_at = v;
        }
        if let Some(v) = self.auto_reconnect {
            config.auto_reconnect = v;
        }
        if let Some(v) = self.pmf_capable {
            config.pmf_capable = v;
        }
        if let Some(v) = self.reconnect_backoff {
            config.reconnect_backoff = v;
        }
        if let Some(v) = self.max_failures {
            config.max_failures = v;
        }
        if let Some(v) = self.attempt_timeout {
            config.attempt_timeout = v;
        }
        config
    }
}

/// Headline numbers for one run. Times are ticks since the attack started.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub time_to_handshake: Option<Tick>,
    pub time_to_password: Option<Tick>,
    pub deauth_effective: bool,
    pub legit_sae_success_rate_during_attack: Option<f64>,
    pub candidates_tried: Option<usize>,
    pub crack_found: Option<String>,
    pub crack_elapsed_ms: Option<u64>,
    pub portal_events: BTreeMap<String, usize>,
    pub disconnections: BTreeMap<String, usize>,
    pub attack: Option<AttackReport>,
}

impl RunReport {
    pub fn from_log(log: &[LogRecord]) -> Self {
        let events: Vec<(Tick, SimEvent)> = log
            .iter()
            .filter_map(|r| match r {
                LogRecord::Event { tick, event } => Some((*tick, event.clone())),
                _ => None,
            })
            .collect();
        Self::from_events(&events)
    }

    pub fn from_events(events: &[(Tick, SimEvent)]) -> Self {
        let mut started: Option<(Tick, String)> = None;
        let mut stopped: Option<(Tick, u64)> = None;
        let mut report = RunReport {
            time_to_handshake: None,
            time_to_password: None,
            deauth_effective: false,
            legit_sae_success_rate_during_attack: None,
            candidates_tried: None,
            crack_found: None,
            crack_elapsed_ms: None,
            portal_events: BTreeMap::new(),
            disconnections: BTreeMap::new(),
            attack: None,
        };
        for (tick, event) in events {
            let since_start = |t: Tick| started.as_ref().map(|(s, _)| t.saturating_sub(*s));
            match event {
                SimEvent::AttackStarted { strategy } if started.is_none() => started = Some((*tick, strategy.clone())),
                SimEvent::AttackStopped { frames_injected, .. } if stopped.is_none() => {
                    stopped = Some((*tick, *frames_injected))
                }
                SimEvent::HandshakeCaptured { .. } if report.time_to_handshake.is_none() => {
                    report.time_to_handshake = since_start(*tick)
                }
                SimEvent::Portal { kind, .. } => {
                    if *kind == PortalEventKind::Verified && report.time_to_password.is_none() {
                        report.time_to_password = since_start(*tick);
                    }
                    *report.portal_events.entry(portal_kind_name(kind).into()).or_default() += 1;
                }
                SimEvent::ClientDisconnected { cause, .. } => {
                    *report.disconnections.entry(cause_name(*cause).into()).or_default() += 1;
                }
                SimEvent::Crack { candidates_tried, found, elapsed_ms } => {
                    report.candidates_tried = Some(*candidates_tried);
                    report.crack_found = found.clone();
                    report.crack_elapsed_ms = Some(*elapsed_ms);
                }
                _ => {}
            }
        }
        if let Some((start, strategy)) = started {
            let (end, injected) = stopped.map_or((Tick::MAX, 0), |(t, n)| (t + 1, n));
            let attack = AttackReport::from_events(&strategy, (start, end), injected, events);
            report.deauth_effective = attack.disconnections > 0;
            report.legit_sae_success_rate_during_attack = attack.legit_sae_success_rate;
            report.attack = Some(attack);
        }
        report
    }
}

fn portal_kind_name(kind: &PortalEventKind) -> &'static str {
    match kind {
        PortalEventKind::PageServed => "page_served",
        PortalEventKind::Submitted { .. } => "submitted",
        PortalEventKind::Verified => "verified",
        PortalEventKind::Rejected => "rejected",
        PortalEventKind::FakeSuccessShown => "fake_success_shown",
    }
}

fn cause_name(cause: DisconnectCause) -> &'static str {
    match cause {
        DisconnectCause::Deauth => "deauth",
        DisconnectCause::Left => "left",
        DisconnectCause::BeaconLoss => "beacon_loss",
    }
}

fn fmt_ticks(t: Option<Tick>) -> String {
    t.map_or_else(|| "none".into(), |t| format!("{t} ticks ({:.3} s)", t as f64 / 1000.0))
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "time to handshake:  {}", fmt_ticks(self.time_to_handshake))?;
        writeln!(f, "time to password:   {}", fmt_ticks(self.time_to_password))?;
        writeln!(f, "deauth effective:   {}", self.deauth_effective)?;
        match self.legit_sae_success_rate_during_attack {
            Some(rate) => writeln!(f, "legit SAE success:  {:.1}%", rate * 100.0)?,
            None => writeln!(f, "legit SAE success:  n/a")?,
        }
        if let Some(n) = self.candidates_tried {
            let found = self.crack_found.as_deref().unwrap_or("not found");
            writeln!(f, "crack:              {found} after {n} candidates, {} ms", self.crack_elapsed_ms.unwrap_or(0))?;
        }
        for (kind, n) in &self.portal_events {
            writeln!(f, "portal {kind}: {n}")?;
        }
        for (cause, n) in &self.disconnections {
            writeln!(f, "disconnections ({cause}): {n}")?;
        }
        if let Some(a) = &self.attack {
            writeln!(
                f,
                "attack {}: window {}..{}, {} frames injected, {} overloaded, {} anti-clogging demands",
                a.strategy, a.window.0, a.window.1, a.frames_injected, a.overloaded_events, a.anticlog_demands
            )?;
        }
        Ok(())
    }
}

/// Everything a finished run produced.
#[derive(Debug)]
pub struct ScenarioRun {
    pub report: RunReport,
    pub handshake: Option<HandshakeCapture>,
    pub password_log: Vec<String>,
    pub paths: OutputPaths,
}

/// Runs the scenario and writes the event log, capture, report and password log.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> Result<ScenarioRun, ScenarioError> {
    fs::create_dir_all(out_dir).map_err(|e| ScenarioError::io(out_dir, e))?;
    let paths = config.output_paths(out_dir);
    let world = config.simulate(paths.password_log.clone())?;

    fs::write(&paths.event_log, world.log_jsonl()).map_err(|e| ScenarioError::io(&paths.event_log, e))?;
    write_capture(&paths.capture, config.seed, world.now(), world.capture())?;
    let report = RunReport::from_log(world.log());
    let json = serde_json::to_string_pretty(&report)?;
    fs::write(&paths.report, json + "\n").map_err(|e| ScenarioError::io(&paths.report, e))?;

    Ok(ScenarioRun {
        handshake: world.handshake().cloned(),
        password_log: world.portal().map(|p| p.password_log().lines()).unwrap_or_default(),
        report,
        paths,
    })
}

/// Parses a JSONL run log back into records.
pub fn read_event_log(path: &Path) -> Result<Vec<LogRecord>, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|e| ScenarioError::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let line: LogLine =
                serde_json::from_str(l).map_err(|e| ScenarioError::Parse { line: i + 1, message: e.to_string() })?;
            if line.v != crate::sim::LOG_VERSION {
                return Err(ScenarioError::Parse { line: i + 1, message: format!("unsupported log version {}", line.v) });
            }
            Ok(line.record)
        })
        .collect()
}

/// Runs many scenarios in memory, in parallel when built with it.
pub fn run_batch(configs: &[ScenarioConfig]) -> Vec<Result<World, ScenarioError>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        configs.par_iter().map(|c| c.simulate(None)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        configs.iter().map(|c| c.simulate(None)).collect()
    }
}

/// Bundled scenarios, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("paper_experiment", include_str!("../scenarios/paper_experiment.toml")),
    ("pmf_required", include_str!("../scenarios/pmf_required.toml")),
    ("sae_only", include_str!("../scenarios/sae_only.toml")),
    ("flood_8", include_str!("../scenarios/flood_8.toml")),
    ("flood_16", include_str!("../scenarios/flood_16.toml")),
    ("bad_token_race", include_str!("../scenarios/bad_token_race.toml")),
];

pub fn bundled(name: &str) -> Option<ScenarioConfig> {
    let (_, text) = BUNDLED.iter().find(|(n, _)| *n == name)?;
    Some(parse_scenario_str(text).expect("bundled scenarios are valid"))
}
