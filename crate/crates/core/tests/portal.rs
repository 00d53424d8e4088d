use std::sync::{Arc, OnceLock};

use axum::body::{to_bytes, Body};
use axum::http::{header, Request, StatusCode};
use proptest::prelude::*;
use tokio::sync::mpsc;
use tower::ServiceExt;
use wsim_core::attacks::{verify_candidate, HandshakeCapture};
use wsim_core::portal::{
    router, run_portal_loop, CaptivePortal, Language, PasswordLog, PortalConfig, StatusBody, STRING_KEYS,
};
use wsim_core::scenario::bundled;
use wsim_core::{PortalEventKind, SimEvent};

fn handshake() -> &'static HandshakeCapture {
    static HS: OnceLock<HandshakeCapture> = OnceLock::new();
    HS.get_or_init(|| {
        let world = bundled("paper_experiment").unwrap().simulate(None).unwrap();
        world.handshake().cloned().expect("fixture captures a handshake")
    })
}

fn portal(language: Language) -> Arc<CaptivePortal> {
    let config = PortalConfig { language, ..PortalConfig::default() };
    Arc::new(CaptivePortal::new(config, handshake().clone(), PasswordLog::in_memory(), 0).unwrap())
}

fn app(portal: Arc<CaptivePortal>) -> axum::Router {
    let (tx, rx) = mpsc::channel(8);
    tokio::spawn(run_portal_loop(portal.clone(), rx, || 42));
    router(portal, tx)
}

async fn send(app: &axum::Router, req: Request<Body>) -> (StatusCode, Option<String>, String) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let location = resp.headers().get(header::LOCATION).map(|v| v.to_str().unwrap().to_string());
    let body = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, location, String::from_utf8(body.to_vec()).unwrap())
}

fn get(path: &str) -> Request<Body> {
    Request::get(path).body(Body::empty()).unwrap()
}

fn post(body: &str) -> Request<Body> {
    Request::post("/submit")
        .header(header::CONTENT_TYPE, "application/x-www-form-urlencoded")
        .body(Body::from(body.to_string()))
        .unwrap()
}

async fn status(app: &axum::Router) -> StatusBody {
    let (code, _, body) = send(app, get("/status")).await;
    assert_eq!(code, StatusCode::OK);
    serde_json::from_str(&body).unwrap()
}

#[tokio::test]
async fn index_serves_the_form_with_the_essid() {
    let app = app(portal(Language::English));
    let (code, _, body) = send(&app, get("/")).await;
    assert_eq!(code, StatusCode::OK);
    assert!(body.contains("WPA3OpenWrt"));
    assert!(body.contains(r#"action="/submit""#));
    assert!(body.contains(r#"name="password""#));
}

#[tokio::test]
async fn missing_password_field_is_a_bad_request() {
    let app = app(portal(Language::English));
    let (code, _, _) = send(&app, post("user=x")).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);
    let (code, _, _) = send(&app, Request::post("/submit").body(Body::empty()).unwrap()).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);
    assert_eq!(status(&app).await.state, "awaiting");
}

#[tokio::test]
async fn wrong_password_keeps_awaiting() {
    let portal = portal(Language::English);
    let app = app(portal.clone());
    let (code, _, body) = send(&app, post("password=wrongpass1")).await;
    assert_eq!(code, StatusCode::OK);
    assert!(body.contains("retry"));
    let (_, _, body) = send(&app, post("password=short")).await;
    assert!(body.contains("retry"));
    assert_eq!(status(&app).await.state, "awaiting");
    assert!(portal.password_log().lines().is_empty());
}

#[tokio::test]
async fn correct_password_flips_status_to_recovered() {
    let portal = portal(Language::English);
    let app = app(portal.clone());
    let before = status(&app).await;
    assert_eq!((before.state.as_str(), before.essid.as_str(), before.since_tick), ("awaiting", "WPA3OpenWrt", 0));

    let (code, _, body) = send(&app, post("password=12345678")).await;
    assert_eq!(code, StatusCode::OK);
    assert!(body.contains("success"));

    let after = status(&app).await;
    assert_eq!((after.state.as_str(), after.since_tick), ("recovered", 42));
    assert_eq!(portal.password_log().lines(), vec!["42\tWPA3OpenWrt\t12345678".to_string()]);
}

#[tokio::test]
async fn unknown_paths_redirect_to_the_portal() {
    let app = app(portal(Language::English));
    for path in ["/generate_204", "/hotspot-detect.html", "/a/b?c=d"] {
        let (code, location, _) = send(&app, get(path)).await;
        assert_eq!(code, StatusCode::FOUND, "{path}");
        assert_eq!(location.as_deref(), Some("/"));
    }
}

#[tokio::test]
async fn pages_use_the_configured_language() {
    let english = send(&app(portal(Language::English)), get("/")).await.2;
    let spanish = send(&app(portal(Language::Spanish)), get("/")).await.2;
    let es = Language::Spanish.strings();
    assert!(spanish.contains(r#"lang="es""#));
    assert!(spanish.contains(es.get("submit")));
    assert_ne!(english, spanish);
    let arabic = send(&app(portal(Language::Arabic)), get("/")).await.2;
    assert!(arabic.contains(r#"dir="rtl""#));
}

#[test]
fn every_language_table_is_complete() {
    assert_eq!(Language::ALL.len(), 12);
    for lang in Language::ALL {
        let table = lang.strings();
        for key in STRING_KEYS {
            assert!(table.contains(key), "{lang} lacks {key}");
        }
    }
}

#[test]
fn password_log_gets_one_line_per_verified_submission() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pw.txt");
    let portal = CaptivePortal::new(PortalConfig::default(), handshake().clone(), PasswordLog::at(&path), 0).unwrap();
    let mut verified = 0;
    for (i, candidate) in ["12345678", "nope-nope", "12345678", "x", "12345678"].iter().enumerate() {
        let size_before = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
        let prefix = std::fs::read(&path).unwrap_or_default();
        let outcome = portal.handle_submit(candidate, i as u64);
        verified += outcome.events.iter().filter(|e| **e == PortalEventKind::Verified).count();
        let now = std::fs::read(&path).unwrap_or_default();
        assert!(now.len() as u64 >= size_before);
        assert_eq!(&now[..prefix.len()], &prefix[..], "log rewritten");
    }
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), verified);
    assert_eq!(verified, 3);
    assert_eq!(portal.status().since_tick, 0);
}

#[test]
fn simulated_victim_is_deterministic() {
    let portal_events = || {
        let world = bundled("paper_experiment").unwrap().simulate(None).unwrap();
        world
            .events()
            .iter()
            .filter(|(_, e)| matches!(e, SimEvent::Portal { .. }))
            .cloned()
            .collect::<Vec<_>>()
    };
    let first = portal_events();
    assert!(!first.is_empty());
    assert_eq!(first, portal_events());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn portal_accepts_exactly_what_verifies(candidate in prop_oneof!["[ -~]{0,70}", Just("12345678".to_string())]) {
        let portal = CaptivePortal::new(PortalConfig::default(), handshake().clone(), PasswordLog::in_memory(), 0).unwrap();
        let outcome = portal.handle_submit(&candidate, 1);
        prop_assert_eq!(outcome.accepted, verify_candidate(handshake(), &candidate).is_verified());
        prop_assert_eq!(outcome.accepted, candidate == "12345678");
        prop_assert_eq!(portal.password_log().lines().len(), usize::from(outcome.accepted));
    }
}
