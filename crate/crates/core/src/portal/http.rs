//! HTTP front end for interactive mode.
//!
//! Handlers never call the verifier directly. A submission is queued to a
//! single loop task that stamps it with the current tick and runs
//! `handle_submit`, so HTTP input reaches the portal the same way simulated
//! victims do: one message at a time, in arrival order.

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Instant;

use axum::extract::rejection::FormRejection;
use axum::extract::{Form, State};
use axum::http::{header, StatusCode, Uri};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::{mpsc, oneshot};
use tokio::task::JoinHandle;

use super::{AttackState, CaptivePortal, PortalError, PortalResponse, RequestContext, RetryReason, SubmitOutcome};
use crate::medium::{Tick, TICKS_PER_SECOND};

/// A request forwarded from a handler into the portal loop.
#[derive(Debug)]
pub enum PortalMessage {
    Submit { candidate: String, reply: oneshot::Sender<SubmitOutcome> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusBody {
    pub state: String,
    pub essid: String,
    pub since_tick: Tick,
}

#[derive(Clone)]
struct AppState {
    portal: Arc<CaptivePortal>,
    queue: mpsc::Sender<PortalMessage>,
}

#[derive(Deserialize)]
struct SubmitForm {
    password: Option<String>,
}

/// Builds the routes. Submissions go to `queue`; something must drain it
/// with [`run_portal_loop`].
pub fn router(portal: Arc<CaptivePortal>, queue: mpsc::Sender<PortalMessage>) -> Router {
    Router::new()
        .route("/", get(index))
        .route("/submit", axum::routing::post(submit))
        .route("/status", get(status))
        .fallback(captive_redirect)
        .with_state(AppState { portal, queue })
}

/// Drains queued submissions until every sender is gone.
pub async fn run_portal_loop(
    portal: Arc<CaptivePortal>,
    mut rx: mpsc::Receiver<PortalMessage>,
    clock: impl Fn() -> Tick,
) {
    while let Some(msg) = rx.recv().await {
        match msg {
            PortalMessage::Submit { candidate, reply } => {
                let now = clock();
                let outcome = portal.handle_submit(&candidate, now);
                for kind in &outcome.events {
                    log::info!("portal tick={now} {kind:?}");
                }
                let _ = reply.send(outcome);
            }
        }
    }
}

async fn index(State(app): State<AppState>) -> Response {
    page_response(StatusCode::OK, app.portal.render_portal(&RequestContext::root()))
}

async fn submit(State(app): State<AppState>, form: Result<Form<SubmitForm>, FormRejection>) -> Response {
    let candidate = match form {
        Ok(Form(SubmitForm { password: Some(p) })) => p,
        _ => {
            let ctx = RequestContext { path: "/".into(), retry: Some(RetryReason::Length) };
            return page_response(StatusCode::BAD_REQUEST, app.portal.render_portal(&ctx));
        }
    };
    let (reply, rx) = oneshot::channel();
    if app.queue.send(PortalMessage::Submit { candidate, reply }).await.is_err() {
        return StatusCode::SERVICE_UNAVAILABLE.into_response();
    }
    match rx.await {
        Ok(outcome) => (StatusCode::OK, Html(outcome.response_page.0)).into_response(),
        Err(_) => StatusCode::SERVICE_UNAVAILABLE.into_response(),
    }
}

async fn status(State(app): State<AppState>) -> Json<StatusBody> {
    let s = app.portal.status();
    let state = match s.state {
        AttackState::Awaiting => "awaiting",
        AttackState::Recovered => "recovered",
    };
    Json(StatusBody { state: state.into(), essid: app.portal.essid().to_string(), since_tick: s.since_tick })
}

async fn captive_redirect(State(app): State<AppState>, uri: Uri) -> Response {
    let ctx = RequestContext { path: uri.path().to_string(), retry: None };
    page_response(StatusCode::OK, app.portal.render_portal(&ctx))
}

fn page_response(code: StatusCode, response: PortalResponse) -> Response {
    match response {
        PortalResponse::Page(page) => (code, Html(page.0)).into_response(),
        PortalResponse::Redirect { location } => {
            (StatusCode::FOUND, [(header::LOCATION, location)]).into_response()
        }
    }
}

/// A running portal listener.
pub struct PortalServiceHandle {
    local_addr: SocketAddr,
    portal: Arc<CaptivePortal>,
    server: JoinHandle<std::io::Result<()>>,
}

impl PortalServiceHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.local_addr
    }

    pub fn portal(&self) -> &Arc<CaptivePortal> {
        &self.portal
    }

    /// Waits for the lifecycle signal to stop the server.
    pub async fn wait(self) -> Result<(), PortalError> {
        match self.server.await {
            Ok(result) => result.map_err(PortalError::Io),
            Err(e) => Err(PortalError::Io(std::io::Error::other(e))),
        }
    }
}

/// Binds `config.bind_address` and serves until `lifecycle` resolves.
/// Ticks are milliseconds since the listener started.
pub async fn serve_http<F>(portal: Arc<CaptivePortal>, lifecycle: F) -> Result<PortalServiceHandle, PortalError>
where
    F: Future<Output = ()> + Send + 'static,
{
    let addr = portal.config().bind_address.clone();
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|source| PortalError::Bind { addr: addr.clone(), source })?;
    let local_addr = listener.local_addr()?;

    let (tx, rx) = mpsc::channel(64);
    let started = Instant::now();
    let per_tick_ms = 1000 / TICKS_PER_SECOND;
    tokio::spawn(run_portal_loop(portal.clone(), rx, move || {
        started.elapsed().as_millis() as Tick / per_tick_ms.max(1)
    }));

    let app = router(portal.clone(), tx);
    let server = tokio::spawn(async move { axum::serve(listener, app).with_graceful_shutdown(lifecycle).await });
    Ok(PortalServiceHandle { local_addr, portal, server })
}
