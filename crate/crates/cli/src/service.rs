//! HTTP challenge/verify service.
//!
//! `GET /challenge` issues a [`ChallengeTicket`]. `POST /attest` takes a
//! binary bundle envelope, spends its nonce and answers with the verdict.
//! Status codes: 400 for a malformed or mismatched envelope, 401 for an
//! unknown, expired or already used nonce, 200 with a verdict otherwise.

use std::sync::{Arc, Mutex};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use zksvm::envelope::BundleEnvelope;
use zksvm::model::SvmModel;
use zksvm::zksvm::{setup, verify_bundle, Verdict};
use zksvm::{CommitParams, Error};

use crate::nonce::{ChallengeTicket, NonceTable};

/// Milliseconds since the Unix epoch.
pub type Clock = Arc<dyn Fn() -> u64 + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0))
}

const MAX_BODY_BYTES: usize = 64 << 20;

pub struct AppState {
    pub params: CommitParams,
    pub model: SvmModel,
    nonces: Mutex<NonceTable>,
    clock: Clock,
    rng: Mutex<ChaCha20Rng>,
}

impl AppState {
    pub fn new(model: SvmModel, ttl: Duration, clock: Clock) -> Result<Self, Error> {
        Self::with_rng(model, ttl, clock, ChaCha20Rng::from_entropy())
    }

    pub fn with_rng(model: SvmModel, ttl: Duration, clock: Clock, rng: ChaCha20Rng) -> Result<Self, Error> {
        Ok(AppState {
            params: setup(&model)?,
            model,
            nonces: Mutex::new(NonceTable::new(ttl)),
            clock,
            rng: Mutex::new(rng),
        })
    }

    pub fn issue(&self) -> ChallengeTicket {
        let now = (self.clock)();
        let mut rng = self.rng.lock().expect("rng lock");
        self.nonces.lock().expect("nonce lock").issue(now, &mut *rng)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttestResponse {
    /// `"accept"` or `"reject"`.
    pub verdict: String,
    pub reason: Option<String>,
    /// Failing verification procedure (6–9), when there is one.
    pub procedure: Option<u8>,
    pub score: Option<i128>,
    pub probability: Option<f64>,
}

impl AttestResponse {
    pub fn from_verdict(v: &Verdict) -> Self {
        match v {
            Verdict::Accept { score, probability } => AttestResponse {
                verdict: "accept".into(),
                reason: None,
                procedure: None,
                score: Some(*score),
                probability: Some(*probability),
            },
            Verdict::Reject(r) => AttestResponse {
                verdict: "reject".into(),
                reason: Some(r.to_string()),
                procedure: r.procedure.number(),
                score: r.evaluated.map(|e| e.0),
                probability: r.evaluated.map(|e| e.1),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

fn error(status: StatusCode, msg: impl Into<String>) -> Response {
    (status, Json(ErrorBody { error: msg.into() })).into_response()
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/challenge", get(challenge))
        .route("/attest", post(attest))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state)
}

async fn challenge(State(state): State<Arc<AppState>>) -> Json<ChallengeTicket> {
    Json(state.issue())
}

async fn attest(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let envelope = match BundleEnvelope::decode(&body) {
        Ok(e) => e,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("malformed envelope: {e}")),
    };
    if envelope.label != state.params.label() || envelope.n != state.params.n() {
        return error(StatusCode::BAD_REQUEST, "envelope was produced for a different model");
    }
    let now = (state.clock)();
    let redeemed = state.nonces.lock().expect("nonce lock").redeem(&envelope.bundle.nonce, now);
    if let Err(e) = redeemed {
        return error(StatusCode::UNAUTHORIZED, e.to_string());
    }
    let worker = state.clone();
    let verdict = tokio::task::spawn_blocking(move || {
        let nonce = envelope.bundle.nonce.clone();
        verify_bundle(&worker.params, &worker.model, &envelope.bundle, &nonce)
    })
    .await;
    match verdict {
        Ok(v) => Json(AttestResponse::from_verdict(&v)).into_response(),
        Err(_) => error(StatusCode::INTERNAL_SERVER_ERROR, "verification task failed"),
    }
}

/// Serves `router` on `addr` until the process is stopped.
pub async fn serve(state: Arc<AppState>, addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}
