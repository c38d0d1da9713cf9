use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use tower::ServiceExt;
use zksvm::envelope::BundleEnvelope;
use zksvm::features::EncodingConfig;
use zksvm::ipzkp::IpVariant;
use zksvm::model::{FeatureParams, SvmModel, FEATURE_COUNT};
use zksvm::zksvm::{prove_bundle, verify_bundle};
use zksvm_cli::nonce::ChallengeTicket;
use zksvm_cli::service::{router, AppState, AttestResponse, Clock, ErrorBody};

const N: usize = 4;

fn model(intercept: f64) -> SvmModel {
    let mut features = vec![FeatureParams::default(); FEATURE_COUNT];
    features[2].weight = 0.01;
    SvmModel::new("service-test", N, 4, intercept, 0.5, EncodingConfig::default(), features).unwrap()
}

fn state(model: SvmModel) -> (Arc<AppState>, Arc<AtomicU64>) {
    let now = Arc::new(AtomicU64::new(1_000_000));
    let t = now.clone();
    let clock: Clock = Arc::new(move || t.load(Ordering::SeqCst));
    let s = AppState::with_rng(model, Duration::from_secs(120), clock, ChaCha20Rng::seed_from_u64(5)).unwrap();
    (Arc::new(s), now)
}

async fn challenge(state: &Arc<AppState>) -> ChallengeTicket {
    let res = router(state.clone())
        .oneshot(Request::get("/challenge").body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(res.status(), StatusCode::OK);
    serde_json::from_slice(&res.into_body().collect().await.unwrap().to_bytes()).unwrap()
}

async fn attest(state: &Arc<AppState>, body: Vec<u8>) -> (StatusCode, Vec<u8>) {
    let res = router(state.clone())
        .oneshot(Request::post("/attest").body(Body::from(body)).unwrap())
        .await
        .unwrap();
    let status = res.status();
    (status, res.into_body().collect().await.unwrap().to_bytes().to_vec())
}

fn envelope(state: &AppState, nonce: &[u8], seed: u64) -> BundleEnvelope {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let vectors: Vec<Vec<u64>> = (0..12).map(|i| (0..N as u64).map(|j| 1000 + i * 17 + j * j * 31).collect()).collect();
    let att = prove_bundle(&state.params, &state.model, &vectors, nonce, IpVariant::Logarithmic, &mut rng).unwrap();
    BundleEnvelope::new(state.params.label(), N, IpVariant::Logarithmic, att.bundle)
}

#[tokio::test]
async fn honest_then_replay() {
    let (state, _) = state(model(1.0));
    let ticket = challenge(&state).await;
    assert!(ticket.single_use);
    assert_eq!(ticket.expires_at_ms - ticket.issued_at_ms, 120_000);
    let nonce = hex::decode(&ticket.nonce).unwrap();
    assert_eq!(nonce.len(), 32);
    let env = envelope(&state, &nonce, 1);

    let (status, body) = attest(&state, env.encode()).await;
    assert_eq!(status, StatusCode::OK);
    let resp: AttestResponse = serde_json::from_slice(&body).unwrap();
    let lib = verify_bundle(&state.params, &state.model, &env.bundle, &nonce);
    assert_eq!(resp, AttestResponse::from_verdict(&lib));
    assert_eq!(resp.verdict, "accept");

    let (status, body) = attest(&state, env.encode()).await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    let err: ErrorBody = serde_json::from_slice(&body).unwrap();
    assert!(err.error.contains("replay"));
}

#[tokio::test]
async fn bot_verdict_matches_library() {
    let (state, _) = state(model(-3.0));
    let nonce = hex::decode(challenge(&state).await.nonce).unwrap();
    let env = envelope(&state, &nonce, 2);
    let (status, body) = attest(&state, env.encode()).await;
    assert_eq!(status, StatusCode::OK);
    let resp: AttestResponse = serde_json::from_slice(&body).unwrap();
    assert_eq!(resp.verdict, "reject");
    assert_eq!(resp.procedure, Some(9));
    assert_eq!(resp, AttestResponse::from_verdict(&verify_bundle(&state.params, &state.model, &env.bundle, &nonce)));
}

#[tokio::test]
async fn expired_unknown_and_malformed() {
    let (state, now) = state(model(1.0));
    let nonce = hex::decode(challenge(&state).await.nonce).unwrap();
    let env = envelope(&state, &nonce, 3);
    now.fetch_add(120_000, Ordering::SeqCst);
    let (status, body) = attest(&state, env.encode()).await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    assert!(String::from_utf8_lossy(&body).contains("expired"));

    let unknown = envelope(&state, &[9u8; 32], 4);
    let (status, _) = attest(&state, unknown.encode()).await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);

    let mut bytes = env.encode();
    bytes.truncate(bytes.len() - 3);
    assert_eq!(attest(&state, bytes).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(attest(&state, b"not a bundle".to_vec()).await.0, StatusCode::BAD_REQUEST);

    let mut foreign = env.clone();
    foreign.label = b"another-model".to_vec();
    assert_eq!(attest(&state, foreign.encode()).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn bundle_for_another_nonce_is_rejected() {
    let (state, _) = state(model(1.0));
    let first = hex::decode(challenge(&state).await.nonce).unwrap();
    let second = hex::decode(challenge(&state).await.nonce).unwrap();
    let mut env = envelope(&state, &first, 5);
    env.bundle.nonce = second;
    let (status, body) = attest(&state, env.encode()).await;
    assert_eq!(status, StatusCode::OK);
    let resp: AttestResponse = serde_json::from_slice(&body).unwrap();
    assert_eq!(resp.verdict, "reject");
    assert_eq!(resp.procedure, Some(6));
}
