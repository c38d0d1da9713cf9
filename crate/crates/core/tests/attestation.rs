use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use zksvm::envelope::BundleEnvelope;
use zksvm::features::{EncodingConfig, VECTOR_COUNT};
use zksvm::ipzkp::IpVariant;
use zksvm::model::{FeatureParams, SvmModel, FEATURE_COUNT};
use zksvm::transcript::oracle::ProgrammableOracle;
use zksvm::zksvm::simulate::simulate_bundle;
use zksvm::zksvm::{
    plaintext_features, prove_bundle, setup, verify_bundle, verify_bundle_with_root, Procedure, Verdict, PROTOCOL_LABEL,
};
use zksvm::Transcript;

const N: usize = 8;
const NONCE: &[u8] = b"attestation-test-nonce-0001";

fn model(weight: f64, intercept: f64) -> SvmModel {
    let features = (0..FEATURE_COUNT).map(|i| FeatureParams { mean: 0.0, scale: 1.0, weight: weight * (1 + i % 3) as f64 }).collect();
    SvmModel::new("attestation-test", N, 3, intercept, 0.5, EncodingConfig::default(), features).unwrap()
}

fn random_vectors(seed: u64) -> Vec<Vec<u64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..VECTOR_COUNT).map(|_| (0..N).map(|_| rng.next_u64() % (1 << 20)).collect()).collect()
}

#[test]
fn linear_and_log_bundles_agree() {
    let m = model(0.01, 0.0);
    let params = setup(&m).unwrap();
    let vectors = random_vectors(3);
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let log = prove_bundle(&params, &m, &vectors, NONCE, IpVariant::Logarithmic, &mut rng).unwrap();
    let lin = prove_bundle(&params, &m, &vectors, NONCE, IpVariant::Linear, &mut rng).unwrap();
    assert_eq!(log.bundle.score, lin.bundle.score);
    assert_eq!(verify_bundle(&params, &m, &log.bundle, NONCE), verify_bundle(&params, &m, &lin.bundle, NONCE));

    let features = plaintext_features(&vectors).unwrap();
    let expected: i128 = features.iter().zip(&m.quantized).map(|(f, q)| f * q).sum();
    assert_eq!(log.bundle.score, expected);
}

#[test]
fn envelope_round_trip_preserves_verdict() {
    let m = model(0.01, 0.0);
    let params = setup(&m).unwrap();
    let att = prove_bundle(&params, &m, &random_vectors(4), NONCE, IpVariant::Linear, &mut ChaCha20Rng::seed_from_u64(2))
        .unwrap();
    let bytes = BundleEnvelope::new(params.label(), N, IpVariant::Linear, att.bundle.clone()).encode();
    let decoded = BundleEnvelope::decode(&bytes).unwrap();
    assert_eq!(decoded.variant, IpVariant::Linear);
    assert_eq!(verify_bundle(&params, &m, &decoded.bundle, NONCE), verify_bundle(&params, &m, &att.bundle, NONCE));
}

#[test]
fn simulated_bundle_verifies_under_programmed_oracle() {
    let m = model(0.01, 0.0);
    let params = setup(&m).unwrap();
    let real = prove_bundle(&params, &m, &random_vectors(5), NONCE, IpVariant::Logarithmic, &mut ChaCha20Rng::seed_from_u64(3))
        .unwrap();
    let features = real.openings.iter().flat_map(|o| o.features().map(|f| zksvm::group::scalar_to_i128(&f.value).unwrap())).collect::<Vec<_>>();

    let oracle = ProgrammableOracle::new();
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let fake = simulate_bundle(&params, &m, &features, NONCE, Transcript::with_oracle(PROTOCOL_LABEL, oracle.clone()), IpVariant::Logarithmic, &mut rng)
        .unwrap();
    assert_eq!(fake.score, real.bundle.score);
    let verdict = verify_bundle_with_root(&params, &m, &fake, NONCE, Transcript::with_oracle(PROTOCOL_LABEL, oracle));
    assert!(verdict.is_accept(), "{verdict:?}");

    let real_len = BundleEnvelope::new(params.label(), N, IpVariant::Logarithmic, real.bundle).encode().len();
    let fake_len = BundleEnvelope::new(params.label(), N, IpVariant::Logarithmic, fake.clone()).encode().len();
    assert_eq!(real_len, fake_len);

    // Without the programmed challenges the simulated proofs fall apart.
    assert!(!verify_bundle(&params, &m, &fake, NONCE).is_accept());
}

#[test]
fn swapping_vectors_between_bundles_is_rejected() {
    let m = model(0.01, 0.0);
    let params = setup(&m).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let a = prove_bundle(&params, &m, &random_vectors(7), NONCE, IpVariant::Logarithmic, &mut rng).unwrap();
    let b = prove_bundle(&params, &m, &random_vectors(8), NONCE, IpVariant::Logarithmic, &mut rng).unwrap();
    let mut mixed = a.bundle.clone();
    mixed.vectors[5] = b.bundle.vectors[5].clone();
    match verify_bundle(&params, &m, &mixed, NONCE) {
        Verdict::Reject(r) => assert!(r.vector == Some(5) || r.procedure == Procedure::Score, "{r}"),
        Verdict::Accept { .. } => panic!("mixed bundle accepted"),
    }
    mixed.vectors.swap(0, 1);
    assert!(!verify_bundle(&params, &m, &mixed, NONCE).is_accept());
}

#[test]
fn bundle_is_bound_to_its_model() {
    let m = model(0.01, 0.0);
    let other = model(0.02, 0.0);
    let params = setup(&m).unwrap();
    let att = prove_bundle(&params, &m, &random_vectors(10), NONCE, IpVariant::Logarithmic, &mut ChaCha20Rng::seed_from_u64(9))
        .unwrap();
    assert!(verify_bundle(&params, &m, &att.bundle, NONCE).is_accept());
    assert!(!verify_bundle(&params, &other, &att.bundle, NONCE).is_accept());
}
