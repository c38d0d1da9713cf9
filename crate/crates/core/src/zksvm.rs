//! The attestation protocol: commitments to 12 input vectors, proofs that
//! their means and standard deviations (and those of their consecutive
//! differences) were computed correctly, and an opened SVM score.
//!
//! Per vector `v⃗` with `S_H = g⃗^v⃗ h^r`, the prover produces
//!
//! ```text
//! Δ  = [Diff, S_H^iter, Π_Eq, Π_0]         Diff commits to (v₁−v₂, …, v_{n−1}−v_n, 0)
//! M  = [Avg, Π_IP^μ]                       Avg commits to μ̃ = Σ v_i, over A = S_H·h⃗^1⃗
//! M′ = [Avg′, Π_IP^μ′]                     the same for Diff
//! Λ  = [G^μ̃, H^μ̃, H_S, Π_Eq^G, Π_Eq^H, Π_Eq^S, Var, Π_IP^σ², Std, Π_sqrt]
//! Λ′ = the same for Diff and Avg′
//! ```
//!
//! where `Var` commits to `⟨N v⃗ − μ̃1⃗, N v⃗ − μ̃1⃗⟩ = N³σ²` over
//! `A_S = (S_H^N / G^μ̃)·(H_S^N / H^μ̃)` and `Std` to `⌊√Var⌋`. The bundle
//! then opens `Res = Π Comm_i^{q_i}` over the 48 feature commitments
//! `(Avg, Avg′, Std, Std′)` as `(Score, r_R)`.
//!
//! Transcripts: a root transcript binds the server nonce, the generator
//! label, `n` and the model's quantized weights. Each vector forks it by
//! index and absorbs `S_H`; every sub-proof runs on its own labelled fork.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_core::CryptoRng;
use rayon::prelude::*;

use crate::errors::Error;
use crate::features::{VECTOR_COUNT, VECTOR_NAMES};
use crate::group::{
    multiexp, random_scalar, scalar_from_i128, scalar_to_i128, Basis, CommitParams, GroupPoint,
    GroupScalar,
};
use crate::ipzkp::{ip_prove, ip_verify, IpProof, IpStatement, IpVariant, IpWitness};
use crate::model::{SvmModel, FEATURE_COUNT};
use crate::pedersen::{commit_scalar, commit_vector, Commitment, ScalarCommitment, VectorCommitment};
use crate::sigma::{
    prove_equality, prove_zero_replace, verify_equality, verify_zero_replace, EqualityProof,
    ZeroReplaceProof,
};
use crate::sqrt::{isqrt, prove_sqrt, verify_sqrt, SqrtProof};
use crate::transcript::Transcript;

/// Bit length of every range statement inside the protocol.
pub const RANGE_BITS: usize = 64;

pub const PROTOCOL_LABEL: &[u8] = b"zksvm.attestation.v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaProof {
    pub diff: Commitment,
    pub iterated: Commitment,
    pub equality: EqualityProof,
    pub zero: ZeroReplaceProof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumProof {
    pub avg: Commitment,
    pub ip: IpProof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StdProof {
    pub g_avg: Commitment,
    pub h_avg: Commitment,
    pub h_s: Commitment,
    pub eq_g: EqualityProof,
    pub eq_h: EqualityProof,
    pub eq_s: EqualityProof,
    pub var: Commitment,
    pub ip: IpProof,
    pub std: Commitment,
    pub sqrt: SqrtProof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorProofSet {
    /// `S_H`.
    pub commitment: Commitment,
    pub delta: DeltaProof,
    pub sum: SumProof,
    pub sum_diff: SumProof,
    pub std: StdProof,
    pub std_diff: StdProof,
}

impl VectorProofSet {
    /// Feature commitments in [`Stat`] order.
    pub fn feature_commitments(&self) -> [Commitment; 4] {
        [self.sum.avg, self.sum_diff.avg, self.std.std, self.std_diff.std]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttestationBundle {
    /// Server challenge the transcripts are bound to.
    pub nonce: Vec<u8>,
    pub vectors: Vec<VectorProofSet>,
    pub score: i128,
    /// `r_R`.
    pub score_blinding: GroupScalar,
}

/// Prover-side openings of one vector's derived commitments.
#[derive(Clone, Debug)]
pub struct VectorOpenings {
    pub commitment: VectorCommitment,
    pub diff: VectorCommitment,
    pub avg: ScalarCommitment,
    pub avg_diff: ScalarCommitment,
    pub var: ScalarCommitment,
    pub var_diff: ScalarCommitment,
    pub std: ScalarCommitment,
    pub std_diff: ScalarCommitment,
}

impl VectorOpenings {
    /// Opened feature commitments in [`Stat`] order.
    pub fn features(&self) -> [&ScalarCommitment; 4] {
        [&self.avg, &self.avg_diff, &self.std, &self.std_diff]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Procedure {
    /// Nonce echo and bundle shape.
    Challenge,
    ConsecutiveDifference,
    Sum,
    StandardDeviation,
    Score,
}

impl Procedure {
    /// Verification procedure number (6–9); `None` for the challenge gate.
    pub fn number(self) -> Option<u8> {
        match self {
            Procedure::Challenge => None,
            Procedure::ConsecutiveDifference => Some(6),
            Procedure::Sum => Some(7),
            Procedure::StandardDeviation => Some(8),
            Procedure::Score => Some(9),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Procedure::Challenge => "challenge binding",
            Procedure::ConsecutiveDifference => "consecutive difference",
            Procedure::Sum => "sum of vectors",
            Procedure::StandardDeviation => "standard deviation",
            Procedure::Score => "score",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rejection {
    pub procedure: Procedure,
    pub vector: Option<usize>,
    pub check: String,
    /// Opened score and sigmoid value, when the rejection came after the
    /// opening check (a bot classification).
    pub evaluated: Option<(i128, f64)>,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.procedure.number() {
            Some(n) => write!(f, "procedure {n} ({})", self.procedure.name())?,
            None => write!(f, "{}", self.procedure.name())?,
        }
        if let Some(v) = self.vector {
            write!(f, ", vector {v} ({})", VECTOR_NAMES[v])?;
        }
        write!(f, ": {}", self.check)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Accept { score: i128, probability: f64 },
    Reject(Rejection),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept { .. })
    }

    pub fn rejection(&self) -> Option<&Rejection> {
        match self {
            Verdict::Reject(r) => Some(r),
            Verdict::Accept { .. } => None,
        }
    }
}

fn reject(procedure: Procedure, vector: Option<usize>, check: &str) -> Rejection {
    Rejection { procedure, vector, check: check.to_string(), evaluated: None }
}

/// Setup: the model's generator set.
pub fn setup(model: &SvmModel) -> Result<CommitParams, Error> {
    CommitParams::derive(model.label.as_bytes(), model.n)
}

fn check_params(params: &CommitParams, model: &SvmModel) -> Result<(), Error> {
    if params.n() != model.n || params.label() != model.label.as_bytes() {
        return Err(Error::InvalidParameter("parameters were not derived for this model".into()));
    }
    Ok(())
}

/// Root transcript of an attestation under `nonce`.
pub fn root_transcript(params: &CommitParams, model: &SvmModel, nonce: &[u8]) -> Result<Transcript, Error> {
    let mut t = Transcript::new(PROTOCOL_LABEL);
    bind_root(&mut t, params, model, nonce)?;
    Ok(t)
}

fn bind_root(t: &mut Transcript, params: &CommitParams, model: &SvmModel, nonce: &[u8]) -> Result<(), Error> {
    t.bind_server_challenge(nonce)?;
    t.absorb(b"params.label", params.label());
    t.absorb_u64(b"params.n", params.n() as u64);
    t.absorb(b"model", &model.digest_bytes());
    Ok(())
}

fn vector_transcript(root: &Transcript, index: usize, commitment: &Commitment) -> Transcript {
    let mut t = root.fork_indexed(b"vector", index as u64);
    t.absorb_point(b"S_H", &commitment.0);
    t
}

fn ones_point(params: &CommitParams) -> GroupPoint {
    params.hvec.iter().sum()
}

fn n_scalar(params: &CommitParams) -> GroupScalar {
    GroupScalar::from(params.n() as u64)
}

/// Procedure 2.
pub fn prove_consecutive_difference<R: RngCore + CryptoRng>(
    params: &CommitParams,
    sh: &VectorCommitment,
    t: &Transcript,
    rng: &mut R,
) -> Result<(DeltaProof, VectorCommitment), Error> {
    let n = params.n();
    let iterated = commit_vector(params, Basis::GIter, sh.values.clone(), random_scalar(rng))?;
    let equality = prove_equality(params, sh, &iterated, &mut t.fork(b"delta.eq"), rng)?;
    let quotient = VectorCommitment {
        commitment: sh.commitment / iterated.commitment,
        basis: Basis::G,
        values: (0..n).map(|i| sh.values[i] - sh.values[(i + 1) % n]).collect(),
        blinding: sh.blinding - iterated.blinding,
    };
    let (diff, zero) =
        prove_zero_replace(params, &quotient, n - 1, random_scalar(rng), &mut t.fork(b"delta.zero"), rng)?;
    Ok((
        DeltaProof { diff: diff.commitment, iterated: iterated.commitment, equality, zero },
        diff,
    ))
}

/// Procedure 3 for one commitment.
pub fn prove_sum<R: RngCore + CryptoRng>(
    params: &CommitParams,
    c: &VectorCommitment,
    variant: IpVariant,
    t: &mut Transcript,
    rng: &mut R,
) -> Result<(SumProof, ScalarCommitment), Error> {
    let total: GroupScalar = c.values.iter().sum();
    let avg = commit_scalar(params, total, random_scalar(rng));
    let wit = IpWitness {
        a: c.values.clone(),
        b: vec![GroupScalar::ONE; params.n()],
        alpha: c.blinding,
        gamma: avg.blinding,
        c: total,
    };
    let stmt = sum_statement(params, &c.commitment, &avg.commitment);
    let ip = ip_prove(params, &stmt, &wit, variant, t, rng)?;
    Ok((SumProof { avg: avg.commitment, ip }, avg))
}

fn sum_statement(params: &CommitParams, c: &Commitment, avg: &Commitment) -> IpStatement {
    IpStatement { vectors: c.0 + ones_point(params), value: avg.0 }
}

/// `⟨N v⃗ − μ̃1⃗, N v⃗ − μ̃1⃗⟩` over the integers, refusing values of 64 bits
/// or more.
pub fn scaled_variance(values: &[i128], total: i128) -> Result<u64, Error> {
    let n = values.len() as i128;
    let overflow = || Error::Bound("N³σ² does not fit in 64 bits".into());
    let mut acc: i128 = 0;
    for v in values {
        let d = n.checked_mul(*v).and_then(|x| x.checked_sub(total)).ok_or_else(overflow)?;
        acc = d.checked_mul(d).and_then(|x| acc.checked_add(x)).ok_or_else(overflow)?;
    }
    u64::try_from(acc).map_err(|_| overflow())
}

/// Procedure 4 for one commitment and its sum.
pub fn prove_std<R: RngCore + CryptoRng>(
    params: &CommitParams,
    c: &VectorCommitment,
    avg: &ScalarCommitment,
    variant: IpVariant,
    t: &Transcript,
    rng: &mut R,
) -> Result<(StdProof, ScalarCommitment, ScalarCommitment), Error> {
    let ints = c
        .values
        .iter()
        .map(scalar_to_i128)
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Bound("vector entries are not small integers".into()))?;
    let total = scalar_to_i128(&avg.value).ok_or_else(|| Error::Bound("sum is not a small integer".into()))?;
    let var_value = scaled_variance(&ints, total)?;

    let g_avg = commit_vector(params, Basis::GProduct, vec![avg.value], random_scalar(rng))?;
    let h_avg = commit_vector(params, Basis::HProduct, vec![avg.value], random_scalar(rng))?;
    let h_s = commit_vector(params, Basis::H, c.values.clone(), random_scalar(rng))?;
    let eq_g = prove_equality(params, &avg.as_vector(), &g_avg, &mut t.fork(b"std.eq-g"), rng)?;
    let eq_h = prove_equality(params, &avg.as_vector(), &h_avg, &mut t.fork(b"std.eq-h"), rng)?;
    let eq_s = prove_equality(params, c, &h_s, &mut t.fork(b"std.eq-s"), rng)?;

    let n = n_scalar(params);
    let centered: Vec<_> = c.values.iter().map(|v| n * v - avg.value).collect();
    let var = commit_scalar(params, GroupScalar::from(var_value), random_scalar(rng));
    let wit = IpWitness {
        a: centered.clone(),
        b: centered,
        alpha: n * c.blinding - g_avg.blinding + n * h_s.blinding - h_avg.blinding,
        gamma: var.blinding,
        c: var.value,
    };
    let stmt = variance_statement(params, &c.commitment, &g_avg.commitment, &h_s.commitment, &h_avg.commitment, &var.commitment);
    let ip = ip_prove(params, &stmt, &wit, variant, &mut t.fork(b"std.ip"), rng)?;

    let std = commit_scalar(params, GroupScalar::from(isqrt(var_value as u128) as u64), random_scalar(rng));
    let sqrt = prove_sqrt(params, &std, &var, RANGE_BITS, &mut t.fork(b"std.sqrt"), rng)?;
    Ok((
        StdProof {
            g_avg: g_avg.commitment,
            h_avg: h_avg.commitment,
            h_s: h_s.commitment,
            eq_g,
            eq_h,
            eq_s,
            var: var.commitment,
            ip,
            std: std.commitment,
            sqrt,
        },
        var,
        std,
    ))
}

/// `A_S = (C^N / G^μ̃)·(H_S^N / H^μ̃)` with `V = Var`.
fn variance_statement(
    params: &CommitParams,
    c: &Commitment,
    g_avg: &Commitment,
    h_s: &Commitment,
    h_avg: &Commitment,
    var: &Commitment,
) -> IpStatement {
    let n = n_scalar(params);
    let l = c.pow(&n) / *g_avg;
    let r = h_s.pow(&n) / *h_avg;
    IpStatement { vectors: (l * r).0, value: var.0 }
}

/// Procedure 5: `(Score, r_R)` from the feature openings.
pub fn compute_score(features: &[&ScalarCommitment], quantized: &[i128]) -> Result<(i128, GroupScalar), Error> {
    if features.len() != quantized.len() {
        return Err(Error::InvalidParameter("feature and weight counts differ".into()));
    }
    let overflow = || Error::Bound("score does not fit in 128 bits".into());
    let mut score: i128 = 0;
    let mut blinding = GroupScalar::ZERO;
    for (f, q) in features.iter().zip(quantized) {
        let value = scalar_to_i128(&f.value).ok_or_else(overflow)?;
        score = value.checked_mul(*q).and_then(|x| score.checked_add(x)).ok_or_else(overflow)?;
        blinding += f.blinding * scalar_from_i128(*q);
    }
    Ok((score, blinding))
}

/// The 48 integer features `(Avg, Avg′, Std, Std′)` per vector, computed in
/// the clear. These are the values the feature commitments open to.
pub fn plaintext_features(vectors: &[Vec<u64>]) -> Result<Vec<i128>, Error> {
    let mut out = Vec::with_capacity(vectors.len() * 4);
    for v in vectors {
        let n = v.len();
        let ints: Vec<i128> = v.iter().map(|x| *x as i128).collect();
        let diff: Vec<i128> = (0..n).map(|i| if i + 1 < n { ints[i] - ints[i + 1] } else { 0 }).collect();
        let (sum, sum_diff) = (ints.iter().sum::<i128>(), diff.iter().sum::<i128>());
        let std = isqrt(scaled_variance(&ints, sum)? as u128) as i128;
        let std_diff = isqrt(scaled_variance(&diff, sum_diff)? as u128) as i128;
        out.extend([sum, sum_diff, std, std_diff]);
    }
    Ok(out)
}

/// Proves all five procedures for one vector.
pub fn prove_vector<R: RngCore + CryptoRng>(
    params: &CommitParams,
    values: &[u64],
    root: &Transcript,
    index: usize,
    variant: IpVariant,
    rng: &mut R,
) -> Result<(VectorProofSet, VectorOpenings), Error> {
    if values.len() != params.n() {
        return Err(Error::InvalidParameter(format!(
            "vector {index} has length {}, expected {}",
            values.len(),
            params.n()
        )));
    }
    let scalars = values.iter().map(|v| GroupScalar::from(*v)).collect();
    let sh = commit_vector(params, Basis::G, scalars, random_scalar(rng))?;
    let t = vector_transcript(root, index, &sh.commitment);
    let (delta, diff) = prove_consecutive_difference(params, &sh, &t, rng)?;
    let (sum, avg) = prove_sum(params, &sh, variant, &mut t.fork(b"sum"), rng)?;
    let (sum_diff, avg_diff) = prove_sum(params, &diff, variant, &mut t.fork(b"sum'"), rng)?;
    let (std, var, std_open) = prove_std(params, &sh, &avg, variant, &t.fork(b"std"), rng)?;
    let (std_diff, var_diff, std_diff_open) = prove_std(params, &diff, &avg_diff, variant, &t.fork(b"std'"), rng)?;
    Ok((
        VectorProofSet { commitment: sh.commitment, delta, sum, sum_diff, std, std_diff },
        VectorOpenings {
            commitment: sh,
            diff,
            avg,
            avg_diff,
            var,
            var_diff,
            std: std_open,
            std_diff: std_diff_open,
        },
    ))
}

/// Prover output: the bundle to send and the openings kept locally.
#[derive(Clone, Debug)]
pub struct Attestation {
    pub bundle: AttestationBundle,
    pub openings: Vec<VectorOpenings>,
}

/// Runs the prover over the 12 input vectors, bound to `nonce`.
pub fn prove_bundle<R: RngCore + CryptoRng>(
    params: &CommitParams,
    model: &SvmModel,
    vectors: &[Vec<u64>],
    nonce: &[u8],
    variant: IpVariant,
    rng: &mut R,
) -> Result<Attestation, Error> {
    check_params(params, model)?;
    if vectors.len() != VECTOR_COUNT {
        return Err(Error::InvalidParameter(format!("expected {VECTOR_COUNT} vectors, got {}", vectors.len())));
    }
    let root = root_transcript(params, model, nonce)?;
    let seeds: Vec<[u8; 32]> = (0..VECTOR_COUNT)
        .map(|_| {
            let mut s = [0u8; 32];
            rng.fill_bytes(&mut s);
            s
        })
        .collect();
    let results = vectors
        .par_iter()
        .zip(seeds)
        .enumerate()
        .map(|(i, (v, seed))| prove_vector(params, v, &root, i, variant, &mut ChaCha20Rng::from_seed(seed)))
        .collect::<Result<Vec<_>, _>>()?;
    let (sets, openings): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let features: Vec<&ScalarCommitment> = openings.iter().flat_map(|o| o.features()).collect();
    let (score, score_blinding) = compute_score(&features, &model.quantized)?;
    Ok(Attestation {
        bundle: AttestationBundle { nonce: nonce.to_vec(), vectors: sets, score, score_blinding },
        openings,
    })
}

fn verify_delta(params: &CommitParams, set: &VectorProofSet, t: &Transcript) -> Result<(), &'static str> {
    let d = &set.delta;
    if !verify_equality(params, Basis::G, &set.commitment, Basis::GIter, &d.iterated, &d.equality, &mut t.fork(b"delta.eq")) {
        return Err("Π_Eq between S_H and S_H^iter");
    }
    let quotient = set.commitment / d.iterated;
    if !verify_zero_replace(params, Basis::G, &quotient, &d.diff, params.n() - 1, &d.zero, &mut t.fork(b"delta.zero")) {
        return Err("Π_0 zero replacement");
    }
    Ok(())
}

fn verify_sum(params: &CommitParams, c: &Commitment, proof: &SumProof, t: &mut Transcript) -> bool {
    ip_verify(params, &sum_statement(params, c, &proof.avg), &proof.ip, t)
}

fn verify_std(
    params: &CommitParams,
    c: &Commitment,
    avg: &Commitment,
    p: &StdProof,
    t: &Transcript,
) -> Result<(), &'static str> {
    if !verify_equality(params, Basis::Value, avg, Basis::GProduct, &p.g_avg, &p.eq_g, &mut t.fork(b"std.eq-g")) {
        return Err("Π_Eq^G between Avg and G^μ̃");
    }
    if !verify_equality(params, Basis::Value, avg, Basis::HProduct, &p.h_avg, &p.eq_h, &mut t.fork(b"std.eq-h")) {
        return Err("Π_Eq^H between Avg and H^μ̃");
    }
    if !verify_equality(params, Basis::G, c, Basis::H, &p.h_s, &p.eq_s, &mut t.fork(b"std.eq-s")) {
        return Err("Π_Eq^S between S_H and H_S");
    }
    let stmt = variance_statement(params, c, &p.g_avg, &p.h_s, &p.h_avg, &p.var);
    if !ip_verify(params, &stmt, &p.ip, &mut t.fork(b"std.ip")) {
        return Err("Π_IP^σ² for Var");
    }
    if !verify_sqrt(params, &p.std, &p.var, RANGE_BITS, &p.sqrt, &mut t.fork(b"std.sqrt")) {
        return Err("Π_sqrt for Std");
    }
    Ok(())
}

/// Procedures 6–8 for one vector.
pub fn verify_vector(
    params: &CommitParams,
    set: &VectorProofSet,
    root: &Transcript,
    index: usize,
) -> Result<(), Rejection> {
    let t = vector_transcript(root, index, &set.commitment);
    let at = Some(index);
    verify_delta(params, set, &t).map_err(|c| reject(Procedure::ConsecutiveDifference, at, c))?;
    if !verify_sum(params, &set.commitment, &set.sum, &mut t.fork(b"sum")) {
        return Err(reject(Procedure::Sum, at, "Π_IP^μ for Avg"));
    }
    if !verify_sum(params, &set.delta.diff, &set.sum_diff, &mut t.fork(b"sum'")) {
        return Err(reject(Procedure::Sum, at, "Π_IP^μ′ for Avg′"));
    }
    verify_std(params, &set.commitment, &set.sum.avg, &set.std, &t.fork(b"std"))
        .map_err(|c| reject(Procedure::StandardDeviation, at, c))?;
    verify_std(params, &set.delta.diff, &set.sum_diff.avg, &set.std_diff, &t.fork(b"std'"))
        .map_err(|c| reject(Procedure::StandardDeviation, at, &format!("{c} (difference vector)")))?;
    Ok(())
}

/// `Res′ = Π Comm_i^{q_i}` over the bundle's feature commitments.
pub fn result_commitment(model: &SvmModel, bundle: &AttestationBundle) -> Result<Commitment, Error> {
    if bundle.vectors.len() != VECTOR_COUNT {
        return Err(Error::InvalidParameter("bundle does not hold 12 vectors".into()));
    }
    let points: Vec<GroupPoint> =
        bundle.vectors.iter().flat_map(|v| v.feature_commitments()).map(|c| c.0).collect();
    let weights: Vec<GroupScalar> = model.quantized.iter().map(|q| scalar_from_i128(*q)).collect();
    debug_assert_eq!(points.len(), FEATURE_COUNT);
    multiexp(&points, &weights).map(Commitment)
}

/// Runs verification Procedures 6–9 on `bundle` for the server challenge
/// `nonce`.
pub fn verify_bundle(params: &CommitParams, model: &SvmModel, bundle: &AttestationBundle, nonce: &[u8]) -> Verdict {
    let root = match root_transcript(params, model, nonce) {
        Ok(t) => t,
        Err(e) => return Verdict::Reject(reject(Procedure::Challenge, None, &e.to_string())),
    };
    verify_with_root(params, model, bundle, nonce, root)
}

/// [`verify_bundle`] over a caller-supplied root transcript (one carrying a
/// programmable oracle, for the simulation tests).
#[cfg(feature = "test-oracles")]
pub fn verify_bundle_with_root(
    params: &CommitParams,
    model: &SvmModel,
    bundle: &AttestationBundle,
    nonce: &[u8],
    mut root: Transcript,
) -> Verdict {
    if let Err(e) = bind_root(&mut root, params, model, nonce) {
        return Verdict::Reject(reject(Procedure::Challenge, None, &e.to_string()));
    }
    verify_with_root(params, model, bundle, nonce, root)
}

fn verify_with_root(
    params: &CommitParams,
    model: &SvmModel,
    bundle: &AttestationBundle,
    nonce: &[u8],
    root: Transcript,
) -> Verdict {
    if check_params(params, model).is_err() {
        return Verdict::Reject(reject(Procedure::Challenge, None, "parameters do not match the model"));
    }
    if bundle.nonce != nonce {
        return Verdict::Reject(reject(Procedure::Challenge, None, "bundle is bound to a different nonce"));
    }
    if bundle.vectors.len() != VECTOR_COUNT {
        return Verdict::Reject(reject(Procedure::Challenge, None, "bundle does not hold 12 vectors"));
    }
    let failure = bundle
        .vectors
        .par_iter()
        .enumerate()
        .find_map_first(|(i, set)| verify_vector(params, set, &root, i).err());
    if let Some(r) = failure {
        return Verdict::Reject(r);
    }
    verify_score(params, model, bundle)
}

/// Procedure 9.
fn verify_score(params: &CommitParams, model: &SvmModel, bundle: &AttestationBundle) -> Verdict {
    let res = match result_commitment(model, bundle) {
        Ok(c) => c,
        Err(e) => return Verdict::Reject(reject(Procedure::Score, None, &e.to_string())),
    };
    let opened = commit_scalar(params, scalar_from_i128(bundle.score), bundle.score_blinding);
    if opened.commitment != res {
        return Verdict::Reject(reject(Procedure::Score, None, "Res′ does not open to (Score, r_R)"));
    }
    let (probability, decision) = model.evaluate(bundle.score);
    match decision {
        crate::model::Decision::Human => Verdict::Accept { score: bundle.score, probability },
        crate::model::Decision::Bot => Verdict::Reject(Rejection {
            procedure: Procedure::Score,
            vector: None,
            check: format!("classified as bot (s = {probability:.6} < {})", model.threshold),
            evaluated: Some((bundle.score, probability)),
        }),
    }
}

/// `(points, scalars)` per vector proof set for length `n`.
pub fn vector_element_counts(n: usize, variant: IpVariant) -> (usize, usize) {
    let (ip_p, ip_s) = variant.element_counts(n);
    let (sqrt_p, sqrt_s) = crate::sqrt::sqrt_element_counts(RANGE_BITS);
    // Π_Eq over k generators: 2 announcements, k + 2 responses.
    let eq = |k: usize| (2, k + 2);
    // Π_0: E and 3 announcements, n + 2 responses.
    let zero = (4, n + 2);
    let delta = (2 + eq(n).0 + zero.0, eq(n).1 + zero.1);
    let sum = (1 + ip_p, ip_s);
    let std = (
        3 + 2 * eq(1).0 + eq(n).0 + 1 + ip_p + 1 + sqrt_p,
        2 * eq(1).1 + eq(n).1 + ip_s + sqrt_s,
    );
    (1 + delta.0 + 2 * sum.0 + 2 * std.0, delta.1 + 2 * sum.1 + 2 * std.1)
}

#[cfg(feature = "test-oracles")]
pub mod simulate {
    //! Bundles assembled from simulated sub-proofs. Every commitment is
    //! either random or a commitment to a value the simulator picks; no
    //! input vector exists.

    use super::*;
    use crate::ipzkp::ip_simulate;
    use crate::model::{feature_index, Stat};
    use crate::sigma::simulate as sigma_sim;
    use crate::sqrt::simulate_sqrt;

    fn random_commitment<R: RngCore + CryptoRng>(rng: &mut R) -> Commitment {
        Commitment(crate::group::random_point(rng))
    }

    fn simulate_std<R: RngCore + CryptoRng>(
        params: &CommitParams,
        c: &Commitment,
        avg: &Commitment,
        std: &Commitment,
        variant: IpVariant,
        t: &Transcript,
        rng: &mut R,
    ) -> Result<StdProof, Error> {
        let g_avg = random_commitment(rng);
        let h_avg = random_commitment(rng);
        let h_s = random_commitment(rng);
        let var = random_commitment(rng);
        let eq_g = sigma_sim::equality(params, Basis::Value, avg, Basis::GProduct, &g_avg, &mut t.fork(b"std.eq-g"), rng);
        let eq_h = sigma_sim::equality(params, Basis::Value, avg, Basis::HProduct, &h_avg, &mut t.fork(b"std.eq-h"), rng);
        let eq_s = sigma_sim::equality(params, Basis::G, c, Basis::H, &h_s, &mut t.fork(b"std.eq-s"), rng);
        let stmt = variance_statement(params, c, &g_avg, &h_s, &h_avg, &var);
        let ip = ip_simulate(params, &stmt, variant, &mut t.fork(b"std.ip"), rng)?;
        let sqrt = simulate_sqrt(params, std, &var, RANGE_BITS, &mut t.fork(b"std.sqrt"), rng)?;
        Ok(StdProof { g_avg, h_avg, h_s, eq_g, eq_h, eq_s, var, ip, std: *std, sqrt })
    }

    /// A bundle whose 48 feature commitments open to `features`
    /// (indexed like the model's features), with every proof simulated.
    /// `root` must carry a programmable oracle and be fresh; the verifier
    /// must use a transcript sharing that oracle.
    pub fn simulate_bundle<R: RngCore + CryptoRng>(
        params: &CommitParams,
        model: &SvmModel,
        features: &[i128],
        nonce: &[u8],
        mut root: Transcript,
        variant: IpVariant,
        rng: &mut R,
    ) -> Result<AttestationBundle, Error> {
        bind_root(&mut root, params, model, nonce)?;
        let n = params.n();
        let mut openings = Vec::new();
        let mut sets = Vec::new();
        for i in 0..VECTOR_COUNT {
            let f = |s: Stat| commit_scalar(params, scalar_from_i128(features[feature_index(i, s)]), random_scalar(rng));
            let [avg, avg_diff, std, std_diff] = Stat::ALL.map(f);
            let sh = random_commitment(rng);
            let t = vector_transcript(&root, i, &sh);
            let iterated = random_commitment(rng);
            let diff = random_commitment(rng);
            let equality = sigma_sim::equality(params, Basis::G, &sh, Basis::GIter, &iterated, &mut t.fork(b"delta.eq"), rng);
            let zero = sigma_sim::zero_replace(params, Basis::G, &(sh / iterated), &diff, n - 1, &mut t.fork(b"delta.zero"), rng);
            let sum = SumProof {
                avg: avg.commitment,
                ip: ip_simulate(params, &sum_statement(params, &sh, &avg.commitment), variant, &mut t.fork(b"sum"), rng)?,
            };
            let sum_diff = SumProof {
                avg: avg_diff.commitment,
                ip: ip_simulate(params, &sum_statement(params, &diff, &avg_diff.commitment), variant, &mut t.fork(b"sum'"), rng)?,
            };
            let std_proof = simulate_std(params, &sh, &avg.commitment, &std.commitment, variant, &t.fork(b"std"), rng)?;
            let std_diff_proof =
                simulate_std(params, &diff, &avg_diff.commitment, &std_diff.commitment, variant, &t.fork(b"std'"), rng)?;
            sets.push(VectorProofSet {
                commitment: sh,
                delta: DeltaProof { diff, iterated, equality, zero },
                sum,
                sum_diff,
                std: std_proof,
                std_diff: std_diff_proof,
            });
            openings.extend([avg, avg_diff, std, std_diff]);
        }
        let refs: Vec<&ScalarCommitment> = openings.iter().collect();
        let (score, score_blinding) = compute_score(&refs, &model.quantized)?;
        Ok(AttestationBundle { nonce: nonce.to_vec(), vectors: sets, score, score_blinding })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::EncodingConfig;
    use crate::model::FeatureParams;

    fn model(n: usize, intercept: f64, weights: &[(usize, f64)]) -> SvmModel {
        let mut features = vec![FeatureParams::default(); FEATURE_COUNT];
        for (i, w) in weights {
            features[*i].weight = *w;
        }
        SvmModel::new("zksvm-test", n, 3, intercept, 0.5, EncodingConfig::default(), features).unwrap()
    }

    fn vectors(n: usize, seed: u64) -> Vec<Vec<u64>> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..VECTOR_COUNT).map(|_| (0..n).map(|_| rng.next_u64() % 1_000_000).collect()).collect()
    }

    const NONCE: &[u8] = b"0123456789abcdef";

    #[test]
    fn worked_vector() {
        let m = model(4, 0.0, &[]);
        let params = setup(&m).unwrap();
        let root = root_transcript(&params, &m, NONCE).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (set, open) = prove_vector(&params, &[3, 1, 4, 1], &root, 0, IpVariant::Logarithmic, &mut rng).unwrap();
        let ints = |v: &[GroupScalar]| v.iter().map(|s| scalar_to_i128(s).unwrap()).collect::<Vec<_>>();
        assert_eq!(ints(&open.diff.values), vec![2, -3, 3, 0]);
        assert_eq!(scalar_to_i128(&open.avg.value), Some(9));
        assert_eq!(scalar_to_i128(&open.avg_diff.value), Some(2));
        assert_eq!(scalar_to_i128(&open.var.value), Some(108));
        assert_eq!(scalar_to_i128(&open.std.value), Some(10));
        assert_eq!(scalar_to_i128(&open.var_diff.value), Some(336));
        assert_eq!(scalar_to_i128(&open.std_diff.value), Some(18));
        for c in open.features() {
            assert!(c.open_check(&params));
        }
        assert!(open.diff.open_check(&params));
        assert_eq!(set.delta.diff, open.diff.commitment);
        assert!(verify_vector(&params, &set, &root, 0).is_ok());
        // Bound to its index.
        let r = verify_vector(&params, &set, &root, 1).unwrap_err();
        assert_eq!(r.procedure, Procedure::ConsecutiveDifference);
    }

    #[test]
    fn scaled_variance_examples() {
        assert_eq!(scaled_variance(&[3, 1, 4, 1], 9).unwrap(), 108);
        assert_eq!(scaled_variance(&[5; 8], 40).unwrap(), 0);
        assert!(matches!(scaled_variance(&[0, 1 << 40], 1 << 40), Err(Error::Bound(_))));
    }

    #[test]
    fn score_examples() {
        let params = CommitParams::derive(b"score", 4).unwrap();
        let f = |v: i128, r: u64| commit_scalar(&params, scalar_from_i128(v), GroupScalar::from(r));
        let (a, b) = (f(7, 2), f(10, 5));
        let (score, blinding) = compute_score(&[&a, &b], &[3, -2]).unwrap();
        assert_eq!(score, 1);
        assert_eq!(blinding, GroupScalar::from(6u64) - GroupScalar::from(10u64));
        assert!(compute_score(&[&a], &[1, 2]).is_err());
    }

    #[test]
    fn bundle_accepts_and_rejects() {
        let m = model(4, 1e4, &[(0, 0.001), (6, -0.002)]);
        let params = setup(&m).unwrap();
        let vs = vectors(4, 2);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let att = prove_bundle(&params, &m, &vs, NONCE, IpVariant::Logarithmic, &mut rng).unwrap();
        let expect: i128 = (0..FEATURE_COUNT)
            .map(|i| {
                let open = att.openings[i / 4].features()[i % 4];
                scalar_to_i128(&open.value).unwrap() * m.quantized[i]
            })
            .sum();
        assert_eq!(att.bundle.score, expect);
        let opened: Vec<i128> = att
            .openings
            .iter()
            .flat_map(|o| o.features().map(|f| scalar_to_i128(&f.value).unwrap()))
            .collect();
        assert_eq!(plaintext_features(&vs).unwrap(), opened);
        let verdict = verify_bundle(&params, &m, &att.bundle, NONCE);
        let (p, _) = m.evaluate(att.bundle.score);
        assert_eq!(verdict, Verdict::Accept { score: att.bundle.score, probability: p });

        let other = b"fedcba9876543210";
        let r = verify_bundle(&params, &m, &att.bundle, other);
        assert_eq!(r.rejection().unwrap().procedure, Procedure::Challenge);
        let mut relabelled = att.bundle.clone();
        relabelled.nonce = other.to_vec();
        let r = verify_bundle(&params, &m, &relabelled, other);
        assert_eq!(r.rejection().unwrap().procedure, Procedure::ConsecutiveDifference);

        let mut forged = att.bundle.clone();
        forged.score += 1;
        let r = verify_bundle(&params, &m, &forged, NONCE);
        assert_eq!(r.rejection().unwrap().procedure, Procedure::Score);
        assert_eq!(r.rejection().unwrap().evaluated, None);

        let mut swapped = att.bundle.clone();
        swapped.vectors.swap(3, 4);
        assert!(!verify_bundle(&params, &m, &swapped, NONCE).is_accept());
    }

    #[test]
    fn bot_is_rejected_at_score() {
        let m = model(4, -2.0, &[]);
        let params = setup(&m).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let att = prove_bundle(&params, &m, &vectors(4, 5), NONCE, IpVariant::Linear, &mut rng).unwrap();
        let r = verify_bundle(&params, &m, &att.bundle, NONCE);
        let r = r.rejection().unwrap();
        assert_eq!(r.procedure, Procedure::Score);
        assert_eq!(r.evaluated.map(|e| e.0), Some(0));
        assert!(r.to_string().starts_with("procedure 9"));
    }

    #[test]
    fn prover_refusals() {
        let m = model(4, 0.0, &[]);
        let params = setup(&m).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let mut vs = vectors(4, 7);
        assert!(prove_bundle(&params, &m, &vs[..11], NONCE, IpVariant::Linear, &mut rng).is_err());
        assert!(prove_bundle(&params, &m, &vs, b"short", IpVariant::Linear, &mut rng).is_err());
        vs[2] = vec![0, 0, 0, 1 << 40];
        assert!(matches!(
            prove_bundle(&params, &m, &vs, NONCE, IpVariant::Linear, &mut rng),
            Err(Error::Bound(_))
        ));
        let other = CommitParams::derive(b"other", 4).unwrap();
        assert!(prove_bundle(&other, &m, &vectors(4, 7), NONCE, IpVariant::Linear, &mut rng).is_err());
    }

    #[test]
    fn element_counts_formula() {
        for k in 1..=8usize {
            let n = 1 << k;
            assert_eq!(vector_element_counts(n, IpVariant::Logarithmic), (121 + 8 * k, 4 * n + 72));
            assert_eq!(vector_element_counts(n, IpVariant::Linear), (121, 12 * n + 64));
        }
    }
}
