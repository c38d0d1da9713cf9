//! Range proof: a committed `V = g^m h^γ` has `0 ≤ m < 2^l`.
//!
//! Bit-decomposition argument with the vector generators taken from the
//! parameter set's dedicated range bases (`G⃗`, `H⃗`, length 64):
//!
//! ```text
//! a⃗_L = bits(m),  a⃗_R = a⃗_L − 1⃗
//! A = h^α G⃗^{a⃗_L} H⃗^{a⃗_R},  S = h^ρ G⃗^{s⃗_L} H⃗^{s⃗_R}        → y, z
//! l(X) = a⃗_L − z1⃗ + s⃗_L X
//! r(X) = y⃗ ∘ (a⃗_R + z1⃗ + s⃗_R X) + z²·2⃗
//! T_i = g^{t_i} h^{τ_i}                                       → x
//! τ_x = τ₂x² + τ₁x + z²γ,  μ = α + ρx,  t̂ = ⟨l(x), r(x)⟩       → w
//! ```
//!
//! The verifier checks `g^t̂ h^{τ_x} = V^{z²} g^{δ(y,z)} T₁^x T₂^{x²}` and runs
//! the inner-product argument on
//! `A S^x G⃗^{−z} H'^{z y⃗ + z² 2⃗} h^{−μ} Q^{t̂}`, where `H'_i = H_i^{y^{−i}}`
//! and `Q = g^w`.
//!
//! Encoding: `u16-le(l) ∥ parts`, with points `A, S, T₁, T₂, (L_k, R_k)…`
//! and scalars `τ_x, μ, t̂, a, b`.

use curve25519_dalek::traits::VartimeMultiscalarMul;
use rand_core::{CryptoRng, RngCore};

use crate::errors::{Error, WireError};
use crate::group::{
    inner_product, powers, random_scalar, scalar_to_u64, CommitParams, GroupPoint, GroupScalar,
};
use crate::ipa::{InnerProductArgument, StatementTerms};
use crate::pedersen::{Commitment, ScalarCommitment};
use crate::transcript::Transcript;
use crate::wire::{PartCursor, ProofParts, Reader, Writer};

pub const SUPPORTED_BITS: [usize; 4] = [8, 16, 32, 64];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeProof {
    pub bits: usize,
    pub a: GroupPoint,
    pub s: GroupPoint,
    pub t1: GroupPoint,
    pub t2: GroupPoint,
    pub tau_x: GroupScalar,
    pub mu: GroupScalar,
    pub t_hat: GroupScalar,
    pub ipa: InnerProductArgument,
}

/// `(points, scalars)` in a range proof over `bits` bits.
pub fn range_element_counts(bits: usize) -> (usize, usize) {
    (4 + 2 * bits.trailing_zeros() as usize, 5)
}

fn check_bits(bits: usize) -> Result<(), Error> {
    if SUPPORTED_BITS.contains(&bits) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("unsupported range bit length {bits}")))
    }
}

impl RangeProof {
    pub fn encode(&self, w: &mut Writer) {
        w.u16(self.bits as u16);
        let (p, s) = self.to_parts();
        w.parts(&p, &s);
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self, WireError> {
        let bits = r.u16()? as usize;
        if check_bits(bits).is_err() {
            return Err(WireError::BadLayout);
        }
        let (np, ns) = range_element_counts(bits);
        let (points, scalars) = r.parts(np, ns)?;
        Ok(Self::from_parts(bits, &points, &scalars))
    }

    pub(crate) fn from_parts(bits: usize, points: &[GroupPoint], scalars: &[GroupScalar]) -> Self {
        let mut pc = PartCursor::new(points);
        let mut sc = PartCursor::new(scalars);
        let (a, s, t1, t2) = (pc.one(), pc.one(), pc.one(), pc.one());
        let rounds = (0..bits.trailing_zeros()).map(|_| (pc.one(), pc.one())).collect();
        let (tau_x, mu, t_hat) = (sc.one(), sc.one(), sc.one());
        let ipa = InnerProductArgument { rounds, a: sc.one(), b: sc.one() };
        RangeProof { bits, a, s, t1, t2, tau_x, mu, t_hat, ipa }
    }
}

impl ProofParts for RangeProof {
    fn to_parts(&self) -> (Vec<GroupPoint>, Vec<GroupScalar>) {
        let mut points = vec![self.a, self.s, self.t1, self.t2];
        for (l, r) in &self.ipa.rounds {
            points.push(*l);
            points.push(*r);
        }
        (points, vec![self.tau_x, self.mu, self.t_hat, self.ipa.a, self.ipa.b])
    }

    fn with_parts(&self, points: &[GroupPoint], scalars: &[GroupScalar]) -> Self {
        Self::from_parts(self.bits, points, scalars)
    }
}

/// `δ(y, z) = (z − z²)⟨1⃗, y⃗⟩ − z³⟨1⃗, 2⃗⟩`.
fn delta(bits: usize, y: &GroupScalar, z: &GroupScalar) -> GroupScalar {
    let sum_y: GroupScalar = powers(*y, bits).iter().sum();
    let sum_2: GroupScalar = powers(GroupScalar::from(2u8), bits).iter().sum();
    (z - z * z) * sum_y - z * z * z * sum_2
}

fn bind_statement(t: &mut Transcript, bits: usize, v: &GroupPoint) {
    t.absorb_u64(b"range.l", bits as u64);
    t.absorb_point(b"range.V", v);
}

struct Challenges {
    y: GroupScalar,
    z: GroupScalar,
}

/// `H'_i = H_i^{y^{−i}}`.
fn scaled_h(params: &CommitParams, bits: usize, y: &GroupScalar) -> Vec<GroupPoint> {
    let y_inv = powers(y.invert(), bits);
    params.range_h[..bits].iter().zip(&y_inv).map(|(h, s)| s * h).collect()
}

#[allow(clippy::too_many_arguments)]
/// Terms of `P·h^{−μ}·Q^{t̂}`, the inner-product argument's statement.
fn ipa_statement_terms(
    bits: usize,
    ch: &Challenges,
    x: &GroupScalar,
    proof_a: &GroupPoint,
    proof_s: &GroupPoint,
    mu: &GroupScalar,
    t_hat: &GroupScalar,
    h: &GroupPoint,
    q: &GroupPoint,
) -> StatementTerms {
    // Exponent of H_i (unscaled) is (z y^i + z² 2^i) y^{−i} = z + z² 2^i y^{−i}.
    let z2 = ch.z * ch.z;
    let y_inv = powers(ch.y.invert(), bits);
    let two = powers(GroupScalar::from(2u8), bits);
    let h_exp = two.iter().zip(&y_inv).map(|(p2, yi)| ch.z + z2 * p2 * yi).collect();
    StatementTerms {
        g_coeffs: Some(vec![-ch.z; bits]),
        h_coeffs: Some(h_exp),
        h_factors: Some(y_inv),
        scalars: vec![GroupScalar::ONE, *x, -mu, *t_hat],
        points: vec![*proof_a, *proof_s, *h, *q],
    }
}

#[cfg(feature = "test-oracles")]
#[allow(clippy::too_many_arguments)]
fn ipa_statement(
    params: &CommitParams,
    bits: usize,
    ch: &Challenges,
    x: &GroupScalar,
    proof_a: &GroupPoint,
    proof_s: &GroupPoint,
    mu: &GroupScalar,
    t_hat: &GroupScalar,
    q: &GroupPoint,
) -> GroupPoint {
    let terms = ipa_statement_terms(bits, ch, x, proof_a, proof_s, mu, t_hat, &params.h, q);
    GroupPoint::vartime_multiscalar_mul(
        terms.scalars.into_iter().chain(terms.g_coeffs.unwrap()).chain(terms.h_coeffs.unwrap()),
        terms
            .points
            .into_iter()
            .chain(params.range_g[..bits].iter().copied())
            .chain(params.range_h[..bits].iter().copied()),
    )
}

/// Proves that `v` opens to a value in `[0, 2^bits)`.
pub fn prove_range<R: RngCore + CryptoRng>(
    params: &CommitParams,
    v: &ScalarCommitment,
    bits: usize,
    t: &mut Transcript,
    rng: &mut R,
) -> Result<RangeProof, Error> {
    check_bits(bits)?;
    if !v.open_check(params) {
        return Err(Error::Precondition("range proof over a non-matching opening".into()));
    }
    let m = scalar_to_u64(&v.value)
        .filter(|m| bits == 64 || *m < (1u64 << bits))
        .ok_or_else(|| Error::Precondition(format!("value is outside [0, 2^{bits})")))?;

    bind_statement(t, bits, &v.commitment.0);
    let g_vec = &params.range_g[..bits];
    let h_vec = &params.range_h[..bits];
    let a_l: Vec<GroupScalar> = (0..bits).map(|i| GroupScalar::from((m >> i) & 1)).collect();
    let a_r: Vec<GroupScalar> = a_l.iter().map(|b| b - GroupScalar::ONE).collect();
    let alpha = random_scalar(rng);
    let a_commit = commit(params, g_vec, h_vec, &a_l, &a_r, &alpha);
    let s_l: Vec<_> = (0..bits).map(|_| random_scalar(rng)).collect();
    let s_r: Vec<_> = (0..bits).map(|_| random_scalar(rng)).collect();
    let rho = random_scalar(rng);
    let s_commit = commit(params, g_vec, h_vec, &s_l, &s_r, &rho);
    t.absorb_point(b"range.A", &a_commit);
    t.absorb_point(b"range.S", &s_commit);
    let y = t.challenge_scalar(b"range.y");
    let z = t.challenge_scalar(b"range.z");

    let y_pow = powers(y, bits);
    let two = powers(GroupScalar::from(2u8), bits);
    let z2 = z * z;
    let l0: Vec<_> = a_l.iter().map(|a| a - z).collect();
    let r0: Vec<_> = (0..bits).map(|i| y_pow[i] * (a_r[i] + z) + z2 * two[i]).collect();
    let r1: Vec<_> = (0..bits).map(|i| y_pow[i] * s_r[i]).collect();
    let t1 = inner_product(&l0, &r1) + inner_product(&s_l, &r0);
    let t2 = inner_product(&s_l, &r1);
    let tau1 = random_scalar(rng);
    let tau2 = random_scalar(rng);
    let t1_commit = t1 * params.g + tau1 * params.h;
    let t2_commit = t2 * params.g + tau2 * params.h;
    t.absorb_point(b"range.T1", &t1_commit);
    t.absorb_point(b"range.T2", &t2_commit);
    let x = t.challenge_scalar(b"range.x");

    let l: Vec<_> = l0.iter().zip(&s_l).map(|(a, b)| a + b * x).collect();
    let r: Vec<_> = r0.iter().zip(&r1).map(|(a, b)| a + b * x).collect();
    let t_hat = inner_product(&l, &r);
    let tau_x = tau2 * x * x + tau1 * x + z2 * v.blinding;
    let mu = alpha + rho * x;
    finish(
        params,
        bits,
        Challenges { y, z },
        [a_commit, s_commit, t1_commit, t2_commit],
        (tau_x, mu, t_hat),
        l,
        r,
        t,
    )
}

fn commit(
    params: &CommitParams,
    g_vec: &[GroupPoint],
    h_vec: &[GroupPoint],
    l: &[GroupScalar],
    r: &[GroupScalar],
    blind: &GroupScalar,
) -> GroupPoint {
    GroupPoint::vartime_multiscalar_mul(
        l.iter().chain(r).chain([blind]),
        g_vec.iter().chain(h_vec).chain([&params.h]),
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    params: &CommitParams,
    bits: usize,
    ch: Challenges,
    points: [GroupPoint; 4],
    (tau_x, mu, t_hat): (GroupScalar, GroupScalar, GroupScalar),
    l: Vec<GroupScalar>,
    r: Vec<GroupScalar>,
    t: &mut Transcript,
) -> Result<RangeProof, Error> {
    t.absorb_scalar(b"range.tau", &tau_x);
    t.absorb_scalar(b"range.mu", &mu);
    t.absorb_scalar(b"range.t-hat", &t_hat);
    let w = t.challenge_scalar(b"range.w");
    let q = w * params.g;
    let ipa = InnerProductArgument::prove(
        t,
        &q,
        params.range_g[..bits].to_vec(),
        scaled_h(params, bits, &ch.y),
        l,
        r,
    )?;
    let [a, s, t1, t2] = points;
    Ok(RangeProof { bits, a, s, t1, t2, tau_x, mu, t_hat, ipa })
}

/// Checks that `v` commits to a value in `[0, 2^bits)`.
pub fn verify_range(
    params: &CommitParams,
    v: &Commitment,
    bits: usize,
    proof: &RangeProof,
    t: &mut Transcript,
) -> bool {
    if proof.bits != bits || check_bits(bits).is_err() {
        return false;
    }
    bind_statement(t, bits, &v.0);
    t.absorb_point(b"range.A", &proof.a);
    t.absorb_point(b"range.S", &proof.s);
    let y = t.challenge_scalar(b"range.y");
    let z = t.challenge_scalar(b"range.z");
    t.absorb_point(b"range.T1", &proof.t1);
    t.absorb_point(b"range.T2", &proof.t2);
    let x = t.challenge_scalar(b"range.x");

    let lhs = proof.t_hat * params.g + proof.tau_x * params.h;
    let rhs = GroupPoint::vartime_multiscalar_mul(
        [z * z, delta(bits, &y, &z), x, x * x],
        [v.0, params.g, proof.t1, proof.t2],
    );
    if lhs != rhs {
        return false;
    }
    t.absorb_scalar(b"range.tau", &proof.tau_x);
    t.absorb_scalar(b"range.mu", &proof.mu);
    t.absorb_scalar(b"range.t-hat", &proof.t_hat);
    let w = t.challenge_scalar(b"range.w");
    let q = w * params.g;
    let ch = Challenges { y, z };
    let terms = ipa_statement_terms(bits, &ch, &x, &proof.a, &proof.s, &proof.mu, &proof.t_hat, &params.h, &q);
    proof.ipa.verify_terms(t, &q, &params.range_g[..bits], &params.range_h[..bits], &terms)
}

/// Simulated range proof for any `v`, produced by sampling the challenges
/// and responses first and solving for `S` and `T₁`.
#[cfg(feature = "test-oracles")]
pub fn simulate_range<R: RngCore + CryptoRng>(
    params: &CommitParams,
    v: &Commitment,
    bits: usize,
    t: &mut Transcript,
    rng: &mut R,
) -> Result<RangeProof, Error> {
    check_bits(bits)?;
    let nonzero = |rng: &mut R| loop {
        let c = random_scalar(rng);
        if c != GroupScalar::ZERO {
            break c;
        }
    };
    let (y, z, x) = (nonzero(rng), nonzero(rng), nonzero(rng));
    let l: Vec<_> = (0..bits).map(|_| random_scalar(rng)).collect();
    let r: Vec<_> = (0..bits).map(|_| random_scalar(rng)).collect();
    let t_hat = inner_product(&l, &r);
    let tau_x = random_scalar(rng);
    let mu = random_scalar(rng);
    let a = crate::group::random_point(rng);
    let t2 = crate::group::random_point(rng);
    let ch = Challenges { y, z };
    let x_inv = x.invert();

    // A·S^x·G⃗^{−z}·H'^{z y⃗ + z² 2⃗} = h^μ G⃗^{l⃗} H'^{r⃗}
    let target = commit(params, &params.range_g[..bits], &scaled_h(params, bits, &y), &l, &r, &mu);
    let offset = ipa_statement(params, bits, &ch, &GroupScalar::ZERO, &a, &GroupPoint::default(), &mu, &GroupScalar::ZERO, &GroupPoint::default())
        + mu * params.h;
    let s = x_inv * (target - offset);
    let t1 = x_inv * (t_hat * params.g + tau_x * params.h - (z * z) * v.0 - delta(bits, &y, &z) * params.g - (x * x) * t2);

    bind_statement(t, bits, &v.0);
    t.absorb_point(b"range.A", &a);
    t.absorb_point(b"range.S", &s);
    t.program_challenge(b"range.y", y);
    t.challenge_scalar(b"range.y");
    t.program_challenge(b"range.z", z);
    t.challenge_scalar(b"range.z");
    t.absorb_point(b"range.T1", &t1);
    t.absorb_point(b"range.T2", &t2);
    t.program_challenge(b"range.x", x);
    t.challenge_scalar(b"range.x");
    finish(params, bits, ch, [a, s, t1, t2], (tau_x, mu, t_hat), l, r, t)
}
