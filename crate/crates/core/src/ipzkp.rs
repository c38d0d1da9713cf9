//! Zero-knowledge inner-product proof.
//!
//! Statement: `A = h^α g⃗^a⃗ h⃗^b⃗` and `V = g^c h^γ`. Claim: `⟨a⃗, b⃗⟩ = c`.
//!
//! Prover, first move:
//!
//! ```text
//! s⃗_L, s⃗_R, ρ, τ₁, τ₂ random
//! S  = h^ρ g⃗^{s⃗_L} h⃗^{s⃗_R}
//! l(X) = a⃗ + s⃗_L X,  r(X) = b⃗ + s⃗_R X,  t(X) = ⟨l(X), r(X)⟩ = c + t₁X + t₂X²
//! T_i = g^{t_i} h^{τ_i}
//! ```
//!
//! The challenge `C` is squeezed after absorbing `A, V, S, T₁, T₂`. Responses:
//! `l⃗ = l(C)`, `r⃗ = r(C)`, `t̂ = ⟨l⃗, r⃗⟩`, `τ_C = τ₂C² + τ₁C + γ`,
//! `μ = α + ρC`. The verifier checks
//!
//! 1. `g^t̂ h^{τ_C} = V · T₁^C · T₂^{C²}`
//! 2. `P = A · S^C`
//! 3. `P = h^μ g⃗^{l⃗} h⃗^{r⃗}`
//! 4. `t̂ = ⟨l⃗, r⃗⟩`
//!
//! The linear variant sends `l⃗, r⃗` in the clear. The logarithmic variant
//! replaces checks 3 and 4 by an inner-product argument on
//! `P · h^{−μ} · Q^{t̂}` with `Q = g^w` for a fresh challenge `w`.
//!
//! Wire layout: `variant (1 byte) ∥ u32-le(n) ∥ points ∥ scalars`, where
//! points are `S, T₁, T₂` followed by `L_k, R_k` per round (log variant),
//! and scalars are `τ_C, μ, t̂` followed by `l⃗, r⃗` (linear) or the final
//! `a, b` (log). Element counts are therefore `(3, 3 + 2n)` for linear and
//! `(3 + 2·log₂ n, 5)` for log.

use curve25519_dalek::traits::VartimeMultiscalarMul;
use rand_core::{CryptoRng, RngCore};

use crate::errors::{Error, WireError};
use crate::group::{inner_product, random_scalar, CommitParams, GroupPoint, GroupScalar};
use crate::ipa::{InnerProductArgument, StatementTerms};
use crate::transcript::Transcript;
use crate::wire::{PartCursor, ProofParts, Reader, Writer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IpVariant {
    Linear,
    Logarithmic,
}

impl IpVariant {
    pub fn tag(self) -> u8 {
        match self {
            IpVariant::Linear => 0,
            IpVariant::Logarithmic => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self, WireError> {
        match tag {
            0 => Ok(IpVariant::Linear),
            1 => Ok(IpVariant::Logarithmic),
            _ => Err(WireError::BadLayout),
        }
    }

    /// `(points, scalars)` in a proof over vectors of length `n`.
    pub fn element_counts(self, n: usize) -> (usize, usize) {
        match self {
            IpVariant::Linear => (3, 3 + 2 * n),
            IpVariant::Logarithmic => (3 + 2 * n.trailing_zeros() as usize, 5),
        }
    }

    /// Encoded size in bytes, header included.
    pub fn encoded_len(self, n: usize) -> usize {
        let (p, s) = self.element_counts(n);
        1 + 4 + 8 + crate::wire::element_bytes(p, s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IpStatement {
    /// `A = h^α g⃗^a⃗ h⃗^b⃗`.
    pub vectors: GroupPoint,
    /// `V = g^c h^γ`.
    pub value: GroupPoint,
}

#[derive(Clone, Debug)]
pub struct IpWitness {
    pub a: Vec<GroupScalar>,
    pub b: Vec<GroupScalar>,
    pub alpha: GroupScalar,
    pub gamma: GroupScalar,
    pub c: GroupScalar,
}

impl IpWitness {
    /// Builds a witness with `c = ⟨a⃗, b⃗⟩`.
    pub fn new(a: Vec<GroupScalar>, b: Vec<GroupScalar>, alpha: GroupScalar, gamma: GroupScalar) -> Self {
        let c = inner_product(&a, &b);
        IpWitness { a, b, alpha, gamma, c }
    }

    /// The statement this witness satisfies.
    pub fn statement(&self, params: &CommitParams) -> Result<IpStatement, Error> {
        if self.a.len() != params.n() || self.b.len() != params.n() {
            return Err(Error::InvalidParameter("witness length differs from parameters".into()));
        }
        Ok(IpStatement {
            vectors: vector_commit(params, &self.a, &self.b, &self.alpha),
            value: self.c * params.g + self.gamma * params.h,
        })
    }
}

fn vector_commit(params: &CommitParams, a: &[GroupScalar], b: &[GroupScalar], blind: &GroupScalar) -> GroupPoint {
    GroupPoint::vartime_multiscalar_mul(
        a.iter().chain(b).chain([blind]),
        params.gvec.iter().chain(&params.hvec).chain([&params.h]),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IpTail {
    Linear { l: Vec<GroupScalar>, r: Vec<GroupScalar> },
    Logarithmic(InnerProductArgument),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpProof {
    pub s: GroupPoint,
    pub t1: GroupPoint,
    pub t2: GroupPoint,
    pub tau_c: GroupScalar,
    pub mu: GroupScalar,
    pub t_hat: GroupScalar,
    pub tail: IpTail,
}

impl IpProof {
    pub fn variant(&self) -> IpVariant {
        match self.tail {
            IpTail::Linear { .. } => IpVariant::Linear,
            IpTail::Logarithmic(_) => IpVariant::Logarithmic,
        }
    }

    /// Vector length the proof was made for.
    pub fn n(&self) -> usize {
        match &self.tail {
            IpTail::Linear { l, .. } => l.len(),
            IpTail::Logarithmic(arg) => 1 << arg.rounds.len(),
        }
    }

    pub fn encode(&self, w: &mut Writer) {
        w.u8(self.variant().tag());
        w.u32(self.n() as u32);
        let (p, s) = self.to_parts();
        w.parts(&p, &s);
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self, WireError> {
        let variant = IpVariant::from_tag(r.u8()?)?;
        let n = r.u32()? as usize;
        if n == 0 || (variant == IpVariant::Logarithmic && !n.is_power_of_two()) || n > (1 << 24) {
            return Err(WireError::BadLayout);
        }
        let (np, ns) = variant.element_counts(n);
        let (points, scalars) = r.parts(np, ns)?;
        Ok(Self::from_parts(variant, n, &points, &scalars))
    }

    pub(crate) fn from_parts(variant: IpVariant, n: usize, points: &[GroupPoint], scalars: &[GroupScalar]) -> Self {
        let mut pc = PartCursor::new(points);
        let mut sc = PartCursor::new(scalars);
        let (s, t1, t2) = (pc.one(), pc.one(), pc.one());
        let (tau_c, mu, t_hat) = (sc.one(), sc.one(), sc.one());
        let tail = match variant {
            IpVariant::Linear => IpTail::Linear { l: sc.take(n).to_vec(), r: sc.take(n).to_vec() },
            IpVariant::Logarithmic => {
                let rounds = (0..n.trailing_zeros()).map(|_| (pc.one(), pc.one())).collect();
                IpTail::Logarithmic(InnerProductArgument { rounds, a: sc.one(), b: sc.one() })
            }
        };
        IpProof { s, t1, t2, tau_c, mu, t_hat, tail }
    }
}

impl ProofParts for IpProof {
    fn to_parts(&self) -> (Vec<GroupPoint>, Vec<GroupScalar>) {
        let mut points = vec![self.s, self.t1, self.t2];
        let mut scalars = vec![self.tau_c, self.mu, self.t_hat];
        match &self.tail {
            IpTail::Linear { l, r } => {
                scalars.extend_from_slice(l);
                scalars.extend_from_slice(r);
            }
            IpTail::Logarithmic(arg) => {
                for (l, r) in &arg.rounds {
                    points.push(*l);
                    points.push(*r);
                }
                scalars.push(arg.a);
                scalars.push(arg.b);
            }
        }
        (points, scalars)
    }

    fn with_parts(&self, points: &[GroupPoint], scalars: &[GroupScalar]) -> Self {
        Self::from_parts(self.variant(), self.n(), points, scalars)
    }
}

fn bind_statement(t: &mut Transcript, variant: IpVariant, n: usize, stmt: &IpStatement) {
    t.absorb(b"ip.variant", &[variant.tag()]);
    t.absorb_u64(b"ip.n", n as u64);
    t.absorb_point(b"ip.A", &stmt.vectors);
    t.absorb_point(b"ip.V", &stmt.value);
}

fn bind_first_move(t: &mut Transcript, s: &GroupPoint, t1: &GroupPoint, t2: &GroupPoint) {
    t.absorb_point(b"ip.S", s);
    t.absorb_point(b"ip.T1", t1);
    t.absorb_point(b"ip.T2", t2);
}

fn bind_responses(t: &mut Transcript, tau_c: &GroupScalar, mu: &GroupScalar, t_hat: &GroupScalar) {
    t.absorb_scalar(b"ip.tau", tau_c);
    t.absorb_scalar(b"ip.mu", mu);
    t.absorb_scalar(b"ip.t-hat", t_hat);
}

const C_LABEL: &[u8] = b"ip.C";
const W_LABEL: &[u8] = b"ip.w";

/// Prover randomness and first-move messages.
#[derive(Clone, Debug)]
pub(crate) struct FirstMove {
    s_l: Vec<GroupScalar>,
    s_r: Vec<GroupScalar>,
    rho: GroupScalar,
    tau1: GroupScalar,
    tau2: GroupScalar,
    s: GroupPoint,
    t1: GroupPoint,
    t2: GroupPoint,
}

fn first_move<R: RngCore + CryptoRng>(params: &CommitParams, wit: &IpWitness, rng: &mut R) -> FirstMove {
    let n = wit.a.len();
    let s_l: Vec<_> = (0..n).map(|_| random_scalar(rng)).collect();
    let s_r: Vec<_> = (0..n).map(|_| random_scalar(rng)).collect();
    let rho = random_scalar(rng);
    let tau1 = random_scalar(rng);
    let tau2 = random_scalar(rng);
    let s = vector_commit(params, &s_l, &s_r, &rho);
    let t1_coeff = inner_product(&wit.a, &s_r) + inner_product(&s_l, &wit.b);
    let t2_coeff = inner_product(&s_l, &s_r);
    let t1 = t1_coeff * params.g + tau1 * params.h;
    let t2 = t2_coeff * params.g + tau2 * params.h;
    FirstMove { s_l, s_r, rho, tau1, tau2, s, t1, t2 }
}

struct Responses {
    l: Vec<GroupScalar>,
    r: Vec<GroupScalar>,
    t_hat: GroupScalar,
    tau_c: GroupScalar,
    mu: GroupScalar,
}

fn respond(wit: &IpWitness, fm: &FirstMove, c: GroupScalar) -> Responses {
    let l: Vec<_> = wit.a.iter().zip(&fm.s_l).map(|(a, s)| a + s * c).collect();
    let r: Vec<_> = wit.b.iter().zip(&fm.s_r).map(|(b, s)| b + s * c).collect();
    let t_hat = inner_product(&l, &r);
    let tau_c = fm.tau2 * c * c + fm.tau1 * c + wit.gamma;
    let mu = wit.alpha + fm.rho * c;
    Responses { l, r, t_hat, tau_c, mu }
}

fn check_witness(params: &CommitParams, stmt: &IpStatement, wit: &IpWitness, variant: IpVariant) -> Result<(), Error> {
    let n = params.n();
    if variant == IpVariant::Logarithmic && !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "logarithmic variant needs a power-of-two length, got {n}"
        )));
    }
    if wit.a.len() != n || wit.b.len() != n {
        return Err(Error::InvalidParameter("witness length differs from parameters".into()));
    }
    if inner_product(&wit.a, &wit.b) != wit.c {
        return Err(Error::Precondition("⟨a, b⟩ differs from the committed value".into()));
    }
    if wit.statement(params)? != *stmt {
        return Err(Error::Precondition("witness does not open the statement".into()));
    }
    Ok(())
}

/// Finishes a proof once the challenge `C` is fixed.
fn finish(
    params: &CommitParams,
    variant: IpVariant,
    first: (GroupPoint, GroupPoint, GroupPoint),
    resp: Responses,
    t: &mut Transcript,
) -> Result<IpProof, Error> {
    bind_responses(t, &resp.tau_c, &resp.mu, &resp.t_hat);
    let tail = match variant {
        IpVariant::Linear => IpTail::Linear { l: resp.l, r: resp.r },
        IpVariant::Logarithmic => {
            let w = t.challenge_scalar(W_LABEL);
            let q = w * params.g;
            IpTail::Logarithmic(InnerProductArgument::prove(
                t,
                &q,
                params.gvec.clone(),
                params.hvec.clone(),
                resp.l,
                resp.r,
            )?)
        }
    };
    let (s, t1, t2) = first;
    Ok(IpProof { s, t1, t2, tau_c: resp.tau_c, mu: resp.mu, t_hat: resp.t_hat, tail })
}

/// Proves `⟨a⃗, b⃗⟩ = c` for `stmt`.
pub fn ip_prove<R: RngCore + CryptoRng>(
    params: &CommitParams,
    stmt: &IpStatement,
    wit: &IpWitness,
    variant: IpVariant,
    t: &mut Transcript,
    rng: &mut R,
) -> Result<IpProof, Error> {
    check_witness(params, stmt, wit, variant)?;
    bind_statement(t, variant, params.n(), stmt);
    let fm = first_move(params, wit, rng);
    bind_first_move(t, &fm.s, &fm.t1, &fm.t2);
    let c = t.challenge_scalar(C_LABEL);
    let resp = respond(wit, &fm, c);
    finish(params, variant, (fm.s, fm.t1, fm.t2), resp, t)
}

/// Outcome of each verifier equation for a linear proof at challenge `C`:
/// `[commitments-polynomial, P = A·S^C consistency with P = h^μ g⃗^l⃗ h⃗^r⃗,
/// t̂ = ⟨l⃗, r⃗⟩, lengths]`.
///
/// The second and third equations share `P`, so they are checked as one
/// equality `A·S^C = h^μ g⃗^l⃗ h⃗^r⃗`.
pub fn linear_checks(params: &CommitParams, stmt: &IpStatement, proof: &IpProof, c: &GroupScalar) -> [bool; 3] {
    let poly = proof.t_hat * params.g + proof.tau_c * params.h
        == GroupPoint::vartime_multiscalar_mul([GroupScalar::ONE, *c, c * c], [stmt.value, proof.t1, proof.t2]);
    let (p_eq, ip_eq) = match &proof.tail {
        IpTail::Linear { l, r } if l.len() == params.n() && r.len() == params.n() => {
            let p = stmt.vectors + c * proof.s;
            (p == vector_commit(params, l, r, &proof.mu), proof.t_hat == inner_product(l, r))
        }
        _ => (false, false),
    };
    [poly, p_eq, ip_eq]
}

/// The challenge `C` a verifier derives for `proof` from `t`.
pub fn ip_challenge(params: &CommitParams, stmt: &IpStatement, proof: &IpProof, t: &mut Transcript) -> GroupScalar {
    bind_statement(t, proof.variant(), params.n(), stmt);
    bind_first_move(t, &proof.s, &proof.t1, &proof.t2);
    t.challenge_scalar(C_LABEL)
}

/// Verifies `proof` for `stmt`.
pub fn ip_verify(params: &CommitParams, stmt: &IpStatement, proof: &IpProof, t: &mut Transcript) -> bool {
    let variant = proof.variant();
    if proof.n() != params.n() {
        return false;
    }
    bind_statement(t, variant, params.n(), stmt);
    bind_first_move(t, &proof.s, &proof.t1, &proof.t2);
    let c = t.challenge_scalar(C_LABEL);
    match &proof.tail {
        IpTail::Linear { .. } => linear_checks(params, stmt, proof, &c).iter().all(|ok| *ok),
        IpTail::Logarithmic(arg) => {
            let poly = proof.t_hat * params.g + proof.tau_c * params.h
                == GroupPoint::vartime_multiscalar_mul(
                    [GroupScalar::ONE, c, c * c],
                    [stmt.value, proof.t1, proof.t2],
                );
            if !poly {
                return false;
            }
            bind_responses(t, &proof.tau_c, &proof.mu, &proof.t_hat);
            let w = t.challenge_scalar(W_LABEL);
            let q = w * params.g;
            // P · h^{−μ} · Q^{t̂} = g⃗^{l⃗} h⃗^{r⃗} Q^{⟨l⃗, r⃗⟩}
            let terms = StatementTerms {
                scalars: vec![GroupScalar::ONE, c, -proof.mu, proof.t_hat],
                points: vec![stmt.vectors, proof.s, params.h, q],
                ..Default::default()
            };
            arg.verify_terms(t, &q, &params.gvec, &params.hvec, &terms)
        }
    }
}

/// Simulator for the honest-verifier zero-knowledge property. Samples
/// `C, l⃗, r⃗, t̂, τ_C, μ, T₂`, solves
///
/// ```text
/// T₁ = (g^t̂ h^{τ_C} · V⁻¹ · T₂^{−C²})^{1/C}
/// S  = (h^μ g⃗^{l⃗} h⃗^{r⃗} · A⁻¹)^{1/C}
/// ```
///
/// and programs `C` into the transcript's oracle. The log variant then runs
/// the inner-product argument on the sampled `l⃗, r⃗`; `t̂` is set to
/// `⟨l⃗, r⃗⟩` so that argument can succeed.
#[cfg(feature = "test-oracles")]
pub fn ip_simulate<R: RngCore + CryptoRng>(
    params: &CommitParams,
    stmt: &IpStatement,
    variant: IpVariant,
    t: &mut Transcript,
    rng: &mut R,
) -> Result<IpProof, Error> {
    let n = params.n();
    if variant == IpVariant::Logarithmic && !n.is_power_of_two() {
        return Err(Error::InvalidParameter("length is not a power of two".into()));
    }
    let c = loop {
        let c = random_scalar(rng);
        if c != GroupScalar::ZERO {
            break c;
        }
    };
    let l: Vec<_> = (0..n).map(|_| random_scalar(rng)).collect();
    let r: Vec<_> = (0..n).map(|_| random_scalar(rng)).collect();
    let t_hat = inner_product(&l, &r);
    let tau_c = random_scalar(rng);
    let mu = random_scalar(rng);
    let t2 = crate::group::random_point(rng);
    let c_inv = c.invert();
    let t1 = c_inv * (t_hat * params.g + tau_c * params.h - stmt.value - (c * c) * t2);
    let s = c_inv * (vector_commit(params, &l, &r, &mu) - stmt.vectors);

    bind_statement(t, variant, n, stmt);
    bind_first_move(t, &s, &t1, &t2);
    t.program_challenge(C_LABEL, c);
    let derived = t.challenge_scalar(C_LABEL);
    debug_assert_eq!(derived, c);
    finish(params, variant, (s, t1, t2), Responses { l, r, t_hat, tau_c, mu }, t)
}

#[cfg(feature = "test-oracles")]
pub mod extractor {
    //! Knowledge extractor over three accepting transcripts that share the
    //! prover's first move.

    use super::*;

    /// Runs the honest prover's first move from `rng` and answers the
    /// externally supplied challenge `c` (linear variant). With a seeded
    /// RNG, repeated calls share `S, T₁, T₂`.
    pub fn prove_with_challenge<R: RngCore + CryptoRng>(
        params: &CommitParams,
        stmt: &IpStatement,
        wit: &IpWitness,
        c: GroupScalar,
        rng: &mut R,
    ) -> Result<IpProof, Error> {
        check_witness(params, stmt, wit, IpVariant::Linear)?;
        let fm = first_move(params, wit, rng);
        let resp = respond(wit, &fm, c);
        Ok(IpProof {
            s: fm.s,
            t1: fm.t1,
            t2: fm.t2,
            tau_c: resp.tau_c,
            mu: resp.mu,
            t_hat: resp.t_hat,
            tail: IpTail::Linear { l: resp.l, r: resp.r },
        })
    }

    #[derive(Clone, Debug, PartialEq, Eq)]
    pub struct ExtractedWitness {
        pub a: Vec<GroupScalar>,
        pub b: Vec<GroupScalar>,
        pub alpha: GroupScalar,
        pub rho: GroupScalar,
        pub s_l: Vec<GroupScalar>,
        pub s_r: Vec<GroupScalar>,
        pub c: GroupScalar,
        pub gamma: GroupScalar,
    }

    /// Recovers the witness from three accepting transcripts
    /// `(C_i, proof_i)` with a common first move and distinct challenges.
    pub fn extract(
        params: &CommitParams,
        stmt: &IpStatement,
        transcripts: &[(GroupScalar, IpProof); 3],
    ) -> Result<ExtractedWitness, Error> {
        let [(c1, p1), (c2, p2), (c3, p3)] = transcripts;
        if c1 == c2 || c1 == c3 || c2 == c3 {
            return Err(Error::InvalidParameter("challenges must be pairwise distinct".into()));
        }
        if [p2, p3].iter().any(|p| p.s != p1.s || p.t1 != p1.t1 || p.t2 != p1.t2) {
            return Err(Error::InvalidParameter("transcripts do not share a first move".into()));
        }
        for (c, p) in transcripts {
            if !linear_checks(params, stmt, p, c).iter().all(|ok| *ok) {
                return Err(Error::InvalidParameter("transcript does not verify".into()));
            }
        }
        let lr = |p: &IpProof| match &p.tail {
            IpTail::Linear { l, r } => Ok((l.clone(), r.clone())),
            IpTail::Logarithmic(_) => Err(Error::InvalidParameter("linear transcripts required".into())),
        };
        let (l1, r1) = lr(p1)?;
        let (l2, r2) = lr(p2)?;
        let (l3, r3) = lr(p3)?;

        // l⃗ᶦ = a⃗ + s⃗_L Cᶦ: two transcripts fix both unknowns.
        let d = (c1 - c2).invert();
        let slope = |x: &[GroupScalar], y: &[GroupScalar]| -> Vec<GroupScalar> {
            x.iter().zip(y).map(|(u, v)| (u - v) * d).collect()
        };
        let s_l = slope(&l1, &l2);
        let s_r = slope(&r1, &r2);
        let a: Vec<_> = l1.iter().zip(&s_l).map(|(l, s)| l - s * c1).collect();
        let b: Vec<_> = r1.iter().zip(&s_r).map(|(r, s)| r - s * c1).collect();
        let rho = (p1.mu - p2.mu) * d;
        let alpha = p1.mu - rho * c1;

        // The third transcript must lie on the same lines.
        let on_line = |l: &[GroupScalar], r: &[GroupScalar], c: &GroupScalar| {
            l.iter().zip(&a).zip(&s_l).all(|((l, a), s)| *l == a + s * c)
                && r.iter().zip(&b).zip(&s_r).all(|((r, b), s)| *r == b + s * c)
        };
        if !on_line(&l3, &r3, c3) {
            return Err(Error::InvalidParameter("transcripts are inconsistent".into()));
        }

        // t̂ and τ_C are quadratics in C; Lagrange interpolation at 0.
        let at_zero = |y1: GroupScalar, y2: GroupScalar, y3: GroupScalar| {
            let w1 = c2 * c3 * ((c1 - c2) * (c1 - c3)).invert();
            let w2 = c1 * c3 * ((c2 - c1) * (c2 - c3)).invert();
            let w3 = c1 * c2 * ((c3 - c1) * (c3 - c2)).invert();
            y1 * w1 + y2 * w2 + y3 * w3
        };
        let c = at_zero(p1.t_hat, p2.t_hat, p3.t_hat);
        let gamma = at_zero(p1.tau_c, p2.tau_c, p3.tau_c);

        let out = ExtractedWitness { a, b, alpha, rho, s_l, s_r, c, gamma };
        let recomputed = IpWitness { a: out.a.clone(), b: out.b.clone(), alpha, gamma, c }.statement(params)?;
        if recomputed != *stmt {
            return Err(Error::InvalidParameter("extracted witness does not open the statement".into()));
        }
        Ok(out)
    }
}
