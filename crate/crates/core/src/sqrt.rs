//! Floor square root: `C₁` commits to `⌊√m₂⌋` where `C₂` commits to `m₂`.
//!
//! ```text
//! Sq  = Commit(m₁²)        Π_Sq(Sq, C₁)
//! Sq⁺ = Commit((m₁+1)²)    Π_Sq(Sq⁺, C₁·g)
//! C₂ / Sq        opens to m₂ − m₁²          ∈ [0, 2^l)
//! Sq⁺ / C₂ / g   opens to (m₁+1)² − m₂ − 1  ∈ [0, 2^l)
//! ```
//!
//! Encoding: `u16-le(l) ∥ parts` with points
//! `Sq, Sq⁺, Π_Sq, Π_Sq⁺ announcements, range points…` and scalars
//! `Π_Sq, Π_Sq⁺ responses, range scalars…`.

use rand_core::{CryptoRng, RngCore};

use crate::errors::{Error, WireError};
use crate::group::{random_scalar, scalar_to_u64, CommitParams, GroupPoint, GroupScalar};
use crate::pedersen::{commit_scalar, Commitment, ScalarCommitment};
use crate::range::{prove_range, range_element_counts, verify_range, RangeProof};
use crate::sigma::{prove_square, verify_square, SigmaProof, SquareProof};
use crate::transcript::Transcript;
use crate::wire::{PartCursor, ProofParts, Reader, Writer};

const SQUARE_POINTS: usize = 2;
const SQUARE_SCALARS: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtProof {
    pub square: Commitment,
    pub next_square: Commitment,
    pub square_proof: SquareProof,
    pub next_square_proof: SquareProof,
    /// `m₂ − m₁² ≥ 0`.
    pub lower: RangeProof,
    /// `(m₁+1)² − m₂ − 1 ≥ 0`.
    pub upper: RangeProof,
}

/// `(points, scalars)` in a square-root proof with `bits`-bit ranges.
pub fn sqrt_element_counts(bits: usize) -> (usize, usize) {
    let (rp, rs) = range_element_counts(bits);
    (2 + 2 * SQUARE_POINTS + 2 * rp, 2 * SQUARE_SCALARS + 2 * rs)
}

/// Integer square root of a `u128`.
pub fn isqrt(x: u128) -> u128 {
    num_integer::Roots::sqrt(&x)
}

/// Proves `root = ⌊√value⌋` with `value < 2^bits`.
pub fn prove_sqrt<R: RngCore + CryptoRng>(
    params: &CommitParams,
    root: &ScalarCommitment,
    value: &ScalarCommitment,
    bits: usize,
    t: &mut Transcript,
    rng: &mut R,
) -> Result<SqrtProof, Error> {
    let m2 = scalar_to_u64(&value.value)
        .filter(|m| bits >= 64 || *m < (1u64 << bits))
        .ok_or_else(|| Error::Precondition(format!("radicand is outside [0, 2^{bits})")))?;
    let m1 = scalar_to_u64(&root.value)
        .ok_or_else(|| Error::Precondition("root is not a small non-negative integer".into()))?;
    if m1 as u128 != isqrt(m2 as u128) {
        return Err(Error::Precondition(format!("{m1} is not the floor square root of {m2}")));
    }
    if !root.open_check(params) || !value.open_check(params) {
        return Err(Error::Precondition("square-root proof over non-matching openings".into()));
    }
    let m1 = m1 as u128;
    let m2 = m2 as u128;
    bind_statement(t, bits, &root.commitment, &value.commitment);

    let sq = commit_scalar(params, GroupScalar::from(m1 * m1), random_scalar(rng));
    let sq_next = commit_scalar(params, GroupScalar::from((m1 + 1) * (m1 + 1)), random_scalar(rng));
    t.absorb_point(b"sqrt.Sq", &sq.commitment.0);
    t.absorb_point(b"sqrt.Sq+", &sq_next.commitment.0);
    let root_next = commit_scalar(params, root.value + GroupScalar::ONE, root.blinding);

    let square_proof = prove_square(params, &sq, root, &mut t.fork(b"sqrt.square"), rng)?;
    let next_square_proof = prove_square(params, &sq_next, &root_next, &mut t.fork(b"sqrt.square+"), rng)?;

    let lower_open = commit_scalar(params, GroupScalar::from(m2 - m1 * m1), value.blinding - sq.blinding);
    let upper_open = commit_scalar(
        params,
        GroupScalar::from((m1 + 1) * (m1 + 1) - m2 - 1),
        sq_next.blinding - value.blinding,
    );
    let lower = prove_range(params, &lower_open, bits, &mut t.fork(b"sqrt.lower"), rng)?;
    let upper = prove_range(params, &upper_open, bits, &mut t.fork(b"sqrt.upper"), rng)?;
    Ok(SqrtProof {
        square: sq.commitment,
        next_square: sq_next.commitment,
        square_proof,
        next_square_proof,
        lower,
        upper,
    })
}

fn bind_statement(t: &mut Transcript, bits: usize, root: &Commitment, value: &Commitment) {
    t.absorb_u64(b"sqrt.l", bits as u64);
    t.absorb_point(b"sqrt.root", &root.0);
    t.absorb_point(b"sqrt.value", &value.0);
}

/// The two range statements' commitments: `C₂/Sq` and `Sq⁺/C₂/g`.
fn range_commitments(params: &CommitParams, value: &Commitment, proof: &SqrtProof) -> (Commitment, Commitment) {
    (
        *value / proof.square,
        proof.next_square / *value / Commitment(params.g),
    )
}

pub fn verify_sqrt(
    params: &CommitParams,
    root: &Commitment,
    value: &Commitment,
    bits: usize,
    proof: &SqrtProof,
    t: &mut Transcript,
) -> bool {
    bind_statement(t, bits, root, value);
    t.absorb_point(b"sqrt.Sq", &proof.square.0);
    t.absorb_point(b"sqrt.Sq+", &proof.next_square.0);
    let root_next = *root * Commitment(params.g);
    let (lower, upper) = range_commitments(params, value, proof);
    verify_square(params, &proof.square, root, &proof.square_proof, &mut t.fork(b"sqrt.square"))
        && verify_square(params, &proof.next_square, &root_next, &proof.next_square_proof, &mut t.fork(b"sqrt.square+"))
        && verify_range(params, &lower, bits, &proof.lower, &mut t.fork(b"sqrt.lower"))
        && verify_range(params, &upper, bits, &proof.upper, &mut t.fork(b"sqrt.upper"))
}

/// Simulated square-root proof for arbitrary commitments.
#[cfg(feature = "test-oracles")]
pub fn simulate_sqrt<R: RngCore + CryptoRng>(
    params: &CommitParams,
    root: &Commitment,
    value: &Commitment,
    bits: usize,
    t: &mut Transcript,
    rng: &mut R,
) -> Result<SqrtProof, Error> {
    use crate::range::simulate_range;
    use crate::sigma::simulate;
    bind_statement(t, bits, root, value);
    let square = Commitment(crate::group::random_point(rng));
    let next_square = Commitment(crate::group::random_point(rng));
    t.absorb_point(b"sqrt.Sq", &square.0);
    t.absorb_point(b"sqrt.Sq+", &next_square.0);
    let root_next = *root * Commitment(params.g);
    let square_proof = simulate::square(params, &square, root, &mut t.fork(b"sqrt.square"), rng);
    let next_square_proof = simulate::square(params, &next_square, &root_next, &mut t.fork(b"sqrt.square+"), rng);
    let lower_c = *value / square;
    let upper_c = next_square / *value / Commitment(params.g);
    let lower = simulate_range(params, &lower_c, bits, &mut t.fork(b"sqrt.lower"), rng)?;
    let upper = simulate_range(params, &upper_c, bits, &mut t.fork(b"sqrt.upper"), rng)?;
    Ok(SqrtProof { square, next_square, square_proof, next_square_proof, lower, upper })
}

impl SqrtProof {
    pub fn bits(&self) -> usize {
        self.lower.bits
    }

    pub fn encode(&self, w: &mut Writer) {
        w.u16(self.bits() as u16);
        let (p, s) = self.to_parts();
        w.parts(&p, &s);
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self, WireError> {
        let bits = r.u16()? as usize;
        if !crate::range::SUPPORTED_BITS.contains(&bits) {
            return Err(WireError::BadLayout);
        }
        let (np, ns) = sqrt_element_counts(bits);
        let (points, scalars) = r.parts(np, ns)?;
        Ok(Self::from_parts(bits, &points, &scalars))
    }

    pub(crate) fn from_parts(bits: usize, points: &[GroupPoint], scalars: &[GroupScalar]) -> Self {
        let mut pc = PartCursor::new(points);
        let mut sc = PartCursor::new(scalars);
        let square = Commitment(pc.one());
        let next_square = Commitment(pc.one());
        let mut square_proof = || {
            SquareProof(SigmaProof {
                announcements: pc.take(SQUARE_POINTS).to_vec(),
                responses: sc.take(SQUARE_SCALARS).to_vec(),
            })
        };
        let square_proof_1 = square_proof();
        let square_proof_2 = square_proof();
        let (rp, rs) = range_element_counts(bits);
        let lower = RangeProof::from_parts(bits, pc.take(rp), sc.take(rs));
        let upper = RangeProof::from_parts(bits, pc.take(rp), sc.take(rs));
        SqrtProof {
            square,
            next_square,
            square_proof: square_proof_1,
            next_square_proof: square_proof_2,
            lower,
            upper,
        }
    }
}

impl ProofParts for SqrtProof {
    fn to_parts(&self) -> (Vec<GroupPoint>, Vec<GroupScalar>) {
        let mut points = vec![self.square.0, self.next_square.0];
        let mut scalars = Vec::new();
        for sp in [&self.square_proof, &self.next_square_proof] {
            points.extend_from_slice(&sp.0.announcements);
            scalars.extend_from_slice(&sp.0.responses);
        }
        for rp in [&self.lower, &self.upper] {
            let (p, s) = rp.to_parts();
            points.extend(p);
            scalars.extend(s);
        }
        (points, scalars)
    }

    fn with_parts(&self, points: &[GroupPoint], scalars: &[GroupScalar]) -> Self {
        Self::from_parts(self.bits(), points, scalars)
    }
}
