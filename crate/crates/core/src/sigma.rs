//! Sigma protocols over Pedersen commitments, made non-interactive with the
//! transcript.
//!
//! All four proofs are instances of one engine: a proof of knowledge of a
//! witness vector `x` satisfying a set of linear equations
//! `image_j = Σ_k x_{w(j,k)} · base_{j,k}`. Responses are shared across
//! equations, which is what ties e.g. the two halves of an equality proof to
//! the same message.
//!
//! Serialized layout of every sigma proof: the announcements (one point per
//! equation, prefixed by any extra statement points such as `E` for the zero
//! replacement) followed by one response scalar per witness entry.

use rand_core::{CryptoRng, RngCore};

use crate::errors::{Error, WireError};
use crate::group::{multiexp, random_scalar, Basis, CommitParams, GroupPoint, GroupScalar};
use crate::pedersen::{Commitment, ScalarCommitment, VectorCommitment};
use crate::transcript::Transcript;
use crate::wire::{ProofParts, Reader, Writer};

const CHALLENGE_LABEL: &[u8] = b"sigma.challenge";

struct Equation {
    image: GroupPoint,
    terms: Vec<(usize, GroupPoint)>,
}

/// A linear relation over the group.
struct Relation {
    domain: Vec<u8>,
    witness_len: usize,
    equations: Vec<Equation>,
}

impl Relation {
    fn new(domain: &[u8], witness_len: usize) -> Self {
        Relation { domain: domain.to_vec(), witness_len, equations: Vec::new() }
    }

    fn equation(&mut self, image: GroupPoint, terms: Vec<(usize, GroupPoint)>) {
        debug_assert!(terms.iter().all(|(w, _)| *w < self.witness_len));
        self.equations.push(Equation { image, terms });
    }

    fn evaluate(terms: &[(usize, GroupPoint)], witness: &[GroupScalar]) -> GroupPoint {
        let (idx, bases): (Vec<_>, Vec<_>) = terms.iter().cloned().unzip();
        let exps: Vec<_> = idx.iter().map(|&w| witness[w]).collect();
        multiexp(&bases, &exps).expect("relation terms are nonempty")
    }

    fn holds(&self, witness: &[GroupScalar]) -> bool {
        witness.len() == self.witness_len
            && self.equations.iter().all(|eq| Self::evaluate(&eq.terms, witness) == eq.image)
    }

    fn bind_statement(&self, t: &mut Transcript) {
        t.absorb(b"sigma.domain", &self.domain);
        t.absorb_u64(b"sigma.witness-len", self.witness_len as u64);
        let images: Vec<_> = self.equations.iter().map(|e| e.image).collect();
        t.absorb_points(b"sigma.images", &images);
    }

    fn prove<R: RngCore + CryptoRng>(
        &self,
        witness: &[GroupScalar],
        t: &mut Transcript,
        rng: &mut R,
    ) -> Result<SigmaProof, Error> {
        if !self.holds(witness) {
            return Err(Error::Precondition(format!(
                "witness does not satisfy the {} relation",
                String::from_utf8_lossy(&self.domain)
            )));
        }
        self.bind_statement(t);
        let nonces: Vec<_> = (0..self.witness_len).map(|_| random_scalar(rng)).collect();
        let announcements: Vec<_> =
            self.equations.iter().map(|eq| Self::evaluate(&eq.terms, &nonces)).collect();
        t.absorb_points(b"sigma.announcements", &announcements);
        let c = t.challenge_scalar(CHALLENGE_LABEL);
        let responses = nonces.iter().zip(witness).map(|(k, x)| k + c * x).collect();
        Ok(SigmaProof { announcements, responses })
    }

    fn verify(&self, proof: &SigmaProof, t: &mut Transcript) -> bool {
        if proof.announcements.len() != self.equations.len()
            || proof.responses.len() != self.witness_len
        {
            return false;
        }
        self.bind_statement(t);
        t.absorb_points(b"sigma.announcements", &proof.announcements);
        let c = t.challenge_scalar(CHALLENGE_LABEL);
        self.equations.iter().zip(&proof.announcements).all(|(eq, ann)| {
            Self::evaluate(&eq.terms, &proof.responses) == ann + c * eq.image
        })
    }

    /// Honest-verifier simulator: picks the challenge and responses, solves
    /// for the announcements, and programs the transcript's oracle.
    #[cfg(feature = "test-oracles")]
    fn simulate<R: RngCore + CryptoRng>(&self, t: &mut Transcript, rng: &mut R) -> SigmaProof {
        let c = loop {
            let c = random_scalar(rng);
            if c != GroupScalar::ZERO {
                break c;
            }
        };
        let responses: Vec<_> = (0..self.witness_len).map(|_| random_scalar(rng)).collect();
        let announcements: Vec<_> = self
            .equations
            .iter()
            .map(|eq| Self::evaluate(&eq.terms, &responses) - c * eq.image)
            .collect();
        self.bind_statement(t);
        t.absorb_points(b"sigma.announcements", &announcements);
        t.program_challenge(CHALLENGE_LABEL, c);
        let derived = t.challenge_scalar(CHALLENGE_LABEL);
        debug_assert_eq!(derived, c);
        SigmaProof { announcements, responses }
    }
}

/// Announcements and responses of one sigma protocol run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaProof {
    pub announcements: Vec<GroupPoint>,
    pub responses: Vec<GroupScalar>,
}

impl SigmaProof {
    pub fn encode(&self, w: &mut Writer) {
        w.parts(&self.announcements, &self.responses);
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self, WireError> {
        let (announcements, responses) = r.parts_any()?;
        Ok(SigmaProof { announcements, responses })
    }
}

impl ProofParts for SigmaProof {
    fn to_parts(&self) -> (Vec<GroupPoint>, Vec<GroupScalar>) {
        (self.announcements.clone(), self.responses.clone())
    }

    fn with_parts(&self, points: &[GroupPoint], scalars: &[GroupScalar]) -> Self {
        SigmaProof { announcements: points.to_vec(), responses: scalars.to_vec() }
    }
}

macro_rules! sigma_newtype {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq)]
        pub struct $name(pub SigmaProof);

        impl $name {
            pub fn encode(&self, w: &mut Writer) {
                self.0.encode(w)
            }

            pub fn decode(r: &mut Reader<'_>) -> Result<Self, WireError> {
                SigmaProof::decode(r).map($name)
            }
        }

        impl ProofParts for $name {
            fn to_parts(&self) -> (Vec<GroupPoint>, Vec<GroupScalar>) {
                self.0.to_parts()
            }

            fn with_parts(&self, points: &[GroupPoint], scalars: &[GroupScalar]) -> Self {
                $name(self.0.with_parts(points, scalars))
            }
        }
    };
}

sigma_newtype!(
    /// Proof of knowledge of `(m⃗, r)` with `C = basis^m⃗ · h^r`.
    OpeningProof
);
sigma_newtype!(
    /// Proof that `C₁` and `C₂` commit to the same message under two bases.
    EqualityProof
);
sigma_newtype!(
    /// Proof that `C₁` commits to the square of the value in `C₂`.
    SquareProof
);

fn terms_for(bases: &[GroupPoint], offset: usize) -> Vec<(usize, GroupPoint)> {
    bases.iter().enumerate().map(|(i, b)| (offset + i, *b)).collect()
}

fn opening_relation(params: &CommitParams, basis: Basis, c: &Commitment) -> Relation {
    let bases = params.basis(basis);
    let k = bases.len();
    let mut rel = Relation::new(&[b"pi-op/".as_slice(), basis.tag()].concat(), k + 1);
    let mut terms = terms_for(&bases, 0);
    terms.push((k, params.h));
    rel.equation(c.0, terms);
    rel
}

fn witness_of(opening: &VectorCommitment) -> Vec<GroupScalar> {
    let mut w = opening.values.clone();
    w.push(opening.blinding);
    w
}

/// Π_Op.
pub fn prove_opening<R: RngCore + CryptoRng>(
    params: &CommitParams,
    opening: &VectorCommitment,
    t: &mut Transcript,
    rng: &mut R,
) -> Result<OpeningProof, Error> {
    let rel = opening_relation(params, opening.basis, &opening.commitment);
    rel.prove(&witness_of(opening), t, rng).map(OpeningProof)
}

pub fn verify_opening(
    params: &CommitParams,
    basis: Basis,
    c: &Commitment,
    proof: &OpeningProof,
    t: &mut Transcript,
) -> bool {
    opening_relation(params, basis, c).verify(&proof.0, t)
}

fn equality_relation(
    params: &CommitParams,
    basis1: Basis,
    c1: &Commitment,
    basis2: Basis,
    c2: &Commitment,
) -> Option<Relation> {
    let b1 = params.basis(basis1);
    let b2 = params.basis(basis2);
    if b1.len() != b2.len() {
        return None;
    }
    let k = b1.len();
    let domain = [b"pi-eq/".as_slice(), basis1.tag(), b"/", basis2.tag()].concat();
    let mut rel = Relation::new(&domain, k + 2);
    let mut t1 = terms_for(&b1, 0);
    t1.push((k, params.h));
    let mut t2 = terms_for(&b2, 0);
    t2.push((k + 1, params.h));
    rel.equation(c1.0, t1);
    rel.equation(c2.0, t2);
    Some(rel)
}

/// Π_Eq: `first` and `second` open to the same message under their own
/// bases, with independent blindings.
pub fn prove_equality<R: RngCore + CryptoRng>(
    params: &CommitParams,
    first: &VectorCommitment,
    second: &VectorCommitment,
    t: &mut Transcript,
    rng: &mut R,
) -> Result<EqualityProof, Error> {
    if first.values != second.values {
        return Err(Error::Precondition("equality proof over different messages".into()));
    }
    let rel = equality_relation(
        params,
        first.basis,
        &first.commitment,
        second.basis,
        &second.commitment,
    )
    .ok_or_else(|| Error::InvalidParameter("bases of different lengths".into()))?;
    let mut witness = first.values.clone();
    witness.push(first.blinding);
    witness.push(second.blinding);
    rel.prove(&witness, t, rng).map(EqualityProof)
}

pub fn verify_equality(
    params: &CommitParams,
    basis1: Basis,
    c1: &Commitment,
    basis2: Basis,
    c2: &Commitment,
    proof: &EqualityProof,
    t: &mut Transcript,
) -> bool {
    match equality_relation(params, basis1, c1, basis2, c2) {
        Some(rel) => rel.verify(&proof.0, t),
        None => false,
    }
}

/// Π_0: `E = g_j^{m_j}` extracted from `C`, and `Diff` commits to `m⃗` with
/// entry `j` set to zero under a fresh blinding.
///
/// Witness layout: `m_j`, then the other `n−1` entries in order, then the
/// blinding of `C`, then the blinding of `Diff`. Equations, in order:
/// `E = g_j^{m_j}`; `C/E = Π_{i≠j} g_i^{m_i} h^r`; `Diff = Π_{i≠j} g_i^{m_i} h^{r_new}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroReplaceProof {
    pub extracted: GroupPoint,
    pub proof: SigmaProof,
}

impl ZeroReplaceProof {
    pub fn encode(&self, w: &mut Writer) {
        let (p, s) = self.to_parts();
        w.parts(&p, &s);
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self, WireError> {
        let (points, scalars) = r.parts_any()?;
        if points.is_empty() {
            return Err(WireError::BadLayout);
        }
        Ok(ZeroReplaceProof {
            extracted: points[0],
            proof: SigmaProof { announcements: points[1..].to_vec(), responses: scalars },
        })
    }
}

impl ProofParts for ZeroReplaceProof {
    fn to_parts(&self) -> (Vec<GroupPoint>, Vec<GroupScalar>) {
        let mut points = vec![self.extracted];
        points.extend_from_slice(&self.proof.announcements);
        (points, self.proof.responses.clone())
    }

    fn with_parts(&self, points: &[GroupPoint], scalars: &[GroupScalar]) -> Self {
        ZeroReplaceProof {
            extracted: points[0],
            proof: SigmaProof { announcements: points[1..].to_vec(), responses: scalars.to_vec() },
        }
    }
}

fn zero_replace_relation(
    params: &CommitParams,
    basis: Basis,
    c: &Commitment,
    diff: &Commitment,
    index: usize,
    extracted: &GroupPoint,
) -> Relation {
    let bases = params.basis(basis);
    let n = bases.len();
    let mut domain = [b"pi-zero/".as_slice(), basis.tag()].concat();
    domain.extend_from_slice(&(index as u64).to_le_bytes());
    let mut rel = Relation::new(&domain, n + 2);
    rel.equation(*extracted, vec![(0, bases[index])]);
    let rest: Vec<(usize, GroupPoint)> = bases
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != index)
        .enumerate()
        .map(|(w, (_, b))| (1 + w, *b))
        .collect();
    let mut quotient_terms = rest.clone();
    quotient_terms.push((n, params.h));
    let mut diff_terms = rest;
    diff_terms.push((n + 1, params.h));
    rel.equation(c.0 - extracted, quotient_terms);
    rel.equation(diff.0, diff_terms);
    rel
}

/// Π_0 prover. `index` is 0-based. Returns the re-randomized commitment with
/// entry `index` replaced by zero, and the proof tying it to `c`.
pub fn prove_zero_replace<R: RngCore + CryptoRng>(
    params: &CommitParams,
    c: &VectorCommitment,
    index: usize,
    new_blinding: GroupScalar,
    t: &mut Transcript,
    rng: &mut R,
) -> Result<(VectorCommitment, ZeroReplaceProof), Error> {
    let n = c.values.len();
    if index >= n {
        return Err(Error::InvalidParameter(format!("index {index} out of range for length {n}")));
    }
    if !c.open_check(params) {
        return Err(Error::Precondition("zero replacement over a non-matching opening".into()));
    }
    let bases = params.basis(c.basis);
    let extracted = c.values[index] * bases[index];
    let mut zeroed = c.values.clone();
    zeroed[index] = GroupScalar::ZERO;
    let diff = crate::pedersen::commit_vector(params, c.basis, zeroed, new_blinding)?;
    let rel = zero_replace_relation(params, c.basis, &c.commitment, &diff.commitment, index, &extracted);
    t.absorb_point(b"pi-zero.extracted", &extracted);
    let mut witness = vec![c.values[index]];
    witness.extend(c.values.iter().enumerate().filter(|(i, _)| *i != index).map(|(_, v)| *v));
    witness.push(c.blinding);
    witness.push(new_blinding);
    let proof = rel.prove(&witness, t, rng)?;
    Ok((diff, ZeroReplaceProof { extracted, proof }))
}

pub fn verify_zero_replace(
    params: &CommitParams,
    basis: Basis,
    c: &Commitment,
    diff: &Commitment,
    index: usize,
    proof: &ZeroReplaceProof,
    t: &mut Transcript,
) -> bool {
    if index >= params.basis(basis).len() {
        return false;
    }
    let rel = zero_replace_relation(params, basis, c, diff, index, &proof.extracted);
    t.absorb_point(b"pi-zero.extracted", &proof.extracted);
    rel.verify(&proof.proof, t)
}

fn square_relation(params: &CommitParams, square: &Commitment, root: &Commitment) -> Relation {
    // witness: (m, r_root, r_square − m·r_root)
    let mut rel = Relation::new(b"pi-sq", 3);
    rel.equation(root.0, vec![(0, params.g), (1, params.h)]);
    rel.equation(square.0, vec![(0, root.0), (2, params.h)]);
    rel
}

/// Π_Sq: `square` opens to `root.value²`. Proven as knowledge of an
/// opening of `square` under the basis `(root, h)`.
pub fn prove_square<R: RngCore + CryptoRng>(
    params: &CommitParams,
    square: &ScalarCommitment,
    root: &ScalarCommitment,
    t: &mut Transcript,
    rng: &mut R,
) -> Result<SquareProof, Error> {
    if square.value != root.value * root.value {
        return Err(Error::Precondition("committed value is not the square of the root".into()));
    }
    let rel = square_relation(params, &square.commitment, &root.commitment);
    let witness = [root.value, root.blinding, square.blinding - root.value * root.blinding];
    rel.prove(&witness, t, rng).map(SquareProof)
}

pub fn verify_square(
    params: &CommitParams,
    square: &Commitment,
    root: &Commitment,
    proof: &SquareProof,
    t: &mut Transcript,
) -> bool {
    square_relation(params, square, root).verify(&proof.0, t)
}

impl ScalarCommitment {
    /// The same commitment viewed as a one-entry vector under `g`.
    pub fn as_vector(&self) -> VectorCommitment {
        VectorCommitment {
            commitment: self.commitment,
            basis: Basis::Value,
            values: vec![self.value],
            blinding: self.blinding,
        }
    }
}

/// Simulators used by the privacy tests. Each one produces a proof for an
/// arbitrary statement by programming the transcript's oracle.
#[cfg(feature = "test-oracles")]
pub mod simulate {
    use super::*;

    pub fn opening<R: RngCore + CryptoRng>(
        params: &CommitParams,
        basis: Basis,
        c: &Commitment,
        t: &mut Transcript,
        rng: &mut R,
    ) -> OpeningProof {
        OpeningProof(opening_relation(params, basis, c).simulate(t, rng))
    }

    pub fn equality<R: RngCore + CryptoRng>(
        params: &CommitParams,
        basis1: Basis,
        c1: &Commitment,
        basis2: Basis,
        c2: &Commitment,
        t: &mut Transcript,
        rng: &mut R,
    ) -> EqualityProof {
        let rel = equality_relation(params, basis1, c1, basis2, c2).expect("bases match");
        EqualityProof(rel.simulate(t, rng))
    }

    pub fn zero_replace<R: RngCore + CryptoRng>(
        params: &CommitParams,
        basis: Basis,
        c: &Commitment,
        diff: &Commitment,
        index: usize,
        t: &mut Transcript,
        rng: &mut R,
    ) -> ZeroReplaceProof {
        let extracted = crate::group::random_point(rng);
        let rel = zero_replace_relation(params, basis, c, diff, index, &extracted);
        t.absorb_point(b"pi-zero.extracted", &extracted);
        ZeroReplaceProof { extracted, proof: rel.simulate(t, rng) }
    }

    pub fn square<R: RngCore + CryptoRng>(
        params: &CommitParams,
        square: &Commitment,
        root: &Commitment,
        t: &mut Transcript,
        rng: &mut R,
    ) -> SquareProof {
        SquareProof(square_relation(params, square, root).simulate(t, rng))
    }
}

/// Applies `f` to every single-element mutation of `proof` (each point moved
/// by the generator `g`, each scalar incremented by one) and returns how many
/// mutations `f` accepted.
pub fn count_accepted_mutations<P, F>(proof: &P, shift: &GroupPoint, mut accepts: F) -> usize
where
    P: ProofParts,
    F: FnMut(&P) -> bool,
{
    let (points, scalars) = proof.to_parts();
    let mut accepted = 0;
    for i in 0..points.len() {
        let mut p = points.clone();
        p[i] += shift;
        if accepts(&proof.with_parts(&p, &scalars)) {
            accepted += 1;
        }
    }
    for i in 0..scalars.len() {
        let mut s = scalars.clone();
        s[i] += GroupScalar::ONE;
        if accepts(&proof.with_parts(&points, &s)) {
            accepted += 1;
        }
    }
    accepted
}
