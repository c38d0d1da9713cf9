//! Binary envelope for attestation bundles.
//!
//! ```text
//! "ZKSV" ∥ u8 version
//!   ∥ u16-le(label len) ∥ params label
//!   ∥ u32-le(n)
//!   ∥ u16-le(nonce len) ∥ nonce
//!   ∥ u32-le(total points) ∥ u32-le(total scalars)
//!   ∥ payload
//!
//! payload = u8 variant ∥ u8 vector count ∥ i128-le score
//!   ∥ u32-le(points) ∥ points ∥ u32-le(scalars) ∥ scalars
//! ```
//!
//! The payload elements are the 12 vector proof sets in order followed by
//! `r_R` as the last scalar. Inside a vector set the order is
//!
//! ```text
//! points:  S_H; Diff, S_H^iter, Π_Eq, Π_0; Avg, Π_IP^μ; Avg′, Π_IP^μ′; Λ; Λ′
//!          Λ = G^μ̃, H^μ̃, H_S, Π_Eq^G, Π_Eq^H, Π_Eq^S, Var, Π_IP^σ², Std, Π_sqrt
//! scalars: Π_Eq, Π_0; Π_IP^μ; Π_IP^μ′; Λ; Λ′
//! ```
//!
//! with each sub-proof in its own part order. Per vector at `k = log₂ n`
//! and 64-bit ranges:
//!
//! ```text
//! log:    points 121 + 8k   scalars 4n + 72
//! linear: points 121        scalars 12n + 64
//! ```

use crate::errors::WireError;
use crate::features::VECTOR_COUNT;
use crate::group::{GroupPoint, GroupScalar};
use crate::ipzkp::{IpProof, IpVariant};
use crate::pedersen::Commitment;
use crate::sigma::{EqualityProof, SigmaProof, ZeroReplaceProof};
use crate::sqrt::{sqrt_element_counts, SqrtProof};
use crate::transcript::MIN_NONCE_BYTES;
use crate::wire::{element_bytes, PartCursor, ProofParts, Reader, Writer};
use crate::zksvm::{
    vector_element_counts, AttestationBundle, DeltaProof, StdProof, SumProof, VectorProofSet, RANGE_BITS,
};

pub const MAGIC: &[u8; 4] = b"ZKSV";
pub const VERSION: u8 = 1;
/// Largest `n` a decoder accepts.
pub const MAX_N: usize = 1 << 16;

const EQ_POINTS: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleEnvelope {
    pub version: u8,
    pub label: Vec<u8>,
    pub n: usize,
    pub variant: IpVariant,
    pub bundle: AttestationBundle,
}

impl BundleEnvelope {
    pub fn new(label: &[u8], n: usize, variant: IpVariant, bundle: AttestationBundle) -> Self {
        BundleEnvelope { version: VERSION, label: label.to_vec(), n, variant, bundle }
    }

    /// `(points, scalars)` carried by the payload.
    pub fn element_counts(&self) -> (usize, usize) {
        self.bundle.element_counts()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(MAGIC);
        w.u8(self.version);
        w.short_bytes(&self.label);
        w.u32(self.n as u32);
        w.short_bytes(&self.bundle.nonce);
        let (points, scalars) = self.bundle.to_parts();
        w.u32(points.len() as u32);
        w.u32(scalars.len() as u32);
        w.u8(self.variant.tag());
        w.u8(self.bundle.vectors.len() as u8);
        w.i128(self.bundle.score);
        w.parts(&points, &scalars);
        w.into_bytes()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, WireError> {
        let mut r = Reader::new(bytes);
        if r.take(4)? != MAGIC {
            return Err(WireError::BadMagic);
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(WireError::BadVersion(version));
        }
        let label = r.short_bytes()?.to_vec();
        let n = r.u32()? as usize;
        if n < 2 || n > MAX_N || !n.is_power_of_two() {
            return Err(WireError::BadLayout);
        }
        let nonce = r.short_bytes()?.to_vec();
        if nonce.len() < MIN_NONCE_BYTES {
            return Err(WireError::BadLayout);
        }
        let (total_points, total_scalars) = (r.u32()? as usize, r.u32()? as usize);
        let variant = IpVariant::from_tag(r.u8()?)?;
        if r.u8()? as usize != VECTOR_COUNT {
            return Err(WireError::BadLayout);
        }
        let expected = bundle_element_counts(n, variant);
        if (total_points, total_scalars) != expected {
            return Err(WireError::BadLayout);
        }
        let score = r.i128()?;
        let (points, scalars) = r.parts(expected.0, expected.1)?;
        r.finish()?;
        let bundle = AttestationBundle::from_parts(n, variant, nonce, score, &points, &scalars);
        Ok(BundleEnvelope { version, label, n, variant, bundle })
    }
}

/// `(points, scalars)` of a full bundle: 12 vector sets plus `r_R`.
pub fn bundle_element_counts(n: usize, variant: IpVariant) -> (usize, usize) {
    let (p, s) = vector_element_counts(n, variant);
    (VECTOR_COUNT * p, VECTOR_COUNT * s + 1)
}

/// Envelope bytes outside the group elements.
pub fn envelope_overhead(label_len: usize, nonce_len: usize) -> usize {
    // magic, version, label, n, nonce, totals, variant, count, score, part counts
    4 + 1 + (2 + label_len) + 4 + (2 + nonce_len) + 8 + 1 + 1 + 16 + 8
}

/// Encoded size of an envelope.
pub fn envelope_len(label_len: usize, nonce_len: usize, n: usize, variant: IpVariant) -> usize {
    let (p, s) = bundle_element_counts(n, variant);
    envelope_overhead(label_len, nonce_len) + element_bytes(p, s)
}

fn push_parts<P: ProofParts>(p: &P, points: &mut Vec<GroupPoint>, scalars: &mut Vec<GroupScalar>) {
    let (a, b) = p.to_parts();
    points.extend(a);
    scalars.extend(b);
}

fn take_sigma(pc: &mut PartCursor<'_, GroupPoint>, sc: &mut PartCursor<'_, GroupScalar>, k: usize) -> SigmaProof {
    SigmaProof { announcements: pc.take(EQ_POINTS).to_vec(), responses: sc.take(k + 2).to_vec() }
}

fn take_ip(
    n: usize,
    variant: IpVariant,
    pc: &mut PartCursor<'_, GroupPoint>,
    sc: &mut PartCursor<'_, GroupScalar>,
) -> IpProof {
    let (p, s) = variant.element_counts(n);
    IpProof::from_parts(variant, n, pc.take(p), sc.take(s))
}

impl SumProof {
    fn push_parts(&self, points: &mut Vec<GroupPoint>, scalars: &mut Vec<GroupScalar>) {
        points.push(self.avg.0);
        push_parts(&self.ip, points, scalars);
    }

    fn take_parts(
        n: usize,
        variant: IpVariant,
        pc: &mut PartCursor<'_, GroupPoint>,
        sc: &mut PartCursor<'_, GroupScalar>,
    ) -> Self {
        let avg = Commitment(pc.one());
        SumProof { avg, ip: take_ip(n, variant, pc, sc) }
    }
}

impl StdProof {
    fn push_parts(&self, points: &mut Vec<GroupPoint>, scalars: &mut Vec<GroupScalar>) {
        points.extend([self.g_avg.0, self.h_avg.0, self.h_s.0]);
        for eq in [&self.eq_g, &self.eq_h, &self.eq_s] {
            push_parts(eq, points, scalars);
        }
        points.push(self.var.0);
        push_parts(&self.ip, points, scalars);
        points.push(self.std.0);
        push_parts(&self.sqrt, points, scalars);
    }

    fn take_parts(
        n: usize,
        variant: IpVariant,
        pc: &mut PartCursor<'_, GroupPoint>,
        sc: &mut PartCursor<'_, GroupScalar>,
    ) -> Self {
        let (g_avg, h_avg, h_s) = (Commitment(pc.one()), Commitment(pc.one()), Commitment(pc.one()));
        let eq_g = EqualityProof(take_sigma(pc, sc, 1));
        let eq_h = EqualityProof(take_sigma(pc, sc, 1));
        let eq_s = EqualityProof(take_sigma(pc, sc, n));
        let var = Commitment(pc.one());
        let ip = take_ip(n, variant, pc, sc);
        let std = Commitment(pc.one());
        let (sp, ss) = sqrt_element_counts(RANGE_BITS);
        let sqrt = SqrtProof::from_parts(RANGE_BITS, pc.take(sp), sc.take(ss));
        StdProof { g_avg, h_avg, h_s, eq_g, eq_h, eq_s, var, ip, std, sqrt }
    }
}

impl VectorProofSet {
    fn take_parts(
        n: usize,
        variant: IpVariant,
        pc: &mut PartCursor<'_, GroupPoint>,
        sc: &mut PartCursor<'_, GroupScalar>,
    ) -> Self {
        let commitment = Commitment(pc.one());
        let (diff, iterated) = (Commitment(pc.one()), Commitment(pc.one()));
        let equality = EqualityProof(take_sigma(pc, sc, n));
        let extracted = pc.one();
        let zero = ZeroReplaceProof {
            extracted,
            proof: SigmaProof { announcements: pc.take(3).to_vec(), responses: sc.take(n + 2).to_vec() },
        };
        let sum = SumProof::take_parts(n, variant, pc, sc);
        let sum_diff = SumProof::take_parts(n, variant, pc, sc);
        let std = StdProof::take_parts(n, variant, pc, sc);
        let std_diff = StdProof::take_parts(n, variant, pc, sc);
        VectorProofSet {
            commitment,
            delta: DeltaProof { diff, iterated, equality, zero },
            sum,
            sum_diff,
            std,
            std_diff,
        }
    }

    fn n(&self) -> usize {
        self.sum.ip.n()
    }

    fn variant(&self) -> IpVariant {
        self.sum.ip.variant()
    }
}

impl ProofParts for VectorProofSet {
    fn to_parts(&self) -> (Vec<GroupPoint>, Vec<GroupScalar>) {
        let (mut points, mut scalars) = (Vec::new(), Vec::new());
        let d = &self.delta;
        points.extend([self.commitment.0, d.diff.0, d.iterated.0]);
        push_parts(&d.equality, &mut points, &mut scalars);
        push_parts(&d.zero, &mut points, &mut scalars);
        self.sum.push_parts(&mut points, &mut scalars);
        self.sum_diff.push_parts(&mut points, &mut scalars);
        self.std.push_parts(&mut points, &mut scalars);
        self.std_diff.push_parts(&mut points, &mut scalars);
        (points, scalars)
    }

    fn with_parts(&self, points: &[GroupPoint], scalars: &[GroupScalar]) -> Self {
        let (mut pc, mut sc) = (PartCursor::new(points), PartCursor::new(scalars));
        Self::take_parts(self.n(), self.variant(), &mut pc, &mut sc)
    }
}

impl AttestationBundle {
    fn from_parts(
        n: usize,
        variant: IpVariant,
        nonce: Vec<u8>,
        score: i128,
        points: &[GroupPoint],
        scalars: &[GroupScalar],
    ) -> Self {
        let (mut pc, mut sc) = (PartCursor::new(points), PartCursor::new(scalars));
        let vectors = (0..VECTOR_COUNT).map(|_| VectorProofSet::take_parts(n, variant, &mut pc, &mut sc)).collect();
        let score_blinding = sc.one();
        AttestationBundle { nonce, vectors, score, score_blinding }
    }
}

/// Group elements of the bundle; the score itself is an integer header
/// field and `r_R` is the last scalar.
impl ProofParts for AttestationBundle {
    fn to_parts(&self) -> (Vec<GroupPoint>, Vec<GroupScalar>) {
        let (mut points, mut scalars) = (Vec::new(), Vec::new());
        for v in &self.vectors {
            push_parts(v, &mut points, &mut scalars);
        }
        scalars.push(self.score_blinding);
        (points, scalars)
    }

    fn with_parts(&self, points: &[GroupPoint], scalars: &[GroupScalar]) -> Self {
        let first = &self.vectors[0];
        Self::from_parts(first.n(), first.variant(), self.nonce.clone(), self.score, points, scalars)
    }
}
