//! Prime-order group backbone.
//!
//! Everything in this crate runs over the ristretto255 group built on
//! Curve25519. `GroupPoint` and `GroupScalar` are the only group types the
//! rest of the crate touches, so swapping the backend means changing this
//! module alone.
//!
//! The group is written additively in code. A paper-style product of
//! commitments `C1 · C2` is `C1 + C2` here, and an exponentiation `g^x` is
//! `x * g`.
//!
//! Wire encodings:
//! - scalars: 32 bytes little-endian, canonical (`< p`),
//! - points: 32-byte compressed ristretto encoding, canonical.

use curve25519_dalek::ristretto::CompressedRistretto;
use curve25519_dalek::traits::{Identity, VartimeMultiscalarMul};
use rand_core::{CryptoRng, RngCore};
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::errors::{Error, WireError};

pub use curve25519_dalek::ristretto::RistrettoPoint as GroupPoint;
pub use curve25519_dalek::scalar::Scalar as GroupScalar;

/// Encoded length of a scalar in bytes.
pub const SCALAR_BYTES: usize = 32;
/// Encoded length of a compressed point in bytes.
pub const POINT_BYTES: usize = 32;

const GENERATOR_DOMAIN: &[u8] = b"zksvm.generators.v1";

pub fn identity() -> GroupPoint {
    GroupPoint::identity()
}

/// Uniformly random scalar. Uses a 512-bit wide reduction so the bias is
/// negligible.
pub fn random_scalar<R: RngCore + CryptoRng>(rng: &mut R) -> GroupScalar {
    let mut wide = [0u8; 64];
    rng.fill_bytes(&mut wide);
    GroupScalar::from_bytes_mod_order_wide(&wide)
}

pub fn random_point<R: RngCore + CryptoRng>(rng: &mut R) -> GroupPoint {
    let mut wide = [0u8; 64];
    rng.fill_bytes(&mut wide);
    GroupPoint::from_uniform_bytes(&wide)
}

/// Maps a signed integer into the scalar field, `x ↦ p − |x|` for negatives.
pub fn scalar_from_i128(x: i128) -> GroupScalar {
    let magnitude = GroupScalar::from(x.unsigned_abs());
    if x < 0 {
        -magnitude
    } else {
        magnitude
    }
}

pub fn scalar_from_i64(x: i64) -> GroupScalar {
    scalar_from_i128(x as i128)
}

/// Inverse of [`scalar_from_i128`] for scalars that represent an integer in
/// `(-2^127, 2^127)`. Field elements are centred at `p/2`: anything above it
/// reads as negative. Returns `None` when the centred value does not fit.
pub fn scalar_to_i128(s: &GroupScalar) -> Option<i128> {
    let bytes = s.to_bytes();
    if let Some(v) = small_magnitude(&bytes) {
        return Some(v as i128);
    }
    let neg = (-s).to_bytes();
    small_magnitude(&neg).map(|v| -(v as i128))
}

fn small_magnitude(bytes: &[u8; 32]) -> Option<u128> {
    if bytes[16..].iter().any(|&b| b != 0) {
        return None;
    }
    let v = u128::from_le_bytes(bytes[..16].try_into().expect("16 bytes"));
    (v <= i128::MAX as u128).then_some(v)
}

/// Returns the scalar as a `u64` when its canonical value is below `2^64`.
pub fn scalar_to_u64(s: &GroupScalar) -> Option<u64> {
    let bytes = s.to_bytes();
    if bytes[8..].iter().any(|&b| b != 0) {
        return None;
    }
    Some(u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes")))
}

pub fn encode_scalar(s: &GroupScalar) -> [u8; SCALAR_BYTES] {
    s.to_bytes()
}

/// Decodes a canonical scalar; rejects encodings `>= p`.
pub fn decode_scalar(bytes: &[u8]) -> Result<GroupScalar, WireError> {
    let arr: [u8; SCALAR_BYTES] = bytes.try_into().map_err(|_| WireError::Truncated)?;
    Option::from(GroupScalar::from_canonical_bytes(arr)).ok_or(WireError::NonCanonicalScalar)
}

pub fn encode_point(p: &GroupPoint) -> [u8; POINT_BYTES] {
    p.compress().to_bytes()
}

/// Decodes a compressed point; rejects anything that is not the canonical
/// encoding of a group element.
pub fn decode_point(bytes: &[u8]) -> Result<GroupPoint, WireError> {
    let compressed = CompressedRistretto::from_slice(bytes).map_err(|_| WireError::Truncated)?;
    compressed.decompress().ok_or(WireError::InvalidPoint)
}

/// `Σ scalars[i] · points[i]` (the multi-exponentiation `Π points[i]^scalars[i]`).
pub fn multiexp(points: &[GroupPoint], scalars: &[GroupScalar]) -> Result<GroupPoint, Error> {
    if points.len() != scalars.len() {
        return Err(Error::InvalidParameter(format!(
            "multiexp length mismatch: {} points, {} scalars",
            points.len(),
            scalars.len()
        )));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("multiexp over an empty list".into()));
    }
    Ok(GroupPoint::vartime_multiscalar_mul(scalars, points))
}

/// Hash-to-group used for every public generator: SHAKE256 over
/// `domain ∥ len(label) ∥ label ∥ index`, 64 output bytes fed to the
/// ristretto uniform map.
pub fn hash_to_point(label: &[u8], index: u64) -> GroupPoint {
    let mut hasher = Shake256::default();
    hasher.update(GENERATOR_DOMAIN);
    hasher.update(&(label.len() as u64).to_le_bytes());
    hasher.update(label);
    hasher.update(&index.to_le_bytes());
    let mut wide = [0u8; 64];
    hasher.finalize_xof().read(&mut wide);
    GroupPoint::from_uniform_bytes(&wide)
}

/// Selects one of the public generator vectors (or a single generator
/// viewed as a length-one basis).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `g⃗`.
    G,
    /// `h⃗`.
    H,
    /// `g⃗` rotated right by one: `[g_n, g_1, …, g_{n−1}]`.
    GIter,
    /// The value generator `g` alone.
    Value,
    /// `Π g_i`.
    GProduct,
    /// `Π h_i`.
    HProduct,
}

impl Basis {
    /// Transcript tag for the basis.
    pub fn tag(self) -> &'static [u8] {
        match self {
            Basis::G => b"basis.g",
            Basis::H => b"basis.h",
            Basis::GIter => b"basis.g-iter",
            Basis::Value => b"basis.value",
            Basis::GProduct => b"basis.g-prod",
            Basis::HProduct => b"basis.h-prod",
        }
    }
}

/// Public generators `(g, h, g⃗, h⃗)` plus the per-bit generators used by
/// range proofs.
///
/// Indices `0` and `1` of the label's hash-to-group stream are `g` and `h`,
/// then `n` entries of `g⃗`, then `n` entries of `h⃗`. The range-proof
/// generators come from a separate label (`label ∥ "/range"`) so they never
/// overlap with the vector generators.
#[derive(Clone, Debug)]
pub struct CommitParams {
    label: Vec<u8>,
    pub g: GroupPoint,
    pub h: GroupPoint,
    pub gvec: Vec<GroupPoint>,
    pub hvec: Vec<GroupPoint>,
    pub(crate) range_g: Vec<GroupPoint>,
    pub(crate) range_h: Vec<GroupPoint>,
}

/// Largest bit length supported by range proofs.
pub const MAX_RANGE_BITS: usize = 64;

impl CommitParams {
    /// Derives the generator set for `n`-entry vectors from `label`.
    pub fn derive(label: &[u8], n: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidParameter("vector length must be at least 1".into()));
        }
        if label.is_empty() {
            return Err(Error::InvalidParameter("generator label must not be empty".into()));
        }
        let at = |i: usize| hash_to_point(label, i as u64);
        let mut range_label = label.to_vec();
        range_label.extend_from_slice(b"/range");
        let range_at = |i: usize| hash_to_point(&range_label, i as u64);
        Ok(CommitParams {
            label: label.to_vec(),
            g: at(0),
            h: at(1),
            gvec: (0..n).map(|i| at(2 + i)).collect(),
            hvec: (0..n).map(|i| at(2 + n + i)).collect(),
            range_g: (0..MAX_RANGE_BITS).map(range_at).collect(),
            range_h: (0..MAX_RANGE_BITS).map(|i| range_at(MAX_RANGE_BITS + i)).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.gvec.len()
    }

    pub fn label(&self) -> &[u8] {
        &self.label
    }

    /// Generator points making up `basis`.
    pub fn basis(&self, basis: Basis) -> Vec<GroupPoint> {
        match basis {
            Basis::G => self.gvec.clone(),
            Basis::H => self.hvec.clone(),
            Basis::GIter => {
                let mut rotated = self.gvec.clone();
                rotated.rotate_right(1);
                rotated
            }
            Basis::Value => vec![self.g],
            Basis::GProduct => vec![self.gvec.iter().sum()],
            Basis::HProduct => vec![self.hvec.iter().sum()],
        }
    }

    /// Byte encoding of `g, h, g⃗, h⃗` in that order.
    pub fn to_bytes(&self) -> Vec<u8> {
        std::iter::once(&self.g)
            .chain(std::iter::once(&self.h))
            .chain(self.gvec.iter())
            .chain(self.hvec.iter())
            .flat_map(encode_point)
            .collect()
    }
}

/// Derives public generators; see [`CommitParams::derive`].
pub fn derive_params(label: &[u8], n: usize) -> Result<CommitParams, Error> {
    CommitParams::derive(label, n)
}

/// `⟨a, b⟩` over the scalar field.
pub fn inner_product(a: &[GroupScalar], b: &[GroupScalar]) -> GroupScalar {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `[1, x, x², …, x^{n−1}]`.
pub fn powers(x: GroupScalar, n: usize) -> Vec<GroupScalar> {
    let mut out = Vec::with_capacity(n);
    let mut acc = GroupScalar::ONE;
    for _ in 0..n {
        out.push(acc);
        acc *= x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;

    fn naive_multiexp(points: &[GroupPoint], scalars: &[GroupScalar]) -> GroupPoint {
        points.iter().zip(scalars).fold(identity(), |acc, (p, s)| acc + s * p)
    }

    #[test]
    fn params_have_distinct_nonidentity_generators() {
        let params = derive_params(b"zksvm-v1", 4).unwrap();
        let mut all = vec![params.g, params.h];
        all.extend(params.gvec.iter().copied());
        all.extend(params.hvec.iter().copied());
        assert_eq!(all.len(), 10);
        let encoded: HashSet<_> = all.iter().map(encode_point).collect();
        assert_eq!(encoded.len(), 10);
        assert!(all.iter().all(|p| *p != identity()));
    }

    #[test]
    fn params_are_deterministic() {
        let a = derive_params(b"zksvm-v1", 4).unwrap();
        let b = derive_params(b"zksvm-v1", 4).unwrap();
        assert_eq!(a.to_bytes(), b.to_bytes());
    }

    #[test]
    fn different_labels_share_no_generator() {
        let a = derive_params(b"A", 2).unwrap();
        let b = derive_params(b"B", 2).unwrap();
        let set_a: HashSet<_> = a.to_bytes().chunks(32).map(|c| c.to_vec()).collect();
        for chunk in b.to_bytes().chunks(32) {
            assert!(!set_a.contains(chunk));
        }
    }

    #[test]
    fn zero_length_rejected() {
        assert!(matches!(derive_params(b"x", 0), Err(Error::InvalidParameter(_))));
        assert!(matches!(derive_params(b"", 3), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn multiexp_small_cases() {
        let params = derive_params(b"zksvm-v1", 1).unwrap();
        let g = params.g;
        assert_eq!(multiexp(&[g], &[GroupScalar::ZERO]).unwrap(), identity());
        assert_eq!(
            multiexp(&[g, g], &[GroupScalar::ONE, GroupScalar::ONE]).unwrap(),
            g + g
        );
        assert!(multiexp(&[g], &[]).is_err());
        assert!(multiexp(&[], &[]).is_err());
    }

    #[test]
    fn multiexp_matches_naive_fold() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for len in 1..=64 {
            let points: Vec<_> = (0..len).map(|_| random_point(&mut rng)).collect();
            let scalars: Vec<_> = (0..len).map(|_| random_scalar(&mut rng)).collect();
            assert_eq!(multiexp(&points, &scalars).unwrap(), naive_multiexp(&points, &scalars));
        }
    }

    #[test]
    fn iterated_basis_is_rotation() {
        let params = derive_params(b"zksvm-v1", 4).unwrap();
        let iter = params.basis(Basis::GIter);
        assert_eq!(iter[0], params.gvec[3]);
        assert_eq!(&iter[1..], &params.gvec[..3]);
    }

    #[test]
    fn point_decoding_rejects_flipped_bytes() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..16 {
            let p = random_point(&mut rng);
            let enc = encode_point(&p);
            assert_eq!(decode_point(&enc).unwrap(), p);
            let rejected = (0..32).any(|i| {
                let mut bad = enc;
                bad[i] ^= 0x01;
                decode_point(&bad).is_err()
            });
            assert!(rejected);
        }
    }

    #[test]
    fn scalar_decoding_rejects_noncanonical() {
        assert_eq!(decode_scalar(&[0xff; 32]), Err(WireError::NonCanonicalScalar));
        assert_eq!(decode_scalar(&[0u8; 31]), Err(WireError::Truncated));
    }

    #[test]
    fn signed_mapping_round_trips() {
        for x in [0i128, 1, -1, 50, -50, i64::MAX as i128, -(1i128 << 100)] {
            assert_eq!(scalar_to_i128(&scalar_from_i128(x)), Some(x));
        }
        assert_eq!(scalar_from_i128(-3), GroupScalar::ZERO - GroupScalar::from(3u8));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn scalar() -> impl Strategy<Value = GroupScalar> {
            any::<[u8; 32]>().prop_map(|b| GroupScalar::from_bytes_mod_order(b))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn exponent_laws(a in scalar(), b in scalar()) {
                let g = derive_params(b"props", 1).unwrap().g;
                prop_assert_eq!(b * (a * g), (a * b) * g);
                prop_assert_eq!(a * g + b * g, (a + b) * g);
            }

            #[test]
            fn scalar_encoding_round_trips(s in scalar()) {
                prop_assert_eq!(decode_scalar(&encode_scalar(&s)).unwrap(), s);
            }

            #[test]
            fn field_identities(a in scalar()) {
                prop_assert_eq!(a + GroupScalar::ZERO, a);
                prop_assert_eq!(a * GroupScalar::ONE, a);
                if a != GroupScalar::ZERO {
                    prop_assert_eq!(a * a.invert(), GroupScalar::ONE);
                }
            }
        }
    }
}
