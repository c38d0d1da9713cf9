//! Pedersen scalar and vector commitments.
//!
//! `Commitment` is what a verifier sees. The opened forms keep the message
//! and blinding next to the point and only exist on the prover side.

use std::ops::{Div, Mul};

use rand_core::{CryptoRng, RngCore};

use crate::errors::Error;
use crate::group::{identity, multiexp, random_scalar, Basis, CommitParams, GroupPoint, GroupScalar};

/// A commitment as seen by the verifier. Products and quotients follow the
/// multiplicative notation of the protocol; internally they are point
/// addition and subtraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Commitment(pub GroupPoint);

impl Commitment {
    pub fn identity() -> Self {
        Commitment(identity())
    }

    pub fn point(&self) -> &GroupPoint {
        &self.0
    }

    /// `C^e`.
    pub fn pow(&self, e: &GroupScalar) -> Commitment {
        Commitment(e * self.0)
    }
}

impl Mul for Commitment {
    type Output = Commitment;
    fn mul(self, rhs: Commitment) -> Commitment {
        Commitment(self.0 + rhs.0)
    }
}

impl Div for Commitment {
    type Output = Commitment;
    fn div(self, rhs: Commitment) -> Commitment {
        Commitment(self.0 - rhs.0)
    }
}

/// Scalar commitment `g^m · h^r` with its opening.
#[derive(Clone, Debug)]
pub struct ScalarCommitment {
    pub commitment: Commitment,
    pub value: GroupScalar,
    pub blinding: GroupScalar,
}

/// Vector commitment `Π basis_i^{m_i} · h^r` with its opening.
#[derive(Clone, Debug)]
pub struct VectorCommitment {
    pub commitment: Commitment,
    pub basis: Basis,
    pub values: Vec<GroupScalar>,
    pub blinding: GroupScalar,
}

pub fn commit_scalar(params: &CommitParams, m: GroupScalar, r: GroupScalar) -> ScalarCommitment {
    ScalarCommitment {
        commitment: Commitment(m * params.g + r * params.h),
        value: m,
        blinding: r,
    }
}

pub fn commit_scalar_random<R: RngCore + CryptoRng>(
    params: &CommitParams,
    m: GroupScalar,
    rng: &mut R,
) -> ScalarCommitment {
    commit_scalar(params, m, random_scalar(rng))
}

fn vector_point(
    bases: &[GroupPoint],
    h: &GroupPoint,
    values: &[GroupScalar],
    r: &GroupScalar,
) -> Result<GroupPoint, Error> {
    if bases.len() != values.len() {
        return Err(Error::InvalidParameter(format!(
            "vector of length {} committed under a basis of length {}",
            values.len(),
            bases.len()
        )));
    }
    Ok(multiexp(bases, values)? + r * h)
}

pub fn commit_vector(
    params: &CommitParams,
    basis: Basis,
    values: Vec<GroupScalar>,
    r: GroupScalar,
) -> Result<VectorCommitment, Error> {
    let point = vector_point(&params.basis(basis), &params.h, &values, &r)?;
    Ok(VectorCommitment {
        commitment: Commitment(point),
        basis,
        values,
        blinding: r,
    })
}

pub fn commit_vector_random<R: RngCore + CryptoRng>(
    params: &CommitParams,
    basis: Basis,
    values: Vec<GroupScalar>,
    rng: &mut R,
) -> Result<VectorCommitment, Error> {
    commit_vector(params, basis, values, random_scalar(rng))
}

/// `Open(C, m, r)` for a scalar commitment.
pub fn open_scalar(params: &CommitParams, c: &Commitment, m: &GroupScalar, r: &GroupScalar) -> bool {
    c.0 == m * params.g + r * params.h
}

/// `Open(C, m⃗, r)` for a vector commitment under `basis`.
pub fn open_vector(
    params: &CommitParams,
    basis: Basis,
    c: &Commitment,
    values: &[GroupScalar],
    r: &GroupScalar,
) -> bool {
    matches!(vector_point(&params.basis(basis), &params.h, values, r), Ok(p) if p == c.0)
}

impl ScalarCommitment {
    pub fn open_check(&self, params: &CommitParams) -> bool {
        open_scalar(params, &self.commitment, &self.value, &self.blinding)
    }
}

impl VectorCommitment {
    pub fn open_check(&self, params: &CommitParams) -> bool {
        open_vector(params, self.basis, &self.commitment, &self.values, &self.blinding)
    }

    /// Entry-wise quotient `self / other` with the matching opening. Both
    /// must use the same basis.
    pub fn divide(&self, other: &VectorCommitment) -> Result<VectorCommitment, Error> {
        if self.basis != other.basis || self.values.len() != other.values.len() {
            return Err(Error::InvalidParameter("commitments use different bases".into()));
        }
        Ok(VectorCommitment {
            commitment: self.commitment / other.commitment,
            basis: self.basis,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
            blinding: self.blinding - other.blinding,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{derive_params, random_scalar};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn scalars(xs: &[i64]) -> Vec<GroupScalar> {
        xs.iter().map(|&x| crate::group::scalar_from_i64(x)).collect()
    }

    #[test]
    fn zero_commitments_are_identity() {
        let params = derive_params(b"ped", 3).unwrap();
        let c = commit_scalar(&params, GroupScalar::ZERO, GroupScalar::ZERO);
        assert_eq!(c.commitment, Commitment::identity());
        let v = commit_vector(&params, Basis::G, scalars(&[0, 0, 0]), GroupScalar::ZERO).unwrap();
        assert_eq!(v.commitment, Commitment::identity());
    }

    #[test]
    fn scalar_commitment_matches_naive_exponentiation() {
        let params = derive_params(b"ped", 1).unwrap();
        let c = commit_scalar(&params, GroupScalar::from(5u8), GroupScalar::from(7u8));
        let naive = (0..5).fold(identity(), |acc, _| acc + params.g)
            + (0..7).fold(identity(), |acc, _| acc + params.h);
        assert_eq!(c.commitment.0, naive);
    }

    #[test]
    fn scalar_homomorphism() {
        let params = derive_params(b"ped", 1).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (m1, r1, m2, r2) = (
            random_scalar(&mut rng),
            random_scalar(&mut rng),
            random_scalar(&mut rng),
            random_scalar(&mut rng),
        );
        let lhs = commit_scalar(&params, m1, r1).commitment * commit_scalar(&params, m2, r2).commitment;
        assert_eq!(lhs, commit_scalar(&params, m1 + m2, r1 + r2).commitment);
    }

    #[test]
    fn vector_commitment_matches_multiexp() {
        let params = derive_params(b"ped", 3).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for basis in [Basis::G, Basis::H, Basis::GIter] {
            let m: Vec<_> = (0..3).map(|_| random_scalar(&mut rng)).collect();
            let r = random_scalar(&mut rng);
            let c = commit_vector(&params, basis, m.clone(), r).unwrap();
            let mut pts = params.basis(basis);
            pts.push(params.h);
            let mut exps = m;
            exps.push(r);
            assert_eq!(c.commitment.0, multiexp(&pts, &exps).unwrap());
        }
    }

    #[test]
    fn vector_length_mismatch() {
        let params = derive_params(b"ped", 3).unwrap();
        assert!(matches!(
            commit_vector(&params, Basis::G, scalars(&[1, 2]), GroupScalar::ONE),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn opening_checks() {
        let params = derive_params(b"ped", 3).unwrap();
        let c = commit_vector(&params, Basis::G, scalars(&[3, 1, 4]), GroupScalar::from(9u8)).unwrap();
        assert!(c.open_check(&params));
        assert!(!open_vector(&params, Basis::G, &c.commitment, &c.values, &GroupScalar::from(10u8)));
        for i in 0..3 {
            let mut perturbed = c.values.clone();
            perturbed[i] += GroupScalar::ONE;
            assert!(!open_vector(&params, Basis::G, &c.commitment, &perturbed, &c.blinding));
        }
        assert!(!open_vector(&params, Basis::H, &c.commitment, &c.values, &c.blinding));
        let s = commit_scalar(&params, GroupScalar::from(2u8), GroupScalar::ONE);
        assert!(s.open_check(&params));
        assert!(!open_scalar(&params, &s.commitment, &s.value, &GroupScalar::from(2u8)));
    }

    #[test]
    fn quotient_opens_to_difference() {
        let params = derive_params(b"ped", 3).unwrap();
        let a = commit_vector(&params, Basis::G, scalars(&[3, 1, 4]), GroupScalar::from(9u8)).unwrap();
        let b = commit_vector(&params, Basis::G, scalars(&[1, 5, 9]), GroupScalar::from(2u8)).unwrap();
        let d = a.divide(&b).unwrap();
        assert_eq!(d.values, scalars(&[2, -4, -5]));
        assert!(d.open_check(&params));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn vector_homomorphism(seed in any::<u64>(), n in 1usize..8) {
                let params = derive_params(b"ped-prop", n).unwrap();
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let m1: Vec<_> = (0..n).map(|_| random_scalar(&mut rng)).collect();
                let m2: Vec<_> = (0..n).map(|_| random_scalar(&mut rng)).collect();
                let (r1, r2) = (random_scalar(&mut rng), random_scalar(&mut rng));
                let c1 = commit_vector(&params, Basis::H, m1.clone(), r1).unwrap();
                let c2 = commit_vector(&params, Basis::H, m2.clone(), r2).unwrap();
                let sum: Vec<_> = m1.iter().zip(&m2).map(|(a, b)| a + b).collect();
                let c3 = commit_vector(&params, Basis::H, sum, r1 + r2).unwrap();
                prop_assert_eq!(c1.commitment * c2.commitment, c3.commitment);
            }
        }
    }
}
