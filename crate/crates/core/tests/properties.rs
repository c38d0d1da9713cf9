use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use zksvm::group::{random_scalar, scalar_from_i128};
use zksvm::ipzkp::{ip_prove, ip_verify, IpVariant, IpWitness};
use zksvm::pedersen::{commit_scalar, commit_vector_random};
use zksvm::range::{prove_range, verify_range};
use zksvm::sigma::{prove_equality, prove_opening, prove_zero_replace, verify_equality, verify_opening, verify_zero_replace};
use zksvm::sqrt::{isqrt, prove_sqrt, verify_sqrt};
use zksvm::zksvm::scaled_variance;
use zksvm::{Basis, CommitParams, GroupScalar, Transcript};

fn t() -> Transcript {
    Transcript::new(b"properties")
}

fn params(n: usize) -> CommitParams {
    CommitParams::derive(b"properties", n).unwrap()
}

fn scalars(values: &[i64]) -> Vec<GroupScalar> {
    values.iter().map(|v| scalar_from_i128(*v as i128)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn commitments_are_additively_homomorphic(a in any::<i64>(), b in any::<i64>(), seed in any::<u64>()) {
        let p = params(1);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (r1, r2) = (random_scalar(&mut rng), random_scalar(&mut rng));
        let ca = commit_scalar(&p, scalar_from_i128(a as i128), r1).commitment;
        let cb = commit_scalar(&p, scalar_from_i128(b as i128), r2).commitment;
        let sum = commit_scalar(&p, scalar_from_i128(a as i128 + b as i128), r1 + r2).commitment;
        prop_assert_eq!(ca * cb, sum);
    }

    #[test]
    fn ip_proofs_verify_and_bind_the_value(k in 0usize..5, seed in any::<u64>(), log in any::<bool>()) {
        let n = 1 << k;
        let p = params(n);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let a: Vec<_> = (0..n).map(|_| random_scalar(&mut rng)).collect();
        let b: Vec<_> = (0..n).map(|_| random_scalar(&mut rng)).collect();
        let wit = IpWitness::new(a, b, random_scalar(&mut rng), random_scalar(&mut rng));
        let mut stmt = wit.statement(&p).unwrap();
        let variant = if log { IpVariant::Logarithmic } else { IpVariant::Linear };
        let proof = ip_prove(&p, &stmt, &wit, variant, &mut t(), &mut rng).unwrap();
        prop_assert!(ip_verify(&p, &stmt, &proof, &mut t()));
        stmt.value += p.g;
        prop_assert!(!ip_verify(&p, &stmt, &proof, &mut t()));
    }

    #[test]
    fn opening_and_equality_complete(values in prop::collection::vec(any::<i64>(), 4), seed in any::<u64>()) {
        let p = params(4);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let c = commit_vector_random(&p, Basis::G, scalars(&values), &mut rng).unwrap();
        let op = prove_opening(&p, &c, &mut t(), &mut rng).unwrap();
        prop_assert!(verify_opening(&p, Basis::G, &c.commitment, &op, &mut t()));
        prop_assert!(!verify_opening(&p, Basis::H, &c.commitment, &op, &mut t()));

        let c2 = commit_vector_random(&p, Basis::H, scalars(&values), &mut rng).unwrap();
        let eq = prove_equality(&p, &c, &c2, &mut t(), &mut rng).unwrap();
        prop_assert!(verify_equality(&p, Basis::G, &c.commitment, Basis::H, &c2.commitment, &eq, &mut t()));
        prop_assert!(!verify_equality(&p, Basis::G, &c2.commitment, Basis::H, &c.commitment, &eq, &mut t()));
    }

    #[test]
    fn zero_replacement_complete(values in prop::collection::vec(any::<i64>(), 4), j in 0usize..4, seed in any::<u64>()) {
        let p = params(4);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let c = commit_vector_random(&p, Basis::G, scalars(&values), &mut rng).unwrap();
        let (diff, proof) = prove_zero_replace(&p, &c, j, random_scalar(&mut rng), &mut t(), &mut rng).unwrap();
        prop_assert_eq!(diff.values[j], GroupScalar::ZERO);
        prop_assert!(verify_zero_replace(&p, Basis::G, &c.commitment, &diff.commitment, j, &proof, &mut t()));
        prop_assert!(!verify_zero_replace(&p, Basis::G, &c.commitment, &diff.commitment, (j + 1) % 4, &proof, &mut t()));
    }

    #[test]
    fn range_accepts_inside_and_refuses_outside(m in any::<u32>(), seed in any::<u64>()) {
        let p = params(1);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let bits = 16;
        let v = commit_scalar(&p, GroupScalar::from(m as u64), random_scalar(&mut rng));
        let result = prove_range(&p, &v, bits, &mut t(), &mut rng);
        if (m as u64) < 1 << bits {
            let proof = result.unwrap();
            prop_assert!(verify_range(&p, &v.commitment, bits, &proof, &mut t()));
        } else {
            prop_assert!(result.is_err());
        }
    }

    #[test]
    fn sqrt_proves_only_the_floor(value in any::<u64>(), seed in any::<u64>()) {
        let p = params(1);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let root = isqrt(value as u128) as u64;
        prop_assert!((root as u128).pow(2) <= value as u128 && (root as u128 + 1).pow(2) > value as u128);
        let v = commit_scalar(&p, GroupScalar::from(value), random_scalar(&mut rng));
        let r = commit_scalar(&p, GroupScalar::from(root), random_scalar(&mut rng));
        let proof = prove_sqrt(&p, &r, &v, 64, &mut t(), &mut rng).unwrap();
        prop_assert!(verify_sqrt(&p, &r.commitment, &v.commitment, 64, &proof, &mut t()));
        let wrong = commit_scalar(&p, GroupScalar::from(root + 1), random_scalar(&mut rng));
        prop_assert!(prove_sqrt(&p, &wrong, &v, 64, &mut t(), &mut rng).is_err());
        prop_assert!(!verify_sqrt(&p, &wrong.commitment, &v.commitment, 64, &proof, &mut t()));
    }

    #[test]
    fn scaled_variance_matches_two_pass(values in prop::collection::vec(0i128..(1 << 20), 1..64)) {
        let n = values.len() as i128;
        let total: i128 = values.iter().sum();
        let mean_free: i128 = values.iter().map(|v| (n * v - total).pow(2)).sum();
        let centred = n * values.iter().map(|v| v * v).sum::<i128>() * n - total * total * n;
        prop_assert_eq!(mean_free, centred);
        prop_assert_eq!(scaled_variance(&values, total).unwrap() as i128, mean_free);
    }
}
