//! Logarithmic inner-product argument.
//!
//! Proves knowledge of `a⃗, b⃗` with `P = g⃗^a⃗ · h⃗^b⃗ · Q^⟨a⃗,b⃗⟩` by halving
//! the vectors each round. In round `k`, with challenge `x_k`:
//!
//! ```text
//! L = g⃗_R^{a⃗_L} h⃗_L^{b⃗_R} Q^{⟨a⃗_L, b⃗_R⟩}     R = g⃗_L^{a⃗_R} h⃗_R^{b⃗_L} Q^{⟨a⃗_R, b⃗_L⟩}
//! a⃗' = x a⃗_L + x⁻¹ a⃗_R                       b⃗' = x⁻¹ b⃗_L + x b⃗_R
//! g⃗' = g⃗_L^{x⁻¹} ∘ g⃗_R^{x}                    h⃗' = h⃗_L^{x} ∘ h⃗_R^{x⁻¹}
//! ```
//!
//! The g side folds the left half by the challenge inverse, the h side by
//! the challenge. The verifier checks everything with one multiexp.

use curve25519_dalek::traits::{IsIdentity, VartimeMultiscalarMul};

use crate::errors::Error;
use crate::group::{inner_product, GroupPoint, GroupScalar};
use crate::transcript::Transcript;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerProductArgument {
    /// `(L_k, R_k)` per halving round.
    pub rounds: Vec<(GroupPoint, GroupPoint)>,
    pub a: GroupScalar,
    pub b: GroupScalar,
}

fn fold_scalars(lo: &[GroupScalar], hi: &[GroupScalar], x_lo: GroupScalar, x_hi: GroupScalar) -> Vec<GroupScalar> {
    lo.iter().zip(hi).map(|(l, h)| x_lo * l + x_hi * h).collect()
}

fn fold_points(lo: &[GroupPoint], hi: &[GroupPoint], x_lo: GroupScalar, x_hi: GroupScalar) -> Vec<GroupPoint> {
    lo.iter()
        .zip(hi)
        .map(|(l, h)| GroupPoint::vartime_multiscalar_mul([x_lo, x_hi], [*l, *h]))
        .collect()
}

fn msm(scalars: impl IntoIterator<Item = GroupScalar>, points: impl IntoIterator<Item = GroupPoint>) -> GroupPoint {
    GroupPoint::vartime_multiscalar_mul(scalars, points)
}

/// `P = g⃗^{g_coeffs} · h⃗^{h_coeffs} · Π points_i^{scalars_i}`, checked
/// against the generators `h_i^{h_factors_i}` in place of `h_i`.
#[derive(Clone, Debug, Default)]
pub struct StatementTerms {
    pub h_factors: Option<Vec<GroupScalar>>,
    pub g_coeffs: Option<Vec<GroupScalar>>,
    pub h_coeffs: Option<Vec<GroupScalar>>,
    pub scalars: Vec<GroupScalar>,
    pub points: Vec<GroupPoint>,
}

impl InnerProductArgument {
    pub fn prove(
        t: &mut Transcript,
        q: &GroupPoint,
        mut g: Vec<GroupPoint>,
        mut h: Vec<GroupPoint>,
        mut a: Vec<GroupScalar>,
        mut b: Vec<GroupScalar>,
    ) -> Result<Self, Error> {
        let n = g.len();
        if h.len() != n || a.len() != n || b.len() != n {
            return Err(Error::InvalidParameter("inner-product argument length mismatch".into()));
        }
        if !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("length {n} is not a power of two")));
        }
        t.absorb_u64(b"ipa.n", n as u64);
        let mut rounds = Vec::with_capacity(n.trailing_zeros() as usize);
        while a.len() > 1 {
            let half = a.len() / 2;
            let (a_lo, a_hi) = a.split_at(half);
            let (b_lo, b_hi) = b.split_at(half);
            let (g_lo, g_hi) = g.split_at(half);
            let (h_lo, h_hi) = h.split_at(half);
            let c_l = inner_product(a_lo, b_hi);
            let c_r = inner_product(a_hi, b_lo);
            let l = msm(
                a_lo.iter().chain(b_hi).copied().chain([c_l]),
                g_hi.iter().chain(h_lo).copied().chain([*q]),
            );
            let r = msm(
                a_hi.iter().chain(b_lo).copied().chain([c_r]),
                g_lo.iter().chain(h_hi).copied().chain([*q]),
            );
            t.absorb_point(b"ipa.L", &l);
            t.absorb_point(b"ipa.R", &r);
            let x = t.challenge_scalar(b"ipa.x");
            let x_inv = x.invert();
            let a_next = fold_scalars(a_lo, a_hi, x, x_inv);
            let b_next = fold_scalars(b_lo, b_hi, x_inv, x);
            let g_next = fold_points(g_lo, g_hi, x_inv, x);
            let h_next = fold_points(h_lo, h_hi, x, x_inv);
            a = a_next;
            b = b_next;
            g = g_next;
            h = h_next;
            rounds.push((l, r));
        }
        Ok(InnerProductArgument { rounds, a: a[0], b: b[0] })
    }

    /// Checks the argument against `P` for generators `g⃗, h⃗` and `Q`.
    pub fn verify(
        &self,
        t: &mut Transcript,
        q: &GroupPoint,
        g: &[GroupPoint],
        h: &[GroupPoint],
        p: &GroupPoint,
    ) -> bool {
        let terms = StatementTerms { scalars: vec![GroupScalar::ONE], points: vec![*p], ..Default::default() };
        self.verify_terms(t, q, g, h, &terms)
    }

    /// [`verify`](Self::verify) with the statement `P` given as
    /// [`StatementTerms`], evaluated inside the same multiexp.
    pub fn verify_terms(
        &self,
        t: &mut Transcript,
        q: &GroupPoint,
        g: &[GroupPoint],
        h: &[GroupPoint],
        p: &StatementTerms,
    ) -> bool {
        let n = g.len();
        let fits = |v: &Option<Vec<GroupScalar>>| v.as_ref().is_none_or(|v| v.len() == n);
        if h.len() != n
            || !n.is_power_of_two()
            || self.rounds.len() != n.trailing_zeros() as usize
            || !fits(&p.h_factors)
            || !fits(&p.g_coeffs)
            || !fits(&p.h_coeffs)
            || p.scalars.len() != p.points.len()
        {
            return false;
        }
        t.absorb_u64(b"ipa.n", n as u64);
        let mut challenges = Vec::with_capacity(self.rounds.len());
        for (l, r) in &self.rounds {
            t.absorb_point(b"ipa.L", l);
            t.absorb_point(b"ipa.R", r);
            challenges.push(t.challenge_scalar(b"ipa.x"));
        }
        let mut inverses = challenges.clone();
        GroupScalar::batch_invert(&mut inverses);

        // s_i = Π_k x_k^{±1}; round k is bit (rounds−1−k) of i.
        let k = challenges.len();
        let mut s = vec![GroupScalar::ONE; n];
        for (i, si) in s.iter_mut().enumerate() {
            for j in 0..k {
                let bit = (i >> (k - 1 - j)) & 1;
                *si *= if bit == 1 { challenges[j] } else { inverses[j] };
            }
        }
        let mut s_inv = s.clone();
        GroupScalar::batch_invert(&mut s_inv);

        let mut g_scalars: Vec<_> = s.iter().map(|si| self.a * si).collect();
        let mut h_scalars: Vec<_> = s_inv.iter().map(|si| self.b * si).collect();
        if let Some(f) = &p.h_factors {
            h_scalars.iter_mut().zip(f).for_each(|(x, f)| *x *= f);
        }
        if let Some(c) = &p.g_coeffs {
            g_scalars.iter_mut().zip(c).for_each(|(x, c)| *x -= c);
        }
        if let Some(c) = &p.h_coeffs {
            h_scalars.iter_mut().zip(c).for_each(|(x, c)| *x -= c);
        }
        let ab = self.a * self.b;
        let scalars = g_scalars
            .into_iter()
            .chain(h_scalars)
            .chain([ab])
            .chain(p.scalars.iter().map(|x| -x))
            .chain(challenges.iter().map(|x| -(x * x)))
            .chain(inverses.iter().map(|x| -(x * x)));
        let points = g
            .iter()
            .chain(h)
            .copied()
            .chain([*q])
            .chain(p.points.iter().copied())
            .chain(self.rounds.iter().map(|(l, _)| *l))
            .chain(self.rounds.iter().map(|(_, r)| *r));
        msm(scalars, points).is_identity()
    }
}
