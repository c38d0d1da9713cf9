//! Fiat–Shamir transcript.
//!
//! The transcript is a running SHAKE256 state. Every absorption is framed as
//!
//! ```text
//! u32-le(len(label)) ∥ label ∥ u64-le(len(data)) ∥ data
//! ```
//!
//! so no two distinct absorption sequences share a byte stream. A challenge
//! with label `L` is derived by absorbing the frame `("challenge", L)`,
//! squeezing 64 bytes from a copy of the state, reducing them mod `p`, and
//! absorbing the squeezed bytes back under the label `"challenge-output"`. A
//! zero result (probability `2^-252`) absorbs a retry counter under
//! `"challenge-retry"` and squeezes again, so challenges are always in `ℤ_p*`.
//!
//! The transcript starts with the frame `("dom-sep", protocol label)`.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::errors::Error;
use crate::group::{encode_point, encode_scalar, GroupPoint, GroupScalar};

/// Minimum length of a server-issued challenge nonce.
pub const MIN_NONCE_BYTES: usize = 16;

#[derive(Clone)]
pub struct Transcript {
    state: Shake256,
    #[cfg(feature = "test-oracles")]
    oracle: Option<oracle::ProgrammableOracle>,
}

impl std::fmt::Debug for Transcript {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transcript").finish_non_exhaustive()
    }
}

impl Transcript {
    pub fn new(protocol: &[u8]) -> Self {
        let mut t = Transcript {
            state: Shake256::default(),
            #[cfg(feature = "test-oracles")]
            oracle: None,
        };
        t.absorb(b"dom-sep", protocol);
        t
    }

    pub fn absorb(&mut self, label: &[u8], data: &[u8]) {
        self.state.update(&(label.len() as u32).to_le_bytes());
        self.state.update(label);
        self.state.update(&(data.len() as u64).to_le_bytes());
        self.state.update(data);
    }

    pub fn absorb_point(&mut self, label: &[u8], point: &GroupPoint) {
        self.absorb(label, &encode_point(point));
    }

    pub fn absorb_points(&mut self, label: &[u8], points: &[GroupPoint]) {
        let bytes: Vec<u8> = points.iter().flat_map(encode_point).collect();
        self.absorb(label, &bytes);
    }

    pub fn absorb_scalar(&mut self, label: &[u8], scalar: &GroupScalar) {
        self.absorb(label, &encode_scalar(scalar));
    }

    pub fn absorb_u64(&mut self, label: &[u8], value: u64) {
        self.absorb(label, &value.to_le_bytes());
    }

    /// Binds a server-issued nonce. Every challenge derived afterwards
    /// depends on it.
    pub fn bind_server_challenge(&mut self, nonce: &[u8]) -> Result<(), Error> {
        if nonce.len() < MIN_NONCE_BYTES {
            return Err(Error::InvalidParameter(format!(
                "server challenge must be at least {MIN_NONCE_BYTES} bytes, got {}",
                nonce.len()
            )));
        }
        self.absorb(b"server-challenge", nonce);
        Ok(())
    }

    /// Independent copy for a sub-protocol, separated by `label`.
    pub fn fork(&self, label: &[u8]) -> Transcript {
        let mut t = self.clone();
        t.absorb(b"fork", label);
        t
    }

    pub fn fork_indexed(&self, label: &[u8], index: u64) -> Transcript {
        let mut t = self.fork(label);
        t.absorb_u64(b"fork-index", index);
        t
    }

    /// Derives a nonzero challenge scalar and advances the state.
    pub fn challenge_scalar(&mut self, label: &[u8]) -> GroupScalar {
        self.absorb(b"challenge", label);
        #[cfg(feature = "test-oracles")]
        if let Some(c) = self.programmed_challenge() {
            self.absorb(b"challenge-output", &encode_scalar(&c));
            return c;
        }
        let mut retry = 0u32;
        loop {
            let mut wide = [0u8; 64];
            self.state.clone().finalize_xof().read(&mut wide);
            self.absorb(b"challenge-output", &wide);
            let c = GroupScalar::from_bytes_mod_order_wide(&wide);
            if c != GroupScalar::ZERO {
                return c;
            }
            retry += 1;
            self.absorb(b"challenge-retry", &retry.to_le_bytes());
        }
    }

    /// 32-byte digest of the current state, without advancing it.
    pub fn state_digest(&self) -> [u8; 32] {
        let mut st = self.state.clone();
        st.update(b"state-digest");
        let mut out = [0u8; 32];
        st.finalize_xof().read(&mut out);
        out
    }
}

#[cfg(feature = "test-oracles")]
pub mod oracle {
    //! Random-oracle programming for simulators.
    //!
    //! A [`ProgrammableOracle`] maps transcript states (just before a
    //! challenge is squeezed) to chosen challenges. Prover- and
    //! verifier-side transcripts sharing the same oracle both see the
    //! programmed value, which is how SHVZK simulators are turned into
    //! accepting non-interactive proofs.

    use std::collections::HashMap;
    use std::sync::{Arc, Mutex};

    use super::Transcript;
    use crate::group::GroupScalar;

    #[derive(Clone, Default)]
    pub struct ProgrammableOracle {
        table: Arc<Mutex<HashMap<[u8; 32], GroupScalar>>>,
    }

    impl ProgrammableOracle {
        pub fn new() -> Self {
            Self::default()
        }

        pub fn len(&self) -> usize {
            self.table.lock().expect("oracle lock").len()
        }

        pub fn is_empty(&self) -> bool {
            self.len() == 0
        }
    }

    impl Transcript {
        pub fn with_oracle(protocol: &[u8], oracle: ProgrammableOracle) -> Self {
            let mut t = Transcript::new(protocol);
            t.oracle = Some(oracle);
            t
        }

        /// Fixes the next challenge squeezed under `label` from the current
        /// state to `value`. Requires an attached oracle.
        pub fn program_challenge(&self, label: &[u8], value: GroupScalar) {
            let oracle = self.oracle.as_ref().expect("transcript has no programmable oracle");
            let mut probe = self.clone();
            probe.oracle = None;
            probe.absorb(b"challenge", label);
            oracle.table.lock().expect("oracle lock").insert(probe.state_digest(), value);
        }

        pub(super) fn programmed_challenge(&self) -> Option<GroupScalar> {
            let oracle = self.oracle.as_ref()?;
            let key = self.state_digest();
            oracle.table.lock().expect("oracle lock").get(&key).copied()
        }
    }
}
