//! Single-use server challenges with expiry.

use std::collections::HashMap;
use std::time::Duration;

use rand::RngCore;
use serde::{Deserialize, Serialize};

pub const NONCE_BYTES: usize = 32;
pub const DEFAULT_TTL: Duration = Duration::from_secs(120);

/// A challenge as handed to a prover. Times are milliseconds since the Unix
/// epoch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChallengeTicket {
    /// Hex-encoded.
    pub nonce: String,
    pub issued_at_ms: u64,
    pub expires_at_ms: u64,
    pub single_use: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NonceError {
    #[error("unknown nonce")]
    Unknown,
    #[error("nonce expired")]
    Expired,
    #[error("replay: nonce already used")]
    Replay,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    expires_at_ms: u64,
    used: bool,
}

/// Issued nonces and whether each has been spent.
#[derive(Debug)]
pub struct NonceTable {
    ttl: Duration,
    entries: HashMap<[u8; NONCE_BYTES], Entry>,
}

impl NonceTable {
    pub fn new(ttl: Duration) -> Self {
        NonceTable { ttl, entries: HashMap::new() }
    }

    pub fn ttl(&self) -> Duration {
        self.ttl
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn issue<R: RngCore>(&mut self, now_ms: u64, rng: &mut R) -> ChallengeTicket {
        self.evict(now_ms);
        let mut nonce = [0u8; NONCE_BYTES];
        rng.fill_bytes(&mut nonce);
        let expires_at_ms = now_ms.saturating_add(self.ttl.as_millis() as u64);
        self.entries.insert(nonce, Entry { expires_at_ms, used: false });
        ChallengeTicket { nonce: hex::encode(nonce), issued_at_ms: now_ms, expires_at_ms, single_use: true }
    }

    /// Marks `nonce` as spent. Succeeds at most once per issued nonce.
    pub fn redeem(&mut self, nonce: &[u8], now_ms: u64) -> Result<(), NonceError> {
        let key: [u8; NONCE_BYTES] = nonce.try_into().map_err(|_| NonceError::Unknown)?;
        let entry = self.entries.get_mut(&key).ok_or(NonceError::Unknown)?;
        if entry.used {
            return Err(NonceError::Replay);
        }
        if now_ms >= entry.expires_at_ms {
            return Err(NonceError::Expired);
        }
        entry.used = true;
        Ok(())
    }

    /// Drops expired entries. Spent nonces are kept until they expire so a
    /// replay reports as such.
    pub fn evict(&mut self, now_ms: u64) {
        self.entries.retain(|_, e| now_ms < e.expires_at_ms);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn single_use_and_expiry() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let mut table = NonceTable::new(Duration::from_secs(120));
        let t = table.issue(1_000, &mut rng);
        assert_eq!(t.expires_at_ms, 121_000);
        let nonce = hex::decode(&t.nonce).unwrap();
        assert_eq!(nonce.len(), NONCE_BYTES);
        assert_eq!(table.redeem(&nonce, 2_000), Ok(()));
        assert_eq!(table.redeem(&nonce, 2_001), Err(NonceError::Replay));

        let late = hex::decode(table.issue(1_000, &mut rng).nonce).unwrap();
        assert_eq!(table.redeem(&late, 121_000), Err(NonceError::Expired));
        assert_eq!(table.redeem(&[7u8; 32], 1_000), Err(NonceError::Unknown));
        assert_eq!(table.redeem(b"short", 1_000), Err(NonceError::Unknown));

        table.evict(121_000);
        assert!(table.is_empty());
        assert_eq!(table.redeem(&nonce, 121_000), Err(NonceError::Unknown));
    }
}
