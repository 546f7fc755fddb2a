//! Player identity and profile persistence.
//!
//! A player is identified by an anonymous 128-bit token issued on first run.
//! Profiles are versioned documents; writes are compare-and-set on the
//! version so concurrent updates to one player never silently overwrite
//! each other.

mod file;
mod memory;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scoring::PlayerProfile;

pub use file::{FileStore, DATA_DIR_ENV};
pub use memory::MemoryStore;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PlayerToken(String);

impl PlayerToken {
    /// Fresh token from the OS CSPRNG.
    pub fn generate() -> Result<PlayerToken, StoreError> {
        let mut bytes = [0u8; 16];
        getrandom::fill(&mut bytes).map_err(|e| StoreError::StorageUnavailable(format!("entropy source: {e}")))?;
        let hex: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
        Ok(PlayerToken(hex))
    }

    /// Accepts exactly 32 lowercase hex characters.
    pub fn parse(s: &str) -> Option<PlayerToken> {
        let ok = s.len() == 32 && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b));
        ok.then(|| PlayerToken(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Comparison whose running time does not depend on where tokens differ.
    pub fn ct_eq(&self, other: &PlayerToken) -> bool {
        let (a, b) = (self.0.as_bytes(), other.0.as_bytes());
        if a.len() != b.len() {
            return false;
        }
        a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
    }
}

impl fmt::Display for PlayerToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for PlayerToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlayerToken({}…)", &self.0[..6])
    }
}

impl TryFrom<String> for PlayerToken {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        PlayerToken::parse(&s).ok_or_else(|| "token must be 32 lowercase hex characters".to_string())
    }
}

impl From<PlayerToken> for String {
    fn from(t: PlayerToken) -> String {
        t.0
    }
}

/// A profile together with its optimistic-concurrency version.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredProfile {
    pub version: u64,
    pub profile: PlayerProfile,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StoreError {
    #[error("unknown player token")]
    UnknownToken,
    #[error("version conflict: expected {expected}, stored {actual}")]
    VersionConflict { expected: u64, actual: u64 },
    #[error("storage unavailable: {0}")]
    StorageUnavailable(String),
}

impl From<std::io::Error> for StoreError {
    fn from(e: std::io::Error) -> Self {
        StoreError::StorageUnavailable(e.to_string())
    }
}

pub trait ProfileStore: Send + Sync {
    /// Issues a new token and persists an empty profile at version 0.
    fn create_anonymous_player(&self) -> Result<PlayerToken, StoreError>;

    fn get_profile(&self, token: &PlayerToken) -> Result<StoredProfile, StoreError>;

    /// Writes iff the stored version equals `expected_version`; returns the new version.
    fn put_profile(
        &self,
        token: &PlayerToken,
        profile: &PlayerProfile,
        expected_version: u64,
    ) -> Result<u64, StoreError>;
}

/// Read-modify-write with CAS, retrying up to `retries` times on conflict.
pub fn update_profile<T, E>(
    store: &dyn ProfileStore,
    token: &PlayerToken,
    retries: u32,
    mut apply: impl FnMut(&PlayerProfile) -> Result<(T, PlayerProfile), E>,
) -> Result<Result<(T, StoredProfile), E>, StoreError> {
    let mut attempt = 0;
    loop {
        let current = store.get_profile(token)?;
        let (value, updated) = match apply(&current.profile) {
            Ok(v) => v,
            Err(e) => return Ok(Err(e)),
        };
        match store.put_profile(token, &updated, current.version) {
            Ok(version) => {
                return Ok(Ok((
                    value,
                    StoredProfile {
                        version,
                        profile: updated,
                    },
                )))
            }
            Err(StoreError::VersionConflict { .. }) if attempt < retries => attempt += 1,
            Err(e) => return Err(e),
        }
    }
}
