use std::collections::HashMap;
use std::sync::RwLock;

use super::{PlayerToken, ProfileStore, StoreError, StoredProfile};
use crate::scoring::PlayerProfile;

/// Process-local store, mainly for tests.
#[derive(Debug, Default)]
pub struct MemoryStore {
    docs: RwLock<HashMap<String, (PlayerToken, StoredProfile)>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }
}

fn poisoned<T>(_: T) -> StoreError {
    StoreError::StorageUnavailable("store lock poisoned".into())
}

impl ProfileStore for MemoryStore {
    fn create_anonymous_player(&self) -> Result<PlayerToken, StoreError> {
        let mut docs = self.docs.write().map_err(poisoned)?;
        loop {
            let token = PlayerToken::generate()?;
            if docs.contains_key(token.as_str()) {
                continue;
            }
            let doc = StoredProfile {
                version: 0,
                profile: PlayerProfile::new(token.as_str()),
            };
            docs.insert(token.as_str().to_string(), (token.clone(), doc));
            return Ok(token);
        }
    }

    fn get_profile(&self, token: &PlayerToken) -> Result<StoredProfile, StoreError> {
        let docs = self.docs.read().map_err(poisoned)?;
        match docs.get(token.as_str()) {
            Some((stored, doc)) if stored.ct_eq(token) => Ok(doc.clone()),
            _ => Err(StoreError::UnknownToken),
        }
    }

    fn put_profile(
        &self,
        token: &PlayerToken,
        profile: &PlayerProfile,
        expected_version: u64,
    ) -> Result<u64, StoreError> {
        let mut docs = self.docs.write().map_err(poisoned)?;
        let doc = match docs.get_mut(token.as_str()) {
            Some((stored, doc)) if stored.ct_eq(token) => doc,
            _ => return Err(StoreError::UnknownToken),
        };
        if doc.version != expected_version {
            return Err(StoreError::VersionConflict {
                expected: expected_version,
                actual: doc.version,
            });
        }
        doc.version += 1;
        doc.profile = profile.clone();
        Ok(doc.version)
    }
}
