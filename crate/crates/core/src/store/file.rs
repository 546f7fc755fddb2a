//! Single-directory JSON store.
//!
//! Layout: `<dir>/profiles/<token>.json` holds `{"key","version","profile"}`
//! for one player, `<dir>/tokens.idx` lists issued tokens one per line.
//! Each write goes to a temp file that is fsynced and renamed over the
//! document, so a crash leaves either the old or the new version on disk.
//! A write is acknowledged only after the rename and directory fsync.

use std::collections::{HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{PlayerToken, ProfileStore, StoreError, StoredProfile};
use crate::scoring::PlayerProfile;

pub const DATA_DIR_ENV: &str = "FOODCAL_DATA_DIR";

#[derive(Serialize, Deserialize)]
struct Document {
    key: PlayerToken,
    version: u64,
    profile: PlayerProfile,
}

#[derive(Debug)]
pub struct FileStore {
    root: PathBuf,
    known: Mutex<HashSet<String>>,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl FileStore {
    /// Opens (creating if needed) a store rooted at `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<FileStore, StoreError> {
        let root = root.into();
        fs::create_dir_all(root.join("profiles"))?;

        let mut known = HashSet::new();
        let index = root.join("tokens.idx");
        if index.exists() {
            for line in BufReader::new(File::open(&index)?).lines() {
                let line = line?;
                if let Some(t) = PlayerToken::parse(line.trim()) {
                    known.insert(t.as_str().to_string());
                }
            }
        }
        // A crash between document write and index append leaves a document
        // without an index line; the document is authoritative.
        for entry in fs::read_dir(root.join("profiles"))? {
            let name = entry?.file_name();
            let name = name.to_string_lossy();
            if let Some(t) = name.strip_suffix(".json").and_then(PlayerToken::parse) {
                known.insert(t.as_str().to_string());
            }
        }

        Ok(FileStore {
            root,
            known: Mutex::new(known),
            locks: Mutex::new(HashMap::new()),
        })
    }

    /// Opens the store at `$FOODCAL_DATA_DIR`, or `./data` when unset.
    pub fn from_env() -> Result<FileStore, StoreError> {
        let dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| "data".into());
        FileStore::open(dir)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn doc_path(&self, token: &PlayerToken) -> PathBuf {
        self.root.join("profiles").join(format!("{}.json", token.as_str()))
    }

    fn key_lock(&self, token: &PlayerToken) -> Result<Arc<Mutex<()>>, StoreError> {
        let mut locks = self.locks.lock().map_err(|_| poisoned())?;
        Ok(locks.entry(token.as_str().to_string()).or_default().clone())
    }

    fn is_known(&self, token: &PlayerToken) -> Result<bool, StoreError> {
        Ok(self.known.lock().map_err(|_| poisoned())?.contains(token.as_str()))
    }

    fn read_doc(&self, token: &PlayerToken) -> Result<Document, StoreError> {
        if !self.is_known(token)? {
            return Err(StoreError::UnknownToken);
        }
        let text = match fs::read_to_string(self.doc_path(token)) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(StoreError::UnknownToken),
            Err(e) => return Err(e.into()),
        };
        let doc: Document = serde_json::from_str(&text)
            .map_err(|e| StoreError::StorageUnavailable(format!("corrupt document: {e}")))?;
        if !doc.key.ct_eq(token) {
            return Err(StoreError::UnknownToken);
        }
        Ok(doc)
    }

    fn write_doc(&self, doc: &Document) -> Result<(), StoreError> {
        let path = self.doc_path(&doc.key);
        let tmp = path.with_extension(format!("json.tmp{}", doc.version));
        {
            let mut f = File::create(&tmp)?;
            serde_json::to_writer(&mut f, doc).map_err(|e| StoreError::StorageUnavailable(e.to_string()))?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        sync_dir(&self.root.join("profiles"))?;
        Ok(())
    }

    fn append_index(&self, token: &PlayerToken) -> Result<(), StoreError> {
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.root.join("tokens.idx"))?;
        writeln!(f, "{}", token.as_str())?;
        f.sync_data()?;
        Ok(())
    }
}

fn poisoned() -> StoreError {
    StoreError::StorageUnavailable("store lock poisoned".into())
}

#[cfg(unix)]
fn sync_dir(dir: &Path) -> std::io::Result<()> {
    File::open(dir)?.sync_all()
}

#[cfg(not(unix))]
fn sync_dir(_dir: &Path) -> std::io::Result<()> {
    Ok(())
}

impl ProfileStore for FileStore {
    fn create_anonymous_player(&self) -> Result<PlayerToken, StoreError> {
        let token = {
            let mut known = self.known.lock().map_err(|_| poisoned())?;
            loop {
                let t = PlayerToken::generate()?;
                if known.insert(t.as_str().to_string()) {
                    break t;
                }
            }
        };
        let doc = Document {
            key: token.clone(),
            version: 0,
            profile: PlayerProfile::new(token.as_str()),
        };
        let written = self.write_doc(&doc).and_then(|_| self.append_index(&token));
        if let Err(e) = written {
            let _ = fs::remove_file(self.doc_path(&token));
            self.known.lock().map_err(|_| poisoned())?.remove(token.as_str());
            return Err(e);
        }
        Ok(token)
    }

    fn get_profile(&self, token: &PlayerToken) -> Result<StoredProfile, StoreError> {
        let lock = self.key_lock(token)?;
        let _guard = lock.lock().map_err(|_| poisoned())?;
        let doc = self.read_doc(token)?;
        Ok(StoredProfile {
            version: doc.version,
            profile: doc.profile,
        })
    }

    fn put_profile(
        &self,
        token: &PlayerToken,
        profile: &PlayerProfile,
        expected_version: u64,
    ) -> Result<u64, StoreError> {
        let lock = self.key_lock(token)?;
        let _guard = lock.lock().map_err(|_| poisoned())?;
        let current = self.read_doc(token)?;
        if current.version != expected_version {
            return Err(StoreError::VersionConflict {
                expected: expected_version,
                actual: current.version,
            });
        }
        let doc = Document {
            key: current.key,
            version: current.version + 1,
            profile: profile.clone(),
        };
        self.write_doc(&doc)?;
        Ok(doc.version)
    }
}
