//! On-disk result cache: one JSON file per content-hash key.
//!
//! Entries record the key material they were written under and are ignored
//! on load if it does not match. Writes go to a temporary file that is then
//! renamed into place, so readers never observe a partial entry.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const CACHE_DIR_ENV: &str = "FATLAB_CACHE_DIR";

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Debug)]
pub struct DiskCache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct Entry<T> {
    material: String,
    value: T,
}

impl DiskCache {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(DiskCache { dir: dir.as_ref().to_path_buf() })
    }

    /// Cache directory named by the environment, if set.
    pub fn from_env() -> Result<Option<Self>> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(d) if !d.is_empty() => Ok(Some(Self::open(PathBuf::from(d))?)),
            _ => Ok(None),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, material: &str) -> PathBuf {
        let digest = Sha256::digest(material.as_bytes());
        self.dir.join(format!("{}.json", hex::encode(digest)))
    }

    pub fn get<T: DeserializeOwned>(&self, material: &str) -> Option<T> {
        let bytes = fs::read(self.path(material)).ok()?;
        let entry: Entry<T> = serde_json::from_slice(&bytes).ok()?;
        (entry.material == material).then_some(entry.value)
    }

    pub fn put<T: Serialize>(&self, material: &str, value: &T) -> Result<()> {
        let entry = Entry { material: material.to_string(), value };
        let bytes = serde_json::to_vec(&entry)?;
        let tmp = self.dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, self.path(material))?;
        Ok(())
    }
}
