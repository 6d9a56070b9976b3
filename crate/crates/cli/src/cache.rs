//! Versioned on-disk cache for class groups, representation tables, kernel
//! series and Brandt modules.

use std::fs;
use std::hash::Hasher;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use fnv::FnvHasher;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "GZAVG_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheKind {
    Classgroup,
    Reptable,
    Kernel,
    Brandt,
}

impl CacheKind {
    fn dir_name(self) -> &'static str {
        match self {
            CacheKind::Classgroup => "classgroup",
            CacheKind::Reptable => "reptable",
            CacheKind::Kernel => "kernel",
            CacheKind::Brandt => "brandt",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema_version: u32,
    pub kind: CacheKind,
    pub key: String,
    /// JSON text of the cached value.
    pub payload: String,
    pub checksum: u64,
}

pub fn checksum(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}

impl CacheEntry {
    pub fn new<T: Serialize>(kind: CacheKind, key: &str, value: &T) -> serde_json::Result<Self> {
        let payload = serde_json::to_string(value)?;
        Ok(CacheEntry { schema_version: SCHEMA_VERSION, kind, key: key.to_string(), checksum: checksum(payload.as_bytes()), payload })
    }

    /// The payload, if version, identity and checksum all agree.
    pub fn decode<T: DeserializeOwned>(&self, kind: CacheKind, key: &str) -> Option<T> {
        if self.schema_version != SCHEMA_VERSION || self.kind != kind || self.key != key {
            return None;
        }
        if checksum(self.payload.as_bytes()) != self.checksum {
            return None;
        }
        serde_json::from_str(&self.payload).ok()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

/// A cache rooted at a directory; without one every lookup recomputes.
#[derive(Debug, Default)]
pub struct Cache {
    root: Option<PathBuf>,
    hits: AtomicU64,
    misses: AtomicU64,
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl Cache {
    pub fn new(root: Option<PathBuf>) -> Self {
        Cache { root, ..Default::default() }
    }

    pub fn disabled() -> Self {
        Cache::default()
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats { hits: self.hits.load(Ordering::Relaxed), misses: self.misses.load(Ordering::Relaxed) }
    }

    pub fn path(&self, kind: CacheKind, key: &str) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(kind.dir_name()).join(format!("{key}.json")))
    }

    pub fn load<T: DeserializeOwned>(&self, kind: CacheKind, key: &str) -> Option<T> {
        let text = fs::read_to_string(self.path(kind, key)?).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        entry.decode(kind, key)
    }

    /// Write through a temporary file in the same directory and rename it
    /// into place, so readers never see a partial entry.
    pub fn store<T: Serialize>(&self, kind: CacheKind, key: &str, value: &T) -> std::io::Result<()> {
        let Some(path) = self.path(kind, key) else { return Ok(()) };
        let dir = path.parent().expect("cache path has a parent");
        fs::create_dir_all(dir)?;
        let entry = CacheEntry::new(kind, key, value)?;
        let tmp = dir.join(format!(
            ".{key}.{}.{}.tmp",
            std::process::id(),
            TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&tmp, serde_json::to_vec(&entry)?)?;
        fs::rename(&tmp, &path)
    }

    /// Cached value for (kind, key), computing and storing it on a miss or
    /// on any version, identity or checksum mismatch.
    pub fn get_or_compute<T, E>(&self, kind: CacheKind, key: &str, compute: impl FnOnce() -> Result<T, E>) -> Result<T, E>
    where
        T: Serialize + DeserializeOwned,
    {
        if let Some(v) = self.load(kind, key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let v = compute()?;
        // A failed write only costs a recomputation next time.
        let _ = self.store(kind, key, &v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_rejects_tampering() {
        let e = CacheEntry::new(CacheKind::Classgroup, "d23", &vec![1u64, 2, 3]).unwrap();
        assert_eq!(e.decode::<Vec<u64>>(CacheKind::Classgroup, "d23"), Some(vec![1, 2, 3]));
        assert_eq!(e.decode::<Vec<u64>>(CacheKind::Classgroup, "d7"), None);
        assert_eq!(e.decode::<Vec<u64>>(CacheKind::Kernel, "d23"), None);
        let mut bad = e.clone();
        bad.payload = "[1,2,4]".into();
        assert_eq!(bad.decode::<Vec<u64>>(CacheKind::Classgroup, "d23"), None);
        let mut old = e;
        old.schema_version = SCHEMA_VERSION + 1;
        assert_eq!(old.decode::<Vec<u64>>(CacheKind::Classgroup, "d23"), None);
    }

    #[test]
    fn checksum_is_fnv1a() {
        assert_eq!(checksum(b""), 0xcbf29ce484222325);
        assert_eq!(checksum(b"a"), 0xaf63dc4c8601ec8c);
    }
}
