//! Content-addressed cache: an in-memory map shared across threads, backed
//! by JSON files under `<out>/cache`. Keys are SHA-256 digests of the inputs.

use anyhow::Result;
use dashmap::DashMap;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

pub struct Cache {
    dir: Option<PathBuf>,
    mem: DashMap<String, Arc<serde_json::Value>>,
    hits: AtomicUsize,
    write_lock: Mutex<()>,
}

pub fn content_hash(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

impl Cache {
    /// `dir = None` keeps entries in memory only.
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir, mem: DashMap::new(), hits: AtomicUsize::new(0), write_lock: Mutex::new(()) }
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    fn path(&self, kind: &str, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{kind}-{key}.json")))
    }

    fn lookup(&self, kind: &str, key: &str) -> Option<Arc<serde_json::Value>> {
        let id = format!("{kind}-{key}");
        if let Some(v) = self.mem.get(&id) {
            return Some(v.clone());
        }
        let path = self.path(kind, key)?;
        let text = std::fs::read_to_string(path).ok()?;
        let v: serde_json::Value = serde_json::from_str(&text).ok()?;
        let v = Arc::new(v);
        self.mem.insert(id, v.clone());
        Some(v)
    }

    fn store(&self, kind: &str, key: &str, v: serde_json::Value) -> Result<()> {
        let v = Arc::new(v);
        self.mem.insert(format!("{kind}-{key}"), v.clone());
        if let Some(path) = self.path(kind, key) {
            let _guard = self.write_lock.lock().expect("cache lock");
            std::fs::create_dir_all(path.parent().expect("cache dir"))?;
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, serde_json::to_vec(&*v)?)?;
            std::fs::rename(tmp, path)?;
        }
        Ok(())
    }

    /// Returns the cached value for `key`, computing and storing it on a miss.
    pub fn get_or_compute<T, F>(&self, kind: &str, key: &str, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        if let Some(v) = self.lookup(kind, key) {
            if let Ok(t) = serde_json::from_value::<T>((*v).clone()) {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return Ok(t);
            }
        }
        let t = compute()?;
        self.store(kind, key, serde_json::to_value(&t)?)?;
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_separates_parts() {
        assert_ne!(content_hash(&["ab", "c"]), content_hash(&["a", "bc"]));
        assert_eq!(content_hash(&["x"]).len(), 64);
    }

    #[test]
    fn file_backed_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(Some(dir.path().to_path_buf()));
        let v: Vec<f64> = c.get_or_compute("t", "k", || Ok(vec![1.0, 2.0])).unwrap();
        assert_eq!(c.hits(), 0);
        let fresh = Cache::new(Some(dir.path().to_path_buf()));
        let w: Vec<f64> = fresh.get_or_compute("t", "k", || panic!("should hit")).unwrap();
        assert_eq!(v, w);
        assert_eq!(fresh.hits(), 1);
    }
}
