//! Content-addressed cache of computed results, one JSON file per entry.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::group::FiniteGroup;

pub const CACHE_VERSION: u64 = 1;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "NINFTY_CACHE";

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    /// A cache that never stores anything.
    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: Some(dir.into()) }
    }

    /// `explicit`, else `$NINFTY_CACHE`, else the platform cache directory.
    pub fn locate(explicit: Option<&Path>) -> Self {
        let dir = explicit
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .or_else(|| dirs::cache_dir().map(|d| d.join("ninfty")));
        Cache { dir }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Key over the group's table, the operation name and its parameters.
    pub fn key(group: &FiniteGroup, op: &str, params: &Value) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_string(&group.rows()).expect("tables serialize"));
        h.update([0]);
        h.update(op.as_bytes());
        h.update([0]);
        h.update(serde_json::to_string(params).expect("params serialize"));
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    /// The stored payload, if present with a matching version and key.
    pub fn get(&self, key: &str) -> Option<Value> {
        let text = std::fs::read_to_string(self.path(key)?).ok()?;
        let entry: Value = serde_json::from_str(&text).ok()?;
        if entry.get("version")?.as_u64()? != CACHE_VERSION || entry.get("key")?.as_str()? != key {
            return None;
        }
        entry.get("payload").cloned()
    }

    /// Writes to a temporary file in the cache directory, then renames it
    /// into place so readers never see a partial entry.
    pub fn put(&self, key: &str, payload: &Value) -> Result<()> {
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path(key)) else {
            return Ok(());
        };
        std::fs::create_dir_all(dir)?;
        let entry = json!({ "version": CACHE_VERSION, "key": key, "payload": payload });
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(serde_json::to_string(&entry)?.as_bytes())?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Cached value of `compute`, storing it on a miss. Store failures are
    /// ignored: the cache is an optimization only.
    pub fn get_or_compute(&self, key: &str, compute: impl FnOnce() -> Result<Value>) -> Result<Value> {
        if let Some(v) = self.get(key) {
            return Ok(v);
        }
        let v = compute()?;
        let _ = self.put(key, &v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_builtin, Limits};

    #[test]
    fn roundtrip_and_invalidation() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path());
        let g = make_builtin("C3", &Limits::default()).unwrap();
        let key = Cache::key(&g, "subgroups", &json!({}));
        assert_eq!(key.len(), 64);
        assert_ne!(key, Cache::key(&g, "subgroups", &json!({"x": 1})));
        assert!(cache.get(&key).is_none());
        cache.put(&key, &json!([1, 2])).unwrap();
        assert_eq!(cache.get(&key), Some(json!([1, 2])));

        let path = dir.path().join(format!("{key}.json"));
        std::fs::write(&path, r#"{"version": 0, "key": "k", "payload": 1}"#).unwrap();
        assert!(cache.get(&key).is_none());
        std::fs::write(&path, "not json").unwrap();
        assert!(cache.get(&key).is_none());

        let mut calls = 0;
        let v = cache.get_or_compute(&key, || { calls += 1; Ok(json!("x")) }).unwrap();
        let w = cache.get_or_compute(&key, || { calls += 1; Ok(json!("y")) }).unwrap();
        assert_eq!((v, w, calls), (json!("x"), json!("x"), 1));
    }

    #[test]
    fn disabled_cache_stores_nothing() {
        let cache = Cache::disabled();
        cache.put("k", &json!(1)).unwrap();
        assert!(cache.get("k").is_none());
    }
}
