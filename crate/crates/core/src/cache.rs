//! Content-addressed on-disk cache. Each entry records the request that
//! produced it and a hash of its payload; a damaged entry is reported,
//! never used. Writes go through a temporary file and an atomic rename, so
//! concurrent writers of the same key cannot leave a partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::golden::sha256_hex;

/// Bumped whenever cached payload semantics change.
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache entry {path} is corrupt: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error("cache i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Serialize, Deserialize)]
struct Entry {
    version: u32,
    kind: String,
    request: Value,
    payload_sha256: String,
    payload: Value,
}

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CacheError + '_ {
    move |source| CacheError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Hex key of a request: hash of its kind, cache version and JSON.
    pub fn key<R: Serialize>(kind: &str, request: &R) -> String {
        let body =
            serde_json::to_string(&(kind, CACHE_VERSION, request)).expect("requests serialize");
        sha256_hex(body.as_bytes())
    }

    pub fn path_for<R: Serialize>(&self, kind: &str, request: &R) -> PathBuf {
        self.root
            .join(kind)
            .join(format!("{}.json", Self::key(kind, request)))
    }

    pub fn load<R: Serialize, T: DeserializeOwned>(
        &self,
        kind: &str,
        request: &R,
    ) -> Result<Option<T>, CacheError> {
        let path = self.path_for(kind, request);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io_err(&path)(e)),
        };
        let corrupt = |reason: String| CacheError::Corrupt {
            path: path.clone(),
            reason,
        };
        let entry: Entry =
            serde_json::from_str(&text).map_err(|e| corrupt(format!("unreadable: {e}")))?;
        let payload_text = serde_json::to_string(&entry.payload).expect("values serialize");
        if sha256_hex(payload_text.as_bytes()) != entry.payload_sha256 {
            return Err(corrupt("payload hash mismatch".into()));
        }
        let request_value = serde_json::to_value(request).expect("requests serialize");
        if entry.version != CACHE_VERSION || entry.kind != kind || entry.request != request_value {
            return Err(corrupt("entry does not match its address".into()));
        }
        serde_json::from_value(entry.payload)
            .map(Some)
            .map_err(|e| corrupt(format!("payload schema: {e}")))
    }

    pub fn store<R: Serialize, T: Serialize>(
        &self,
        kind: &str,
        request: &R,
        value: &T,
    ) -> Result<PathBuf, CacheError> {
        let path = self.path_for(kind, request);
        let dir = path.parent().expect("entries live in a kind directory");
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let payload = serde_json::to_value(value).expect("payloads serialize");
        let payload_text = serde_json::to_string(&payload).expect("values serialize");
        let entry = Entry {
            version: CACHE_VERSION,
            kind: kind.to_string(),
            request: serde_json::to_value(request).expect("requests serialize"),
            payload_sha256: sha256_hex(payload_text.as_bytes()),
            payload,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
        serde_json::to_writer_pretty(&mut tmp, &entry).map_err(|e| io_err(&path)(e.into()))?;
        tmp.write_all(b"\n").map_err(io_err(&path))?;
        tmp.persist(&path).map_err(|e| io_err(&path)(e.error))?;
        Ok(path)
    }

    /// Returns the cached value, or computes and stores it. `force`
    /// recomputes and overwrites.
    pub fn get_or_compute<R, T, E, F>(
        &self,
        kind: &str,
        request: &R,
        force: bool,
        compute: F,
    ) -> Result<T, E>
    where
        R: Serialize,
        T: Serialize + DeserializeOwned,
        E: From<CacheError>,
        F: FnOnce() -> Result<T, E>,
    {
        if !force {
            if let Some(v) = self.load(kind, request)? {
                return Ok(v);
            }
        }
        let v = compute()?;
        self.store(kind, request, &v)?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let req = ("job", 3, 4);
        assert_eq!(cache.load::<_, Vec<u32>>("t", &req).unwrap(), None);
        let path = cache.store("t", &req, &vec![1u32, 2, 3]).unwrap();
        assert_eq!(
            cache.load::<_, Vec<u32>>("t", &req).unwrap(),
            Some(vec![1, 2, 3])
        );

        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, text.replacen('2', "7", 1)).unwrap();
        assert!(matches!(
            cache.load::<_, Vec<u32>>("t", &req),
            Err(CacheError::Corrupt { .. })
        ));

        fs::write(&path, "{ not json").unwrap();
        assert!(matches!(
            cache.load::<_, Vec<u32>>("t", &req),
            Err(CacheError::Corrupt { .. })
        ));
    }

    #[test]
    fn keys_depend_on_request() {
        assert_ne!(Cache::key("t", &(3, 4)), Cache::key("t", &(3, 5)));
        assert_ne!(Cache::key("t", &(3, 4)), Cache::key("u", &(3, 4)));
        assert_eq!(Cache::key("t", &(3, 4)), Cache::key("t", &(3, 4)));
    }

    #[test]
    fn get_or_compute_uses_cache() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let mut calls = 0;
        for _ in 0..3 {
            let v: Result<u32, CacheError> = cache.get_or_compute("k", &1, false, || {
                calls += 1;
                Ok(42)
            });
            assert_eq!(v.unwrap(), 42);
        }
        assert_eq!(calls, 1);
    }
}
