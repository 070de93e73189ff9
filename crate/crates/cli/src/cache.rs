//! On-disk cache for expensive enumerations, keyed by a stable hash of the
//! canonical input description plus the tool version. Entries are written
//! atomically (temp file then rename) and revalidated on load; anything
//! corrupt is discarded with a warning and recomputed.

use std::fs;
use std::path::PathBuf;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub struct Cache {
    dir: Option<PathBuf>,
}

const VERSION: &str = env!("CARGO_PKG_VERSION");

impl Cache {
    /// Precedence: explicit flag, then FCX_CACHE_DIR, then a per-user
    /// default; `disabled` turns caching off entirely.
    pub fn new(flag_dir: Option<PathBuf>, disabled: bool) -> Cache {
        if disabled {
            return Cache { dir: None };
        }
        let dir = flag_dir
            .or_else(|| std::env::var_os("FCX_CACHE_DIR").map(PathBuf::from))
            .or_else(|| {
                std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("fcx"))
            });
        Cache { dir }
    }

    fn entry_path(&self, spec: &str) -> Option<PathBuf> {
        let dir = self.dir.as_ref()?;
        let digest = Sha256::digest(format!("{VERSION}|{spec}").as_bytes());
        Some(dir.join(format!("{}.json", hex::encode(&digest[..16]))))
    }

    /// Returns the cached payload if present, version-matched, and accepted
    /// by the caller's validator.
    pub fn lookup(
        &self,
        spec: &str,
        validate: impl Fn(&Value) -> bool,
    ) -> Option<Value> {
        let path = self.entry_path(spec)?;
        let text = fs::read_to_string(&path).ok()?;
        let discard = |why: &str| {
            eprintln!("warning: discarding cache entry {}: {why}", path.display());
            let _ = fs::remove_file(&path);
        };
        let entry: Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(_) => {
                discard("unparseable");
                return None;
            }
        };
        if entry.get("version").and_then(Value::as_str) != Some(VERSION)
            || entry.get("spec").and_then(Value::as_str) != Some(spec)
        {
            discard("stale version or spec mismatch");
            return None;
        }
        let payload = entry.get("payload")?.clone();
        if !validate(&payload) {
            discard("payload fails invariants");
            return None;
        }
        Some(payload)
    }

    pub fn store(&self, spec: &str, payload: &Value) {
        let Some(path) = self.entry_path(spec) else {
            return;
        };
        let Some(dir) = path.parent() else { return };
        if fs::create_dir_all(dir).is_err() {
            return;
        }
        let entry = json!({ "version": VERSION, "spec": spec, "payload": payload });
        let tmp = path.with_extension("tmp");
        if fs::write(&tmp, entry.to_string()).is_ok() {
            let _ = fs::rename(&tmp, &path);
        }
    }
}
