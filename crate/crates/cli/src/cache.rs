use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};

/// Directory of JSON result files keyed by a hash of the parameters.
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: PathBuf) -> Self {
        Self { dir }
    }

    /// `$XDG_CACHE_HOME/huffcensus`, falling back to `~/.cache/huffcensus`.
    pub fn default_dir() -> Option<PathBuf> {
        if let Some(xdg) = std::env::var_os("XDG_CACHE_HOME").filter(|v| !v.is_empty()) {
            return Some(Path::new(&xdg).join("huffcensus"));
        }
        std::env::var_os("HOME").map(|home| Path::new(&home).join(".cache").join("huffcensus"))
    }

    fn path(&self, kind: &str, params: &str) -> PathBuf {
        let digest = Sha256::digest(format!("{kind}\n{params}").as_bytes());
        self.dir.join(format!("{kind}-{}.json", hex::encode(digest)))
    }

    /// Cached document, if present and readable.
    pub fn load(&self, kind: &str, params: &str) -> Option<Value> {
        let text = fs::read_to_string(self.path(kind, params)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store(&self, kind: &str, params: &str, value: &Value) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(kind, params);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string_pretty(value)?)?;
        fs::rename(tmp, path)
    }
}
