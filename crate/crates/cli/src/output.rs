//! Report writing and the operator cache.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const SCHEMA: &str = "qplanar/1";

/// Writes `text` to `out` through a temporary file in the same directory,
/// so readers never see a partial file. Without `out`, prints it.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    let Some(path) = out else {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(qplanar::Error::from)?;
    s.push('\n');
    Ok(s)
}

/// Memo of serialized operators, one file per key.
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Cache, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    fn path(&self, key: &str) -> PathBuf {
        let digest = Sha256::digest(format!("{SCHEMA}\n{key}").as_bytes());
        let name: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.dir.join(format!("{name}.json"))
    }

    pub fn get(&self, key: &str) -> Option<String> {
        fs::read_to_string(self.path(key)).ok()
    }

    pub fn put(&self, key: &str, value: &str) -> Result<(), CliError> {
        emit(Some(&self.path(key)), value)
    }
}
