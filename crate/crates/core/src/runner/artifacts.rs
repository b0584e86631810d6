use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use super::RunError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, contents: impl Into<String>) -> Self {
        Self { name: name.into(), contents: contents.into() }
    }
}

fn sibling(dir: &Path, tag: &str) -> PathBuf {
    let base = dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos());
    dir.with_file_name(format!(".{base}.{tag}-{}-{nanos}", std::process::id()))
}

/// Writes every artifact into a fresh sibling directory, then renames it
/// over `dir`. Readers see either the previous run or the complete new one.
pub fn write_atomic(dir: &Path, files: &[Artifact]) -> Result<(), RunError> {
    let dir = if dir.is_absolute() { dir.to_path_buf() } else { std::env::current_dir()?.join(dir) };
    if let Some(parent) = dir.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = sibling(&dir, "tmp");
    let staged = (|| -> std::io::Result<()> {
        fs::create_dir(&tmp)?;
        for f in files {
            fs::write(tmp.join(&f.name), &f.contents)?;
        }
        Ok(())
    })();
    if let Err(e) = staged {
        let _ = fs::remove_dir_all(&tmp);
        return Err(e.into());
    }
    if dir.exists() {
        let old = sibling(&dir, "old");
        fs::rename(&dir, &old).inspect_err(|_| {
            let _ = fs::remove_dir_all(&tmp);
        })?;
        if let Err(e) = fs::rename(&tmp, &dir) {
            let _ = fs::rename(&old, &dir);
            let _ = fs::remove_dir_all(&tmp);
            return Err(e.into());
        }
        fs::remove_dir_all(&old)?;
    } else if let Err(e) = fs::rename(&tmp, &dir) {
        let _ = fs::remove_dir_all(&tmp);
        return Err(e.into());
    }
    Ok(())
}
