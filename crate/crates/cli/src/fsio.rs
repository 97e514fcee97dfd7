//! Output-file plumbing: atomic writes and actionable artifact errors.

use std::fs;
use std::path::{Path, PathBuf};

use camp_core::{CampError, Result};

/// Write via a temp file in the same directory followed by a rename, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Open an input produced by an earlier command, pointing at the producer
/// when it is missing.
pub fn open_artifact(path: &Path, producer: &str) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CampError::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!(
                    "missing {}: run `camp {producer}` first",
                    path.display()
                ),
            ))
        } else {
            CampError::Io(e)
        }
    })
}

pub fn open_input(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| {
        CampError::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}
