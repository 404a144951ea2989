use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Files to be written together; nothing touches the target directory
/// until every payload is ready.
#[derive(Default)]
pub struct OutputSet {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl OutputSet {
    pub fn add(&mut self, path: PathBuf, contents: impl Into<Vec<u8>>) {
        self.files.push((path, contents.into()));
    }

    /// Writes each file to a temporary sibling, then renames all of them
    /// into place.
    pub fn commit(self) -> CliResult<()> {
        let mut staged = Vec::with_capacity(self.files.len());
        for (path, bytes) in self.files {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
                _ => PathBuf::from("."),
            };
            std::fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
            let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| io_error(&dir, e))?;
            tmp.write_all(&bytes).map_err(|e| io_error(&path, e))?;
            tmp.as_file().sync_all().map_err(|e| io_error(&path, e))?;
            staged.push((tmp, path));
        }
        for (tmp, path) in staged {
            tmp.persist(&path).map_err(|e| io_error(&path, e.error))?;
        }
        Ok(())
    }
}

pub fn write_atomic(path: &Path, contents: impl Into<Vec<u8>>) -> CliResult<()> {
    let mut set = OutputSet::default();
    set.add(path.to_path_buf(), contents);
    set.commit()
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Numeric(format!("cannot write {}: {e}", path.display()))
}
