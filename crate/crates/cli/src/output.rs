//! Artifact writing. Every file is written to a temporary sibling and renamed
//! into place, so a reader never sees a partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Collects the files produced by one run, relative to its output directory.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    files: Vec<PathBuf>,
}

impl ArtifactWriter {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).with_context(|| format!("cannot create output directory {}", root.display()))?;
        Ok(Self {
            root,
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Files written so far, in write order.
    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    /// Writes `name` with the bytes produced by `fill`.
    pub fn write_with(&mut self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<PathBuf> {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        self.write_bytes(name, &buf)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(name);
        atomic_write(&path, bytes)?;
        self.files.push(PathBuf::from(name));
        Ok(path)
    }

    /// Writes serializable rows as CSV with a header taken from the field names.
    pub fn write_rows<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<PathBuf> {
        self.write_with(name, |buf| {
            let mut w = csv::Writer::from_writer(buf);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
            Ok(())
        })
    }

    /// Writes a header and string records as CSV.
    pub fn write_table(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<PathBuf> {
        self.write_with(name, |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
            Ok(())
        })
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("cannot move {} into place", path.display()))?;
    Ok(())
}

/// Shortest round-tripping decimal form, used for every float cell.
pub fn fmt_f64(v: f64) -> String {
    v.to_string()
}
