use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{input_hash, CountReport};
use crate::error::{Error, Result};
use crate::Limits;

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "BSLL_CACHE";

pub fn cache_path(dir: &Path, p: u32, k: usize, limits: &Limits) -> PathBuf {
    let hash = input_hash(p, k, limits);
    dir.join(format!("count-p{p}-k{k}-{}.json", &hash[..16]))
}

/// A cached report for this request, if one exists and matches it.
pub fn load_cached(dir: &Path, p: u32, k: usize, limits: &Limits) -> Result<Option<CountReport>> {
    let path = cache_path(dir, p, k, limits);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let report: CountReport = serde_json::from_str(&text)?;
    if report.input_hash != input_hash(p, k, limits) {
        return Err(Error::InvalidInput(format!(
            "cache entry {} belongs to a different request",
            path.display()
        )));
    }
    Ok(Some(report))
}

/// Writes to a temporary file in `dir` and renames it into place.
pub fn store_cached(dir: &Path, report: &CountReport) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let hash = &report.input_hash;
    let path = dir.join(format!(
        "count-p{}-k{}-{}.json",
        report.p,
        report.k,
        &hash[..16]
    ));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(serde_json::to_string_pretty(report)?.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
    Ok(path)
}
