//! On-disk cache of coefficient tables, keyed by (weight, N).
//!
//! Layout: `<root>/coeffs/weight<k>_N<N>.csv` in the core CSV format. The root is
//! `$SSLAB_CACHE_DIR`, or `.sslab-cache` in the working directory.
//!
//! Every load is revalidated (a(1) = 1, Deligne, and Hecke checks on 100 random pairs).
//! A missing, truncated, or tampered file is regenerated deterministically, with a
//! warning in the corrupt cases. Writes go through a temporary file and a rename, so
//! an interrupted run never leaves a partial file under the final name.

use sslab_core::modforms::{eigenform_coefficients, CoefficientTable};
use sslab_core::{Error, Result};
use std::path::{Path, PathBuf};

/// Environment variable naming the cache root.
pub const CACHE_ENV: &str = "SSLAB_CACHE_DIR";
/// Random Hecke pairs checked on every load.
pub const REVALIDATION_PAIRS: usize = 100;
/// Seed of the revalidation pairs.
pub const REVALIDATION_SEED: u64 = 0x5EED_CAFE;

/// How a lookup was satisfied.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CacheStatus {
    /// The file existed and passed revalidation.
    Hit,
    /// No file: the table was generated and stored.
    Miss,
    /// The file existed but failed to parse or validate; it was regenerated.
    Regenerated { reason: String },
}

/// A coefficient cache rooted at a directory.
#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    /// The cache at `$SSLAB_CACHE_DIR`, or `./.sslab-cache`.
    pub fn from_env() -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(p) if !p.is_empty() => Self::new(p),
            _ => Self::new(".sslab-cache"),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Path of the (weight, N) entry.
    pub fn path(&self, weight: u32, n: usize) -> PathBuf {
        self.root.join("coeffs").join(format!("weight{weight}_N{n}.csv"))
    }

    /// Return the validated table for (weight, N), generating it on a miss and
    /// regenerating it (with a warning) if the cached file is corrupt.
    pub fn lookup(&self, weight: u32, n: usize) -> Result<(CoefficientTable, CacheStatus)> {
        let path = self.path(weight, n);
        let status = if path.exists() {
            match load_checked(&path, weight, n) {
                Ok(t) => return Ok((t, CacheStatus::Hit)),
                Err(e) => {
                    log::warn!("cache entry {} is corrupt ({e}); regenerating", path.display());
                    CacheStatus::Regenerated { reason: e.to_string() }
                }
            }
        } else {
            CacheStatus::Miss
        };
        let table = eigenform_coefficients(weight, n)?;
        table.validate(REVALIDATION_PAIRS, REVALIDATION_SEED)?;
        store(&path, &table)?;
        Ok((table, status))
    }
}

fn load_checked(path: &Path, weight: u32, n: usize) -> Result<CoefficientTable> {
    let t = CoefficientTable::load(path)?;
    if t.weight != weight || t.len() != n {
        return Err(Error::Validation(format!("file holds (weight {}, N {}), expected ({weight}, {n})", t.weight, t.len())));
    }
    t.validate(REVALIDATION_PAIRS, REVALIDATION_SEED)?;
    Ok(t)
}

fn store(path: &Path, table: &CoefficientTable) -> Result<()> {
    let dir = path.parent().expect("cache paths have a parent");
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(".{}.tmp{}", path.file_name().unwrap().to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, table.to_csv())?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// [`Cache::lookup`] on the environment cache.
pub fn cache_lookup(weight: u32, n: usize) -> Result<(CoefficientTable, CacheStatus)> {
    Cache::from_env().lookup(weight, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miss_then_hit_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        let (a, s1) = c.lookup(12, 500).unwrap();
        assert_eq!(s1, CacheStatus::Miss);
        let bytes1 = std::fs::read(c.path(12, 500)).unwrap();
        let (b, s2) = c.lookup(12, 500).unwrap();
        assert_eq!(s2, CacheStatus::Hit);
        assert_eq!(a, b);
        assert_eq!(bytes1, std::fs::read(c.path(12, 500)).unwrap());
        assert_eq!(bytes1, b.to_csv().into_bytes());
    }

    #[test]
    fn truncated_file_regenerates() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        let (good, _) = c.lookup(12, 300).unwrap();
        let p = c.path(12, 300);
        let text = std::fs::read_to_string(&p).unwrap();
        std::fs::write(&p, &text[..text.len() / 2]).unwrap();
        let (t, s) = c.lookup(12, 300).unwrap();
        assert!(matches!(s, CacheStatus::Regenerated { .. }), "{s:?}");
        assert_eq!(t, good);
        assert_eq!(std::fs::read_to_string(&p).unwrap(), text);
    }

    #[test]
    fn tampered_a2_fails_hecke_and_regenerates() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        let (good, _) = c.lookup(12, 300).unwrap();
        let p = c.path(12, 300);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.contains("\n2,-24\n"));
        std::fs::write(&p, text.replace("\n2,-24\n", "\n2,-23\n")).unwrap();
        let (t, s) = c.lookup(12, 300).unwrap();
        match s {
            CacheStatus::Regenerated { reason } => assert!(reason.contains("Hecke"), "{reason}"),
            other => panic!("{other:?}"),
        }
        assert_eq!(t, good);
    }

    #[test]
    fn wrong_key_regenerates() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        let (_, _) = c.lookup(12, 200).unwrap();
        std::fs::copy(c.path(12, 200), c.path(12, 300)).unwrap();
        let (t, s) = c.lookup(12, 300).unwrap();
        assert!(matches!(s, CacheStatus::Regenerated { .. }));
        assert_eq!(t.len(), 300);
    }
}
