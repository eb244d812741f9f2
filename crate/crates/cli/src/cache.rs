//! On-disk angle-table cache. One file per (field, a, d, filter) key, named by
//! the SHA-256 of the key and guarded by a SHA-256 of its payload.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use kloodist_core::{angle_table, AngleTable, FieldSpec, PlaceFilter, RationalFn};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::format::{angle_table_csv, parse_angle_table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// The entry failed its checksum or did not parse; it was rebuilt.
    Recomputed,
    Disabled,
}

/// Where the cache lives: the command-line flag wins, then KLOODIST_CACHE,
/// then the config file.
pub fn resolve_cache_dir(flag: Option<&Path>, env: Option<&str>, config: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .or_else(|| config.map(Path::to_path_buf))
}

#[derive(Clone, Debug)]
pub struct AngleCache {
    dir: Option<PathBuf>,
}

fn sha_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn cache_key(field: &FieldSpec, a: &RationalFn, d: usize, nonzero_constant: bool) -> String {
    format!("{field}|{a}|{d}|nz={nonzero_constant}")
}

impl AngleCache {
    pub fn new(dir: Option<PathBuf>) -> AngleCache {
        AngleCache { dir }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn path_for(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.csv", sha_hex(key.as_bytes()))))
    }

    /// Reads and checks one entry. Ok(None) when there is none.
    pub fn read(&self, key: &str) -> Result<Option<AngleTable>, CliError> {
        let Some(path) = self.path_for(key) else { return Ok(None) };
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let corrupt = |why: &str| CliError::CacheCorrupt(format!("{}: {why}", path.display()));
        let (first, payload) = text.split_once('\n').ok_or_else(|| corrupt("truncated"))?;
        let sum = first.strip_prefix("# sha256=").ok_or_else(|| corrupt("missing checksum"))?;
        if sum != sha_hex(payload.as_bytes()) {
            return Err(corrupt("checksum mismatch"));
        }
        let stored_key = payload.lines().nth(2).and_then(|l| l.strip_prefix("# key="));
        if stored_key != Some(key) {
            return Err(corrupt("key mismatch"));
        }
        parse_angle_table(payload).map(Some)
    }

    /// Writes through a temporary file in the same directory and renames it
    /// into place, so an interrupted run never leaves a partial entry.
    pub fn write(&self, key: &str, table: &AngleTable) -> Result<(), CliError> {
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path_for(key)) else { return Ok(()) };
        std::fs::create_dir_all(dir)?;
        let payload = angle_table_csv(table, &[format!("key={key}")]);
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        writeln!(tmp, "# sha256={}", sha_hex(payload.as_bytes()))?;
        tmp.write_all(payload.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| CliError::Io(e.error))?;
        Ok(())
    }

    /// The table for (a, d), from the cache when a valid entry exists.
    pub fn angles(
        &self,
        field: &FieldSpec,
        a: &RationalFn,
        d: usize,
        nonzero_constant: bool,
    ) -> Result<(AngleTable, CacheStatus), CliError> {
        let key = cache_key(field, a, d, nonzero_constant);
        let mut status = if self.dir.is_some() { CacheStatus::Miss } else { CacheStatus::Disabled };
        match self.read(&key) {
            Ok(Some(t)) => return Ok((t, CacheStatus::Hit)),
            Ok(None) => {}
            Err(CliError::CacheCorrupt(why)) => {
                eprintln!("warning: cache entry corrupt ({why}); recomputing");
                status = CacheStatus::Recomputed;
            }
            Err(e) => return Err(e),
        }
        let filters = if nonzero_constant { vec![PlaceFilter::NonzeroConstant] } else { Vec::new() };
        let table = angle_table(field, a, d, &filters)?;
        self.write(&key, &table)?;
        Ok((table, status))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kloodist_core::PolyRing;

    fn setup() -> (FieldSpec, RationalFn) {
        let f = FieldSpec::new(3, 1, None).unwrap();
        let a = RationalFn::parse(&PolyRing::new(&f), "0-1/1").unwrap();
        (f, a)
    }

    #[test]
    fn precedence_flag_env_config() {
        let (f, e, c) = (Path::new("/f"), "/e", Path::new("/c"));
        assert_eq!(resolve_cache_dir(Some(f), Some(e), Some(c)), Some(PathBuf::from("/f")));
        assert_eq!(resolve_cache_dir(None, Some(e), Some(c)), Some(PathBuf::from("/e")));
        assert_eq!(resolve_cache_dir(None, Some(""), Some(c)), Some(PathBuf::from("/c")));
        assert_eq!(resolve_cache_dir(None, None, None), None);
    }

    #[test]
    fn round_trip_and_recovery() {
        let dir = tempfile::tempdir().unwrap();
        let cache = AngleCache::new(Some(dir.path().to_path_buf()));
        let (f, a) = setup();
        let (fresh, s1) = cache.angles(&f, &a, 4, false).unwrap();
        assert_eq!(s1, CacheStatus::Miss);
        let (cached, s2) = cache.angles(&f, &a, 4, false).unwrap();
        assert_eq!(s2, CacheStatus::Hit);
        assert_eq!(cached, fresh);
        assert_eq!(angle_table_csv(&cached, &[]), angle_table_csv(&fresh, &[]));

        let path = cache.path_for(&cache_key(&f, &a, 4, false)).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        text = text.replacen(",0.", ",1.", 1);
        std::fs::write(&path, text).unwrap();
        assert!(matches!(cache.read(&cache_key(&f, &a, 4, false)), Err(CliError::CacheCorrupt(_))));
        let (rebuilt, s3) = cache.angles(&f, &a, 4, false).unwrap();
        assert_eq!(s3, CacheStatus::Recomputed);
        assert_eq!(rebuilt, fresh);
        assert_eq!(cache.angles(&f, &a, 4, false).unwrap().1, CacheStatus::Hit);
    }

    #[test]
    fn no_stray_temp_files() {
        let dir = tempfile::tempdir().unwrap();
        let cache = AngleCache::new(Some(dir.path().to_path_buf()));
        let (f, a) = setup();
        for d in 1..=3 {
            cache.angles(&f, &a, d, d == 2).unwrap();
        }
        let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 3);
        assert!(names.iter().all(|n| n.to_string_lossy().ends_with(".csv")));
    }
}
