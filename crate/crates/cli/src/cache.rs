//! On-disk cache of exact energy coefficients, one file per level.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use resosc::series::{parse_cache, rs_recursion_capped, CacheEntry, ParseError, CONVENTION_TAG};
use resosc::EnergySeries;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("{}:{}:{}: {}", path.display(), source.line, source.column, source.message)]
    Corrupt { path: PathBuf, source: ParseError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:1: cache holds level {found}, expected {expected}", path.display())]
    WrongLevel { path: PathBuf, found: usize, expected: usize },
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Files are keyed by convention tag and level.
    pub fn path(&self, level: usize) -> PathBuf {
        self.dir.join(format!("{CONVENTION_TAG}-level-{level}.txt"))
    }

    /// Cached series for `level`, if a file exists. A corrupt file is an
    /// error, never a miss.
    pub fn load(&self, level: usize) -> Result<Option<EnergySeries>, CacheError> {
        let path = self.path(level);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) if e.kind() == io::ErrorKind::InvalidData => {
                return Err(CacheError::Corrupt {
                    path,
                    source: ParseError { line: 1, column: 1, message: "file is not valid UTF-8".into() },
                })
            }
            Err(source) => return Err(CacheError::Io { path, source }),
        };
        let entry = parse_cache(&text).map_err(|source| CacheError::Corrupt { path: path.clone(), source })?;
        if entry.series.level != level {
            return Err(CacheError::WrongLevel { path, found: entry.series.level, expected: level });
        }
        Ok(Some(entry.series))
    }

    pub fn store(&self, series: &EnergySeries) -> Result<(), CacheError> {
        let path = self.path(series.level);
        let io_err = |source| CacheError::Io { path: path.clone(), source };
        fs::create_dir_all(&self.dir).map_err(|source| CacheError::Io { path: self.dir.clone(), source })?;
        let entry = CacheEntry { series: series.clone(), table: None };
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let mut f = fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(entry.to_string().as_bytes()).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
        fs::rename(&tmp, &path).map_err(io_err)
    }
}

/// Energy coefficients through `order`, read from the cache when a file with
/// at least that many orders exists and written back after a recomputation.
pub fn energies(cache: Option<&Cache>, level: usize, order: usize) -> Result<EnergySeries, CacheError> {
    if let Some(c) = cache {
        if let Some(s) = c.load(level)? {
            if s.coeffs.len() > order {
                return Ok(s.truncated(order));
            }
        }
    }
    let (s, _) = rs_recursion_capped(level, order, 0);
    if let Some(c) = cache {
        c.store(&s)?;
    }
    Ok(s)
}

pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
    match std::env::var_os("RESOSC_CACHE_DIR") {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => flag.map(Path::to_path_buf),
    }
}
