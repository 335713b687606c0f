//! Byte-stable on-disk cache for the spread tables of an André/Bruck–Bose
//! model.
//!
//! Building [`AbbModel`](crate::abb::AbbModel) is dominated by the field
//! reduction that turns every point of `ℓ∞` into a spread line of `H∞`.
//! That table depends only on the field tower, so it is worth persisting:
//! a cache hit rebuilds the two ambient geometries (cheap, pure counting)
//! and reuses the stored spread verbatim.
//!
//! ## Format
//!
//! One file per tower, little-endian throughout:
//!
//! ```text
//! magic   b"UFAB"
//! version u32                      (current: CACHE_VERSION)
//! key     u32 length + UTF-8 bytes (FieldCtx::describe of the tower)
//! spread  u32 line count, then per line: u32 length + that many u32 ids
//! hash    32-byte SHA-256 of everything above
//! ```
//!
//! The file name is derived from `(p, h, polynomials)`, the header carries
//! the format version, and the trailing hash covers magic, version, key,
//! and tables. Loading distinguishes three outcomes:
//!
//! * **hit** — every check passes and the model is reassembled;
//! * **stale** — the magic matches but the version does not; callers are
//!   expected to rebuild transparently (and may warn);
//! * **corrupt** — truncation, a hash mismatch, a foreign key, or tables
//!   of the wrong shape. This is an error, never a silent rebuild.
//!
//! A missing file is simply a miss. [`load_or_build`] packages the whole
//! dance and reports which path was taken.
//!
//! ## Example
//!
//! ```
//! use std::sync::Arc;
//! use unital_forge::cache;
//! use unital_forge::field::FieldCtx;
//!
//! let dir = tempfile::tempdir().unwrap();
//! let ctx = Arc::new(FieldCtx::build_q(4).unwrap());
//! let (_, status) = cache::load_or_build(dir.path(), &ctx).unwrap();
//! assert_eq!(status, cache::CacheStatus::MissBuilt);
//! let (_, status) = cache::load_or_build(dir.path(), &ctx).unwrap();
//! assert_eq!(status, cache::CacheStatus::Hit);
//! ```

use crate::abb::{AbbError, AbbModel};
use crate::field::FieldCtx;
use crate::geom::PointId;
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

/// Bumped whenever the byte layout changes; mismatching files are treated
/// as stale, not corrupt.
pub const CACHE_VERSION: u32 = 1;

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "UNITAL_FORGE_CACHE";

const MAGIC: [u8; 4] = *b"UFAB";
const HASH_LEN: usize = 32;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache i/o failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache file is corrupt: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Abb(#[from] AbbError),
}

/// Outcome of a lookup that does not build on miss.
pub enum CacheLookup {
    /// Valid file; the model was reassembled from it.
    Hit(AbbModel),
    /// A file exists but was written by a different format version.
    Stale,
    /// No file for this tower.
    Miss,
}

impl std::fmt::Debug for CacheLookup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CacheLookup::Hit(m) => write!(f, "Hit(q={})", m.ctx().q()),
            CacheLookup::Stale => write!(f, "Stale"),
            CacheLookup::Miss => write!(f, "Miss"),
        }
    }
}

/// How [`load_or_build`] obtained its model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    /// Loaded from a valid cache file.
    Hit,
    /// No file existed; the model was built and stored.
    MissBuilt,
    /// A stale-version file was replaced; the model was rebuilt and stored.
    StaleRebuilt,
}

/// Default cache directory from the environment, if configured.
pub fn default_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).map(PathBuf::from)
}

/// File path for a tower's cache entry inside `dir`.
///
/// The name embeds `p` and `h` for readability and the first twelve hex
/// digits of the SHA-256 of the full tower description, so different
/// defining polynomials never collide.
pub fn cache_path(dir: &Path, ctx: &FieldCtx) -> PathBuf {
    let mut hasher = Sha256::new();
    hasher.update(ctx.describe().as_bytes());
    let digest = hex::encode(hasher.finalize());
    dir.join(format!(
        "abb-p{}h{}-{}.bin",
        ctx.p(),
        ctx.h(),
        &digest[..12]
    ))
}

fn encode(abb: &AbbModel) -> Vec<u8> {
    let key = abb.ctx().describe();
    let mut buf = Vec::new();
    buf.extend_from_slice(&MAGIC);
    buf.write_u32::<LittleEndian>(CACHE_VERSION).unwrap();
    buf.write_u32::<LittleEndian>(key.len() as u32).unwrap();
    buf.extend_from_slice(key.as_bytes());
    let spread = abb.spread_lines();
    buf.write_u32::<LittleEndian>(spread.len() as u32).unwrap();
    for line in spread {
        buf.write_u32::<LittleEndian>(line.len() as u32).unwrap();
        for pt in line {
            buf.write_u32::<LittleEndian>(pt.0).unwrap();
        }
    }
    let hash = Sha256::digest(&buf);
    buf.extend_from_slice(&hash);
    buf
}

/// Writes the model's spread table to its keyed path inside `dir`,
/// creating the directory if needed. Returns the path written.
///
/// The write goes through a sibling temporary file and a rename, so a
/// crash cannot leave a half-written entry at the final path.
pub fn store_abb(dir: &Path, abb: &AbbModel) -> Result<PathBuf, CacheError> {
    fs::create_dir_all(dir)?;
    let path = cache_path(dir, abb.ctx());
    let tmp = path.with_extension("bin.tmp");
    fs::write(&tmp, encode(abb))?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Looks up the tower's entry in `dir` and reassembles the model on a hit.
///
/// Misses and stale versions are `Ok`; anything that fails an integrity
/// check — truncation, hash mismatch, a key belonging to a different
/// tower, malformed tables — is `Err(Corrupt)`.
pub fn load_abb(dir: &Path, ctx: &Arc<FieldCtx>) -> Result<CacheLookup, CacheError> {
    let path = cache_path(dir, ctx);
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(CacheLookup::Miss),
        Err(e) => return Err(e.into()),
    };
    if bytes.len() < MAGIC.len() + 4 + HASH_LEN {
        return Err(CacheError::Corrupt("file too short".into()));
    }
    if bytes[..MAGIC.len()] != MAGIC {
        return Err(CacheError::Corrupt("bad magic".into()));
    }
    let body = &bytes[..bytes.len() - HASH_LEN];
    let mut cur = Cursor::new(&body[MAGIC.len()..]);
    let version = cur.read_u32::<LittleEndian>()?;
    if version != CACHE_VERSION {
        return Ok(CacheLookup::Stale);
    }
    let stored_hash = &bytes[bytes.len() - HASH_LEN..];
    if Sha256::digest(body).as_slice() != stored_hash {
        return Err(CacheError::Corrupt("hash mismatch".into()));
    }
    let key_len = cur.read_u32::<LittleEndian>()? as usize;
    let mut key = vec![0u8; key_len];
    std::io::Read::read_exact(&mut cur, &mut key)?;
    let key = String::from_utf8(key)
        .map_err(|_| CacheError::Corrupt("key is not UTF-8".into()))?;
    if key != ctx.describe() {
        return Err(CacheError::Corrupt(format!(
            "key mismatch: file describes `{key}`"
        )));
    }
    let line_count = cur.read_u32::<LittleEndian>()? as usize;
    let mut spread = Vec::with_capacity(line_count);
    for _ in 0..line_count {
        let len = cur.read_u32::<LittleEndian>()? as usize;
        let mut line = Vec::with_capacity(len);
        for _ in 0..len {
            line.push(PointId(cur.read_u32::<LittleEndian>()?));
        }
        spread.push(line);
    }
    if cur.position() as usize != body.len() - MAGIC.len() {
        return Err(CacheError::Corrupt("trailing bytes after tables".into()));
    }
    let model = AbbModel::from_parts(ctx.clone(), spread).map_err(|e| match e {
        AbbError::BadCacheTables => CacheError::Corrupt("tables have the wrong shape".into()),
        other => CacheError::Abb(other),
    })?;
    Ok(CacheLookup::Hit(model))
}

/// Loads the model from `dir`, building and storing it on a miss or on a
/// stale format version. Corrupt files propagate as errors so damage is
/// never papered over silently.
pub fn load_or_build(
    dir: &Path,
    ctx: &Arc<FieldCtx>,
) -> Result<(AbbModel, CacheStatus), CacheError> {
    let status = match load_abb(dir, ctx)? {
        CacheLookup::Hit(model) => return Ok((model, CacheStatus::Hit)),
        CacheLookup::Stale => CacheStatus::StaleRebuilt,
        CacheLookup::Miss => CacheStatus::MissBuilt,
    };
    let model = AbbModel::new(ctx.clone())?;
    store_abb(dir, &model)?;
    Ok((model, status))
}

/// JSON export of the cached payload, for inspection and interchange; the
/// binary format remains the load path.
pub fn export_json(abb: &AbbModel) -> String {
    let spread: Vec<Vec<u32>> = abb
        .spread_lines()
        .iter()
        .map(|l| l.iter().map(|p| p.0).collect())
        .collect();
    let value = serde_json::json!({
        "version": CACHE_VERSION,
        "key": abb.ctx().describe(),
        "spread": spread,
    });
    let mut out = serde_json::to_string_pretty(&value).unwrap();
    out.push('\n');
    out
}
