//! On-disk cache of split decompositions.
//!
//! An entry is a directory named by the SHA-256 of its key, holding one
//! matrix dump per change of basis and inverse, and a `manifest.json` with
//! the key, the block offsets and a checksum for every file. The manifest is
//! written last, so a partially written entry is never loaded.

use std::fs;
use std::path::{Path, PathBuf};

use rug::Rational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use splitdec::dump::{read_matrix, write_matrix, ExactEntry};
use splitdec::field::Scalar;
use splitdec::scheme::{DualData, SchemeData};
use splitdec::split::{Kind, SplitSystem};
use splitdec::subspace::DirectSum;
use thiserror::Error;

use crate::config::{ordering_label, Backend, RunConfig};
use crate::AnySplit;

/// Environment variable naming the default cache root.
pub const CACHE_ENV: &str = "DRG_CACHE_DIR";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache entry {0} is corrupt: {1}")]
    Corrupt(PathBuf, String),
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// What an entry holds. The split decomposition does not involve `q`, so its
/// key leaves out the sign of `q`; q-dependent artifacts include it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Artifact {
    Split,
    QTet,
}

pub fn cache_key(artifact: Artifact, config: &RunConfig, fingerprint: &str, backend: Backend) -> String {
    let mut key = format!(
        "{}|graph={}|edges={}|base={}|ordering={}|backend={}",
        match artifact {
            Artifact::Split => "split",
            Artifact::QTet => "qtet",
        },
        config.graph,
        fingerprint,
        config.base_vertex,
        ordering_label(&config.ordering),
        backend,
    );
    if artifact == Artifact::QTet {
        key.push_str(&format!("|qsign={}", config.qsign));
    }
    key
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

pub fn entry_dir(root: &Path, key: &str) -> PathBuf {
    root.join(&sha256_hex(key.as_bytes())[..24])
}

#[derive(Debug, Serialize, Deserialize)]
struct GridEntry {
    kind: String,
    offsets: Vec<usize>,
    change: String,
    inverse: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    key: String,
    entry: String,
    grids: Vec<GridEntry>,
    sha256: std::collections::BTreeMap<String, String>,
}

fn store_grids<F: ExactEntry>(dir: &Path, key: &str, entry: &str, split: &SplitSystem<F>) -> Result<(), CacheError> {
    let mut sums = std::collections::BTreeMap::new();
    let mut grids = Vec::new();
    for (kind, ds) in Kind::ALL.into_iter().zip(split.direct_sums()) {
        let change = format!("{kind}.change.txt");
        let inverse = format!("{kind}.inverse.txt");
        for (name, m) in [(&change, ds.change()), (&inverse, ds.inverse())] {
            let text = write_matrix(m, split.field());
            sums.insert(name.clone(), sha256_hex(text.as_bytes()));
            fs::write(dir.join(name), text)?;
        }
        grids.push(GridEntry {
            kind: kind.label().into(),
            offsets: ds.offsets().to_vec(),
            change,
            inverse,
        });
    }
    let manifest = Manifest {
        key: key.into(),
        entry: entry.into(),
        grids,
        sha256: sums,
    };
    let tmp = dir.join("manifest.json.tmp");
    fs::write(&tmp, serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;
    fs::rename(tmp, dir.join("manifest.json"))?;
    Ok(())
}

/// Writes `split` under `key` and returns the entry directory.
pub fn cache_store(root: &Path, key: &str, split: &AnySplit) -> Result<PathBuf, CacheError> {
    let dir = entry_dir(root, key);
    if dir.exists() {
        fs::remove_dir_all(&dir)?;
    }
    fs::create_dir_all(&dir)?;
    match split {
        AnySplit::Rational(s) => store_grids(&dir, key, "rational", s)?,
        AnySplit::Scalar(s) => store_grids(&dir, key, "scalar", s)?,
    }
    Ok(dir)
}

fn load_grids<F: ExactEntry>(
    dir: &Path,
    manifest: &Manifest,
    scheme: &SchemeData,
    dual: &DualData,
) -> Result<SplitSystem<F>, CacheError> {
    let corrupt = |msg: String| CacheError::Corrupt(dir.to_path_buf(), msg);
    let mut sums = Vec::new();
    for (kind, g) in Kind::ALL.into_iter().zip(&manifest.grids) {
        if g.kind != kind.label() {
            return Err(corrupt(format!("grid {} out of order", g.kind)));
        }
        let read = |name: &str| -> Result<_, CacheError> {
            let text = fs::read_to_string(dir.join(name)).map_err(|e| corrupt(format!("{name}: {e}")))?;
            let want = manifest.sha256.get(name).ok_or_else(|| corrupt(format!("{name}: no checksum")))?;
            if &sha256_hex(text.as_bytes()) != want {
                return Err(corrupt(format!("{name}: checksum mismatch")));
            }
            let (_, m) = read_matrix::<F>(&text).map_err(|e| corrupt(format!("{name}: {e}")))?;
            Ok(m)
        };
        let change = read(&g.change)?;
        let inverse = read(&g.inverse)?;
        if g.offsets.last() != Some(&change.cols()) || !change.is_square() || !inverse.is_square() {
            return Err(corrupt(format!("grid {}: inconsistent shapes", g.kind)));
        }
        sums.push(DirectSum::from_parts(g.offsets.clone(), change, inverse));
    }
    SplitSystem::from_direct_sums(scheme, dual, sums).map_err(|e| corrupt(e.to_string()))
}

/// Loads the entry for `key`, or `None` if there is none.
pub fn cache_load(root: &Path, key: &str, scheme: &SchemeData, dual: &DualData) -> Result<Option<AnySplit>, CacheError> {
    let dir = entry_dir(root, key);
    let path = dir.join("manifest.json");
    if !path.exists() {
        return Ok(None);
    }
    let corrupt = |msg: String| CacheError::Corrupt(dir.clone(), msg);
    let text = fs::read_to_string(&path)?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| corrupt(format!("manifest: {e}")))?;
    if manifest.key != key {
        return Err(corrupt("manifest key mismatch".into()));
    }
    if manifest.grids.len() != 4 {
        return Err(corrupt("expected four grids".into()));
    }
    match manifest.entry.as_str() {
        "rational" => Ok(Some(AnySplit::Rational(load_grids::<Rational>(&dir, &manifest, scheme, dual)?))),
        "scalar" => Ok(Some(AnySplit::Scalar(load_grids::<Scalar>(&dir, &manifest, scheme, dual)?))),
        other => Err(corrupt(format!("unknown entry type {other}"))),
    }
}

/// The matrix dumps of a split system, by file name, for bit-level comparison.
pub fn split_dumps(split: &AnySplit) -> Vec<(String, String)> {
    fn dumps<F: ExactEntry>(s: &SplitSystem<F>) -> Vec<(String, String)> {
        Kind::ALL
            .into_iter()
            .zip(s.direct_sums())
            .flat_map(|(kind, ds)| {
                [
                    (format!("{kind}.change.txt"), write_matrix(ds.change(), s.field())),
                    (format!("{kind}.inverse.txt"), write_matrix(ds.inverse(), s.field())),
                ]
            })
            .collect()
    }
    match split {
        AnySplit::Rational(s) => dumps(s),
        AnySplit::Scalar(s) => dumps(s),
    }
}
