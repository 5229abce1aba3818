//! Corpus persistence as a plain directory:
//!
//! ```text
//! root/
//!   manifest.json      format version, ids, creation time
//!   rubric.json
//!   works/<id>.md      heading markup with front matter
//!   reviews/<id>.json
//! ```
//!
//! Every file is written to a temporary sibling and renamed into place, so
//! readers see either the old file or the new one. The manifest goes last.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{parse_rubric, parse_work, ReviewCorpus, ReviewMap, Violation};

pub const FORMAT_VERSION: &str = "1";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const RUBRIC_FILE: &str = "rubric.json";
pub const WORKS_DIR: &str = "works";
pub const REVIEWS_DIR: &str = "reviews";

#[derive(Debug, Error)]
pub enum StorageError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Serialization { path: PathBuf, message: String },
    #[error("missing file {0}")]
    MissingFile(PathBuf),
    #[error("format version {found:?} is not supported (expected {expected:?})")]
    FormatVersionMismatch { found: String, expected: String },
    #[error("{} review(s) failed validation", .0.len())]
    ValidationFailed(Vec<(String, Vec<Violation>)>),
    #[error("id {0:?} cannot be used as a file name")]
    InvalidId(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub version: String,
    pub rubric_id: String,
    pub work_ids: Vec<String>,
    pub review_ids: Vec<String>,
    /// RFC 3339, UTC.
    pub created_at: String,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StorageError + '_ {
    move |source| StorageError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Ids become file names, so keep them to `[A-Za-z0-9._-]` and not
/// starting with a dot.
pub fn is_storable_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-'))
}

fn checked(id: &str) -> Result<&str, StorageError> {
    if is_storable_id(id) {
        Ok(id)
    } else {
        Err(StorageError::InvalidId(id.to_string()))
    }
}

type Hook<'a> = &'a mut dyn FnMut(&Path) -> io::Result<()>;

fn write_atomic_hooked(path: &Path, bytes: &[u8], before_rename: Hook<'_>) -> Result<(), StorageError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::Builder::new()
        .prefix(".rubriq-")
        .suffix(".tmp")
        .tempfile_in(dir)
        .map_err(io_err(path))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    before_rename(path).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| StorageError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

/// Write `bytes` to `path` via a temporary file and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StorageError> {
    write_atomic_hooked(path, bytes, &mut |_| Ok(()))
}

fn to_json<T: Serialize>(value: &T, path: &Path) -> Result<Vec<u8>, StorageError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| StorageError::Serialization {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    s.push('\n');
    Ok(s.into_bytes())
}

pub fn save_corpus(corpus: &ReviewCorpus, root: &Path) -> Result<CorpusManifest, StorageError> {
    save_corpus_hooked(corpus, root, &mut |_| Ok(()))
}

fn save_corpus_hooked(
    corpus: &ReviewCorpus,
    root: &Path,
    hook: Hook<'_>,
) -> Result<CorpusManifest, StorageError> {
    for w in &corpus.works {
        checked(&w.id)?;
    }
    for r in &corpus.reviews {
        checked(&r.id)?;
    }
    let works_dir = root.join(WORKS_DIR);
    let reviews_dir = root.join(REVIEWS_DIR);
    fs::create_dir_all(&works_dir).map_err(io_err(&works_dir))?;
    fs::create_dir_all(&reviews_dir).map_err(io_err(&reviews_dir))?;

    let rubric_path = root.join(RUBRIC_FILE);
    write_atomic_hooked(&rubric_path, corpus.rubric.to_json().as_bytes(), hook)?;
    for w in &corpus.works {
        let path = works_dir.join(format!("{}.md", w.id));
        write_atomic_hooked(&path, w.to_markup().as_bytes(), hook)?;
    }
    for r in &corpus.reviews {
        let path = reviews_dir.join(format!("{}.json", r.id));
        write_atomic_hooked(&path, &to_json(r, &path)?, hook)?;
    }

    let manifest = CorpusManifest {
        version: FORMAT_VERSION.to_string(),
        rubric_id: corpus.rubric.id.clone(),
        work_ids: corpus.works.iter().map(|w| w.id.clone()).collect(),
        review_ids: corpus.reviews.iter().map(|r| r.id.clone()).collect(),
        created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    let path = root.join(MANIFEST_FILE);
    write_atomic_hooked(&path, &to_json(&manifest, &path)?, hook)?;
    Ok(manifest)
}

fn read(path: &Path) -> Result<String, StorageError> {
    fs::read_to_string(path).map_err(|e| {
        if e.kind() == io::ErrorKind::NotFound {
            StorageError::MissingFile(path.to_path_buf())
        } else {
            StorageError::Io {
                path: path.to_path_buf(),
                source: e,
            }
        }
    })
}

fn malformed(path: &Path, message: impl ToString) -> StorageError {
    StorageError::Serialization {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

pub fn load_manifest(root: &Path) -> Result<CorpusManifest, StorageError> {
    let path = root.join(MANIFEST_FILE);
    let raw: serde_json::Value = serde_json::from_str(&read(&path)?).map_err(|e| malformed(&path, e))?;
    // Check the version before the shape so newer layouts report clearly.
    let version = raw.get("version").and_then(|v| v.as_str()).unwrap_or_default();
    if version != FORMAT_VERSION {
        return Err(StorageError::FormatVersionMismatch {
            found: version.to_string(),
            expected: FORMAT_VERSION.to_string(),
        });
    }
    serde_json::from_value(raw).map_err(|e| malformed(&path, e))
}

/// Load and validate every review against its work and the rubric.
pub fn load_corpus(root: &Path) -> Result<ReviewCorpus, StorageError> {
    let manifest = load_manifest(root)?;

    let rubric_path = root.join(RUBRIC_FILE);
    let rubric = parse_rubric(&read(&rubric_path)?).map_err(|e| malformed(&rubric_path, e))?;
    if rubric.id != manifest.rubric_id {
        return Err(malformed(
            &rubric_path,
            format!("rubric id {:?} but manifest lists {:?}", rubric.id, manifest.rubric_id),
        ));
    }

    let mut works = Vec::with_capacity(manifest.work_ids.len());
    for id in &manifest.work_ids {
        let path = root.join(WORKS_DIR).join(format!("{}.md", checked(id)?));
        let work = parse_work(&read(&path)?).map_err(|e| malformed(&path, e))?;
        if &work.id != id {
            return Err(malformed(&path, format!("holds work {:?}", work.id)));
        }
        works.push(work);
    }

    let mut reviews = Vec::with_capacity(manifest.review_ids.len());
    for id in &manifest.review_ids {
        let path = root.join(REVIEWS_DIR).join(format!("{}.json", checked(id)?));
        let review: ReviewMap = serde_json::from_str(&read(&path)?).map_err(|e| malformed(&path, e))?;
        if &review.id != id {
            return Err(malformed(&path, format!("holds review {:?}", review.id)));
        }
        reviews.push(review);
    }

    let corpus = ReviewCorpus {
        works,
        reviews,
        rubric,
    };
    let violations = corpus.violations();
    if !violations.is_empty() {
        return Err(StorageError::ValidationFailed(violations));
    }
    Ok(corpus)
}
