//! On-disk model cache keyed by (rule, training view, trial), plus the
//! training log that feeds the run manifest.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::DatasetView;
use crate::error::{Error, Result};
use crate::metrics::Trainer;
use crate::rules::{decode_model, encode_model, train_trial, LearningRule, Model};

const DIGEST_LEN: usize = 32;

/// Cache key: sha256 over the rule digest, the view digest and the trial.
pub fn cache_key(rule: &LearningRule, view: &DatasetView<'_>, trial: u64) -> String {
    let mut h = Sha256::new();
    h.update(rule.digest().as_bytes());
    h.update(b"\n");
    h.update(view.digest().as_bytes());
    h.update(b"\n");
    h.update(trial.to_le_bytes());
    hex::encode(h.finalize())
}

pub fn model_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Model files: encoded model followed by the sha256 of the encoding.
#[derive(Debug, Clone)]
pub struct ModelCache {
    dir: PathBuf,
}

static TMP_COUNTER: AtomicUsize = AtomicUsize::new(0);

impl ModelCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ModelCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_of(&self, key: &str) -> PathBuf {
        self.dir.join(&key[..2]).join(format!("{key}.model"))
    }

    /// `Ok(None)` when absent. A file whose trailer does not match its body,
    /// or that does not decode, is reported as corrupt.
    pub fn load(&self, key: &str) -> Result<Option<Model>> {
        let path = self.path_of(key);
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(path, e)),
        };
        if bytes.len() < DIGEST_LEN {
            return Err(Error::Codec(format!("{} is truncated", path.display())));
        }
        let (body, trailer) = bytes.split_at(bytes.len() - DIGEST_LEN);
        if Sha256::digest(body).as_slice() != trailer {
            return Err(Error::Codec(format!("{} fails its digest check", path.display())));
        }
        decode_model(body).map(Some)
    }

    /// Writes to a temporary file and renames it into place.
    pub fn store(&self, key: &str, model: &Model) -> Result<()> {
        let path = self.path_of(key);
        let parent = path.parent().expect("cache paths have a parent");
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        let mut bytes = encode_model(model);
        let digest = Sha256::digest(&bytes);
        bytes.extend_from_slice(&digest);
        let tmp = parent.join(format!(
            ".{key}.{}.{}.tmp",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::write(&tmp, &bytes).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrainingStatus {
    Trained,
    Cached,
    Failed,
}

/// One training request as seen by the trainer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRecord {
    pub key: String,
    pub rule_digest: String,
    pub view_digest: String,
    pub trial: u64,
    pub num_train: usize,
    pub model_digest: Option<String>,
    pub status: TrainingStatus,
    pub error: Option<String>,
    pub seconds: f64,
}

/// [`Trainer`] that consults a [`ModelCache`] and logs every request.
pub struct CachingTrainer {
    cache: Option<ModelCache>,
    log: Mutex<Vec<TrainingRecord>>,
}

impl CachingTrainer {
    pub fn new(cache: Option<ModelCache>) -> Self {
        CachingTrainer {
            cache,
            log: Mutex::new(Vec::new()),
        }
    }

    /// Log entries, one per distinct key, sorted by key.
    pub fn records(&self) -> Vec<TrainingRecord> {
        let mut log = self.log.lock().expect("log lock").clone();
        log.sort_by(|a, b| a.key.cmp(&b.key));
        log.dedup_by(|later, first| {
            if later.key == first.key {
                first.seconds += later.seconds;
                true
            } else {
                false
            }
        });
        log
    }

    pub fn count(&self, status: TrainingStatus) -> usize {
        self.records().iter().filter(|r| r.status == status).count()
    }

    fn push(&self, record: TrainingRecord) {
        self.log.lock().expect("log lock").push(record);
    }
}

impl Trainer for CachingTrainer {
    fn train(&self, rule: &LearningRule, view: &DatasetView<'_>, trial: u64) -> Result<Model> {
        let start = Instant::now();
        let key = cache_key(rule, view, trial);
        let mut record = TrainingRecord {
            key: key.clone(),
            rule_digest: rule.digest(),
            view_digest: view.digest(),
            trial,
            num_train: view.len(),
            model_digest: None,
            status: TrainingStatus::Trained,
            error: None,
            seconds: 0.0,
        };
        if let Some(cache) = &self.cache {
            match cache.load(&key) {
                Ok(Some(model)) => {
                    record.model_digest = Some(model_digest(&encode_model(&model)));
                    record.status = TrainingStatus::Cached;
                    record.seconds = start.elapsed().as_secs_f64();
                    self.push(record);
                    return Ok(model);
                }
                Ok(None) => {}
                Err(e) => log::warn!("discarding cached model {key}: {e}"),
            }
        }
        match train_trial(rule, view, trial) {
            Ok(model) => {
                if let Some(cache) = &self.cache {
                    if let Err(e) = cache.store(&key, &model) {
                        log::warn!("could not cache model {key}: {e}");
                    }
                }
                record.model_digest = Some(model_digest(&encode_model(&model)));
                record.seconds = start.elapsed().as_secs_f64();
                self.push(record);
                Ok(model)
            }
            Err(e) => {
                record.status = TrainingStatus::Failed;
                record.error = Some(e.to_string());
                record.seconds = start.elapsed().as_secs_f64();
                self.push(record);
                Err(e)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::table_dataset;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ModelCache::new(dir.path());
        let data = table_dataset();
        let rule = LearningRule::knn(1);
        let key = cache_key(&rule, &data.full_view(), 0);
        assert!(cache.load(&key).unwrap().is_none());
        let model = train_trial(&rule, &data.full_view(), 0).unwrap();
        cache.store(&key, &model).unwrap();
        assert_eq!(cache.load(&key).unwrap(), Some(model));

        let path = cache.path_of(&key);
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[12] ^= 0xff;
        std::fs::write(&path, bytes).unwrap();
        assert!(cache.load(&key).is_err());
    }

    #[test]
    fn corrupt_entry_forces_retraining() {
        let dir = tempfile::tempdir().unwrap();
        let data = table_dataset();
        let rule = LearningRule::knn(1);
        let view = data.full_view();
        let first = CachingTrainer::new(Some(ModelCache::new(dir.path())));
        first.train(&rule, &view, 0).unwrap();
        assert_eq!(first.count(TrainingStatus::Trained), 1);

        let warm = CachingTrainer::new(Some(ModelCache::new(dir.path())));
        warm.train(&rule, &view, 0).unwrap();
        assert_eq!(warm.count(TrainingStatus::Cached), 1);

        let path = ModelCache::new(dir.path()).path_of(&cache_key(&rule, &view, 0));
        let mut bytes = std::fs::read(&path).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 1;
        std::fs::write(&path, bytes).unwrap();
        let after = CachingTrainer::new(Some(ModelCache::new(dir.path())));
        after.train(&rule, &view, 0).unwrap();
        assert_eq!(after.count(TrainingStatus::Trained), 1);
        assert_eq!(after.count(TrainingStatus::Cached), 0);
    }

    #[test]
    fn keys_separate_rule_view_and_trial() {
        let data = table_dataset();
        let v = data.full_view();
        let w = data.view(&[1, 2]).unwrap();
        let r = LearningRule::knn(1);
        let k = cache_key(&r, &v, 0);
        assert_ne!(k, cache_key(&r, &w, 0));
        assert_ne!(k, cache_key(&r, &v, 1));
        assert_ne!(k, cache_key(&LearningRule::knn(3), &v, 0));
    }
}
