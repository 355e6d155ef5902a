//! JSON run configuration for `bench`.

use std::path::{Path, PathBuf};

use dsetdist_core::synth::{LabelKind, Preprocess, SceneConfig};
use dsetdist_core::transfer::{Pipeline, Task};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config is not valid JSON: {0}")]
    Json(#[source] serde_json::Error),
    #[error("config does not match the schema: {0}")]
    Schema(#[source] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

/// Where the datasets of a run come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    /// CSV or DSD files; relative paths resolve against the config file.
    Files { paths: Vec<PathBuf> },
    /// One dataset per area of a generated scene.
    Scene {
        #[serde(default)]
        scene: SceneConfig,
        #[serde(default = "default_preprocess")]
        preprocess: Preprocess,
        #[serde(default = "default_labels")]
        labels: Option<LabelKind>,
    },
}

fn default_preprocess() -> Preprocess {
    Preprocess::AngleDelay
}

fn default_labels() -> Option<LabelKind> {
    Some(LabelKind::Beam)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub datasets: DatasetSource,
    /// Pooled standardization before anything else.
    #[serde(default)]
    pub standardize: bool,
    #[serde(default)]
    pub task: Task,
    pub pipelines: Vec<Pipeline>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub include_diagonal: bool,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Parses and validates a config. `flag_seed` applies when the config has
    /// no `seed`; the resulting run seed also fills every embedding and scene
    /// seed the config leaves out.
    pub fn from_json(text: &str, flag_seed: Option<u64>) -> Result<Self, ConfigError> {
        let mut value: Value = serde_json::from_str(text).map_err(ConfigError::Json)?;
        let seed = value
            .get("seed")
            .and_then(Value::as_u64)
            .or(flag_seed)
            .unwrap_or(0);
        fill_seeds(&mut value, seed);
        let mut config: RunConfig = serde_json::from_value(value).map_err(ConfigError::Schema)?;
        config.seed = Some(seed);
        config.validate()?;
        Ok(config)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pipelines.is_empty() {
            return Err(ConfigError::Invalid("`pipelines` is empty".into()));
        }
        if let DatasetSource::Files { paths } = &self.datasets {
            if paths.len() < 2 {
                return Err(ConfigError::Invalid(format!(
                    "need at least 2 dataset files, got {}",
                    paths.len()
                )));
            }
        }
        if let DatasetSource::Scene { scene, .. } = &self.datasets {
            scene.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        if self.threads == Some(0) {
            return Err(ConfigError::Invalid("`threads` must be positive".into()));
        }
        Ok(())
    }

    /// Rewrites relative file paths against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        if let DatasetSource::Files { paths } = &mut self.datasets {
            for p in paths.iter_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
    }
}

fn fill_seeds(value: &mut Value, seed: u64) {
    let set = |obj: &mut Value| {
        if let Some(map) = obj.as_object_mut() {
            map.entry("seed").or_insert(Value::from(seed));
        }
    };
    if let Some(pipelines) = value.get_mut("pipelines").and_then(Value::as_array_mut) {
        for p in pipelines {
            if let Some(embedded) = p.get_mut("space").and_then(|s| s.get_mut("embedded")) {
                set(embedded);
            }
        }
    }
    if let Some(datasets) = value.get_mut("datasets") {
        if datasets.get("source").and_then(Value::as_str) == Some("scene") {
            let map = datasets.as_object_mut().expect("object with a source tag");
            set(map.entry("scene").or_insert_with(|| Value::Object(Default::default())));
        }
    }
}
