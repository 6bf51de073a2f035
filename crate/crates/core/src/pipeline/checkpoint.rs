use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{SieveConfig, SieveStats, SieveVerdict, Stage};
use crate::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "fivesq-sieve-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Progress of one sieve run over `[min, max]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    #[serde(with = "crate::serde_dec")]
    pub min: u64,
    #[serde(with = "crate::serde_dec")]
    pub max: u64,
    #[serde(with = "crate::serde_dec")]
    pub chunk_size: u64,
    pub stages: Vec<Stage>,
    pub emit_all: bool,
    pub table_hash: Option<String>,
    /// First `D` not yet processed.
    #[serde(with = "crate::serde_dec")]
    pub next: u64,
    pub verdicts: Vec<SieveVerdict>,
    pub stats: SieveStats,
    pub wall_clock_ms: u64,
}

impl Checkpoint {
    pub fn fresh(config: &SieveConfig, table_hash: Option<String>) -> Self {
        Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            min: config.min,
            max: config.max,
            chunk_size: config.chunk_size,
            stages: config.stages.clone(),
            emit_all: config.emit_all,
            table_hash,
            next: config.min,
            verdicts: Vec::new(),
            stats: SieveStats::default(),
            wall_clock_ms: 0,
        }
    }

    pub fn check_compatible(&self, config: &SieveConfig, table_hash: Option<&str>) -> Result<()> {
        let mut problems = Vec::new();
        if self.format != CHECKPOINT_FORMAT || self.version != CHECKPOINT_VERSION {
            problems.push(format!("format {} v{}", self.format, self.version));
        }
        if (self.min, self.max) != (config.min, config.max) {
            problems.push(format!("range [{}, {}]", self.min, self.max));
        }
        if self.chunk_size != config.chunk_size {
            problems.push(format!("chunk size {}", self.chunk_size));
        }
        if self.stages != config.stages {
            problems.push("stage list".into());
        }
        if self.emit_all != config.emit_all {
            problems.push("emit mode".into());
        }
        if self.table_hash.as_deref() != table_hash {
            problems.push("MW table".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Incompatible(format!("checkpoint differs in {}", problems.join(", "))))
        }
    }

    /// Write to a sibling temporary file, then rename over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = std::path::PathBuf::from(tmp);
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&serde_json::to_vec(self)?)?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::Incompatible(format!("unreadable checkpoint: {e}")))?;
        let format = value.get("format").and_then(|v| v.as_str()).unwrap_or_default();
        let version = value.get("version").and_then(|v| v.as_u64()).unwrap_or_default();
        if format != CHECKPOINT_FORMAT || version != CHECKPOINT_VERSION as u64 {
            return Err(Error::Incompatible(format!("checkpoint format {format:?} v{version} not supported")));
        }
        serde_json::from_value(value).map_err(|e| Error::Incompatible(format!("bad checkpoint: {e}")))
    }
}
