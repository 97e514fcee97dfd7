//! Per-command run manifests. A manifest pins everything needed to
//! reproduce the command's outputs from the raw inputs: the resolved
//! configuration (by hash and in full), the root seed, and the tool version.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use camp_core::config::RunConfig;
use camp_core::Result;

use crate::fsio::write_atomic;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: RunConfig,
}

pub fn config_hash(cfg: &RunConfig) -> Result<String> {
    let bytes = serde_json::to_vec(cfg)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest = hasher.finalize();
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub fn write_manifest(out_dir: &Path, command: &str, cfg: &RunConfig) -> Result<()> {
    let manifest = Manifest {
        command: command.to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        seed: cfg.seed,
        config_hash: config_hash(cfg)?,
        config: cfg.clone(),
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    write_atomic(&out_dir.join("manifests").join(format!("{command}.json")), &bytes)
}
