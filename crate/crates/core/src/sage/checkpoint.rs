//! Self-describing JSON model checkpoint. Floats are written in shortest
//! round-trip form and parsed exactly, so weights survive bit-for-bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TrainedModel;
use crate::error::{Error, Result};

pub const FORMAT: &str = "transfer-risk/sage-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub config_hash: String,
    pub layer_dims: Vec<usize>,
    pub model: TrainedModel,
}

impl Checkpoint {
    pub fn new(model: TrainedModel, config_hash: impl Into<String>) -> Self {
        Checkpoint {
            format: FORMAT.into(),
            version: VERSION,
            config_hash: config_hash.into(),
            layer_dims: model.params.dims(),
            model,
        }
    }
}

pub fn save_checkpoint(ckpt: &Checkpoint, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(ckpt)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ckpt: Checkpoint = serde_json::from_str(&text)?;
    if ckpt.format != FORMAT || ckpt.version != VERSION {
        return Err(Error::Sage(format!(
            "{}: unsupported checkpoint {} v{}",
            path.display(),
            ckpt.format,
            ckpt.version
        )));
    }
    if ckpt.model.params.dims() != ckpt.layer_dims {
        return Err(Error::Sage(format!(
            "{}: weight shapes do not match declared layer dims",
            path.display()
        )));
    }
    Ok(ckpt)
}
