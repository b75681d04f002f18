//! JSON weight files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Activation, ReferenceNetwork};
use crate::bitstream::PreScaleSet;
use crate::error::{Error, Result};

/// On-disk form of a [`ReferenceNetwork`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
    pub name: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub width: usize,
    pub activation: Activation,
    pub hidden_weights: Vec<Vec<f64>>,
    pub hidden_biases: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub prescale: PreScaleSet,
}

impl From<&ReferenceNetwork> for NetworkFile {
    fn from(net: &ReferenceNetwork) -> Self {
        NetworkFile {
            meta: None,
            name: net.name().to_string(),
            n: net.dim(),
            width: net.width(),
            activation: net.activation(),
            hidden_weights: net.hidden_weights().to_vec(),
            hidden_biases: net.hidden_biases().to_vec(),
            output_weights: net.output_weights().to_vec(),
            prescale: net.prescale().clone(),
        }
    }
}

impl TryFrom<NetworkFile> for ReferenceNetwork {
    type Error = Error;

    fn try_from(file: NetworkFile) -> Result<Self> {
        if file.width == 0 {
            return Err(Error::schema("N", "hidden width must be at least 1"));
        }
        if file.n == 0 {
            return Err(Error::schema("n", "input dimension must be at least 1"));
        }
        if file.hidden_weights.len() != file.width {
            return Err(Error::schema(
                "hidden_weights",
                format!(
                    "has {} rows, expected N = {}",
                    file.hidden_weights.len(),
                    file.width
                ),
            ));
        }
        if let Some((i, row)) = file
            .hidden_weights
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != file.n)
        {
            return Err(Error::schema(
                format!("hidden_weights[{i}]"),
                format!("row has length {}, expected n = {}", row.len(), file.n),
            ));
        }
        ReferenceNetwork::with_prescale(
            file.name,
            file.hidden_weights,
            file.hidden_biases,
            file.output_weights,
            file.activation,
            file.prescale,
        )
    }
}

impl NetworkFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn load_network(path: impl AsRef<Path>) -> Result<ReferenceNetwork> {
    let text = fs::read_to_string(path)?;
    NetworkFile::from_json(&text)?.try_into()
}

pub fn save_network(net: &ReferenceNetwork, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, NetworkFile::from(net).to_json()?)?;
    Ok(())
}
