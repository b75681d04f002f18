pub mod bound;
pub mod convert;
pub mod energy;
pub mod eval;
pub mod fit;
pub mod sweep;

use std::fs;
use std::path::Path;

use scnn_core::bnn::BinaryNetworkFile;
use scnn_core::netcore::NetworkFile;
use scnn_core::{BinaryNetwork, Grid, ReferenceNetwork, TargetFunction};
use serde_json::Value;

use crate::Failure;

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn grid_for(dim: usize, per_axis: Option<usize>) -> Result<Grid, Failure> {
    Ok(match per_axis {
        Some(k) => Grid::uniform(dim, k)?,
        None => Grid::default_for(dim)?,
    })
}

/// `"self"` is the network's own function.
pub fn resolve_target(name: &str, net: &ReferenceNetwork) -> Result<TargetFunction, Failure> {
    let f = if name == "self" {
        TargetFunction::from_network(net)
    } else {
        TargetFunction::parse(name)?
    };
    if f.arity() != net.dim() {
        return Err(usage(format!(
            "target {name:?} takes {} inputs but the network takes {}",
            f.arity(),
            net.dim()
        )));
    }
    Ok(f)
}

/// The target a fitted network was fitted to, else the network itself.
pub fn default_target(net: &ReferenceNetwork) -> String {
    match TargetFunction::parse(net.name()) {
        Ok(f) if f.arity() == net.dim() => net.name().to_string(),
        _ => "self".to_string(),
    }
}

pub enum Loaded {
    Reference(ReferenceNetwork),
    Binary(BinaryNetwork, Option<Value>),
}

pub struct LoadedFile {
    pub network: Loaded,
    pub sha256: String,
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

pub fn load_any(path: &Path) -> Result<LoadedFile, Failure> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| usage(format!("{} is not UTF-8", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let is_binary = value
        .get("binary")
        .and_then(Value::as_bool)
        .unwrap_or(false);
    let network = if is_binary {
        let file: BinaryNetworkFile =
            serde_json::from_value(value).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let meta = file.meta.clone();
        Loaded::Binary(file.try_into()?, meta)
    } else {
        Loaded::Reference(NetworkFile::from_json(&text)?.try_into()?)
    };
    Ok(LoadedFile {
        network,
        sha256: crate::output::sha256_hex(&bytes),
    })
}

pub fn load_reference(path: &Path) -> Result<(ReferenceNetwork, String), Failure> {
    let loaded = load_any(path)?;
    match loaded.network {
        Loaded::Reference(net) => Ok((net, loaded.sha256)),
        Loaded::Binary(..) => Err(usage(format!(
            "{} is a binary network; expected a reference network",
            path.display()
        ))),
    }
}

pub fn load_binary(path: &Path) -> Result<(BinaryNetwork, Option<Value>, String), Failure> {
    let loaded = load_any(path)?;
    match loaded.network {
        Loaded::Binary(net, meta) => Ok((net, meta, loaded.sha256)),
        Loaded::Reference(_) => Err(usage(format!(
            "{} is a reference network; expected a binary network",
            path.display()
        ))),
    }
}
