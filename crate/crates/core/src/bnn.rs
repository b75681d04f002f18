//! The "ideal" BNN `G_B(x_B) = Σ αᵢ σ(w_B,iᵀ x_B + b_B,i)` with ±1 inputs,
//! weights and biases, and stochastic binarization of real weights.
//!
//! A stored 1-bit is +1 and a 0-bit is −1, the same convention as bipolar
//! bitstreams, so `±1` multiplication is XNOR and `wᵀx = 2·popcount(XNOR) − m`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bits::PackedBits;
use crate::error::{Error, Result};
use crate::netcore::{Activation, ReferenceNetwork};
use crate::rng::{Role, StreamKey};
use crate::scgates::{apc_depth, OpCounter};

/// A vector of ±1 values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryVector(PackedBits);

impl BinaryVector {
    pub fn from_bits(bits: PackedBits) -> Self {
        BinaryVector(bits)
    }

    /// Panics on values other than ±1.
    pub fn from_signs(signs: &[i8]) -> Self {
        BinaryVector(PackedBits::from_bools(signs.iter().map(|&s| match s {
            1 => true,
            -1 => false,
            other => panic!("binary value must be ±1, got {other}"),
        })))
    }

    pub fn parse(bits: &str) -> Result<Self> {
        Ok(BinaryVector(PackedBits::parse_binary(bits)?))
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        Ok(BinaryVector(PackedBits::from_hex(hex, len)?))
    }

    pub fn to_hex(&self) -> String {
        self.0.to_hex()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &PackedBits {
        &self.0
    }

    pub fn sign(&self, k: usize) -> i8 {
        if self.0.get(k) {
            1
        } else {
            -1
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.len()).map(|k| self.sign(k)).collect()
    }

    pub fn negate(&self) -> BinaryVector {
        BinaryVector(self.0.not())
    }

    /// `Σ_k a_k·b_k` over ±1 values, via `2·popcount(XNOR(a, b)) − m`.
    pub fn dot(&self, other: &BinaryVector) -> Result<i64> {
        let agree = self.0.xnor_count(&other.0)? as i64;
        Ok(2 * agree - self.len() as i64)
    }
}

/// `clip((x + 1) / 2, 0, 1)`
pub fn hard_sigmoid(x: f64) -> f64 {
    ((x + 1.0) / 2.0).clamp(0.0, 1.0)
}

/// +1 with probability `hard_sigmoid(w)`, else −1.
pub fn binarize(w: f64, key: &StreamKey) -> i8 {
    if key.uniform() < hard_sigmoid(w) {
        1
    } else {
        -1
    }
}

/// Binarizes `values[k]` with substream `(role, row, k)`.
pub fn binarize_vector(values: &[f64], role: Role, row: u64, key: &StreamKey) -> BinaryVector {
    BinaryVector(PackedBits::from_bools(
        values
            .iter()
            .enumerate()
            .map(|(k, &v)| binarize(v, &key.with(role, row, k as u64)) == 1),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinaryNetwork {
    name: String,
    dim: usize,
    weights: Vec<BinaryVector>,
    biases: BinaryVector,
    output_weights: Vec<f64>,
    activation: Activation,
}

impl BinaryNetwork {
    pub fn new(
        name: impl Into<String>,
        weights: Vec<BinaryVector>,
        biases: BinaryVector,
        output_weights: Vec<f64>,
        activation: Activation,
    ) -> Result<Self> {
        let width = weights.len();
        if width == 0 {
            return Err(Error::schema("N", "hidden width must be at least 1"));
        }
        let dim = weights[0].len();
        if dim == 0 {
            return Err(Error::schema("m", "input width must be at least 1"));
        }
        if let Some(i) = weights.iter().position(|w| w.len() != dim) {
            return Err(Error::schema(
                format!("hidden_weights[{i}]"),
                format!("has {} bits, expected m = {dim}", weights[i].len()),
            ));
        }
        if biases.len() != width {
            return Err(Error::schema(
                "hidden_biases",
                format!("has {} bits, expected N = {width}", biases.len()),
            ));
        }
        if output_weights.len() != width {
            return Err(Error::schema(
                "output_weights",
                format!("has {} entries, expected N = {width}", output_weights.len()),
            ));
        }
        if let Some(i) = output_weights.iter().position(|a| !a.is_finite()) {
            return Err(Error::schema(
                format!("output_weights[{i}]"),
                "value is not finite",
            ));
        }
        Ok(BinaryNetwork {
            name: name.into(),
            dim,
            weights,
            biases,
            output_weights,
            activation,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Binary input width `m`.
    pub fn input_bits(&self) -> usize {
        self.dim
    }

    pub fn width(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[BinaryVector] {
        &self.weights
    }

    pub fn biases(&self) -> &BinaryVector {
        &self.biases
    }

    pub fn bias(&self, unit: usize) -> i8 {
        self.biases.sign(unit)
    }

    pub fn output_weights(&self) -> &[f64] {
        &self.output_weights
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Integer preactivation `w_B,iᵀ x_B + b_B,i`.
    pub fn preactivation(&self, unit: usize, x: &BinaryVector) -> Result<i64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self.weights[unit].dot(x)? + i64::from(self.bias(unit)))
    }
}

/// Each hidden weight and bias is binarized independently; output weights are copied.
pub fn binarize_network(net: &ReferenceNetwork, key: &StreamKey) -> BinaryNetwork {
    let weights = net
        .hidden_weights()
        .iter()
        .enumerate()
        .map(|(i, row)| binarize_vector(row, Role::BinarizeWeight, i as u64, key))
        .collect();
    let biases = BinaryVector(PackedBits::from_bools(
        net.hidden_biases()
            .iter()
            .enumerate()
            .map(|(i, &b)| binarize(b, &key.with(Role::BinarizeBias, i as u64, 0)) == 1),
    ));
    BinaryNetwork::new(
        net.name(),
        weights,
        biases,
        net.output_weights().to_vec(),
        net.activation(),
    )
    .expect("shape inherited from a valid reference network")
}

pub fn forward_bnn(bnet: &BinaryNetwork, x: &BinaryVector) -> Result<f64> {
    forward_bnn_metered(bnet, x, &mut OpCounter::default())
}

/// Counts `m + 1` XNORs (inputs plus bias) and an `(m + 1)`-input counter per unit.
pub fn forward_bnn_metered(
    bnet: &BinaryNetwork,
    x: &BinaryVector,
    meter: &mut OpCounter,
) -> Result<f64> {
    let act = bnet.activation();
    let terms = bnet.input_bits() + 1;
    let mut out = 0.0;
    for (unit, alpha) in bnet.output_weights().iter().enumerate() {
        let pre = bnet.preactivation(unit, x)?;
        meter.xnor_ops += terms as u64;
        meter.apc_bit_adds += terms as u64 * apc_depth(terms);
        out += alpha * act.apply(pre as f64);
    }
    Ok(out)
}

/// On-disk form: the reference weight schema with `"binary": true` and
/// hex-packed bit fields (first bit = MSB of the first digit).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinaryNetworkFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
    pub name: String,
    pub binary: bool,
    pub m: usize,
    #[serde(rename = "N")]
    pub width: usize,
    pub activation: Activation,
    pub hidden_weights: Vec<String>,
    pub hidden_biases: String,
    pub output_weights: Vec<f64>,
}

impl From<&BinaryNetwork> for BinaryNetworkFile {
    fn from(b: &BinaryNetwork) -> Self {
        BinaryNetworkFile {
            meta: None,
            name: b.name.clone(),
            binary: true,
            m: b.dim,
            width: b.width(),
            activation: b.activation,
            hidden_weights: b.weights.iter().map(BinaryVector::to_hex).collect(),
            hidden_biases: b.biases.to_hex(),
            output_weights: b.output_weights.clone(),
        }
    }
}

impl TryFrom<BinaryNetworkFile> for BinaryNetwork {
    type Error = Error;

    fn try_from(f: BinaryNetworkFile) -> Result<Self> {
        if !f.binary {
            return Err(Error::schema("binary", "must be true for a binary network"));
        }
        if f.width == 0 {
            return Err(Error::schema("N", "hidden width must be at least 1"));
        }
        if f.hidden_weights.len() != f.width {
            return Err(Error::schema(
                "hidden_weights",
                format!(
                    "has {} rows, expected N = {}",
                    f.hidden_weights.len(),
                    f.width
                ),
            ));
        }
        let weights = f
            .hidden_weights
            .iter()
            .enumerate()
            .map(|(i, h)| {
                BinaryVector::from_hex(h, f.m)
                    .map_err(|e| Error::schema(format!("hidden_weights[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let biases = BinaryVector::from_hex(&f.hidden_biases, f.width)
            .map_err(|e| Error::schema("hidden_biases", e.to_string()))?;
        BinaryNetwork::new(f.name, weights, biases, f.output_weights, f.activation)
    }
}

impl BinaryNetworkFile {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn load_binary_network(path: impl AsRef<Path>) -> Result<BinaryNetwork> {
    let file: BinaryNetworkFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    file.try_into()
}

pub fn save_binary_network(net: &BinaryNetwork, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, BinaryNetworkFile::from(net).to_json()?)?;
    Ok(())
}
