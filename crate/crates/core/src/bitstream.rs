//! Stochastic numbers: encodings, generation, decoding and pre-scaling.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::bits::PackedBits;
use crate::error::{Error, Result};
use crate::rng::{bernoulli_threshold, Role, StreamKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    /// `x ∈ [0, 1]`, `P(bit = 1) = x`.
    Unipolar,
    /// `x ∈ [-1, 1]`, `P(bit = 1) = (x + 1) / 2`. A 1-bit stands for +1.
    Bipolar,
}

impl Encoding {
    pub fn range(self) -> (f64, f64) {
        match self {
            Encoding::Unipolar => (0.0, 1.0),
            Encoding::Bipolar => (-1.0, 1.0),
        }
    }

    pub fn contains(self, x: f64) -> bool {
        let (lo, hi) = self.range();
        x >= lo && x <= hi
    }

    /// Probability of a 1-bit for value `x`.
    pub fn probability(self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::OutOfRange {
                value: x,
                encoding: self,
            });
        }
        Ok(match self {
            Encoding::Unipolar => x,
            Encoding::Bipolar => (x + 1.0) / 2.0,
        })
    }

    /// Value represented by `ones` 1-bits out of `len`.
    pub fn value(self, ones: u64, len: usize) -> f64 {
        let (ones, len) = (ones as f64, len as f64);
        match self {
            Encoding::Unipolar => ones / len,
            Encoding::Bipolar => (2.0 * ones - len) / len,
        }
    }

    pub fn tag(self) -> char {
        match self {
            Encoding::Unipolar => 'u',
            Encoding::Bipolar => 'b',
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Unipolar => "unipolar",
            Encoding::Bipolar => "bipolar",
        })
    }
}

/// An `M`-bit stochastic number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bitstream {
    bits: PackedBits,
    encoding: Encoding,
}

impl Bitstream {
    pub fn new(bits: PackedBits, encoding: Encoding) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::ZeroLength);
        }
        Ok(Bitstream { bits, encoding })
    }

    pub fn parse(bits: &str, encoding: Encoding) -> Result<Self> {
        Bitstream::new(PackedBits::parse_binary(bits)?, encoding)
    }

    pub fn constant(bit: bool, len: usize, encoding: Encoding) -> Result<Self> {
        let bits = if bit {
            PackedBits::ones(len)
        } else {
            PackedBits::zeros(len)
        };
        Bitstream::new(bits, encoding)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// Always false: streams have at least one bit.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    #[inline]
    pub fn bits(&self) -> &PackedBits {
        &self.bits
    }

    pub fn into_bits(self) -> PackedBits {
        self.bits
    }

    #[inline]
    pub fn popcount(&self) -> u64 {
        self.bits.count_ones()
    }

    #[inline]
    pub fn decode(&self) -> f64 {
        self.encoding.value(self.popcount(), self.len())
    }

    pub fn not(&self) -> Bitstream {
        Bitstream {
            bits: self.bits.not(),
            encoding: self.encoding,
        }
    }

    pub fn concat(&self, other: &Bitstream) -> Result<Bitstream> {
        if self.encoding != other.encoding {
            return Err(Error::EncodingMismatch {
                expected: self.encoding,
                found: other.encoding,
            });
        }
        Ok(Bitstream {
            bits: self.bits.concat(&other.bits),
            encoding: self.encoding,
        })
    }

    /// `M:<len>;enc:<u|b>;<hex>`
    pub fn to_hex_line(&self) -> String {
        format!(
            "M:{};enc:{};{}",
            self.len(),
            self.encoding.tag(),
            self.bits.to_hex()
        )
    }

    pub fn from_hex_line(line: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed bitstream line {line:?}"));
        let mut parts = line.trim().splitn(3, ';');
        let len: usize = parts
            .next()
            .and_then(|p| p.strip_prefix("M:"))
            .and_then(|v| v.parse().ok())
            .ok_or_else(bad)?;
        let encoding = match parts.next().and_then(|p| p.strip_prefix("enc:")) {
            Some("u") => Encoding::Unipolar,
            Some("b") => Encoding::Bipolar,
            _ => return Err(bad()),
        };
        let hex = parts.next().ok_or_else(bad)?;
        Bitstream::new(PackedBits::from_hex(hex, len)?, encoding)
    }
}

impl FromStr for Bitstream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Bitstream::from_hex_line(s)
    }
}

impl fmt::Display for Bitstream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex_line())
    }
}

/// Stochastic number generator: each bit is an independent Bernoulli draw
/// keyed by `(key, bit index)`.
pub fn sng_encode(x: f64, len: usize, encoding: Encoding, key: &StreamKey) -> Result<Bitstream> {
    if len == 0 {
        return Err(Error::ZeroLength);
    }
    let p = encoding.probability(x)?;
    if p == 0.0 || p == 1.0 {
        return Bitstream::constant(p == 1.0, len, encoding);
    }
    let threshold = bernoulli_threshold(p);
    let mut rng = key.rng();
    let mut words = vec![0u64; len.div_ceil(64)];
    for word in words.iter_mut() {
        let mut acc = 0u64;
        for pair in 0..32 {
            let r = rng.next_u64();
            let lo = u64::from(u64::from(r as u32) < threshold);
            let hi = u64::from((r >> 32) < threshold);
            acc |= (lo | (hi << 1)) << (2 * pair);
        }
        *word = acc;
    }
    Bitstream::new(PackedBits::from_words(words, len)?, encoding)
}

/// Bit `k` of `sng_encode(x, _, encoding, key)`, computed in isolation.
pub fn sng_bit(x: f64, encoding: Encoding, key: &StreamKey, k: u64) -> Result<bool> {
    let p = encoding.probability(x)?;
    Ok(u64::from(key.word_at(k)) < bernoulli_threshold(p))
}

pub fn decode(s: &Bitstream) -> f64 {
    s.decode()
}

pub fn popcount(s: &Bitstream) -> u64 {
    s.popcount()
}

/// Maps raw values of one role into an encoding's range by a positive factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreScaler {
    pub scale: f64,
    pub applied_to: Role,
    pub encoding: Encoding,
}

impl PreScaler {
    pub fn new(scale: f64, applied_to: Role, encoding: Encoding) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pre-scale factor must be positive and finite, got {scale}"
            )));
        }
        Ok(PreScaler {
            scale,
            applied_to,
            encoding,
        })
    }

    /// Policy scale for a set of raw values: `max(1, max |v|)`.
    pub fn covering<'a>(values: impl IntoIterator<Item = &'a f64>, applied_to: Role) -> Self {
        let m = values.into_iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        PreScaler {
            scale: m,
            applied_to,
            encoding: Encoding::Bipolar,
        }
    }

    pub fn prescale(&self, v: f64) -> Result<f64> {
        let scaled = v / self.scale;
        if !self.encoding.contains(scaled) {
            return Err(Error::OutOfRange {
                value: v,
                encoding: self.encoding,
            });
        }
        Ok(scaled)
    }

    pub fn postscale(&self, v: f64) -> f64 {
        v * self.scale
    }
}

/// Pre-scaling factors for one network.
///
/// Inputs share one factor. Each hidden unit `i` has its own weight factor
/// `s_i`, and its bias is encoded at `s_i * inputs`, so the SC sum
/// `Σ_j (w_ij/s_i)(x_j/s_x) + b_i/(s_i s_x)` is the true preactivation
/// divided by the single factor `s_i * s_x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreScaleSet {
    pub weights: Vec<f64>,
    pub inputs: f64,
    pub bias: Vec<f64>,
}

impl PreScaleSet {
    /// `inputs = max(1, input_bound)`; `s_i = max(1, max_j |w_ij|, |b_i| / inputs)`.
    pub fn for_parameters(
        hidden_weights: &[Vec<f64>],
        hidden_biases: &[f64],
        input_bound: f64,
    ) -> Self {
        let inputs = input_bound.abs().max(1.0);
        let weights: Vec<f64> = hidden_weights
            .iter()
            .zip(hidden_biases)
            .map(|(row, b)| {
                row.iter()
                    .fold(1.0f64, |acc, w| acc.max(w.abs()))
                    .max(b.abs() / inputs)
            })
            .collect();
        let bias = weights.iter().map(|s| s * inputs).collect();
        PreScaleSet {
            weights,
            inputs,
            bias,
        }
    }

    pub fn input(&self) -> PreScaler {
        PreScaler {
            scale: self.inputs,
            applied_to: Role::Input,
            encoding: Encoding::Bipolar,
        }
    }

    pub fn weight(&self, unit: usize) -> PreScaler {
        PreScaler {
            scale: self.weights[unit],
            applied_to: Role::Weight,
            encoding: Encoding::Bipolar,
        }
    }

    pub fn bias(&self, unit: usize) -> PreScaler {
        PreScaler {
            scale: self.bias[unit],
            applied_to: Role::Bias,
            encoding: Encoding::Bipolar,
        }
    }

    /// Factor that maps unit `unit`'s decoded SC sum back to its preactivation.
    pub fn preactivation_scale(&self, unit: usize) -> f64 {
        self.weights[unit] * self.inputs
    }
}
