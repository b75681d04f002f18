//! Chunking between a BNN with `m` binary inputs and an SCNN with
//! `n = m / M` bipolar streams of length `M`, and back.
//!
//! Stream `j` holds bits `j·M .. (j+1)·M − 1` of the binary vector. Bias bits
//! become constant streams of length `M`.

use serde::{Deserialize, Serialize};

use crate::bits::PackedBits;
use crate::bitstream::{Bitstream, Encoding};
use crate::bnn::{BinaryNetwork, BinaryVector};
use crate::error::{Error, Result};
use crate::netcore::Activation;
use crate::scgates::{apc_sum, xnor_mult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChunkSpec {
    m: usize,
    #[serde(rename = "M")]
    len: usize,
    n: usize,
}

impl ChunkSpec {
    pub fn new(m: usize, len: usize) -> Result<Self> {
        if m == 0 || len == 0 || !m.is_multiple_of(len) {
            return Err(Error::ChunkMismatch { m, chunk: len });
        }
        Ok(ChunkSpec { m, len, n: m / len })
    }

    /// Total bit budget `m = n·M`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Chunk (stream) length `M`.
    pub fn stream_len(&self) -> usize {
        self.len
    }

    /// Number of streams `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// All `M` dividing `m`, ascending.
    pub fn divisors(m: usize) -> Vec<usize> {
        (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
    }

    fn split(&self, v: &PackedBits) -> Vec<Bitstream> {
        (0..self.n)
            .map(|j| {
                Bitstream::new(v.slice(j * self.len, self.len), Encoding::Bipolar)
                    .expect("chunk length is at least one")
            })
            .collect()
    }
}

/// SCNN-side view of a BNN instance.
#[derive(Clone, Debug, PartialEq)]
pub struct StreamBundle {
    pub name: String,
    pub inputs: Vec<Bitstream>,
    /// `weights[i][j]`: stream `j` of hidden unit `i`.
    pub weights: Vec<Vec<Bitstream>>,
    pub biases: Vec<Bitstream>,
    pub output_weights: Vec<f64>,
    pub activation: Activation,
}

impl StreamBundle {
    pub fn stream_len(&self) -> usize {
        self.inputs.first().map_or(0, Bitstream::len)
    }

    pub fn n(&self) -> usize {
        self.inputs.len()
    }

    pub fn width(&self) -> usize {
        self.weights.len()
    }
}

pub fn bnn_to_scnn(bnet: &BinaryNetwork, x: &BinaryVector, len: usize) -> Result<StreamBundle> {
    let spec = ChunkSpec::new(bnet.input_bits(), len)?;
    if x.len() != spec.m() {
        return Err(Error::DimensionMismatch {
            expected: spec.m(),
            found: x.len(),
        });
    }
    let biases = (0..bnet.width())
        .map(|i| Bitstream::constant(bnet.bias(i) == 1, len, Encoding::Bipolar))
        .collect::<Result<Vec<_>>>()?;
    Ok(StreamBundle {
        name: bnet.name().to_string(),
        inputs: spec.split(x.bits()),
        weights: bnet
            .weights()
            .iter()
            .map(|w| spec.split(w.bits()))
            .collect(),
        biases,
        output_weights: bnet.output_weights().to_vec(),
        activation: bnet.activation(),
    })
}

fn join(streams: &[Bitstream], len: usize, what: &'static str) -> Result<BinaryVector> {
    let mut out: Option<PackedBits> = None;
    for s in streams {
        if s.encoding() != Encoding::Bipolar {
            return Err(Error::EncodingMismatch {
                expected: Encoding::Bipolar,
                found: s.encoding(),
            });
        }
        if s.len() != len {
            return Err(Error::LengthMismatch {
                left: len,
                right: s.len(),
            });
        }
        out = Some(match out {
            None => s.bits().clone(),
            Some(acc) => acc.concat(s.bits()),
        });
    }
    out.map(BinaryVector::from_bits).ok_or(Error::Empty(what))
}

/// Inverse of [`bnn_to_scnn`]. Bias streams must be constant.
pub fn scnn_to_bnn(bundle: &StreamBundle) -> Result<(BinaryNetwork, BinaryVector)> {
    let len = bundle.stream_len();
    let x = join(&bundle.inputs, len, "input streams")?;
    let weights = bundle
        .weights
        .iter()
        .map(|row| {
            if row.len() != bundle.n() {
                return Err(Error::DimensionMismatch {
                    expected: bundle.n(),
                    found: row.len(),
                });
            }
            join(row, len, "weight streams")
        })
        .collect::<Result<Vec<_>>>()?;
    let mut bias_bits = Vec::with_capacity(bundle.biases.len());
    for (i, b) in bundle.biases.iter().enumerate() {
        if b.len() != len {
            return Err(Error::LengthMismatch {
                left: len,
                right: b.len(),
            });
        }
        let ones = b.popcount();
        if ones != 0 && ones != len as u64 {
            return Err(Error::schema(
                format!("biases[{i}]"),
                "bias stream is not constant",
            ));
        }
        bias_bits.push(ones != 0);
    }
    let net = BinaryNetwork::new(
        bundle.name.clone(),
        weights,
        BinaryVector::from_bits(PackedBits::from_bools(bias_bits)),
        bundle.output_weights.clone(),
        bundle.activation,
    )?;
    debug_assert_eq!(net.input_bits(), bundle.n() * len);
    Ok((net, x))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitEquivalence {
    pub unit: usize,
    /// Ones counted by the APC over the `n` product streams.
    pub product_total: u64,
    /// `2·product_total − n·M + b`
    pub sc_preactivation: i64,
    /// `wᵀx + b` on the binary side.
    pub bnn_preactivation: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub chunk: ChunkSpec,
    pub units: Vec<UnitEquivalence>,
}

impl EquivalenceReport {
    pub fn all_pass(&self) -> bool {
        self.units.iter().all(|u| u.pass)
    }

    pub fn failures(&self) -> Vec<usize> {
        self.units
            .iter()
            .filter(|u| !u.pass)
            .map(|u| u.unit)
            .collect()
    }
}

/// Compares the integer preactivation on both sides for every hidden unit.
///
/// The SC side runs XNOR + APC over the chunked streams. The bias stream is a
/// sign extension of one bit, so it enters the accumulator as a single ±1.
pub fn preactivation_equivalence_check(
    bnet: &BinaryNetwork,
    x: &BinaryVector,
    len: usize,
) -> Result<EquivalenceReport> {
    let chunk = ChunkSpec::new(bnet.input_bits(), len)?;
    let bundle = bnn_to_scnn(bnet, x, len)?;
    let n = chunk.n() as i64;
    let units = (0..bnet.width())
        .map(|i| {
            let products = bundle.weights[i]
                .iter()
                .zip(&bundle.inputs)
                .map(|(w, x)| xnor_mult(w, x))
                .collect::<Result<Vec<_>>>()?;
            let trace = apc_sum(&products)?;
            let b = &bundle.biases[i];
            let bias = if b.popcount() == 0 { -1 } else { 1 };
            let sc = 2 * trace.total as i64 - n * len as i64 + bias;
            let bnn = bnet.preactivation(i, x)?;
            Ok(UnitEquivalence {
                unit: i,
                product_total: trace.total,
                sc_preactivation: sc,
                bnn_preactivation: bnn,
                pass: sc == bnn,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivalenceReport { chunk, units })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BinaryVector {
        BinaryVector::parse(s).unwrap()
    }

    fn net(weights: &[&str], biases: &str) -> BinaryNetwork {
        BinaryNetwork::new(
            "t",
            weights.iter().map(|w| bv(w)).collect(),
            bv(biases),
            vec![1.0; weights.len()],
            Activation::Sigmoid,
        )
        .unwrap()
    }

    #[test]
    fn chunk_spec() {
        let c = ChunkSpec::new(12, 4).unwrap();
        assert_eq!((c.m(), c.stream_len(), c.n()), (12, 4, 3));
        assert!(matches!(
            ChunkSpec::new(12, 5),
            Err(Error::ChunkMismatch { m: 12, chunk: 5 })
        ));
        assert!(ChunkSpec::new(0, 1).is_err());
        assert!(ChunkSpec::new(4, 0).is_err());
        assert_eq!(ChunkSpec::divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn chunk_decode_examples() {
        let b = net(&["111111"], "1");
        let x = BinaryVector::from_signs(&[1, -1, 1, 1, 1, -1]);
        let s = bnn_to_scnn(&b, &x, 3).unwrap();
        assert_eq!(s.inputs.len(), 2);
        assert_eq!(s.inputs[0].decode(), 1.0 / 3.0);
        assert_eq!(s.inputs[1].decode(), 1.0 / 3.0);

        let whole = bnn_to_scnn(&b, &x, 6).unwrap();
        assert_eq!(whole.inputs.len(), 1);
        assert_eq!(whole.inputs[0].decode(), 2.0 / 6.0);

        let bits = bnn_to_scnn(&b, &x, 1).unwrap();
        let decoded: Vec<f64> = bits.inputs.iter().map(Bitstream::decode).collect();
        assert_eq!(decoded, vec![1.0, -1.0, 1.0, 1.0, 1.0, -1.0]);
        assert!(bits.biases[0].bits().iter().all(|v| v));
    }

    #[test]
    fn concatenation_example() {
        let bundle = StreamBundle {
            name: "c".into(),
            inputs: vec![
                Bitstream::parse("101", Encoding::Bipolar).unwrap(),
                Bitstream::parse("110", Encoding::Bipolar).unwrap(),
            ],
            weights: vec![vec![
                Bitstream::parse("000", Encoding::Bipolar).unwrap(),
                Bitstream::parse("111", Encoding::Bipolar).unwrap(),
            ]],
            biases: vec![Bitstream::parse("000", Encoding::Bipolar).unwrap()],
            output_weights: vec![1.0],
            activation: Activation::Tanh,
        };
        let (b, x) = scnn_to_bnn(&bundle).unwrap();
        assert_eq!(x, bv("101110"));
        assert_eq!(b.weights()[0], bv("000111"));
        assert_eq!(b.bias(0), -1);
        assert_eq!(b.input_bits(), 6);

        let single = StreamBundle {
            name: "s".into(),
            inputs: vec![Bitstream::parse("1", Encoding::Bipolar).unwrap()],
            weights: vec![vec![Bitstream::parse("1", Encoding::Bipolar).unwrap()]],
            biases: vec![Bitstream::parse("1", Encoding::Bipolar).unwrap()],
            output_weights: vec![1.0],
            activation: Activation::Tanh,
        };
        assert_eq!(scnn_to_bnn(&single).unwrap().1.signs(), vec![1]);
    }

    #[test]
    fn scnn_to_bnn_rejects_bad_bundles() {
        let b = net(&["1010", "0110"], "10");
        let x = bv("1100");
        let good = bnn_to_scnn(&b, &x, 2).unwrap();

        let mut short = good.clone();
        short.inputs[1] = Bitstream::parse("1", Encoding::Bipolar).unwrap();
        assert!(matches!(
            scnn_to_bnn(&short),
            Err(Error::LengthMismatch { .. })
        ));

        let mut uni = good.clone();
        uni.weights[0][0] = Bitstream::parse("10", Encoding::Unipolar).unwrap();
        assert!(matches!(
            scnn_to_bnn(&uni),
            Err(Error::EncodingMismatch { .. })
        ));

        let mut noisy = good.clone();
        noisy.biases[1] = Bitstream::parse("10", Encoding::Bipolar).unwrap();
        assert!(scnn_to_bnn(&noisy).is_err());

        let mut ragged = good;
        ragged.weights[1].pop();
        assert!(matches!(
            scnn_to_bnn(&ragged),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn all_plus_one_is_m_plus_one() {
        let b = net(&["11111111"], "1");
        let x = bv("11111111");
        for len in ChunkSpec::divisors(8) {
            let r = preactivation_equivalence_check(&b, &x, len).unwrap();
            assert_eq!(r.units[0].sc_preactivation, 9);
            assert_eq!(r.units[0].bnn_preactivation, 9);
            assert!(r.all_pass());
        }
    }

    #[test]
    fn brute_force_instance() {
        let b = net(&["10110010", "01100111", "00000000"], "011");
        let x = bv("11010110");
        let r = preactivation_equivalence_check(&b, &x, 4).unwrap();
        // Sign products by hand: w·x per unit.
        let expect: Vec<i64> = b
            .weights()
            .iter()
            .enumerate()
            .map(|(i, w)| {
                w.signs()
                    .iter()
                    .zip(x.signs())
                    .map(|(a, c)| i64::from(*a) * i64::from(c))
                    .sum::<i64>()
                    + i64::from(b.bias(i))
            })
            .collect();
        let got: Vec<i64> = r.units.iter().map(|u| u.bnn_preactivation).collect();
        assert_eq!(got, expect);
        assert!(r.all_pass(), "{:?}", r.failures());
    }

    #[test]
    fn chunk_must_divide() {
        let b = net(&["101010"], "1");
        assert!(bnn_to_scnn(&b, &bv("111000"), 4).is_err());
        assert!(preactivation_equivalence_check(&b, &bv("111000"), 4).is_err());
        assert!(bnn_to_scnn(&b, &bv("1110"), 2).is_err());
    }

    fn instance() -> impl Strategy<Value = (BinaryNetwork, BinaryVector, usize)> {
        (1usize..=64, 1usize..=4).prop_flat_map(|(m, width)| {
            let bits = proptest::collection::vec(any::<bool>(), m);
            (
                proptest::collection::vec(bits.clone(), width),
                proptest::collection::vec(any::<bool>(), width),
                bits,
                proptest::sample::select(ChunkSpec::divisors(m)),
            )
                .prop_map(move |(w, b, x, len)| {
                    let net = BinaryNetwork::new(
                        "p",
                        w.into_iter()
                            .map(|r| BinaryVector::from_bits(PackedBits::from_bools(r)))
                            .collect(),
                        BinaryVector::from_bits(PackedBits::from_bools(b)),
                        vec![0.5; width],
                        Activation::Sigmoid,
                    )
                    .unwrap();
                    (net, BinaryVector::from_bits(PackedBits::from_bools(x)), len)
                })
        })
    }

    proptest! {
        #[test]
        fn round_trip_and_equivalence((b, x, len) in instance()) {
            let bundle = bnn_to_scnn(&b, &x, len).unwrap();
            prop_assert_eq!(bundle.n() * bundle.stream_len(), b.input_bits());
            let (b2, x2) = scnn_to_bnn(&bundle).unwrap();
            prop_assert_eq!(&b2, &b);
            prop_assert_eq!(&x2, &x);
            prop_assert!(preactivation_equivalence_check(&b, &x, len).unwrap().all_pass());
        }
    }
}
