use std::path::Path;

use scnn_core::bnn::BinaryNetworkFile;
use scnn_core::transform::UnitEquivalence;
use scnn_core::{
    binarize_network, bnn_to_scnn, preactivation_equivalence_check, scnn_to_bnn, Activation,
    BinaryNetwork, BinaryVector, Bitstream, EquivalenceReport, PackedBits, Role, StreamBundle,
    StreamKey,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{load_binary, load_reference, read_file, usage};
use crate::args::ConvertArgs;
use crate::output::{sha256_hex, Meta, OutDir};
use crate::{Context, Failure};

/// On-disk stream bundle. Streams use the `M:<len>;enc:b;<hex>` line format.
/// `source_meta` is the metadata of the BNN the bits came from, restored
/// verbatim on conversion back.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source_meta: Option<Value>,
    name: String,
    #[serde(rename = "M")]
    len: usize,
    n: usize,
    #[serde(rename = "N")]
    width: usize,
    activation: Activation,
    output_weights: Vec<f64>,
    inputs: Vec<String>,
    weights: Vec<Vec<String>>,
    biases: Vec<String>,
}

impl BundleFile {
    fn from_bundle(b: &StreamBundle) -> Self {
        let lines = |v: &[Bitstream]| v.iter().map(Bitstream::to_hex_line).collect::<Vec<_>>();
        BundleFile {
            meta: None,
            source_meta: None,
            name: b.name.clone(),
            len: b.stream_len(),
            n: b.n(),
            width: b.width(),
            activation: b.activation,
            output_weights: b.output_weights.clone(),
            inputs: lines(&b.inputs),
            weights: b.weights.iter().map(|row| lines(row)).collect(),
            biases: lines(&b.biases),
        }
    }

    fn to_bundle(&self) -> Result<StreamBundle, Failure> {
        let parse = |field: &str, v: &[String]| {
            v.iter()
                .enumerate()
                .map(|(k, s)| {
                    Bitstream::from_hex_line(s).map_err(|e| usage(format!("{field}[{k}]: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let bundle = StreamBundle {
            name: self.name.clone(),
            inputs: parse("inputs", &self.inputs)?,
            weights: self
                .weights
                .iter()
                .enumerate()
                .map(|(i, row)| parse(&format!("weights[{i}]"), row))
                .collect::<Result<_, _>>()?,
            biases: parse("biases", &self.biases)?,
            output_weights: self.output_weights.clone(),
            activation: self.activation,
        };
        if bundle.stream_len() != self.len || bundle.n() != self.n || bundle.width() != self.width {
            return Err(usage(format!(
                "bundle header says M={}, n={}, N={} but the streams give M={}, n={}, N={}",
                self.len,
                self.n,
                self.width,
                bundle.stream_len(),
                bundle.n(),
                bundle.width()
            )));
        }
        Ok(bundle)
    }
}

fn input_vector(bits: Option<&str>, m: usize, key: &StreamKey) -> Result<BinaryVector, Failure> {
    let x = match bits {
        Some(s) => BinaryVector::parse(s)?,
        None => BinaryVector::from_bits(PackedBits::from_bools(
            (0..m).map(|k| key.with(Role::BinarizeInput, 0, k as u64).word_at(0) >> 31 == 1),
        )),
    };
    if x.len() != m {
        return Err(usage(format!(
            "input has {} bits, network expects m = {m}",
            x.len()
        )));
    }
    Ok(x)
}

fn print_report(r: &EquivalenceReport) {
    println!(
        "equivalence check: m = {}, M = {}, n = {}",
        r.chunk.m(),
        r.chunk.stream_len(),
        r.chunk.n()
    );
    for UnitEquivalence {
        unit,
        sc_preactivation,
        bnn_preactivation,
        pass,
        ..
    } in &r.units
    {
        println!(
            "unit {unit}: sc {sc_preactivation} bnn {bnn_preactivation} {}",
            if *pass { "PASS" } else { "FAIL" }
        );
    }
}

fn finish(
    dir: &OutDir,
    meta: &Meta,
    r: &EquivalenceReport,
    x: &BinaryVector,
) -> Result<(), Failure> {
    print_report(r);
    let path = dir.json(
        "equivalence.json",
        meta,
        json!({ "input_bits": x.bits().to_string(), "report": r, "all_pass": r.all_pass() }),
    )?;
    println!("wrote {}", path.display());
    if r.all_pass() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "equivalence failed on units {:?}",
            r.failures()
        )))
    }
}

fn binary_file(net: &BinaryNetwork, meta: Option<Value>) -> BinaryNetworkFile {
    let mut f = BinaryNetworkFile::from(net);
    f.meta = meta;
    f
}

pub fn run(ctx: &Context, a: &ConvertArgs) -> Result<(), Failure> {
    let key = StreamKey::root(ctx.seed);
    let dir = OutDir::create(&ctx.out_dir)?;
    if a.binarize {
        let (net, hash) = load_reference(&a.input)?;
        let bnet = binarize_network(&net, &key);
        let x = input_vector(a.input_bits.as_deref(), bnet.input_bits(), &key)?;
        let len = a.len.unwrap_or(1);
        let report = preactivation_equivalence_check(&bnet, &x, len)?;
        let meta = Meta::new(
            "convert",
            ctx.seed,
            json!({ "direction": "binarize", "source_sha256": hash, "input_bits": x.bits().to_string(), "M": len }),
        );
        let path = dir.raw_json("bnn.json", &binary_file(&bnet, Some(meta.to_value())))?;
        println!(
            "binarized {} (m = {}, N = {})",
            net.name(),
            bnet.input_bits(),
            bnet.width()
        );
        println!("wrote {}", path.display());
        finish(&dir, &meta, &report, &x)
    } else if let Some(len) = a.to_scnn {
        let (bnet, source_meta, hash) = load_binary(&a.input)?;
        let x = input_vector(a.input_bits.as_deref(), bnet.input_bits(), &key)?;
        let bundle = bnn_to_scnn(&bnet, &x, len)?;
        let report = preactivation_equivalence_check(&bnet, &x, len)?;
        let meta = Meta::new(
            "convert",
            ctx.seed,
            json!({ "direction": "to-scnn", "source_sha256": hash, "input_bits": x.bits().to_string(), "M": len }),
        );
        let mut file = BundleFile::from_bundle(&bundle);
        file.meta = Some(meta.to_value());
        file.source_meta = source_meta;
        let path = dir.raw_json("bundle.json", &file)?;
        println!(
            "{} streams of length {} per unit, N = {}",
            bundle.n(),
            len,
            bundle.width()
        );
        println!("wrote {}", path.display());
        finish(&dir, &meta, &report, &x)
    } else {
        let (file, hash) = read_bundle(&a.input)?;
        let bundle = file.to_bundle()?;
        let (bnet, x) = scnn_to_bnn(&bundle)?;
        let len = bundle.stream_len();
        let report = preactivation_equivalence_check(&bnet, &x, len)?;
        let meta = Meta::new(
            "convert",
            ctx.seed,
            json!({ "direction": "to-bnn", "source_sha256": hash }),
        );
        let restored = file.source_meta.clone().unwrap_or_else(|| meta.to_value());
        let path = dir.raw_json("bnn.json", &binary_file(&bnet, Some(restored)))?;
        println!(
            "recovered m = {} (n = {} x M = {}), N = {}",
            bnet.input_bits(),
            bundle.n(),
            len,
            bnet.width()
        );
        println!("input bits {}", x.bits());
        println!("wrote {}", path.display());
        finish(&dir, &meta, &report, &x)
    }
}

fn read_bundle(path: &Path) -> Result<(BundleFile, String), Failure> {
    let bytes = read_file(path)?;
    let file: BundleFile =
        serde_json::from_slice(&bytes).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok((file, sha256_hex(&bytes)))
}
