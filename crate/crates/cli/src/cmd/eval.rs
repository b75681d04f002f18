use scnn_core::bnn::{binarize_vector, forward_bnn};
use scnn_core::{binarize_network, forward_scnn, BinaryVector, Role, ScnnConfig, StreamKey};
use serde_json::json;

use super::{load_any, usage, Loaded};
use crate::args::EvalArgs;
use crate::output::{Meta, OutDir};
use crate::{Context, Failure};

fn parse_point(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad coordinate {p:?} in --x")))
        })
        .collect()
}

pub fn run(ctx: &Context, a: &EvalArgs) -> Result<(), Failure> {
    let loaded = load_any(&a.network)?;
    let key = StreamKey::root(ctx.seed);
    let (settings, result) = match loaded.network {
        Loaded::Binary(bnet, _) => {
            let x = BinaryVector::parse(a.x.trim())?;
            let pre = (0..bnet.width())
                .map(|i| bnet.preactivation(i, &x))
                .collect::<Result<Vec<_>, _>>()?;
            let y = forward_bnn(&bnet, &x)?;
            println!("bnn {y}");
            (
                json!({ "network_sha256": loaded.sha256, "x": a.x }),
                json!({ "kind": "bnn", "x": x.bits().to_string(), "preactivations": pre, "bnn": y }),
            )
        }
        Loaded::Reference(net) => {
            let x = parse_point(&a.x)?;
            net.check_input(&x)?;
            let len = a.len.unwrap_or(1024);
            let reference = net.forward(&x)?;
            let scnn = forward_scnn(&net, &x, &ScnnConfig::new(len, ctx.mode, key))?;
            let bnet = binarize_network(&net, &key);
            let xb = binarize_vector(&x, Role::BinarizeInput, 0, &key);
            let bnn = forward_bnn(&bnet, &xb)?;
            println!("reference {reference}");
            println!("scnn      {scnn}  (M = {len}, mode {})", ctx.mode);
            println!(
                "bnn       {bnn}  (binarized weights and input {})",
                xb.bits()
            );
            (
                json!({ "network_sha256": loaded.sha256, "x": x, "M": len, "mode": ctx.mode }),
                json!({
                    "kind": "reference",
                    "x": x,
                    "M": len,
                    "mode": ctx.mode,
                    "reference": reference,
                    "scnn": scnn,
                    "bnn": bnn,
                    "bnn_input_bits": xb.bits().to_string(),
                }),
            )
        }
    };
    let meta = Meta::new("eval", ctx.seed, settings);
    let dir = OutDir::create(&ctx.out_dir)?;
    println!("wrote {}", dir.json("eval.json", &meta, result)?.display());
    Ok(())
}
