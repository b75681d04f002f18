use scnn_core::energy::write_energy_csv;
use scnn_core::{bnn_layer_energy, layer_energy};
use serde_json::json;

use super::usage;
use crate::args::EnergyArgs;
use crate::output::{Meta, OutDir};
use crate::{Context, Failure};

pub fn run(ctx: &Context, a: &EnergyArgs) -> Result<(), Failure> {
    let cfg = &ctx.config.energy;
    let (report, settings) = match &a.bnn {
        Some(v) => {
            let (m, width) = (v[0], v[1]);
            let chunk = a.len.unwrap_or(1);
            (
                bnn_layer_energy(m, width, ctx.mode, chunk)?,
                json!({ "bnn": { "m": m, "N": width, "chunk": chunk }, "mode": ctx.mode }),
            )
        }
        None => {
            let n = a
                .dim
                .or(cfg.n)
                .ok_or_else(|| usage("input dimension missing; pass --n or --bnn m N"))?;
            let len = a
                .len
                .or(cfg.len)
                .ok_or_else(|| usage("stream length missing; pass --M"))?;
            let width = a.width.or(cfg.width).unwrap_or(1);
            (
                layer_energy(n, len, width, ctx.mode)?,
                json!({ "n": n, "M": len, "N": width, "mode": ctx.mode }),
            )
        }
    };
    let meta = Meta::new("energy", ctx.seed, settings);
    let dir = OutDir::create(&ctx.out_dir)?;
    let mut csv = Vec::new();
    write_energy_csv(std::slice::from_ref(&report), &mut csv)?;
    let paths = [
        dir.json("energy.json", &meta, &report)?,
        dir.csv("energy.csv", &meta, &csv)?,
    ];

    match report.m {
        Some(m) => println!(
            "BNN layer m={m} (as n={} x M={}), N={}, mode {}",
            report.n, report.len, report.width, report.mode
        ),
        None => println!(
            "SC layer n={}, M={}, N={}, mode {}",
            report.n, report.len, report.width, report.mode
        ),
    }
    println!(
        "xnor {}  and {}  mux_select {}  apc_bit_adds {}  total {}  {}",
        report.xnor_ops,
        report.and_ops,
        report.mux_select_ops,
        report.apc_bit_adds,
        report.total,
        report.asymptotic_label
    );
    for p in &paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}
