use scnn_core::netcore::NetworkFile;
use scnn_core::{fit_reference, StreamKey, TargetFunction};
use serde_json::json;

use super::{grid_for, usage};
use crate::args::FitArgs;
use crate::output::{Meta, OutDir};
use crate::{Context, Failure};

pub fn run(ctx: &Context, a: &FitArgs) -> Result<(), Failure> {
    let target = a
        .target
        .clone()
        .or_else(|| ctx.config.target.clone())
        .ok_or_else(|| {
            usage("no target function given; pass --target (e.g. sin, identity, constant:0.3)")
        })?;
    let f = TargetFunction::parse(&target)?;
    let width = a.width.or(ctx.config.fit.width).unwrap_or(32);
    let grid = grid_for(f.arity(), a.grid.or(ctx.config.fit.grid))?;

    let out = fit_reference(&f, width, &grid, &StreamKey::root(ctx.seed))?;
    let meta = Meta::new(
        "fit",
        ctx.seed,
        json!({ "target": f.name(), "N": width, "grid": grid.describe() }),
    );
    let dir = OutDir::create(&ctx.out_dir)?;
    let mut file = NetworkFile::from(&out.network);
    file.meta = Some(meta.to_value());
    let net_path = dir.raw_json("network.json", &file)?;
    let report = json!({
        "target": f.name(),
        "N": width,
        "grid": grid.describe(),
        "sup_error": out.sup_error,
        "ridge": out.ridge,
        "options": out.options,
    });
    let report_path = dir.json("fit_report.json", &meta, report)?;
    println!("target {}  N {}  grid {}", f.name(), width, grid.describe());
    println!("sup_error {}", out.sup_error);
    println!("wrote {}", net_path.display());
    println!("wrote {}", report_path.display());
    Ok(())
}
