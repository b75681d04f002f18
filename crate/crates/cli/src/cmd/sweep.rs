use scnn_core::theory::{convergence_sweep, SweepSpec};
use scnn_core::StreamKey;
use serde_json::json;

use super::{default_target, grid_for, load_reference, resolve_target};
use crate::args::SweepArgs;
use crate::output::{Meta, OutDir};
use crate::{Context, Failure};

pub const DEFAULT_LENS: [usize; 4] = [64, 256, 1024, 4096];

pub fn run(ctx: &Context, a: &SweepArgs) -> Result<(), Failure> {
    let cfg = &ctx.config.sweep;
    let path = a
        .network
        .clone()
        .or_else(|| cfg.network.clone())
        .unwrap_or_else(|| ctx.out_dir.join("network.json"));
    let (net, net_hash) = load_reference(&path)?;
    let target = a
        .target
        .clone()
        .or_else(|| ctx.config.target.clone())
        .unwrap_or_else(|| default_target(&net));
    let f = resolve_target(&target, &net)?;
    let grid = grid_for(net.dim(), a.grid.or(cfg.grid))?;
    let spec = SweepSpec {
        lens: a
            .lens
            .clone()
            .or_else(|| cfg.lens.clone())
            .unwrap_or_else(|| DEFAULT_LENS.to_vec()),
        trials: a.trials.or(cfg.trials).unwrap_or(200),
        epsilon: a.epsilon.or(cfg.epsilon).unwrap_or(0.15),
        mode: ctx.mode,
        key: StreamKey::root(ctx.seed),
    };
    spec.validate()?;

    let report = convergence_sweep(&net, &f, &grid, &spec, ctx.exec)?;
    let meta = Meta::new(
        "sweep",
        ctx.seed,
        json!({
            "network_sha256": net_hash,
            "target": target,
            "grid": grid.describe(),
            "Ms": spec.lens,
            "trials": spec.trials,
            "epsilon": spec.epsilon,
            "mode": spec.mode,
        }),
    );
    let dir = OutDir::create(&ctx.out_dir)?;
    let mut long = Vec::new();
    report.write_long_csv(&mut long)?;
    let mut plot = Vec::new();
    report.write_plot_csv(&mut plot)?;
    let written = [
        dir.csv("sweep.csv", &meta, &long)?,
        dir.csv("sweep_plot.csv", &meta, &plot)?,
        dir.json("sweep_summary.json", &meta, &report)?,
    ];

    println!(
        "network {}  target {}  grid {}  trials {}  mode {}",
        report.network, report.target, report.grid, spec.trials, spec.mode
    );
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>10}",
        "M", "sc_median", "sc_rms", "total_median", "fail_rate"
    );
    for r in &report.rows {
        println!(
            "{:>8} {:>12.6} {:>12.6} {:>12.6} {:>10.4}",
            r.len, r.sc.median, r.sc.rms, r.total.median, r.failure_rate
        );
    }
    match report.sc_median_slope {
        Some(s) => println!("log-log slope of median |G_SC - G|: {s:.4}"),
        None => println!("log-log slope of median |G_SC - G|: undefined"),
    }
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(())
}
