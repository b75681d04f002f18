use rand::Rng;
use scnn_core::theory::bound_validation;
use scnn_core::{
    m_min_bound, Activation, BoundQuery, ReferenceNetwork, Role, StreamKey, TargetFunction,
};
use serde_json::json;

use super::{grid_for, load_reference, resolve_target, usage};
use crate::args::BoundArgs;
use crate::output::{Meta, OutDir};
use crate::{Context, Failure};

/// Weights, biases and output weights uniform in [-1, 1].
fn random_network(n: usize, width: usize, key: &StreamKey) -> Result<ReferenceNetwork, Failure> {
    let mut rng = key.with(Role::Custom(1), 0, 0).rng();
    let mut draw = || rng.gen_range(-1.0..=1.0);
    let weights = (0..width)
        .map(|_| (0..n).map(|_| draw()).collect())
        .collect();
    let biases = (0..width).map(|_| draw()).collect();
    let alphas = (0..width).map(|_| draw()).collect();
    Ok(ReferenceNetwork::new(
        "random",
        weights,
        biases,
        alphas,
        Activation::Sigmoid,
    )?)
}

pub fn run(ctx: &Context, a: &BoundArgs) -> Result<(), Failure> {
    let cfg = &ctx.config.bound;
    let loaded = a.network.as_deref().map(load_reference).transpose()?;
    let net_dims = loaded.as_ref().map(|(net, _)| (net.dim(), net.width()));
    let n = a
        .dim
        .or(cfg.n)
        .or(net_dims.map(|d| d.0))
        .ok_or_else(|| usage("input dimension missing; pass --n"))?;
    let width = a
        .width
        .or(cfg.width)
        .or(net_dims.map(|d| d.1))
        .ok_or_else(|| usage("hidden width missing; pass --N"))?;
    let epsilon = a
        .epsilon
        .or(cfg.epsilon)
        .ok_or_else(|| usage("epsilon missing; pass --epsilon"))?;
    let delta = a
        .delta
        .or(cfg.delta)
        .ok_or_else(|| usage("delta missing; pass --delta"))?;
    let mut q = BoundQuery::new(n, width, epsilon, delta);
    if let Some(s) = a.alpha_sum.or(cfg.alpha_sum) {
        q = q.with_alpha_sum(s);
    } else if let Some((net, _)) = &loaded {
        q = q.with_alpha_sum(BoundQuery::from_network(net, epsilon, delta).alpha());
    }
    if let Some((d, w)) = net_dims {
        if (d, w) != (n, width) {
            return Err(usage(format!(
                "network has shape n={d}, N={w} but the query says n={n}, N={width}"
            )));
        }
    }
    let value = q.value()?;
    let m_min = m_min_bound(&q)?;
    println!(
        "(n+1)^2 A^2 / (eps^2 delta) = {value}  with A = {}",
        q.alpha()
    );
    println!("M_min = {m_min}");

    let mut settings = json!({ "query": q });
    let mut report = json!({ "query": q, "alpha": q.alpha(), "value": value, "M_min": m_min });
    let mut verdict = Ok(());
    if a.validate {
        let key = StreamKey::root(ctx.seed);
        let (net, net_hash) = match loaded {
            Some(l) => l,
            None => (random_network(n, width, &key)?, "random".to_string()),
        };
        let target = a.target.clone().unwrap_or_else(|| "self".to_string());
        let f: TargetFunction = resolve_target(&target, &net)?;
        let grid = grid_for(n, a.grid.or(cfg.grid))?;
        let trials = a.trials.or(cfg.trials).unwrap_or(200);
        let v = bound_validation(
            &q,
            &net,
            &f,
            &grid,
            trials,
            ctx.mode,
            &key.fork(1),
            ctx.exec,
        )?;
        println!(
            "failure_rate {} over {} evaluations at M = {}; threshold delta + 2 SE = {}: {}",
            v.failure_rate,
            v.evaluations,
            v.len,
            v.threshold,
            if v.pass { "PASS" } else { "FAIL" }
        );
        if !v.pass {
            verdict = Err(Failure::Check(format!(
                "failure rate {} exceeds {}",
                v.failure_rate, v.threshold
            )));
        }
        settings = json!({
            "query": q,
            "network_sha256": net_hash,
            "target": target,
            "grid": grid.describe(),
            "trials": trials,
            "mode": ctx.mode,
        });
        report["validation"] = serde_json::to_value(&v).map_err(|e| usage(e.to_string()))?;
    }
    let meta = Meta::new("bound", ctx.seed, settings);
    let dir = OutDir::create(&ctx.out_dir)?;
    println!("wrote {}", dir.json("bound.json", &meta, report)?.display());
    verdict
}
