//! Forward pass of the "ideal" SCNN: stochastic hidden-layer preactivations,
//! exact activation and exact real output layer.

use serde::{Deserialize, Serialize};

use crate::bitstream::{sng_encode, Encoding};
use crate::error::{Error, Result};
use crate::netcore::{Grid, ReferenceNetwork, TargetFunction};
use crate::par::{try_map_indexed, ExecPolicy};
use crate::rng::{Role, StreamKey};
use crate::scgates::{dot_product_sc_metered, AccumulationMode, OpCounter};
use crate::stats::Summary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScnnConfig {
    /// Stream length `M`.
    pub len: usize,
    pub mode: AccumulationMode,
    pub key: StreamKey,
}

impl ScnnConfig {
    pub fn new(len: usize, mode: AccumulationMode, key: StreamKey) -> Self {
        ScnnConfig { len, mode, key }
    }

    pub fn with_key(&self, key: StreamKey) -> Self {
        ScnnConfig { key, ..*self }
    }
}

/// SC estimate of hidden unit `unit`'s preactivation `wᵀx + b`.
///
/// Every weight, input coordinate and bias gets its own substream
/// `(role, unit, j)`; an input coordinate feeding several units is
/// re-encoded independently for each.
pub fn preactivation_sc(
    net: &ReferenceNetwork,
    unit: usize,
    x: &[f64],
    cfg: &ScnnConfig,
    meter: &mut OpCounter,
) -> Result<f64> {
    let m = cfg.len;
    let ps = net.prescale();
    let key = &cfg.key;
    let u = unit as u64;
    let mut ws = Vec::with_capacity(x.len());
    let mut xs = Vec::with_capacity(x.len());
    for (j, (&w, &xj)) in net.hidden_weights()[unit].iter().zip(x).enumerate() {
        let j = j as u64;
        ws.push(sng_encode(
            ps.weight(unit).prescale(w)?,
            m,
            Encoding::Bipolar,
            &key.with(Role::Weight, u, j),
        )?);
        xs.push(sng_encode(
            ps.input().prescale(xj)?,
            m,
            Encoding::Bipolar,
            &key.with(Role::Input, u, j),
        )?);
    }
    let b = net.hidden_biases()[unit];
    let bs = sng_encode(
        ps.bias(unit).prescale(b)?,
        m,
        Encoding::Bipolar,
        &key.with(Role::Bias, u, 0),
    )?;
    dot_product_sc_metered(
        &ws,
        &xs,
        &bs,
        cfg.mode,
        &key.with(Role::Mux, u, 0),
        ps.preactivation_scale(unit),
        meter,
    )
}

/// `G_SC,M(x) = Σ αᵢ σ(ŵᵢᵀx̂ + b̂ᵢ)`.
pub fn forward_scnn(net: &ReferenceNetwork, x: &[f64], cfg: &ScnnConfig) -> Result<f64> {
    forward_scnn_metered(net, x, cfg, &mut OpCounter::default())
}

pub fn forward_scnn_metered(
    net: &ReferenceNetwork,
    x: &[f64],
    cfg: &ScnnConfig,
    meter: &mut OpCounter,
) -> Result<f64> {
    if cfg.len == 0 {
        return Err(Error::ZeroLength);
    }
    net.check_input(x)?;
    let act = net.activation();
    let mut out = 0.0;
    for (unit, alpha) in net.output_weights().iter().enumerate() {
        let pre = preactivation_sc(net, unit, x, cfg, meter)?;
        out += alpha * act.apply(pre);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub x: Vec<f64>,
    pub reference: f64,
    pub scnn: f64,
    pub target: f64,
    /// `|G_SC,M − G|`
    pub sc_error: f64,
    /// `|G_SC,M − f|`
    pub total_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorProfile {
    pub points: Vec<ProfilePoint>,
    pub sc_summary: Summary,
    pub total_summary: Summary,
}

/// Point `g` of the grid is evaluated with key `cfg.key.fork(g)`.
pub fn scnn_error_profile(
    net: &ReferenceNetwork,
    f: &TargetFunction,
    grid: &Grid,
    cfg: &ScnnConfig,
) -> Result<ErrorProfile> {
    scnn_error_profile_with(net, f, grid, cfg, ExecPolicy::default())
}

pub fn scnn_error_profile_with(
    net: &ReferenceNetwork,
    f: &TargetFunction,
    grid: &Grid,
    cfg: &ScnnConfig,
    exec: ExecPolicy,
) -> Result<ErrorProfile> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("grid is empty".into()));
    }
    let points = try_map_indexed(grid.len(), exec, |g| {
        let x = grid.point(g);
        let reference = net.forward(&x)?;
        let scnn = forward_scnn(net, &x, &cfg.with_key(cfg.key.fork(g as u64)))?;
        let target = f.eval(&x);
        Ok::<_, Error>(ProfilePoint {
            sc_error: (scnn - reference).abs(),
            total_error: (scnn - target).abs(),
            x,
            reference,
            scnn,
            target,
        })
    })?;
    let sc: Vec<f64> = points.iter().map(|p| p.sc_error).collect();
    let total: Vec<f64> = points.iter().map(|p| p.total_error).collect();
    Ok(ErrorProfile {
        sc_summary: Summary::of(&sc),
        total_summary: Summary::of(&total),
        points,
    })
}
