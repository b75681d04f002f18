//! Closed-form gate-operation counts for one neuron, one layer, and the
//! equivalent BNN layer.
//!
//! Model per neuron with `n` inputs and stream length `M`:
//! `(n+1)·M` XNORs (the bias is the extra term), plus `M` select operations
//! for a MUX or `(n+1)·⌈log₂(n+2)⌉·M` adder bit operations for an APC.
//! Units are abstract gate operations.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scgates::{apc_depth, AccumulationMode, OpCounter};
use crate::transform::ChunkSpec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub xnor_ops: u64,
    pub and_ops: u64,
    pub mux_select_ops: u64,
    pub apc_bit_adds: u64,
    pub total: u64,
    pub n: usize,
    #[serde(rename = "M")]
    pub len: usize,
    #[serde(rename = "N")]
    pub width: usize,
    /// Binary input width when the report describes a BNN layer.
    pub m: Option<usize>,
    pub mode: AccumulationMode,
    pub asymptotic_label: String,
}

impl EnergyReport {
    fn build(n: usize, len: usize, width: usize, mode: AccumulationMode, ops: OpCounter) -> Self {
        let per = match mode {
            AccumulationMode::Mux => "n·M",
            AccumulationMode::Apc => "n·log n·M",
        };
        let label = if width == 1 {
            format!("O({per})")
        } else {
            format!("O({per}·N)")
        };
        EnergyReport {
            xnor_ops: ops.xnor_ops,
            and_ops: ops.and_ops,
            mux_select_ops: ops.mux_select_ops,
            apc_bit_adds: ops.apc_bit_adds,
            total: ops.total(),
            n,
            len,
            width,
            m: None,
            mode,
            asymptotic_label: label,
        }
    }

    pub fn counts(&self) -> OpCounter {
        OpCounter {
            xnor_ops: self.xnor_ops,
            and_ops: self.and_ops,
            mux_select_ops: self.mux_select_ops,
            apc_bit_adds: self.apc_bit_adds,
        }
    }

    /// Same gate-class counts, ignoring parameters and labels.
    pub fn same_counts(&self, other: &EnergyReport) -> bool {
        self.counts() == other.counts() && self.total == other.total
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes reports as CSV rows under one header.
pub fn write_energy_csv<W: Write>(reports: &[EnergyReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn neuron_counts(n: usize, len: usize, mode: AccumulationMode) -> OpCounter {
    let terms = n as u64 + 1;
    let m = len as u64;
    let mut ops = OpCounter {
        xnor_ops: terms * m,
        ..OpCounter::default()
    };
    match mode {
        AccumulationMode::Mux => ops.mux_select_ops = m,
        AccumulationMode::Apc => ops.apc_bit_adds = terms * apc_depth(n + 1) * m,
    }
    ops
}

fn check(n: usize, len: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if len == 0 {
        return Err(Error::ZeroLength);
    }
    Ok(())
}

pub fn neuron_energy(n: usize, len: usize, mode: AccumulationMode) -> Result<EnergyReport> {
    check(n, len)?;
    Ok(EnergyReport::build(
        n,
        len,
        1,
        mode,
        neuron_counts(n, len, mode),
    ))
}

/// `N` neurons sharing `n` and `M`.
pub fn layer_energy(
    n: usize,
    len: usize,
    width: usize,
    mode: AccumulationMode,
) -> Result<EnergyReport> {
    check(n, len)?;
    if width == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let one = neuron_counts(n, len, mode);
    let ops = (0..width).map(|_| one).sum();
    Ok(EnergyReport::build(n, len, width, mode, ops))
}

/// A BNN layer with `m` binary inputs, counted as the SC layer with
/// `n = m / chunk` streams of length `chunk`. `chunk = 1` is the native BNN
/// (one XNOR per input bit).
pub fn bnn_layer_energy(
    m: usize,
    width: usize,
    mode: AccumulationMode,
    chunk: usize,
) -> Result<EnergyReport> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let spec = ChunkSpec::new(m, chunk)?;
    let mut r = layer_energy(spec.n(), spec.stream_len(), width, mode)?;
    r.m = Some(m);
    Ok(r)
}
