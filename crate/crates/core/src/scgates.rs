//! SC arithmetic: AND/XNOR multiplication, MUX scaled addition and the
//! parallel-counter (APC) accumulator.
//!
//! Every gate has a `*_metered` form that adds its operation counts to an
//! [`OpCounter`]. The counts follow the cost model in [`crate::energy`].

use std::fmt;
use std::ops::{Add, AddAssign};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::PackedBits;
use crate::bitstream::{Bitstream, Encoding};
use crate::error::{Error, Result};
use crate::rng::StreamKey;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccumulationMode {
    /// Random per-clock selection; output decodes to the mean of the inputs.
    Mux,
    /// Per-clock popcount; exact sum of the input values.
    #[default]
    Apc,
}

impl fmt::Display for AccumulationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccumulationMode::Mux => "mux",
            AccumulationMode::Apc => "apc",
        })
    }
}

impl std::str::FromStr for AccumulationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mux" => Ok(AccumulationMode::Mux),
            "apc" => Ok(AccumulationMode::Apc),
            other => Err(Error::Parse(format!("unknown accumulation mode {other:?}"))),
        }
    }
}

/// Gate operations performed during a simulation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpCounter {
    pub xnor_ops: u64,
    pub and_ops: u64,
    pub mux_select_ops: u64,
    pub apc_bit_adds: u64,
}

impl OpCounter {
    pub fn total(&self) -> u64 {
        self.xnor_ops + self.and_ops + self.mux_select_ops + self.apc_bit_adds
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: Self) {
        self.xnor_ops += rhs.xnor_ops;
        self.and_ops += rhs.and_ops;
        self.mux_select_ops += rhs.mux_select_ops;
        self.apc_bit_adds += rhs.apc_bit_adds;
    }
}

impl Add for OpCounter {
    type Output = OpCounter;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl std::iter::Sum for OpCounter {
    fn sum<I: Iterator<Item = OpCounter>>(iter: I) -> Self {
        iter.fold(OpCounter::default(), Add::add)
    }
}

/// Depth of the adder tree that sums `k` one-bit inputs: `ceil(log2(k + 1))`.
pub fn apc_depth(k: usize) -> u64 {
    let k = k as u64 + 1;
    u64::from(64 - (k - 1).leading_zeros())
}

/// Output of the parallel counter: the per-clock popcounts summed over all clocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SumTrace {
    pub total: u64,
    pub clocks: usize,
    pub width: usize,
    pub encoding: Encoding,
}

impl SumTrace {
    /// Sum of the input values: `2·total/M − k` (bipolar) or `total/M` (unipolar).
    pub fn decoded(&self) -> f64 {
        match self.encoding {
            Encoding::Bipolar => self.signed_total() as f64 / self.clocks as f64,
            Encoding::Unipolar => self.total as f64 / self.clocks as f64,
        }
    }

    /// `2·total − k·M`: the sum of all input bits read as ±1.
    pub fn signed_total(&self) -> i64 {
        2 * self.total as i64 - (self.width * self.clocks) as i64
    }
}

impl fmt::Display for SumTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.total, self.clocks, self.width)
    }
}

fn check_pair(a: &Bitstream, b: &Bitstream, enc: Encoding) -> Result<()> {
    for s in [a, b] {
        if s.encoding() != enc {
            return Err(Error::EncodingMismatch {
                expected: enc,
                found: s.encoding(),
            });
        }
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

fn check_bundle(streams: &[Bitstream], what: &'static str) -> Result<(usize, Encoding)> {
    let first = streams.first().ok_or(Error::Empty(what))?;
    for s in &streams[1..] {
        if s.len() != first.len() {
            return Err(Error::LengthMismatch {
                left: first.len(),
                right: s.len(),
            });
        }
        if s.encoding() != first.encoding() {
            return Err(Error::EncodingMismatch {
                expected: first.encoding(),
                found: s.encoding(),
            });
        }
    }
    Ok((first.len(), first.encoding()))
}

/// Unipolar multiplication.
pub fn and_mult(a: &Bitstream, b: &Bitstream) -> Result<Bitstream> {
    and_mult_metered(a, b, &mut OpCounter::default())
}

pub fn and_mult_metered(a: &Bitstream, b: &Bitstream, meter: &mut OpCounter) -> Result<Bitstream> {
    check_pair(a, b, Encoding::Unipolar)?;
    meter.and_ops += a.len() as u64;
    Bitstream::new(a.bits().and(b.bits())?, Encoding::Unipolar)
}

/// Bipolar multiplication.
pub fn xnor_mult(a: &Bitstream, b: &Bitstream) -> Result<Bitstream> {
    xnor_mult_metered(a, b, &mut OpCounter::default())
}

pub fn xnor_mult_metered(a: &Bitstream, b: &Bitstream, meter: &mut OpCounter) -> Result<Bitstream> {
    check_pair(a, b, Encoding::Bipolar)?;
    meter.xnor_ops += a.len() as u64;
    Bitstream::new(a.bits().xnor(b.bits())?, Encoding::Bipolar)
}

/// Scaled addition: each output bit is the same-clock bit of an input chosen
/// uniformly at random. Decodes to `(1/k) Σ decode(streams[i])` in expectation.
pub fn mux_add(streams: &[Bitstream], key: &StreamKey) -> Result<Bitstream> {
    mux_add_metered(streams, key, &mut OpCounter::default())
}

pub fn mux_add_metered(
    streams: &[Bitstream],
    key: &StreamKey,
    meter: &mut OpCounter,
) -> Result<Bitstream> {
    let (len, encoding) = check_bundle(streams, "mux_add")?;
    meter.mux_select_ops += len as u64;
    if streams.len() == 1 {
        return Ok(streams[0].clone());
    }
    let k = streams.len() as u32;
    let mut rng = key.rng();
    let out = PackedBits::from_bools((0..len).map(|clock| {
        let pick = rng.gen_range(0..k) as usize;
        streams[pick].bits().get(clock)
    }));
    Bitstream::new(out, encoding)
}

/// Exact parallel counter over `k` streams.
pub fn apc_sum(streams: &[Bitstream]) -> Result<SumTrace> {
    apc_sum_metered(streams, &mut OpCounter::default())
}

pub fn apc_sum_metered(streams: &[Bitstream], meter: &mut OpCounter) -> Result<SumTrace> {
    let (len, encoding) = check_bundle(streams, "apc_sum")?;
    let k = streams.len();
    meter.apc_bit_adds += k as u64 * apc_depth(k) * len as u64;
    // Σ_clock Σ_i bit_i(clock) = Σ_i popcount(stream_i)
    let total = streams.iter().map(Bitstream::popcount).sum();
    Ok(SumTrace {
        total,
        clocks: len,
        width: k,
        encoding,
    })
}

/// SC estimate of `scale · (wᵀx + b)` from prescaled streams.
///
/// The `n` products `w_j·x_j` are XNOR streams; the bias enters as the
/// `(n+1)`-th term via `b·(+1)`, also an XNOR. The `n+1` terms are then summed
/// by the APC, or by a MUX whose mean is multiplied back by `n+1`. `scale`
/// is the caller's pre-scaling factor for the whole preactivation.
pub fn dot_product_sc(
    w_streams: &[Bitstream],
    x_streams: &[Bitstream],
    b_stream: &Bitstream,
    mode: AccumulationMode,
    key: &StreamKey,
    scale: f64,
) -> Result<f64> {
    dot_product_sc_metered(
        w_streams,
        x_streams,
        b_stream,
        mode,
        key,
        scale,
        &mut OpCounter::default(),
    )
}

pub fn dot_product_sc_metered(
    w_streams: &[Bitstream],
    x_streams: &[Bitstream],
    b_stream: &Bitstream,
    mode: AccumulationMode,
    key: &StreamKey,
    scale: f64,
    meter: &mut OpCounter,
) -> Result<f64> {
    if w_streams.len() != x_streams.len() {
        return Err(Error::DimensionMismatch {
            expected: w_streams.len(),
            found: x_streams.len(),
        });
    }
    if b_stream.encoding() != Encoding::Bipolar {
        return Err(Error::EncodingMismatch {
            expected: Encoding::Bipolar,
            found: b_stream.encoding(),
        });
    }
    let mut terms = Vec::with_capacity(w_streams.len() + 1);
    for (w, x) in w_streams.iter().zip(x_streams) {
        terms.push(xnor_mult_metered(w, x, meter)?);
    }
    let unit = Bitstream::constant(true, b_stream.len(), Encoding::Bipolar)?;
    terms.push(xnor_mult_metered(b_stream, &unit, meter)?);

    let k = terms.len() as f64;
    let sum = match mode {
        AccumulationMode::Apc => apc_sum_metered(&terms, meter)?.decoded(),
        AccumulationMode::Mux => k * mux_add_metered(&terms, key, meter)?.decode(),
    };
    Ok(sum * scale)
}
