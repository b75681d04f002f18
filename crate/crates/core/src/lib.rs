//! Bit-exact simulation of stochastic-computing neural networks (SCNNs) and
//! binary neural networks (BNNs).
//!
//! The crate is organised bottom-up:
//!
//! * [`rng`] keyed, counter-based random streams,
//! * [`bits`] and [`bitstream`] packed bit storage and stochastic numbers,
//! * [`scgates`] the SC gate set (AND, XNOR, MUX, parallel counter),
//! * [`netcore`] real-valued reference networks and the least-squares fitter,
//! * [`scnn`] and [`bnn`] the two approximate network families,
//! * [`transform`] the BNN/SCNN chunking equivalence,
//! * [`theory`] the bit-length bound and Monte-Carlo harness,
//! * [`energy`] the gate-operation cost model.
//!
//! Data-parallel loops go through [`par`]; with the `parallel` feature
//! disabled every loop runs sequentially and produces identical results.

pub mod bits;
pub mod bitstream;
pub mod bnn;
pub mod energy;
pub mod error;
pub mod netcore;
pub mod par;
pub mod rng;
pub mod scgates;
pub mod scnn;
pub mod stats;
pub mod theory;
pub mod transform;

pub use bits::PackedBits;
pub use bitstream::{decode, popcount, sng_encode, Bitstream, Encoding, PreScaleSet, PreScaler};
pub use bnn::{binarize, binarize_network, forward_bnn, hard_sigmoid, BinaryNetwork, BinaryVector};
pub use energy::{bnn_layer_energy, layer_energy, neuron_energy, EnergyReport};
pub use error::{Error, Result};
pub use netcore::{
    fit_reference, forward_reference, sup_error, Activation, FitOutcome, Grid, ReferenceNetwork,
    TargetFunction,
};
pub use par::ExecPolicy;
pub use rng::{Role, StreamKey, RNG_FAMILY};
pub use scgates::{AccumulationMode, OpCounter, SumTrace};
pub use scnn::{forward_scnn, scnn_error_profile, ScnnConfig};
pub use theory::{
    bound_validation, chebyshev_stream_bound_check, convergence_sweep, m_min_bound, BoundQuery,
    BoundValidation, ConvergenceReport, ConvergenceRow, SweepSpec,
};
pub use transform::{
    bnn_to_scnn, preactivation_equivalence_check, scnn_to_bnn, ChunkSpec, EquivalenceReport,
    StreamBundle,
};
