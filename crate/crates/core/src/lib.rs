//! Behavioral and physical models for a cryogenic CMOS SP4T multiplexer
//! sitting in the control chain of a fixed-frequency transmon.
//!
//! The crate is split along the signal path:
//!
//! - [`chainmodel`]: digital programming of the switch, RF gating envelope,
//!   static/dynamic power and the cooling-budget arithmetic.
//! - [`noisecalc`]: closed-form noise calculus (photon shot-noise dephasing,
//!   Bose-Einstein conversions, attenuation, drive-line T1 limit).
//! - [`qubitsim`]: rotating-frame Lindblad simulation of a 2- or 3-level
//!   transmon under gated cosine pulses.
//! - [`rbengine`]: single-qubit Clifford randomized benchmarking on top of
//!   the simulator, plus the coherence-limited fidelity model.
//! - [`fitkit`]: Levenberg-Marquardt least squares and the decay models used
//!   to extract T1, T2*, T2e and quasiparticle parameters.
//! - [`table`]: plot-ready tables with a fixed numeric format.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chainmodel;
pub mod fitkit;
pub mod noisecalc;
pub mod qubitsim;
pub mod rbengine;
pub mod table;
