//! Replica-symmetric analysis of nonlinear vector precoding.
//!
//! Vector precoding transmits, for each data vector, the cheapest of many
//! redundant lattice representations: the transmitter solves
//! `min_{x in B_{s1} x ... x B_{sK}} x^H J x` with `J = (H H^H)^-1` for an
//! inverted MIMO channel `H`. This crate computes the large-system prediction
//! of the resulting transmit energy per symbol and per bit, and validates the
//! prediction against exact solutions of the underlying non-convex quadratic
//! program at small dimension.
//!
//! The crate is organized around four subsystems:
//!
//! * [`rmt`] — R-transform algebra for the random-matrix ensembles that enter
//!   the energy prediction (Marchenko-Pastur Gramian, its inverse, tabulated
//!   spectra), including a numeric Stieltjes-based construction and the
//!   inversion identity relating a spectrum to its reciprocal.
//! * [`alphabet`] — the relaxed signal-set families (one-dimensional,
//!   quadrature, checkerboard, semi-discrete), their Voronoi geometry,
//!   nearest-point maps and point enumeration.
//! * [`replica`] — damped fixed-point solvers for the macroscopic parameters
//!   `(q, b)` (equivalently `(q, p)`), both in the general integral form and
//!   in the specialized closed forms for inverted i.i.d. channels, plus load
//!   sweeps and phase-transition threshold searches.
//! * [`montecarlo`] — the exact ground-truth engine: seeded channel sampling,
//!   Gramian inversion, brute-force and sphere-decoder solutions of the
//!   discrete quadratic program, and experiment aggregation.
//!
//! The [`cli`] module exposes all of this behind the `vecoder` binary
//! (`solve`, `sweep`, `simulate`, `table1`, `verify`, `threshold`).
//!
//! Runnable walkthroughs live in `examples/`; start with
//! `cargo run --release --example square_channel_table`.

// Validation guards are written as `!(x > 0.0)` so NaN inputs are rejected
// along with out-of-range ones; the suggested `x <= 0.0` would admit NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alphabet;
pub mod cli;
pub mod montecarlo;
pub mod replica;
pub mod rmt;

pub use alphabet::{Alphabet, AlphabetKind, DataPrior, Symbol};
pub use montecarlo::{ChannelConfig, SimResult, SolverChoice};
pub use replica::{FixedPointConfig, ReplicaSolution, SolverKind, SweepMode};
pub use rmt::RTransformSpec;
