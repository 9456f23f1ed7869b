//! Simulation and security-analysis toolkit for four-state two-way
//! deterministic QKD protocols.
//!
//! The crate is organized bottom-up:
//!
//! - [`qmath`] — dense complex linear algebra, BB84 states, measurements,
//!   partial traces and entropies.
//! - [`adversary`] — pluggable attack strategies on the forward and backward
//!   lines, announcement-channel adversaries, and detector models.
//! - [`protocol`] — session drivers for the two-operation, four-operation and
//!   BB84-plus-classical-OTP protocol variants, producing round transcripts.
//! - [`analysis`] — channel statistics (fidelities, ξ, error rate), the key
//!   rate r = 1 − h(ξ) − h(e), and density-matrix verification of the
//!   basis-independence identity behind measurement-device independence.
//! - [`postproc`] — Cascade-style reconciliation and Toeplitz privacy
//!   amplification with explicit leakage accounting.

pub mod adversary;
pub mod analysis;
pub mod postproc;
pub mod protocol;
pub mod qmath;

pub use adversary::{AttackStrategy, ClickOutcome, DetectorModel};
pub use protocol::{MeasurementLocus, ProtocolVariant, SessionConfig, Transcript};
pub use qmath::{Basis, Bb84State, DensityMatrix, PauliOp, PureState};
