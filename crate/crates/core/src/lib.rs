//! Simulator for a quantum greatest-common-divisor algorithm.
//!
//! The algorithm runs phase estimation over the modular-addition unitary
//! `U |y> = |(x + y) mod r>`. The eigenphases of `U` are `s/N` where
//! `N = r / gcd(x, r)`, so recovering an eigenphase as an exact fraction and
//! reducing it reveals `N`, and with it `gcd(x, r) = r / N`.
//!
//! The crate is organised into:
//!
//! - [`numerics`]: exact integer/rational arithmetic (Stein gcd, fraction
//!   reduction, continued fractions) and the derived problem quantities.
//! - [`statevector`]: a dense simulator over the joint space of a `t`-qubit
//!   control register and an `r`-dimensional work register.
//! - [`circuit`]: a gate-list representation of the same procedure, a stable
//!   text format, and resource/cost reporting.
//! - [`qpe`]: the algorithm layer — analytic outcome distribution, full and
//!   single-ancilla iterative runs, fraction recovery, and the two classical
//!   post-processing protocols.
//! - [`verify`]: a self-check suite over small instances, exposed through the
//!   `qgcd verify` subcommand.

pub mod circuit;
pub mod error;
pub mod numerics;
pub mod qpe;
pub mod statevector;
pub mod verify;

pub use error::{Error, Result};

/// Supported modulus range: inputs must satisfy `r < MAX_MODULUS`.
///
/// Everything is computed in 64-bit integers; this bound keeps all
/// intermediate products (`r^2`, `2^t * r`, `2 m r`) comfortably exact.
pub const MAX_MODULUS: u64 = 1 << 20;

/// Largest supported control-register width, in qubits.
pub const MAX_CONTROL_QUBITS: u32 = 24;

/// Default cap on the number of state-vector amplitudes (`2^t * r`).
pub const DEFAULT_MAX_AMPS: u64 = 1 << 26;
