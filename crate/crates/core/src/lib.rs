//! Continuous-variable quantum teleportation with conditionally prepared
//! two-mode squeezed vacuum resources.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: special functions, Fock-space truncation, displacement
//!   matrix elements and complex-plane Gauss–Hermite quadrature.
//! * [`resources`]: the standard, photon-subtracted and photon-added
//!   entanglement resources and their diagnostics.
//! * [`input`]: the states being teleported (coherent, cat, raw Fock).
//! * [`cv`]: the x₋/p₊ teleporter. Closed-form point evaluations, the
//!   generalized transfer-operator path, average fidelity and parameter scans.
//! * [`ndps`]: number-difference / phase-sum teleportation.
//! * [`oracle`]: brute-force truncated-matrix reference used to check every
//!   closed form.
//!
//! Heavy loops (quadrature nodes, parameter grids) run through [`exec`], which
//! uses rayon when the `parallel` feature is enabled and falls back to plain
//! iteration otherwise. Reductions always happen in index order, so results are
//! bit-identical regardless of worker count.

pub mod cv;
pub mod error;
pub mod exec;
pub mod input;
pub mod ndps;
pub mod numerics;
pub mod oracle;
pub mod resources;

pub use error::{Error, Result};
pub use exec::Execution;
pub use input::{InputState, Parity};
pub use numerics::{ComplexAmplitude, QuadratureSpec, TruncationPolicy};
pub use resources::{ResourceKind, SchmidtResource};

pub use num_complex::Complex64;
