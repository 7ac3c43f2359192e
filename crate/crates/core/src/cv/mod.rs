//! Position-difference / momentum-sum teleportation.
//!
//! Alice measures β = x₋ + i p₊ and Bob displaces by gβ. For a resource with
//! Schmidt coefficients cₙ and offset o the whole protocol is the transfer
//! operator
//!
//! T̂(β) = π^{-1/2} Σₙ cₙ D̂(gβ) |n+o⟩⟨n+o| D̂(-β),
//!
//! with P(β) = ‖T̂(β)ψ‖², F(β) = |⟨χ|T̂(β)|ψ⟩|² / P(β) for comparison state χ,
//! and F̄ = ∫ |⟨χ|T̂(β)|ψ⟩|² d²β.

mod average;
mod closed;
mod scan;
mod transfer;

pub use average::{
    average_fidelity, average_fidelity_with, default_quadrature, AverageFidelity, QuadratureOptions,
    CONVERGENCE_TOLERANCE,
};
pub use closed::{cat_point, closed_form_overlap_sqr, coherent_point};
pub use scan::{boundary_scan, gain_gamma_scan, BoundaryRow, BoundaryScan, GainScan, GainScanRow, QUANTUM_THRESHOLD};
pub use transfer::{transfer_amplitudes, transfer_point, TransferAmplitudes};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::input::InputState;
use crate::resources::SchmidtResource;

/// How a point or average was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evaluation {
    /// Closed-form coherent-state expressions.
    ClosedForm,
    /// Generalized transfer-operator series (any resource, any input).
    Numeric,
}

/// Which evaluation route to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Closed form where one exists, numeric otherwise.
    #[default]
    Auto,
    ClosedForm,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeleportConfig {
    /// Bob's displacement gain g.
    pub gain: f64,
    /// State the output is compared against (amplitude γ).
    pub comparison: InputState,
    pub resource: SchmidtResource,
}

impl TeleportConfig {
    pub fn new(gain: f64, comparison: InputState, resource: SchmidtResource) -> Result<Self> {
        if !(gain >= 0.0 && gain.is_finite()) {
            return Err(Error::InvalidParameter(format!("gain {gain} must be >= 0")));
        }
        comparison.validate()?;
        Ok(TeleportConfig {
            gain,
            comparison,
            resource,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.resource.lambda
    }

    pub(crate) fn check_input(&self, input: &InputState) -> Result<()> {
        input.validate()?;
        if !input.comparable_with(&self.comparison) {
            return Err(Error::InvalidParameter(
                "comparison state must belong to the same family as the input".into(),
            ));
        }
        Ok(())
    }
}

/// One measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportPoint {
    pub beta: Complex64,
    /// P(β).
    pub prob_density: f64,
    /// F(β); `None` where P(β) vanishes and the ratio is undefined.
    pub fidelity: Option<f64>,
    pub evaluation: Evaluation,
}

/// Densities below this are treated as zero when forming F = |⟨χ|T̂ψ⟩|²/P.
pub const UNDEFINED_FIDELITY_FLOOR: f64 = 1e-300;

pub(crate) fn finite(value: f64, what: &'static str, beta: Complex64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { what, beta })
    }
}

pub(crate) fn ratio(overlap_sqr: f64, prob: f64) -> Option<f64> {
    (prob > UNDEFINED_FIDELITY_FLOOR).then(|| overlap_sqr / prob)
}
