//! Generalized transfer-operator evaluation for arbitrary Schmidt resources.
//!
//! Only the Fock amplitudes vₙ = ⟨n+o|D̂(-β)|ψ⟩ and wₙ = ⟨n+o|D̂(-gβ)|χ⟩ are
//! needed:
//!
//! P(β) = π⁻¹ Σₙ cₙ² |vₙ|²,  ⟨χ|T̂(β)|ψ⟩ = π^{-1/2} Σₙ cₙ wₙ* vₙ.
//!
//! Coherent superpositions use D̂(-β)|a⟩ = e^{i Im(β* a)}|a-β⟩ directly; raw
//! Fock input goes through [`displacement_matrix`].

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{finite, ratio, Evaluation, TeleportConfig, TeleportPoint};
use crate::error::Result;
use crate::input::InputState;
use crate::numerics::{coherent_amplitude, displacement_matrix, ComplexAmplitude};

/// P(β) and ⟨χ|T̂(β)|ψ⟩ at one outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferAmplitudes {
    pub prob_density: f64,
    pub overlap: Complex64,
}

// ⟨first+n|D̂(-shift)|state⟩ for n = 0..len.
fn displaced_amplitudes(state: &InputState, shift: Complex64, first: usize, len: usize) -> Result<Vec<Complex64>> {
    if let Some(components) = state.coherent_components() {
        let terms: Vec<(Complex64, Complex64)> = components
            .iter()
            .map(|&(w, a)| (w * Complex64::from_polar(1.0, (shift.conj() * a).im), a - shift))
            .collect();
        return Ok((first..first + len)
            .map(|n| terms.iter().map(|&(w, a)| w * coherent_amplitude(a, n)).sum())
            .collect());
    }
    let coeffs = match state {
        InputState::FockCoeffs { coeffs } => coeffs,
        _ => unreachable!("coherent superpositions handled above"),
    };
    let dim = coeffs.len().max(first + len);
    let d = displacement_matrix(-shift, dim)?;
    Ok((first..first + len)
        .map(|m| coeffs.iter().enumerate().map(|(n, c)| d[[m, n]] * c).sum())
        .collect())
}

pub fn transfer_amplitudes(cfg: &TeleportConfig, input: &InputState, beta: Complex64) -> Result<TransferAmplitudes> {
    let res = &cfg.resource;
    res.check_truncation()?;
    let v = displaced_amplitudes(input, beta, res.offset, res.levels())?;
    let w = displaced_amplitudes(&cfg.comparison, cfg.gain * beta, res.offset, res.levels())?;
    let mut prob = 0.0;
    let mut overlap = Complex64::new(0.0, 0.0);
    for ((c, vn), wn) in res.coeffs.iter().zip(&v).zip(&w) {
        prob += c * c * vn.norm_sqr();
        overlap += *c * wn.conj() * vn;
    }
    Ok(TransferAmplitudes {
        prob_density: finite(prob / PI, "probability density", beta)?,
        overlap: overlap / PI.sqrt(),
    })
}

/// P(β), F(β) through the generalized transfer operator. Works for every
/// resource kind and input; labelled [`Evaluation::Numeric`].
pub fn transfer_point(cfg: &TeleportConfig, input: &InputState, beta: ComplexAmplitude) -> Result<TeleportPoint> {
    cfg.check_input(input)?;
    let b = beta.value();
    let t = transfer_amplitudes(cfg, input, b)?;
    let overlap_sqr = finite(t.overlap.norm_sqr(), "overlap", b)?;
    Ok(TeleportPoint {
        beta: b,
        prob_density: t.prob_density,
        fidelity: ratio(overlap_sqr, t.prob_density),
        evaluation: Evaluation::Numeric,
    })
}
