//! Number-difference / phase-sum teleportation.
//!
//! Alice measures the photon-number difference k between the input mode and
//! her half of the resource; Bob's mode is left in
//!
//! |out⟩ ∝ Σₙ c_{n+k+o} wₙ |n+k+o⟩,
//!
//! where wₙ = λⁿ (standard) or (n+1)λⁿ (subtracted, added) and o is the
//! resource's Fock offset. With resource normalization 𝒩:
//!
//! P(k) = 𝒩 Σₙ |c_{n+k+o}|² wₙ²,  F(k) = 𝒩/P(k) · (Σₙ |c_{n+k+o}|² wₙ)².
//!
//! Negative k is outside the usual protocol description; it is supported by
//! restricting n to indices where c_{n+k+o} exists, which makes Σ_k P(k) = 1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::input::InputState;
use crate::numerics::TruncationPolicy;
use crate::resources::{ResourceKind, SchmidtResource};

/// Input Fock coefficients ⟨n|ψ⟩ for n = 0..=n_max.
///
/// Coherent amplitudes use the normalized e^{-|α|²/2} αⁿ/√(n!) form.
pub fn input_coeffs(input: &InputState, n_max: usize) -> Vec<Complex64> {
    input.fock_coefficients(n_max + 1)
}

/// Input coefficients truncated where the discarded tail drops below `epsilon`.
pub fn input_coeffs_auto(input: &InputState, epsilon: f64) -> Vec<Complex64> {
    input.fock_coefficients(input.support(epsilon, 4096))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdpsPoint {
    pub k: i64,
    pub prob: f64,
    /// `None` when P(k) = 0.
    pub fidelity: Option<f64>,
    /// Normalized Bob-mode amplitudes indexed by Fock level.
    pub out_coeffs: Vec<Complex64>,
    /// k < 0, beyond the positive number-difference outcomes.
    pub extended: bool,
}

pub fn ndps_point(res: &SchmidtResource, c: &[Complex64], k: i64) -> NdpsPoint {
    let lam = res.lambda;
    let kind = res.kind;
    let shift = k + res.offset as i64;
    let n_start = (-shift).max(0) as usize;
    let norm = kind.normalization(lam);

    let mut prob = 0.0;
    let mut overlap = 0.0;
    let mut amps: Vec<(usize, Complex64)> = Vec::new();
    let mut n = n_start;
    loop {
        let m = n as i64 + shift;
        let Some(&cm) = c.get(m as usize) else { break };
        let w = kind.weight(lam, n);
        if w == 0.0 && n > 0 {
            break;
        }
        let p = cm.norm_sqr();
        prob += p * w * w;
        overlap += p * w;
        amps.push((m as usize, cm * w));
        n += 1;
    }
    prob *= norm;

    let (fidelity, out_coeffs) = if prob > 0.0 {
        let scale = (norm / prob).sqrt();
        let mut out = vec![Complex64::new(0.0, 0.0); c.len()];
        for (m, a) in amps {
            out[m] = a * scale;
        }
        (Some(norm / prob * overlap * overlap), out)
    } else {
        (None, Vec::new())
    };
    NdpsPoint {
        k,
        prob,
        fidelity,
        out_coeffs,
        extended: k < 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdpsDistribution {
    pub points: Vec<NdpsPoint>,
    /// Σ P(k) over all returned points.
    pub cumulative: f64,
}

/// Outcomes k = k_min..=k_max, where k_min extends into negative differences
/// far enough to cover the resource's retained support.
pub fn ndps_distribution(res: &SchmidtResource, c: &[Complex64], k_max: i64, exec: Execution) -> NdpsDistribution {
    let k_min = -((res.levels() + res.offset) as i64 - 1);
    let k_max = k_max.max(0);
    let count = (k_max - k_min + 1) as usize;
    let points = exec.map(count, |i| ndps_point(res, c, k_min + i as i64));
    let cumulative = points.iter().map(|p| p.prob).sum();
    NdpsDistribution { points, cumulative }
}

/// F(k) across a λ grid.
pub fn ndps_fidelity_curve(
    kind: ResourceKind,
    input: &InputState,
    k: i64,
    lambda_grid: &[f64],
    policy: &TruncationPolicy,
    exec: Execution,
) -> Result<Vec<(f64, Option<f64>)>> {
    if lambda_grid.is_empty() {
        return Err(Error::InvalidParameter("λ grid must be non-empty".into()));
    }
    input.validate()?;
    let c = input_coeffs_auto(input, policy.epsilon);
    exec.try_map(lambda_grid.len(), |i| {
        let lambda = lambda_grid[i];
        let res = SchmidtResource::build(kind, lambda, policy)?;
        Ok((lambda, ndps_point(&res, &c, k).fidelity))
    })
}
