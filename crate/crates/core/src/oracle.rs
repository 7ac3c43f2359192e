//! Brute-force Fock-space reference.
//!
//! Everything here is built from the transfer-operator structure
//! T̂(β) = π^{-1/2} Σₙ cₙ D̂(gβ)|n+o⟩⟨n+o|D̂(-β) with explicit truncated
//! matrices, and from the joint two-mode lattice for number-difference
//! measurements. None of it reuses the closed forms in [`crate::cv`] or
//! [`crate::ndps`], so agreement between the two is a real check.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cv::{Evaluation, TeleportPoint, UNDEFINED_FIDELITY_FLOOR};
use crate::error::{Error, Result};
use crate::input::InputState;
use crate::numerics::{displacement_matrix, ComplexAmplitude};
use crate::resources::SchmidtResource;

/// Oracle matrices never exceed this dimension by default.
pub const ORACLE_DIM_CAP: usize = 256;

/// Fock amplitudes 0..dim. Never renormalized behind the caller's back.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedKet {
    coeffs: Array1<Complex64>,
}

impl TruncatedKet {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        TruncatedKet {
            coeffs: Array1::from(coeffs),
        }
    }

    pub fn from_input(input: &InputState, dim: usize) -> Self {
        Self::new(input.fock_coefficients(dim))
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        self.coeffs.as_slice().expect("contiguous")
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// ⟨self|other⟩ over the common support.
    pub fn inner(&self, other: &TruncatedKet) -> Complex64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Default oracle dimension 4(⌈|α|²⌉ + ⌈|β|²⌉) + resource support, capped.
pub fn oracle_dim(res: &SchmidtResource, alpha_max: f64, beta_max: f64) -> usize {
    let d = 4 * ((alpha_max * alpha_max).ceil() as usize + (beta_max * beta_max).ceil() as usize) + res.support();
    d.min(ORACLE_DIM_CAP).max(res.support())
}

type CacheKey = (u64, u64, usize);

/// Truncated-matrix transfer operator with memoized displacement matrices.
#[derive(Debug, Default)]
pub struct FockOracle {
    cache: Mutex<HashMap<CacheKey, Arc<Array2<Complex64>>>>,
}

const CACHE_LIMIT: usize = 512;

impl FockOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn displacement(&self, beta: Complex64, dim: usize) -> Result<Arc<Array2<Complex64>>> {
        let key = (beta.re.to_bits(), beta.im.to_bits(), dim);
        if let Some(m) = self.cache.lock().unwrap().get(&key) {
            return Ok(m.clone());
        }
        let m = Arc::new(displacement_matrix(beta, dim)?);
        let mut cache = self.cache.lock().unwrap();
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, m.clone());
        Ok(m)
    }

    /// T̂(β)|ψ⟩, unnormalized; its squared norm is P(β).
    pub fn apply_transfer(
        &self,
        res: &SchmidtResource,
        beta: ComplexAmplitude,
        g: f64,
        psi: &TruncatedKet,
    ) -> Result<TruncatedKet> {
        res.check_truncation()?;
        let dim = psi.dim();
        if dim < res.support() {
            return Err(Error::Truncation {
                tail: res.tail_mass,
                epsilon: res.epsilon,
                dim,
                required: res.support(),
            });
        }
        let b = beta.value();
        let displaced = self.displacement(-b, dim)?.dot(&psi.coeffs);
        let mut projected = Array1::<Complex64>::zeros(dim);
        for (n, &c) in res.coeffs.iter().enumerate() {
            let m = n + res.offset;
            projected[m] = displaced[m] * c;
        }
        let out = self.displacement(g * b, dim)?.dot(&projected) / PI.sqrt();
        Ok(TruncatedKet { coeffs: out })
    }

    /// P(β) and F(β) at an explicit dimension.
    pub fn oracle_point_dim(
        &self,
        res: &SchmidtResource,
        input: &InputState,
        beta: ComplexAmplitude,
        g: f64,
        comparison: &InputState,
        dim: usize,
    ) -> Result<TeleportPoint> {
        let psi = TruncatedKet::from_input(input, dim);
        let deficit = input.tail_mass(dim);
        if deficit > res.epsilon {
            return Err(Error::Truncation {
                tail: deficit,
                epsilon: res.epsilon,
                dim,
                required: input.support(res.epsilon, 4 * crate::numerics::MAX_DISPLACEMENT_DIM),
            });
        }
        let out = self.apply_transfer(res, beta, g, &psi)?;
        let chi = TruncatedKet::from_input(comparison, dim);
        let prob = out.norm_sqr();
        let overlap = chi.inner(&out).norm_sqr();
        Ok(TeleportPoint {
            beta: beta.value(),
            prob_density: prob,
            fidelity: (prob > UNDEFINED_FIDELITY_FLOOR).then(|| overlap / prob),
            evaluation: Evaluation::Numeric,
        })
    }

    /// P(β) = ‖T̂ψ‖², F(β) = |⟨χ|T̂ψ⟩|²/P(β) at the default dimension.
    pub fn oracle_point(
        &self,
        res: &SchmidtResource,
        input: &InputState,
        beta: ComplexAmplitude,
        g: f64,
        comparison: &InputState,
    ) -> Result<TeleportPoint> {
        let amp = |s: &InputState| s.amplitude().map(|a| a.norm()).unwrap_or(0.0);
        let alpha_max = amp(input).max(amp(comparison));
        let beta_max = beta.value().norm() * g.max(1.0);
        let mut dim = oracle_dim(res, alpha_max, beta_max);
        for s in [input, comparison] {
            dim = dim.max(s.support(res.epsilon, ORACLE_DIM_CAP).min(ORACLE_DIM_CAP));
        }
        self.oracle_point_dim(res, input, beta, g, comparison, dim)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeOutcome {
    pub prob: f64,
    pub fidelity: Option<f64>,
}

/// Number-difference statistics by brute force over the joint lattice of
/// input level m and resource Schmidt index j: amplitude c_m r_j, outcome
/// k = m − (j + offset), Bob left in |m⟩ after his shift by k.
pub fn lattice_number_difference(res: &SchmidtResource, input: &[Complex64]) -> BTreeMap<i64, LatticeOutcome> {
    let mut prob: BTreeMap<i64, f64> = BTreeMap::new();
    let mut overlap: BTreeMap<i64, Complex64> = BTreeMap::new();
    for (m, cm) in input.iter().enumerate() {
        for (j, rj) in res.coeffs.iter().enumerate() {
            let k = m as i64 - (j + res.offset) as i64;
            let a = cm * rj;
            *prob.entry(k).or_default() += a.norm_sqr();
            *overlap.entry(k).or_default() += cm.conj() * a;
        }
    }
    prob.into_iter()
        .map(|(k, p)| {
            let f = (p > 0.0).then(|| overlap[&k].norm_sqr() / p);
            (k, LatticeOutcome { prob: p, fidelity: f })
        })
        .collect()
}
