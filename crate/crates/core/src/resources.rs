//! The three entanglement resources in Schmidt form and their diagnostics.
//!
//! Every resource is Σₙ cₙ |n+o, n+o⟩ with real cₙ ≥ 0 and Fock offset o:
//!
//! | kind              | cₙ                               | o |
//! |-------------------|----------------------------------|---|
//! | Standard          | √(1-λ²) λⁿ                       | 0 |
//! | PhotonSubtracted  | √((1-λ²)³/(1+λ²)) (n+1) λⁿ       | 0 |
//! | PhotonAdded       | √((1-λ²)³/(1+λ²)) (n+1) λⁿ       | 1 |

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{truncation_level, TruncationPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResourceKind {
    Standard,
    PhotonSubtracted,
    PhotonAdded,
}

impl ResourceKind {
    pub const ALL: [ResourceKind; 3] = [
        ResourceKind::Standard,
        ResourceKind::PhotonSubtracted,
        ResourceKind::PhotonAdded,
    ];

    pub fn offset(self) -> usize {
        match self {
            ResourceKind::PhotonAdded => 1,
            _ => 0,
        }
    }

    /// Squared normalization constant multiplying the unnormalized weights.
    pub fn normalization(self, lambda: f64) -> f64 {
        let x = lambda * lambda;
        match self {
            ResourceKind::Standard => 1.0 - x,
            _ => (1.0 - x).powi(3) / (1.0 + x),
        }
    }

    /// Unnormalized Schmidt weight: λⁿ or (n+1)λⁿ.
    pub fn weight(self, lambda: f64, n: usize) -> f64 {
        let p = lambda.powi(n as i32);
        match self {
            ResourceKind::Standard => p,
            _ => (n + 1) as f64 * p,
        }
    }

    /// Normalized Schmidt coefficient cₙ.
    pub fn coefficient(self, lambda: f64, n: usize) -> f64 {
        self.normalization(lambda).sqrt() * self.weight(lambda, n)
    }

    /// Σ_{n ≥ levels} cₙ², in closed form.
    pub fn tail_mass(self, lambda: f64, levels: usize) -> f64 {
        let x = lambda * lambda;
        let xl = x.powi(levels as i32);
        match self {
            ResourceKind::Standard => xl,
            _ => {
                // Σ_{j≥0} (j+a)² xʲ = a²/(1-x) + 2a x/(1-x)² + x(1+x)/(1-x)³
                let a = (levels + 1) as f64;
                let y = 1.0 - x;
                xl * (a * a * y * y + 2.0 * a * x * y + x * (1.0 + x)) / (1.0 + x)
            }
        }
    }

    pub fn has_closed_form(self) -> bool {
        !matches!(self, ResourceKind::PhotonAdded)
    }

    pub fn label(self) -> &'static str {
        match self {
            ResourceKind::Standard => "standard",
            ResourceKind::PhotonSubtracted => "subtracted",
            ResourceKind::PhotonAdded => "added",
        }
    }
}

impl std::str::FromStr for ResourceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "std" | "epr" => Ok(ResourceKind::Standard),
            "subtracted" | "photon-subtracted" | "ps" => Ok(ResourceKind::PhotonSubtracted),
            "added" | "photon-added" | "pa" => Ok(ResourceKind::PhotonAdded),
            _ => Err(Error::InvalidParameter(format!("unknown resource kind {s:?}"))),
        }
    }
}

/// A truncated bipartite resource in Schmidt-diagonal form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtResource {
    pub kind: ResourceKind,
    pub lambda: f64,
    /// cₙ for n = 0..coeffs.len().
    pub coeffs: Vec<f64>,
    /// Kets are |n+offset, n+offset⟩.
    pub offset: usize,
    /// Probability mass discarded by truncation.
    pub tail_mass: f64,
    /// Truncation hit the hard cap; `tail_mass` may exceed epsilon.
    pub capped: bool,
    /// Tail tolerance the resource was built with.
    pub epsilon: f64,
}

impl SchmidtResource {
    pub fn build(kind: ResourceKind, lambda: f64, policy: &TruncationPolicy) -> Result<Self> {
        let t = truncation_level(lambda, kind, policy)?;
        let coeffs = (0..t.levels).map(|n| kind.coefficient(lambda, n)).collect();
        Ok(SchmidtResource {
            kind,
            lambda,
            coeffs,
            offset: kind.offset(),
            tail_mass: t.tail_mass,
            capped: t.capped,
            epsilon: policy.epsilon,
        })
    }

    /// Fails when the hard cap left more than epsilon of the spectrum behind.
    pub fn check_truncation(&self) -> Result<()> {
        if self.capped && self.tail_mass > self.epsilon {
            let required = (self.levels()..1 << 20)
                .find(|&l| self.kind.tail_mass(self.lambda, l) < self.epsilon)
                .unwrap_or(usize::MAX);
            return Err(Error::Truncation {
                tail: self.tail_mass,
                epsilon: self.epsilon,
                dim: self.support(),
                required: required.saturating_add(self.offset),
            });
        }
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.coeffs.len()
    }

    /// Highest Fock level carrying a retained coefficient, plus one.
    pub fn support(&self) -> usize {
        self.coeffs.len() + self.offset
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// [`SchmidtResource::build`].
pub fn build_resource(kind: ResourceKind, lambda: f64, policy: &TruncationPolicy) -> Result<SchmidtResource> {
    SchmidtResource::build(kind, lambda, policy)
}

/// Largest heralding probability still trusted to second order in θ.
pub const HERALD_VALIDITY_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Herald {
    pub probability: f64,
    /// False once the value leaves the perturbative regime.
    pub valid: bool,
}

/// Probability θ⁴(1+λ²)/(1-λ²)³ that both tap detectors fire, for tap
/// reflectivity θ. Identical for subtraction and addition.
pub fn herald_probability(theta: f64, lambda: f64) -> Result<Herald> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!("reflectivity {theta} outside [0, 1]")));
    }
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidLambda(lambda));
    }
    let x = lambda * lambda;
    let probability = theta.powi(4) * (1.0 + x) / (1.0 - x).powi(3);
    Ok(Herald {
        probability,
        valid: probability <= HERALD_VALIDITY_LIMIT,
    })
}

/// (Fock level, probability) pairs, starting at level 0. Levels below the
/// offset are reported with zero probability.
pub fn photon_number_distribution(res: &SchmidtResource) -> Vec<(usize, f64)> {
    (0..res.offset)
        .map(|n| (n, 0.0))
        .chain(res.coeffs.iter().enumerate().map(|(n, c)| (n + res.offset, c * c)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

/// Entanglement entropy -Σ pₙ log pₙ of the Schmidt spectrum.
pub fn von_neumann_entropy(res: &SchmidtResource, base: LogBase) -> f64 {
    let nats: f64 = res
        .coeffs
        .iter()
        .map(|c| c * c)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    match base {
        LogBase::Natural => nats,
        LogBase::Two => nats / std::f64::consts::LN_2,
    }
}

/// Joint phase-sum density |Σₙ cₙ e^{i(n+o)φ₊}|² / 2π on φ₊ ∈ [-π, π].
///
/// The 1/2π factor normalizes the density to unit integral (up to the
/// truncated tail).
pub fn joint_phase_density(res: &SchmidtResource, phi_plus: f64) -> f64 {
    let step = Complex64::from_polar(1.0, phi_plus);
    let mut phase = Complex64::from_polar(1.0, res.offset as f64 * phi_plus);
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in &res.coeffs {
        acc += phase * c;
        phase *= step;
    }
    acc.norm_sqr() / (2.0 * PI)
}
