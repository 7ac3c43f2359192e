use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resources::ResourceKind;

/// Bounds the infinite Fock sums by discarded probability mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Largest tolerated tail probability.
    pub epsilon: f64,
    /// Absolute maximum number of retained Fock levels.
    pub hard_cap: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            epsilon: 1e-12,
            hard_cap: 256,
        }
    }
}

impl TruncationPolicy {
    pub fn new(epsilon: f64, hard_cap: usize) -> Result<Self> {
        let p = TruncationPolicy { epsilon, hard_cap };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation epsilon {} outside (0, 1)",
                self.epsilon
            )));
        }
        if self.hard_cap < 16 {
            return Err(Error::InvalidParameter(format!(
                "truncation hard cap {} below 16",
                self.hard_cap
            )));
        }
        Ok(())
    }
}

/// Outcome of [`truncation_level`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Number of retained Schmidt terms, n = 0..levels.
    pub levels: usize,
    /// Probability mass in the discarded terms.
    pub tail_mass: f64,
    /// The hard cap was hit before the tail dropped below epsilon.
    pub capped: bool,
}

/// Smallest number of Schmidt terms whose discarded tail carries less than
/// `policy.epsilon` probability.
pub fn truncation_level(lambda: f64, kind: ResourceKind, policy: &TruncationPolicy) -> Result<Truncation> {
    policy.validate()?;
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidLambda(lambda));
    }
    for levels in 1..=policy.hard_cap {
        let tail = kind.tail_mass(lambda, levels);
        if tail < policy.epsilon {
            return Ok(Truncation {
                levels,
                tail_mass: tail,
                capped: false,
            });
        }
    }
    Ok(Truncation {
        levels: policy.hard_cap,
        tail_mass: kind.tail_mass(lambda, policy.hard_cap),
        capped: true,
    })
}
