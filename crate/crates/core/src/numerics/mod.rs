//! Shared numerical building blocks.

mod displacement;
mod quadrature;
mod special;
mod truncation;

pub use displacement::{displacement_matrix, MAX_DISPLACEMENT_DIM};
pub use quadrature::{
    gauss_hermite, integrate_plane, integrate_plane_with, GaussHermiteRule, QuadratureResult, QuadratureSpec,
    MAX_ORDER, MIN_ORDER,
};
pub use special::{coherent_amplitude, coherent_amplitudes, laguerre_scaled, log_factorial};
pub use truncation::{truncation_level, Truncation, TruncationPolicy};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite complex amplitude (α, β or γ) in dimensionless quadrature units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct ComplexAmplitude(Complex64);

impl ComplexAmplitude {
    pub const ZERO: ComplexAmplitude = ComplexAmplitude(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::try_from(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(re, 0.0)
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }
}

impl TryFrom<Complex64> for ComplexAmplitude {
    type Error = Error;

    fn try_from(z: Complex64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() {
            Ok(ComplexAmplitude(z))
        } else {
            Err(Error::InvalidParameter(format!("non-finite amplitude {z}")))
        }
    }
}

impl From<ComplexAmplitude> for Complex64 {
    fn from(a: ComplexAmplitude) -> Complex64 {
        a.0
    }
}

impl fmt::Display for ComplexAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parses `1.5`, `1.5i`, `-i`, `0.3+0.4i`, `1e-1-2i`.
impl FromStr for ComplexAmplitude {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse complex amplitude {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(bad());
        }
        let Some(body) = t.strip_suffix(['i', 'j']) else {
            let re: f64 = t.parse().map_err(|_| bad())?;
            return ComplexAmplitude::new(re, 0.0);
        };
        // Split at the last sign that is not the leading sign or an exponent sign.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
        let parse_im = |s: &str| -> Result<f64> {
            match s {
                "" | "+" => Ok(1.0),
                "-" => Ok(-1.0),
                _ => s.parse().map_err(|_| bad()),
            }
        };
        match split {
            Some(i) => {
                let re: f64 = body[..i].parse().map_err(|_| bad())?;
                ComplexAmplitude::new(re, parse_im(&body[i..])?)
            }
            None => ComplexAmplitude::new(0.0, parse_im(body)?),
        }
    }
}
