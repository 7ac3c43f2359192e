//! States to be teleported.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{coherent_amplitude, ComplexAmplitude};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "even" | "+" => Ok(Parity::Even),
            "odd" | "-" => Ok(Parity::Odd),
            _ => Err(Error::InvalidParameter(format!("unknown parity {s:?}"))),
        }
    }
}

/// Tolerance on ‖ψ‖² for raw Fock input.
pub const FOCK_NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum InputState {
    Coherent {
        alpha: ComplexAmplitude,
    },
    /// 𝒩_α(|α⟩ ± |-α⟩).
    Cat {
        alpha: ComplexAmplitude,
        parity: Parity,
    },
    FockCoeffs {
        coeffs: Vec<Complex64>,
    },
}

/// 𝒩_α = 1/√(2 ± 2e^{-2|α|²}).
pub fn cat_normalization(alpha: Complex64, parity: Parity) -> Result<f64> {
    let d = 2.0 + 2.0 * parity.sign() * (-2.0 * alpha.norm_sqr()).exp();
    if d <= 1e-300 {
        return Err(Error::InvalidParameter(
            "odd cat state with zero amplitude is not normalizable".into(),
        ));
    }
    Ok(1.0 / d.sqrt())
}

impl InputState {
    pub fn coherent(alpha: ComplexAmplitude) -> Self {
        InputState::Coherent { alpha }
    }

    pub fn cat(alpha: ComplexAmplitude, parity: Parity) -> Result<Self> {
        cat_normalization(alpha.value(), parity)?;
        Ok(InputState::Cat { alpha, parity })
    }

    pub fn fock(coeffs: Vec<Complex64>) -> Result<Self> {
        let s = InputState::FockCoeffs { coeffs };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InputState::Coherent { .. } => Ok(()),
            InputState::Cat { alpha, parity } => cat_normalization(alpha.value(), *parity).map(|_| ()),
            InputState::FockCoeffs { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidParameter("empty Fock coefficient list".into()));
                }
                let n: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
                if n.is_nan() || (n - 1.0).abs() > FOCK_NORM_TOLERANCE {
                    return Err(Error::InvalidParameter(format!(
                        "Fock coefficients have squared norm {n}, expected 1"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn amplitude(&self) -> Option<Complex64> {
        match self {
            InputState::Coherent { alpha } | InputState::Cat { alpha, .. } => Some(alpha.value()),
            InputState::FockCoeffs { .. } => None,
        }
    }

    /// The same family of state at a different amplitude (used for the
    /// comparison state γ).
    pub fn with_amplitude(&self, gamma: ComplexAmplitude) -> Result<Self> {
        match self {
            InputState::Coherent { .. } => Ok(InputState::Coherent { alpha: gamma }),
            InputState::Cat { parity, .. } => InputState::cat(gamma, *parity),
            InputState::FockCoeffs { .. } => Err(Error::InvalidParameter(
                "raw Fock input has no amplitude to rescale".into(),
            )),
        }
    }

    /// Whether `other` may serve as the comparison state for this input.
    pub fn comparable_with(&self, other: &InputState) -> bool {
        match (self, other) {
            (InputState::Coherent { .. }, InputState::Coherent { .. }) => true,
            (InputState::Cat { parity: a, .. }, InputState::Cat { parity: b, .. }) => a == b,
            (InputState::FockCoeffs { .. }, _) | (_, InputState::FockCoeffs { .. }) => true,
            _ => false,
        }
    }

    /// The state as Σⱼ wⱼ|aⱼ⟩, when it is a superposition of coherent states.
    pub fn coherent_components(&self) -> Option<Vec<(Complex64, Complex64)>> {
        match self {
            InputState::Coherent { alpha } => Some(vec![(Complex64::new(1.0, 0.0), alpha.value())]),
            InputState::Cat { alpha, parity } => {
                let a = alpha.value();
                let n = cat_normalization(a, *parity).ok()?;
                Some(vec![
                    (Complex64::new(n, 0.0), a),
                    (Complex64::new(n * parity.sign(), 0.0), -a),
                ])
            }
            InputState::FockCoeffs { .. } => None,
        }
    }

    /// Fock amplitude ⟨n|ψ⟩.
    pub fn fock_amplitude(&self, n: usize) -> Complex64 {
        match self {
            InputState::FockCoeffs { coeffs } => coeffs.get(n).copied().unwrap_or_default(),
            // 𝒩(⟨n|α⟩ ± ⟨n|-α⟩) = 𝒩(1 ± (-1)ⁿ)⟨n|α⟩, exactly zero on the wrong parity.
            InputState::Cat { alpha, parity } => {
                let same = n.is_multiple_of(2) == (*parity == Parity::Even);
                match (same, cat_normalization(alpha.value(), *parity)) {
                    (true, Ok(norm)) => coherent_amplitude(alpha.value(), n) * (2.0 * norm),
                    _ => Complex64::new(0.0, 0.0),
                }
            }
            _ => self
                .coherent_components()
                .unwrap_or_default()
                .iter()
                .map(|&(w, a)| w * coherent_amplitude(a, n))
                .sum(),
        }
    }

    /// ⟨n|ψ⟩ for n = 0..len.
    pub fn fock_coefficients(&self, len: usize) -> Vec<Complex64> {
        (0..len).map(|n| self.fock_amplitude(n)).collect()
    }

    /// Number of Fock levels needed so that the discarded tail is below
    /// `epsilon`, capped at `cap`.
    pub fn support(&self, epsilon: f64, cap: usize) -> usize {
        if let InputState::FockCoeffs { coeffs } = self {
            return coeffs.len();
        }
        let mean = self.amplitude().unwrap_or_default().norm_sqr();
        let tails = self.suffix_mass(cap);
        (0..cap)
            .find(|&n| tails[n + 1] < epsilon && n as f64 >= mean)
            .map_or(cap, |n| n + 1)
    }

    /// Probability carried by Fock levels ≥ `from`, summed term by term so
    /// tails far below machine epsilon stay resolved.
    pub fn tail_mass(&self, from: usize) -> f64 {
        let mean = self.amplitude().unwrap_or_default().norm_sqr();
        let mut total = 0.0;
        let mut prev = f64::INFINITY;
        let mut n = from;
        loop {
            let p = self.fock_amplitude(n).norm_sqr();
            total += p;
            // Pairs of terms, since cats vanish on every other level.
            let negligible = p.max(prev) <= 1e-17 * total;
            if (n as f64 > mean + 1.0 && negligible) || n > from + (1 << 16) {
                return total;
            }
            prev = p;
            n += 1;
            if let InputState::FockCoeffs { coeffs } = self {
                if n >= coeffs.len() {
                    return total;
                }
            }
        }
    }

    // tails[n] = Σ_{m ≥ n, m < len} pₘ, accumulated from the small end.
    fn suffix_mass(&self, len: usize) -> Vec<f64> {
        let mut tails = vec![0.0; len + 1];
        for n in (0..len).rev() {
            tails[n] = tails[n + 1] + self.fock_amplitude(n).norm_sqr();
        }
        tails
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn amp(re: f64, im: f64) -> ComplexAmplitude {
        ComplexAmplitude::new(re, im).unwrap()
    }

    #[test]
    fn cat_norms() {
        let n = cat_normalization(Complex64::new(1.5, 0.0), Parity::Even).unwrap();
        assert_relative_eq!(n, 1.0 / (2.0 + 2.0 * (-4.5f64).exp()).sqrt());
        assert!(cat_normalization(Complex64::new(0.0, 0.0), Parity::Odd).is_err());
        assert!(InputState::cat(amp(0.0, 0.0), Parity::Odd).is_err());
    }

    #[test]
    fn even_cat_at_origin_is_vacuum() {
        let c = InputState::cat(amp(0.0, 0.0), Parity::Even).unwrap();
        let v = c.fock_coefficients(4);
        assert_relative_eq!(v[0].re, 1.0, epsilon = 1e-15);
        assert!(v[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn cat_parity_selects_fock_levels() {
        let even = InputState::cat(amp(1.5, 0.0), Parity::Even)
            .unwrap()
            .fock_coefficients(40);
        let odd = InputState::cat(amp(0.0, 1.5), Parity::Odd)
            .unwrap()
            .fock_coefficients(40);
        for n in 0..40 {
            if n % 2 == 1 {
                assert_eq!(even[n].norm(), 0.0);
            } else {
                assert_eq!(odd[n].norm(), 0.0);
            }
        }
        let ne: f64 = even.iter().map(|c| c.norm_sqr()).sum();
        let no: f64 = odd.iter().map(|c| c.norm_sqr()).sum();
        assert_relative_eq!(ne, 1.0, epsilon = 1e-13);
        assert_relative_eq!(no, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn fock_input_must_be_normalized() {
        assert!(InputState::fock(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).is_err());
        assert!(InputState::fock(vec![]).is_err());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(InputState::fock(vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)]).is_ok());
    }

    #[test]
    fn comparison_families() {
        let coh = InputState::coherent(amp(1.0, 0.0));
        let even = InputState::cat(amp(1.0, 0.0), Parity::Even).unwrap();
        let odd = InputState::cat(amp(1.0, 0.0), Parity::Odd).unwrap();
        assert!(coh.comparable_with(&coh));
        assert!(!coh.comparable_with(&even));
        assert!(!even.comparable_with(&odd));
        assert!(even.comparable_with(&even.with_amplitude(amp(2.0, 0.0)).unwrap()));
    }

    #[test]
    fn support_covers_poisson_tail() {
        let s = InputState::coherent(amp(3.0, 0.0)).support(1e-12, 500);
        let kept: f64 = InputState::coherent(amp(3.0, 0.0))
            .fock_coefficients(s)
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        assert!(1.0 - kept < 1e-12);
        assert!(s < 50);
    }
}
