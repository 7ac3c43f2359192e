//! Closed-form point evaluations for coherent and cat inputs on the standard
//! and photon-subtracted resources.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{finite, ratio, Evaluation, TeleportConfig, TeleportPoint};
use crate::error::{Error, Result};
use crate::input::{cat_normalization, InputState, Parity};
use crate::numerics::ComplexAmplitude;
use crate::resources::ResourceKind;

fn comparison_amplitude(cfg: &TeleportConfig) -> Result<Complex64> {
    cfg.comparison
        .amplitude()
        .ok_or_else(|| Error::InvalidParameter("closed forms need a coherent or cat comparison state".into()))
}

/// P(β) and F(β) for coherent input |α⟩ compared against |γ⟩.
///
/// With u = α - β and d = γ - gβ:
///
/// * standard: F = e^{-|d|² - λ²|u|²} |e^{λ d* u}|²,
///   P = (1-λ²)/π · e^{-(1-λ²)|u|²};
/// * subtracted: F = e^{-|d|² - λ²|u|²} |e^{λ d* u}(λ d* u + 1)|² / (λ⁴|u|⁴ + 3λ²|u|² + 1),
///   P = (1-λ²)³/(π(1+λ²)) · e^{(λ²-1)|u|²} (λ⁴|u|⁴ + 3λ²|u|² + 1).
///
/// The photon-added resource has no closed form and goes through
/// [`transfer_point`](super::transfer_point).
pub fn coherent_point(cfg: &TeleportConfig, alpha: ComplexAmplitude, beta: ComplexAmplitude) -> Result<TeleportPoint> {
    let input = InputState::coherent(alpha);
    if !cfg.comparison.comparable_with(&input) || matches!(cfg.comparison, InputState::FockCoeffs { .. }) {
        return Err(Error::InvalidParameter(
            "coherent input needs a coherent comparison state".into(),
        ));
    }
    let kind = cfg.resource.kind;
    if !kind.has_closed_form() {
        return super::transfer_point(cfg, &input, beta);
    }
    let lam = cfg.lambda();
    let g = cfg.gain;
    let (a, b) = (alpha.value(), beta.value());
    let gamma = comparison_amplitude(cfg)?;
    let u = a - b;
    let d = gamma - g * b;
    let x = d.conj() * u;
    let u2 = u.norm_sqr();
    let gauss = (-d.norm_sqr() - lam * lam * u2 + 2.0 * lam * x.re).exp();
    let (fidelity, prob) = match kind {
        ResourceKind::Standard => {
            let n = 1.0 - lam * lam;
            (gauss, n / PI * (-n * u2).exp())
        }
        _ => {
            let poly = lam.powi(4) * u2 * u2 + 3.0 * lam * lam * u2 + 1.0;
            let n = kind.normalization(lam);
            let f = gauss * (lam * x + 1.0).norm_sqr() / poly;
            (f, n / PI * ((lam * lam - 1.0) * u2).exp() * poly)
        }
    };
    Ok(TeleportPoint {
        beta: b,
        prob_density: finite(prob, "probability density", b)?,
        fidelity: Some(finite(fidelity, "fidelity", b)?),
        evaluation: Evaluation::ClosedForm,
    })
}

// ⟨c|T̂(β)|a⟩ · √(π/𝒩) for coherent |a⟩, |c⟩:
// exp(-|c-gβ|²/2 - |a-β|²/2 + λ(c-gβ)*(a-β) + i Im(-c g β*) + i Im(-β a*)) · poly,
// poly = 1 (standard) or 1 + λ(c-gβ)*(a-β) (subtracted).
fn overlap_kernel(kind: ResourceKind, lam: f64, g: f64, c: Complex64, a: Complex64, b: Complex64) -> Complex64 {
    let d = c - g * b;
    let u = a - b;
    let x = d.conj() * u;
    let phase = (-c * g * b.conj()).im + (-b * a.conj()).im;
    let e = (Complex64::new(-0.5 * d.norm_sqr() - 0.5 * u.norm_sqr(), phase) + lam * x).exp();
    match kind {
        ResourceKind::Standard => e,
        _ => e * (lam * x + 1.0),
    }
}

// ⟨a'|T̂†(β)T̂(β)|a⟩ · π/𝒩 for coherent |a⟩, |a'⟩, with z = λ²(a'-β)*(a-β):
// exp(-|a'-β|²/2 - |a-β|²/2 + z + i Im(-β a*) - i Im(-β a'*)) · poly,
// poly = 1 (standard) or 1 + 3z + z² (subtracted).
fn norm_kernel(kind: ResourceKind, lam: f64, a_bra: Complex64, a: Complex64, b: Complex64) -> Complex64 {
    let ub = a_bra - b;
    let u = a - b;
    let z = lam * lam * ub.conj() * u;
    let phase = (-b * a.conj()).im - (-b * a_bra.conj()).im;
    let e = (Complex64::new(-0.5 * ub.norm_sqr() - 0.5 * u.norm_sqr(), phase) + z).exp();
    match kind {
        ResourceKind::Standard => e,
        _ => e * (1.0 + 3.0 * z + z * z),
    }
}

/// P(β) and F(β) for the cat input 𝒩_α(|α⟩ ± |-α⟩) against the cat
/// 𝒩_γ(|γ⟩ ± |-γ⟩) of the same parity, as four interfering coherent terms.
pub fn cat_point(
    cfg: &TeleportConfig,
    alpha: ComplexAmplitude,
    parity: Parity,
    beta: ComplexAmplitude,
) -> Result<TeleportPoint> {
    let input = InputState::cat(alpha, parity)?;
    match cfg.comparison {
        InputState::Cat { parity: p, .. } if p == parity => {}
        _ => {
            return Err(Error::InvalidParameter(
                "cat input needs a cat comparison state of the same parity".into(),
            ))
        }
    }
    let kind = cfg.resource.kind;
    if !kind.has_closed_form() {
        return super::transfer_point(cfg, &input, beta);
    }
    let b = beta.value();
    let (overlap_sqr, prob) = cat_terms(cfg, alpha.value(), parity, b)?;
    Ok(TeleportPoint {
        beta: b,
        prob_density: finite(prob, "probability density", b)?,
        fidelity: ratio(finite(overlap_sqr, "overlap", b)?, prob),
        evaluation: Evaluation::ClosedForm,
    })
}

fn cat_terms(cfg: &TeleportConfig, a: Complex64, parity: Parity, b: Complex64) -> Result<(f64, f64)> {
    let kind = cfg.resource.kind;
    let lam = cfg.lambda();
    let g = cfg.gain;
    let gamma = comparison_amplitude(cfg)?;
    let s = parity.sign();
    let na = cat_normalization(a, parity)?;
    let ng = cat_normalization(gamma, parity)?;
    let pref = kind.normalization(lam) / PI;
    let branches = [(1.0, 1.0), (s, -1.0)];

    let mut amp = Complex64::new(0.0, 0.0);
    for &(sc, c) in &branches {
        for &(sa, av) in &branches {
            amp += sc * sa * overlap_kernel(kind, lam, g, c * gamma, av * a, b);
        }
    }
    let overlap_sqr = pref * na * na * ng * ng * amp.norm_sqr();

    let mut norm = Complex64::new(0.0, 0.0);
    for &(sb, ab) in &branches {
        for &(sa, av) in &branches {
            norm += sb * sa * norm_kernel(kind, lam, ab * a, av * a, b);
        }
    }
    // The imaginary parts of the two cross terms cancel.
    let prob = pref * na * na * norm.re;
    Ok((overlap_sqr, prob.max(0.0)))
}

/// |⟨χ|T̂(β)|ψ⟩|² from the closed forms; the average-fidelity integrand.
pub fn closed_form_overlap_sqr(cfg: &TeleportConfig, input: &InputState, beta: Complex64) -> Result<f64> {
    let kind = cfg.resource.kind;
    if !kind.has_closed_form() {
        return Err(Error::NoClosedForm { kind });
    }
    let lam = cfg.lambda();
    let g = cfg.gain;
    let value = match input {
        InputState::Coherent { alpha } => {
            let gamma = match cfg.comparison {
                InputState::Coherent { alpha: gamma } => gamma.value(),
                _ => return Err(Error::NoClosedForm { kind }),
            };
            let k = overlap_kernel(kind, lam, g, gamma, alpha.value(), beta);
            kind.normalization(lam) / PI * k.norm_sqr()
        }
        InputState::Cat { alpha, parity } => match cfg.comparison {
            InputState::Cat { parity: p, .. } if p == *parity => cat_terms(cfg, alpha.value(), *parity, beta)?.0,
            _ => return Err(Error::NoClosedForm { kind }),
        },
        InputState::FockCoeffs { .. } => return Err(Error::NoClosedForm { kind }),
    };
    finite(value, "overlap", beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::TruncationPolicy;
    use crate::resources::SchmidtResource;
    use approx::assert_relative_eq;

    fn amp(re: f64, im: f64) -> ComplexAmplitude {
        ComplexAmplitude::new(re, im).unwrap()
    }

    fn cfg(kind: ResourceKind, lam: f64, g: f64, comparison: InputState) -> TeleportConfig {
        let r = SchmidtResource::build(kind, lam, &TruncationPolicy::default()).unwrap();
        TeleportConfig::new(g, comparison, r).unwrap()
    }

    #[test]
    fn zero_squeezing_perfect_match_point() {
        let a = amp(1.2, -0.4);
        for kind in [ResourceKind::Standard, ResourceKind::PhotonSubtracted] {
            let c = cfg(kind, 0.0, 1.0, InputState::coherent(a));
            let p = coherent_point(&c, a, a).unwrap();
            assert_relative_eq!(p.fidelity.unwrap(), 1.0, epsilon = 1e-15);
            assert_relative_eq!(p.prob_density, 1.0 / PI, epsilon = 1e-15);
        }
    }

    #[test]
    fn attenuating_gain_is_perfect_pointwise() {
        let lam = 0.6;
        let a = amp(2.0, 0.5);
        let gamma = amp(lam * 2.0, lam * 0.5);
        let c = cfg(ResourceKind::Standard, lam, lam, InputState::coherent(gamma));
        for (re, im) in [(0.0, 0.0), (3.0, -1.0), (-2.5, 4.0)] {
            let p = coherent_point(&c, a, amp(re, im)).unwrap();
            assert_relative_eq!(p.fidelity.unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn even_cat_at_origin_reduces_to_vacuum() {
        let z = amp(0.0, 0.0);
        for kind in [ResourceKind::Standard, ResourceKind::PhotonSubtracted] {
            let cat_cfg = cfg(kind, 0.7, 1.0, InputState::cat(z, Parity::Even).unwrap());
            let coh_cfg = cfg(kind, 0.7, 1.0, InputState::coherent(z));
            let b = amp(0.3, -0.8);
            let pc = cat_point(&cat_cfg, z, Parity::Even, b).unwrap();
            let pv = coherent_point(&coh_cfg, z, b).unwrap();
            assert_relative_eq!(pc.prob_density, pv.prob_density, max_relative = 1e-13);
            assert_relative_eq!(pc.fidelity.unwrap(), pv.fidelity.unwrap(), max_relative = 1e-13);
        }
    }

    #[test]
    fn coherent_overlap_is_p_times_f() {
        let a = amp(1.5, 0.0);
        let c = cfg(
            ResourceKind::PhotonSubtracted,
            0.8,
            0.9,
            InputState::coherent(amp(1.3, 0.2)),
        );
        let b = amp(0.4, 0.9);
        let p = coherent_point(&c, a, b).unwrap();
        let o = closed_form_overlap_sqr(&c, &InputState::coherent(a), b.value()).unwrap();
        assert_relative_eq!(o, p.prob_density * p.fidelity.unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn mismatched_families_rejected() {
        let c = cfg(ResourceKind::Standard, 0.5, 1.0, InputState::coherent(amp(1.0, 0.0)));
        assert!(cat_point(&c, amp(1.0, 0.0), Parity::Even, amp(0.0, 0.0)).is_err());
        let c = cfg(
            ResourceKind::Standard,
            0.5,
            1.0,
            InputState::cat(amp(1.0, 0.0), Parity::Odd).unwrap(),
        );
        assert!(cat_point(&c, amp(1.0, 0.0), Parity::Even, amp(0.0, 0.0)).is_err());
        assert!(coherent_point(&c, amp(1.0, 0.0), amp(0.0, 0.0)).is_err());
    }

    #[test]
    fn added_resource_has_no_closed_overlap() {
        let c = cfg(ResourceKind::PhotonAdded, 0.5, 1.0, InputState::coherent(amp(1.0, 0.0)));
        let r = closed_form_overlap_sqr(&c, &InputState::coherent(amp(1.0, 0.0)), Complex64::new(0.0, 0.0));
        assert!(matches!(r, Err(Error::NoClosedForm { .. })));
        let p = coherent_point(&c, amp(1.0, 0.0), amp(0.2, 0.0)).unwrap();
        assert_eq!(p.evaluation, Evaluation::Numeric);
    }
}
