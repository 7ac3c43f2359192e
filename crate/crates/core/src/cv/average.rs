use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{closed_form_overlap_sqr, transfer_amplitudes, Evaluation, Route, TeleportConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::input::InputState;
use crate::numerics::{integrate_plane_with, QuadratureSpec};

/// Largest accepted order-doubling error on F̄.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-4;

/// Order and refinement for quadratures whose centers and width are derived
/// from the problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    pub order: usize,
    pub refine: bool,
    /// Overrides the default width 1/√(1-λ²).
    pub width: Option<f64>,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            order: 48,
            refine: true,
            width: None,
        }
    }
}

/// Nodes centered on the input amplitude (±α for cats) with width 1/√(1-λ²),
/// the decay scale of P(β).
pub fn default_quadrature(input: &InputState, lambda: f64, opts: &QuadratureOptions) -> Result<QuadratureSpec> {
    let centers = match input {
        InputState::Coherent { alpha } => vec![alpha.value()],
        InputState::Cat { alpha, .. } => vec![alpha.value(), -alpha.value()],
        InputState::FockCoeffs { .. } => vec![Complex64::new(0.0, 0.0)],
    };
    let width = opts.width.unwrap_or_else(|| 1.0 / (1.0 - lambda * lambda).sqrt());
    QuadratureSpec::new(opts.order, centers, width, opts.refine)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageFidelity {
    pub fbar: f64,
    pub err: f64,
    pub evaluation: Evaluation,
}

/// F̄ = ∫ |⟨χ|T̂(β)|ψ⟩|² d²β, closed form where available.
pub fn average_fidelity(cfg: &TeleportConfig, input: &InputState, quad: &QuadratureSpec) -> Result<AverageFidelity> {
    average_fidelity_with(cfg, input, quad, Route::Auto, Execution::default())
}

/// [`average_fidelity`] with an explicit route and execution mode.
///
/// The integrand is the squared overlap itself, never P·F, so regions where
/// P(β) underflows contribute cleanly.
pub fn average_fidelity_with(
    cfg: &TeleportConfig,
    input: &InputState,
    quad: &QuadratureSpec,
    route: Route,
    exec: Execution,
) -> Result<AverageFidelity> {
    cfg.check_input(input)?;
    let closed_available = cfg.resource.kind.has_closed_form() && !matches!(input, InputState::FockCoeffs { .. });
    let evaluation = match route {
        Route::Auto if closed_available => Evaluation::ClosedForm,
        Route::Auto | Route::Numeric => Evaluation::Numeric,
        Route::ClosedForm if closed_available => Evaluation::ClosedForm,
        Route::ClosedForm => {
            return Err(Error::NoClosedForm {
                kind: cfg.resource.kind,
            })
        }
    };
    if evaluation == Evaluation::Numeric {
        cfg.resource.check_truncation()?;
    }
    // Integrand errors cannot escape the quadrature closure; stash the first one.
    let failure = std::sync::Mutex::new(None);
    let integrand = |beta: Complex64| {
        let v = match evaluation {
            Evaluation::ClosedForm => closed_form_overlap_sqr(cfg, input, beta),
            Evaluation::Numeric => transfer_amplitudes(cfg, input, beta).map(|t| t.overlap.norm_sqr()),
        };
        v.unwrap_or_else(|e| {
            failure.lock().unwrap().get_or_insert(e);
            f64::NAN
        })
    };
    let result = integrate_plane_with(integrand, quad, exec);
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let r = result?;
    if r.err > CONVERGENCE_TOLERANCE {
        return Err(Error::Convergence {
            err: r.err,
            tolerance: CONVERGENCE_TOLERANCE,
            order: quad.order,
            centers: quad.centers.len(),
            width: quad.width,
        });
    }
    Ok(AverageFidelity {
        fbar: r.value,
        err: r.err,
        evaluation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{ComplexAmplitude, TruncationPolicy};
    use crate::resources::{ResourceKind, SchmidtResource};

    fn amp(re: f64, im: f64) -> ComplexAmplitude {
        ComplexAmplitude::new(re, im).unwrap()
    }

    fn setup(
        kind: ResourceKind,
        lam: f64,
        g: f64,
        a: ComplexAmplitude,
        gamma: ComplexAmplitude,
    ) -> (TeleportConfig, InputState, QuadratureSpec) {
        let r = SchmidtResource::build(kind, lam, &TruncationPolicy::default()).unwrap();
        let input = InputState::coherent(a);
        let q = default_quadrature(&input, lam, &QuadratureOptions::default()).unwrap();
        (
            TeleportConfig::new(g, InputState::coherent(gamma), r).unwrap(),
            input,
            q,
        )
    }

    #[test]
    fn classical_limit_is_one_half() {
        let (c, i, q) = setup(ResourceKind::Standard, 0.0, 1.0, amp(1.5, 0.0), amp(1.5, 0.0));
        let f = average_fidelity(&c, &i, &q).unwrap();
        assert!((f.fbar - 0.5).abs() < 1e-12);
    }

    #[test]
    fn standard_unity_gain_closed_form() {
        for lam in [0.2, 0.5, 0.8] {
            let (c, i, q) = setup(ResourceKind::Standard, lam, 1.0, amp(1.5, 0.0), amp(1.5, 0.0));
            let f = average_fidelity(&c, &i, &q).unwrap();
            assert!((f.fbar - (1.0 + lam) / 2.0).abs() < 1e-10, "{lam}: {}", f.fbar);
        }
    }

    #[test]
    fn subtracted_unity_gain_closed_form() {
        // 𝒩 ∫₀^∞ e^{-2(1-λ)t}(1+λt)² dt = 𝒩 (1/a + 2λ/a² + 2λ²/a³), a = 2(1-λ).
        let lam: f64 = 0.6;
        let a = 2.0 * (1.0 - lam);
        let n = (1.0 - lam * lam).powi(3) / (1.0 + lam * lam);
        let expect = n * (1.0 / a + 2.0 * lam / (a * a) + 2.0 * lam * lam / a.powi(3));
        let (c, i, q) = setup(ResourceKind::PhotonSubtracted, lam, 1.0, amp(0.5, 1.0), amp(0.5, 1.0));
        let f = average_fidelity(&c, &i, &q).unwrap();
        assert!((f.fbar - expect).abs() < 1e-10);
    }

    #[test]
    fn closed_route_refused_for_added() {
        let (c, i, q) = setup(ResourceKind::PhotonAdded, 0.5, 1.0, amp(1.0, 0.0), amp(1.0, 0.0));
        assert!(average_fidelity_with(&c, &i, &q, Route::ClosedForm, Execution::Sequential).is_err());
        let f = average_fidelity(&c, &i, &q).unwrap();
        assert_eq!(f.evaluation, Evaluation::Numeric);
    }

    #[test]
    fn coarse_grid_reports_convergence_failure() {
        let (c, i, _) = setup(ResourceKind::PhotonSubtracted, 0.9, 1.0, amp(2.0, 0.0), amp(2.0, 0.0));
        let q = QuadratureSpec::new(8, vec![Complex64::new(-6.0, 0.0)], 0.3, true).unwrap();
        assert!(matches!(average_fidelity(&c, &i, &q), Err(Error::Convergence { .. })));
    }
}
