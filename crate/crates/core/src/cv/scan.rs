//! Gain/γ scans and the F̄ = 2/3 boundary scan.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{average_fidelity_with, default_quadrature, QuadratureOptions, Route, TeleportConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::input::InputState;
use crate::numerics::{ComplexAmplitude, TruncationPolicy};
use crate::resources::{ResourceKind, SchmidtResource};

/// Unity-gain average fidelity above which coherent-state teleportation is
/// unambiguously quantum.
pub const QUANTUM_THRESHOLD: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainScanRow {
    pub g: f64,
    pub gamma: Complex64,
    pub fbar: f64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainScan {
    /// g-major, γ-minor.
    pub rows: Vec<GainScanRow>,
    pub best: GainScanRow,
}

/// F̄ over the full (g, γ) cross product. Ties in the argmax go to the first
/// row in grid order.
pub fn gain_gamma_scan(
    input: &InputState,
    resource: &SchmidtResource,
    g_grid: &[f64],
    gamma_grid: &[ComplexAmplitude],
    opts: &QuadratureOptions,
    exec: Execution,
) -> Result<GainScan> {
    if g_grid.is_empty() || gamma_grid.is_empty() {
        return Err(Error::InvalidParameter("gain and γ grids must be non-empty".into()));
    }
    let quad = default_quadrature(input, resource.lambda, opts)?;
    let n_gamma = gamma_grid.len();
    let rows = exec.try_map(g_grid.len() * n_gamma, |idx| {
        let g = g_grid[idx / n_gamma];
        let gamma = gamma_grid[idx % n_gamma];
        let cfg = TeleportConfig::new(g, input.with_amplitude(gamma)?, resource.clone())?;
        // Points are already spread across workers.
        let f = average_fidelity_with(&cfg, input, &quad, Route::Auto, Execution::Sequential)?;
        Ok::<_, Error>(GainScanRow {
            g,
            gamma: gamma.value(),
            fbar: f.fbar,
            err: f.err,
        })
    })?;
    let best = rows
        .iter()
        .copied()
        .fold(None::<GainScanRow>, |acc, r| match acc {
            Some(b) if b.fbar >= r.fbar => Some(b),
            _ => Some(r),
        })
        .expect("non-empty grid");
    Ok(GainScan { rows, best })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    pub lambda: f64,
    pub standard: f64,
    pub subtracted: f64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryScan {
    pub rows: Vec<BoundaryRow>,
    /// λ where the standard curve first reaches 2/3 (linear interpolation).
    pub standard_crossing: Option<f64>,
    pub subtracted_crossing: Option<f64>,
    /// λ-interval where only the subtracted resource beats 2/3.
    pub quantum_window: Option<(f64, f64)>,
    /// Grid λ maximizing F̄_subtracted − F̄_standard.
    pub gap_argmax_lambda: f64,
    pub gap_absolute: f64,
    /// gap_absolute / F̄_standard at the argmax.
    pub gap_relative: f64,
    /// Both curves increase monotonically along the grid.
    pub monotone: bool,
}

fn crossing(lambdas: &[f64], values: &[f64], level: f64) -> Option<f64> {
    lambdas
        .windows(2)
        .zip(values.windows(2))
        .find(|(_, v)| v[0] < level && v[1] >= level)
        .map(|(l, v)| l[0] + (level - v[0]) * (l[1] - l[0]) / (v[1] - v[0]))
}

/// Unity-gain, γ = α coherent-state F̄(λ) for the standard and subtracted
/// resources.
pub fn boundary_scan(
    alpha: ComplexAmplitude,
    lambda_grid: &[f64],
    opts: &QuadratureOptions,
    policy: &TruncationPolicy,
    exec: Execution,
) -> Result<BoundaryScan> {
    if lambda_grid.is_empty() {
        return Err(Error::InvalidParameter("λ grid must be non-empty".into()));
    }
    let input = InputState::coherent(alpha);
    let rows = exec.try_map(lambda_grid.len(), |i| {
        let lambda = lambda_grid[i];
        let quad = default_quadrature(&input, lambda, opts)?;
        let mut out = [0.0; 2];
        let mut err: f64 = 0.0;
        for (slot, kind) in [ResourceKind::Standard, ResourceKind::PhotonSubtracted]
            .into_iter()
            .enumerate()
        {
            let res = SchmidtResource::build(kind, lambda, policy)?;
            let cfg = TeleportConfig::new(1.0, input.clone(), res)?;
            let f = average_fidelity_with(&cfg, &input, &quad, Route::Auto, Execution::Sequential)?;
            out[slot] = f.fbar;
            err = err.max(f.err);
        }
        Ok::<_, Error>(BoundaryRow {
            lambda,
            standard: out[0],
            subtracted: out[1],
            err,
        })
    })?;

    let lambdas: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let std_curve: Vec<f64> = rows.iter().map(|r| r.standard).collect();
    let sub_curve: Vec<f64> = rows.iter().map(|r| r.subtracted).collect();
    let standard_crossing = crossing(&lambdas, &std_curve, QUANTUM_THRESHOLD);
    let subtracted_crossing = crossing(&lambdas, &sub_curve, QUANTUM_THRESHOLD);
    let quantum_window = match (subtracted_crossing, standard_crossing) {
        (Some(lo), Some(hi)) if lo < hi => Some((lo, hi)),
        _ => None,
    };
    let best = rows.iter().fold(&rows[0], |b, r| {
        if r.subtracted - r.standard > b.subtracted - b.standard {
            r
        } else {
            b
        }
    });
    let gap_absolute = best.subtracted - best.standard;
    let monotone = rows
        .windows(2)
        .all(|w| w[1].standard > w[0].standard && w[1].subtracted > w[0].subtracted);
    Ok(BoundaryScan {
        standard_crossing,
        subtracted_crossing,
        quantum_window,
        gap_argmax_lambda: best.lambda,
        gap_absolute,
        gap_relative: gap_absolute / best.standard,
        monotone,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_interpolates_linearly() {
        let l = [0.0, 0.1, 0.2, 0.3];
        let v = [0.0, 0.5, 1.0, 1.5];
        assert!((crossing(&l, &v, 0.75).unwrap() - 0.15).abs() < 1e-15);
        assert!(crossing(&l, &v, 2.0).is_none());
    }

    #[test]
    fn empty_grids_rejected() {
        let a = ComplexAmplitude::real(1.0).unwrap();
        let opts = QuadratureOptions::default();
        let p = TruncationPolicy::default();
        assert!(boundary_scan(a, &[], &opts, &p, Execution::Sequential).is_err());
        let r = SchmidtResource::build(ResourceKind::Standard, 0.5, &p).unwrap();
        assert!(gain_gamma_scan(&InputState::coherent(a), &r, &[], &[a], &opts, Execution::Sequential).is_err());
    }

    #[test]
    fn standard_line_crosses_at_one_third() {
        let a = ComplexAmplitude::real(3.0).unwrap();
        let grid: Vec<f64> = (1..=9).map(|i| i as f64 * 0.1).collect();
        let s = boundary_scan(
            a,
            &grid,
            &QuadratureOptions::default(),
            &TruncationPolicy::default(),
            Execution::default(),
        )
        .unwrap();
        for r in &s.rows {
            assert!((r.standard - (1.0 + r.lambda) / 2.0).abs() < 1e-9);
        }
        assert!((s.standard_crossing.unwrap() - 1.0 / 3.0).abs() < 1e-9);
        assert!(s.monotone);
    }
}
