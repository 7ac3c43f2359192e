use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;

pub const MIN_ORDER: usize = 8;
/// Largest rule order (after refinement doubling) whose scaled weights stay
/// representable in f64.
pub const MAX_ORDER: usize = 512;

// Partition-of-unity scale relative to the node width. Sharper partitions
// have complex poles close to the real plane and slow the rule down.
const PARTITION_SCALE: f64 = 3.0;

/// Gauss–Hermite rule for ∫ e^{-x²} f(x) dx.
#[derive(Debug, Clone)]
pub struct GaussHermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// w_i · e^{x_i²}, for integrands that do not carry the Gaussian weight.
    pub scaled_weights: Vec<f64>,
}

/// Nodes and weights of the `n`-point Gauss–Hermite rule (cached).
pub fn gauss_hermite(n: usize) -> Arc<GaussHermiteRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermiteRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(compute_rule(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

// Newton iteration on orthonormal Hermite functions with the usual asymptotic
// starting guesses for the largest roots.
fn compute_rule(n: usize) -> GaussHermiteRule {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut ln_w = vec![0.0; n];
    let m = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        let lw = 2f64.ln() - 2.0 * pp.abs().ln();
        ln_w[i] = lw;
        ln_w[n - 1 - i] = lw;
    }
    // Odd n has a root at exactly zero.
    if n % 2 == 1 {
        x[m - 1] = 0.0;
    }
    let weights = ln_w.iter().map(|lw| lw.exp()).collect();
    let scaled_weights = ln_w.iter().zip(&x).map(|(lw, xi)| (lw + xi * xi).exp()).collect();
    GaussHermiteRule {
        nodes: x,
        weights,
        scaled_weights,
    }
}

/// Multi-center tensor-product Gauss–Hermite quadrature over the complex plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Nodes per axis.
    pub order: usize,
    /// Integrand peak locations.
    pub centers: Vec<Complex64>,
    /// Gaussian decay scale of the node placement.
    pub width: f64,
    /// Also evaluate at twice the order and report the difference.
    pub refine: bool,
}

impl QuadratureSpec {
    pub fn new(order: usize, centers: Vec<Complex64>, width: f64, refine: bool) -> Result<Self> {
        let spec = QuadratureSpec {
            order,
            centers,
            width,
            refine,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let max = if self.refine { MAX_ORDER / 2 } else { MAX_ORDER };
        if self.order < MIN_ORDER || self.order > max {
            return Err(Error::InvalidParameter(format!(
                "quadrature order {} outside [{MIN_ORDER}, {max}]",
                self.order
            )));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "quadrature width {} must be positive",
                self.width
            )));
        }
        if self.centers.is_empty() {
            return Err(Error::InvalidParameter("quadrature needs at least one center".into()));
        }
        if self.centers.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidParameter("non-finite quadrature center".into()));
        }
        Ok(())
    }

    // Coincident centers would only repeat work.
    fn distinct_centers(&self) -> Vec<Complex64> {
        let tol = 1e-12 * self.width;
        let mut out: Vec<Complex64> = Vec::with_capacity(self.centers.len());
        for &c in &self.centers {
            if out.iter().all(|o| (o - c).norm() > tol) {
                out.push(c);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// |I(order) − I(2·order)| when refinement is on, else 0.
    pub err: f64,
}

/// ∫ f(β) d²β over the complex plane.
pub fn integrate_plane<F>(f: F, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> f64 + Sync + Send,
{
    integrate_plane_with(f, spec, Execution::default())
}

/// [`integrate_plane`] with an explicit execution mode.
///
/// Every center carries its own Gaussian node cloud; a node belonging to center
/// c is weighted by e^{-|β-c|²/s²} / Σ_{c'} e^{-|β-c'|²/s²} with s = 3w, so the
/// clouds form a smooth partition of unity and nothing is counted twice. With a
/// single center this is the plain rescaled tensor-product rule.
pub fn integrate_plane_with<F>(f: F, spec: &QuadratureSpec, exec: Execution) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> f64 + Sync + Send,
{
    spec.validate()?;
    let centers = spec.distinct_centers();
    let coarse = evaluate(&f, &centers, spec.width, spec.order, exec)?;
    if !spec.refine {
        return Ok(QuadratureResult {
            value: coarse,
            err: 0.0,
        });
    }
    let fine = evaluate(&f, &centers, spec.width, 2 * spec.order, exec)?;
    Ok(QuadratureResult {
        value: fine,
        err: (fine - coarse).abs(),
    })
}

fn evaluate<F>(f: &F, centers: &[Complex64], width: f64, order: usize, exec: Execution) -> Result<f64>
where
    F: Fn(Complex64) -> f64 + Sync + Send,
{
    let rule = gauss_hermite(order);
    let per_center = order * order;
    let area = width * width;
    let inv_s2 = 1.0 / (PARTITION_SCALE * PARTITION_SCALE * width * width);
    let terms = exec.try_map(centers.len() * per_center, |idx| {
        let (ci, rest) = (idx / per_center, idx % per_center);
        let (i, j) = (rest / order, rest % order);
        let c = centers[ci];
        let beta = c + Complex64::new(rule.nodes[i], rule.nodes[j]) * width;
        let value = f(beta);
        if !value.is_finite() {
            return Err(Error::NonFinite {
                what: "integrand",
                beta,
            });
        }
        if value == 0.0 {
            return Ok(0.0);
        }
        let own = (beta - c).norm_sqr() * inv_s2;
        let share: f64 = centers
            .iter()
            .map(|&other| (own - (beta - other).norm_sqr() * inv_s2).exp())
            .sum();
        Ok(area * rule.scaled_weights[i] * rule.scaled_weights[j] * value / share)
    })?;
    Ok(terms.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec(order: usize, centers: Vec<Complex64>, width: f64) -> QuadratureSpec {
        QuadratureSpec::new(order, centers, width, false).unwrap()
    }

    #[test]
    fn rule_integrates_moments() {
        let rule = gauss_hermite(20);
        let m0: f64 = rule.weights.iter().sum();
        let m2: f64 = rule.weights.iter().zip(&rule.nodes).map(|(w, x)| w * x * x).sum();
        let m4: f64 = rule.weights.iter().zip(&rule.nodes).map(|(w, x)| w * x.powi(4)).sum();
        assert_relative_eq!(m0, PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(m2, PI.sqrt() / 2.0, max_relative = 1e-14);
        assert_relative_eq!(m4, 0.75 * PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn odd_rule_has_center_node() {
        let rule = gauss_hermite(9);
        assert_eq!(rule.nodes[4], 0.0);
        let m0: f64 = rule.weights.iter().sum();
        assert_relative_eq!(m0, PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn gaussian_normalization() {
        let s = spec(16, vec![Complex64::new(0.0, 0.0)], 1.0);
        let r = integrate_plane(|b| (-b.norm_sqr()).exp() / PI, &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn second_moment_polar_integral() {
        let s = spec(16, vec![Complex64::new(0.0, 0.0)], 1.0);
        let r = integrate_plane(|b| b.norm_sqr() * (-b.norm_sqr()).exp() / PI, &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_gaussian() {
        let c = Complex64::new(3.0, 0.0);
        let s = spec(16, vec![c], 1.0);
        let r = integrate_plane(|b| (-(b - c).norm_sqr()).exp() / PI, &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_centers_do_not_double_count() {
        let a = Complex64::new(1.5, 0.0);
        let s = spec(48, vec![a, -a], 1.3);
        let f = |b: Complex64| 0.5 * ((-(b - a).norm_sqr()).exp() + (-(b + a).norm_sqr()).exp()) / PI;
        let r = integrate_plane(f, &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn coincident_centers_merge() {
        let z = Complex64::new(0.0, 0.0);
        let s = spec(16, vec![z, z, z], 1.0);
        let r = integrate_plane(|b| (-b.norm_sqr()).exp() / PI, &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refinement_reports_difference() {
        let s = QuadratureSpec::new(8, vec![Complex64::new(0.0, 0.0)], 1.0, true).unwrap();
        // Not polynomial against the weight: the two orders disagree slightly.
        let r = integrate_plane(|b| (-2.0 * b.norm_sqr()).exp() * 2.0 / PI, &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
        assert!(r.err > 0.0);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let s = spec(8, vec![Complex64::new(0.0, 0.0)], 1.0);
        let err = integrate_plane(|b| if b.re > 1.0 { f64::NAN } else { 0.0 }, &s).unwrap_err();
        match err {
            Error::NonFinite { beta, .. } => assert!(beta.re > 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        let z = vec![Complex64::new(0.0, 0.0)];
        assert!(QuadratureSpec::new(7, z.clone(), 1.0, false).is_err());
        assert!(QuadratureSpec::new(16, z.clone(), 0.0, false).is_err());
        assert!(QuadratureSpec::new(16, vec![], 1.0, false).is_err());
        assert!(QuadratureSpec::new(300, z.clone(), 1.0, true).is_err());
        assert!(QuadratureSpec::new(300, z, 1.0, false).is_ok());
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let a = Complex64::new(0.4, -0.2);
        let s = spec(32, vec![a, -a], 1.2);
        let f = |b: Complex64| (-(b - a).norm_sqr()).exp() * (1.0 + b.re * b.im).abs();
        let x = integrate_plane_with(f, &s, Execution::Sequential).unwrap();
        let y = integrate_plane_with(f, &s, Execution::Parallel).unwrap();
        assert_eq!(x.value.to_bits(), y.value.to_bits());
    }
}
