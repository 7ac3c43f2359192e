use ndarray::Array2;
use num_complex::Complex64;

use super::special::{laguerre_scaled, log_factorial};
use crate::error::{Error, Result};

/// Largest matrix the displacement builder will allocate.
pub const MAX_DISPLACEMENT_DIM: usize = 1024;

/// Truncated displacement operator: entry `(m, n)` is ⟨m|D̂(β)|n⟩.
///
/// Entries below the diagonal use
/// √(n!/m!) β^{m-n} e^{-|β|²/2} L_n^{(m-n)}(|β|²), evaluated in log space;
/// entries above follow from D̂(β)† = D̂(-β). Each entry is exact, so truncation
/// only affects products, never the matrix elements themselves.
pub fn displacement_matrix(beta: Complex64, dim: usize) -> Result<Array2<Complex64>> {
    if dim == 0 {
        return Err(Error::InvalidParameter("displacement dimension must be >= 1".into()));
    }
    if dim > MAX_DISPLACEMENT_DIM {
        return Err(Error::DimensionTooLarge {
            requested: dim,
            limit: MAX_DISPLACEMENT_DIM,
        });
    }
    if !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::NonFinite {
            what: "displacement amplitude",
            beta,
        });
    }
    let x = beta.norm_sqr();
    let ln_r = beta.norm().ln();
    let theta = beta.arg();
    let mut d = Array2::<Complex64>::zeros((dim, dim));

    for k in 0..dim {
        if k > 0 && x == 0.0 {
            break;
        }
        let lag = laguerre_scaled(k, x, dim - k);
        let phase = Complex64::from_polar(1.0, k as f64 * theta);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for (n, &(mantissa, scale)) in lag.iter().enumerate() {
            let m = n + k;
            let mut log_mag = 0.5 * (log_factorial(n) - log_factorial(m)) - 0.5 * x + scale;
            if k > 0 {
                log_mag += k as f64 * ln_r;
            }
            let lower = phase * (mantissa * log_mag.exp());
            d[[m, n]] = lower;
            if k > 0 {
                d[[n, m]] = lower.conj() * sign;
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_displacement_is_identity() {
        let d = displacement_matrix(Complex64::new(0.0, 0.0), 5).unwrap();
        for m in 0..5 {
            for n in 0..5 {
                let expect = if m == n { 1.0 } else { 0.0 };
                assert_eq!(d[[m, n]], Complex64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn vacuum_entry_is_gaussian() {
        let d = displacement_matrix(Complex64::new(1.0, 0.0), 4).unwrap();
        assert_relative_eq!(d[[0, 0]].re, (-0.5f64).exp(), epsilon = 1e-15);
        assert_eq!(d[[0, 0]].im, 0.0);
    }

    #[test]
    fn first_column_is_coherent_state() {
        let beta = Complex64::new(0.7, -1.2);
        let d = displacement_matrix(beta, 30).unwrap();
        for m in 0..30 {
            let c = super::super::special::coherent_amplitude(beta, m);
            assert!((d[[m, 0]] - c).norm() < 1e-14);
        }
    }

    #[test]
    fn guards() {
        assert!(displacement_matrix(Complex64::new(1.0, 0.0), 0).is_err());
        assert!(matches!(
            displacement_matrix(Complex64::new(1.0, 0.0), 1025),
            Err(Error::DimensionTooLarge { .. })
        ));
        assert!(displacement_matrix(Complex64::new(f64::NAN, 0.0), 4).is_err());
    }

    #[test]
    fn large_dimension_stays_finite() {
        let d = displacement_matrix(Complex64::new(3.0, 2.0), 256).unwrap();
        assert!(d.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }
}
