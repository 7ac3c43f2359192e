use std::sync::OnceLock;

use num_complex::Complex64;

const TABLE_LEN: usize = 4096;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LEN);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..TABLE_LEN {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// ln(n!).
pub fn log_factorial(n: usize) -> f64 {
    if n < TABLE_LEN {
        return table()[n];
    }
    // Stirling series; the first omitted term is O(n^-7).
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// Fock amplitude ⟨n|α⟩ = e^{-|α|²/2} αⁿ / √(n!).
pub fn coherent_amplitude(alpha: Complex64, n: usize) -> Complex64 {
    let r2 = alpha.norm_sqr();
    if n == 0 {
        return Complex64::new((-0.5 * r2).exp(), 0.0);
    }
    if r2 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let log_mag = -0.5 * r2 + n as f64 * alpha.norm().ln() - 0.5 * log_factorial(n);
    Complex64::from_polar(log_mag.exp(), n as f64 * alpha.arg())
}

/// ⟨n|α⟩ for n = 0..len.
pub fn coherent_amplitudes(alpha: Complex64, len: usize) -> Vec<Complex64> {
    (0..len).map(|n| coherent_amplitude(alpha, n)).collect()
}

/// Generalized Laguerre polynomials L_n^{(k)}(x) for n = 0..len, each returned
/// as `(mantissa, log_scale)` with value = mantissa · e^{log_scale}.
///
/// Forward three-term recurrence with periodic rescaling so that high orders
/// never overflow.
pub fn laguerre_scaled(k: usize, x: f64, len: usize) -> Vec<(f64, f64)> {
    const BIG: f64 = 1e100;
    let ln_big = BIG.ln();
    let kf = k as f64;
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let mut scale = 0.0;
    let mut prev = 1.0;
    out.push((prev, scale));
    if len == 1 {
        return out;
    }
    let mut cur = 1.0 + kf - x;
    out.push((cur, scale));
    for n in 1..len - 1 {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 + kf - x) * cur - (nf + kf) * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            scale += ln_big;
        }
        out.push((cur, scale));
    }
    out
}
