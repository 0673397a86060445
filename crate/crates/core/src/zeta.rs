//! Floating-point values of the Riemann and Dedekind zeta functions for real
//! s > 1, and the functional equation linking ζ_F(k) to ζ_F(1−k).

use std::f64::consts::PI;
use std::sync::Arc;

use crate::field::FieldData;
use crate::ideal::{self, IdealError};
use crate::intfactor;
use crate::qseries::bernoulli;
use crate::scalar::rational_to_f64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ZetaError {
    #[error("s = {0} is not in the half-plane of convergence")]
    OutOfRange(f64),
    #[error("tail bound {bound:e} cannot reach tolerance {tol:e}")]
    TailTooLarge { bound: f64, tol: f64 },
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

/// ζ(s) for real s > 1 by Euler–Maclaurin summation; the error is below `tol`.
pub fn riemann_zeta_real(s: f64, tol: f64) -> Result<f64, ZetaError> {
    if !(s > 1.0) {
        return Err(ZetaError::OutOfRange(s));
    }
    let tol = tol.max(1e-16);
    let mut n = 10usize;
    loop {
        let (v, err) = euler_maclaurin(s, n);
        if err <= tol * v || n > 1 << 20 {
            if err > tol * v {
                return Err(ZetaError::TailTooLarge { bound: err, tol });
            }
            return Ok(v);
        }
        n *= 2;
    }
}

/// The sum with cut-off N and 12 correction terms, with the size of the
/// first omitted term as error estimate.
fn euler_maclaurin(s: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mut head = 0.0;
    for j in (1..n).rev() {
        head += (j as f64).powf(-s);
    }
    let mut tail = nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // term j: B_{2j}/(2j)! · s(s+1)…(s+2j−2) · N^{−s−2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut last = 0.0;
    for j in 1..=13usize {
        let b = rational_to_f64(&bernoulli(2 * j));
        let t = b / fact * rising * nf.powf(-s - 2.0 * j as f64 + 1.0);
        if j == 13 {
            last = t.abs();
            break;
        }
        tail += t;
        rising *= (s + 2.0 * j as f64 - 1.0) * (s + 2.0 * j as f64);
        fact *= ((2 * j + 1) * (2 * j + 2)) as f64;
    }
    (head + tail, last)
}

/// Value and relative error bound of an Euler product truncated at x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValue {
    pub value: f64,
    pub rel_err: f64,
    pub cutoff: u64,
}

/// ζ_F(s) = Π_𝔭 (1 − N𝔭^{−s})^{−1}, truncated where the tail
/// d·Σ_{n>X} n^{−s} drops below tol/2.
pub fn dedekind_zeta_numeric(field: &Arc<FieldData>, s: f64, tol: f64) -> Result<ZetaValue, ZetaError> {
    if !(s > 1.0) {
        return Err(ZetaError::OutOfRange(s));
    }
    let d = field.degree() as f64;
    if field.degree() == 1 {
        let v = riemann_zeta_real(s, tol)?;
        return Ok(ZetaValue { value: v, rel_err: tol, cutoff: 0 });
    }
    let tail = |x: f64| d * x.powf(1.0 - s) / ((s - 1.0) * (1.0 - x.powf(-s)));
    let mut x = 100.0f64;
    while tail(x) > tol / 2.0 {
        x *= 1.5;
        if x > 3.0e7 {
            return Err(ZetaError::TailTooLarge { bound: tail(x), tol });
        }
    }
    let cutoff = x.ceil() as u64;
    let mut log_sum = 0.0;
    for p in intfactor::primes_up_to(cutoff as usize) {
        for f in ideal::residue_degrees(field, p)? {
            let q = (p as f64).powi(f as i32);
            log_sum -= (-q.powf(-s)).ln_1p();
        }
    }
    let t = tail(x);
    Ok(ZetaValue { value: log_sum.exp(), rel_err: t.exp_m1() + 1e-14, cutoff })
}

/// ζ_F(1−k) from ζ_F(k) through the functional equation
/// ζ_F(1−k) = D^{k−1/2} ((−1)^{k/2} 2 (k−1)! / (2π)^k)^d ζ_F(k), k even.
pub fn functional_equation(disc: f64, degree: usize, k: u32, zeta_k: f64) -> f64 {
    let kf = k as f64;
    let log_fact: f64 = (1..k).map(|j| (j as f64).ln()).sum();
    let log_mag = (kf - 0.5) * disc.ln() + degree as f64 * (2f64.ln() + log_fact - kf * (2.0 * PI).ln());
    let sign = if (k / 2) % 2 == 1 && degree % 2 == 1 { -1.0 } else { 1.0 };
    sign * log_mag.exp() * zeta_k
}

/// Numeric ζ_F(1−k) with its relative error bound.
pub fn zeta_one_minus_k_numeric(field: &Arc<FieldData>, k: u32, tol: f64) -> Result<ZetaValue, ZetaError> {
    let z = dedekind_zeta_numeric(field, k as f64, tol)?;
    let disc = rational_to_f64(&crate::Rational::from_integer(field.disc().clone()));
    let v = functional_equation(disc, field.degree(), k, z.value);
    Ok(ZetaValue { value: v, rel_err: z.rel_err + 1e-13 * k as f64, cutoff: z.cutoff })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riemann_values() {
        assert!((riemann_zeta_real(2.0, 1e-14).unwrap() - PI * PI / 6.0).abs() < 1e-13);
        assert!((riemann_zeta_real(4.0, 1e-14).unwrap() - PI.powi(4) / 90.0).abs() < 1e-13);
        assert!((riemann_zeta_real(3.0, 1e-12).unwrap() - 1.2020569031595942).abs() < 1e-12);
        assert!((riemann_zeta_real(1.5, 1e-12).unwrap() - 2.612375348685488).abs() < 1e-11);
        assert!(riemann_zeta_real(1.0, 1e-6).is_err());
    }

    #[test]
    fn riemann_via_functional_equation() {
        // ζ(−1) = −1/12, ζ(−3) = 1/120
        let z2 = riemann_zeta_real(2.0, 1e-15).unwrap();
        assert!((functional_equation(1.0, 1, 2, z2) + 1.0 / 12.0).abs() < 1e-14);
        let z4 = riemann_zeta_real(4.0, 1e-15).unwrap();
        assert!((functional_equation(1.0, 1, 4, z4) - 1.0 / 120.0).abs() < 1e-14);
    }

    #[test]
    fn golden_field_values() {
        let f = FieldData::real_quadratic(5).unwrap();
        let z = zeta_one_minus_k_numeric(&f, 6, 1e-12).unwrap();
        assert!((z.value - 67.0 / 630.0).abs() < 1e-11 * z.value);
        let z = zeta_one_minus_k_numeric(&f, 2, 1e-5).unwrap();
        assert!((z.value - 1.0 / 30.0).abs() < 1e-5 / 30.0);
    }
}
