//! Inner products ⟨E^Δ_{F,k}, f⟩ for cubic F: the unfolded class sum over
//! SL₂(ℤ)-classes of β ∈ F − ℚ, an independent route through the Δ-coordinate
//! of the restriction and a quadrature for ⟨f, g⟩, plus the bound constants
//! c_k and C_k.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cubic::{self, CubicError, CuspClass};
use crate::field::FieldData;
use crate::qseries::QSeries;
use crate::restrict::{self, RestrictError, SlEngine};
use crate::scalar::{rat, rational_to_f64};
use crate::Scalar;

pub use crate::zeta::{dedekind_zeta_numeric, riemann_zeta_real, ZetaError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PeterssonError {
    #[error("coordinate {0} is zero")]
    ZeroCoordinate(usize),
    #[error("l = {l} is outside 0..k for k = {k}")]
    BadOrder { k: u32, l: u32 },
    #[error("weight k = {0} must be even")]
    OddWeight(u32),
    #[error("weights {0} and {1} differ")]
    WeightMismatch(u32, u32),
    #[error("neither series is a cusp form")]
    NotCuspidal,
    #[error("tolerance {tol:e} is out of reach: {reason}")]
    ToleranceUnreachable { tol: f64, reason: String },
    #[error("tail bound {bound:e} exceeds the tolerance {tol:e}")]
    NonconvergentTail { bound: f64, tol: f64 },
    #[error("need {need} cusp form coefficients, have {have}")]
    TooFewCoefficients { need: usize, have: usize },
    #[error(transparent)]
    Cubic(#[from] CubicError),
    #[error(transparent)]
    Restrict(#[from] RestrictError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn binomial(n: u32, r: u32) -> f64 {
    (0..r).map(|i| (n - i) as f64 / (i + 1) as f64).product()
}

/// (P_{m,k,l}/Q_{m,k+l})(x) = (−1)^l l! Σ_{|r| = l} Π_j k^{(r_j)}/r_j! · x_j^{−k−r_j},
/// i.e. (∂_1 + … + ∂_m)^l (x_1⋯x_m)^{−k}.
pub fn pq_ratio<T: Scalar>(k: u32, l: u32, xs: &[T]) -> Result<T, PeterssonError> {
    if k == 0 || l >= k {
        return Err(PeterssonError::BadOrder { k, l });
    }
    if let Some(i) = xs.iter().position(|x| *x == T::zero()) {
        return Err(PeterssonError::ZeroCoordinate(i));
    }
    let m = xs.len();
    let inv: Vec<T> = xs.iter().map(|x| T::one() / x.clone()).collect();
    let powi = |x: &T, e: u32| (0..e).fold(T::one(), |acc, _| acc * x.clone());
    // weights k^{(r)}/r! as exact rationals
    let weight = |r: u32| -> T { T::from_rational(&(0..r).fold(rat(1, 1), |acc, i| acc * rat((k + i) as i64, (i + 1) as i64))) };
    let mut total = T::zero();
    let mut r = vec![0u32; m];
    loop {
        if r.iter().sum::<u32>() == l {
            let mut term = T::one();
            for j in 0..m {
                term = term * weight(r[j]) * powi(&inv[j], k + r[j]);
            }
            total = total + term;
        }
        // next multi-index with entries ≤ l
        let mut j = 0;
        while j < m {
            r[j] += 1;
            if r[j] <= l {
                break;
            }
            r[j] = 0;
            j += 1;
        }
        if j == m {
            break;
        }
    }
    let sign = if l % 2 == 1 { -T::one() } else { T::one() };
    Ok(sign * T::from_i64(factorial(l) as i64) * total)
}

/// τ(1..=nmax) (index 0 is 0) from Δ = q·(Σ (−1)^m (2m+1) q^{m(m+1)/2})⁸.
pub fn ramanujan_tau(nmax: usize) -> Vec<i128> {
    let len = nmax;
    let mut j3 = Vec::new();
    let mut m = 0usize;
    while m * (m + 1) / 2 < len {
        let sign = if m % 2 == 0 { 1 } else { -1 };
        j3.push((m * (m + 1) / 2, sign * (2 * m as i128 + 1)));
        m += 1;
    }
    let mut acc = vec![0i128; len];
    acc[0] = 1;
    for _ in 0..8 {
        let mut next = vec![0i128; len];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for &(e, c) in &j3 {
                if i + e >= len {
                    break;
                }
                next[i + e] += a * c;
            }
        }
        acc = next;
    }
    let mut tau = vec![0i128; nmax + 1];
    tau[1..].copy_from_slice(&acc);
    tau
}

/// First n ≤ nmax with |τ(n)| > n⁶, if any.
pub fn deligne_violation(tau: &[i128]) -> Option<usize> {
    (1..tau.len()).find(|&n| {
        let n6 = (n as i128).pow(6);
        tau[n].abs() > n6
    })
}

/// Result of the quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub terms: usize,
}

/// ∫_a^b g by tanh-sinh with step halving until two levels agree to `tol`.
fn tanh_sinh(g: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |h: f64| -> f64 {
        let mut s = 0.0;
        let mut j = 0i64;
        loop {
            let t = j as f64 * h;
            let u = 0.5 * PI * t.sinh();
            let w = 0.5 * PI * t.cosh() / u.cosh().powi(2);
            if w < 1e-300 {
                break;
            }
            let x = u.tanh();
            let mut term = g(mid + half * x) * w;
            if j != 0 {
                term += g(mid - half * x) * w;
            }
            s += term;
            if t > 6.0 {
                break;
            }
            j += 1;
        }
        s * h * half
    };
    let mut h = 0.5;
    let mut prev = eval(h);
    loop {
        h /= 2.0;
        let cur = eval(h);
        let err = (cur - prev).abs();
        if err <= tol * cur.abs().max(1e-300) || h < 1e-4 {
            return (cur, err);
        }
        prev = cur;
    }
}

/// ⟨f, g⟩ = ∫_{SL₂(ℤ)\ℍ} f ḡ v^w du dv / v² over |u| ≤ 1/2, |τ| ≥ 1.
///
/// The u-integral is done termwise: on v ≥ 1 only the diagonal n = m survives,
/// on √3/2 ≤ v ≤ 1 the two arcs |u| ≥ √(1 − v²) give explicit sine terms. The
/// v-integral over v ≥ 1 is an exact incomplete gamma function, the rest is
/// tanh-sinh. Coefficients are real.
pub fn petersson_norm_numeric<T: Scalar>(f: &QSeries<T>, g: &QSeries<T>, tol: f64) -> Result<Quadrature, PeterssonError> {
    if f.weight() != g.weight() {
        return Err(PeterssonError::WeightMismatch(f.weight(), g.weight()));
    }
    let w = f.weight() as i32;
    let a: Vec<f64> = f.coeffs().iter().map(|c| c.to_f64_lossy()).collect();
    let b: Vec<f64> = g.coeffs().iter().map(|c| c.to_f64_lossy()).collect();
    if a.first().copied().unwrap_or(0.0) != 0.0 && b.first().copied().unwrap_or(0.0) != 0.0 {
        return Err(PeterssonError::NotCuspidal);
    }
    // coefficient growth |c_n| ≤ C n^w read off the available terms
    let grow = |c: &[f64]| c.iter().enumerate().skip(1).map(|(n, x)| x.abs() / (n as f64).powi(w)).fold(c.first().map_or(0.0, |x| x.abs()), f64::max);
    let (ca, cb) = (grow(&a), grow(&b));
    let v0 = 3f64.sqrt() / 2.0;
    let tail_at = |n: usize| -> f64 {
        let nf = n as f64;
        4.0 * ca.max(cb) * (ca + cb + 1.0) * nf.powi(w + 1) * (-2.0 * PI * v0 * nf).exp()
    };
    let available = a.len().min(b.len());
    let mut n = 1;
    while tail_at(n) > tol / 10.0 {
        n += 1;
        if n >= available {
            return Err(PeterssonError::ToleranceUnreachable { tol, reason: format!("q-expansions to precision {available} are too short") });
        }
    }
    let a = &a[..n];
    let b = &b[..n];
    let s = w - 2;
    // ∫_1^∞ e^{−cv} v^s dv = s! e^{−c} c^{−s−1} Σ_{j ≤ s} c^j/j!
    let upper_gamma = |c: f64| -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..=s {
            term *= c / j as f64;
            sum += term;
        }
        factorial(s as u32) * (-c).exp() * c.powi(-s - 1) * sum
    };
    let upper: f64 = (1..n).map(|i| a[i] * b[i] * upper_gamma(4.0 * PI * i as f64)).sum();
    let integrand = |v: f64| -> f64 {
        let wv = (1.0 - v * v).max(0.0).sqrt();
        let mut acc = 0.0;
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0.0 {
                    continue;
                }
                let diff = i as i64 - j as i64;
                let u = if diff == 0 { 1.0 - 2.0 * wv } else { -(2.0 * PI * diff as f64 * wv).sin() / (PI * diff as f64) };
                acc += a[i] * b[j] * (-2.0 * PI * (i + j) as f64 * v).exp() * u;
            }
        }
        acc * v.powi(s)
    };
    let (lower, err) = tanh_sinh(&integrand, v0, 1.0, tol * 1e-3);
    let value = upper + lower;
    Ok(Quadrature { value, error: err + tail_at(n) + 1e-15 * value.abs(), terms: n })
}

/// ⟨Δ, Δ⟩ by [`petersson_norm_numeric`].
pub fn delta_norm(tol: f64) -> Result<Quadrature, PeterssonError> {
    let d = crate::qseries::delta(60).to_f64();
    petersson_norm_numeric(&d, &d, tol)
}

/// The constant of the Lemma 5.1 chain,
/// c_k = Γ(3k−1)/(2Γ(k)) (4π)^{2−3k} Σ_{l<k} (2π)^{k−1−l} ζ(k/2+l)
/// C(k−1+l, l)/C(k+2l, l) (l+1)! 6^{k/2+l}; with `binomial` every term also
/// carries C(k−1, l).
pub fn c_k_with(k: u32, binomial_weight: bool) -> Result<f64, PeterssonError> {
    if k < 3 {
        return Err(PeterssonError::BadOrder { k, l: 0 });
    }
    let kf = k as f64;
    let pre = factorial(3 * k - 2) / (2.0 * factorial(k - 1)) * (4.0 * PI).powf(2.0 - 3.0 * kf);
    let mut sum = 0.0;
    for l in 0..k {
        let z = riemann_zeta_real(kf / 2.0 + l as f64, 1e-14)?;
        let mut t = (2.0 * PI).powi((k - 1 - l) as i32) * z * binomial(k - 1 + l, l) / binomial(k + 2 * l, l) * factorial(l + 1) * 6f64.powf(kf / 2.0 + l as f64);
        if binomial_weight {
            t *= binomial(k - 1, l);
        }
        sum += t;
    }
    Ok(pre * sum)
}

pub fn c_k(k: u32) -> Result<f64, PeterssonError> {
    c_k_with(k, false)
}

/// C_k = 6 c_k ζ(k/2)³ ζ(3k/2 − 1) / ζ(k)².
pub fn big_c_k(k: u32) -> Result<f64, PeterssonError> {
    let kf = k as f64;
    let z = |s: f64| riemann_zeta_real(s, 1e-14);
    Ok(6.0 * c_k(k)? * z(kf / 2.0)?.powi(3) * z(1.5 * kf - 1.0)? / z(kf)?.powi(2))
}

/// |N_2 − 65520/691|·⟨Δ,Δ⟩ minimized over the Niemeier lattices.
pub fn niemeier_gap(delta_norm: f64) -> (f64, &'static str) {
    let c = 65520.0 / 691.0;
    restrict::NIEMEIER
        .iter()
        .map(|n| ((n.n2 as f64 - c).abs() * delta_norm, n.name))
        .fold((f64::INFINITY, ""), |acc, x| if x.0 < acc.0 { x } else { acc })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// The class sum with the prefactor and weights exactly as printed.
    PropFormula,
    /// The class sum with the Leibniz coefficient C(k−1, l) restored in each
    /// term and each Möbius image counted once rather than once per ±γ.
    PropFormulaCorrected,
    CoefficientOracle,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::PropFormula => "PropFormula",
            Method::PropFormulaCorrected => "PropFormulaCorrected",
            Method::CoefficientOracle => "CoefficientOracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerProductResult {
    pub value: Complex64,
    /// (max order index M, max Fourier index N).
    pub truncation: (u64, usize),
    pub tail_bound: f64,
    pub method: Method,
    pub classes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerProductOptions {
    pub max_index: u64,
    pub n_terms: usize,
    pub tol: f64,
}

/// Per-class data reused by both normalizations.
struct ClassTerms {
    /// Σ_j PQ_l(β_j − β_·) Σ_{n ≤ N} e(nβ_j) c_n n^{−(2k+l)}, per l.
    sums: Vec<Complex64>,
    /// Σ_j |PQ_l(β_j − β_·)|, per l.
    pq_abs: Vec<f64>,
    a_pow: f64,
}

fn class_terms(class: &CuspClass, k: u32, coeffs: &[f64], n_terms: usize) -> Result<ClassTerms, PeterssonError> {
    let em = class.beta.field().embeddings();
    let balls = class.beta.embeddings_ball(em);
    let fracs: Vec<f64> = balls
        .iter()
        .map(|b| {
            let fl = b.mid.floor();
            rational_to_f64(&(&b.mid - fl))
        })
        .collect();
    let betas = &class.embeddings;
    let mut sums = vec![Complex64::new(0.0, 0.0); k as usize];
    let mut pq_abs = vec![0.0; k as usize];
    for j in 0..3 {
        let xs: Vec<f64> = (0..3).filter(|&i| i != j).map(|i| betas[j] - betas[i]).collect();
        let mut series = vec![Complex64::new(0.0, 0.0); k as usize];
        for n in (1..=n_terms).rev() {
            let c = coeffs[n];
            if c == 0.0 {
                continue;
            }
            let phase = 2.0 * PI * (n as f64 * fracs[j]).fract();
            let e = Complex64::new(phase.cos(), phase.sin()) * c;
            let nf = n as f64;
            let base = nf.powi(-(2 * k as i32));
            for (l, s) in series.iter_mut().enumerate() {
                *s += e * (base / nf.powi(l as i32));
            }
        }
        for l in 0..k {
            let pq = pq_ratio(k, l, &xs)?;
            sums[l as usize] += series[l as usize] * pq;
            pq_abs[l as usize] += pq.abs();
        }
    }
    Ok(ClassTerms { sums, pq_abs, a_pow: (class.a_beta as f64).powi(-(k as i32)) })
}

/// ⟨E^Δ_{F,k}, f⟩ for cubic F from the unfolded class sum, f = Σ c_n qⁿ with
/// `cusp_coeffs[n] = c_n` (real). Returns the printed normalization and the
/// corrected one (see [`Method`]), each with its tail bound.
pub fn inner_product_d3(
    field: &Arc<FieldData>,
    k: u32,
    cusp_coeffs: &[f64],
    opts: &InnerProductOptions,
) -> Result<(InnerProductResult, InnerProductResult), PeterssonError> {
    if k % 2 == 1 {
        return Err(PeterssonError::OddWeight(k));
    }
    if k < 4 {
        return Err(PeterssonError::BadOrder { k, l: 0 });
    }
    if field.degree() != 3 {
        return Err(CubicError::WrongDegree(field.degree()).into());
    }
    if cusp_coeffs.len() <= opts.n_terms {
        return Err(PeterssonError::TooFewCoefficients { need: opts.n_terms + 1, have: cusp_coeffs.len() });
    }
    let classes = cubic::enumerate_cusp_classes(field, opts.max_index)?;
    let terms: Vec<ClassTerms> = classes.par_iter().map(|c| class_terms(c, k, cusp_coeffs, opts.n_terms)).collect::<Result<_, _>>()?;
    let kf = k as f64;
    let d = 3.0;
    let dk = 3 * k;
    let pre_mag = factorial(dk - 2) / ((4.0 * PI).powf(d * kf - 2.0) * factorial(k - 1));
    let i = Complex64::new(0.0, 1.0);
    // growth constant with |c_n| ≤ c_f n^{3k/2}
    let c_f = cusp_coeffs.iter().enumerate().skip(1).take(opts.n_terms).map(|(n, c)| c.abs() / (n as f64).powf(1.5 * kf)).fold(0.0, f64::max);
    let class_tail = class_tail_sum(field, k, opts.max_index)?;
    let nf = opts.n_terms as f64;
    let mut results = Vec::new();
    for binom in [false, true] {
        let mut total = Complex64::new(0.0, 0.0);
        let mut n_tail = 0.0;
        for l in 0..k {
            let wl = if binom { 0.5 * binomial(k - 1, l) } else { 1.0 };
            let factor = i * pre_mag * (2.0 * PI * i).powi((k - 1 - l) as i32) * wl;
            let mut s = Complex64::new(0.0, 0.0);
            let mut abs_pq = 0.0;
            for t in &terms {
                s += t.sums[l as usize] * t.a_pow;
                abs_pq += t.pq_abs[l as usize] * t.a_pow;
            }
            total += factor * s;
            // Σ_{n > N} c_f n^{3k/2 − 2k − l} ≤ c_f N^{1 − k/2 − l}/(k/2 + l − 1)
            let e = kf / 2.0 + l as f64 - 1.0;
            n_tail += factor.norm() * abs_pq * c_f.max(1.0) * nf.powf(-e) / e;
        }
        let ck = if binom { 0.5 * c_k_with(k, true)? } else { c_k(k)? };
        let tail = ck * c_f.max(1.0) * class_tail + n_tail + 1e-12 * total.norm();
        if tail > opts.tol {
            return Err(PeterssonError::NonconvergentTail { bound: tail, tol: opts.tol });
        }
        results.push(InnerProductResult {
            value: total,
            truncation: (opts.max_index, opts.n_terms),
            tail_bound: tail,
            method: if binom { Method::PropFormulaCorrected } else { Method::PropFormula },
            classes: classes.len(),
        });
    }
    let b = results.pop().expect("two results");
    let a = results.pop().expect("two results");
    Ok((a, b))
}

/// Σ over classes of index > M of Δ(f_β)^{−k/4}, bounded by
/// 2|Aut|·D^{−k/4}·Σ_{m > M} η_m m^{−k/2} with η_F(k/2) = ζ_F(k/2)ζ(k)ζ(3k/2−1)/ζ_F(k).
fn class_tail_sum(field: &Arc<FieldData>, k: u32, max_index: u64) -> Result<f64, PeterssonError> {
    let kf = k as f64;
    let disc = field.disc_i64() as f64;
    let aut = cubic::automorphisms(field)?.len() as f64;
    let zf_half = dedekind_zeta_numeric(field, kf / 2.0, 1e-4)?;
    let zf_k = dedekind_zeta_numeric(field, kf, 1e-12)?;
    let eta_full = zf_half.value * (1.0 + zf_half.rel_err) * riemann_zeta_real(kf, 1e-14)? * riemann_zeta_real(1.5 * kf - 1.0, 1e-14)? / zf_k.value;
    let eta = cubic::eta_coefficients(field, max_index as usize)?;
    let partial: f64 = (1..=max_index as usize).map(|m| eta[m] as f64 * (m as f64).powf(-kf / 2.0)).sum();
    Ok(2.0 * aut * disc.powf(-kf / 4.0) * (eta_full - partial).max(0.0))
}

/// ⟨E^Δ_{F,4}, Δ⟩ = (b + 432000/691)·⟨Δ,Δ⟩ from the restriction E^Δ = E_4³ + bΔ.
pub fn coefficient_oracle_d3(engine: &SlEngine, delta: &Quadrature) -> Result<InnerProductResult, PeterssonError> {
    let f = engine.field();
    if f.degree() != 3 {
        return Err(CubicError::WrongDegree(f.degree()).into());
    }
    let row = restrict::table_row(engine, 4)?;
    let shift = rational_to_f64(&(&row.coords[1] + rat(432000, 691)));
    Ok(InnerProductResult {
        value: Complex64::new(shift * delta.value, 0.0),
        truncation: (0, 0),
        tail_bound: shift.abs() * delta.error,
        method: Method::CoefficientOracle,
        classes: 0,
    })
}
