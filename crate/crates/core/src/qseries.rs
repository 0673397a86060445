//! Truncated q-expansions of level one modular forms.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::scalar::{format_rational, parse_rational, rat_int, Scalar};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QSeriesError {
    #[error("weight {0} is not allowed here")]
    BadWeight(i64),
    #[error("odd weight {0}")]
    OddWeight(i64),
    #[error("weights {0} and {1} differ")]
    WeightMismatch(u32, u32),
    #[error("need at least {need} coefficients, have {have}")]
    PrecTooSmall { need: usize, have: usize },
    #[error("series is not in M_{k}: coefficient {index} disagrees")]
    NotInSpace { k: u32, index: usize },
    #[error("malformed series: {0}")]
    Parse(String),
}

/// `a_0 + a_1 q + … + a_{N−1} q^{N−1} + O(q^N)` of a declared weight.
#[derive(Debug, Clone, PartialEq)]
pub struct QSeries<T> {
    weight: u32,
    coeffs: Vec<T>,
}

impl<T: Scalar> QSeries<T> {
    pub fn new(weight: u32, coeffs: Vec<T>) -> Self {
        QSeries { weight, coeffs }
    }

    pub fn one(prec: usize) -> Self {
        let mut c = vec![T::zero(); prec];
        if prec > 0 {
            c[0] = T::one();
        }
        QSeries { weight: 0, coeffs: c }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &T {
        &self.coeffs[n]
    }

    pub fn truncate(&self, prec: usize) -> Self {
        QSeries { weight: self.weight, coeffs: self.coeffs[..prec.min(self.prec())].to_vec() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, QSeriesError> {
        if self.weight != other.weight {
            return Err(QSeriesError::WeightMismatch(self.weight, other.weight));
        }
        let n = self.prec().min(other.prec());
        Ok(QSeries {
            weight: self.weight,
            coeffs: (0..n).map(|i| self.coeffs[i].clone() + other.coeffs[i].clone()).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, QSeriesError> {
        self.add(&other.scale(&-T::one()))
    }

    pub fn scale(&self, c: &T) -> Self {
        QSeries { weight: self.weight, coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.prec().min(other.prec());
        let mut out = vec![T::zero(); n];
        for (i, a) in self.coeffs[..n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        QSeries { weight: self.weight + other.weight, coeffs: out }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(self.prec());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Equality of the common initial coefficients.
    pub fn eq_up_to_prec(&self, other: &Self) -> bool {
        let n = self.prec().min(other.prec());
        self.weight == other.weight && self.coeffs[..n] == other.coeffs[..n]
    }

    /// The operator q·d/dq (weight bookkeeping left to the caller).
    pub fn theta_op(&self) -> Self {
        QSeries {
            weight: self.weight + 2,
            coeffs: self.coeffs.iter().enumerate().map(|(n, a)| a.clone() * T::from_i64(n as i64)).collect(),
        }
    }

    /// f(q) ↦ f(q^m).
    pub fn dilate(&self, m: usize, prec: usize) -> Self {
        let mut c = vec![T::zero(); prec];
        for (n, a) in self.coeffs.iter().enumerate() {
            if n * m < prec {
                c[n * m] = a.clone();
            }
        }
        QSeries { weight: self.weight, coeffs: c }
    }

    pub fn to_f64(&self) -> QSeries<f64> {
        QSeries { weight: self.weight, coeffs: self.coeffs.iter().map(|c| c.to_f64_lossy()).collect() }
    }
}

impl QSeries<Rational> {
    /// `weight` line followed by one `p/q` coefficient per line.
    pub fn serialize(&self) -> String {
        let mut s = format!("weight {}\nprec {}\n", self.weight, self.prec());
        for c in &self.coeffs {
            s.push_str(&format_rational(c));
            s.push('\n');
        }
        s
    }

    pub fn deserialize(s: &str) -> Result<Self, QSeriesError> {
        let mut lines = s.lines();
        let err = |m: &str| QSeriesError::Parse(m.to_string());
        let w = lines
            .next()
            .and_then(|l| l.strip_prefix("weight "))
            .and_then(|x| x.trim().parse::<u32>().ok())
            .ok_or_else(|| err("weight line"))?;
        let n = lines
            .next()
            .and_then(|l| l.strip_prefix("prec "))
            .and_then(|x| x.trim().parse::<usize>().ok())
            .ok_or_else(|| err("prec line"))?;
        let coeffs = lines
            .take(n)
            .map(|l| parse_rational(l).map_err(|e| err(&e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs.len() != n {
            return Err(err("too few coefficients"));
        }
        Ok(QSeries::new(w, coeffs))
    }
}

fn bernoulli_table() -> &'static Mutex<Vec<Rational>> {
    static T: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    T.get_or_init(|| Mutex::new(vec![Rational::one()]))
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Bernoulli number B_n with B_1 = −1/2.
pub fn bernoulli(n: usize) -> Rational {
    let mut t = bernoulli_table().lock().unwrap();
    // Σ_{j=0}^{m} C(m+1, j) B_j = 0
    while t.len() <= n {
        let m = t.len();
        let s = (0..m).fold(Rational::zero(), |acc, j| acc + Rational::from_integer(binomial(m + 1, j)) * &t[j]);
        t.push(-s / rat_int(m as i64 + 1));
    }
    t[n].clone()
}

/// σ_r(n) for n < prec.
pub fn divisor_sums(r: u32, prec: usize) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); prec];
    for dv in 1..prec {
        let p = num_traits::pow(BigInt::from(dv), r as usize);
        let mut m = dv;
        while m < prec {
            s[m] += &p;
            m += dv;
        }
    }
    s
}

/// Normalized E_k = 1 − (2k/B_k) Σ σ_{k−1}(n) qⁿ.
pub fn eisenstein(k: u32, prec: usize) -> Result<QSeries<Rational>, QSeriesError> {
    if k < 4 || k % 2 == 1 {
        return Err(QSeriesError::BadWeight(k as i64));
    }
    let c = -rat_int(2 * k as i64) / bernoulli(k as usize);
    let sig = divisor_sums(k - 1, prec);
    let mut coeffs: Vec<Rational> = sig.into_iter().map(|s| Rational::from_integer(s) * &c).collect();
    if prec > 0 {
        coeffs[0] = Rational::one();
    }
    Ok(QSeries::new(k, coeffs))
}

fn memo() -> &'static Mutex<HashMap<(&'static str, usize), QSeries<Rational>>> {
    static M: OnceLock<Mutex<HashMap<(&'static str, usize), QSeries<Rational>>>> = OnceLock::new();
    M.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(name: &'static str, prec: usize, make: impl FnOnce() -> QSeries<Rational>) -> QSeries<Rational> {
    if let Some(s) = memo().lock().unwrap().get(&(name, prec)) {
        return s.clone();
    }
    let s = make();
    memo().lock().unwrap().insert((name, prec), s.clone());
    s
}

pub fn e4(prec: usize) -> QSeries<Rational> {
    cached("E4", prec, || eisenstein(4, prec).unwrap())
}

pub fn e6(prec: usize) -> QSeries<Rational> {
    cached("E6", prec, || eisenstein(6, prec).unwrap())
}

/// Δ = (E_4³ − E_6²)/1728.
pub fn delta(prec: usize) -> QSeries<Rational> {
    cached("Delta", prec, || {
        let a = e4(prec).pow(3);
        let b = e6(prec).pow(2);
        a.sub(&b).unwrap().scale(&Rational::new(1.into(), 1728.into()))
    })
}

/// dim M_k(SL₂(ℤ)).
pub fn dim_mk(k: i64) -> Result<usize, QSeriesError> {
    if k % 2 != 0 {
        return Err(QSeriesError::OddWeight(k));
    }
    if k < 0 || k == 2 {
        return Ok(0);
    }
    Ok((k / 12) as usize + usize::from(k % 12 != 2))
}

/// {E_4^a Δ^b} (k ≡ 0 mod 4) or {E_6 E_4^a Δ^b} (k ≡ 2 mod 4), ascending b.
pub fn monomial_basis(k: u32, prec: usize) -> Result<Vec<QSeries<Rational>>, QSeriesError> {
    if k % 2 == 1 {
        return Err(QSeriesError::OddWeight(k as i64));
    }
    if k == 0 {
        return Ok(vec![QSeries::one(prec)]);
    }
    if k == 2 {
        return Ok(Vec::new());
    }
    let (base, rest) = if k % 4 == 0 { (QSeries::one(prec), k) } else { (e6(prec), k - 6) };
    let m = dim_mk(k as i64)?;
    let d = delta(prec);
    let out = (0..m as u32)
        .map(|b| {
            let a = (rest - 12 * b) / 4;
            base.mul(&e4(prec).pow(a)).mul(&d.pow(b))
        })
        .collect();
    Ok(out)
}

/// f_0..f_{m−1} with a_j(f_i) = δ_ij for j < m.
pub fn miller_basis(k: u32, prec: usize) -> Result<Vec<QSeries<Rational>>, QSeriesError> {
    let m = dim_mk(k as i64)?;
    if m == 0 {
        return Err(QSeriesError::BadWeight(k as i64));
    }
    if prec <= m {
        return Err(QSeriesError::PrecTooSmall { need: m + 1, have: prec });
    }
    let mut basis = monomial_basis(k, prec)?;
    // the monomial basis is unitriangular: element b starts with q^b
    for i in (0..m).rev() {
        for j in i + 1..m {
            let c = basis[i].coeffs[j].clone();
            if !c.is_zero() {
                let t = basis[j].scale(&c);
                basis[i] = basis[i].sub(&t)?;
            }
        }
    }
    Ok(basis)
}

/// Coordinates of `series` in `monomial_basis(k)`, verified on every
/// available coefficient beyond the first m.
pub fn decompose(series: &QSeries<Rational>, k: u32) -> Result<Vec<Rational>, QSeriesError> {
    const GUARD: usize = 2;
    let m = dim_mk(k as i64)?;
    let prec = series.prec();
    if prec < m + GUARD {
        return Err(QSeriesError::PrecTooSmall { need: m + GUARD, have: prec });
    }
    let basis = monomial_basis(k, prec)?;
    // forward substitution on the unitriangular system
    let mut x = vec![Rational::zero(); m];
    for j in 0..m {
        let mut s = series.coeffs[j].clone();
        for i in 0..j {
            s -= &x[i] * &basis[i].coeffs[j];
        }
        x[j] = s;
    }
    for n in m..prec {
        let rec = (0..m).fold(Rational::zero(), |acc, i| acc + &x[i] * &basis[i].coeffs[n]);
        if rec != series.coeffs[n] {
            return Err(QSeriesError::NotInSpace { k, index: n });
        }
    }
    Ok(x)
}

pub fn combination(basis: &[QSeries<Rational>], coords: &[Rational]) -> QSeries<Rational> {
    let mut out = basis[0].scale(&coords[0]);
    for (b, c) in basis.iter().zip(coords).skip(1) {
        out = out.add(&b.scale(c)).expect("same weight");
    }
    out
}
