//! Dense univariate polynomials, coefficient list constant-first.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;
use crate::Rational;

#[derive(Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Poly { coeffs: vec![T::zero(), T::one()] }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::from_i64(i as i64))
                .collect(),
        )
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.lead();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![T::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = r[i + dd].clone() / lead.clone();
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    r[i + j] = r[i + j].clone() - c.clone() * dj.clone();
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = T::one() / self.lead();
        self.scale(&inv)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(T::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }
}

/// Integer polynomial helpers (constant-first `BigInt` lists).
pub fn to_rational_poly(c: &[BigInt]) -> Poly<Rational> {
    Poly::new(c.iter().map(|x| Rational::from_integer(x.clone())).collect())
}

/// Squarefree part of a rational polynomial, made monic.
pub fn squarefree_part(p: &Poly<Rational>) -> Poly<Rational> {
    let g = p.gcd(&p.derivative());
    p.div_rem(&g).0.monic()
}

/// Sign changes in a sequence, ignoring zeros.
fn sign_changes(vals: &[Rational]) -> usize {
    let mut last = 0i32;
    let mut n = 0;
    for v in vals {
        let s = if v.is_zero() {
            continue;
        } else if v.is_positive() {
            1
        } else {
            -1
        };
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

/// Sturm sequence for root counting on the reals.
pub struct Sturm {
    seq: Vec<Poly<Rational>>,
}

impl Sturm {
    /// Built from the squarefree part, so counts are of distinct roots.
    pub fn new(p: &Poly<Rational>) -> Self {
        let p0 = squarefree_part(p);
        let mut seq = vec![p0.clone(), p0.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-Rational::one()));
        }
        Sturm { seq }
    }

    fn changes_at(&self, x: &Rational) -> usize {
        let vals: Vec<Rational> = self.seq.iter().map(|p| p.eval(x)).collect();
        sign_changes(&vals)
    }

    fn changes_at_infinity(&self, positive: bool) -> usize {
        let vals: Vec<Rational> = self
            .seq
            .iter()
            .map(|p| {
                let mut l = p.lead();
                if !positive && p.degree().unwrap_or(0) % 2 == 1 {
                    l = -l;
                }
                l
            })
            .collect();
        sign_changes(&vals)
    }

    /// Number of distinct real roots.
    pub fn real_roots(&self) -> usize {
        self.changes_at_infinity(false) - self.changes_at_infinity(true)
    }

    /// Distinct roots in the half-open interval `(a, b]`.
    pub fn roots_in(&self, a: &Rational, b: &Rational) -> usize {
        self.changes_at(a).saturating_sub(self.changes_at(b))
    }

    pub fn squarefree(&self) -> &Poly<Rational> {
        &self.seq[0]
    }
}

/// Cauchy bound: every root has absolute value below this.
pub fn root_bound(p: &Poly<Rational>) -> Rational {
    let lead = p.lead().abs();
    let m = p.coeffs()[..p.coeffs().len() - 1]
        .iter()
        .map(|c| c.abs() / lead.clone())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    m + Rational::one()
}

/// Isolating intervals `(lo, hi]` for each distinct real root, ascending,
/// each of width at most `width`.
pub fn isolate_real_roots(p: &Poly<Rational>, width: &Rational) -> Vec<(Rational, Rational)> {
    let sturm = Sturm::new(p);
    let b = root_bound(p);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = sturm.roots_in(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 && &(hi.clone() - lo.clone()) <= width {
            out.push((lo, hi));
            continue;
        }
        let mid = (lo.clone() + hi.clone()) / Rational::from_integer(2.into());
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Refines an isolating interval `(lo, hi]` of a simple root of the squarefree
/// polynomial `p` until its width is at most `width`.
pub fn refine_root(
    p: &Poly<Rational>,
    mut lo: Rational,
    mut hi: Rational,
    width: &Rational,
) -> (Rational, Rational) {
    let two = Rational::from_integer(2.into());
    if p.eval(&hi).is_zero() {
        return (hi.clone(), hi);
    }
    let s_hi = p.eval(&hi).is_positive();
    while &(hi.clone() - lo.clone()) > width {
        let mid = (lo.clone() + hi.clone()) / two.clone();
        let v = p.eval(&mid);
        if v.is_zero() {
            return (mid.clone(), mid);
        }
        if v.is_positive() == s_hi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn qp(c: &[i64]) -> Poly<Rational> {
        Poly::new(c.iter().map(|&x| rat_int(x)).collect())
    }

    #[test]
    fn division_round_trip() {
        let a = qp(&[1, 2, 3, 4]);
        let d = qp(&[1, 1]);
        let (q, r) = a.div_rem(&d);
        assert_eq!(q.mul(&d).add(&r), a);
        assert_eq!(r.degree(), Some(0));
    }

    #[test]
    fn sturm_counts_roots() {
        // (x-1)^2 (x+2) (x^2+1)
        let p = qp(&[1, -1, 0]).mul(&qp(&[-1, 1])).mul(&qp(&[2, 1])).mul(&qp(&[1, 0, 1]));
        let s = Sturm::new(&p);
        assert_eq!(s.real_roots(), 2);
        assert_eq!(s.roots_in(&rat_int(0), &rat_int(5)), 1);
    }

    #[test]
    fn isolation_of_golden_ratio() {
        let p = qp(&[-1, -1, 1]);
        let iv = isolate_real_roots(&p, &rat(1, 1 << 20));
        assert_eq!(iv.len(), 2);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let (lo, hi) = &iv[1];
        assert!(crate::scalar::rational_to_f64(lo) < phi && phi <= crate::scalar::rational_to_f64(hi));
    }

    #[test]
    fn float_polys_share_code() {
        let p = Poly::new(vec![-2.0_f64, 0.0, 1.0]);
        assert!((p.eval(&2f64.sqrt())).abs() < 1e-12);
        assert_eq!(p.derivative().coeffs(), &[0.0, 2.0]);
    }
}
