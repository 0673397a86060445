//! Fractional ideals in Hermite normal form, prime decomposition by splitting
//! the algebra 𝒪_F/p𝒪_F, valuations and divisor sums.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{mul_mod_p, p_radical_mod_p, pow_mod_p, AlgNum, FieldData};
use crate::intfactor::{self, is_prime};
use crate::linalg::{hnf, Matrix};
use crate::modp::{self, Fp};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdealError {
    #[error("the zero ideal is not allowed")]
    ZeroIdeal,
    #[error("ideals belong to different fields")]
    FieldMismatch,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("ideal is not integral")]
    NotIntegral,
    #[error("norm {0} is too large to factor")]
    NormTooLarge(BigInt),
    #[error("prime decomposition at {0} is inconsistent")]
    Inconsistent(u64),
}

/// `(1/denom) · (ℤ-span of the rows of hnf)`, rows in the integral basis.
///
/// Rows are upper triangular with positive diagonal and entries above each
/// pivot reduced into `[0, pivot)`; `denom` is the least positive integer
/// making the lattice integral.
#[derive(Clone)]
pub struct IdealHNF {
    field: Arc<FieldData>,
    hnf: Vec<Vec<BigInt>>,
    denom: BigInt,
}

impl PartialEq for IdealHNF {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.hnf == other.hnf && self.denom == other.denom
    }
}

impl Eq for IdealHNF {}

impl std::hash::Hash for IdealHNF {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.hnf.hash(state);
        self.denom.hash(state);
    }
}

impl fmt::Debug for IdealHNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal(")?;
        for (i, r) in self.hnf.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let s: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", s.join(" "))?;
        }
        write!(f, ")/{}", self.denom)
    }
}

fn lcm_denoms(rows: &[Vec<Rational>]) -> BigInt {
    rows.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

impl IdealHNF {
    /// ℤ-span of rational coordinate vectors; must have full rank.
    pub fn from_lattice(field: &Arc<FieldData>, rows: &[Vec<Rational>]) -> Result<Self, IdealError> {
        let den = lcm_denoms(rows);
        let ints: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect())
            .collect();
        Self::from_integer_rows(field, &ints, den)
    }

    fn from_integer_rows(field: &Arc<FieldData>, rows: &[Vec<BigInt>], denom: BigInt) -> Result<Self, IdealError> {
        let d = field.degree();
        let mut h = hnf(rows, d);
        if h.len() < d {
            return Err(IdealError::ZeroIdeal);
        }
        let g = h.iter().flatten().fold(denom.clone(), |acc, x| acc.gcd(x));
        let mut denom = denom;
        if !g.is_one() {
            for x in h.iter_mut().flatten() {
                *x /= &g;
            }
            denom /= &g;
        }
        Ok(IdealHNF { field: field.clone(), hnf: h, denom })
    }

    pub fn unit(field: &Arc<FieldData>) -> Self {
        let d = field.degree();
        let rows: Vec<Vec<BigInt>> = (0..d)
            .map(|i| (0..d).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        IdealHNF { field: field.clone(), hnf: rows, denom: BigInt::one() }
    }

    /// The 𝒪_F-module generated by `gens`.
    pub fn from_generators(field: &Arc<FieldData>, gens: &[AlgNum]) -> Result<Self, IdealError> {
        if gens.iter().any(|g| !g.field().same_field(field)) {
            return Err(IdealError::FieldMismatch);
        }
        let d = field.degree();
        let mut rows = Vec::with_capacity(gens.len() * d);
        for g in gens {
            if g.is_zero() {
                continue;
            }
            for i in 0..d {
                let mut e = vec![Rational::zero(); d];
                e[i] = Rational::one();
                rows.push(field.mul_q(&e, g.coords()));
            }
        }
        if rows.is_empty() {
            return Err(IdealError::ZeroIdeal);
        }
        Self::from_lattice(field, &rows)
    }

    pub fn principal(a: &AlgNum) -> Result<Self, IdealError> {
        Self::from_generators(a.field(), std::slice::from_ref(a))
    }

    pub fn from_int(field: &Arc<FieldData>, n: i64) -> Result<Self, IdealError> {
        Self::principal(&AlgNum::from_int(field, n))
    }

    pub fn field(&self) -> &Arc<FieldData> {
        &self.field
    }

    pub fn hnf_rows(&self) -> &[Vec<BigInt>] {
        &self.hnf
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    /// Actual ℤ-basis (rational coordinates).
    pub fn basis(&self) -> Vec<Vec<Rational>> {
        self.hnf
            .iter()
            .map(|r| r.iter().map(|x| Rational::new(x.clone(), self.denom.clone())).collect())
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.denom.is_one()
    }

    pub fn norm(&self) -> Rational {
        let det = self.hnf.iter().enumerate().fold(BigInt::one(), |acc, (i, r)| acc * &r[i]);
        Rational::new(det, num_traits::pow(self.denom.clone(), self.field.degree()))
    }

    fn check(&self, other: &Self) -> Result<(), IdealError> {
        if self.field.same_field(&other.field) {
            Ok(())
        } else {
            Err(IdealError::FieldMismatch)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, IdealError> {
        self.check(other)?;
        let mut rows = Vec::with_capacity(self.hnf.len() * other.hnf.len());
        for a in &self.hnf {
            for b in &other.hnf {
                rows.push(self.field.mul_big(a, b));
            }
        }
        Self::from_integer_rows(&self.field, &rows, &self.denom * &other.denom)
    }

    pub fn add(&self, other: &Self) -> Result<Self, IdealError> {
        self.check(other)?;
        let den = self.denom.lcm(&other.denom);
        let fa = &den / &self.denom;
        let fb = &den / &other.denom;
        let mut rows: Vec<Vec<BigInt>> = self.hnf.iter().map(|r| r.iter().map(|x| x * &fa).collect()).collect();
        rows.extend(other.hnf.iter().map(|r| r.iter().map(|x| x * &fb).collect::<Vec<_>>()));
        Self::from_integer_rows(&self.field, &rows, den)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::unit(&self.field);
        for _ in 0..e {
            r = r.mul(self).expect("same field");
        }
        r
    }

    /// Exact membership of an element.
    pub fn contains(&self, a: &AlgNum) -> bool {
        let m = Matrix::from_rows(self.basis());
        match m.transpose().solve(a.coords()) {
            Some(x) => x.iter().all(|c| c.is_integer()),
            None => false,
        }
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.basis().into_iter().all(|r| other.contains(&AlgNum::new(&self.field, r)))
    }

    /// Closed under multiplication by every ω_i.
    pub fn is_module(&self) -> bool {
        let d = self.field.degree();
        self.basis().into_iter().all(|r| {
            (0..d).all(|i| {
                let mut e = vec![Rational::zero(); d];
                e[i] = Rational::one();
                self.contains(&AlgNum::new(&self.field, self.field.mul_q(&e, &r)))
            })
        })
    }

    /// Trace-dual lattice `{x : Tr(x·self) ⊆ ℤ}`.
    pub fn trace_dual(&self) -> Self {
        let d = self.field.degree();
        let b = Matrix::from_rows(self.basis());
        let g = Matrix::from_rows(
            self.field
                .trace_gram()
                .iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        );
        // rows x with x G B^T integral: basis = rows of (G B^T)^{-1}
        let m = g.mul(&b.transpose()).inverse().expect("full-rank lattice");
        let rows: Vec<Vec<Rational>> = (0..d).map(|i| m.row(i).to_vec()).collect();
        Self::from_lattice(&self.field, &rows).expect("full rank")
    }

    /// `{x : x·self ⊆ 𝒪_F}`.
    pub fn inverse(&self) -> Self {
        let dinv = inverse_different(&self.field);
        self.mul(&dinv).expect("same field").trace_dual()
    }

    /// Norm as an integer, for integral ideals.
    pub fn norm_integer(&self) -> Result<BigInt, IdealError> {
        if !self.is_integral() {
            return Err(IdealError::NotIntegral);
        }
        Ok(self.norm().to_integer())
    }
}

/// 𝔡_F^{-1}, the trace dual of 𝒪_F.
pub fn inverse_different(field: &Arc<FieldData>) -> IdealHNF {
    let rows: Vec<Vec<Rational>> = (0..field.degree()).map(|j| field.dual_basis_matrix().row(j).to_vec()).collect();
    IdealHNF::from_lattice(field, &rows).expect("dual basis has full rank")
}

/// The different 𝔡_F.
pub fn different_ideal(field: &Arc<FieldData>) -> IdealHNF {
    inverse_different(field).inverse()
}

/// A prime ideal above `p` together with a uniformizing multiplier for valuations.
#[derive(Clone)]
pub struct PrimeIdeal {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub ideal: IdealHNF,
    /// τ ∈ 𝒪_F with τ·𝔭 ⊆ p𝒪_F and τ ∉ p𝒪_F; then τ/p has valuation −1 at 𝔭
    /// and is integral elsewhere.
    tau: Vec<i64>,
}

impl fmt::Debug for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prime(p={}, e={}, f={}, {:?})", self.p, self.e, self.f, self.ideal)
    }
}

impl PrimeIdeal {
    pub fn norm(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), self.f as usize)
    }

    /// v_𝔭 of a nonzero integral element; machine-word fast path with a big-integer fallback.
    pub fn valuation_i64(&self, field: &FieldData, x: &[i64]) -> u32 {
        debug_assert!(x.iter().any(|&c| c != 0));
        let p = self.p as i64;
        let mut cur = x.to_vec();
        let mut v = 0;
        loop {
            let Some(y) = field.mul_int(&cur, &self.tau) else {
                let big: Vec<BigInt> = cur.iter().map(|&c| BigInt::from(c)).collect();
                return v + self.valuation_big(field, &big);
            };
            if y.iter().any(|c| c % p != 0) {
                return v;
            }
            cur = y.into_iter().map(|c| c / p).collect();
            v += 1;
        }
    }

    pub fn valuation_big(&self, field: &FieldData, x: &[BigInt]) -> u32 {
        assert!(x.iter().any(|c| !c.is_zero()), "valuation of zero");
        let p = BigInt::from(self.p);
        let tau: Vec<BigInt> = self.tau.iter().map(|&c| BigInt::from(c)).collect();
        let mut cur = x.to_vec();
        let mut v = 0;
        loop {
            let y = field.mul_big(&cur, &tau);
            if y.iter().any(|c| !c.is_multiple_of(&p)) {
                return v;
            }
            cur = y.into_iter().map(|c| c / &p).collect();
            v += 1;
        }
    }

    /// v_𝔭 of a nonzero element with rational coordinates.
    pub fn valuation_elt(&self, a: &AlgNum) -> i64 {
        let den = a.coords().iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = a
            .coords()
            .iter()
            .map(|x| (x * Rational::from_integer(den.clone())).to_integer())
            .collect();
        self.valuation_big(a.field(), &ints) as i64 - self.e as i64 * valuation_bigint(&den, self.p) as i64
    }
}

fn valuation_bigint(n: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while !n.is_zero() && n.is_multiple_of(&p) {
        n /= &p;
        v += 1;
    }
    v
}

/// v_𝔭 of a nonzero fractional ideal.
pub fn valuation(a: &IdealHNF, pr: &PrimeIdeal) -> i64 {
    let field = a.field();
    let m = a
        .hnf_rows()
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| pr.valuation_big(field, r))
        .min()
        .expect("nonzero ideal");
    m as i64 - pr.e as i64 * valuation_bigint(a.denom(), pr.p) as i64
}

/// Lifts of F_p vectors to integers.
fn lift(v: &[u64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Matrix (over F_p) of the Frobenius x ↦ x^p on 𝒪_F/p, rows = images of ω_i.
fn frobenius_rows(field: &FieldData, f: &Fp, power: u128) -> Vec<Vec<u64>> {
    let d = field.degree();
    (0..d)
        .map(|i| {
            let mut e = vec![0u64; d];
            e[i] = 1 % f.p;
            pow_mod_p(field, f, &e, power)
        })
        .collect()
}

fn minus_identity(f: &Fp, m: &[Vec<u64>]) -> Vec<Vec<u64>> {
    m.iter()
        .enumerate()
        .map(|(i, r)| r.iter().enumerate().map(|(j, &x)| if i == j { f.sub(x, 1) } else { x }).collect())
        .collect()
}

fn mat_mul_p(f: &Fp, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = b[0].len();
    a.iter()
        .map(|r| {
            (0..n)
                .map(|j| r.iter().enumerate().fold(0, |acc, (k, &x)| f.add(acc, f.mul(x, b[k][j]))))
                .collect()
        })
        .collect()
}

/// Minimal polynomial of `s` in 𝒪_F/p (monic, constant-first).
fn minpoly_mod_p(field: &FieldData, f: &Fp, s: &[u64]) -> Vec<u64> {
    let d = field.degree();
    let mut powers: Vec<Vec<u64>> = Vec::new();
    let mut cur = vec![0u64; d];
    cur[0] = 1 % f.p;
    loop {
        // test whether cur is a combination of the previous powers
        let mut rows: Vec<Vec<u64>> = powers.clone();
        rows.push(cur.clone());
        let k = modp::left_kernel(f, &rows);
        if let Some(v) = k.first() {
            let lead = *v.last().unwrap();
            let inv = f.inv(lead);
            return v.iter().map(|&c| f.mul(c, inv)).collect();
        }
        powers.push(cur.clone());
        cur = mul_mod_p(field, f, &cur, s);
    }
}

/// Primitive idempotents of 𝒪_F/p.
fn primitive_idempotents(field: &FieldData, f: &Fp, fixed: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let d = field.degree();
    let r = fixed.len();
    let mut one = vec![0u64; d];
    one[0] = 1 % f.p;
    let mut idem = vec![one];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ f.p);
    use rand::Rng;
    while idem.len() < r {
        let coeffs: Vec<u64> = (0..r).map(|_| rng.gen_range(0..f.p)).collect();
        let mut s = vec![0u64; d];
        for (c, b) in coeffs.iter().zip(fixed) {
            for k in 0..d {
                s[k] = f.add(s[k], f.mul(*c, b[k]));
            }
        }
        let mp = minpoly_mod_p(field, f, &s);
        let roots = modp::split_linear_roots(f, &mp, &mut rng);
        if roots.len() < 2 {
            continue;
        }
        // Lagrange idempotents e_i = Π_{j≠i} (s − r_j)/(r_i − r_j)
        let mut split = Vec::with_capacity(roots.len());
        for (i, &ri) in roots.iter().enumerate() {
            let mut e = vec![0u64; d];
            e[0] = 1 % f.p;
            for (j, &rj) in roots.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut t = s.clone();
                t[0] = f.sub(t[0], rj);
                let c = f.inv(f.sub(ri, rj));
                t.iter_mut().for_each(|x| *x = f.mul(*x, c));
                e = mul_mod_p(field, f, &e, &t);
            }
            split.push(e);
        }
        let mut next = Vec::new();
        for a in &idem {
            for b in &split {
                let ab = mul_mod_p(field, f, a, b);
                if ab.iter().any(|&x| x != 0) {
                    next.push(ab);
                }
            }
        }
        idem = next;
    }
    idem
}

/// ℤ-generators of the lift of an F_p-subspace plus p𝒪_F.
fn lift_with_p(d: usize, p: u64, vecs: &[Vec<u64>]) -> Vec<Vec<BigInt>> {
    let mut gens: Vec<Vec<BigInt>> = vecs.iter().map(|v| lift(v)).collect();
    for i in 0..d {
        let mut v = vec![BigInt::zero(); d];
        v[i] = BigInt::from(p);
        gens.push(v);
    }
    gens
}

/// Complete decomposition of p𝒪_F by splitting the finite algebra 𝒪_F/p.
///
/// The Frobenius-fixed subalgebra of 𝒪_F/p is a product of copies of F_p,
/// one per prime above p; its primitive idempotents e pick out the local
/// factors, and 𝔭/p = {x : e·x nilpotent}.
pub fn factor_prime(field: &Arc<FieldData>, p: u64) -> Result<Vec<PrimeIdeal>, IdealError> {
    if !is_prime(p) {
        return Err(IdealError::NotPrime(p));
    }
    let d = field.degree();
    let f = Fp::new(p);
    let frob = frobenius_rows(field, &f, p as u128);
    let fixed = modp::left_kernel(&f, &minus_identity(&f, &frob));
    let radical = p_radical_mod_p(field, &f);
    let idem = primitive_idempotents(field, &f, &fixed);
    let basis_units: Vec<Vec<u64>> = (0..d)
        .map(|i| {
            let mut e = vec![0u64; d];
            e[i] = 1;
            e
        })
        .collect();
    let mut out = Vec::with_capacity(idem.len());
    for e in &idem {
        let mut one_minus = e.iter().map(|&x| f.neg(x)).collect::<Vec<_>>();
        one_minus[0] = f.add(one_minus[0], 1);
        let e_a: Vec<Vec<u64>> = basis_units.iter().map(|w| mul_mod_p(field, &f, e, w)).collect();
        let dim_local = modp::row_basis(&f, &e_a).len();
        let e_j: Vec<Vec<u64>> = radical.iter().map(|w| mul_mod_p(field, &f, e, w)).collect();
        let dim_rad = modp::row_basis(&f, &e_j).len();
        let mut gens: Vec<Vec<u64>> = basis_units.iter().map(|w| mul_mod_p(field, &f, &one_minus, w)).collect();
        gens.extend(e_j);
        let pmod = modp::row_basis(&f, &gens);
        let res_deg = dim_local - dim_rad;
        if res_deg == 0 || dim_local % res_deg != 0 || pmod.len() != d - res_deg {
            return Err(IdealError::Inconsistent(p));
        }
        let ram = dim_local / res_deg;
        let ideal = IdealHNF::from_integer_rows(field, &lift_with_p(d, p, &pmod), BigInt::one())?;
        // τ: annihilator of 𝔭/p in 𝒪_F/p
        let blocks: Vec<Vec<u64>> = basis_units
            .iter()
            .map(|x| pmod.iter().flat_map(|g| mul_mod_p(field, &f, x, g)).collect())
            .collect();
        let ann = modp::left_kernel(&f, &blocks);
        let tau = ann.first().ok_or(IdealError::Inconsistent(p))?;
        out.push(PrimeIdeal {
            p,
            e: ram as u32,
            f: res_deg as u32,
            ideal,
            tau: tau.iter().map(|&x| x as i64).collect(),
        });
    }
    let total: u32 = out.iter().map(|q| q.e * q.f).sum();
    if total as usize != d {
        return Err(IdealError::Inconsistent(p));
    }
    out.sort_by(|a, b| (a.f, a.e, &a.ideal.hnf).cmp(&(b.f, b.e, &b.ideal.hnf)));
    Ok(out)
}

/// Residue degrees of the primes above an unramified p, from the dimensions
/// of the fixed spaces of powers of Frobenius: dim ker(Φ^j − 1) = Σ_i gcd(j, f_i).
pub fn unramified_residue_degrees(field: &FieldData, p: u64) -> Option<Vec<u32>> {
    let d = field.degree();
    let f = Fp::new(p);
    let frob = frobenius_rows(field, &f, p as u128);
    let mut dims = Vec::with_capacity(d);
    let mut power = frob.clone();
    for j in 1..=d {
        if j > 1 {
            power = mat_mul_p(&f, &power, &frob);
        }
        dims.push(modp::left_kernel(&f, &minus_identity(&f, &power)).len());
    }
    partitions(d).into_iter().find(|part| {
        (1..=d).all(|j| part.iter().map(|&fi| (j as u32).gcd(&fi) as usize).sum::<usize>() == dims[j - 1])
    })
}

fn partitions(n: usize) -> Vec<Vec<u32>> {
    fn go(n: usize, max: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=max.min(n)).rev() {
            cur.push(k as u32);
            go(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Per-field memo of prime decompositions, safe to share between threads.
pub struct PrimeMemo {
    field: Arc<FieldData>,
    map: RwLock<HashMap<u64, Arc<Vec<PrimeIdeal>>>>,
    different: IdealHNF,
}

impl PrimeMemo {
    pub fn new(field: &Arc<FieldData>) -> Self {
        PrimeMemo { field: field.clone(), map: RwLock::new(HashMap::new()), different: different_ideal(field) }
    }

    pub fn field(&self) -> &Arc<FieldData> {
        &self.field
    }

    pub fn different(&self) -> &IdealHNF {
        &self.different
    }

    pub fn primes_above(&self, p: u64) -> Result<Arc<Vec<PrimeIdeal>>, IdealError> {
        if let Some(v) = self.map.read().unwrap().get(&p) {
            return Ok(v.clone());
        }
        let v = Arc::new(factor_prime(&self.field, p)?);
        self.map.write().unwrap().insert(p, v.clone());
        Ok(v)
    }
}

/// Σ_{m=0}^{v} N^{rm}.
pub fn local_sigma(norm: &BigInt, v: u32, r: u32) -> BigInt {
    let q = num_traits::pow(norm.clone(), r as usize);
    let mut term = BigInt::one();
    let mut s = BigInt::one();
    for _ in 0..v {
        term *= &q;
        s += &term;
    }
    s
}

/// Factorization of an integral ideal as (prime, exponent) pairs.
pub fn factor_ideal(a: &IdealHNF, memo: &PrimeMemo) -> Result<Vec<(PrimeIdeal, u32)>, IdealError> {
    let n = a.norm_integer()?;
    let nn = n.to_u64().ok_or_else(|| IdealError::NormTooLarge(n.clone()))?;
    let mut out = Vec::new();
    for (p, e) in intfactor::factor(nn) {
        let mut total = 0;
        for pr in memo.primes_above(p)?.iter() {
            let v = valuation(a, pr);
            if v > 0 {
                total += v as u32 * pr.f;
                out.push((pr.clone(), v as u32));
            }
        }
        if total != e {
            return Err(IdealError::Inconsistent(p));
        }
    }
    Ok(out)
}

/// σ_r(𝔞) = Σ_{𝔟 | 𝔞} N(𝔟)^r for an integral ideal.
pub fn sigma_r(a: &IdealHNF, r: u32) -> Result<BigInt, IdealError> {
    let memo = PrimeMemo::new(a.field());
    sigma_r_with(a, r, &memo)
}

pub fn sigma_r_with(a: &IdealHNF, r: u32, memo: &PrimeMemo) -> Result<BigInt, IdealError> {
    Ok(factor_ideal(a, memo)?
        .iter()
        .fold(BigInt::one(), |acc, (pr, v)| acc * local_sigma(&pr.norm(), *v, r)))
}

/// Residue degrees of all primes above p, via the full decomposition when p is
/// ramified and via Frobenius fixed-space dimensions otherwise.
pub fn residue_degrees(field: &Arc<FieldData>, p: u64) -> Result<Vec<u32>, IdealError> {
    let disc = field.disc();
    if disc.is_multiple_of(&BigInt::from(p)) {
        Ok(factor_prime(field, p)?.iter().map(|q| q.f).collect())
    } else {
        unramified_residue_degrees(field, p).ok_or(IdealError::Inconsistent(p))
    }
}

/// Number of integral ideals of each norm 1..=nmax (index 0 unused, set to 0).
pub fn ideal_count(field: &Arc<FieldData>, nmax: usize) -> Result<Vec<u64>, IdealError> {
    let mut a = vec![0u64; nmax + 1];
    if nmax == 0 {
        return Ok(a);
    }
    a[1] = 1;
    let mut done = vec![false; nmax + 1];
    done[1] = true;
    // multiplicative assembly: a_n = Π_p a_{p^{v_p(n)}}
    let mut local: Vec<(u64, Vec<u64>)> = Vec::new();
    for p in intfactor::primes_up_to(nmax) {
        let fs = residue_degrees(field, p)?;
        // ideals of norm p^k: number of (m_i) with Σ f_i m_i = k
        let mut kmax = 0;
        let mut pk = 1u64;
        while pk <= nmax as u64 / p {
            pk *= p;
            kmax += 1;
        }
        let mut c = vec![0u64; kmax + 1];
        c[0] = 1;
        for &fi in &fs {
            for k in fi as usize..=kmax {
                c[k] += c[k - fi as usize];
            }
        }
        local.push((p, c));
    }
    let spf = smallest_prime_factor(nmax);
    let index: HashMap<u64, usize> = local.iter().enumerate().map(|(i, (p, _))| (*p, i)).collect();
    for n in 2..=nmax {
        let p = spf[n] as u64;
        let mut m = n;
        let mut k = 0;
        while m % p as usize == 0 {
            m /= p as usize;
            k += 1;
        }
        let c = &local[index[&p]].1;
        a[n] = a[m] * c[k];
        done[n] = true;
    }
    Ok(a)
}

fn smallest_prime_factor(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}
