//! Integral binary cubic forms f = AX³ + BX²Y + CXY² + DY³ with a root in a
//! cubic field: invariants, reduction through the Hessian, the
//! Delone–Faddeev order of a form, suborder counts and the enumeration of
//! SL₂(ℤ)-classes of elements β ∈ F − ℚ.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::field::{AlgNum, FieldData, FieldError};
use crate::ideal::{self, IdealError, IdealHNF};
use crate::intfactor;
use crate::linalg::{det_bigint, hnf, Matrix};
use crate::poly::{isolate_real_roots, Poly};
use crate::scalar::{rat_int, rational_to_f64};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CubicError {
    #[error("discriminant {0} is not positive")]
    NonpositiveDisc(i128),
    #[error("the module spanned by the form's basis is not a ring")]
    NotARing,
    #[error("element does not generate a cubic field")]
    NotGenerating,
    #[error("index {m}: box of about {work} cells exceeds the budget {budget}")]
    BoxOverflow { m: u64, work: u128, budget: u128 },
    #[error("coefficient overflow")]
    Overflow,
    #[error("expected a cubic field, got degree {0}")]
    WrongDegree(usize),
    #[error("root does not lie on the form")]
    NotARoot,
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Integral matrix [[a, b], [c, d]] of determinant 1, acting on column vectors.
pub type Sl2 = [[i64; 2]; 2];

pub const IDENTITY: Sl2 = [[1, 0], [0, 1]];

pub fn sl2_mul(g: &Sl2, h: &Sl2) -> Sl2 {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = g[i][0] * h[0][j] + g[i][1] * h[1][j];
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubicForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl std::fmt::Display for CubicForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a, self.b, self.c, self.d)
    }
}

/// Hessian covariant (P, Q, R): H = P X² + Q XY + R Y².
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hessian {
    pub p: i128,
    pub q: i128,
    pub r: i128,
}

impl Hessian {
    /// |Q| ≤ P ≤ R.
    pub fn is_reduced(&self) -> bool {
        self.q.abs() <= self.p && self.p <= self.r
    }
}

impl CubicForm {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        CubicForm { a, b, c, d }
    }

    fn from_i128(v: [i128; 4]) -> Result<Self, CubicError> {
        let conv = |x: i128| i64::try_from(x).map_err(|_| CubicError::Overflow);
        Ok(CubicForm { a: conv(v[0])?, b: conv(v[1])?, c: conv(v[2])?, d: conv(v[3])? })
    }

    fn wide(&self) -> [i128; 4] {
        [self.a as i128, self.b as i128, self.c as i128, self.d as i128]
    }

    pub fn disc(&self) -> i128 {
        let [a, b, c, d] = self.wide();
        18 * a * b * c * d + b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d
    }

    pub fn hessian_p(&self) -> i128 {
        let [a, b, c, _] = self.wide();
        b * b - 3 * a * c
    }

    pub fn hessian(&self) -> Hessian {
        let [a, b, c, d] = self.wide();
        Hessian { p: b * b - 3 * a * c, q: b * c - 9 * a * d, r: c * c - 3 * b * d }
    }

    pub fn content(&self) -> i64 {
        self.a.gcd(&self.b).gcd(&self.c).gcd(&self.d)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn neg(&self) -> Self {
        CubicForm { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// f(X, −Y).
    pub fn flip(&self) -> Self {
        CubicForm { a: self.a, b: -self.b, c: self.c, d: -self.d }
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        let [a, b, c, d] = self.wide();
        a * x * x * x + b * x * x * y + c * x * y * y + d * y * y * y
    }

    /// (f∘γ)(X, Y) = f(aX + bY, cX + dY).
    pub fn act(&self, g: &Sl2) -> Result<Self, CubicError> {
        let l1 = [g[0][0] as i128, g[0][1] as i128];
        let l2 = [g[1][0] as i128, g[1][1] as i128];
        let lin = |u: &[i128], v: &[i128; 2]| -> Vec<i128> {
            let mut out = vec![0i128; u.len() + 1];
            for (i, x) in u.iter().enumerate() {
                out[i] += x * v[0];
                out[i + 1] += x * v[1];
            }
            out
        };
        let mut total = [0i128; 4];
        for (idx, coef) in self.wide().iter().enumerate() {
            // l1^{3−idx} l2^{idx}
            let mut p = vec![1i128];
            for _ in 0..3 - idx {
                p = lin(&p, &l1);
            }
            for _ in 0..idx {
                p = lin(&p, &l2);
            }
            for (t, x) in total.iter_mut().zip(&p) {
                *t = t.checked_add(coef.checked_mul(*x).ok_or(CubicError::Overflow)?).ok_or(CubicError::Overflow)?;
            }
        }
        Self::from_i128(total)
    }

    fn key(&self) -> (i128, i64, i64, i64, i64, i64) {
        (self.hessian_p(), self.a.abs(), self.a, self.b, self.c, self.d)
    }

    /// True when f has no rational root, i.e. no linear factor over ℚ.
    pub fn is_irreducible(&self) -> bool {
        if self.a == 0 || self.d == 0 {
            return false;
        }
        let roots = self.real_roots();
        let qs = divisors(self.a.unsigned_abs());
        for r in roots {
            for &q in &qs {
                let p = (r * q as f64).round() as i128;
                if self.eval(p, q as i128) == 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Real roots of f(x, 1), ascending, to double precision.
    pub fn real_roots(&self) -> Vec<f64> {
        let poly = Poly::new(vec![rat_int(self.d), rat_int(self.c), rat_int(self.b), rat_int(self.a)]);
        let width = Rational::new(BigInt::one(), BigInt::one() << 64);
        isolate_real_roots(&poly, &width)
            .iter()
            .map(|(lo, hi)| rational_to_f64(&((lo + hi) / rat_int(2))))
            .collect()
    }

    /// f(β, 1) evaluated in the field.
    pub fn eval_at(&self, beta: &AlgNum) -> Result<AlgNum, CubicError> {
        let f = beta.field();
        let mut acc = AlgNum::from_int(f, self.a);
        for c in [self.b, self.c, self.d] {
            acc = acc.mul(beta)?.add(&AlgNum::from_int(f, c))?;
        }
        Ok(acc)
    }

    /// Elements γ with f∘γ = ±f. Only meaningful on forms with reduced Hessian,
    /// whose stabilizers lie in the small-entry set searched here.
    pub fn stabilizer(&self) -> Vec<Sl2> {
        let neg = self.neg();
        small_sl2()
            .iter()
            .filter(|g| matches!(self.act(g), Ok(h) if h == *self || h == neg))
            .copied()
            .collect()
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            out.push(i);
            if i * i != n {
                out.push(n / i);
            }
        }
        i += 1;
    }
    out.sort_unstable();
    out
}

/// All of SL₂(ℤ) with entries in [−2, 2].
fn small_sl2() -> &'static [Sl2] {
    static SET: OnceLock<Vec<Sl2>> = OnceLock::new();
    SET.get_or_init(|| {
        let mut out = Vec::new();
        for a in -2..=2 {
            for b in -2..=2 {
                for c in -2..=2 {
                    for d in -2..=2 {
                        if a * d - b * c == 1 {
                            out.push([[a, b], [c, d]]);
                        }
                    }
                }
            }
        }
        out
    })
}

/// SL₂(ℤ)-reduction: Gauss reduction of the Hessian by translations and
/// inversions, then the canonical representative among all forms of the class
/// whose Hessian is reduced, minimizing (P, |A|, A, B, C, D). Returns f' and γ
/// with f' = f∘γ.
pub fn reduce(f: &CubicForm) -> Result<(CubicForm, Sl2), CubicError> {
    let disc = f.disc();
    if disc <= 0 {
        return Err(CubicError::NonpositiveDisc(disc));
    }
    let mut cur = *f;
    let mut gamma = IDENTITY;
    loop {
        let h = cur.hessian();
        // translation x ↦ x + t·y moves Q to Q + 2tP
        let t = -div_round(h.q, 2 * h.p);
        if t != 0 {
            let step = [[1, t as i64], [0, 1]];
            cur = cur.act(&step)?;
            gamma = sl2_mul(&gamma, &step);
        }
        let h = cur.hessian();
        if h.r < h.p {
            let step = [[0, -1], [1, 0]];
            cur = cur.act(&step)?;
            gamma = sl2_mul(&gamma, &step);
        } else {
            break;
        }
    }
    let mut best = (cur.key(), cur, IDENTITY);
    for g in small_sl2() {
        let h = cur.act(g)?;
        if h.hessian().is_reduced() && h.key() < best.0 {
            best = (h.key(), h, *g);
        }
    }
    Ok((best.1, sl2_mul(&gamma, &best.2)))
}

/// Nearest integer to a/b, b > 0, halves rounded toward +∞.
fn div_round(a: i128, b: i128) -> i128 {
    (2 * a + b).div_euclid(2 * b)
}

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    Some(r)
}

/// Every form with A ≠ 0, discriminant `disc` and reduced Hessian.
///
/// A reduced positive definite H with Q² − 4PR = −3Δ has 3P² ≤ 4PR − Q² = 3Δ,
/// so 1 ≤ P ≤ √Δ. For each P and |Q| ≤ P with R = (Q² + 3Δ)/(4P) ≥ P, the
/// syzygy 4H³ = G² + 27Δf² at (1, 0) gives 27ΔA² ≤ 4P³ and G(1,0)² =
/// 4P³ − 27ΔA². Eliminating C = (B² − P)/(3A) and D = (B³ − PB − 3AQ)/(27A²)
/// from R = C² − 3BD leaves PB² − 3AQB + 9A²R − P² = 0, whose discriminant is
/// G(1,0)², so B = (3AQ ± G(1,0))/(2P).
pub fn forms_with_reduced_hessian(disc: i128) -> Vec<CubicForm> {
    let mut out = BTreeSet::new();
    if disc <= 0 {
        return Vec::new();
    }
    let pmax = isqrt(disc).unwrap_or(0);
    for p in 1..=pmax {
        for q in -p..=p {
            let num = q * q + 3 * disc;
            if num % (4 * p) != 0 {
                continue;
            }
            let r = num / (4 * p);
            if r < p {
                continue;
            }
            let amax = isqrt((4 * p * p * p) / (27 * disc)).unwrap_or(0);
            for a in (-amax..=amax).filter(|&a| a != 0) {
                let Some(g) = isqrt(4 * p * p * p - 27 * disc * a * a) else { continue };
                if g * g != 4 * p * p * p - 27 * disc * a * a {
                    continue;
                }
                for sg in [g, -g] {
                    let bn = 3 * a * q + sg;
                    if bn % (2 * p) != 0 {
                        continue;
                    }
                    let b = bn / (2 * p);
                    let cn = b * b - p;
                    if cn % (3 * a) != 0 {
                        continue;
                    }
                    let c = cn / (3 * a);
                    let dn = b * b * b - p * b - 3 * a * q;
                    if dn % (27 * a * a) != 0 {
                        continue;
                    }
                    let d = dn / (27 * a * a);
                    let Ok(f) = CubicForm::from_i128([a, b, c, d]) else { continue };
                    let h = f.hessian();
                    if h.p == p && h.q == q && h.r == r && f.disc() == disc {
                        out.insert(f);
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

fn require_cubic(field: &FieldData) -> Result<(), CubicError> {
    if field.degree() != 3 {
        return Err(CubicError::WrongDegree(field.degree()));
    }
    Ok(())
}

/// Roots of f(x, 1) lying in F: each permutation of the numeric roots is
/// matched against the embeddings, the coordinates of Aβ (an integral element)
/// are rounded, and the candidate is kept only if f(β, 1) = 0 exactly.
pub fn roots_in_field(field: &Arc<FieldData>, f: &CubicForm) -> Result<Vec<AlgNum>, CubicError> {
    require_cubic(field)?;
    let roots = f.real_roots();
    if roots.len() != 3 || f.a == 0 {
        return Ok(Vec::new());
    }
    let inv = embedding_inverse(field);
    let af = f.a as f64;
    let mut found: Vec<AlgNum> = Vec::new();
    for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        let r: Vec<f64> = perm.iter().map(|&i| roots[i]).collect();
        let mut coords = Vec::with_capacity(3);
        for row in &inv {
            let x: f64 = row.iter().zip(&r).map(|(m, v)| m * v).sum::<f64>() * af;
            if !x.is_finite() || x.abs() > 1e15 {
                break;
            }
            coords.push(Rational::new(BigInt::from(x.round() as i64), BigInt::from(f.a)));
        }
        if coords.len() != 3 {
            continue;
        }
        let beta = AlgNum::new(field, coords);
        if found.contains(&beta) {
            continue;
        }
        if f.eval_at(&beta)?.is_zero() {
            found.push(beta);
        }
    }
    Ok(found)
}

fn embedding_inverse(field: &FieldData) -> Vec<Vec<f64>> {
    let m = field.embeddings().mids_f64();
    let mf = Matrix::from_rows(m);
    mf.inverse().expect("embedding matrix is invertible").to_rows()
}

/// Ring automorphisms of 𝒪_F as coordinate maps: entry j is σ(ω_j).
pub fn automorphisms(field: &Arc<FieldData>) -> Result<Vec<Vec<AlgNum>>, CubicError> {
    require_cubic(field)?;
    let poly = field.defining_poly();
    let cf: Vec<i64> = poly.iter().map(|c| c.to_i64().ok_or(CubicError::Overflow)).collect::<Result<_, _>>()?;
    let form = CubicForm::new(cf[3], cf[2], cf[1], cf[0]);
    let basis = field.integral_basis();
    let mut out = Vec::new();
    for theta in roots_in_field(field, &form)? {
        let powers: Vec<AlgNum> = (0..3).map(|e| theta.pow(e)).collect();
        let images = (0..3)
            .map(|j| {
                let mut acc = AlgNum::from_int(field, 0);
                for (e, pw) in powers.iter().enumerate() {
                    acc = acc.add(&pw.scale(&basis.row(j)[e]))?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>, CubicError>>()?;
        out.push(images);
    }
    Ok(out)
}

pub fn apply_automorphism(sigma: &[AlgNum], x: &AlgNum) -> Result<AlgNum, CubicError> {
    let mut acc = AlgNum::from_int(x.field(), 0);
    for (img, c) in sigma.iter().zip(x.coords()) {
        acc = acc.add(&img.scale(c))?;
    }
    Ok(acc)
}

/// The order 𝒪_f = ℤ ⊕ ℤAβ ⊕ ℤ(Aβ² + Bβ + C) of a form with root β.
#[derive(Debug, Clone)]
pub struct DfOrder {
    pub basis: [AlgNum; 3],
    pub index: u64,
}

fn integer_rows(elts: &[AlgNum]) -> Option<Vec<Vec<BigInt>>> {
    elts.iter()
        .map(|e| e.coords().iter().map(|c| c.is_integer().then(|| c.to_integer())).collect())
        .collect()
}

/// Membership of an integral vector in the row lattice `rows` (full rank).
fn in_lattice(rows: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let m = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect());
    let vq: Vec<Rational> = v.iter().map(|x| Rational::from_integer(x.clone())).collect();
    match m.transpose().solve(&vq) {
        Some(x) => x.iter().all(|c| c.is_integer()),
        None => false,
    }
}

pub fn delone_faddeev_order(f: &CubicForm, beta: &AlgNum) -> Result<DfOrder, CubicError> {
    let field = beta.field();
    require_cubic(field)?;
    if !f.eval_at(beta)?.is_zero() {
        return Err(CubicError::NotARoot);
    }
    let a = AlgNum::from_int(field, f.a);
    let e1 = AlgNum::one(field);
    let e2 = a.mul(beta)?;
    let e3 = e2.mul(beta)?.add(&beta.scale(&rat_int(f.b)))?.add(&AlgNum::from_int(field, f.c))?;
    let basis = [e1, e2, e3];
    let rows = integer_rows(&basis).ok_or(CubicError::NotARing)?;
    let det = det_bigint(&rows).abs();
    if det.is_zero() {
        return Err(CubicError::NotARing);
    }
    for i in 0..3 {
        for j in i..3 {
            let p = basis[i].mul(&basis[j])?;
            let pv = integer_rows(std::slice::from_ref(&p)).ok_or(CubicError::NotARing)?;
            if !in_lattice(&rows, &pv[0]) {
                return Err(CubicError::NotARing);
            }
        }
    }
    let index = det.to_u64().ok_or(CubicError::Overflow)?;
    if f.disc() != field.disc_i64() as i128 * (index as i128) * (index as i128) {
        return Err(CubicError::NotARing);
    }
    Ok(DfOrder { basis, index })
}

/// The primitive integral cubic form with root β and positive leading
/// coefficient A_β.
pub fn form_from_beta(beta: &AlgNum) -> Result<(CubicForm, BigInt), CubicError> {
    require_cubic(beta.field())?;
    let mp = beta.minpoly();
    if mp.degree() != Some(3) {
        return Err(CubicError::NotGenerating);
    }
    let lead = mp.lead();
    let monic: Vec<Rational> = mp.coeffs().iter().map(|c| c / &lead).collect();
    let den = monic.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = monic.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let ints: Vec<BigInt> = ints.iter().map(|c| c / &g).collect();
    let conv = |x: &BigInt| x.to_i64().ok_or(CubicError::Overflow);
    let form = CubicForm::new(conv(&ints[3])?, conv(&ints[2])?, conv(&ints[1])?, conv(&ints[0])?);
    Ok((form, ints[3].clone()))
}

/// A_β = Nm(c) / Nm(𝒪c + 𝒪d) for β = d/c with c, d integral.
pub fn a_beta_from_ratio(c: &AlgNum, d: &AlgNum) -> Result<BigInt, CubicError> {
    let num = c.norm().abs();
    let ideal = IdealHNF::from_generators(c.field(), &[c.clone(), d.clone()])?;
    let q = num / ideal.norm();
    if !q.is_integer() {
        return Err(CubicError::NotGenerating);
    }
    Ok(q.to_integer())
}

/// One SL₂(ℤ)-class of β ∈ F − ℚ.
#[derive(Debug, Clone)]
pub struct CuspClass {
    pub beta: AlgNum,
    pub form: CubicForm,
    pub a_beta: i64,
    pub order_index: u64,
    pub embeddings: Vec<f64>,
    pub embedding_errors: Vec<f64>,
}

/// Cell budget for [`enumerate_cusp_classes`].
pub const BOX_BUDGET: u128 = 2_000_000_000;

fn box_work(disc: i128) -> u128 {
    // Σ_{P ≤ √Δ} (2P + 1) pairs (P, Q), each with at most 2·A_max + 1 ≤ Δ^{1/4} values of A
    (disc as f64).powf(1.25) as u128
}

fn classes_of_index(field: &Arc<FieldData>, m: u64) -> Result<Vec<CuspClass>, CubicError> {
    let disc = field.disc_i64() as i128 * (m as i128) * (m as i128);
    let mut canon = BTreeSet::new();
    for f in forms_with_reduced_hessian(disc) {
        if f.is_primitive() && f.is_irreducible() {
            canon.insert(reduce(&f)?.0);
        }
    }
    let em = field.embeddings();
    let mut out = Vec::new();
    for f in canon {
        let roots = roots_in_field(field, &f)?;
        if roots.is_empty() {
            continue;
        }
        let stab = f.stabilizer();
        let mut seen: Vec<AlgNum> = Vec::new();
        for beta in roots {
            if seen.contains(&beta) {
                continue;
            }
            for g in &stab {
                let img = mobius(g, &beta)?;
                if !seen.contains(&img) {
                    seen.push(img);
                }
            }
            let order = delone_faddeev_order(&f, &beta)?;
            if order.index != m {
                return Err(CubicError::NotARing);
            }
            let balls = beta.embeddings_ball(em);
            out.push(CuspClass {
                embeddings: balls.iter().map(|b| b.to_f64()).collect(),
                embedding_errors: balls.iter().map(|b| b.f64_error()).collect(),
                beta,
                form: f,
                a_beta: f.a.abs(),
                order_index: m,
            });
        }
    }
    Ok(out)
}

/// (aβ + b)/(cβ + d).
pub fn mobius(g: &Sl2, beta: &AlgNum) -> Result<AlgNum, CubicError> {
    let f = beta.field();
    let num = beta.scale(&rat_int(g[0][0])).add(&AlgNum::from_int(f, g[0][1]))?;
    let den = beta.scale(&rat_int(g[1][0])).add(&AlgNum::from_int(f, g[1][1]))?;
    Ok(num.div(&den)?)
}

/// All SL₂(ℤ)-classes of β ∈ F − ℚ whose order has index ≤ `max_index`,
/// sorted by (index, form, β).
pub fn enumerate_cusp_classes(field: &Arc<FieldData>, max_index: u64) -> Result<Vec<CuspClass>, CubicError> {
    require_cubic(field)?;
    for m in 1..=max_index {
        let disc = field.disc_i64() as i128 * (m as i128) * (m as i128);
        let work = box_work(disc);
        if work > BOX_BUDGET {
            return Err(CubicError::BoxOverflow { m, work, budget: BOX_BUDGET });
        }
    }
    let per: Vec<Vec<CuspClass>> = (1..=max_index).into_par_iter().map(|m| classes_of_index(field, m)).collect::<Result<_, _>>()?;
    Ok(per.into_iter().flatten().collect())
}

pub fn cusp_classes_csv(classes: &[CuspClass]) -> String {
    let mut s = String::from("m,A,B,C,D,A_beta,beta_1,beta_2,beta_3\n");
    for c in classes {
        let e: Vec<String> = c.embeddings.iter().map(|x| crate::scalar::format_sig(*x, 8)).collect();
        let _ = writeln!(s, "{},{},{},{},{},{},{}", c.order_index, c.form.a, c.form.b, c.form.c, c.form.d, c.a_beta, e.join(","));
    }
    s
}

/// Number of orders of each index 1..=nmax in 𝒪_F (index 0 unused), the
/// Dirichlet coefficients of ζ_F(s)ζ(2s)ζ(3s−1)/ζ_F(2s). The factor at p is
/// Π_𝔭 (1 + X^{f_𝔭}) / ((1 − X²)(1 − pX³)) expanded in X = p^{−s}.
pub fn eta_coefficients(field: &Arc<FieldData>, nmax: usize) -> Result<Vec<u64>, CubicError> {
    require_cubic(field)?;
    let mut a = vec![0u64; nmax + 1];
    if nmax == 0 {
        return Ok(a);
    }
    a[1] = 1;
    let mut local: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for p in intfactor::primes_up_to(nmax) {
        let mut kmax = 0usize;
        let mut pk = 1u64;
        while pk <= nmax as u64 / p {
            pk *= p;
            kmax += 1;
        }
        let mut c = vec![0u64; kmax + 1];
        c[0] = 1;
        for fp in ideal::residue_degrees(field, p)? {
            for k in (fp as usize..=kmax).rev() {
                c[k] += c[k - fp as usize];
            }
        }
        for k in 2..=kmax {
            c[k] += c[k - 2];
        }
        for k in 3..=kmax {
            c[k] += p * c[k - 3];
        }
        local.insert(p, c);
    }
    for n in 2..=nmax {
        a[n] = intfactor::factor(n as u64).iter().map(|(p, e)| local[p][*e as usize]).product();
    }
    Ok(a)
}

/// A suborder ℤ ⊕ ℤ(aω₂ + bω₃) ⊕ ℤcω₃ of index ac, 0 ≤ b < c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Suborder {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Suborder {
    pub fn index(&self) -> u64 {
        (self.a * self.c) as u64
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        v[1] % self.a == 0 && (v[2] - (v[1] / self.a) * self.b).rem_euclid(self.c) == 0
    }

    pub fn basis(&self) -> [[i64; 3]; 3] {
        [[1, 0, 0], [0, self.a, self.b], [0, 0, self.c]]
    }
}

fn is_ring(field: &FieldData, o: &Suborder) -> bool {
    let g = o.basis();
    (1..3).all(|i| {
        (i..3).all(|j| match field.mul_int(&g[i], &g[j]) {
            Some(p) => o.contains(&p),
            None => false,
        })
    })
}

impl Suborder {
    /// False when the order is ℤ + p𝒪′ for a prime p and an order 𝒪′; such
    /// orders belong to forms of content > 1.
    pub fn is_primitive(&self, field: &FieldData) -> bool {
        let g = self.a.gcd(&self.b).gcd(&self.c);
        intfactor::factor(g as u64).iter().all(|&(p, _)| {
            let p = p as i64;
            !is_ring(field, &Suborder { a: self.a / p, b: self.b / p, c: self.c / p })
        })
    }
}

/// Exhaustive sweep of sublattices of 𝒪_F containing 1, of index ≤
/// `max_index`, that are closed under multiplication.
pub fn enumerate_suborders(field: &Arc<FieldData>, max_index: u64) -> Result<Vec<Suborder>, CubicError> {
    require_cubic(field)?;
    let mut out = Vec::new();
    for m in 1..=max_index as i64 {
        for a in (1..=m).filter(|a| m % a == 0) {
            let c = m / a;
            for b in 0..c {
                let o = Suborder { a, b, c };
                if is_ring(field, &o) {
                    out.push(o);
                }
            }
        }
    }
    Ok(out)
}

/// Suborder counts by index (index 0 unused).
pub fn suborder_counts(field: &Arc<FieldData>, max_index: u64) -> Result<Vec<u64>, CubicError> {
    let mut counts = vec![0u64; max_index as usize + 1];
    for o in enumerate_suborders(field, max_index)? {
        counts[o.index() as usize] += 1;
    }
    Ok(counts)
}

/// Suborder counts up to isomorphism, i.e. orbits under Aut(𝒪_F).
pub fn suborder_iso_counts(field: &Arc<FieldData>, max_index: u64) -> Result<Vec<u64>, CubicError> {
    let auts = automorphisms(field)?;
    let orders = enumerate_suborders(field, max_index)?;
    let mut counts = vec![0u64; max_index as usize + 1];
    let mut seen = BTreeSet::new();
    for o in &orders {
        if seen.contains(o) {
            continue;
        }
        counts[o.index() as usize] += 1;
        for s in &auts {
            let rows: Vec<Vec<BigInt>> = o
                .basis()
                .iter()
                .map(|r| {
                    let x = apply_automorphism(s, &AlgNum::from_ints(field, r))?;
                    Ok(x.coords().iter().map(|c| c.to_integer()).collect())
                })
                .collect::<Result<_, CubicError>>()?;
            let h = hnf(&rows, 3);
            let img = Suborder {
                a: h[1][1].to_i64().ok_or(CubicError::Overflow)?,
                b: h[1][2].to_i64().ok_or(CubicError::Overflow)?,
                c: h[2][2].to_i64().ok_or(CubicError::Overflow)?,
            };
            seen.insert(img);
        }
    }
    Ok(counts)
}

/// Per-index comparison of the class count with the order counts.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityRow {
    pub index: u64,
    pub classes: usize,
    pub orders: u64,
    pub primitive_orders: u64,
    pub iso_classes: u64,
    pub aut_order: usize,
}

impl MultiplicityRow {
    /// classes = 2·|Aut(𝒪_F)|·#orders.
    pub fn matches_aut_rule(&self) -> bool {
        self.classes as u64 == 2 * self.aut_order as u64 * self.orders
    }

    /// classes = 2·#primitive orders: each primitive order is hit by the two
    /// SL₂(ℤ)-classes of its form, one root each.
    pub fn matches_primitive_rule(&self) -> bool {
        self.classes as u64 == 2 * self.primitive_orders
    }
}

pub fn multiplicity_table(field: &Arc<FieldData>, classes: &[CuspClass], max_index: u64) -> Result<Vec<MultiplicityRow>, CubicError> {
    let all = enumerate_suborders(field, max_index)?;
    let orders = suborder_counts(field, max_index)?;
    let iso = suborder_iso_counts(field, max_index)?;
    let aut = automorphisms(field)?.len();
    Ok((1..=max_index)
        .map(|m| MultiplicityRow {
            index: m,
            classes: classes.iter().filter(|c| c.order_index == m).count(),
            orders: orders[m as usize],
            primitive_orders: all.iter().filter(|o| o.index() == m && o.is_primitive(field)).count() as u64,
            iso_classes: iso[m as usize],
            aut_order: aut,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(label: &str) -> Arc<FieldData> {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fields").join(format!("{label}.json"));
        FieldData::from_file(&path).unwrap()
    }

    #[test]
    fn invariants_by_hand() {
        let f = CubicForm::new(1, 0, -1, 0);
        assert_eq!(f.disc(), 4);
        assert_eq!(f.hessian_p(), 3);
        assert_eq!(f.flip().hessian_p(), 3);
        let g = CubicForm::new(1, 0, -1, -1);
        assert_eq!(g.disc(), -23);
        assert!(matches!(reduce(&g), Err(CubicError::NonpositiveDisc(-23))));
    }

    #[test]
    fn reduction_bound_and_gamma() {
        let f = CubicForm::new(1, 1, -2, -1);
        let (r, g) = reduce(&f).unwrap();
        assert_eq!(f.act(&g).unwrap(), r);
        assert!(r.hessian_p() * r.hessian_p() <= r.disc());
        assert!(r.hessian().is_reduced());
    }

    #[test]
    fn galois_field_classes() {
        let f = field("3.3.49.1");
        assert_eq!(automorphisms(&f).unwrap().len(), 3);
        let cl = enumerate_cusp_classes(&f, 1).unwrap();
        for c in &cl {
            assert!(c.form.eval_at(&c.beta).unwrap().is_zero());
        }
        assert_eq!(cl.len(), 2);
    }

    #[test]
    fn non_galois_field_classes() {
        let f = field("3.3.148.1");
        assert_eq!(automorphisms(&f).unwrap().len(), 1);
        let cl = enumerate_cusp_classes(&f, 1).unwrap();
        assert_eq!(cl.len(), 2);
    }

    #[test]
    fn eta_matches_sweep() {
        let f = field("3.3.49.1");
        let a = eta_coefficients(&f, 20).unwrap();
        let b = suborder_counts(&f, 20).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[1], 1);
    }
}
