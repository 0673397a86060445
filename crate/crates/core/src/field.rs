//! Totally real number fields given by ingested integral-basis data.
//!
//! A field is a monic defining polynomial plus a ℤ-basis ω_1 = 1, …, ω_d of
//! 𝒪_F written in the power basis of a root θ. Everything the loader is told
//! is recomputed and checked: total reality, irreducibility, that the basis
//! spans a ring, its discriminant and its maximality at every prime whose
//! square divides the discriminant.

use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::intfactor;
use crate::linalg::{det_bigint, hnf, Matrix};
use crate::modp::{self, Fp};
use crate::poly::{isolate_real_roots, refine_root, Poly, Sturm};
use crate::scalar::{format_rational, parse_rational, rat_int, rational_to_f64};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("malformed field record: {0}")]
    BadRecord(String),
    #[error("defining polynomial is not totally real")]
    NotTotallyReal,
    #[error("discriminant mismatch: record says {expected}, trace form gives {computed}")]
    DiscMismatch { expected: BigInt, computed: BigInt },
    #[error("integral basis is not closed under multiplication")]
    BasisNotRing,
    #[error("integral basis is not maximal at {p}")]
    BasisNotMaximal { p: u64 },
    #[error("defining polynomial is reducible")]
    ReduciblePolynomial,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("zero input")]
    ZeroInput,
    #[error("requested precision {0} bits is out of range")]
    PrecisionUnreachable(u32),
    #[error("i/o: {0}")]
    Io(String),
}

/// On-disk form of a field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub label: String,
    pub degree: usize,
    pub disc: i64,
    pub poly: Vec<i64>,
    pub integral_basis: Vec<Vec<String>>,
}

/// Certified real enclosure `[mid − rad, mid + rad]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub mid: Rational,
    pub rad: Rational,
}

impl Ball {
    pub fn contains(&self, x: &Rational) -> bool {
        (x - &self.mid).abs() <= self.rad
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.mid)
    }

    /// A bound on the distance from `to_f64()` to the true value.
    pub fn f64_error(&self) -> f64 {
        let m = self.to_f64();
        rational_to_f64(&self.rad) + m.abs() * f64::EPSILON + f64::MIN_POSITIVE
    }
}

/// `entries[i][j]` encloses σ_i(ω_j), places ordered by ascending root.
#[derive(Debug, Clone)]
pub struct EmbeddingMatrix {
    pub prec: u32,
    pub entries: Vec<Vec<Ball>>,
}

impl EmbeddingMatrix {
    pub fn mids_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|r| r.iter().map(Ball::to_f64).collect()).collect()
    }

    pub fn errors_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|r| r.iter().map(Ball::f64_error).collect()).collect()
    }
}

pub struct FieldData {
    label: String,
    degree: usize,
    disc: BigInt,
    poly: Vec<BigInt>,
    basis: Matrix<Rational>,
    basis_inv: Matrix<Rational>,
    mul_table: Vec<i64>,
    basis_traces: Vec<i64>,
    trace_gram: Vec<Vec<i64>>,
    dual: Matrix<Rational>,
    roots: Vec<(Rational, Rational)>,
    default_embedding: OnceLock<EmbeddingMatrix>,
}

impl fmt::Debug for FieldData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldData")
            .field("label", &self.label)
            .field("degree", &self.degree)
            .field("disc", &self.disc)
            .field("poly", &self.poly)
            .finish_non_exhaustive()
    }
}

/// Power sums p_m = Σ θ_i^m of the roots, m = 0..count, via Newton's identities.
fn power_sums(poly: &[BigInt], count: usize) -> Vec<BigInt> {
    let d = poly.len() - 1;
    // e_j with x^d + a_{d-1}x^{d-1} + ...: a_{d-j} = (-1)^j e_j
    let a = |j: usize| -> BigInt { poly[d - j].clone() };
    let mut p = vec![BigInt::from(d)];
    for m in 1..=count {
        let mut s = BigInt::zero();
        for j in 1..m.min(d + 1) {
            s -= a(j) * &p[m - j];
        }
        if m <= d {
            s -= BigInt::from(m) * a(m);
        } else {
            for j in m.min(d + 1)..=d {
                s -= a(j) * &p[m - j];
            }
        }
        p.push(s);
    }
    p
}

/// Reduction of a power-basis polynomial modulo the monic defining polynomial.
fn reduce_mod(poly: &[BigInt], c: &mut Vec<Rational>) {
    let d = poly.len() - 1;
    while c.len() > d {
        let top = c.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let shift = c.len() - d;
        for (i, a) in poly[..d].iter().enumerate() {
            c[shift + i] -= &top * Rational::from_integer(a.clone());
        }
    }
    c.resize(d, Rational::zero());
}

impl FieldData {
    pub fn from_record(rec: &FieldRecord) -> Result<Arc<FieldData>, FieldError> {
        let d = rec.degree;
        let bad = |m: &str| FieldError::BadRecord(format!("{}: {m}", rec.label));
        if d == 0 || rec.poly.len() != d + 1 {
            return Err(bad("polynomial length does not match degree"));
        }
        if rec.poly[d] != 1 {
            return Err(bad("polynomial is not monic"));
        }
        if rec.integral_basis.len() != d || rec.integral_basis.iter().any(|r| r.len() != d) {
            return Err(bad("integral basis has the wrong shape"));
        }
        if rec.disc <= 0 {
            return Err(bad("discriminant must be positive"));
        }
        let poly: Vec<BigInt> = rec.poly.iter().map(|&c| BigInt::from(c)).collect();
        let basis_rows = rec
            .integral_basis
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s).map_err(|e| bad(&e.to_string()))).collect())
            .collect::<Result<Vec<Vec<Rational>>, _>>()?;
        let basis = Matrix::from_rows(basis_rows);

        let qpoly = Poly::new(poly.iter().map(|c| Rational::from_integer(c.clone())).collect());
        let g = qpoly.gcd(&qpoly.derivative());
        if g.degree() != Some(0) {
            return Err(FieldError::ReduciblePolynomial);
        }
        if Sturm::new(&qpoly).real_roots() != d {
            return Err(FieldError::NotTotallyReal);
        }
        let width = Rational::new(BigInt::one(), BigInt::one() << 80u32);
        let roots: Vec<(Rational, Rational)> = isolate_real_roots(&qpoly, &rat_int(1))
            .into_iter()
            .map(|(lo, hi)| refine_root(&qpoly, lo, hi, &width))
            .collect();
        if !is_irreducible(&qpoly, &roots) {
            return Err(FieldError::ReduciblePolynomial);
        }

        let mut e1 = vec![Rational::zero(); d];
        e1[0] = Rational::one();
        if basis.row(0) != e1.as_slice() {
            return Err(bad("first basis element must be 1"));
        }
        let basis_inv = basis.inverse().ok_or_else(|| bad("integral basis is singular"))?;

        // multiplication table
        let mut mul_table = vec![0i64; d * d * d];
        for i in 0..d {
            for j in 0..d {
                let a = Poly::new(basis.row(i).to_vec());
                let b = Poly::new(basis.row(j).to_vec());
                let mut c = a.mul(&b).coeffs().to_vec();
                reduce_mod(&poly, &mut c);
                let coords = basis_inv.vec_mul(&c);
                for (k, x) in coords.iter().enumerate() {
                    if !x.is_integer() {
                        return Err(FieldError::BasisNotRing);
                    }
                    mul_table[(i * d + j) * d + k] =
                        x.to_integer().to_i64().ok_or(FieldError::BasisNotRing)?;
                }
            }
        }

        let ps = power_sums(&poly, d - 1);
        let mut basis_traces = Vec::with_capacity(d);
        for k in 0..d {
            let t = (0..d).fold(Rational::zero(), |acc, m| {
                acc + &basis[(k, m)] * Rational::from_integer(ps[m].clone())
            });
            if !t.is_integer() {
                return Err(FieldError::BasisNotRing);
            }
            basis_traces.push(t.to_integer().to_i64().ok_or(FieldError::BasisNotRing)?);
        }
        let trace_gram: Vec<Vec<i64>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|k| mul_table[(i * d + j) * d + k] * basis_traces[k]).sum())
                    .collect()
            })
            .collect();
        let gram_big: Vec<Vec<BigInt>> =
            trace_gram.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let computed = det_bigint(&gram_big);
        let expected = BigInt::from(rec.disc);
        if computed != expected {
            return Err(FieldError::DiscMismatch { expected, computed });
        }
        let gram_q = Matrix::from_rows(
            gram_big.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect(),
        );
        let dual = gram_q.inverse().ok_or(FieldError::DiscMismatch {
            expected: BigInt::from(rec.disc),
            computed: BigInt::zero(),
        })?;

        let field = FieldData {
            label: rec.label.clone(),
            degree: d,
            disc: expected,
            poly,
            basis,
            basis_inv,
            mul_table,
            basis_traces,
            trace_gram,
            dual,
            roots,
            default_embedding: OnceLock::new(),
        };
        field.check_maximal()?;
        Ok(Arc::new(field))
    }

    pub fn from_json_str(s: &str) -> Result<Arc<FieldData>, FieldError> {
        let rec: FieldRecord = serde_json::from_str(s).map_err(|e| FieldError::BadRecord(e.to_string()))?;
        Self::from_record(&rec)
    }

    pub fn from_file(path: &Path) -> Result<Arc<FieldData>, FieldError> {
        let s = std::fs::read_to_string(path).map_err(|e| FieldError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&s)
    }

    pub fn to_record(&self) -> FieldRecord {
        FieldRecord {
            label: self.label.clone(),
            degree: self.degree,
            disc: self.disc.to_i64().unwrap_or(i64::MAX),
            poly: self.poly.iter().map(|c| c.to_i64().unwrap_or(0)).collect(),
            integral_basis: self.basis.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect(),
        }
    }

    /// ℚ itself.
    pub fn rationals() -> Arc<FieldData> {
        Self::from_record(&FieldRecord {
            label: "1.1.1.1".into(),
            degree: 1,
            disc: 1,
            poly: vec![-1, 1],
            integral_basis: vec![vec!["1/1".into()]],
        })
        .expect("the rational field is valid")
    }

    /// Real quadratic field of fundamental discriminant `disc`.
    pub fn real_quadratic(disc: i64) -> Result<Arc<FieldData>, FieldError> {
        let (poly, basis) = if disc.rem_euclid(4) == 1 {
            (vec![-(disc - 1) / 4, -1, 1], vec![vec!["1/1", "0/1"], vec!["0/1", "1/1"]])
        } else if disc % 4 == 0 {
            (vec![-disc / 4, 0, 1], vec![vec!["1/1", "0/1"], vec!["0/1", "1/1"]])
        } else {
            return Err(FieldError::BadRecord(format!("{disc} is not a discriminant")));
        };
        Self::from_record(&FieldRecord {
            label: format!("2.2.{disc}.1"),
            degree: 2,
            disc,
            poly,
            integral_basis: basis.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn disc_i64(&self) -> i64 {
        self.disc.to_i64().expect("discriminant fits in i64")
    }

    pub fn defining_poly(&self) -> &[BigInt] {
        &self.poly
    }

    /// Rows: basis elements in the power basis.
    pub fn integral_basis(&self) -> &Matrix<Rational> {
        &self.basis
    }

    /// `t_{ijk}` with ω_i ω_j = Σ_k t_{ijk} ω_k.
    pub fn mul_table(&self, i: usize, j: usize, k: usize) -> i64 {
        self.mul_table[(i * self.degree + j) * self.degree + k]
    }

    pub fn mul_table_flat(&self) -> &[i64] {
        &self.mul_table
    }

    pub fn basis_traces(&self) -> &[i64] {
        &self.basis_traces
    }

    pub fn trace_gram(&self) -> &[Vec<i64>] {
        &self.trace_gram
    }

    /// Rows: coordinates of the trace-dual basis ω*_j in the integral basis.
    pub fn dual_basis_matrix(&self) -> &Matrix<Rational> {
        &self.dual
    }

    pub fn same_field(&self, other: &FieldData) -> bool {
        std::ptr::eq(self, other) || (self.label == other.label && self.poly == other.poly && self.basis == other.basis)
    }

    /// Product of integer coordinate vectors; `None` on overflow.
    pub fn mul_int(&self, a: &[i64], b: &[i64]) -> Option<Vec<i64>> {
        let d = self.degree;
        let mut out = vec![0i128; d];
        for i in 0..d {
            if a[i] == 0 {
                continue;
            }
            for j in 0..d {
                if b[j] == 0 {
                    continue;
                }
                let ab = a[i] as i128 * b[j] as i128;
                let row = &self.mul_table[(i * d + j) * d..(i * d + j + 1) * d];
                for k in 0..d {
                    if row[k] != 0 {
                        out[k] = out[k].checked_add(ab.checked_mul(row[k] as i128)?)?;
                    }
                }
            }
        }
        out.into_iter().map(|x| i64::try_from(x).ok()).collect()
    }

    pub fn mul_big(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let d = self.degree;
        let mut out = vec![BigInt::zero(); d];
        for i in 0..d {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if b[j].is_zero() {
                    continue;
                }
                let ab = &a[i] * &b[j];
                for k in 0..d {
                    let t = self.mul_table(i, j, k);
                    if t != 0 {
                        out[k] += &ab * t;
                    }
                }
            }
        }
        out
    }

    pub fn mul_q(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let d = self.degree;
        let mut out = vec![Rational::zero(); d];
        for i in 0..d {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if b[j].is_zero() {
                    continue;
                }
                let ab = &a[i] * &b[j];
                for k in 0..d {
                    let t = self.mul_table(i, j, k);
                    if t != 0 {
                        out[k] += &ab * rat_int(t);
                    }
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `a`: row i holds the coordinates of ω_i·a.
    pub fn mul_matrix(&self, a: &[Rational]) -> Matrix<Rational> {
        let d = self.degree;
        Matrix::from_fn(d, d, |i, k| {
            (0..d).fold(Rational::zero(), |acc, j| {
                let t = self.mul_table(i, j, k);
                if t == 0 || a[j].is_zero() {
                    acc
                } else {
                    acc + &a[j] * rat_int(t)
                }
            })
        })
    }

    pub fn trace_q(&self, a: &[Rational]) -> Rational {
        a.iter().zip(&self.basis_traces).fold(Rational::zero(), |acc, (x, &t)| acc + x * rat_int(t))
    }

    /// Characteristic polynomial of multiplication by `a` (Faddeev–LeVerrier).
    pub fn charpoly_q(&self, a: &[Rational]) -> Poly<Rational> {
        let d = self.degree;
        let m = self.mul_matrix(a);
        let mut coeffs = vec![Rational::zero(); d + 1];
        coeffs[d] = Rational::one();
        let mut mk = Matrix::<Rational>::identity(d);
        for k in 1..=d {
            mk = m.mul(&mk);
            let c = -mk.trace() / rat_int(k as i64);
            coeffs[d - k] = c.clone();
            for i in 0..d {
                mk[(i, i)] = mk[(i, i)].clone() + c.clone();
            }
        }
        Poly::new(coeffs)
    }

    pub fn norm_q(&self, a: &[Rational]) -> Rational {
        let cp = self.charpoly_q(a);
        let c0 = cp.coeff(0);
        if self.degree % 2 == 0 {
            c0
        } else {
            -c0
        }
    }

    /// All embeddings positive, decided from the sign pattern of the
    /// characteristic polynomial.
    pub fn is_totally_positive_q(&self, a: &[Rational]) -> Result<bool, FieldError> {
        if a.iter().all(Zero::is_zero) {
            return Err(FieldError::ZeroInput);
        }
        let cp = self.charpoly_q(a);
        let d = self.degree;
        Ok((0..=d).all(|j| {
            let c = cp.coeff(j);
            if (d - j) % 2 == 0 {
                c.is_positive()
            } else {
                c.is_negative()
            }
        }))
    }

    /// Certified enclosures of every σ_i(ω_j) with radius below `2^-prec`
    /// times a modest factor.
    pub fn embed(&self, prec: u32) -> Result<EmbeddingMatrix, FieldError> {
        if !(64..=1 << 14).contains(&prec) {
            return Err(FieldError::PrecisionUnreachable(prec));
        }
        let width = Rational::new(BigInt::one(), BigInt::one() << prec);
        let qpoly = Poly::new(self.poly.iter().map(|c| Rational::from_integer(c.clone())).collect());
        let mut entries = Vec::with_capacity(self.degree);
        for (lo, hi) in &self.roots {
            let (lo, hi) = refine_root(&qpoly, lo.clone(), hi.clone(), &width);
            let two = rat_int(2);
            let mid = (&lo + &hi) / &two;
            let rad = (&hi - &lo) / &two;
            let reach = mid.abs() + &rad;
            let row = (0..self.degree)
                .map(|j| {
                    let g = Poly::new(self.basis.row(j).to_vec());
                    // |g(x) - g(mid)| ≤ rad · max|g'| on the interval
                    let dbound = g
                        .derivative()
                        .coeffs()
                        .iter()
                        .enumerate()
                        .fold(Rational::zero(), |acc, (m, c)| acc + c.abs() * num_traits::pow(reach.clone(), m));
                    Ball { mid: g.eval(&mid), rad: &rad * dbound }
                })
                .collect();
            entries.push(row);
        }
        Ok(EmbeddingMatrix { prec, entries })
    }

    /// Embeddings at the default 128-bit precision, computed once.
    pub fn embeddings(&self) -> &EmbeddingMatrix {
        self.default_embedding.get_or_init(|| self.embed(128).expect("128 bits is in range"))
    }

    /// Float embeddings σ_i(a) of a rational coordinate vector.
    pub fn embed_f64(&self, a: &[Rational]) -> Vec<f64> {
        let m = self.embeddings().mids_f64();
        let af: Vec<f64> = a.iter().map(rational_to_f64).collect();
        m.iter().map(|row| row.iter().zip(&af).map(|(x, y)| x * y).sum()).collect()
    }

    /// Checks p-maximality of the basis at every p with p² | disc.
    fn check_maximal(&self) -> Result<(), FieldError> {
        let Some(disc) = self.disc.to_u64() else {
            return Err(FieldError::BadRecord("discriminant too large to factor".into()));
        };
        for (p, e) in intfactor::factor(disc) {
            if e >= 2 && !self.is_p_maximal(p) {
                return Err(FieldError::BasisNotMaximal { p });
            }
        }
        Ok(())
    }

    /// Pohst–Zassenhaus: 𝒪 is p-maximal iff the ring of multipliers of its
    /// p-radical is 𝒪 itself.
    fn is_p_maximal(&self, p: u64) -> bool {
        let d = self.degree;
        let f = Fp::new(p);
        let radical = p_radical_mod_p(self, &f);
        let mut gens: Vec<Vec<BigInt>> = radical
            .iter()
            .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        for i in 0..d {
            let mut v = vec![BigInt::zero(); d];
            v[i] = BigInt::from(p);
            gens.push(v);
        }
        let h = hnf(&gens, d);
        let hq = Matrix::from_rows(h.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect());
        let hinv = hq.inverse().expect("p-radical has full rank");
        // x ↦ (x·b_i expressed in the radical basis) mod p, for the basis b_i of the radical
        let mut blocks: Vec<Vec<u64>> = vec![Vec::new(); d];
        for b in &h {
            for (xi, block) in blocks.iter_mut().enumerate() {
                let mut e = vec![BigInt::zero(); d];
                e[xi] = BigInt::one();
                let prod = self.mul_big(&e, b);
                let prod_q: Vec<Rational> = prod.into_iter().map(Rational::from_integer).collect();
                let coords = hinv.vec_mul(&prod_q);
                for c in coords {
                    debug_assert!(c.is_integer());
                    let r = c.to_integer().mod_floor(&BigInt::from(p));
                    block.push(r.to_u64().unwrap());
                }
            }
        }
        modp::left_kernel(&f, &blocks).is_empty()
    }
}

/// Basis (mod p) of the radical of 𝒪/p𝒪: the kernel of x ↦ x^{p^j} with p^j ≥ d.
pub fn p_radical_mod_p(field: &FieldData, f: &Fp) -> Vec<Vec<u64>> {
    let d = field.degree();
    let mut q: u128 = f.p as u128;
    while q < d as u128 {
        q *= f.p as u128;
    }
    let images: Vec<Vec<u64>> = (0..d)
        .map(|i| {
            let mut e = vec![0u64; d];
            e[i] = 1;
            pow_mod_p(field, f, &e, q)
        })
        .collect();
    modp::left_kernel(f, &images)
}

/// Product in 𝒪/p𝒪.
pub fn mul_mod_p(field: &FieldData, f: &Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
    let d = field.degree();
    let mut out = vec![0u64; d];
    for i in 0..d {
        if a[i] == 0 {
            continue;
        }
        for j in 0..d {
            if b[j] == 0 {
                continue;
            }
            let ab = f.mul(a[i], b[j]);
            for k in 0..d {
                let t = field.mul_table(i, j, k);
                if t != 0 {
                    out[k] = f.add(out[k], f.mul(ab, f.reduce(t as i128)));
                }
            }
        }
    }
    out
}

pub fn pow_mod_p(field: &FieldData, f: &Fp, a: &[u64], mut e: u128) -> Vec<u64> {
    let d = field.degree();
    let mut r = vec![0u64; d];
    r[0] = 1 % f.p;
    let mut b = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_p(field, f, &r, &b);
        }
        b = mul_mod_p(field, f, &b, &b);
        e >>= 1;
    }
    r
}

/// Decides irreducibility of a squarefree monic polynomial with all roots
/// real: a proper monic factor over ℤ is a product over a subset of roots,
/// so it suffices to round each subset product and test divisibility.
fn is_irreducible(p: &Poly<Rational>, roots: &[(Rational, Rational)]) -> bool {
    let d = roots.len();
    let r: Vec<f64> = roots.iter().map(|(lo, hi)| rational_to_f64(&((lo + hi) / rat_int(2)))).collect();
    for mask in 1u32..(1 << d) - 1 {
        let size = mask.count_ones() as usize;
        if size > d / 2 {
            continue;
        }
        let mut c = vec![1.0f64];
        for (i, ri) in r.iter().enumerate() {
            if mask & (1 << i) != 0 {
                let mut next = vec![0.0; c.len() + 1];
                for (k, ck) in c.iter().enumerate() {
                    next[k + 1] += ck;
                    next[k] -= ck * ri;
                }
                c = next;
            }
        }
        if c.iter().any(|x| (x - x.round()).abs() > 1e-6) {
            continue;
        }
        let g = Poly::new(c.iter().map(|x| rat_int(x.round() as i64)).collect());
        if p.rem(&g).is_zero() {
            return false;
        }
    }
    true
}

/// An element of a field, exact rational coordinates in the integral basis.
#[derive(Clone)]
pub struct AlgNum {
    coords: Vec<Rational>,
    field: Arc<FieldData>,
}

impl fmt::Debug for AlgNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coords.iter().map(|x| x.to_string()).collect();
        write!(f, "AlgNum[{}]({})", self.field.label, c.join(", "))
    }
}

impl PartialEq for AlgNum {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.coords == other.coords
    }
}

impl AlgNum {
    pub fn new(field: &Arc<FieldData>, coords: Vec<Rational>) -> Self {
        assert_eq!(coords.len(), field.degree, "coordinate vector has the wrong length");
        AlgNum { coords, field: field.clone() }
    }

    pub fn from_ints(field: &Arc<FieldData>, coords: &[i64]) -> Self {
        Self::new(field, coords.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn from_int(field: &Arc<FieldData>, n: i64) -> Self {
        Self::from_rational(field, rat_int(n))
    }

    pub fn from_rational(field: &Arc<FieldData>, q: Rational) -> Self {
        let mut c = vec![Rational::zero(); field.degree];
        c[0] = q;
        Self::new(field, c)
    }

    pub fn one(field: &Arc<FieldData>) -> Self {
        Self::from_int(field, 1)
    }

    /// Element Σ c_m θ^m given in the power basis.
    pub fn from_power_basis(field: &Arc<FieldData>, c: &[Rational]) -> Self {
        let mut c = c.to_vec();
        reduce_mod(&field.poly, &mut c);
        let coords = field.basis_inv.vec_mul(&c);
        Self::new(field, coords)
    }

    /// The generator θ of the defining polynomial.
    pub fn generator(field: &Arc<FieldData>) -> Self {
        let mut c = vec![Rational::zero(); field.degree.max(2)];
        c[1] = Rational::one();
        Self::from_power_basis(field, &c)
    }

    pub fn to_power_basis(&self) -> Vec<Rational> {
        self.field.basis.vec_mul(&self.coords)
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn field(&self) -> &Arc<FieldData> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    pub fn is_rational(&self) -> bool {
        self.coords[1..].iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<(), FieldError> {
        if self.field.same_field(&other.field) {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(Self::new(&self.field, self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(Self::new(&self.field, self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(Self::new(&self.field, self.field.mul_q(&self.coords, &other.coords)))
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.field, self.coords.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(&self.field, self.coords.iter().map(|a| a * q).collect())
    }

    pub fn inverse(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        let m = self.field.mul_matrix(&self.coords);
        let mut one = vec![Rational::zero(); self.field.degree];
        one[0] = Rational::one();
        // x·M = 1 where row i of M is ω_i·a
        let x = m.transpose().solve(&one).ok_or(FieldError::ZeroInput)?;
        Ok(Self::new(&self.field, x))
    }

    pub fn div(&self, other: &Self) -> Result<Self, FieldError> {
        self.mul(&other.inverse()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(&self.field);
        for _ in 0..e {
            r = r.mul(self).expect("same field");
        }
        r
    }

    pub fn trace(&self) -> Rational {
        self.field.trace_q(&self.coords)
    }

    pub fn norm(&self) -> Rational {
        self.field.norm_q(&self.coords)
    }

    pub fn charpoly(&self) -> Poly<Rational> {
        self.field.charpoly_q(&self.coords)
    }

    /// Minimal polynomial over ℚ (monic).
    pub fn minpoly(&self) -> Poly<Rational> {
        crate::poly::squarefree_part(&self.charpoly())
    }

    pub fn is_totally_positive(&self) -> Result<bool, FieldError> {
        self.field.is_totally_positive_q(&self.coords)
    }

    pub fn embeddings_f64(&self) -> Vec<f64> {
        self.field.embed_f64(&self.coords)
    }

    /// Certified enclosures of σ_i(self) from an embedding matrix.
    pub fn embeddings_ball(&self, em: &EmbeddingMatrix) -> Vec<Ball> {
        em.entries
            .iter()
            .map(|row| {
                let mut mid = Rational::zero();
                let mut rad = Rational::zero();
                for (b, c) in row.iter().zip(&self.coords) {
                    mid += &b.mid * c;
                    rad += &b.rad * c.abs();
                }
                Ball { mid, rad }
            })
            .collect()
    }
}

/// The trace-dual basis ω*_j of the integral basis; it spans 𝔡_F^{-1}.
pub fn inverse_different_basis(field: &Arc<FieldData>) -> Vec<AlgNum> {
    (0..field.degree).map(|j| AlgNum::new(field, field.dual.row(j).to_vec())).collect()
}

pub fn load_field(rec: &FieldRecord) -> Result<Arc<FieldData>, FieldError> {
    FieldData::from_record(rec)
}

/// Loads every `*.json` record in a directory, sorted by (degree, disc, label).
pub fn load_dir(dir: &Path) -> Result<Vec<Arc<FieldData>>, FieldError> {
    let rd = std::fs::read_dir(dir).map_err(|e| FieldError::Io(format!("{}: {e}", dir.display())))?;
    let mut out = Vec::new();
    for entry in rd {
        let path = entry.map_err(|e| FieldError::Io(e.to_string()))?.path();
        if path.extension().and_then(|s| s.to_str()) == Some("json") {
            out.push(FieldData::from_file(&path)?);
        }
    }
    out.sort_by(|a, b| (a.degree, &a.disc, &a.label).cmp(&(b.degree, &b.disc, &b.label)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q5() -> Arc<FieldData> {
        FieldData::real_quadratic(5).unwrap()
    }

    #[test]
    fn golden_ratio_field() {
        let f = q5();
        assert_eq!(f.disc(), &BigInt::from(5));
        let t = AlgNum::generator(&f);
        let t2 = t.mul(&t).unwrap();
        assert_eq!(t2, t.add(&AlgNum::one(&f)).unwrap());
        assert_eq!(t.norm(), rat_int(-1));
        assert_eq!(t.trace(), rat_int(1));
        assert!(!t.is_totally_positive().unwrap());
        assert!(t.add(&AlgNum::from_int(&f, 2)).unwrap().is_totally_positive().unwrap());
    }

    #[test]
    fn rejects_bad_records() {
        let mut rec = q5().to_record();
        rec.disc = 6;
        assert!(matches!(FieldData::from_record(&rec), Err(FieldError::DiscMismatch { .. })));
        let mut rec = q5().to_record();
        rec.poly = vec![1, 0, 1];
        assert_eq!(FieldData::from_record(&rec).unwrap_err(), FieldError::NotTotallyReal);
        let mut rec = q5().to_record();
        rec.poly = vec![-4, 0, 1];
        assert_eq!(FieldData::from_record(&rec).unwrap_err(), FieldError::ReduciblePolynomial);
        // Z[sqrt 5] is not maximal at 2
        let rec = FieldRecord {
            label: "x".into(),
            degree: 2,
            disc: 20,
            poly: vec![-5, 0, 1],
            integral_basis: vec![vec!["1".into(), "0".into()], vec!["0".into(), "1".into()]],
        };
        assert_eq!(FieldData::from_record(&rec).unwrap_err(), FieldError::BasisNotMaximal { p: 2 });
        // half-integral basis that is not a ring
        let rec = FieldRecord {
            label: "x".into(),
            degree: 2,
            disc: 2,
            poly: vec![-2, 0, 1],
            integral_basis: vec![vec!["1".into(), "0".into()], vec!["0".into(), "1/2".into()]],
        };
        assert_eq!(FieldData::from_record(&rec).unwrap_err(), FieldError::BasisNotRing);
    }

    #[test]
    fn dual_basis_is_trace_dual() {
        let f = q5();
        let dual = inverse_different_basis(&f);
        for i in 0..2 {
            let mut e = vec![Rational::zero(); 2];
            e[i] = Rational::one();
            let wi = AlgNum::new(&f, e);
            for (j, wj) in dual.iter().enumerate() {
                let t = wi.mul(wj).unwrap().trace();
                assert_eq!(t, rat_int((i == j) as i64));
            }
        }
        assert_eq!(dual[0].norm().abs(), rat(1, 5));
    }

    #[test]
    fn embedding_refinement() {
        let f = q5();
        let e1 = f.embed(64).unwrap();
        let e2 = f.embed(128).unwrap();
        let s5 = 5f64.sqrt();
        assert!((e1.entries[0][1].to_f64() - (1.0 - s5) / 2.0).abs() < 1e-15);
        assert!((e1.entries[1][1].to_f64() - (1.0 + s5) / 2.0).abs() < 1e-15);
        for i in 0..2 {
            for j in 0..2 {
                assert!(e2.entries[i][j].rad.clone() * rat_int(2) <= e1.entries[i][j].rad);
            }
        }
        assert!(f.embed(32).is_err());
    }

    #[test]
    fn power_sums_of_golden_poly() {
        let p: Vec<BigInt> = [-1, -1, 1].iter().map(|&x| BigInt::from(x)).collect();
        let s: Vec<i64> = power_sums(&p, 5).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(s, vec![2, 1, 3, 4, 7, 11]);
    }
}
