//! Diagonal restrictions of Hecke Eisenstein series: the coefficient sums
//! s_l(k), ζ_F(1−k) by Siegel's method, and the coordinates of the restriction
//! in the monomial basis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::field::{FieldData, FieldError};
use crate::ideal::{self, IdealError, PrimeMemo};
use crate::intfactor;
use crate::lattice::TraceSlice;
use crate::qseries::{self, QSeries, QSeriesError};
use crate::scalar::{rat_big, rat_int, rational_to_f64, simplest_rational_in};
use crate::zeta::{self, ZetaError};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RestrictError {
    #[error("(ν)𝔡 is not integral for ν = {0:?}")]
    NonIntegralIdeal(Vec<i64>),
    #[error("norm of (ν)𝔡 does not fit in 64 bits")]
    NormOverflow,
    #[error("Siegel solve is degenerate at weight {0}")]
    DegenerateSolve(u32),
    #[error("guard coefficient {index} disagrees with the enumerated value")]
    GuardMismatch { index: usize },
    #[error("need s_l up to l = {need}, have {have}")]
    TooFewCoefficients { need: usize, have: usize },
    #[error("invalid weight: d = {d}, k = {k}")]
    BadWeight { d: usize, k: u32 },
    #[error("field must have degree {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("restriction identity fails for D = {0}")]
    IdentityFailed(i64),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    QSeries(#[from] QSeriesError),
    #[error("numeric ζ_F(1−k) could not be reconstructed as a rational")]
    ReconstructionFailed,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

/// Prime-power profile of one integral ideal (ν)𝔡 as (N(𝔭), v_𝔭) pairs.
pub type Profile = Vec<(u64, u32)>;

/// Per-field state for the sums s_l(k): the trace slice, a prime memo and
/// the factorization profiles, which do not depend on k.
pub struct SlEngine {
    field: Arc<FieldData>,
    slice: TraceSlice,
    memo: PrimeMemo,
    /// D·G⁻¹, mapping dual coordinates to integral coordinates of Dν.
    adj: Vec<Vec<i64>>,
    disc: u64,
    diff_vals: HashMap<u64, Vec<i64>>,
    profiles: Mutex<HashMap<i64, Arc<Vec<Profile>>>>,
}

impl SlEngine {
    pub fn new(field: &Arc<FieldData>) -> Result<Self, RestrictError> {
        let d = field.degree();
        let disc = field.disc().to_u64().ok_or(RestrictError::NormOverflow)?;
        let dq = rat_int(disc as i64);
        let dual = field.dual_basis_matrix();
        let adj = (0..d)
            .map(|j| {
                (0..d)
                    .map(|k| {
                        let x = &dual[(j, k)] * &dq;
                        debug_assert!(x.is_integer());
                        x.to_integer().to_i64().expect("adjugate entry fits")
                    })
                    .collect()
            })
            .collect();
        let memo = PrimeMemo::new(field);
        let mut diff_vals = HashMap::new();
        for (p, _) in intfactor::factor(disc.max(1)) {
            let primes = memo.primes_above(p)?;
            let vals = primes.iter().map(|pr| ideal::valuation(memo.different(), pr)).collect();
            diff_vals.insert(p, vals);
        }
        Ok(SlEngine {
            field: field.clone(),
            slice: TraceSlice::new(field),
            memo,
            adj,
            disc,
            diff_vals,
            profiles: Mutex::new(HashMap::new()),
        })
    }

    pub fn field(&self) -> &Arc<FieldData> {
        &self.field
    }

    pub fn slice(&self) -> &TraceSlice {
        &self.slice
    }

    /// Integral coordinates of Dν.
    fn scaled_coords(&self, v: &[i64]) -> Vec<i128> {
        let d = v.len();
        (0..d).map(|k| (0..d).map(|j| v[j] as i128 * self.adj[j][k] as i128).sum()).collect()
    }

    /// N((ν)𝔡) = D·N(ν): certified float product, exact otherwise.
    fn ideal_norm(&self, v: &[i64]) -> Result<u64, RestrictError> {
        let b = self.slice.embedding_bounds(v);
        let mut prod = self.disc as f64;
        let mut rel = 4.0 * f64::EPSILON * b.len() as f64;
        let mut ok = true;
        for &(s, e) in &b {
            if s <= 0.0 || e >= 0.5 * s {
                ok = false;
                break;
            }
            prod *= s;
            rel += 1.01 * e / s;
        }
        if ok && prod < 4.0e15 && prod * rel < 0.25 {
            return Ok(prod.round() as u64);
        }
        let coords = self.slice.dual_to_integral(v);
        let n = self.field.norm_q(&coords) * rat_int(self.disc as i64);
        if !n.is_integer() || !n.is_positive() {
            return Err(RestrictError::NonIntegralIdeal(v.to_vec()));
        }
        n.to_integer().to_u64().ok_or(RestrictError::NormOverflow)
    }

    /// Factorization of (ν)𝔡 for ν with dual coordinates `v`.
    pub fn profile(&self, v: &[i64]) -> Result<Profile, RestrictError> {
        let n = self.ideal_norm(v)?;
        let x = self.scaled_coords(v);
        let x64: Option<Vec<i64>> = x.iter().map(|&c| i64::try_from(c).ok()).collect();
        let val = |pr: &ideal::PrimeIdeal| -> u32 {
            match &x64 {
                Some(x) => pr.valuation_i64(&self.field, x),
                None => {
                    let xb: Vec<BigInt> = x.iter().map(|&c| BigInt::from(c)).collect();
                    pr.valuation_big(&self.field, &xb)
                }
            }
        };
        let mut out = Vec::new();
        let mut seen_ramified = Vec::new();
        for (p, e) in intfactor::factor(n) {
            let primes = self.memo.primes_above(p)?;
            let vd = intfactor::valuation_u64(self.disc, p) as i64;
            let mut total = 0u32;
            if vd == 0 && primes.len() == 1 {
                let pr = &primes[0];
                if e % pr.f != 0 {
                    return Err(IdealError::Inconsistent(p).into());
                }
                out.push((pr.norm().to_u64().ok_or(RestrictError::NormOverflow)?, e / pr.f));
                continue;
            }
            for (i, pr) in primes.iter().enumerate() {
                let mut w = val(pr) as i64;
                if vd > 0 {
                    w += self.diff_vals[&p][i] - pr.e as i64 * vd;
                }
                if w < 0 {
                    return Err(RestrictError::NonIntegralIdeal(v.to_vec()));
                }
                if w > 0 {
                    total += w as u32 * pr.f;
                    out.push((pr.norm().to_u64().ok_or(RestrictError::NormOverflow)?, w as u32));
                }
            }
            if total != e {
                return Err(IdealError::Inconsistent(p).into());
            }
            if vd > 0 {
                seen_ramified.push(p);
            }
        }
        // primes of 𝔡 not dividing the norm must still give valuation 0
        for (&p, dv) in &self.diff_vals {
            if seen_ramified.contains(&p) || n % p == 0 {
                continue;
            }
            let vd = intfactor::valuation_u64(self.disc, p) as i64;
            for (i, pr) in self.memo.primes_above(p)?.iter().enumerate() {
                if val(pr) as i64 + dv[i] - pr.e as i64 * vd != 0 {
                    return Err(RestrictError::NonIntegralIdeal(v.to_vec()));
                }
            }
        }
        Ok(out)
    }

    /// Profiles of all totally positive ν of trace l (cached).
    pub fn profiles(&self, l: i64) -> Result<Arc<Vec<Profile>>, RestrictError> {
        if let Some(p) = self.profiles.lock().unwrap().get(&l) {
            return Ok(p.clone());
        }
        let nus = self.slice.totally_positive_par(l);
        let profs: Result<Vec<Profile>, RestrictError> = nus.par_iter().map(|v| self.profile(v)).collect();
        let profs = Arc::new(profs?);
        self.profiles.lock().unwrap().insert(l, profs.clone());
        Ok(profs)
    }

    /// s_l(k) = Σ_{ν ∈ 𝔡⁻¹, ν ≫ 0, tr ν = l} σ_{k−1}((ν)𝔡).
    pub fn s_l(&self, k: u32, l: i64) -> Result<BigInt, RestrictError> {
        if k < 1 {
            return Err(RestrictError::BadWeight { d: self.field.degree(), k });
        }
        let profs = self.profiles(l)?;
        Ok(sum_sigma(&profs, k - 1))
    }

    /// `[0, s_1, …, s_lmax]`.
    pub fn s_values(&self, k: u32, lmax: usize) -> Result<Vec<BigInt>, RestrictError> {
        let mut out = vec![BigInt::zero()];
        for l in 1..=lmax {
            out.push(self.s_l(k, l as i64)?);
        }
        Ok(out)
    }
}

/// Σ over profiles of Π_𝔭 Σ_{m ≤ v} N(𝔭)^{rm}.
pub fn sum_sigma(profs: &[Profile], r: u32) -> BigInt {
    let mut memo: HashMap<(u64, u32), BigInt> = HashMap::new();
    let mut total = BigInt::zero();
    for prof in profs {
        let mut t = BigInt::one();
        for &(q, v) in prof {
            let s = memo.entry((q, v)).or_insert_with(|| ideal::local_sigma(&BigInt::from(q), v, r));
            t *= &*s;
        }
        total += t;
    }
    total
}

/// Number of coefficients beyond the Siegel matching index that are checked.
pub const SIEGEL_GUARD: usize = 2;

/// dim M_{dk} and the largest l needed: the solve uses s_1..s_m and the
/// guards s_{m+1}, s_{m+2}.
pub fn required_l(d: usize, k: u32) -> Result<(usize, usize), RestrictError> {
    let w = d as i64 * k as i64;
    if w < 4 || w % 2 != 0 || k < 2 {
        return Err(RestrictError::BadWeight { d, k });
    }
    let m = qseries::dim_mk(w)?;
    Ok((m, m + SIEGEL_GUARD))
}

/// The outcome of Siegel's method.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelSolution {
    /// c = 2^d / ζ_F(1−k).
    pub c: Rational,
    pub zeta: Rational,
    /// Coefficient index used for the solve.
    pub matched: usize,
    /// Indices checked afterwards.
    pub guards: Vec<usize>,
}

/// Solves for the unique c with 1 + c Σ s_l q^l ∈ M_{dk}, using the Miller
/// basis, then checks every remaining coefficient.
pub fn siegel_solve(d: usize, k: u32, s: &[BigInt]) -> Result<SiegelSolution, RestrictError> {
    let (m, need) = required_l(d, k)?;
    let w = (d as u32) * k;
    if s.len() <= need {
        return Err(RestrictError::TooFewCoefficients { need, have: s.len().saturating_sub(1) });
    }
    let prec = s.len();
    let mb = qseries::miller_basis(w, prec)?;
    let sq: Vec<Rational> = s.iter().map(|x| rat_big(x.clone())).collect();
    // coefficient n ≥ m: c·(s_n − Σ_{l<m} s_l a_n(f_l)) = a_n(f_0)
    let lhs = |n: usize| -> Rational {
        let mut t = sq[n].clone();
        for (l, f) in mb.iter().enumerate().skip(1) {
            t -= &sq[l] * f.coeff(n);
        }
        t
    };
    let mut solved = None;
    for n in m..=m + 1 {
        let a = lhs(n);
        if !a.is_zero() {
            solved = Some((n, mb[0].coeff(n).clone() / a));
            break;
        }
    }
    let (matched, c) = solved.ok_or(RestrictError::DegenerateSolve(w))?;
    if c.is_zero() {
        return Err(RestrictError::DegenerateSolve(w));
    }
    let mut guards = Vec::new();
    for n in m..prec {
        if n == matched {
            continue;
        }
        if &c * lhs(n) != *mb[0].coeff(n) {
            return Err(RestrictError::GuardMismatch { index: n });
        }
        guards.push(n);
    }
    let zeta = rat_big(BigInt::one() << d) / &c;
    Ok(SiegelSolution { c, zeta, matched, guards })
}

/// 1 + c Σ s_l q^l as a series of weight dk.
pub fn restriction_from(d: usize, k: u32, c: &Rational, s: &[BigInt]) -> QSeries<Rational> {
    let mut coeffs: Vec<Rational> = s.iter().map(|x| rat_big(x.clone()) * c).collect();
    coeffs[0] = Rational::one();
    QSeries::new(d as u32 * k, coeffs)
}

/// ζ_F(1−k) by Siegel's method.
pub fn siegel_zeta(engine: &SlEngine, k: u32) -> Result<Rational, RestrictError> {
    let d = engine.field().degree();
    let (_, need) = required_l(d, k)?;
    let s = engine.s_values(k, need)?;
    Ok(siegel_solve(d, k, &s)?.zeta)
}

/// The Siegel value against ζ_F(k) summed numerically and carried through
/// the functional equation.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaCrossCheck {
    pub exact: Rational,
    pub numeric: f64,
    pub rel_diff: f64,
    /// Error bound of the numeric value.
    pub rel_err: f64,
}

impl ZetaCrossCheck {
    pub fn agrees(&self) -> bool {
        self.rel_diff <= self.rel_err
    }
}

pub fn zeta_cross_check(field: &Arc<FieldData>, k: u32, exact: &Rational, tol: f64) -> Result<ZetaCrossCheck, RestrictError> {
    let z = zeta::zeta_one_minus_k_numeric(field, k, tol)?;
    let e = rational_to_f64(exact);
    Ok(ZetaCrossCheck { exact: exact.clone(), numeric: z.value, rel_diff: ((z.value - e) / e).abs(), rel_err: z.rel_err })
}

/// ζ_F(1−k) from the numeric value by continued fractions, accepted only if
/// the resulting restriction passes the decomposition residual check on
/// `[0, s_1, …]` (at least dim M_{dk} + 2 entries).
pub fn zeta_from_numeric(field: &Arc<FieldData>, k: u32, s: &[BigInt], tol: f64) -> Result<Rational, RestrictError> {
    let d = field.degree();
    let z = zeta::zeta_one_minus_k_numeric(field, k, tol)?;
    let cand = simplest_rational_in(z.value, z.rel_err * z.value.abs()).ok_or(RestrictError::ReconstructionFailed)?;
    if cand.is_zero() {
        return Err(RestrictError::ReconstructionFailed);
    }
    let c = rat_big(BigInt::one() << d) / &cand;
    let series = restriction_from(d, k, &c, s);
    match qseries::decompose(&series, d as u32 * k) {
        Ok(_) => Ok(cand),
        Err(QSeriesError::NotInSpace { .. }) => Err(RestrictError::ReconstructionFailed),
        Err(e) => Err(e.into()),
    }
}

/// Exact q-expansion of the restriction to precision `prec` (at least the
/// Siegel requirement).
pub fn restriction_qexp(engine: &SlEngine, k: u32, prec: usize) -> Result<QSeries<Rational>, RestrictError> {
    let d = engine.field().degree();
    let (_, need) = required_l(d, k)?;
    let s = engine.s_values(k, need.max(prec.saturating_sub(1)))?;
    let sol = siegel_solve(d, k, &s)?;
    Ok(restriction_from(d, k, &sol.c, &s).truncate(prec))
}

/// Coordinates of E_w in the monomial basis of M_w.
pub fn eisenstein_coords(w: u32) -> Result<Vec<Rational>, RestrictError> {
    let m = qseries::dim_mk(w as i64)?;
    let e = qseries::eisenstein(w, m + 3)?;
    Ok(qseries::decompose(&e, w)?)
}

/// One table row: the restriction for (F, k) in the monomial basis of M_{dk}.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionReport {
    pub label: String,
    pub disc: BigInt,
    pub degree: usize,
    pub k: u32,
    /// s_1..s_L.
    pub s: Vec<BigInt>,
    pub zeta: Rational,
    pub coords: Vec<Rational>,
    /// Coordinates of E_{dk}.
    pub eisenstein: Vec<Rational>,
    pub residual_ok: bool,
    /// |coords[i] − eisenstein[i]| (entry 0 is 0).
    pub diffs: Vec<f64>,
    pub guards: Vec<usize>,
}

impl RestrictionReport {
    pub fn weight(&self) -> u32 {
        self.degree as u32 * self.k
    }
}

/// Builds the report from precomputed `[0, s_1, …]`.
pub fn table_row_from(field: &FieldData, k: u32, s: &[BigInt]) -> Result<RestrictionReport, RestrictError> {
    let d = field.degree();
    let w = d as u32 * k;
    let sol = siegel_solve(d, k, s)?;
    let series = restriction_from(d, k, &sol.c, s);
    let coords = qseries::decompose(&series, w)?;
    if coords[0] != Rational::one() {
        return Err(RestrictError::IdentityFailed(field.disc_i64()));
    }
    let eis = eisenstein_coords(w)?;
    let diffs = coords.iter().zip(&eis).map(|(a, b)| rational_to_f64(&(a - b)).abs()).collect();
    Ok(RestrictionReport {
        label: field.label().to_string(),
        disc: field.disc().clone(),
        degree: d,
        k,
        s: s[1..].to_vec(),
        zeta: sol.zeta,
        coords,
        eisenstein: eis,
        residual_ok: true,
        diffs,
        guards: sol.guards,
    })
}

pub fn table_row(engine: &SlEngine, k: u32) -> Result<RestrictionReport, RestrictError> {
    let d = engine.field().degree();
    let (_, need) = required_l(d, k)?;
    let s = engine.s_values(k, need)?;
    table_row_from(engine.field(), k, &s)
}

/// A Niemeier lattice by root system and its number of norm-2 vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Niemeier {
    pub name: &'static str,
    pub n2: u32,
}

/// The 24 Niemeier lattices; N_2 = 24·h for Coxeter number h.
pub const NIEMEIER: [Niemeier; 24] = [
    Niemeier { name: "D24", n2: 1104 },
    Niemeier { name: "D16E8", n2: 720 },
    Niemeier { name: "E8^3", n2: 720 },
    Niemeier { name: "A24", n2: 600 },
    Niemeier { name: "D12^2", n2: 528 },
    Niemeier { name: "A17E7", n2: 432 },
    Niemeier { name: "D10E7^2", n2: 432 },
    Niemeier { name: "A15D9", n2: 384 },
    Niemeier { name: "D8^3", n2: 336 },
    Niemeier { name: "A12^2", n2: 312 },
    Niemeier { name: "A11D7E6", n2: 288 },
    Niemeier { name: "E6^4", n2: 288 },
    Niemeier { name: "A9^2D6", n2: 240 },
    Niemeier { name: "D6^4", n2: 240 },
    Niemeier { name: "A8^3", n2: 216 },
    Niemeier { name: "A7^2D5^2", n2: 192 },
    Niemeier { name: "A6^4", n2: 168 },
    Niemeier { name: "A5^4D4", n2: 144 },
    Niemeier { name: "D4^6", n2: 144 },
    Niemeier { name: "A4^6", n2: 120 },
    Niemeier { name: "A3^8", n2: 96 },
    Niemeier { name: "A2^12", n2: 72 },
    Niemeier { name: "A1^24", n2: 48 },
    Niemeier { name: "Leech", n2: 0 },
];

pub fn niemeier_with_n2(n2: i64) -> Vec<&'static str> {
    NIEMEIER.iter().filter(|l| l.n2 as i64 == n2).map(|l| l.name).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NiemeierVerdict {
    Independent,
    Inconclusive { n2: i64, lattices: Vec<&'static str> },
}

/// Compares 720 + b with the Niemeier norm-2 counts, where the weight 12
/// restriction is E_4³ + bΔ.
pub fn niemeier_verdict(b: &Rational) -> NiemeierVerdict {
    if !b.is_integer() {
        return NiemeierVerdict::Independent;
    }
    let n2 = (b.to_integer() + BigInt::from(720)).to_i64().unwrap_or(i64::MIN);
    let lattices = niemeier_with_n2(n2);
    if lattices.is_empty() {
        NiemeierVerdict::Independent
    } else {
        NiemeierVerdict::Inconclusive { n2, lattices }
    }
}

pub fn niemeier_check(engine: &SlEngine) -> Result<NiemeierVerdict, RestrictError> {
    let d = engine.field().degree();
    if d != 6 {
        return Err(RestrictError::WrongDegree { expected: 6, got: d });
    }
    let r = table_row(engine, 2)?;
    Ok(niemeier_verdict(&r.coords[1]))
}

/// Coefficients c(0..prec) of the weight 13/2 plus-space form
/// g = (1/4)(2 E_4(4τ) Dθ − (DE_4)(4τ) θ), D = q d/dq.
pub fn kohnen_zagier_g(prec: usize) -> Vec<Rational> {
    let e4 = qseries::e4(prec / 4 + 1);
    let mut c = vec![Rational::zero(); prec];
    let mut n = 0i64;
    while (n * n) < prec as i64 {
        let mult = if n == 0 { 1 } else { 2 };
        let mut a = 0usize;
        while 4 * a + ((n * n) as usize) < prec {
            let idx = 4 * a + (n * n) as usize;
            let w = rat_int(mult * (2 * n * n - a as i64));
            c[idx] += e4.coeff(a) * w;
            a += 1;
        }
        n += 1;
    }
    for x in &mut c {
        *x /= rat_int(4);
    }
    c
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    fn squarefree(n: i64) -> bool {
        intfactor::factor(n as u64).iter().all(|&(_, e)| e == 1)
    }
    if d <= 1 {
        return false;
    }
    match d % 4 {
        1 => squarefree(d),
        0 => {
            let m = d / 4;
            (m % 4 == 2 || m % 4 == 3) && squarefree(m)
        }
        _ => false,
    }
}

/// Result of the weight 12 identity check for a real quadratic field.
#[derive(Debug, Clone, PartialEq)]
pub struct KzCheck {
    pub disc: i64,
    pub c_d: Rational,
    pub zeta_m5: Rational,
    pub identity: bool,
    /// |ζ_F(−5)| / D^{11/2}.
    pub zeta_ratio: f64,
    pub coefficients_checked: usize,
}

/// Checks E^Δ_{F,6} = E_12 − (12/691)(c(D)/ζ_F(−5))Δ exactly on every
/// computed coefficient, and the size bound on ζ_F(−5).
pub fn verify_kz(engine: &SlEngine, prec: usize) -> Result<KzCheck, RestrictError> {
    let f = engine.field();
    if f.degree() != 2 {
        return Err(RestrictError::WrongDegree { expected: 2, got: f.degree() });
    }
    let disc = f.disc_i64();
    let (_, need) = required_l(2, 6)?;
    let prec = prec.max(need + 1);
    let s = engine.s_values(6, prec - 1)?;
    let sol = siegel_solve(2, 6, &s)?;
    let lhs = restriction_from(2, 6, &sol.c, &s);
    let g = kohnen_zagier_g(disc as usize + 1);
    let c_d = g[disc as usize].clone();
    let coef = rat_int(12) / rat_int(691) * &c_d / &sol.zeta;
    let rhs = qseries::eisenstein(12, prec)?.sub(&qseries::delta(prec).scale(&coef))?;
    let identity = lhs.eq_up_to_prec(&rhs);
    let zeta_ratio = rational_to_f64(&sol.zeta).abs() / (disc as f64).powf(5.5);
    Ok(KzCheck { disc, c_d, zeta_m5: sol.zeta, identity, zeta_ratio, coefficients_checked: prec })
}
