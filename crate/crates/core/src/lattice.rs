//! Fincke–Pohst enumeration of integer vectors below a positive definite
//! quadratic form, the totally positive elements of given trace in the
//! inverse different, and theta-series counts.

use std::sync::Arc;

use num_traits::Float;
use rayon::prelude::*;

use crate::field::{AlgNum, FieldData};
use crate::scalar::rat_int;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("Gram matrix is not even integral")]
    NotEven,
}

/// A positive definite form `v ↦ vᵀ G v` with its Cholesky data
/// `Q(v) = Σ_i q_ii (v_i + Σ_{j>i} q_ij v_j)²`.
#[derive(Debug, Clone)]
pub struct GramForm<T> {
    dim: usize,
    gram: Vec<Vec<T>>,
    q: Vec<Vec<T>>,
}

/// One enumerated vector; `near_boundary` marks points whose float norm is
/// within the rounding margin of the bound and must be re-checked exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint<T> {
    pub v: Vec<i64>,
    pub norm: T,
    pub near_boundary: bool,
}

impl<T: Float + Send + Sync> GramForm<T> {
    pub fn new(gram: Vec<Vec<T>>) -> Result<Self, LatticeError> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(LatticeError::NotPositiveDefinite);
        }
        let mut q = gram.clone();
        for i in 0..n {
            for j in 0..i {
                if (gram[i][j] - gram[j][i]).abs() > T::epsilon() * (gram[i][j].abs() + T::one()) * T::from(16).unwrap() {
                    return Err(LatticeError::NotPositiveDefinite);
                }
            }
        }
        // Cohen, Algorithm 2.7.6 (upper-triangular square-root-free Cholesky)
        for i in 0..n {
            for j in i + 1..n {
                q[j][i] = q[i][j];
                q[i][j] = q[i][j] / q[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    q[k][l] = q[k][l] - q[k][i] * q[i][l];
                }
            }
            if !(q[i][i] > T::zero()) {
                return Err(LatticeError::NotPositiveDefinite);
            }
        }
        for i in 0..n {
            if !(q[i][i] > T::zero()) {
                return Err(LatticeError::NotPositiveDefinite);
            }
        }
        Ok(GramForm { dim: n, gram, q })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &[Vec<T>] {
        &self.gram
    }

    pub fn eval(&self, v: &[i64]) -> T {
        let mut s = T::zero();
        for i in 0..self.dim {
            let mut row = T::zero();
            for j in 0..self.dim {
                row = row + self.gram[i][j] * T::from(v[j]).unwrap();
            }
            s = s + T::from(v[i]).unwrap() * row;
        }
        s
    }

    /// Relative slack added to every bound so no point is lost to rounding.
    fn slack(&self) -> T {
        let eps = T::epsilon() * T::from(64 * (self.dim + 1) * (self.dim + 1)).unwrap();
        eps.max(T::from(2f64.powi(-20)).unwrap())
    }

    fn inflated(&self, bound: T) -> T {
        bound * (T::one() + self.slack()) + self.slack()
    }

    /// Range of the outermost (last) coordinate.
    pub fn outer_range(&self, bound: T) -> (i64, i64) {
        let n = self.dim;
        let b = self.inflated(bound);
        let r = (b / self.q[n - 1][n - 1]).sqrt();
        ((-r).floor().to_i64().unwrap(), r.ceil().to_i64().unwrap())
    }

    /// Calls `visit` for every v with `vᵀGv < bound` (up to the safety slack)
    /// whose last coordinate equals `last`, depth-first with the last
    /// coordinate outermost.
    pub fn for_each_with_last<F: FnMut(&[i64], T)>(&self, bound: T, last: i64, visit: &mut F) {
        let n = self.dim;
        let b = self.inflated(bound);
        let mut x = vec![0i64; n];
        x[n - 1] = last;
        let t = T::from(last).unwrap();
        let used = self.q[n - 1][n - 1] * t * t;
        if used > b {
            return;
        }
        if n == 1 {
            visit(&x, used);
            return;
        }
        self.descend(n - 2, b - used, used, &mut x, b, visit);
    }

    fn descend<F: FnMut(&[i64], T)>(&self, i: usize, remaining: T, used: T, x: &mut Vec<i64>, b: T, visit: &mut F) {
        let n = self.dim;
        let mut c = T::zero();
        for j in i + 1..n {
            c = c - self.q[i][j] * T::from(x[j]).unwrap();
        }
        let qi = self.q[i][i];
        let r = (remaining.max(T::zero()) / qi).sqrt();
        let lo = (c - r).floor().to_i64().unwrap();
        let hi = (c + r).ceil().to_i64().unwrap();
        for xi in lo..=hi {
            let diff = T::from(xi).unwrap() - c;
            let term = qi * diff * diff;
            if term > remaining {
                continue;
            }
            x[i] = xi;
            if i == 0 {
                visit(x, used + term);
            } else {
                self.descend(i - 1, remaining - term, used + term, x, b, visit);
            }
        }
        x[i] = 0;
    }

    pub fn for_each_below<F: FnMut(&[i64], T)>(&self, bound: T, visit: &mut F) {
        let (lo, hi) = self.outer_range(bound);
        for last in lo..=hi {
            self.for_each_with_last(bound, last, visit);
        }
    }

    /// All integer vectors with `vᵀGv < bound`, boundary cases flagged.
    pub fn enumerate_below(&self, bound: T) -> Vec<LatticePoint<T>> {
        let margin = bound * self.slack() + self.slack();
        let mut out = Vec::new();
        self.for_each_below(bound, &mut |v, norm| {
            if norm < bound + margin {
                out.push(LatticePoint { v: v.to_vec(), norm, near_boundary: (norm - bound).abs() <= margin });
            }
        });
        out
    }
}

pub type GramFormF = GramForm<f64>;

/// Even unimodular Gram matrix of E_8 (Cartan matrix in the Bourbaki labelling).
pub fn e8_gram() -> Vec<Vec<i64>> {
    vec![
        vec![2, 0, -1, 0, 0, 0, 0, 0],
        vec![0, 2, 0, -1, 0, 0, 0, 0],
        vec![-1, 0, 2, -1, 0, 0, 0, 0],
        vec![0, -1, -1, 2, -1, 0, 0, 0],
        vec![0, 0, 0, -1, 2, -1, 0, 0],
        vec![0, 0, 0, 0, -1, 2, -1, 0],
        vec![0, 0, 0, 0, 0, -1, 2, -1],
        vec![0, 0, 0, 0, 0, 0, -1, 2],
    ]
}

/// r(n) = #{v : vᵀGv/2 = n} for n ≤ max_norm, G even integral.
pub fn theta_coefficients(gram: &[Vec<i64>], max_norm: u64) -> Result<Vec<u64>, LatticeError> {
    let n = gram.len();
    for i in 0..n {
        if gram[i].len() != n || gram[i][i] % 2 != 0 {
            return Err(LatticeError::NotEven);
        }
        for j in 0..n {
            if gram[i][j] != gram[j][i] {
                return Err(LatticeError::NotEven);
            }
        }
    }
    let gf: Vec<Vec<f64>> = gram.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let form = GramForm::new(gf)?;
    let bound = 2.0 * max_norm as f64 + 1.0;
    let (lo, hi) = form.outer_range(bound);
    let counts = (lo..=hi)
        .into_par_iter()
        .map(|last| {
            let mut c = vec![0u64; max_norm as usize + 1];
            form.for_each_with_last(bound, last, &mut |v, _| {
                let mut s: i64 = 0;
                for i in 0..n {
                    let row: i64 = (0..n).map(|j| gram[i][j] * v[j]).sum();
                    s += v[i] * row;
                }
                let m = (s / 2) as u64;
                if m <= max_norm {
                    c[m as usize] += 1;
                }
            });
            c
        })
        .reduce(
            || vec![0u64; max_norm as usize + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts)
}

/// Float data for testing total positivity of ν = Σ v_j ω*_j with certified
/// error bounds, falling back to the exact characteristic polynomial.
pub struct TraceSlice {
    field: Arc<FieldData>,
    /// `emb[i][j]` ≈ σ_i(ω*_j), permuted so the trace coordinate is last.
    emb: Vec<Vec<f64>>,
    err: Vec<Vec<f64>>,
    form: GramForm<f64>,
}

impl TraceSlice {
    pub fn new(field: &Arc<FieldData>) -> Self {
        let d = field.degree();
        let dual = field.dual_basis_matrix();
        let em = field.embeddings();
        // σ_i(ω*_j) = Σ_k dual[j][k] σ_i(ω_k)
        let mut emb = vec![vec![0.0; d]; d];
        let mut err = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                let mut mid = Rational::from_integer(0.into());
                let mut rad = Rational::from_integer(0.into());
                for k in 0..d {
                    let c = &dual[(j, k)];
                    mid += &em.entries[i][k].mid * c;
                    rad += &em.entries[i][k].rad * num_traits::Signed::abs(c);
                }
                let ball = crate::field::Ball { mid, rad };
                // trace coordinate (j = 0) moves to the last slot
                let col = if j == 0 { d - 1 } else { j - 1 };
                emb[i][col] = ball.to_f64();
                err[i][col] = ball.f64_error();
            }
        }
        let gram: Vec<Vec<f64>> = (0..d)
            .map(|a| (0..d).map(|b| (0..d).map(|i| emb[i][a] * emb[i][b]).sum()).collect())
            .collect();
        let form = GramForm::new(gram).expect("embedding Gram matrix is positive definite");
        TraceSlice { field: field.clone(), emb, err, form }
    }

    /// Dual-basis coordinates (trace first) from the permuted vector.
    fn unpermute(&self, x: &[i64]) -> Vec<i64> {
        let d = x.len();
        let mut v = Vec::with_capacity(d);
        v.push(x[d - 1]);
        v.extend_from_slice(&x[..d - 1]);
        v
    }

    /// Sign of every embedding, `None` when some embedding is too close to
    /// zero for the float enclosure to decide.
    fn float_positivity(&self, x: &[i64]) -> Option<bool> {
        let d = x.len();
        let mut undecided = false;
        for i in 0..d {
            let mut s = 0.0;
            let mut bound = 0.0;
            for j in 0..d {
                let xj = x[j] as f64;
                let t = self.emb[i][j] * xj;
                s += t;
                bound += t.abs() + self.err[i][j] * xj.abs();
            }
            let tol = bound * (d as f64 + 2.0) * f64::EPSILON * 2.0 + bound * 1e-30;
            if s + tol < 0.0 {
                return Some(false);
            }
            if s - tol <= 0.0 {
                undecided = true;
            }
        }
        if undecided {
            None
        } else {
            Some(true)
        }
    }

    pub fn exact_positive(&self, v: &[i64]) -> bool {
        let coords = self.dual_to_integral(v);
        self.field.is_totally_positive_q(&coords).unwrap_or(false)
    }

    /// Coordinates of Σ v_j ω*_j in the integral basis.
    pub fn dual_to_integral(&self, v: &[i64]) -> Vec<Rational> {
        let dual = self.field.dual_basis_matrix();
        let vq: Vec<Rational> = v.iter().map(|&c| rat_int(c)).collect();
        dual.vec_mul(&vq)
    }

    /// Float embeddings of ν from dual coordinates (trace first).
    pub fn embeddings_of(&self, v: &[i64]) -> Vec<f64> {
        let d = v.len();
        let x = permute(v);
        (0..d).map(|i| (0..d).map(|j| self.emb[i][j] * x[j] as f64).sum()).collect()
    }

    /// Float embeddings of ν (dual coordinates, trace first) with an absolute
    /// error bound for each.
    pub fn embedding_bounds(&self, v: &[i64]) -> Vec<(f64, f64)> {
        let d = v.len();
        let x = permute(v);
        (0..d)
            .map(|i| {
                let mut s = 0.0;
                let mut bound = 0.0;
                let mut rad = 0.0;
                for j in 0..d {
                    let t = self.emb[i][j] * x[j] as f64;
                    s += t;
                    bound += t.abs();
                    rad += self.err[i][j] * (x[j] as f64).abs();
                }
                (s, rad + bound * (d as f64 + 2.0) * f64::EPSILON * 2.0)
            })
            .collect()
    }

    pub fn field(&self) -> &Arc<FieldData> {
        &self.field
    }

    /// Dual coordinates of every totally positive ν ∈ 𝔡^{-1} with tr ν = l,
    /// in the deterministic enumeration order.
    pub fn totally_positive(&self, l: i64) -> Vec<Vec<i64>> {
        let d = self.field.degree();
        let bound = (l * l) as f64;
        let mut out = Vec::new();
        if d == 1 {
            return if l > 0 { vec![vec![l]] } else { Vec::new() };
        }
        self.form.for_each_with_last(bound, l, &mut |x, _| {
            let ok = match self.float_positivity(x) {
                Some(b) => b,
                None => self.exact_positive(&self.unpermute(x)),
            };
            if ok {
                out.push(self.unpermute(x));
            }
        });
        out
    }

    /// Parallel variant splitting on the second-to-last coordinate; the
    /// result is sorted, so it is deterministic.
    pub fn totally_positive_par(&self, l: i64) -> Vec<Vec<i64>> {
        let mut v = self.totally_positive_chunks(l);
        v.sort();
        v
    }

    fn totally_positive_chunks(&self, l: i64) -> Vec<Vec<i64>> {
        let d = self.field.degree();
        if d <= 2 {
            return self.totally_positive(l);
        }
        // restrict to x[d-1] = l and split over x[d-2] via a sub-enumeration
        let bound = (l * l) as f64;
        let b = self.form.inflated(bound);
        let q = &self.form.q;
        let t = l as f64;
        let used = q[d - 1][d - 1] * t * t;
        if used > b {
            return Vec::new();
        }
        let c = -q[d - 2][d - 1] * t;
        let r = ((b - used).max(0.0) / q[d - 2][d - 2]).sqrt();
        let lo = (c - r).floor() as i64;
        let hi = (c + r).ceil() as i64;
        (lo..=hi)
            .into_par_iter()
            .flat_map_iter(|x2| {
                let mut out = Vec::new();
                let mut x = vec![0i64; d];
                x[d - 1] = l;
                x[d - 2] = x2;
                let diff = x2 as f64 - c;
                let term = q[d - 2][d - 2] * diff * diff;
                if term <= b - used {
                    let mut visit = |x: &[i64], _n: f64| {
                        let ok = match self.float_positivity(x) {
                            Some(b) => b,
                            None => self.exact_positive(&self.unpermute(x)),
                        };
                        if ok {
                            out.push(self.unpermute(x));
                        }
                    };
                    if d == 2 {
                        visit(&x, used + term);
                    } else {
                        self.form.descend(d - 3, b - used - term, used + term, &mut x, b, &mut visit);
                    }
                }
                out.into_iter()
            })
            .collect()
    }

    pub fn to_algnum(&self, v: &[i64]) -> AlgNum {
        AlgNum::new(&self.field, self.dual_to_integral(v))
    }
}

fn permute(v: &[i64]) -> Vec<i64> {
    let d = v.len();
    let mut x = Vec::with_capacity(d);
    x.extend_from_slice(&v[1..]);
    x.push(v[0]);
    x
}

/// Totally positive ν ∈ 𝔡_F^{-1} with tr(ν) = l.
pub fn totally_positive_of_trace(field: &Arc<FieldData>, l: i64) -> Vec<AlgNum> {
    let slice = TraceSlice::new(field);
    slice.totally_positive_par(l).iter().map(|v| slice.to_algnum(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_counts() {
        let g = GramForm::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let pts = g.enumerate_below(2.0);
        assert_eq!(pts.iter().filter(|p| p.norm < 2.0 - 1e-9).count(), 5);
        let pts = g.enumerate_below(5.0);
        assert_eq!(pts.iter().filter(|p| p.norm < 5.0 - 1e-9).count(), 13);
        assert!(GramForm::new(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
    }

    #[test]
    fn e8_theta_is_e4() {
        let r = theta_coefficients(&e8_gram(), 3).unwrap();
        assert_eq!(r, vec![1, 240, 2160, 6720]);
    }

    #[test]
    fn f32_forms_share_the_code() {
        let g = GramForm::new(vec![vec![2.0f32, 1.0], vec![1.0, 2.0]]).unwrap();
        let mut n = 0;
        g.for_each_below(2.5, &mut |v, _| {
            let q = 2 * v[0] * v[0] + 2 * v[0] * v[1] + 2 * v[1] * v[1];
            if q < 3 {
                n += 1;
            }
        });
        assert_eq!(n, 7);
    }
}
