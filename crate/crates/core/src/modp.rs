//! Arithmetic over the prime field F_p (p < 2^63): vectors, matrices and
//! polynomials, plus the splitting routines used for prime decomposition.

use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        Fp { p }
    }

    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.p as i128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.p as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + self.p as u128 - b as u128) % self.p as u128) as u64
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn pow(&self, mut a: u64, mut e: u128) -> u64 {
        let mut r = 1 % self.p;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "inverse of zero mod {}", self.p);
        self.pow(a, self.p as u128 - 2)
    }
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(f: &Fp, m: &mut [Vec<u64>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        let inv = f.inv(m[r][c]);
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let factor = m[i][c];
                for j in 0..cols {
                    let t = f.mul(factor, m[r][j]);
                    m[i][j] = f.sub(m[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the row space of `vecs`.
pub fn row_basis(f: &Fp, vecs: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut m = vecs.to_vec();
    let piv = rref(f, &mut m);
    m.truncate(piv.len());
    m
}

/// Basis of `{x : x · M = 0}` for the `rows × cols` matrix `m` (row vector convention).
pub fn left_kernel(f: &Fp, m: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    // transpose then right kernel
    let mut t: Vec<Vec<u64>> = (0..cols).map(|j| (0..rows).map(|i| m[i][j]).collect()).collect();
    let piv = rref(f, &mut t);
    let free: Vec<usize> = (0..rows).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; rows];
            v[fc] = 1;
            for (i, &pc) in piv.iter().enumerate() {
                v[pc] = f.neg(t[i][fc]);
            }
            v
        })
        .collect()
}

/// Polynomials over F_p, constant-first, no trailing zeros.
pub type PolyP = Vec<u64>;

pub fn ptrim(a: &mut PolyP) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn pdeg(a: &PolyP) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn pmul(f: &Fp, a: &PolyP, b: &PolyP) -> PolyP {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    ptrim(&mut out);
    out
}

pub fn psub(f: &Fp, a: &PolyP, b: &PolyP) -> PolyP {
    let n = a.len().max(b.len());
    let mut out: PolyP = (0..n)
        .map(|i| f.sub(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0)))
        .collect();
    ptrim(&mut out);
    out
}

pub fn pdivrem(f: &Fp, a: &PolyP, b: &PolyP) -> (PolyP, PolyP) {
    let db = pdeg(b).expect("division by zero polynomial");
    let inv = f.inv(b[db]);
    let mut r = a.clone();
    ptrim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    for i in (0..q.len()).rev() {
        let c = f.mul(r[i + db], inv);
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] = f.sub(r[i + j], f.mul(c, bj));
            }
        }
        q[i] = c;
    }
    r.truncate(db);
    ptrim(&mut r);
    ptrim(&mut q);
    (q, r)
}

pub fn pmonic(f: &Fp, a: &PolyP) -> PolyP {
    match a.last() {
        None => Vec::new(),
        Some(&l) => {
            let inv = f.inv(l);
            a.iter().map(|&x| f.mul(x, inv)).collect()
        }
    }
}

pub fn pgcd(f: &Fp, a: &PolyP, b: &PolyP) -> PolyP {
    let mut a = a.clone();
    let mut b = b.clone();
    ptrim(&mut a);
    ptrim(&mut b);
    while !b.is_empty() {
        let r = pdivrem(f, &a, &b).1;
        a = b;
        b = r;
    }
    pmonic(f, &a)
}

pub fn pderiv(f: &Fp, a: &PolyP) -> PolyP {
    let mut out: PolyP = a.iter().enumerate().skip(1).map(|(i, &c)| f.mul(c, i as u64 % f.p)).collect();
    ptrim(&mut out);
    out
}

/// `base^e mod m`.
pub fn ppowmod(f: &Fp, base: &PolyP, mut e: u128, m: &PolyP) -> PolyP {
    let mut r: PolyP = vec![1];
    let mut b = pdivrem(f, base, m).1;
    while e > 0 {
        if e & 1 == 1 {
            r = pdivrem(f, &pmul(f, &r, &b), m).1;
        }
        b = pdivrem(f, &pmul(f, &b, &b), m).1;
        e >>= 1;
    }
    if pdeg(m) == Some(0) {
        return Vec::new();
    }
    r
}

/// Squarefree factorization: pairs (g, multiplicity) with `a = Π g^m` (a monic).
pub fn squarefree_factorization(f: &Fp, a: &PolyP) -> Vec<(PolyP, usize)> {
    let a = pmonic(f, a);
    if pdeg(&a).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let d = pderiv(f, &a);
    if d.is_empty() {
        // a = b(x^p)
        let b: PolyP = a.iter().step_by(f.p as usize).copied().collect();
        for (g, m) in squarefree_factorization(f, &b) {
            out.push((g, m * f.p as usize));
        }
        return out;
    }
    let mut c = pgcd(f, &a, &d);
    let mut w = pdivrem(f, &a, &c).0;
    let mut i = 1;
    while pdeg(&w).unwrap_or(0) > 0 {
        let y = pgcd(f, &w, &c);
        let z = pdivrem(f, &w, &y).0;
        if pdeg(&z).unwrap_or(0) > 0 {
            out.push((pmonic(f, &z), i));
        }
        i += 1;
        w = y;
        c = pdivrem(f, &c, &w).0;
    }
    if pdeg(&c).unwrap_or(0) > 0 {
        // remaining part is a p-th power
        let b: PolyP = c.iter().step_by(f.p as usize).copied().collect();
        for (g, m) in squarefree_factorization(f, &b) {
            out.push((g, m * f.p as usize));
        }
    }
    out
}

/// Distinct-degree factorization of a squarefree monic polynomial:
/// pairs (product of all irreducible factors of degree j, j).
pub fn distinct_degree_factorization(f: &Fp, a: &PolyP) -> Vec<(PolyP, usize)> {
    let mut out = Vec::new();
    let mut rest = pmonic(f, a);
    let x: PolyP = vec![0, 1];
    let mut h = x.clone();
    let mut j = 0;
    while pdeg(&rest).unwrap_or(0) >= 2 * (j + 1) {
        j += 1;
        h = ppowmod(f, &h, f.p as u128, &rest);
        let g = pgcd(f, &psub(f, &h, &x), &rest);
        if pdeg(&g).unwrap_or(0) > 0 {
            out.push((g.clone(), j));
            rest = pdivrem(f, &rest, &g).0;
            h = pdivrem(f, &h, &rest).1;
        }
    }
    if pdeg(&rest).unwrap_or(0) > 0 {
        let dr = pdeg(&rest).unwrap();
        out.push((rest, dr));
    }
    out
}

/// Distinct roots in F_p of a polynomial that splits into distinct linear
/// factors, by Cantor–Zassenhaus (or exhaustive search for tiny p).
pub fn split_linear_roots<R: Rng>(f: &Fp, a: &PolyP, rng: &mut R) -> Vec<u64> {
    let a = pmonic(f, a);
    let n = pdeg(&a).unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    if f.p <= 64 {
        return (0..f.p)
            .filter(|&x| a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c)) == 0)
            .collect();
    }
    let mut out = Vec::new();
    let mut stack = vec![a];
    while let Some(g) = stack.pop() {
        let dg = pdeg(&g).unwrap_or(0);
        if dg == 0 {
            continue;
        }
        if dg == 1 {
            out.push(f.neg(g[0]));
            continue;
        }
        loop {
            let shift: u64 = rng.gen_range(0..f.p);
            let h = ppowmod(f, &vec![shift, 1], (f.p as u128 - 1) / 2, &g);
            let h1 = psub(f, &h, &vec![1]);
            let c = pgcd(f, &h1, &g);
            let dc = pdeg(&c).unwrap_or(0);
            if dc > 0 && dc < dg {
                let other = pdivrem(f, &g, &c).0;
                stack.push(c);
                stack.push(other);
                break;
            }
        }
    }
    out.sort_unstable();
    out
}
