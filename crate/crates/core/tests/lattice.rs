use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use proptest::prelude::*;
use restrictia::field::{inverse_different_basis, AlgNum, FieldData};
use restrictia::lattice::{e8_gram, theta_coefficients, totally_positive_of_trace, GramForm};
use restrictia::qseries;
use restrictia::scalar::rat_int;
use restrictia::Rational;

fn field(label: &str) -> Arc<FieldData> {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fields").join(format!("{label}.json"));
    FieldData::from_file(&p).unwrap()
}

fn brute_count(g: &[Vec<i64>], bound: i64, r: i64) -> usize {
    let n = g.len();
    let mut v = vec![-r; n];
    let mut count = 0;
    loop {
        let q: i64 = (0..n).map(|i| (0..n).map(|j| v[i] * g[i][j] * v[j]).sum::<i64>()).sum();
        if q < bound {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            v[i] += 1;
            if v[i] <= r {
                break;
            }
            v[i] = -r;
            i += 1;
        }
    }
}

/// L Lᵀ for a lower-triangular integer L with positive diagonal.
fn gram_from(entries: &[i64], n: usize) -> Vec<Vec<i64>> {
    let mut l = vec![vec![0i64; n]; n];
    let mut it = entries.iter();
    for i in 0..n {
        for j in 0..=i {
            let x = *it.next().unwrap();
            l[i][j] = if i == j { x.abs() % 3 + 1 } else { x };
        }
    }
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| l[i][k] * l[j][k]).sum()).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fincke_pohst_matches_box(entries in prop::collection::vec(-2i64..=2, 6), bound in 1i64..12) {
        let g = gram_from(&entries, 3);
        let gf: Vec<Vec<f64>> = g.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        let form = GramForm::new(gf).unwrap();
        // |v_i| ≤ ‖row i of L⁻ᵀ‖·√bound ≤ √41·√12 < 24
        let fp = form.enumerate_below(bound as f64 - 0.5).len();
        prop_assert_eq!(fp, brute_count(&g, bound, 24));
    }
}

#[test]
fn theta_series_of_small_lattices() {
    let e4 = qseries::e4(8);
    let theta = theta_coefficients(&e8_gram(), 7).unwrap();
    for n in 0..8 {
        assert_eq!(rat_int(theta[n] as i64), *e4.coeff(n), "n = {n}");
    }
    let a2 = vec![vec![2, -1], vec![-1, 2]];
    assert_eq!(theta_coefficients(&a2, 7).unwrap(), [1, 6, 0, 6, 6, 0, 0, 12]);
    assert!(theta_coefficients(&[vec![1, 0], vec![0, 2]], 3).is_err());
}

/// ν in the box of dual-basis coordinates, totally positive with trace l.
fn brute_totally_positive(f: &Arc<FieldData>, l: i64, r: i64) -> BTreeSet<Vec<Rational>> {
    let dual = inverse_different_basis(f);
    let d = f.degree();
    let mut out = BTreeSet::new();
    let mut c = vec![-r; d];
    loop {
        let mut nu = AlgNum::from_int(f, 0);
        for (ci, w) in c.iter().zip(&dual) {
            nu = nu.add(&w.scale(&rat_int(*ci))).unwrap();
        }
        if nu.trace() == rat_int(l) && nu.is_totally_positive().unwrap() {
            out.insert(nu.coords().to_vec());
        }
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            c[i] += 1;
            if c[i] <= r {
                break;
            }
            c[i] = -r;
            i += 1;
        }
    }
}

#[test]
fn trace_slices_match_box_search() {
    for (label, lmax, r) in [("2.2.5.1", 6, 30), ("2.2.13.1", 5, 30), ("3.3.49.1", 4, 12)] {
        let f = field(label);
        for l in 1..=lmax {
            let fast: BTreeSet<Vec<Rational>> = totally_positive_of_trace(&f, l).iter().map(|a| a.coords().to_vec()).collect();
            assert_eq!(fast, brute_totally_positive(&f, l, r), "{label}, l = {l}");
        }
    }
}
