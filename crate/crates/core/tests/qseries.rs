use proptest::prelude::*;
use restrictia::petersson::ramanujan_tau;
use restrictia::qseries::{
    bernoulli, combination, decompose, delta, dim_mk, divisor_sums, e4, e6, eisenstein, miller_basis, monomial_basis, QSeries,
};
use restrictia::scalar::{rat, rat_int};
use restrictia::{QSeriesQ, Rational};

const PREC: usize = 12;

fn series() -> impl Strategy<Value = QSeriesQ> {
    prop::collection::vec((-20i64..=20, 1i64..=6), PREC).prop_map(|c| QSeries::new(0, c.into_iter().map(|(p, q)| rat(p, q)).collect()))
}

proptest! {
    #[test]
    fn ring_laws(a in series(), b in series(), c in series()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.add(&b).unwrap().mul(&c), a.mul(&c).add(&b.mul(&c)).unwrap());
        prop_assert_eq!(a.mul(&QSeries::one(PREC)), a.clone());
        prop_assert_eq!(a.pow(3), a.mul(&a).mul(&a));
    }

    #[test]
    fn serialization_roundtrip(a in series()) {
        prop_assert_eq!(QSeriesQ::deserialize(&a.serialize()).unwrap(), a);
    }

    #[test]
    fn decompose_inverts_combination(coords in prop::collection::vec((-50i64..=50, 1i64..=9), 4), w in prop::sample::select(vec![36u32, 40, 44])) {
        let m = dim_mk(w as i64).unwrap();
        let mut x: Vec<Rational> = coords.into_iter().take(m).map(|(p, q)| rat(p, q)).collect();
        x.resize(m, rat_int(1));
        let basis = monomial_basis(w, m + 4).unwrap();
        prop_assert_eq!(decompose(&combination(&basis, &x), w).unwrap(), x);
    }
}

#[test]
fn eisenstein_identities() {
    let p = 30;
    assert!(e4(p).mul(&e4(p)).eq_up_to_prec(&eisenstein(8, p).unwrap()));
    assert!(e4(p).mul(&e6(p)).eq_up_to_prec(&eisenstein(10, p).unwrap()));
    assert!(e4(p).mul(&eisenstein(10, p).unwrap()).eq_up_to_prec(&eisenstein(14, p).unwrap()));
    let d = e4(p).pow(3).sub(&e6(p).pow(2)).unwrap().scale(&rat(1, 1728));
    assert_eq!(d, delta(p));
    // E_12 = E_4³ − (432000/691)Δ
    let want = vec![rat_int(1), rat(-432000, 691)];
    assert_eq!(decompose(&eisenstein(12, p).unwrap(), 12).unwrap(), want);
}

#[test]
fn delta_against_jacobi_product() {
    let n = 200;
    let tau = ramanujan_tau(n);
    let d = delta(n + 1);
    for i in 0..=n {
        assert_eq!(*d.coeff(i), rat_int(tau[i] as i64), "n = {i}");
    }
}

#[test]
fn small_constants() {
    assert_eq!(bernoulli(12), rat(-691, 2730));
    assert_eq!(bernoulli(1), rat(-1, 2));
    assert_eq!(divisor_sums(3, 7).iter().map(|x| x.to_string()).collect::<Vec<_>>(), ["0", "1", "9", "28", "73", "126", "252"]);
    let dims: Vec<usize> = [0, 2, 4, 6, 12, 14, 24, 26].iter().map(|&k| dim_mk(k).unwrap()).collect();
    assert_eq!(dims, [1, 0, 1, 1, 2, 1, 3, 2]);
    assert!(dim_mk(7).is_err());
    let m = miller_basis(24, 10).unwrap();
    for (i, f) in m.iter().enumerate() {
        for j in 0..3 {
            assert_eq!(*f.coeff(j), rat_int((i == j) as i64));
        }
    }
}

#[test]
fn float_view_matches() {
    let f = eisenstein(16, 10).unwrap().to_f64();
    let q = eisenstein(16, 10).unwrap();
    for n in 0..10 {
        let x = restrictia::scalar::rational_to_f64(q.coeff(n));
        assert!((f.coeff(n) - x).abs() <= 1e-12 * x.abs());
    }
}
