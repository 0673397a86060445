use std::path::PathBuf;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use restrictia::field::{inverse_different_basis, load_dir, AlgNum, FieldData};
use restrictia::scalar::rat_int;
use restrictia::{BigInt, Rational};

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fields")
}

fn field(label: &str) -> Arc<FieldData> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<FieldData>>>> = OnceLock::new();
    let mut map = CACHE.get_or_init(Default::default).lock().unwrap();
    map.entry(label.to_string())
        .or_insert_with(|| FieldData::from_file(&corpus().join(format!("{label}.json"))).unwrap())
        .clone()
}

#[test]
fn whole_corpus_loads_and_dual_basis_is_exact() {
    let t = std::time::Instant::now();
    let fields = load_dir(&corpus()).unwrap();
    eprintln!("loaded corpus in {:?}", t.elapsed());
    assert_eq!(fields.len(), 100);
    for f in &fields {
        let d = f.degree();
        let dual = inverse_different_basis(f);
        for i in 0..d {
            let mut e = vec![Rational::zero(); d];
            e[i] = Rational::one();
            let wi = AlgNum::new(f, e);
            for (j, wj) in dual.iter().enumerate() {
                assert_eq!(wi.mul(wj).unwrap().trace(), rat_int((i == j) as i64), "{}", f.label());
            }
        }
        // [d^{-1} : O] = D_F
        let idx = f.dual_basis_matrix().det().recip();
        assert_eq!(idx, Rational::from_integer(f.disc().clone()), "{}", f.label());
    }
}

#[test]
fn quartic_725_charpoly_matches_embeddings() {
    let f = field("4.4.725.1");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let c: Vec<i64> = (0..4).map(|_| rng.gen_range(-5..=5)).collect();
        let a = AlgNum::from_ints(&f, &c);
        let cp = a.charpoly();
        let emb = a.embeddings_f64();
        // power sums from embeddings vs Newton from charpoly: compare trace and norm
        let tr: f64 = emb.iter().sum();
        let nm: f64 = emb.iter().product();
        assert!((tr - restrictia::scalar::rational_to_f64(&a.trace())).abs() < 1e-9);
        assert!((nm - restrictia::scalar::rational_to_f64(&a.norm())).abs() < 1e-6 * (1.0 + nm.abs()));
        assert_eq!(cp.degree(), Some(4));
    }
}

#[test]
fn mul_matches_polynomial_arithmetic() {
    let f = FieldData::real_quadratic(5).unwrap();
    let t = AlgNum::generator(&f);
    let one = AlgNum::one(&f);
    let lhs = one.add(&t).unwrap().mul(&one.sub(&t).unwrap()).unwrap();
    // (1+θ)(1−θ) = 1 − θ² = 1 − (θ + 1) = −θ
    assert_eq!(lhs, t.neg());
    assert_eq!(t.mul(&one).unwrap(), t);
    let q = FieldData::rationals();
    assert_eq!(q.disc(), &BigInt::from(1));
    assert!(t.mul(&AlgNum::one(&q)).is_err());
}

fn small_vec(d: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-6i64..=6, d)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn trace_additive_norm_multiplicative(a in small_vec(5), b in small_vec(5)) {
        let f = field("5.5.14641.1");
        let x = AlgNum::from_ints(&f, &a);
        let y = AlgNum::from_ints(&f, &b);
        prop_assert_eq!(x.add(&y).unwrap().trace(), x.trace() + y.trace());
        prop_assert_eq!(x.mul(&y).unwrap().norm(), x.norm() * y.norm());
    }

    #[test]
    fn positivity_agrees_with_embeddings(a in small_vec(4)) {
        prop_assume!(a.iter().any(|&c| c != 0));
        let f = field("4.4.725.1");
        let x = AlgNum::from_ints(&f, &a);
        let balls = x.embeddings_ball(f.embeddings());
        // every ball is far from zero at this precision unless the value is zero
        let numeric = balls.iter().all(|b| b.mid > b.rad);
        prop_assert_eq!(x.is_totally_positive().unwrap(), numeric);
    }
}
