use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use restrictia::cubic::{
    a_beta_from_ratio, automorphisms, delone_faddeev_order, enumerate_cusp_classes, enumerate_suborders, eta_coefficients,
    form_from_beta, forms_with_reduced_hessian, multiplicity_table, reduce, sl2_mul, CubicError, CubicForm, Sl2,
};
use restrictia::field::{AlgNum, FieldData};
use restrictia::scalar::rat;
use restrictia::BigInt;

fn field(label: &str) -> Arc<FieldData> {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fields").join(format!("{label}.json"));
    FieldData::from_file(&p).unwrap()
}

const MAX_DISC: i128 = 5000;
const BOX: i64 = 10;

fn in_box(f: &CubicForm) -> bool {
    [f.a, f.b, f.c, f.d].iter().all(|x| x.abs() <= BOX)
}

#[test]
fn hessian_enumeration_matches_box_sweep() {
    let mut naive: BTreeMap<i128, BTreeSet<CubicForm>> = BTreeMap::new();
    for a in (-BOX..=BOX).filter(|&a| a != 0) {
        for b in -BOX..=BOX {
            for c in -BOX..=BOX {
                for d in -BOX..=BOX {
                    let f = CubicForm::new(a, b, c, d);
                    let disc = f.disc();
                    if disc > 0 && disc <= MAX_DISC && f.hessian().is_reduced() {
                        naive.entry(disc).or_default().insert(f);
                    }
                }
            }
        }
    }
    for disc in 1..=MAX_DISC {
        let fast = forms_with_reduced_hessian(disc);
        for f in &fast {
            assert_eq!(f.disc(), disc);
            assert!(f.hessian().is_reduced(), "{f}");
        }
        let fast_box: BTreeSet<CubicForm> = fast.into_iter().filter(in_box).collect();
        assert_eq!(fast_box, naive.remove(&disc).unwrap_or_default(), "disc {disc}");
    }
}

fn random_sl2(rng: &mut impl Rng) -> Sl2 {
    let mut g: Sl2 = [[1, 0], [0, 1]];
    for _ in 0..rng.gen_range(1..6) {
        let t = rng.gen_range(-3..=3);
        g = sl2_mul(&g, &[[1, t], [0, 1]]);
        if rng.gen_bool(0.5) {
            g = sl2_mul(&g, &[[0, -1], [1, 0]]);
        }
    }
    g
}

#[test]
fn reduction_is_a_class_invariant() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let seeds = [CubicForm::new(1, -1, -2, 1), CubicForm::new(1, 0, -3, 1), CubicForm::new(-1, -1, 5, 1), CubicForm::new(2, 1, -4, -1)];
    let mut done = 0;
    while done < 500 {
        let f = seeds[done % seeds.len()];
        let g = random_sl2(&mut rng);
        let Ok(h) = f.act(&g) else { continue };
        assert_eq!(h.disc(), f.disc(), "{f} ∘ {g:?}");
        let (rf, _) = reduce(&f).unwrap();
        let (rh, gamma) = reduce(&h).unwrap();
        assert_eq!(rf, rh, "{f} ∘ {g:?}");
        assert_eq!(h.act(&gamma).unwrap(), rh);
        assert!(rh.hessian().is_reduced());
        done += 1;
    }
}

#[test]
fn form_from_beta_examples() {
    let f = field("3.3.49.1");
    let theta = AlgNum::generator(&f);
    let (form, a) = form_from_beta(&theta).unwrap();
    assert_eq!(form, CubicForm::new(1, -1, -2, 1));
    assert_eq!(a, BigInt::from(1));
    let (shifted, a7) = form_from_beta(&theta.add(&AlgNum::from_int(&f, 7)).unwrap()).unwrap();
    assert_eq!(a7, BigInt::from(1));
    assert_eq!(shifted.disc(), form.disc());
    let half = theta.scale(&rat(1, 2));
    let (hf, a2) = form_from_beta(&half).unwrap();
    assert_eq!(hf, CubicForm::new(8, -4, -4, 1));
    assert_eq!(a2, BigInt::from(8));
    assert_eq!(a_beta_from_ratio(&AlgNum::from_int(&f, 2), &theta).unwrap(), BigInt::from(8));
    assert!(matches!(form_from_beta(&AlgNum::from_int(&f, 3)), Err(CubicError::NotGenerating)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leading_coefficient_by_both_routes(c in prop::collection::vec(-5i64..=5, 3), d in prop::collection::vec(-5i64..=5, 3), lambda in prop::collection::vec(-3i64..=3, 3)) {
        let f = field(["3.3.49.1", "3.3.148.1"][(c[0].unsigned_abs() % 2) as usize]);
        let (c, d) = (AlgNum::from_ints(&f, &c), AlgNum::from_ints(&f, &d));
        prop_assume!(!c.is_zero());
        let beta = d.div(&c).unwrap();
        let Ok((form, a)) = form_from_beta(&beta) else { return Ok(()) };
        prop_assert_eq!(&a_beta_from_ratio(&c, &d).unwrap(), &a);
        prop_assert!(form.eval_at(&beta).unwrap().is_zero());
        // the ratio only depends on β: rescale numerator and denominator by λ
        let lam = AlgNum::from_ints(&f, &lambda);
        prop_assume!(!lam.is_zero());
        prop_assert_eq!(a_beta_from_ratio(&c.mul(&lam).unwrap(), &d.mul(&lam).unwrap()).unwrap(), a);
    }
}

#[test]
fn delone_faddeev_orders() {
    let f = field("3.3.148.1");
    let form = CubicForm::new(-1, -1, 5, 1);
    let classes = enumerate_cusp_classes(&f, 2).unwrap();
    let c = classes.iter().find(|c| c.form == form).expect("index 2 class");
    let o = delone_faddeev_order(&form, &c.beta).unwrap();
    assert_eq!(o.index, 2);
    assert_eq!(form.disc(), 148 * 4);
    assert_eq!(o.basis[0], AlgNum::one(&f));
    assert!(matches!(delone_faddeev_order(&form, &AlgNum::from_int(&f, 1)), Err(CubicError::NotARoot)));
    for cl in enumerate_cusp_classes(&f, 6).unwrap() {
        let o = delone_faddeev_order(&cl.form, &cl.beta).unwrap();
        assert_eq!(o.index, cl.order_index);
        assert!(cl.form.eval_at(&cl.beta).unwrap().is_zero());
        let emb = cl.beta.embeddings_f64();
        let mut a = emb.clone();
        let mut b = cl.embeddings.clone();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn galois_and_non_galois_fields() {
    let cyclic = field("3.3.49.1");
    assert_eq!(automorphisms(&cyclic).unwrap().len(), 3);
    let reduced = reduce(&CubicForm::new(1, -1, -2, 1)).unwrap().0;
    // an order-3 rotation of the roots plus ±1
    assert_eq!(reduced.stabilizer().len(), 6);
    assert_eq!(automorphisms(&field("3.3.148.1")).unwrap().len(), 1);
}

#[test]
fn eta_counts_suborders() {
    for label in ["3.3.49.1", "3.3.81.1", "3.3.148.1", "3.3.229.1"] {
        let f = field(label);
        let eta = eta_coefficients(&f, 20).unwrap();
        let subs = enumerate_suborders(&f, 20).unwrap();
        for m in 1..=20u64 {
            assert_eq!(eta[m as usize], subs.iter().filter(|s| s.index() == m).count() as u64, "{label}, m = {m}");
        }
    }
}

#[test]
fn classes_follow_primitive_orders() {
    for label in ["3.3.49.1", "3.3.148.1", "3.3.257.1"] {
        let f = field(label);
        let classes = enumerate_cusp_classes(&f, 8).unwrap();
        for row in multiplicity_table(&f, &classes, 8).unwrap() {
            assert!(row.matches_primitive_rule(), "{label}: {row:?}");
            assert!(row.classes as u64 <= 2 * row.aut_order as u64 * row.orders, "{label}: {row:?}");
        }
    }
}
