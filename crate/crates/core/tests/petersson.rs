use std::path::PathBuf;
use std::sync::Arc;

use proptest::prelude::*;
use restrictia::field::FieldData;
use restrictia::petersson::{
    big_c_k, c_k, delta_norm, deligne_violation, inner_product_d3, niemeier_gap, petersson_norm_numeric, pq_ratio, ramanujan_tau,
    InnerProductOptions, PeterssonError,
};
use restrictia::qseries::{delta, eisenstein};

fn field(label: &str) -> Arc<FieldData> {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fields").join(format!("{label}.json"));
    FieldData::from_file(&p).unwrap()
}

proptest! {
    #[test]
    fn pq_ratio_is_symmetric(xs in prop::collection::vec(0.3f64..3.0, 3), signs in prop::collection::vec(any::<bool>(), 3), l in 0u32..4) {
        let xs: Vec<f64> = xs.iter().zip(&signs).map(|(x, s)| if *s { -x } else { *x }).collect();
        let a = pq_ratio(4, l, &xs).unwrap();
        for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
            let ys: Vec<f64> = perm.iter().map(|&i| xs[i]).collect();
            let b = pq_ratio(4, l, &ys).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn pq_ratio_at_order_zero(xs in prop::collection::vec(0.3f64..3.0, 2)) {
        let want = (xs[0] * xs[1]).powi(-6);
        prop_assert!((pq_ratio(6, 0, &xs).unwrap() - want).abs() <= 1e-12 * want);
    }
}

#[test]
fn pq_ratio_first_derivative() {
    // (∂_x + ∂_y)(x y)^{−2}
    let (x, y) = (1.5f64, -0.7f64);
    let want = -2.0 * (x * y).powi(-2) * (1.0 / x + 1.0 / y);
    assert!((pq_ratio(2, 1, &[x, y]).unwrap() - want).abs() < 1e-12);
    assert!(matches!(pq_ratio(4, 4, &[x, y]), Err(PeterssonError::BadOrder { .. })));
    assert!(matches!(pq_ratio(4, 1, &[x, 0.0]), Err(PeterssonError::ZeroCoordinate(1))));
}

#[test]
fn ramanujan_tau_obeys_deligne() {
    let tau = ramanujan_tau(100_000);
    assert_eq!(&tau[1..7], &[1, -24, 252, -1472, 4830, -6048]);
    assert_eq!(deligne_violation(&tau), None);
    // multiplicative at coprime arguments
    assert_eq!(tau[6], tau[2] * tau[3]);
    assert_eq!(tau[35], tau[5] * tau[7]);
}

#[test]
fn eisenstein_is_orthogonal_to_delta() {
    let dn = delta_norm(1e-12).unwrap();
    assert!((dn.value - 1.035362e-6).abs() < 1e-12, "{dn:?}");
    let e12 = eisenstein(12, 60).unwrap().to_f64();
    let d = delta(60).to_f64();
    let x = petersson_norm_numeric(&e12, &d, 1e-12).unwrap();
    assert!(x.value.abs() < 1e-10, "{x:?}");
    assert!(matches!(petersson_norm_numeric(&e12, &e12, 1e-6), Err(PeterssonError::NotCuspidal)));
}

#[test]
fn class_sum_converges_in_fourier_terms() {
    let f = field("3.3.49.1");
    let tau: Vec<f64> = ramanujan_tau(20_000).into_iter().map(|t| t as f64).collect();
    let run = |n| inner_product_d3(&f, 4, &tau, &InnerProductOptions { max_index: 12, n_terms: n, tol: 1e-2 }).unwrap();
    let (a1, b1) = run(5_000);
    let (a2, b2) = run(10_000);
    for (x, y) in [(a1, a2), (b1, b2)] {
        assert!((x.value - y.value).norm() <= x.tail_bound, "{x:?} {y:?}");
        assert!(y.tail_bound <= x.tail_bound);
        assert!(y.value.im.abs() < 1e-10, "{y:?}");
    }
    assert!(matches!(
        inner_product_d3(&f, 4, &tau[..100], &InnerProductOptions { max_index: 12, n_terms: 200, tol: 1e-2 }),
        Err(PeterssonError::TooFewCoefficients { .. })
    ));
}

#[test]
fn weight_four_constants() {
    let big = big_c_k(4).unwrap();
    assert!(big > 0.0 && big < 5.79, "C_4 = {big}");
    assert!(c_k(4).unwrap() > 0.0);
    let (gap, at) = niemeier_gap(delta_norm(1e-12).unwrap().value);
    assert_eq!(at, "A3^8");
    assert!(gap > 1e-6 && gap < 1.3e-6, "{gap}");
}
