use approx::assert_abs_diff_eq;
use ndarray as nd;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qgl_core::numkit::{self, c, CMat, Picture, Superoperator};

mod common;

#[test]
fn matrix_exp_matches_eigendecomposition() {
    let h = numkit::random_hermitian(5, 42);
    let (vals, vecs) = numkit::eig_hermitian(&h).unwrap();
    let mut diag = CMat::zeros((5, 5));
    for (i, &v) in vals.iter().enumerate() {
        diag[[i, i]] = c(v.exp(), 0.0);
    }
    let oracle = vecs.dot(&diag).dot(&numkit::dagger(&vecs));
    let got = numkit::matrix_exp(&h);
    assert!(numkit::max_abs(&(&got - &oracle)) < 1e-11);
}

#[test]
fn matrix_exp_of_nilpotent_block() {
    let m = nd::array![[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
    let e = numkit::matrix_exp(&m);
    assert_abs_diff_eq!(e[[0, 1]].re, 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(e[[0, 0]].re, 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(e[[1, 0]].re, 0.0, epsilon = 1e-14);
}

#[test]
fn vectorize_matches_sandwich_product() {
    let a = numkit::random_hermitian(3, 1);
    let b = numkit::random_hermitian(3, 2);
    let x = numkit::random_hermitian(3, 3);
    let s = numkit::vectorize(&[(c(1.0, 0.0), a.clone(), b.clone())]).unwrap();
    let lhs = numkit::unvec(&s.dot(&numkit::vec_mat(&x)), 3);
    let rhs = a.dot(&x).dot(&b);
    assert!(numkit::max_abs(&(&lhs - &rhs)) < 1e-12);
}

#[test]
fn partial_trace_of_product_state() {
    let mut rho_a = CMat::zeros((2, 2));
    rho_a[[0, 0]] = c(0.7, 0.0);
    rho_a[[1, 1]] = c(0.3, 0.0);
    rho_a[[0, 1]] = c(0.1, 0.05);
    rho_a[[1, 0]] = c(0.1, -0.05);
    let mut rho_b = CMat::zeros((2, 2));
    rho_b[[0, 0]] = c(0.4, 0.0);
    rho_b[[1, 1]] = c(0.6, 0.0);
    let joint = numkit::kron(&rho_a, &rho_b);
    let back_a = numkit::partial_trace(&joint, &[0], 2).unwrap();
    let back_b = numkit::partial_trace(&joint, &[1], 2).unwrap();
    assert!(numkit::max_abs(&(&back_a - &rho_a)) < 1e-13);
    assert!(numkit::max_abs(&(&back_b - &rho_b)) < 1e-13);
}

#[test]
fn eigendecomposition_is_descending_and_orthonormal() {
    let h = numkit::random_hermitian(6, 9);
    let (vals, vecs) = numkit::eig_hermitian(&h).unwrap();
    for w in vals.windows(2) {
        assert!(w[0] >= w[1] - 1e-12);
    }
    let gram = numkit::dagger(&vecs).dot(&vecs);
    assert!(numkit::max_abs(&(&gram - &numkit::identity(6))) < 1e-12);
}

#[test]
fn trace_norm_of_rank_one() {
    let m = nd::array![[c(3.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
    assert_abs_diff_eq!(numkit::trace_norm(&m), 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(numkit::op_norm(&m), 3.0, epsilon = 1e-12);
}

#[test]
fn matrix_power_inverts_square() {
    let h = numkit::random_hermitian(4, 5);
    let shifted = &h.dot(&h) + &numkit::identity(4); // positive definite
    let root = numkit::matrix_power(&shifted, 0.5).unwrap();
    assert!(numkit::max_abs(&(&root.dot(&root) - &shifted)) < 1e-11);
    let inv = numkit::matrix_power(&shifted, -1.0).unwrap();
    assert!(numkit::max_abs(&(&inv.dot(&shifted) - &numkit::identity(4))) < 1e-10);
}

#[test]
fn superoperator_adjoint_is_hilbert_schmidt_dual() {
    let l = common::depolarizer();
    let a = numkit::random_hermitian(2, 11);
    let b = numkit::random_hermitian(2, 12);
    let ladj = l.adjoint();
    let lhs = numkit::trace(&numkit::dagger(&a).dot(&l.apply(&b)));
    let rhs = numkit::trace(&numkit::dagger(&ladj.apply(&a)).dot(&b));
    assert!((lhs - rhs).norm() < 1e-12);
}

#[test]
fn superoperator_norms_bound_each_other() {
    let l = common::depolarizer();
    let n22 = numkit::superop_norm_22(&l);
    let n11 = numkit::superop_norm_11_lb(&l, 100, 3);
    // The sampled 1-1 value is a lower bound on the true 1-1 norm, which for
    // a 2x2 system is within a dimensional factor of the 2-2 norm.
    assert!(n11 <= 2.0 * n22 + 1e-9);
    assert!(n11 > 0.1);
}

#[test]
fn zero_superoperator_annihilates() {
    let z = Superoperator::zero(3, Picture::Schrodinger);
    let x = numkit::random_hermitian(3, 7);
    assert!(numkit::max_abs(&z.apply(&x)) == 0.0);
}

fn arb_unit_complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dagger_is_an_involution(seed in 0u64..1000) {
        let h = numkit::random_hermitian(4, seed);
        let skew = &h - &numkit::dagger(&h).mapv(|z| z * 2.0);
        prop_assert!(numkit::max_abs(&(&numkit::dagger(&numkit::dagger(&skew)) - &skew)) == 0.0);
    }

    #[test]
    fn vec_unvec_roundtrip(entries in proptest::collection::vec(arb_unit_complex(), 9)) {
        let m = CMat::from_shape_vec((3, 3), entries).unwrap();
        let back = numkit::unvec(&numkit::vec_mat(&m), 3);
        prop_assert!(numkit::max_abs(&(&back - &m)) == 0.0);
    }

    #[test]
    fn partial_trace_preserves_trace(seed in 0u64..1000) {
        let h = numkit::random_hermitian(4, seed);
        let rho = {
            let sq = numkit::dagger(&h).dot(&h);
            let t = numkit::trace(&sq).re;
            sq.mapv(|z| z / t)
        };
        let reduced = numkit::partial_trace(&rho, &[0], 2).unwrap();
        prop_assert!((numkit::trace(&reduced).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_is_submultiplicative(s1 in 0u64..500, s2 in 500u64..1000) {
        let a = numkit::random_hermitian(3, s1);
        let b = numkit::random_hermitian(3, s2);
        let prod = numkit::op_norm(&a.dot(&b));
        prop_assert!(prod <= numkit::op_norm(&a) * numkit::op_norm(&b) + 1e-10);
    }
}
