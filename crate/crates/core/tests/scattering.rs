mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use weyl_scatter_core::models::dirac_m;
use weyl_scatter_core::scattering::{
    dirac_theta_recovery, range_projection, smatrix, smatrix_factorized, smatrix_scalar_type, RANK_TOL,
};
use weyl_scatter_core::{BoundaryParameter, CMatrix, Complex64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unitary_and_block_structure(seed in any::<u64>(), n in 1usize..=4, kill in 0usize..=2) {
        let mut g = rng(seed);
        // Im M of reduced rank: P = B B* with B of width n - kill
        let width = n.saturating_sub(kill).max(1);
        let b = CMatrix::from_fn(n, width, |_, _| c(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0)));
        let p = &b * &b.adjoint();
        let m = &random_hermitian(&mut g, n, 2.0) + &p.scale(Complex64::i());
        let theta = BoundaryParameter::matrix(random_hermitian(&mut g, n, 2.0)).unwrap();
        let sp = smatrix(1.0, &m, &theta, RANK_TOL).unwrap();
        prop_assume!(sp.cond < 1e10 && !sp.rank_ambiguous);
        prop_assert_eq!(sp.rank, width.min(n));
        prop_assert!(sp.s_reduced.unitarity_defect() <= 1e-10);
        prop_assert!(((sp.det_s.norm()) - 1.0).abs() <= 1e-10);
        // S_full fixes ker Im M
        let (r, v) = range_projection(&m.imag_part(), RANK_TOL).unwrap();
        prop_assert_eq!(r, sp.rank);
        let projector = &v * &v.adjoint();
        let kernel = &CMatrix::identity(n) - &projector;
        let moved = &(&sp.s_full * &kernel) - &kernel;
        prop_assert!(moved.max_abs() <= 1e-12);
        let det_full = sp.s_full.det().unwrap();
        prop_assert!((det_full - sp.det_s).norm() <= 1e-10);
    }

    #[test]
    fn unperturbed_gives_identity(seed in any::<u64>(), n in 1usize..=4) {
        let m = random_nevanlinna_value(&mut rng(seed), n);
        let sp = smatrix(0.0, &m, &BoundaryParameter::unperturbed(n), RANK_TOL).unwrap();
        prop_assert_eq!(sp.s_full, CMatrix::identity(n));
    }

    #[test]
    fn scalar_type_agreement(seed in any::<u64>(), n in 1usize..=4) {
        let mut g = rng(seed);
        let mval = c(g.gen_range(-3.0..3.0), g.gen_range(0.05..3.0));
        let theta = BoundaryParameter::matrix(random_hermitian(&mut g, n, 2.0)).unwrap();
        let sp = smatrix(1.0, &CMatrix::scalar(n, mval), &theta, RANK_TOL).unwrap();
        let st = smatrix_scalar_type(mval, &theta, n).unwrap();
        prop_assume!(sp.cond < 1e8);
        prop_assert!(sp.s_full.max_abs_diff(&st) <= 1e-12 * sp.cond.max(1.0));
    }

    #[test]
    fn factorized_form_is_similar(seed in any::<u64>(), n in 1usize..=4) {
        let mut g = rng(seed);
        let m = random_nevanlinna_value(&mut g, n);
        let theta = BoundaryParameter::matrix(random_hermitian(&mut g, n, 2.0)).unwrap();
        let sp = smatrix(1.0, &m, &theta, RANK_TOL).unwrap();
        prop_assume!(sp.cond < 1e6 && sp.rank == n);
        let f = smatrix_factorized(&m, &theta).unwrap();
        let d = max_diff(&power_traces(&f), &power_traces(&sp.s_reduced));
        prop_assert!(d <= 1e-9, "{d:e}");
    }
}

#[test]
fn free_scalar_examples() {
    let theta2 = BoundaryParameter::matrix(CMatrix::scalar(1, c(2.0, 0.0))).unwrap();
    let sp = smatrix(4.0, &CMatrix::scalar(1, c(0.0, 2.0)), &theta2, RANK_TOL).unwrap();
    assert!((sp.s_reduced[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
    let neumann = BoundaryParameter::matrix(CMatrix::zeros(1, 1)).unwrap();
    for l in [0.01, 1.0, 1e4] {
        let sp = smatrix(l, &CMatrix::scalar(1, c(0.0, f64::sqrt(l))), &neumann, RANK_TOL).unwrap();
        assert!((sp.s_full[(0, 0)] + 1.0).norm() < 1e-14);
    }
}

#[test]
fn dirac_factorized_and_reduced_agree() {
    let m = dirac_m(1.0, c(5.0, 0.0)).unwrap();
    let theta = BoundaryParameter::matrix(CMatrix::from_real_diag(&[1.0, 1.0])).unwrap();
    let sp = smatrix(5.0, &m, &theta, RANK_TOL).unwrap();
    assert!(smatrix_factorized(&m, &theta).unwrap().max_abs_diff(&sp.s_full) < 1e-10);
}

#[test]
fn dirac_recovery_at_high_energy() {
    let mut g = rng(99);
    for _ in 0..20 {
        let t = random_hermitian(&mut g, 2, 3.0);
        let theta = BoundaryParameter::matrix(t.clone()).unwrap();
        let sp = smatrix(1e8, &dirac_m(1.0, c(1e8, 0.0)).unwrap(), &theta, RANK_TOL).unwrap();
        let est = dirac_theta_recovery(&sp.s_full).unwrap();
        assert!(est.max_abs_diff(&t) < 1e-3);
    }
}
