mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use weyl_scatter_core::models::{ConstantModel, DiracModel, FreeHalfLineModel, MatrixSchrodingerModel, PointInteractionModel};
use weyl_scatter_core::weyl::{branch_sqrt, derivative, eval_boundary, eval_boundary_epsilon, eval_upper, validate_nevanlinna};
use weyl_scatter_core::{CMatrix, Complex64, Potential, WeylFunction, WeylModel};

fn shipped_models() -> Vec<WeylModel<f64>> {
    let well = Potential::ConstantWell {
        depth: CMatrix::from_real_diag(&[1.0, -0.5]),
        radius: 1.0,
    };
    let expo = Potential::Exponential {
        amplitude: CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.5)], vec![c(0.0, -0.5), c(-1.0, 0.0)]]).unwrap(),
        rate: 2.0,
    };
    vec![
        WeylModel::Free(FreeHalfLineModel::new(2).unwrap()),
        WeylModel::Schrodinger(MatrixSchrodingerModel::new(well, None, 1e-8).unwrap()),
        WeylModel::Schrodinger(MatrixSchrodingerModel::new(expo, None, 1e-8).unwrap()),
        WeylModel::Dirac(DiracModel::new(1.0).unwrap()),
        WeylModel::PointInteraction(PointInteractionModel::new(WeylModel::Free(FreeHalfLineModel::new(3).unwrap()))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn branch_sqrt_is_a_root(re in -1e3f64..1e3, im in -1e3f64..1e3) {
        let z = c(re, im);
        let r = branch_sqrt(z);
        prop_assert!((r * r - z).norm() <= 8.0 * f64::EPSILON * z.norm().max(1e-300));
        prop_assert!(r.im > 0.0 || (im == 0.0 && re >= 0.0 && r.im == 0.0));
    }
}

#[test]
fn shipped_models_are_nevanlinna() {
    let mut g = rng(7);
    let grid: Vec<Complex64> = (0..100).map(|_| c(g.gen_range(-20.0..40.0), g.gen_range(0.05..10.0))).collect();
    for model in shipped_models() {
        let report = validate_nevanlinna(&model, &grid);
        assert!(report.passed(), "{}: {:?}", model.kind(), report.violations.first());
        assert!(report.min_eigenvalue > 0.0);
    }
}

#[test]
fn corrupted_model_flagged_everywhere() {
    let grid = [c(0.0, 1.0), c(1.0, 1.0), c(-3.0, 2.0)];
    for model in shipped_models() {
        let bad = WeylModel::Conjugated(Box::new(model));
        let report = validate_nevanlinna(&bad, &grid);
        let points: std::collections::HashSet<_> = report.violations.iter().map(|v| v.point.re.to_bits() ^ v.point.im.to_bits()).collect();
        assert_eq!(points.len(), grid.len());
    }
}

#[test]
fn direct_and_epsilon_limits_agree() {
    for model in shipped_models() {
        let sing = model.singular_points();
        let grid = grid_avoiding(-6.0, 30.0, 50, &sing, 0.05);
        for &l in &grid {
            if model.kind() == "schrodinger" && l < 0.0 {
                // pole set below zero is not declared, compare only on the continuum
                continue;
            }
            let direct = eval_boundary(&model, l).unwrap();
            let (limit, _) = eval_boundary_epsilon(&model, l, 1e-4).unwrap_or_else(|e| panic!("{} λ={l}: {e}", model.kind()));
            let scale = direct.norm_fro().max(1.0);
            assert!(direct.max_abs_diff(&limit) < 1e-6 * scale, "{} λ={l}: {:e}", model.kind(), direct.max_abs_diff(&limit));
        }
    }
}

#[test]
fn evaluation_examples() {
    let free = FreeHalfLineModel::new(1).unwrap();
    let m = eval_upper(&free, c(0.0, 1.0)).unwrap();
    assert!((m[(0, 0)] - Complex64::from_polar(1.0, 0.75 * std::f64::consts::PI)).norm() < 1e-15);
    assert_eq!(eval_boundary(&free, 4.0).unwrap()[(0, 0)], c(0.0, 2.0));
    assert_eq!(eval_boundary(&free, -4.0).unwrap()[(0, 0)], c(-2.0, 0.0));

    let dirac = DiracModel::new(1.0).unwrap();
    let m = eval_upper(&dirac, c(0.0, 1.0)).unwrap();
    let (d1, d2) = dirac_entries(1.0, c(0.0, 1.0));
    assert!(m.max_abs_diff(&CMatrix::from_diag(&[d1, d2])) < 1e-15);
    assert_eq!(eval_boundary(&dirac, 0.5).unwrap().imag_part().max_abs(), 0.0);

    let point = PointInteractionModel::new(WeylModel::Free(FreeHalfLineModel::new(2).unwrap()));
    let m = eval_upper(&point, c(0.0, 1.0)).unwrap();
    let expected = Complex64::i() * Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4) + 1.0;
    assert!(m.max_abs_diff(&CMatrix::scalar(2, expected)) < 1e-15);
}

#[test]
fn derivative_matches_analytic() {
    let free = FreeHalfLineModel::new(1).unwrap();
    let dirac = DiracModel::new(1.0).unwrap();
    let mut g = rng(11);
    for _ in 0..50 {
        let z = c(g.gen_range(-5.0..5.0), g.gen_range(0.5..5.0));
        let h = 1e-5 * z.norm().max(1.0);
        let d = derivative(&free, z, h).unwrap()[(0, 0)];
        let exact = Complex64::i() / (2.0 * upper_sqrt(z));
        assert!((d - exact).norm() < 1e-6 * exact.norm().max(1.0));

        let d = derivative(&dirac, z, h).unwrap();
        // d/dz i√((z+1)/(z-1)) = -i / ((z-1)² √((z+1)/(z-1))) = -i / ((z-1)^{3/2} (z+1)^{1/2}) with the cut roots
        let (p, m) = (upper_sqrt(z + 1.0), upper_sqrt(z - 1.0));
        let d1 = -Complex64::i() / (m * m * m * p);
        let d2 = Complex64::i() / (p * p * p * m);
        assert!((d[(0, 0)] - d1).norm() < 1e-6 * d1.norm().max(1.0), "{z}");
        assert!((d[(1, 1)] - d2).norm() < 1e-6 * d2.norm().max(1.0), "{z}");
    }
    let constant = ConstantModel { value: CMatrix::scalar(2, c(3.0, 1.0)) };
    assert_eq!(derivative(&constant, c(0.0, 1.0), 1e-5).unwrap().max_abs(), 0.0);
}
