//! Scattering matrices and spectral shift functions for selfadjoint
//! extensions with finite deficiency, computed from the matrix Weyl function
//! `M(λ)` of a boundary triplet.
//!
//! Everything numerical is generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix `f64`, which is what the tolerances assume.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cxlinalg;
pub mod models;
pub mod quadrature;
pub mod relation;
pub mod scalar;
pub mod scattering;
pub mod ssf;
pub mod weyl;

pub use num_complex::Complex64;

pub use cxlinalg::{LinalgError, Matrix};
pub use models::{asymptotic_check, Potential, WeylModel};
pub use quadrature::QuadratureConfig;
pub use relation::{BoundaryParameter, RelationError};
pub use scattering::{ScatteringError, ScatteringPoint};
pub use ssf::{evaluate_point, PointEvaluation, Regime, SsfError, SsfPoint};
pub use weyl::{WeylError, WeylFunction};

pub type CMatrix = Matrix<f64>;
pub type Model = WeylModel<f64>;
pub type Theta = BoundaryParameter<f64>;
pub type Scattering = ScatteringPoint<f64>;
pub type Ssf = SsfPoint<f64>;
pub type Quad = QuadratureConfig<f64>;
pub type DiracModel = models::DiracModel<f64>;
pub type SchrodingerModel = models::MatrixSchrodingerModel<f64>;
pub type PointInteractionModel = models::PointInteractionModel<f64>;
