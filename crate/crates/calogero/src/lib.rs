//! Spin Calogero models associated with dynamical r-matrices on self-dual
//! Lie algebras.
//!
//! The crate builds matrix realizations of the classical Lie algebras with
//! Chevalley bases (`liealg`), evaluates rational and trigonometric dynamical
//! r-matrices together with their defining algebraic identities (`rmatrix`),
//! sets up the spin Calogero phase space, quasi-Lax operator and equations of
//! motion (`dynamics`), and solves the dynamics by two independent methods,
//! exact projection of geodesic motion and direct Runge-Kutta integration,
//! cross-checked on gauge-invariant observables (`solver`). The `models`
//! module is the catalogue of ready-made split/compact, folded and cyclic
//! models with their closed-form Hamiltonians, and `cli` drives batch runs.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod liealg;
pub mod linalg;
pub mod models;
pub mod rmatrix;
pub mod solver;

pub use error::{Error, Result};

/// Complex scalar used by matrix realizations.
pub type C64 = num_complex::Complex<f64>;
/// Matrix realization of algebra and group elements.
pub type Realization = nalgebra::DMatrix<C64>;
/// Real linear operator on the algebra, expressed in the model basis.
pub type OpMatrix = nalgebra::DMatrix<f64>;
/// Coefficient vector of an algebra element in the model basis.
pub type CoeffVec = nalgebra::DVector<f64>;
