//! Exact-arithmetic construction and verification toolkit for modules over
//! untwisted affine Kac-Moody algebras.
//!
//! The crate builds the finite simple algebra `g`, its affinization
//! `g~ = (g (x) C[t, t^-1]) + CK + Cd`, evaluation modules, the one-point
//! and multi-point module families over the positive part, truncated
//! highest-weight and Whittaker inductions, tensor products and
//! `d`-extensions, all over arbitrary-precision rationals. On top of the
//! constructions sits an analysis layer that decides irreducibility,
//! computes annihilators and locally-finite closures, classifies
//! finite-dimensional modules over the positive part, and settles
//! isomorphism questions, each with an explicit certificate.
//!
//! Infinite-dimensional objects are represented by explicit truncations
//! with per-operator domain flags; an operator is only ever reported as
//! acting where its image is honestly contained in the truncation.

pub mod affine;
pub mod analysis;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod modules;
pub mod pbw;
pub mod poly;
pub mod rational;
pub mod report;

pub use affine::{
    affine_bracket, crt_decompose, evaluation_quotient_map, ideal_basis, npos_basis,
    verify_truncated_iso, AffineElement, NposBasis, PointConfiguration, PolynomialIdealBasis,
};
pub use lie::irrep::{build_irrep, weyl_dimension};
pub use lie::rep::{weight_decomposition, GenLabel, ModuleRep};
pub use lie::{
    bracket, build_simple_lie_algebra, killing_form, LieAlgebraData, Series, Weight,
};
pub use linalg::{
    algebra_closure, rref, solve_linear, spin, RationalMatrix, Subspace,
};
pub use poly::Poly;
pub use rational::Q;
