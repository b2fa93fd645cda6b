//! Exact computation with graded PI-algebras.
//!
//! The crate is `no_std` and only needs `alloc`. It provides the free graded
//! algebra ([`poly`]), exact rational linear algebra ([`linalg`]),
//! structure-constant algebras with gradings ([`algebra`]), normal forms in
//! relatively free graded Grassmann algebras ([`relfree`]), the generic
//! matrix model of block-triangular matrices ([`model`]), and multilinear
//! identity spaces with factoring checks ([`identities`]).

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod error;
pub mod group;
pub mod identities;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod relfree;

pub use error::CoreError;
pub use group::{group_op, GroupElement, GroupSpec};
pub use poly::{multilinear_monomials, poly_mul, substitute, word_degree, MultidegreeSignature, NcPolynomial, Word};

/// Exact rational scalars.
pub type Q = num_rational::BigRational;
