//! Exact arithmetic for monic integer polynomials and the objects used to
//! count them by discriminant: p²-divisibility classes, the symmetric-matrix
//! embedding σ_m with its Q-invariant, local densities and Dedekind's
//! criterion, fast height-box scanning kernels, and Minkowski reduction of
//! the lattice ℤ[θ].
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! filesystem, threads or the command line lives in the `disc-sieve` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod arith;
pub mod disc_class;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod local_density;
pub mod modpoly;
pub mod poly;
pub mod q_invariant;
pub mod sieve;
pub mod sym_rep;
pub mod zpoly;

pub use disc_class::{classify_p2, strongly_divides_oracle, weak_normal_form, P2Class, P2Tag, WeakNormalForm};
pub use error::{Error, Result};
pub use modpoly::{sqf_decompose_mod_p, ModPoly, SqfDecomposition};
pub use poly::MonicPoly;
pub use q_invariant::QInput;
pub use sym_rep::SymMatrixRep;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
