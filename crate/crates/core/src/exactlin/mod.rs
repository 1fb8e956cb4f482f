//! Exact linear algebra over `Z` and `Z/n`.
//!
//! Finite abelian groups appear everywhere as `⊕ Z/mᵢ` with a modulus list `m`; a zero
//! modulus stands for a copy of `Z`. Homomorphisms between such groups are integer matrices
//! acting on column vectors of coordinates.

mod group;
mod matrix;
mod snf;

pub use group::{kernel_in, lcm_all, solve_in, AbGroup, LinearSystem, Subquotient};
pub use matrix::{ints, reduce_vec, reduced, IntMatrix};
pub use snf::{kernel_mod, mod_inverse, smith_normal_form, smith_normal_form_mod, solve_mod, SmithForm};

pub type Int = num_bigint::BigInt;

/// Serializes integer coordinates as decimal strings.
pub fn serialize_ints<S: serde::Serializer>(x: &[Int], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(|v| v.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}
