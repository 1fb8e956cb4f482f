//! Finite modules over finite algebras, bounded chain complexes, tensor products and the
//! homological bookkeeping built on them.

mod complex;
mod free;
mod module;
mod ses;
mod tensor;

pub use complex::{cone, cone_sequence, fiber, quasi_iso, ChainComplex, ChainMap, Homology, Homotopy};
pub use free::{free_hom_matrix, generator_element, RingMatrix};
pub use module::{hom_group, is_well_defined, prime_map, FinModule, HomGroup, ModuleMap};
pub use ses::{exact_at, verify_short_exact, SesReport};
pub use tensor::{tensor_chain_map, tensor_complex, tensor_over, TensorProduct};

use crate::algebra::AlgebraError;

#[derive(Debug, thiserror::Error)]
pub enum ModError {
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("map does not respect the orders of the generators")]
    NotWellDefined,
    #[error("map does not commute with the action of generator {0}")]
    NotLinear(usize),
    #[error("in degree {0}: {1}")]
    InDegree(i64, Box<ModError>),
    #[error("d∘d is nonzero at degree {0}")]
    DSquaredNonzero(i64),
    #[error("components do not commute with differentials at degree {0}")]
    NotChainMap(i64),
    #[error("homotopy identity fails at degree {0}")]
    NotHomotopy(i64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
