//! Finite rings, bimodules, ring maps and square-zero extensions.

mod bimodule;
mod extension;
mod ring;

use std::fmt;

pub use bimodule::{check_action, combine_action, Bimodule};
pub use extension::{extension_from_cocycle, split_square_zero, CocycleTables, SectionChoice, SquareZeroDatum};
pub use ring::{enumerate_group, group_index, AlgebraMap, Elem, FiniteAlgebra};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("malformed data: {0}")]
    Shape(String),
    #[error("product of generators {0} and {1} is not compatible with their orders")]
    IllDefined(usize, usize),
    #[error("multiplication is not associative on generators ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("unit does not act as identity on generator {0}")]
    NotUnital(usize),
    #[error("{side} action of generator {generator} is not compatible with the orders")]
    ActionIllDefined { side: Side, generator: usize },
    #[error("unit does not act as identity ({side} action)")]
    ActionNotUnital { side: Side },
    #[error("{side} action is not associative on generators ({i}, {j})")]
    ActionNotAssociative { side: Side, i: usize, j: usize },
    #[error("left action of generator {0} does not commute with right action of generator {1}")]
    ActionsDoNotCommute(usize, usize),
    #[error("image of source generator {0} is not compatible with its order")]
    MapIllDefined(usize),
    #[error("map does not preserve the unit")]
    MapNotUnital,
    #[error("map is not multiplicative on generators ({0}, {1})")]
    MapNotMultiplicative(usize, usize),
    #[error("map is not surjective")]
    NotSurjective,
    #[error("kernel is not square-zero: {left:?} * {right:?} = {product:?}")]
    KernelNotSquareZero { left: Elem, right: Elem, product: Elem },
    #[error("cochain is not normalized at element pair ({0}, {1})")]
    NotNormalized(usize, usize),
    #[error("cocycle identity fails on element triple ({0}, {1}, {2})")]
    NotACocycle(usize, usize, usize),
    #[error("operation needs a finite ring")]
    Infinite,
}
