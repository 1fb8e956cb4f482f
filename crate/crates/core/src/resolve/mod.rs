//! Free resolutions of modules and bounded complexes over finite algebras, comparison maps,
//! and Ext/Tor with explicit cocycle representatives.

mod derived;
mod hom;
mod resolution;

pub use derived::{compare_lift, homotopy_between, syzygy, tor_group, tor_modules};
pub use hom::{ext_group, hyper_ext, ExtGroup, HomComplex};
pub use resolution::{free_resolution, resolve_module, Certificate, Resolution, Strategy};

use crate::modcx::ModError;

#[derive(Debug, thiserror::Error)]
pub enum ResolveError {
    #[error("resolution reaches degree {available}, degree {needed} is required")]
    NeedLongerResolution { needed: i64, available: i64 },
    #[error("resolution check failed in degree {0}: {1}")]
    NotExact(i64, String),
    #[error("expected a module concentrated in degree 0")]
    NotAModule,
    #[error("lifting system has no solution in degree {0}")]
    NoLift(i64),
    #[error(transparent)]
    Module(#[from] ModError),
}
