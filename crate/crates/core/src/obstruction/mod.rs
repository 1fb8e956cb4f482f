//! Obstructions to lifting modules along a square-zero extension `R → S` with kernel `J`:
//! lifted differentials, the obstruction cocycle in `Hom(F, J ⊗ F)`, null homotopies,
//! corrected lifts, their classification, and chain-level checks of the fiber sequence and
//! the `J`-adic filtration.

mod cocycle;
mod filtration;
mod lift;

pub use cocycle::{
    lift_differentials, obstruction_cocycle, section_invariant, solve_null_homotopies, tor_check, ClassicalClass,
    Decision, LiftedDifferentials, NullHomotopies, ObstructionCocycle, TorCheck,
};
pub use filtration::{adams_graded, verify_fiber_sequence, AdamsReport, FiberReport};
pub use lift::{classify_lifts, derived_lift, DerivedLift, LiftClass, LiftReport, TorsorRecord};

use crate::algebra::AlgebraError;
use crate::modcx::ModError;
use crate::resolve::ResolveError;

#[derive(Debug, thiserror::Error)]
pub enum ObstructionError {
    #[error("the resolution is not over the quotient ring of the datum")]
    AlgebraMismatch,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("the obstruction class is nonzero; no null homotopy exists")]
    NoSolution,
    #[error("vanishing is undecided: {0}")]
    Undecided(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error(transparent)]
    Module(#[from] ModError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::{AlgebraMap, FiniteAlgebra, SectionChoice, SquareZeroDatum};
    use crate::exactlin::{ints, IntMatrix};
    use crate::modcx::{ChainComplex, FinModule};
    use crate::resolve::{resolve_module, Strategy};

    fn zmod_datum(n: u64, m: u64) -> SquareZeroDatum {
        let pi = AlgebraMap::new(Arc::new(FiniteAlgebra::zmod(n)), Arc::new(FiniteAlgebra::zmod(m)), IntMatrix::from_rows(&[vec![1]])).unwrap();
        SquareZeroDatum::from_surjection(pi).unwrap()
    }

    fn quotient(d: &SquareZeroDatum, gen: i64) -> ChainComplex {
        ChainComplex::concentrated(FinModule::cyclic_quotient(d.s().clone(), &[ints(&[gen])]), 0)
    }

    #[test]
    fn z2_lifts_uniquely_to_z4() {
        let d = zmod_datum(4, 2);
        let rep = classify_lifts(&d, &quotient(&d, 0), 3, 16).unwrap();
        assert!(!rep.obstructed);
        assert_eq!(rep.class_count(), 1);
        assert_eq!(rep.classes[0].lift.bottom_homology().group().to_string(), "Z/4");
        assert!(rep.torsor.as_ref().unwrap().ok());
    }

    #[test]
    fn z2_over_z4_does_not_lift_to_z8() {
        let d = zmod_datum(8, 4);
        let rep = classify_lifts(&d, &quotient(&d, 2), 3, 16).unwrap();
        assert!(rep.obstructed);
        assert_eq!(rep.classical_class_zero, Some(false));
        assert!(rep.classes.is_empty());
    }

    #[test]
    fn z4_lifts_to_z8() {
        let d = zmod_datum(8, 4);
        let rep = classify_lifts(&d, &quotient(&d, 0), 3, 16).unwrap();
        assert!(!rep.obstructed);
        assert_eq!(rep.class_count(), 1);
    }

    #[test]
    fn obstruction_is_section_independent() {
        let d = zmod_datum(8, 4);
        let m = FinModule::cyclic_quotient(d.s().clone(), &[ints(&[2])]);
        let res = resolve_module(&m, 4, Strategy::Greedy).unwrap();
        for seed in 0..4 {
            assert!(section_invariant(&d, &res, SectionChoice::Seeded(seed)).unwrap());
        }
    }

    #[test]
    fn fiber_sequence_and_tower_for_z4() {
        let d = zmod_datum(4, 2);
        let rep = classify_lifts(&d, &quotient(&d, 0), 3, 16).unwrap();
        let lift = &rep.classes[0].lift;
        let fib = verify_fiber_sequence(lift).unwrap();
        assert!(fib.ok(), "{:?}", fib.ses.failures);
        assert!(fib.non_split);
        let adams = adams_graded(lift, 3, lift.complex().hi(), 3).unwrap();
        assert!(adams.ok(), "{adams:?}");
        assert!(!adams.levels[0].null);
    }

    fn trunc_datum() -> SquareZeroDatum {
        let rows = vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]];
        let pi = AlgebraMap::new(Arc::new(FiniteAlgebra::trunc_poly(2, 4)), Arc::new(FiniteAlgebra::trunc_poly(2, 2)), IntMatrix::from_rows(&rows)).unwrap();
        SquareZeroDatum::from_surjection(pi).unwrap()
    }

    #[test]
    fn residue_field_of_dual_numbers_is_obstructed() {
        let d = trunc_datum();
        let k = quotient_by(&d, 1);
        let rep = classify_lifts(&d, &k, 3, 16).unwrap();
        assert!(rep.obstructed);
        let free = ChainComplex::concentrated(FinModule::free(d.s().clone(), 1), 0);
        assert_eq!(classify_lifts(&d, &free, 3, 16).unwrap().class_count(), 1);
    }

    fn quotient_by(d: &SquareZeroDatum, basis: usize) -> ChainComplex {
        ChainComplex::concentrated(FinModule::cyclic_quotient(d.s().clone(), &[d.s().basis(basis)]), 0)
    }

    #[test]
    fn trivial_extension_by_regular_bimodule_has_two_lifts_of_k() {
        let s = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
        let d = crate::algebra::split_square_zero(s.clone(), &crate::algebra::Bimodule::regular(s));
        let rep = classify_lifts(&d, &quotient_by(&d, 1), 3, 16).unwrap();
        assert!(!rep.obstructed);
        assert_eq!(rep.ext1.as_ref().map(|g| g.to_string()), rep.classical_ext1.as_ref().map(|g| g.to_string()));
        assert_eq!(rep.class_count(), 2, "{rep:?}");
        assert!(rep.torsor.as_ref().unwrap().ok());
    }
}
