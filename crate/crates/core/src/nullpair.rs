//! Pairs `(X, h)` of a free complex over `S` and a null homotopy of its obstruction cocycle,
//! the colax picture `(X, φ: X → (J ⊗ X)[2])`, the shift `σ`, and divisibility tests.

use serde::Serialize;

use crate::algebra::{Elem, SquareZeroDatum};
use crate::exactlin::Int;
use crate::modcx::{generator_element, tensor_chain_map, tensor_complex, ChainComplex, ChainMap, ModError, TensorProduct};
use crate::obstruction::{
    derived_lift, lift_differentials, obstruction_cocycle, DerivedLift, ObstructionCocycle, ObstructionError,
};
use crate::resolve::{free_resolution, Strategy};

#[derive(Debug, thiserror::Error)]
pub enum NullPairError {
    #[error("the complex has homology in negative degree {0}")]
    NotConnective(i64),
    #[error("∂h differs from the obstruction cocycle")]
    NotNull,
    #[error(transparent)]
    Obstruction(#[from] ObstructionError),
    #[error(transparent)]
    Module(#[from] ModError),
}

/// A resolution over `S` with its obstruction cocycle `e` and a degree-1 cochain `h`,
/// `∂h = e`.
#[derive(Clone, Debug)]
pub struct NullPair {
    ob: ObstructionCocycle,
    h: Elem,
}

impl NullPair {
    pub fn new(ob: ObstructionCocycle, h: Elem) -> Result<Self, NullPairError> {
        let hom = ob.hom();
        let dh = crate::exactlin::reduced(hom.coboundary(1).mul_vec(&h), &hom.moduli(2));
        let e = crate::exactlin::reduced(ob.cochain().to_vec(), &hom.moduli(2));
        if dh != e {
            return Err(NullPairError::NotNull);
        }
        Ok(NullPair { ob, h })
    }

    pub fn obstruction(&self) -> &ObstructionCocycle {
        &self.ob
    }

    pub fn homotopy(&self) -> &[Int] {
        &self.h
    }

    pub fn base(&self) -> &ChainComplex {
        self.ob.lifted().base().complex()
    }

    pub fn lift(&self) -> Result<DerivedLift, NullPairError> {
        Ok(derived_lift(&self.ob, &self.h)?)
    }
}

/// Reads the correcting homotopy off a lift: `h_k = D̃_k − D'_k`, entrywise in `J`.
pub fn pair_from_lift(d: &SquareZeroDatum, lift: &DerivedLift) -> Result<NullPair, NullPairError> {
    let lifted = lift_differentials(d, lift.base())?;
    let ob = obstruction_cocycle(&lifted)?;
    let r = d.r();
    let res = lift.base();
    let h = ob.hom().cochain_from_images(1, |k, i| {
        let (tilde, corrected) = (lifted.tilde(k), lift.diff(k));
        (0..res.rank(k - 1))
            .flat_map(|m| d.j_coords(&r.sub(tilde.get(i, m), corrected.get(i, m))).expect("lifts differ by J"))
            .collect()
    });
    NullPair::new(ob, h)
}

/// A complex `X` over `S` with a chain map `φ: X → (J ⊗_S X)[2]`.
#[derive(Clone, Debug)]
pub struct ColaxPair {
    datum: SquareZeroDatum,
    phi: ChainMap,
}

fn shifted_tensor(d: &SquareZeroDatum, x: &ChainComplex) -> Result<ChainComplex, ModError> {
    Ok(tensor_complex(d.j(), x)?.shift(2))
}

impl ColaxPair {
    pub fn new(datum: SquareZeroDatum, phi: ChainMap) -> Result<Self, NullPairError> {
        let expected = shifted_tensor(&datum, phi.source())?;
        if phi.target().bounds() != expected.bounds()
            || (expected.lo()..=expected.hi()).any(|k| {
                phi.target().term(k).moduli() != expected.term(k).moduli() || phi.target().diff_matrix(k) != expected.diff_matrix(k)
            })
        {
            return Err(ModError::Shape("φ must land in (J ⊗ X)[2]".into()).into());
        }
        Ok(ColaxPair { datum, phi })
    }

    /// `(X, 0)`.
    pub fn zero(datum: SquareZeroDatum, x: ChainComplex) -> Result<Self, NullPairError> {
        let t = shifted_tensor(&datum, &x)?;
        Ok(ColaxPair { phi: ChainMap::zero(&x, &t), datum })
    }

    /// The obstruction cocycle of a resolution as a chain map `F → (J ⊗ F)[2]`.
    pub fn from_obstruction(ob: &ObstructionCocycle) -> Result<Self, NullPairError> {
        let d = ob.lifted().datum().clone();
        let res = ob.lifted().base();
        let f = res.complex();
        let target = shifted_tensor(&d, f)?;
        let jr = d.j().rank();
        let s = d.s();
        let mut comps = Vec::new();
        for k in f.lo()..=f.hi() {
            let n2 = res.rank(k - 2);
            if n2 == 0 {
                continue;
            }
            let t = TensorProduct::new(d.j(), f.term(k - 2))?;
            let images: Vec<Elem> = ob
                .component(k)
                .iter()
                .map(|row| {
                    let mut acc = vec![Int::from(0); t.module().rank()];
                    for m in 0..n2 {
                        let pure = t.pure(&row[m * jr..(m + 1) * jr], &generator_element(s, n2, m));
                        for (a, b) in acc.iter_mut().zip(pure) {
                            *a += b;
                        }
                    }
                    acc
                })
                .collect();
            comps.push((k, crate::modcx::free_hom_matrix(target.term(k), &images)));
        }
        Ok(ColaxPair { phi: ChainMap::new(f.clone(), target, comps)?, datum: d })
    }

    pub fn complex(&self) -> &ChainComplex {
        self.phi.source()
    }

    pub fn phi(&self) -> &ChainMap {
        &self.phi
    }

    pub fn phi_is_zero(&self) -> bool {
        let (lo, hi) = self.phi.range();
        (lo..=hi).all(|k| self.phi.component_matrix(k).reduced_rows(self.phi.target().term(k).moduli()).is_zero())
    }
}

/// `σ(X, φ) = (T X, T φ)` with `T = (J ⊗_S −)[2]`.
pub fn sigma_shift(pair: &ColaxPair) -> Result<ColaxPair, NullPairError> {
    let phi = tensor_chain_map(pair.datum.j(), &pair.phi)?.shifted(2);
    ColaxPair::new(pair.datum.clone(), phi)
}

fn connectivity(x: &ChainComplex, through: i64) -> Option<i64> {
    (x.lo()..=x.hi().min(through)).find(|&k| !x.homology(k).module.is_zero_module())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Localization {
    /// `Tᵏ X` has no homology in degrees `≤ hi(X)` for every `k ≥ stages`.
    Vanishes { stages: usize, reason: String, connectivity: Vec<Option<i64>> },
    Unknown { reason: String },
}

impl Localization {
    pub fn vanishes(&self) -> bool {
        matches!(self, Localization::Vanishes { .. })
    }
}

/// Certifies that the colimit of `X → T X → T² X → ⋯` vanishes. Each derived application of
/// `T` raises the lowest homology degree by at least two, so after `hi − conn + 1` stages
/// nothing is left in degrees `≤ hi`; the iterates are computed to confirm the growth.
pub fn phi_localization_vanishes(pair: &ColaxPair) -> Result<Localization, NullPairError> {
    let x = pair.complex();
    let hi = x.hi();
    let Some(conn) = connectivity(x, hi) else {
        return Ok(Localization::Vanishes { stages: 0, reason: "acyclic".into(), connectivity: vec![None] });
    };
    if pair.phi_is_zero() {
        return Ok(Localization::Vanishes { stages: 1, reason: "zero transition maps".into(), connectivity: vec![Some(conn)] });
    }
    let stages = (hi - conn + 1) as usize;
    let mut seen = vec![Some(conn)];
    let mut current = x.clone();
    for _ in 0..stages {
        let length = (hi - current.lo() + 2).max(2) as usize;
        let res = free_resolution(&current, length, Strategy::Greedy).map_err(ObstructionError::from)?;
        current = shifted_tensor(&pair.datum, res.complex())?;
        let c = connectivity(&current, hi);
        if let (Some(prev), Some(now)) = (seen.last().copied().flatten(), c) {
            if now < prev + 2 {
                return Ok(Localization::Unknown { reason: format!("connectivity grew from {prev} to {now}") });
            }
        }
        seen.push(c);
        if c.is_none() {
            return Ok(Localization::Vanishes { stages: seen.len() - 1, reason: "connectivity growth".into(), connectivity: seen });
        }
    }
    Ok(Localization::Unknown { reason: format!("homology left in degree ≤ {hi} after {stages} stages") })
}

/// Whether the lifted complex is acyclic in the degrees its resolution certifies.
pub fn is_beta_divisible(pair: &NullPair) -> Result<bool, NullPairError> {
    let lift = pair.lift()?;
    let x = lift.complex();
    let top = match lift.base().exact_through() {
        Some(t) => t.min(x.hi()),
        None => x.hi(),
    };
    Ok((x.lo()..=top).all(|k| x.homology(k).module.is_zero_module()))
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionVerdict {
    pub torsion: bool,
    pub justification: String,
}

/// In the connective range every pair is β-torsion, since no nonzero connective pair is
/// divisible; the divisibility test is run to confirm this for the given pair.
pub fn is_beta_torsion_connective(pair: &NullPair) -> Result<TorsionVerdict, NullPairError> {
    let x = pair.ob.lifted().base().target();
    if let Some(k) = (x.lo()..0).find(|&k| !x.homology(k).module.is_zero_module()) {
        return Err(NullPairError::NotConnective(k));
    }
    let acyclic = x.is_acyclic();
    let divisible = is_beta_divisible(pair)?;
    if divisible && !acyclic {
        return Err(ObstructionError::InternalInconsistency("nonzero connective pair is divisible".into()).into());
    }
    Ok(TorsionVerdict { torsion: true, justification: "connective ⇒ torsion".into() })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::{AlgebraMap, FiniteAlgebra};
    use crate::exactlin::{ints, IntMatrix};
    use crate::modcx::FinModule;
    use crate::obstruction::classify_lifts;

    fn z4_datum() -> SquareZeroDatum {
        let pi = AlgebraMap::new(Arc::new(FiniteAlgebra::zmod(4)), Arc::new(FiniteAlgebra::zmod(2)), IntMatrix::from_rows(&[vec![1]])).unwrap();
        SquareZeroDatum::from_surjection(pi).unwrap()
    }

    #[test]
    fn z4_pair_round_trips() {
        let d = z4_datum();
        let x = ChainComplex::concentrated(FinModule::free(d.s().clone(), 1), 0);
        let rep = classify_lifts(&d, &x, 3, 4).unwrap();
        let lift = &rep.classes[0].lift;
        let pair = pair_from_lift(&d, lift).unwrap();
        assert!(pair.homotopy().iter().all(|x| x == &Int::from(0)));
        let back = pair.lift().unwrap();
        assert_eq!(back.complex().diff_matrix(1), lift.complex().diff_matrix(1));
        assert!(!is_beta_divisible(&pair).unwrap());
        assert!(is_beta_torsion_connective(&pair).unwrap().torsion);
    }

    #[test]
    fn sigma_moves_z2_up_two() {
        let d = z4_datum();
        let x = ChainComplex::concentrated(FinModule::free(d.s().clone(), 1), 0);
        let p = ColaxPair::zero(d, x).unwrap();
        let q = sigma_shift(&p).unwrap();
        assert!(q.phi_is_zero());
        assert_eq!(q.complex().homology(2).module.group().to_string(), "Z/2");
        assert!(phi_localization_vanishes(&p).unwrap().vanishes());
    }

    #[test]
    fn obstruction_as_colax_pair_localizes_to_zero() {
        let pi = AlgebraMap::new(Arc::new(FiniteAlgebra::zmod(8)), Arc::new(FiniteAlgebra::zmod(4)), IntMatrix::from_rows(&[vec![1]])).unwrap();
        let d = SquareZeroDatum::from_surjection(pi).unwrap();
        let m = FinModule::cyclic_quotient(d.s().clone(), &[ints(&[2])]);
        let res = crate::resolve::resolve_module(&m, 3, Strategy::Greedy).unwrap();
        let ob = obstruction_cocycle(&lift_differentials(&d, &res).unwrap()).unwrap();
        let pair = ColaxPair::from_obstruction(&ob).unwrap();
        assert!(!pair.phi_is_zero());
        let loc = phi_localization_vanishes(&pair).unwrap();
        assert!(loc.vanishes(), "{loc:?}");
        let shifted = sigma_shift(&pair).unwrap();
        assert_eq!(shifted.complex().lo(), pair.complex().lo() + 2);
    }
}
