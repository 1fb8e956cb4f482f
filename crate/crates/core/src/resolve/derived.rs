use std::collections::BTreeMap;

use num_traits::Zero;

use super::{resolve_module, Resolution, ResolveError, Strategy};
use crate::algebra::{Bimodule, Elem};
use crate::exactlin::{solve_in, AbGroup, IntMatrix};
use crate::modcx::{free_hom_matrix, generator_element, tensor_complex, ChainMap, FinModule, Homotopy, ModuleMap};

/// `Torᵢ(B, X)` as `Hᵢ(B ⊗ P)` for a resolution `P` of `X`.
pub fn tor_group(b: &Bimodule, res: &Resolution, i: i64) -> Result<AbGroup, ResolveError> {
    let res = res.ensure(i + 1)?;
    let t = tensor_complex(b, res.complex())?;
    Ok(t.homology(i).module.group())
}

pub fn tor_modules(b: &Bimodule, n: &FinModule, i: usize) -> Result<AbGroup, ResolveError> {
    let res = resolve_module(n, i + 1, Strategy::Greedy)?;
    tor_group(b, &res, i as i64)
}

fn module_of(res: &Resolution) -> Result<&FinModule, ResolveError> {
    let t = res.target();
    if t.bounds() != (0, 0) {
        return Err(ResolveError::NotAModule);
    }
    Ok(t.term(0))
}

/// Lifts `f: M → N` to a chain map between resolutions of `M` and `N`. The target is extended
/// one degree past the source so that [`homotopy_between`] can use the same complexes.
pub fn compare_lift(f: &ModuleMap, rm: &Resolution, rn: &Resolution) -> Result<ChainMap, ResolveError> {
    let (m, n) = (module_of(rm)?, module_of(rn)?);
    if f.source() != m || f.target() != n {
        return Err(ResolveError::Module(crate::modcx::ModError::Shape("map does not match the resolved modules".into())));
    }
    let rn = rn.ensure(rm.hi() + 1)?;
    let q = rn.complex();
    let eps_n = rn.augmentation().component_matrix(0);
    let mut comps: BTreeMap<i64, IntMatrix> = BTreeMap::new();
    for k in 0..=rm.hi() {
        let qk = q.term(k);
        let mut images = Vec::new();
        for i in 0..rm.rank(k) {
            let (a, b) = if k == 0 {
                let y = f.apply(&rm.augmentation_images(0)[i]);
                (eps_n.clone(), (y, n.moduli().to_vec()))
            } else {
                let src = rm.diff(k).row_element(i);
                let y = comps[&(k - 1)].mul_vec(&src);
                (q.diff_matrix(k), (y, q.term(k - 1).moduli().to_vec()))
            };
            let sol = solve_in(&a, &b.0, qk.moduli(), &b.1).ok_or(ResolveError::NoLift(k))?;
            images.push(sol);
        }
        comps.insert(k, free_hom_matrix(qk, &images));
    }
    Ok(ChainMap::new(rm.complex().clone(), q.clone(), comps.into_iter().collect())?)
}

/// A homotopy `g₁ ≃ g₂` between chain maps of resolutions over the same map of modules. The
/// target resolution must reach one degree past the source.
pub fn homotopy_between(g1: &ChainMap, g2: &ChainMap, source: &Resolution, target: &Resolution) -> Result<Homotopy, ResolveError> {
    let target = target.ensure(source.hi() + 1)?;
    let alg = source.algebra().clone();
    let q = target.complex();
    let mut comps: BTreeMap<i64, IntMatrix> = BTreeMap::new();
    for k in source.lo()..=source.hi() {
        let diff = g1.component_matrix(k).sub(&g2.component_matrix(k));
        let mut images: Vec<Elem> = Vec::new();
        for i in 0..source.rank(k) {
            let gen = generator_element(&alg, source.rank(k), i);
            let mut rhs = diff.mul_vec(&gen);
            if let Some(h) = comps.get(&(k - 1)) {
                let hd = h.mul_vec(&source.diff(k).row_element(i));
                for (x, y) in rhs.iter_mut().zip(hd) {
                    *x -= y;
                }
            }
            let sol = solve_in(&q.diff_matrix(k + 1), &rhs, q.term(k + 1).moduli(), q.term(k).moduli())
                .ok_or(ResolveError::NoLift(k))?;
            images.push(sol);
        }
        comps.insert(k, free_hom_matrix(q.term(k + 1), &images));
    }
    let h = Homotopy { comps };
    h.verify(g1, g2)?;
    Ok(h)
}

/// `Ωᵏ`: the image of `d_k` inside `P_{k−1}` (for `k = 1`, the kernel of the augmentation).
pub fn syzygy(res: &Resolution, k: i64) -> FinModule {
    let p = res.complex().term(k - 1);
    let gens: Vec<Elem> = res.complex().diff_matrix(k).columns();
    let gens: Vec<Elem> = gens.into_iter().filter(|g| g.iter().any(|x| !x.is_zero())).collect();
    p.submodule(&gens).0
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::FiniteAlgebra;
    use crate::exactlin::ints;

    #[test]
    fn tor_over_z4() {
        let a = Arc::new(FiniteAlgebra::zmod(4));
        let m = FinModule::cyclic_quotient(a.clone(), &[ints(&[2])]);
        let b = Bimodule::right_module(a.clone(), m.moduli().to_vec(), m.action().to_vec()).unwrap();
        assert_eq!(tor_modules(&b, &m, 0).unwrap().to_string(), "Z/2");
        assert_eq!(tor_modules(&b, &m, 1).unwrap().to_string(), "Z/2");
        let reg = Bimodule::regular(a);
        assert!(tor_modules(&reg, &m, 1).unwrap().is_trivial());
        assert!(tor_modules(&reg, &m, 2).unwrap().is_trivial());
    }

    #[test]
    fn identity_and_zero_lifts() {
        let a = Arc::new(FiniteAlgebra::zmod(4));
        let m = FinModule::cyclic_quotient(a, &[ints(&[2])]);
        let r = resolve_module(&m, 3, Strategy::Greedy).unwrap();
        let id = compare_lift(&ModuleMap::identity(m.clone()), &r, &r).unwrap();
        for k in 0..=r.hi() {
            assert_eq!(id.component_matrix(k), IntMatrix::identity(r.complex().term(k).rank()));
        }
        let z = compare_lift(&ModuleMap::zero(m.clone(), m.clone()), &r, &r).unwrap();
        let zero = ChainMap::zero(z.source(), z.target());
        homotopy_between(&z, &zero, &r, &r).unwrap();
    }

    #[test]
    fn inclusion_lift_is_doubling() {
        let a = Arc::new(FiniteAlgebra::zmod(4));
        let m = FinModule::cyclic_quotient(a.clone(), &[ints(&[2])]);
        let n = FinModule::free(a, 1);
        let inc = ModuleMap::new(m.clone(), n.clone(), IntMatrix::from_rows(&[vec![2]])).unwrap();
        let rm = resolve_module(&m, 2, Strategy::Greedy).unwrap();
        let rn = resolve_module(&n, 2, Strategy::Greedy).unwrap();
        let g = compare_lift(&inc, &rm, &rn).unwrap();
        assert_eq!(g.component_matrix(0), IntMatrix::from_rows(&[vec![2]]));
        assert_eq!(g.component_matrix(1).rows(), 0);
    }

    #[test]
    fn first_syzygy_of_z2_over_z4() {
        let a = Arc::new(FiniteAlgebra::zmod(4));
        let m = FinModule::cyclic_quotient(a, &[ints(&[2])]);
        let r = resolve_module(&m, 2, Strategy::Greedy).unwrap();
        assert_eq!(syzygy(&r, 1).group().to_string(), "Z/2");
    }
}
