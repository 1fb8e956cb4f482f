use std::collections::BTreeMap;

use num_traits::Zero;

use super::{resolve_module, Resolution, ResolveError, Strategy};
use crate::algebra::Elem;
use crate::exactlin::{kernel_in, reduced, AbGroup, Int, IntMatrix, Subquotient};
use crate::modcx::{free_hom_matrix, generator_element, ChainComplex, ChainMap, FinModule, ModError};

/// `Hom_A(P, Y)` for a free resolution `P` and a bounded complex `Y`. A cochain of degree `n`
/// is a family `f_k: P_k → Y_{k−n}`, stored as the images of the generators of each `P_k`;
/// its coboundary is `(δf)_k = d_Y f_k − (−1)ⁿ f_{k−1} d_P`.
#[derive(Clone, Debug)]
pub struct HomComplex {
    res: Resolution,
    y: ChainComplex,
}

/// One block of a cochain: degree `k`, offset, and rank of `Y_{k−n}`.
#[derive(Clone, Copy, Debug)]
struct Block {
    k: i64,
    offset: usize,
    width: usize,
}

impl HomComplex {
    pub fn new(res: Resolution, y: ChainComplex) -> Self {
        HomComplex { res, y }
    }

    pub fn resolution(&self) -> &Resolution {
        &self.res
    }

    pub fn target(&self) -> &ChainComplex {
        &self.y
    }

    fn layout(&self, n: i64) -> Vec<Block> {
        let mut out = Vec::new();
        let mut offset = 0;
        for k in self.res.lo()..=self.res.hi() {
            let width = self.y.term(k - n).rank();
            let gens = self.res.rank(k);
            if width > 0 && gens > 0 {
                out.push(Block { k, offset, width });
                offset += gens * width;
            }
        }
        out
    }

    fn block(&self, n: i64, k: i64) -> Option<Block> {
        self.layout(n).into_iter().find(|b| b.k == k)
    }

    /// Coordinates of the component `f_k` inside a degree-`n` cochain.
    pub fn block_range(&self, n: i64, k: i64) -> Option<std::ops::Range<usize>> {
        self.block(n, k).map(|b| b.offset..b.offset + self.res.rank(k) * b.width)
    }

    pub fn moduli(&self, n: i64) -> Vec<Int> {
        let mut out = Vec::new();
        for b in self.layout(n) {
            for _ in 0..self.res.rank(b.k) {
                out.extend_from_slice(self.y.term(b.k - n).moduli());
            }
        }
        out
    }

    pub fn dim(&self, n: i64) -> usize {
        self.moduli(n).len()
    }

    /// `δ: Cⁿ → Cⁿ⁺¹`.
    pub fn coboundary(&self, n: i64) -> IntMatrix {
        let src = self.layout(n);
        let tgt = self.layout(n + 1);
        let mut m = IntMatrix::zeros(self.dim(n + 1), self.dim(n));
        let sign = if n.rem_euclid(2) == 0 { Int::from(-1) } else { Int::from(1) };
        let one = Int::from(1);
        for t in &tgt {
            let k = t.k;
            if let Some(s) = src.iter().find(|b| b.k == k) {
                let dy = self.y.diff_matrix(k - n);
                for i in 0..self.res.rank(k) {
                    m.add_block(t.offset + i * t.width, s.offset + i * s.width, &dy, &one);
                }
            }
            if let Some(s) = src.iter().find(|b| b.k == k - 1) {
                let yt = self.y.term(k - 1 - n);
                let d = self.res.diff(k);
                for i in 0..self.res.rank(k) {
                    for j in 0..self.res.rank(k - 1) {
                        let a = d.get(i, j);
                        if !a.iter().all(Zero::is_zero) {
                            m.add_block(t.offset + i * t.width, s.offset + j * s.width, &yt.act_matrix(a), &sign);
                        }
                    }
                }
            }
        }
        m.reduced_rows(&self.moduli(n + 1))
    }

    pub fn is_cocycle(&self, n: i64, f: &[Int]) -> bool {
        reduced(self.coboundary(n).mul_vec(f), &self.moduli(n + 1)).iter().all(Zero::is_zero)
    }

    /// `Hⁿ` of the complex, with cocycle representatives.
    pub fn cohomology(&self, n: i64) -> Subquotient {
        let here = self.moduli(n);
        let cycles = kernel_in(&self.coboundary(n), &here, &self.moduli(n + 1));
        let boundaries = self.coboundary(n - 1);
        Subquotient::new(&here, &cycles, &boundaries)
    }

    /// Images of the generators of `P_k` under the degree-`n` cochain `f`.
    pub fn images(&self, n: i64, f: &[Int], k: i64) -> Vec<Elem> {
        let width = self.y.term(k - n).rank();
        match self.block(n, k) {
            Some(b) => (0..self.res.rank(k)).map(|i| f[b.offset + i * width..b.offset + (i + 1) * width].to_vec()).collect(),
            None => vec![vec![Int::zero(); width]; self.res.rank(k)],
        }
    }

    /// Integer matrix of `f_k: P_k → Y_{k−n}`.
    pub fn component_matrix(&self, n: i64, f: &[Int], k: i64) -> IntMatrix {
        free_hom_matrix(self.y.term(k - n), &self.images(n, f, k))
    }

    /// Assembles a cochain from generator images.
    pub fn cochain_from_images(&self, n: i64, mut images: impl FnMut(i64, usize) -> Elem) -> Elem {
        let mut out = Vec::new();
        for b in self.layout(n) {
            let yt = self.y.term(b.k - n);
            for i in 0..self.res.rank(b.k) {
                let v = yt.reduce(images(b.k, i));
                assert_eq!(v.len(), b.width, "image length in degree {}", b.k);
                out.extend(v);
            }
        }
        out
    }

    /// Reads a cochain off arbitrary component matrices `P_k → Y_{k−n}`.
    pub fn cochain_from_matrices(&self, n: i64, comps: &BTreeMap<i64, IntMatrix>) -> Elem {
        let alg = self.res.algebra().clone();
        self.cochain_from_images(n, |k, i| match comps.get(&k) {
            Some(m) => m.mul_vec(&generator_element(&alg, self.res.rank(k), i)),
            None => vec![Int::zero(); self.y.term(k - n).rank()],
        })
    }

    /// `f ∘ g` for a chain map `g: P' → P`, as a cochain of `other = Hom(P', Y)`.
    pub fn precompose(&self, n: i64, f: &[Int], g: &ChainMap, other: &HomComplex) -> Elem {
        let comps = (other.res.lo()..=other.res.hi())
            .map(|k| (k, &self.component_matrix(n, f, k) * &g.component_matrix(k)))
            .collect();
        other.cochain_from_matrices(n, &comps)
    }

    /// A degree-`n` cocycle as a chain map `P → Y[n]`.
    pub fn as_chain_map(&self, n: i64, f: &[Int]) -> Result<ChainMap, ModError> {
        let target = self.y.shift(n);
        let comps = (self.res.lo()..=self.res.hi()).map(|k| (k, self.component_matrix(n, f, k))).collect();
        ChainMap::new(self.res.complex().clone(), target, comps)
    }
}

/// `Extⁿ(X, Y)` computed on a resolution, with representatives and a class test.
#[derive(Clone, Debug)]
pub struct ExtGroup {
    degree: i64,
    hom: HomComplex,
    sq: Subquotient,
}

impl ExtGroup {
    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn group(&self) -> &AbGroup {
        self.sq.group()
    }

    pub fn order(&self) -> Option<Int> {
        self.sq.group().order()
    }

    pub fn hom(&self) -> &HomComplex {
        &self.hom
    }

    /// Representative cocycles of the generators.
    pub fn generators(&self) -> &[Elem] {
        self.sq.generators()
    }

    /// Coordinates of the class of a cocycle, `None` when `f` is not a cocycle.
    pub fn class_of(&self, f: &[Int]) -> Option<Elem> {
        self.sq.coords(f)
    }

    pub fn is_zero_class(&self, f: &[Int]) -> bool {
        self.sq.is_zero_class(f)
    }

    pub fn representative(&self, coords: &[Int]) -> Elem {
        self.sq.element(coords)
    }

    pub fn subquotient(&self) -> &Subquotient {
        &self.sq
    }

    /// Coordinates of every class, or `None` past `cap`.
    pub fn classes(&self, cap: usize) -> Option<Vec<Elem>> {
        self.sq.enumerate(cap)
    }
}

/// Hyper-Ext `Extⁿ(X, Y)` from a resolution of `X`; periodic and finite resolutions are
/// extended as needed, truncated ones must already reach degree `n + hi(Y) + 1`.
pub fn hyper_ext(res: &Resolution, y: &ChainComplex, n: i64) -> Result<ExtGroup, ResolveError> {
    let res = res.ensure(n + y.hi() + 1)?;
    let hom = HomComplex::new(res, y.clone());
    let sq = hom.cohomology(n);
    Ok(ExtGroup { degree: n, hom, sq })
}

/// `Extⁱ_A(M, N)` for modules.
pub fn ext_group(m: &FinModule, n: &FinModule, i: usize) -> Result<ExtGroup, ResolveError> {
    let res = resolve_module(m, i + 1, Strategy::Greedy)?;
    hyper_ext(&res, &ChainComplex::concentrated(n.clone(), 0), i as i64)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::FiniteAlgebra;
    use crate::exactlin::ints;

    fn z2_over_z4() -> FinModule {
        let a = Arc::new(FiniteAlgebra::zmod(4));
        FinModule::cyclic_quotient(a, &[ints(&[2])])
    }

    #[test]
    fn ext_of_z2_over_z4() {
        let m = z2_over_z4();
        for i in 0..=3 {
            assert_eq!(ext_group(&m, &m, i).unwrap().group().to_string(), "Z/2", "degree {i}");
        }
    }

    #[test]
    fn ext_over_field_vanishes() {
        let a = Arc::new(FiniteAlgebra::zmod(2));
        let k = FinModule::free(a, 2);
        assert_eq!(ext_group(&k, &k, 0).unwrap().group().to_string(), "Z/2 x Z/2 x Z/2 x Z/2");
        for i in 1..=2 {
            assert!(ext_group(&k, &k, i).unwrap().group().is_trivial());
        }
    }

    #[test]
    fn truncated_resolution_reports_needed_length() {
        let m = z2_over_z4();
        let res = resolve_module(&m, 1, Strategy::Greedy).unwrap();
        let err = hyper_ext(&res, &ChainComplex::concentrated(m, 0), 1).unwrap_err();
        assert!(matches!(err, ResolveError::NeedLongerResolution { needed: 2, available: 1 }));
    }

    #[test]
    fn representatives_are_chain_maps_and_classes_are_decidable() {
        let m = z2_over_z4();
        let e = ext_group(&m, &m, 1).unwrap();
        let g = e.generators()[0].clone();
        e.hom().as_chain_map(1, &g).unwrap();
        assert_eq!(e.class_of(&g), Some(ints(&[1])));
        let doubled: Vec<Int> = g.iter().map(|x| x * 2).collect();
        assert!(e.is_zero_class(&doubled));
    }
}
