use std::collections::BTreeMap;
use std::sync::Arc;


use super::{is_well_defined, FinModule, ModError, ModuleMap};
use crate::algebra::{AlgebraMap, Elem, FiniteAlgebra};
use crate::exactlin::{kernel_in, Int, IntMatrix, Subquotient};

/// A bounded chain complex `X_hi → ⋯ → X_lo`; the differential lowers degree by one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    algebra: Arc<FiniteAlgebra>,
    lo: i64,
    terms: Vec<FinModule>,
    // diffs[i] is d_{lo+i+1}: X_{lo+i+1} → X_{lo+i}.
    diffs: Vec<IntMatrix>,
    zero: FinModule,
}

impl ChainComplex {
    /// Validates shapes, linearity of every differential and `d∘d = 0`.
    pub fn new(algebra: Arc<FiniteAlgebra>, lo: i64, terms: Vec<FinModule>, diffs: Vec<IntMatrix>) -> Result<Self, ModError> {
        if terms.is_empty() {
            return Err(ModError::Shape("a complex needs at least one term".into()));
        }
        if diffs.len() + 1 != terms.len() {
            return Err(ModError::Shape(format!("{} terms need {} differentials", terms.len(), terms.len() - 1)));
        }
        if terms.iter().any(|t| **t.algebra() != *algebra) {
            return Err(ModError::AlgebraMismatch);
        }
        let x = Self::from_parts(algebra, lo, terms, diffs);
        for k in x.lo + 1..=x.hi() {
            let d = x.diff_matrix(k);
            if d.shape() != (x.term(k - 1).rank(), x.term(k).rank()) {
                return Err(ModError::Shape(format!("differential in degree {k} has the wrong shape")));
            }
            ModuleMap::new(x.term(k).clone(), x.term(k - 1).clone(), d).map_err(|e| ModError::InDegree(k, Box::new(e)))?;
        }
        for k in x.lo + 2..=x.hi() {
            let dd = &x.diff_matrix(k - 1) * &x.diff_matrix(k);
            if !dd.reduced_rows(x.term(k - 2).moduli()).is_zero() {
                return Err(ModError::DSquaredNonzero(k));
            }
        }
        Ok(x)
    }

    pub(crate) fn from_parts(algebra: Arc<FiniteAlgebra>, lo: i64, terms: Vec<FinModule>, diffs: Vec<IntMatrix>) -> Self {
        let zero = FinModule::zero(algebra.clone());
        let diffs = diffs.into_iter().enumerate().map(|(i, d)| d.reduced_rows(terms[i].moduli())).collect();
        ChainComplex { algebra, lo, terms, diffs, zero }
    }

    /// A single module in degree `k`.
    pub fn concentrated(m: FinModule, k: i64) -> Self {
        Self::from_parts(m.algebra().clone(), k, vec![m], Vec::new())
    }

    pub fn zero_complex(algebra: Arc<FiniteAlgebra>) -> Self {
        let z = FinModule::zero(algebra.clone());
        Self::from_parts(algebra, 0, vec![z], Vec::new())
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn bounds(&self) -> (i64, i64) {
        (self.lo, self.hi())
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    pub fn term(&self, k: i64) -> &FinModule {
        if k < self.lo || k > self.hi() {
            &self.zero
        } else {
            &self.terms[(k - self.lo) as usize]
        }
    }

    /// Matrix of `d_k: X_k → X_{k−1}` (zero outside the bounds).
    pub fn diff_matrix(&self, k: i64) -> IntMatrix {
        if k <= self.lo || k > self.hi() {
            IntMatrix::zeros(self.term(k - 1).rank(), self.term(k).rank())
        } else {
            self.diffs[(k - self.lo - 1) as usize].clone()
        }
    }

    pub fn differential(&self, k: i64) -> ModuleMap {
        ModuleMap::new_unchecked(self.term(k).clone(), self.term(k - 1).clone(), self.diff_matrix(k))
    }

    pub fn homology(&self, k: i64) -> Homology {
        let m = self.term(k);
        let cycles = kernel_in(&self.diff_matrix(k), m.moduli(), self.term(k - 1).moduli());
        let boundaries = self.diff_matrix(k + 1);
        let sq = Subquotient::new(m.moduli(), &cycles, &boundaries);
        let reps = sq.generators().to_vec();
        let action = m
            .action()
            .iter()
            .map(|a| {
                let cols: Vec<Elem> = reps.iter().map(|g| sq.coords(&a.mul_vec(g)).expect("cycles are a submodule")).collect();
                IntMatrix::from_columns(&cols, reps.len())
            })
            .collect();
        let module = FinModule::new_unchecked(self.algebra.clone(), sq.moduli().to_vec(), action);
        Homology { degree: k, module, sq }
    }

    pub fn is_acyclic(&self) -> bool {
        (self.lo..=self.hi()).all(|k| self.homology(k).module.is_zero_module())
    }

    /// Homology in every degree of the bounds, as strings, for reports.
    pub fn homology_summary(&self) -> BTreeMap<i64, String> {
        (self.lo..=self.hi()).map(|k| (k, self.homology(k).module.group().to_string())).collect()
    }

    /// `(X[k])_i = X_{i−k}` with differential `(−1)^k d`.
    pub fn shift(&self, k: i64) -> ChainComplex {
        let sign = if k.rem_euclid(2) == 0 { Int::from(1) } else { Int::from(-1) };
        let diffs = self.diffs.iter().map(|d| d.scale(&sign)).collect();
        Self::from_parts(self.algebra.clone(), self.lo + k, self.terms.clone(), diffs)
    }

    /// The same groups and differentials over the prime ring.
    pub fn underlying(&self) -> ChainComplex {
        let terms: Vec<FinModule> = self.terms.iter().map(FinModule::underlying).collect();
        let algebra = terms[0].algebra().clone();
        Self::from_parts(algebra, self.lo, terms, self.diffs.clone())
    }

    pub fn restrict_scalars(&self, f: &AlgebraMap) -> ChainComplex {
        let terms: Vec<FinModule> = self.terms.iter().map(|t| t.restrict_scalars(f)).collect();
        Self::from_parts(f.source().clone(), self.lo, terms, self.diffs.clone())
    }

    /// The brutal truncation keeping degrees `≤ hi`; homology below `hi` is unchanged.
    pub fn truncated_above(&self, hi: i64) -> ChainComplex {
        if hi >= self.hi() {
            return self.clone();
        }
        let hi = hi.max(self.lo);
        let terms: Vec<FinModule> = (self.lo..=hi).map(|k| self.term(k).clone()).collect();
        let diffs = (self.lo + 1..=hi).map(|k| self.diff_matrix(k)).collect();
        Self::from_parts(self.algebra.clone(), self.lo, terms, diffs)
    }

    /// Widens the stored range with zero terms.
    pub fn padded(&self, lo: i64, hi: i64) -> ChainComplex {
        let lo = lo.min(self.lo);
        let hi = hi.max(self.hi());
        let terms: Vec<FinModule> = (lo..=hi).map(|k| self.term(k).clone()).collect();
        let diffs = (lo + 1..=hi).map(|k| self.diff_matrix(k)).collect();
        Self::from_parts(self.algebra.clone(), lo, terms, diffs)
    }
}

/// `ker d_k / im d_{k+1}` with chosen representatives.
#[derive(Clone, Debug)]
pub struct Homology {
    pub degree: i64,
    pub module: FinModule,
    sq: Subquotient,
}

impl Homology {
    /// Coordinates of the class of a cycle; `None` if `x` is not a cycle.
    pub fn class_of(&self, x: &[Int]) -> Option<Elem> {
        self.sq.coords(x)
    }

    pub fn representative(&self, coords: &[Int]) -> Elem {
        self.sq.element(coords)
    }

    pub fn representatives(&self) -> &[Elem] {
        self.sq.generators()
    }

    pub fn subquotient(&self) -> &Subquotient {
        &self.sq
    }
}

/// A degree-preserving chain map, stored componentwise.
#[derive(Clone, Debug)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    comps: BTreeMap<i64, IntMatrix>,
}

impl ChainMap {
    pub fn new(source: ChainComplex, target: ChainComplex, comps: Vec<(i64, IntMatrix)>) -> Result<Self, ModError> {
        let f = Self::from_parts(source, target, comps);
        f.check()?;
        Ok(f)
    }

    pub(crate) fn from_parts(source: ChainComplex, target: ChainComplex, comps: Vec<(i64, IntMatrix)>) -> Self {
        let comps = comps
            .into_iter()
            .filter(|(k, _)| source.term(*k).rank() > 0 && target.term(*k).rank() > 0)
            .map(|(k, m)| {
                let m = m.reduced_rows(target.term(k).moduli());
                (k, m)
            })
            .collect();
        ChainMap { source, target, comps }
    }

    fn check(&self) -> Result<(), ModError> {
        let (lo, hi) = self.range();
        for k in lo..=hi {
            let f = self.component_matrix(k);
            let (x, y) = (self.source.term(k), self.target.term(k));
            if f.shape() != (y.rank(), x.rank()) {
                return Err(ModError::Shape(format!("chain map component {k} has the wrong shape")));
            }
            ModuleMap::new(x.clone(), y.clone(), f.clone()).map_err(|e| ModError::InDegree(k, Box::new(e)))?;
            let lhs = &self.target.diff_matrix(k) * &f;
            let rhs = &self.component_matrix(k - 1) * &self.source.diff_matrix(k);
            if !lhs.sub(&rhs).reduced_rows(self.target.term(k - 1).moduli()).is_zero() {
                return Err(ModError::NotChainMap(k));
            }
        }
        Ok(())
    }

    pub fn identity(x: &ChainComplex) -> Self {
        let comps = (x.lo()..=x.hi()).map(|k| (k, IntMatrix::identity(x.term(k).rank()))).collect();
        Self::from_parts(x.clone(), x.clone(), comps)
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> Self {
        Self::from_parts(source.clone(), target.clone(), Vec::new())
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    /// Degrees where either side may be nonzero, plus one on each end for the checks.
    pub fn range(&self) -> (i64, i64) {
        let lo = self.source.lo().min(self.target.lo());
        let hi = self.source.hi().max(self.target.hi());
        (lo, hi + 1)
    }

    pub fn component_matrix(&self, k: i64) -> IntMatrix {
        self.comps
            .get(&k)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.target.term(k).rank(), self.source.term(k).rank()))
    }

    pub fn component(&self, k: i64) -> ModuleMap {
        ModuleMap::new_unchecked(self.source.term(k).clone(), self.target.term(k).clone(), self.component_matrix(k))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> ChainMap {
        let (lo, hi) = self.range();
        let comps = (lo..=hi).map(|k| (k, &other.component_matrix(k) * &self.component_matrix(k))).collect();
        Self::from_parts(self.source.clone(), other.target.clone(), comps)
    }

    pub fn sub(&self, other: &ChainMap) -> ChainMap {
        let (lo, hi) = self.range();
        let comps = (lo..=hi).map(|k| (k, self.component_matrix(k).sub(&other.component_matrix(k)))).collect();
        Self::from_parts(self.source.clone(), self.target.clone(), comps)
    }

    /// `f[k]: X[k] → Y[k]`; the components move up by `k` with no sign.
    pub fn shifted(&self, k: i64) -> ChainMap {
        let comps = self.comps.iter().map(|(i, m)| (i + k, m.clone())).collect();
        Self::from_parts(self.source.shift(k), self.target.shift(k), comps)
    }

    /// Matrix of the induced map `H_k(X) → H_k(Y)` in homology coordinates.
    pub fn on_homology(&self, k: i64) -> (Homology, Homology, IntMatrix) {
        let hx = self.source.homology(k);
        let hy = self.target.homology(k);
        let f = self.component_matrix(k);
        let cols: Vec<Elem> =
            hx.representatives().iter().map(|r| hy.class_of(&f.mul_vec(r)).expect("chain maps preserve cycles")).collect();
        let m = IntMatrix::from_columns(&cols, hy.module.rank());
        (hx, hy, m)
    }

    /// Whether the induced map on homology is bijective in degree `k`.
    pub fn is_iso_on_homology(&self, k: i64) -> bool {
        let (hx, hy, m) = self.on_homology(k);
        let injective = kernel_in(&m, hx.module.moduli(), hy.module.moduli()).cols() == 0;
        let surjective = Subquotient::quotient(hy.module.moduli(), &m).group().is_trivial();
        injective && surjective
    }
}

/// Whether `f` induces isomorphisms on homology in every degree.
pub fn quasi_iso(f: &ChainMap) -> bool {
    let (lo, hi) = f.range();
    (lo..=hi).all(|k| f.is_iso_on_homology(k))
}

/// A chain homotopy `h_k: X_k → Y_{k+1}` witnessing `f − g = d h + h d`.
#[derive(Clone, Debug)]
pub struct Homotopy {
    pub comps: BTreeMap<i64, IntMatrix>,
}

impl Homotopy {
    pub fn component(&self, k: i64, source: &ChainComplex, target: &ChainComplex) -> IntMatrix {
        self.comps
            .get(&k)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(target.term(k + 1).rank(), source.term(k).rank()))
    }

    /// Checks `f − g = d h + h d` in every degree.
    pub fn verify(&self, f: &ChainMap, g: &ChainMap) -> Result<(), ModError> {
        let (x, y) = (f.source(), f.target());
        let (lo, hi) = f.range();
        for k in lo - 1..=hi {
            let diff = f.component_matrix(k).sub(&g.component_matrix(k));
            let dh = &y.diff_matrix(k + 1) * &self.component(k, x, y);
            let hd = &self.component(k - 1, x, y) * &x.diff_matrix(k);
            if !diff.sub(&dh.add(&hd)).reduced_rows(y.term(k).moduli()).is_zero() {
                return Err(ModError::NotHomotopy(k));
            }
            if !is_well_defined(&self.component(k, x, y), x.term(k).moduli(), y.term(k + 1).moduli()) {
                return Err(ModError::NotHomotopy(k));
            }
        }
        Ok(())
    }
}

/// `cone(f)_k = X_{k−1} ⊕ Y_k` with differential `[[−d_X, 0], [−f, d_Y]]`.
pub fn cone(f: &ChainMap) -> ChainComplex {
    let (x, y) = (f.source(), f.target());
    let lo = (x.lo() + 1).min(y.lo());
    let hi = (x.hi() + 1).max(y.hi());
    let terms: Vec<FinModule> = (lo..=hi).map(|k| x.term(k - 1).direct_sum(y.term(k))).collect();
    let minus = Int::from(-1);
    let diffs = (lo + 1..=hi)
        .map(|k| {
            let (xa, ya) = (x.term(k - 1).rank(), y.term(k).rank());
            let (xb, yb) = (x.term(k - 2).rank(), y.term(k - 1).rank());
            let mut d = IntMatrix::zeros(xb + yb, xa + ya);
            d.add_block(0, 0, &x.diff_matrix(k - 1), &minus);
            d.add_block(xb, 0, &f.component_matrix(k - 1), &minus);
            d.add_block(xb, xa, &y.diff_matrix(k), &Int::from(1));
            d
        })
        .collect();
    ChainComplex::from_parts(x.algebra().clone(), lo, terms, diffs)
}

/// `fib(f) = cone(f)[−1]`.
pub fn fiber(f: &ChainMap) -> ChainComplex {
    cone(f).shift(-1)
}

/// The inclusion `Y → cone(f)` and projection `cone(f) → X[1]`.
pub fn cone_sequence(f: &ChainMap) -> (ChainMap, ChainMap) {
    let c = cone(f);
    let (x, y) = (f.source(), f.target());
    let x1 = x.shift(1);
    let (lo, hi) = c.bounds();
    let mut inc = Vec::new();
    let mut proj = Vec::new();
    for k in lo..=hi {
        let (xa, ya) = (x.term(k - 1).rank(), y.term(k).rank());
        let mut i = IntMatrix::zeros(xa + ya, ya);
        i.put_block(xa, 0, &IntMatrix::identity(ya));
        inc.push((k, i));
        let mut p = IntMatrix::zeros(xa, xa + ya);
        p.put_block(0, 0, &IntMatrix::identity(xa));
        proj.push((k, p));
    }
    (ChainMap::from_parts(y.clone(), c.clone(), inc), ChainMap::from_parts(c, x1, proj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ints;

    fn integers() -> Arc<FiniteAlgebra> {
        Arc::new(FiniteAlgebra::integers())
    }

    fn doubling() -> ChainComplex {
        let z = integers();
        let f = FinModule::free(z.clone(), 1);
        ChainComplex::new(z, 0, vec![f.clone(), f], vec![IntMatrix::from_rows(&[vec![2]])]).unwrap()
    }

    #[test]
    fn homology_of_doubling() {
        let x = doubling();
        assert_eq!(x.homology(0).module.group().to_string(), "Z/2");
        assert!(x.homology(1).module.is_zero_module());
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let x = doubling();
        assert!(cone(&ChainMap::identity(&x)).is_acyclic());
    }

    #[test]
    fn augmentation_is_quasi_iso() {
        let x = doubling();
        let z = integers();
        let q = FinModule::cyclic_quotient(z, &[ints(&[2])]);
        let target = ChainComplex::concentrated(q, 0);
        let f = ChainMap::new(x, target, vec![(0, IntMatrix::from_rows(&[vec![1]]))]).unwrap();
        assert!(quasi_iso(&f));
        let zero = ChainMap::zero(f.source(), f.target());
        assert!(!quasi_iso(&zero));
        assert!(quasi_iso(&ChainMap::identity(f.source())));
    }

    #[test]
    fn d_squared_rejected() {
        let z = Arc::new(FiniteAlgebra::zmod(4));
        let f = FinModule::free(z.clone(), 1);
        let two = IntMatrix::from_rows(&[vec![1]]);
        let res = ChainComplex::new(z, 0, vec![f.clone(), f.clone(), f], vec![two.clone(), two]);
        assert!(matches!(res, Err(ModError::DSquaredNonzero(2))));
    }

    #[test]
    fn cone_of_projection_z4_to_z2() {
        let z4 = Arc::new(FiniteAlgebra::zmod(4));
        let x = ChainComplex::concentrated(FinModule::free(z4.clone(), 1), 0);
        let y = ChainComplex::concentrated(FinModule::cyclic_quotient(z4, &[ints(&[2])]), 0);
        let f = ChainMap::new(x, y, vec![(0, IntMatrix::from_rows(&[vec![1]]))]).unwrap();
        let c = cone(&f);
        assert!(c.homology(0).module.is_zero_module());
        assert!(c.homology(-1).module.is_zero_module());
        assert_eq!(c.homology(1).module.group().to_string(), "Z/2");
    }

    #[test]
    fn shift_signs() {
        let x = doubling();
        let s = x.shift(1);
        assert_eq!(s.bounds(), (1, 2));
        assert_eq!(s.diff_matrix(2), IntMatrix::from_rows(&[vec![-2]]));
        assert_eq!(x.shift(2).diff_matrix(3), x.diff_matrix(1));
    }

    #[test]
    fn homotopy_check() {
        let x = doubling();
        let id = ChainMap::identity(&x);
        let zero = ChainMap::zero(&x, &x);
        assert!(Homotopy { comps: BTreeMap::new() }.verify(&id, &zero).is_err());
    }

    #[test]
    fn underlying_keeps_homology() {
        let a = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
        let f = FinModule::free(a.clone(), 1);
        let x_mult = IntMatrix::from_rows(&[vec![0, 0], vec![1, 0]]);
        let x = ChainComplex::new(a, 0, vec![f.clone(), f], vec![x_mult]).unwrap();
        let u = x.underlying();
        for k in 0..=1 {
            assert_eq!(x.homology(k).module.order(), u.homology(k).module.order());
        }
        assert_eq!(u.algebra().order(), Some(Int::from(2)));
    }
}
