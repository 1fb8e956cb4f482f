use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};

use super::ModError;
use crate::algebra::{check_action, combine_action, AlgebraMap, Elem, FiniteAlgebra, Side};
use crate::exactlin::{kernel_in, reduce_vec, AbGroup, Int, IntMatrix, Subquotient};

/// A finitely generated left module: a group `⊕ Z/mᵢ` with one action matrix per algebra
/// generator (column `j` is the image of the `j`-th module generator).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinModule {
    algebra: Arc<FiniteAlgebra>,
    moduli: Vec<Int>,
    action: Vec<IntMatrix>,
}

impl FinModule {
    pub fn new(algebra: Arc<FiniteAlgebra>, moduli: Vec<Int>, action: Vec<IntMatrix>) -> Result<Self, ModError> {
        check_action(&algebra, &moduli, &action, Side::Left)?;
        let action = action.into_iter().map(|m| m.reduced_rows(&moduli)).collect();
        Ok(FinModule { algebra, moduli, action })
    }

    pub(crate) fn new_unchecked(algebra: Arc<FiniteAlgebra>, moduli: Vec<Int>, action: Vec<IntMatrix>) -> Self {
        let action = action.into_iter().map(|m| m.reduced_rows(&moduli)).collect();
        FinModule { algebra, moduli, action }
    }

    pub fn zero(algebra: Arc<FiniteAlgebra>) -> Self {
        let action = vec![IntMatrix::zeros(0, 0); algebra.rank()];
        FinModule { algebra, moduli: Vec::new(), action }
    }

    /// `Aⁿ` as row vectors, acted on from the left componentwise.
    pub fn free(algebra: Arc<FiniteAlgebra>, n: usize) -> Self {
        let r = algebra.rank();
        let moduli: Vec<Int> = (0..n).flat_map(|_| algebra.moduli().iter().cloned()).collect();
        let action = (0..r)
            .map(|s| {
                let l = algebra.left_mult_matrix(&algebra.basis(s));
                let mut m = IntMatrix::zeros(n * r, n * r);
                for k in 0..n {
                    m.put_block(k * r, k * r, &l);
                }
                m
            })
            .collect();
        FinModule { algebra, moduli, action }
    }

    /// `A / (left ideal generated by gens)`.
    pub fn cyclic_quotient(algebra: Arc<FiniteAlgebra>, gens: &[Elem]) -> Self {
        let free = FinModule::free(algebra, 1);
        free.quotient(gens).0
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn moduli(&self) -> &[Int] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn action(&self) -> &[IntMatrix] {
        &self.action
    }

    pub fn group(&self) -> AbGroup {
        AbGroup::from_moduli(&self.moduli)
    }

    pub fn order(&self) -> Option<Int> {
        self.group().order()
    }

    pub fn is_zero_module(&self) -> bool {
        self.group().is_trivial()
    }

    pub fn reduce(&self, mut x: Elem) -> Elem {
        reduce_vec(&mut x, &self.moduli);
        x
    }

    pub fn is_zero(&self, x: &[Int]) -> bool {
        self.reduce(x.to_vec()).iter().all(Zero::is_zero)
    }

    pub fn basis(&self, i: usize) -> Elem {
        let mut e = vec![Int::zero(); self.rank()];
        e[i] = Int::one();
        self.reduce(e)
    }

    /// Matrix of `m ↦ a·m`.
    pub fn act_matrix(&self, a: &[Int]) -> IntMatrix {
        combine_action(a, &self.action, self.rank()).reduced_rows(&self.moduli)
    }

    pub fn act(&self, a: &[Int], m: &[Int]) -> Elem {
        self.reduce(combine_action(a, &self.action, self.rank()).mul_vec(m))
    }

    /// Columns generating the submodule spanned by `gens`.
    pub fn span_columns(&self, gens: &[Elem]) -> IntMatrix {
        let mut cols = Vec::new();
        for g in gens {
            for a in &self.action {
                let mut v = a.mul_vec(g);
                reduce_vec(&mut v, &self.moduli);
                cols.push(v);
            }
        }
        IntMatrix::from_columns(&cols, self.rank())
    }

    /// The submodule generated by `gens`, with its inclusion.
    pub fn submodule(&self, gens: &[Elem]) -> (FinModule, ModuleMap) {
        let sq = Subquotient::subgroup(&self.moduli, &self.span_columns(gens));
        let reps = sq.generators().to_vec();
        let action = self
            .action
            .iter()
            .map(|a| {
                let cols: Vec<Elem> = reps.iter().map(|g| sq.coords(&a.mul_vec(g)).expect("closed under the action")).collect();
                IntMatrix::from_columns(&cols, reps.len())
            })
            .collect();
        let sub = FinModule::new_unchecked(self.algebra.clone(), sq.moduli().to_vec(), action);
        let incl = ModuleMap::new_unchecked(sub.clone(), self.clone(), IntMatrix::from_columns(&reps, self.rank()));
        (sub, incl)
    }

    /// The quotient by the submodule generated by `gens`, with the projection.
    pub fn quotient(&self, gens: &[Elem]) -> (FinModule, ModuleMap) {
        let sq = Subquotient::quotient(&self.moduli, &self.span_columns(gens));
        let reps = sq.generators().to_vec();
        let action = self
            .action
            .iter()
            .map(|a| {
                let cols: Vec<Elem> = reps.iter().map(|g| sq.coords(&a.mul_vec(g)).expect("total")).collect();
                IntMatrix::from_columns(&cols, reps.len())
            })
            .collect();
        let q = FinModule::new_unchecked(self.algebra.clone(), sq.moduli().to_vec(), action);
        let cols: Vec<Elem> = (0..self.rank()).map(|i| sq.coords(&self.basis(i)).expect("total")).collect();
        let proj = ModuleMap::new_unchecked(self.clone(), q.clone(), IntMatrix::from_columns(&cols, q.rank()));
        (q, proj)
    }

    pub fn direct_sum(&self, other: &FinModule) -> FinModule {
        assert_eq!(*self.algebra, *other.algebra, "direct sum over different algebras");
        let (n, m) = (self.rank(), other.rank());
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| {
                let mut out = IntMatrix::zeros(n + m, n + m);
                out.put_block(0, 0, a);
                out.put_block(n, n, b);
                out
            })
            .collect();
        let mut moduli = self.moduli.clone();
        moduli.extend(other.moduli.iter().cloned());
        FinModule { algebra: self.algebra.clone(), moduli, action }
    }

    /// `Mⁿ`.
    pub fn power(&self, n: usize) -> FinModule {
        (0..n).fold(FinModule::zero(self.algebra.clone()), |acc, _| acc.direct_sum(self))
    }

    /// Restriction of scalars along `f: B → A`.
    pub fn restrict_scalars(&self, f: &AlgebraMap) -> FinModule {
        assert_eq!(**f.target(), *self.algebra, "restriction along a map into another algebra");
        let b = f.source();
        let action = (0..b.rank()).map(|s| self.act_matrix(&f.apply(&b.basis(s)))).collect();
        FinModule { algebra: b.clone(), moduli: self.moduli.clone(), action }
    }

    /// The underlying module over the prime ring `Z/c` (`c` the characteristic, `Z` if zero).
    pub fn underlying(&self) -> FinModule {
        self.restrict_scalars(&prime_map(&self.algebra))
    }
}

/// The unique ring map from `Z/char(A)` into `A`.
pub fn prime_map(a: &Arc<FiniteAlgebra>) -> AlgebraMap {
    let c = a.characteristic();
    let base = Arc::new(FiniteAlgebra::zmod(u64::try_from(&c).expect("small characteristic")));
    let matrix = IntMatrix::from_columns(std::slice::from_ref(a.unit()), a.rank());
    AlgebraMap::new(base, a.clone(), matrix).expect("prime ring map")
}

/// An `A`-linear map given by the images of the source generators (columns).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    source: FinModule,
    target: FinModule,
    matrix: IntMatrix,
}

impl ModuleMap {
    pub fn new(source: FinModule, target: FinModule, matrix: IntMatrix) -> Result<Self, ModError> {
        if *source.algebra != *target.algebra {
            return Err(ModError::AlgebraMismatch);
        }
        if matrix.shape() != (target.rank(), source.rank()) {
            return Err(ModError::Shape(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        let map = ModuleMap::new_unchecked(source, target, matrix);
        map.check()?;
        Ok(map)
    }

    pub(crate) fn new_unchecked(source: FinModule, target: FinModule, matrix: IntMatrix) -> Self {
        let matrix = matrix.reduced_rows(&target.moduli);
        ModuleMap { source, target, matrix }
    }

    pub fn zero(source: FinModule, target: FinModule) -> Self {
        let matrix = IntMatrix::zeros(target.rank(), source.rank());
        ModuleMap { source, target, matrix }
    }

    pub fn identity(m: FinModule) -> Self {
        let matrix = IntMatrix::identity(m.rank()).reduced_rows(&m.moduli);
        ModuleMap { source: m.clone(), target: m, matrix }
    }

    fn check(&self) -> Result<(), ModError> {
        if !is_well_defined(&self.matrix, &self.source.moduli, &self.target.moduli) {
            return Err(ModError::NotWellDefined);
        }
        for (s, (a, b)) in self.source.action.iter().zip(&self.target.action).enumerate() {
            let lhs = &self.matrix * a;
            let rhs = b * &self.matrix;
            if !lhs.sub(&rhs).reduced_rows(&self.target.moduli).is_zero() {
                return Err(ModError::NotLinear(s));
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &FinModule {
        &self.source
    }

    pub fn target(&self) -> &FinModule {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[Int]) -> Elem {
        self.target.reduce(self.matrix.mul_vec(x))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModuleMap) -> ModuleMap {
        ModuleMap::new_unchecked(self.source.clone(), other.target.clone(), &other.matrix * &self.matrix)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn kernel(&self) -> IntMatrix {
        kernel_in(&self.matrix, &self.source.moduli, &self.target.moduli)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().cols() == 0
    }

    pub fn is_surjective(&self) -> bool {
        Subquotient::quotient(&self.target.moduli, &self.matrix).group().is_trivial()
    }
}

/// Whether `A` is a homomorphism `⊕Z/sⱼ → ⊕Z/tᵢ`: `sⱼ` kills column `j`.
pub fn is_well_defined(a: &IntMatrix, source: &[Int], target: &[Int]) -> bool {
    (0..a.cols()).all(|j| {
        let mut col = a.col(j);
        for x in &mut col {
            *x *= &source[j];
        }
        reduce_vec(&mut col, target);
        col.iter().all(Zero::is_zero)
    })
}

/// `Hom_A(M, N)` with generating maps.
#[derive(Clone, Debug)]
pub struct HomGroup {
    pub group: AbGroup,
    pub generators: Vec<ModuleMap>,
}

/// Computes `Hom_A(M, N)` by solving the linearity constraints inside `Hom_Z(M, N)`.
pub fn hom_group(m: &FinModule, n: &FinModule) -> Result<HomGroup, ModError> {
    if *m.algebra != *n.algebra {
        return Err(ModError::AlgebraMismatch);
    }
    // Parameters: entry (i, j) of the matrix is step·t with t ∈ Z/g.
    let mut params: Vec<(usize, usize, Int)> = Vec::new();
    let mut param_moduli = Vec::new();
    for i in 0..n.rank() {
        for j in 0..m.rank() {
            let (mj, ni) = (&m.moduli[j], &n.moduli[i]);
            if ni.is_zero() {
                if mj.is_zero() {
                    params.push((i, j, Int::one()));
                    param_moduli.push(Int::zero());
                }
            } else {
                let g = mj.gcd(ni);
                if !g.is_one() {
                    params.push((i, j, ni / &g));
                    param_moduli.push(g);
                }
            }
        }
    }
    let to_matrix = |t: &[Int]| {
        let mut mat = IntMatrix::zeros(n.rank(), m.rank());
        for ((i, j, step), v) in params.iter().zip(t) {
            mat.set(*i, *j, step * v);
        }
        mat.reduced_rows(&n.moduli)
    };
    let mut rows: Vec<Vec<Int>> = Vec::new();
    let mut row_moduli = Vec::new();
    let unit_param = |k: usize| {
        let mut t = vec![Int::zero(); params.len()];
        t[k] = Int::one();
        t
    };
    let basis_maps: Vec<IntMatrix> = (0..params.len()).map(|k| to_matrix(&unit_param(k))).collect();
    for (a, b) in m.action.iter().zip(&n.action) {
        let defects: Vec<IntMatrix> = basis_maps.iter().map(|phi| (phi * a).sub(&(b * phi))).collect();
        for i in 0..n.rank() {
            for j in 0..m.rank() {
                rows.push(defects.iter().map(|d| d.get(i, j).clone()).collect());
                row_moduli.push(n.moduli[i].clone());
            }
        }
    }
    let constraint = IntMatrix::from_big_rows(rows, params.len());
    let kernel = kernel_in(&constraint, &param_moduli, &row_moduli);
    let sq = Subquotient::subgroup(&param_moduli, &kernel);
    let generators = sq
        .generators()
        .iter()
        .map(|t| ModuleMap::new_unchecked(m.clone(), n.clone(), to_matrix(t)))
        .collect();
    Ok(HomGroup { group: sq.group().clone(), generators })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ints;

    fn z(n: u64) -> Arc<FiniteAlgebra> {
        Arc::new(FiniteAlgebra::zmod(n))
    }

    #[test]
    fn hom_z2_to_z4_over_z4() {
        let a = z(4);
        let m = FinModule::cyclic_quotient(a.clone(), &[ints(&[2])]);
        let n = FinModule::free(a, 1);
        let h = hom_group(&m, &n).unwrap();
        assert_eq!(h.group.to_string(), "Z/2");
        assert_eq!(h.generators[0].apply(&ints(&[1])), ints(&[2]));
        // Oracle: of the 4 additive maps Z/2 → Z/4 (1 ↦ 0, 1, 2, 3) only 0 and 2 are defined.
        let valid: Vec<i64> = (0..4).filter(|v| (2 * v) % 4 == 0).collect();
        assert_eq!(valid, vec![0, 2]);
    }

    #[test]
    fn hom_from_free_is_evaluation() {
        let a = z(4);
        let n = FinModule::cyclic_quotient(a.clone(), &[ints(&[2])]);
        let h = hom_group(&FinModule::free(a, 1), &n).unwrap();
        assert_eq!(h.group, n.group());
    }

    #[test]
    fn hom_over_field() {
        let k = z(2);
        let h = hom_group(&FinModule::free(k.clone(), 1), &FinModule::free(k, 1)).unwrap();
        assert_eq!(h.group.to_string(), "Z/2");
    }

    #[test]
    fn restriction_along_projection() {
        let z4 = z(4);
        let z2 = z(2);
        let pi = AlgebraMap::new(z4, z2.clone(), IntMatrix::from_rows(&[vec![1]])).unwrap();
        let m = FinModule::free(z2, 1).restrict_scalars(&pi);
        assert_eq!(m.act(&ints(&[2]), &ints(&[1])), ints(&[0]));
        FinModule::new(m.algebra().clone(), m.moduli().to_vec(), m.action().to_vec()).unwrap();
    }

    #[test]
    fn restriction_along_identity_is_identity() {
        let a = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
        let m = FinModule::free(a.clone(), 2);
        assert_eq!(m.restrict_scalars(&AlgebraMap::identity(a)), m);
    }

    #[test]
    fn nonlinear_map_rejected() {
        let a = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
        let free = FinModule::free(a.clone(), 1);
        // 1 ↦ 1, x ↦ 0 is additive but does not commute with x.
        let res = ModuleMap::new(free.clone(), free, IntMatrix::from_rows(&[vec![1, 0], vec![0, 0]]));
        assert!(matches!(res, Err(ModError::NotLinear(_))));
    }
}
