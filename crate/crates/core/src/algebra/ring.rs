use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::AlgebraError;
use crate::exactlin::{lcm_all, reduced, solve_in, Int, IntMatrix, Subquotient};

/// Coordinates of a ring (or module) element in the chosen additive generators.
pub type Elem = Vec<Int>;

/// A finite associative unital ring given by structure constants on additive generators.
///
/// A generator of modulus zero has infinite order; that is only used for the integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    moduli: Vec<Int>,
    mul: Vec<Vec<Elem>>,
    unit: Elem,
}

impl FiniteAlgebra {
    /// Verifies well-definedness, associativity and the unit laws on generators.
    pub fn new(moduli: Vec<Int>, mul: Vec<Vec<Elem>>, unit: Elem) -> Result<Self, AlgebraError> {
        let r = moduli.len();
        if mul.len() != r || mul.iter().any(|row| row.len() != r) {
            return Err(AlgebraError::Shape(format!("structure constants must be {r}x{r}")));
        }
        if unit.len() != r || mul.iter().flatten().any(|e| e.len() != r) {
            return Err(AlgebraError::Shape(format!("elements must have {r} coordinates")));
        }
        let mul = mul.into_iter().map(|row| row.into_iter().map(|e| reduced(e, &moduli)).collect()).collect();
        let unit = reduced(unit, &moduli);
        let alg = FiniteAlgebra { moduli, mul, unit };
        alg.check()?;
        Ok(alg)
    }

    fn check(&self) -> Result<(), AlgebraError> {
        let r = self.rank();
        for i in 0..r {
            for j in 0..r {
                let p = &self.mul[i][j];
                if !self.is_zero(&self.scale(&self.moduli[i], p)) || !self.is_zero(&self.scale(&self.moduli[j], p)) {
                    return Err(AlgebraError::IllDefined(i, j));
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                let ij = &self.mul[i][j];
                for k in 0..r {
                    let left = self.mul(ij, &self.basis(k));
                    let right = self.mul(&self.basis(i), &self.mul[j][k]);
                    if left != right {
                        return Err(AlgebraError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        for i in 0..r {
            let g = self.basis(i);
            if self.mul(&self.unit, &g) != g || self.mul(&g, &self.unit) != g {
                return Err(AlgebraError::NotUnital(i));
            }
        }
        Ok(())
    }

    pub fn zmod(n: u64) -> Self {
        let n = Int::from(n);
        let one = reduced(vec![Int::one()], std::slice::from_ref(&n));
        FiniteAlgebra { moduli: vec![n], mul: vec![vec![one.clone()]], unit: one }
    }

    pub fn integers() -> Self {
        Self::zmod(0)
    }

    /// `(Z/n)[x]/(x^k)` on the basis `1, x, …, x^{k-1}`.
    pub fn trunc_poly(n: u64, k: usize) -> Self {
        assert!(k >= 1, "truncation degree must be positive");
        let m = Int::from(n);
        let moduli = vec![m; k];
        let mul = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let mut e = vec![Int::zero(); k];
                        if i + j < k {
                            e[i + j] = Int::one();
                        }
                        reduced(e, &moduli)
                    })
                    .collect()
            })
            .collect();
        let unit = reduced(unit_vec(k, 0), &moduli);
        FiniteAlgebra { moduli, mul, unit }
    }

    pub fn product(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Self {
        let (ra, rb) = (a.rank(), b.rank());
        let mut moduli = a.moduli.clone();
        moduli.extend(b.moduli.iter().cloned());
        let mut mul = vec![vec![vec![Int::zero(); ra + rb]; ra + rb]; ra + rb];
        for i in 0..ra {
            for j in 0..ra {
                mul[i][j][..ra].clone_from_slice(&a.mul[i][j]);
            }
        }
        for i in 0..rb {
            for j in 0..rb {
                mul[ra + i][ra + j][ra..].clone_from_slice(&b.mul[i][j]);
            }
        }
        let mut unit = a.unit.clone();
        unit.extend(b.unit.iter().cloned());
        FiniteAlgebra { moduli, mul, unit }
    }

    /// Upper triangular 2×2 matrices over `Z/n`, basis `e11, e12, e22`.
    pub fn upper_triangular(n: u64) -> Self {
        let m = Int::from(n);
        let moduli = vec![m.clone(); 3];
        let e = |k: usize| reduced(unit_vec(3, k), &moduli);
        let z = vec![Int::zero(); 3];
        // e11 e11 = e11, e11 e12 = e12, e12 e22 = e12, e22 e22 = e22.
        let mul = vec![vec![e(0), e(1), z.clone()], vec![z.clone(), z.clone(), e(1)], vec![z.clone(), z, e(2)]];
        let unit = reduced(vec![Int::one(), Int::zero(), Int::one()], &moduli);
        FiniteAlgebra { moduli, mul, unit }
    }

    pub fn opposite(&self) -> Self {
        let r = self.rank();
        let mul = (0..r).map(|i| (0..r).map(|j| self.mul[j][i].clone()).collect()).collect();
        FiniteAlgebra { moduli: self.moduli.clone(), mul, unit: self.unit.clone() }
    }

    /// The quotient by the two-sided ideal generated by `gens`, with the projection.
    pub fn quotient_by_ideal(self: &Arc<Self>, gens: &[Elem]) -> (Arc<FiniteAlgebra>, AlgebraMap) {
        let r = self.rank();
        let mut span = Vec::new();
        for x in gens {
            for a in 0..r {
                let ax = self.mul(&self.basis(a), x);
                for b in 0..r {
                    span.push(self.mul(&ax, &self.basis(b)));
                }
            }
        }
        let q = Subquotient::quotient(&self.moduli, &IntMatrix::from_columns(&span, r));
        let reps = q.generators().to_vec();
        let mul = reps
            .iter()
            .map(|x| reps.iter().map(|y| q.coords(&self.mul(x, y)).expect("quotient covers everything")).collect())
            .collect();
        let unit = q.coords(&self.unit).expect("quotient covers everything");
        let target = Arc::new(FiniteAlgebra { moduli: q.moduli().to_vec(), mul, unit });
        let cols: Vec<Elem> = (0..r).map(|i| q.coords(&self.basis(i)).expect("quotient covers everything")).collect();
        let matrix = IntMatrix::from_columns(&cols, target.rank());
        let map = AlgebraMap { source: self.clone(), target: target.clone(), matrix };
        (target, map)
    }

    /// Number of additive generators.
    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn moduli(&self) -> &[Int] {
        &self.moduli
    }

    pub fn structure_constant(&self, i: usize, j: usize) -> &Elem {
        &self.mul[i][j]
    }

    pub fn unit(&self) -> &Elem {
        &self.unit
    }

    pub fn zero(&self) -> Elem {
        vec![Int::zero(); self.rank()]
    }

    pub fn basis(&self, i: usize) -> Elem {
        reduced(unit_vec(self.rank(), i), &self.moduli)
    }

    pub fn is_finite(&self) -> bool {
        self.moduli.iter().all(|m| !m.is_zero())
    }

    /// Number of elements; `None` for an infinite ring.
    pub fn order(&self) -> Option<Int> {
        if !self.is_finite() {
            return None;
        }
        Some(self.moduli.iter().fold(Int::one(), |a, m| a * m))
    }

    /// Additive order of the unit (zero in characteristic zero).
    pub fn characteristic(&self) -> Int {
        if !self.is_finite() {
            return Int::zero();
        }
        let e = lcm_all(&self.moduli);
        let mut best = e.clone();
        for d in divisors(&e) {
            if self.is_zero(&self.scale(&d, &self.unit)) {
                best = d;
                break;
            }
        }
        best
    }

    pub fn reduce(&self, mut x: Elem) -> Elem {
        crate::exactlin::reduce_vec(&mut x, &self.moduli);
        x
    }

    pub fn is_zero(&self, x: &[Int]) -> bool {
        x.iter().zip(&self.moduli).all(|(v, m)| if m.is_zero() { v.is_zero() } else { v.mod_floor(m).is_zero() })
    }

    pub fn add(&self, x: &[Int], y: &[Int]) -> Elem {
        self.reduce(x.iter().zip(y).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, x: &[Int], y: &[Int]) -> Elem {
        self.reduce(x.iter().zip(y).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self, x: &[Int]) -> Elem {
        self.reduce(x.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: &Int, x: &[Int]) -> Elem {
        self.reduce(x.iter().map(|a| a * k).collect())
    }

    pub fn mul(&self, x: &[Int], y: &[Int]) -> Elem {
        let r = self.rank();
        let mut out = vec![Int::zero(); r];
        for i in 0..r {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..r {
                if y[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &y[j];
                for (o, s) in out.iter_mut().zip(&self.mul[i][j]) {
                    *o += &c * s;
                }
            }
        }
        self.reduce(out)
    }

    /// Matrix of `y ↦ x·y` (columns are images of generators).
    pub fn left_mult_matrix(&self, x: &[Int]) -> IntMatrix {
        let cols: Vec<Elem> = (0..self.rank()).map(|j| self.mul(x, &self.basis(j))).collect();
        IntMatrix::from_columns(&cols, self.rank())
    }

    /// Matrix of `y ↦ y·x` (columns are images of generators).
    pub fn right_mult_matrix(&self, x: &[Int]) -> IntMatrix {
        let cols: Vec<Elem> = (0..self.rank()).map(|j| self.mul(&self.basis(j), x)).collect();
        IntMatrix::from_columns(&cols, self.rank())
    }

    /// All elements in lexicographic coordinate order. Panics for infinite rings.
    pub fn elements(&self) -> Vec<Elem> {
        enumerate_group(&self.moduli)
    }

    /// Position of `x` in [`elements`](Self::elements).
    pub fn index_of(&self, x: &[Int]) -> usize {
        group_index(&self.moduli, x)
    }
}

/// Lexicographic enumeration of `⊕ Z/mᵢ`. Panics on an infinite factor.
pub fn enumerate_group(moduli: &[Int]) -> Vec<Elem> {
    let mut out = vec![Vec::new()];
    for m in moduli {
        let b = m.to_usize().filter(|&b| b > 0).expect("enumerating an infinite group");
        let mut next = Vec::with_capacity(out.len() * b);
        for p in &out {
            for v in 0..b {
                let mut q = p.clone();
                q.push(Int::from(v));
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Index of `x` in the lexicographic enumeration of `⊕ Z/mᵢ`.
pub fn group_index(moduli: &[Int], x: &[Int]) -> usize {
    let mut idx = 0usize;
    for (v, m) in x.iter().zip(moduli) {
        let b = m.to_usize().expect("finite modulus");
        idx = idx * b + v.mod_floor(m).to_usize().expect("small coordinate");
    }
    idx
}

fn unit_vec(n: usize, i: usize) -> Elem {
    let mut e = vec![Int::zero(); n];
    e[i] = Int::one();
    e
}

fn divisors(n: &Int) -> Vec<Int> {
    let n = n.to_u64().expect("small modulus");
    (1..=n).filter(|d| n % d == 0).map(Int::from).collect()
}

/// A ring homomorphism given by images of the source generators (columns, target coordinates).
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    source: Arc<FiniteAlgebra>,
    target: Arc<FiniteAlgebra>,
    matrix: IntMatrix,
}

impl AlgebraMap {
    pub fn new(source: Arc<FiniteAlgebra>, target: Arc<FiniteAlgebra>, matrix: IntMatrix) -> Result<Self, AlgebraError> {
        if matrix.shape() != (target.rank(), source.rank()) {
            return Err(AlgebraError::Shape("algebra map matrix has the wrong shape".into()));
        }
        let map = AlgebraMap { source, target, matrix };
        map.check()?;
        Ok(map)
    }

    fn check(&self) -> Result<(), AlgebraError> {
        let (s, t) = (&self.source, &self.target);
        for j in 0..s.rank() {
            if !t.is_zero(&t.scale(&s.moduli[j], &self.matrix.col(j))) {
                return Err(AlgebraError::MapIllDefined(j));
            }
        }
        if self.apply(s.unit()) != t.reduce(t.unit().clone()) {
            return Err(AlgebraError::MapNotUnital);
        }
        for i in 0..s.rank() {
            for j in 0..s.rank() {
                let lhs = self.apply(&s.mul[i][j]);
                let rhs = t.mul(&self.apply(&s.basis(i)), &self.apply(&s.basis(j)));
                if lhs != rhs {
                    return Err(AlgebraError::MapNotMultiplicative(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn identity(a: Arc<FiniteAlgebra>) -> Self {
        let matrix = IntMatrix::identity(a.rank());
        AlgebraMap { source: a.clone(), target: a, matrix }
    }

    pub fn source(&self) -> &Arc<FiniteAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteAlgebra> {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[Int]) -> Elem {
        self.target.reduce(self.matrix.mul_vec(x))
    }

    pub fn is_surjective(&self) -> bool {
        let t = &self.target;
        (0..t.rank()).all(|i| solve_in(&self.matrix, &t.basis(i), self.source.moduli(), t.moduli()).is_some())
    }

    pub fn compose(&self, after: &AlgebraMap) -> AlgebraMap {
        assert!(Arc::ptr_eq(&self.target, &after.source) || *self.target == *after.source, "composable maps");
        let mut matrix = &after.matrix * &self.matrix;
        matrix.reduce_rows(after.target.moduli());
        AlgebraMap { source: self.source.clone(), target: after.target.clone(), matrix }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ints;

    #[test]
    fn zmod_four_is_accepted() {
        let a = FiniteAlgebra::zmod(4);
        let again = FiniteAlgebra::new(a.moduli.clone(), a.mul.clone(), a.unit.clone()).unwrap();
        assert_eq!(again.order(), Some(Int::from(4)));
        assert_eq!(again.characteristic(), Int::from(4));
    }

    #[test]
    fn wrong_order_product_is_ill_defined() {
        // Z/2 ⊕ Z/4 with g₀·g₀ = g₁ is not bilinear: 2·g₁ ≠ 0.
        let moduli = ints(&[2, 4]);
        let mul = vec![vec![ints(&[0, 1]), ints(&[0, 0])], vec![ints(&[0, 0]), ints(&[0, 1])]];
        let err = FiniteAlgebra::new(moduli, mul, ints(&[0, 1])).unwrap_err();
        assert_eq!(err, AlgebraError::IllDefined(0, 0));
    }

    #[test]
    fn presets_pass_their_own_checks() {
        for a in [
            FiniteAlgebra::trunc_poly(2, 4),
            FiniteAlgebra::upper_triangular(2),
            FiniteAlgebra::product(&FiniteAlgebra::zmod(4), &FiniteAlgebra::zmod(2)),
            FiniteAlgebra::upper_triangular(3).opposite(),
            FiniteAlgebra::integers(),
        ] {
            FiniteAlgebra::new(a.moduli.clone(), a.mul.clone(), a.unit.clone()).unwrap();
        }
    }

    #[test]
    fn quotient_of_truncated_polynomials() {
        let a = Arc::new(FiniteAlgebra::trunc_poly(2, 4));
        let (q, pi) = a.quotient_by_ideal(&[ints(&[0, 0, 1, 0])]);
        assert_eq!(q.order(), Some(Int::from(4)));
        assert!(pi.is_surjective());
        AlgebraMap::new(pi.source().clone(), pi.target().clone(), pi.matrix().clone()).unwrap();
    }

    #[test]
    fn non_multiplicative_map_rejected() {
        let z4 = Arc::new(FiniteAlgebra::zmod(4));
        let err = AlgebraMap::new(z4.clone(), z4, IntMatrix::from_rows(&[vec![3]])).unwrap_err();
        assert_eq!(err, AlgebraError::MapNotUnital);
    }
}
