use std::sync::Arc;

use num_traits::Zero;

use super::{AlgebraError, AlgebraMap, Elem, FiniteAlgebra, Side};
use crate::exactlin::{reduce_vec, Int, IntMatrix, Subquotient};

/// `Σ xₛ Aₛ` for generator-wise action matrices.
pub fn combine_action(x: &[Int], mats: &[IntMatrix], dim: usize) -> IntMatrix {
    let mut out = IntMatrix::zeros(dim, dim);
    for (c, m) in x.iter().zip(mats) {
        if !c.is_zero() {
            out.add_block(0, 0, m, c);
        }
    }
    out
}

fn same_map(a: &IntMatrix, b: &IntMatrix, moduli: &[Int]) -> bool {
    a.sub(b).reduced_rows(moduli).is_zero()
}

/// Checks that `mats` (one per algebra generator) define a unital associative action on
/// `⊕ Z/moduli`. On the right the action of `x` sends `m` to `m·x`.
pub fn check_action(alg: &FiniteAlgebra, moduli: &[Int], mats: &[IntMatrix], side: Side) -> Result<(), AlgebraError> {
    let n = moduli.len();
    if mats.len() != alg.rank() || mats.iter().any(|m| m.shape() != (n, n)) {
        return Err(AlgebraError::Shape(format!("{side} action needs {} matrices of size {n}x{n}", alg.rank())));
    }
    for (s, m) in mats.iter().enumerate() {
        for j in 0..n {
            let mut col = m.col(j);
            for x in &mut col {
                *x *= &moduli[j];
            }
            reduce_vec(&mut col, moduli);
            if col.iter().any(|x| !x.is_zero()) {
                return Err(AlgebraError::ActionIllDefined { side, generator: s });
            }
        }
        if !m.scale(&alg.moduli()[s]).reduced_rows(moduli).is_zero() {
            return Err(AlgebraError::ActionIllDefined { side, generator: s });
        }
    }
    if !same_map(&combine_action(alg.unit(), mats, n), &IntMatrix::identity(n), moduli) {
        return Err(AlgebraError::ActionNotUnital { side });
    }
    for a in 0..alg.rank() {
        for b in 0..alg.rank() {
            let lhs = combine_action(alg.structure_constant(a, b), mats, n);
            let rhs = match side {
                Side::Left => &mats[a] * &mats[b],
                Side::Right => &mats[b] * &mats[a],
            };
            if !same_map(&lhs, &rhs, moduli) {
                return Err(AlgebraError::ActionNotAssociative { side, i: a, j: b });
            }
        }
    }
    Ok(())
}

/// A finite abelian group with commuting left `A`- and right `B`-actions.
#[derive(Clone, Debug)]
pub struct Bimodule {
    left: Arc<FiniteAlgebra>,
    right: Arc<FiniteAlgebra>,
    moduli: Vec<Int>,
    left_action: Vec<IntMatrix>,
    right_action: Vec<IntMatrix>,
}

impl Bimodule {
    pub fn new(
        left: Arc<FiniteAlgebra>,
        right: Arc<FiniteAlgebra>,
        moduli: Vec<Int>,
        left_action: Vec<IntMatrix>,
        right_action: Vec<IntMatrix>,
    ) -> Result<Self, AlgebraError> {
        check_action(&left, &moduli, &left_action, Side::Left)?;
        check_action(&right, &moduli, &right_action, Side::Right)?;
        for (i, l) in left_action.iter().enumerate() {
            for (j, r) in right_action.iter().enumerate() {
                if !same_map(&(l * r), &(r * l), &moduli) {
                    return Err(AlgebraError::ActionsDoNotCommute(i, j));
                }
            }
        }
        let reduce = |v: Vec<IntMatrix>| v.into_iter().map(|m| m.reduced_rows(&moduli)).collect::<Vec<_>>();
        let left_action = reduce(left_action);
        let right_action = reduce(right_action);
        Ok(Bimodule { left, right, moduli, left_action, right_action })
    }

    /// `A` as a bimodule over itself.
    pub fn regular(a: Arc<FiniteAlgebra>) -> Self {
        let left_action = (0..a.rank()).map(|s| a.left_mult_matrix(&a.basis(s))).collect();
        let right_action = (0..a.rank()).map(|s| a.right_mult_matrix(&a.basis(s))).collect();
        Bimodule { left: a.clone(), right: a.clone(), moduli: a.moduli().to_vec(), left_action, right_action }
    }

    pub fn zero(left: Arc<FiniteAlgebra>, right: Arc<FiniteAlgebra>) -> Self {
        let left_action = vec![IntMatrix::zeros(0, 0); left.rank()];
        let right_action = vec![IntMatrix::zeros(0, 0); right.rank()];
        Bimodule { left, right, moduli: Vec::new(), left_action, right_action }
    }

    /// `A/I` for the two-sided ideal generated by `gens`, as an `(A, A)`-bimodule.
    pub fn quotient_of_regular(a: Arc<FiniteAlgebra>, gens: &[Elem]) -> Self {
        let (q, pi) = a.quotient_by_ideal(gens);
        let reg = Bimodule::regular(q);
        reg.restrict(&pi, &pi)
    }

    /// A right `B`-module viewed as a `(Z/c, B)`-bimodule, `c` the characteristic of `B`.
    pub fn right_module(right: Arc<FiniteAlgebra>, moduli: Vec<Int>, right_action: Vec<IntMatrix>) -> Result<Self, AlgebraError> {
        let c = right.characteristic();
        let base = Arc::new(FiniteAlgebra::zmod(u64::try_from(&c).expect("small characteristic")));
        let left_action = vec![IntMatrix::identity(moduli.len())];
        Bimodule::new(base, right, moduli, left_action, right_action)
    }

    pub fn left_algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.left
    }

    pub fn right_algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.right
    }

    pub fn moduli(&self) -> &[Int] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn left_action(&self) -> &[IntMatrix] {
        &self.left_action
    }

    pub fn right_action(&self) -> &[IntMatrix] {
        &self.right_action
    }

    pub fn order(&self) -> Option<Int> {
        crate::exactlin::AbGroup::from_moduli(&self.moduli).order()
    }

    pub fn reduce(&self, mut x: Elem) -> Elem {
        reduce_vec(&mut x, &self.moduli);
        x
    }

    /// `a·m` for `a` in the left algebra.
    pub fn act_left(&self, a: &[Int], m: &[Int]) -> Elem {
        self.reduce(combine_action(a, &self.left_action, self.rank()).mul_vec(m))
    }

    /// `m·b` for `b` in the right algebra.
    pub fn act_right(&self, m: &[Int], b: &[Int]) -> Elem {
        self.reduce(combine_action(b, &self.right_action, self.rank()).mul_vec(m))
    }

    pub fn left_matrix(&self, a: &[Int]) -> IntMatrix {
        combine_action(a, &self.left_action, self.rank()).reduced_rows(&self.moduli)
    }

    pub fn right_matrix(&self, b: &[Int]) -> IntMatrix {
        combine_action(b, &self.right_action, self.rank()).reduced_rows(&self.moduli)
    }

    /// Two-sided restriction of scalars along `f: A' → A` (left) and `g: B' → B` (right).
    pub fn restrict(&self, f: &AlgebraMap, g: &AlgebraMap) -> Bimodule {
        assert_eq!(**f.target(), *self.left, "left restriction target");
        assert_eq!(**g.target(), *self.right, "right restriction target");
        let left_action =
            (0..f.source().rank()).map(|s| self.left_matrix(&f.apply(&f.source().basis(s)))).collect();
        let right_action =
            (0..g.source().rank()).map(|s| self.right_matrix(&g.apply(&g.source().basis(s)))).collect();
        Bimodule {
            left: f.source().clone(),
            right: g.source().clone(),
            moduli: self.moduli.clone(),
            left_action,
            right_action,
        }
    }

    /// The sub-bimodule generated by the given elements.
    pub fn span(&self, gens: &[Elem]) -> Subquotient {
        let mut cols = Vec::new();
        for g in gens {
            for a in 0..self.left.rank() {
                let ag = self.act_left(&self.left.basis(a), g);
                for b in 0..self.right.rank() {
                    cols.push(self.act_right(&ag, &self.right.basis(b)));
                }
            }
        }
        Subquotient::subgroup(&self.moduli, &IntMatrix::from_columns(&cols, self.rank()))
    }

    /// Direct sum on underlying groups and actions.
    pub fn direct_sum(&self, other: &Bimodule) -> Bimodule {
        assert_eq!(*self.left, *other.left, "left algebras differ");
        assert_eq!(*self.right, *other.right, "right algebras differ");
        let (n, m) = (self.rank(), other.rank());
        let block = |a: &IntMatrix, b: &IntMatrix| {
            let mut out = IntMatrix::zeros(n + m, n + m);
            out.put_block(0, 0, a);
            out.put_block(n, n, b);
            out
        };
        let left_action = self.left_action.iter().zip(&other.left_action).map(|(a, b)| block(a, b)).collect();
        let right_action = self.right_action.iter().zip(&other.right_action).map(|(a, b)| block(a, b)).collect();
        let mut moduli = self.moduli.clone();
        moduli.extend(other.moduli.iter().cloned());
        Bimodule { left: self.left.clone(), right: self.right.clone(), moduli, left_action, right_action }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ints;

    #[test]
    fn regular_bimodule_is_valid() {
        let a = Arc::new(FiniteAlgebra::upper_triangular(2));
        let b = Bimodule::regular(a.clone());
        Bimodule::new(a.clone(), a, b.moduli.clone(), b.left_action.clone(), b.right_action.clone()).unwrap();
    }

    #[test]
    fn non_commuting_actions_rejected() {
        // x acts on (Z/2)² by a nilpotent on the left and by its transpose on the right.
        let a = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
        let n = IntMatrix::from_rows(&[vec![0, 1], vec![0, 0]]);
        let id = IntMatrix::identity(2);
        let res = Bimodule::new(a.clone(), a, ints(&[2, 2]), vec![id.clone(), n.clone()], vec![id, n.transpose()]);
        assert!(matches!(res, Err(AlgebraError::ActionsDoNotCommute(1, 1))));
    }

    #[test]
    fn quotient_bimodule_kills_x() {
        let s = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
        let k = Bimodule::quotient_of_regular(s.clone(), &[s.basis(1)]);
        assert_eq!(k.rank(), 1);
        assert!(k.act_left(&s.basis(1), &ints(&[1])).iter().all(|x| x.is_zero()));
        assert!(k.act_right(&ints(&[1]), &s.basis(1)).iter().all(|x| x.is_zero()));
    }
}
