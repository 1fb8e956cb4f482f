use num_integer::Integer;
use num_traits::Zero;

use super::{ChainComplex, ChainMap, FinModule, ModError, ModuleMap};
use crate::algebra::{Bimodule, Elem};
use crate::exactlin::{reduce_vec, Int, IntMatrix, Subquotient};

#[derive(Clone, Debug)]
enum Presentation {
    Quotient(Subquotient),
    /// `B ⊗_A Aⁿ = Bⁿ`: `b ⊗ a·1_g` has coordinates `b·a` in copy `g`.
    Free { right_action: Vec<IntMatrix>, moduli: Vec<Int>, generators: Vec<Elem> },
}

impl Presentation {
    fn generators(&self) -> &[Elem] {
        match self {
            Presentation::Quotient(q) => q.generators(),
            Presentation::Free { generators, .. } => generators,
        }
    }

    fn coords(&self, w: &[Int]) -> Elem {
        match self {
            Presentation::Quotient(q) => q.coords(w).expect("total"),
            Presentation::Free { right_action, moduli, .. } => {
                let (bp, r) = (right_action[0].rows(), right_action.len());
                let copies = moduli.len() / bp;
                let nq = copies * r;
                let mut out = vec![Int::zero(); moduli.len()];
                for p in 0..bp {
                    for g in 0..copies {
                        for (s, ra) in right_action.iter().enumerate() {
                            let c = &w[p * nq + g * r + s];
                            if c.is_zero() {
                                continue;
                            }
                            for p2 in 0..bp {
                                out[g * bp + p2] += c * ra.get(p2, p);
                            }
                        }
                    }
                }
                reduce_vec(&mut out, moduli);
                out
            }
        }
    }
}

/// `B ⊗_A N` for an `(A', A)`-bimodule `B` and a left `A`-module `N`, presented on the pure
/// tensors of generators and reduced to invariant-factor form. The result is a left
/// `A'`-module.
#[derive(Clone, Debug)]
pub struct TensorProduct {
    module: FinModule,
    presentation: Presentation,
    b_rank: usize,
    n_rank: usize,
}

impl TensorProduct {
    pub fn new(b: &Bimodule, n: &FinModule) -> Result<Self, ModError> {
        if **b.right_algebra() != **n.algebra() {
            return Err(ModError::AlgebraMismatch);
        }
        let (bp, nq) = (b.rank(), n.rank());
        let r = n.algebra().rank();
        if bp > 0 && r > 0 && nq % r == 0 && *n == FinModule::free(n.algebra().clone(), nq / r) {
            return Ok(Self::of_free(b, nq / r));
        }
        let ambient: Vec<Int> = (0..bp)
            .flat_map(|p| (0..nq).map(move |q| (p, q)))
            .map(|(p, q)| b.moduli()[p].gcd(&n.moduli()[q]))
            .collect();
        let idx = |p: usize, q: usize| p * nq + q;
        // (b·a) ⊗ n − b ⊗ (a·n) for each algebra generator a.
        let mut relations = Vec::new();
        for (ra, la) in b.right_action().iter().zip(n.action()) {
            for p in 0..bp {
                for q in 0..nq {
                    let mut col = vec![Int::zero(); bp * nq];
                    for p2 in 0..bp {
                        col[idx(p2, q)] += ra.get(p2, p);
                    }
                    for q2 in 0..nq {
                        col[idx(p, q2)] -= la.get(q2, q);
                    }
                    relations.push(col);
                }
            }
        }
        let presentation = Presentation::Quotient(Subquotient::quotient(&ambient, &IntMatrix::from_columns(&relations, bp * nq)));
        let reps = presentation.generators().to_vec();
        let action = b
            .left_action()
            .iter()
            .map(|l| {
                let cols: Vec<Elem> = reps
                    .iter()
                    .map(|v| {
                        let mut w = vec![Int::zero(); bp * nq];
                        for p in 0..bp {
                            for q in 0..nq {
                                let c = &v[idx(p, q)];
                                if c.is_zero() {
                                    continue;
                                }
                                for p2 in 0..bp {
                                    w[idx(p2, q)] += c * l.get(p2, p);
                                }
                            }
                        }
                        presentation.coords(&w)
                    })
                    .collect();
                IntMatrix::from_columns(&cols, reps.len())
            })
            .collect();
        let moduli = match &presentation {
            Presentation::Quotient(q) => q.moduli().to_vec(),
            Presentation::Free { .. } => unreachable!(),
        };
        let module = FinModule::new_unchecked(b.left_algebra().clone(), moduli, action);
        Ok(TensorProduct { module, presentation, b_rank: bp, n_rank: nq })
    }

    fn of_free(b: &Bimodule, copies: usize) -> Self {
        let bp = b.rank();
        let a = b.right_algebra();
        let r = a.rank();
        let nq = copies * r;
        let moduli: Vec<Int> = (0..copies).flat_map(|_| b.moduli().iter().cloned()).collect();
        let generators = (0..copies)
            .flat_map(|g| (0..bp).map(move |p| (g, p)))
            .map(|(g, p)| {
                let mut w = vec![Int::zero(); bp * nq];
                for (s, u) in a.unit().iter().enumerate() {
                    w[p * nq + g * r + s] = u.clone();
                }
                w
            })
            .collect();
        let action = b
            .left_action()
            .iter()
            .map(|l| {
                let mut m = IntMatrix::zeros(bp * copies, bp * copies);
                for g in 0..copies {
                    m.put_block(g * bp, g * bp, l);
                }
                m
            })
            .collect();
        let module = FinModule::new_unchecked(b.left_algebra().clone(), moduli.clone(), action);
        let presentation = Presentation::Free { right_action: b.right_action().to_vec(), moduli, generators };
        TensorProduct { module, presentation, b_rank: bp, n_rank: nq }
    }

    pub fn module(&self) -> &FinModule {
        &self.module
    }

    /// Coordinates of `x ⊗ y`.
    pub fn pure(&self, x: &[Int], y: &[Int]) -> Elem {
        let mut w = vec![Int::zero(); self.b_rank * self.n_rank];
        for p in 0..self.b_rank {
            for q in 0..self.n_rank {
                w[p * self.n_rank + q] = &x[p] * &y[q];
            }
        }
        self.presentation.coords(&w)
    }

    /// Representatives of the generators as combinations of pure generator tensors,
    /// indexed `p·rank(N) + q`.
    pub fn generator_tensors(&self) -> &[Elem] {
        self.presentation.generators()
    }

    /// `B ⊗ f: B ⊗ N → B ⊗ N'`.
    pub fn map(&self, f: &ModuleMap, target: &TensorProduct) -> ModuleMap {
        let (bp, nq, nq2) = (self.b_rank, self.n_rank, target.n_rank);
        assert_eq!(bp, target.b_rank, "tensor maps need the same bimodule");
        let cols: Vec<Elem> = self
            .presentation
            .generators()
            .iter()
            .map(|v| {
                let mut w = vec![Int::zero(); bp * nq2];
                for p in 0..bp {
                    for q in 0..nq {
                        let c = &v[p * nq + q];
                        if c.is_zero() {
                            continue;
                        }
                        for q2 in 0..nq2 {
                            w[p * nq2 + q2] += c * f.matrix().get(q2, q);
                        }
                    }
                }
                target.presentation.coords(&w)
            })
            .collect();
        ModuleMap::new_unchecked(self.module.clone(), target.module.clone(), IntMatrix::from_columns(&cols, target.module.rank()))
    }
}

/// `B ⊗_A N` as a left module over the left algebra of `B`.
pub fn tensor_over(b: &Bimodule, n: &FinModule) -> Result<FinModule, ModError> {
    Ok(TensorProduct::new(b, n)?.module)
}

/// Degreewise `B ⊗_A X`.
pub fn tensor_complex(b: &Bimodule, x: &ChainComplex) -> Result<ChainComplex, ModError> {
    let (lo, hi) = x.bounds();
    let tensors: Vec<TensorProduct> = (lo..=hi).map(|k| TensorProduct::new(b, x.term(k))).collect::<Result<_, _>>()?;
    let terms = tensors.iter().map(|t| t.module.clone()).collect();
    let diffs = (lo + 1..=hi)
        .map(|k| {
            let i = (k - lo) as usize;
            tensors[i].map(&x.differential(k), &tensors[i - 1]).matrix().clone()
        })
        .collect();
    Ok(ChainComplex::from_parts(b.left_algebra().clone(), lo, terms, diffs))
}

/// `B ⊗ f` for a chain map.
pub fn tensor_chain_map(b: &Bimodule, f: &ChainMap) -> Result<ChainMap, ModError> {
    let src = tensor_complex(b, f.source())?;
    let tgt = tensor_complex(b, f.target())?;
    let (lo, hi) = f.source().bounds();
    let mut comps = Vec::new();
    for k in lo..=hi {
        let ts = TensorProduct::new(b, f.source().term(k))?;
        let tt = TensorProduct::new(b, f.target().term(k))?;
        comps.push((k, ts.map(&f.component(k), &tt).matrix().clone()));
    }
    ChainMap::new(src, tgt, comps)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::{AlgebraMap, FiniteAlgebra, SquareZeroDatum};
    use crate::exactlin::ints;

    #[test]
    fn z2_tensor_z2_over_z4() {
        let a = Arc::new(FiniteAlgebra::zmod(4));
        let two = FinModule::cyclic_quotient(a.clone(), &[ints(&[2])]);
        let b = Bimodule::right_module(a.clone(), two.moduli().to_vec(), two.action().to_vec()).unwrap();
        let t = tensor_over(&b, &two).unwrap();
        assert_eq!(t.group().to_string(), "Z/2");
    }

    #[test]
    fn unit_law() {
        let a = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
        let n = FinModule::cyclic_quotient(a.clone(), &[a.basis(1)]);
        let t = tensor_over(&Bimodule::regular(a), &n).unwrap();
        assert_eq!(t.group(), n.group());
    }

    #[test]
    fn kernel_tensor_over_field() {
        let pi = AlgebraMap::new(Arc::new(FiniteAlgebra::zmod(4)), Arc::new(FiniteAlgebra::zmod(2)), IntMatrix::from_rows(&[vec![1]])).unwrap();
        let d = SquareZeroDatum::from_surjection(pi).unwrap();
        let m = FinModule::free(d.s().clone(), 1);
        let t = tensor_over(d.j(), &m).unwrap();
        assert_eq!(t.group().to_string(), "Z/2");
    }

    #[test]
    fn free_factor_matches_presented_route() {
        let a = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
        let b = Bimodule::quotient_of_regular(a.clone(), &[a.basis(1)]);
        let presented = FinModule::cyclic_quotient(a.clone(), &[]);
        let free = FinModule::free(a.clone(), 1);
        assert_eq!(tensor_over(&b, &presented).unwrap().group(), tensor_over(&b, &free).unwrap().group());
        let t = TensorProduct::new(&b, &FinModule::free(a.clone(), 2)).unwrap();
        assert_eq!(t.module().group().to_string(), "Z/2 x Z/2");
        // (x·a) ⊗ n = x ⊗ (a·n).
        let f2 = FinModule::free(a.clone(), 2);
        for s in 0..a.rank() {
            let x = vec![Int::from(1)];
            let n: Vec<Int> = (0..4).map(|i| Int::from(i as i64 % 2)).collect();
            let xa = b.act_right(&x, &a.basis(s));
            let an = f2.reduce(f2.action()[s].mul_vec(&n));
            assert_eq!(t.pure(&xa, &n), t.pure(&x, &an));
        }
    }
}
