use std::sync::Arc;

use num_traits::Zero;

use super::{FinModule, ModuleMap};
use crate::algebra::{AlgebraMap, Elem, FiniteAlgebra};
use crate::exactlin::{Int, IntMatrix};

/// An `rows × cols` matrix with entries in a finite algebra, acting on row vectors:
/// `D` defines the free-module map `A^rows → A^cols`, `x ↦ x·D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingMatrix {
    algebra: Arc<FiniteAlgebra>,
    rows: usize,
    cols: usize,
    entries: Vec<Elem>,
}

impl RingMatrix {
    pub fn zeros(algebra: Arc<FiniteAlgebra>, rows: usize, cols: usize) -> Self {
        let entries = vec![algebra.zero(); rows * cols];
        RingMatrix { algebra, rows, cols, entries }
    }

    pub fn identity(algebra: Arc<FiniteAlgebra>, n: usize) -> Self {
        let mut m = Self::zeros(algebra.clone(), n, n);
        for i in 0..n {
            m.set(i, i, algebra.unit().to_vec());
        }
        m
    }

    pub fn from_entries(algebra: Arc<FiniteAlgebra>, rows: usize, cols: usize, entries: Vec<Elem>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        let entries = entries.into_iter().map(|e| algebra.reduce(e)).collect();
        RingMatrix { algebra, rows, cols, entries }
    }

    /// Recovers the ring matrix from the integer matrix of a free-module map.
    pub fn from_int_matrix(algebra: Arc<FiniteAlgebra>, rows: usize, cols: usize, m: &IntMatrix) -> Self {
        let r = algebra.rank();
        assert_eq!(m.shape(), (cols * r, rows * r), "integer matrix shape");
        let unit_index = algebra.unit().to_vec();
        let mut out = Self::zeros(algebra.clone(), rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                // D_ij = 1·D_ij, i.e. the image of the unit of block i, read in block j.
                let mut e = vec![Int::zero(); r];
                for t in 0..r {
                    for (s, u) in unit_index.iter().enumerate() {
                        if !u.is_zero() {
                            e[t] += u * m.get(j * r + t, i * r + s);
                        }
                    }
                }
                out.set(i, j, e);
            }
        }
        out
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Elem) {
        self.entries[i * self.cols + j] = self.algebra.reduce(x);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| self.algebra.is_zero(e))
    }

    pub fn mul(&self, other: &RingMatrix) -> RingMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let a = &self.algebra;
        let mut out = Self::zeros(a.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = a.zero();
                for k in 0..self.cols {
                    acc = a.add(&acc, &a.mul(self.get(i, k), other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn add(&self, other: &RingMatrix) -> RingMatrix {
        assert_eq!(self.shape(), other.shape(), "shapes");
        let entries = self.entries.iter().zip(&other.entries).map(|(x, y)| self.algebra.add(x, y)).collect();
        RingMatrix { algebra: self.algebra.clone(), rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, other: &RingMatrix) -> RingMatrix {
        assert_eq!(self.shape(), other.shape(), "shapes");
        let entries = self.entries.iter().zip(&other.entries).map(|(x, y)| self.algebra.sub(x, y)).collect();
        RingMatrix { algebra: self.algebra.clone(), rows: self.rows, cols: self.cols, entries }
    }

    /// Applies an algebra map entrywise.
    pub fn map_entries(&self, f: &AlgebraMap) -> RingMatrix {
        assert_eq!(**f.source(), *self.algebra, "map source");
        let entries = self.entries.iter().map(|e| f.apply(e)).collect();
        RingMatrix::from_entries(f.target().clone(), self.rows, self.cols, entries)
    }

    /// Integer matrix of `x ↦ x·D` on `A^rows → A^cols`; block `(j, i)` is right
    /// multiplication by `D_ij`.
    pub fn to_int_matrix(&self) -> IntMatrix {
        let r = self.algebra.rank();
        let mut out = IntMatrix::zeros(self.cols * r, self.rows * r);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                if !self.algebra.is_zero(e) {
                    out.put_block(j * r, i * r, &self.algebra.right_mult_matrix(e));
                }
            }
        }
        out
    }

    /// Row `i` as an element of the free module `A^cols`.
    pub fn row_element(&self, i: usize) -> Elem {
        (0..self.cols).flat_map(|j| self.get(i, j).iter().cloned()).collect()
    }

    pub fn to_module_map(&self) -> ModuleMap {
        let src = FinModule::free(self.algebra.clone(), self.rows);
        let tgt = FinModule::free(self.algebra.clone(), self.cols);
        ModuleMap::new_unchecked(src, tgt, self.to_int_matrix())
    }
}

/// The basis element `g` of `A^n`: the unit in block `g`.
pub fn generator_element(algebra: &FiniteAlgebra, n: usize, g: usize) -> Elem {
    let r = algebra.rank();
    let mut v = vec![Int::zero(); n * r];
    v[g * r..(g + 1) * r].clone_from_slice(algebra.unit());
    v
}

/// Integer matrix of the map `A^n → N` sending generator `g` to `images[g]`.
pub fn free_hom_matrix(target: &FinModule, images: &[Elem]) -> IntMatrix {
    let r = target.algebra().rank();
    let mut cols = Vec::with_capacity(images.len() * r);
    for y in images {
        for a in target.action() {
            cols.push(target.reduce(a.mul_vec(y)));
        }
    }
    IntMatrix::from_columns(&cols, target.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ints;

    #[test]
    fn int_matrix_round_trip_and_composition() {
        let a = Arc::new(FiniteAlgebra::upper_triangular(2));
        let d1 = RingMatrix::from_entries(a.clone(), 1, 2, vec![ints(&[1, 1, 0]), ints(&[0, 1, 1])]);
        let d2 = RingMatrix::from_entries(a.clone(), 2, 1, vec![ints(&[0, 1, 0]), ints(&[1, 0, 1])]);
        assert_eq!(RingMatrix::from_int_matrix(a.clone(), 1, 2, &d1.to_int_matrix()), d1);
        // x ↦ (x·D1)·D2 is D2_int ∘ D1_int.
        let lhs = d1.mul(&d2).to_int_matrix().reduced_rows(&ints(&[2, 2, 2]));
        let rhs = (&d2.to_int_matrix() * &d1.to_int_matrix()).reduced_rows(&ints(&[2, 2, 2]));
        assert_eq!(lhs, rhs);
        d1.to_module_map();
        ModuleMap::new(d1.to_module_map().source().clone(), d1.to_module_map().target().clone(), d1.to_int_matrix()).unwrap();
    }
}
