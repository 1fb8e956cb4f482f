use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{enumerate_group, AlgebraError, AlgebraMap, Bimodule, Elem, FiniteAlgebra};
use crate::exactlin::{kernel_in, lcm_all, solve_in, Int, IntMatrix, LinearSystem, Subquotient};

/// How preimages of elements of `S` are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionChoice {
    /// The lexicographically smallest preimage in each fibre.
    Canonical,
    /// A uniformly random preimage in each fibre, reproducible from the seed.
    Seeded(u64),
}

/// A surjection `π: R → S` with square-zero kernel `J`, `J` carried as an `(S, S)`-bimodule,
/// together with an element-wise section of `π`.
#[derive(Clone, Debug)]
pub struct SquareZeroDatum {
    r: Arc<FiniteAlgebra>,
    s: Arc<FiniteAlgebra>,
    pi: AlgebraMap,
    j: Bimodule,
    incl: IntMatrix,
    incl_solver: LinearSystem,
    section: Vec<Elem>,
    choice: SectionChoice,
}

impl SquareZeroDatum {
    fn assemble(pi: AlgebraMap, j: Bimodule, incl: IntMatrix, choice: SectionChoice) -> Result<Self, AlgebraError> {
        let r = pi.source().clone();
        let s = pi.target().clone();
        if !r.is_finite() || !s.is_finite() {
            return Err(AlgebraError::Infinite);
        }
        let incl_solver = LinearSystem::new(&incl, j.moduli(), r.moduli());
        let mut datum = SquareZeroDatum { r, s, pi, j, incl, incl_solver, section: Vec::new(), choice };
        datum.section = datum.build_section(choice);
        datum.verify()?;
        Ok(datum)
    }

    /// Checks surjectivity, `J·J = 0`, the bimodule structure on `J`, and the section.
    pub fn verify(&self) -> Result<(), AlgebraError> {
        let (r, s) = (&self.r, &self.s);
        if !self.pi.is_surjective() {
            return Err(AlgebraError::NotSurjective);
        }
        let jg: Vec<Elem> = (0..self.j.rank()).map(|q| self.include(&self.j_basis(q))).collect();
        for g in &jg {
            if !s.is_zero(&self.pi.apply(g)) {
                return Err(AlgebraError::Shape("J is not contained in the kernel".into()));
            }
        }
        let kernel = kernel_in(self.pi.matrix(), r.moduli(), s.moduli());
        let ker = Subquotient::subgroup(r.moduli(), &kernel);
        let image = Subquotient::subgroup(r.moduli(), &self.incl);
        if ker.group() != image.group() {
            return Err(AlgebraError::Shape("J does not exhaust the kernel".into()));
        }
        for a in &jg {
            for b in &jg {
                let p = r.mul(a, b);
                if !r.is_zero(&p) {
                    return Err(AlgebraError::KernelNotSquareZero { left: a.clone(), right: b.clone(), product: p });
                }
            }
        }
        for t in 0..s.rank() {
            let lift = self.lift(&s.basis(t));
            for (q, g) in jg.iter().enumerate() {
                let left = self.include(&self.j.act_left(&s.basis(t), &self.j_basis(q)));
                let right = self.include(&self.j.act_right(&self.j_basis(q), &s.basis(t)));
                if left != r.mul(&lift, g) || right != r.mul(g, &lift) {
                    return Err(AlgebraError::Shape("J actions disagree with multiplication in R".into()));
                }
            }
        }
        for x in s.elements() {
            if self.pi.apply(&self.lift(&x)) != x {
                return Err(AlgebraError::Shape("section is not a section".into()));
            }
        }
        Ok(())
    }

    fn build_section(&self, choice: SectionChoice) -> Vec<Elem> {
        let (r, s) = (&self.r, &self.s);
        let fibre_offsets: Vec<Elem> =
            enumerate_group(self.j.moduli()).iter().map(|c| self.include(c)).collect();
        let mut rng = match choice {
            SectionChoice::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            SectionChoice::Canonical => None,
        };
        s.elements()
            .into_iter()
            .map(|x| {
                let p0 = solve_in(self.pi.matrix(), &x, r.moduli(), s.moduli()).expect("surjective");
                match rng.as_mut() {
                    Some(rng) => {
                        let k = rng.gen_range(0..fibre_offsets.len());
                        r.add(&p0, &fibre_offsets[k])
                    }
                    None => fibre_offsets.iter().map(|o| r.add(&p0, o)).min().expect("nonempty fibre"),
                }
            })
            .collect()
    }

    /// The same datum with a different preimage section.
    pub fn with_section(&self, choice: SectionChoice) -> Self {
        let mut out = self.clone();
        out.section = out.build_section(choice);
        out.choice = choice;
        out
    }

    pub fn section_choice(&self) -> SectionChoice {
        self.choice
    }

    pub fn r(&self) -> &Arc<FiniteAlgebra> {
        &self.r
    }

    pub fn s(&self) -> &Arc<FiniteAlgebra> {
        &self.s
    }

    pub fn pi(&self) -> &AlgebraMap {
        &self.pi
    }

    pub fn j(&self) -> &Bimodule {
        &self.j
    }

    /// Columns: the generators of `J` as elements of `R`.
    pub fn inclusion(&self) -> &IntMatrix {
        &self.incl
    }

    fn j_basis(&self, q: usize) -> Elem {
        let mut e = vec![Int::zero(); self.j.rank()];
        e[q] = Int::one();
        self.j.reduce(e)
    }

    /// `ι: J → R`.
    pub fn include(&self, x: &[Int]) -> Elem {
        self.r.reduce(self.incl.mul_vec(x))
    }

    /// Coordinates in `J` of an element of `R`, if it lies in `J`.
    pub fn j_coords(&self, x: &[Int]) -> Option<Elem> {
        self.incl_solver.solve(x)
    }

    /// The chosen preimage of `x ∈ S`.
    pub fn lift(&self, x: &[Int]) -> Elem {
        self.section[self.s.index_of(x)].clone()
    }

    pub fn section_table(&self) -> &[Elem] {
        &self.section
    }

    /// Whether `R ≅ S ⊕ J` as rings along the section (that is, the section is multiplicative
    /// and additive).
    pub fn section_is_ring_map(&self) -> bool {
        let s = &self.s;
        let els = s.elements();
        els.iter().all(|x| {
            els.iter().all(|y| {
                self.lift(&s.add(x, y)) == self.r.add(&self.lift(x), &self.lift(y))
                    && self.lift(&s.mul(x, y)) == self.r.mul(&self.lift(x), &self.lift(y))
            })
        })
    }

    /// Verifies that `π` is surjective with square-zero kernel and assembles the datum.
    pub fn from_surjection(pi: AlgebraMap) -> Result<Self, AlgebraError> {
        let r = pi.source().clone();
        let s = pi.target().clone();
        if !r.is_finite() || !s.is_finite() {
            return Err(AlgebraError::Infinite);
        }
        if !pi.is_surjective() {
            return Err(AlgebraError::NotSurjective);
        }
        let kernel = kernel_in(pi.matrix(), r.moduli(), s.moduli());
        let ker = Subquotient::subgroup(r.moduli(), &kernel);
        let gens = ker.generators().to_vec();
        for a in &gens {
            for b in &gens {
                let p = r.mul(a, b);
                if !r.is_zero(&p) {
                    return Err(AlgebraError::KernelNotSquareZero { left: a.clone(), right: b.clone(), product: p });
                }
            }
        }
        let incl = IntMatrix::from_columns(&gens, r.rank());
        let moduli = ker.moduli().to_vec();
        let solver = LinearSystem::new(&incl, &moduli, r.moduli());
        let preimage = |t: usize| solve_in(pi.matrix(), &s.basis(t), r.moduli(), s.moduli()).expect("surjective");
        let mut left = Vec::new();
        let mut right = Vec::new();
        for t in 0..s.rank() {
            let p = preimage(t);
            let lcols: Vec<Elem> =
                gens.iter().map(|g| solver.solve(&r.mul(&p, g)).expect("J is an ideal")).collect();
            let rcols: Vec<Elem> =
                gens.iter().map(|g| solver.solve(&r.mul(g, &p)).expect("J is an ideal")).collect();
            left.push(IntMatrix::from_columns(&lcols, gens.len()));
            right.push(IntMatrix::from_columns(&rcols, gens.len()));
        }
        let j = Bimodule::new(s.clone(), s.clone(), moduli, left, right)?;
        Self::assemble(pi, j, incl, SectionChoice::Canonical)
    }
}

/// `S ⋉ I`: the group `S ⊕ I` with `(a, m)(a', m') = (aa', a·m' + m·a')`.
pub fn split_square_zero(s: Arc<FiniteAlgebra>, i: &Bimodule) -> SquareZeroDatum {
    assert_eq!(**i.left_algebra(), *s, "bimodule must be over S on the left");
    assert_eq!(**i.right_algebra(), *s, "bimodule must be over S on the right");
    let (rs, ri) = (s.rank(), i.rank());
    let n = rs + ri;
    let mut moduli = s.moduli().to_vec();
    moduli.extend(i.moduli().iter().cloned());
    let mut mul = vec![vec![vec![Int::zero(); n]; n]; n];
    for a in 0..rs {
        for b in 0..rs {
            mul[a][b][..rs].clone_from_slice(s.structure_constant(a, b));
        }
        for q in 0..ri {
            let col = i.left_action()[a].col(q);
            mul[a][rs + q][rs..].clone_from_slice(&col);
            let col = i.right_action()[a].col(q);
            mul[rs + q][a][rs..].clone_from_slice(&col);
        }
    }
    let mut unit = s.unit().clone();
    unit.extend(std::iter::repeat_n(Int::zero(), ri));
    let r = Arc::new(FiniteAlgebra::new(moduli, mul, unit).expect("split extension of a valid bimodule"));
    let proj = IntMatrix::from_fn(rs, n, |a, b| if a == b { Int::one() } else { Int::zero() });
    let pi = AlgebraMap::new(r.clone(), s.clone(), proj).expect("projection is a ring map");
    let incl = IntMatrix::from_fn(n, ri, |a, q| if a == rs + q { Int::one() } else { Int::zero() });
    let j = i.clone();
    let mut datum = SquareZeroDatum::assemble(pi, j, incl, SectionChoice::Canonical).expect("split datum is valid");
    // The additive section s ↦ (s, 0); it is also the canonical one.
    datum.section = s
        .elements()
        .into_iter()
        .map(|x| {
            let mut v = x.clone();
            v.extend(std::iter::repeat_n(Int::zero(), ri));
            v
        })
        .collect();
    datum
}

/// Element tables for a square-zero extension `S ⊕ I`:
/// `(s, j) + (s', j') = (s + s', j + j' + a(s, s'))` and
/// `(s, j)(s', j') = (ss', s·j' + j·s' + f(s, s'))`, indexed by element indices of `S`.
#[derive(Clone, Debug)]
pub struct CocycleTables {
    pub additive: Vec<Vec<Elem>>,
    pub multiplicative: Vec<Vec<Elem>>,
}

impl CocycleTables {
    pub fn zero(s: &FiniteAlgebra, i: &Bimodule) -> Self {
        let n = s.elements().len();
        let z = vec![Int::zero(); i.rank()];
        CocycleTables { additive: vec![vec![z.clone(); n]; n], multiplicative: vec![vec![z; n]; n] }
    }
}

struct TableExt<'a> {
    s: &'a FiniteAlgebra,
    i: &'a Bimodule,
    els: Vec<Elem>,
    t: &'a CocycleTables,
}

impl TableExt<'_> {
    fn idx(&self, x: &[Int]) -> usize {
        self.s.index_of(x)
    }

    fn add(&self, x: &(Elem, Elem), y: &(Elem, Elem)) -> (Elem, Elem) {
        let carry = &self.t.additive[self.idx(&x.0)][self.idx(&y.0)];
        let j: Elem = x.1.iter().zip(&y.1).zip(carry).map(|((a, b), c)| a + b + c).collect();
        (self.s.add(&x.0, &y.0), self.i.reduce(j))
    }

    fn mul(&self, x: &(Elem, Elem), y: &(Elem, Elem)) -> (Elem, Elem) {
        let f = &self.t.multiplicative[self.idx(&x.0)][self.idx(&y.0)];
        let a = self.i.act_left(&x.0, &y.1);
        let b = self.i.act_right(&x.1, &y.0);
        let j: Elem = a.iter().zip(&b).zip(f).map(|((p, q), r)| p + q + r).collect();
        (self.s.mul(&x.0, &y.0), self.i.reduce(j))
    }

    fn scalar(&self, k: &Int, x: &(Elem, Elem)) -> (Elem, Elem) {
        // k is reduced modulo a multiple of the additive order of x.
        let bound = lcm_all(self.s.moduli()) * lcm_all(self.i.moduli());
        let k = k.mod_floor(&bound).to_usize().expect("small multiplier");
        let mut acc = (self.s.zero(), vec![Int::zero(); self.i.rank()]);
        for _ in 0..k {
            acc = self.add(&acc, x);
        }
        acc
    }

    fn check(&self) -> Result<(), AlgebraError> {
        let n = self.els.len();
        let zero_s = self.idx(&self.s.zero());
        let one_s = self.idx(self.s.unit());
        for x in 0..n {
            if !self.i.reduce(self.t.additive[zero_s][x].clone()).iter().all(Zero::is_zero)
                || !self.i.reduce(self.t.additive[x][zero_s].clone()).iter().all(Zero::is_zero)
            {
                return Err(AlgebraError::NotNormalized(zero_s, x));
            }
            for e in [zero_s, one_s] {
                if !self.i.reduce(self.t.multiplicative[e][x].clone()).iter().all(Zero::is_zero) {
                    return Err(AlgebraError::NotNormalized(e, x));
                }
                if !self.i.reduce(self.t.multiplicative[x][e].clone()).iter().all(Zero::is_zero) {
                    return Err(AlgebraError::NotNormalized(x, e));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if self.i.reduce(self.t.additive[a][b].clone()) != self.i.reduce(self.t.additive[b][a].clone()) {
                    return Err(AlgebraError::NotACocycle(a, b, a));
                }
                for c in 0..n {
                    let (sa, sb, sc) = (&self.els[a], &self.els[b], &self.els[c]);
                    let zero_j = vec![Int::zero(); self.i.rank()];
                    let ea = (sa.clone(), zero_j.clone());
                    let eb = (sb.clone(), zero_j.clone());
                    let ec = (sc.clone(), zero_j);
                    let checks = [
                        self.add(&self.add(&ea, &eb), &ec) == self.add(&ea, &self.add(&eb, &ec)),
                        self.mul(&self.mul(&ea, &eb), &ec) == self.mul(&ea, &self.mul(&eb, &ec)),
                        self.mul(&ea, &self.add(&eb, &ec)) == self.add(&self.mul(&ea, &eb), &self.mul(&ea, &ec)),
                        self.mul(&self.add(&ea, &eb), &ec) == self.add(&self.mul(&ea, &ec), &self.mul(&eb, &ec)),
                    ];
                    if checks.iter().any(|ok| !ok) {
                        return Err(AlgebraError::NotACocycle(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The square-zero extension of `S` by `I` presented by a pair of normalized cochains.
///
/// Accepted exactly when the tables define an associative unital ring, which is the
/// 2-cocycle condition on the pair.
pub fn extension_from_cocycle(
    s: Arc<FiniteAlgebra>,
    i: &Bimodule,
    tables: &CocycleTables,
) -> Result<SquareZeroDatum, AlgebraError> {
    if !s.is_finite() {
        return Err(AlgebraError::Infinite);
    }
    let els = s.elements();
    let n = els.len();
    let shape_ok = |t: &Vec<Vec<Elem>>| t.len() == n && t.iter().all(|row| row.len() == n && row.iter().all(|e| e.len() == i.rank()));
    if !shape_ok(&tables.additive) || !shape_ok(&tables.multiplicative) {
        return Err(AlgebraError::Shape(format!("cochain tables must be {n}x{n} with {} coordinates", i.rank())));
    }
    let ext = TableExt { s: &s, i, els, t: tables };
    ext.check()?;

    // Presentation: x_a = (g_a, 0) and y_q = (0, h_q), with m_a x_a = (0, c_a) and n_q y_q = 0.
    let (rs, ri) = (s.rank(), i.rank());
    let dim = rs + ri;
    let zero_j = vec![Int::zero(); ri];
    let mut relations = Vec::new();
    for a in 0..rs {
        let xa = (s.basis(a), zero_j.clone());
        let (_, carry) = ext.scalar(&s.moduli()[a], &xa);
        let mut col = vec![Int::zero(); dim];
        col[a] = s.moduli()[a].clone();
        for q in 0..ri {
            col[rs + q] = -carry[q].clone();
        }
        relations.push(col);
    }
    for q in 0..ri {
        let mut col = vec![Int::zero(); dim];
        col[rs + q] = i.moduli()[q].clone();
        relations.push(col);
    }
    let ambient = vec![Int::zero(); dim];
    let pres = Subquotient::quotient(&ambient, &IntMatrix::from_columns(&relations, dim));
    let to_table = |v: &[Int]| -> (Elem, Elem) {
        let mut acc = (s.zero(), zero_j.clone());
        for a in 0..rs {
            acc = ext.add(&acc, &ext.scalar(&v[a], &(s.basis(a), zero_j.clone())));
        }
        let y: Elem = i.reduce(v[rs..].to_vec());
        ext.add(&acc, &(s.zero(), y))
    };
    let from_table = |x: &(Elem, Elem)| -> Elem {
        let mut v = vec![Int::zero(); dim];
        v[..rs].clone_from_slice(&x.0);
        let (_, t) = to_table(&v);
        for q in 0..ri {
            v[rs + q] = &x.1[q] - &t[q];
        }
        pres.coords(&v).expect("quotient covers the ambient group")
    };
    let gens: Vec<(Elem, Elem)> = pres.generators().iter().map(|g| to_table(g)).collect();
    let mul = gens.iter().map(|x| gens.iter().map(|y| from_table(&ext.mul(x, y))).collect()).collect();
    let unit = from_table(&(s.unit().clone(), zero_j.clone()));
    let r = Arc::new(FiniteAlgebra::new(pres.moduli().to_vec(), mul, unit)?);
    let proj_cols: Vec<Elem> = gens.iter().map(|g| g.0.clone()).collect();
    let pi = AlgebraMap::new(r.clone(), s.clone(), IntMatrix::from_columns(&proj_cols, rs))?;
    let incl_cols: Vec<Elem> = (0..ri)
        .map(|q| {
            let mut h = zero_j.clone();
            h[q] = Int::one();
            from_table(&(s.zero(), i.reduce(h)))
        })
        .collect();
    let incl = IntMatrix::from_columns(&incl_cols, r.rank());
    let mut datum = SquareZeroDatum::assemble(pi, i.clone(), incl, SectionChoice::Canonical)?;
    datum.section = s.elements().iter().map(|x| from_table(&(x.clone(), zero_j.clone()))).collect();
    datum.verify()?;
    Ok(datum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ints;

    fn z(n: u64) -> Arc<FiniteAlgebra> {
        Arc::new(FiniteAlgebra::zmod(n))
    }

    #[test]
    fn z4_onto_z2() {
        let pi = AlgebraMap::new(z(4), z(2), IntMatrix::from_rows(&[vec![1]])).unwrap();
        let d = SquareZeroDatum::from_surjection(pi).unwrap();
        assert_eq!(d.j().order(), Some(Int::from(2)));
        assert_eq!(d.include(&ints(&[1])), ints(&[2]));
        assert_eq!(d.lift(&ints(&[1])), ints(&[1]));
        assert!(!d.section_is_ring_map());
    }

    #[test]
    fn z8_onto_z2_is_not_square_zero() {
        let pi = AlgebraMap::new(z(8), z(2), IntMatrix::from_rows(&[vec![1]])).unwrap();
        match SquareZeroDatum::from_surjection(pi) {
            Err(AlgebraError::KernelNotSquareZero { left, right, product }) => {
                assert_eq!((left, right, product), (ints(&[2]), ints(&[2]), ints(&[4])));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_has_zero_kernel() {
        let d = SquareZeroDatum::from_surjection(AlgebraMap::identity(z(6))).unwrap();
        assert_eq!(d.j().rank(), 0);
    }

    #[test]
    fn non_surjective_rejected() {
        let pi = AlgebraMap::new(z(2), Arc::new(FiniteAlgebra::product(&FiniteAlgebra::zmod(2), &FiniteAlgebra::zmod(2))), IntMatrix::from_rows(&[vec![1], vec![1]])).unwrap();
        assert!(matches!(SquareZeroDatum::from_surjection(pi), Err(AlgebraError::NotSurjective)));
    }

    #[test]
    fn dual_numbers_from_split_extension() {
        let s = z(2);
        let d = split_square_zero(s.clone(), &Bimodule::regular(s));
        let r = d.r();
        assert_eq!(r.order(), Some(Int::from(4)));
        let eps = ints(&[0, 1]);
        assert!(r.is_zero(&r.mul(&eps, &eps)));
        assert!(d.section_is_ring_map());
    }

    #[test]
    fn zero_bimodule_gives_identity() {
        let s = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
        let d = split_square_zero(s.clone(), &Bimodule::zero(s.clone(), s.clone()));
        assert_eq!(**d.r(), *s);
    }

    #[test]
    fn carry_cocycle_gives_z4() {
        let s = z(2);
        let i = Bimodule::regular(s.clone());
        let mut t = CocycleTables::zero(&s, &i);
        t.additive[1][1] = ints(&[1]);
        let d = extension_from_cocycle(s, &i, &t).unwrap();
        assert_eq!(d.r().moduli(), ints(&[4]).as_slice());
    }

    #[test]
    fn zero_cocycle_matches_split() {
        let s = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
        let i = Bimodule::regular(s.clone());
        let d = extension_from_cocycle(s.clone(), &i, &CocycleTables::zero(&s, &i)).unwrap();
        let split = split_square_zero(s, &i);
        assert_eq!(d.r().order(), split.r().order());
    }

    #[test]
    fn unnormalized_rejected() {
        let s = z(2);
        let i = Bimodule::regular(s.clone());
        let mut t = CocycleTables::zero(&s, &i);
        t.multiplicative[1][1] = ints(&[1]);
        assert!(matches!(extension_from_cocycle(s, &i, &t), Err(AlgebraError::NotNormalized(1, 1))));
    }
}
