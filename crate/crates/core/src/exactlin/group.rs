use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::snf::{kernel_from_snf, smith_normal_form_mod, solve_with_snf, SmithForm};
use super::{reduce_vec, Int, IntMatrix};

/// Least common multiple of a modulus list; zero as soon as one entry is zero.
pub fn lcm_all(moduli: &[Int]) -> Int {
    let mut acc = Int::one();
    for m in moduli {
        if m.is_zero() {
            return Int::zero();
        }
        acc = acc.lcm(m);
    }
    acc
}

/// A finitely generated abelian group `Z/d₁ ⊕ ⋯ ⊕ Z/d_r ⊕ Z^f` in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbGroup {
    factors: Vec<Int>,
}

impl AbGroup {
    pub fn trivial() -> Self {
        AbGroup { factors: Vec::new() }
    }

    /// Accepts a divisibility chain of factors ≥ 2 optionally followed by zeros.
    pub fn from_invariant_factors(factors: Vec<Int>) -> Option<Self> {
        let finite: Vec<&Int> = factors.iter().take_while(|d| !d.is_zero()).collect();
        if factors[finite.len()..].iter().any(|d| !d.is_zero()) {
            return None;
        }
        if finite.iter().any(|d| *d < &Int::from(2)) {
            return None;
        }
        if finite.windows(2).any(|w| !(w[1] % w[0]).is_zero()) {
            return None;
        }
        Some(AbGroup { factors })
    }

    /// The group `⊕ Z/mᵢ`, with `mᵢ = 0` read as `Z`.
    pub fn from_moduli(moduli: &[Int]) -> Self {
        let mut finite: Vec<Int> = Vec::new();
        let mut free = 0;
        for m in moduli {
            if m.is_zero() {
                free += 1;
            } else {
                finite.push(m.abs());
            }
        }
        let d = smith_normal_form_mod(&IntMatrix::diagonal(&finite), &Int::zero());
        let mut factors: Vec<Int> = d.invariant_factors().into_iter().filter(|x| !x.is_one()).collect();
        factors.extend(std::iter::repeat_n(Int::zero(), free));
        AbGroup { factors }
    }

    pub fn invariant_factors(&self) -> &[Int] {
        &self.factors
    }

    pub fn torsion_factors(&self) -> Vec<Int> {
        self.factors.iter().filter(|d| !d.is_zero()).cloned().collect()
    }

    pub fn free_rank(&self) -> usize {
        self.factors.iter().filter(|d| d.is_zero()).count()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank() == 0
    }

    /// Order of the group, `None` when it is infinite.
    pub fn order(&self) -> Option<Int> {
        if !self.is_finite() {
            return None;
        }
        Some(self.factors.iter().fold(Int::one(), |acc, d| acc * d))
    }

    /// Exponent of the group, zero when it is infinite.
    pub fn exponent(&self) -> Int {
        lcm_all(&self.factors)
    }
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.factors.iter().map(|d| if d.is_zero() { "Z".to_string() } else { format!("Z/{d}") }).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Serialized as its display form, e.g. `"Z/2 x Z/4"`.
impl Serialize for AbGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Pre-factored system `A·x = b` for `A: ⊕Z/sⱼ → ⊕Z/tᵢ`, reused across many right-hand sides.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    snf: SmithForm,
    row_scale: Vec<Int>,
    source: Vec<Int>,
    cols: usize,
}

impl LinearSystem {
    pub fn new(a: &IntMatrix, source: &[Int], target: &[Int]) -> Self {
        assert_eq!(a.cols(), source.len(), "source moduli length");
        assert_eq!(a.rows(), target.len(), "target moduli length");
        let mut all = source.to_vec();
        all.extend_from_slice(target);
        let n = lcm_all(&all);
        let (matrix, row_scale) = if n.is_zero() {
            // Over Z the target relations become extra unknowns.
            let extra: Vec<usize> = (0..target.len()).filter(|&i| !target[i].is_zero()).collect();
            let mut m = IntMatrix::zeros(a.rows(), a.cols() + extra.len());
            m.put_block(0, 0, a);
            for (k, &i) in extra.iter().enumerate() {
                m.set(i, a.cols() + k, target[i].clone());
            }
            (m, vec![Int::one(); a.rows()])
        } else {
            let scale: Vec<Int> = target.iter().map(|t| &n / t).collect();
            let m = IntMatrix::from_fn(a.rows(), a.cols(), |i, j| (a.get(i, j) * &scale[i]).mod_floor(&n));
            (m, scale)
        };
        LinearSystem { snf: smith_normal_form_mod(&matrix, &n), row_scale, source: source.to_vec(), cols: a.cols() }
    }

    /// A solution reduced by the source moduli, or `None` when `b` is not in the image.
    pub fn solve(&self, b: &[Int]) -> Option<Vec<Int>> {
        assert_eq!(b.len(), self.row_scale.len(), "right-hand side length");
        let n = &self.snf.modulus;
        let scaled: Vec<Int> = b
            .iter()
            .zip(&self.row_scale)
            .map(|(x, s)| if n.is_zero() { x.clone() } else { (x * s).mod_floor(n) })
            .collect();
        let mut x = solve_with_snf(&self.snf, &scaled)?;
        x.truncate(self.cols);
        reduce_vec(&mut x, &self.source);
        Some(x)
    }

    /// Generators of the kernel, reduced and with zero columns dropped.
    pub fn kernel(&self) -> IntMatrix {
        let k = kernel_from_snf(&self.snf, self.snf.d.cols());
        let mut cols = Vec::new();
        for c in k.columns() {
            let mut c: Vec<Int> = c.into_iter().take(self.cols).collect();
            reduce_vec(&mut c, &self.source);
            if c.iter().any(|x| !x.is_zero()) && !cols.contains(&c) {
                cols.push(c);
            }
        }
        IntMatrix::from_columns(&cols, self.cols)
    }
}

/// Solves `A·x = b` for a homomorphism `A: ⊕Z/sⱼ → ⊕Z/tᵢ`.
pub fn solve_in(a: &IntMatrix, b: &[Int], source: &[Int], target: &[Int]) -> Option<Vec<Int>> {
    LinearSystem::new(a, source, target).solve(b)
}

/// Generators (as columns) of the kernel of a homomorphism `A: ⊕Z/sⱼ → ⊕Z/tᵢ`.
pub fn kernel_in(a: &IntMatrix, source: &[Int], target: &[Int]) -> IntMatrix {
    LinearSystem::new(a, source, target).kernel()
}

/// The subquotient `(N + D) / D` of an ambient group `⊕Z/mᵢ`, where `N` and `D` are given by
/// generating columns. Carries invariant-factor generators and a coordinate map.
#[derive(Clone, Debug)]
pub struct Subquotient {
    ambient: Vec<Int>,
    group: AbGroup,
    moduli: Vec<Int>,
    generators: Vec<Vec<Int>>,
    kept: Vec<usize>,
    u: IntMatrix,
    num_cols: usize,
    solver: LinearSystem,
}

impl Subquotient {
    pub fn new(ambient: &[Int], num: &IntMatrix, den: &IntMatrix) -> Self {
        assert_eq!(num.rows(), ambient.len(), "numerator rows");
        assert_eq!(den.rows(), ambient.len(), "denominator rows");
        let n = lcm_all(ambient);
        let k = num.cols();
        let both = num.hstack(den);
        let source = vec![n.clone(); both.cols()];
        let solver = LinearSystem::new(&both, &source, ambient);
        let kernel = solver.kernel();
        let relations = kernel.select_rows(&(0..k).collect::<Vec<_>>());
        let snf = smith_normal_form_mod(&relations, &n);
        let diag = snf.diagonal();
        let mut moduli = Vec::new();
        let mut kept = Vec::new();
        for i in 0..k {
            let d = diag.get(i).cloned().unwrap_or_else(Int::zero);
            let f = if n.is_zero() {
                d.abs()
            } else if d.is_zero() {
                n.clone()
            } else {
                d.gcd(&n)
            };
            if !f.is_one() {
                kept.push(i);
                moduli.push(f);
            }
        }
        let generators = kept
            .iter()
            .map(|&i| {
                let mut g = num.mul_vec(&snf.u_inv.col(i));
                reduce_vec(&mut g, ambient);
                g
            })
            .collect();
        // Zero-modulus (free) factors go last; the chain from the SNF already has that order.
        let group = AbGroup::from_invariant_factors(moduli.clone()).unwrap_or_else(|| AbGroup::from_moduli(&moduli));
        Subquotient { ambient: ambient.to_vec(), group, moduli, generators, kept, u: snf.u, num_cols: k, solver }
    }

    /// The subgroup generated by the columns of `num`.
    pub fn subgroup(ambient: &[Int], num: &IntMatrix) -> Self {
        Self::new(ambient, num, &IntMatrix::zeros(ambient.len(), 0))
    }

    /// The quotient of the whole ambient group by the columns of `den`.
    pub fn quotient(ambient: &[Int], den: &IntMatrix) -> Self {
        Self::new(ambient, &IntMatrix::identity(ambient.len()), den)
    }

    pub fn ambient(&self) -> &[Int] {
        &self.ambient
    }

    pub fn group(&self) -> &AbGroup {
        &self.group
    }

    /// Orders of the chosen generators (zero for infinite order).
    pub fn moduli(&self) -> &[Int] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    /// Ambient representatives of the generators.
    pub fn generators(&self) -> &[Vec<Int>] {
        &self.generators
    }

    /// Coordinates of `x` in the chosen generators; `None` when `x ∉ N + D`.
    pub fn coords(&self, x: &[Int]) -> Option<Vec<Int>> {
        let sol = self.solver.solve(x)?;
        let c = &sol[..self.num_cols];
        let y = self.u.mul_vec(c);
        Some(
            self.kept
                .iter()
                .zip(&self.moduli)
                .map(|(&i, m)| if m.is_zero() { y[i].clone() } else { y[i].mod_floor(m) })
                .collect(),
        )
    }

    pub fn contains(&self, x: &[Int]) -> bool {
        self.solver.solve(x).is_some()
    }

    /// Whether `x` lies in `D` (its class vanishes). Panics if `x ∉ N + D`.
    pub fn is_zero_class(&self, x: &[Int]) -> bool {
        self.coords(x).expect("element outside the subquotient").iter().all(|c| c.is_zero())
    }

    /// The ambient representative `Σ cᵢ gᵢ`.
    pub fn element(&self, coeffs: &[Int]) -> Vec<Int> {
        assert_eq!(coeffs.len(), self.generators.len(), "coefficient count");
        let mut out = vec![Int::zero(); self.ambient.len()];
        for (c, g) in coeffs.iter().zip(&self.generators) {
            for (o, x) in out.iter_mut().zip(g) {
                *o += c * x;
            }
        }
        reduce_vec(&mut out, &self.ambient);
        out
    }

    /// All coefficient vectors of a finite subquotient, in lexicographic order, or `None`
    /// if the group is infinite or larger than `cap`.
    pub fn enumerate(&self, cap: usize) -> Option<Vec<Vec<Int>>> {
        let order = self.group.order()?;
        if order > Int::from(cap) {
            return None;
        }
        let mut out = vec![Vec::new()];
        for m in &self.moduli {
            let bound = usize::try_from(m).ok()?;
            let mut next = Vec::with_capacity(out.len() * bound);
            for prefix in &out {
                for v in 0..bound {
                    let mut p = prefix.clone();
                    p.push(Int::from(v));
                    next.push(p);
                }
            }
            out = next;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ints;

    #[test]
    fn group_from_moduli() {
        let g = AbGroup::from_moduli(&ints(&[2, 3, 4]));
        assert_eq!(g.invariant_factors(), ints(&[2, 12]).as_slice());
        assert_eq!(g.order(), Some(Int::from(24)));
        assert_eq!(g.to_string(), "Z/2 x Z/12");
        let z = AbGroup::from_moduli(&ints(&[0, 1]));
        assert_eq!(z.to_string(), "Z");
        assert_eq!(z.order(), None);
        assert!(AbGroup::from_moduli(&ints(&[1])).is_trivial());
    }

    #[test]
    fn rejects_broken_chain() {
        assert!(AbGroup::from_invariant_factors(ints(&[4, 2])).is_none());
        assert!(AbGroup::from_invariant_factors(ints(&[0, 2])).is_none());
        assert!(AbGroup::from_invariant_factors(ints(&[2, 4, 0])).is_some());
    }

    #[test]
    fn mixed_moduli_kernel_and_solve() {
        // Z/4 → Z/2, x ↦ x mod 2.
        let a = IntMatrix::from_rows(&[vec![1]]);
        let k = kernel_in(&a, &ints(&[4]), &ints(&[2]));
        let sq = Subquotient::subgroup(&ints(&[4]), &k);
        assert_eq!(sq.group().to_string(), "Z/2");
        assert!(solve_in(&a, &ints(&[1]), &ints(&[4]), &ints(&[2])).is_some());
        // Z → Z/3 by 2.
        let b = IntMatrix::from_rows(&[vec![2]]);
        let x = solve_in(&b, &ints(&[1]), &ints(&[0]), &ints(&[3])).unwrap();
        let y: Int = &x[0] * Int::from(2) - Int::one();
        assert_eq!(y.mod_floor(&Int::from(3)), Int::zero());
    }

    #[test]
    fn homology_of_doubling_over_z() {
        let ambient = ints(&[0]);
        let image = IntMatrix::from_rows(&[vec![2]]);
        let h0 = Subquotient::quotient(&ambient, &image);
        assert_eq!(h0.group().to_string(), "Z/2");
        assert_eq!(h0.coords(&ints(&[3])), Some(ints(&[1])));
        assert!(h0.is_zero_class(&ints(&[4])));
    }

    #[test]
    fn subquotient_coordinates_round_trip() {
        let ambient = ints(&[4, 4]);
        let num = IntMatrix::identity(2);
        let den = IntMatrix::from_rows(&[vec![2], vec![2]]);
        let q = Subquotient::new(&ambient, &num, &den);
        assert_eq!(q.group().order(), Some(Int::from(8)));
        for c in q.enumerate(64).unwrap() {
            let x = q.element(&c);
            assert_eq!(q.coords(&x).unwrap(), c);
        }
    }
}
