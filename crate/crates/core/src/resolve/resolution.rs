use std::sync::Arc;

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use super::ResolveError;
use crate::algebra::{Elem, FiniteAlgebra};
use crate::exactlin::{kernel_in, Int, IntMatrix, Subquotient};
use crate::modcx::{cone, free_hom_matrix, ChainComplex, ChainMap, FinModule, RingMatrix};

/// Order in which kernel generators are offered to the greedy cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Greedy,
    Reversed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Every term above `length` is zero.
    Finite { length: i64 },
    /// `d_{k+period} = d_k` for all `k ≥ start`; the resolution extends by repetition.
    Periodic { start: i64, period: i64 },
    /// Exact below `length`; nothing is known beyond.
    Truncated { length: i64 },
}

/// A complex of free modules `P` with a quasi-isomorphism `P → X`, up to a finite degree.
#[derive(Clone, Debug)]
pub struct Resolution {
    target: ChainComplex,
    strategy: Strategy,
    ranks: Vec<usize>,
    // diffs[i] is D_{lo+i+1}, acting on row vectors.
    diffs: Vec<RingMatrix>,
    // aug[i][g] is the image of generator g of P_{lo+i} in X_{lo+i}.
    aug: Vec<Vec<Elem>>,
    certificate: Certificate,
    complex: ChainComplex,
    augmentation: ChainMap,
}

struct Builder {
    target: ChainComplex,
    strategy: Strategy,
    ranks: Vec<usize>,
    diffs: Vec<RingMatrix>,
    aug: Vec<Vec<Elem>>,
}

impl Builder {
    fn algebra(&self) -> &Arc<FiniteAlgebra> {
        self.target.algebra()
    }

    fn lo(&self) -> i64 {
        self.target.lo()
    }

    fn next_degree(&self) -> i64 {
        self.lo() + self.ranks.len() as i64
    }

    fn rank(&self, k: i64) -> usize {
        if k < self.lo() {
            return 0;
        }
        self.ranks.get((k - self.lo()) as usize).copied().unwrap_or(0)
    }

    fn diff(&self, k: i64) -> &RingMatrix {
        &self.diffs[(k - self.lo() - 1) as usize]
    }

    fn aug_matrix(&self, k: i64) -> IntMatrix {
        let x = self.target.term(k);
        if k < self.lo() {
            return IntMatrix::zeros(x.rank(), 0);
        }
        free_hom_matrix(x, &self.aug[(k - self.lo()) as usize])
    }

    /// Adds `P_k` covering the cycles of the cone of `P_{≤k−1} → X` in degree `k`.
    fn step(&mut self) -> usize {
        let alg = self.algebra().clone();
        let k = self.next_degree();
        let (n1, n2) = (self.rank(k - 1), self.rank(k - 2));
        let p1 = FinModule::free(alg.clone(), n1);
        let amb = p1.direct_sum(self.target.term(k));
        let tgt = FinModule::free(alg.clone(), n2).direct_sum(self.target.term(k - 1));
        let off = n2 * alg.rank();
        let mut phi = IntMatrix::zeros(tgt.rank(), amb.rank());
        if k - 1 > self.lo() {
            phi.put_block(0, 0, &self.diff(k - 1).to_int_matrix());
        }
        phi.put_block(off, 0, &self.aug_matrix(k - 1));
        phi.add_block(off, p1.rank(), &self.target.diff_matrix(k), &Int::from(-1));
        let mut candidates = kernel_in(&phi, amb.moduli(), tgt.moduli()).columns();
        if self.strategy == Strategy::Reversed {
            candidates.reverse();
        }
        let boundaries: Vec<Elem> = self
            .target
            .diff_matrix(k + 1)
            .columns()
            .into_iter()
            .map(|c| {
                let mut v = vec![Int::zero(); p1.rank()];
                v.extend(c);
                v
            })
            .collect();
        let chosen = cover(&amb, &boundaries, candidates);
        let split = p1.rank();
        let r = alg.rank();
        if k > self.lo() {
            let entries = chosen.iter().flat_map(|z| (0..n1).map(move |j| z[j * r..(j + 1) * r].to_vec())).collect();
            self.diffs.push(RingMatrix::from_entries(alg.clone(), chosen.len(), n1, entries));
        }
        self.aug.push(chosen.iter().map(|z| z[split..].to_vec()).collect());
        self.ranks.push(chosen.len());
        chosen.len()
    }

    /// `(start, period)` once the newest differential repeats an earlier one that is already
    /// determined by its predecessor alone.
    fn periodic(&self) -> Option<(i64, i64)> {
        let k = self.next_degree() - 1;
        let first = self.target.hi() + 2;
        if k <= first || k <= self.lo() {
            return None;
        }
        let dk = self.diff(k);
        (first.max(self.lo() + 1)..k).find(|&j| self.diff(j) == dk).map(|j| (j, k - j))
    }

    fn repeat_to(&mut self, period: i64, hi: i64) {
        while self.next_degree() <= hi {
            let k = self.next_degree();
            let d = self.diff(k - period).clone();
            let n = d.shape().0;
            self.ranks.push(n);
            self.diffs.push(d);
            self.aug.push(vec![Vec::new(); n]);
        }
    }

    fn finish(self, certificate: Certificate) -> Resolution {
        let alg = self.algebra().clone();
        let lo = self.lo();
        let terms: Vec<FinModule> = self.ranks.iter().map(|&n| FinModule::free(alg.clone(), n)).collect();
        let diffs = self.diffs.iter().map(RingMatrix::to_int_matrix).collect();
        let complex = ChainComplex::from_parts(alg, lo, terms, diffs);
        let comps = (0..self.ranks.len()).map(|i| (lo + i as i64, self.aug_matrix(lo + i as i64))).collect();
        let augmentation = ChainMap::from_parts(complex.clone(), self.target.clone(), comps);
        Resolution {
            target: self.target,
            strategy: self.strategy,
            ranks: self.ranks,
            diffs: self.diffs,
            aug: self.aug,
            certificate,
            complex,
            augmentation,
        }
    }
}

/// A submodule span that can test membership and compare sizes within a fixed ambient.
trait Span {
    type Size: PartialEq;
    fn contains(&self, z: &Elem) -> bool;
    fn size(&self) -> Self::Size;
}

impl Span for Subquotient {
    type Size = crate::exactlin::AbGroup;
    fn contains(&self, z: &Elem) -> bool {
        Subquotient::contains(self, z)
    }
    fn size(&self) -> Self::Size {
        self.group().clone()
    }
}

/// Row-echelon span over `F_p`, for ambients whose moduli all equal the prime `p`.
struct FpSpan {
    p: u64,
    rows: Vec<(usize, Vec<u64>)>,
}

impl FpSpan {
    fn new(p: u64) -> Self {
        FpSpan { p, rows: Vec::new() }
    }

    fn lift(&self, z: &Elem) -> Vec<u64> {
        let p = Int::from(self.p);
        z.iter().map(|x| num_traits::ToPrimitive::to_u64(&x.mod_floor(&p)).expect("reduced")).collect()
    }

    fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        for (pivot, row) in &self.rows {
            let c = v[*pivot];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = (*x + (self.p - c) * r) % self.p;
                }
            }
        }
        v
    }

    fn insert(&mut self, z: &Elem) {
        let v = self.reduce(self.lift(z));
        if let Some(pivot) = v.iter().position(|&x| x != 0) {
            let inv = pow_mod(v[pivot], self.p - 2, self.p);
            let v: Vec<u64> = v.iter().map(|x| x * inv % self.p).collect();
            for (_, row) in &mut self.rows {
                let c = row[pivot];
                if c != 0 {
                    for (x, r) in row.iter_mut().zip(&v) {
                        *x = (*x + (self.p - c) * r) % self.p;
                    }
                }
            }
            self.rows.push((pivot, v));
        }
    }
}

impl Span for FpSpan {
    type Size = usize;
    fn contains(&self, z: &Elem) -> bool {
        self.reduce(self.lift(z)).iter().all(|&x| x == 0)
    }
    fn size(&self) -> usize {
        self.rows.len()
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// The common modulus when every modulus is the same prime below `2³¹`.
fn common_prime(moduli: &[Int]) -> Option<u64> {
    let p = num_traits::ToPrimitive::to_u64(moduli.first()?)?;
    if p < 2 || p >= 1 << 31 || moduli.iter().any(|m| *m != Int::from(p)) {
        return None;
    }
    (2..).take_while(|d| d * d <= p).all(|d| p % d != 0).then_some(p)
}

/// Above this many generators the pairwise merging pass is skipped.
const MERGE_CAP: usize = 24;

/// Greedy S-span cover of the candidates modulo `base`, followed by pairwise merging of
/// chosen generators whenever the sum alone spans the same submodule.
fn cover(amb: &FinModule, base: &[Elem], candidates: Vec<Elem>) -> Vec<Elem> {
    let orbit = |z: &Elem| -> Vec<Elem> { amb.action().iter().map(|a| amb.reduce(a.mul_vec(z))).collect() };
    match common_prime(amb.moduli()) {
        Some(p) => cover_with(amb, candidates, |gens| {
            let mut s = FpSpan::new(p);
            for z in base.iter().cloned().chain(gens.iter().flat_map(orbit)) {
                s.insert(&z);
            }
            s
        }),
        None => cover_with(amb, candidates, |gens| {
            let mut cols = base.to_vec();
            for g in gens {
                cols.extend(orbit(g));
            }
            Subquotient::subgroup(amb.moduli(), &IntMatrix::from_columns(&cols, amb.rank()))
        }),
    }
}

fn cover_with<S: Span>(amb: &FinModule, candidates: Vec<Elem>, span: impl Fn(&[Elem]) -> S) -> Vec<Elem> {
    let mut chosen: Vec<Elem> = Vec::new();
    let mut current = span(&chosen);
    for z in candidates {
        if current.contains(&z) {
            continue;
        }
        chosen.push(z);
        current = span(&chosen);
    }
    let full = current.size();
    let mut merged = true;
    while merged && chosen.len() > 1 && chosen.len() <= MERGE_CAP {
        merged = false;
        'pairs: for i in 0..chosen.len() {
            for j in i + 1..chosen.len() {
                let sum = amb.reduce(chosen[i].iter().zip(&chosen[j]).map(|(x, y)| x + y).collect());
                let mut trial: Vec<Elem> = chosen.iter().enumerate().filter(|&(t, _)| t != i && t != j).map(|(_, z)| z.clone()).collect();
                trial.insert(i, sum);
                if span(&trial).size() == full {
                    chosen = trial;
                    merged = true;
                    break 'pairs;
                }
            }
        }
    }
    chosen
}

/// Resolves a bounded complex up to degree `X.hi() + length`.
pub fn free_resolution(x: &ChainComplex, length: usize, strategy: Strategy) -> Result<Resolution, ResolveError> {
    let hi = x.hi() + length as i64;
    let mut b = Builder { target: x.clone(), strategy, ranks: Vec::new(), diffs: Vec::new(), aug: Vec::new() };
    let certificate = loop {
        let k = b.next_degree();
        if let Some((start, period)) = b.periodic() {
            b.repeat_to(period, hi);
            break Certificate::Periodic { start, period };
        }
        if k > hi {
            break Certificate::Truncated { length: hi };
        }
        let n = b.step();
        if n == 0 && k > x.hi() {
            b.ranks.pop();
            b.diffs.pop();
            b.aug.pop();
            break Certificate::Finite { length: (k - 1).max(x.lo()) };
        }
    };
    let res = b.finish(certificate);
    res.verify()?;
    Ok(res)
}

/// Resolves a module placed in degree 0.
pub fn resolve_module(m: &FinModule, length: usize, strategy: Strategy) -> Result<Resolution, ResolveError> {
    free_resolution(&ChainComplex::concentrated(m.clone(), 0), length, strategy)
}

impl Resolution {
    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        self.target.algebra()
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn lo(&self) -> i64 {
        self.target.lo()
    }

    /// Top degree actually stored.
    pub fn hi(&self) -> i64 {
        self.lo() + self.ranks.len() as i64 - 1
    }

    /// Highest degree in which the stored truncation is known to be a resolution, i.e. where
    /// `H_k` of the cone of the augmentation vanishes. `None` means every degree.
    pub fn exact_through(&self) -> Option<i64> {
        match self.certificate {
            Certificate::Finite { .. } => None,
            _ => Some(self.hi() - 1),
        }
    }

    pub fn rank(&self, k: i64) -> usize {
        if k < self.lo() {
            return 0;
        }
        self.ranks.get((k - self.lo()) as usize).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `D_k: P_k → P_{k−1}` as a matrix over the algebra; zero outside the stored range.
    pub fn diff(&self, k: i64) -> RingMatrix {
        if k > self.lo() && k <= self.hi() {
            self.diffs[(k - self.lo() - 1) as usize].clone()
        } else {
            RingMatrix::zeros(self.algebra().clone(), self.rank(k), self.rank(k - 1))
        }
    }

    /// Images of the generators of `P_k` in `X_k`.
    pub fn augmentation_images(&self, k: i64) -> Vec<Elem> {
        if k < self.lo() || k > self.hi() {
            return Vec::new();
        }
        self.aug[(k - self.lo()) as usize].clone()
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn augmentation(&self) -> &ChainMap {
        &self.augmentation
    }

    /// Checks `d² = 0`, the chain-map property of the augmentation, and acyclicity of its cone
    /// through the certified range.
    pub fn verify(&self) -> Result<(), ResolveError> {
        let (lo, hi) = self.complex.bounds();
        let terms = (lo..=hi).map(|k| self.complex.term(k).clone()).collect();
        let diffs = (lo + 1..=hi).map(|k| self.complex.diff_matrix(k)).collect();
        ChainComplex::new(self.algebra().clone(), lo, terms, diffs)?;
        let comps = (lo..=hi).map(|k| (k, self.augmentation.component_matrix(k))).collect();
        ChainMap::new(self.complex.clone(), self.target.clone(), comps)?;
        let c = cone(&self.augmentation);
        let top = match self.certificate {
            Certificate::Finite { .. } => c.hi(),
            _ => hi,
        };
        for k in c.lo()..=top {
            let h = c.homology(k);
            if !h.module.is_zero_module() {
                return Err(ResolveError::NotExact(k, format!("cone homology {}", h.module.group())));
            }
        }
        Ok(())
    }

    /// A resolution reaching at least degree `hi`: repeats periodic tails, pads finite ones,
    /// and recomputes truncated ones.
    pub fn extended(&self, hi: i64) -> Resolution {
        if hi <= self.hi() {
            return self.clone();
        }
        match self.certificate {
            Certificate::Finite { .. } => self.clone(),
            Certificate::Periodic { period, .. } => {
                let mut b = self.builder();
                b.repeat_to(period, hi);
                b.finish(self.certificate.clone())
            }
            Certificate::Truncated { .. } => {
                let length = (hi - self.target.hi()).max(0) as usize;
                free_resolution(&self.target, length, self.strategy).expect("resolution construction is exact")
            }
        }
    }

    /// `Ok` when the resolution can supply degrees up to `hi`; truncated resolutions that are
    /// too short report the missing degree.
    pub fn ensure(&self, hi: i64) -> Result<Resolution, ResolveError> {
        match self.certificate {
            Certificate::Truncated { .. } if hi > self.hi() => {
                Err(ResolveError::NeedLongerResolution { needed: hi, available: self.hi() })
            }
            _ => Ok(self.extended(hi)),
        }
    }

    fn builder(&self) -> Builder {
        Builder {
            target: self.target.clone(),
            strategy: self.strategy,
            ranks: self.ranks.clone(),
            diffs: self.diffs.clone(),
            aug: self.aug.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ints;

    fn z2_over_z4() -> FinModule {
        let a = Arc::new(FiniteAlgebra::zmod(4));
        FinModule::cyclic_quotient(a, &[ints(&[2])])
    }

    #[test]
    fn free_module_resolves_in_degree_zero() {
        for a in [FiniteAlgebra::zmod(4), FiniteAlgebra::trunc_poly(2, 2), FiniteAlgebra::upper_triangular(2)] {
            let a = Arc::new(a);
            let r = resolve_module(&FinModule::free(a, 1), 3, Strategy::Greedy).unwrap();
            assert_eq!(r.ranks(), &[1]);
            assert_eq!(*r.certificate(), Certificate::Finite { length: 0 });
        }
    }

    #[test]
    fn z2_over_z4_is_periodic() {
        let r = resolve_module(&z2_over_z4(), 4, Strategy::Greedy).unwrap();
        assert_eq!(r.ranks(), &[1, 1, 1, 1, 1]);
        for k in 1..=4 {
            assert_eq!(r.diff(k).get(0, 0), &ints(&[2]));
        }
        assert!(matches!(r.certificate(), Certificate::Periodic { period: 1, .. }));
    }

    #[test]
    fn field_resolution_has_length_zero() {
        let a = Arc::new(FiniteAlgebra::zmod(2));
        let r = resolve_module(&FinModule::free(a, 1), 4, Strategy::Reversed).unwrap();
        assert_eq!(*r.certificate(), Certificate::Finite { length: 0 });
    }

    #[test]
    fn truncation_artifact_in_top_degree() {
        let r = resolve_module(&z2_over_z4(), 1, Strategy::Greedy).unwrap();
        assert_eq!(*r.certificate(), Certificate::Truncated { length: 1 });
        let r = r.extended(3);
        let h: Vec<String> = (0..=3).map(|k| r.complex().homology(k).module.group().to_string()).collect();
        assert_eq!(h, ["Z/2", "0", "0", "Z/2"]);
    }

    #[test]
    fn resolves_a_two_term_complex() {
        // Z/4 --×2--> Z/4 in degrees 1, 0 has homology Z/2 in both degrees.
        let a = Arc::new(FiniteAlgebra::zmod(4));
        let f = FinModule::free(a.clone(), 1);
        let x = ChainComplex::new(a, 0, vec![f.clone(), f], vec![IntMatrix::from_rows(&[vec![2]])]).unwrap();
        let r = free_resolution(&x, 3, Strategy::Greedy).unwrap();
        for k in 0..=2 {
            assert!(r.augmentation().is_iso_on_homology(k), "degree {k}");
        }
    }

    #[test]
    fn square_zero_quotient_of_triangular_algebra() {
        let a = Arc::new(FiniteAlgebra::upper_triangular(2));
        // The simple module killed by e11 and e12.
        let m = FinModule::cyclic_quotient(a.clone(), &[a.basis(0), a.basis(1)]);
        let r = resolve_module(&m, 4, Strategy::Greedy).unwrap();
        assert_eq!(m.order(), Some(Int::from(2)));
        assert!(matches!(r.certificate(), Certificate::Finite { .. } | Certificate::Periodic { .. }));
        let r2 = resolve_module(&m, 4, Strategy::Reversed).unwrap();
        r2.verify().unwrap();
    }

    #[test]
    fn prime_field_cover_matches_general_cover() {
        let a = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
        let amb = FinModule::free(a.clone(), 3);
        assert_eq!(common_prime(amb.moduli()), Some(2));
        let orbit = |z: &Elem| -> Vec<Elem> { amb.action().iter().map(|m| amb.reduce(m.mul_vec(z))).collect() };
        let candidates: Vec<Elem> = (1..64u32).map(|v| (0..6).map(|i| Int::from((v >> i) & 1)).collect()).collect();
        let fp = cover_with(&amb, candidates.clone(), |gens| {
            let mut s = FpSpan::new(2);
            for z in gens.iter().flat_map(orbit) {
                s.insert(&z);
            }
            s
        });
        let general = cover_with(&amb, candidates, |gens| {
            let cols: Vec<Elem> = gens.iter().flat_map(orbit).collect();
            Subquotient::subgroup(amb.moduli(), &IntMatrix::from_columns(&cols, amb.rank()))
        });
        assert_eq!(fp, general);
        assert_eq!(fp.len(), 3);
        assert_eq!(common_prime(&[Int::from(4), Int::from(4)]), None);
    }
}
