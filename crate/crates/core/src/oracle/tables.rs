use std::collections::{HashMap, HashSet, VecDeque};

use num_traits::ToPrimitive;

use super::OracleError;
use crate::algebra::FiniteAlgebra;
use crate::exactlin::{Int, IntMatrix};

pub(crate) type Table = Vec<u16>;

fn small(x: &Int, what: &str) -> Result<u64, OracleError> {
    x.to_u64().filter(|&v| v > 0).ok_or_else(|| OracleError::Unsupported(format!("{what} must be a positive machine integer")))
}

/// Mixed-radix enumeration of `⊕ Z/mᵢ`, first coordinate fastest.
#[derive(Clone, Debug)]
pub(crate) struct Radix {
    pub moduli: Vec<u64>,
    pub size: usize,
}

impl Radix {
    pub fn new(moduli: Vec<u64>, cap: usize) -> Result<Self, OracleError> {
        let mut size: usize = 1;
        for &m in &moduli {
            size = size.checked_mul(m as usize).filter(|&s| s <= cap).ok_or(OracleError::BudgetExceeded { budget: cap, needed: None })?;
        }
        Ok(Radix { moduli, size })
    }

    pub fn coords(&self, mut x: usize) -> Vec<u64> {
        self.moduli
            .iter()
            .map(|&m| {
                let c = x as u64 % m;
                x /= m as usize;
                c
            })
            .collect()
    }

    pub fn index(&self, c: &[u64]) -> usize {
        let mut x = 0usize;
        for (v, &m) in c.iter().zip(&self.moduli).rev() {
            x = x * m as usize + (*v % m) as usize;
        }
        x
    }

    pub fn add_table(&self) -> Table {
        let n = self.size;
        let mut t = vec![0u16; n * n];
        for a in 0..n {
            let ca = self.coords(a);
            for b in 0..n {
                let cb = self.coords(b);
                let s: Vec<u64> = ca.iter().zip(&cb).map(|(x, y)| x + y).collect();
                t[a * n + b] = self.index(&s) as u16;
            }
        }
        t
    }
}

/// A finite ring by its addition and multiplication tables.
#[derive(Clone, Debug)]
pub(crate) struct Ring {
    pub radix: Radix,
    pub add: Table,
    pub mul: Table,
    pub one: u16,
}

impl Ring {
    pub fn from_algebra(a: &FiniteAlgebra, cap: usize) -> Result<Self, OracleError> {
        let moduli: Vec<u64> = a.moduli().iter().map(|m| small(m, "ring modulus")).collect::<Result<_, _>>()?;
        let radix = Radix::new(moduli.clone(), cap)?;
        let n = radix.size;
        let rank = moduli.len();
        let consts: Vec<Vec<Vec<i64>>> = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| a.structure_constant(i, j).iter().map(|c| c.to_i64().expect("small structure constant")).collect())
                    .collect()
            })
            .collect();
        let mut mul = vec![0u16; n * n];
        for x in 0..n {
            let cx = radix.coords(x);
            for y in 0..n {
                let cy = radix.coords(y);
                let mut z = vec![0i64; rank];
                for i in 0..rank {
                    for j in 0..rank {
                        let f = (cx[i] * cy[j]) as i64;
                        if f == 0 {
                            continue;
                        }
                        for k in 0..rank {
                            z[k] = (z[k] + f * consts[i][j][k]).rem_euclid(moduli[k] as i64);
                        }
                    }
                }
                let z: Vec<u64> = z.into_iter().map(|v| v as u64).collect();
                mul[x * n + y] = radix.index(&z) as u16;
            }
        }
        let unit: Vec<u64> =
            a.unit().iter().zip(&moduli).map(|(c, &m)| c.to_i64().expect("small unit").rem_euclid(m as i64) as u64).collect();
        let one = radix.index(&unit) as u16;
        let add = radix.add_table();
        Ok(Ring { radix, add, mul, one })
    }

    pub fn size(&self) -> usize {
        self.radix.size
    }

    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.size() + b as usize]
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.size() + b as usize]
    }

    /// The additive order of the unit.
    pub fn characteristic(&self) -> u64 {
        let mut x = self.one;
        let mut k = 1;
        while x != 0 {
            x = self.add(x, self.one);
            k += 1;
        }
        k
    }

    /// A smallest generating set for the ring, and a derivation of every element from it.
    pub fn derivation(&self) -> Derivation {
        let n = self.size();
        for k in 0..=n {
            let mut found = None;
            for_each_subset(n, k, &mut |gens| {
                if found.is_none() {
                    let d = Derivation::build(self, gens);
                    if d.order.len() == n {
                        found = Some(d);
                    }
                }
            });
            if let Some(d) = found {
                return d;
            }
        }
        unreachable!("the whole ring generates itself")
    }
}

fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[u16])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<u16>, f: &mut dyn FnMut(&[u16])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            cur.push(i as u16);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::new(), f);
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Step {
    Zero,
    One,
    Sum(u16, u16),
    /// `gens[g] · e`.
    Mul(usize, u16),
}

/// The subring generated by `gens`, each element with the step that first produced it.
#[derive(Clone, Debug)]
pub(crate) struct Derivation {
    pub gens: Vec<u16>,
    pub order: Vec<(u16, Step)>,
}

impl Derivation {
    pub fn build(ring: &Ring, gens: &[u16]) -> Self {
        let mut seen = vec![false; ring.size()];
        let mut order = vec![(0u16, Step::Zero)];
        seen[0] = true;
        if !seen[ring.one as usize] {
            seen[ring.one as usize] = true;
            order.push((ring.one, Step::One));
        }
        let mut changed = true;
        while changed {
            changed = false;
            let mut i = 0;
            while i < order.len() {
                let e = order[i].0;
                for (g, &x) in gens.iter().enumerate() {
                    let p = ring.mul(x, e);
                    if !seen[p as usize] {
                        seen[p as usize] = true;
                        order.push((p, Step::Mul(g, e)));
                        changed = true;
                    }
                }
                for j in 0..=i {
                    let s = ring.add(order[j].0, e);
                    if !seen[s as usize] {
                        seen[s as usize] = true;
                        order.push((s, Step::Sum(order[j].0, e)));
                        changed = true;
                    }
                }
                i += 1;
            }
        }
        Derivation { gens: gens.to_vec(), order }
    }

    /// Extends maps on the generators to every derived element, `None` where underived.
    pub fn extend<T: Clone>(
        &self,
        size: usize,
        zero: T,
        one: T,
        images: &[T],
        add: impl Fn(&T, &T) -> T,
        compose: impl Fn(&T, &T) -> T,
    ) -> Vec<Option<T>> {
        let mut out: Vec<Option<T>> = vec![None; size];
        for &(e, step) in &self.order {
            let v = match step {
                Step::Zero => zero.clone(),
                Step::One => one.clone(),
                Step::Sum(a, b) => add(out[a as usize].as_ref().expect("derived"), out[b as usize].as_ref().expect("derived")),
                Step::Mul(g, b) => compose(&images[g], out[b as usize].as_ref().expect("derived")),
            };
            out[e as usize] = Some(v);
        }
        out
    }
}

/// A module over a [`Ring`]: addition table and the action of every ring element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct TabMod {
    pub n: usize,
    pub add: Table,
    pub act: Table,
}

impl TabMod {
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.n + b as usize]
    }

    pub fn act(&self, r: u16, x: u16) -> u16 {
        self.act[r as usize * self.n + x as usize]
    }

    /// From moduli and one action matrix per basis element of the ring's presentation.
    pub fn from_matrices(ring: &Ring, moduli: &[Int], action: &[IntMatrix], cap: usize) -> Result<Self, OracleError> {
        let m: Vec<u64> = moduli.iter().map(|x| small(x, "module modulus")).collect::<Result<_, _>>()?;
        let radix = Radix::new(m.clone(), cap)?;
        let n = radix.size;
        let mut act = vec![0u16; ring.size() * n];
        for r in 0..ring.size() {
            let rc = ring.radix.coords(r);
            for x in 0..n {
                let xc = radix.coords(x);
                let mut y = vec![0i64; m.len()];
                for (s, mat) in action.iter().enumerate() {
                    if rc[s] == 0 {
                        continue;
                    }
                    for (i, yi) in y.iter_mut().enumerate() {
                        for (j, &xj) in xc.iter().enumerate() {
                            let a = mat.get(i, j).to_i64().expect("small action entry");
                            *yi = (*yi + rc[s] as i64 * a * xj as i64).rem_euclid(m[i] as i64);
                        }
                    }
                }
                let y: Vec<u64> = y.into_iter().map(|v| v as u64).collect();
                act[r * n + x] = radix.index(&y) as u16;
            }
        }
        Ok(TabMod { n, add: radix.add_table(), act })
    }

    /// The submodule of `R^m` given by an element list closed under the operations.
    pub fn from_free_elements(ring: &Ring, elems: &[Vec<u16>]) -> Self {
        let n = elems.len();
        let index: HashMap<&Vec<u16>, u16> = elems.iter().enumerate().map(|(i, e)| (e, i as u16)).collect();
        let mut add = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let s: Vec<u16> = elems[a].iter().zip(&elems[b]).map(|(&x, &y)| ring.add(x, y)).collect();
                add[a * n + b] = index[&s];
            }
        }
        let mut act = vec![0u16; ring.size() * n];
        for r in 0..ring.size() {
            for x in 0..n {
                let s: Vec<u16> = elems[x].iter().map(|&y| ring.mul(r as u16, y)).collect();
                act[r * n + x] = index[&s];
            }
        }
        TabMod { n, add, act }
    }

    /// Additive closure of `seeds` (it is a submodule when `seeds` is closed under the action).
    pub fn additive_span(&self, seeds: impl IntoIterator<Item = u16>) -> Vec<bool> {
        let mut inside = vec![false; self.n];
        inside[0] = true;
        let mut members = vec![0u16];
        let mut queue: VecDeque<u16> = seeds.into_iter().collect();
        while let Some(s) = queue.pop_front() {
            if inside[s as usize] {
                continue;
            }
            let snapshot = members.clone();
            for m in snapshot {
                let mut x = self.add(m, s);
                while !inside[x as usize] {
                    inside[x as usize] = true;
                    members.push(x);
                    x = self.add(x, s);
                }
            }
        }
        inside
    }

    fn span_of(&self, ring_size: usize, gens: &[u16]) -> Vec<bool> {
        let seeds: Vec<u16> = gens.iter().flat_map(|&g| (0..ring_size as u16).map(move |r| (r, g))).map(|(r, g)| self.act(r, g)).collect();
        self.additive_span(seeds)
    }

    /// Greedy generators: repeatedly the element enlarging the span the most (smallest index
    /// on ties).
    pub fn generators(&self, ring_size: usize) -> Vec<u16> {
        let mut gens = Vec::new();
        let mut inside = vec![false; self.n];
        inside[0] = true;
        while inside.iter().any(|&b| !b) {
            let mut best: Option<(usize, u16, Vec<bool>)> = None;
            for x in (0..self.n as u16).filter(|&x| !inside[x as usize]) {
                let mut trial = gens.clone();
                trial.push(x);
                let span = self.span_of(ring_size, &trial);
                let size = span.iter().filter(|&&b| b).count();
                if best.as_ref().is_none_or(|(s, _, _)| size > *s) {
                    let full = size == self.n;
                    best = Some((size, x, span));
                    if full {
                        break;
                    }
                }
            }
            let (_, x, span) = best.expect("an element outside the span");
            gens.push(x);
            inside = span;
        }
        gens
    }

    /// `N / P` for a submodule `P` given by membership, with the action of `S` through the
    /// ring surjection `lift_of` (one preimage per element of `S`).
    pub fn quotient(&self, sub: &[bool], lift_of: &[u16]) -> (TabMod, Vec<u16>) {
        let mut class = vec![u16::MAX; self.n];
        let members: Vec<u16> = (0..self.n as u16).filter(|&x| sub[x as usize]).collect();
        let mut count = 0u16;
        for x in 0..self.n {
            if class[x] != u16::MAX {
                continue;
            }
            for &p in &members {
                class[self.add(x as u16, p) as usize] = count;
            }
            count += 1;
        }
        let n = count as usize;
        let rep: Vec<u16> = (0..n).map(|c| (0..self.n).find(|&x| class[x] == c as u16).expect("nonempty") as u16).collect();
        let mut add = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                add[a * n + b] = class[self.add(rep[a], rep[b]) as usize];
            }
        }
        let mut act = vec![0u16; lift_of.len() * n];
        for (s, &r) in lift_of.iter().enumerate() {
            for x in 0..n {
                act[s * n + x] = class[self.act(r, rep[x]) as usize];
            }
        }
        (TabMod { n, add, act }, class)
    }

    /// Annihilator of `x` as a bit pattern over ring elements.
    pub fn annihilator(&self, ring_size: usize, x: u16) -> Vec<bool> {
        (0..ring_size as u16).map(|r| self.act(r, x) == 0).collect()
    }
}

/// Isomorphisms `A → B` (all of them, or the first), found by sending greedy generators of `A`
/// to elements of `B` with the same annihilator and checking every relation.
pub(crate) fn module_isos(ring_size: usize, a: &TabMod, b: &TabMod, all: bool) -> Vec<Table> {
    if a.n != b.n {
        return Vec::new();
    }
    let gens = a.generators(ring_size);
    let candidates: Vec<Vec<u16>> = gens
        .iter()
        .map(|&g| {
            let ann = a.annihilator(ring_size, g);
            (0..b.n as u16).filter(|&y| b.annihilator(ring_size, y) == ann).collect()
        })
        .collect();
    // BFS tree over A: each element reached as prev + r·g.
    let mut tree: Vec<Option<(u16, usize, u16)>> = vec![None; a.n];
    let mut order = vec![0u16];
    let mut seen = vec![false; a.n];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        for (gi, &g) in gens.iter().enumerate() {
            for r in 0..ring_size as u16 {
                let y = a.add(x, a.act(r, g));
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    tree[y as usize] = Some((x, gi, r));
                    order.push(y);
                }
            }
        }
        i += 1;
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    if candidates.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let images: Vec<u16> = choice.iter().zip(&candidates).map(|(&c, cs)| cs[c]).collect();
        let mut phi = vec![0u16; a.n];
        for &x in &order[1..] {
            let (p, gi, r) = tree[x as usize].expect("reached");
            phi[x as usize] = b.add(phi[p as usize], b.act(r, images[gi]));
        }
        let consistent = (0..a.n as u16).all(|x| {
            gens.iter().enumerate().all(|(gi, &g)| {
                (0..ring_size as u16).all(|r| phi[a.add(x, a.act(r, g)) as usize] == b.add(phi[x as usize], b.act(r, images[gi])))
            })
        });
        if consistent && phi.iter().collect::<HashSet<_>>().len() == a.n {
            out.push(phi);
            if !all {
                return out;
            }
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}
