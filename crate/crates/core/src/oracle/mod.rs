//! Brute-force ground truth on multiplication tables: module structures on small groups,
//! discrete lifts along a square-zero extension, Ext by enumerating cochains, and ring
//! isomorphism search. Nothing here calls the linear-algebra or resolution code.

mod search;
mod tables;

use std::collections::HashSet;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::algebra::{FiniteAlgebra, SquareZeroDatum};
use crate::exactlin::{AbGroup, Int, IntMatrix};
use crate::modcx::FinModule;
use search::{abelian_groups, module_structures};
use tables::{module_isos, Radix, Ring, TabMod};

/// Hard cap on ring and group orders for structure enumeration.
pub const ENUMERATION_CAP: usize = 16;
/// Cap on ring orders for the tables behind lift search and structure enumeration.
pub const RING_CAP: usize = 64;
/// Cap on free modules enumerated while computing syzygies and cochains.
pub const ELEMENT_CAP: usize = 1 << 16;
/// How many syzygies are computed while looking for a repeat.
pub const SYZYGY_DEPTH: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("search space exceeds the budget of {budget} elements{}", needed.map(|n| format!(" (needs {n})")).unwrap_or_default())]
    BudgetExceeded { budget: usize, needed: Option<usize> },
    #[error("syzygies did not repeat within {0} steps")]
    UncertifiedResolution(usize),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("internal oracle failure: {0}")]
    Internal(String),
}

fn group_moduli(g: &AbGroup) -> Result<Vec<u64>, OracleError> {
    if g.free_rank() > 0 {
        return Err(OracleError::Unsupported("infinite group".into()));
    }
    let mut out = Vec::new();
    for f in g.torsion_factors() {
        let mut m = f.to_u64().ok_or_else(|| OracleError::Unsupported("large factor".into()))?;
        let mut p = 2;
        while m > 1 {
            let mut q = 1;
            while m % p == 0 {
                m /= p;
                q *= p;
            }
            if q > 1 {
                out.push(q);
            }
            p += 1;
        }
    }
    Ok(out)
}

fn to_fin_module(alg: &std::sync::Arc<FiniteAlgebra>, ring: &Ring, moduli: &[u64], m: &TabMod) -> FinModule {
    let radix = Radix::new(moduli.to_vec(), usize::MAX).expect("within cap");
    let action = (0..alg.rank())
        .map(|s| {
            let mut basis = vec![0u64; alg.rank()];
            basis[s] = 1;
            let r = ring.radix.index(&basis) as u16;
            let cols: Vec<Vec<Int>> = (0..moduli.len())
                .map(|j| {
                    let mut e = vec![0u64; moduli.len()];
                    e[j] = 1;
                    radix.coords(m.act(r, radix.index(&e) as u16) as usize).into_iter().map(Int::from).collect()
                })
                .collect();
            IntMatrix::from_columns(&cols, moduli.len())
        })
        .collect();
    FinModule::new(alg.clone(), moduli.iter().map(|&x| Int::from(x)).collect(), action).expect("enumerated structures are modules")
}

/// All module structures on `G` up to isomorphism, in a deterministic order.
pub fn enumerate_module_structures(r: &std::sync::Arc<FiniteAlgebra>, g: &AbGroup) -> Result<Vec<FinModule>, OracleError> {
    let ring = Ring::from_algebra(r, RING_CAP)?;
    let moduli = group_moduli(g)?;
    let mods = module_structures(&ring, &moduli, ENUMERATION_CAP)?;
    Ok(mods.iter().map(|m| to_fin_module(r, &ring, &moduli, m)).collect())
}

/// Whether two finite rings are isomorphic.
pub fn rings_isomorphic(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<bool, OracleError> {
    let ra = Ring::from_algebra(a, 256)?;
    let rb = Ring::from_algebra(b, 256)?;
    Ok(search::rings_isomorphic(&ra, &rb))
}

/// One isomorphism class of discrete lifts.
#[derive(Clone, Debug, Serialize)]
pub struct OracleLift {
    pub group: Vec<u64>,
    /// `|Aut_S(M)| / |image of Aut_R(X̃) in Aut_S(X̃/JX̃)|`: the number of lift classes this
    /// module accounts for once an identification with `M` is fixed.
    pub weight: usize,
    /// Number of syzygies checked before a repeat certified Tor-vanishing.
    pub syzygies_checked: usize,
    #[serde(skip)]
    pub module: FinModule,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleLifts {
    pub budget: usize,
    pub candidates: usize,
    /// First `i ≥ 1` with `Tor^S_i(J, M) ≠ 0`. Lifts then have homology above degree 0 and the
    /// discrete search cannot see them.
    pub nonzero_tor: Option<usize>,
    /// `|M| · |J ⊗_S M|`, the order of every discrete lift, when `nonzero_tor` is `None`.
    pub lift_order: Option<usize>,
    pub lifts: Vec<OracleLift>,
}

impl OracleLifts {
    pub fn exists(&self) -> bool {
        !self.lifts.is_empty()
    }

    /// Whether the search is exhaustive for all lifts, not just discrete ones.
    pub fn complete(&self) -> bool {
        self.nonzero_tor.is_none()
    }

    pub fn iso_classes(&self) -> usize {
        self.lifts.len()
    }

    /// Lifts counted together with their identification with `M`.
    pub fn pair_count(&self) -> usize {
        self.lifts.iter().map(|l| l.weight).sum()
    }
}

struct Extension {
    r: Ring,
    s: Ring,
    lift_of: Vec<u16>,
    j: Vec<u16>,
}

impl Extension {
    fn new(d: &SquareZeroDatum) -> Result<Self, OracleError> {
        let r = Ring::from_algebra(d.r(), RING_CAP)?;
        let s = Ring::from_algebra(d.s(), RING_CAP)?;
        let mat = d.pi().matrix();
        let pi: Vec<u16> = (0..r.size())
            .map(|x| {
                let c = r.radix.coords(x);
                let img: Vec<u64> = (0..mat.rows())
                    .map(|i| {
                        let v: i64 = (0..mat.cols()).map(|j| mat.get(i, j).to_i64().expect("small") * c[j] as i64).sum();
                        v.rem_euclid(s.radix.moduli[i] as i64) as u64
                    })
                    .collect();
                s.radix.index(&img) as u16
            })
            .collect();
        let lift_of = (0..s.size() as u16)
            .map(|y| pi.iter().position(|&v| v == y).map(|p| p as u16).ok_or_else(|| OracleError::Unsupported("not surjective".into())))
            .collect::<Result<_, _>>()?;
        let j = (0..r.size() as u16).filter(|&x| pi[x as usize] == 0).collect();
        Ok(Extension { r, s, lift_of, j })
    }

    fn jn(&self, n: &TabMod) -> Vec<bool> {
        n.additive_span(self.j.iter().flat_map(|&j| (0..n.n as u16).map(move |x| (j, x))).map(|(j, x)| n.act(j, x)))
    }
}

/// Every tuple of `ring^k`, `k` at most `ELEMENT_CAP` tuples, first coordinate fastest.
fn tuples(size: usize, k: usize) -> Result<Vec<Vec<u16>>, OracleError> {
    let total = size.checked_pow(k as u32).filter(|&t| t <= ELEMENT_CAP).ok_or(OracleError::BudgetExceeded { budget: ELEMENT_CAP, needed: None })?;
    Ok((0..total)
        .map(|idx| {
            let mut t = idx;
            (0..k)
                .map(|_| {
                    let v = (t % size) as u16;
                    t /= size;
                    v
                })
                .collect()
        })
        .collect())
}

/// Generators of `n` and the kernel of the cover `ring^k → n` they define.
fn cover_kernel(ring: &Ring, n: &TabMod) -> Result<(Vec<u16>, Vec<Vec<u16>>), OracleError> {
    let gens = n.generators(ring.size());
    let kernel = tuples(ring.size(), gens.len())?
        .into_iter()
        .filter(|t| t.iter().zip(&gens).fold(0u16, |acc, (&c, &g)| n.add(acc, n.act(c, g))) == 0)
        .collect();
    Ok((gens, kernel))
}

/// A free resolution by table syzygies: `rels[k][j]` is the image in `ring^{ranks[k]}` of
/// generator `j` of the next term. Stops after `steps` syzygies, or earlier at a zero syzygy.
struct TableResolution {
    ranks: Vec<usize>,
    rels: Vec<Vec<Vec<u16>>>,
    syzygies: Vec<TabMod>,
}

fn table_resolution(ring: &Ring, m: &TabMod, steps: usize) -> Result<TableResolution, OracleError> {
    let mut out = TableResolution { ranks: Vec::new(), rels: Vec::new(), syzygies: Vec::new() };
    let mut current = m.clone();
    for _ in 0..steps {
        let (gens, kernel) = cover_kernel(ring, &current)?;
        out.ranks.push(gens.len());
        let km = TabMod::from_free_elements(ring, &kernel);
        let kgens = km.generators(ring.size());
        out.rels.push(kgens.iter().map(|&g| kernel[g as usize].clone()).collect());
        out.syzygies.push(km.clone());
        if km.n == 1 {
            break;
        }
        current = km;
    }
    out.ranks.push(out.rels.last().map_or(0, Vec::len));
    Ok(out)
}

/// `Tor^S_i(J, M) = 0` for every `i ≥ 1`, computed as the homology of `J ⊗_S F` for a table
/// resolution `F` of `M`, with `J` acting on the right through `R`. A repeat among the
/// syzygies makes the check exhaustive.
fn tor_j_m_vanishes(ext: &Extension, m: &TabMod) -> Result<Result<usize, usize>, OracleError> {
    let s = &ext.s;
    for steps in 1..=SYZYGY_DEPTH {
        // One syzygy past the candidate repeat, so the last Tor group needed has its boundaries.
        let res = table_resolution(s, m, steps + 1)?;
        let last = steps - 1;
        let through = if res.syzygies[last].n == 1 {
            last
        } else if (0..last).any(|a| !module_isos(s.size(), &res.syzygies[a], &res.syzygies[last], false).is_empty()) {
            last + 1
        } else {
            continue;
        };
        return tor_j_through(ext, &res, through);
    }
    Err(OracleError::UncertifiedResolution(SYZYGY_DEPTH))
}

/// `Ok(|J ⊗_S M|)` when `Tor_i` vanishes for `1 ≤ i ≤ through`, else the first nonzero degree.
fn tor_j_through(ext: &Extension, res: &TableResolution, through: usize) -> Result<Result<usize, usize>, OracleError> {
    // `J ⊗_S S^k = J^k`; `d(e_j) = Σ_l rel_j[l] e_l` becomes `(x_j) ↦ (Σ_j x_j · rel_j[l])_l`,
    // with `S` acting on `J` through any lift to `R`.
    let d = |k: usize, x: &[u16]| -> Vec<u16> {
        (0..res.ranks[k])
            .map(|l| res.rels[k].iter().zip(x).fold(0u16, |acc, (rel, &xj)| ext.r.add(acc, ext.r.mul(xj, ext.lift_of[rel[l] as usize]))))
            .collect()
    };
    let chains = |k: usize| -> Result<Vec<Vec<u16>>, OracleError> {
        Ok(tuples(ext.j.len(), res.ranks[k])?.into_iter().map(|t| t.into_iter().map(|i| ext.j[i as usize]).collect()).collect())
    };
    let mut tensor = 0;
    for i in 0..=through {
        let cycles = chains(i)?.iter().filter(|x| i == 0 || d(i - 1, x).iter().all(|&v| v == 0)).count();
        let boundaries: HashSet<Vec<u16>> = chains(i + 1)?.iter().map(|x| d(i, x)).collect();
        if i == 0 {
            tensor = cycles / boundaries.len();
        } else if cycles != boundaries.len() {
            return Ok(Err(i));
        }
    }
    Ok(Ok(tensor))
}

/// The kernel of a free cover `R^k → N` as a list of tuples, with its `J`-torsion test:
/// `Tor₁(S, N) = (K ∩ J^k) / J·K`.
fn syzygy(ext: &Extension, n: &TabMod) -> Result<(Vec<Vec<u16>>, bool), OracleError> {
    let r = &ext.r;
    let (_, kernel) = cover_kernel(r, n)?;
    let in_j: HashSet<u16> = ext.j.iter().copied().collect();
    let k_cap_j = kernel.iter().filter(|t| t.iter().all(|x| in_j.contains(x))).count();
    let km = TabMod::from_free_elements(r, &kernel);
    let jk = ext.jn(&km).iter().filter(|&&b| b).count();
    Ok((kernel, k_cap_j == jk))
}

/// `Tor_i^R(S, N) = 0` for all `i ≥ 1`, certified by a repeat among successive syzygies.
/// Returns the number of syzygies examined, or `None` when some Tor group is nonzero.
fn tor_vanishes(ext: &Extension, n: &TabMod) -> Result<Option<usize>, OracleError> {
    let mut seen: Vec<TabMod> = Vec::new();
    let mut current = n.clone();
    for depth in 0..SYZYGY_DEPTH {
        let (kernel, tor1_zero) = syzygy(ext, &current)?;
        if !tor1_zero {
            return Ok(None);
        }
        if kernel.len() > 1024 {
            return Err(OracleError::BudgetExceeded { budget: 1024, needed: Some(kernel.len()) });
        }
        let next = TabMod::from_free_elements(&ext.r, &kernel);
        if next.n == 1 || seen.iter().any(|m| !module_isos(ext.r.size(), m, &next, false).is_empty()) {
            return Ok(Some(depth + 1));
        }
        seen.push(next.clone());
        current = next;
    }
    Err(OracleError::UncertifiedResolution(SYZYGY_DEPTH))
}

/// Discrete `R`-modules `X̃` with `X̃/JX̃ ≅ M` and `Tor^R_{≥1}(S, X̃) = 0`, up to isomorphism,
/// searched over every group of order at most `budget` (at most 16). The search covers every
/// lift only when `Tor^S_{≥1}(J, M) = 0`; otherwise the result records the first nonzero degree.
pub fn brute_force_lifts(d: &SquareZeroDatum, m: &FinModule, budget: usize) -> Result<OracleLifts, OracleError> {
    if budget > ENUMERATION_CAP {
        return Err(OracleError::BudgetExceeded { budget: ENUMERATION_CAP, needed: Some(budget) });
    }
    let ext = Extension::new(d)?;
    let target = TabMod::from_matrices(&ext.s, m.moduli(), m.action(), ENUMERATION_CAP)?;
    // A discrete lift is an extension of `M` by `J ⊗_S M`, which fixes its order.
    let (nonzero_tor, lift_order) = match tor_j_m_vanishes(&ext, &target)? {
        Ok(tensor) => (None, Some(target.n * tensor)),
        Err(i) => (Some(i), None),
    };
    if let Some(order) = lift_order.filter(|&o| o > budget) {
        return Err(OracleError::BudgetExceeded { budget, needed: Some(order) });
    }
    let aut_m = module_isos(ext.s.size(), &target, &target, true).len();
    let char = ext.r.characteristic();
    let mut candidates = 0;
    let mut lifts = Vec::new();
    let mut order = target.n;
    while order <= budget {
        for moduli in abelian_groups(order as u64, char) {
            for n in module_structures(&ext.r, &moduli, ENUMERATION_CAP)? {
                candidates += 1;
                let (q, class) = n.quotient(&ext.jn(&n), &ext.lift_of);
                if module_isos(ext.s.size(), &q, &target, false).is_empty() {
                    continue;
                }
                let Some(depth) = tor_vanishes(&ext, &n)? else { continue };
                let induced: HashSet<Vec<u16>> = module_isos(ext.r.size(), &n, &n, true)
                    .into_iter()
                    .map(|phi| {
                        let mut psi = vec![0u16; q.n];
                        for x in 0..n.n {
                            psi[class[x] as usize] = class[phi[x] as usize];
                        }
                        psi
                    })
                    .collect();
                lifts.push(OracleLift {
                    group: moduli.clone(),
                    weight: aut_m / induced.len(),
                    syzygies_checked: depth,
                    module: to_fin_module(d.r(), &ext.r, &moduli, &n),
                });
            }
        }
        order += target.n;
    }
    Ok(OracleLifts { budget, candidates, nonzero_tor, lift_order, lifts })
}

/// `Extⁱ_S(M, N)` by enumerating cochains on a free resolution built from table syzygies and
/// quotienting cocycles by coboundaries as sets.
pub fn oracle_ext(s: &FiniteAlgebra, m: &FinModule, n: &FinModule, i: usize) -> Result<AbGroup, OracleError> {
    let ring = Ring::from_algebra(s, 256)?;
    let mt = TabMod::from_matrices(&ring, m.moduli(), m.action(), ELEMENT_CAP)?;
    let nt = TabMod::from_matrices(&ring, n.moduli(), n.action(), ELEMENT_CAP)?;
    let TableResolution { ranks, rels, .. } = table_resolution(&ring, &mt, i + 1)?;
    if rels.len() <= i {
        // A zero syzygy: the resolution has stopped and `Extⁱ` vanishes beyond it.
        return Ok(AbGroup::from_moduli(&[]));
    }
    // δ: Hom(P_k, N) → Hom(P_{k+1}, N), f ↦ (j ↦ Σ_l rel_j[l] · f(l)).
    let coboundary = |k: usize, f: &[u16]| -> Vec<u16> {
        rels[k].iter().map(|rel| rel.iter().zip(f).fold(0u16, |acc, (&c, &y)| nt.add(acc, nt.act(c, y)))).collect()
    };
    let cochains = |k: usize| tuples(nt.n, ranks[k]);
    let cocycles: Vec<Vec<u16>> = cochains(i)?.into_iter().filter(|f| coboundary(i, f).iter().all(|&x| x == 0)).collect();
    let boundaries: HashSet<Vec<u16>> =
        if i == 0 { std::iter::once(vec![0u16; ranks[0]]).collect() } else { cochains(i - 1)?.iter().map(|f| coboundary(i - 1, f)).collect() };
    Ok(quotient_group(&cocycles, &boundaries, |a, b| a.iter().zip(b).map(|(&x, &y)| nt.add(x, y)).collect()))
}

/// The abelian group `Z/B` from element lists, read off from how many cosets each power of
/// each prime kills.
fn quotient_group(z: &[Vec<u16>], b: &HashSet<Vec<u16>>, add: impl Fn(&[u16], &[u16]) -> Vec<u16>) -> AbGroup {
    let order = z.len() / b.len();
    let coset_order = |x: &[u16]| -> usize {
        let mut acc = x.to_vec();
        let mut k = 1;
        while !b.contains(&acc) {
            acc = add(&acc, x);
            k += 1;
        }
        k
    };
    let orders: Vec<usize> = z.iter().map(|x| coset_order(x)).collect();
    let mut factors: Vec<u64> = Vec::new();
    let mut rest = order;
    let mut p = 2;
    while rest > 1 {
        if rest % p != 0 {
            p += 1;
            continue;
        }
        while rest % p == 0 {
            rest /= p;
        }
        // Number of cyclic summands of order ≥ p^k is log_p(c_k / c_{k−1}), c_k the number of
        // cosets killed by p^k.
        let killed = |k: u32| orders.iter().filter(|&&o| (p as u64).pow(k) % (o as u64) == 0 && is_power_of(o, p)).count() / b.len();
        let mut counts = vec![1usize];
        let mut k = 1;
        loop {
            let c = killed(k);
            counts.push(c);
            if c == counts[k as usize - 1] {
                break;
            }
            k += 1;
        }
        let log = |x: usize| {
            let mut e = 0;
            let mut y = x;
            while y > 1 {
                y /= p;
                e += 1;
            }
            e
        };
        let at_least: Vec<usize> = (1..counts.len()).map(|k| log(counts[k]) - log(counts[k - 1])).collect();
        for (k, w) in at_least.iter().enumerate() {
            let next = at_least.get(k + 1).copied().unwrap_or(0);
            for _ in 0..w - next {
                factors.push((p as u64).pow(k as u32 + 1));
            }
        }
        p += 1;
    }
    invariant_factors(factors)
}

fn is_power_of(mut x: usize, p: usize) -> bool {
    while x % p == 0 {
        x /= p;
    }
    x == 1
}

/// Combines prime-power cyclic factors into invariant factors `d₁ | d₂ | ⋯`.
fn invariant_factors(mut prime_powers: Vec<u64>) -> AbGroup {
    prime_powers.sort_unstable_by(|a, b| b.cmp(a));
    let mut slots: Vec<u64> = Vec::new();
    let mut used_primes: Vec<Vec<u64>> = Vec::new();
    for q in prime_powers {
        let p = (2..=q).find(|d| q % d == 0).expect("q > 1");
        match used_primes.iter().position(|ps| !ps.contains(&p)) {
            Some(i) => {
                slots[i] *= q;
                used_primes[i].push(p);
            }
            None => {
                slots.push(q);
                used_primes.push(vec![p]);
            }
        }
    }
    slots.reverse();
    AbGroup::from_invariant_factors(slots.into_iter().map(Int::from).collect()).expect("divisibility chain")
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::AlgebraMap;
    use crate::exactlin::ints;

    fn datum(r: FiniteAlgebra, s: FiniteAlgebra, rows: &[Vec<i64>]) -> SquareZeroDatum {
        SquareZeroDatum::from_surjection(AlgebraMap::new(Arc::new(r), Arc::new(s), IntMatrix::from_rows(rows)).unwrap()).unwrap()
    }

    #[test]
    fn structures_on_small_groups() {
        let z4 = Arc::new(FiniteAlgebra::zmod(4));
        let g = AbGroup::from_moduli(&ints(&[2, 2]));
        assert_eq!(enumerate_module_structures(&z4, &g).unwrap().len(), 1);
        let dual = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
        assert_eq!(enumerate_module_structures(&dual, &g).unwrap().len(), 2);
        assert_eq!(enumerate_module_structures(&z4, &AbGroup::from_moduli(&ints(&[4]))).unwrap().len(), 1);
    }

    #[test]
    fn lifts_of_z2() {
        let d = datum(FiniteAlgebra::zmod(4), FiniteAlgebra::zmod(2), &[vec![1]]);
        let m = FinModule::cyclic_quotient(d.s().clone(), &[ints(&[0])]);
        let found = brute_force_lifts(&d, &m, 8).unwrap();
        assert_eq!(found.iso_classes(), 1);
        assert_eq!(found.lifts[0].group, vec![4]);
        assert_eq!(found.pair_count(), 1);
        let d = datum(FiniteAlgebra::zmod(8), FiniteAlgebra::zmod(4), &[vec![1]]);
        let m = FinModule::cyclic_quotient(d.s().clone(), &[ints(&[2])]);
        assert!(!brute_force_lifts(&d, &m, 16).unwrap().exists());
    }

    #[test]
    fn ext_by_enumeration() {
        let z4 = Arc::new(FiniteAlgebra::zmod(4));
        let k = FinModule::cyclic_quotient(z4.clone(), &[ints(&[2])]);
        for i in 0..3 {
            assert_eq!(oracle_ext(&z4, &k, &k, i).unwrap().to_string(), "Z/2");
        }
        let f2 = Arc::new(FiniteAlgebra::zmod(2));
        let k = FinModule::free(f2.clone(), 1);
        assert!(oracle_ext(&f2, &k, &k, 1).unwrap().is_trivial());
        let z4m = FinModule::free(z4.clone(), 1);
        assert_eq!(oracle_ext(&z4, &z4m, &z4m, 0).unwrap().to_string(), "Z/4");
    }

    #[test]
    fn z4_is_not_f2_squared() {
        let a = FiniteAlgebra::zmod(4);
        let b = FiniteAlgebra::product(&FiniteAlgebra::zmod(2), &FiniteAlgebra::zmod(2));
        assert!(!rings_isomorphic(&a, &b).unwrap());
        assert!(rings_isomorphic(&a, &FiniteAlgebra::zmod(4)).unwrap());
    }
}
