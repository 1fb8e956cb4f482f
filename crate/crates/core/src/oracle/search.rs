use std::collections::{BTreeMap, HashSet};

use super::tables::{module_isos, Derivation, Radix, Ring, TabMod, Table};
use super::OracleError;

fn compose(f: &Table, g: &Table) -> Table {
    g.iter().map(|&x| f[x as usize]).collect()
}

/// All endomorphisms of `⊕ Z/mᵢ`, as tables.
pub(crate) fn endomorphisms(radix: &Radix, add: &Table) -> Vec<Table> {
    let n = radix.size;
    let sum = |a: u16, b: u16| add[a as usize * n + b as usize];
    let times = |k: u64, x: u16| (0..k).fold(0u16, |acc, _| sum(acc, x));
    let targets: Vec<Vec<u16>> =
        radix.moduli.iter().map(|&m| (0..n as u16).filter(|&y| times(m, y) == 0).collect()).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; targets.len()];
    loop {
        let images: Vec<u16> = choice.iter().zip(&targets).map(|(&c, t)| t[c]).collect();
        let table: Table = (0..n)
            .map(|x| radix.coords(x).iter().zip(&images).fold(0u16, |acc, (&c, &y)| sum(acc, times(c, y))))
            .collect();
        out.push(table);
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < targets[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn is_bijective(t: &Table) -> bool {
    t.iter().collect::<HashSet<_>>().len() == t.len()
}

fn inverse(t: &Table) -> Table {
    let mut inv = vec![0u16; t.len()];
    for (x, &y) in t.iter().enumerate() {
        inv[y as usize] = x as u16;
    }
    inv
}

/// Extends generator actions to the whole derived subring and checks additivity and
/// multiplicativity on it.
fn extend_and_check(ring: &Ring, der: &Derivation, images: &[Table], n: usize, add: &Table) -> Option<Vec<Option<Table>>> {
    let zero = vec![0u16; n];
    let id: Table = (0..n as u16).collect();
    let pointwise = |f: &Table, g: &Table| -> Table { f.iter().zip(g).map(|(&a, &b)| add[a as usize * n + b as usize]).collect() };
    let ext = der.extend(ring.size(), zero, id, images, pointwise, compose);
    let elems: Vec<u16> = der.order.iter().map(|(e, _)| *e).collect();
    for &a in &elems {
        let fa = ext[a as usize].as_ref()?;
        for &b in &elems {
            let fb = ext[b as usize].as_ref()?;
            let s = ext[ring.add(a, b) as usize].as_ref()?;
            if (0..n).any(|x| s[x] != add[fa[x] as usize * n + fb[x] as usize]) {
                return None;
            }
            let p = ext[ring.mul(a, b) as usize].as_ref()?;
            if (0..n).any(|x| p[x] != fa[fb[x] as usize]) {
                return None;
            }
        }
    }
    Some(ext)
}

/// Every module structure on the group with the given moduli, one per isomorphism class, in
/// a canonical order.
pub(crate) fn module_structures(ring: &Ring, moduli: &[u64], cap: usize) -> Result<Vec<TabMod>, OracleError> {
    let radix = Radix::new(moduli.to_vec(), cap)?;
    let n = radix.size;
    let add = radix.add_table();
    let char = ring.characteristic();
    if moduli.iter().any(|&m| char % m != 0) {
        return Ok(Vec::new());
    }
    let full = ring.derivation();
    let gens = full.gens.clone();
    let ends = endomorphisms(&radix, &add);
    let auts: Vec<Table> = ends.iter().filter(|t| is_bijective(t)).cloned().collect();
    let prefixes: Vec<Derivation> = (1..=gens.len()).map(|t| Derivation::build(ring, &gens[..t])).collect();
    let mut partial: Vec<Vec<Table>> = vec![Vec::new()];
    for (level, der) in prefixes.iter().enumerate() {
        let mut next = Vec::new();
        for p in &partial {
            for e in &ends {
                let mut images = p.clone();
                images.push(e.clone());
                if extend_and_check(ring, der, &images, n, &add).is_some() {
                    next.push(images);
                }
            }
        }
        if level == 0 {
            // Up to conjugation the first generator can be taken from a set of orbit
            // representatives.
            let mut seen: HashSet<Table> = HashSet::new();
            let mut reps = Vec::new();
            next.sort();
            for images in next {
                if seen.contains(&images[0]) {
                    continue;
                }
                for a in &auts {
                    let ai = inverse(a);
                    seen.insert(compose(a, &compose(&images[0], &ai)));
                }
                reps.push(images);
            }
            next = reps;
        }
        partial = next;
    }
    let mut structures = Vec::new();
    for images in partial {
        let ext = extend_and_check(ring, &full, &images, n, &add).ok_or(OracleError::Internal("full check failed".into()))?;
        let act: Table = ext.into_iter().flat_map(|t| t.expect("every element is derived")).collect();
        structures.push(TabMod { n, add: add.clone(), act });
    }
    Ok(dedup_isomorphic(ring.size(), structures))
}

fn invariant(ring_size: usize, m: &TabMod) -> Vec<usize> {
    (0..ring_size as u16).map(|r| (0..m.n as u16).filter(|&x| m.act(r, x) == 0).count()).collect()
}

/// Keeps the first module of every isomorphism class, bucketing by kernel sizes.
pub(crate) fn dedup_isomorphic(ring_size: usize, mut mods: Vec<TabMod>) -> Vec<TabMod> {
    mods.sort_by(|a, b| a.act.cmp(&b.act));
    let mut buckets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    let mut keep = Vec::new();
    for (i, m) in mods.iter().enumerate() {
        let key = invariant(ring_size, m);
        let bucket = buckets.entry(key).or_default();
        if bucket.iter().all(|&j| module_isos(ring_size, &mods[j], m, false).is_empty()) {
            bucket.push(i);
            keep.push(i);
        }
    }
    keep.into_iter().map(|i| mods[i].clone()).collect()
}

/// Abelian groups `⊕ Z/p^e` of the given order whose exponent divides `exponent`, as
/// moduli lists.
pub(crate) fn abelian_groups(order: u64, exponent: u64) -> Vec<Vec<u64>> {
    let mut primes = Vec::new();
    let mut rest = order;
    let mut p = 2;
    while rest > 1 {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            primes.push((p, e));
        }
        p += 1;
    }
    let mut out: Vec<Vec<u64>> = vec![Vec::new()];
    for (p, e) in primes {
        let parts = partitions(e, e);
        let mut next = Vec::new();
        for base in &out {
            for part in &parts {
                let mut g = base.clone();
                g.extend(part.iter().map(|&k| p.pow(k)));
                if g.iter().all(|&m| exponent % m == 0) {
                    next.push(g);
                }
            }
        }
        out = next;
    }
    out
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for k in (1..=max.min(n)).rev() {
        for mut rest in partitions(n - k, k) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

/// Ring isomorphisms by sending a generating set to all tuples of elements.
pub(crate) fn rings_isomorphic(a: &Ring, b: &Ring) -> bool {
    if a.size() != b.size() {
        return false;
    }
    let der = a.derivation();
    let k = der.gens.len();
    let n = b.size();
    let mut choice = vec![0u16; k];
    loop {
        let ext = der.extend(a.size(), 0u16, b.one, &choice, |&x, &y| b.add(x, y), |&x, &y| b.mul(x, y));
        let f: Vec<u16> = ext.into_iter().map(|v| v.expect("derived")).collect();
        if is_bijective(&f)
            && (0..a.size() as u16).all(|x| {
                (0..a.size() as u16).all(|y| {
                    f[a.add(x, y) as usize] == b.add(f[x as usize], f[y as usize])
                        && f[a.mul(x, y) as usize] == b.mul(f[x as usize], f[y as usize])
                })
            })
        {
            return true;
        }
        let mut i = 0;
        loop {
            if i == k {
                return false;
            }
            choice[i] += 1;
            if (choice[i] as usize) < n {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
