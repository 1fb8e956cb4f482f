use std::collections::BTreeMap;

use serde::Serialize;

use super::cocycle::j_tensor;
use super::lift::DerivedLift;
use super::ObstructionError;
use crate::algebra::Bimodule;
use crate::exactlin::{Int, IntMatrix};
use crate::modcx::{cone, quasi_iso, tensor_complex, verify_short_exact, ChainComplex, ChainMap, SesReport, TensorProduct};
use crate::resolve::{free_resolution, Strategy};

fn order_string(x: &ChainComplex, k: i64) -> String {
    x.homology(k).module.order().map_or_else(|| "infinite".to_string(), |o| o.to_string())
}

fn block_diagonal(block: &IntMatrix, n: usize) -> IntMatrix {
    let (r, c) = block.shape();
    let mut out = IntMatrix::zeros(r * n, c * n);
    for g in 0..n {
        out.put_block(g * r, g * c, block);
    }
    out
}

/// The sequence `0 → J ⊗ F → X̃ → F → 0` of `R`-complexes and the identification of
/// `(J ⊗ F)[1]` with the cone of the projection.
#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub ses: SesReport,
    pub boundary_quasi_iso: bool,
    /// The lowest homology of `X̃` is not the direct sum of the outer two.
    pub non_split: bool,
    pub bottom_groups: [String; 3],
}

impl FiberReport {
    pub fn ok(&self) -> bool {
        self.ses.ok() && self.boundary_quasi_iso
    }
}

pub fn verify_fiber_sequence(lift: &DerivedLift) -> Result<FiberReport, ObstructionError> {
    let d = lift.datum();
    let res = lift.base();
    let xt = lift.complex();
    let jf = j_tensor(d, res).restrict_scalars(d.pi());
    let f = res.complex().restrict_scalars(d.pi());
    let (lo, hi) = xt.bounds();
    let incl = (lo..=hi).map(|k| (k, block_diagonal(d.inclusion(), res.rank(k)))).collect();
    let proj = (lo..=hi).map(|k| (k, block_diagonal(d.pi().matrix(), res.rank(k)))).collect();
    let i = ChainMap::new(jf.clone(), xt.clone(), incl)?;
    let p = ChainMap::new(xt.clone(), f.clone(), proj)?;
    let ses = verify_short_exact(&i, &p);
    let c = cone(&p);
    let comps = (lo + 1..=hi + 1)
        .map(|k| {
            let (xa, ja) = (xt.term(k - 1).rank(), jf.term(k - 1).rank());
            let mut m = IntMatrix::zeros(xa + f.term(k).rank(), ja);
            m.put_block(0, 0, &i.component_matrix(k - 1));
            (k, m)
        })
        .collect();
    let boundary = ChainMap::new(jf.shift(1), c, comps)?;
    let boundary_quasi_iso = quasi_iso(&boundary);
    let bottom = [jf.homology(lo).module.group(), xt.homology(lo).module.group(), f.homology(lo).module.group()];
    let split = {
        let mut moduli = bottom[0].invariant_factors().to_vec();
        moduli.extend_from_slice(bottom[2].invariant_factors());
        crate::exactlin::AbGroup::from_moduli(&moduli)
    };
    let non_split = split != bottom[1];
    Ok(FiberReport { ses, boundary_quasi_iso, non_split, bottom_groups: bottom.map(|g| g.to_string()) })
}

/// One layer `X^{k+1} → X^k` of the `J`-adic tower.
#[derive(Clone, Debug, Serialize)]
pub struct AdamsLevel {
    pub level: usize,
    pub null: bool,
    /// Orders of `H_i(cone(X^{k+1} → X^k))` and of `H_i(S ⊗_R P(X^k))`.
    pub graded_orders: BTreeMap<i64, [String; 2]>,
    pub graded_matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdamsReport {
    pub levels: Vec<AdamsLevel>,
    /// Homology orders of the bottom layer agree with those of the base resolution.
    pub bottom_matches_base: bool,
}

impl AdamsReport {
    pub fn ok(&self) -> bool {
        self.bottom_matches_base && self.levels.iter().all(|l| l.graded_matches && (l.level == 0 || l.null))
    }
}

/// Builds `X⁰ = X̃`, `X^{k+1} = J ⊗_R P(X^k)` for `levels` layers, resolving each with
/// `length` extra degrees, and compares each layer's cone with `S ⊗_R P(X^k)`. Each layer
/// is cut above degree `through`, which leaves its homology below `through` unchanged.
pub fn adams_graded(lift: &DerivedLift, levels: usize, through: i64, length: usize) -> Result<AdamsReport, ObstructionError> {
    let d = lift.datum();
    let j_r = d.j().restrict(d.pi(), d.pi());
    let s_r = Bimodule::regular(d.s().clone()).restrict(d.pi(), d.pi());
    let r = d.r().clone();
    let rr = r.rank();
    let mut x = lift.complex().truncated_above(through);
    let mut out = Vec::new();
    let mut bottom_matches_base = true;
    for level in 0..levels {
        let p = free_resolution(&x, length, Strategy::Greedy)?;
        let pc = p.complex();
        let jp = tensor_complex(&j_r, pc)?;
        let (lo, hi) = pc.bounds();
        let mut comps = Vec::new();
        for k in lo..=hi {
            let n = p.rank(k);
            let t = TensorProduct::new(&j_r, pc.term(k))?;
            let cols: Vec<Vec<Int>> = t
                .generator_tensors()
                .iter()
                .map(|v| {
                    let mut w = vec![Int::from(0); n * rr];
                    for (idx, c) in v.iter().enumerate() {
                        let (q, col) = (idx / (n * rr), idx % (n * rr));
                        let (g, s) = (col / rr, col % rr);
                        let prod = r.mul(&d.include(&j_basis(j_r.rank(), q)), &r.basis(s));
                        for (a, b) in w[g * rr..(g + 1) * rr].iter_mut().zip(prod) {
                            *a += c * b;
                        }
                    }
                    pc.term(k).reduce(w)
                })
                .collect();
            comps.push((k, IntMatrix::from_columns(&cols, n * rr)));
        }
        let mult = ChainMap::new(jp.clone(), pc.clone(), comps)?;
        let f = mult.then(p.augmentation());
        let null = (f.range().0..=f.range().1).all(|k| f.component_matrix(k).reduced_rows(x.term(k).moduli()).is_zero());
        let gr = cone(&f);
        let sp = tensor_complex(&s_r, pc)?;
        let top = hi - 2;
        let mut graded_orders = BTreeMap::new();
        for i in lo..=top {
            graded_orders.insert(i, [order_string(&gr, i), order_string(&sp, i)]);
        }
        let graded_matches = graded_orders.values().all(|[a, b]| a == b);
        if level == 0 {
            let base = lift.base().complex();
            bottom_matches_base = (lo..=top.min(base.hi() - 1)).all(|i| order_string(&gr, i) == order_string(base, i));
        }
        out.push(AdamsLevel { level, null, graded_orders, graded_matches });
        x = jp.truncated_above(through);
    }
    Ok(AdamsReport { levels: out, bottom_matches_base })
}

fn j_basis(n: usize, q: usize) -> Vec<Int> {
    let mut e = vec![Int::from(0); n];
    e[q] = Int::from(1);
    e
}
