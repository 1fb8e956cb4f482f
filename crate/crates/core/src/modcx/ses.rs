use std::collections::BTreeMap;

use serde::Serialize;

use super::{ChainComplex, ChainMap};
use crate::algebra::Elem;
use crate::exactlin::{kernel_in, solve_in, Int, IntMatrix, Subquotient};

/// Outcome of checking a short exact sequence `0 → A → B → C → 0` of complexes.
#[derive(Clone, Debug, Serialize)]
pub struct SesReport {
    pub levelwise_exact: bool,
    pub les_exact: bool,
    /// Human-readable descriptions of every failed check.
    pub failures: Vec<String>,
    /// Orders of `H_k(A)`, `H_k(B)`, `H_k(C)` by degree.
    pub homology_orders: BTreeMap<i64, [String; 3]>,
}

impl SesReport {
    pub fn ok(&self) -> bool {
        self.levelwise_exact && self.les_exact
    }
}

/// `im(f) = ker(g)` for `f: M → N`, `g: N → P`.
pub fn exact_at(f: &IntMatrix, g: &IntMatrix, m: &[Int], n: &[Int], p: &[Int]) -> bool {
    let gf = (g * f).reduced_rows(p);
    if !gf.is_zero() {
        return false;
    }
    let ker = kernel_in(g, n, p);
    ker.columns().iter().all(|c| solve_in(f, c, m, n).is_some())
}

fn order_string(x: &Subquotient) -> String {
    x.group().order().map_or_else(|| "infinite".to_string(), |o| o.to_string())
}

/// Verifies levelwise exactness and exactness of the long exact homology sequence, with the
/// connecting map built by lifting through `p` and pulling back along `i`.
pub fn verify_short_exact(i: &ChainMap, p: &ChainMap) -> SesReport {
    let (a, b, c) = (i.source(), i.target(), p.target());
    let lo = a.lo().min(b.lo()).min(c.lo());
    let hi = a.hi().max(b.hi()).max(c.hi());
    let mut failures = Vec::new();
    for k in lo..=hi {
        let (ak, bk, ck) = (a.term(k).moduli(), b.term(k).moduli(), c.term(k).moduli());
        let (ik, pk) = (i.component_matrix(k), p.component_matrix(k));
        if kernel_in(&ik, ak, bk).cols() != 0 {
            failures.push(format!("degree {k}: inclusion not injective"));
        }
        if !Subquotient::quotient(ck, &pk).group().is_trivial() {
            failures.push(format!("degree {k}: projection not surjective"));
        }
        if !exact_at(&ik, &pk, ak, bk, ck) {
            failures.push(format!("degree {k}: image of inclusion differs from kernel of projection"));
        }
    }
    let levelwise_exact = failures.is_empty();
    let mut les_ok = true;
    let mut homology_orders = BTreeMap::new();
    if levelwise_exact {
        for k in lo..=hi + 1 {
            let (ha, hb, mi) = i.on_homology(k);
            let (_, hc, mp) = p.on_homology(k);
            homology_orders.insert(
                k,
                [order_string(ha.subquotient()), order_string(hb.subquotient()), order_string(hc.subquotient())],
            );
            let delta = connecting_map(i, p, k, a, b, c);
            let ha_prev = a.homology(k - 1);
            let (_, _, mi_prev) = i.on_homology(k - 1);
            let (ma, mb, mc, ma_prev) =
                (ha.module.moduli(), hb.module.moduli(), hc.module.moduli(), ha_prev.module.moduli());
            let hb_prev = b.homology(k - 1);
            if !exact_at(&mi, &mp, ma, mb, mc) {
                failures.push(format!("long exact sequence fails at H_{k}(B)"));
                les_ok = false;
            }
            if !exact_at(&mp, &delta, mb, mc, ma_prev) {
                failures.push(format!("long exact sequence fails at H_{k}(C)"));
                les_ok = false;
            }
            if !exact_at(&delta, &mi_prev, mc, ma_prev, hb_prev.module.moduli()) {
                failures.push(format!("long exact sequence fails at H_{}(A)", k - 1));
                les_ok = false;
            }
        }
    }
    SesReport { levelwise_exact, les_exact: levelwise_exact && les_ok, failures, homology_orders }
}

/// `δ: H_k(C) → H_{k−1}(A)` in homology coordinates.
fn connecting_map(i: &ChainMap, p: &ChainMap, k: i64, a: &ChainComplex, b: &ChainComplex, c: &ChainComplex) -> IntMatrix {
    let hc = c.homology(k);
    let ha = a.homology(k - 1);
    let pk = p.component_matrix(k);
    let ik = i.component_matrix(k - 1);
    let cols: Vec<Elem> = hc
        .representatives()
        .iter()
        .map(|z| {
            let lift = solve_in(&pk, z, b.term(k).moduli(), c.term(k).moduli()).expect("projection is surjective");
            let db = b.diff_matrix(k).mul_vec(&lift);
            let pre = solve_in(&ik, &db, a.term(k - 1).moduli(), b.term(k - 1).moduli()).expect("boundary lies in A");
            ha.class_of(&pre).expect("pullback of a boundary is a cycle")
        })
        .collect();
    IntMatrix::from_columns(&cols, ha.module.rank())
}
