mod common;

use std::sync::Arc;

use sqzlift_core::algebra::{extension_from_cocycle, split_square_zero, Bimodule, CocycleTables, Elem, FiniteAlgebra};
use sqzlift_core::exactlin::{ints, Int};
use sqzlift_core::oracle::rings_isomorphic;

#[test]
fn cocycle_fixture_is_z4() {
    let inst = common::fixture("cocycle-z4-over-z2");
    assert!(rings_isomorphic(inst.datum.r(), &FiniteAlgebra::zmod(4)).unwrap());
    assert!(!rings_isomorphic(inst.datum.r(), &FiniteAlgebra::trunc_poly(2, 2)).unwrap());
}

#[test]
fn non_associative_table_rejected() {
    // (Z/2)³ with unit e₀, e₁e₂ = e₂e₂ = e₁ and the other products zero: (e₁e₂)e₂ = e₁ but
    // e₁(e₂e₂) = 0.
    let e = |v: [i64; 3]| ints(&v);
    let mul = vec![
        vec![e([1, 0, 0]), e([0, 1, 0]), e([0, 0, 1])],
        vec![e([0, 1, 0]), e([0, 0, 0]), e([0, 1, 0])],
        vec![e([0, 0, 1]), e([0, 0, 0]), e([0, 1, 0])],
    ];
    let err = FiniteAlgebra::new(ints(&[2, 2, 2]), mul, e([1, 0, 0])).unwrap_err();
    assert!(err.to_string().contains("associat"), "{err}");
}

/// All additive maps `S → I` vanishing on the unit, as element tables.
fn normalized_additive_maps(s: &FiniteAlgebra, i: &Bimodule) -> Vec<Vec<Elem>> {
    let gens = s.rank();
    let i_elems = sqzlift_core::algebra::enumerate_group(i.moduli());
    let mut out = Vec::new();
    let mut choice = vec![0usize; gens];
    loop {
        let image = |x: &[Int]| -> Elem {
            let mut acc = vec![Int::from(0); i.rank()];
            for (a, c) in x.iter().enumerate() {
                for (t, v) in acc.iter_mut().zip(&i_elems[choice[a]]) {
                    *t += c * v;
                }
            }
            i.reduce(acc)
        };
        // Well defined on Z/m generators when m kills the image.
        let defined = (0..gens).all(|a| i.reduce(i_elems[choice[a]].iter().map(|v| v * &s.moduli()[a]).collect()).iter().all(|v| *v == Int::from(0)));
        if defined && image(s.unit()).iter().all(|v| *v == Int::from(0)) {
            out.push(s.elements().iter().map(|x| image(x)).collect());
        }
        let mut k = 0;
        while k < gens {
            choice[k] += 1;
            if choice[k] < i_elems.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == gens {
            return out;
        }
    }
}

/// Every normalized biadditive cochain on `S = F2[x]/x²` with values in `I`.
fn biadditive_cochains(s: &FiniteAlgebra, i: &Bimodule) -> Vec<Vec<Vec<Elem>>> {
    let els = s.elements();
    let i_elems = sqzlift_core::algebra::enumerate_group(i.moduli());
    // The additive basis of F2[x]/x² is (1, x); normalization leaves only f(x, x) free.
    i_elems
        .iter()
        .map(|fxx| {
            els.iter()
                .map(|a| els.iter().map(|b| i.reduce(fxx.iter().map(|v| v * &a[1] * &b[1]).collect())).collect())
                .collect()
        })
        .collect()
}

#[test]
fn cohomologous_cocycles_give_isomorphic_rings() {
    let s = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
    let bimodules = [Bimodule::quotient_of_regular(s.clone(), &[ints(&[0, 1])]), Bimodule::regular(s.clone())];
    let mut checked = 0;
    for i in &bimodules {
        let els = s.elements();
        let zero = CocycleTables::zero(&s, i);
        for f in biadditive_cochains(&s, i) {
            let base = CocycleTables { additive: zero.additive.clone(), multiplicative: f.clone() };
            let Ok(r0) = extension_from_cocycle(s.clone(), i, &base) else { continue };
            for g in normalized_additive_maps(&s, i) {
                // (δg)(a, b) = a·g(b) − g(ab) + g(a)·b.
                let shifted: Vec<Vec<Elem>> = (0..els.len())
                    .map(|a| {
                        (0..els.len())
                            .map(|b| {
                                let ab = s.index_of(&s.mul(&els[a], &els[b]));
                                let terms = [i.act_left(&els[a], &g[b]), g[ab].clone(), i.act_right(&g[a], &els[b])];
                                let v: Elem = (0..i.rank()).map(|t| &f[a][b][t] + &terms[0][t] - &terms[1][t] + &terms[2][t]).collect();
                                i.reduce(v)
                            })
                            .collect()
                    })
                    .collect();
                let tables = CocycleTables { additive: zero.additive.clone(), multiplicative: shifted };
                let r1 = extension_from_cocycle(s.clone(), i, &tables).expect("a cohomologous cochain is a cocycle");
                assert!(rings_isomorphic(r0.r(), r1.r()).unwrap());
                checked += 1;
            }
        }
    }
    assert!(checked >= 8, "{checked}");
}

#[test]
fn zero_cocycle_is_the_split_extension() {
    let s = Arc::new(FiniteAlgebra::trunc_poly(2, 2));
    let i = Bimodule::regular(s.clone());
    let split = split_square_zero(s.clone(), &i);
    let cocycle = extension_from_cocycle(s.clone(), &i, &CocycleTables::zero(&s, &i)).unwrap();
    assert!(rings_isomorphic(split.r(), cocycle.r()).unwrap());
    assert_eq!(split.r().order(), Some(Int::from(16)));
}
